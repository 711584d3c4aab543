//! Input-output tables and the Leontief inverse.
//!
//! `A[i][j]` is the value of sector `i`'s output used per unit of sector
//! `j`'s output. The Leontief inverse `L = (I - A)^-1` gives total (direct
//! plus indirect) requirements; its column sums are output multipliers.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stats::{pearson, IndustryRow, StatsError};

pub const POWER_ITERATIONS: usize = 200;
pub const POWER_TOLERANCE: f64 = 1e-9;
/// Largest accepted `max |(I - A) L - I|`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum IoTableError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("row {row}, column {col}: {message}")]
    Cell {
        row: usize,
        col: usize,
        message: String,
    },
    #[error("table is not square: {0}")]
    Shape(String),
    #[error("negative input coefficient {value} at row {row}, column {col}")]
    Negative { row: usize, col: usize, value: f64 },
    #[error("spectral radius of A is {0:.6} (must be < 1); I - A has no nonnegative inverse")]
    SpectralRadius(f64),
    #[error("I - A is singular")]
    Singular,
    #[error("inverse residual {0:e} exceeds {RESIDUAL_TOLERANCE:e}")]
    Residual(f64),
    #[error("{path}:{line}: {message}")]
    Mapping {
        path: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Square table of nonnegative input coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct IoTable {
    sectors: Vec<String>,
    coefficients: DMatrix<f64>,
}

impl IoTable {
    pub fn new(sectors: Vec<String>, coefficients: DMatrix<f64>) -> Result<Self, IoTableError> {
        if !coefficients.is_square() || coefficients.nrows() != sectors.len() {
            return Err(IoTableError::Shape(format!(
                "{} sectors, {}x{} coefficients",
                sectors.len(),
                coefficients.nrows(),
                coefficients.ncols()
            )));
        }
        let n = coefficients.nrows();
        for row in 0..n {
            for col in 0..n {
                let value = coefficients[(row, col)];
                if !value.is_finite() || value < 0.0 {
                    return Err(IoTableError::Negative { row, col, value });
                }
            }
        }
        Ok(Self {
            sectors,
            coefficients,
        })
    }

    pub fn sectors(&self) -> &[String] {
        &self.sectors
    }

    pub fn coefficients(&self) -> &DMatrix<f64> {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }
}

/// Loads a CSV whose header row names the sectors and whose body is the
/// square coefficient matrix. Cell locations in errors are 1-based, with
/// row 1 being the header.
pub fn load_io_table(path: &Path) -> Result<IoTable, IoTableError> {
    let file = File::open(path).map_err(|e| IoTableError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    read_io_table(file)
}

pub fn read_io_table<R: Read>(reader: R) -> Result<IoTable, IoTableError> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let sectors: Vec<String> = csv
        .headers()
        .map_err(|e| IoTableError::Cell {
            row: 1,
            col: 1,
            message: e.to_string(),
        })?
        .iter()
        .map(String::from)
        .collect();
    let k = sectors.len();
    if k == 0 {
        return Err(IoTableError::Shape("empty header".into()));
    }
    let mut values = Vec::with_capacity(k * k);
    let mut rows = 0;
    for (r, record) in csv.records().enumerate() {
        let row = r + 2;
        let record = record.map_err(|e| IoTableError::Cell {
            row,
            col: 1,
            message: e.to_string(),
        })?;
        if record.len() != k {
            return Err(IoTableError::Shape(format!(
                "row {row} has {} cells, header has {k}",
                record.len()
            )));
        }
        for (c, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| IoTableError::Cell {
                row,
                col: c + 1,
                message: format!("cannot parse '{cell}' as a number"),
            })?;
            if !v.is_finite() || v < 0.0 {
                return Err(IoTableError::Negative {
                    row,
                    col: c + 1,
                    value: v,
                });
            }
            values.push(v);
        }
        rows += 1;
    }
    if rows != k {
        return Err(IoTableError::Shape(format!(
            "{rows} body rows for {k} sectors"
        )));
    }
    IoTable::new(sectors, DMatrix::from_row_slice(k, k, &values))
}

/// Spectral radius of a nonnegative matrix by power iteration on `A + I`.
///
/// The shift makes the Perron root strictly dominant in modulus for any
/// nonnegative `A`, so the iteration settles even when `A` is periodic.
pub fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 0.0;
    }
    let shifted = a + DMatrix::<f64>::identity(n, n);
    let mut x = nalgebra::DVector::<f64>::from_element(n, 1.0 / n as f64);
    let mut estimate = f64::NAN;
    for _ in 0..POWER_ITERATIONS {
        let y = &shifted * &x;
        // x stays nonnegative with unit 1-norm, so the 1-norm of y is the
        // Rayleigh-like growth factor.
        let growth: f64 = y.iter().sum();
        x = y / growth;
        let done = (growth - estimate).abs() <= POWER_TOLERANCE * growth;
        estimate = growth;
        if done {
            break;
        }
    }
    (estimate - 1.0).max(0.0)
}

/// `(I - A)^-1` by LU with partial pivoting.
pub fn leontief_inverse(table: &IoTable) -> Result<DMatrix<f64>, IoTableError> {
    let a = table.coefficients();
    let n = a.nrows();
    let rho = spectral_radius(a);
    if rho >= 1.0 - POWER_TOLERANCE {
        return Err(IoTableError::SpectralRadius(rho));
    }
    let i_minus_a = DMatrix::<f64>::identity(n, n) - a;
    let inverse = i_minus_a
        .clone()
        .lu()
        .try_inverse()
        .ok_or(IoTableError::Singular)?;
    let residual = max_abs(&(&i_minus_a * &inverse - DMatrix::<f64>::identity(n, n)));
    if residual >= RESIDUAL_TOLERANCE {
        return Err(IoTableError::Residual(residual));
    }
    Ok(inverse)
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Reduction of the Leontief inverse to one number per sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    /// Output multipliers: `sum_i L[i][j]`.
    #[default]
    Column,
    /// `sum_j L[i][j]`.
    Row,
}

impl std::str::FromStr for Reduction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "column" => Ok(Self::Column),
            "row" => Ok(Self::Row),
            _ => Err(format!("unknown reduction '{s}' (column, row)")),
        }
    }
}

pub fn column_multipliers(l: &DMatrix<f64>) -> Vec<f64> {
    l.column_iter().map(|c| c.sum()).collect()
}

pub fn row_multipliers(l: &DMatrix<f64>) -> Vec<f64> {
    l.row_iter().map(|r| r.sum()).collect()
}

pub fn multipliers(l: &DMatrix<f64>, reduction: Reduction) -> Vec<f64> {
    match reduction {
        Reduction::Column => column_multipliers(l),
        Reduction::Row => row_multipliers(l),
    }
}

/// `IO_SECTOR<TAB>INDUSTRY_CODE` pairs, in file order.
pub fn read_sector_map<R: BufRead>(
    reader: R,
    name: &str,
) -> Result<Vec<(String, String)>, IoTableError> {
    let mut pairs = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (k, line) in reader.lines().enumerate() {
        let err = |message: String| IoTableError::Mapping {
            path: name.to_string(),
            line: k + 1,
            message,
        };
        let line = line.map_err(|e| err(e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut it = trimmed.split_whitespace();
        let (Some(sector), Some(industry), None) = (it.next(), it.next(), it.next()) else {
            return Err(err(format!(
                "expected 'SECTOR<TAB>INDUSTRY', got '{trimmed}'"
            )));
        };
        if !seen.insert(sector.to_string()) {
            return Err(err(format!("sector {sector} mapped twice")));
        }
        pairs.push((sector.to_string(), industry.to_string()));
    }
    Ok(pairs)
}

pub fn load_sector_map(path: &Path) -> Result<Vec<(String, String)>, IoTableError> {
    let file = File::open(path).map_err(|e| IoTableError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    read_sector_map(BufReader::new(file), &path.display().to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonPoint {
    pub industry: String,
    pub multiplier: f64,
    pub mean_size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub points: Vec<ComparisonPoint>,
    pub pearson: f64,
}

/// Pairs per-industry multipliers with simulated mean avalanche sizes and
/// correlates them.
///
/// Sectors mapped to the same industry contribute the mean of their
/// multipliers. Industries missing from either side are dropped. Points are
/// ordered as the industries appear in `means`.
pub fn compare_with_means(
    table: &IoTable,
    inverse: &DMatrix<f64>,
    sector_map: &[(String, String)],
    means: &[IndustryRow],
    reduction: Reduction,
) -> Result<Comparison, IoTableError> {
    let mult = multipliers(inverse, reduction);
    let index: HashMap<&str, usize> = table
        .sectors()
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut by_industry: HashMap<&str, (f64, usize)> = HashMap::new();
    for (sector, industry) in sector_map {
        let Some(&i) = index.get(sector.as_str()) else {
            continue;
        };
        let e = by_industry.entry(industry.as_str()).or_insert((0.0, 0));
        e.0 += mult[i];
        e.1 += 1;
    }
    let points: Vec<ComparisonPoint> = means
        .iter()
        .filter_map(|row| {
            by_industry
                .get(row.industry.as_str())
                .map(|&(sum, k)| ComparisonPoint {
                    industry: row.industry.clone(),
                    multiplier: sum / k as f64,
                    mean_size: row.mean,
                })
        })
        .collect();
    let x: Vec<f64> = points.iter().map(|p| p.multiplier).collect();
    let y: Vec<f64> = points.iter().map(|p| p.mean_size).collect();
    let r = pearson(&x, &y)?;
    Ok(Comparison { points, pearson: r })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[&[f64]]) -> IoTable {
        let k = rows.len();
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        IoTable::new(
            (0..k).map(|i| format!("S{i}")).collect(),
            DMatrix::from_row_slice(k, k, &flat),
        )
        .unwrap()
    }

    #[test]
    fn zero_table_from_csv() {
        let t = read_io_table("A,B\n0,0\n0,0\n".as_bytes()).unwrap();
        assert_eq!(t.sectors(), &["A".to_string(), "B".to_string()]);
        assert_eq!(t.coefficients(), &DMatrix::<f64>::zeros(2, 2));
    }

    #[test]
    fn csv_errors_carry_locations() {
        assert!(matches!(
            read_io_table("A,B\n0,-0.1\n0,0\n".as_bytes()),
            Err(IoTableError::Negative { row: 2, col: 2, .. })
        ));
        assert!(matches!(
            read_io_table("A,B,C\n0,0,0\n0,0,0\n".as_bytes()),
            Err(IoTableError::Shape(_))
        ));
        assert!(matches!(
            read_io_table("A,B\n0,0,0\n0,0\n".as_bytes()),
            Err(IoTableError::Shape(_))
        ));
        assert!(matches!(
            read_io_table("A,B\n0,x\n0,0\n".as_bytes()),
            Err(IoTableError::Cell { row: 2, col: 2, .. })
        ));
    }

    #[test]
    fn identity_and_triangular_inverses() {
        let l = leontief_inverse(&table(&[&[0.0, 0.0], &[0.0, 0.0]])).unwrap();
        assert_eq!(l, DMatrix::<f64>::identity(2, 2));
        let l = leontief_inverse(&table(&[&[0.0, 0.0], &[0.5, 0.0]])).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.5, 1.0]);
        assert!(max_abs(&(l - expected)) < 1e-15);
    }

    #[test]
    fn divergent_tables_are_rejected() {
        let err = leontief_inverse(&table(&[&[1.0, 0.0], &[0.0, 1.0]])).unwrap_err();
        assert!(matches!(err, IoTableError::SpectralRadius(r) if (r - 1.0).abs() < 1e-6));
        // Periodic: eigenvalues +-1.
        assert!(leontief_inverse(&table(&[&[0.0, 1.0], &[1.0, 0.0]])).is_err());
    }

    #[test]
    fn spectral_radius_of_known_matrices() {
        // Nilpotent: the shifted matrix is a Jordan block, so convergence is
        // slow but from above.
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.5, 0.0]);
        assert!(spectral_radius(&m) < 0.01);
        let m = DMatrix::from_row_slice(2, 2, &[0.2, 0.3, 0.1, 0.4]);
        // Eigenvalues of [[0.2,0.3],[0.1,0.4]]: 0.5 and 0.1.
        assert!((spectral_radius(&m) - 0.5).abs() < 1e-7);
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 0.8, 0.8, 0.0]);
        assert!((spectral_radius(&m) - 0.8).abs() < 1e-7);
    }

    #[test]
    fn multipliers_by_hand() {
        assert_eq!(
            column_multipliers(&DMatrix::<f64>::identity(3, 3)),
            vec![1.0; 3]
        );
        let l = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.5, 1.0]);
        assert_eq!(column_multipliers(&l), vec![1.5, 1.0]);
        assert_eq!(row_multipliers(&l), vec![1.0, 1.5]);
    }

    #[test]
    fn permuting_sectors_permutes_multipliers() {
        let a = table(&[&[0.1, 0.2, 0.0], &[0.0, 0.3, 0.1], &[0.2, 0.0, 0.1]]);
        let perm = [2usize, 0, 1];
        let src = a.coefficients();
        let permuted = DMatrix::from_fn(3, 3, |i, j| src[(perm[i], perm[j])]);
        let b = IoTable::new(a.sectors().to_vec(), permuted).unwrap();
        let ma = column_multipliers(&leontief_inverse(&a).unwrap());
        let mb = column_multipliers(&leontief_inverse(&b).unwrap());
        for i in 0..3 {
            assert!((mb[i] - ma[perm[i]]).abs() < 1e-12);
        }
    }

    #[test]
    fn sector_map_parsing() {
        let m = read_sector_map("# map\nS0\tAGR\nS1 MFG\n".as_bytes(), "map").unwrap();
        assert_eq!(
            m,
            vec![("S0".into(), "AGR".into()), ("S1".into(), "MFG".into())]
        );
        assert!(read_sector_map("S0\tAGR\nS0\tMFG\n".as_bytes(), "map").is_err());
        assert!(read_sector_map("S0\n".as_bytes(), "map").is_err());
    }

    #[test]
    fn comparison_pairs_by_industry() {
        let t = table(&[&[0.0, 0.0, 0.0], &[0.5, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        let l = leontief_inverse(&t).unwrap();
        let map = vec![
            ("S0".to_string(), "A".to_string()),
            ("S1".to_string(), "B".to_string()),
            ("S2".to_string(), "B".to_string()),
        ];
        let row = |i: &str, m| IndustryRow {
            industry: i.into(),
            mean: m,
            std: 0.0,
            count: 1,
        };
        let means = vec![row("B", 2.0), row("A", 5.0), row("C", 1.0)];
        let cmp = compare_with_means(&t, &l, &map, &means, Reduction::Column).unwrap();
        assert_eq!(cmp.points.len(), 2);
        assert_eq!(cmp.points[0].industry, "B");
        assert!((cmp.points[0].multiplier - 1.0).abs() < 1e-12);
        assert!((cmp.points[1].multiplier - 1.5).abs() < 1e-12);
        assert!((cmp.pearson - 1.0).abs() < 1e-12);
    }
}
