//! Statistics over avalanche outcomes.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fmt::g17;
use crate::network::FirmNetwork;
use crate::simulation::{RunSummary, SizeHistogram, SizeMoments, SourceMode};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("no samples left after excluding zeros")]
    Empty,
    #[error("need at least 2 samples at or above xmin = {xmin}, got {got}")]
    TooFewTailSamples { xmin: f64, got: usize },
    #[error("all tail samples equal xmin; exponent undefined")]
    DegenerateTail,
    #[error("xmin must be positive, got {0}")]
    BadThreshold(f64),
    #[error("vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 paired values")]
    TooShort,
    #[error("{0} vector is constant; correlation undefined")]
    Constant(&'static str),
    #[error("{0}")]
    Precondition(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// `(s, P(X >= s))` over distinct observed sizes, ascending.
pub fn ccdf(sizes: &[u64], exclude_zero: bool) -> Result<Vec<(u64, f64)>, StatsError> {
    let mut sorted: Vec<u64> = sizes
        .iter()
        .copied()
        .filter(|&s| !(exclude_zero && s == 0))
        .collect();
    sorted.sort_unstable();
    let mut counts: Vec<(u64, u64)> = Vec::new();
    for s in sorted {
        match counts.last_mut() {
            Some((v, c)) if *v == s => *c += 1,
            _ => counts.push((s, 1)),
        }
    }
    ccdf_from_counts(counts, exclude_zero)
}

/// CCDF of a histogram. Log-binned sizes appear at their bin's lower edge.
pub fn ccdf_from_histogram(
    hist: &SizeHistogram,
    exclude_zero: bool,
) -> Result<Vec<(u64, f64)>, StatsError> {
    ccdf_from_counts(hist.iter(), exclude_zero)
}

fn ccdf_from_counts(
    counts: impl IntoIterator<Item = (u64, u64)>,
    exclude_zero: bool,
) -> Result<Vec<(u64, f64)>, StatsError> {
    let counts: Vec<(u64, u64)> = counts
        .into_iter()
        .filter(|&(s, c)| c > 0 && !(exclude_zero && s == 0))
        .collect();
    let total: u64 = counts.iter().map(|&(_, c)| c).sum();
    if total == 0 {
        return Err(StatsError::Empty);
    }
    let mut remaining = total;
    let mut points = Vec::with_capacity(counts.len());
    for (s, c) in counts {
        points.push((s, remaining as f64 / total as f64));
        remaining -= c;
    }
    Ok(points)
}

/// Hill maximum-likelihood exponent of a continuous power-law tail:
/// `alpha = 1 + n / sum(ln(x / xmin))` over samples `x >= xmin`.
pub fn hill_mle(samples: &[f64], xmin: f64) -> Result<f64, StatsError> {
    hill_mle_weighted(samples.iter().map(|&x| (x, 1)), xmin)
}

/// Hill estimate over `(value, multiplicity)` pairs.
pub fn hill_mle_weighted(
    samples: impl IntoIterator<Item = (f64, u64)>,
    xmin: f64,
) -> Result<f64, StatsError> {
    if !xmin.is_finite() || xmin <= 0.0 {
        return Err(StatsError::BadThreshold(xmin));
    }
    let mut n: u64 = 0;
    let mut log_sum = 0.0;
    for (x, c) in samples {
        if x >= xmin && c > 0 {
            n += c;
            log_sum += c as f64 * (x / xmin).ln();
        }
    }
    if n < 2 {
        return Err(StatsError::TooFewTailSamples {
            xmin,
            got: n as usize,
        });
    }
    if log_sum <= 0.0 {
        return Err(StatsError::DegenerateTail);
    }
    Ok(1.0 + n as f64 / log_sum)
}

pub fn hill_mle_histogram(hist: &SizeHistogram, xmin: f64) -> Result<f64, StatsError> {
    hill_mle_weighted(hist.iter().map(|(s, c)| (s as f64, c)), xmin)
}

/// Streaming mean and population variance.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            self.mean
        }
    }

    pub fn std(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            (self.m2 / self.count as f64).sqrt()
        }
    }
}

/// Two-pass mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Some((mean, var.sqrt()))
}

/// Whether zero-size events count toward industry means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ZeroSizes {
    #[default]
    Include,
    Exclude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndustryRow {
    pub industry: String,
    pub mean: f64,
    pub std: f64,
    pub count: u64,
}

impl IndustryRow {
    /// Whether `[mean - std, mean + std]` intervals intersect.
    pub fn overlaps(&self, other: &IndustryRow) -> bool {
        self.mean - self.std <= other.mean + other.std
            && other.mean - other.std <= self.mean + self.std
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IndustryStats {
    pub rows: Vec<IndustryRow>,
    /// Runs left out because they were not sourced from a single industry.
    pub skipped: Vec<String>,
}

/// Mean and population standard deviation of avalanche size per source
/// industry, one row per industry-sourced run (in input order, runs for the
/// same industry merged).
pub fn industry_summary(runs: &[RunSummary], zeros: ZeroSizes) -> IndustryStats {
    let mut stats = IndustryStats::default();
    let mut merged: Vec<(String, SizeMoments)> = Vec::new();
    for (k, run) in runs.iter().enumerate() {
        let Some(code) = run.source_industry() else {
            stats
                .skipped
                .push(format!("run {k}: source is '{}'", run.config.source));
            continue;
        };
        match merged.iter_mut().find(|(c, _)| c == code) {
            Some((_, m)) => m.merge(&run.moments),
            None => merged.push((code.to_string(), run.moments)),
        }
    }
    for (industry, m) in merged {
        let m = match zeros {
            ZeroSizes::Include => m,
            ZeroSizes::Exclude => m.without_zeros(),
        };
        if m.count == 0 {
            stats.skipped.push(format!("{industry}: no events"));
            continue;
        }
        stats.rows.push(IndustryRow {
            industry,
            mean: m.mean(),
            std: m.std(),
            count: m.count,
        });
    }
    stats
}

/// Industry row computed directly from per-event sizes.
pub fn industry_row_from_sizes(
    industry: &str,
    sizes: &[u64],
    zeros: ZeroSizes,
) -> Option<IndustryRow> {
    let mut w = Welford::default();
    for &s in sizes {
        if zeros == ZeroSizes::Exclude && s == 0 {
            continue;
        }
        w.push(s as f64);
    }
    (w.count() > 0).then(|| IndustryRow {
        industry: industry.to_string(),
        mean: w.mean(),
        std: w.std(),
        count: w.count(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvolvementRow {
    pub industry: String,
    pub firms: u64,
    pub expectation: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InvolvementStats {
    pub rows: Vec<InvolvementRow>,
}

/// Per-industry average over firms of `involvements / events`.
///
/// `UNK` and industries with no firms are omitted.
pub fn involvement_expectation(
    summary: &RunSummary,
    net: &FirmNetwork,
) -> Result<InvolvementStats, StatsError> {
    if summary.firm_involvement.len() != net.firm_count() {
        return Err(StatsError::Precondition(format!(
            "run has {} firms, network has {}",
            summary.firm_involvement.len(),
            net.firm_count()
        )));
    }
    if summary.config.source != SourceMode::AllFirms {
        return Err(StatsError::Precondition(format!(
            "involvement expectation needs sources drawn from all firms, run used '{}'",
            summary.config.source
        )));
    }
    if summary.events == 0 {
        return Err(StatsError::Precondition("run has no events".into()));
    }
    let tax = net.taxonomy();
    let mut sums = vec![0.0f64; tax.len()];
    let mut firms = vec![0u64; tax.len()];
    let events = summary.events as f64;
    for f in net.firms() {
        let i = net.industry_of(f).index();
        sums[i] += summary.firm_involvement[f.index()] as f64 / events;
        firms[i] += 1;
    }
    let rows = tax
        .ids()
        .filter(|&id| !tax.is_unknown(id) && firms[id.index()] > 0)
        .map(|id| InvolvementRow {
            industry: tax.code(id).to_string(),
            firms: firms[id.index()],
            expectation: sums[id.index()] / firms[id.index()] as f64,
        })
        .collect();
    Ok(InvolvementStats { rows })
}

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::TooShort);
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(StatsError::Constant("x"));
    }
    if syy == 0.0 {
        return Err(StatsError::Constant("y"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

pub fn write_ccdf<W: Write>(points: &[(u64, f64)], mut out: W) -> std::io::Result<()> {
    writeln!(out, "size,ccdf")?;
    for &(s, p) in points {
        writeln!(out, "{s},{}", g17(p))?;
    }
    Ok(())
}

pub fn write_industry_stats<W: Write>(stats: &IndustryStats, mut out: W) -> std::io::Result<()> {
    writeln!(out, "industry,mean,std,count")?;
    for r in &stats.rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.industry,
            g17(r.mean),
            g17(r.std),
            r.count
        )?;
    }
    Ok(())
}

pub fn write_involvement<W: Write>(stats: &InvolvementStats, mut out: W) -> std::io::Result<()> {
    writeln!(out, "industry,expectation")?;
    for r in &stats.rows {
        writeln!(out, "{},{}", r.industry, g17(r.expectation))?;
    }
    Ok(())
}

/// Reads `industry,mean,std,count` rows as written by [`write_industry_stats`].
pub fn read_industry_stats<R: BufRead>(reader: R) -> Result<IndustryStats, StatsError> {
    let mut stats = IndustryStats::default();
    let mut seen_header = false;
    for (k, line) in reader.lines().enumerate() {
        let line_no = k + 1;
        let err = |message: String| StatsError::Parse {
            line: line_no,
            message,
        };
        let line = line.map_err(|e| err(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            seen_header = true;
            if line != "industry,mean,std,count" {
                return Err(err(format!(
                    "expected header 'industry,mean,std,count', got '{line}'"
                )));
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(err(format!("expected 4 fields, got {}", fields.len())));
        }
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| err(format!("'{s}': {e}")))
        };
        stats.rows.push(IndustryRow {
            industry: fields[0].trim().to_string(),
            mean: num(fields[1])?,
            std: num(fields[2])?,
            count: fields[3]
                .trim()
                .parse()
                .map_err(|e| err(format!("'{}': {e}", fields[3])))?,
        });
    }
    Ok(stats)
}
