//! Directed firm networks.
//!
//! A link `(supplier, client)` means products flow from `supplier` to
//! `client` and orders flow the other way. Firms are identified internally by
//! dense [`FirmId`]s; the external token each firm was loaded or generated
//! with is retained for I/O.
//!
//! Both adjacency directions are stored in compressed sparse row form with
//! neighbor lists sorted ascending.

mod generate;
mod io;

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generate::{
    assign_industries, generate_random_directed, generate_scale_free, uniform_weights,
};
pub use io::{load_edge_list, read_edge_list, write_degree_ccdf, write_edge_list, write_labels};

/// Sentinel code for firms without an industry label.
pub const UNKNOWN_INDUSTRY: &str = "UNK";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[repr(transparent)]
#[serde(transparent)]
pub struct FirmId(pub u32);

impl FirmId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for FirmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Index into an [`IndustryTaxonomy`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[repr(transparent)]
#[serde(transparent)]
pub struct IndustryId(pub u16);

impl IndustryId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("network must contain at least one firm")]
    Empty,
    #[error("firm id {0} out of range for {1} firms")]
    FirmOutOfRange(u32, usize),
    #[error("self-loop on firm {firm}{}", line_suffix(*line))]
    SelfLoop { firm: String, line: Option<usize> },
    #[error("duplicate link {supplier} -> {client}{}", line_suffix(*line))]
    DuplicateLink {
        supplier: String,
        client: String,
        line: Option<usize>,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("industry weights: {0}")]
    InvalidWeights(String),
    #[error("taxonomy: {0}")]
    InvalidTaxonomy(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

fn line_suffix(line: Option<usize>) -> String {
    match line {
        Some(l) => format!(" at line {l}"),
        None => String::new(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TaxonomyLevel {
    #[default]
    Division,
    Group,
}

/// Set of industry codes a network's firms are labeled with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndustryTaxonomy {
    codes: Vec<String>,
    names: Vec<String>,
    level: TaxonomyLevel,
}

impl IndustryTaxonomy {
    /// Codes double as display names.
    pub fn from_codes<I, S>(codes: I, level: TaxonomyLevel) -> Result<Self, NetworkError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let codes: Vec<String> = codes.into_iter().map(Into::into).collect();
        let names = codes.clone();
        Self::new(codes, names, level)
    }

    pub fn new(
        codes: Vec<String>,
        names: Vec<String>,
        level: TaxonomyLevel,
    ) -> Result<Self, NetworkError> {
        if codes.len() != names.len() {
            return Err(NetworkError::InvalidTaxonomy(format!(
                "{} codes but {} names",
                codes.len(),
                names.len()
            )));
        }
        if codes.len() > u16::MAX as usize {
            return Err(NetworkError::InvalidTaxonomy("too many industries".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for c in &codes {
            if !seen.insert(c.as_str()) {
                return Err(NetworkError::InvalidTaxonomy(format!("duplicate code {c}")));
            }
        }
        Ok(Self {
            codes,
            names,
            level,
        })
    }

    /// Taxonomy holding only the `UNK` sentinel.
    pub fn unknown_only() -> Self {
        Self {
            codes: vec![UNKNOWN_INDUSTRY.to_string()],
            names: vec!["unknown".to_string()],
            level: TaxonomyLevel::Division,
        }
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn codes(&self) -> &[String] {
        &self.codes
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn level(&self) -> TaxonomyLevel {
        self.level
    }

    pub fn code(&self, id: IndustryId) -> &str {
        &self.codes[id.index()]
    }

    pub fn id_of(&self, code: &str) -> Option<IndustryId> {
        self.codes
            .iter()
            .position(|c| c == code)
            .map(|i| IndustryId(i as u16))
    }

    pub fn is_unknown(&self, id: IndustryId) -> bool {
        self.code(id) == UNKNOWN_INDUSTRY
    }

    /// Returns the id of `UNK`, appending it if absent.
    fn ensure_unknown(&mut self) -> IndustryId {
        match self.id_of(UNKNOWN_INDUSTRY) {
            Some(id) => id,
            None => {
                self.codes.push(UNKNOWN_INDUSTRY.to_string());
                self.names.push("unknown".to_string());
                IndustryId((self.codes.len() - 1) as u16)
            }
        }
    }

    pub fn ids(&self) -> impl Iterator<Item = IndustryId> {
        (0..self.codes.len()).map(|i| IndustryId(i as u16))
    }
}

/// Compressed sparse rows: `targets[offsets[i]..offsets[i + 1]]` are the
/// neighbors of row `i`, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<FirmId>,
}

impl Csr {
    fn build(firm_count: usize, pairs: &[(u32, u32)]) -> Self {
        let mut offsets = vec![0usize; firm_count + 1];
        for &(row, _) in pairs {
            offsets[row as usize + 1] += 1;
        }
        for i in 0..firm_count {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![FirmId(0); pairs.len()];
        for &(row, col) in pairs {
            let slot = &mut cursor[row as usize];
            targets[*slot] = FirmId(col);
            *slot += 1;
        }
        for i in 0..firm_count {
            targets[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        Self { offsets, targets }
    }

    #[inline]
    fn row(&self, i: usize) -> &[FirmId] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    fn row_len(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }
}

/// Immutable directed supplier-client graph with industry labels.
#[derive(Debug, Clone)]
pub struct FirmNetwork {
    labels: Vec<String>,
    label_index: OnceLock<HashMap<String, FirmId>>,
    suppliers: Csr,
    clients: Csr,
    industry_of: Vec<IndustryId>,
    taxonomy: IndustryTaxonomy,
}

impl PartialEq for FirmNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
            && self.suppliers == other.suppliers
            && self.clients == other.clients
            && self.industry_of == other.industry_of
            && self.taxonomy == other.taxonomy
    }
}

impl FirmNetwork {
    /// Builds a network from `(supplier, client)` pairs over firms
    /// `0..firm_count`. External labels default to the decimal firm id and
    /// every firm is labeled `UNK`.
    pub fn from_links(firm_count: usize, links: &[(u32, u32)]) -> Result<Self, NetworkError> {
        let labels = (0..firm_count).map(|i| i.to_string()).collect();
        Self::from_labeled_links(labels, links, None)
    }

    /// Links are validated for range, self-loops and duplicates. `line_of`
    /// maps a link index to its source line for error reporting.
    pub(crate) fn from_labeled_links(
        labels: Vec<String>,
        links: &[(u32, u32)],
        line_of: Option<&[usize]>,
    ) -> Result<Self, NetworkError> {
        let firm_count = labels.len();
        if firm_count == 0 {
            return Err(NetworkError::Empty);
        }
        if firm_count > u32::MAX as usize {
            return Err(NetworkError::InvalidParameter("too many firms".into()));
        }
        let line = |k: usize| line_of.map(|l| l[k]);
        for (k, &(s, c)) in links.iter().enumerate() {
            for id in [s, c] {
                if id as usize >= firm_count {
                    return Err(NetworkError::FirmOutOfRange(id, firm_count));
                }
            }
            if s == c {
                return Err(NetworkError::SelfLoop {
                    firm: labels[s as usize].clone(),
                    line: line(k),
                });
            }
        }
        let mut order: Vec<usize> = (0..links.len()).collect();
        order.sort_unstable_by_key(|&k| (links[k], k));
        for w in order.windows(2) {
            if links[w[0]] == links[w[1]] {
                let (s, c) = links[w[1]];
                return Err(NetworkError::DuplicateLink {
                    supplier: labels[s as usize].clone(),
                    client: labels[c as usize].clone(),
                    line: line(w[1]),
                });
            }
        }

        let reversed: Vec<(u32, u32)> = links.iter().map(|&(s, c)| (c, s)).collect();
        let clients = Csr::build(firm_count, links);
        let suppliers = Csr::build(firm_count, &reversed);
        Ok(Self {
            labels,
            label_index: OnceLock::new(),
            suppliers,
            clients,
            industry_of: vec![IndustryId(0); firm_count],
            taxonomy: IndustryTaxonomy::unknown_only(),
        })
    }

    /// Replaces industry labels. Every id must index into `taxonomy`.
    pub fn with_industries(
        mut self,
        taxonomy: IndustryTaxonomy,
        industry_of: Vec<IndustryId>,
    ) -> Result<Self, NetworkError> {
        if industry_of.len() != self.firm_count() {
            return Err(NetworkError::InvalidTaxonomy(format!(
                "{} labels for {} firms",
                industry_of.len(),
                self.firm_count()
            )));
        }
        if let Some(bad) = industry_of.iter().find(|id| id.index() >= taxonomy.len()) {
            return Err(NetworkError::InvalidTaxonomy(format!(
                "industry id {} outside taxonomy of {}",
                bad.0,
                taxonomy.len()
            )));
        }
        self.taxonomy = taxonomy;
        self.industry_of = industry_of;
        Ok(self)
    }

    pub(crate) fn with_unknown_filled(
        self,
        mut taxonomy: IndustryTaxonomy,
        industry_of: Vec<Option<IndustryId>>,
    ) -> Result<Self, NetworkError> {
        let ids = if industry_of.iter().any(Option::is_none) {
            let unk = taxonomy.ensure_unknown();
            industry_of.into_iter().map(|o| o.unwrap_or(unk)).collect()
        } else {
            industry_of.into_iter().flatten().collect()
        };
        self.with_industries(taxonomy, ids)
    }

    #[inline]
    pub fn firm_count(&self) -> usize {
        self.labels.len()
    }

    pub fn link_count(&self) -> usize {
        self.clients.targets.len()
    }

    pub fn firms(&self) -> impl ExactSizeIterator<Item = FirmId> {
        (0..self.firm_count() as u32).map(FirmId)
    }

    /// Firms supplying `firm` (the `n_i` suppliers an order is split between).
    #[inline]
    pub fn suppliers_of(&self, firm: FirmId) -> &[FirmId] {
        self.suppliers.row(firm.index())
    }

    #[inline]
    pub fn clients_of(&self, firm: FirmId) -> &[FirmId] {
        self.clients.row(firm.index())
    }

    #[inline]
    pub fn supplier_count(&self, firm: FirmId) -> usize {
        self.suppliers.row_len(firm.index())
    }

    #[inline]
    pub fn client_count(&self, firm: FirmId) -> usize {
        self.clients.row_len(firm.index())
    }

    pub fn degree(&self, firm: FirmId, kind: Degree) -> usize {
        match kind {
            Degree::In => self.supplier_count(firm),
            Degree::Out => self.client_count(firm),
            Degree::Total => self.supplier_count(firm) + self.client_count(firm),
        }
    }

    /// All links as `(supplier, client)`, sorted by supplier then client.
    pub fn links(&self) -> impl Iterator<Item = (FirmId, FirmId)> + '_ {
        self.firms()
            .flat_map(move |s| self.clients_of(s).iter().map(move |&c| (s, c)))
    }

    pub fn label(&self, firm: FirmId) -> &str {
        &self.labels[firm.index()]
    }

    pub fn firm_by_label(&self, label: &str) -> Option<FirmId> {
        self.label_index
            .get_or_init(|| {
                self.labels
                    .iter()
                    .enumerate()
                    .map(|(i, l)| (l.clone(), FirmId(i as u32)))
                    .collect()
            })
            .get(label)
            .copied()
    }

    pub fn taxonomy(&self) -> &IndustryTaxonomy {
        &self.taxonomy
    }

    #[inline]
    pub fn industry_of(&self, firm: FirmId) -> IndustryId {
        self.industry_of[firm.index()]
    }

    pub fn industry_code(&self, firm: FirmId) -> &str {
        self.taxonomy.code(self.industry_of(firm))
    }

    pub fn firms_in(&self, industry: IndustryId) -> Vec<FirmId> {
        self.firms()
            .filter(|&f| self.industry_of(f) == industry)
            .collect()
    }

    /// Complementary cumulative degree distribution over positive degrees:
    /// `(k, P(degree >= k))` with the probability taken over all firms.
    pub fn degree_ccdf(&self, kind: Degree) -> Vec<(usize, f64)> {
        let mut degrees: Vec<usize> = self
            .firms()
            .map(|f| self.degree(f, kind))
            .filter(|&d| d > 0)
            .collect();
        degrees.sort_unstable();
        let n = self.firm_count() as f64;
        let mut points = Vec::new();
        let mut i = 0;
        while i < degrees.len() {
            let d = degrees[i];
            points.push((d, (degrees.len() - i) as f64 / n));
            while i < degrees.len() && degrees[i] == d {
                i += 1;
            }
        }
        points
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Degree {
    In,
    Out,
    Total,
}

impl std::str::FromStr for Degree {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "in" => Ok(Degree::In),
            "out" => Ok(Degree::Out),
            "total" => Ok(Degree::Total),
            other => Err(format!("unknown degree kind '{other}' (in, out, total)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> FirmNetwork {
        FirmNetwork::from_links(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn adjacency_is_consistent() {
        let net = FirmNetwork::from_links(4, &[(0, 1), (2, 1), (1, 3), (3, 0)]).unwrap();
        assert_eq!(net.suppliers_of(FirmId(1)), &[FirmId(0), FirmId(2)]);
        assert_eq!(net.clients_of(FirmId(1)), &[FirmId(3)]);
        for s in net.firms() {
            for &c in net.clients_of(s) {
                assert!(net.suppliers_of(c).contains(&s));
            }
        }
        assert_eq!(net.links().count(), 4);
    }

    #[test]
    fn rejects_self_loops_and_duplicates() {
        assert!(matches!(
            FirmNetwork::from_links(2, &[(1, 1)]),
            Err(NetworkError::SelfLoop { .. })
        ));
        assert!(matches!(
            FirmNetwork::from_links(2, &[(0, 1), (0, 1)]),
            Err(NetworkError::DuplicateLink { .. })
        ));
        assert_eq!(FirmNetwork::from_links(0, &[]), Err(NetworkError::Empty));
    }

    #[test]
    fn opposite_links_are_not_duplicates() {
        let net = FirmNetwork::from_links(2, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(net.link_count(), 2);
    }

    #[test]
    fn chain_out_degree_ccdf() {
        let pts = chain().degree_ccdf(Degree::Out);
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].0, 1);
        assert!((pts[0].1 - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn star_out_degree_ccdf() {
        let links: Vec<(u32, u32)> = (1..10).map(|c| (0, c)).collect();
        let net = FirmNetwork::from_links(10, &links).unwrap();
        let pts = net.degree_ccdf(Degree::Out);
        assert_eq!(pts, vec![(9, 0.1)]);
        let total = net.degree_ccdf(Degree::Total);
        assert_eq!(total, vec![(1, 1.0), (9, 0.1)]);
    }

    #[test]
    fn linkless_network_has_empty_ccdf() {
        let net = FirmNetwork::from_links(5, &[]).unwrap();
        assert!(net.degree_ccdf(Degree::Total).is_empty());
    }

    #[test]
    fn default_labels_are_unknown() {
        let net = chain();
        assert!(net
            .firms()
            .all(|f| net.industry_code(f) == UNKNOWN_INDUSTRY));
        assert_eq!(net.firm_by_label("2"), Some(FirmId(2)));
    }

    #[test]
    fn taxonomy_rejects_duplicate_codes() {
        assert!(IndustryTaxonomy::from_codes(["A", "A"], TaxonomyLevel::Division).is_err());
    }
}
