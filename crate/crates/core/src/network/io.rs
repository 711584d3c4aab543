//! Edge-list and label-file ingestion.
//!
//! Edge files hold one `SUPPLIER<TAB>CLIENT` link per line, label files one
//! `FIRM<TAB>INDUSTRY` pair per line. Any whitespace separates the two
//! tokens; blank lines and lines starting with `#` are skipped.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{FirmNetwork, IndustryId, IndustryTaxonomy, NetworkError, TaxonomyLevel};
use crate::fmt::g17;

/// Loads a network from an edge file and an optional label file.
///
/// Firms listed in the label file get dense ids in label-file order; firms
/// first seen in the edge file follow in order of appearance. Firms missing
/// from the label file are labeled `UNK`.
pub fn load_edge_list(
    edge_path: &Path,
    label_path: Option<&Path>,
) -> Result<FirmNetwork, NetworkError> {
    let open = |p: &Path| {
        File::open(p)
            .map(BufReader::new)
            .map_err(|e| NetworkError::Io {
                path: p.display().to_string(),
                message: e.to_string(),
            })
    };
    let edges = open(edge_path)?;
    let labels = label_path.map(open).transpose()?;
    read_edge_list(
        edges,
        &edge_path.display().to_string(),
        labels.map(|r| (r, label_path.unwrap().display().to_string())),
    )
}

/// Reader-based form of [`load_edge_list`]; names are used in error messages.
pub fn read_edge_list<R: BufRead, L: BufRead>(
    edges: R,
    edge_name: &str,
    labels: Option<(L, String)>,
) -> Result<FirmNetwork, NetworkError> {
    let mut ids = IdMap::default();
    let mut codes: Vec<Option<String>> = Vec::new();

    if let Some((reader, name)) = labels {
        for_each_pair(reader, &name, |line, firm, code| {
            let before = ids.len();
            let id = ids.intern(firm);
            if id as usize != before {
                return Err(parse_err(&name, line, format!("firm {firm} labeled twice")));
            }
            codes.push(Some(code.to_string()));
            Ok(())
        })?;
    }

    let mut links = Vec::new();
    let mut lines = Vec::new();
    for_each_pair(edges, edge_name, |line, s, c| {
        links.push((ids.intern(s), ids.intern(c)));
        lines.push(line);
        Ok(())
    })?;
    codes.resize(ids.len(), None);

    let mut distinct: Vec<&str> = codes.iter().flatten().map(String::as_str).collect();
    distinct.sort_unstable();
    distinct.dedup();
    let taxonomy = IndustryTaxonomy::from_codes(distinct.iter().copied(), TaxonomyLevel::Division)?;
    let code_ids: HashMap<&str, IndustryId> = distinct
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, IndustryId(i as u16)))
        .collect();
    let industry_of: Vec<Option<IndustryId>> = codes
        .iter()
        .map(|c| c.as_deref().map(|c| code_ids[c]))
        .collect();

    FirmNetwork::from_labeled_links(ids.labels, &links, Some(&lines))?
        .with_unknown_filled(taxonomy, industry_of)
}

#[derive(Default)]
struct IdMap {
    index: HashMap<String, u32>,
    labels: Vec<String>,
}

impl IdMap {
    fn len(&self) -> usize {
        self.labels.len()
    }

    fn intern(&mut self, token: &str) -> u32 {
        if let Some(&id) = self.index.get(token) {
            return id;
        }
        let id = self.labels.len() as u32;
        self.index.insert(token.to_string(), id);
        self.labels.push(token.to_string());
        id
    }
}

fn parse_err(path: &str, line: usize, message: String) -> NetworkError {
    NetworkError::Parse {
        path: path.to_string(),
        line,
        message,
    }
}

/// Calls `f(line_number, first, second)` for each data line (1-based lines).
fn for_each_pair<R: BufRead>(
    reader: R,
    name: &str,
    mut f: impl FnMut(usize, &str, &str) -> Result<(), NetworkError>,
) -> Result<(), NetworkError> {
    for (k, line) in reader.lines().enumerate() {
        let no = k + 1;
        let line = line.map_err(|e| parse_err(name, no, e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => f(no, a, b)?,
            _ => {
                return Err(parse_err(
                    name,
                    no,
                    format!("expected two whitespace-separated fields, got '{trimmed}'"),
                ))
            }
        }
    }
    Ok(())
}

/// Writes links as `SUPPLIER<TAB>CLIENT` using external labels.
pub fn write_edge_list<W: Write>(net: &FirmNetwork, mut out: W) -> std::io::Result<()> {
    for (s, c) in net.links() {
        writeln!(out, "{}\t{}", net.label(s), net.label(c))?;
    }
    Ok(())
}

/// Writes every firm as `FIRM<TAB>INDUSTRY` in firm-id order, so reloading
/// with this file reproduces the same dense ids.
pub fn write_labels<W: Write>(net: &FirmNetwork, mut out: W) -> std::io::Result<()> {
    for f in net.firms() {
        writeln!(out, "{}\t{}", net.label(f), net.industry_code(f))?;
    }
    Ok(())
}

pub fn write_degree_ccdf<W: Write>(points: &[(usize, f64)], mut out: W) -> std::io::Result<()> {
    writeln!(out, "degree,ccdf")?;
    for &(k, p) in points {
        writeln!(out, "{k},{}", g17(p))?;
    }
    Ok(())
}
