//! Upper-bound certificates (slice facts, band moves, known values), the
//! certificate graph, and monotone bound propagation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::obstruct::InvariantRecord;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertifyError {
    #[error("certificate references unknown knot {0:?}")]
    UnknownKnot(String),
    #[error("conflicting known values for {knot}: {a} vs {b}")]
    ConflictingKnownValue { knot: String, a: u8, b: u8 },
    #[error("band move framing {framing} for {src} -> {target} is outside {{-1, 0, 1}}")]
    BadFraming { src: String, target: String, framing: i8 },
    #[error("band move {src} -> {target}: target has larger crossing number and no known-value entry")]
    SuspectTarget { src: String, target: String },
    #[error("bounds inconsistent at {knot}: lower {lower} > upper {upper}")]
    Inconsistent { knot: String, lower: u8, upper: u8 },
}

/// One trusted fact from the certificate ledger.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertKind {
    Slice { knot: String },
    Known { knot: String, gamma4: u8 },
    BandMove { source: String, framing: i8, target: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(flatten)]
    pub kind: CertKind,
    #[serde(default)]
    pub provenance: String,
}

/// Mirror names ("-10_9") identify the same census node as the base name.
pub fn normalize_name(name: &str) -> &str {
    name.strip_prefix('-').unwrap_or(name)
}

/// Crossing number parsed from names like "10_9", "9_31", "11n_83";
/// composite or nonstandard names give None.
pub fn crossing_number(name: &str) -> Option<u32> {
    let head = name.split('_').next()?;
    let digits: String = head.chars().take_while(|c| c.is_ascii_digit()).collect();
    if digits.is_empty() || name.contains('#') {
        None
    } else {
        digits.parse().ok()
    }
}

#[derive(Debug, Clone)]
pub struct BandEdge {
    pub source: String,
    pub framing: i8,
    pub target: String,
    pub provenance: String,
}

#[derive(Debug, Clone, Default)]
pub struct NodeInfo {
    pub in_census: bool,
    pub slice: bool,
    pub known_gamma4: Option<u8>,
    /// Provenance of a `known` certificate, carried into derivation chains.
    pub known_provenance: Option<String>,
}

/// Knots as nodes, band moves as edges, slice facts and known values as
/// node attributes.
#[derive(Debug, Clone, Default)]
pub struct CertificateGraph {
    pub nodes: BTreeMap<String, NodeInfo>,
    pub edges: Vec<BandEdge>,
    /// Certificates whose source is not in the census (dropped, kept for
    /// reporting).
    pub skipped: Vec<String>,
}

/// Build the graph from the ledger, the census invariant table, and the
/// known-value table for auxiliary knots.
pub fn ingest(
    certs: &[Certificate],
    table: &[InvariantRecord],
    known: &[(String, u8)],
) -> Result<CertificateGraph, CertifyError> {
    let mut g = CertificateGraph::default();
    for rec in table {
        g.nodes.insert(
            rec.name.clone(),
            NodeInfo { in_census: true, slice: rec.slice, ..NodeInfo::default() },
        );
    }
    for (name, gamma4) in known {
        let node = g.nodes.entry(name.clone()).or_default();
        if let Some(prev) = node.known_gamma4 {
            if prev != *gamma4 {
                return Err(CertifyError::ConflictingKnownValue {
                    knot: name.clone(),
                    a: prev,
                    b: *gamma4,
                });
            }
        }
        node.known_gamma4 = Some(*gamma4);
    }
    // node facts first, edges second: ingest outcome is independent of the
    // ledger's ordering
    for cert in certs.iter().filter(|c| !matches!(c.kind, CertKind::BandMove { .. })) {
        match &cert.kind {
            CertKind::Slice { knot } => {
                let name = normalize_name(knot).to_string();
                let node = g.nodes.entry(name.clone()).or_default();
                if node.in_census && !node.slice {
                    // table says non-slice, ledger says slice
                    return Err(CertifyError::ConflictingKnownValue { knot: name, a: 0, b: 1 });
                }
                node.slice = true;
            }
            CertKind::Known { knot, gamma4 } => {
                let name = normalize_name(knot).to_string();
                let node = g.nodes.entry(name.clone()).or_default();
                if let Some(prev) = node.known_gamma4 {
                    if prev != *gamma4 {
                        return Err(CertifyError::ConflictingKnownValue {
                            knot: name,
                            a: prev,
                            b: *gamma4,
                        });
                    }
                }
                node.known_gamma4 = Some(*gamma4);
                if !cert.provenance.is_empty() {
                    node.known_provenance = Some(cert.provenance.clone());
                }
            }
            CertKind::BandMove { .. } => unreachable!("filtered"),
        }
    }
    for cert in certs {
        let CertKind::BandMove { source, framing, target } = &cert.kind else { continue };
        let source = normalize_name(source).to_string();
        let target = normalize_name(target).to_string();
        if !(-1..=1).contains(framing) {
            return Err(CertifyError::BadFraming { src: source, target, framing: *framing });
        }
        if !g.nodes.get(&source).is_some_and(|n| n.in_census) {
            g.skipped.push(format!("band move {source} -> {target}: source not in census"));
            continue;
        }
        // sanity screen first: a band move may not point at a bigger knot
        // unless the target carries its own known value
        let bigger = match (crossing_number(&source), crossing_number(&target)) {
            (Some(s), Some(t)) => t > s,
            _ => false,
        };
        let target_node = g.nodes.get(&target);
        let has_value = target_node.is_some_and(|n| n.known_gamma4.is_some() || n.slice);
        if bigger && !has_value {
            return Err(CertifyError::SuspectTarget { src: source, target });
        }
        if !target_node.is_some_and(|n| n.in_census || n.known_gamma4.is_some() || n.slice) {
            return Err(CertifyError::UnknownKnot(target));
        }
        g.edges.push(BandEdge {
            source,
            framing: *framing,
            target,
            provenance: cert.provenance.clone(),
        });
    }
    Ok(g)
}

/// Bound interval for one knot, with the derivation chain.
#[derive(Debug, Clone, Serialize)]
pub struct Bounds {
    pub lower: u8,
    /// None = unresolved upper bound.
    pub upper: Option<u8>,
    pub sources: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundState {
    pub bounds: BTreeMap<String, Bounds>,
}

/// Fixed point of the monotone update rules:
///   upper(K) <- 1 if K is slice,
///   upper(K) <- min(upper(K), known(K)),
///   upper(K) <- min over band moves K -> K' of (1 if K' slice else upper(K')+1),
///   lower(K) = max(1, obstruction bound).
/// Aborts with the offending knot when lower > upper.
pub fn propagate(
    g: &CertificateGraph,
    obstruction_lower: &BTreeMap<String, (u8, String)>,
) -> Result<BoundState, CertifyError> {
    let mut bounds: BTreeMap<String, Bounds> = BTreeMap::new();
    for (name, node) in &g.nodes {
        let mut lower = 1u8;
        let mut upper = None;
        let mut sources = Vec::new();
        if node.in_census {
            if let Some((bound, why)) = obstruction_lower.get(name) {
                if *bound > lower {
                    lower = *bound;
                    sources.push(format!("lower {bound}: {why}"));
                }
            }
        }
        if let Some(v) = node.known_gamma4 {
            upper = Some(v);
            if node.in_census {
                match &node.known_provenance {
                    Some(p) => sources.push(format!("upper {v}: known value ({p})")),
                    None => sources.push(format!("upper {v}: known value")),
                }
            } else {
                lower = v;
            }
        }
        if node.slice {
            if upper.is_none_or(|u| u > 1) {
                upper = Some(1);
            }
            sources.push("upper 1: slice".to_string());
        }
        bounds.insert(name.clone(), Bounds { lower, upper, sources });
    }
    // band-move fixed point (bounds only tighten; terminates)
    loop {
        let mut changed = false;
        for edge in &g.edges {
            let target = &g.nodes[&edge.target];
            let candidate = if target.slice {
                Some(1)
            } else {
                bounds[&edge.target].upper.map(|u| u.saturating_add(1))
            };
            let Some(candidate) = candidate else { continue };
            let entry = bounds.get_mut(&edge.source).expect("source node exists");
            if entry.upper.is_none_or(|u| candidate < u) {
                entry.upper = Some(candidate);
                entry.sources.push(format!(
                    "upper {candidate}: band move to {} (framing {}{}{})",
                    edge.target,
                    edge.framing,
                    if edge.provenance.is_empty() { "" } else { ", " },
                    edge.provenance,
                ));
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for (name, b) in &bounds {
        if let Some(u) = b.upper {
            if b.lower > u {
                return Err(CertifyError::Inconsistent { knot: name.clone(), lower: b.lower, upper: u });
            }
        }
    }
    Ok(BoundState { bounds })
}

/// Final per-knot values and aggregate counts over the census knots.
#[derive(Debug, Clone, Serialize)]
pub struct CensusResolution {
    pub resolved: BTreeMap<String, u8>,
    pub unresolved: BTreeMap<String, (u8, Option<u8>)>,
    pub counts: BTreeMap<u8, usize>,
}

pub fn resolve_census(g: &CertificateGraph, state: &BoundState) -> CensusResolution {
    let mut resolved = BTreeMap::new();
    let mut unresolved = BTreeMap::new();
    let mut counts: BTreeMap<u8, usize> = BTreeMap::new();
    for (name, node) in &g.nodes {
        if !node.in_census {
            continue;
        }
        let b = &state.bounds[name];
        match b.upper {
            Some(u) if u == b.lower => {
                resolved.insert(name.clone(), u);
                *counts.entry(u).or_default() += 1;
            }
            other => {
                unresolved.insert(name.clone(), (b.lower, other));
            }
        }
    }
    CensusResolution { resolved, unresolved, counts }
}
