//! End-to-end census pipeline: table ingestion, per-knot obstruction
//! dispatch, bound propagation, and report assembly.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{self, Certificate, CertifyError};
use crate::diagram::{DiagramError, KnotDiagram};
use crate::goeritz::{
    default_deleted_index, determinant, goeritz, pregoeritz, Definiteness, GoeritzForm,
};
use crate::lattice::DEFAULT_NODE_CAP;
use crate::obstruct::{
    congruence_lower_bound, donaldson_obstruction, linking_form, moebius_obstruction,
    InvariantRecord, ObstructError,
};

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {detail}")]
    Parse { path: PathBuf, line: u64, detail: String },
    #[error("knot {knot}: {source}")]
    BadDiagram { knot: String, source: DiagramError },
    #[error("knot {knot}: {detail}")]
    DataIntegrity { knot: String, detail: String },
    #[error("knot {knot}: {source}")]
    Obstruction { knot: String, source: ObstructError },
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error("knot {0:?} is not in the census")]
    UnknownKnot(String),
}

#[derive(Debug, Clone)]
pub struct CensusConfig {
    pub knots_file: PathBuf,
    pub known_file: PathBuf,
    pub certificates_file: PathBuf,
    pub expected_file: Option<PathBuf>,
    pub parallelism: usize,
    pub node_cap: u64,
}

impl CensusConfig {
    pub fn new(knots: impl Into<PathBuf>, known: impl Into<PathBuf>, certs: impl Into<PathBuf>) -> Self {
        CensusConfig {
            knots_file: knots.into(),
            known_file: known.into(),
            certificates_file: certs.into(),
            expected_file: None,
            parallelism: 1,
            node_cap: DEFAULT_NODE_CAP,
        }
    }
}

/// One row of the knot table: tabulated invariants plus the PD diagram.
#[derive(Debug, Clone)]
pub struct KnotRow {
    pub record: InvariantRecord,
    pub diagram: KnotDiagram,
}

pub fn load_knot_table(path: &Path) -> Result<Vec<KnotRow>, CensusError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let mut rows = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| csv_error(path, e))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let raw: RawKnotRow = record.deserialize(Some(&headers)).map_err(|e| CensusError::Parse {
            path: path.to_path_buf(),
            line,
            detail: e.to_string(),
        })?;
        let diagram = KnotDiagram::parse(&raw.name, &raw.pd_code).map_err(|e| CensusError::Parse {
            path: path.to_path_buf(),
            line,
            detail: format!("{}: {e}", raw.name),
        })?;
        rows.push(KnotRow {
            record: InvariantRecord {
                name: raw.name,
                signature: raw.signature,
                arf: raw.arf,
                determinant: raw.determinant,
                slice: raw.slice,
                alternating: raw.alternating,
            },
            diagram,
        });
    }
    if rows.is_empty() {
        return Err(CensusError::Parse {
            path: path.to_path_buf(),
            line: 1,
            detail: "empty knot table".into(),
        });
    }
    Ok(rows)
}

#[derive(Debug, Deserialize)]
struct RawKnotRow {
    name: String,
    pd_code: String,
    signature: i64,
    arf: u8,
    determinant: u64,
    slice: bool,
    alternating: bool,
}

fn csv_error(path: &Path, e: csv::Error) -> CensusError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    CensusError::Parse { path: path.to_path_buf(), line, detail: e.to_string() }
}

pub fn load_known_table(path: &Path) -> Result<Vec<(String, u8)>, CensusError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut out = Vec::new();
    for result in reader.deserialize::<(String, u8)>() {
        out.push(result.map_err(|e| csv_error(path, e))?);
    }
    Ok(out)
}

pub fn load_certificates(path: &Path) -> Result<Vec<Certificate>, CensusError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CensusError::Io { path: path.to_path_buf(), source: e })?;
    serde_json::from_str(&text).map_err(|e| CensusError::Parse {
        path: path.to_path_buf(),
        line: e.line() as u64,
        detail: e.to_string(),
    })
}

pub fn load_expected(path: &Path) -> Result<BTreeMap<u8, BTreeSet<String>>, CensusError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CensusError::Io { path: path.to_path_buf(), source: e })?;
    let raw: BTreeMap<String, BTreeSet<String>> =
        serde_json::from_str(&text).map_err(|e| CensusError::Parse {
            path: path.to_path_buf(),
            line: e.line() as u64,
            detail: e.to_string(),
        })?;
    let mut out = BTreeMap::new();
    for (k, v) in raw {
        let value: u8 = k.parse().map_err(|_| CensusError::Parse {
            path: path.to_path_buf(),
            line: 0,
            detail: format!("expected-values key {k:?} is not an integer"),
        })?;
        out.insert(value, v);
    }
    Ok(out)
}

/// Per-ℓ summary of an embedding sweep, as carried in the report.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub ell: u64,
    pub embeddable: bool,
    pub nodes: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Vec<i64>>>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub capped: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObstructionDetail {
    /// Class-4 congruence bound; nothing further to compute.
    Congruence,
    /// Embedding obstruction over the square-divisor sweep.
    Donaldson { mirrored: bool, fired: bool, sweeps: Vec<Vec<SweepSummary>> },
    /// Linking-form obstruction on a cyclic double-branched-cover homology.
    Moebius { order: u64, q: u64, fired: bool },
    /// Obstruction inapplicable; the reason is recorded.
    Skipped { reason: String },
    /// No lower-bound machinery ran (class 0/±2 knot resolved by certificates).
    None,
}

/// Outcome of the lower-bound stage for one knot.
#[derive(Debug, Clone, Serialize)]
pub struct KnotAnalysis {
    pub name: String,
    pub class: u8,
    pub alternating: bool,
    pub determinant: u64,
    pub lower_bound: u8,
    pub lower_reason: String,
    pub obstruction: ObstructionDetail,
    pub micros: u64,
}

/// Both Goeritz forms of a diagram (default deleted index), with the
/// integrity checks the table promises: |det| equals the tabulated
/// determinant for both colorings, and alternating diagrams give one
/// positive and one negative definite form.
pub fn checked_forms(row: &KnotRow) -> Result<(GoeritzForm, GoeritzForm), CensusError> {
    let name = &row.record.name;
    let (c0, c1) = row
        .diagram
        .checkerboard()
        .map_err(|e| CensusError::BadDiagram { knot: name.clone(), source: e })?;
    let mut forms = Vec::with_capacity(2);
    for c in [&c0, &c1] {
        let pg = pregoeritz(c);
        let k = default_deleted_index(&pg);
        let form = goeritz(&pg, k).map_err(|e| CensusError::DataIntegrity {
            knot: name.clone(),
            detail: e.to_string(),
        })?;
        let det = determinant(&form.gram).unsigned_abs();
        if det != u128::from(row.record.determinant) {
            return Err(CensusError::DataIntegrity {
                knot: name.clone(),
                detail: format!(
                    "coloring {}: |det(Goeritz)| = {det} but the table says {}",
                    c.id, row.record.determinant
                ),
            });
        }
        forms.push(form);
    }
    let (f0, f1) = (forms.remove(0), forms.remove(0));
    if row.record.alternating {
        let pair = (f0.definiteness, f1.definiteness);
        let ok = matches!(
            pair,
            (Definiteness::Positive, Definiteness::Negative)
                | (Definiteness::Negative, Definiteness::Positive)
        );
        if !ok {
            return Err(CensusError::DataIntegrity {
                knot: name.clone(),
                detail: format!("alternating diagram has definiteness pair {pair:?}"),
            });
        }
    }
    Ok((f0, f1))
}

fn pick(forms: &(GoeritzForm, GoeritzForm), want: Definiteness) -> Option<&GoeritzForm> {
    [&forms.0, &forms.1].into_iter().find(|f| f.definiteness == want)
}

/// Lower-bound stage for one knot: congruence class dispatch as in the
/// census method (class 4 by congruence; alternating classes ±2/0 by the
/// embedding obstruction, working on the mirror for class 6; non-alternating
/// by the linking form where its hypotheses hold).
pub fn analyze_knot(row: &KnotRow, node_cap: u64) -> Result<KnotAnalysis, CensusError> {
    let start = Instant::now();
    let name = row.record.name.clone();
    let wrap_obstruct = |e: ObstructError| CensusError::Obstruction { knot: name.clone(), source: e };
    row.record.validate().map_err(wrap_obstruct)?;
    let class = row.record.congruence_class().map_err(wrap_obstruct)?;

    let mut lower_bound = 1u8;
    let mut lower_reason = String::new();
    let obstruction;

    if let Some(bound) = congruence_lower_bound(&row.record) {
        lower_bound = bound;
        lower_reason = "congruence class 4".into();
        obstruction = ObstructionDetail::Congruence;
        // the diagram integrity checks still run
        checked_forms(row)?;
    } else if row.record.alternating {
        let forms = checked_forms(row)?;
        let (mirrored, outcome) = if class == 6 {
            // work on the mirror: negated record, mirror diagram's forms
            let mirror_row = KnotRow {
                record: InvariantRecord {
                    signature: -row.record.signature,
                    ..row.record.clone()
                },
                diagram: row.diagram.mirror(),
            };
            let mforms = checked_forms(&mirror_row)?;
            let neg = pick(&mforms, Definiteness::Negative).expect("alternating pair");
            (true, donaldson_obstruction(&mirror_row.record, &[neg], node_cap).map_err(wrap_obstruct)?)
        } else if class == 2 {
            let neg = pick(&forms, Definiteness::Negative).expect("alternating pair");
            (false, donaldson_obstruction(&row.record, &[neg], node_cap).map_err(wrap_obstruct)?)
        } else {
            let pos = pick(&forms, Definiteness::Positive).expect("alternating pair");
            let neg = pick(&forms, Definiteness::Negative).expect("alternating pair");
            (false, donaldson_obstruction(&row.record, &[pos, neg], node_cap).map_err(wrap_obstruct)?)
        };
        let fired = outcome.lower_bound.is_some();
        if let Some(bound) = outcome.lower_bound {
            lower_bound = bound;
            lower_reason = "embedding obstruction".into();
        }
        let sweeps = outcome
            .sweeps
            .iter()
            .map(|side| {
                side.iter()
                    .map(|e| SweepSummary {
                        ell: e.ell,
                        embeddable: e.witness.is_some(),
                        nodes: e.nodes,
                        witness: e.witness.as_ref().map(|w| w.0.clone()),
                        capped: e.capped,
                    })
                    .collect()
            })
            .collect();
        obstruction = ObstructionDetail::Donaldson { mirrored, fired, sweeps };
    } else {
        let forms = checked_forms(row)?;
        match linking_form(&forms.0) {
            Ok(lf) => match moebius_obstruction(&lf) {
                Ok(out) => {
                    let fired = out.is_some();
                    if let Some(bound) = out {
                        lower_bound = bound;
                        lower_reason = "linking form obstruction".into();
                    }
                    obstruction = ObstructionDetail::Moebius {
                        order: lf.order(),
                        q: lf.canonical_q(),
                        fired,
                    };
                }
                Err(e @ ObstructError::PreconditionFailed { .. }) => {
                    obstruction = ObstructionDetail::Skipped { reason: e.to_string() };
                }
                Err(e) => return Err(wrap_obstruct(e)),
            },
            Err(e @ ObstructError::NonCyclic { .. }) => {
                obstruction = ObstructionDetail::Skipped { reason: e.to_string() };
            }
            Err(e) => return Err(wrap_obstruct(e)),
        }
    }
    Ok(KnotAnalysis {
        name,
        class,
        alternating: row.record.alternating,
        determinant: row.record.determinant,
        lower_bound,
        lower_reason,
        obstruction,
        micros: start.elapsed().as_micros() as u64,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct KnotReport {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma4: Option<u8>,
    pub lower: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<u8>,
    pub class: u8,
    pub alternating: bool,
    pub determinant: u64,
    pub obstruction: ObstructionDetail,
    pub derivation: Vec<String>,
    pub micros: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusReport {
    pub total: usize,
    pub counts: BTreeMap<u8, usize>,
    pub unresolved: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect_match: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub expect_mismatches: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skipped_certificates: Vec<String>,
    pub knots: Vec<KnotReport>,
}

impl CensusReport {
    /// Exit contract: fully resolved and, when an expected file was given,
    /// matching it.
    pub fn success(&self) -> bool {
        self.unresolved.is_empty() && self.expect_match != Some(false)
    }
}

pub fn run_census(cfg: &CensusConfig) -> Result<CensusReport, CensusError> {
    let rows = load_knot_table(&cfg.knots_file)?;
    let known = load_known_table(&cfg.known_file)?;
    let certs = load_certificates(&cfg.certificates_file)?;
    let expected = cfg.expected_file.as_deref().map(load_expected).transpose()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism.max(1))
        .build()
        .expect("thread pool");
    let analyses: Vec<Result<KnotAnalysis, CensusError>> =
        pool.install(|| rows.par_iter().map(|row| analyze_knot(row, cfg.node_cap)).collect());
    let mut by_name: BTreeMap<String, KnotAnalysis> = BTreeMap::new();
    for a in analyses {
        let a = a?;
        by_name.insert(a.name.clone(), a);
    }

    let table: Vec<InvariantRecord> = rows.iter().map(|r| r.record.clone()).collect();
    let graph = certify::ingest(&certs, &table, &known)?;
    let lower: BTreeMap<String, (u8, String)> = by_name
        .values()
        .filter(|a| a.lower_bound > 1)
        .map(|a| (a.name.clone(), (a.lower_bound, a.lower_reason.clone())))
        .collect();
    let state = certify::propagate(&graph, &lower)?;
    let resolution = certify::resolve_census(&graph, &state);

    let (expect_match, expect_mismatches) = match &expected {
        None => (None, Vec::new()),
        Some(exp) => {
            let mut mismatches = Vec::new();
            let mut got: BTreeMap<u8, BTreeSet<String>> = BTreeMap::new();
            for (name, v) in &resolution.resolved {
                got.entry(*v).or_default().insert(name.clone());
            }
            for (value, want) in exp {
                let have = got.remove(value).unwrap_or_default();
                for name in want.difference(&have) {
                    mismatches.push(format!("expected gamma4({name}) = {value}"));
                }
                for name in have.difference(want) {
                    mismatches.push(format!("gamma4({name}) = {value} not in the expected list"));
                }
            }
            for (value, extra) in got {
                for name in extra {
                    mismatches.push(format!("gamma4({name}) = {value} not expected at all"));
                }
            }
            for name in resolution.unresolved.keys() {
                mismatches.push(format!("{name} unresolved"));
            }
            (Some(mismatches.is_empty()), mismatches)
        }
    };

    // report rows in table order
    let knots: Vec<KnotReport> = rows
        .iter()
        .map(|row| {
            let a = &by_name[&row.record.name];
            let b = &state.bounds[&row.record.name];
            KnotReport {
                name: a.name.clone(),
                gamma4: resolution.resolved.get(&a.name).copied(),
                lower: b.lower,
                upper: b.upper,
                class: a.class,
                alternating: a.alternating,
                determinant: a.determinant,
                obstruction: a.obstruction.clone(),
                derivation: b.sources.clone(),
                micros: a.micros,
            }
        })
        .collect();

    Ok(CensusReport {
        total: rows.len(),
        counts: resolution.counts,
        unresolved: resolution.unresolved.keys().cloned().collect(),
        expect_match,
        expect_mismatches,
        skipped_certificates: graph.skipped.clone(),
        knots,
    })
}

/// Everything `knot NAME` prints: the analysis plus both Goeritz matrices.
#[derive(Debug, Clone, Serialize)]
pub struct KnotDetail {
    pub report: KnotReport,
    pub white_regions: (usize, usize),
    pub forms: Vec<FormSummary>,
    pub signature: i64,
    pub arf: u8,
    pub slice: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FormSummary {
    pub coloring: usize,
    pub mirror: bool,
    pub rows: Vec<Vec<i64>>,
    pub definiteness: String,
    pub deleted_index: usize,
    pub det: i64,
}

pub fn knot_detail(name: &str, cfg: &CensusConfig) -> Result<KnotDetail, CensusError> {
    let report = run_census(cfg)?;
    let rows = load_knot_table(&cfg.knots_file)?;
    let norm = certify::normalize_name(name);
    let row = rows
        .iter()
        .find(|r| r.record.name == norm)
        .ok_or_else(|| CensusError::UnknownKnot(name.to_string()))?;
    let knot_report = report
        .knots
        .iter()
        .find(|k| k.name == norm)
        .expect("census covers the table")
        .clone();
    let (c0, c1) = row
        .diagram
        .checkerboard()
        .map_err(|e| CensusError::BadDiagram { knot: norm.to_string(), source: e })?;
    let mut forms = Vec::new();
    let push_forms = |diagram: &KnotDiagram, mirror: bool, forms: &mut Vec<FormSummary>| {
        let (a, b) = diagram.checkerboard().expect("validated diagram");
        for c in [&a, &b] {
            let pg = pregoeritz(c);
            let k = default_deleted_index(&pg);
            if let Ok(f) = goeritz(&pg, k) {
                forms.push(FormSummary {
                    coloring: c.id,
                    mirror,
                    rows: f.gram.rows(),
                    definiteness: format!("{:?}", f.definiteness),
                    deleted_index: k,
                    det: determinant(&f.gram) as i64,
                });
            }
        }
    };
    push_forms(&row.diagram, false, &mut forms);
    if knot_report.class == 6 && row.record.alternating {
        push_forms(&row.diagram.mirror(), true, &mut forms);
    }
    Ok(KnotDetail {
        report: knot_report,
        white_regions: (c0.white_regions.len(), c1.white_regions.len()),
        forms,
        signature: row.record.signature,
        arf: row.record.arf,
        slice: row.record.slice,
    })
}
