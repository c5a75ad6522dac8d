//! PreGoeritz and Goeritz matrices of a checkerboard coloring, exact
//! determinants, and definiteness classification.

use thiserror::Error;

use crate::diagram::Coloring;
use crate::matrix::IntMat;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GoeritzError {
    #[error("Goeritz matrix of {knot} (coloring {coloring}) is degenerate (det = 0)")]
    Degenerate { knot: String, coloring: usize },
    #[error("pregoeritz matrix has fewer than 2 white regions; no minor to take")]
    TooSmall,
}

/// Where a form came from: knot name and which of the two colorings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormSource {
    pub knot: String,
    pub coloring: usize,
}

/// The full n x n matrix over the white regions; rows sum to zero.
#[derive(Debug, Clone)]
pub struct PreGoeritzMatrix {
    pub entries: IntMat,
    pub source: FormSource,
    /// Crossing-incidence degree of each white region (used for the default
    /// deleted index).
    pub degree: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Definiteness {
    Positive,
    Negative,
    Indefinite,
    Degenerate,
}

/// An (n-1) x (n-1) Goeritz matrix with its classification.
#[derive(Debug, Clone)]
pub struct GoeritzForm {
    pub rank: usize,
    pub gram: IntMat,
    pub deleted_index: usize,
    pub definiteness: Definiteness,
    pub source: FormSource,
}

/// Build the PreGoeritz matrix of a coloring: g_ij = -sum of eta over
/// crossings incident to white regions A_i and A_j, diagonal forced by zero
/// row sums.
pub fn pregoeritz(c: &Coloring) -> PreGoeritzMatrix {
    let n = c.white_regions.len();
    let mut m = IntMat::zero(n);
    let mut degree = vec![0u32; n];
    for crossing in 0..c.eta.len() {
        let (i, j) = c.white_pair(crossing);
        degree[i] += 1;
        if i != j {
            degree[j] += 1;
            m[(i, j)] -= c.eta[crossing] as i64;
            m[(j, i)] -= c.eta[crossing] as i64;
        }
    }
    for i in 0..n {
        let off: i64 = (0..n).filter(|&j| j != i).map(|j| m[(i, j)]).sum();
        m[(i, i)] = -off;
    }
    PreGoeritzMatrix {
        entries: m,
        source: FormSource { knot: c.knot.clone(), coloring: c.id },
        degree,
    }
}

/// Default deleted index: the white region of maximal incidence degree
/// (lowest index on ties).
pub fn default_deleted_index(pg: &PreGoeritzMatrix) -> usize {
    (0..pg.degree.len()).max_by_key(|&i| (pg.degree[i], usize::MAX - i)).unwrap_or(0)
}

/// Remove the k-th row and column and classify the resulting form.
pub fn goeritz(pg: &PreGoeritzMatrix, k: usize) -> Result<GoeritzForm, GoeritzError> {
    let n = pg.entries.size();
    if n < 2 {
        return Err(GoeritzError::TooSmall);
    }
    let gram = pg.entries.minor(k);
    let definiteness = definiteness(&gram);
    if definiteness == Definiteness::Degenerate {
        return Err(GoeritzError::Degenerate {
            knot: pg.source.knot.clone(),
            coloring: pg.source.coloring,
        });
    }
    Ok(GoeritzForm { rank: n - 1, gram, deleted_index: k, definiteness, source: pg.source.clone() })
}

/// Exact integer determinant.
pub fn determinant(m: &IntMat) -> i128 {
    m.det()
}

/// Classification by the exact signs of the leading principal minors.
pub fn definiteness(m: &IntMat) -> Definiteness {
    debug_assert!(m.is_symmetric());
    let n = m.size();
    if n == 0 {
        return Definiteness::Degenerate;
    }
    let minors = m.leading_principal_minors();
    let complete: Vec<i128> = minors.iter().take_while(|x| x.is_some()).map(|x| x.unwrap()).collect();
    if complete.len() == n && complete.iter().all(|&x| x != 0) {
        if complete.iter().all(|&x| x > 0) {
            return Definiteness::Positive;
        }
        if complete.iter().enumerate().all(|(i, &x)| if i % 2 == 0 { x < 0 } else { x > 0 }) {
            return Definiteness::Negative;
        }
        return Definiteness::Indefinite;
    }
    // a zero leading minor: definite is impossible; split on the full rank
    if m.det() == 0 {
        Definiteness::Degenerate
    } else {
        Definiteness::Indefinite
    }
}
