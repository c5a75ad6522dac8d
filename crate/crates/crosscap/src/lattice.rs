//! Exact decision procedure for embedding a definite integral lattice into a
//! diagonal definite lattice, divisor enumeration for the ⊕[ℓ] sweep, and
//! Smith normal form with transforms.

use thiserror::Error;

use crate::goeritz::{definiteness, Definiteness};
use crate::matrix::IntMat;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("gram matrix is not symmetric")]
    NonSymmetric,
    #[error("gram matrix is not definite ({0:?})")]
    NotDefinite(Definiteness),
    #[error("target rank {target} is smaller than the gram rank {rank}")]
    TargetRankTooSmall { rank: usize, target: usize },
}

/// All divisors l of d such that d/l is a perfect square.
pub fn square_divisors(d: u64) -> Vec<u64> {
    assert!(d >= 1);
    let mut out = Vec::new();
    for l in 1..=d {
        if d % l == 0 {
            let q = d / l;
            let s = q.isqrt();
            if s * s == q {
                out.push(l);
            }
        }
    }
    out
}

/// A negative definite Gram matrix to be embedded into (Z^N, -Id).
/// Positive definite input is negated on construction (sign canonicalization);
/// the ⊕[ℓ] block is expected to be part of `gram` already.
#[derive(Debug, Clone)]
pub struct EmbeddingProblem {
    gram: IntMat,
    target_rank: usize,
}

impl EmbeddingProblem {
    pub fn new(gram: IntMat, target_rank: usize) -> Result<Self, LatticeError> {
        gram.require_symmetric().map_err(|_| LatticeError::NonSymmetric)?;
        let gram = match definiteness(&gram) {
            Definiteness::Negative => gram,
            Definiteness::Positive => gram.negated(),
            other => return Err(LatticeError::NotDefinite(other)),
        };
        if target_rank < gram.size() {
            return Err(LatticeError::TargetRankTooSmall { rank: gram.size(), target: target_rank });
        }
        Ok(EmbeddingProblem { gram, target_rank })
    }

    pub fn gram(&self) -> &IntMat {
        &self.gram
    }

    pub fn target_rank(&self) -> usize {
        self.target_rank
    }
}

/// Rows express the lattice basis in the target's orthonormal basis:
/// `M (-Id) M^T = gram`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness(pub Vec<Vec<i64>>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbeddingStatus {
    Embeddable(Witness),
    NotEmbeddable,
    /// The node cap was hit before the search finished; never expected at the
    /// ranks handled here.
    ResourceExhausted,
}

#[derive(Debug, Clone)]
pub struct EmbeddingResult {
    pub status: EmbeddingStatus,
    pub nodes_searched: u64,
}

pub const DEFAULT_NODE_CAP: u64 = 1_000_000_000;

pub fn embed(p: &EmbeddingProblem) -> EmbeddingResult {
    embed_with_cap(p, DEFAULT_NODE_CAP)
}

/// Backtracking search. Basis vectors are assigned in decreasing |g_ii|
/// order to integer vectors of the prescribed norms and pairwise products.
///
/// Pruning is by canonical representatives under the signed permutations of
/// the target coordinates: the columns untouched by the rows placed so far
/// form a suffix, and any partial solution can be normalized, by signed
/// permutations acting only on that suffix, so the new row's entries there
/// are nonnegative and nonincreasing. Only such rows are generated, which
/// loses no embeddings.
pub fn embed_with_cap(p: &EmbeddingProblem, cap: u64) -> EmbeddingResult {
    let r = p.gram.size();
    let n = p.target_rank;
    if r == 0 {
        return EmbeddingResult { status: EmbeddingStatus::Embeddable(Witness(Vec::new())), nodes_searched: 0 };
    }
    // work on A = -gram (positive definite pairwise products), rows permuted
    // so the largest diagonal entries are assigned first
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by_key(|&i| p.gram[(i, i)]);
    let a: Vec<Vec<i64>> =
        (0..r).map(|i| (0..r).map(|j| -p.gram[(order[i], order[j])]).collect()).collect();

    struct Ctx {
        a: Vec<Vec<i64>>,
        r: usize,
        n: usize,
        cap: u64,
        nodes: u64,
        capped: bool,
        rows: Vec<Vec<i64>>,
    }

    impl Ctx {
        fn free_start(&self) -> usize {
            self.rows
                .iter()
                .map(|row| row.iter().rposition(|&x| x != 0).map_or(0, |i| i + 1))
                .max()
                .unwrap_or(0)
        }

        /// Depth-first over rows; within a row, depth-first over coordinates.
        fn place_row(&mut self, k: usize) -> bool {
            if k == self.r {
                return true;
            }
            let fs = self.free_start();
            let dots: Vec<i64> = (0..k).map(|j| self.a[k][j]).collect();
            // suffix norms of each placed row, for Cauchy-Schwarz pruning
            let suffix: Vec<Vec<i64>> = self
                .rows
                .iter()
                .map(|row| {
                    let mut s = vec![0i64; self.n + 1];
                    for i in (0..self.n).rev() {
                        s[i] = s[i + 1] + row[i] * row[i];
                    }
                    s
                })
                .collect();
            let norm = self.a[k][k];
            let mut v = vec![0i64; self.n];
            self.next_entry(k, 0, norm, fs, i64::MAX, &dots, &suffix, &mut vec![0; k], &mut v)
        }

        #[allow(clippy::too_many_arguments)]
        fn next_entry(
            &mut self,
            k: usize,
            i: usize,
            rem: i64,
            fs: usize,
            prev_free: i64,
            dots: &[i64],
            suffix: &[Vec<i64>],
            partial: &mut Vec<i64>,
            v: &mut Vec<i64>,
        ) -> bool {
            self.nodes += 1;
            if self.nodes > self.cap {
                self.capped = true;
                return false;
            }
            for j in 0..partial.len() {
                let gap = dots[j] - partial[j];
                if gap * gap > rem * suffix[j][i] {
                    return false;
                }
            }
            if i == self.n {
                if rem != 0 {
                    return false;
                }
                self.rows.push(v.clone());
                if self.place_row(k + 1) {
                    return true;
                }
                self.rows.pop();
                return false;
            }
            let hi = (rem as u64).isqrt() as i64;
            let (lo, hi) = if i >= fs { (0, hi.min(prev_free)) } else { (-hi, hi) };
            for x in (lo..=hi).rev() {
                v[i] = x;
                for j in 0..partial.len() {
                    partial[j] += x * self.rows[j][i];
                }
                let pf = if i >= fs { x } else { prev_free };
                if self.next_entry(k, i + 1, rem - x * x, fs, pf, dots, suffix, partial, v) {
                    return true;
                }
                for j in 0..partial.len() {
                    partial[j] -= x * self.rows[j][i];
                }
                if self.capped {
                    return false;
                }
            }
            v[i] = 0;
            false
        }
    }

    let mut ctx = Ctx { a, r, n, cap, nodes: 0, capped: false, rows: Vec::new() };
    let found = ctx.place_row(0);
    let nodes_searched = ctx.nodes;
    if found {
        // un-permute rows back to the original basis order
        let mut m = vec![vec![0i64; n]; r];
        for (pos, &oi) in order.iter().enumerate() {
            m[oi] = ctx.rows[pos].clone();
        }
        // re-verify the witness identity exactly
        for i in 0..r {
            for j in 0..r {
                let dot: i64 = (0..n).map(|t| m[i][t] * m[j][t]).sum();
                assert_eq!(-dot, p.gram[(i, j)], "witness identity violated at ({i},{j})");
            }
        }
        EmbeddingResult { status: EmbeddingStatus::Embeddable(Witness(m)), nodes_searched }
    } else if ctx.capped {
        EmbeddingResult { status: EmbeddingStatus::ResourceExhausted, nodes_searched }
    } else {
        EmbeddingResult { status: EmbeddingStatus::NotEmbeddable, nodes_searched }
    }
}

/// Smith normal form: D = U * M * V with U, V unimodular and the diagonal
/// divisibility chain d_1 | d_2 | ... ; `left_inv` is U^{-1}, used to track
/// cokernel generators back to the original basis.
#[derive(Debug, Clone)]
pub struct SmithNormalForm {
    pub diag: Vec<i128>,
    pub left: Vec<Vec<i128>>,
    pub left_inv: Vec<Vec<i128>>,
    pub right: Vec<Vec<i128>>,
}

pub fn smith_normal_form(m: &IntMat) -> SmithNormalForm {
    let n = m.size();
    let mut d: Vec<Vec<i128>> = m.rows().iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let ident = |n: usize| -> Vec<Vec<i128>> {
        (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
    };
    let mut u = ident(n);
    let mut uinv = ident(n);
    let mut v = ident(n);

    let mul = |x: i128, y: i128| x.checked_mul(y).expect("snf overflow");

    // row_i -= f * row_j on D and U; U^{-1} gets the inverse column op
    macro_rules! row_op {
        ($i:expr, $j:expr, $f:expr) => {{
            let (i, j, f) = ($i, $j, $f);
            for t in 0..n {
                d[i][t] -= mul(f, d[j][t]);
                u[i][t] -= mul(f, u[j][t]);
                let add = mul(f, uinv[t][i]);
                uinv[t][j] += add;
            }
        }};
    }
    macro_rules! col_op {
        ($i:expr, $j:expr, $f:expr) => {{
            let (i, j, f) = ($i, $j, $f);
            for t in 0..n {
                d[t][i] -= mul(f, d[t][j]);
                v[t][i] -= mul(f, v[t][j]);
            }
        }};
    }

    for k in 0..n {
        loop {
            // smallest nonzero entry of the trailing submatrix to (k,k)
            let mut best: Option<(usize, usize)> = None;
            for i in k..n {
                for j in k..n {
                    if d[i][j] != 0
                        && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            if bi != k {
                d.swap(bi, k);
                u.swap(bi, k);
                for t in 0..n {
                    uinv[t].swap(bi, k);
                }
            }
            if bj != k {
                for t in 0..n {
                    d[t].swap(bj, k);
                    v[t].swap(bj, k);
                }
            }
            let mut clean = true;
            for i in k + 1..n {
                let f = d[i][k].div_euclid(d[k][k]);
                if f != 0 {
                    row_op!(i, k, f);
                }
                if d[i][k] != 0 {
                    clean = false;
                }
            }
            for j in k + 1..n {
                let f = d[k][j].div_euclid(d[k][k]);
                if f != 0 {
                    col_op!(j, k, f);
                }
                if d[k][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold in any entry the pivot does not divide
            let mut fixed = true;
            'scan: for i in k + 1..n {
                for j in k + 1..n {
                    if d[i][j] % d[k][k] != 0 {
                        row_op!(k, i, -1);
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        if d[k][k] < 0 {
            for t in 0..n {
                d[k][t] = -d[k][t];
                u[k][t] = -u[k][t];
                uinv[t][k] = -uinv[t][k];
            }
        }
    }
    SmithNormalForm {
        diag: (0..n).map(|i| d[i][i]).collect(),
        left: u,
        left_inv: uinv,
        right: v,
    }
}
