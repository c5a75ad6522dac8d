//! Small exact integer matrices.
//!
//! Everything downstream (Goeritz forms, embedding problems, Smith normal
//! form) works with symmetric integer matrices of rank at most ~12, so a
//! dense row-major representation with checked 128-bit arithmetic is plenty.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix rows have unequal lengths")]
    Ragged,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric at ({i},{j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("could not parse integer entry {text:?} on line {line}")]
    BadEntry { line: usize, text: String },
    #[error("empty matrix text")]
    Empty,
}

/// Dense square integer matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMat {
    n: usize,
    a: Vec<i64>,
}

impl IntMat {
    pub fn zero(n: usize) -> Self {
        IntMat { n, a: vec![0; n * n] }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, MatrixError> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            if rows.iter().any(|x| x.len() != rows[0].len()) {
                return Err(MatrixError::Ragged);
            }
            return Err(MatrixError::NotSquare { rows: n, cols: r.len() });
        }
        let mut m = IntMat::zero(n);
        for (i, r) in rows.iter().enumerate() {
            for (j, &x) in r.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn require_symmetric(&self) -> Result<(), MatrixError> {
        for i in 0..self.n {
            for j in 0..i {
                if self[(i, j)] != self[(j, i)] {
                    return Err(MatrixError::NotSymmetric { i, j });
                }
            }
        }
        Ok(())
    }

    pub fn negated(&self) -> IntMat {
        let mut m = self.clone();
        for x in &mut m.a {
            *x = -*x;
        }
        m
    }

    /// Minor with row and column `k` removed.
    pub fn minor(&self, k: usize) -> IntMat {
        assert!(k < self.n && self.n > 0);
        let mut m = IntMat::zero(self.n - 1);
        let keep: Vec<usize> = (0..self.n).filter(|&i| i != k).collect();
        for (ii, &i) in keep.iter().enumerate() {
            for (jj, &j) in keep.iter().enumerate() {
                m[(ii, jj)] = self[(i, j)];
            }
        }
        m
    }

    /// Block sum `self ⊕ [x]`.
    pub fn direct_sum_entry(&self, x: i64) -> IntMat {
        let mut m = IntMat::zero(self.n + 1);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = self[(i, j)];
            }
        }
        m[(self.n, self.n)] = x;
        m
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self[(i, j)]).collect()).collect()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination with row
    /// pivoting. Intermediates are minors of the input, which for the sizes
    /// handled here stay far inside i128; arithmetic is checked regardless.
    pub fn det(&self) -> i128 {
        let n = self.n;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<i128> = self.a.iter().map(|&x| x as i128).collect();
        let at = |a: &Vec<i128>, i: usize, j: usize| a[i * n + j];
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if at(&a, k, k) == 0 {
                match (k + 1..n).find(|&r| at(&a, r, k) != 0) {
                    Some(r) => {
                        for j in 0..n {
                            a.swap(k * n + j, r * n + j);
                        }
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            let pivot = at(&a, k, k);
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = at(&a, i, j)
                        .checked_mul(pivot)
                        .and_then(|x| x.checked_sub(at(&a, i, k).checked_mul(at(&a, k, j)).expect("det overflow")))
                        .expect("det overflow");
                    a[i * n + j] = num / prev;
                }
                a[i * n + k] = 0;
            }
            prev = pivot;
        }
        sign * at(&a, n - 1, n - 1)
    }

    /// Leading principal minors `det(A[..k][..k])` for k = 1..=n, via Bareiss
    /// without pivoting. Returns None past the first zero pivot (the
    /// remaining minors are not produced; the caller decides what a zero
    /// minor means).
    pub fn leading_principal_minors(&self) -> Vec<Option<i128>> {
        let n = self.n;
        let mut out = vec![None; n];
        if n == 0 {
            return out;
        }
        let mut a: Vec<i128> = self.a.iter().map(|&x| x as i128).collect();
        let at = |a: &Vec<i128>, i: usize, j: usize| a[i * n + j];
        let mut prev = 1i128;
        for k in 0..n {
            let pivot = at(&a, k, k);
            out[k] = Some(pivot);
            if pivot == 0 || k == n - 1 {
                break;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = at(&a, i, j)
                        .checked_mul(pivot)
                        .and_then(|x| x.checked_sub(at(&a, i, k).checked_mul(at(&a, k, j)).expect("minor overflow")))
                        .expect("minor overflow");
                    a[i * n + j] = num / prev;
                }
            }
            prev = pivot;
        }
        out
    }

    /// Parse the plain-text format: one row per line, whitespace-separated
    /// integers. Blank lines are ignored.
    pub fn parse_text(text: &str) -> Result<Self, MatrixError> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut row = Vec::new();
            for tok in line.split_whitespace() {
                let v: i64 = tok.parse().map_err(|_| MatrixError::BadEntry {
                    line: lineno + 1,
                    text: tok.to_string(),
                })?;
                row.push(v);
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(MatrixError::Empty);
        }
        IntMat::from_rows(&rows)
    }

    pub fn to_text(&self) -> String {
        self.rows()
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.a[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.a[i * self.n + j]
    }
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMat{:?}", self.rows())
    }
}

impl fmt::Display for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}
