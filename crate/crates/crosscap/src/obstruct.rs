//! Lower-bound obstructions: the mod-8 congruence test, the embedding
//! obstruction dispatched by congruence class, and the linking-form
//! obstruction for Möbius bands.

use thiserror::Error;

use crate::goeritz::{Definiteness, GoeritzForm};
use crate::lattice::{
    embed_with_cap, smith_normal_form, square_divisors, EmbeddingProblem, EmbeddingStatus,
    LatticeError, Witness,
};
use crate::matrix::IntMat;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ObstructError {
    #[error("signature {0} is odd")]
    OddSignature(i64),
    #[error("record {name}: determinant {det} is even")]
    EvenDeterminant { name: String, det: u64 },
    #[error("record {name}: arf {arf} contradicts determinant {det} (arf = 0 iff det = ±1 mod 8)")]
    ArfDeterminantMismatch { name: String, arf: u8, det: u64 },
    #[error("record {name}: marked slice but signature {sigma} != 0 or determinant {det} is not a square")]
    SliceInconsistent { name: String, sigma: i64, det: u64 },
    #[error("congruence class {0} does not admit the embedding obstruction")]
    InapplicableClass(u8),
    #[error("class {class} requires a {expected:?} definite form, got {got:?}")]
    WrongDefiniteness { class: u8, expected: Definiteness, got: Definiteness },
    #[error("class {class} requires {expected} definite form(s), got {got}")]
    WrongFormCount { class: u8, expected: usize, got: usize },
    #[error("cokernel is not cyclic: invariant factors {factors:?}")]
    NonCyclic { factors: Vec<i128> },
    #[error("linking form order {0} is even")]
    EvenOrder(u64),
    #[error("prime {prime} divides the order {n} with even exponent {exponent}; obstruction inapplicable")]
    PreconditionFailed { n: u64, prime: u64, exponent: u32 },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Tabulated invariants of one knot, as ingested from the knot table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantRecord {
    pub name: String,
    pub signature: i64,
    pub arf: u8,
    pub determinant: u64,
    pub slice: bool,
    pub alternating: bool,
}

impl InvariantRecord {
    /// Data validation: determinant odd, signature even, the slice
    /// constraints, and the classical arf/determinant mod-8 consistency.
    pub fn validate(&self) -> Result<(), ObstructError> {
        if self.determinant % 2 == 0 {
            return Err(ObstructError::EvenDeterminant {
                name: self.name.clone(),
                det: self.determinant,
            });
        }
        if self.signature % 2 != 0 {
            return Err(ObstructError::OddSignature(self.signature));
        }
        let arf_from_det = u8::from(!matches!(self.determinant % 8, 1 | 7));
        if self.arf != arf_from_det {
            return Err(ObstructError::ArfDeterminantMismatch {
                name: self.name.clone(),
                arf: self.arf,
                det: self.determinant,
            });
        }
        if self.slice {
            let s = self.determinant.isqrt();
            if self.signature != 0 || s * s != self.determinant {
                return Err(ObstructError::SliceInconsistent {
                    name: self.name.clone(),
                    sigma: self.signature,
                    det: self.determinant,
                });
            }
        }
        Ok(())
    }

    pub fn congruence_class(&self) -> Result<u8, ObstructError> {
        congruence_class(self.signature, self.arf)
    }
}

/// (sigma + 4*arf) mod 8, always in {0, 2, 4, 6}.
pub fn congruence_class(sigma: i64, arf: u8) -> Result<u8, ObstructError> {
    if sigma % 2 != 0 {
        return Err(ObstructError::OddSignature(sigma));
    }
    Ok((sigma + 4 * arf as i64).rem_euclid(8) as u8)
}

/// Some(2) iff the record's congruence class is 4.
pub fn congruence_lower_bound(rec: &InvariantRecord) -> Option<u8> {
    match rec.congruence_class() {
        Ok(4) => Some(2),
        _ => None,
    }
}

/// One ℓ of an embedding sweep.
#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub ell: u64,
    pub nodes: u64,
    pub witness: Option<Witness>,
    pub capped: bool,
}

/// Outcome of the embedding obstruction: per-form sweeps plus the bound.
#[derive(Debug, Clone)]
pub struct DonaldsonOutcome {
    pub lower_bound: Option<u8>,
    /// One sweep per supplied form, in the order used.
    pub sweeps: Vec<Vec<SweepEntry>>,
}

/// The embedding obstruction. Class +2 takes the negative definite form;
/// class 6 (= -2) takes the positive definite form (negated internally, which
/// is the same as passing to the mirror diagram); class 0 takes one form of
/// each sign. Fires (Some(2)) iff every ℓ in the square-divisor sweep fails
/// to embed, for every supplied form.
pub fn donaldson_obstruction(
    rec: &InvariantRecord,
    forms: &[&GoeritzForm],
    node_cap: u64,
) -> Result<DonaldsonOutcome, ObstructError> {
    let class = rec.congruence_class()?;
    let grams: Vec<IntMat> = match class {
        2 => {
            expect_forms(class, forms, &[Definiteness::Negative])?;
            vec![forms[0].gram.clone()]
        }
        6 => {
            expect_forms(class, forms, &[Definiteness::Positive])?;
            vec![forms[0].gram.negated()]
        }
        0 => {
            if forms.len() != 2 {
                return Err(ObstructError::WrongFormCount { class, expected: 2, got: forms.len() });
            }
            let pos = forms.iter().find(|f| f.definiteness == Definiteness::Positive);
            let neg = forms.iter().find(|f| f.definiteness == Definiteness::Negative);
            match (pos, neg) {
                (Some(p), Some(n)) => vec![p.gram.negated(), n.gram.clone()],
                _ => {
                    return Err(ObstructError::WrongDefiniteness {
                        class,
                        expected: Definiteness::Positive,
                        got: forms[0].definiteness,
                    })
                }
            }
        }
        other => return Err(ObstructError::InapplicableClass(other)),
    };
    let mut sweeps = Vec::new();
    let mut all_blocked = true;
    for gram in &grams {
        let mut entries = Vec::new();
        let mut blocked = true;
        for ell in square_divisors(rec.determinant) {
            let block = gram.direct_sum_entry(-(ell as i64));
            let problem = EmbeddingProblem::new(block, gram.size() + 1)?;
            let result = embed_with_cap(&problem, node_cap);
            let (witness, capped) = match result.status {
                EmbeddingStatus::Embeddable(w) => (Some(w), false),
                EmbeddingStatus::NotEmbeddable => (None, false),
                EmbeddingStatus::ResourceExhausted => (None, true),
            };
            let found = witness.is_some();
            entries.push(SweepEntry { ell, nodes: result.nodes_searched, witness, capped });
            if found || entries.last().unwrap().capped {
                // an embedding exists (or could not be ruled out): no obstruction
                blocked = false;
                break;
            }
        }
        sweeps.push(entries);
        if !blocked {
            all_blocked = false;
            break;
        }
    }
    Ok(DonaldsonOutcome { lower_bound: if all_blocked { Some(2) } else { None }, sweeps })
}

fn expect_forms(
    class: u8,
    forms: &[&GoeritzForm],
    expected: &[Definiteness],
) -> Result<(), ObstructError> {
    if forms.len() != expected.len() {
        return Err(ObstructError::WrongFormCount {
            class,
            expected: expected.len(),
            got: forms.len(),
        });
    }
    for (f, &want) in forms.iter().zip(expected) {
        if f.definiteness != want {
            return Err(ObstructError::WrongDefiniteness {
                class,
                expected: want,
                got: f.definiteness,
            });
        }
    }
    Ok(())
}

/// The linking form x ↦ q·x²/n mod 1 on a cyclic group of order n, stored as
/// the minimal representative of the orbit {±u²·q mod n} over units u.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkingForm {
    n: u64,
    q: u64,
}

impl LinkingForm {
    /// Canonicalize q to the orbit minimum.
    pub fn new(n: u64, q: u64) -> LinkingForm {
        assert!(n >= 1);
        let q = q % n;
        if n == 1 {
            return LinkingForm { n, q: 0 };
        }
        assert_eq!(gcd(q, n), 1, "linking form value must be a unit mod n");
        let mut best = u64::MAX;
        for u in 1..n {
            if gcd(u, n) != 1 {
                continue;
            }
            let v = (u * u % n) * q % n;
            best = best.min(v).min(n - v);
        }
        LinkingForm { n, q: best }
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn canonical_q(&self) -> u64 {
        self.q
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Linking form of the double branched cover presented by a Goeritz matrix:
/// the self-linking of a generator of the cyclic cokernel, computed from the
/// Smith normal form transforms and the exact inverse of the Gram matrix.
pub fn linking_form(g: &GoeritzForm) -> Result<LinkingForm, ObstructError> {
    linking_form_of_gram(&g.gram)
}

pub fn linking_form_of_gram(gram: &IntMat) -> Result<LinkingForm, ObstructError> {
    let m = gram.size();
    let det = gram.det();
    let n_order = det.unsigned_abs();
    if n_order % 2 == 0 {
        return Err(ObstructError::EvenOrder(u64::try_from(n_order).unwrap_or(u64::MAX)));
    }
    let snf = smith_normal_form(gram);
    let nontrivial: Vec<i128> = snf.diag.iter().copied().filter(|&d| d.abs() != 1).collect();
    if nontrivial.len() > 1 {
        return Err(ObstructError::NonCyclic { factors: snf.diag.clone() });
    }
    if nontrivial.is_empty() {
        return Ok(LinkingForm::new(1, 0));
    }
    let n = u64::try_from(nontrivial[0].abs()).expect("order fits u64");
    // generator of the Z_n summand, lifted to the presentation basis
    let idx = snf.diag.iter().position(|&d| d.abs() != 1).unwrap();
    let w: Vec<i128> = (0..m).map(|i| snf.left_inv[i][idx]).collect();
    // w^T G^{-1} w = (sum_i w_i * det(G with column i replaced by w)) / det(G)
    let rows = gram.rows();
    let mut num: i128 = 0;
    for i in 0..m {
        let mut replaced: Vec<Vec<i64>> = rows.clone();
        let mut big = false;
        for (r, row) in replaced.iter_mut().enumerate() {
            match i64::try_from(w[r]) {
                Ok(v) => row[i] = v,
                Err(_) => big = true,
            }
        }
        assert!(!big, "generator lift exceeds i64");
        let di = IntMat::from_rows(&replaced).expect("square").det();
        num = num
            .checked_add(w[i].checked_mul(di).expect("linking form overflow"))
            .expect("linking form overflow");
    }
    // value = num / det mod 1, with the -g^{-1} sign convention; the orbit
    // canonicalization makes the global sign immaterial anyway
    let n_i = n as i128;
    let signed_q = -(num * det.signum()).rem_euclid(n_i);
    let q = signed_q.rem_euclid(n_i) as u64;
    Ok(LinkingForm::new(n, q))
}

/// Some(2) iff no unit u mod n satisfies q·u² = ±1 (mod n). Requires every
/// prime factor of n to appear with odd exponent.
pub fn moebius_obstruction(lf: &LinkingForm) -> Result<Option<u8>, ObstructError> {
    let n = lf.n;
    if n % 2 == 0 {
        return Err(ObstructError::EvenOrder(n));
    }
    let mut m = n;
    let mut p = 3;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            if e % 2 == 0 {
                return Err(ObstructError::PreconditionFailed { n, prime: p, exponent: e });
            }
        }
        p += 2;
    }
    if n == 1 {
        return Ok(None);
    }
    for u in 1..n {
        if gcd(u, n) != 1 {
            continue;
        }
        let v = (u * u % n) * lf.q % n;
        if v == 1 || v == n - 1 {
            return Ok(None);
        }
    }
    Ok(Some(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::goeritz::{definiteness, FormSource};

    fn mat(rows: &[Vec<i64>]) -> IntMat {
        IntMat::from_rows(rows).unwrap()
    }

    fn form(rows: &[Vec<i64>]) -> GoeritzForm {
        let gram = mat(rows);
        GoeritzForm {
            rank: gram.size(),
            definiteness: definiteness(&gram),
            gram,
            deleted_index: 0,
            source: FormSource { knot: "test".into(), coloring: 0 },
        }
    }

    fn rec(name: &str, sigma: i64, det: u64) -> InvariantRecord {
        let arf = u8::from(!matches!(det % 8, 1 | 7));
        InvariantRecord {
            name: name.into(),
            signature: sigma,
            arf,
            determinant: det,
            slice: false,
            alternating: true,
        }
    }

    #[test]
    fn congruence_examples() {
        assert_eq!(congruence_class(0, 1).unwrap(), 4);
        assert_eq!(congruence_class(-2, 1).unwrap(), 2);
        assert_eq!(congruence_class(-6, 0).unwrap(), 2);
        assert_eq!(congruence_class(2, 1).unwrap(), 6);
        assert!(matches!(congruence_class(3, 0), Err(ObstructError::OddSignature(3))));
    }

    #[test]
    fn congruence_bound() {
        let r1 = rec("a", -4, 7); // det 7 = -1 mod 8 -> arf 0; class 4
        assert_eq!(congruence_lower_bound(&r1), Some(2));
        let r2 = rec("b", 0, 7); // class 0
        assert_eq!(congruence_lower_bound(&r2), None);
        let r3 = rec("c", 0, 11); // det 11 = 3 mod 8 -> arf 1; class 4
        assert_eq!(congruence_lower_bound(&r3), Some(2));
    }

    #[test]
    fn record_validation() {
        assert!(rec("ok", -2, 23).validate().is_ok());
        let mut bad = rec("bad", -2, 23);
        bad.arf = 1;
        assert!(matches!(bad.validate(), Err(ObstructError::ArfDeterminantMismatch { .. })));
        let even = InvariantRecord { determinant: 4, ..rec("e", 0, 1) };
        assert!(matches!(even.validate(), Err(ObstructError::EvenDeterminant { .. })));
        let mut sl = rec("s", 0, 25);
        sl.slice = true;
        assert!(sl.validate().is_ok());
        sl.determinant = 21; // arf-consistent but not a square
        sl.arf = 1;
        assert!(matches!(sl.validate(), Err(ObstructError::SliceInconsistent { .. })));
    }

    #[test]
    fn donaldson_fires_for_the_rank_four_case() {
        // det 39, sigma +2 (class 6 with arf 0): positive definite form of the
        // knot = negation of the printed negative definite matrix
        let pos = form(&[vec![7, -1, 0, -1], vec![-1, 2, -1, 0], vec![0, -1, 2, -1], vec![-1, 0, -1, 3]]);
        let r = rec("10_9", -2, 39); // class 6
        let out = donaldson_obstruction(&r, &[&pos], 1_000_000_000).unwrap();
        assert_eq!(out.lower_bound, Some(2));
        assert_eq!(out.sweeps[0].len(), 1); // 39 is square-free
        assert_eq!(out.sweeps[0][0].ell, 39);
        assert!(out.sweeps[0][0].witness.is_none());
    }

    #[test]
    fn donaldson_wrong_definiteness() {
        let neg = form(&[vec![-2, 1], vec![1, -2]]);
        let r = rec("x", 2, 3); // class 6 wants a positive form
        assert!(matches!(
            donaldson_obstruction(&r, &[&neg], 1000).unwrap_err(),
            ObstructError::WrongDefiniteness { .. }
        ));
    }

    #[test]
    fn linking_form_one_by_one() {
        // [[-3]]: -g^{-1} = 1/3; orbit {±u²·q} of q=1 mod 3 is {1, 2} -> canonical 1.
        // The stated example q ~ 2 (i.e. -1/3 = 2/3) is the same orbit.
        let lf = linking_form(&form(&[vec![-3]])).unwrap();
        assert_eq!(lf.order(), 3);
        assert_eq!(lf, LinkingForm::new(3, 2));
        assert_eq!(lf, LinkingForm::new(3, 1));
    }

    #[test]
    fn moebius_examples() {
        assert_eq!(moebius_obstruction(&LinkingForm::new(15, 8)).unwrap(), Some(2));
        assert_eq!(moebius_obstruction(&LinkingForm::new(3, 1)).unwrap(), None);
        assert_eq!(moebius_obstruction(&LinkingForm::new(51, 20)).unwrap(), Some(2));
        // even prime exponent: inapplicable
        assert!(matches!(
            moebius_obstruction(&LinkingForm::new(25, 2)),
            Err(ObstructError::PreconditionFailed { prime: 5, .. })
        ));
    }

    #[test]
    fn moebius_canonicalization_independence() {
        let n = 35u64;
        let base = LinkingForm::new(n, 12);
        for u in 1..n {
            if gcd(u, n) != 1 {
                continue;
            }
            let scaled = LinkingForm::new(n, (u * u % n) * 12 % n);
            assert_eq!(scaled, base);
        }
    }

    #[test]
    fn noncyclic_cokernel_rejected() {
        // diag(5,5) presents Z_5 ⊕ Z_5
        let g = form(&[vec![5, 0], vec![0, 5]]);
        assert!(matches!(linking_form(&g), Err(ObstructError::NonCyclic { .. })));
    }
}
