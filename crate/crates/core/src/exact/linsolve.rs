//! Exact linear solving over the rationals.
//!
//! Rows are first scaled to integer rows, then reduced with Bareiss'
//! fraction-free elimination. The augmented matrix carries an identity block
//! so every eliminated row remembers which combination of input rows
//! produced it; an inconsistent system therefore comes with a multiplier
//! vector that can be replayed against the original rows.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::scalar::Scalar;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRow {
    pub coeffs: Vec<Scalar>,
    pub rhs: Scalar,
}

/// Rows over a fixed set of labelled unknowns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    labels: Vec<String>,
    rows: Vec<LinearRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InconsistencyWitness {
    /// Multiplier for each input row; the combination has all-zero
    /// coefficients and right-hand side `rhs`.
    #[serde(serialize_with = "ser_scalars")]
    pub multipliers: Vec<Scalar>,
    #[serde(serialize_with = "ser_scalar")]
    pub rhs: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    /// One particular solution (free unknowns set to zero) plus a basis of
    /// the homogeneous solution space.
    Solution {
        values: Vec<Scalar>,
        nullspace: Vec<Vec<Scalar>>,
    },
    Inconsistent(InconsistencyWitness),
}

impl SolveOutcome {
    pub fn is_solution(&self) -> bool {
        matches!(self, SolveOutcome::Solution { .. })
    }
}

impl LinearSystem {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(Error::Invalid(format!("duplicate column label {l}")));
            }
        }
        Ok(LinearSystem {
            labels,
            rows: Vec::new(),
        })
    }

    pub fn push_row(&mut self, coeffs: Vec<Scalar>, rhs: Scalar) -> Result<()> {
        if coeffs.len() != self.labels.len() {
            return Err(Error::ArityMismatch {
                expected: self.labels.len(),
                found: coeffs.len(),
            });
        }
        self.rows.push(LinearRow { coeffs, rhs });
        Ok(())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rows(&self) -> &[LinearRow] {
        &self.rows
    }

    pub fn num_unknowns(&self) -> usize {
        self.labels.len()
    }

    pub fn is_satisfied_by(&self, values: &[Scalar]) -> bool {
        values.len() == self.labels.len()
            && self.rows.iter().all(|row| {
                let lhs: Scalar = row.coeffs.iter().zip(values).map(|(a, x)| a * x).sum();
                lhs == row.rhs
            })
    }

    /// Replays the multipliers against the original rows.
    pub fn witness_is_valid(&self, w: &InconsistencyWitness) -> bool {
        if w.multipliers.len() != self.rows.len() || w.rhs.is_zero() {
            return false;
        }
        let mut combo = vec![Scalar::zero(); self.labels.len()];
        let mut rhs = Scalar::zero();
        for (y, row) in w.multipliers.iter().zip(&self.rows) {
            if y.is_zero() {
                continue;
            }
            for (acc, a) in combo.iter_mut().zip(&row.coeffs) {
                *acc += y * a;
            }
            rhs += y * &row.rhs;
        }
        combo.iter().all(Zero::is_zero) && rhs == w.rhs
    }
}

fn lcm_of_denominators<'a, I: IntoIterator<Item = &'a Scalar>>(it: I) -> BigInt {
    it.into_iter()
        .fold(BigInt::one(), |acc, s| acc.lcm(s.denom()))
}

fn exact_div(num: BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num.div_rem(den);
    debug_assert!(r.is_zero(), "Bareiss division must be exact");
    q
}

/// Fraction-free echelon form of an integer matrix, pivoting only within
/// the first `pivot_cols` columns. Returns the pivot columns in row order.
fn bareiss_echelon(m: &mut [Vec<BigInt>], pivot_cols: usize) -> Vec<usize> {
    let rows = m.len();
    let width = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut pivots = Vec::new();
    for col in 0..pivot_cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let (upper, lower) = m.split_at_mut(r + 1);
        let pivot_row = &upper[r];
        let piv = pivot_row[col].clone();
        for row in lower.iter_mut() {
            let factor = std::mem::take(&mut row[col]);
            for j in col + 1..width {
                let v = &piv * &row[j] - &factor * &pivot_row[j];
                row[j] = exact_div(v, &prev);
            }
        }
        prev = piv;
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Solves `sys` exactly.
pub fn solve_exact(sys: &LinearSystem) -> SolveOutcome {
    let m = sys.rows.len();
    let c = sys.labels.len();
    let width = c + 1 + m;
    let mut scales = Vec::with_capacity(m);
    let mut mat: Vec<Vec<BigInt>> = Vec::with_capacity(m);
    for (i, row) in sys.rows.iter().enumerate() {
        let l = lcm_of_denominators(row.coeffs.iter().chain(std::iter::once(&row.rhs)));
        let scale = Scalar::from_integer(l.clone());
        let mut r: Vec<BigInt> = Vec::with_capacity(width);
        for a in row.coeffs.iter().chain(std::iter::once(&row.rhs)) {
            r.push((a * &scale).to_integer());
        }
        r.extend((0..m).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
        mat.push(r);
        scales.push(scale);
    }
    let pivots = bareiss_echelon(&mut mat, c);
    let rank = pivots.len();

    if let Some(bad) = mat[rank..].iter().find(|row| !row[c].is_zero()) {
        let multipliers: Vec<Scalar> = (0..m)
            .map(|j| Scalar::from_integer(bad[c + 1 + j].clone()) * &scales[j])
            .collect();
        let rhs = sys
            .rows
            .iter()
            .zip(&multipliers)
            .map(|(row, y)| y * &row.rhs)
            .sum();
        return SolveOutcome::Inconsistent(InconsistencyWitness { multipliers, rhs });
    }

    let back_substitute = |rhs_of: &dyn Fn(&[BigInt]) -> Scalar, fixed: &BTreeMap<usize, Scalar>| {
        let mut x = vec![Scalar::zero(); c];
        for (&j, v) in fixed {
            x[j] = v.clone();
        }
        for (k, &col) in pivots.iter().enumerate().rev() {
            let row = &mat[k];
            let mut acc = rhs_of(row);
            for j in col + 1..c {
                if !row[j].is_zero() && !x[j].is_zero() {
                    acc -= Scalar::from_integer(row[j].clone()) * &x[j];
                }
            }
            x[col] = acc / Scalar::from_integer(row[col].clone());
        }
        x
    };

    let values = back_substitute(&|row: &[BigInt]| Scalar::from_integer(row[c].clone()), &BTreeMap::new());
    let pivot_set: HashSet<usize> = pivots.iter().copied().collect();
    let nullspace = (0..c)
        .filter(|j| !pivot_set.contains(j))
        .map(|free| {
            let fixed = BTreeMap::from([(free, Scalar::one())]);
            back_substitute(&|_: &[BigInt]| Scalar::zero(), &fixed)
        })
        .collect();
    SolveOutcome::Solution { values, nullspace }
}

/// Rank of a dense rational matrix, by the same fraction-free elimination.
pub fn rank(rows: &[Vec<Scalar>]) -> usize {
    let Some(width) = rows.first().map(Vec::len) else {
        return 0;
    };
    let mut mat: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let scale = Scalar::from_integer(lcm_of_denominators(row));
            row.iter().map(|a| (a * &scale).to_integer()).collect()
        })
        .collect();
    bareiss_echelon(&mut mat, width).len()
}

/// Rank of a sparse rational matrix given as `column -> value` rows.
///
/// Each row is reduced against the pivots found so far (keyed by leading
/// column) and kept if anything survives. Suited to the very sparse
/// monomial-product matrices that arise in surjectivity checks.
pub fn sparse_rank<I>(rows: I) -> usize
where
    I: IntoIterator<Item = BTreeMap<usize, Scalar>>,
{
    let mut pivots: BTreeMap<usize, BTreeMap<usize, Scalar>> = BTreeMap::new();
    for mut row in rows {
        row.retain(|_, v| !v.is_zero());
        while let Some((&lead, lead_val)) = row.iter().next() {
            match pivots.get(&lead) {
                None => {
                    let inv = lead_val.recip();
                    for v in row.values_mut() {
                        *v *= &inv;
                    }
                    pivots.insert(lead, row);
                    break;
                }
                Some(p) => {
                    let factor = lead_val.clone();
                    for (&j, pv) in p {
                        let e = row.entry(j).or_insert_with(Scalar::zero);
                        *e -= &factor * pv;
                        if e.is_zero() {
                            row.remove(&j);
                        }
                    }
                }
            }
        }
    }
    pivots.len()
}

fn ser_scalar<S: serde::Serializer>(s: &Scalar, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&super::scalar::format_scalar(s))
}

fn ser_scalars<S: serde::Serializer>(v: &[Scalar], ser: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = ser.serialize_seq(Some(v.len()))?;
    for s in v {
        seq.serialize_element(&super::scalar::format_scalar(s))?;
    }
    seq.end()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::scalar::{int, ratio};

    fn system(labels: &[&str], rows: &[(&[i64], i64)]) -> LinearSystem {
        let mut sys = LinearSystem::new(labels.iter().map(|s| s.to_string()).collect()).unwrap();
        for (coeffs, rhs) in rows {
            sys.push_row(coeffs.iter().map(|&v| int(v)).collect(), int(*rhs))
                .unwrap();
        }
        sys
    }

    #[test]
    fn one_by_one() {
        let sys = system(&["q"], &[(&[2], 1)]);
        match solve_exact(&sys) {
            SolveOutcome::Solution { values, nullspace } => {
                assert_eq!(values, vec![ratio(1, 2)]);
                assert!(nullspace.is_empty());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_membership_rows_are_inconsistent() {
        // unknowns alpha, delta: 2 alpha = 1, alpha + delta = 0, delta = 0
        let sys = system(&["alpha", "delta"], &[(&[2, 0], 1), (&[1, 1], 0), (&[0, 1], 0)]);
        match solve_exact(&sys) {
            SolveOutcome::Inconsistent(w) => assert!(sys.witness_is_valid(&w)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_system() {
        let sys = LinearSystem::new(vec![]).unwrap();
        assert_eq!(
            solve_exact(&sys),
            SolveOutcome::Solution {
                values: vec![],
                nullspace: vec![]
            }
        );
    }

    #[test]
    fn underdetermined_returns_nullspace() {
        let sys = system(&["x", "y", "z"], &[(&[1, 1, 0], 3), (&[0, 0, 2], 4)]);
        let SolveOutcome::Solution { values, nullspace } = solve_exact(&sys) else {
            panic!("expected solution");
        };
        assert!(sys.is_satisfied_by(&values));
        assert_eq!(nullspace.len(), 1);
        let hom = system(&["x", "y", "z"], &[(&[1, 1, 0], 0), (&[0, 0, 2], 0)]);
        assert!(hom.is_satisfied_by(&nullspace[0]));
    }

    #[test]
    fn rational_rows() {
        let mut sys = LinearSystem::new(vec!["x".into(), "y".into()]).unwrap();
        sys.push_row(vec![ratio(1, 2), ratio(1, 3)], ratio(5, 6)).unwrap();
        sys.push_row(vec![ratio(2, 7), int(-1)], ratio(-5, 7)).unwrap();
        let SolveOutcome::Solution { values, .. } = solve_exact(&sys) else {
            panic!();
        };
        assert_eq!(values, vec![int(1), int(1)]);
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(LinearSystem::new(vec!["x".into(), "x".into()]).is_err());
        let mut sys = LinearSystem::new(vec!["x".into()]).unwrap();
        assert!(sys.push_row(vec![int(1), int(2)], int(0)).is_err());
    }

    #[test]
    fn dense_and_sparse_rank_agree() {
        let rows = vec![
            vec![int(1), int(2), int(3)],
            vec![int(2), int(4), int(6)],
            vec![int(0), int(1), ratio(1, 2)],
        ];
        assert_eq!(rank(&rows), 2);
        let sparse = rows.iter().map(|r| {
            r.iter()
                .enumerate()
                .map(|(j, v)| (j, v.clone()))
                .collect::<BTreeMap<_, _>>()
        });
        assert_eq!(sparse_rank(sparse), 2);
    }
}
