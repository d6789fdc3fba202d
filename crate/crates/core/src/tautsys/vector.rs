//! Vector-valued systems for the first and second derivatives and the
//! passage between vector solutions and scalar solutions in (a, b).

use std::collections::{BTreeMap, BTreeSet};

use super::{build_tautological_system, DiffSystem, OperatorFamily};
use crate::error::{Error, Result};
use crate::exact::{factorial, int, Family, Scalar};
use crate::model::{LatticeRelation, ModelSpec};
use crate::series::LaurentSeries;
use crate::weyl::{Space, WeylOperator};

/// `sum_K op_K phi_K = 0`, where `K` runs over component index tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorEquation {
    pub family: OperatorFamily,
    pub label: String,
    pub terms: Vec<(Vec<usize>, WeylOperator)>,
    /// Base operator index and tuple `K` when the row is `d^K` applied to
    /// that operator.
    pub source: Option<(usize, Vec<usize>)>,
}

fn derivative(n: usize, k: &[usize]) -> WeylOperator {
    let mut alpha = vec![0u32; n];
    for &i in k {
        alpha[i] += 1;
    }
    WeylOperator::derivative_monomial(n, &alpha, &vec![0; n])
}

impl VectorEquation {
    /// The scalar operator obtained by substituting `phi_K = d^K phi`.
    pub fn lift(&self, n: usize) -> WeylOperator {
        self.terms
            .iter()
            .fold(WeylOperator::zero(n, Space::Primal), |acc, (k, op)| {
                acc + op.clone() * derivative(n, k)
            })
    }

    pub fn residual(&self, v: &VectorSolution) -> Result<LaurentSeries> {
        let mut acc: Option<LaurentSeries> = None;
        for (k, op) in &self.terms {
            let r = op.apply_series(v.component(k))?;
            acc = Some(match acc {
                None => r,
                Some(a) => a.add(&r)?,
            });
        }
        acc.ok_or_else(|| Error::Invalid("empty vector equation".into()))
    }
}

#[derive(Debug, Clone)]
pub struct VectorSystem {
    pub n: usize,
    pub p: u32,
    pub base: DiffSystem,
    pub equations: Vec<VectorEquation>,
}

impl VectorSystem {
    /// Every derived row lifts to `d^K` composed with its base operator, and
    /// every relation between components lifts to zero.
    pub fn derivation_consistent(&self) -> bool {
        self.equations.iter().all(|eq| {
            let lift = eq.lift(self.n);
            match &eq.source {
                Some((idx, k)) => lift == derivative(self.n, k) * self.base.operators[*idx].op.clone(),
                None => lift.is_zero(),
            }
        })
    }
}

/// Index shift of `d^K` applied to a series of shift zero.
pub fn derivative_shift(k: &[usize], i0: usize) -> i64 {
    k.iter().filter(|&&i| i != i0).count() as i64
}

/// All index tuples of length `p` over `0..n`, row-major.
pub fn tuples(n: usize, p: u32) -> Vec<Vec<usize>> {
    (0..p).fold(vec![vec![]], |acc, _| {
        acc.into_iter()
            .flat_map(|t| {
                (0..n).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect()
    })
}

#[derive(Default)]
struct EquationList {
    seen: BTreeSet<String>,
    eqs: Vec<VectorEquation>,
}

impl EquationList {
    fn push(
        &mut self,
        family: OperatorFamily,
        label: String,
        terms: Vec<(Vec<usize>, WeylOperator)>,
        source: Option<(usize, Vec<usize>)>,
    ) {
        let mut merged: BTreeMap<Vec<usize>, WeylOperator> = BTreeMap::new();
        for (k, op) in terms {
            match merged.remove(&k) {
                Some(prev) => {
                    merged.insert(k, prev + op);
                }
                None => {
                    merged.insert(k, op);
                }
            }
        }
        merged.retain(|_, op| !op.is_zero());
        if merged.is_empty() {
            return;
        }
        let key = |sign: bool| -> String {
            merged
                .iter()
                .map(|(k, op)| {
                    let op = if sign { -op.clone() } else { op.clone() };
                    format!("{k:?}:{op}")
                })
                .collect::<Vec<_>>()
                .join(";")
        };
        if self.seen.contains(&key(true)) || !self.seen.insert(key(false)) {
            return;
        }
        self.eqs.push(VectorEquation {
            family,
            label,
            terms: merged.into_iter().collect(),
            source,
        });
    }
}

/// Equations satisfied by the first (`p = 1`) or second (`p = 2`)
/// derivatives of a solution of the tautological system.
pub fn build_vector_system(spec: &ModelSpec, relations: &[LatticeRelation], p: u32) -> Result<VectorSystem> {
    if p == 0 || p > 2 {
        return Err(Error::UnsupportedOrder {
            p,
            reason: "vector systems exist for p = 1, 2; use the scalar system for other orders",
        });
    }
    let base = build_tautological_system(spec, relations)?;
    let n = spec.n();
    let generators = spec.lie_generators();
    let mut list = EquationList::default();
    for (idx, lop) in base.operators.iter().enumerate() {
        for k in tuples(n, p) {
            let mut terms = Vec::new();
            match lop.family {
                OperatorFamily::Toric => terms.push((k.clone(), lop.op.clone())),
                OperatorFamily::Euler => terms.push((k.clone(), lop.op.clone() + int(p as i64))),
                OperatorFamily::Symmetry => {
                    let g = generators
                        .iter()
                        .find(|g| g.label() == lop.label)
                        .expect("symmetry operators are labelled by generator");
                    terms.push((k.clone(), lop.op.clone()));
                    for r in 0..k.len() {
                        for t in 0..n {
                            let m = g.matrix[t][k[r]];
                            if m != 0 {
                                let mut kk = k.clone();
                                kk[r] = t;
                                terms.push((kk, WeylOperator::constant(n, int(m))));
                            }
                        }
                    }
                }
                _ => unreachable!("base systems only carry toric, symmetry and Euler operators"),
            }
            list.push(lop.family, format!("{} {k:?}", lop.label), terms, Some((idx, k)));
        }
    }
    let da = |i: usize| WeylOperator::da(n, i);
    if p == 1 {
        for i in 0..n {
            for j in 0..n {
                list.push(
                    OperatorFamily::Commutation,
                    format!("da{i} phi{j} = da{j} phi{i}"),
                    vec![(vec![j], da(i)), (vec![i], -da(j))],
                    None,
                );
            }
        }
    } else {
        for l in 0..n {
            for k in 0..n {
                list.push(
                    OperatorFamily::Symmetric,
                    format!("phi{l}{k} = phi{k}{l}"),
                    vec![(vec![l, k], WeylOperator::identity(n)), (vec![k, l], -WeylOperator::identity(n))],
                    None,
                );
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    list.push(
                        OperatorFamily::Commutation,
                        format!("da{i} phi{j}{k} = da{j} phi{k}{i}"),
                        vec![(vec![j, k], da(i)), (vec![k, i], -da(j))],
                        None,
                    );
                    list.push(
                        OperatorFamily::Commutation,
                        format!("da{j} phi{k}{i} = da{k} phi{i}{j}"),
                        vec![(vec![k, i], da(j)), (vec![i, j], -da(k))],
                        None,
                    );
                }
            }
        }
    }
    Ok(VectorSystem {
        n,
        p,
        base,
        equations: list.eqs,
    })
}

/// Components `phi_K` for every index tuple `K` of length `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorSolution {
    p: u32,
    n: usize,
    components: Vec<LaurentSeries>,
}

impl VectorSolution {
    /// `components` in row-major tuple order; all must share layout and
    /// truncation order, and `phi_K` must carry the index shift of a
    /// `|K|`-fold derivative (one per non-distinguished entry of `K`).
    pub fn new(p: u32, components: Vec<LaurentSeries>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::Invalid("a vector solution needs components".into()))?;
        let n = first.n();
        let expected = n.pow(p);
        if components.len() != expected {
            return Err(Error::ArityMismatch {
                expected,
                found: components.len(),
            });
        }
        let i0 = first.distinguished();
        for (k, c) in tuples(n, p).iter().zip(&components) {
            if c.family() != Family::A
                || c.n() != n
                || c.distinguished() != i0
                || c.truncation() != first.truncation()
            {
                return Err(Error::Invalid("vector components must share layout and truncation order".into()));
            }
            if c.shift() != derivative_shift(k, i0) {
                return Err(Error::Invalid(format!("component {k:?} has index shift {}", c.shift())));
            }
        }
        Ok(VectorSolution { p, n, components })
    }

    /// The derivatives `d^K base` for all tuples `K`.
    pub fn from_derivatives(base: &LaurentSeries, p: u32) -> Result<Self> {
        let n = base.n();
        let comps = tuples(n, p)
            .into_iter()
            .map(|k| k.iter().try_fold(base.clone(), |s, &i| s.derivative_a(i)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(p, comps)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn truncation(&self) -> i64 {
        self.components[0].truncation()
    }

    pub fn components(&self) -> &[LaurentSeries] {
        &self.components
    }

    pub fn component(&self, k: &[usize]) -> &LaurentSeries {
        let idx = k.iter().fold(0, |acc, &i| acc * self.n + i);
        &self.components[idx]
    }

    pub fn scale(&self, c: &Scalar) -> VectorSolution {
        VectorSolution {
            p: self.p,
            n: self.n,
            components: self.components.iter().map(|s| s.scale(c)).collect(),
        }
    }
}

fn counts(n: usize, k: &[usize]) -> Vec<i64> {
    let mut v = vec![0i64; n];
    for &i in k {
        v[i] += 1;
    }
    v
}

/// `phi(a, b) = sum_K b_K phi_K(a)`.
pub fn scalarize(v: &VectorSolution) -> Result<LaurentSeries> {
    let mut acc: Option<LaurentSeries> = None;
    for (k, comp) in tuples(v.n, v.p).iter().zip(&v.components) {
        let term = comp.times_b_monomial(&counts(v.n, k))?;
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    Ok(acc.expect("at least one component"))
}

/// `phi_K = d^K_b phi / p!`; inverse of [`scalarize`] on symmetric
/// component families.
pub fn vectorize(s: &LaurentSeries, p: u32) -> Result<VectorSolution> {
    if s.family() != Family::AB {
        return Err(Error::FamilyMismatch {
            left: Family::AB,
            right: s.family(),
        });
    }
    if !s.is_zero() && s.b_degree() != Some(p as i64) {
        return Err(Error::NotHomogeneousInB { expected: p });
    }
    let n = s.n();
    let p_fact = Scalar::from_integer(factorial(p));
    let comps = tuples(n, p)
        .into_iter()
        .map(|k| {
            let c = counts(n, &k);
            let mult = c
                .iter()
                .fold(Scalar::from_integer(1.into()), |acc, &e| acc * Scalar::from_integer(factorial(e as u32)));
            let coeff = s.b_coefficient(&c)?;
            Ok(coeff.scale(&(mult / &p_fact)))
        })
        .collect::<Result<Vec<_>>>()?;
    VectorSolution::new(p, comps)
}
