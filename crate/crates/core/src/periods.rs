//! Period series of the torus cycle, derivative generating series and
//! residual checks against differential systems.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{display_scalar, factorial, format_scalar, int, ratio, Family, Scalar, SparsePoly};
use crate::model::{build_projective_model, multisets, BasisOrdering, ModelSpec};
use crate::series::{LaurentSeries, SeriesRecord};
use crate::tautsys::{DiffSystem, OperatorFamily};

/// Torus-cycle period expanded around large `a_{i0}`:
/// `sum_j (-1)^j a_{i0}^(-j-1) CT[(sum_{i != i0} a_i u_i)^j]` with
/// `u_i = x^(m_i - m_{i0})`, for all `j <= order`.
pub fn period_series(spec: &ModelSpec, order: u32) -> LaurentSeries {
    let n = spec.n();
    let i0 = spec.distinguished();
    let others: Vec<usize> = (0..n).filter(|&i| i != i0).collect();
    // Torus characters in the affine chart x_0 = 1: the remaining d
    // coordinates of m_i - m_{i0}.
    let weights: Vec<Vec<i64>> = others
        .iter()
        .map(|&i| {
            (1..=spec.d())
                .map(|c| spec.basis()[i][c] as i64 - spec.basis()[i0][c] as i64)
                .collect()
        })
        .collect();
    let (lo, hi) = weights.iter().flatten().fold((0i64, 0i64), |(lo, hi), &w| (lo.min(w), hi.max(w)));
    let reachable = |torus: &[i64], steps: i64| torus.iter().all(|&t| t + hi * steps >= 0 && t + lo * steps <= 0);

    let mut terms: Vec<(Vec<i64>, Scalar)> = vec![({
        let mut e = vec![0i64; n];
        e[i0] = -1;
        e
    }, Scalar::one())];
    let mut state: HashMap<Vec<u32>, (Vec<i64>, BigInt)> = HashMap::new();
    state.insert(vec![0; others.len()], (vec![0; spec.d()], BigInt::one()));
    for j in 1..=order as i64 {
        let mut next: HashMap<Vec<u32>, (Vec<i64>, BigInt)> = HashMap::with_capacity(state.len() * 2);
        for (alpha, (torus, c)) in &state {
            for (slot, w) in weights.iter().enumerate() {
                let t: Vec<i64> = torus.iter().zip(w).map(|(x, y)| x + y).collect();
                if !reachable(&t, order as i64 - j) {
                    continue;
                }
                let mut a = alpha.clone();
                a[slot] += 1;
                next.entry(a)
                    .and_modify(|(_, v)| *v += c)
                    .or_insert_with(|| (t, c.clone()));
            }
        }
        state = next;
        let sign = if j % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        for (alpha, (torus, c)) in &state {
            if torus.iter().all(|&t| t == 0) {
                let mut e = vec![0i64; n];
                e[i0] = -j - 1;
                for (slot, &i) in others.iter().enumerate() {
                    e[i] = alpha[slot] as i64;
                }
                terms.push((e, Scalar::from_integer(c * &sign)));
            }
        }
    }
    let poly = SparsePoly::from_terms(Family::A, n, terms).expect("valid exponents");
    LaurentSeries::new(poly, i0, order as i64, 0).expect("valid layout")
}

/// `(2k)!/(k!)^2` via `(-4)^k binom(-1/2, k)`, as the series of
/// `(a0^2 - 4 a1 a2)^(-1/2)` in the three-section labelling of `P^1`.
/// Terms up to `k <= order`, so the expansion index reaches `2 order`.
pub fn closed_form_series_p1(order: u32) -> LaurentSeries {
    let mut terms = Vec::new();
    let mut c = Scalar::one();
    for k in 0..=order as i64 {
        if k > 0 {
            // binom(-1/2, k) = binom(-1/2, k-1) * (-1/2 - k + 1) / k
            c = c * (ratio(-1, 2) - int(k - 1)) / int(k) * int(-4);
        }
        terms.push((vec![-1 - 2 * k, k, k], c.clone()));
    }
    let poly = SparsePoly::from_terms(Family::A, 3, terms).expect("valid exponents");
    LaurentSeries::new(poly, 0, 2 * order as i64, 0).expect("valid layout")
}

/// A formal expression `prefactor * base^exponent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalPower {
    pub prefactor: SparsePoly,
    pub base: SparsePoly,
    pub exponent: Scalar,
}

impl FormalPower {
    /// `d/da_k (P B^e) = (P' B + e P B') B^(e-1)`.
    pub fn derivative(&self, k: usize) -> Result<FormalPower> {
        let dp = self.prefactor.partial_derivative(k)?;
        let db = self.base.partial_derivative(k)?;
        let prefactor = dp
            .mul(&self.base)?
            .add(&self.prefactor.mul(&db)?.scalar_mul(&self.exponent))?;
        Ok(FormalPower {
            prefactor,
            base: self.base.clone(),
            exponent: &self.exponent - Scalar::one(),
        })
    }
}

/// `(a0^2 - 4 a1 a2)^(-1/2)`.
pub fn closed_form_p1() -> FormalPower {
    let base = SparsePoly::from_terms(Family::A, 3, [(vec![2, 0, 0], int(1)), (vec![0, 1, 1], int(-4))])
        .expect("valid exponents");
    FormalPower {
        prefactor: SparsePoly::one(Family::A, 3),
        base,
        exponent: ratio(-1, 2),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivativeAtPoint {
    pub variable: String,
    pub prefactor: String,
    pub exponent: String,
    pub prefactor_value: String,
    pub base_value: String,
    pub vanishes: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FermatCheckReport {
    pub point: Vec<String>,
    pub derivatives: Vec<DerivativeAtPoint>,
}

impl FermatCheckReport {
    pub fn vanishes(&self, var: &str) -> Option<bool> {
        self.derivatives.iter().find(|d| d.variable == var).map(|d| d.vanishes)
    }
}

/// First derivatives of the closed form at `point`, each written as a
/// rational prefactor times a power of `a0^2 - 4 a1 a2`. The derivative
/// vanishes exactly when the prefactor does (the base is nonzero on the
/// points of interest).
pub fn closed_form_derivatives_at(point: &[Scalar]) -> Result<FermatCheckReport> {
    if point.len() != 3 {
        return Err(Error::ArityMismatch {
            expected: 3,
            found: point.len(),
        });
    }
    let f = closed_form_p1();
    let base_value = f.base.evaluate(point)?;
    if base_value.is_zero() {
        return Err(Error::Invalid("the point lies on the discriminant a0^2 = 4 a1 a2".into()));
    }
    let mut derivatives = Vec::new();
    for k in 0..3 {
        let d = f.derivative(k)?;
        let v = d.prefactor.evaluate(point)?;
        derivatives.push(DerivativeAtPoint {
            variable: format!("a{k}"),
            prefactor: d.prefactor.to_string(),
            exponent: display_scalar(&d.exponent),
            prefactor_value: format_scalar(&v),
            base_value: format_scalar(&base_value),
            vanishes: v.is_zero(),
        });
    }
    Ok(FermatCheckReport {
        point: point.iter().map(format_scalar).collect(),
        derivatives,
    })
}

/// The closed form's derivatives at the Fermat point `(a0, a1, a2) = (0, 1, 1)`.
pub fn fermat_derivative_check_p1() -> FermatCheckReport {
    closed_form_derivatives_at(&[int(0), int(1), int(1)]).expect("Fermat point is off the discriminant")
}

/// `sum_K b^K d^K base` over all index tuples `K` of length `p`, truncated
/// at `order`.
pub fn derivative_generating_series(base: &LaurentSeries, p: u32, order: i64) -> Result<LaurentSeries> {
    if p == 0 {
        return Err(Error::Invalid("derivative order must be positive".into()));
    }
    if base.family() != Family::A {
        return Err(Error::FamilyMismatch {
            left: Family::A,
            right: base.family(),
        });
    }
    if base.truncation() < order {
        return Err(Error::InsufficientTruncation {
            have: base.truncation(),
            need: order,
        });
    }
    let n = base.n();
    let p_fact = factorial(p);
    let parts = multisets(n, p as usize)
        .into_par_iter()
        .map(|ms| {
            let mut beta = vec![0i64; n];
            let mut deriv = base.clone();
            for &i in &ms {
                beta[i] += 1;
                deriv = deriv.derivative_a(i)?;
            }
            let mult = beta.iter().fold(BigInt::one(), |acc, &e| acc * factorial(e as u32));
            let weight = Scalar::new(p_fact.clone(), mult);
            deriv.scale(&weight).times_b_monomial(&beta)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut acc = parts[0].clone();
    for s in &parts[1..] {
        acc = acc.add(s)?;
    }
    Ok(acc.truncated(order))
}

/// Base series with its coefficientwise derivatives up to a fixed order.
#[derive(Debug, Clone)]
pub struct PeriodFamily {
    spec: ModelSpec,
    base: LaurentSeries,
    derivatives: BTreeMap<Vec<usize>, LaurentSeries>,
}

impl PeriodFamily {
    pub fn new(spec: ModelSpec, order: u32, max_p: u32) -> Result<Self> {
        let base = period_series(&spec, order);
        let mut derivatives = BTreeMap::new();
        derivatives.insert(vec![], base.clone());
        for p in 1..=max_p as usize {
            for ms in multisets(spec.n(), p) {
                let prev = derivatives[&ms[..p - 1].to_vec()].clone();
                let d: LaurentSeries = LaurentSeries::derivative_a(&prev, ms[p - 1])?;
                derivatives.insert(ms, d);
            }
        }
        Ok(PeriodFamily {
            spec,
            base,
            derivatives,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn base(&self) -> &LaurentSeries {
        &self.base
    }

    /// Cached derivative for a multi-index given as a list of variable
    /// indices in any order.
    pub fn derivative(&self, indices: &[usize]) -> Option<&LaurentSeries> {
        let mut k = indices.to_vec();
        k.sort_unstable();
        self.derivatives.get(&k)
    }

    pub fn cycle(&self) -> &'static str {
        "torus"
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OperatorResidual {
    pub family: OperatorFamily,
    pub label: String,
    pub verified_order: i64,
    pub residual_terms: usize,
    /// Present only when the residual is nonzero.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<SeriesRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnnihilationReport {
    pub residuals: Vec<OperatorResidual>,
    pub all_zero: bool,
    pub verified_order: i64,
}

/// Applies every operator of `system` to `s` and records the exact
/// residuals. A residual is exact up to the input truncation minus the
/// largest index drop the operator can cause.
pub fn verify_annihilation(system: &DiffSystem, s: &LaurentSeries) -> Result<AnnihilationReport> {
    let needs_b = system.operators.iter().any(|o| o.op.involves_b());
    let input = if needs_b { s.to_ab() } else { s.clone() };
    let residuals = system
        .operators
        .par_iter()
        .map(|o| {
            let r = o.op.apply_series(&input)?;
            let nonzero = !r.is_zero();
            Ok(OperatorResidual {
                family: o.family,
                label: o.label.clone(),
                verified_order: r.truncation(),
                residual_terms: r.poly().len(),
                residual: nonzero.then(|| r.to_record()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let all_zero = residuals.iter().all(|r| r.residual_terms == 0);
    let verified_order = residuals.iter().map(|r| r.verified_order).min().unwrap_or(s.truncation());
    Ok(AnnihilationReport {
        residuals,
        all_zero,
        verified_order,
    })
}

/// Convenience used by the command line: the period of `P^d` in the
/// standard labelling.
pub fn standard_period(d: usize, order: u32) -> Result<(ModelSpec, LaurentSeries)> {
    let spec = build_projective_model(d, BasisOrdering::InteriorFirst)?;
    let s = period_series(&spec, order);
    Ok((spec, s))
}

/// True when every coefficient is a (possibly negative) integer.
pub fn has_integral_coefficients(s: &LaurentSeries) -> bool {
    s.poly().terms().all(|(_, c)| c.is_integer())
}
