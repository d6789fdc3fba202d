//! Differential relations at a fixed section.
//!
//! `p e^f` lies in the span of the `d/dx_i (q_i e^f)` exactly when
//! `p = sum_i (d q_i/dx_i + q_i df/dx_i)` has a polynomial solution
//! `(q_0, ..., q_d)`. Deciding this is one exact linear system in the
//! coefficients of the `q_i`.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{
    format_scalar, solve_exact, ExponentVector, Family, InconsistencyWitness, LinearSystem, PolyRecord, Scalar,
    SolveOutcome, SparsePoly,
};
use crate::model::{monomial_name, monomials_of_degree, multisets, span_check, ModelSpec, Surjectivity, MAX_PRODUCT_DEGREE};

/// Coefficients `a` of the section `f_a = sum_i a_i x^{m_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionPoint {
    a: Vec<Scalar>,
}

impl SectionPoint {
    pub fn new(spec: &ModelSpec, a: Vec<Scalar>) -> Result<Self> {
        if a.len() != spec.n() {
            return Err(Error::ArityMismatch {
                expected: spec.n(),
                found: a.len(),
            });
        }
        if a.iter().all(Zero::is_zero) {
            return Err(Error::Invalid("the section must not be identically zero".into()));
        }
        Ok(SectionPoint { a })
    }

    /// `x_0^(d+1) + ... + x_d^(d+1)`.
    pub fn fermat(spec: &ModelSpec) -> Self {
        let a = spec
            .basis()
            .iter()
            .map(|m| Scalar::from_integer((m.iter().filter(|&&e| e > 0).count() == 1).into()))
            .collect();
        SectionPoint { a }
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.a
    }

    /// `f_a` as a polynomial in `x_0, ..., x_d`.
    pub fn section(&self, spec: &ModelSpec) -> SparsePoly {
        let terms = spec
            .basis()
            .iter()
            .zip(&self.a)
            .map(|(m, c)| (m.iter().map(|&e| e as i64).collect::<Vec<_>>(), c.clone()));
        SparsePoly::from_terms(Family::X, spec.d() + 1, terms).expect("valid exponents")
    }
}

/// A homogeneous polynomial of degree `k(d+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipQuery {
    p: SparsePoly,
    k: u32,
    alpha: Option<Vec<u32>>,
}

impl MembershipQuery {
    pub fn new(spec: &ModelSpec, p: SparsePoly) -> Result<Self> {
        if p.family() != Family::X || p.arity() != spec.d() + 1 {
            return Err(Error::Invalid("queries are polynomials in x_0, ..., x_d".into()));
        }
        if !p.is_homogeneous() {
            return Err(Error::Invalid("query polynomial must be homogeneous".into()));
        }
        let deg = p.degree().unwrap_or(0);
        let step = spec.d() as i64 + 1;
        if deg % step != 0 {
            return Err(Error::Invalid(format!(
                "query degree {deg} is not a multiple of {step}"
            )));
        }
        Ok(MembershipQuery {
            p,
            k: (deg / step) as u32,
            alpha: None,
        })
    }

    pub fn poly(&self) -> &SparsePoly {
        &self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// The a-derivative multi-index this query represents, if any.
    pub fn alpha(&self) -> Option<&[u32]> {
        self.alpha.as_deref()
    }
}

/// `d^alpha/da^alpha e^f = prod_i (x^{m_i})^{alpha_i} e^f`.
pub fn derivative_query(spec: &ModelSpec, alpha: &[u32]) -> Result<MembershipQuery> {
    if alpha.len() != spec.n() {
        return Err(Error::ArityMismatch {
            expected: spec.n(),
            found: alpha.len(),
        });
    }
    if alpha.iter().sum::<u32>() == 0 {
        return Err(Error::Invalid("the multi-index must be nonzero".into()));
    }
    let exps: Vec<i64> = spec.combine(alpha).into_iter().map(i64::from).collect();
    let p = SparsePoly::monomial(Family::X, ExponentVector(exps), Scalar::from_integer(1.into()));
    let mut q = MembershipQuery::new(spec, p)?;
    q.alpha = Some(alpha.to_vec());
    Ok(q)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipCertificate {
    pub q: Vec<SparsePoly>,
}

impl MembershipCertificate {
    pub fn zero(spec: &ModelSpec) -> Self {
        MembershipCertificate {
            q: vec![SparsePoly::zero(Family::X, spec.d() + 1); spec.d() + 1],
        }
    }

    pub fn to_record(&self) -> CertificateRecord {
        CertificateRecord {
            q: self.q.iter().map(SparsePoly::to_records).collect(),
            display: self.q.iter().map(|q| q.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateRecord {
    pub q: Vec<PolyRecord>,
    pub display: Vec<String>,
}

/// `sum_i (d q_i/dx_i + q_i df/dx_i)`.
pub fn certificate_image(spec: &ModelSpec, a: &SectionPoint, cert: &MembershipCertificate) -> Result<SparsePoly> {
    if cert.q.len() != spec.d() + 1 {
        return Err(Error::ArityMismatch {
            expected: spec.d() + 1,
            found: cert.q.len(),
        });
    }
    let f = a.section(spec);
    let mut acc = SparsePoly::zero(Family::X, spec.d() + 1);
    for (i, q) in cert.q.iter().enumerate() {
        acc = acc.add(&q.partial_derivative(i)?)?;
        acc = acc.add(&q.mul(&f.partial_derivative(i)?)?)?;
    }
    Ok(acc)
}

pub fn verify_certificate(spec: &ModelSpec, a: &SectionPoint, p: &MembershipQuery, cert: &MembershipCertificate) -> bool {
    matches!(certificate_image(spec, a, cert), Ok(img) if img == p.p)
}

/// Which `q`-degrees enter the linear system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMode {
    /// Every degree `0..=deg p - d`.
    Full,
    /// Only degrees `e` with `e = deg p - d (mod d+1)`; the others only
    /// meet rows of other degree classes, where the target is zero.
    DegreeClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonMemberWitness {
    /// The x-monomial of each row of the linear system, in row order.
    pub rows: Vec<String>,
    pub witness: InconsistencyWitness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MembershipOutcome {
    Member(MembershipCertificate),
    NonMember(NonMemberWitness),
}

impl MembershipOutcome {
    pub fn is_member(&self) -> bool {
        matches!(self, MembershipOutcome::Member(_))
    }

    pub fn verdict(&self) -> &'static str {
        if self.is_member() {
            "member"
        } else {
            "non-member"
        }
    }
}

/// Caveat attached to non-membership reports.
pub const NON_MEMBER_CAVEAT: &str = "non-membership shows the linear system is inconsistent; \
it implies a nonvanishing period derivative only if the tautological system is complete";

struct Unknown {
    var: usize,
    mono: Vec<u32>,
}

/// The linear system for `p = sum_i (d_i q_i + q_i d_i f)` together with its
/// unknowns and the x-monomial of each row.
fn membership_system(
    spec: &ModelSpec,
    a: &SectionPoint,
    query: &MembershipQuery,
    mode: SolveMode,
) -> Result<(LinearSystem, Vec<Unknown>, Vec<Vec<i64>>)> {
    let vars = spec.d() + 1;
    let d = spec.d() as i64;
    let deg = query.p.degree().unwrap_or(0);
    let f = a.section(spec);
    let df: Vec<SparsePoly> = (0..vars).map(|i| f.partial_derivative(i)).collect::<Result<_>>()?;
    let top = deg - d;
    let mut unknowns = Vec::new();
    for e in 0..=top.max(-1) {
        if mode == SolveMode::DegreeClass && (top - e) % (d + 1) != 0 {
            continue;
        }
        for var in 0..vars {
            for mono in monomials_of_degree(vars, e as u32) {
                unknowns.push(Unknown { var, mono });
            }
        }
    }
    let mut rows: BTreeMap<Vec<i64>, (BTreeMap<usize, Scalar>, Scalar)> = BTreeMap::new();
    for (e, c) in query.p.terms() {
        rows.entry(e.0.clone()).or_default().1 += c;
    }
    for (col, u) in unknowns.iter().enumerate() {
        let mono = SparsePoly::monomial(
            Family::X,
            ExponentVector(u.mono.iter().map(|&x| x as i64).collect()),
            Scalar::from_integer(1.into()),
        );
        let image = mono.partial_derivative(u.var)?.add(&mono.mul(&df[u.var])?)?;
        for (e, c) in image.terms() {
            *rows.entry(e.0.clone()).or_default().0.entry(col).or_default() += c;
        }
    }
    let labels = unknowns
        .iter()
        .map(|u| format!("q{}[{}]", u.var, monomial_name(&u.mono)))
        .collect();
    let mut sys = LinearSystem::new(labels)?;
    let mut row_monos = Vec::new();
    for (mono, (coeffs, rhs)) in rows {
        let mut dense = vec![Scalar::zero(); unknowns.len()];
        for (c, v) in coeffs {
            dense[c] = v;
        }
        sys.push_row(dense, rhs)?;
        row_monos.push(mono);
    }
    Ok((sys, unknowns, row_monos))
}

/// Decides whether `p e^{f_a}` is a total derivative, with a certificate
/// either way.
pub fn membership_test(
    spec: &ModelSpec,
    a: &SectionPoint,
    query: &MembershipQuery,
    mode: SolveMode,
) -> Result<MembershipOutcome> {
    if a.a.len() != spec.n() {
        return Err(Error::ArityMismatch {
            expected: spec.n(),
            found: a.a.len(),
        });
    }
    let vars = spec.d() + 1;
    let (sys, unknowns, row_monos) = membership_system(spec, a, query, mode)?;
    match solve_exact(&sys) {
        SolveOutcome::Solution { values, .. } => {
            let mut q = vec![SparsePoly::zero(Family::X, vars); vars];
            for (u, v) in unknowns.iter().zip(values) {
                if v.is_zero() {
                    continue;
                }
                let mono = SparsePoly::monomial(Family::X, ExponentVector(u.mono.iter().map(|&x| x as i64).collect()), v);
                q[u.var] = q[u.var].add(&mono)?;
            }
            let cert = MembershipCertificate { q };
            if !verify_certificate(spec, a, query, &cert) {
                return Err(Error::Invalid("solver produced a certificate that fails the audit".into()));
            }
            Ok(MembershipOutcome::Member(cert))
        }
        SolveOutcome::Inconsistent(witness) => {
            debug_assert!(sys.witness_is_valid(&witness));
            let rows = row_monos
                .iter()
                .map(|m| monomial_name(&m.iter().map(|&e| e as u32).collect::<Vec<_>>()))
                .collect();
            Ok(MembershipOutcome::NonMember(NonMemberWitness { rows, witness }))
        }
    }
}

/// Replays a non-membership witness against a freshly built system.
pub fn verify_witness(
    spec: &ModelSpec,
    a: &SectionPoint,
    query: &MembershipQuery,
    mode: SolveMode,
    w: &NonMemberWitness,
) -> Result<bool> {
    let (sys, _, _) = membership_system(spec, a, query, mode)?;
    Ok(sys.witness_is_valid(&w.witness))
}

/// The points `base + t direction` of a line in coefficient space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanLine {
    pub base: Vec<Scalar>,
    pub direction: Vec<Scalar>,
    pub params: Vec<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanSample {
    pub t: String,
    pub point: Vec<String>,
    pub verdict: &'static str,
}

/// Runs the membership test at every sample of the line, in parameter order.
pub fn scan_family(spec: &ModelSpec, query: &MembershipQuery, line: &ScanLine) -> Result<Vec<ScanSample>> {
    if line.direction.iter().all(Zero::is_zero) {
        return Err(Error::Invalid("scan direction must be nonzero".into()));
    }
    for v in [&line.base, &line.direction] {
        if v.len() != spec.n() {
            return Err(Error::ArityMismatch {
                expected: spec.n(),
                found: v.len(),
            });
        }
    }
    line.params
        .par_iter()
        .map(|t| {
            let coords: Vec<Scalar> = line.base.iter().zip(&line.direction).map(|(b, v)| b + t * v).collect();
            let point = SectionPoint::new(spec, coords)?;
            let outcome = membership_test(spec, &point, query, SolveMode::DegreeClass)?;
            Ok(ScanSample {
                t: format_scalar(t),
                point: point.coords().iter().map(format_scalar).collect(),
                verdict: outcome.verdict(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiltrationCheck {
    pub p: u32,
    pub spanning: bool,
    pub rank: usize,
    pub expected: usize,
}

/// Whether `(p-1)`-fold products of the basis sections span all monomials
/// of degree `(p-1)(d+1)`.
pub fn filtration_generators(spec: &ModelSpec, p: u32) -> Result<FiltrationCheck> {
    if p == 0 || p > MAX_PRODUCT_DEGREE + 1 {
        return Err(Error::Invalid(format!("p must lie in 1..={}", MAX_PRODUCT_DEGREE + 1)));
    }
    let vars = spec.d() + 1;
    let k = (p - 1) as usize;
    let target = monomials_of_degree(vars, (p - 1) * (spec.d() as u32 + 1));
    let products = multisets(spec.n(), k).into_iter().map(|ms| {
        let mut alpha = vec![0u32; spec.n()];
        for i in ms {
            alpha[i] += 1;
        }
        spec.combine(&alpha)
    });
    let result = span_check(products, &target, vars);
    let (spanning, rank) = match result {
        Surjectivity::Surjective { rank } => (true, rank),
        Surjectivity::Deficient { rank, .. } => (false, rank),
    };
    Ok(FiltrationCheck {
        p,
        spanning,
        rank,
        expected: target.len(),
    })
}
