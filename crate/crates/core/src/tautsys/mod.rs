//! Tautological systems for the anticanonical model and the derived
//! systems satisfied by `p`-th derivatives of their solutions.
//!
//! Symmetry operators follow one convention everywhere: for a generator
//! `E_kl` acting on the section basis by the matrix `M` (`[target][source]`)
//! the operator is `sum_{t,s} M[t][s] a_s d/da_t + beta(E_kl)` with
//! `beta(E_kl) = delta_kl`. The identity then maps to `(d+1)` times the
//! Euler operator plus `d+1`, matching the Euler equation.

mod reference;
mod vector;

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{int, Scalar};
use crate::model::{multisets, LatticeRelation, LieGenerator, ModelSpec};
use crate::weyl::{OperatorRecord, Space, WeylOperator};

pub use reference::{
    compare_fourier_families, reference_fourier_families, reference_scalar_system_p1,
    reference_scalar_system_p2, FamilyComparison, FourierComparison, FourierReference,
};
pub use vector::{
    build_vector_system, derivative_shift, scalarize, tuples, vectorize, VectorEquation, VectorSolution, VectorSystem,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type", content = "p", rename_all = "lowercase")]
pub enum SystemKind {
    Base,
    Vector(u32),
    Scalar(u32),
}

/// Which equation family an operator belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorFamily {
    Toric,
    Symmetry,
    Euler,
    BEuler,
    BAnnihilator,
    Exchange,
    /// Vector systems only: equality of mixed partials.
    Commutation,
    /// Vector systems only: `phi_lk = phi_kl`.
    Symmetric,
}

impl OperatorFamily {
    pub fn name(self) -> &'static str {
        match self {
            OperatorFamily::Toric => "toric",
            OperatorFamily::Symmetry => "symmetry",
            OperatorFamily::Euler => "euler",
            OperatorFamily::BEuler => "b-euler",
            OperatorFamily::BAnnihilator => "b-annihilator",
            OperatorFamily::Exchange => "exchange",
            OperatorFamily::Commutation => "commutation",
            OperatorFamily::Symmetric => "symmetric",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledOperator {
    pub family: OperatorFamily,
    pub label: String,
    pub op: WeylOperator,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffSystem {
    pub kind: SystemKind,
    pub n: usize,
    pub p: u32,
    pub beta_e: Scalar,
    pub operators: Vec<LabeledOperator>,
}

impl DiffSystem {
    pub fn space(&self) -> Space {
        self.operators.first().map_or(Space::Primal, |o| o.op.space())
    }

    pub fn family(&self, family: OperatorFamily) -> impl Iterator<Item = &LabeledOperator> {
        self.operators.iter().filter(move |o| o.family == family)
    }

    pub fn max_derivative_order(&self) -> u32 {
        self.operators.iter().map(|o| o.op.max_derivative_order()).max().unwrap_or(0)
    }

    /// Transforms every operator; labels and families are kept.
    pub fn fourier(&self) -> DiffSystem {
        DiffSystem {
            operators: self
                .operators
                .iter()
                .map(|o| LabeledOperator {
                    family: o.family,
                    label: o.label.clone(),
                    op: o.op.fourier(),
                })
                .collect(),
            ..self.clone()
        }
    }

    /// Sign-normalized canonical forms of one family.
    pub fn canonical_family(&self, family: OperatorFamily) -> BTreeSet<String> {
        self.family(family)
            .map(|o| o.op.sign_normalized().to_string())
            .collect()
    }

    /// All operators as sign-normalized canonical forms.
    pub fn canonical_forms(&self) -> BTreeSet<String> {
        self.operators
            .iter()
            .map(|o| o.op.sign_normalized().to_string())
            .collect()
    }

    pub fn to_record(&self) -> SystemRecord {
        SystemRecord {
            kind: self.kind,
            p: self.p,
            n: self.n,
            beta_e: crate::exact::format_scalar(&self.beta_e),
            space: self.space(),
            operators: self
                .operators
                .iter()
                .map(|o| LabeledRecord {
                    family: o.family,
                    label: o.label.clone(),
                    display: o.op.to_string(),
                    operator: o.op.to_record(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LabeledRecord {
    pub family: OperatorFamily,
    pub label: String,
    pub display: String,
    pub operator: OperatorRecord,
}

#[derive(Debug, Clone, Serialize)]
pub struct SystemRecord {
    pub kind: SystemKind,
    pub p: u32,
    pub n: usize,
    pub beta_e: String,
    pub space: Space,
    pub operators: Vec<LabeledRecord>,
}

/// Collects operators, dropping zeros and duplicates up to sign.
#[derive(Default)]
pub(crate) struct OperatorList {
    seen: BTreeSet<String>,
    ops: Vec<LabeledOperator>,
}

impl OperatorList {
    pub(crate) fn push(&mut self, family: OperatorFamily, label: String, op: WeylOperator) {
        if op.is_zero() {
            return;
        }
        if self.seen.insert(op.sign_normalized().to_string()) {
            self.ops.push(LabeledOperator { family, label, op });
        }
    }

    pub(crate) fn into_vec(self) -> Vec<LabeledOperator> {
        self.ops
    }
}

pub fn toric_operator(n: usize, rel: &LatticeRelation) -> WeylOperator {
    let zero = vec![0u32; n];
    WeylOperator::derivative_monomial(n, &rel.plus(), &zero)
        - WeylOperator::derivative_monomial(n, &rel.minus(), &zero)
}

pub fn index_label(v: &[u32]) -> String {
    let parts: Vec<String> = v.iter().map(u32::to_string).collect();
    format!("({})", parts.join(","))
}

fn relation_label(rel: &LatticeRelation) -> String {
    let parts: Vec<String> = rel.ell.iter().map(i64::to_string).collect();
    format!("toric({})", parts.join(","))
}

/// `beta(E_kl)`.
pub fn symmetry_constant(g: &LieGenerator) -> Scalar {
    if g.k == g.l {
        Scalar::one()
    } else {
        Scalar::zero()
    }
}

/// `sum M[t][s] a_s d/da_t`, and the same in b when `with_b` is set.
pub fn symmetry_vector_field(n: usize, g: &LieGenerator, with_b: bool) -> WeylOperator {
    let mut op = WeylOperator::zero(n, Space::Primal);
    for (t, row) in g.matrix.iter().enumerate() {
        for (s, &m) in row.iter().enumerate() {
            if m == 0 {
                continue;
            }
            op = op + (WeylOperator::a(n, s) * WeylOperator::da(n, t)).scale(&int(m));
            if with_b {
                op = op + (WeylOperator::b(n, s) * WeylOperator::db(n, t)).scale(&int(m));
            }
        }
    }
    op
}

fn check_relations(spec: &ModelSpec, relations: &[LatticeRelation]) -> Result<()> {
    if relations.is_empty() {
        return Err(Error::Invalid("at least one lattice relation is required".into()));
    }
    for r in relations {
        if r.ell.len() != spec.n() {
            return Err(Error::ArityMismatch {
                expected: spec.n(),
                found: r.ell.len(),
            });
        }
        if !r.is_relation_of(spec) {
            return Err(Error::Invalid(format!("{:?} is not a relation of the model", r.ell)));
        }
    }
    Ok(())
}

/// Toric operators, one symmetry operator per `gl(d+1)` generator and the
/// Euler operator `sum a_i d/da_i + 1`.
pub fn build_tautological_system(spec: &ModelSpec, relations: &[LatticeRelation]) -> Result<DiffSystem> {
    check_relations(spec, relations)?;
    let n = spec.n();
    let mut list = OperatorList::default();
    for r in relations {
        list.push(OperatorFamily::Toric, relation_label(r), toric_operator(n, r));
    }
    for g in spec.lie_generators() {
        let op = symmetry_vector_field(n, &g, false) + symmetry_constant(&g);
        list.push(OperatorFamily::Symmetry, g.label(), op);
    }
    list.push(
        OperatorFamily::Euler,
        "euler".into(),
        WeylOperator::euler_a(n) + Scalar::one(),
    );
    Ok(DiffSystem {
        kind: SystemKind::Base,
        n,
        p: 0,
        beta_e: Scalar::one(),
        operators: list.into_vec(),
    })
}

fn counts(n: usize, ms: &[usize]) -> Vec<u32> {
    let mut v = vec![0u32; n];
    for &i in ms {
        v[i] += 1;
    }
    v
}

/// The scalar system for `p`-th derivatives in the variables (a, b).
///
/// `p = 0` returns the tautological system itself.
pub fn build_scalar_system(spec: &ModelSpec, relations: &[LatticeRelation], p: u32) -> Result<DiffSystem> {
    if p == 0 {
        return build_tautological_system(spec, relations);
    }
    check_relations(spec, relations)?;
    let n = spec.n();
    let zero = vec![0u32; n];
    let mut list = OperatorList::default();
    for r in relations {
        list.push(OperatorFamily::Toric, relation_label(r), toric_operator(n, r));
    }
    for g in spec.lie_generators() {
        let op = symmetry_vector_field(n, &g, true) + symmetry_constant(&g);
        list.push(OperatorFamily::Symmetry, g.label(), op);
    }
    list.push(
        OperatorFamily::Euler,
        "euler".into(),
        WeylOperator::euler_a(n) + int(1 + p as i64),
    );
    list.push(
        OperatorFamily::BEuler,
        "b-euler".into(),
        WeylOperator::euler_b(n) + int(-(p as i64)),
    );
    for ms in multisets(n, p as usize + 1) {
        let beta = counts(n, &ms);
        list.push(
            OperatorFamily::BAnnihilator,
            format!("db{}", index_label(&beta)),
            WeylOperator::derivative_monomial(n, &zero, &beta),
        );
    }
    // Moving an index between the a-slot and any b-slot leaves the
    // (p+1)-th derivative unchanged.
    for ms in multisets(n, p as usize) {
        let beta = counts(n, &ms);
        for i in 0..n {
            for j in 0..n {
                if beta[j] == 0 || i == j {
                    continue;
                }
                let mut alpha_l = zero.clone();
                alpha_l[i] = 1;
                let mut alpha_r = zero.clone();
                alpha_r[j] = 1;
                let mut beta_r = beta.clone();
                beta_r[j] -= 1;
                beta_r[i] += 1;
                let op = WeylOperator::derivative_monomial(n, &alpha_l, &beta)
                    - WeylOperator::derivative_monomial(n, &alpha_r, &beta_r);
                list.push(
                    OperatorFamily::Exchange,
                    format!("exchange a{i}{} <-> a{j}{}", index_label(&beta), index_label(&beta_r)),
                    op,
                );
            }
        }
    }
    Ok(DiffSystem {
        kind: SystemKind::Scalar(p),
        n,
        p,
        beta_e: int(1 + p as i64),
        operators: list.into_vec(),
    })
}
