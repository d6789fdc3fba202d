//! Systems written out term by term from their index formulas, used as
//! references for the general builders.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{symmetry_constant, DiffSystem, OperatorFamily, OperatorList, SystemKind};
use crate::error::{Error, Result};
use crate::exact::int;
use crate::model::{LatticeRelation, LieGenerator, ModelSpec};
use crate::weyl::{Space, WeylOperator};

type Op = WeylOperator;

/// `x_ij`, the coefficient of `a_i d/da_j` in the symmetry operator.
fn x_entry(g: &LieGenerator, i: usize, j: usize) -> i64 {
    g.matrix[j][i]
}

fn product(n: usize, factors: impl IntoIterator<Item = Op>) -> Op {
    factors.into_iter().fold(Op::identity(n), |acc, f| acc * f)
}

fn toric_literal(n: usize, r: &LatticeRelation, letter: fn(usize, usize) -> Op) -> Op {
    let side = |v: Vec<u32>| {
        product(
            n,
            v.iter()
                .enumerate()
                .flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize))
                .map(|i| letter(n, i))
                .collect::<Vec<_>>(),
        )
    };
    side(r.plus()) - side(r.minus())
}

fn coupled_symmetry(n: usize, g: &LieGenerator) -> Op {
    let mut op = Op::zero(n, Space::Primal);
    for i in 0..n {
        for j in 0..n {
            let x = x_entry(g, i, j);
            if x != 0 {
                op = op + (Op::a(n, i) * Op::da(n, j)).scale(&int(x));
                op = op + (Op::b(n, i) * Op::db(n, j)).scale(&int(x));
            }
        }
    }
    op + symmetry_constant(g)
}

fn sum_euler(n: usize, coord: fn(usize, usize) -> Op, deriv: fn(usize, usize) -> Op) -> Op {
    (0..n).fold(Op::zero(n, Space::Primal), |acc, i| acc + coord(n, i) * deriv(n, i))
}

fn common(spec: &ModelSpec, relations: &[LatticeRelation], list: &mut OperatorList, p: i64) {
    let n = spec.n();
    for r in relations {
        list.push(OperatorFamily::Toric, "P(da)".into(), toric_literal(n, r, Op::da));
    }
    for g in spec.lie_generators() {
        list.push(OperatorFamily::Symmetry, g.label(), coupled_symmetry(n, &g));
    }
    list.push(OperatorFamily::Euler, "euler".into(), sum_euler(n, Op::a, Op::da) + int(1 + p));
    list.push(OperatorFamily::BEuler, "b-euler".into(), sum_euler(n, Op::b, Op::db) + int(-p));
}

/// First-derivative scalar system, every index pair enumerated.
pub fn reference_scalar_system_p1(spec: &ModelSpec, relations: &[LatticeRelation]) -> DiffSystem {
    let n = spec.n();
    let mut list = OperatorList::default();
    common(spec, relations, &mut list, 1);
    for i in 0..n {
        for j in 0..n {
            list.push(
                OperatorFamily::Exchange,
                format!("da{i} db{j} - da{j} db{i}"),
                Op::da(n, i) * Op::db(n, j) - Op::da(n, j) * Op::db(n, i),
            );
            list.push(
                OperatorFamily::BAnnihilator,
                format!("db{i} db{j}"),
                Op::db(n, i) * Op::db(n, j),
            );
        }
    }
    DiffSystem {
        kind: SystemKind::Scalar(1),
        n,
        p: 1,
        beta_e: int(2),
        operators: list.into_vec(),
    }
}

/// Second-derivative scalar system, every index triple enumerated.
pub fn reference_scalar_system_p2(spec: &ModelSpec, relations: &[LatticeRelation]) -> DiffSystem {
    let n = spec.n();
    let mut list = OperatorList::default();
    common(spec, relations, &mut list, 2);
    let t = |x: usize, y: usize, z: usize| Op::da(n, x) * Op::db(n, y) * Op::db(n, z);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                list.push(
                    OperatorFamily::BAnnihilator,
                    format!("db{i} db{j} db{k}"),
                    Op::db(n, i) * Op::db(n, j) * Op::db(n, k),
                );
                list.push(OperatorFamily::Exchange, format!("({i},{j},{k})"), t(i, j, k) - t(j, k, i));
                list.push(OperatorFamily::Exchange, format!("({j},{k},{i})"), t(j, k, i) - t(k, i, j));
            }
        }
    }
    DiffSystem {
        kind: SystemKind::Scalar(2),
        n,
        p: 2,
        beta_e: int(3),
        operators: list.into_vec(),
    }
}

/// Generator families of the Fourier-transformed first-derivative system,
/// in the dual variables `zeta` (for a) and `xi` (for b).
#[derive(Debug, Clone)]
pub struct FourierReference {
    pub families: Vec<(OperatorFamily, Vec<WeylOperator>, bool)>,
    /// Whether each composed left-hand form equals its expanded normal
    /// order, including the trace and `n` constants.
    pub identities_hold: bool,
}

fn dual(op: Op) -> Op {
    op.in_space(Space::Dual)
}

fn zeta(n: usize, i: usize) -> Op {
    dual(Op::a(n, i))
}

fn xi(n: usize, i: usize) -> Op {
    dual(Op::b(n, i))
}

fn dzeta(n: usize, i: usize) -> Op {
    dual(Op::da(n, i))
}

fn dxi(n: usize, i: usize) -> Op {
    dual(Op::db(n, i))
}

fn dual_const(n: usize, c: i64) -> Op {
    dual(Op::constant(n, int(c)))
}

pub fn reference_fourier_families(spec: &ModelSpec, relations: &[LatticeRelation]) -> FourierReference {
    let n = spec.n();
    let ni = n as i64;
    let mut ok = true;

    let toric: Vec<Op> = relations
        .iter()
        .map(|r| dual(toric_literal(n, r, Op::a)))
        .collect();

    let mut exchange = Vec::new();
    let mut annihilator = Vec::new();
    for i in 0..n {
        for j in 0..n {
            exchange.push(zeta(n, i) * xi(n, j) - zeta(n, j) * xi(n, i));
            annihilator.push(xi(n, i) * xi(n, j));
        }
    }

    let mut symmetry = Vec::new();
    for g in spec.lie_generators() {
        let mut lhs = dual(Op::zero(n, Space::Primal));
        let mut rhs = dual(Op::zero(n, Space::Primal));
        let mut trace = 0i64;
        for i in 0..n {
            trace += x_entry(&g, i, i);
            for j in 0..n {
                let (x, xt) = (x_entry(&g, i, j), x_entry(&g, j, i));
                if x != 0 {
                    let x = int(x);
                    lhs = lhs + (dzeta(n, i) * zeta(n, j)).scale(&x) + (dxi(n, i) * xi(n, j)).scale(&x);
                }
                if xt != 0 {
                    let xt = int(xt);
                    rhs = rhs + (zeta(n, i) * dzeta(n, j)).scale(&xt) + (xi(n, i) * dxi(n, j)).scale(&xt);
                }
            }
        }
        rhs = rhs + dual_const(n, 2 * trace);
        ok &= lhs == rhs;
        let beta = symmetry_constant(&g);
        symmetry.push(lhs - dual(Op::constant(n, beta)));
    }

    let mut euler_lhs = dual_const(n, 2);
    let mut euler_rhs = dual_const(n, -ni + 2);
    let mut beuler_lhs = dual_const(n, -1);
    let mut beuler_rhs = dual_const(n, -ni - 1);
    for i in 0..n {
        euler_lhs = euler_lhs + dzeta(n, i) * (-zeta(n, i));
        euler_rhs = euler_rhs - zeta(n, i) * dzeta(n, i);
        beuler_lhs = beuler_lhs + dxi(n, i) * (-xi(n, i));
        beuler_rhs = beuler_rhs - xi(n, i) * dxi(n, i);
    }
    ok &= euler_lhs == euler_rhs && beuler_lhs == beuler_rhs;

    FourierReference {
        families: vec![
            (OperatorFamily::Toric, toric, false),
            (OperatorFamily::Exchange, exchange, false),
            (OperatorFamily::BAnnihilator, annihilator, true),
            (OperatorFamily::Symmetry, symmetry, false),
            (OperatorFamily::Euler, vec![euler_rhs], true),
            (OperatorFamily::BEuler, vec![beuler_rhs], true),
        ],
        identities_hold: ok,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyComparison {
    pub family: OperatorFamily,
    /// `exact` or `up-to-sign`.
    pub mode: &'static str,
    pub produced: usize,
    pub expected: usize,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FourierComparison {
    pub families: Vec<FamilyComparison>,
    pub identities_hold: bool,
    pub all_match: bool,
}

fn forms<'a>(ops: impl Iterator<Item = &'a Op>, exact: bool) -> BTreeSet<String> {
    ops.filter(|o| !o.is_zero())
        .map(|o| if exact { o.to_string() } else { o.sign_normalized().to_string() })
        .collect()
}

/// Compares the transform of the first-derivative scalar system with the
/// reference generator families.
pub fn compare_fourier_families(
    spec: &ModelSpec,
    relations: &[LatticeRelation],
    transformed: &DiffSystem,
) -> Result<FourierComparison> {
    if transformed.p != 1 || transformed.space() != Space::Dual {
        return Err(Error::UnsupportedOrder {
            p: transformed.p,
            reason: "the reference generator families exist for the first-derivative system in the dual space",
        });
    }
    let reference = reference_fourier_families(spec, relations);
    let mut families = Vec::new();
    for (family, ops, exact) in &reference.families {
        let expected = forms(ops.iter(), *exact);
        let produced = forms(transformed.family(*family).map(|o| &o.op), *exact);
        families.push(FamilyComparison {
            family: *family,
            mode: if *exact { "exact" } else { "up-to-sign" },
            produced: produced.len(),
            expected: expected.len(),
            matches: produced == expected,
        });
    }
    let covered: BTreeSet<OperatorFamily> = families.iter().map(|f| f.family).collect();
    let stray = transformed.operators.iter().any(|o| !covered.contains(&o.family));
    let all_match = !stray && reference.identities_hold && families.iter().all(|f| f.matches);
    Ok(FourierComparison {
        families,
        identities_hold: reference.identities_hold,
        all_match,
    })
}
