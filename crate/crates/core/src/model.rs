//! The anticanonical model of projective space: sections of `O(d+1)` on
//! `P^d`, their exponent matrix, integer relations among the exponents and
//! the `gl(d+1)` action on the section basis.

use std::collections::{BTreeMap, HashMap};

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{binomial, sparse_rank, Scalar};

/// Largest `d` accepted by [`build_projective_model`].
pub const MAX_DIMENSION: usize = 6;

/// Largest total degree multiple accepted by the surjectivity checks.
pub const MAX_PRODUCT_DEGREE: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisOrdering {
    /// Descending lexicographic order, `x0^(d+1)` first.
    GradedLex,
    /// Interior monomial `x0 x1 ... xd` first. For `d = 1, 2` this is the
    /// exact coefficient labelling of the classical worked examples; for
    /// larger `d` the remaining monomials follow in graded lex order.
    InteriorFirst,
    /// Caller supplied order; must be a permutation of all basis monomials.
    Explicit(Vec<Vec<u32>>),
}

impl BasisOrdering {
    pub fn tag(&self) -> &'static str {
        match self {
            BasisOrdering::GradedLex => "graded-lex",
            BasisOrdering::InteriorFirst => "interior-first",
            BasisOrdering::Explicit(_) => "explicit",
        }
    }
}

/// Monomials of total degree `deg` in `vars` variables, descending lex.
pub fn monomials_of_degree(vars: usize, deg: u32) -> Vec<Vec<u32>> {
    fn rec(vars: usize, deg: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if vars == 1 {
            prefix.push(deg);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=deg).rev() {
            prefix.push(e);
            rec(vars - 1, deg - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if vars == 0 {
        if deg == 0 {
            out.push(vec![]);
        }
        return out;
    }
    rec(vars, deg, &mut Vec::new(), &mut out);
    out
}

/// Multisets of size `k` drawn from `0..n`, as sorted index lists.
pub fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn monomial_name(exps: &[u32]) -> String {
    let parts: Vec<String> = exps
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { format!("x{i}") } else { format!("x{i}^{e}") })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn interior_first_basis(d: usize) -> Vec<Vec<u32>> {
    match d {
        1 => vec![vec![1, 1], vec![2, 0], vec![0, 2]],
        2 => vec![
            vec![1, 1, 1],
            vec![2, 1, 0],
            vec![1, 2, 0],
            vec![0, 3, 0],
            vec![0, 2, 1],
            vec![0, 1, 2],
            vec![0, 0, 3],
            vec![1, 0, 2],
            vec![2, 0, 1],
            vec![3, 0, 0],
        ],
        _ => {
            let interior = vec![1u32; d + 1];
            let mut basis = vec![interior.clone()];
            basis.extend(
                monomials_of_degree(d + 1, d as u32 + 1)
                    .into_iter()
                    .filter(|m| *m != interior),
            );
            basis
        }
    }
}

/// Sections of the anticanonical bundle of `P^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    d: usize,
    basis: Vec<Vec<u32>>,
    distinguished: usize,
    ordering: BasisOrdering,
}

pub fn build_projective_model(d: usize, ordering: BasisOrdering) -> Result<ModelSpec> {
    if d == 0 {
        return Err(Error::Invalid("dimension must be at least 1".into()));
    }
    if d > MAX_DIMENSION {
        return Err(Error::DimensionTooLarge {
            d,
            max: MAX_DIMENSION,
        });
    }
    let all = monomials_of_degree(d + 1, d as u32 + 1);
    let basis = match &ordering {
        BasisOrdering::GradedLex => all.clone(),
        BasisOrdering::InteriorFirst => interior_first_basis(d),
        BasisOrdering::Explicit(list) => {
            let mut sorted = list.clone();
            sorted.sort();
            let mut expected = all.clone();
            expected.sort();
            if sorted != expected {
                return Err(Error::InvalidOrdering(format!(
                    "explicit basis must list each of the {} degree-{} monomials exactly once",
                    all.len(),
                    d + 1
                )));
            }
            list.clone()
        }
    };
    let interior = vec![1u32; d + 1];
    let distinguished = basis
        .iter()
        .position(|m| *m == interior)
        .expect("interior monomial is always a basis element");
    Ok(ModelSpec {
        d,
        basis,
        distinguished,
        ordering,
    })
}

impl ModelSpec {
    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of basis sections, `C(2d+1, d)`.
    pub fn n(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn distinguished(&self) -> usize {
        self.distinguished
    }

    pub fn ordering(&self) -> &BasisOrdering {
        &self.ordering
    }

    /// `(d+1) x n` matrix whose columns are the basis exponents.
    pub fn exponent_matrix(&self) -> Vec<Vec<i64>> {
        (0..=self.d)
            .map(|r| self.basis.iter().map(|m| m[r] as i64).collect())
            .collect()
    }

    pub fn index_of(&self, exps: &[u32]) -> Option<usize> {
        self.basis.iter().position(|m| m == exps)
    }

    /// Exponent vector of the product `prod_i (x^{m_i})^{alpha_i}`.
    pub fn combine(&self, alpha: &[u32]) -> Vec<u32> {
        let mut out = vec![0u32; self.d + 1];
        for (m, &k) in self.basis.iter().zip(alpha) {
            for (o, e) in out.iter_mut().zip(m) {
                *o += e * k;
            }
        }
        out
    }

    /// Action matrix of `E_kl = x_k d/dx_l` on the basis, indexed
    /// `[target][source]`.
    pub fn lie_action(&self, k: usize, l: usize) -> Result<LieGenerator> {
        for idx in [k, l] {
            if idx > self.d {
                return Err(Error::IndexOutOfRange {
                    index: idx,
                    arity: self.d + 1,
                });
            }
        }
        let n = self.n();
        let mut matrix = vec![vec![0i64; n]; n];
        for (src, m) in self.basis.iter().enumerate() {
            if m[l] == 0 {
                continue;
            }
            let mut target = m.clone();
            target[l] -= 1;
            target[k] += 1;
            let t = self.index_of(&target).expect("degree is preserved");
            matrix[t][src] += m[l] as i64;
        }
        Ok(LieGenerator { k, l, matrix })
    }

    /// All `(d+1)^2` generators `E_kl`, row-major in `(k, l)`.
    pub fn lie_generators(&self) -> Vec<LieGenerator> {
        (0..=self.d)
            .flat_map(|k| (0..=self.d).map(move |l| (k, l)))
            .map(|(k, l)| self.lie_action(k, l).expect("indices in range"))
            .collect()
    }

    /// Every integer relation `A l = 0` with `|l+| <= bound`, one
    /// representative per sign pair, first nonzero entry positive.
    ///
    /// Positive and negative parts have disjoint support, so each relation
    /// is an unordered pair of distinct multisets of equal size with the same
    /// exponent sum.
    pub fn lattice_relations(&self, bound: usize) -> Vec<LatticeRelation> {
        let n = self.n();
        let mut out = Vec::new();
        for size in 1..=bound {
            let mut groups: BTreeMap<Vec<u32>, Vec<Vec<usize>>> = BTreeMap::new();
            for ms in multisets(n, size) {
                let mut alpha = vec![0u32; n];
                for &i in &ms {
                    alpha[i] += 1;
                }
                groups.entry(self.combine(&alpha)).or_default().push(ms);
            }
            for members in groups.values() {
                for (i, u) in members.iter().enumerate() {
                    for v in &members[i + 1..] {
                        if u.iter().any(|x| v.contains(x)) {
                            continue;
                        }
                        let mut ell = vec![0i64; n];
                        for &x in u {
                            ell[x] += 1;
                        }
                        for &x in v {
                            ell[x] -= 1;
                        }
                        out.push(LatticeRelation::new(ell));
                    }
                }
            }
        }
        out.sort_by(|x, y| x.plus_degree().cmp(&y.plus_degree()).then_with(|| y.ell.cmp(&x.ell)));
        out
    }

    /// Rank of the span of products of degree `k(d+1)` and `l(d+1)`
    /// monomials inside degree `(k+l)(d+1)`.
    pub fn multiplication_surjectivity(&self, k: u32, l: u32) -> Result<Surjectivity> {
        if k + l > MAX_PRODUCT_DEGREE {
            return Err(Error::Invalid(format!(
                "k + l = {} exceeds the bound {MAX_PRODUCT_DEGREE}",
                k + l
            )));
        }
        let vars = self.d + 1;
        let step = self.d as u32 + 1;
        let left = monomials_of_degree(vars, k * step);
        let right = monomials_of_degree(vars, l * step);
        let target = monomials_of_degree(vars, (k + l) * step);
        let products = left.iter().flat_map(|u| {
            right
                .iter()
                .map(move |v| u.iter().zip(v).map(|(x, y)| x + y).collect::<Vec<u32>>())
        });
        Ok(span_check(products, &target, vars))
    }
}

/// Rank of the monomials produced by `products` against the full monomial
/// basis `target`.
pub(crate) fn span_check<I: Iterator<Item = Vec<u32>>>(products: I, target: &[Vec<u32>], vars: usize) -> Surjectivity {
    let column: HashMap<&Vec<u32>, usize> = target.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let rows = products.map(|p| {
        let c = column[&p];
        BTreeMap::from([(c, Scalar::one())])
    });
    let rank = sparse_rank(rows);
    let deg = target.first().map_or(0, |m| m.iter().sum::<u32>());
    let expected = binomial(deg + vars as u32 - 1, vars as u32 - 1);
    let expected: usize = expected.try_into().expect("small dimension");
    debug_assert_eq!(expected, target.len());
    if rank == expected {
        Surjectivity::Surjective { rank }
    } else {
        Surjectivity::Deficient { rank, expected }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Surjectivity {
    Surjective { rank: usize },
    Deficient { rank: usize, expected: usize },
}

impl Surjectivity {
    pub fn is_surjective(&self) -> bool {
        matches!(self, Surjectivity::Surjective { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LieGenerator {
    pub k: usize,
    pub l: usize,
    pub matrix: Vec<Vec<i64>>,
}

impl LieGenerator {
    pub fn label(&self) -> String {
        format!("E{}{}", self.k, self.l)
    }

    pub fn trace(&self) -> i64 {
        (0..self.matrix.len()).map(|i| self.matrix[i][i]).sum()
    }
}

pub fn matrix_mul(x: &[Vec<i64>], y: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = x.len();
    let m = y.first().map_or(0, Vec::len);
    let mut out = vec![vec![0i64; m]; n];
    for i in 0..n {
        for (k, yk) in y.iter().enumerate() {
            let a = x[i][k];
            if a == 0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += a * yk[j];
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeRelation {
    pub ell: Vec<i64>,
}

impl LatticeRelation {
    pub fn new(mut ell: Vec<i64>) -> Self {
        if ell.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
            for x in ell.iter_mut() {
                *x = -*x;
            }
        }
        LatticeRelation { ell }
    }

    pub fn plus(&self) -> Vec<u32> {
        self.ell.iter().map(|&x| x.max(0) as u32).collect()
    }

    pub fn minus(&self) -> Vec<u32> {
        self.ell.iter().map(|&x| (-x).max(0) as u32).collect()
    }

    pub fn plus_degree(&self) -> u32 {
        self.plus().iter().sum()
    }

    pub fn minus_degree(&self) -> u32 {
        self.minus().iter().sum()
    }

    pub fn is_relation_of(&self, spec: &ModelSpec) -> bool {
        let a = spec.exponent_matrix();
        self.ell.iter().any(|&x| x != 0)
            && a.iter()
                .all(|row| row.iter().zip(&self.ell).map(|(x, y)| x * y).sum::<i64>() == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientLabel {
    pub label: String,
    pub monomial: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelRecord {
    pub d: usize,
    pub n: usize,
    pub basis: Vec<Vec<u32>>,
    pub i0: usize,
    pub ordering: String,
    pub coefficients: Vec<CoefficientLabel>,
}

impl ModelSpec {
    pub fn to_record(&self) -> ModelRecord {
        ModelRecord {
            d: self.d,
            n: self.n(),
            basis: self.basis.clone(),
            i0: self.distinguished,
            ordering: self.ordering.tag().to_string(),
            coefficients: self
                .basis
                .iter()
                .enumerate()
                .map(|(i, m)| CoefficientLabel {
                    label: format!("a{i}"),
                    monomial: monomial_name(m),
                })
                .collect(),
        }
    }
}

impl Serialize for ModelSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}
