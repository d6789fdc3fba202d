//! The Weyl algebra on two families of coordinates (a and b) and their
//! Fourier duals (zeta and xi).
//!
//! Every operator is stored in normal order: each term is
//! `c * a^alpha * b^beta * da^gamma * db^delta` with all coordinate symbols to
//! the left of all derivative symbols. Terms live in a `BTreeMap`, so two
//! operators are equal exactly when their canonical forms are equal.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    binomial, display_scalar, falling_factorial, format_scalar, parse_scalar, ExponentVector,
    Family, Scalar, SparsePoly,
};
use crate::series::LaurentSeries;

/// Primal operators act on functions of (a, b); dual operators on
/// functions of (zeta, xi).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Primal,
    Dual,
}

impl Space {
    fn name(self) -> &'static str {
        match self {
            Space::Primal => "primal",
            Space::Dual => "dual",
        }
    }

    fn flip(self) -> Space {
        match self {
            Space::Primal => Space::Dual,
            Space::Dual => Space::Primal,
        }
    }

    fn symbols(self) -> [&'static str; 4] {
        match self {
            Space::Primal => ["a", "b", "da", "db"],
            Space::Dual => ["z", "xi", "dz", "dxi"],
        }
    }
}

/// Exponents of one normal-ordered word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeylMonomial {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub da: Vec<u32>,
    pub db: Vec<u32>,
}

impl WeylMonomial {
    pub fn one(n: usize) -> Self {
        WeylMonomial {
            a: vec![0; n],
            b: vec![0; n],
            da: vec![0; n],
            db: vec![0; n],
        }
    }

    pub fn degree(&self) -> u32 {
        self.a.iter().chain(&self.b).chain(&self.da).chain(&self.db).sum()
    }

    pub fn derivative_order(&self) -> u32 {
        self.da.iter().chain(&self.db).sum()
    }

    pub fn has_b(&self) -> bool {
        self.b.iter().chain(&self.db).any(|&e| e > 0)
    }

    pub fn has_a(&self) -> bool {
        self.a.iter().chain(&self.da).any(|&e| e > 0)
    }

    /// Change in expansion index caused by this word, ignoring slot `i0`.
    fn index_delta(&self, i0: usize) -> i64 {
        let sum = |v: &[u32]| -> i64 {
            v.iter()
                .enumerate()
                .filter(|(i, _)| *i != i0)
                .map(|(_, &e)| e as i64)
                .sum()
        };
        sum(&self.a) + sum(&self.b) - sum(&self.da) - sum(&self.db)
    }
}

impl Ord for WeylMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.a.cmp(&other.a))
            .then_with(|| self.b.cmp(&other.b))
            .then_with(|| self.da.cmp(&other.da))
            .then_with(|| self.db.cmp(&other.db))
    }
}

impl PartialOrd for WeylMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylOperator {
    n: usize,
    space: Space,
    terms: BTreeMap<WeylMonomial, Scalar>,
}

/// `d^q x^r = sum_k C(q,k) r!/(r-k)! x^(r-k) d^(q-k)` in one variable.
fn reorder_one(p: u32, q: u32, r: u32, s: u32) -> Vec<(BigInt, u32, u32)> {
    (0..=q.min(r))
        .map(|k| {
            let c = binomial(q, k) * falling_factorial(r as i64, k);
            (c, p + r - k, q + s - k)
        })
        .collect()
}

impl WeylOperator {
    pub fn zero(n: usize, space: Space) -> Self {
        WeylOperator {
            n,
            space,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Scalar) -> Self {
        Self::from_monomial(n, Space::Primal, WeylMonomial::one(n), c)
    }

    pub fn identity(n: usize) -> Self {
        Self::constant(n, Scalar::one())
    }

    pub fn from_monomial(n: usize, space: Space, m: WeylMonomial, c: Scalar) -> Self {
        let mut op = Self::zero(n, space);
        op.add_term(m, c);
        op
    }

    fn unit(n: usize, slot: usize, i: usize) -> Self {
        let mut m = WeylMonomial::one(n);
        match slot {
            0 => m.a[i] = 1,
            1 => m.b[i] = 1,
            2 => m.da[i] = 1,
            _ => m.db[i] = 1,
        }
        Self::from_monomial(n, Space::Primal, m, Scalar::one())
    }

    pub fn a(n: usize, i: usize) -> Self {
        Self::unit(n, 0, i)
    }

    pub fn b(n: usize, i: usize) -> Self {
        Self::unit(n, 1, i)
    }

    pub fn da(n: usize, i: usize) -> Self {
        Self::unit(n, 2, i)
    }

    pub fn db(n: usize, i: usize) -> Self {
        Self::unit(n, 3, i)
    }

    /// Pure derivative monomial `da^alpha * db^beta`.
    pub fn derivative_monomial(n: usize, alpha: &[u32], beta: &[u32]) -> Self {
        let mut m = WeylMonomial::one(n);
        m.da.copy_from_slice(alpha);
        m.db.copy_from_slice(beta);
        Self::from_monomial(n, Space::Primal, m, Scalar::one())
    }

    /// `sum_i a_i da_i`.
    pub fn euler_a(n: usize) -> Self {
        (0..n).fold(Self::zero(n, Space::Primal), |acc, i| {
            acc + Self::a(n, i) * Self::da(n, i)
        })
    }

    /// `sum_i b_i db_i`.
    pub fn euler_b(n: usize) -> Self {
        (0..n).fold(Self::zero(n, Space::Primal), |acc, i| {
            acc + Self::b(n, i) * Self::db(n, i)
        })
    }

    /// Reinterprets the operator in the other space without transforming it.
    pub fn in_space(mut self, space: Space) -> Self {
        self.space = space;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&WeylMonomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn max_derivative_order(&self) -> u32 {
        self.terms.keys().map(WeylMonomial::derivative_order).max().unwrap_or(0)
    }

    pub fn involves_b(&self) -> bool {
        self.terms.keys().any(WeylMonomial::has_b)
    }

    /// How far the expansion index of a series can drop under this operator.
    pub fn order_loss(&self, i0: usize) -> i64 {
        self.terms
            .keys()
            .map(|m| -m.index_delta(i0))
            .max()
            .unwrap_or(0)
            .max(0)
    }

    fn add_term(&mut self, m: WeylMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check(&self, other: &WeylOperator) -> Result<()> {
        if self.n != other.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        if self.space != other.space {
            return Err(Error::SpaceMismatch {
                expected: self.space.name(),
                found: other.space.name(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &WeylOperator) -> Result<WeylOperator> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> WeylOperator {
        let mut out = Self::zero(self.n, self.space);
        if !c.is_zero() {
            for (m, v) in &self.terms {
                out.terms.insert(m.clone(), v * c);
            }
        }
        out
    }

    /// Normal-ordered product `self ∘ other`.
    pub fn compose(&self, other: &WeylOperator) -> Result<WeylOperator> {
        self.check(other)?;
        let n = self.n;
        let mut out = Self::zero(n, self.space);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                // Only slots where a derivative of `m1` meets a coordinate of
                // `m2` expand into several terms.
                let mut base = WeylMonomial::one(n);
                let mut mixed = Vec::new();
                for i in 0..n {
                    base.a[i] = m1.a[i] + m2.a[i];
                    base.da[i] = m1.da[i] + m2.da[i];
                    base.b[i] = m1.b[i] + m2.b[i];
                    base.db[i] = m1.db[i] + m2.db[i];
                    if m1.da[i] > 0 && m2.a[i] > 0 {
                        mixed.push((false, i, reorder_one(m1.a[i], m1.da[i], m2.a[i], m2.da[i])));
                    }
                    if m1.db[i] > 0 && m2.b[i] > 0 {
                        mixed.push((true, i, reorder_one(m1.b[i], m1.db[i], m2.b[i], m2.db[i])));
                    }
                }
                let mut partial = vec![(BigInt::one(), base)];
                for (is_b, i, options) in mixed {
                    let mut next = Vec::with_capacity(partial.len() * options.len());
                    for (c, m) in &partial {
                        for (k, x, d) in &options {
                            let mut m = m.clone();
                            if is_b {
                                m.b[i] = *x;
                                m.db[i] = *d;
                            } else {
                                m.a[i] = *x;
                                m.da[i] = *d;
                            }
                            next.push((c * k, m));
                        }
                    }
                    partial = next;
                }
                let c = c1 * c2;
                for (k, m) in partial {
                    out.add_term(m, &c * Scalar::from_integer(k));
                }
            }
        }
        Ok(out)
    }

    /// Fourier transform: `a_i -> d/dzeta_i`, `d/da_i -> -zeta_i`, and the same
    /// for b/xi. Applied to a dual operator it maps back with the same rule,
    /// so applying it twice sends `a -> -a` and `d -> -d`.
    pub fn fourier(&self) -> WeylOperator {
        let n = self.n;
        let target = self.space.flip();
        let mut out = Self::zero(n, target);
        for (m, c) in &self.terms {
            let mut left = WeylMonomial::one(n);
            left.da.clone_from(&m.a);
            left.db.clone_from(&m.b);
            let mut right = WeylMonomial::one(n);
            right.a.clone_from(&m.da);
            right.b.clone_from(&m.db);
            let sign = if m.derivative_order() % 2 == 0 {
                c.clone()
            } else {
                -c.clone()
            };
            let l = Self::from_monomial(n, target, left, sign);
            let r = Self::from_monomial(n, target, right, Scalar::one());
            let prod = l.compose(&r).expect("same layout");
            for (mm, cc) in prod.terms {
                out.add_term(mm, cc);
            }
        }
        out
    }

    /// Substitutes `a -> -a` and `d -> -d` in both families.
    pub fn reflect(&self) -> WeylOperator {
        let mut out = Self::zero(self.n, self.space);
        for (m, c) in &self.terms {
            let odd = m.degree() % 2 == 1;
            out.add_term(m.clone(), if odd { -c.clone() } else { c.clone() });
        }
        out
    }

    /// Multiplies by `-1` if needed so the leading term is positive.
    pub fn sign_normalized(&self) -> WeylOperator {
        match self.terms.iter().next_back() {
            Some((_, c)) if c.is_negative() => self.scale(&-Scalar::one()),
            _ => self.clone(),
        }
    }

    /// Applies each term to the monomial `a^m b^e` (b part empty for
    /// a-only inputs) and accumulates into `out`.
    fn apply_to_monomial(
        &self,
        a_exp: &[i64],
        b_exp: Option<&[i64]>,
        c: &Scalar,
        mut emit: impl FnMut(Vec<i64>, Option<Vec<i64>>, Scalar),
    ) {
        'terms: for (m, k) in &self.terms {
            let mut factor = BigInt::one();
            for (&e, &k) in a_exp.iter().zip(&m.da) {
                if k == 0 {
                    continue;
                }
                let ff = falling_factorial(e, k);
                if ff.is_zero() {
                    continue 'terms;
                }
                factor *= ff;
            }
            if let Some(b) = b_exp {
                for (&e, &k) in b.iter().zip(&m.db) {
                    if k == 0 {
                        continue;
                    }
                    let ff = falling_factorial(e, k);
                    if ff.is_zero() {
                        continue 'terms;
                    }
                    factor *= ff;
                }
            }
            let new_a = (0..self.n)
                .map(|i| a_exp[i] - m.da[i] as i64 + m.a[i] as i64)
                .collect();
            let new_b = b_exp.map(|b| (0..self.n).map(|i| b[i] - m.db[i] as i64 + m.b[i] as i64).collect());
            emit(new_a, new_b, c * k * Scalar::from_integer(factor));
        }
    }

    /// Exact action on a polynomial in the a-family, the b-family or both.
    pub fn apply_poly(&self, p: &SparsePoly) -> Result<SparsePoly> {
        if self.space != Space::Primal {
            return Err(Error::SpaceMismatch {
                expected: "primal",
                found: self.space.name(),
            });
        }
        let n = self.n;
        let family = p.family();
        let expected_arity = match family {
            Family::A | Family::B => n,
            Family::AB => 2 * n,
            Family::X => {
                return Err(Error::FamilyMismatch {
                    left: Family::AB,
                    right: Family::X,
                })
            }
        };
        if p.arity() != expected_arity {
            return Err(Error::ArityMismatch {
                expected: expected_arity,
                found: p.arity(),
            });
        }
        let bad = match family {
            Family::A => self.terms.keys().any(WeylMonomial::has_b),
            Family::B => self.terms.keys().any(WeylMonomial::has_a),
            _ => false,
        };
        if bad {
            return Err(Error::FamilyMismatch {
                left: Family::AB,
                right: family,
            });
        }
        let zeros = vec![0i64; n];
        let mut out = SparsePoly::zero(family, p.arity());
        for (e, c) in p.terms() {
            let (a_exp, b_exp): (&[i64], Option<&[i64]>) = match family {
                Family::A => (&e.0, None),
                Family::B => (&zeros, Some(&e.0)),
                _ => (&e.0[..n], Some(&e.0[n..])),
            };
            self.apply_to_monomial(a_exp, b_exp, c, |na, nb, coeff| {
                let exps = match family {
                    Family::A => na,
                    Family::B => nb.expect("b part"),
                    _ => {
                        let mut v = na;
                        v.extend(nb.expect("b part"));
                        v
                    }
                };
                out.add_term(ExponentVector(exps), coeff);
            });
        }
        Ok(out)
    }

    /// Action on a truncated series. The result is exact only up to a
    /// reduced order: a term of the output can receive contributions from
    /// input terms up to `order_loss` indices higher, so the truncation order
    /// drops by that amount and nothing beyond it is kept.
    pub fn apply_series(&self, s: &LaurentSeries) -> Result<LaurentSeries> {
        let body = self.apply_poly(s.poly())?;
        let loss = self.order_loss(s.distinguished());
        Ok(s.with_body(body, s.raw_bound() - loss))
    }

    pub fn to_record(&self) -> OperatorRecord {
        OperatorRecord {
            space: self.space,
            n: self.n,
            terms: self
                .terms
                .iter()
                .rev()
                .map(|(m, c)| WeylTermRecord {
                    a_coeff_exponents: m.a.clone(),
                    b_coeff_exponents: m.b.clone(),
                    coeff: format_scalar(c),
                    da_exponents: m.da.clone(),
                    db_exponents: m.db.clone(),
                })
                .collect(),
        }
    }

    pub fn from_record(rec: &OperatorRecord) -> Result<WeylOperator> {
        let mut op = Self::zero(rec.n, rec.space);
        for t in &rec.terms {
            for v in [&t.a_coeff_exponents, &t.b_coeff_exponents, &t.da_exponents, &t.db_exponents] {
                if v.len() != rec.n {
                    return Err(Error::ArityMismatch {
                        expected: rec.n,
                        found: v.len(),
                    });
                }
            }
            let m = WeylMonomial {
                a: t.a_coeff_exponents.clone(),
                b: t.b_coeff_exponents.clone(),
                da: t.da_exponents.clone(),
                db: t.db_exponents.clone(),
            };
            op.add_term(m, parse_scalar(&t.coeff)?);
        }
        Ok(op)
    }
}

impl fmt::Display for WeylOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let sym = self.space.symbols();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mut factors = Vec::new();
            for (s, v) in sym.iter().zip([&m.a, &m.b, &m.da, &m.db]) {
                for (i, &e) in v.iter().enumerate() {
                    match e {
                        0 => {}
                        1 => factors.push(format!("{s}{i}")),
                        _ => factors.push(format!("{s}{i}^{e}")),
                    }
                }
            }
            let mag = c.abs();
            if factors.is_empty() {
                write!(f, "{}", display_scalar(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", display_scalar(&mag), factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl std::ops::Add for WeylOperator {
    type Output = WeylOperator;
    fn add(self, rhs: WeylOperator) -> WeylOperator {
        self.try_add(&rhs).expect("operator layouts must agree")
    }
}

impl std::ops::Sub for WeylOperator {
    type Output = WeylOperator;
    fn sub(self, rhs: WeylOperator) -> WeylOperator {
        self.try_add(&-rhs).expect("operator layouts must agree")
    }
}

impl std::ops::Neg for WeylOperator {
    type Output = WeylOperator;
    fn neg(self) -> WeylOperator {
        self.scale(&-Scalar::one())
    }
}

impl std::ops::Mul for WeylOperator {
    type Output = WeylOperator;
    fn mul(self, rhs: WeylOperator) -> WeylOperator {
        self.compose(&rhs).expect("operator layouts must agree")
    }
}

impl std::ops::Add<Scalar> for WeylOperator {
    type Output = WeylOperator;
    fn add(self, rhs: Scalar) -> WeylOperator {
        let c = WeylOperator::constant(self.n, rhs).in_space(self.space);
        self + c
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeylTermRecord {
    pub a_coeff_exponents: Vec<u32>,
    pub b_coeff_exponents: Vec<u32>,
    pub coeff: String,
    pub da_exponents: Vec<u32>,
    pub db_exponents: Vec<u32>,
}

/// Serialized operator. In the dual space the four exponent lists refer to
/// zeta, xi, d/dzeta and d/dxi respectively.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorRecord {
    pub space: Space,
    pub n: usize,
    pub terms: Vec<WeylTermRecord>,
}

impl Serialize for WeylOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeylOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = OperatorRecord::deserialize(d)?;
        WeylOperator::from_record(&rec).map_err(serde::de::Error::custom)
    }
}
