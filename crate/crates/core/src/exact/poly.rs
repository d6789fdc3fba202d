use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::scalar::{display_scalar, format_scalar, parse_scalar, pow_scalar, Scalar};
use crate::error::{Error, Result};

/// Which set of variables a polynomial is written in.
///
/// `AB` holds the a-variables in the first half of each exponent vector and
/// the b-variables in the second half. Negative exponents are permitted only
/// on a-variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    X,
    A,
    B,
    AB,
}

impl Family {
    fn allows_negative(self, slot: usize, arity: usize) -> bool {
        match self {
            Family::A => true,
            Family::AB => slot < arity / 2,
            Family::X | Family::B => false,
        }
    }

    fn var_name(self, slot: usize, arity: usize) -> String {
        match self {
            Family::X => format!("x{slot}"),
            Family::A => format!("a{slot}"),
            Family::B => format!("b{slot}"),
            Family::AB => {
                let n = arity / 2;
                if slot < n {
                    format!("a{slot}")
                } else {
                    format!("b{}", slot - n)
                }
            }
        }
    }
}

/// Exponent vector under graded lexicographic order: total degree first,
/// then lexicographic with the first variable most significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExponentVector(pub Vec<i64>);

impl ExponentVector {
    pub fn zeros(arity: usize) -> Self {
        ExponentVector(vec![0; arity])
    }

    pub fn unit(arity: usize, index: usize) -> Self {
        let mut e = vec![0; arity];
        e[index] = 1;
        ExponentVector(e)
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(self.0.iter().zip(&other.0).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(self.0.iter().zip(&other.0).map(|(x, y)| x - y).collect())
    }
}

impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate (Laurent) polynomial with exact rational coefficients.
///
/// Terms are kept in a `BTreeMap`, so iteration follows the graded lex order
/// and two polynomials are equal iff their term maps are equal. Zero
/// coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePoly {
    family: Family,
    arity: usize,
    terms: BTreeMap<ExponentVector, Scalar>,
}

impl SparsePoly {
    pub fn zero(family: Family, arity: usize) -> Self {
        SparsePoly {
            family,
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(family: Family, arity: usize, c: Scalar) -> Self {
        let mut p = Self::zero(family, arity);
        p.add_term(ExponentVector::zeros(arity), c);
        p
    }

    pub fn one(family: Family, arity: usize) -> Self {
        Self::constant(family, arity, Scalar::one())
    }

    pub fn var(family: Family, arity: usize, index: usize) -> Result<Self> {
        if index >= arity {
            return Err(Error::IndexOutOfRange { index, arity });
        }
        Ok(Self::monomial(family, ExponentVector::unit(arity, index), Scalar::one()))
    }

    /// Single term; the caller guarantees the exponent vector is admissible.
    pub fn monomial(family: Family, exps: ExponentVector, c: Scalar) -> Self {
        let mut p = Self::zero(family, exps.len());
        p.add_term(exps, c);
        p
    }

    /// Builds a polynomial, merging duplicate exponents and validating
    /// arity and exponent signs.
    pub fn from_terms<I>(family: Family, arity: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, Scalar)>,
    {
        let mut p = Self::zero(family, arity);
        for (exps, c) in terms {
            if exps.len() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    found: exps.len(),
                });
            }
            for (slot, &e) in exps.iter().enumerate() {
                if e < 0 && !family.allows_negative(slot, arity) {
                    return Err(Error::NegativeExponent { family, exponent: e });
                }
            }
            p.add_term(ExponentVector(exps), c);
        }
        Ok(p)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn arity(&self) -> usize {
        self.arity
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

    /// Terms in ascending graded lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExponentVector, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[i64]) -> Scalar {
        self.terms
            .get(&ExponentVector(exps.to_vec()))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn leading_term(&self) -> Option<(&ExponentVector, &Scalar)> {
        self.terms.iter().next_back()
    }

    /// Total degree of the highest term, `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        self.terms.keys().map(ExponentVector::degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(ExponentVector::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub(crate) fn add_term(&mut self, exps: ExponentVector, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
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

    fn check_compatible(&self, other: &SparsePoly) -> Result<()> {
        if self.family != other.family {
            return Err(Error::FamilyMismatch {
                left: self.family,
                right: other.family,
            });
        }
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: other.arity,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SparsePoly {
        self.scalar_mul(&-Scalar::one())
    }

    pub fn mul(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.check_compatible(other)?;
        let mut out = SparsePoly::zero(self.family, self.arity);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1.add(e2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, c: &Scalar) -> SparsePoly {
        let mut out = SparsePoly::zero(self.family, self.arity);
        if c.is_zero() {
            return out;
        }
        for (e, v) in &self.terms {
            out.terms.insert(e.clone(), v * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> SparsePoly {
        let mut acc = SparsePoly::one(self.family, self.arity);
        for _ in 0..k {
            acc = acc.mul(self).expect("same family");
        }
        acc
    }

    /// Termwise derivative; Laurent exponents follow the power rule.
    pub fn partial_derivative(&self, var_index: usize) -> Result<SparsePoly> {
        if var_index >= self.arity {
            return Err(Error::IndexOutOfRange {
                index: var_index,
                arity: self.arity,
            });
        }
        let mut out = SparsePoly::zero(self.family, self.arity);
        for (e, c) in &self.terms {
            let m = e.0[var_index];
            if m == 0 {
                continue;
            }
            let mut lowered = e.clone();
            lowered.0[var_index] -= 1;
            out.add_term(lowered, c * Scalar::from_integer(BigInt::from(m)));
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: point.len(),
            });
        }
        let mut total = Scalar::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (index, (&exp, x)) in e.0.iter().zip(point).enumerate() {
                term *= pow_scalar(x, exp).ok_or(Error::Pole {
                    index,
                    exponent: exp,
                })?;
            }
            total += term;
        }
        Ok(total)
    }

    /// Keeps only the terms accepted by `keep`.
    pub fn filter<F: Fn(&ExponentVector) -> bool>(&self, keep: F) -> SparsePoly {
        SparsePoly {
            family: self.family,
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| keep(e))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Multiplies every exponent vector by the monomial `shift`.
    pub fn shift(&self, shift: &ExponentVector) -> SparsePoly {
        SparsePoly {
            family: self.family,
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.add(shift), c.clone()))
                .collect(),
        }
    }

    pub fn to_records(&self) -> PolyRecord {
        PolyRecord {
            family: self.family,
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .rev()
                .map(|(e, c)| TermRecord {
                    exponents: e.0.clone(),
                    coeff: format_scalar(c),
                })
                .collect(),
        }
    }

    pub fn from_records(rec: &PolyRecord) -> Result<SparsePoly> {
        let terms = rec
            .terms
            .iter()
            .map(|t| Ok((t.exponents.clone(), parse_scalar(&t.coeff)?)))
            .collect::<Result<Vec<_>>>()?;
        SparsePoly::from_terms(rec.family, rec.arity, terms)
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mag = c.abs();
            let vars: Vec<String> = e
                .0
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(slot, &x)| {
                    let name = self.family.var_name(slot, self.arity);
                    if x == 1 {
                        name
                    } else {
                        format!("{name}^{x}")
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", display_scalar(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", display_scalar(&mag), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Serialized term: integer exponents and a `num/den` coefficient string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub exponents: Vec<i64>,
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyRecord {
    pub family: Family,
    pub arity: usize,
    pub terms: Vec<TermRecord>,
}

impl Serialize for SparsePoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_records().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SparsePoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = PolyRecord::deserialize(d)?;
        SparsePoly::from_records(&rec).map_err(serde::de::Error::custom)
    }
}
