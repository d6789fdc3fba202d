//! Truncated Laurent series in the a-variables, optionally tensored with
//! polynomials in the b-variables.
//!
//! The expansion index of a term is the total exponent carried by the
//! non-distinguished variables (a and b together) plus a per-series shift.
//! For the period series this is the power `j` of the geometric expansion in
//! `1/a_{i0}`. A series with truncation order `N` contains every term of
//! index `<= N` exactly and nothing above it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{ExponentVector, Family, PolyRecord, Scalar, SparsePoly};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    poly: SparsePoly,
    n: usize,
    distinguished: usize,
    truncation: i64,
    shift: i64,
}

impl LaurentSeries {
    /// Wraps `poly` (family `A` with arity `n`, or `AB` with arity `2n`),
    /// dropping any term above the truncation order.
    pub fn new(poly: SparsePoly, distinguished: usize, truncation: i64, shift: i64) -> Result<Self> {
        let n = match poly.family() {
            Family::A => poly.arity(),
            Family::AB => poly.arity() / 2,
            other => {
                return Err(Error::FamilyMismatch {
                    left: Family::A,
                    right: other,
                })
            }
        };
        if distinguished >= n {
            return Err(Error::IndexOutOfRange {
                index: distinguished,
                arity: n,
            });
        }
        let mut s = LaurentSeries {
            poly,
            n,
            distinguished,
            truncation,
            shift,
        };
        s.prune();
        Ok(s)
    }

    pub fn zero(family: Family, n: usize, distinguished: usize, truncation: i64) -> Result<Self> {
        let arity = if family == Family::AB { 2 * n } else { n };
        Self::new(SparsePoly::zero(family, arity), distinguished, truncation, 0)
    }

    fn prune(&mut self) {
        let (n, i0, shift, t) = (self.n, self.distinguished, self.shift, self.truncation);
        if self
            .poly
            .terms()
            .any(|(e, _)| raw_index(e, n, i0) + shift > t)
        {
            self.poly = self.poly.filter(|e| raw_index(e, n, i0) + shift <= t);
        }
    }

    pub fn poly(&self) -> &SparsePoly {
        &self.poly
    }

    pub fn family(&self) -> Family {
        self.poly.family()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn distinguished(&self) -> usize {
        self.distinguished
    }

    pub fn truncation(&self) -> i64 {
        self.truncation
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn index_of(&self, e: &ExponentVector) -> i64 {
        raw_index(e, self.n, self.distinguished) + self.shift
    }

    /// Largest raw index (shift removed) that is still exact.
    pub(crate) fn raw_bound(&self) -> i64 {
        self.truncation - self.shift
    }

    /// Rebuilds a series with the same layout but a new body and raw bound.
    pub(crate) fn with_body(&self, poly: SparsePoly, raw_bound: i64) -> LaurentSeries {
        let mut s = LaurentSeries {
            poly,
            n: self.n,
            distinguished: self.distinguished,
            truncation: raw_bound + self.shift,
            shift: self.shift,
        };
        s.prune();
        s
    }

    pub fn truncated(&self, order: i64) -> LaurentSeries {
        let mut s = self.clone();
        s.truncation = s.truncation.min(order);
        s.prune();
        s
    }

    fn check_layout(&self, other: &LaurentSeries) -> Result<()> {
        if self.family() != other.family() {
            return Err(Error::FamilyMismatch {
                left: self.family(),
                right: other.family(),
            });
        }
        if self.n != other.n || self.distinguished != other.distinguished {
            return Err(Error::Invalid("series layouts differ".into()));
        }
        Ok(())
    }

    /// Sum, exact up to the smaller of the two exact ranges.
    pub fn add(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        self.check_layout(other)?;
        let bound = self.raw_bound().min(other.raw_bound());
        Ok(self.with_body(self.poly.add(&other.poly)?, bound))
    }

    pub fn sub(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        self.add(&other.scale(&-Scalar::from_integer(1.into())))
    }

    pub fn scale(&self, c: &Scalar) -> LaurentSeries {
        self.with_body(self.poly.scalar_mul(c), self.raw_bound())
    }

    /// Coefficientwise `d/da_k`. The shift absorbs the index drop so the
    /// truncation order is unchanged.
    pub fn derivative_a(&self, k: usize) -> Result<LaurentSeries> {
        if k >= self.n {
            return Err(Error::IndexOutOfRange {
                index: k,
                arity: self.n,
            });
        }
        let mut s = self.clone();
        s.poly = self.poly.partial_derivative(k)?;
        if k != self.distinguished {
            s.shift += 1;
        }
        Ok(s)
    }

    /// True when both series agree on every term of index `<= order`.
    pub fn agrees_up_to(&self, other: &LaurentSeries, order: i64) -> bool {
        if self.check_layout(other).is_err() {
            return false;
        }
        let a = self.poly.filter(|e| self.index_of(e) <= order);
        let b = other.poly.filter(|e| other.index_of(e) <= order);
        a == b
    }

    /// Embeds an a-only series into the (a, b) layout with b-degree zero.
    pub fn to_ab(&self) -> LaurentSeries {
        if self.family() == Family::AB {
            return self.clone();
        }
        let n = self.n;
        let terms = self.poly.terms().map(|(e, c)| {
            let mut v = e.0.clone();
            v.extend(std::iter::repeat_n(0, n));
            (v, c.clone())
        });
        let poly = SparsePoly::from_terms(Family::AB, 2 * n, terms).expect("valid layout");
        LaurentSeries {
            poly,
            n,
            distinguished: self.distinguished,
            truncation: self.truncation,
            shift: self.shift,
        }
    }

    /// Multiplies an a-only series by the b-monomial `b^exps`.
    pub fn times_b_monomial(&self, exps: &[i64]) -> Result<LaurentSeries> {
        if exps.len() != self.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                found: exps.len(),
            });
        }
        let ab = self.to_ab();
        let mut shift = vec![0; self.n];
        shift.extend_from_slice(exps);
        let moved: i64 = exps
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.distinguished)
            .map(|(_, e)| e)
            .sum();
        let mut s = ab.clone();
        s.poly = ab.poly.shift(&ExponentVector(shift));
        // the raw index grew by `moved`; keep the same exact range
        s.shift -= moved;
        Ok(s)
    }

    /// Extracts the a-series multiplying `b^exps`.
    pub fn b_coefficient(&self, exps: &[i64]) -> Result<LaurentSeries> {
        if self.family() != Family::AB {
            return Err(Error::FamilyMismatch {
                left: Family::AB,
                right: self.family(),
            });
        }
        let n = self.n;
        let terms = self
            .poly
            .terms()
            .filter(|(e, _)| e.0[n..] == *exps)
            .map(|(e, c)| (e.0[..n].to_vec(), c.clone()));
        let poly = SparsePoly::from_terms(Family::A, n, terms)?;
        let moved: i64 = exps
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.distinguished)
            .map(|(_, e)| e)
            .sum();
        LaurentSeries::new(poly, self.distinguished, self.truncation, self.shift + moved)
    }

    /// Substitutes numeric values for every b-variable.
    pub fn specialize_b(&self, point: &[Scalar]) -> Result<LaurentSeries> {
        if self.family() != Family::AB {
            return Err(Error::FamilyMismatch {
                left: Family::AB,
                right: self.family(),
            });
        }
        if point.len() != self.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                found: point.len(),
            });
        }
        let n = self.n;
        let mut out = SparsePoly::zero(Family::A, n);
        for (e, c) in self.poly.terms() {
            let bpart = SparsePoly::monomial(Family::B, ExponentVector(e.0[n..].to_vec()), c.clone());
            let v = bpart.evaluate(point)?;
            out = out.add(&SparsePoly::monomial(Family::A, ExponentVector(e.0[..n].to_vec()), v))?;
        }
        // b-exponents stop counting towards the index; a term of b-degree p
        // contributed at most p to it.
        let max_b = self.b_degree().ok_or(Error::Invalid(
            "specialization needs a uniform b-degree".into(),
        ))?;
        LaurentSeries::new(out, self.distinguished, self.truncation - max_b, self.shift)
    }

    /// Set of (a-degree, b-degree) pairs over all terms.
    pub fn bidegrees(&self) -> std::collections::BTreeSet<(i64, i64)> {
        let n = self.n;
        self.poly
            .terms()
            .map(|(e, _)| {
                if self.family() == Family::AB {
                    (e.0[..n].iter().sum(), e.0[n..].iter().sum())
                } else {
                    (e.degree(), 0)
                }
            })
            .collect()
    }

    /// Every term has a-degree `-(1+p)` and b-degree `p`.
    pub fn is_homogeneous_for(&self, p: u32) -> bool {
        let p = p as i64;
        self.bidegrees().iter().all(|&(da, db)| da == -(1 + p) && db == p)
    }

    /// The common b-degree, if all terms share one.
    pub fn b_degree(&self) -> Option<i64> {
        let degs: std::collections::BTreeSet<i64> = self.bidegrees().iter().map(|d| d.1).collect();
        match degs.len() {
            0 => Some(0),
            1 => degs.into_iter().next(),
            _ => None,
        }
    }

    pub fn to_record(&self) -> SeriesRecord {
        SeriesRecord {
            n: self.n,
            distinguished: self.distinguished,
            truncation_order: self.truncation,
            index_shift: self.shift,
            p: self.b_degree(),
            poly: self.poly.to_records(),
        }
    }

    pub fn from_record(rec: &SeriesRecord) -> Result<Self> {
        let poly = SparsePoly::from_records(&rec.poly)?;
        let s = LaurentSeries::new(poly, rec.distinguished, rec.truncation_order, rec.index_shift)?;
        if s.n != rec.n {
            return Err(Error::ArityMismatch {
                expected: rec.n,
                found: s.n,
            });
        }
        Ok(s)
    }
}

pub(crate) fn raw_index(e: &ExponentVector, n: usize, i0: usize) -> i64 {
    e.0.iter()
        .enumerate()
        .filter(|(slot, _)| slot % n != i0)
        .map(|(_, x)| x)
        .sum()
}

/// Exact term records plus truncation metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub n: usize,
    pub distinguished: usize,
    pub truncation_order: i64,
    pub index_shift: i64,
    pub p: Option<i64>,
    pub poly: PolyRecord,
}

impl Serialize for LaurentSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = SeriesRecord::deserialize(d)?;
        LaurentSeries::from_record(&rec).map_err(serde::de::Error::custom)
    }
}
