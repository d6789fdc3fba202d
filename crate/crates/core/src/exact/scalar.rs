use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact rational coefficient. `BigRational` keeps itself reduced with a
/// positive denominator after every operation.
pub type Scalar = BigRational;

pub fn int(v: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

/// `num/den` with the denominator always written, e.g. `-3/1`.
pub fn format_scalar(s: &Scalar) -> String {
    format!("{}/{}", s.numer(), s.denom())
}

/// Short human form: integers without `/1`.
pub fn display_scalar(s: &Scalar) -> String {
    if s.is_integer() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// Accepts `n`, `n/d` and `-n/d`; rejects zero denominators and decimals.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let err = || Error::ParseScalar(text.to_string());
    let t = text.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = n.parse().map_err(|_| err())?;
    let den: BigInt = d.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(Scalar::new(num, den))
}

/// Integer power with negative exponents allowed for nonzero bases.
pub fn pow_scalar(base: &Scalar, exp: i64) -> Option<Scalar> {
    if exp < 0 && base.is_zero() {
        return None;
    }
    let mut acc = Scalar::one();
    for _ in 0..exp.unsigned_abs() {
        acc *= base;
    }
    Some(if exp < 0 { acc.recip() } else { acc })
}

/// `m (m-1) ... (m-k+1)`, valid for negative `m`.
pub fn falling_factorial(m: i64, k: u32) -> BigInt {
    (0..k as i64).fold(BigInt::one(), |acc, i| acc * BigInt::from(m - i))
}

pub fn factorial(k: u32) -> BigInt {
    (1..=k as u64).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    falling_factorial(n as i64, k) / factorial(k)
}
