//! Parsers for multi-indices, points and scan lines.

use anyhow::{bail, Context, Result};
use tautsys::exact::{parse_scalar, Scalar};

/// A multi-index of length `n`, either as a full list (`2,0,0`) or as a sum
/// of unit vectors (`2e0`, `e1+e2`).
pub fn parse_alpha(text: &str, n: usize) -> Result<Vec<u32>> {
    let t = text.trim();
    if t.contains(',') {
        let v = t
            .split(',')
            .map(|x| x.trim().parse::<u32>().with_context(|| format!("bad multi-index entry {x:?}")))
            .collect::<Result<Vec<_>>>()?;
        if v.len() != n {
            bail!("multi-index has {} entries, expected {n}", v.len());
        }
        return Ok(v);
    }
    let mut alpha = vec![0u32; n];
    for term in t.split('+') {
        let term = term.trim();
        let Some((coeff, index)) = term.split_once('e') else {
            bail!("bad multi-index term {term:?}; use forms like 2e0 or e1+e2");
        };
        let c: u32 = if coeff.is_empty() {
            1
        } else {
            coeff.parse().with_context(|| format!("bad multiplicity in {term:?}"))?
        };
        let i: usize = index.parse().with_context(|| format!("bad index in {term:?}"))?;
        if i >= n {
            bail!("index {i} out of range; the model has {n} coefficients");
        }
        alpha[i] += c;
    }
    Ok(alpha)
}

/// Comma-separated exact rationals.
pub fn parse_scalars(text: &str) -> Result<Vec<Scalar>> {
    text.split(',')
        .map(|x| parse_scalar(x).map_err(anyhow::Error::from))
        .collect()
}

/// `BASE:DIRECTION:PARAMS`, each a comma-separated list of rationals.
pub fn parse_line(text: &str) -> Result<(Vec<Scalar>, Vec<Scalar>, Vec<Scalar>)> {
    let parts: Vec<&str> = text.split(':').collect();
    let [base, dir, params] = parts.as_slice() else {
        bail!("scan line must look like BASE:DIRECTION:PARAMS, e.g. 0,1,1:1,0,0:0,1,2");
    };
    Ok((parse_scalars(base)?, parse_scalars(dir)?, parse_scalars(params)?))
}
