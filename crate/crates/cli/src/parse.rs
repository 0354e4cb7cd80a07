// SPDX-License-Identifier: Apache-2.0

//! Parsers for command-line values.

use std::str::FromStr;

use num_bigint::BigInt;
use torsion_core::{BinForm, QuadForm};

fn int_list(s: &str) -> Result<Vec<BigInt>, String> {
    s.split(',')
        .map(|t| BigInt::from_str(t.trim()).map_err(|e| format!("bad integer {t:?}: {e}")))
        .collect()
}

/// `a,b,c`
pub fn form(s: &str) -> Result<QuadForm, String> {
    match int_list(s)?.as_slice() {
        [a, b, c] => Ok(QuadForm { a: a.clone(), b: b.clone(), c: c.clone() }),
        v => Err(format!("a form needs three coefficients a,b,c, got {}", v.len())),
    }
}

/// `t₀,…,tₙ` for `Σ tᵢ xⁱ y^{n−i}`
pub fn delta(s: &str) -> Result<BinForm, String> {
    let t = int_list(s)?;
    if t.len() < 2 {
        return Err("a binary form needs at least two coefficients t0,t1".into());
    }
    BinForm::new(t).map_err(|e| e.to_string())
}

/// Inclusive `LO..HI`; `LO > HI` is an empty range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiscRange {
    pub lo: i64,
    pub hi: i64,
}

pub fn disc_range(s: &str) -> Result<DiscRange, String> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected LO..HI, got {s:?}"))?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo = lo.trim().parse().map_err(|e| format!("bad lower bound {lo:?}: {e}"))?;
    let hi = hi.trim().parse().map_err(|e| format!("bad upper bound {hi:?}: {e}"))?;
    Ok(DiscRange { lo, hi })
}
