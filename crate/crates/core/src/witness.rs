// SPDX-License-Identifier: Apache-2.0

//! Certificates of n-torsion: a form `δ` of degree `n` with `res(q, δ) = ±1`.
//!
//! When `I_qⁿ = (g)`, writing `g = Σ tᵢ αⁱ β^{n−i}` gives `δ = Σ tᵢ xⁱ y^{n−i}`,
//! and the norm identity forces `|res(q, δ)| = |N(g)|/aⁿ = 1`.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::binforms::{act, resultant, BinForm, GroupElem, PairQD};
use crate::error::{Error, Result};
use crate::intlinalg::{solve_linear, IntMatrix};
use crate::qforms::{self, QuadForm};
use crate::qorders::{canonical_associate, evaluate_binform, ideal_from_form, monomials, principal_generator, OrderIdeal};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    #[serde(with = "crate::serde_int")]
    pub resultant: BigInt,
    /// `res(q, δ) = ±1`
    pub unit: bool,
    /// `(δ(α, β)) = I_qⁿ`
    pub ideal_equal: bool,
    /// the class of `q` is `n`-torsion
    pub torsion: bool,
    /// `unit ⇒ torsion` and `ideal_equal ⇔ unit`
    pub consistent: bool,
}

/// Moves `q` to a form with `a > 0` by a proper change of variables:
/// returns `(q', γ)` with `q' = q∘γ`.
fn positive_leading(q: &QuadForm) -> Result<(QuadForm, qforms::UnimodMat)> {
    if q.a.is_positive() {
        Ok((q.clone(), qforms::UnimodMat::identity()))
    } else {
        qforms::positive_representative(q)
    }
}

/// A unit-resultant `δ` of degree `n` when the class of `q` is `n`-torsion.
pub fn construct_witness(q: &QuadForm, n: u64) -> Result<Option<BinForm>> {
    if n == 0 {
        return Err(Error::InvalidArgument("witness degree must be at least 1".into()));
    }
    let g = q.content();
    if !g.is_one() {
        return Err(Error::Imprimitive(g));
    }
    let (qp, gamma) = positive_leading(q)?;
    let data = ideal_from_form(&qp)?;
    let order = &data.order;
    let j = data.ideal.pow(order, n)?;
    let Some(gen) = principal_generator(order, &j)? else {
        return Ok(None);
    };
    let gen = canonical_associate(order, &gen)?;
    let mons = monomials(order, &data.alpha, &data.beta, n as usize);
    let rows = vec![
        mons.iter().map(|m| m.u.clone()).collect::<Vec<_>>(),
        mons.iter().map(|m| m.v.clone()).collect::<Vec<_>>(),
    ];
    let t = solve_linear(&IntMatrix::from_rows(&rows), &[gen.u.clone(), gen.v.clone()])?
        .ok_or_else(|| Error::Internal(format!("generator of I^{n} for {qp} is not a combination of monomials")))?;
    let mut delta = BinForm::new(t)?;
    if gamma != qforms::UnimodMat::identity() {
        // (qp, δ) = Γ_γ(q, δ₀), so δ₀ comes from Γ_{γ⁻¹}
        let back = GroupElem::matrix(n as usize, gamma.inverse());
        let p = act(&back, &PairQD::new(qp.clone(), delta))?;
        if p.q != *q {
            return Err(Error::Internal(format!("transport of {qp} did not return {q}")));
        }
        delta = p.delta;
    }
    let r = resultant(q, &delta);
    if !r.abs().is_one() {
        return Err(Error::Internal(format!("witness {delta} for {q} has resultant {r}")));
    }
    Ok(Some(delta))
}

pub fn verify_witness(q: &QuadForm, delta: &BinForm) -> Result<WitnessReport> {
    q.validate()?;
    let n = delta.degree();
    if n == 0 {
        return Err(Error::InvalidArgument("witness degree must be at least 1".into()));
    }
    let res = resultant(q, delta);
    let unit = res.abs().is_one();
    let torsion = q.is_primitive() && qforms::is_n_torsion(q, n as u64)?;
    let ideal_equal = if q.is_primitive() { ideal_matches(q, delta)? } else { false };
    let consistent = (!unit || torsion) && (ideal_equal == unit);
    Ok(WitnessReport { resultant: res, unit, ideal_equal, torsion, consistent })
}

fn ideal_matches(q: &QuadForm, delta: &BinForm) -> Result<bool> {
    let (qp, gamma) = positive_leading(q)?;
    let n = delta.degree();
    let dp = if gamma == qforms::UnimodMat::identity() {
        delta.clone()
    } else {
        act(&GroupElem::matrix(n, gamma), &PairQD::new(q.clone(), delta.clone()))?.delta
    };
    let data = ideal_from_form(&qp)?;
    let g = evaluate_binform(&dp, &data);
    if g.is_zero() {
        return Ok(false);
    }
    let j = data.ideal.pow(&data.order, n as u64)?;
    Ok(OrderIdeal::principal(&data.order, &g)? == j)
}
