// SPDX-License-Identifier: Apache-2.0

//! `G_n(ℤ)`-equivalence of unit-resultant pairs and bounded orbit enumeration.
//!
//! Equivalence is decided exactly. Transports `(χ, γ)` with
//! `χ·(q₁∘γ)/det γ = q₂` form finitely many cosets of the proper automorph
//! group of `q₂`. A proper automorph `M` fixes the root `(α : β)` of `q₂`, so it
//! multiplies the residue `δ(α, β)` by a unit `μ_M`. Over a real order the
//! automorph group is `±M^ℤ`, and the exponent is read off with unit logarithms.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::binforms::{act, compose_group, residue_mod_q, BinForm, GroupElem, PairQD};
use crate::error::{Error, Result};
use crate::factor;
use crate::qforms::{automorph_generators, class_group, equivalent_exact, fundamental_automorph, QuadForm, UnimodMat};
use crate::qorders::{
    canonical_associate, evaluate_binform, fundamental_unit, ideal_from_form, nth_power_classify, unit_log, OrderElem,
    Signs,
};
use crate::selmer::{predicted_orbit_count, unit_class};

/// Which group acts on pairs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupModel {
    /// Unipotents, `χ` and `GL₂(ℤ)` only.
    Lifted,
    /// Also the scalar `T: δ ↦ −δ`, which is new only for even `n`.
    #[default]
    Full,
}

fn mat_pow(m: &UnimodMat, k: i64) -> UnimodMat {
    let base = if k < 0 { m.inverse() } else { m.clone() };
    let mut e = k.unsigned_abs();
    let mut acc = UnimodMat::identity();
    let mut b = base;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&b);
        }
        e >>= 1;
        if e > 0 {
            b = b.mul(&b);
        }
    }
    acc
}

/// `X_{−1}` when `a < 0`, so that the image has `a > 0`.
fn normalizer(p: &PairQD) -> GroupElem {
    GroupElem::scalar(p.n(), if p.q.a.is_negative() { -1 } else { 1 })
}

fn check_pair(p: &PairQD) -> Result<()> {
    if p.q.a.is_negative() { p.q.neg() } else { p.q.clone() }.validate()?;
    if !p.is_unit_resultant() {
        return Err(Error::Precondition(format!("res({}, {}) is not ±1", p.q, p.delta)));
    }
    Ok(())
}

/// An element `g` with `act(g, p1) = p2`, or `None` when the pairs lie in
/// different orbits.
pub fn pairs_equivalent(p1: &PairQD, p2: &PairQD, model: GroupModel) -> Result<Option<GroupElem>> {
    let n = p1.n();
    if n < 3 || p2.n() < 3 {
        return Err(Error::Unsupported("orbit equivalence needs n ≥ 3".into()));
    }
    if p2.n() != n {
        return Err(Error::Dimension(format!("degrees {n} and {}", p2.n())));
    }
    check_pair(p1)?;
    check_pair(p2)?;
    if p1.q.discriminant() != p2.q.discriminant() {
        return Ok(None);
    }
    let h1 = normalizer(p1);
    let h2 = normalizer(p2);
    let a1 = act(&h1, p1)?;
    let a2 = act(&h2, p2)?;
    let Some(w) = equivalent_normalized(&a1, &a2, model)? else {
        return Ok(None);
    };
    let g = compose_group(&h2.inverse(), &compose_group(&w, &h1)?)?;
    if act(&g, p1)? != *p2 {
        return Err(Error::Internal("equivalence witness does not map the pairs".into()));
    }
    Ok(Some(g))
}

fn twists(n: usize, model: GroupModel) -> Vec<bool> {
    if model == GroupModel::Full && n % 2 == 0 {
        vec![false, true]
    } else {
        vec![false]
    }
}

/// Completes `g` (mapping `p1` onto `q2`) by a unipotent when residues agree.
fn finish(g: GroupElem, p1: &PairQD, p2: &PairQD, target: &OrderElem) -> Result<Option<GroupElem>> {
    let img = act(&g, p1)?;
    let r = residue_mod_q(&img.delta, &p2.q)?;
    if r.coords != *target {
        return Ok(None);
    }
    let diff = p2.delta.sub(&img.delta)?;
    let alpha = diff
        .div_quad(&p2.q)
        .ok_or_else(|| Error::Internal("equal residues but δ₂ − δ′ is not a multiple of q".into()))?;
    Ok(Some(compose_group(&GroupElem::unipotent(p1.n(), &alpha)?, &g)?))
}

fn equivalent_normalized(p1: &PairQD, p2: &PairQD, model: GroupModel) -> Result<Option<GroupElem>> {
    let n = p1.n();
    let d = p1.q.discriminant();
    let q2 = &p2.q;
    let target = residue_mod_q(&p2.delta, q2)?.coords;
    let taus = twists(n, model);
    let options = [(false, 1i8), (false, -1), (true, -1), (true, 1)];
    for (improper, chi) in options {
        if d.is_negative() && ((chi < 0) != improper) {
            continue;
        }
        let Some(g0m) = equivalent_exact(&p1.q, q2, improper, chi)? else {
            continue;
        };
        let g0 = compose_group(&GroupElem::scalar(n, chi), &GroupElem::matrix(n, g0m))?;
        if d.is_negative() {
            for (s, schi) in automorph_generators(q2)? {
                if schi != 1 || !s.is_proper() {
                    continue;
                }
                for &tau in &taus {
                    let mut g = compose_group(&GroupElem::matrix(n, s.clone()), &g0)?;
                    if tau {
                        g = compose_group(&GroupElem::twist(n), &g)?;
                    }
                    if let Some(w) = finish(g, p1, p2, &target)? {
                        return Ok(Some(w));
                    }
                }
            }
        } else if let Some(w) = hyperbolic_search(&g0, p1, p2, &target, &taus)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Searches `T^τ·Γ_{±M^k}·g0` for a real order.
fn hyperbolic_search(
    g0: &GroupElem,
    p1: &PairQD,
    p2: &PairQD,
    target: &OrderElem,
    taus: &[bool],
) -> Result<Option<GroupElem>> {
    let n = p1.n();
    let q2 = &p2.q;
    let data = ideal_from_form(q2)?;
    let order = &data.order;
    let p0 = act(g0, p1)?;
    let c0 = evaluate_binform(&p0.delta, &data);
    let c2 = evaluate_binform(&p2.delta, &data);
    let m = fundamental_automorph(q2)?;
    let pm = act(&GroupElem::matrix(n, m.clone()), &p0)?;
    let cm = evaluate_binform(&pm.delta, &data);
    let eps = fundamental_unit(order.d())?;
    let mu = order
        .div_exact(&cm, &c0)
        .ok_or_else(|| Error::Internal("automorph does not act by a unit".into()))?;
    let (_, jm) = unit_log(order, &eps, &mu).ok_or_else(|| Error::Internal("automorph multiplier is not a unit".into()))?;
    if jm == 0 {
        return Err(Error::Internal("hyperbolic automorph acts trivially".into()));
    }
    let Some(u) = order.div_exact(&c2, &c0) else {
        return Ok(None);
    };
    let Some((_, ju)) = unit_log(order, &eps, &u) else {
        return Ok(None);
    };
    if ju % jm != 0 {
        return Ok(None);
    }
    let mk = mat_pow(&m, ju / jm);
    for s in [mk.clone(), mk.neg()] {
        for &tau in taus {
            let mut g = compose_group(&GroupElem::matrix(n, s.clone()), g0)?;
            if tau {
                g = compose_group(&GroupElem::twist(n), &g)?;
            }
            if let Some(w) = finish(g, p1, p2, target)? {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitStatus {
    /// Every predicted orbit was found.
    Complete,
    /// The sweep ended with fewer orbits than predicted, or was cut off by the
    /// candidate ceiling.
    HeightExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitOptions {
    pub model: GroupModel,
    /// Upper bound on `(2H + 1)^{n+1}·h` candidate forms.
    pub max_candidates: u64,
    /// Stop as soon as the predicted number of orbits has been found.
    pub short_circuit: bool,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions { model: GroupModel::Full, max_candidates: 50_000_000, short_circuit: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitReport {
    #[serde(with = "crate::serde_int")]
    pub disc: BigInt,
    pub n: usize,
    pub height: u64,
    pub model: GroupModel,
    pub representatives: Vec<PairQD>,
    pub count: usize,
    pub predicted: Option<u64>,
    pub agrees: bool,
    pub status: OrbitStatus,
    pub candidates_checked: u64,
    pub truncated: bool,
    /// Disagreements with published orbit descriptions found along the way.
    pub notes: Vec<String>,
}

/// All `δ` with coefficients in `[−h, h]`, lexicographic in `(t₀, …, tₙ)`.
fn sweep(n: usize, h: i64) -> impl Iterator<Item = Vec<i64>> {
    let mut next = Some(vec![-h; n + 1]);
    std::iter::from_fn(move || {
        let cur = next.take()?;
        let mut t = cur.clone();
        for i in (0..=n).rev() {
            if t[i] < h {
                t[i] += 1;
                next = Some(t);
                break;
            }
            t[i] = -h;
        }
        Some(cur)
    })
}

pub fn enumerate_orbits(d: &BigInt, n: usize, height: u64, opts: &OrbitOptions) -> Result<OrbitReport> {
    if n < 3 {
        return Err(Error::Unsupported("orbit enumeration needs n ≥ 3".into()));
    }
    let cg = class_group(d)?;
    let predicted = match predicted_orbit_count(d, n as u64) {
        Ok(p) => Some(p),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    let h = i64::try_from(height).map_err(|_| Error::InvalidArgument("height too large".into()))?;
    let per_form = (2 * height).checked_add(1).and_then(|w| w.checked_pow(u32::try_from(n + 1).ok()?));
    let total = per_form.and_then(|p| p.checked_mul(cg.order() as u64));
    let truncated = total.map_or(true, |t| t > opts.max_candidates);

    let mut reps: Vec<PairQD> = Vec::new();
    let mut seen: HashSet<(usize, OrderElem)> = HashSet::new();
    let mut checked = 0u64;
    'outer: for (qi, q) in cg.forms.iter().enumerate() {
        for t in sweep(n, h) {
            if checked >= opts.max_candidates {
                break 'outer;
            }
            checked += 1;
            let delta = BinForm::from_i64(&t);
            let p = PairQD::new(q.clone(), delta);
            if !p.is_unit_resultant() {
                continue;
            }
            let key = (qi, residue_mod_q(&p.delta, q)?.coords);
            if !seen.insert(key) {
                continue;
            }
            let mut new = true;
            for r in &reps {
                if pairs_equivalent(&p, r, opts.model)?.is_some() {
                    new = false;
                    break;
                }
            }
            if new {
                reps.push(p);
                if opts.short_circuit && predicted.is_some_and(|pr| reps.len() as u64 >= pr) {
                    break 'outer;
                }
            }
        }
    }
    let count = reps.len();
    let agrees = predicted == Some(count as u64);
    let status = if agrees { OrbitStatus::Complete } else { OrbitStatus::HeightExhausted };
    let mut notes = Vec::new();
    if *d == BigInt::from(-4) && n % 2 == 0 {
        let c = gaussian_orbit_claim(n / 2)?;
        if c.conflicts_with_claim {
            notes.push(c.note);
        }
    }
    Ok(OrbitReport {
        disc: d.clone(),
        n,
        height,
        model: opts.model,
        representatives: reps,
        count,
        predicted,
        agrees,
        status,
        candidates_checked: checked,
        truncated,
        notes,
    })
}

/// Class of `δ(α, β)` in `K^×/(K^×)ⁿ` modulo `±1`. Advisory only:
/// equal invariants are necessary, not sufficient, for equivalence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelmerInvariant {
    pub experimental: bool,
    /// canonical associate of `δ(α, β)`
    pub element: OrderElem,
    pub trivial: bool,
    /// exponents on the unit generators when `δ(α, β)` is a unit
    #[serde(with = "crate::serde_int::vec")]
    pub unit_coords: Vec<BigInt>,
}

pub fn selmer_invariant_experimental(p: &PairQD) -> Result<SelmerInvariant> {
    let n = p.n();
    if n < 3 {
        return Err(Error::Unsupported("the invariant is defined for n ≥ 3".into()));
    }
    let q = if p.q.a.is_negative() { p.q.neg() } else { p.q.clone() };
    let delta = if p.q.a.is_negative() { p.delta.neg() } else { p.delta.clone() };
    let data = ideal_from_form(&q)?;
    let order = &data.order;
    let g = evaluate_binform(&delta, &data);
    if g.is_zero() {
        return Err(Error::Precondition("δ(α, β) = 0".into()));
    }
    if order.is_unit(&g) {
        let (trivial, coords) = unit_class(order, n as u64, &g)?;
        return Ok(SelmerInvariant { experimental: true, element: g, trivial, unit_coords: coords });
    }
    if !factor::is_fundamental(order.d())? {
        return Err(Error::Unsupported(format!("non-unit invariants need a fundamental discriminant, got {}", order.d())));
    }
    let trivial = nth_power_classify(order, &g, n as u64, Signs::PlusMinus)?.is_some();
    Ok(SelmerInvariant { experimental: true, element: canonical_associate(order, &g)?, trivial, unit_coords: vec![] })
}

/// The pairs `(x² + y², x^{2k})` and `(x² + y², (xy)^k)`, checked under both
/// group models.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaussianClaimCheck {
    pub k: usize,
    pub lifted: Option<GroupElem>,
    pub full: Option<GroupElem>,
    /// `U_α` with `α = ((xy)^k − x^{2k})/(x² + y²)`, when that is a form
    pub unipotent: Option<GroupElem>,
    /// the pairs are equivalent under some model, against the claim that
    /// they represent distinct orbits
    pub conflicts_with_claim: bool,
    pub note: String,
}

pub fn gaussian_orbit_claim(k: usize) -> Result<GaussianClaimCheck> {
    let q = QuadForm::new(1, 0, 1);
    let deg = 2 * k;
    let p1 = PairQD::new(q.clone(), BinForm::monomial(deg, deg));
    let p2 = PairQD::new(q.clone(), BinForm::monomial(deg, k));
    let lifted = pairs_equivalent(&p1, &p2, GroupModel::Lifted)?;
    let full = pairs_equivalent(&p1, &p2, GroupModel::Full)?;
    let unipotent = match p2.delta.sub(&p1.delta)?.div_quad(&q) {
        Some(alpha) => Some(GroupElem::unipotent(deg, &alpha)?),
        None => None,
    };
    let conflicts_with_claim = lifted.is_some() || full.is_some();
    let note = if unipotent.is_some() {
        format!("x^{deg} and (xy)^{k} differ by a multiple of x^2 + y^2, so they lie in one orbit, contradicting the two-orbit description")
    } else if lifted.is_some() {
        format!("x^{deg} and (xy)^{k} are equivalent, contradicting the two-orbit description")
    } else if full.is_some() {
        format!("x^{deg} and (xy)^{k} are equivalent only through the scalar twist delta -> -delta; without it they are distinct")
    } else {
        format!("x^{deg} and (xy)^{k} lie in distinct orbits")
    };
    Ok(GaussianClaimCheck { k, lifted, full, unipotent, conflicts_with_claim, note })
}
