// SPDX-License-Identifier: Apache-2.0

//! The finite abelian group `A = coker(Sel_n(ℚ) → Sel_n(K))` and the number
//! of its orbits under inversion.
//!
//! `Sel_n(K)` is an extension of `cl[n]` by `U/Uⁿ`. It is materialized as a
//! presentation on the unit generators and one lift `x_t = h_t^{n/m}` per class
//! `t` of order `m` (where `J_t^m = (h_t)`), with relations
//!
//! - `m·x_t = 0`, since `x_t^m = h_tⁿ`
//! - `x_t + x_s − x_{ts} = [u]`, where `x_t·x_s = u·γⁿ·x_{ts}`
//! - the image of `−1` when `n` is even
//!
//! and then reduced to Smith form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::big;
use crate::error::{Error, Result};
use crate::factor;
use crate::intlinalg::{snf, solve_linear, IntMatrix};
use crate::qforms::{class_group, QuadForm};
use crate::qorders::{
    fundamental_unit, ideal_from_form, principal_generator, torsion_units, unit_log, OrderElem, OrderIdeal, QuadOrder,
};

/// `⊕ ℤ/dᵢ` with `d₁ | d₂ | …`, all `dᵢ > 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub invariants: Vec<u64>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup { invariants: vec![] }
    }

    pub fn cyclic(m: u64) -> Self {
        Self::from_relations(&IntMatrix::from_rows(&[vec![m as i64]]), 1).expect("a cyclic group is finite")
    }

    /// `ℤ^gens / (row span of rel)`; the quotient must be finite.
    pub fn from_relations(rel: &IntMatrix, gens: usize) -> Result<Self> {
        if gens == 0 {
            return Ok(Self::trivial());
        }
        if rel.rows() == 0 {
            return Err(Error::Precondition("free generators without relations".into()));
        }
        if rel.cols() != gens {
            return Err(Error::Dimension(format!("{} relation columns for {gens} generators", rel.cols())));
        }
        let (d, _, _) = snf(rel);
        let mut inv = Vec::new();
        for i in 0..gens {
            let di = if i < d.rows() { d[(i, i)].clone() } else { BigInt::zero() };
            if di.is_zero() {
                return Err(Error::Precondition("presentation defines an infinite group".into()));
            }
            if !di.is_one() {
                inv.push(di.to_u64().ok_or_else(|| Error::Resource(format!("invariant factor {di} too large")))?);
            }
        }
        Ok(AbelianGroup { invariants: inv })
    }

    pub fn order(&self) -> u64 {
        self.invariants.iter().product()
    }

    pub fn two_torsion_order(&self) -> u64 {
        self.invariants.iter().map(|d| d.gcd(&2)).product()
    }

    /// Every element as a coordinate vector.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for &d in &self.invariants {
            out = out.into_iter().flat_map(|v| (0..d).map(move |x| [v.clone(), vec![x]].concat())).collect();
        }
        out
    }
}

impl std::fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.invariants.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.invariants.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// One class of `cl[n]` with its ideal lift.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassLift {
    pub form: QuadForm,
    pub ideal: OrderIdeal,
    pub order: u64,
    /// generator of `J^order`
    pub generator: OrderElem,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CokerDescription {
    #[serde(with = "crate::serde_int")]
    pub disc: BigInt,
    pub n: u64,
    /// `false` when `d` is not fundamental and order-level units and the
    /// Picard group stand in for the field-level objects.
    pub fundamental: bool,
    /// unit generators: `ζ` for `d < 0`, `(−1, ε)` for `d > 0`
    pub unit_generators: Vec<OrderElem>,
    /// `(U/Uⁿ)` modulo the image of `−1`
    pub unit_part: AbelianGroup,
    /// `cl(O_d)[n]`
    pub class_part: AbelianGroup,
    pub class_lifts: Vec<ClassLift>,
    /// rows are relations; columns are the unit generators then the lifts
    #[serde(with = "crate::serde_int::matrix")]
    pub presentation: Vec<Vec<BigInt>>,
    pub group: AbelianGroup,
}

struct UnitCoords {
    order: QuadOrder,
    gens: Vec<OrderElem>,
    /// relation rows on the unit generators, before quotienting by `−1`
    rels: Vec<Vec<BigInt>>,
    minus_one: Vec<BigInt>,
    torsion: Vec<OrderElem>,
    eps: Option<OrderElem>,
}

impl UnitCoords {
    fn new(order: &QuadOrder, n: u64) -> Result<Self> {
        let nb = big(n as i64);
        if order.is_real() {
            let eps = fundamental_unit(order.d())?;
            Ok(UnitCoords {
                order: order.clone(),
                gens: vec![order.one().neg(), eps.clone()],
                rels: vec![vec![big(2).gcd(&nb), big(0)], vec![big(0), nb]],
                minus_one: vec![big(1), big(0)],
                torsion: vec![],
                eps: Some(eps),
            })
        } else {
            let torsion = torsion_units(order)?;
            let w = torsion.len() as i64;
            Ok(UnitCoords {
                order: order.clone(),
                gens: vec![torsion.get(1).cloned().unwrap_or_else(|| order.one().neg())],
                rels: vec![vec![big(w).gcd(&nb)]],
                minus_one: vec![big(w / 2)],
                torsion,
                eps: None,
            })
        }
    }

    fn coords(&self, u: &OrderElem) -> Result<Vec<BigInt>> {
        match &self.eps {
            Some(eps) => {
                let (s, k) = unit_log(&self.order, eps, u).ok_or_else(|| Error::Internal(format!("{u:?} is not a unit")))?;
                Ok(vec![big(if s < 0 { 1 } else { 0 }), big(k)])
            }
            None => {
                let k = self
                    .torsion
                    .iter()
                    .position(|z| z == u)
                    .ok_or_else(|| Error::Internal(format!("{u:?} is not a root of unity")))?;
                Ok(vec![big(k as i64)])
            }
        }
    }
}

fn quotient_rels(uc: &UnitCoords, n: u64) -> Vec<Vec<BigInt>> {
    let mut rels = uc.rels.clone();
    if n % 2 == 0 {
        rels.push(uc.minus_one.clone());
    }
    rels
}

/// Whether the unit `u` is trivial in `(U/Uⁿ)/⟨−1⟩`, together with its
/// coordinates on the unit generators.
pub fn unit_class(order: &QuadOrder, n: u64, u: &OrderElem) -> Result<(bool, Vec<BigInt>)> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let uc = UnitCoords::new(order, n)?;
    let coords = uc.coords(u)?;
    let rels = quotient_rels(&uc, n);
    // coords in the row span of rels ⇔ relsᵀ·y = coords solvable
    let rt = IntMatrix::from_rows(&rels).transpose();
    Ok((solve_linear(&rt, &coords)?.is_some(), coords))
}

/// The group `A` for discriminant `d` and exponent `n`.
pub fn coker_group(d: &BigInt, n: u64) -> Result<CokerDescription> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let order = QuadOrder::new(d)?;
    let fundamental = factor::is_fundamental(d)?;
    let uc = UnitCoords::new(&order, n)?;
    let ku = uc.gens.len();
    let unit_rels = quotient_rels(&uc, n);
    let unit_part = AbelianGroup::from_relations(&IntMatrix::from_rows(&unit_rels), ku)?;

    let cg = class_group(d)?;
    let tors = cg.torsion(n)?;
    let mut lifts = Vec::with_capacity(tors.len());
    for &t in &tors {
        let form = cg.forms[t].clone();
        let data = ideal_from_form(&form)?;
        let m = cg.element_order(t)?;
        let jm = data.ideal.pow(&order, m)?;
        let h = principal_generator(&order, &jm)?
            .ok_or_else(|| Error::Internal(format!("J^{m} is not principal for {form}")))?;
        lifts.push(ClassLift { form, ideal: data.ideal, order: m, generator: h });
    }
    let x: Vec<OrderElem> = lifts.iter().map(|l| order.pow(&l.generator, n / l.order)).collect();
    let kc = lifts.len();
    let cols = ku + kc;
    let pos = |idx: usize| tors.iter().position(|&t| t == idx);

    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    let mut class_rows: Vec<Vec<BigInt>> = Vec::new();
    for r in &unit_rels {
        let mut row = r.clone();
        row.resize(cols, BigInt::zero());
        rows.push(row);
    }
    for (i, l) in lifts.iter().enumerate() {
        let mut row = vec![BigInt::zero(); cols];
        row[ku + i] = big(l.order as i64);
        class_rows.push(row[ku..].to_vec());
        rows.push(row);
    }
    for i in 0..kc {
        for j in i..kc {
            let k = pos(cg.mul(tors[i], tors[j])?).ok_or_else(|| Error::Internal("cl[n] is not closed".into()))?;
            let u = cocycle_unit(&order, n, (&lifts[i], &x[i]), (&lifts[j], &x[j]), (&lifts[k], &x[k]))?;
            let uco = uc.coords(&u)?;
            let mut row = vec![BigInt::zero(); cols];
            for (c, v) in uco.into_iter().enumerate() {
                row[c] -= v;
            }
            row[ku + i] += 1u32;
            row[ku + j] += 1u32;
            row[ku + k] -= 1u32;
            class_rows.push(row[ku..].to_vec());
            rows.push(row);
        }
    }
    let class_part = AbelianGroup::from_relations(&IntMatrix::from_rows(&class_rows), kc)?;
    let group = AbelianGroup::from_relations(&IntMatrix::from_rows(&rows), cols)?;
    Ok(CokerDescription {
        disc: d.clone(),
        n,
        fundamental,
        unit_generators: uc.gens,
        unit_part,
        class_part,
        class_lifts: lifts,
        presentation: rows,
        group,
    })
}

/// The unit `u` with `x_t·x_s = u·γⁿ·x_{ts}` for `γ` generating `J_t·J_s·J_{ts}⁻¹`.
fn cocycle_unit(
    order: &QuadOrder,
    n: u64,
    (lt, xt): (&ClassLift, &OrderElem),
    (ls, xs): (&ClassLift, &OrderElem),
    (lk, xk): (&ClassLift, &OrderElem),
) -> Result<OrderElem> {
    // J_t·J_s·conj(J_ts) = (γ')  and  γ = γ'/N(J_ts)
    let prod = lt.ideal.mul(order, &ls.ideal)?.mul(order, &lk.ideal.conj(order)?)?;
    let gp = principal_generator(order, &prod)?
        .ok_or_else(|| Error::Internal("product of class lifts is not principal".into()))?;
    let nk = lk.ideal.norm();
    let num = order.mul(&order.mul(xt, xs), &OrderElem::int(num_traits::pow(nk, n as usize)));
    let den = order.mul(xk, &order.pow(&gp, n));
    order
        .div_exact(&num, &den)
        .filter(|u| order.is_unit(u))
        .ok_or_else(|| Error::Internal("cocycle quotient is not a unit".into()))
}

/// Orbits of `x ↦ −x`: `(|A| + |A[2]|)/2`.
pub fn inversion_orbit_count(a: &AbelianGroup) -> u64 {
    (a.order() + a.two_torsion_order()) / 2
}

pub fn predicted_orbit_count(d: &BigInt, n: u64) -> Result<u64> {
    Ok(inversion_orbit_count(&coker_group(d, n)?.group))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    #[test]
    fn examples() {
        assert_eq!(coker_group(&big(-3), 3).unwrap().group.order(), 3);
        assert_eq!(coker_group(&big(-23), 3).unwrap().group, AbelianGroup::cyclic(3));
        let c = coker_group(&big(20), 3).unwrap();
        assert_eq!(c.group.order(), 3);
        assert!(!c.fundamental);
        assert_eq!(predicted_orbit_count(&big(-3), 3).unwrap(), 2);
        assert_eq!(predicted_orbit_count(&big(-47), 5).unwrap(), 3);
        assert_eq!(predicted_orbit_count(&big(20), 3).unwrap(), 2);
        assert_eq!(predicted_orbit_count(&big(-4), 2).unwrap(), 2);
        assert_eq!(predicted_orbit_count(&big(-4), 4).unwrap(), 2);
        assert!(coker_group(&big(-23), 0).is_err());
        assert!(coker_group(&big(-21), 3).is_err());
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(inversion_orbit_count(&AbelianGroup::cyclic(3)), 2);
        assert_eq!(inversion_orbit_count(&AbelianGroup::cyclic(2)), 2);
        assert_eq!(inversion_orbit_count(&AbelianGroup::trivial()), 1);
        assert_eq!(AbelianGroup::cyclic(1), AbelianGroup::trivial());
    }

    #[test]
    fn orders_multiply() {
        for d in (-800i64..-2).chain(5..400) {
            let d = big(d);
            if !crate::arith::is_valid_discriminant(&d) {
                continue;
            }
            for n in 1..=6 {
                let c = coker_group(&d, n).unwrap();
                assert_eq!(c.group.order(), c.unit_part.order() * c.class_part.order(), "{d} {n}");
                let cg = class_group(&d).unwrap();
                assert_eq!(c.class_part.order() as usize, cg.torsion(n).unwrap().len(), "{d} {n}");
            }
        }
    }

    #[test]
    fn non_cyclic_class_part() {
        // cl(−84) ≅ (ℤ/2)²
        let c = coker_group(&big(-84), 2).unwrap();
        assert_eq!(c.class_part.invariants, vec![2, 2]);
        assert_eq!(c.group.invariants, vec![2, 2]);
        assert_eq!(inversion_orbit_count(&c.group), 4);
    }

    fn burnside(a: &AbelianGroup) -> u64 {
        let mut seen = HashSet::new();
        let mut orbits = 0;
        for x in a.elements() {
            if seen.contains(&x) {
                continue;
            }
            orbits += 1;
            let neg: Vec<u64> = x.iter().zip(&a.invariants).map(|(v, d)| (d - v) % d).collect();
            seen.insert(x);
            seen.insert(neg);
        }
        orbits
    }

    proptest! {
        #[test]
        fn inversion_count_matches_enumeration(ds in prop::collection::vec(1u64..13, 0..4)) {
            let rows: Vec<Vec<i64>> = (0..ds.len())
                .map(|i| (0..ds.len()).map(|j| if i == j { ds[i] as i64 } else { 0 }).collect())
                .collect();
            let a = AbelianGroup::from_relations(&IntMatrix::from_rows(&rows), ds.len()).unwrap();
            prop_assume!(a.order() <= 100);
            prop_assert_eq!(a.order(), ds.iter().product::<u64>());
            prop_assert!(a.invariants.windows(2).all(|w| w[1] % w[0] == 0));
            prop_assert_eq!(inversion_orbit_count(&a), burnside(&a));
        }
    }
}
