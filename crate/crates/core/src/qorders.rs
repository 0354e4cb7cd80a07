// SPDX-License-Identifier: Apache-2.0

//! The quadratic order `O_d = ℤ[ω]` with `ω = (d + √d)/2`, its ideals and units.
//!
//! Elements are pairs `(u, v)` meaning `u + vω`. Since `ω² = dω − n₀` with
//! `n₀ = (d² − d)/4`, products, norms and traces stay in integer coordinates.
//! An ideal is stored by its Hermite basis `rℤ + (q + pω)ℤ`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{big, is_square, is_valid_discriminant, isqrt, sign_surd};
use crate::binforms::BinForm;
use crate::error::{Error, Result};
use crate::factor;
use crate::intlinalg::{hnf, lagrange_gauss, Gram2, IntMatrix};
use crate::qforms::{self, QuadForm};

/// `u + vω`
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrderElem {
    #[serde(with = "crate::serde_int")]
    pub u: BigInt,
    #[serde(with = "crate::serde_int")]
    pub v: BigInt,
}

impl fmt::Debug for OrderElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}ω", self.u, self.v)
    }
}

impl OrderElem {
    pub fn new(u: impl Into<BigInt>, v: impl Into<BigInt>) -> Self {
        OrderElem { u: u.into(), v: v.into() }
    }

    pub fn int(k: impl Into<BigInt>) -> Self {
        OrderElem { u: k.into(), v: BigInt::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.u.is_one() && self.v.is_zero()
    }

    pub fn neg(&self) -> Self {
        OrderElem { u: -&self.u, v: -&self.v }
    }

    pub fn add(&self, o: &Self) -> Self {
        OrderElem { u: &self.u + &o.u, v: &self.v + &o.v }
    }

    pub fn sub(&self, o: &Self) -> Self {
        OrderElem { u: &self.u - &o.u, v: &self.v - &o.v }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        OrderElem { u: &self.u * k, v: &self.v * k }
    }
}

/// The order of discriminant `d`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct QuadOrder {
    #[serde(with = "crate::serde_int")]
    d: BigInt,
    #[serde(with = "crate::serde_int")]
    n0: BigInt,
}

impl QuadOrder {
    pub fn new(d: &BigInt) -> Result<Self> {
        if !is_valid_discriminant(d) {
            return Err(Error::Discriminant(d.clone()));
        }
        let n0 = (d * d - d) / 4u32;
        Ok(QuadOrder { d: d.clone(), n0 })
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn is_real(&self) -> bool {
        self.d.is_positive()
    }

    pub fn one(&self) -> OrderElem {
        OrderElem::int(1)
    }

    pub fn omega(&self) -> OrderElem {
        OrderElem::new(0, 1)
    }

    /// `√d = −d + 2ω`
    pub fn sqrt_d(&self) -> OrderElem {
        OrderElem { u: -&self.d, v: big(2) }
    }

    /// `(−b + √d)/2`
    pub fn half_root(&self, b: &BigInt) -> OrderElem {
        OrderElem { u: (-b - &self.d) / 2u32, v: BigInt::one() }
    }

    pub fn mul(&self, x: &OrderElem, y: &OrderElem) -> OrderElem {
        let vv = &x.v * &y.v;
        OrderElem { u: &x.u * &y.u - &self.n0 * &vv, v: &x.u * &y.v + &y.u * &x.v + &self.d * &vv }
    }

    pub fn norm(&self, x: &OrderElem) -> BigInt {
        &x.u * &x.u + &self.d * &x.u * &x.v + &self.n0 * &x.v * &x.v
    }

    pub fn trace(&self, x: &OrderElem) -> BigInt {
        &x.u * 2u32 + &self.d * &x.v
    }

    pub fn conj(&self, x: &OrderElem) -> OrderElem {
        OrderElem { u: &x.u + &self.d * &x.v, v: -&x.v }
    }

    pub fn pow(&self, x: &OrderElem, n: u64) -> OrderElem {
        let mut acc = self.one();
        let mut base = x.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// `x / y` when it lies in the order.
    pub fn div_exact(&self, x: &OrderElem, y: &OrderElem) -> Option<OrderElem> {
        let n = self.norm(y);
        if n.is_zero() {
            return None;
        }
        let t = self.mul(x, &self.conj(y));
        (t.u.is_multiple_of(&n) && t.v.is_multiple_of(&n)).then(|| OrderElem { u: t.u / &n, v: t.v / &n })
    }

    /// Sign under the real embedding with `√d > 0`. Only meaningful for `d > 0`.
    pub fn sign(&self, x: &OrderElem) -> Ordering {
        sign_surd(&self.trace(x), &x.v, &self.d)
    }

    /// `|x| ≥ |σx|` in the real embedding.
    fn dominates_conj(&self, x: &OrderElem) -> bool {
        // x² − σx² = v·√d·Tr(x)
        !(&x.v * self.trace(x)).is_negative()
    }

    pub fn is_unit(&self, x: &OrderElem) -> bool {
        self.norm(x).abs().is_one()
    }

    /// Sum of `coeffs[i]·αⁱ·β^{n−i}`.
    pub fn eval_monomials(&self, coeffs: &[BigInt], alpha: &OrderElem, beta: &OrderElem) -> OrderElem {
        let n = coeffs.len().saturating_sub(1);
        let mut acc = OrderElem::int(0);
        for (i, m) in monomials(self, alpha, beta, n).iter().enumerate() {
            acc = acc.add(&m.scale(&coeffs[i]));
        }
        acc
    }
}

/// `αⁱ·β^{n−i}` for `i = 0..=n`.
pub fn monomials(order: &QuadOrder, alpha: &OrderElem, beta: &OrderElem, n: usize) -> Vec<OrderElem> {
    let mut apow = vec![order.one()];
    let mut bpow = vec![order.one()];
    for i in 1..=n {
        apow.push(order.mul(&apow[i - 1], alpha));
        bpow.push(order.mul(&bpow[i - 1], beta));
    }
    (0..=n).map(|i| order.mul(&apow[i], &bpow[n - i])).collect()
}

/// Integral ideal `rℤ + (q + pω)ℤ` with `p | r`, `p | q`, `0 ≤ q < r`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderIdeal {
    #[serde(with = "crate::serde_int")]
    pub r: BigInt,
    #[serde(with = "crate::serde_int")]
    pub q: BigInt,
    #[serde(with = "crate::serde_int")]
    pub p: BigInt,
}

impl fmt::Debug for OrderIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {} + {}ω]", self.r, self.q, self.p)
    }
}

impl OrderIdeal {
    pub fn unit() -> Self {
        OrderIdeal { r: big(1), q: big(0), p: big(1) }
    }

    /// The ℤ-module spanned by `gens`, which must be an ideal of full rank.
    pub fn from_generators(order: &QuadOrder, gens: &[OrderElem]) -> Result<Self> {
        let rows: Vec<Vec<BigInt>> = gens.iter().map(|g| vec![g.v.clone(), g.u.clone()]).collect();
        if rows.is_empty() {
            return Err(Error::Rank);
        }
        let (h, _) = hnf(&IntMatrix::from_rows(&rows));
        if h.rows() < 2 || h[(0, 0)].is_zero() || h[(1, 1)].is_zero() {
            return Err(Error::Rank);
        }
        let p = h[(0, 0)].clone();
        let q = h[(0, 1)].clone();
        let r = h[(1, 1)].clone();
        let id = OrderIdeal { r, q, p };
        let w = order.omega();
        for b in id.basis() {
            if !id.contains(&order.mul(&b, &w)) {
                return Err(Error::Precondition("module is not closed under multiplication by ω".into()));
            }
        }
        Ok(id)
    }

    pub fn principal(order: &QuadOrder, g: &OrderElem) -> Result<Self> {
        Self::from_generators(order, &[g.clone(), order.mul(g, &order.omega())])
    }

    pub fn basis(&self) -> [OrderElem; 2] {
        [OrderElem::int(self.r.clone()), OrderElem { u: self.q.clone(), v: self.p.clone() }]
    }

    pub fn norm(&self) -> BigInt {
        &self.p * &self.r
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    pub fn contains(&self, x: &OrderElem) -> bool {
        if !x.v.is_multiple_of(&self.p) {
            return false;
        }
        let m1 = &x.v / &self.p;
        (&x.u - &m1 * &self.q).is_multiple_of(&self.r)
    }

    pub fn mul(&self, order: &QuadOrder, o: &OrderIdeal) -> Result<OrderIdeal> {
        let mut gens = Vec::with_capacity(4);
        for x in self.basis() {
            for y in o.basis() {
                gens.push(order.mul(&x, &y));
            }
        }
        Self::from_generators(order, &gens)
    }

    pub fn pow(&self, order: &QuadOrder, n: u64) -> Result<OrderIdeal> {
        let mut acc = OrderIdeal::unit();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(order, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(order, &base)?;
            }
        }
        Ok(acc)
    }

    pub fn conj(&self, order: &QuadOrder) -> Result<OrderIdeal> {
        let [a, b] = self.basis();
        Self::from_generators(order, &[a, order.conj(&b)])
    }

    /// The norm form `N(x·e₁ + y·e₂)/N(I)` on the Hermite basis.
    pub fn norm_form(&self, order: &QuadOrder) -> Result<QuadForm> {
        let [e1, e2] = self.basis();
        let n = self.norm();
        let a = order.norm(&e1);
        let b = order.trace(&order.mul(&e1, &order.conj(&e2)));
        let c = order.norm(&e2);
        if !(a.is_multiple_of(&n) && b.is_multiple_of(&n) && c.is_multiple_of(&n)) {
            return Err(Error::Precondition(format!("ideal {self:?} is not invertible")));
        }
        let f = QuadForm::new(a / &n, b / &n, c / &n);
        if !f.is_primitive() {
            return Err(Error::Precondition(format!("ideal {self:?} is not invertible")));
        }
        Ok(f)
    }
}

pub fn ideal_mul(order: &QuadOrder, i: &OrderIdeal, j: &OrderIdeal) -> Result<OrderIdeal> {
    i.mul(order, j)
}

pub fn ideal_pow(order: &QuadOrder, i: &OrderIdeal, n: u64) -> Result<OrderIdeal> {
    i.pow(order, n)
}

/// A form together with its ideal `I_q = aℤ + αℤ`, `α = (−b + √d)/2`, `β = a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormIdealData {
    pub q: QuadForm,
    pub order: QuadOrder,
    pub alpha: OrderElem,
    pub beta: OrderElem,
    pub ideal: OrderIdeal,
    #[serde(with = "crate::serde_int")]
    pub norm: BigInt,
}

pub fn ideal_from_form(q: &QuadForm) -> Result<FormIdealData> {
    q.validate()?;
    if !q.a.is_positive() {
        return Err(Error::InvalidArgument(format!("leading coefficient of {q} must be positive")));
    }
    let order = QuadOrder::new(&q.discriminant())?;
    let alpha = order.half_root(&q.b);
    let beta = OrderElem::int(q.a.clone());
    let ideal = OrderIdeal::from_generators(&order, &[beta.clone(), alpha.clone()])?;
    Ok(FormIdealData { q: q.clone(), norm: q.a.clone(), order, alpha, beta, ideal })
}

/// Form of an invertible ideal; inverse to [`ideal_from_form`] up to translation.
pub fn form_from_ideal(order: &QuadOrder, i: &OrderIdeal) -> Result<QuadForm> {
    let a = &i.r / &i.p;
    let bq = &i.q / &i.p;
    let b = -(bq * 2u32 + order.d());
    let num = &b * &b - order.d();
    let four_a = &a * 4u32;
    if !num.is_multiple_of(&four_a) {
        return Err(Error::Precondition(format!("ideal {i:?} is not invertible")));
    }
    let q = QuadForm { a, b, c: num / four_a };
    q.validate()?;
    Ok(q)
}

/// A generator of `I` when `I` is principal.
pub fn principal_generator(order: &QuadOrder, i: &OrderIdeal) -> Result<Option<OrderElem>> {
    let f = i.norm_form(order)?;
    let [e1, e2] = i.basis();
    let n = i.norm();
    if order.d().is_negative() {
        // shortest vector in (u, v) coordinates under the norm form
        let gram = Gram2 { a: big(1), b: order.d().clone(), c: order.n0.clone() };
        let [v1, _] = lagrange_gauss([[e1.u.clone(), e1.v.clone()], [e2.u.clone(), e2.v.clone()]], &gram)?;
        let g = OrderElem { u: v1[0].clone(), v: v1[1].clone() };
        return Ok((order.norm(&g) == n).then_some(g));
    }
    let (r, m) = qforms::reduce(&f)?;
    let (cyc, _) = qforms::cycle(&r)?;
    for (g_form, c) in cyc {
        if g_form.a.abs().is_one() {
            let t = m.mul(&c);
            let g = e1.scale(&t.p).add(&e2.scale(&t.r));
            debug_assert_eq!(order.norm(&g).abs(), n);
            return Ok(Some(g));
        }
    }
    Ok(None)
}

/// Roots of unity of an imaginary order, as powers of a generator.
pub fn torsion_units(order: &QuadOrder) -> Result<Vec<OrderElem>> {
    if order.is_real() {
        return Ok(vec![order.one(), order.one().neg()]);
    }
    let w = unit_torsion(order.d())?;
    let zeta = match w {
        6 | 4 => OrderElem::new(2, 1),
        _ => order.one().neg(),
    };
    let mut out = vec![order.one()];
    for k in 1..w {
        out.push(order.mul(&out[k - 1], &zeta));
    }
    Ok(out)
}

/// Number of roots of unity in an imaginary order.
pub fn unit_torsion(d: &BigInt) -> Result<usize> {
    if !is_valid_discriminant(d) {
        return Err(Error::Discriminant(d.clone()));
    }
    if d.is_positive() {
        return Err(Error::InvalidArgument("unit_torsion expects d < 0".into()));
    }
    Ok(if *d == big(-3) {
        6
    } else if *d == big(-4) {
        4
    } else {
        2
    })
}

/// Smallest unit `ε > 1` of a real order.
pub fn fundamental_unit(d: &BigInt) -> Result<OrderElem> {
    if !is_valid_discriminant(d) {
        return Err(Error::Discriminant(d.clone()));
    }
    if d.is_negative() {
        return Err(Error::InvalidArgument("fundamental_unit expects d > 0".into()));
    }
    let order = QuadOrder::new(d)?;
    let (r, _) = qforms::reduce(&QuadForm::principal(d)?)?;
    let (cyc, m) = qforms::cycle(&r)?;
    // a form of the principal cycle with a = 1; its cycle automorph is ε⁺
    let (start, g) = cyc
        .iter()
        .find(|(f, _)| f.a.is_one())
        .ok_or_else(|| Error::Internal("principal cycle without a = 1".into()))?;
    let aut = g.inverse().mul(&m).mul(g);
    let alpha = order.half_root(&start.b);
    let mut eta = alpha.scale(&aut.r).add(&OrderElem::int(aut.s.clone()));
    if order.sign(&eta) == Ordering::Less {
        eta = eta.neg();
    }
    if !order.dominates_conj(&eta) {
        eta = order.conj(&eta);
    }
    if !order.norm(&eta).is_one() {
        return Err(Error::Internal(format!("cycle automorph gave a unit of norm {}", order.norm(&eta))));
    }
    // ε⁺ = ε² exactly when a unit of norm −1 exists
    let t2 = order.trace(&eta) - 2u32;
    if is_square(&t2) {
        let t = isqrt(&t2);
        if !t.is_zero() {
            let num = eta.sub(&order.one());
            if num.u.is_multiple_of(&t) && num.v.is_multiple_of(&t) {
                let eps = OrderElem { u: num.u / &t, v: num.v / &t };
                if order.norm(&eps) == big(-1) {
                    return Ok(eps);
                }
            }
        }
    }
    Ok(eta)
}

/// `(s, k)` with `x = s·εᵏ`, or `None` when `x` is not a unit. `d > 0` only.
pub fn unit_log(order: &QuadOrder, eps: &OrderElem, x: &OrderElem) -> Option<(i8, i64)> {
    if !order.is_unit(x) {
        return None;
    }
    let (s, mut h) = if order.sign(x) == Ordering::Less { (-1, x.neg()) } else { (1, x.clone()) };
    let eps_inv = order.div_exact(&order.one(), eps)?;
    let mut k = 0i64;
    while !h.is_one() {
        if order.dominates_conj(&h) {
            h = order.mul(&h, &eps_inv);
            k += 1;
        } else {
            h = order.mul(&h, eps);
            k -= 1;
        }
    }
    Some((s, k))
}

/// Canonical associate of a nonzero element: for `d < 0` the least `(u, v)`
/// over all root-of-unity multiples; for `d > 0` the positive associate `h`
/// with `h/|σh|` in `[1, ε²)`.
pub fn canonical_associate(order: &QuadOrder, g: &OrderElem) -> Result<OrderElem> {
    if g.is_zero() {
        return Err(Error::InvalidArgument("zero has no associates".into()));
    }
    if !order.is_real() {
        let units = torsion_units(order)?;
        return Ok(units.iter().map(|z| order.mul(g, z)).min().expect("at least one unit"));
    }
    let eps = fundamental_unit(order.d())?;
    let eps_inv = order.div_exact(&order.one(), &eps).expect("units are invertible");
    let mut h = if order.sign(g) == Ordering::Less { g.neg() } else { g.clone() };
    if order.sign(&eps) == Ordering::Less {
        return Err(Error::Internal("fundamental unit is negative".into()));
    }
    while !order.dominates_conj(&h) {
        h = order.mul(&h, &eps);
    }
    loop {
        let down = order.mul(&h, &eps_inv);
        if order.dominates_conj(&down) {
            h = down;
        } else {
            return Ok(h);
        }
    }
}

/// `g = Σ tᵢ αⁱ β^{n−i}` for the pair `(α, β)` of `data`.
pub fn evaluate_binform(delta: &BinForm, data: &FormIdealData) -> OrderElem {
    data.order.eval_monomials(delta.coeffs(), &data.alpha, &data.beta)
}

/// Which signs `s` are allowed in `s·yⁿ = x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Signs {
    Plus,
    PlusMinus,
}

/// Prime ideals above `p` (one or two), each with its residue degree.
fn primes_above(order: &QuadOrder, p: &BigInt) -> Result<Vec<OrderIdeal>> {
    let d = order.d();
    // roots of t² − d·t + n₀ modulo p
    let roots: Vec<BigInt> = if *p == big(2) {
        (0..2)
            .map(big)
            .filter(|t| (t * t - d * t + &order.n0).mod_floor(p).is_zero())
            .collect()
    } else {
        let dm = d.mod_floor(p);
        match sqrt_mod(&dm, p) {
            None => vec![],
            Some(s) => {
                let inv2 = (p + 1u32) / 2u32;
                let r1 = ((d + &s) * &inv2).mod_floor(p);
                let r2 = ((d - &s) * &inv2).mod_floor(p);
                if r1 == r2 {
                    vec![r1]
                } else {
                    vec![r1, r2]
                }
            }
        }
    };
    if roots.is_empty() {
        return Ok(vec![OrderIdeal::principal(order, &OrderElem::int(p.clone()))?]);
    }
    roots
        .into_iter()
        .map(|t| OrderIdeal::from_generators(order, &[OrderElem::int(p.clone()), OrderElem { u: -t, v: big(1) }]))
        .collect()
}

/// Square root of `a` modulo an odd prime `p` (Tonelli–Shanks).
pub fn sqrt_mod(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Some(BigInt::zero());
    }
    let e = (p - 1u32) / 2u32;
    if a.modpow(&e, p) != BigInt::one() {
        return None;
    }
    let p1 = p - 1u32;
    let s = p1.trailing_zeros().unwrap_or(0);
    let q = &p1 >> s;
    let mut z = big(2);
    while z.modpow(&e, p) != p1 {
        z += 1u32;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + 1u32) / 2u32), p);
    while !t.is_one() {
        let mut i = 0;
        let mut tt = t.clone();
        while !tt.is_one() {
            tt = (&tt * &tt) % p;
            i += 1;
        }
        let b = c.modpow(&(BigInt::one() << (m - i - 1)), p);
        m = i;
        c = (&b * &b) % p;
        t = (t * &c) % p;
        r = (r * b) % p;
    }
    Some(r)
}

/// Valuation of `x` at the prime ideal `pr`, bounded by `max`.
fn valuation(order: &QuadOrder, pr: &OrderIdeal, x: &OrderElem, max: u32) -> Result<u32> {
    let mut k = 0;
    let mut pk = pr.clone();
    while k < max && pk.contains(x) {
        k += 1;
        pk = pk.mul(order, pr)?;
    }
    Ok(k)
}

/// Finds `y` with `s·yⁿ = x` for an allowed sign `s`.
///
/// Works by factoring the principal ideal `(x)` into primes, so `d` must be
/// fundamental.
pub fn nth_power_classify(order: &QuadOrder, x: &OrderElem, n: u64, signs: Signs) -> Result<Option<OrderElem>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if x.is_zero() {
        return Err(Error::InvalidArgument("x must be nonzero".into()));
    }
    if n == 1 {
        return Ok(Some(x.clone()));
    }
    if !factor::is_fundamental(order.d())? {
        return Err(Error::Unsupported(format!("n-th power test needs a fundamental discriminant, got {}", order.d())));
    }
    let nx = order.norm(x).abs();
    let mut root_ideal = OrderIdeal::unit();
    for (p, e) in factor::factorize(&nx)? {
        for pr in primes_above(order, &p)? {
            let v = valuation(order, &pr, x, e)?;
            if v as u64 % n != 0 {
                return Ok(None);
            }
            root_ideal = root_ideal.mul(order, &pr.pow(order, v as u64 / n)?)?;
        }
    }
    let Some(y0) = principal_generator(order, &root_ideal)? else {
        return Ok(None);
    };
    let y0n = order.pow(&y0, n);
    let u = order
        .div_exact(x, &y0n)
        .filter(|u| order.is_unit(u))
        .ok_or_else(|| Error::Internal("ideal n-th root does not divide x".into()))?;
    let sign_set: &[i64] = match signs {
        Signs::Plus => &[1],
        Signs::PlusMinus => &[1, -1],
    };
    if !order.is_real() {
        for mu in torsion_units(order)? {
            let mun = order.pow(&mu, n);
            for &s in sign_set {
                if mun.scale(&big(s)) == u {
                    return Ok(Some(order.mul(&y0, &mu)));
                }
            }
        }
        return Ok(None);
    }
    let eps = fundamental_unit(order.d())?;
    let (s_u, k) = unit_log(order, &eps, &u).ok_or_else(|| Error::Internal("quotient is not a unit".into()))?;
    if k.rem_euclid(n as i64) != 0 {
        return Ok(None);
    }
    let j = k / n as i64;
    let eps_j = if j >= 0 {
        order.pow(&eps, j as u64)
    } else {
        let inv = order.div_exact(&order.one(), &eps).expect("units are invertible");
        order.pow(&inv, (-j) as u64)
    };
    // s·(±ε^j)ⁿ = s_u·ε^k
    for mu_sign in [1i64, -1] {
        let mu_sign_n = if n % 2 == 0 { 1 } else { mu_sign };
        for &s in sign_set {
            if s * mu_sign_n == s_u as i64 {
                return Ok(Some(order.mul(&y0, &eps_j.scale(&big(mu_sign)))));
            }
        }
    }
    Ok(None)
}

/// Prime ideal factorization of `(x)` as a map from prime ideal to exponent.
pub fn factor_element(order: &QuadOrder, x: &OrderElem) -> Result<BTreeMap<(BigInt, BigInt, BigInt), u32>> {
    let mut out = BTreeMap::new();
    for (p, e) in factor::factorize(&order.norm(x))? {
        for pr in primes_above(order, &p)? {
            let v = valuation(order, &pr, x, e)?;
            if v > 0 {
                out.insert((pr.r.clone(), pr.q.clone(), pr.p.clone()), v);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ord(d: i64) -> QuadOrder {
        QuadOrder::new(&big(d)).unwrap()
    }

    fn e(u: i64, v: i64) -> OrderElem {
        OrderElem::new(u, v)
    }

    #[test]
    fn element_examples() {
        let o = ord(-4);
        let i = o.half_root(&big(0));
        assert_eq!(o.norm(&i), big(1));
        assert_eq!(o.mul(&i, &i), e(-1, 0));
        let o = ord(-23);
        assert_eq!(o.norm(&o.half_root(&big(1))), big(6));
        let o = ord(20);
        // −9 − 4√5 = −9 − 2√20
        let x = OrderElem::int(-9).add(&o.sqrt_d().scale(&big(-2)));
        assert_eq!(o.norm(&x), big(1));
        assert_eq!(o.mul(&o.sqrt_d(), &o.sqrt_d()), OrderElem::int(20));
    }

    #[test]
    fn form_ideal_dictionary() {
        let data = ideal_from_form(&QuadForm::new(1, 1, 6)).unwrap();
        assert_eq!(data.beta, OrderElem::int(1));
        assert!(data.ideal.is_unit());
        assert_eq!(data.norm, big(1));
        let data = ideal_from_form(&QuadForm::new(2, 1, 3)).unwrap();
        assert_eq!(data.ideal.norm(), big(2));
        let data = ideal_from_form(&QuadForm::new(1, 0, 1)).unwrap();
        assert_eq!(data.order.mul(&data.alpha, &data.alpha), e(-1, 0));
        assert!(ideal_from_form(&QuadForm::new(-1, 0, 5)).is_err());
    }

    #[test]
    fn ideal_products() {
        let o = ord(-23);
        let i2 = ideal_from_form(&QuadForm::new(2, 1, 3)).unwrap().ideal;
        let i3 = ideal_from_form(&QuadForm::new(2, -1, 3)).unwrap().ideal;
        assert_eq!(i2.mul(&o, &OrderIdeal::unit()).unwrap(), i2);
        let cube = i2.pow(&o, 3).unwrap();
        assert_eq!(cube.norm(), big(8));
        let prod = i2.mul(&o, &i3).unwrap();
        assert_eq!(prod.norm(), big(4));
        assert!(principal_generator(&o, &prod).unwrap().is_some());
    }

    #[test]
    fn principal_generators() {
        let o = ord(-23);
        assert_eq!(principal_generator(&o, &OrderIdeal::unit()).unwrap().map(|g| o.norm(&g)), Some(big(1)));
        let i2 = ideal_from_form(&QuadForm::new(2, 1, 3)).unwrap().ideal;
        let g = principal_generator(&o, &i2.pow(&o, 3).unwrap()).unwrap().unwrap();
        assert_eq!(o.norm(&g), big(8));
        assert!(principal_generator(&o, &i2).unwrap().is_none());
    }

    #[test]
    fn lagrange_on_ideal_cube() {
        // brute-force shortest vector of I³ for d = −23 has norm 8
        let o = ord(-23);
        let i2 = ideal_from_form(&QuadForm::new(2, 1, 3)).unwrap().ideal.pow(&o, 3).unwrap();
        let [b1, b2] = i2.basis();
        let mut best: Option<BigInt> = None;
        for x in -20i64..=20 {
            for y in -20i64..=20 {
                if x == 0 && y == 0 {
                    continue;
                }
                let v = b1.scale(&big(x)).add(&b2.scale(&big(y)));
                let n = o.norm(&v);
                if best.as_ref().map_or(true, |b| n < *b) {
                    best = Some(n);
                }
            }
        }
        assert_eq!(best, Some(big(8)));
    }

    #[test]
    fn unit_examples() {
        let o5 = ord(5);
        assert_eq!(fundamental_unit(&big(5)).unwrap(), OrderElem::int(-2).add(&o5.omega()));
        let o20 = ord(20);
        let eps = fundamental_unit(&big(20)).unwrap();
        // 2 + √5 = 2 + √20/2 = −8 + ω
        assert_eq!(eps, e(-8, 1));
        assert_eq!(o20.mul(&eps, &o20.mul(&eps, &eps)), o20.mul(&o20.mul(&eps, &eps), &eps));
        assert_eq!(unit_torsion(&big(-23)).unwrap(), 2);
        assert_eq!(unit_torsion(&big(-4)).unwrap(), 4);
        assert_eq!(unit_torsion(&big(-3)).unwrap(), 6);
        assert!(unit_torsion(&big(5)).is_err());
        assert!(fundamental_unit(&big(-3)).is_err());
        for d in [-3i64, -4] {
            let o = ord(d);
            let us = torsion_units(&o).unwrap();
            for u in &us {
                assert!(o.is_unit(u));
            }
            let w = us.len() as u64;
            assert!(o.pow(&us[1], w).is_one());
        }
    }

    /// Smallest `(t + v√d)/2 > 1` of norm `±1` by increasing `v`.
    fn pell_oracle(d: i64) -> (i64, i64) {
        for v in 1i64.. {
            for sgn in [-4i64, 4] {
                let t2 = d * v * v + sgn;
                if t2 <= 0 {
                    continue;
                }
                let t = (t2 as f64).sqrt().round() as i64;
                for t in [t - 1, t, t + 1] {
                    if t > 0 && t * t == t2 && (t - v * d) % 2 == 0 {
                        return (t, v);
                    }
                }
            }
        }
        unreachable!()
    }

    #[test]
    fn fundamental_units_match_pell() {
        for d in 5i64..400 {
            if !is_valid_discriminant(&big(d)) {
                continue;
            }
            let o = ord(d);
            let eps = fundamental_unit(&big(d)).unwrap();
            let (t, v) = pell_oracle(d);
            assert_eq!((o.trace(&eps), eps.v.clone()), (big(t), big(v)), "d = {d}");
            assert!(o.is_unit(&eps));
            assert_eq!(o.sign(&eps), Ordering::Greater);
        }
    }

    #[test]
    fn unit_logs() {
        let o = ord(13);
        let eps = fundamental_unit(&big(13)).unwrap();
        for k in -5i64..=5 {
            let x = if k >= 0 {
                o.pow(&eps, k as u64)
            } else {
                o.pow(&o.div_exact(&o.one(), &eps).unwrap(), (-k) as u64)
            };
            assert_eq!(unit_log(&o, &eps, &x), Some((1, k)));
            assert_eq!(unit_log(&o, &eps, &x.neg()), Some((-1, k)));
        }
        assert_eq!(unit_log(&o, &eps, &OrderElem::int(2)), None);
    }

    #[test]
    fn nth_power_examples() {
        let o = ord(-4);
        let y = nth_power_classify(&o, &OrderElem::int(-4), 4, Signs::PlusMinus).unwrap().unwrap();
        let y4 = o.pow(&y, 4);
        assert!(y4 == OrderElem::int(-4) || y4 == OrderElem::int(4));
        assert_eq!(o.norm(&y), big(2));
        let o3 = ord(-3);
        let zeta3 = o3.half_root(&big(1));
        assert_eq!(nth_power_classify(&o3, &zeta3, 3, Signs::PlusMinus).unwrap(), None);
        assert_eq!(nth_power_classify(&o3, &zeta3, 1, Signs::Plus).unwrap(), Some(zeta3));
        assert!(matches!(
            nth_power_classify(&ord(20), &OrderElem::int(8), 3, Signs::Plus),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn round_trip_all_classes() {
        for d in (-1000i64..1000).filter(|&d| is_valid_discriminant(&big(d))) {
            let g = qforms::class_group(&big(d)).unwrap();
            let o = ord(d);
            for f in &g.forms {
                let (pf, _) = qforms::positive_representative(f).unwrap();
                let data = ideal_from_form(&pf).unwrap();
                let back = form_from_ideal(&o, &data.ideal).unwrap();
                assert!(qforms::properly_equivalent(&pf, &back).unwrap().is_some(), "d = {d}: {f:?}");
                // a·q = Norm(−βx + αy) coefficientwise
                let a = &pf.a;
                assert_eq!(o.norm(&data.beta), a * a);
                assert_eq!(-o.trace(&o.mul(&data.beta, &o.conj(&data.alpha))), a * &pf.b);
                assert_eq!(o.norm(&data.alpha), a * &pf.c);
            }
        }
    }

    fn form_at(d: i64, idx: usize) -> Option<QuadForm> {
        let g = qforms::class_group(&big(d)).ok()?;
        let f = &g.forms[idx % g.order()];
        Some(qforms::positive_representative(f).ok()?.0)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn norm_is_multiplicative(d in -400i64..400, i in 0usize..20, j in 0usize..20) {
            prop_assume!(is_valid_discriminant(&big(d)));
            let o = ord(d);
            let (f1, f2) = (form_at(d, i).unwrap(), form_at(d, j).unwrap());
            let i1 = ideal_from_form(&f1).unwrap().ideal;
            let i2 = ideal_from_form(&f2).unwrap().ideal;
            let p = i1.mul(&o, &i2).unwrap();
            prop_assert_eq!(p.norm(), i1.norm() * i2.norm());
            prop_assert_eq!(i1.pow(&o, 3).unwrap().norm(), num_traits::pow(i1.norm(), 3));
        }

        #[test]
        fn generators_generate(d in -400i64..400, i in 0usize..20, n in 1u64..5) {
            prop_assume!(is_valid_discriminant(&big(d)));
            let o = ord(d);
            let f = form_at(d, i).unwrap();
            let id = ideal_from_form(&f).unwrap().ideal.pow(&o, n).unwrap();
            match principal_generator(&o, &id).unwrap() {
                Some(g) => {
                    prop_assert_eq!(o.norm(&g).abs(), id.norm());
                    prop_assert_eq!(OrderIdeal::principal(&o, &g).unwrap(), id);
                    prop_assert!(qforms::is_n_torsion(&f, n).unwrap());
                    let c = canonical_associate(&o, &g).unwrap();
                    prop_assert_eq!(OrderIdeal::principal(&o, &c).unwrap(), OrderIdeal::principal(&o, &g).unwrap());
                    let z = if o.is_real() { fundamental_unit(o.d()).unwrap() } else { torsion_units(&o).unwrap()[1].clone() };
                    prop_assert_eq!(canonical_associate(&o, &o.mul(&g, &z)).unwrap(), c);
                }
                None => prop_assert!(!qforms::is_n_torsion(&f, n).unwrap()),
            }
        }

        #[test]
        fn nth_powers_are_found(
            d in prop::sample::select(vec![-3i64, -4, -7, -8, -23, -47, -84, 5, 8, 13, 40, 229]),
            u in -6i64..6, v in -6i64..6, n in 2u64..5, neg: bool,
        ) {
            let o = ord(d);
            let y = e(u, v);
            prop_assume!(!y.is_zero());
            let mut x = o.pow(&y, n);
            if neg { x = x.neg(); }
            let r = nth_power_classify(&o, &x, n, Signs::PlusMinus).unwrap();
            prop_assert!(r.is_some());
            let r = r.unwrap();
            let rn = o.pow(&r, n);
            prop_assert!(rn == x || rn.neg() == x);
            // times a non-n-th-power prime: never an n-th power
            let p = OrderElem::int(3);
            let xp = o.mul(&x, &p);
            if o.norm(&p) == big(9) && (d.rem_euclid(3) != 0) {
                let v3 = factor_element(&o, &xp).unwrap();
                if v3.values().any(|&k| k as u64 % n != 0) {
                    prop_assert!(nth_power_classify(&o, &xp, n, Signs::PlusMinus).unwrap().is_none());
                }
            }
        }
    }
}
