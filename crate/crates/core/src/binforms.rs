// SPDX-License-Identifier: Apache-2.0

//! Binary forms `δ = Σ tᵢ xⁱ y^{n−i}`, the resultant `res(q, δ)`, pairs
//! `(q, δ)` and the group `G_n(ℤ)` acting on them.
//!
//! A group element is stored as `U_α ∘ X_χ ∘ T^τ ∘ Γ_γ`, applied right to left:
//!
//! - `Γ_γ`: `(q, δ) ↦ ((q∘γ)/det γ, (δ∘γ)/det γ)`
//! - `T`: `(q, δ) ↦ (q, −δ)`, the scalar `λ` with `λ^{n−2} = −1`
//! - `X_χ`: `(q, δ) ↦ (χq, χδ)`
//! - `U_α`: `(q, δ) ↦ (q, δ + α·q)` with `deg α = n − 2`
//!
//! For odd `n`, `T` coincides with `Γ_{−I}` and is folded into the matrix.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intlinalg::{bareiss_det, hnf, hnf_pivots, IntMatrix};
use crate::qforms::{QuadForm, UnimodMat};
use crate::qorders::{evaluate_binform, ideal_from_form, OrderElem};

/// `Σ tᵢ xⁱ y^{n−i}` with `coeffs[i] = tᵢ`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinForm {
    #[serde(with = "crate::serde_int::vec")]
    coeffs: Vec<BigInt>,
}

impl fmt::Debug for BinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for BinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mut first = true;
        for i in (0..=n).rev() {
            let t = &self.coeffs[i];
            if t.is_zero() {
                continue;
            }
            let mono = match (i, n - i) {
                (0, 0) => String::new(),
                (i, 0) => pow_str("x", i),
                (0, j) => pow_str("y", j),
                (i, j) => format!("{}{}", pow_str("x", i), pow_str("y", j)),
            };
            let mag = t.abs();
            let coef = if mag.is_one() && !mono.is_empty() { String::new() } else { mag.to_string() };
            if first {
                write!(f, "{}{}{}", if t.is_negative() { "-" } else { "" }, coef, mono)?;
            } else {
                write!(f, " {} {}{}", if t.is_negative() { "-" } else { "+" }, coef, mono)?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn pow_str(v: &str, e: usize) -> String {
    if e == 1 {
        v.to_string()
    } else {
        format!("{v}^{e}")
    }
}

impl BinForm {
    /// Coefficients `t₀, …, tₙ`; at least one is required.
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Dimension("a binary form needs at least one coefficient".into()));
        }
        Ok(BinForm { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        BinForm { coeffs: coeffs.iter().map(|&t| BigInt::from(t)).collect() }
    }

    pub fn zero(n: usize) -> Self {
        BinForm { coeffs: vec![BigInt::zero(); n + 1] }
    }

    /// `xⁱ y^{n−i}`
    pub fn monomial(n: usize, i: usize) -> Self {
        let mut f = Self::zero(n);
        f.coeffs[i] = BigInt::one();
        f
    }

    pub fn from_quad(q: &QuadForm) -> Self {
        BinForm { coeffs: vec![q.c.clone(), q.b.clone(), q.a.clone()] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn neg(&self) -> Self {
        BinForm { coeffs: self.coeffs.iter().map(|t| -t).collect() }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        BinForm { coeffs: self.coeffs.iter().map(|t| t * k).collect() }
    }

    pub fn add(&self, o: &BinForm) -> Result<BinForm> {
        if self.degree() != o.degree() {
            return Err(Error::Dimension(format!("adding forms of degree {} and {}", self.degree(), o.degree())));
        }
        Ok(BinForm { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, o: &BinForm) -> Result<BinForm> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &BinForm) -> BinForm {
        let mut out = vec![BigInt::zero(); self.degree() + o.degree() + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        BinForm { coeffs: out }
    }

    pub fn mul_quad(&self, q: &QuadForm) -> BinForm {
        self.mul(&BinForm::from_quad(q))
    }

    pub fn pow(&self, e: usize) -> BinForm {
        let mut acc = BinForm { coeffs: vec![BigInt::one()] };
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        let n = self.degree();
        let mut acc = BigInt::zero();
        for (i, t) in self.coeffs.iter().enumerate() {
            acc += t * num_traits::pow(x.clone(), i) * num_traits::pow(y.clone(), n - i);
        }
        acc
    }

    /// Plain substitution `δ∘γ`, i.e. `δ(px + qy, rx + sy)`.
    pub fn substitute(&self, g: &UnimodMat) -> BinForm {
        let n = self.degree();
        // linear forms in (t₀ = y-coefficient, t₁ = x-coefficient) order
        let l1 = BinForm { coeffs: vec![g.q.clone(), g.p.clone()] };
        let l2 = BinForm { coeffs: vec![g.s.clone(), g.r.clone()] };
        let mut p1 = vec![BinForm { coeffs: vec![BigInt::one()] }];
        let mut p2 = vec![BinForm { coeffs: vec![BigInt::one()] }];
        for k in 1..=n {
            p1.push(p1[k - 1].mul(&l1));
            p2.push(p2[k - 1].mul(&l2));
        }
        let mut out = BinForm::zero(n);
        for (i, t) in self.coeffs.iter().enumerate() {
            if t.is_zero() {
                continue;
            }
            let term = p1[i].mul(&p2[n - i]);
            for (k, c) in term.coeffs.iter().enumerate() {
                out.coeffs[k] += t * c;
            }
        }
        out
    }

    /// Twisted action `(δ∘γ)/det γ`.
    pub fn act(&self, g: &UnimodMat) -> BinForm {
        let t = self.substitute(g);
        if g.det().is_negative() {
            t.neg()
        } else {
            t
        }
    }

    /// `r` with `self = r·q`, when `q` divides `self`.
    pub fn div_quad(&self, q: &QuadForm) -> Option<BinForm> {
        let n = self.degree();
        if n < 2 {
            return self.is_zero().then(|| BinForm::zero(0));
        }
        let mut rem = self.coeffs.clone();
        let mut quo = vec![BigInt::zero(); n - 1];
        // divide from the x-high end when a ≠ 0, from the y-high end otherwise
        if !q.a.is_zero() {
            for k in (0..=n - 2).rev() {
                let lead = &rem[k + 2];
                if !lead.is_multiple_of(&q.a) {
                    return None;
                }
                let m = lead / &q.a;
                rem[k + 2] -= &m * &q.a;
                rem[k + 1] -= &m * &q.b;
                rem[k] -= &m * &q.c;
                quo[k] = m;
            }
        } else {
            if q.c.is_zero() {
                return None;
            }
            for k in 0..=n - 2 {
                let lead = &rem[k];
                if !lead.is_multiple_of(&q.c) {
                    return None;
                }
                let m = lead / &q.c;
                rem[k] -= &m * &q.c;
                rem[k + 1] -= &m * &q.b;
                rem[k + 2] -= &m * &q.a;
                quo[k] = m;
            }
        }
        rem.iter().all(Zero::is_zero).then_some(BinForm { coeffs: quo })
    }
}

/// Sylvester matrix: `n` shifted rows of `(a, b, c)` above two shifted rows of
/// `(tₙ, …, t₀)`.
pub fn sylvester(q: &QuadForm, delta: &BinForm) -> IntMatrix {
    let n = delta.degree();
    let size = n + 2;
    let mut m = IntMatrix::zeros(size, size);
    for k in 0..n {
        m[(k, k)] = q.a.clone();
        m[(k, k + 1)] = q.b.clone();
        m[(k, k + 2)] = q.c.clone();
    }
    for k in 0..2 {
        for j in 0..=n {
            m[(n + k, k + j)] = delta.coeffs[n - j].clone();
        }
    }
    m
}

pub fn resultant(q: &QuadForm, delta: &BinForm) -> BigInt {
    bareiss_det(&sylvester(q, delta)).expect("Sylvester matrices are square")
}

/// A point `(q, δ)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct PairQD {
    pub q: QuadForm,
    pub delta: BinForm,
}

impl PairQD {
    pub fn new(q: QuadForm, delta: BinForm) -> Self {
        PairQD { q, delta }
    }

    pub fn n(&self) -> usize {
        self.delta.degree()
    }

    pub fn resultant(&self) -> BigInt {
        resultant(&self.q, &self.delta)
    }

    pub fn is_unit_resultant(&self) -> bool {
        self.resultant().abs().is_one()
    }
}

/// An element of `G_n(ℤ)` in normal form.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct GroupElem {
    pub n: usize,
    /// `α₀, …, α_{n−2}` for `α = Σ αᵢ xⁱ y^{n−2−i}`.
    #[serde(with = "crate::serde_int::vec")]
    pub uni: Vec<BigInt>,
    pub chi: i8,
    pub mat: UnimodMat,
    #[serde(default)]
    pub twist: bool,
}

impl GroupElem {
    pub fn identity(n: usize) -> Self {
        GroupElem { n, uni: vec![BigInt::zero(); n.saturating_sub(1)], chi: 1, mat: UnimodMat::identity(), twist: false }
    }

    pub fn unipotent(n: usize, alpha: &BinForm) -> Result<Self> {
        if alpha.degree() + 2 != n {
            return Err(Error::Dimension(format!("unipotent part of degree {} for n = {n}", alpha.degree())));
        }
        Ok(GroupElem { uni: alpha.coeffs.clone(), ..Self::identity(n) })
    }

    pub fn scalar(n: usize, chi: i8) -> Self {
        GroupElem { chi, ..Self::identity(n) }
    }

    pub fn matrix(n: usize, mat: UnimodMat) -> Self {
        GroupElem { mat, ..Self::identity(n) }.normalized()
    }

    pub fn twist(n: usize) -> Self {
        GroupElem { twist: true, ..Self::identity(n) }.normalized()
    }

    pub fn uni_form(&self) -> BinForm {
        BinForm { coeffs: if self.uni.is_empty() { vec![BigInt::zero()] } else { self.uni.clone() } }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    fn normalized(mut self) -> Self {
        if self.n % 2 == 1 {
            if self.twist {
                self.twist = false;
                self.mat = self.mat.neg();
            }
        } else {
            let first = self.mat.entries().into_iter().find(|e| !e.is_zero()).cloned().unwrap_or_default();
            if first.is_negative() {
                self.mat = self.mat.neg();
            }
        }
        self
    }

    pub fn inverse(&self) -> GroupElem {
        let gi = self.mat.inverse();
        let a = self.uni_form().substitute(&gi);
        let a = if self.twist { a } else { a.neg() };
        GroupElem { n: self.n, uni: a.coeffs, chi: self.chi, mat: gi, twist: self.twist }.normalized()
    }
}

/// `g1 ∘ g2`, meaning `g2` acts first.
pub fn compose_group(g1: &GroupElem, g2: &GroupElem) -> Result<GroupElem> {
    if g1.n != g2.n {
        return Err(Error::Dimension(format!("composing elements for n = {} and n = {}", g1.n, g2.n)));
    }
    let moved = g2.uni_form().substitute(&g1.mat);
    let moved = if g1.twist { moved.neg() } else { moved };
    let uni = g1.uni_form().add(&moved)?;
    Ok(GroupElem {
        n: g1.n,
        uni: if g1.uni.is_empty() { vec![] } else { uni.coeffs },
        chi: g1.chi * g2.chi,
        mat: g2.mat.mul(&g1.mat),
        twist: g1.twist ^ g2.twist,
    }
    .normalized())
}

pub fn act(g: &GroupElem, p: &PairQD) -> Result<PairQD> {
    if p.n() != g.n {
        return Err(Error::Dimension(format!("element for n = {} acting on a form of degree {}", g.n, p.n())));
    }
    let mut q = p.q.act(&g.mat);
    let mut d = p.delta.act(&g.mat);
    if g.twist {
        d = d.neg();
    }
    if g.chi < 0 {
        q = q.neg();
        d = d.neg();
    }
    if g.n >= 2 {
        d = d.add(&g.uni_form().mul_quad(&q))?;
    }
    Ok(PairQD { q, delta: d })
}

/// Coset of `δ` modulo `Λ_q = q·(forms of degree n − 2)`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Residue {
    /// `δ(α, β)` in `(1, ω)` coordinates; determines the coset.
    pub coords: OrderElem,
    /// Hermite-reduced representative of the coset.
    pub canonical: BinForm,
    /// `r` with `δ = canonical + r·q`.
    pub uni: BinForm,
}

pub fn residue_mod_q(delta: &BinForm, q: &QuadForm) -> Result<Residue> {
    let n = delta.degree();
    if n < 2 {
        return Err(Error::InvalidArgument("residues need degree at least 2".into()));
    }
    let g = q.content();
    if !g.is_one() {
        return Err(Error::Imprimitive(g));
    }
    // lattice rows in x-high-first column order
    let rows: Vec<Vec<BigInt>> = (0..=n - 2)
        .rev()
        .map(|i| {
            let f = BinForm::monomial(n - 2, i).mul_quad(q);
            f.coeffs.iter().rev().cloned().collect()
        })
        .collect();
    let (h, _) = hnf(&IntMatrix::from_rows(&rows));
    let mut v: Vec<BigInt> = delta.coeffs.iter().rev().cloned().collect();
    for (row, pc) in hnf_pivots(&h).into_iter().enumerate() {
        let k = v[pc].div_floor(&h[(row, pc)]);
        if !k.is_zero() {
            for j in 0..=n {
                v[j] -= &k * &h[(row, j)];
            }
        }
    }
    v.reverse();
    let canonical = BinForm { coeffs: v };
    let diff = delta.sub(&canonical)?;
    let uni = diff
        .div_quad(q)
        .ok_or_else(|| Error::Internal("reduction left the coset of δ".into()))?;
    let pos = if q.a.is_positive() { q.clone() } else { q.neg() };
    let data = ideal_from_form(&pos)?;
    let coords = evaluate_binform(delta, &data);
    Ok(Residue { coords, canonical, uni })
}
