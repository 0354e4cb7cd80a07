// SPDX-License-Identifier: Apache-2.0

//! Binary quadratic forms `ax² + bxy + cy²`.
//!
//! Substitution is written `q∘γ`, meaning `(q∘γ)(x, y) = q(px + qy, rx + sy)`
//! for `γ = [[p, q], [r, s]]`, so that `(q∘γ₁)∘γ₂ = q∘(γ₁γ₂)`.
//!
//! For `d > 0` the class group here is the wide one: `(a, b, c)` and
//! `(−a, b, −c)` name the same ideal class.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{big, ext_gcd3, gcd3, is_valid_discriminant, isqrt};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadForm {
    #[serde(with = "crate::serde_int")]
    pub a: BigInt,
    #[serde(with = "crate::serde_int")]
    pub b: BigInt,
    #[serde(with = "crate::serde_int")]
    pub c: BigInt,
}

impl fmt::Debug for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.a, self.b, self.c)
    }
}

impl QuadForm {
    /// Builds a form without validation.
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        QuadForm { a: a.into(), b: b.into(), c: c.into() }
    }

    /// Builds a form, rejecting bad discriminants, imprimitive coefficients
    /// and negative-definite forms.
    pub fn checked(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Result<Self> {
        let q = Self::new(a, b, c);
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.discriminant();
        if !is_valid_discriminant(&d) {
            return Err(Error::Discriminant(d));
        }
        let g = self.content();
        if !g.is_one() {
            return Err(Error::Imprimitive(g));
        }
        if d.is_negative() && !self.a.is_positive() {
            return Err(Error::InvalidArgument(format!("negative-definite form {self}")));
        }
        Ok(())
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - &self.a * &self.c * 4u32
    }

    pub fn content(&self) -> BigInt {
        gcd3(&self.a, &self.b, &self.c)
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    pub fn neg(&self) -> Self {
        QuadForm { a: -&self.a, b: -&self.b, c: -&self.c }
    }

    /// `(a, −b, c)`, the inverse class.
    pub fn opposite(&self) -> Self {
        QuadForm { a: self.a.clone(), b: -&self.b, c: self.c.clone() }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        QuadForm { a: &self.a * k, b: &self.b * k, c: &self.c * k }
    }

    /// Plain substitution `q∘γ`.
    pub fn substitute(&self, g: &UnimodMat) -> Self {
        let a = self.eval(&g.p, &g.r);
        let c = self.eval(&g.q, &g.s);
        let b = &self.a * &g.p * &g.q * 2u32 + &self.b * (&g.p * &g.s + &g.q * &g.r) + &self.c * &g.r * &g.s * 2u32;
        QuadForm { a, b, c }
    }

    /// Twisted action `(q∘γ)/det γ`.
    pub fn act(&self, g: &UnimodMat) -> Self {
        let t = self.substitute(g);
        if g.det().is_negative() {
            t.neg()
        } else {
            t
        }
    }

    /// The form of norm 1 for discriminant `d`.
    pub fn principal(d: &BigInt) -> Result<Self> {
        if !is_valid_discriminant(d) {
            return Err(Error::Discriminant(d.clone()));
        }
        Ok(if d.is_even() {
            QuadForm::new(1, 0, -(d / 4u32))
        } else {
            QuadForm::new(1, 1, (BigInt::one() - d) / 4u32)
        })
    }
}

/// `[[p, q], [r, s]]` with determinant `±1`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnimodMat {
    #[serde(with = "crate::serde_int")]
    pub p: BigInt,
    #[serde(with = "crate::serde_int")]
    pub q: BigInt,
    #[serde(with = "crate::serde_int")]
    pub r: BigInt,
    #[serde(with = "crate::serde_int")]
    pub s: BigInt,
}

impl fmt::Debug for UnimodMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.p, self.q, self.r, self.s)
    }
}

impl UnimodMat {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>, r: impl Into<BigInt>, s: impl Into<BigInt>) -> Result<Self> {
        let m = Self::raw(p.into(), q.into(), r.into(), s.into());
        let d = m.det();
        if !d.abs().is_one() {
            return Err(Error::NotUnimodular(d));
        }
        Ok(m)
    }

    fn raw(p: BigInt, q: BigInt, r: BigInt, s: BigInt) -> Self {
        UnimodMat { p, q, r, s }
    }

    pub fn identity() -> Self {
        Self::raw(big(1), big(0), big(0), big(1))
    }

    pub fn minus_identity() -> Self {
        Self::raw(big(-1), big(0), big(0), big(-1))
    }

    /// `[[0, −1], [1, 0]]`
    pub fn s_mat() -> Self {
        Self::raw(big(0), big(-1), big(1), big(0))
    }

    /// `[[1, t], [0, 1]]`
    pub fn t_mat(t: BigInt) -> Self {
        Self::raw(big(1), t, big(0), big(1))
    }

    /// `diag(1, −1)`
    pub fn reflection() -> Self {
        Self::raw(big(1), big(0), big(0), big(-1))
    }

    /// `[[0, −1], [1, t]]`
    pub fn rho(t: BigInt) -> Self {
        Self::raw(big(0), big(-1), big(1), t)
    }

    pub fn det(&self) -> BigInt {
        &self.p * &self.s - &self.q * &self.r
    }

    pub fn is_proper(&self) -> bool {
        self.det().is_positive()
    }

    pub fn mul(&self, o: &UnimodMat) -> UnimodMat {
        Self::raw(
            &self.p * &o.p + &self.q * &o.r,
            &self.p * &o.q + &self.q * &o.s,
            &self.r * &o.p + &self.s * &o.r,
            &self.r * &o.q + &self.s * &o.s,
        )
    }

    pub fn inverse(&self) -> UnimodMat {
        let d = self.det();
        Self::raw(&self.s * &d, -&self.q * &d, -&self.r * &d, &self.p * &d)
    }

    pub fn neg(&self) -> UnimodMat {
        Self::raw(-&self.p, -&self.q, -&self.r, -&self.s)
    }

    pub fn trace(&self) -> BigInt {
        &self.p + &self.s
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.p, &self.q, &self.r, &self.s]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

pub fn discriminant(q: &QuadForm) -> BigInt {
    q.discriminant()
}

fn check_form(q: &QuadForm) -> Result<BigInt> {
    let d = q.discriminant();
    if !is_valid_discriminant(&d) {
        return Err(Error::Discriminant(d));
    }
    let g = q.content();
    if !g.is_one() {
        return Err(Error::Imprimitive(g));
    }
    Ok(d)
}

/// Whether an indefinite form is reduced: `0 < b < √d` and
/// `√d − b < 2|a| < √d + b`.
pub fn is_reduced_indefinite(q: &QuadForm, sqrt_d: &BigInt) -> bool {
    let two_a = q.a.abs() * 2u32;
    q.b.is_positive() && q.b <= *sqrt_d && &two_a + &q.b > *sqrt_d && &two_a - &q.b <= *sqrt_d
}

/// Whether a positive-definite form is reduced.
pub fn is_reduced_definite(q: &QuadForm) -> bool {
    q.a.is_positive()
        && q.b.abs() <= q.a
        && q.a <= q.c
        && (!(q.b.abs() == q.a || q.a == q.c) || !q.b.is_negative())
}

pub fn is_reduced(q: &QuadForm) -> bool {
    let d = q.discriminant();
    if d.is_negative() {
        is_reduced_definite(q)
    } else {
        is_reduced_indefinite(q, &isqrt(&d))
    }
}

/// One reduction step `q ↦ q∘ρ_t` with `t` normalizing the new middle coefficient.
fn rho_step(q: &QuadForm, s: &BigInt) -> (QuadForm, UnimodMat) {
    let ac = q.c.abs();
    let two_c = &ac * 2u32;
    // b' = −b + 2ct must satisfy b' ≡ −b (mod 2|c|)
    let target = if ac > *s {
        // b' ∈ (−|c|, |c|]
        let lo = -&ac + 1u32;
        &lo + (-&q.b - &lo).mod_floor(&two_c)
    } else {
        // b' ∈ [s + 1 − 2|c|, s]
        let lo = s + 1u32 - &two_c;
        &lo + (-&q.b - &lo).mod_floor(&two_c)
    };
    let t = (&target + &q.b) / (&q.c * 2u32);
    let g = UnimodMat::rho(t);
    (q.substitute(&g), g)
}

/// Reduced representative and an `SL₂(ℤ)` matrix `γ` with `q∘γ` equal to it.
pub fn reduce(q: &QuadForm) -> Result<(QuadForm, UnimodMat)> {
    let d = check_form(q)?;
    if d.is_negative() {
        if q.a.is_negative() {
            let (r, g) = reduce_definite(&q.neg());
            return Ok((r.neg(), g));
        }
        Ok(reduce_definite(q))
    } else {
        Ok(reduce_indefinite(q, &isqrt(&d)))
    }
}

fn reduce_definite(q: &QuadForm) -> (QuadForm, UnimodMat) {
    let mut f = q.clone();
    let mut g = UnimodMat::identity();
    loop {
        let two_a = &f.a * 2u32;
        let t = (&f.a - &f.b).div_floor(&two_a);
        if !t.is_zero() {
            let m = UnimodMat::t_mat(t);
            f = f.substitute(&m);
            g = g.mul(&m);
        }
        if f.a > f.c || (f.a == f.c && f.b.is_negative()) {
            let m = UnimodMat::s_mat();
            f = f.substitute(&m);
            g = g.mul(&m);
            continue;
        }
        return (f, g);
    }
}

fn reduce_indefinite(q: &QuadForm, s: &BigInt) -> (QuadForm, UnimodMat) {
    let mut f = q.clone();
    let mut g = UnimodMat::identity();
    while !is_reduced_indefinite(&f, s) {
        let (nf, m) = rho_step(&f, s);
        f = nf;
        g = g.mul(&m);
    }
    (f, g)
}

/// The `ρ`-cycle of a reduced indefinite form: each entry is `(f, M)` with
/// `q∘M = f`, starting from `(q, I)` and stopping before `q` recurs. The
/// matrix closing the cycle is returned separately.
pub fn cycle(q: &QuadForm) -> Result<(Vec<(QuadForm, UnimodMat)>, UnimodMat)> {
    let d = check_form(q)?;
    if d.is_negative() {
        return Err(Error::InvalidArgument("cycle requires a positive discriminant".into()));
    }
    let s = isqrt(&d);
    if !is_reduced_indefinite(q, &s) {
        return Err(Error::Precondition(format!("{q} is not reduced")));
    }
    let mut out = vec![(q.clone(), UnimodMat::identity())];
    let mut f = q.clone();
    let mut g = UnimodMat::identity();
    loop {
        let (nf, m) = rho_step(&f, &s);
        g = g.mul(&m);
        if nf == *q {
            return Ok((out, g));
        }
        out.push((nf.clone(), g.clone()));
        f = nf;
    }
}

/// `γ ∈ SL₂(ℤ)` with `q1∘γ = q2`, if any.
pub fn properly_equivalent(q1: &QuadForm, q2: &QuadForm) -> Result<Option<UnimodMat>> {
    let d1 = check_form(q1)?;
    let d2 = check_form(q2)?;
    if d1 != d2 {
        return Err(Error::DiscriminantMismatch(d1, d2));
    }
    let (r1, g1) = reduce(q1)?;
    let (r2, g2) = reduce(q2)?;
    let g2i = g2.inverse();
    if d1.is_negative() {
        return Ok((r1 == r2).then(|| g1.mul(&g2i)));
    }
    let (cyc, _) = cycle(&r1)?;
    Ok(cyc.into_iter().find(|(f, _)| *f == r2).map(|(_, m)| g1.mul(&m).mul(&g2i)))
}

/// Solves `χ·(q1∘γ)/det γ = q2`.
///
/// Proper solutions with `χ = 1` are preferred, then `χ = −1`; matrices of
/// determinant `−1` are tried only when allowed, and `χ = −1` only when
/// negation is allowed.
pub fn equivalent(q1: &QuadForm, q2: &QuadForm, allow_det_minus_one: bool, allow_negation: bool) -> Result<Option<(UnimodMat, i8)>> {
    let mut options: Vec<(bool, i8)> = vec![(false, 1)];
    if allow_negation {
        options.push((false, -1));
    }
    if allow_det_minus_one {
        if allow_negation {
            options.push((true, -1));
        }
        options.push((true, 1));
    }
    for (improper, chi) in options {
        if let Some(g) = equivalent_exact(q1, q2, improper, chi)? {
            return Ok(Some((g, chi)));
        }
    }
    Ok(None)
}

/// `γ` of the requested determinant sign with `χ·(q1∘γ)/det γ = q2`.
pub fn equivalent_exact(q1: &QuadForm, q2: &QuadForm, improper: bool, chi: i8) -> Result<Option<UnimodMat>> {
    // q1∘γ = (χ·det γ)·q2
    let target = if (chi < 0) != improper { q2.neg() } else { q2.clone() };
    if improper {
        let rho = UnimodMat::reflection();
        let q1r = q1.substitute(&rho);
        Ok(properly_equivalent(&q1r, &target)?.map(|g| rho.mul(&g)))
    } else {
        properly_equivalent(q1, &target)
    }
}

/// Properly equivalent form with `a > 0`, for indefinite or positive-definite input.
pub fn positive_representative(q: &QuadForm) -> Result<(QuadForm, UnimodMat)> {
    if q.a.is_positive() {
        return Ok((q.clone(), UnimodMat::identity()));
    }
    let d = check_form(q)?;
    if d.is_negative() {
        return Err(Error::InvalidArgument(format!("negative-definite form {q}")));
    }
    let (r, g) = reduce(q)?;
    if r.a.is_positive() {
        return Ok((r, g));
    }
    // first coefficients alternate in sign along a reduced cycle
    let (nf, m) = rho_step(&r, &isqrt(&d));
    Ok((nf, g.mul(&m)))
}

/// Composition without final reduction. Both forms need `a > 0`.
pub fn compose_raw(q1: &QuadForm, q2: &QuadForm) -> Result<QuadForm> {
    let d = q1.discriminant();
    let d2 = q2.discriminant();
    if d != d2 {
        return Err(Error::DiscriminantMismatch(d, d2));
    }
    if !q1.a.is_positive() || !q2.a.is_positive() {
        return Err(Error::Precondition("composition needs positive leading coefficients".into()));
    }
    let s: BigInt = (&q1.b + &q2.b) / 2;
    let (e, u, v, w) = ext_gcd3(&q1.a, &q2.a, &s);
    let a3 = &q1.a * &q2.a / (&e * &e);
    let num = &u * &q1.a * &q2.b + &v * &q2.a * &q1.b + &w * ((&q1.b * &q2.b + &d) / 2);
    let bb: BigInt = num / &e;
    let b3 = bb.mod_floor(&(&a3 * 2u32));
    let c_num = &b3 * &b3 - &d;
    let four_a = &a3 * 4u32;
    if !c_num.is_multiple_of(&four_a) {
        return Err(Error::Internal(format!("composition of {q1} and {q2} left a fractional coefficient")));
    }
    Ok(QuadForm { a: a3, b: b3, c: c_num / four_a })
}

/// Canonical reduced representative of the product class.
pub fn compose(q1: &QuadForm, q2: &QuadForm) -> Result<QuadForm> {
    let d1 = check_form(q1)?;
    let d2 = check_form(q2)?;
    if d1 != d2 {
        return Err(Error::DiscriminantMismatch(d1, d2));
    }
    let (p1, _) = positive_representative(q1)?;
    let (p2, _) = positive_representative(q2)?;
    canonical(&compose_raw(&p1, &p2)?)
}

/// `q^n` by square-and-multiply; `n = 0` gives the principal form.
pub fn power(q: &QuadForm, n: u64) -> Result<QuadForm> {
    let d = check_form(q)?;
    let mut acc = reduce(&QuadForm::principal(&d)?)?.0;
    let mut base = reduce(q)?.0;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = compose(&acc, &base)?;
        }
        e >>= 1;
        if e > 0 {
            base = compose(&base, &base)?;
        }
    }
    Ok(acc)
}

/// Canonical representative of the (wide) class: the reduced form for
/// `d < 0`; for `d > 0` the lexicographically least `a > 0` reduced form
/// among the cycles of `q` and `(−a, b, −c)`.
pub fn canonical(q: &QuadForm) -> Result<QuadForm> {
    let d = check_form(q)?;
    let (r, _) = reduce(q)?;
    if d.is_negative() {
        return Ok(r);
    }
    let (rn, _) = reduce(&q.act(&UnimodMat::reflection()))?;
    let mut best: Option<QuadForm> = None;
    for start in [r, rn] {
        for (f, _) in cycle(&start)?.0 {
            if f.a.is_positive() && best.as_ref().map_or(true, |b| f < *b) {
                best = Some(f);
            }
        }
    }
    best.ok_or_else(|| Error::Internal("cycle without positive forms".into()))
}

/// Whether the class of `q` has order dividing `n`.
pub fn is_n_torsion(q: &QuadForm, n: u64) -> Result<bool> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let d = check_form(q)?;
    let p = power(q, n)?;
    Ok(canonical(&p)? == canonical(&QuadForm::principal(&d)?)?)
}

/// Order of the class of `q` in the class group.
pub fn class_order(q: &QuadForm) -> Result<u64> {
    let d = check_form(q)?;
    let id = canonical(&QuadForm::principal(&d)?)?;
    let base = reduce(q)?.0;
    let mut acc = base.clone();
    let mut k = 1u64;
    while canonical(&acc)? != id {
        acc = compose(&acc, &base)?;
        k += 1;
    }
    Ok(k)
}

/// The class group of discriminant `d` as a list of canonical forms.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassGroup {
    #[serde(with = "crate::serde_int")]
    pub d: BigInt,
    pub forms: Vec<QuadForm>,
    /// `table[i][j]` is the index of `forms[i]·forms[j]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<usize>>>,
    #[serde(skip)]
    index: HashMap<QuadForm, usize>,
}

const TABLE_LIMIT: usize = 256;

impl ClassGroup {
    pub fn from_forms(d: BigInt, forms: Vec<QuadForm>, table: Option<Vec<Vec<usize>>>) -> Self {
        let index = forms.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
        ClassGroup { d, forms, table, index }
    }

    pub fn order(&self) -> usize {
        self.forms.len()
    }

    pub fn principal_index(&self) -> usize {
        0
    }

    /// Index of the class of `q`.
    pub fn index_of(&self, q: &QuadForm) -> Result<usize> {
        let d = q.discriminant();
        if d != self.d {
            return Err(Error::DiscriminantMismatch(self.d.clone(), d));
        }
        let c = canonical(q)?;
        self.index.get(&c).copied().ok_or_else(|| Error::Internal(format!("class of {q} missing from the class list")))
    }

    pub fn mul(&self, i: usize, j: usize) -> Result<usize> {
        if let Some(t) = &self.table {
            return Ok(t[i][j]);
        }
        self.index_of(&compose(&self.forms[i], &self.forms[j])?)
    }

    pub fn inverse(&self, i: usize) -> Result<usize> {
        self.index_of(&self.forms[i].opposite())
    }

    pub fn element_order(&self, i: usize) -> Result<u64> {
        let mut acc = i;
        let mut k = 1;
        while acc != 0 {
            acc = self.mul(acc, i)?;
            k += 1;
        }
        Ok(k)
    }

    /// Indices of classes of order dividing `n`.
    pub fn torsion(&self, n: u64) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for i in 0..self.order() {
            if n % self.element_order(i)? == 0 {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// Rebuilds the lookup index after deserialization.
    pub fn reindex(&mut self) {
        self.index = self.forms.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
    }
}

fn class_sort_key(q: &QuadForm) -> (BigInt, BigInt, std::cmp::Reverse<BigInt>, BigInt) {
    (q.a.clone(), q.b.abs(), std::cmp::Reverse(q.b.clone()), q.c.clone())
}

static CLASS_CACHE: OnceLock<RwLock<HashMap<BigInt, Arc<ClassGroup>>>> = OnceLock::new();

/// Class group of discriminant `d`, memoized per process. The composition
/// table is filled in when the group has at most 256 classes.
pub fn class_group(d: &BigInt) -> Result<Arc<ClassGroup>> {
    let cache = CLASS_CACHE.get_or_init(Default::default);
    if let Some(g) = cache.read().expect("class cache poisoned").get(d) {
        return Ok(g.clone());
    }
    let g = Arc::new(compute_class_group(d, true)?);
    let mut w = cache.write().expect("class cache poisoned");
    Ok(w.entry(d.clone()).or_insert(g).clone())
}

/// The memoized class group of `d`, if already computed or preloaded.
pub fn cached_class_group(d: &BigInt) -> Option<Arc<ClassGroup>> {
    CLASS_CACHE.get()?.read().expect("class cache poisoned").get(d).cloned()
}

/// Seeds the memo with a previously computed group. An existing entry wins.
pub fn preload_class_group(mut g: ClassGroup) -> Result<Arc<ClassGroup>> {
    if !is_valid_discriminant(&g.d) {
        return Err(Error::Discriminant(g.d));
    }
    if g.forms.is_empty() {
        return Err(Error::InvalidArgument(format!("empty class list for {}", g.d)));
    }
    for q in &g.forms {
        if q.discriminant() != g.d {
            return Err(Error::DiscriminantMismatch(q.discriminant(), g.d));
        }
    }
    g.reindex();
    let cache = CLASS_CACHE.get_or_init(Default::default);
    let mut w = cache.write().expect("class cache poisoned");
    Ok(w.entry(g.d.clone()).or_insert_with(|| Arc::new(g)).clone())
}

/// Class group computed from scratch, bypassing the cache.
pub fn compute_class_group(d: &BigInt, with_table: bool) -> Result<ClassGroup> {
    if !is_valid_discriminant(d) {
        return Err(Error::Discriminant(d.clone()));
    }
    let mut forms = if d.is_negative() { reduced_definite_forms(d) } else { indefinite_classes(d)? };
    forms.sort_by_key(class_sort_key);
    let principal = canonical(&QuadForm::principal(d)?)?;
    debug_assert_eq!(forms.first(), Some(&principal));
    let mut g = ClassGroup::from_forms(d.clone(), forms, None);
    if with_table && g.order() <= TABLE_LIMIT {
        let h = g.order();
        let mut t = vec![vec![0; h]; h];
        for i in 0..h {
            for j in i..h {
                let k = g.index_of(&compose(&g.forms[i], &g.forms[j])?)?;
                t[i][j] = k;
                t[j][i] = k;
            }
        }
        g.table = Some(t);
    }
    Ok(g)
}

fn reduced_definite_forms(d: &BigInt) -> Vec<QuadForm> {
    let mut out = Vec::new();
    let nd = -d;
    let mut a = BigInt::one();
    // a ≤ √(|d|/3)
    while &a * &a * 3u32 <= nd {
        let mut b = -&a + 1u32;
        while b <= a {
            let num = &b * &b - d;
            let four_a = &a * 4u32;
            if num.is_multiple_of(&four_a) {
                let c = num / four_a;
                let q = QuadForm { a: a.clone(), b: b.clone(), c };
                if is_reduced_definite(&q) && q.is_primitive() {
                    out.push(q);
                }
            }
            b += 1u32;
        }
        a += 1u32;
    }
    out
}

fn indefinite_classes(d: &BigInt) -> Result<Vec<QuadForm>> {
    let s = isqrt(d);
    let mut seen: std::collections::BTreeSet<QuadForm> = Default::default();
    let mut b = if d.is_even() { big(2) } else { big(1) };
    while b <= s {
        let n: BigInt = (d - &b * &b) / 4;
        let mut a = BigInt::one();
        while a <= n {
            if n.is_multiple_of(&a) {
                let q = QuadForm { a: a.clone(), b: b.clone(), c: -(&n / &a) };
                if is_reduced_indefinite(&q, &s) && q.is_primitive() {
                    seen.insert(canonical(&q)?);
                }
            }
            a += 1u32;
        }
        b += 2u32;
    }
    Ok(seen.into_iter().collect())
}

/// The proper automorph of `q` coming from going once around its reduced
/// cycle, with positive trace. `d` must be positive.
pub fn fundamental_automorph(q: &QuadForm) -> Result<UnimodMat> {
    let d = check_form(q)?;
    if d.is_negative() {
        return Err(Error::InvalidArgument("hyperbolic automorphs need d > 0".into()));
    }
    let (r, g) = reduce(q)?;
    let (_, m) = cycle(&r)?;
    let a = g.mul(&m).mul(&g.inverse());
    Ok(if a.trace().is_negative() { a.neg() } else { a })
}

/// Generators of `{γ ∈ GL₂(ℤ) : (q∘γ)/det γ = ±q}`, each with the sign `χ`
/// satisfying `χ·(q∘γ)/det γ = q`.
///
/// For `d < 0` the whole (finite) group is listed. For `d > 0` the list holds
/// `−I`, the fundamental hyperbolic automorph and one representative of each
/// nonempty coset with other determinant or sign.
pub fn automorph_generators(q: &QuadForm) -> Result<Vec<(UnimodMat, i8)>> {
    let d = check_form(q)?;
    if d.is_negative() {
        let (r, g) = reduce(q)?;
        let gi = g.inverse();
        let mut out = Vec::new();
        let range = [big(-1), big(0), big(1)];
        for p in &range {
            for qq in &range {
                for rr in &range {
                    for s in &range {
                        let m = UnimodMat::raw(p.clone(), qq.clone(), rr.clone(), s.clone());
                        if !m.det().abs().is_one() {
                            continue;
                        }
                        let img = r.act(&m);
                        let chi = if img == r {
                            1
                        } else if img == r.neg() {
                            -1
                        } else {
                            continue;
                        };
                        out.push((g.mul(&m).mul(&gi), chi));
                    }
                }
            }
        }
        return Ok(out);
    }
    let mut out = vec![(UnimodMat::minus_identity(), 1), (fundamental_automorph(q)?, 1)];
    for (improper, chi) in [(false, -1), (true, 1), (true, -1)] {
        if let Some(m) = equivalent_exact(q, q, improper, chi)? {
            out.push((m, chi));
        }
    }
    Ok(out)
}
