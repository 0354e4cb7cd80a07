// SPDX-License-Identifier: Apache-2.0

//! Small integer helpers shared by the algebraic modules.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[inline]
pub fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

/// Extended Euclid with a nonnegative gcd: returns `(g, s, t)` with `s*a + t*b = g`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let nr = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, nr);
        let ns = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, ns);
        let nt = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, nt);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// `(g, u, v, w)` with `u*a + v*b + w*c = g = gcd(a, b, c) >= 0`.
pub fn ext_gcd3(a: &BigInt, b: &BigInt, c: &BigInt) -> (BigInt, BigInt, BigInt, BigInt) {
    let (g1, s1, t1) = ext_gcd(a, b);
    let (g, s2, t2) = ext_gcd(&g1, c);
    (g, &s2 * &s1, &s2 * &t1, t2)
}

pub fn gcd3(a: &BigInt, b: &BigInt, c: &BigInt) -> BigInt {
    a.gcd(b).gcd(c)
}

/// Floor of the square root of a nonnegative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of negative number");
    n.sqrt()
}

pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Exact integer `k` with `k^e = n`, if one exists.
pub fn exact_root(n: &BigInt, e: u32) -> Option<BigInt> {
    if e == 0 {
        return None;
    }
    if e == 1 {
        return Some(n.clone());
    }
    if n.is_negative() {
        if e % 2 == 0 {
            return None;
        }
        return exact_root(&-n, e).map(|r| -r);
    }
    let r = n.nth_root(e);
    for cand in [&r - 1, r.clone(), &r + 1] {
        if !cand.is_negative() && num_traits::pow(cand.clone(), e as usize) == *n {
            return Some(cand);
        }
    }
    None
}

/// Nearest integer to `a / b`, ties rounded up. `b` must be positive.
pub fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    debug_assert!(b.is_positive());
    (a * 2u32 + b).div_floor(&(b * 2u32))
}

/// Sign of `x + y·√d` for a positive non-square `d`.
pub fn sign_surd(x: &BigInt, y: &BigInt, d: &BigInt) -> Ordering {
    let sx = x.sign();
    let sy = y.sign();
    use num_bigint::Sign::*;
    match (sx, sy) {
        (NoSign, NoSign) => Ordering::Equal,
        (NoSign, s) | (s, NoSign) => sign_to_ord(s),
        (Plus, Plus) => Ordering::Greater,
        (Minus, Minus) => Ordering::Less,
        (Plus, Minus) => (x * x).cmp(&(y * y * d)),
        (Minus, Plus) => (y * y * d).cmp(&(x * x)),
    }
}

fn sign_to_ord(s: num_bigint::Sign) -> Ordering {
    match s {
        num_bigint::Sign::Plus => Ordering::Greater,
        num_bigint::Sign::Minus => Ordering::Less,
        num_bigint::Sign::NoSign => Ordering::Equal,
    }
}

/// `d ≡ 0, 1 (mod 4)`, nonzero and not a perfect square.
pub fn is_valid_discriminant(d: &BigInt) -> bool {
    let r = d.mod_floor(&big(4));
    !d.is_zero() && (r.is_zero() || r.is_one()) && !is_square(d)
}

pub fn to_i64(x: &BigInt) -> Option<i64> {
    num_traits::ToPrimitive::to_i64(x)
}
