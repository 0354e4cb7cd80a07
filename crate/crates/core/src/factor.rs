// SPDX-License-Identifier: Apache-2.0

//! Integer factorization for desk-scale norms: trial division, Miller–Rabin
//! and Brent's variant of Pollard rho with a fixed seed.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::big;
use crate::error::{Error, Result};

const TRIAL_LIMIT: u64 = 1_000_000;
const RHO_ITERATIONS: u64 = 5_000_000;

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic below 3.3·10²⁴; probabilistic with fixed bases beyond.
pub fn is_probable_prime(n: &BigInt) -> bool {
    if *n < big(2) {
        return false;
    }
    for &p in &MR_BASES {
        let p = big(p as i64);
        if *n == p {
            return true;
        }
        if n.is_multiple_of(&p) {
            return false;
        }
    }
    let n1 = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'bases: for &a in &MR_BASES {
        let mut x = big(a as i64).modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Prime factorization of `|n|` as a map prime → exponent. `n` must be nonzero.
pub fn factorize(n: &BigInt) -> Result<BTreeMap<BigInt, u32>> {
    if n.is_zero() {
        return Err(Error::InvalidArgument("cannot factor 0".into()));
    }
    let mut n = n.abs();
    let mut out = BTreeMap::new();
    for p in small_primes_iter() {
        if n.is_one() {
            return Ok(out);
        }
        let pb = big(p as i64);
        if &pb * &pb > n {
            break;
        }
        let mut e = 0;
        while n.is_multiple_of(&pb) {
            n /= &pb;
            e += 1;
        }
        if e > 0 {
            out.insert(pb, e);
        }
    }
    if !n.is_one() {
        split_into(&n, &mut out)?;
    }
    Ok(out)
}

fn split_into(n: &BigInt, out: &mut BTreeMap<BigInt, u32>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if *n < big((TRIAL_LIMIT * TRIAL_LIMIT) as i64) || is_probable_prime(n) {
        // no factor below the trial limit, so anything under its square is prime
        *out.entry(n.clone()).or_insert(0) += 1;
        return Ok(());
    }
    if let Some(r) = perfect_power_root(n) {
        let mut inner = BTreeMap::new();
        split_into(&r.0, &mut inner)?;
        for (p, e) in inner {
            *out.entry(p).or_insert(0) += e * r.1;
        }
        return Ok(());
    }
    let f = pollard_brent(n)?;
    split_into(&f, out)?;
    split_into(&(n / &f), out)
}

fn perfect_power_root(n: &BigInt) -> Option<(BigInt, u32)> {
    let bits = n.bits() as u32;
    for e in (2..=bits).rev() {
        if let Some(r) = crate::arith::exact_root(n, e) {
            if r > BigInt::one() {
                return Some((r, e));
            }
        }
    }
    None
}

fn pollard_brent(n: &BigInt) -> Result<BigInt> {
    let mut budget = RHO_ITERATIONS;
    for c in 1u64.. {
        let c = big(c as i64);
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut y = big(2);
        let m = 128u64;
        let mut g = BigInt::one();
        let mut r = 1u64;
        let mut q = BigInt::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    q = (q * (&x - &y).abs()) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
            budget = budget.saturating_sub(r);
            if budget == 0 {
                return Err(Error::Resource(format!("factorization of {n} exceeded the iteration budget")));
            }
        }
        if g == *n {
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if g != *n {
            return Ok(g);
        }
    }
    unreachable!()
}

fn small_primes_iter() -> impl Iterator<Item = u64> {
    static SIEVE: std::sync::OnceLock<Vec<u64>> = std::sync::OnceLock::new();
    SIEVE
        .get_or_init(|| {
            let n = TRIAL_LIMIT as usize;
            let mut comp = vec![false; n + 1];
            let mut ps = Vec::new();
            for i in 2..=n {
                if !comp[i] {
                    ps.push(i as u64);
                    let mut j = i * i;
                    while j <= n {
                        comp[j] = true;
                        j += i;
                    }
                }
            }
            ps
        })
        .iter()
        .copied()
}

/// Whether `d` is the discriminant of a maximal quadratic order.
pub fn is_fundamental(d: &BigInt) -> Result<bool> {
    if !crate::arith::is_valid_discriminant(d) {
        return Ok(false);
    }
    let r = d.mod_floor(&big(4));
    let core = if r.is_one() {
        d.clone()
    } else {
        let m: BigInt = d / 4;
        let m4 = m.mod_floor(&big(4));
        if m4 != big(2) && m4 != big(3) {
            return Ok(false);
        }
        m
    };
    let f = factorize(&core)?;
    Ok(f.values().all(|&e| e == 1))
}

/// Largest `f` with `d / f²` a discriminant, and that fundamental discriminant.
pub fn conductor(d: &BigInt) -> Result<(BigInt, BigInt)> {
    if !crate::arith::is_valid_discriminant(d) {
        return Err(Error::Discriminant(d.clone()));
    }
    let fac = factorize(d)?;
    let mut f = BigInt::one();
    for (p, e) in fac {
        for _ in 0..e / 2 {
            f *= &p;
        }
    }
    // shrink f until d/f² is a discriminant of a maximal order
    let divisors = divisors_desc(&f);
    for g in divisors {
        let g2 = &g * &g;
        if !d.is_multiple_of(&g2) {
            continue;
        }
        let d0 = d / &g2;
        if is_fundamental(&d0)? {
            return Ok((g, d0));
        }
    }
    Err(Error::Internal(format!("no fundamental discriminant found under {d}")))
}

fn divisors_desc(n: &BigInt) -> Vec<BigInt> {
    let limit = n.to_u64().unwrap_or(u64::MAX);
    let mut out: Vec<BigInt> = (1..=limit.min(1 << 22)).filter(|k| n.is_multiple_of(&big(*k as i64))).map(|k| big(k as i64)).collect();
    out.reverse();
    out
}
