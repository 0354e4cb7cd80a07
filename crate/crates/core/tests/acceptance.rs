// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use torsion_core::arith::{big, is_valid_discriminant};
use torsion_core::factor::is_fundamental;
use torsion_core::intlinalg::{hnf, snf};
use torsion_core::orbits::gaussian_orbit_claim;
use torsion_core::qforms::canonical;
use torsion_core::qorders::{evaluate_binform, form_from_ideal, ideal_from_form};
use torsion_core::{
    act, class_group, compose, construct_witness, enumerate_orbits, is_n_torsion, pairs_equivalent,
    predicted_orbit_count, resultant, verify_witness, BigInt, BinForm, GroupElem, GroupModel, IntMatrix, OrbitOptions,
    PairQD, QuadForm, UnimodMat,
};

const CASES: usize = 10_000;

type Outcome = Result<String, String>;

fn qf(a: i64, b: i64, c: i64) -> QuadForm {
    QuadForm::new(a, b, c)
}

fn bf(t: &[i64]) -> BinForm {
    BinForm::from_i64(t)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn worked_examples() -> Outcome {
    let start = Instant::now();
    let mut cases: Vec<(QuadForm, BinForm)> = vec![
        (qf(1, 1, 6), bf(&[-1, 0, 0, 0])),
        (qf(2, 1, 3), bf(&[1, -1, 0, -1])),
        (qf(2, -1, 3), bf(&[-1, -1, 0, -1])),
        (qf(1, 1, 12), bf(&[-1, 0, 0, 0, 0, 0])),
        (qf(2, 1, 6), bf(&[-1, -1, 1, -3, 0, -1])),
        (qf(2, -1, 6), bf(&[1, -1, -1, -3, 0, -1])),
        (qf(3, 1, 4), bf(&[1, 1, 0, -1, -1, -1])),
        (qf(3, -1, 4), bf(&[-1, 1, 0, -1, 1, -1])),
    ];
    for (q, d) in &cases {
        let r = resultant(q, d);
        ensure(r.is_one(), || format!("res({q}, {d}) = {r}, expected 1"))?;
    }
    let q20 = qf(1, 0, -5);
    let d20 = bf(&[-9, -4, 0, 0]);
    let rep = verify_witness(&q20, &d20).map_err(|e| e.to_string())?;
    ensure(rep.unit && rep.ideal_equal && rep.torsion && rep.consistent, || format!("d = 20 pair: {rep:?}"))?;
    let gauss = qf(1, 0, 1);
    for n in 1..=4 {
        let x2n = BinForm::monomial(2 * n, 2 * n);
        let xyn = BinForm::monomial(2 * n, n);
        for d in [x2n, xyn] {
            let r = resultant(&gauss, &d);
            ensure(r.abs().is_one(), || format!("res(x^2 + y^2, {d}) = {r}"))?;
            cases.push((gauss.clone(), d));
        }
    }
    let ms = start.elapsed().as_millis();
    ensure(ms < 1000, || format!("took {ms} ms"))?;
    Ok(format!("{} resultants exact, d = 20 pair verified, {ms} ms", cases.len() + 1))
}

fn class_numbers() -> Outcome {
    let expected: [(i64, Vec<(i64, i64, i64)>); 4] = [
        (-23, vec![(1, 1, 6), (2, 1, 3), (2, -1, 3)]),
        (-47, vec![(1, 1, 12), (2, 1, 6), (2, -1, 6), (3, 1, 4), (3, -1, 4)]),
        (-4, vec![(1, 0, 1)]),
        (-3, vec![(1, 1, 1)]),
    ];
    let mut parts = Vec::new();
    for (d, forms) in expected {
        let cg = class_group(&big(d)).map_err(|e| e.to_string())?;
        let got: BTreeSet<QuadForm> = cg.forms.iter().cloned().collect();
        let want: BTreeSet<QuadForm> = forms.iter().map(|&(a, b, c)| qf(a, b, c)).collect();
        ensure(got == want, || format!("d = {d}: got {got:?}"))?;
        parts.push(format!("h({d}) = {}", cg.order()));
    }
    Ok(parts.join(", "))
}

fn biconditional_survey() -> Outcome {
    let discs: Vec<i64> = (-2999..0)
        .chain(1..300)
        .filter(|&d| is_fundamental(&big(d)).unwrap_or(false))
        .collect();
    let checks = AtomicUsize::new(0);
    let witnesses = AtomicUsize::new(0);
    let violations: Vec<String> = discs
        .par_iter()
        .flat_map_iter(|&d| {
            let mut bad = Vec::new();
            let cg = match class_group(&big(d)) {
                Ok(cg) => cg,
                Err(e) => return vec![format!("d = {d}: {e}")],
            };
            for q in &cg.forms {
                for n in 2..=5u64 {
                    checks.fetch_add(1, Ordering::Relaxed);
                    let res = (|| -> torsion_core::Result<Option<String>> {
                        let t = is_n_torsion(q, n)?;
                        let w = construct_witness(q, n)?;
                        if t != w.is_some() {
                            return Ok(Some(format!("d = {d}, {q}, n = {n}: torsion {t}, witness {w:?}")));
                        }
                        if let Some(delta) = w {
                            witnesses.fetch_add(1, Ordering::Relaxed);
                            let r = verify_witness(q, &delta)?;
                            if !(r.unit && r.ideal_equal && r.torsion && r.consistent) {
                                return Ok(Some(format!("d = {d}, {q}, n = {n}: {r:?}")));
                            }
                        }
                        Ok(None)
                    })();
                    match res {
                        Ok(Some(v)) => bad.push(v),
                        Ok(None) => {}
                        Err(e) => bad.push(format!("d = {d}, {q}, n = {n}: {e}")),
                    }
                }
            }
            bad
        })
        .collect();
    let c = checks.load(Ordering::Relaxed);
    let w = witnesses.load(Ordering::Relaxed);
    ensure(violations.is_empty(), || {
        format!("{} violations of {c} checks; first: {}", violations.len(), violations[0])
    })?;
    Ok(format!("{} discriminants, {c} (class, n) checks, {w} witnesses verified, 0 violations", discs.len()))
}

fn orbit_counts() -> Outcome {
    let mut parts = Vec::new();
    for (d, n, want) in [(-3i64, 3u64, 2u64), (-4, 2, 2), (-4, 4, 2), (20, 3, 2)] {
        let p = predicted_orbit_count(&big(d), n).map_err(|e| e.to_string())?;
        ensure(p == want, || format!("predicted({d}, {n}) = {p}, expected {want}"))?;
        parts.push(format!("pred({d},{n})={p}"));
    }
    let opts = OrbitOptions { short_circuit: false, ..OrbitOptions::default() };
    for (d, n) in [(-3i64, 3usize), (-4, 4), (-23, 3)] {
        let pred = predicted_orbit_count(&big(d), n as u64).map_err(|e| e.to_string())?;
        for h in 1..=3u64 {
            let r = enumerate_orbits(&big(d), n, h, &opts).map_err(|e| e.to_string())?;
            ensure(r.count as u64 <= pred, || format!("({d}, {n}, H = {h}): {} orbits exceed prediction {pred}", r.count))?;
            if h == 3 {
                ensure(r.count as u64 == pred, || format!("({d}, {n}, H = 3): {} orbits, predicted {pred}", r.count))?;
                parts.push(format!("brute({d},{n},H=3)={}", r.count));
            }
        }
    }
    Ok(parts.join(", "))
}

fn random_form(rng: &mut ChaCha8Rng, range: i64) -> QuadForm {
    loop {
        let q = qf(rng.gen_range(-range..=range), rng.gen_range(-range..=range), rng.gen_range(-range..=range));
        let d = q.discriminant();
        if !is_valid_discriminant(&d) || !q.is_primitive() {
            continue;
        }
        if d.is_negative() && q.a.is_negative() {
            continue;
        }
        return q;
    }
}

fn random_binform(rng: &mut ChaCha8Rng, n: usize, range: i64) -> BinForm {
    bf(&(0..=n).map(|_| rng.gen_range(-range..=range)).collect::<Vec<_>>())
}

fn random_generator(rng: &mut ChaCha8Rng, n: usize) -> GroupElem {
    match rng.gen_range(0..6) {
        0 => GroupElem::unipotent(n, &random_binform(rng, n - 2, 3)).unwrap(),
        1 => GroupElem::scalar(n, -1),
        2 => GroupElem::twist(n),
        3 => GroupElem::matrix(n, UnimodMat::s_mat()),
        4 => GroupElem::matrix(n, UnimodMat::t_mat(big(rng.gen_range(-3..=3)))),
        _ => GroupElem::matrix(n, UnimodMat::reflection()),
    }
}

fn is_hnf(h: &IntMatrix) -> bool {
    let mut last: Option<usize> = None;
    let mut zero_seen = false;
    for i in 0..h.rows() {
        match h.row(i).iter().position(|x| !x.is_zero()) {
            None => zero_seen = true,
            Some(pc) => {
                if zero_seen || last.is_some_and(|l| pc <= l) || !h[(i, pc)].is_positive() {
                    return false;
                }
                for k in 0..i {
                    if h[(k, pc)].is_negative() || h[(k, pc)] >= h[(i, pc)] {
                        return false;
                    }
                }
                last = Some(pc);
            }
        }
    }
    true
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut names = Vec::new();

    for _ in 0..CASES {
        let q = random_form(&mut rng, 8);
        let n1 = rng.gen_range(1..=4);
        let n2 = rng.gen_range(1..=4);
        let d1 = random_binform(&mut rng, n1, 5);
        let d2 = random_binform(&mut rng, n2, 5);
        let lhs = resultant(&q, &d1.mul(&d2));
        let rhs = resultant(&q, &d1) * resultant(&q, &d2);
        ensure(lhs == rhs, || format!("multiplicativity: {q}, {d1}, {d2}"))?;
    }
    names.push("multiplicativity");

    for _ in 0..CASES {
        let q = random_form(&mut rng, 8);
        let n = rng.gen_range(2..=6);
        let d = random_binform(&mut rng, n, 5);
        let r = random_binform(&mut rng, n - 2, 5);
        let moved = d.add(&r.mul_quad(&q)).unwrap();
        ensure(resultant(&q, &moved) == resultant(&q, &d), || format!("unipotent: {q}, {d}, {r}"))?;
    }
    names.push("unipotent invariance");

    for _ in 0..CASES {
        let q = random_form(&mut rng, 8);
        let n = rng.gen_range(3..=6);
        let p = PairQD::new(q, random_binform(&mut rng, n, 4));
        let g = random_generator(&mut rng, n);
        let img = act(&g, &p).unwrap();
        ensure(img.resultant().abs() == p.resultant().abs(), || format!("|res| under {g:?} on {p:?}"))?;
    }
    names.push("|res| invariance");

    for _ in 0..CASES {
        let q = loop {
            let q = random_form(&mut rng, 8);
            if q.a.is_positive() {
                break q;
            }
        };
        let n = rng.gen_range(1..=6);
        let d = random_binform(&mut rng, n, 5);
        let data = ideal_from_form(&q).unwrap();
        let g = evaluate_binform(&d, &data);
        let lhs = num_traits::pow(q.a.clone(), n) * resultant(&q, &d);
        let nm = data.order.norm(&g);
        ensure(nm == lhs || nm == -&lhs, || format!("norm identity: {q}, {d}"))?;
    }
    names.push("norm identity");

    let discs: Vec<BigInt> =
        (-1500i64..-2).chain(5..600).map(big).filter(|d| is_valid_discriminant(d)).collect();
    for _ in 0..CASES {
        let d = &discs[rng.gen_range(0..discs.len())];
        let cg = class_group(d).unwrap();
        let pick = |rng: &mut ChaCha8Rng| cg.forms[rng.gen_range(0..cg.forms.len())].clone();
        let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let ab_c = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let a_bc = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        ensure(ab_c == a_bc, || format!("associativity at {d}: {a}, {b}, {c}"))?;
        let e = cg.forms[cg.principal_index()].clone();
        ensure(compose(&a, &e).unwrap() == canonical(&a).unwrap(), || format!("identity at {d}: {a}"))?;
        let inv = QuadForm { a: a.a.clone(), b: -&a.b, c: a.c.clone() };
        ensure(compose(&a, &inv).unwrap() == e, || format!("inverse at {d}: {a}"))?;
        ensure(compose(&a, &b).unwrap() == compose(&b, &a).unwrap(), || format!("commutativity at {d}"))?;
    }
    names.push("composition group laws");

    for _ in 0..CASES {
        let q = loop {
            let q = random_form(&mut rng, 30);
            if q.a.is_positive() {
                break q;
            }
        };
        let data = ideal_from_form(&q).unwrap();
        let back = form_from_ideal(&data.order, &data.ideal).unwrap();
        ensure(canonical(&back).unwrap() == canonical(&q).unwrap(), || format!("round trip class: {q} -> {back}"))?;
        ensure(ideal_from_form(&back).unwrap().ideal == data.ideal, || format!("round trip ideal: {q} -> {back}"))?;
        ensure(back.a == q.a && (&back.b - &q.b).is_multiple_of(&(&q.a * 2u32)), || format!("round trip form: {q} -> {back}"))?;
    }
    names.push("form-ideal round trip");

    for _ in 0..CASES {
        let rows = rng.gen_range(1..=4);
        let cols = rng.gen_range(1..=4);
        let m = IntMatrix::from_rows(
            &(0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-9i64..=9)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        );
        let (h, u) = hnf(&m);
        ensure(u.is_unimodular() && &u * &m == h && is_hnf(&h), || format!("hnf of {m}"))?;
        let (dm, su, sv) = snf(&m);
        ensure(su.is_unimodular() && sv.is_unimodular() && &(&su * &m) * &sv == dm, || format!("snf of {m}"))?;
        let k = rows.min(cols);
        for i in 0..rows {
            for j in 0..cols {
                ensure(i == j || dm[(i, j)].is_zero(), || format!("snf off-diagonal of {m}"))?;
            }
        }
        for i in 0..k {
            ensure(!dm[(i, i)].is_negative(), || format!("snf sign of {m}"))?;
            if i + 1 < k && !dm[(i, i)].is_zero() {
                ensure((&dm[(i + 1, i + 1)] % &dm[(i, i)]).is_zero(), || format!("snf chain of {m}"))?;
            }
            if dm[(i, i)].is_zero() && i + 1 < k {
                ensure(dm[(i + 1, i + 1)].is_zero(), || format!("snf zero tail of {m}"))?;
            }
        }
    }
    names.push("HNF/SNF");

    Ok(format!("{} cases each: {}", CASES, names.join(", ")))
}

fn documented_discrepancy() -> Outcome {
    let q = qf(1, 0, 1);
    let x8 = PairQD::new(q.clone(), BinForm::monomial(8, 8));
    let x4y4 = PairQD::new(q.clone(), BinForm::monomial(8, 4));
    // −x⁴(x² − y²) = −x⁶ + x⁴y²
    let u = GroupElem::unipotent(8, &bf(&[0, 0, 0, 0, 1, 0, -1])).map_err(|e| e.to_string())?;
    ensure(act(&u, &x8).map_err(|e| e.to_string())? == x4y4, || "explicit unipotent does not map x^8 to x^4y^4".into())?;
    let g = pairs_equivalent(&x8, &x4y4, GroupModel::Lifted)
        .map_err(|e| e.to_string())?
        .ok_or("decision procedure reports x^8 and x^4y^4 inequivalent")?;
    ensure(act(&g, &x8).unwrap() == x4y4, || "returned witness does not map the pairs".into())?;
    let check = gaussian_orbit_claim(4).map_err(|e| e.to_string())?;
    ensure(check.conflicts_with_claim, || "tension with the two-orbit description not flagged".into())?;
    ensure(check.unipotent.as_ref() == Some(&u), || format!("reported unipotent {:?}", check.unipotent))?;
    let report = enumerate_orbits(&big(-4), 8, 1, &OrbitOptions::default()).map_err(|e| e.to_string())?;
    ensure(!report.notes.is_empty(), || "orbit report carries no discrepancy note".into())?;
    Ok(format!("flagged: {}", check.note))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("1 worked example regression", worked_examples),
        ("2 class numbers and form lists", class_numbers),
        ("3 torsion/witness biconditional survey", biconditional_survey),
        ("4 orbit counts", orbit_counts),
        ("5 property suites", property_suites),
        ("6 documented discrepancy", documented_discrepancy),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let out = f();
        let secs = start.elapsed().as_secs_f64();
        match out {
            Ok(msg) => println!("PASS criterion {name} ({secs:.1}s): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.1}s): {msg}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
