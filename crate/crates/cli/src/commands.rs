// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use torsion_core::arith::is_valid_discriminant;
use torsion_core::{
    class_group, coker_group, construct_witness, enumerate_orbits, predicted_orbit_count, resultant, survey_row,
    verify_witness, AbelianGroup, BinForm, CokerDescription, OrbitOptions, QuadForm, SurveyRow,
    SurveyStatus,
};

use crate::error::{CliError, CliResult};
use crate::parse::DiscRange;

#[derive(Serialize)]
struct Triple(
    #[serde(with = "torsion_core::serde_int")] BigInt,
    #[serde(with = "torsion_core::serde_int")] BigInt,
    #[serde(with = "torsion_core::serde_int")] BigInt,
);

impl From<&QuadForm> for Triple {
    fn from(q: &QuadForm) -> Self {
        Triple(q.a.clone(), q.b.clone(), q.c.clone())
    }
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) -> CliResult<()> {
    let s = if json {
        serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?
    } else {
        text()
    };
    let mut out = std::io::stdout().lock();
    writeln!(out, "{s}").map_err(|e| CliError::io("<stdout>", e))
}

fn check_disc(d: &BigInt) -> CliResult<()> {
    if is_valid_discriminant(d) {
        Ok(())
    } else {
        Err(torsion_core::Error::Discriminant(d.clone()).into())
    }
}

fn check_form_disc(q: &QuadForm, d: &BigInt) -> CliResult<()> {
    let fd = q.discriminant();
    if fd != *d {
        return Err(CliError::Usage(format!("form {q} has discriminant {fd}, not {d}")));
    }
    Ok(())
}

#[derive(Serialize)]
struct ClassGroupOut {
    #[serde(with = "torsion_core::serde_int")]
    disc: BigInt,
    h: usize,
    forms: Vec<Triple>,
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<Vec<Vec<usize>>>,
}

pub fn classgroup(d: &BigInt, table: bool, json: bool) -> CliResult<()> {
    check_disc(d)?;
    let g = class_group(d)?;
    let out = ClassGroupOut {
        disc: d.clone(),
        h: g.order(),
        forms: g.forms.iter().map(Triple::from).collect(),
        table: if table { g.table.clone() } else { None },
    };
    emit(json, &out, || {
        let mut s = format!("h({d}) = {}", g.order());
        for q in &g.forms {
            s.push_str(&format!("\n  {q}"));
        }
        if let Some(t) = &out.table {
            for row in t {
                let cells: Vec<String> = row.iter().map(|i| i.to_string()).collect();
                s.push_str(&format!("\n  [{}]", cells.join(" ")));
            }
        }
        s
    })
}

#[derive(Serialize)]
struct WitnessOut {
    found: bool,
    #[serde(with = "torsion_core::serde_int::opt_vec")]
    delta: Option<Vec<BigInt>>,
    #[serde(with = "torsion_core::serde_int::opt")]
    resultant: Option<BigInt>,
}

pub fn witness(d: &BigInt, q: &QuadForm, n: u64, json: bool) -> CliResult<()> {
    check_disc(d)?;
    check_form_disc(q, d)?;
    let w = construct_witness(q, n)?;
    let out = WitnessOut {
        found: w.is_some(),
        delta: w.as_ref().map(|t| t.coeffs().to_vec()),
        resultant: w.as_ref().map(|t| resultant(q, t)),
    };
    emit(json, &out, || match &w {
        Some(t) => format!("delta = {t}\nresultant = {}", out.resultant.as_ref().unwrap()),
        None => format!("{q} is not {n}-torsion: no witness"),
    })
}

pub fn verify(q: &QuadForm, delta: &BinForm, json: bool) -> CliResult<()> {
    let r = verify_witness(q, delta)?;
    emit(json, &r, || {
        format!(
            "resultant = {}\nunit = {}\nideal_equal = {}\ntorsion = {}\nconsistent = {}",
            r.resultant, r.unit, r.ideal_equal, r.torsion, r.consistent
        )
    })?;
    if r.consistent {
        Ok(())
    } else {
        Err(CliError::Internal(format!("inconsistent witness report for ({q}, {delta})")))
    }
}

#[derive(Serialize)]
struct ResultantOut {
    #[serde(with = "torsion_core::serde_int")]
    resultant: BigInt,
}

pub fn resultant_cmd(q: &QuadForm, delta: &BinForm, json: bool) -> CliResult<()> {
    let r = resultant(q, delta);
    emit(json, &ResultantOut { resultant: r.clone() }, || r.to_string())
}

#[derive(Serialize)]
struct PredictOut {
    #[serde(with = "torsion_core::serde_int")]
    disc: BigInt,
    n: u64,
    predicted: u64,
    group: AbelianGroup,
}

pub fn orbits(d: &BigInt, n: u64, height: u64, predict_only: bool, opts: &OrbitOptions, json: bool) -> CliResult<()> {
    check_disc(d)?;
    if predict_only {
        let c = coker_group(d, n)?;
        let out = PredictOut { disc: d.clone(), n, predicted: predicted_orbit_count(d, n)?, group: c.group };
        return emit(json, &out, || format!("predicted orbits: {} (group {})", out.predicted, out.group));
    }
    let n = usize::try_from(n).map_err(|_| CliError::Usage("n too large".into()))?;
    let r = enumerate_orbits(d, n, height, opts)?;
    emit(json, &r, || {
        let pred = r.predicted.map_or("unknown".to_string(), |p| p.to_string());
        let mut s = format!(
            "orbits found: {} (predicted {pred}, status {:?}, {} candidates{})",
            r.count,
            r.status,
            r.candidates_checked,
            if r.truncated { ", truncated" } else { "" }
        );
        for p in &r.representatives {
            s.push_str(&format!("\n  ({}, {})", p.q, p.delta));
        }
        for note in &r.notes {
            s.push_str(&format!("\nnote: {note}"));
        }
        s
    })
}

#[derive(Serialize)]
struct SelmerOut {
    #[serde(flatten)]
    coker: CokerDescription,
    predicted: u64,
}

pub fn selmer(d: &BigInt, n: u64, json: bool) -> CliResult<()> {
    check_disc(d)?;
    let coker = coker_group(d, n)?;
    let predicted = torsion_core::inversion_orbit_count(&coker.group);
    let out = SelmerOut { coker, predicted };
    emit(json, &out, || {
        format!(
            "unit part {}\nclass part {}\ncokernel {}\npredicted orbits: {predicted}",
            out.coker.unit_part, out.coker.class_part, out.coker.group
        )
    })
}

#[derive(Serialize)]
struct SurveySummary {
    rows: usize,
    discriminants: usize,
    violations: usize,
    orbit_mismatches: usize,
}

pub fn survey_discs(range: DiscRange) -> Vec<BigInt> {
    (range.lo..=range.hi).map(BigInt::from).filter(is_valid_discriminant).collect()
}

pub fn survey(
    discs: &[BigInt],
    ns: &[u64],
    height: Option<u64>,
    out: Option<&Path>,
    jobs: Option<usize>,
    json: bool,
) -> CliResult<()> {
    if ns.contains(&0) {
        return Err(CliError::Usage("n must be positive".into()));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build().map_err(|e| CliError::Internal(e.to_string()))?;
    let tasks: Vec<(&BigInt, u64)> = discs.iter().flat_map(|d| ns.iter().map(move |&n| (d, n))).collect();
    let mut rows: Vec<SurveyRow> = pool.install(|| {
        tasks.par_iter().map(|&(d, n)| survey_row(d, n, height)).collect::<Result<Vec<_>, _>>()
    })?;
    rows.sort_by(|a, b| (&a.disc, a.n).cmp(&(&b.disc, b.n)));

    let csv_bytes = to_csv(&rows)?;
    match out {
        Some(p) => write_file(p, &csv_bytes)?,
        None => std::io::stdout().lock().write_all(&csv_bytes).map_err(|e| CliError::io("<stdout>", e))?,
    }

    let summary = SurveySummary {
        rows: rows.len(),
        discriminants: discs.len(),
        violations: rows.iter().filter(|r| r.status == SurveyStatus::Violation).count(),
        orbit_mismatches: rows
            .iter()
            .filter(|r| matches!((r.predicted_orbits, r.bruteforce_orbits), (Some(p), Some(b)) if p as usize != b))
            .count(),
    };
    let text = if json {
        serde_json::to_string_pretty(&summary).map_err(|e| CliError::Internal(e.to_string()))?
    } else {
        format!(
            "{} rows over {} discriminants: {} violations, {} orbit-count mismatches",
            summary.rows, summary.discriminants, summary.violations, summary.orbit_mismatches
        )
    };
    if out.is_some() {
        writeln!(std::io::stdout().lock(), "{text}").map_err(|e| CliError::io("<stdout>", e))?;
    } else {
        eprintln!("{text}");
    }
    if summary.violations > 0 {
        return Err(CliError::Internal(format!("{} survey rows violate the torsion/witness equivalence", summary.violations)));
    }
    Ok(())
}

fn to_csv(rows: &[SurveyRow]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Internal(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Internal(e.to_string()))
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let tmp: PathBuf = {
        let mut name = path.file_name().map(|s| s.to_os_string()).unwrap_or_default();
        name.push(format!(".tmp{}", std::process::id()));
        path.with_file_name(name)
    };
    std::fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}
