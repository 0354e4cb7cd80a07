// SPDX-License-Identifier: Apache-2.0

//! One row of the torsion/witness survey for a pair `(d, n)`.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbits::{enumerate_orbits, OrbitOptions};
use crate::qforms::{class_group, is_n_torsion};
use crate::selmer::predicted_orbit_count;
use crate::witness::{construct_witness, verify_witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurveyStatus {
    Ok,
    /// A witness was found for a non-torsion class, a torsion class had no
    /// witness, or a witness failed verification.
    Violation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyRow {
    #[serde(with = "crate::serde_int")]
    pub disc: BigInt,
    pub class_number: usize,
    pub n: u64,
    pub torsion_class_count: usize,
    pub witnesses_found: usize,
    pub all_verified: bool,
    pub predicted_orbits: Option<u64>,
    pub bruteforce_orbits: Option<usize>,
    pub status: SurveyStatus,
}

/// Checks every class of discriminant `d` for `n`-torsion and witnesses.
/// With `brute_height`, also counts orbits by enumeration (`n ≥ 3` only).
pub fn survey_row(d: &BigInt, n: u64, brute_height: Option<u64>) -> Result<SurveyRow> {
    let cg = class_group(d)?;
    let mut torsion = 0;
    let mut found = 0;
    let mut all_verified = true;
    let mut violation = false;
    for q in &cg.forms {
        let t = is_n_torsion(q, n)?;
        let w = construct_witness(q, n)?;
        torsion += t as usize;
        if t != w.is_some() {
            violation = true;
        }
        if let Some(delta) = w {
            found += 1;
            let r = verify_witness(q, &delta)?;
            if !(r.unit && r.ideal_equal && r.torsion && r.consistent) {
                all_verified = false;
                violation = true;
            }
        }
    }
    let predicted = match predicted_orbit_count(d, n) {
        Ok(p) => Some(p),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    let brute = match brute_height {
        Some(h) if n >= 3 => Some(enumerate_orbits(d, n as usize, h, &OrbitOptions::default())?.count),
        _ => None,
    };
    Ok(SurveyRow {
        disc: d.clone(),
        class_number: cg.order(),
        n,
        torsion_class_count: torsion,
        witnesses_found: found,
        all_verified,
        predicted_orbits: predicted,
        bruteforce_orbits: brute,
        status: if violation { SurveyStatus::Violation } else { SurveyStatus::Ok },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::big;

    #[test]
    fn rows() {
        let r = survey_row(&big(-23), 3, Some(2)).unwrap();
        assert_eq!((r.class_number, r.torsion_class_count, r.witnesses_found), (3, 3, 3));
        assert_eq!(r.predicted_orbits, Some(2));
        assert_eq!(r.bruteforce_orbits, Some(2));
        assert_eq!(r.status, SurveyStatus::Ok);
        let r = survey_row(&big(-23), 2, Some(2)).unwrap();
        assert_eq!((r.torsion_class_count, r.witnesses_found, r.bruteforce_orbits), (1, 1, None));
        assert!(survey_row(&big(-22), 3, None).is_err());
    }
}
