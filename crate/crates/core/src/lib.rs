// SPDX-License-Identifier: Apache-2.0

//! Unit-resultant certificates for torsion in class groups of quadratic orders.
//!
//! A primitive binary quadratic form `q` of discriminant `d` has an ideal class
//! of order dividing `n` exactly when some binary form `δ` of degree `n` has
//! resultant `±1` with `q`. This crate decides that condition, constructs and
//! verifies such `δ`, models the group acting on pairs `(q, δ)`, and counts the
//! resulting orbits against the Selmer-group prediction.
//!
//! Modules, bottom-up:
//!
//! - [`intlinalg`]: exact integer matrices (Bareiss, HNF, SNF, integer solves,
//!   two-dimensional lattice reduction).
//! - [`qforms`]: binary quadratic forms, reduction, equivalence, composition
//!   and class groups.
//! - [`qorders`]: quadratic orders, their elements and ideals, units and
//!   `n`-th power tests.
//! - [`binforms`]: degree-`n` binary forms, resultants, and the group `G_n(ℤ)`.
//! - [`witness`]: construction and verification of unit-resultant witnesses.
//! - [`selmer`]: the finite abelian group counting orbits.
//! - [`orbits`]: orbit equivalence and bounded orbit enumeration.
//! - [`survey`]: batch rows over ranges of discriminants.

pub mod arith;
pub mod binforms;
pub mod error;
pub mod factor;
pub mod intlinalg;
pub mod orbits;
pub mod qforms;
pub mod qorders;
pub mod selmer;
pub mod serde_int;
pub mod survey;
pub mod witness;

pub use binforms::{act, compose_group, residue_mod_q, resultant, BinForm, GroupElem, PairQD, Residue};
pub use error::{Error, Result};
pub use intlinalg::IntMatrix;
pub use orbits::{enumerate_orbits, gaussian_orbit_claim, pairs_equivalent, GroupModel, OrbitOptions, OrbitReport, OrbitStatus};
pub use qforms::{class_group, compose, is_n_torsion, ClassGroup, QuadForm, UnimodMat};
pub use qorders::{FormIdealData, OrderElem, OrderIdeal, QuadOrder};
pub use selmer::{coker_group, inversion_orbit_count, predicted_orbit_count, AbelianGroup, CokerDescription};
pub use survey::{survey_row, SurveyRow, SurveyStatus};
pub use witness::{construct_witness, verify_witness, WitnessReport};

pub use num_bigint::BigInt;
