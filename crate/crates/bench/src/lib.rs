// SPDX-License-Identifier: Apache-2.0

//! Criterion benchmarks for torsion-core live in `benches/`.
