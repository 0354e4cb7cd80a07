// SPDX-License-Identifier: Apache-2.0

use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("degenerate lattice basis")]
    Rank,

    #[error("invalid discriminant {0}: must be nonzero, non-square and 0 or 1 mod 4")]
    Discriminant(BigInt),

    #[error("discriminant mismatch: {0} vs {1}")]
    DiscriminantMismatch(BigInt, BigInt),

    #[error("form is not primitive: gcd of coefficients is {0}")]
    Imprimitive(BigInt),

    #[error("matrix is not unimodular (determinant {0})")]
    NotUnimodular(BigInt),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("resource limit: {0}")]
    Resource(String),

    /// A computed certificate contradicted the theory it relies on. Indicates a
    /// convention bug, never a property of the input.
    #[error("internal assertion failed: {0}")]
    Internal(String),
}
