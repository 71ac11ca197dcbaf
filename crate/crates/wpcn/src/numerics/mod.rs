//! Dense complex linear algebra and scalar special functions used by the
//! transmission policies: Hermitian eigendecomposition, thin SVD, the
//! principal branch of the Lambert W function, empirical quantiles, and
//! water-filling mode allocation.
//!
//! Everything here is a pure function over value-semantic inputs, so the
//! routines are safe to call from concurrently running simulations.

mod eig;
mod lambert;
mod matrix;
mod stats;
mod svd;

pub use eig::{hermitian_eig, EigResult};
pub use lambert::lambert_w0;
pub use matrix::CMatrix;
pub use stats::{empirical_quantile, waterfill_alloc};
pub use svd::{svd, SvdResult, RANK_REL_TOL};

use thiserror::Error;

/// Errors from the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix deviates from Hermitian by {deviation:.3e} (tolerance {tolerance:.3e})")]
    NonHermitian { deviation: f64, tolerance: f64 },
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },
    #[error("argument {x} is below the Lambert W branch point -1/e")]
    DomainError { x: f64 },
    #[error("empty sample set")]
    EmptySamples,
}
