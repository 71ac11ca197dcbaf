//! Thin singular value decomposition via the Gram eigenproblem.
//!
//! The decomposition is computed from the Hermitian eigendecomposition of the
//! smaller Gram matrix (AᴴA or AAᴴ), which keeps the cost at
//! O(min(m,n)²·max(m,n)) — matched to the very rectangular channel matrices
//! this crate works with. Singular values are recovered as ‖A·v_k‖ so the
//! truncated reconstruction stays accurate even for clustered spectra.

use num_complex::Complex64;

use super::eig::hermitian_eig;
use super::matrix::{vnorm, CMatrix};
use super::NumericsError;

/// Rank cutoff relative to the largest singular value.
pub const RANK_REL_TOL: f64 = 1e-12;

/// Thin SVD `A = U·diag(σ)·Vᴴ`, keeping only singular values at or above
/// `1e-12·σ_max`; `rank` equals the number kept.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub left: CMatrix,
    pub singulars: Vec<f64>,
    pub right: CMatrix,
    pub rank: usize,
}

/// Thin SVD of a complex matrix of any shape.
pub fn svd(a: &CMatrix) -> Result<SvdResult, NumericsError> {
    let (m, n) = (a.rows(), a.cols());
    if !a.frobenius_norm().is_finite() {
        return Err(NumericsError::NonFinite);
    }
    if m == 0 || n == 0 {
        return Ok(SvdResult {
            left: CMatrix::zeros(m, 0),
            singulars: vec![],
            right: CMatrix::zeros(n, 0),
            rank: 0,
        });
    }

    // Eigendecompose the smaller Gram matrix; map through A to the other side.
    let tall = m >= n;
    let gram = if tall { a.gram() } else { a.gram_right() };
    let eig = hermitian_eig(&gram)?;

    let mut triples: Vec<(f64, Vec<Complex64>, Vec<Complex64>)> = Vec::new();
    for v in &eig.eigenvectors {
        let (u_vec, v_vec, sigma) = if tall {
            let av = a.mul_vec(v)?;
            let s = vnorm(&av);
            (av, v.clone(), s)
        } else {
            let atv = a.adjoint().mul_vec(v)?;
            let s = vnorm(&atv);
            (v.clone(), atv, s)
        };
        triples.push((sigma, u_vec, v_vec));
    }
    triples.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());

    let sigma_max = triples.first().map(|t| t.0).unwrap_or(0.0);
    let cut = RANK_REL_TOL * sigma_max;
    let mut singulars = Vec::new();
    let mut left_cols = Vec::new();
    let mut right_cols = Vec::new();
    for (sigma, mut u_vec, mut v_vec) in triples {
        if sigma <= 0.0 || sigma < cut {
            break;
        }
        if tall {
            for z in &mut u_vec {
                *z /= sigma;
            }
        } else {
            for z in &mut v_vec {
                *z /= sigma;
            }
        }
        singulars.push(sigma);
        left_cols.push(u_vec);
        right_cols.push(v_vec);
    }

    let rank = singulars.len();
    Ok(SvdResult {
        left: if rank == 0 { CMatrix::zeros(m, 0) } else { CMatrix::from_columns(&left_cols) },
        singulars,
        right: if rank == 0 { CMatrix::zeros(n, 0) } else { CMatrix::from_columns(&right_cols) },
        rank,
    })
}
