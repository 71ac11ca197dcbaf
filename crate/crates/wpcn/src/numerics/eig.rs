//! Hermitian eigendecomposition.
//!
//! Complex Householder reduction to real symmetric tridiagonal form followed
//! by the implicit-shift QL iteration (Wilkinson shifts), with eigenvector
//! accumulation. Cost is O(n³); eigenvalues are returned sorted descending
//! with matching unit-norm eigenvectors.

use num_complex::Complex64;

use super::matrix::{vnorm, CMatrix};
use super::NumericsError;

/// Result of a Hermitian eigendecomposition: `A·v_k = λ_k·v_k` with real
/// eigenvalues sorted descending and pairwise orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<Complex64>>,
}

impl EigResult {
    /// Largest eigenvalue and its eigenvector.
    pub fn top(&self) -> (f64, &[Complex64]) {
        (self.eigenvalues[0], &self.eigenvectors[0])
    }
}

const HERMITIAN_REL_TOL: f64 = 1e-12;
const MAX_QL_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix.
///
/// The input must be square and Hermitian within `1e-12·‖A‖_F`; it is
/// symmetrized internally before the reduction, so slight asymmetry from
/// accumulated roundoff is tolerated. Output is deterministic for identical
/// input.
pub fn hermitian_eig(a: &CMatrix) -> Result<EigResult, NumericsError> {
    if a.rows() != a.cols() {
        return Err(NumericsError::NonSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(EigResult { eigenvalues: vec![], eigenvectors: vec![] });
    }
    let norm = a.frobenius_norm();
    if !norm.is_finite() {
        return Err(NumericsError::NonFinite);
    }
    let deviation = a.hermitian_deviation();
    let tolerance = HERMITIAN_REL_TOL * norm;
    if deviation > tolerance {
        return Err(NumericsError::NonHermitian { deviation, tolerance });
    }

    // Symmetrized working copy, w = (A + Aᴴ)/2.
    let mut w = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            w[i * n + j] = (a.get(i, j) + a.get(j, i).conj()) * 0.5;
        }
        w[i * n + i].im = 0.0;
    }

    let mut q = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        q[i * n + i] = Complex64::new(1.0, 0.0);
    }

    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.max(1) - 1];
    tridiagonalize(n, &mut w, &mut q, &mut diag, &mut off);
    ql_implicit_shift(n, &mut diag, &mut off, &mut q);

    // Sort descending; QL leaves eigenvalues unordered.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    for &k in &order {
        eigenvalues.push(diag[k]);
        let mut v: Vec<Complex64> = (0..n).map(|i| q[i * n + k]).collect();
        let nv = vnorm(&v);
        if nv > 0.0 {
            for z in &mut v {
                *z /= nv;
            }
        }
        eigenvectors.push(v);
    }
    Ok(EigResult { eigenvalues, eigenvectors })
}

/// Householder reduction of a Hermitian matrix to real symmetric tridiagonal
/// form. On return `diag`/`off` hold the tridiagonal and the columns of `q`
/// accumulate the unitary similarity, A = Q·T·Qᴴ.
fn tridiagonalize(n: usize, w: &mut [Complex64], q: &mut [Complex64], diag: &mut [f64], off: &mut [f64]) {
    let zero = Complex64::new(0.0, 0.0);
    let mut sub = vec![zero; n.max(1) - 1];

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1; // length of the column tail below the diagonal
        // x = w[k+1..n, k]
        let x0 = w[(k + 1) * n + k];
        let tail2: f64 = (k + 2..n).map(|i| w[i * n + k].norm_sqr()).sum();
        if tail2 == 0.0 {
            sub[k] = x0;
            continue;
        }
        let xnorm = (x0.norm_sqr() + tail2).sqrt();
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;

        // Householder vector v with H = I − β·v·vᴴ mapping x to α·e₀.
        let mut v = vec![zero; m];
        v[0] = x0 - alpha;
        for i in 1..m {
            v[i] = w[(k + 1 + i) * n + k];
        }
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            sub[k] = x0;
            continue;
        }
        let beta = 2.0 / vnorm2;

        // Two-sided update of the trailing block B = w[k+1.., k+1..]:
        // p = β·B·v, κ = (β/2)·vᴴp, u = p − κ·v, B ← B − u·vᴴ − v·uᴴ.
        let mut p = vec![zero; m];
        for i in 0..m {
            let row = &w[(k + 1 + i) * n + (k + 1)..(k + 1 + i) * n + n];
            let mut s = zero;
            for (rj, vj) in row.iter().zip(&v) {
                s += rj * vj;
            }
            p[i] = s * beta;
        }
        let kappa = 0.5
            * beta
            * v.iter().zip(&p).fold(zero, |acc, (a, b)| acc + a.conj() * b).re;
        let u: Vec<Complex64> = p.iter().zip(&v).map(|(pi, vi)| pi - vi * kappa).collect();
        for i in 0..m {
            for j in 0..m {
                w[(k + 1 + i) * n + (k + 1 + j)] -= u[i] * v[j].conj() + v[i] * u[j].conj();
            }
        }

        sub[k] = alpha;
        for i in k + 2..n {
            w[i * n + k] = zero;
            w[k * n + i] = zero;
        }

        // Accumulate Q ← Q·H over columns k+1..n.
        for r in 0..n {
            let row = &q[r * n + (k + 1)..r * n + n];
            let mut t = zero;
            for (qi, vi) in row.iter().zip(&v) {
                t += qi * vi;
            }
            t *= beta;
            for j in 0..m {
                q[r * n + (k + 1 + j)] -= t * v[j].conj();
            }
        }
    }
    if n >= 2 {
        sub[n - 2] = w[(n - 1) * n + (n - 2)];
    }
    for i in 0..n {
        diag[i] = w[i * n + i].re;
    }

    // Phase-normalize the subdiagonal to real nonnegative by a diagonal
    // unitary similarity, folded into the columns of Q.
    let mut u = Complex64::new(1.0, 0.0);
    for i in 0..n.max(1) - 1 {
        let s = sub[i];
        let mag = s.norm();
        off[i] = mag;
        if mag > 0.0 {
            u *= s / mag;
        }
        for r in 0..n {
            q[r * n + (i + 1)] *= u;
        }
    }
}

/// Implicit-shift QL iteration on a real symmetric tridiagonal matrix with
/// rotation accumulation into the complex columns of `q`.
fn ql_implicit_shift(n: usize, d: &mut [f64], e_in: &mut [f64], q: &mut [Complex64]) {
    if n <= 1 {
        return;
    }
    // Shift the off-diagonal so e[i] pairs with d[i] (EISPACK convention).
    let mut e = vec![0.0; n];
    for i in 1..n {
        e[i - 1] = e_in[i - 1];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut iter = 0;
        loop {
            // Find a small subdiagonal element.
            let mut m = l;
            while m < n - 1 {
                if e[m].abs() <= eps * tst1 {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                // QL on a Hermitian tridiagonal essentially always converges;
                // keep the best effort rather than aborting the run.
                break;
            }

            // Wilkinson shift.
            let g = d[l];
            let p0 = (d[l + 1] - g) / (2.0 * e[l]);
            let mut r = p0.hypot(1.0);
            if p0 < 0.0 {
                r = -r;
            }
            d[l] = e[l] / (p0 + r);
            d[l + 1] = e[l] * (p0 + r);
            let dl1 = d[l + 1];
            let mut h = g - d[l];
            for i in l + 2..n {
                d[i] -= h;
            }
            f += h;

            // Implicit QL sweep from m down to l.
            let mut p = d[m];
            let mut c = 1.0;
            let mut c2 = c;
            let mut c3 = c;
            let el1 = e[l + 1];
            let mut s = 0.0;
            let mut s2 = 0.0;
            for i in (l..m).rev() {
                c3 = c2;
                c2 = c;
                s2 = s;
                let g2 = c * e[i];
                h = c * p;
                r = p.hypot(e[i]);
                e[i + 1] = s * r;
                s = e[i] / r;
                c = p / r;
                p = c * d[i] - s * g2;
                d[i + 1] = h + s * (c * g2 + s * d[i]);

                // Apply the rotation to columns i, i+1 of Q.
                for k in 0..n {
                    let hq = q[k * n + i + 1];
                    q[k * n + i + 1] = hq * c + q[k * n + i] * s;
                    q[k * n + i] = q[k * n + i] * c - hq * s;
                }
            }
            p = -s * s2 * c3 * el1 * e[l] / dl1;
            e[l] = s * p;
            d[l] = c * p;
            if e[l].abs() <= eps * tst1 {
                break;
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}
