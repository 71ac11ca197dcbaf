//! Joint downlink power / uplink information policy (QGF-IT).
//!
//! Each slot, every E-R is evaluated as a transfer candidate: the uplink
//! channel scaled by its queue weight √(G_i+Z_i) is decomposed by SVD, a
//! water level δ_i comes out of the Lambert W closed form, and the resulting
//! uplink covariance, slot split τ₀/τ_u, and prospective throughput give the
//! candidate's score f_obj = (G_i+Z_i)·D_i. The E-AP beams its peak power at
//! the best-scoring E-R for the τ₀ fraction of the slot; that E-R spends the
//! harvest on uplink transmission for the remaining τ_u — energy causality
//! holds with equality by construction of ω_i.

use num_complex::Complex64;

use crate::numerics::{hermitian_eig, lambert_w0, svd, waterfill_alloc, CMatrix};
use crate::policy_fair::{solve_gamma, Utility};
use crate::policy_wpt::PolicyError;

/// Virtual queues of the joint policy: throughput-fairness queues G_i,
/// minimum-rate queues Z_i, and the E-AP average-power queue Z_AP.
#[derive(Debug, Clone, PartialEq)]
pub struct WpcnQueueSet {
    /// G_i, initialized to D_min.
    pub fairness: Vec<f64>,
    /// Z_i, initialized to D_min.
    pub min_rate: Vec<f64>,
    /// Z_AP, initialized to zero.
    pub avg_power: f64,
}

impl WpcnQueueSet {
    pub fn new(k: usize, d_min: f64) -> Self {
        Self { fairness: vec![d_min; k], min_rate: vec![d_min; k], avg_power: 0.0 }
    }

    pub fn num_ers(&self) -> usize {
        self.fairness.len()
    }

    /// Queue weight G_i + Z_i of one E-R.
    pub fn weight(&self, i: usize) -> f64 {
        self.fairness[i] + self.min_rate[i]
    }
}

/// Parameters of the QGF-IT policy.
#[derive(Debug, Clone, Copy)]
pub struct WpcnConfig {
    pub p_avg: f64,
    pub p_peak: f64,
    /// Minimum average throughput per E-R, bits/slot.
    pub d_min: f64,
    pub v: f64,
    /// Noise variance σ² in watts (sets the γ upper bound).
    pub noise_variance: f64,
}

impl WpcnConfig {
    pub fn validate(&self) -> Result<(), PolicyError> {
        if !(self.p_avg > 0.0 && self.p_avg <= self.p_peak) {
            return Err(PolicyError::InvalidConfig(format!(
                "need 0 < P_avg <= P_peak, got P_avg={}, P_peak={}",
                self.p_avg, self.p_peak
            )));
        }
        if self.d_min < 0.0 {
            return Err(PolicyError::InvalidConfig("D_min must be nonnegative".into()));
        }
        if !(self.v > 0.0) {
            return Err(PolicyError::InvalidConfig("V must be positive".into()));
        }
        if !(self.noise_variance > 0.0) {
            return Err(PolicyError::InvalidConfig("noise variance must be positive".into()));
        }
        Ok(())
    }
}

/// One E-R's evaluated transfer plan for the current slot.
#[derive(Debug, Clone)]
pub struct ErCandidate {
    pub index: usize,
    /// Whether the Lambert W argument was in-domain and the resulting water
    /// level usable. Infeasible candidates carry f_obj = 0 and τ₀ = 0.
    pub feasible: bool,
    /// Water level δ_i.
    pub delta: f64,
    /// Slot-split ratio ω_i = τ_u/τ₀.
    pub omega: f64,
    /// Uplink covariance S_i (M×M, PSD) when feasible.
    pub s_cov: Option<CMatrix>,
    pub tau0: f64,
    pub tau_u: f64,
    /// Selection objective (G_i+Z_i)·D_i.
    pub f_obj: f64,
    /// Prospective throughput D_i in bits for this slot if selected.
    pub throughput: f64,
    /// Defect of the water-level stationarity condition, recomputed from the
    /// dual variables; ~1e-12 when the closed form is consistent.
    pub kkt_residual: f64,
}

impl ErCandidate {
    fn infeasible(index: usize) -> Self {
        Self {
            index,
            feasible: false,
            delta: 0.0,
            omega: 0.0,
            s_cov: None,
            tau0: 0.0,
            tau_u: 1.0,
            f_obj: 0.0,
            throughput: 0.0,
            kkt_residual: 0.0,
        }
    }
}

/// Upper bound on any E-R's per-slot throughput, M·log₂(1 + P_peak/σ²);
/// the box constraint of the γ subproblem.
pub fn uplink_rate_cap(er_antennas: usize, p_peak: f64, noise_variance: f64) -> f64 {
    er_antennas as f64 * (1.0 + p_peak / noise_variance).log2()
}

/// Evaluates E-R `index` as this slot's transfer candidate from its uplink
/// channel and downlink Gram matrix. The scaled uplink H'·√(G_i+Z_i) is
/// decomposed by SVD; the closed-form water level, slot split, covariance,
/// and throughput follow via [`er_candidate_from_modes`].
pub fn er_candidate(
    h_up: &CMatrix,
    w: &CMatrix,
    index: usize,
    queues: &WpcnQueueSet,
    cfg: &WpcnConfig,
) -> Result<ErCandidate, PolicyError> {
    let weight = queues.weight(index);
    if !(weight > 0.0) {
        // Degenerate queues (possible only when D_min = 0): no usable
        // candidate, scored zero.
        return Ok(ErCandidate::infeasible(index));
    }
    let eig = hermitian_eig(w)?;
    let lambda_w1 = eig.eigenvalues[0].max(0.0);
    let scaled = h_up.scale(weight.sqrt());
    let dec = svd(&scaled)?;
    Ok(er_candidate_from_modes(index, &dec.singulars, &dec.right, lambda_w1, weight, queues.avg_power, cfg))
}

/// Closed-form candidate construction from the decomposed uplink modes:
/// `thetas` are the singular values of H'·√(G_i+Z_i) (positive, rank many)
/// and `right` holds the matching right singular vectors as columns.
///
/// With r = rank, s = (1/r)·Σ ln θ_j², α = s + Z_AP·P_peak/(r·(G+Z)) − 1 and
/// β = (λ_{W,1}·P_peak/(G+Z) − Σ 1/θ_j²)/r, the water level is
/// δ = W(β·e^α)/β when β·e^α ≥ −1/e; candidates outside the W domain, with a
/// non-positive water level, or with no mode above water are infeasible.
pub fn er_candidate_from_modes(
    index: usize,
    thetas: &[f64],
    right: &CMatrix,
    lambda_w1: f64,
    weight: f64,
    z_ap: f64,
    cfg: &WpcnConfig,
) -> ErCandidate {
    let r = thetas.len();
    if r == 0 || !(weight > 0.0) {
        return ErCandidate::infeasible(index);
    }
    let rf = r as f64;
    let sum_log: f64 = thetas.iter().map(|t| (t * t).ln()).sum();
    let sum_inv: f64 = thetas.iter().map(|t| 1.0 / (t * t)).sum();
    let alpha = sum_log / rf + z_ap * cfg.p_peak / (rf * weight) - 1.0;
    let beta = (lambda_w1 * cfg.p_peak / weight - sum_inv) / rf;

    let delta = match water_level(alpha, beta) {
        Some(d) if d > 0.0 && d.is_finite() => d,
        _ => return ErCandidate::infeasible(index),
    };

    let psi = waterfill_alloc(thetas, delta);
    let sum_psi: f64 = psi.iter().sum();
    if !(sum_psi > 0.0) {
        // Every mode below the water line: nothing to transmit with.
        return ErCandidate::infeasible(index);
    }
    let omega = delta * cfg.p_peak * lambda_w1 / (weight * sum_psi);
    if !(omega > 0.0) || !omega.is_finite() {
        return ErCandidate::infeasible(index);
    }
    let tau0 = 1.0 / (1.0 + omega);
    let tau_u = omega / (1.0 + omega);

    // S = (weight/δ)·V·diag(ψ)·Vᴴ.
    let m = right.rows();
    let mut s_cov = CMatrix::zeros(m, m);
    for (j, &p) in psi.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let col = right.column(j);
        let c = p * weight / delta;
        for a in 0..m {
            for b in 0..m {
                let cur = s_cov.get(a, b);
                s_cov.set(a, b, cur + col[a] * col[b].conj() * c);
            }
        }
    }

    // D = τ_u·Σ log₂(1 + θ_j²·ψ_j/δ): the log-det of I + H'·S·H'ᴴ evaluated
    // on the uplink eigenmodes.
    let d_bits: f64 = tau_u
        * psi
            .iter()
            .zip(thetas)
            .map(|(&p, &t)| (1.0 + t * t * p / delta).log2())
            .sum::<f64>();
    let f_obj = weight * d_bits;

    // Stationarity defect recomputed through the dual variable
    // ζ = (δ·λ_{W,1} − Z_AP)·P_peak, independent of the α/β shortcut above.
    let zeta = (delta * lambda_w1 - z_ap) * cfg.p_peak;
    let kkt_residual =
        (-delta.ln() + sum_log / rf - 1.0 + delta * sum_inv / rf - zeta / (rf * weight)).abs();

    ErCandidate {
        index,
        feasible: true,
        delta,
        omega,
        s_cov: Some(s_cov),
        tau0,
        tau_u,
        f_obj,
        throughput: d_bits,
        kkt_residual,
    }
}

/// Water level δ = W(β·e^α)/β, handled in log space when the argument is not
/// representable and by the W(x)≈x limit when β ≈ 0. Returns None outside
/// the W domain.
fn water_level(alpha: f64, beta: f64) -> Option<f64> {
    const EXP_GUARD: f64 = 600.0;
    if beta.abs() < 1e-300 {
        // limβ→0 W(β·e^α)/β = e^α.
        return if alpha < EXP_GUARD { Some(alpha.exp()) } else { None };
    }
    if beta > 0.0 {
        // β·e^α = e^t with t = α + ln β; e^α alone may overflow even when
        // the product is representable.
        let t = alpha + beta.ln();
        if t > EXP_GUARD {
            return Some(lambert_of_exp(t) / beta);
        }
        return lambert_w0(t.exp()).ok().map(|w| w / beta);
    }
    // β < 0: the argument must stay within [−1/e, 0).
    if alpha > EXP_GUARD {
        return None;
    }
    let arg = beta * alpha.exp();
    match lambert_w0(arg) {
        Ok(w) => Some(w / beta),
        Err(_) => None,
    }
}

/// W(e^t) for large t, via Newton on w + ln w = t.
fn lambert_of_exp(t: f64) -> f64 {
    let mut w = t - t.ln();
    for _ in 0..50 {
        let f = w + w.ln() - t;
        let step = f / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 1e-14 * w.abs() {
            break;
        }
    }
    w
}

/// Picks the candidate with the largest f_obj (ties to the lowest index).
/// Returns None when every candidate scores zero — no transmission that slot.
pub fn select_candidate(candidates: &[ErCandidate]) -> Option<usize> {
    assert!(!candidates.is_empty());
    let mut best: Option<usize> = None;
    let mut best_val = 0.0;
    for (i, c) in candidates.iter().enumerate() {
        if c.f_obj > best_val {
            best_val = c.f_obj;
            best = Some(i);
        }
    }
    best
}

/// Downlink beam toward the chosen E-R: x = √P_peak·u_max(W). ‖x‖² = P_peak.
pub fn build_downlink_beam(w_chosen: &CMatrix, p_peak: f64) -> Result<Vec<Complex64>, PolicyError> {
    let eig = hermitian_eig(w_chosen)?;
    let (_, u) = eig.top();
    let s = p_peak.sqrt();
    Ok(u.iter().map(|z| z * s).collect())
}

/// Uplink throughput τ_u·log₂ det(I + H'·S·H'ᴴ) in bits. The determinant is
/// evaluated on the M×M side (det(I_N + H'S H'ᴴ) = det(I_M + H'ᴴH'·S)).
pub fn throughput(h_up: &CMatrix, s: &CMatrix, tau_u: f64) -> Result<f64, PolicyError> {
    assert!((0.0..=1.0).contains(&tau_u), "tau_u out of [0,1]");
    let m = h_up.cols();
    if s.rows() != m || s.cols() != m {
        return Err(PolicyError::DimensionMismatch {
            expected: format!("{m}x{m} covariance"),
            got: format!("{}x{}", s.rows(), s.cols()),
        });
    }
    let eig = hermitian_eig(s).map_err(PolicyError::from)?;
    let lam_min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    if lam_min < -1e-9 * (1.0 + s.frobenius_norm()) {
        return Err(PolicyError::NonPsdCovariance(lam_min));
    }
    if tau_u == 0.0 {
        return Ok(0.0);
    }
    let gram = h_up.gram(); // H'ᴴH', M×M
    let a = CMatrix::identity(m).add(&gram.mul(s)?)?;
    let det = complex_det(&a);
    Ok(tau_u * det.re.max(1.0).log2())
}

/// Determinant of a small complex matrix by LU with partial pivoting.
fn complex_det(a: &CMatrix) -> Complex64 {
    let n = a.rows();
    let mut lu: Vec<Complex64> = a.data().to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mut piv = k;
        let mut max = lu[k * n + k].norm();
        for i in k + 1..n {
            let v = lu[i * n + k].norm();
            if v > max {
                max = v;
                piv = i;
            }
        }
        if max == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != k {
            for j in 0..n {
                lu.swap(k * n + j, piv * n + j);
            }
            det = -det;
        }
        let pivot = lu[k * n + k];
        det *= pivot;
        for i in k + 1..n {
            let factor = lu[i * n + k] / pivot;
            for j in k + 1..n {
                let sub = factor * lu[k * n + j];
                lu[i * n + j] -= sub;
            }
        }
    }
    det
}

/// The γ subproblem of the information policy: identical to the fair-WPT
/// subproblem with the box upper bound set to the uplink rate cap D_max.
pub fn solve_gamma_it(utility: &Utility, v: f64, g: &[f64], d_max: f64) -> Result<Vec<f64>, PolicyError> {
    solve_gamma(utility, v, g, d_max)
}

/// End-of-slot queue updates:
/// G_i' = max(G_i + γ_i − D_i, 0),
/// Z_i' = max(Z_i + D_min − D_i, 0),
/// Z_AP' = max(Z_AP + τ₀·tx_power − P_avg, 0).
pub fn update_wpcn_queues(
    queues: &WpcnQueueSet,
    gamma: &[f64],
    throughput_bits: &[f64],
    tau0: f64,
    tx_power: f64,
    cfg: &WpcnConfig,
) -> WpcnQueueSet {
    let k = queues.num_ers();
    assert_eq!(gamma.len(), k);
    assert_eq!(throughput_bits.len(), k);
    let fairness = queues
        .fairness
        .iter()
        .zip(gamma.iter().zip(throughput_bits))
        .map(|(g, (gam, d))| (g + gam - d).max(0.0))
        .collect();
    let min_rate = queues
        .min_rate
        .iter()
        .zip(throughput_bits)
        .map(|(z, d)| (z + cfg.d_min - d).max(0.0))
        .collect();
    let avg_power = (queues.avg_power + tau0 * tx_power - cfg.p_avg).max(0.0);
    WpcnQueueSet { fairness, min_rate, avg_power }
}
