//! QoS-aware fair power transfer (QF-WPT).
//!
//! The beam decision works on a queue-weighted channel W' =
//! Σ (Z_i+G_i)·W_i − Z_AP·I, which may be indefinite: the E-AP transmits only
//! while the weighted gain still clears the accumulated average-power debt.
//! Fairness enters through the auxiliary variables γ chosen each slot by
//! minimizing −V·φ(γ) + Σ G_i·γ_i over the box [0, P_peak]^K; the fairness
//! queues G_i then track the shortfall of delivered power behind γ.

use serde::{Deserialize, Serialize};

use crate::numerics::{hermitian_eig, CMatrix};
use crate::policy_wpt::{BeamDecision, PolicyError};

/// Virtual queue state of the fair policy: fairness queues G_i, minimum-power
/// queues Z_i, and the E-AP average-power queue Z_AP. All backlogs stay ≥ 0.
#[derive(Debug, Clone, PartialEq)]
pub struct FairQueueSet {
    /// G_i — fairness (auxiliary-variable) queues.
    pub fairness: Vec<f64>,
    /// Z_i — minimum received power queues.
    pub min_power: Vec<f64>,
    /// Z_AP — average transmit power queue.
    pub avg_power: f64,
}

impl FairQueueSet {
    /// All-zero initialization.
    pub fn new(k: usize) -> Self {
        Self { fairness: vec![0.0; k], min_power: vec![0.0; k], avg_power: 0.0 }
    }

    pub fn num_ers(&self) -> usize {
        self.fairness.len()
    }
}

/// Network utility on the per-E-R averages. All variants are concave,
/// continuous, and entrywise nondecreasing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "alpha")]
pub enum Utility {
    /// φ(γ) = Σ γ_i.
    Sum,
    /// φ(γ) = Σ ln γ_i (the log base only rescales V).
    ProportionalFair,
    /// φ(γ) = min_i γ_i.
    MaxMin,
    /// φ(γ) = Σ γ_i^{1−α}/(1−α) for α > 0; α = 1 coincides with
    /// proportional fairness.
    AlphaFair(f64),
}

impl Utility {
    pub fn validate(&self) -> Result<(), PolicyError> {
        if let Utility::AlphaFair(a) = self {
            if !(*a > 0.0) {
                return Err(PolicyError::InvalidUtility(format!("alpha must be positive, got {a}")));
            }
        }
        Ok(())
    }

    /// Evaluates φ(γ). Used by the grid-search oracles and the generic
    /// solver; the per-slot policies use the closed forms in [`solve_gamma`].
    pub fn eval(&self, gamma: &[f64]) -> f64 {
        match self {
            Utility::Sum => gamma.iter().sum(),
            Utility::ProportionalFair => gamma.iter().map(|&g| g.max(f64::MIN_POSITIVE).ln()).sum(),
            Utility::MaxMin => gamma.iter().copied().fold(f64::INFINITY, f64::min),
            Utility::AlphaFair(a) => {
                if (*a - 1.0).abs() < 1e-12 {
                    gamma.iter().map(|&g| g.max(f64::MIN_POSITIVE).ln()).sum()
                } else {
                    gamma.iter().map(|&g| g.powf(1.0 - a) / (1.0 - a)).sum()
                }
            }
        }
    }
}

/// Parameters of the QF-WPT policy.
#[derive(Debug, Clone, Copy)]
pub struct FairConfig {
    pub p_avg: f64,
    pub p_peak: f64,
    /// Minimum required received power per E-R (pre-conversion, i.e. before
    /// η is applied — the queue update uses the raw quadratic form).
    pub p_min: f64,
    pub v: f64,
    pub eta: f64,
    pub utility: Utility,
}

impl FairConfig {
    pub fn validate(&self) -> Result<(), PolicyError> {
        if !(self.p_avg > 0.0 && self.p_avg <= self.p_peak) {
            return Err(PolicyError::InvalidConfig(format!(
                "need 0 < P_avg <= P_peak, got P_avg={}, P_peak={}",
                self.p_avg, self.p_peak
            )));
        }
        if self.p_min < 0.0 {
            return Err(PolicyError::InvalidConfig("P_min must be nonnegative".into()));
        }
        if !(self.v > 0.0) {
            return Err(PolicyError::InvalidConfig("V must be positive".into()));
        }
        self.utility.validate()
    }
}

/// Queue-weighted channel matrix W' = Σ (Z_i+G_i)·W_i − Z_AP·I. Hermitian,
/// possibly indefinite.
pub fn weighted_channel(w_list: &[CMatrix], queues: &FairQueueSet) -> Result<CMatrix, PolicyError> {
    if w_list.len() != queues.num_ers() {
        return Err(PolicyError::DimensionMismatch {
            expected: format!("{} matrices", queues.num_ers()),
            got: format!("{}", w_list.len()),
        });
    }
    let n = w_list[0].rows();
    let mut sum = CMatrix::zeros(n, n);
    for (w, (g, z)) in w_list.iter().zip(queues.fairness.iter().zip(&queues.min_power)) {
        sum = sum.add(&w.scale(g + z)).map_err(|_| PolicyError::DimensionMismatch {
            expected: format!("{n}x{n}"),
            got: format!("{}x{}", w.rows(), w.cols()),
        })?;
    }
    let shifted = sum.sub(&CMatrix::identity(n).scale(queues.avg_power))?;
    Ok(shifted)
}

/// Two-level decision on the weighted channel: transmit √P_peak·u_max(W')
/// iff λ_max(W') ≥ 0 (inclusive — a zero matrix transmits).
pub fn qf_decide(w_prime: &CMatrix, p_peak: f64) -> Result<BeamDecision, PolicyError> {
    let eig = hermitian_eig(w_prime)?;
    let (lam, u) = eig.top();
    if lam >= 0.0 {
        Ok(BeamDecision::transmit_along(u, p_peak))
    } else {
        Ok(BeamDecision::silent())
    }
}

/// Minimizes −V·φ(γ) + Σ G_i·γ_i over the box [0, upper]^K, in closed form
/// per utility:
///
/// * Sum — γ_i = upper when G_i ≤ V, else 0 (bang-bang; ties take upper).
/// * ProportionalFair — γ_i = min(V/G_i, upper); G_i = 0 gives upper.
/// * MaxMin — all γ_i = upper when Σ G_i ≤ V, else all 0. For a fixed common
///   level t every γ_i above t only adds cost, so the optimum lies on the
///   diagonal and the linear objective (ΣG − V)·t is minimized at an
///   endpoint.
/// * AlphaFair(α) — γ_i = min((V/G_i)^{1/α}, upper).
pub fn solve_gamma(utility: &Utility, v: f64, g: &[f64], upper: f64) -> Result<Vec<f64>, PolicyError> {
    assert!(upper > 0.0, "gamma upper bound must be positive");
    assert!(v > 0.0, "V must be positive");
    utility.validate()?;
    let gamma = match utility {
        Utility::Sum => g.iter().map(|&gi| if gi <= v { upper } else { 0.0 }).collect(),
        Utility::ProportionalFair => {
            g.iter().map(|&gi| if gi <= 0.0 { upper } else { (v / gi).min(upper) }).collect()
        }
        Utility::MaxMin => {
            let total: f64 = g.iter().sum();
            let level = if total <= v { upper } else { 0.0 };
            vec![level; g.len()]
        }
        Utility::AlphaFair(a) => g
            .iter()
            .map(|&gi| if gi <= 0.0 { upper } else { (v / gi).powf(1.0 / a).min(upper) })
            .collect(),
    };
    Ok(gamma)
}

/// Projected-gradient fallback for a caller-supplied concave utility; ascent
/// on V·φ(γ) − Σ G_i·γ_i with backtracking, stopping at 1e-9 relative
/// objective change. The named utilities should use [`solve_gamma`].
pub fn solve_gamma_numeric(
    phi: impl Fn(&[f64]) -> f64,
    v: f64,
    g: &[f64],
    upper: f64,
) -> Vec<f64> {
    let k = g.len();
    let objective = |gamma: &[f64]| v * phi(gamma) - gamma.iter().zip(g).map(|(x, gi)| x * gi).sum::<f64>();
    let mut gamma = vec![0.5 * upper; k];
    let mut cur = objective(&gamma);
    let mut step = upper;
    let h = 1e-7 * upper;
    for _ in 0..10_000 {
        // Central-difference gradient, projected steps with backtracking.
        let mut grad = vec![0.0; k];
        for i in 0..k {
            let mut hi = gamma.clone();
            let mut lo = gamma.clone();
            hi[i] = (gamma[i] + h).min(upper);
            lo[i] = (gamma[i] - h).max(0.0);
            let denom = hi[i] - lo[i];
            grad[i] = if denom > 0.0 { (objective(&hi) - objective(&lo)) / denom } else { 0.0 };
        }
        let mut improved = false;
        while step > 1e-16 * upper {
            let cand: Vec<f64> = gamma
                .iter()
                .zip(&grad)
                .map(|(x, d)| (x + step * d).clamp(0.0, upper))
                .collect();
            let val = objective(&cand);
            if val > cur {
                let rel = (val - cur) / cur.abs().max(1.0);
                gamma = cand;
                cur = val;
                improved = true;
                step *= 1.5;
                if rel < 1e-9 {
                    return gamma;
                }
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    gamma
}

/// Queue updates after a slot. `received` carries the raw quadratic forms
/// xᴴW_i·x (no η — the updates track the algorithmic quantities, conversion
/// efficiency is applied when reporting metrics):
///
/// G_i' = max(G_i + γ_i − Q_i, 0),
/// Z_i' = max(Z_i + P_min − Q_i, 0),
/// Z_AP' = max(Z_AP + tx_power − P_avg, 0).
pub fn update_fair_queues(
    queues: &FairQueueSet,
    gamma: &[f64],
    received: &[f64],
    tx_power: f64,
    cfg: &FairConfig,
) -> FairQueueSet {
    let k = queues.num_ers();
    assert_eq!(gamma.len(), k);
    assert_eq!(received.len(), k);
    let fairness = queues
        .fairness
        .iter()
        .zip(gamma.iter().zip(received))
        .map(|(g, (gam, q))| (g + gam - q).max(0.0))
        .collect();
    let min_power = queues
        .min_power
        .iter()
        .zip(received)
        .map(|(z, q)| (z + cfg.p_min - q).max(0.0))
        .collect();
    let avg_power = (queues.avg_power + tx_power - cfg.p_avg).max(0.0);
    FairQueueSet { fairness, min_power, avg_power }
}
