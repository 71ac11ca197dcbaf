//! Network topology, path loss, and per-timeslot channel state sampling.
//!
//! Channels are i.i.d. across timeslots (Rayleigh fading): every entry of the
//! downlink matrix H_i is circularly-symmetric complex Gaussian with variance
//! equal to the path gain of E-R i. All randomness flows through one explicit
//! seeded generator per run.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{hermitian_eig, CMatrix, NumericsError};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Static description of the network: node positions, antenna counts, RF
/// parameters, and the energy conversion efficiency of the receivers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    /// E-AP position in meters.
    pub eap_position: [f64; 2],
    /// One position per E-R, meters.
    pub er_positions: Vec<[f64; 2]>,
    /// E-AP antenna count N.
    pub eap_antennas: usize,
    /// Per-E-R antenna count M (N > M required).
    pub er_antennas: usize,
    /// Carrier frequency in Hz.
    pub carrier_hz: f64,
    /// Path loss exponent.
    pub pathloss_exponent: f64,
    /// Noise variance σ² in watts.
    pub noise_variance: f64,
    /// Energy conversion efficiency η ∈ [0, 1).
    pub eta: f64,
    /// Uplink channels derived from the downlink by reciprocity (Hᴴ/σ).
    /// When false, uplinks are drawn independently with the same statistics.
    #[serde(default = "default_true")]
    pub reciprocal_uplink: bool,
}

fn default_true() -> bool {
    true
}

impl Topology {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.er_positions.is_empty() {
            return Err(ChannelError::InvalidTopology("at least one E-R required".into()));
        }
        if self.er_antennas < 1 || self.eap_antennas <= self.er_antennas {
            return Err(ChannelError::InvalidTopology(format!(
                "antenna counts must satisfy N > M >= 1, got N={}, M={}",
                self.eap_antennas, self.er_antennas
            )));
        }
        if !(self.carrier_hz > 0.0) {
            return Err(ChannelError::InvalidTopology("carrier frequency must be positive".into()));
        }
        if !(self.noise_variance > 0.0) {
            return Err(ChannelError::InvalidTopology("noise variance must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.eta) {
            return Err(ChannelError::InvalidTopology(format!("eta must be in [0,1), got {}", self.eta)));
        }
        for i in 0..self.num_ers() {
            let d = self.er_distance(i);
            if !(d > 0.0) {
                return Err(ChannelError::NonPositiveDistance(d));
            }
        }
        Ok(())
    }

    pub fn num_ers(&self) -> usize {
        self.er_positions.len()
    }

    pub fn er_distance(&self, i: usize) -> f64 {
        let dx = self.er_positions[i][0] - self.eap_position[0];
        let dy = self.er_positions[i][1] - self.eap_position[1];
        (dx * dx + dy * dy).sqrt()
    }

    /// Linear path gain of E-R i.
    pub fn er_gain(&self, i: usize) -> Result<f64, ChannelError> {
        path_loss(self.er_distance(i), self)
    }
}

/// Linear power gain at the given distance: free-space gain at 1 m for the
/// carrier, G₀ = (c/(4π·f_c))², rolled off as d^(−exponent).
pub fn path_loss(distance_m: f64, topo: &Topology) -> Result<f64, ChannelError> {
    if !(distance_m > 0.0) {
        return Err(ChannelError::NonPositiveDistance(distance_m));
    }
    let g0 = (SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * topo.carrier_hz)).powi(2);
    Ok(g0 * distance_m.powf(-topo.pathloss_exponent))
}

/// Channel state of one timeslot.
#[derive(Debug, Clone)]
pub struct SlotCsi {
    /// Downlink matrices H_i, M×N.
    pub downlink: Vec<CMatrix>,
    /// Uplink matrices H'_i, N×M (noise-normalized under reciprocity).
    pub uplink: Vec<CMatrix>,
    /// Gram matrices W_i = H_iᴴ·H_i, N×N Hermitian PSD.
    pub gram: Vec<CMatrix>,
}

/// Draws the K downlink matrices for one slot. Each entry of H_i is
/// CN(0, g_i) with g_i the path gain of E-R i.
pub fn draw_downlink(topo: &Topology, rng: &mut impl Rng) -> Result<Vec<CMatrix>, ChannelError> {
    let m = topo.er_antennas;
    let n = topo.eap_antennas;
    let mut out = Vec::with_capacity(topo.num_ers());
    for i in 0..topo.num_ers() {
        let scale = (topo.er_gain(i)? / 2.0).sqrt();
        let data: Vec<Complex64> = (0..m * n)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re * scale, im * scale)
            })
            .collect();
        out.push(CMatrix::new(m, n, data).expect("finite gaussian draw"));
    }
    Ok(out)
}

/// Uplink channel from a downlink matrix under reciprocity, Hᴴ/σ. The 1/σ
/// factor folds the receiver noise into the channel so the log-det rate
/// formula needs no explicit noise term.
pub fn uplink_from_downlink(h: &CMatrix, noise_variance: f64) -> CMatrix {
    h.adjoint().scale(1.0 / noise_variance.sqrt())
}

/// Samples the full channel state for one timeslot: downlink draws, uplinks
/// (reciprocal or independent), and the Gram matrices W_i.
pub fn sample_slot(topo: &Topology, rng: &mut impl Rng) -> Result<SlotCsi, ChannelError> {
    let downlink = draw_downlink(topo, rng)?;
    let uplink = if topo.reciprocal_uplink {
        downlink.iter().map(|h| uplink_from_downlink(h, topo.noise_variance)).collect()
    } else {
        let fresh = draw_downlink(topo, rng)?;
        fresh.iter().map(|h| uplink_from_downlink(h, topo.noise_variance)).collect()
    };
    let gram = downlink.iter().map(|h| h.gram()).collect();
    Ok(SlotCsi { downlink, uplink, gram })
}

/// Power harvested by a receiver with Gram matrix W from transmit vector x:
/// η·xᴴWx. Any timeslot split factor is applied by the caller.
pub fn received_power(w: &CMatrix, x: &[Complex64], eta: f64) -> Result<f64, ChannelError> {
    if w.rows() != w.cols() || w.cols() != x.len() {
        return Err(ChannelError::DimensionMismatch {
            expected: format!("{}x{} matrix with vector of length {}", x.len(), x.len(), x.len()),
            got: format!("{}x{} with {}", w.rows(), w.cols(), x.len()),
        });
    }
    Ok(eta * w.hermitian_quadratic_form(x)?)
}

/// Top eigenpair of the weighted Gram sum Σ c_i·H_iᴴH_i without forming the
/// N×N matrix: the sum equals BᴴB for the stacked matrix B = [√c_i·H_i], and
/// the eigenproblem of BᴴB reduces to the (ΣM)×(ΣM) Gram BBᴴ, which is much
/// smaller when the E-AP has many antennas. Exact, not approximate.
///
/// Weights must be nonnegative. Returns (λ_max, unit eigenvector of length N).
/// A zero stack yields (0, e₁), matching the eigenvector convention of
/// `hermitian_eig` on a zero matrix.
pub fn dominant_sum_mode(
    h_list: &[&CMatrix],
    weights: &[f64],
) -> Result<(f64, Vec<Complex64>), ChannelError> {
    assert_eq!(h_list.len(), weights.len());
    assert!(!h_list.is_empty());
    let n = h_list[0].cols();
    let blocks: Vec<(&CMatrix, f64)> = h_list.iter().copied().zip(weights.iter().copied()).collect();
    let stacked = CMatrix::vstack_scaled(&blocks)?;
    let small = stacked.gram_right();
    let eig = hermitian_eig(&small)?;
    let (lam, u_small) = eig.top();
    let lam = lam.max(0.0);
    if lam <= 0.0 {
        let mut e1 = vec![Complex64::new(0.0, 0.0); n];
        e1[0] = Complex64::new(1.0, 0.0);
        return Ok((0.0, e1));
    }
    // Map back: v = Bᴴu/‖Bᴴu‖ is the top eigenvector of BᴴB.
    let mut v = stacked.adjoint().mul_vec(u_small)?;
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    Ok((lam, v))
}
