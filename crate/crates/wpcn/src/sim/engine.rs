//! The per-slot simulation loop.
//!
//! Decisions are computed from the freshly drawn channel matrices through the
//! small-Gram equivalences (see [`channel::dominant_sum_mode`]): the top
//! eigenpair of Σ c_i·H_iᴴH_i comes from the (K·M)×(K·M) stacked Gram rather
//! than the N×N sum, and the per-E-R uplink modes come from the M×M Grams.
//! These are exact algebraic identities, not approximations; the library
//! tests pin them against the full-matrix operations.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel;
use crate::numerics::{hermitian_eig, CMatrix};
use crate::policy_fair::{self, FairConfig, FairQueueSet, Utility};
use crate::policy_wpt::{self, BeamDecision, PolicyError, WptConfig, WptQueue};
use crate::policy_wpcn::{self, ErCandidate, WpcnConfig, WpcnQueueSet};

use super::config::{PolicySpec, ScenarioConfig};
use super::metrics::{QueueSnapshot, RunMetrics, SlotRecord, ViolationCounts};
use super::SimError;

/// Runs one scenario to completion. Deterministic for a fixed config: the
/// slot loop is sequential and all randomness comes from the seeded
/// generator (stream 0 for channel draws, stream 1 for threshold
/// calibration).
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunMetrics, SimError> {
    cfg.validate()?;
    let topo = &cfg.topology;
    let k = topo.num_ers();

    let regime_warning = matches!(cfg.policy, PolicySpec::QgfIt { .. })
        && topo.eap_antennas < 4 * k * topo.er_antennas;
    if regime_warning {
        eprintln!(
            "warning: N = {} antennas is small for K·M = {} receive antennas; \
             the single-beneficiary beam approximation weakens",
            topo.eap_antennas,
            k * topo.er_antennas
        );
    }

    let mut threshold = None;
    let mut state = match &cfg.policy {
        PolicySpec::Optimal { p_avg, p_peak } => {
            let wpt = WptConfig { p_avg: *p_avg, p_peak: *p_peak, v: 1.0, eta: topo.eta };
            let mut calib_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            calib_rng.set_stream(1);
            let th = policy_wpt::calibrate_threshold(topo, &wpt, cfg.calibration_samples, &mut calib_rng)
                .map_err(|source| SimError::Policy { slot: None, source })?;
            threshold = Some(th);
            PolicyState::Optimal { threshold: th, cfg: wpt }
        }
        PolicySpec::Mdpp { p_avg, p_peak, v } => PolicyState::Mdpp {
            queue: WptQueue::new(),
            cfg: WptConfig { p_avg: *p_avg, p_peak: *p_peak, v: *v, eta: topo.eta },
        },
        PolicySpec::QfWpt { p_avg, p_peak, p_min, v, utility } => PolicyState::QfWpt {
            queues: FairQueueSet::new(k),
            cfg: FairConfig {
                p_avg: *p_avg,
                p_peak: *p_peak,
                p_min: *p_min,
                v: *v,
                eta: topo.eta,
                utility: *utility,
            },
        },
        PolicySpec::QgfIt { p_avg, p_peak, d_min, v, utility } => {
            let wc = WpcnConfig {
                p_avg: *p_avg,
                p_peak: *p_peak,
                d_min: *d_min,
                v: *v,
                noise_variance: topo.noise_variance,
            };
            let d_max = policy_wpcn::uplink_rate_cap(topo.er_antennas, *p_peak, topo.noise_variance);
            PolicyState::QgfIt { queues: WpcnQueueSet::new(k, *d_min), cfg: wc, utility: *utility, d_max }
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(0);

    let p_avg = cfg.policy.p_avg();
    let mut sum_spent = 0.0;
    let mut sum_received = vec![0.0; k];
    let mut sum_bits = vec![0.0; k];
    let mut transmit_slots = 0usize;
    let mut last_bad_prefix = 0usize;
    let mut violations = ViolationCounts::default();
    let mut max_kkt = 0.0f64;
    let mut trace = cfg.trace.then(|| Vec::with_capacity(cfg.horizon));

    let wants_uplink = matches!(cfg.policy, PolicySpec::QgfIt { .. });
    for slot in 0..cfg.horizon {
        let h = channel::draw_downlink(topo, &mut rng)
            .map_err(|source| SimError::Channel { slot: Some(slot), source })?;
        // Uplink channels mirror `sample_slot`: derived by reciprocity, or an
        // independent draw from the same generator stream.
        let h_up: Option<Vec<CMatrix>> = if wants_uplink {
            let ups = if topo.reciprocal_uplink {
                h.iter().map(|hi| channel::uplink_from_downlink(hi, topo.noise_variance)).collect()
            } else {
                channel::draw_downlink(topo, &mut rng)
                    .map_err(|source| SimError::Channel { slot: Some(slot), source })?
                    .iter()
                    .map(|hi| channel::uplink_from_downlink(hi, topo.noise_variance))
                    .collect()
            };
            Some(ups)
        } else {
            None
        };
        let out = state
            .step(&h, h_up.as_deref())
            .map_err(|source| SimError::Policy { slot: Some(slot), source })?;

        if out.tx_power > 0.0 {
            transmit_slots += 1;
        }
        if out.peak_violation {
            violations.peak_power += 1;
        }
        if out.causality_violation {
            violations.energy_causality += 1;
        }
        if out.tau_violation {
            violations.tau_sum += 1;
        }
        max_kkt = max_kkt.max(out.kkt_max);

        let spent = out.tau0 * out.tx_power;
        sum_spent += spent;
        let prefix = (slot + 1) as f64;
        if (sum_spent / prefix - p_avg).abs() > 0.001 * p_avg {
            last_bad_prefix = slot + 1;
        }

        for i in 0..k {
            sum_received[i] += topo.eta * out.tau0 * out.received_raw[i];
            sum_bits[i] += out.throughput_bits[i];
        }

        if let Some(rows) = trace.as_mut() {
            rows.push(SlotRecord {
                slot,
                tx_power: out.tx_power,
                tau0: out.tau0,
                received: out
                    .received_raw
                    .iter()
                    .map(|q| topo.eta * out.tau0 * q)
                    .collect(),
                throughput: out.throughput_bits.clone(),
                z_ap: state.z_ap(),
                z: state.z_vec(),
                g: state.g_vec(),
            });
        }
    }

    let lf = cfg.horizon as f64;
    let received_power: Vec<f64> = sum_received.iter().map(|s| s / lf).collect();
    let total_received_power = received_power.iter().sum();
    let convergence_time =
        if last_bad_prefix == cfg.horizon { cfg.horizon + 1 } else { last_bad_prefix + 1 };

    Ok(RunMetrics {
        horizon: cfg.horizon,
        received_power,
        total_received_power,
        avg_tx_power: sum_spent / lf,
        throughput: sum_bits.iter().map(|s| s / lf).collect(),
        transmit_fraction: transmit_slots as f64 / lf,
        final_queues: state.snapshot(),
        convergence_time,
        converged: last_bad_prefix < cfg.horizon,
        violations,
        max_kkt_residual: max_kkt,
        regime_warning,
        threshold,
        trace,
    })
}

/// Runs independent scenarios concurrently. Results come back in input
/// order, so aggregation is deterministic regardless of thread scheduling.
pub fn run_many(cfgs: &[ScenarioConfig]) -> Result<Vec<RunMetrics>, SimError> {
    cfgs.par_iter().map(run_scenario).collect()
}

struct SlotOutcome {
    tx_power: f64,
    tau0: f64,
    received_raw: Vec<f64>,
    throughput_bits: Vec<f64>,
    peak_violation: bool,
    causality_violation: bool,
    tau_violation: bool,
    kkt_max: f64,
}

impl SlotOutcome {
    fn silent(k: usize, tau0: f64) -> Self {
        Self {
            tx_power: 0.0,
            tau0,
            received_raw: vec![0.0; k],
            throughput_bits: vec![0.0; k],
            peak_violation: false,
            causality_violation: false,
            tau_violation: false,
            kkt_max: 0.0,
        }
    }
}

enum PolicyState {
    Optimal { threshold: f64, cfg: WptConfig },
    Mdpp { queue: WptQueue, cfg: WptConfig },
    QfWpt { queues: FairQueueSet, cfg: FairConfig },
    QgfIt { queues: WpcnQueueSet, cfg: WpcnConfig, utility: Utility, d_max: f64 },
}

impl PolicyState {
    fn step(
        &mut self,
        h: &[CMatrix],
        h_up: Option<&[CMatrix]>,
    ) -> Result<SlotOutcome, PolicyError> {
        match self {
            PolicyState::Optimal { threshold, cfg } => {
                let decision = decide_sum_mode(h, &vec![1.0; h.len()], *threshold, cfg.p_peak)?;
                Ok(wpt_outcome(h, &decision, cfg.p_peak))
            }
            PolicyState::Mdpp { queue, cfg } => {
                let decision = decide_sum_mode(h, &vec![1.0; h.len()], queue.backlog / cfg.v, cfg.p_peak)?;
                let out = wpt_outcome(h, &decision, cfg.p_peak);
                *queue = policy_wpt::update_queue(queue, decision.tx_power, cfg.p_avg);
                Ok(out)
            }
            PolicyState::QfWpt { queues, cfg } => {
                // λ_max(Σ(G_i+Z_i)W_i − Z_AP·I) = λ_max(Σ(G_i+Z_i)W_i) − Z_AP,
                // with the same eigenvector.
                let weights: Vec<f64> =
                    (0..h.len()).map(|i| queues.fairness[i] + queues.min_power[i]).collect();
                let refs: Vec<&CMatrix> = h.iter().collect();
                let (lam, u) = channel::dominant_sum_mode(&refs, &weights)?;
                let decision = if lam - queues.avg_power >= 0.0 {
                    BeamDecision::transmit_along(&u, cfg.p_peak)
                } else {
                    BeamDecision::silent()
                };
                let out = wpt_outcome(h, &decision, cfg.p_peak);
                let gamma = policy_fair::solve_gamma(&cfg.utility, cfg.v, &queues.fairness, cfg.p_peak)?;
                *queues =
                    policy_fair::update_fair_queues(queues, &gamma, &out.received_raw, decision.tx_power, cfg);
                Ok(out)
            }
            PolicyState::QgfIt { queues, cfg, utility, d_max } => {
                let ups = h_up.expect("uplink channels supplied for the joint policy");
                let out = qgf_step(h, ups, queues, cfg, utility, *d_max)?;
                Ok(out)
            }
        }
    }

    fn z_ap(&self) -> f64 {
        match self {
            PolicyState::Optimal { .. } => 0.0,
            PolicyState::Mdpp { queue, .. } => queue.backlog,
            PolicyState::QfWpt { queues, .. } => queues.avg_power,
            PolicyState::QgfIt { queues, .. } => queues.avg_power,
        }
    }

    fn z_vec(&self) -> Vec<f64> {
        match self {
            PolicyState::Optimal { .. } | PolicyState::Mdpp { .. } => vec![],
            PolicyState::QfWpt { queues, .. } => queues.min_power.clone(),
            PolicyState::QgfIt { queues, .. } => queues.min_rate.clone(),
        }
    }

    fn g_vec(&self) -> Vec<f64> {
        match self {
            PolicyState::Optimal { .. } | PolicyState::Mdpp { .. } => vec![],
            PolicyState::QfWpt { queues, .. } => queues.fairness.clone(),
            PolicyState::QgfIt { queues, .. } => queues.fairness.clone(),
        }
    }

    fn snapshot(&self) -> QueueSnapshot {
        QueueSnapshot { z_ap: self.z_ap(), z: self.z_vec(), g: self.g_vec() }
    }
}

/// Threshold decision on the weighted channel sum via the stacked Gram.
fn decide_sum_mode(
    h: &[CMatrix],
    weights: &[f64],
    threshold: f64,
    p_peak: f64,
) -> Result<BeamDecision, PolicyError> {
    let refs: Vec<&CMatrix> = h.iter().collect();
    let (lam, u) = channel::dominant_sum_mode(&refs, weights)?;
    if lam >= threshold {
        Ok(BeamDecision::transmit_along(&u, p_peak))
    } else {
        Ok(BeamDecision::silent())
    }
}

/// Per-E-R harvested quadratic forms xᴴW_i·x = ‖H_i·x‖² and the peak check.
fn wpt_outcome(h: &[CMatrix], decision: &BeamDecision, p_peak: f64) -> SlotOutcome {
    let k = h.len();
    if !decision.transmit {
        return SlotOutcome::silent(k, 1.0);
    }
    let received_raw: Vec<f64> = h
        .iter()
        .map(|hi| {
            hi.mul_vec(&decision.beam)
                .expect("beam length matches channel columns")
                .iter()
                .map(|z| z.norm_sqr())
                .sum()
        })
        .collect();
    SlotOutcome {
        tx_power: decision.tx_power,
        tau0: 1.0,
        received_raw,
        throughput_bits: vec![0.0; k],
        peak_violation: decision.tx_power > p_peak + 1e-12,
        causality_violation: false,
        tau_violation: false,
        kkt_max: 0.0,
    }
}

fn qgf_step(
    h: &[CMatrix],
    h_up: &[CMatrix],
    queues: &mut WpcnQueueSet,
    cfg: &WpcnConfig,
    utility: &Utility,
    d_max: f64,
) -> Result<SlotOutcome, PolicyError> {
    let k = h.len();

    // Per-E-R modes from the M×M Grams: H·Hᴴ carries the nonzero spectrum of
    // W = HᴴH (for λ_{W,1} and the beam direction), and H'ᴴH' carries the
    // squared singular values and right singular vectors of the uplink.
    let mut candidates: Vec<ErCandidate> = Vec::with_capacity(k);
    let mut down_eigs = Vec::with_capacity(k);
    for (i, hi) in h.iter().enumerate() {
        let down_eig = hermitian_eig(&hi.gram_right())?;
        let weight = queues.weight(i);
        let cand = if weight > 0.0 {
            let lambda_w1 = down_eig.eigenvalues[0].max(0.0);
            let up_eig = hermitian_eig(&h_up[i].gram())?;
            let (thetas, right) = scaled_uplink_modes(&up_eig.eigenvalues, &up_eig.eigenvectors, weight);
            policy_wpcn::er_candidate_from_modes(i, &thetas, &right, lambda_w1, weight, queues.avg_power, cfg)
        } else {
            policy_wpcn::er_candidate_from_modes(i, &[], &CMatrix::zeros(0, 0), 0.0, 0.0, queues.avg_power, cfg)
        };
        candidates.push(cand);
        down_eigs.push(down_eig);
    }
    let kkt_max =
        candidates.iter().filter(|c| c.feasible).map(|c| c.kkt_residual).fold(0.0, f64::max);

    let chosen = policy_wpcn::select_candidate(&candidates);
    let mut out = match chosen {
        None => SlotOutcome::silent(k, 0.0),
        Some(ind) => {
            let cand = &candidates[ind];
            // Beam toward the chosen E-R: u = Hᴴw₁/‖Hᴴw₁‖ with w₁ the top
            // eigenvector of H·Hᴴ.
            let w1 = &down_eigs[ind].eigenvectors[0];
            let mut u = h[ind].adjoint().mul_vec(w1)?;
            let norm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in &mut u {
                *z /= norm;
            }
            let x: Vec<Complex64> = u.iter().map(|z| z * cfg.p_peak.sqrt()).collect();
            let tx_power: f64 = x.iter().map(|z| z.norm_sqr()).sum();

            let received_raw: Vec<f64> = h
                .iter()
                .map(|hi| hi.mul_vec(&x).expect("dims").iter().map(|z| z.norm_sqr()).sum())
                .collect();
            let mut throughput_bits = vec![0.0; k];
            throughput_bits[ind] = cand.throughput;

            let s_trace = cand.s_cov.as_ref().expect("feasible candidate has covariance").trace().re;
            let causality_violation = cand.tau_u * s_trace > cand.tau0 * received_raw[ind] + 1e-9;
            let tau_violation = (cand.tau0 + cand.tau_u - 1.0).abs() > 1e-12;

            SlotOutcome {
                tx_power,
                tau0: cand.tau0,
                received_raw,
                throughput_bits,
                peak_violation: tx_power > cfg.p_peak + 1e-12,
                causality_violation,
                tau_violation,
                kkt_max,
            }
        }
    };
    out.kkt_max = kkt_max;

    let gamma = policy_wpcn::solve_gamma_it(utility, cfg.v, &queues.fairness, d_max)?;
    *queues = policy_wpcn::update_wpcn_queues(
        queues,
        &gamma,
        &out.throughput_bits,
        out.tau0,
        out.tx_power,
        cfg,
    );
    Ok(out)
}

/// Modes of H'·√weight from the eigendecomposition of H'ᴴH': θ_j = √(w·ν_j)
/// with V the eigenvectors, truncated at the SVD rank tolerance.
fn scaled_uplink_modes(
    nu: &[f64],
    vectors: &[Vec<Complex64>],
    weight: f64,
) -> (Vec<f64>, CMatrix) {
    let nu_max = nu.first().copied().unwrap_or(0.0).max(0.0);
    let theta_max = (weight * nu_max).sqrt();
    let cut = crate::numerics::RANK_REL_TOL * theta_max;
    let mut thetas = Vec::new();
    let mut cols = Vec::new();
    for (n, v) in nu.iter().zip(vectors) {
        let theta = (weight * n.max(0.0)).sqrt();
        if theta <= 0.0 || theta < cut {
            break;
        }
        thetas.push(theta);
        cols.push(v.clone());
    }
    let right = if cols.is_empty() { CMatrix::zeros(0, 0) } else { CMatrix::from_columns(&cols) };
    (thetas, right)
}
