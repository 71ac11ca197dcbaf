//! Shipped example scenarios.
//!
//! Common RF parameters across all presets: 2.4 GHz carrier, path loss
//! exponent 3, −100 dBm noise, η = 0.5, P_peak = 2 W, free-space reference
//! gain at 1 m.
//!
//! * [`baseline_topology`] — two 4-antenna E-Rs at (1.2, 1.2) and (2√2, 0)
//!   with a 30-antenna E-AP; the setting for the optimal/MDPP comparisons.
//! * [`fairness_topology`] — the same nodes with the farther E-R moved so
//!   that its distance is `dr` times the closer one's; the near–far sweep
//!   for the fairness policies.
//! * [`uplink_topology`] — ten single-antenna E-Rs spread uniformly on a 3 m
//!   circle; the joint power/information setting.

use crate::channel::Topology;
use crate::policy_fair::Utility;

use super::config::{PolicySpec, ScenarioConfig};

pub const P_PEAK: f64 = 2.0;
pub const NOISE_W: f64 = 1e-13; // −100 dBm
pub const ETA: f64 = 0.5;

fn base_topology(er_positions: Vec<[f64; 2]>, eap_antennas: usize, er_antennas: usize) -> Topology {
    Topology {
        eap_position: [0.0, 0.0],
        er_positions,
        eap_antennas,
        er_antennas,
        carrier_hz: 2.4e9,
        pathloss_exponent: 3.0,
        noise_variance: NOISE_W,
        eta: ETA,
        reciprocal_uplink: true,
    }
}

/// Two E-Rs at (1.2, 1.2) and (2√2, 0); N = 30, M = 4.
pub fn baseline_topology() -> Topology {
    base_topology(vec![[1.2, 1.2], [2.0 * std::f64::consts::SQRT_2, 0.0]], 30, 4)
}

/// Near–far sweep: the closer E-R stays at (1.2, 1.2) (distance ≈ 1.697 m)
/// and the farther one sits on the x-axis at `dr` times that distance.
pub fn fairness_topology(dr: f64) -> Topology {
    assert!(dr >= 1.0, "distance ratio must be at least 1");
    let d_close = (1.2f64 * 1.2 + 1.2 * 1.2).sqrt();
    base_topology(vec![[1.2, 1.2], [dr * d_close, 0.0]], 30, 4)
}

/// Ten single-antenna E-Rs uniformly placed on a circle of radius 3 m;
/// N = 30, M = 1.
pub fn uplink_topology() -> Topology {
    let k = 10;
    let positions = (0..k)
        .map(|i| {
            let angle = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
            [3.0 * angle.cos(), 3.0 * angle.sin()]
        })
        .collect();
    base_topology(positions, 30, 1)
}

fn scenario(topology: Topology, policy: PolicySpec, horizon: usize, seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        topology,
        policy,
        horizon,
        seed,
        calibration_samples: 100_000,
        trace: false,
        output: None,
    }
}

/// Baseline topology under the calibrated threshold policy.
pub fn optimal_scenario(p_avg: f64, horizon: usize, seed: u64) -> ScenarioConfig {
    scenario(baseline_topology(), PolicySpec::Optimal { p_avg, p_peak: P_PEAK }, horizon, seed)
}

/// Baseline topology under MDPP.
pub fn mdpp_scenario(p_avg: f64, v: f64, horizon: usize, seed: u64) -> ScenarioConfig {
    scenario(baseline_topology(), PolicySpec::Mdpp { p_avg, p_peak: P_PEAK, v }, horizon, seed)
}

/// Near–far topology under MDPP (the no-fairness reference in the sweep).
pub fn mdpp_fairness_scenario(dr: f64, p_avg: f64, v: f64, horizon: usize, seed: u64) -> ScenarioConfig {
    scenario(fairness_topology(dr), PolicySpec::Mdpp { p_avg, p_peak: P_PEAK, v }, horizon, seed)
}

/// Near–far topology under the fair policy with the given utility.
pub fn fair_scenario(
    dr: f64,
    utility: Utility,
    p_avg: f64,
    v: f64,
    horizon: usize,
    seed: u64,
) -> ScenarioConfig {
    scenario(
        fairness_topology(dr),
        PolicySpec::QfWpt { p_avg, p_peak: P_PEAK, p_min: 0.0, v, utility },
        horizon,
        seed,
    )
}

/// Ten-receiver uplink topology under the joint policy with sum utility and
/// P_avg = 0.03 W.
pub fn uplink_scenario(d_min: f64, v: f64, horizon: usize, seed: u64) -> ScenarioConfig {
    scenario(
        uplink_topology(),
        PolicySpec::QgfIt { p_avg: 0.03, p_peak: P_PEAK, d_min, v, utility: Utility::Sum },
        horizon,
        seed,
    )
}
