//! Empirical quantiles and the water-filling mode allocation.

use super::NumericsError;

/// Nearest-rank empirical quantile: with the samples sorted ascending, the
/// value at index ceil(q·n), clamped to [1, n]; q = 0 returns the minimum.
pub fn empirical_quantile(samples: &[f64], q: f64) -> Result<f64, NumericsError> {
    if samples.is_empty() {
        return Err(NumericsError::EmptySamples);
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(NumericsError::NonFinite);
    }
    assert!((0.0..=1.0).contains(&q), "quantile fraction out of [0,1]");

    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let t = q * n as f64;
    let mut idx = t.ceil();
    // Undo a ceil caused purely by floating-point noise (e.g. 0.8·100 =
    // 80.000000000000014 must index rank 80, not 81).
    if idx - t > 1.0 - 1e-9 {
        idx -= 1.0;
    }
    let rank = (idx as usize).clamp(1, n);
    Ok(sorted[rank - 1])
}

/// Water-filling allocation over channel modes: ψ_j = max(0, 1 − δ/θ_j²)
/// for singular values θ_j and water level δ.
pub fn waterfill_alloc(thetas: &[f64], delta: f64) -> Vec<f64> {
    assert!(delta > 0.0, "water level must be positive");
    assert!(thetas.iter().all(|&t| t > 0.0), "singular values must be positive");
    thetas.iter().map(|&t| (1.0 - delta / (t * t)).max(0.0)).collect()
}
