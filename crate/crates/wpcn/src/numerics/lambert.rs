//! Principal branch of the Lambert W function.
//!
//! Halley iteration from an asymptotic initial guess; close to the branch
//! point x = −1/e the iteration stagnates (the derivative of w·eʷ vanishes),
//! so a series in p = √(2(1+e·x)) is used there instead.

use super::NumericsError;

/// Slack below −1/e that is still treated as the branch point.
const BRANCH_SLACK: f64 = 1e-14;

/// Solves `w·eʷ = x` on the principal branch (w ≥ −1) to a defect of
/// `|w·eʷ − x| ≤ 1e-12·max(1,|x|)`. Defined for x ≥ −1/e.
pub fn lambert_w0(x: f64) -> Result<f64, NumericsError> {
    if !x.is_finite() {
        return Err(NumericsError::NonFinite);
    }
    let branch = -(-1.0f64).exp(); // −1/e
    if x < branch - BRANCH_SLACK {
        return Err(NumericsError::DomainError { x });
    }
    if x <= branch {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }

    // 2(1 + e·x) = 2·e·(x + 1/e); p → 0 at the branch point.
    let p2 = 2.0 * (1.0 + std::f64::consts::E * x);
    if p2 < 1e-6 {
        // So close to the branch point that Halley cannot improve on the
        // series (truncation error O(p⁶) is below the defect target).
        return Ok(branch_series(p2.sqrt()));
    }

    let mut w = initial_guess(x, p2);
    for _ in 0..40 {
        let ew = w.exp();
        let f = w * ew - x;
        if f.abs() <= 1e-13 * x.abs().max(1.0) {
            return Ok(w.max(-1.0));
        }
        // Halley step: f' = eʷ(1+w), f'' = eʷ(2+w).
        let d1 = ew * (1.0 + w);
        let step = f / (d1 - f * (2.0 + w) / (2.0 * (1.0 + w)));
        let next = w - step;
        if next < -1.0 {
            // Fell off the principal branch; restart from the series side.
            w = branch_series(p2.sqrt());
        } else {
            if (next - w).abs() <= f64::EPSILON * w.abs().max(1.0) {
                return Ok(next.max(-1.0));
            }
            w = next;
        }
    }
    Ok(w.max(-1.0))
}

fn initial_guess(x: f64, p2: f64) -> f64 {
    if x > std::f64::consts::E {
        // w ≈ ln x − ln ln x for large x.
        let lx = x.ln();
        lx - lx.ln()
    } else if x > -0.2 {
        (1.0 + x).ln()
    } else {
        branch_series(p2.sqrt())
    }
}

/// Series around the branch point: w = −1 + p − p²/3 + 11p³/72 − 43p⁴/540
/// + 769p⁵/17280, with p = √(2(1+e·x)).
fn branch_series(p: f64) -> f64 {
    -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0 + p * (769.0 / 17280.0)))))
}
