//! Interval probabilities of 1-D Gaussians and their extremes over boxes of
//! means and variances.

use libm::erfc;
use std::f64::consts::SQRT_2;

use super::moments::AxisMoments;
use crate::error::Result;

/// `P(a ≤ X ≤ b)` for `X ~ N(mean, variance)`.
///
/// Uses complementary error functions on the side of the mean away from
/// the interval so that tail masses keep full relative precision.
pub fn interval_probability(mean: f64, variance: f64, a: f64, b: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let scale = variance.sqrt() * SQRT_2;
    let za = (a - mean) / scale;
    let zb = (b - mean) / scale;
    let p = if za >= 0.0 {
        0.5 * (erfc(za) - erfc(zb))
    } else if zb <= 0.0 {
        0.5 * (erfc(-zb) - erfc(-za))
    } else {
        1.0 - 0.5 * (erfc(-za) + erfc(zb))
    };
    p.clamp(0.0, 1.0)
}

/// `P(X < a or X > b)`, the complement of [`interval_probability`],
/// computed directly from both tails.
pub fn outside_probability(mean: f64, variance: f64, a: f64, b: f64) -> f64 {
    let scale = variance.sqrt() * SQRT_2;
    let za = (a - mean) / scale;
    let zb = (b - mean) / scale;
    if !(b > a) {
        return 1.0;
    }
    (0.5 * erfc(-za) + 0.5 * erfc(zb)).clamp(0.0, 1.0)
}

/// Variance at which the interval probability of a Gaussian centred at
/// `mean` outside `[a, b]` peaks.
fn stationary_variance(mean: f64, a: f64, b: f64) -> Option<f64> {
    let d0 = a - mean;
    let d1 = b - mean;
    if d0 * d1 <= 0.0 {
        return None;
    }
    let ratio = d1 / d0;
    let log = ratio.ln();
    if !(log.is_finite()) || log == 0.0 {
        return None;
    }
    let v = (d1 * d1 - d0 * d0) / (2.0 * log);
    (v.is_finite() && v > 0.0).then_some(v)
}

/// Moment choices attaining the extremes of `P(a ≤ X ≤ b)` over a moment box.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremeCandidates {
    /// Mean maximizing the probability, with the variances to try.
    pub max_mean: f64,
    pub max_variances: Vec<f64>,
    /// Mean minimizing the probability, with the variances to try.
    pub min_mean: f64,
    pub min_variances: Vec<f64>,
}

/// The interval probability is symmetric and unimodal in the mean around
/// the target midpoint for any variance, so the maximizing mean is the
/// midpoint clamped into the box and the minimizing mean the box endpoint
/// farthest from it. In the variance it is decreasing when the mean lies in
/// the target and unimodal otherwise, so the minimum sits at a variance
/// endpoint and the maximum at an endpoint or the interior stationary point.
pub fn extreme_candidates(m: &AxisMoments, a: f64, b: f64) -> ExtremeCandidates {
    let (ml, mh) = m.mean;
    let (vl, vh) = m.variance;
    let mid = 0.5 * (a + b);
    let max_mean = mid.clamp(ml, mh);
    let min_mean = if (ml - mid).abs() >= (mh - mid).abs() { ml } else { mh };
    let mut max_variances = vec![vl, vh];
    if let Some(v) = stationary_variance(max_mean, a, b) {
        if v > vl && v < vh {
            max_variances.push(v);
        }
    }
    ExtremeCandidates {
        max_mean,
        max_variances,
        min_mean,
        min_variances: vec![vl, vh],
    }
}

/// Lower and upper bounds on `P(t̲ ≤ X ≤ t̄)` over all means and variances
/// in the moment box.
pub fn marginal_bounds(m: &AxisMoments, target: (f64, f64)) -> Result<(f64, f64)> {
    m.check()?;
    let (a, b) = target;
    if !(b > a) {
        return Ok((0.0, 0.0));
    }
    let c = extreme_candidates(m, a, b);
    let upper = c
        .max_variances
        .iter()
        .map(|&v| interval_probability(c.max_mean, v, a, b))
        .fold(0.0, f64::max);
    let lower = c
        .min_variances
        .iter()
        .map(|&v| interval_probability(c.min_mean, v, a, b))
        .fold(1.0, f64::min);
    Ok((lower.min(upper), upper))
}

/// Bounds on the probability of leaving the axis domain, via the
/// complement of the extremes of staying inside it.
pub fn sink_bounds(m: &AxisMoments, domain: (f64, f64)) -> Result<(f64, f64)> {
    m.check()?;
    let (a, b) = domain;
    let c = extreme_candidates(m, a, b);
    let lower = c
        .max_variances
        .iter()
        .map(|&v| outside_probability(c.max_mean, v, a, b))
        .fold(1.0, f64::min);
    let upper = c
        .min_variances
        .iter()
        .map(|&v| outside_probability(c.min_mean, v, a, b))
        .fold(0.0, f64::max);
    Ok((lower.min(upper), upper))
}
