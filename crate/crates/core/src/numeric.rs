//! Shared numeric helpers.

use crate::error::{Error, Result};

/// Natural log of the binomial coefficient C(n, r).
///
/// Summed as `Σ ln((n - m + i) / i)` over `i = 1..=m` with `m = min(r, n - r)`,
/// so `log_choose(n, r) == log_choose(n, n - r)` bit for bit.
pub fn log_choose(n: u64, r: u64) -> Result<f64> {
    if r > n {
        return Err(Error::OutOfRange { n, r });
    }
    let m = r.min(n - r);
    let base = (n - m) as f64;
    Ok((1..=m).map(|i| ((base + i as f64) / i as f64).ln()).sum())
}

/// Standard normal CDF, Φ(z) = erfc(-z/√2) / 2.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}

/// `ln(Σ exp(x_i))` without overflow; `-inf` for an empty input.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Sample median; mean of the two central order statistics for even lengths.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len().is_multiple_of(2) {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    })
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}
