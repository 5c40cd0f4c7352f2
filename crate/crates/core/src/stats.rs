//! Summary statistics over disorder ensembles.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Mean, minimum and a quantile of per-sample fidelities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityStats {
    pub samples: usize,
    pub mean: f64,
    pub minimum: f64,
    pub quantile_level: f64,
    pub quantile_value: f64,
    pub seed: u64,
}

impl FidelityStats {
    /// Summarizes samples given in index order. The mean uses pairwise
    /// summation in that order, so the result does not depend on how the
    /// samples were produced.
    pub fn from_samples(samples: &[f64], quantile_level: f64, seed: u64) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid("need at least one sample"));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(FidelityStats {
            samples: samples.len(),
            mean: pairwise_sum(samples) / samples.len() as f64,
            minimum: sorted[0],
            quantile_level,
            quantile_value: quantile_sorted(&sorted, quantile_level)?,
            seed,
        })
    }
}

/// Linear interpolation between closest ranks on ascending data:
/// position `h = (M - 1) q`, value `x[⌊h⌋] + (h - ⌊h⌋)(x[⌊h⌋+1] - x[⌊h⌋])`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(invalid("quantile of an empty sample"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(invalid(format!("quantile level {q} outside [0, 1]")));
    }
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

pub fn quantile(samples: &[f64], q: f64) -> Result<f64> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_sorted(&sorted, q)
}

pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Probability that at least one of `k` independent samples lands above the
/// `level` quantile: `1 - level^k` (upper quartile: `1 - (3/4)^k`).
pub fn selection_probability(k: u32, level: f64) -> Result<f64> {
    if k == 0 {
        return Err(invalid("need at least one sample"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(invalid(format!("quantile level {level} outside (0, 1)")));
    }
    Ok(1.0 - level.powi(k as i32))
}
