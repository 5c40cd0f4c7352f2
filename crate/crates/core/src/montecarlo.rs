//! Monte Carlo disorder ensembles and two-parameter disorder sweeps.
//!
//! Each sample draws a disordered chain, diagonalizes it, rebuilds the
//! windowed propagator at the chosen time and scores the per-instance optimal
//! encoding. Samples are evaluated in parallel but collected in index order,
//! so the statistics are bit-identical for any worker count.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{Chain, TransferWindow};
use crate::disorder::{sample_disordered_chain, DisorderSpec};
use crate::encoding::{fidelity_single, leading_singular_value};
use crate::error::{invalid, Result};
use crate::models::{pst_time_from_spectrum, uniform_peak_hint};
use crate::peak::{global_max, SCAN_STEP};
use crate::spectral::{eigendecompose, Eigensystem};
use crate::stats::FidelityStats;

pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_QUANTILE: f64 = 0.75;

/// When the state is read out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimePolicy {
    /// A given time.
    Fixed(f64),
    /// The best time for the disorder-free chain, used for every sample.
    Ideal,
    /// Re-optimized for every disordered sample.
    PerSample,
}

/// Encoding window sizes at the two ends plus the read-out time policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowPolicy {
    pub input_size: usize,
    pub output_size: usize,
    pub time: TimePolicy,
}

impl WindowPolicy {
    pub fn symmetric(size: usize, time: TimePolicy) -> Self {
        WindowPolicy {
            input_size: size,
            output_size: size,
            time,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.input_size == 0 || self.output_size == 0 {
            return Err(invalid("window sizes must be at least 1"));
        }
        if self.input_size > n || self.output_size > n {
            return Err(invalid(format!(
                "window sizes {}/{} exceed chain length {n}",
                self.input_size, self.output_size
            )));
        }
        if let TimePolicy::Fixed(t) = self.time {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(invalid(format!(
                    "fixed time must be finite and >= 0, got {t}"
                )));
            }
        }
        Ok(())
    }

    fn sites(&self, n: usize) -> Vec<usize> {
        TransferWindow::ends(n, self.input_size, self.output_size, 0.0)
            .map(|w| w.sites())
            .unwrap_or_default()
    }
}

/// Upper end of the read-out time search for a chain of length `n`.
pub fn search_horizon(n: usize) -> f64 {
    1.5 * uniform_peak_hint(n)
}

/// Best read-out time for a chain and window: the transfer time if the chain
/// has perfect transfer, otherwise the largest leading singular value over
/// `[0, search_horizon(N)]`. Returns `(time, λ₁)`.
pub fn best_time(chain: &Chain, input_size: usize, output_size: usize) -> Result<(f64, f64)> {
    let n = chain.len();
    let h = chain.single_excitation_matrix();
    let full = eigendecompose(&h)?;
    let window = TransferWindow::ends(n, input_size, output_size, 0.0)?;
    if let Ok(t) = pst_time_from_spectrum(&full) {
        return Ok((
            t,
            leading_singular_value(&full, &window.at_time(t))?.min(1.0),
        ));
    }
    best_time_for(&full, &window)
}

fn best_time_for(eig: &Eigensystem, window: &TransferWindow) -> Result<(f64, f64)> {
    let horizon = search_horizon(eig.n());
    let objective = |t: f64| leading_singular_value(eig, &window.at_time(t)).unwrap_or(0.0);
    Ok(global_max(objective, horizon, SCAN_STEP))
}

/// Resolves `TimePolicy::Ideal` against the disorder-free chain.
pub fn resolve_time(base: &Chain, policy: &WindowPolicy) -> Result<TimePolicy> {
    policy.validate(base.len())?;
    Ok(match policy.time {
        TimePolicy::Ideal => {
            TimePolicy::Fixed(best_time(base, policy.input_size, policy.output_size)?.0)
        }
        other => other,
    })
}

fn evaluate_resolved(
    base: &Chain,
    spec: &DisorderSpec,
    index: u64,
    policy: &WindowPolicy,
) -> Result<f64> {
    let n = base.len();
    let chain = sample_disordered_chain(base, spec, index)?;
    let h = chain.single_excitation_matrix();
    let window = TransferWindow::ends(n, policy.input_size, policy.output_size, 0.0)?;
    let lambda = match policy.time {
        TimePolicy::Fixed(t) => {
            let eig = Eigensystem::for_sites(&h, &policy.sites(n))?;
            leading_singular_value(&eig, &window.at_time(t))?
        }
        TimePolicy::PerSample => {
            let eig = Eigensystem::for_sites(&h, &policy.sites(n))?;
            best_time_for(&eig, &window)?.1
        }
        TimePolicy::Ideal => unreachable!("ideal time is resolved before sampling"),
    };
    fidelity_single(lambda.min(1.0))
}

/// Fidelity of the optimal single-excitation encoding on one disorder sample.
pub fn sample_fidelity(
    base: &Chain,
    spec: &DisorderSpec,
    index: u64,
    policy: &WindowPolicy,
) -> Result<f64> {
    let resolved = WindowPolicy {
        time: resolve_time(base, policy)?,
        ..*policy
    };
    evaluate_resolved(base, spec, index, &resolved)
}

/// Per-sample fidelities for indices `0..samples`, in index order.
pub fn sample_fidelities(
    base: &Chain,
    spec: &DisorderSpec,
    policy: &WindowPolicy,
    samples: usize,
) -> Result<Vec<f64>> {
    spec.validate()?;
    let resolved = WindowPolicy {
        time: resolve_time(base, policy)?,
        ..*policy
    };
    if spec.is_zero() {
        let value = evaluate_resolved(base, spec, 0, &resolved)?;
        return Ok(vec![value; samples]);
    }
    (0..samples as u64)
        .into_par_iter()
        .map(|i| evaluate_resolved(base, spec, i, &resolved))
        .collect()
}

pub fn monte_carlo(
    base: &Chain,
    spec: &DisorderSpec,
    policy: &WindowPolicy,
    samples: usize,
    quantile_level: f64,
) -> Result<FidelityStats> {
    if samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    if !(quantile_level > 0.0 && quantile_level < 1.0) {
        return Err(invalid(format!(
            "quantile level {quantile_level} outside (0, 1)"
        )));
    }
    let values = sample_fidelities(base, spec, policy, samples)?;
    FidelityStats::from_samples(&values, quantile_level, spec.seed)
}

/// `min, min + step, …` up to `max`; a single point when `step` is 0 or
/// `min == max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl SweepAxis {
    pub fn new(name: impl Into<String>, min: f64, max: f64, step: f64) -> Result<Self> {
        let axis = SweepAxis {
            name: name.into(),
            min,
            max,
            step,
        };
        axis.validate()?;
        Ok(axis)
    }

    pub fn single(name: impl Into<String>, value: f64) -> Self {
        SweepAxis {
            name: name.into(),
            min: value,
            max: value,
            step: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.min >= 0.0 && self.min.is_finite() && self.max.is_finite()) {
            return Err(invalid(format!(
                "axis {} must have finite, non-negative bounds",
                self.name
            )));
        }
        if self.max < self.min {
            return Err(invalid(format!("axis {} has max < min", self.name)));
        }
        if !(self.step >= 0.0 && self.step.is_finite()) || (self.step == 0.0 && self.max > self.min)
        {
            return Err(invalid(format!("axis {} needs a positive step", self.name)));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.step == 0.0 || self.max == self.min {
            return vec![self.min];
        }
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize;
        (0..=count)
            .map(|i| self.min + i as f64 * self.step)
            .collect()
    }
}

/// A full sweep experiment: base chain, disorder template (its strengths
/// are overwritten per cell), the two strength axes and the encoding policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDescriptor {
    pub format_version: u32,
    pub chain: Chain,
    pub disorder: DisorderSpec,
    pub sigma_j: SweepAxis,
    pub sigma_b: SweepAxis,
    pub window: WindowPolicy,
    pub samples: usize,
    pub quantile: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub descriptor: SweepDescriptor,
    pub resolved_time: TimePolicy,
    pub sigma_j: Vec<f64>,
    pub sigma_b: Vec<f64>,
    /// Row-major: `cells[i * sigma_b.len() + k]` is `(sigma_j[i], sigma_b[k])`.
    pub cells: Vec<FidelityStats>,
}

impl SweepGrid {
    pub fn cell(&self, i: usize, k: usize) -> &FidelityStats {
        &self.cells[i * self.sigma_b.len() + k]
    }

    /// CSV with a `# format=1` line, a descriptor comment and one row per cell.
    pub fn to_csv(&self) -> String {
        let d = &self.descriptor;
        let time = match self.resolved_time {
            TimePolicy::Fixed(t) => fmt_sig(t, 12),
            TimePolicy::PerSample => "per_sample".to_string(),
            TimePolicy::Ideal => "ideal".to_string(),
        };
        let mut out = String::new();
        out.push_str("# format=1\n");
        let _ = writeln!(
            out,
            "# chain={} n={} window={}/{} time={} coupling_mode={:?} field_mode={:?} dist={:?}",
            d.chain.label(),
            d.chain.len(),
            d.window.input_size,
            d.window.output_size,
            time,
            d.disorder.coupling_mode,
            d.disorder.field_mode,
            d.disorder.coupling_dist.kind,
        );
        out.push_str("sigma_J,sigma_B,mean,min,quantile,samples,seed\n");
        for (i, sj) in self.sigma_j.iter().enumerate() {
            for (k, sb) in self.sigma_b.iter().enumerate() {
                let c = self.cell(i, k);
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    fmt_sig(*sj, 12),
                    fmt_sig(*sb, 12),
                    fmt_sig(c.mean, 12),
                    fmt_sig(c.minimum, 12),
                    fmt_sig(c.quantile_value, 12),
                    c.samples,
                    c.seed
                );
            }
        }
        out
    }
}

/// Fills every grid cell with [`monte_carlo`] at the cell's disorder strengths.
pub fn sweep(descriptor: &SweepDescriptor) -> Result<SweepGrid> {
    descriptor.sigma_j.validate()?;
    descriptor.sigma_b.validate()?;
    let base = &descriptor.chain;
    let policy = WindowPolicy {
        time: resolve_time(base, &descriptor.window)?,
        ..descriptor.window
    };
    let sigma_j = descriptor.sigma_j.values();
    let sigma_b = descriptor.sigma_b.values();
    let mut cells = Vec::with_capacity(sigma_j.len() * sigma_b.len());
    for &sj in &sigma_j {
        for &sb in &sigma_b {
            let spec = DisorderSpec {
                coupling_dist: descriptor.disorder.coupling_dist.with_param(sj),
                field_dist: descriptor.disorder.field_dist.with_param(sb),
                ..descriptor.disorder
            };
            cells.push(monte_carlo(
                base,
                &spec,
                &policy,
                descriptor.samples,
                descriptor.quantile,
            )?);
        }
    }
    Ok(SweepGrid {
        descriptor: descriptor.clone(),
        resolved_time: policy.time,
        sigma_j,
        sigma_b,
        cells,
    })
}

/// `%.{sig}g`-style formatting: `sig` significant digits, trailing zeros
/// dropped, scientific notation outside `1e-5 ..= 10^sig`.
pub fn fmt_sig(value: f64, sig: usize) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let sci = format!("{:.*e}", sig - 1, value);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -5 || exp >= sig as i32 {
        format!("{}e{}", trim(mantissa), exp)
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disorder::CouplingMode;
    use crate::models::{pst_chain, uniform_chain};

    #[test]
    fn formatting() {
        assert_eq!(fmt_sig(0.643, 12), "0.643");
        assert_eq!(fmt_sig(1.0, 12), "1");
        assert_eq!(fmt_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(fmt_sig(0.05, 12), "0.05");
        assert_eq!(fmt_sig(1.5e-7, 12), "1.5e-7");
        assert_eq!(fmt_sig(0.0, 12), "0");
        assert_eq!(fmt_sig(26.981234567891234, 12), "26.9812345679");
    }

    #[test]
    fn axes() {
        assert_eq!(
            SweepAxis::new("s", 0.0, 0.2, 0.05).unwrap().values().len(),
            5
        );
        assert_eq!(SweepAxis::single("s", 0.1).values(), vec![0.1]);
        assert!(SweepAxis::new("s", 0.2, 0.1, 0.05).is_err());
        assert!(SweepAxis::new("s", 0.0, 0.1, 0.0).is_err());
    }

    #[test]
    fn pst_zero_disorder_is_perfect() {
        let base = pst_chain(11).unwrap();
        let spec = DisorderSpec::none(0);
        let policy = WindowPolicy::symmetric(1, TimePolicy::Ideal);
        let f = sample_fidelity(&base, &spec, 0, &policy).unwrap();
        assert!((f - 1.0).abs() < 1e-9);
        let stats = monte_carlo(&base, &spec, &policy, 10, 0.75).unwrap();
        assert!((stats.mean - 1.0).abs() < 1e-9);
        assert_eq!(stats.mean, stats.minimum);
        assert_eq!(stats.minimum, stats.quantile_value);
    }

    #[test]
    fn single_sample_statistics() {
        let base = uniform_chain(15).unwrap();
        let spec = DisorderSpec::normal(CouplingMode::Additive, 0.1, 0.1, 9);
        let policy = WindowPolicy::symmetric(2, TimePolicy::Fixed(8.0));
        let stats = monte_carlo(&base, &spec, &policy, 1, 0.75).unwrap();
        let direct = sample_fidelity(&base, &spec, 0, &policy).unwrap();
        assert_eq!(stats.mean, direct);
        assert_eq!(stats.minimum, direct);
        assert_eq!(stats.quantile_value, direct);
    }

    #[test]
    fn invalid_policies() {
        let base = uniform_chain(6).unwrap();
        let spec = DisorderSpec::none(0);
        let bad = WindowPolicy::symmetric(0, TimePolicy::Ideal);
        assert!(sample_fidelity(&base, &spec, 0, &bad).is_err());
        let big = WindowPolicy::symmetric(7, TimePolicy::Ideal);
        assert!(sample_fidelity(&base, &spec, 0, &big).is_err());
        assert!(monte_carlo(
            &base,
            &spec,
            &WindowPolicy::symmetric(1, TimePolicy::Fixed(1.0)),
            0,
            0.75
        )
        .is_err());
    }
}
