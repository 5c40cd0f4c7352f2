//! Re-optimizing the Apollaro end couplings against disorder, and the
//! first-order fidelity response of a chain to a Hamiltonian perturbation.

use std::cell::RefCell;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{Chain, FORMAT_VERSION};
use crate::disorder::DisorderSpec;
use crate::encoding::end_to_end_fidelity;
use crate::error::{invalid, Error, Result};
use crate::models::apollaro_chain;
use crate::montecarlo::{fmt_sig, monte_carlo, sample_fidelity, TimePolicy, WindowPolicy};
use crate::nelder_mead::{self, maximize};
use crate::spectral::Eigensystem;

/// Upper face of the `(x, y)` search box; the lower face is 0 (open).
pub const SEARCH_BOX_MAX: f64 = 1.2;
pub const OPTIMIZATION_SAMPLES: usize = 200;
pub const FINAL_SAMPLES: usize = 1000;
const RESTARTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Fidelity of the disorder-free chain.
    Deterministic,
    /// Quantile of the per-sample fidelities over `samples` disorder draws.
    Quantile { samples: usize, level: f64 },
}

/// What an Apollaro parameter pair is scored by.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub n: usize,
    pub window: usize,
    pub disorder: DisorderSpec,
    pub metric: Metric,
    pub time: TimePolicy,
    /// Sample count for re-scoring the optimum once the search is done.
    pub final_samples: Option<usize>,
}

impl Objective {
    pub fn deterministic(n: usize, window: usize) -> Self {
        Objective {
            n,
            window,
            disorder: DisorderSpec::none(0),
            metric: Metric::Deterministic,
            time: TimePolicy::Ideal,
            final_samples: None,
        }
    }

    /// Upper-quartile objective with the default sample counts.
    pub fn upper_quartile(n: usize, window: usize, disorder: DisorderSpec) -> Self {
        Objective {
            n,
            window,
            disorder,
            metric: Metric::Quantile {
                samples: OPTIMIZATION_SAMPLES,
                level: 0.75,
            },
            time: TimePolicy::Ideal,
            final_samples: Some(FINAL_SAMPLES),
        }
    }

    fn policy(&self) -> WindowPolicy {
        WindowPolicy::symmetric(self.window, self.time)
    }

    pub fn evaluate(&self, x: f64, y: f64) -> Result<f64> {
        self.evaluate_with(x, y, None)
    }

    fn evaluate_with(&self, x: f64, y: f64, samples_override: Option<usize>) -> Result<f64> {
        let chain = apollaro_chain(self.n, x, y)?;
        self.evaluate_chain(&chain, samples_override)
    }

    /// Scores an arbitrary chain under this objective's window, time and metric.
    pub fn evaluate_chain(&self, chain: &Chain, samples_override: Option<usize>) -> Result<f64> {
        match self.metric {
            Metric::Deterministic => {
                sample_fidelity(chain, &DisorderSpec::none(0), 0, &self.policy())
            }
            Metric::Quantile { samples, level } => {
                let samples = samples_override.unwrap_or(samples);
                Ok(
                    monte_carlo(chain, &self.disorder, &self.policy(), samples, level)?
                        .quantile_value,
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub x: f64,
    pub y: f64,
    pub objective_value: f64,
    /// Re-scored with `final_samples` draws, when requested.
    pub final_value: Option<f64>,
    pub evaluations: usize,
    /// Every evaluation in order: `(x, y, value)`.
    pub trace: Vec<(f64, f64, f64)>,
    /// The optimum sits on a face of the search box.
    pub boundary_hit: bool,
}

impl OptimizationResult {
    pub fn report_json(&self, objective: &Objective, x0: f64, y0: f64) -> serde_json::Value {
        serde_json::json!({
            "format_version": FORMAT_VERSION,
            "inputs": { "objective": objective, "x0": x0, "y0": y0 },
            "result": {
                "x": self.x,
                "y": self.y,
                "objective_value": self.objective_value,
                "final_value": self.final_value,
                "evaluations": self.evaluations,
                "boundary_hit": self.boundary_hit,
            },
            "trace": self.trace,
        })
    }
}

/// Nelder-Mead search over `(x, y) ∈ (0, 1.2]²` from `(x0, y0)`, then
/// restarts from perturbed simplices around the incumbent. Disorder seeds
/// are fixed, so the objective is deterministic across evaluations.
pub fn optimize_apollaro(objective: &Objective, x0: f64, y0: f64) -> Result<OptimizationResult> {
    for v in [x0, y0] {
        if !(v > 0.0 && v <= SEARCH_BOX_MAX) {
            return Err(invalid(format!(
                "start point must lie in (0, {SEARCH_BOX_MAX}], got ({x0}, {y0})"
            )));
        }
    }
    let trace = RefCell::new(Vec::new());
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let score = |p: &[f64]| -> f64 {
        if failure.borrow().is_some() {
            return f64::NEG_INFINITY;
        }
        match objective.evaluate(p[0], p[1]) {
            Ok(v) => {
                trace.borrow_mut().push((p[0], p[1], v));
                v
            }
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                f64::NEG_INFINITY
            }
        }
    };
    let opts = nelder_mead::Options {
        lower: 0.0,
        upper: SEARCH_BOX_MAX,
        ..Default::default()
    };

    let mut best = maximize(score, &[x0, y0], &[0.1, 0.1], &opts);
    let restart_steps = [[0.05, 0.05], [-0.05, 0.05], [0.05, -0.05]];
    for steps in restart_steps.iter().take(RESTARTS) {
        let run = maximize(score, &best.best.clone(), steps, &opts);
        if run.value > best.value {
            best = run;
        }
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let trace = trace.into_inner();
    let (x, y) = (best.best[0], best.best[1]);
    let edge = 1e-6;
    let boundary_hit = best
        .best
        .iter()
        .any(|&v| v <= edge || v >= SEARCH_BOX_MAX - edge);
    let final_value = match (objective.metric, objective.final_samples) {
        (Metric::Quantile { .. }, Some(m)) => Some(objective.evaluate_with(x, y, Some(m))?),
        _ => None,
    };
    Ok(OptimizationResult {
        x,
        y,
        objective_value: best.value,
        final_value,
        evaluations: trace.len(),
        trace,
        boundary_hit,
    })
}

/// Objective values on the grid `x_axis × y_axis`; `grid[i][k]` is at
/// `(x_axis[i], y_axis[k])`.
pub fn objective_landscape(
    objective: &Objective,
    x_axis: &[f64],
    y_axis: &[f64],
) -> Result<Vec<Vec<f64>>> {
    x_axis
        .par_iter()
        .map(|&x| y_axis.iter().map(|&y| objective.evaluate(x, y)).collect())
        .collect()
}

pub fn landscape_csv(x_axis: &[f64], y_axis: &[f64], grid: &[Vec<f64>]) -> String {
    let mut out = String::from("# format=1\nx,y,value\n");
    for (i, &x) in x_axis.iter().enumerate() {
        for (k, &y) in y_axis.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{}\n",
                fmt_sig(x, 12),
                fmt_sig(y, 12),
                fmt_sig(grid[i][k], 12)
            ));
        }
    }
    out
}

/// A direction in Hamiltonian space: changes to every coupling and field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub couplings: Vec<f64>,
    pub fields: Vec<f64>,
}

impl Perturbation {
    pub fn zero(n: usize) -> Self {
        Perturbation {
            couplings: vec![0.0; n - 1],
            fields: vec![0.0; n],
        }
    }

    /// Unit change of a single coupling (`bond` 0 joins sites 0 and 1).
    pub fn coupling_bump(n: usize, bond: usize) -> Self {
        let mut p = Perturbation::zero(n);
        p.couplings[bond] = 1.0;
        p
    }

    fn max_abs(&self) -> f64 {
        self.couplings
            .iter()
            .chain(&self.fields)
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Scaled so that the largest entry has magnitude 1.
    pub fn normalized(&self) -> Self {
        let m = self.max_abs();
        if m == 0.0 {
            return self.clone();
        }
        Perturbation {
            couplings: self.couplings.iter().map(|v| v / m).collect(),
            fields: self.fields.iter().map(|v| v / m).collect(),
        }
    }

    pub fn apply(&self, chain: &Chain, eps: f64) -> Result<Chain> {
        let couplings = chain
            .couplings()
            .iter()
            .zip(&self.couplings)
            .map(|(j, d)| j + eps * d)
            .collect();
        let fields = chain
            .fields()
            .iter()
            .zip(&self.fields)
            .map(|(b, d)| b + eps * d)
            .collect();
        Chain::new(couplings, fields, chain.label())
    }
}

/// End-to-end fidelity of `chain + eps * direction` at time `t0`.
pub fn perturbed_fidelity(
    chain: &Chain,
    t0: f64,
    direction: &Perturbation,
    eps: f64,
) -> Result<f64> {
    let n = chain.len();
    let perturbed = direction.apply(chain, eps)?;
    let eig = Eigensystem::for_sites(&perturbed.single_excitation_matrix(), &[0, n - 1])?;
    end_to_end_fidelity(&eig, t0)
}

/// `dF/dε` at ε = 0 of the end-to-end fidelity along a (normalized)
/// perturbation direction, by Richardson-extrapolated central differences.
pub fn first_order_response(chain: &Chain, t0: f64, direction: &Perturbation) -> Result<f64> {
    let n = chain.len();
    if direction.couplings.len() != n - 1 || direction.fields.len() != n {
        return Err(invalid("perturbation shape does not match the chain"));
    }
    let dir = direction.normalized();
    if dir.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let central = |h: f64| -> Result<f64> {
        Ok(
            (perturbed_fidelity(chain, t0, &dir, h)? - perturbed_fidelity(chain, t0, &dir, -h)?)
                / (2.0 * h),
        )
    };
    let coarse = central(1e-3)?;
    let fine = central(5e-4)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::uniform_chain;

    #[test]
    fn unit_parameters_reduce_to_uniform() {
        let obj = Objective::deterministic(21, 1);
        let via_objective = obj.evaluate(1.0, 1.0).unwrap();
        let uniform = sample_fidelity(
            &uniform_chain(21).unwrap(),
            &DisorderSpec::none(0),
            0,
            &WindowPolicy::symmetric(1, TimePolicy::Ideal),
        )
        .unwrap();
        assert_eq!(via_objective, uniform);
    }

    #[test]
    fn zero_direction_has_zero_response() {
        let chain = uniform_chain(9).unwrap();
        assert_eq!(
            first_order_response(&chain, 4.0, &Perturbation::zero(9)).unwrap(),
            0.0
        );
        let bad = Perturbation {
            couplings: vec![1.0],
            fields: vec![0.0; 9],
        };
        assert!(first_order_response(&chain, 4.0, &bad).is_err());
    }

    #[test]
    fn start_point_validation() {
        let obj = Objective::deterministic(11, 1);
        assert!(optimize_apollaro(&obj, 0.0, 0.5).is_err());
        assert!(optimize_apollaro(&obj, 0.5, 1.3).is_err());
    }

    #[test]
    fn landscape_matches_objective() {
        let obj = Objective::deterministic(15, 1);
        let grid = objective_landscape(&obj, &[0.6], &[0.9]).unwrap();
        assert_eq!(grid[0][0], obj.evaluate(0.6, 0.9).unwrap());
        let csv = landscape_csv(&[0.6], &[0.9], &grid);
        assert!(csv.starts_with("# format=1\nx,y,value\n0.6,0.9,"));
    }
}
