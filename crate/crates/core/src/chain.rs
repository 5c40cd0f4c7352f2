//! Chain descriptions and their single-excitation Hamiltonian.
//!
//! Sites are 0-based throughout the Rust API. Serialized forms (JSON reports,
//! CSV) label sites 1-based, matching the usual physics convention.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub const FORMAT_VERSION: u32 = 1;

/// A nearest-neighbour XX spin chain: `n` sites, `n - 1` couplings and `n`
/// local fields, all in the same energy units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChainRepr", into = "ChainRepr")]
pub struct Chain {
    couplings: Vec<f64>,
    fields: Vec<f64>,
    label: String,
}

#[derive(Serialize, Deserialize)]
struct ChainRepr {
    #[serde(default = "default_version")]
    format_version: u32,
    n: usize,
    couplings: Vec<f64>,
    fields: Vec<f64>,
    #[serde(default)]
    label: String,
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

impl TryFrom<ChainRepr> for Chain {
    type Error = Error;

    fn try_from(repr: ChainRepr) -> Result<Self> {
        if repr.format_version != FORMAT_VERSION {
            return Err(invalid(format!(
                "unsupported chain format_version {}",
                repr.format_version
            )));
        }
        if repr.couplings.len() + 1 != repr.n {
            return Err(invalid(format!(
                "chain declares n = {} but has {} couplings",
                repr.n,
                repr.couplings.len()
            )));
        }
        Chain::new(repr.couplings, repr.fields, repr.label)
    }
}

impl From<Chain> for ChainRepr {
    fn from(chain: Chain) -> Self {
        ChainRepr {
            format_version: FORMAT_VERSION,
            n: chain.len(),
            couplings: chain.couplings,
            fields: chain.fields,
            label: chain.label,
        }
    }
}

impl Chain {
    pub fn new(couplings: Vec<f64>, fields: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let n = fields.len();
        if n < 2 {
            return Err(invalid(format!("a chain needs at least 2 sites, got {n}")));
        }
        if couplings.len() + 1 != n {
            return Err(invalid(format!(
                "{} fields require {} couplings, got {}",
                n,
                n - 1,
                couplings.len()
            )));
        }
        if couplings.iter().chain(&fields).any(|v| !v.is_finite()) {
            return Err(invalid("chain parameters must be finite"));
        }
        Ok(Chain {
            couplings,
            fields,
            label: label.into(),
        })
    }

    /// Field-free chain with the given couplings.
    pub fn field_free(couplings: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let fields = vec![0.0; couplings.len() + 1];
        Chain::new(couplings, fields, label)
    }

    /// Number of sites.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn max_abs_coupling(&self) -> f64 {
        self.couplings.iter().fold(0.0_f64, |m, j| m.max(j.abs()))
    }

    /// Mirror symmetry `J_n = J_{N-n}`, `B_n = B_{N+1-n}` within `tol`.
    pub fn is_mirror_symmetric(&self, tol: f64) -> bool {
        let sym = |v: &[f64]| {
            v.iter()
                .zip(v.iter().rev())
                .all(|(a, b)| (a - b).abs() <= tol)
        };
        sym(&self.couplings) && sym(&self.fields)
    }

    pub fn is_field_free(&self) -> bool {
        self.fields.iter().all(|&b| b == 0.0)
    }

    /// The tridiagonal matrix this chain induces on the single-excitation subspace.
    pub fn single_excitation_matrix(&self) -> SingleExcitationMatrix {
        SingleExcitationMatrix {
            diagonal: self.fields.clone(),
            offdiagonal: self.couplings.clone(),
        }
    }

    /// Rescales so that the largest |J_n| is 1. Returns the rescaled chain and
    /// `alpha = 1 / max|J_n|`; times for the original chain map to `t / alpha`.
    pub fn rescale_to_unit_max(&self) -> Result<(Chain, f64)> {
        let max = self.max_abs_coupling();
        if max == 0.0 {
            return Err(invalid(
                "cannot rescale a chain whose couplings are all zero",
            ));
        }
        let alpha = 1.0 / max;
        let scaled = Chain {
            couplings: self.couplings.iter().map(|j| j * alpha).collect(),
            fields: self.fields.iter().map(|b| b * alpha).collect(),
            label: self.label.clone(),
        };
        Ok((scaled, alpha))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Real symmetric tridiagonal matrix: fields on the diagonal, couplings on
/// the sub- and super-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleExcitationMatrix {
    pub diagonal: Vec<f64>,
    pub offdiagonal: Vec<f64>,
}

impl SingleExcitationMatrix {
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut m = vec![vec![0.0; n]; n];
        for (i, &b) in self.diagonal.iter().enumerate() {
            m[i][i] = b;
        }
        for (i, &j) in self.offdiagonal.iter().enumerate() {
            m[i][i + 1] = j;
            m[i + 1][i] = j;
        }
        m
    }

    /// Largest |eigenvalue| bound from Gershgorin discs.
    pub fn gershgorin_radius(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let left = if i > 0 {
                    self.offdiagonal[i - 1].abs()
                } else {
                    0.0
                };
                let right = if i + 1 < n {
                    self.offdiagonal[i].abs()
                } else {
                    0.0
                };
                self.diagonal[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }
}

/// Where and when encoding and decoding happen.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferWindow {
    input_sites: Vec<usize>,
    output_sites: Vec<usize>,
    time: f64,
}

impl TransferWindow {
    pub fn new(
        input_sites: Vec<usize>,
        output_sites: Vec<usize>,
        time: f64,
        n: usize,
    ) -> Result<Self> {
        for (name, sites) in [("input", &input_sites), ("output", &output_sites)] {
            if sites.is_empty() {
                return Err(invalid(format!("{name} site set is empty")));
            }
            if let Some(&bad) = sites.iter().find(|&&s| s >= n) {
                return Err(invalid(format!(
                    "{name} site {bad} out of range for n = {n}"
                )));
            }
            let mut sorted = sites.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != sites.len() {
                return Err(invalid(format!("{name} site set has duplicates")));
            }
        }
        if !time.is_finite() || time < 0.0 {
            return Err(invalid(format!(
                "transfer time must be finite and >= 0, got {time}"
            )));
        }
        Ok(TransferWindow {
            input_sites,
            output_sites,
            time,
        })
    }

    /// Contiguous windows at the two ends: `0..w_in` and `n-w_out..n`.
    pub fn ends(n: usize, w_in: usize, w_out: usize, time: f64) -> Result<Self> {
        if w_in > n || w_out > n {
            return Err(invalid(format!(
                "window sizes {w_in}/{w_out} exceed chain length {n}"
            )));
        }
        TransferWindow::new((0..w_in).collect(), (n - w_out..n).collect(), time, n)
    }

    pub fn input_sites(&self) -> &[usize] {
        &self.input_sites
    }

    pub fn output_sites(&self) -> &[usize] {
        &self.output_sites
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn at_time(&self, time: f64) -> Self {
        TransferWindow {
            time,
            ..self.clone()
        }
    }

    /// Sorted union of input and output sites.
    pub fn sites(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self
            .input_sites
            .iter()
            .chain(&self.output_sites)
            .copied()
            .collect();
        all.sort_unstable();
        all.dedup();
        all
    }
}
