//! Reproducible static disorder on couplings and fields.
//!
//! Every random draw is a pure function of `(seed, sample index, site,
//! parameter kind)`: the key is hashed to a 64-bit counter value, so samples
//! can be generated in any order, on any thread, with identical results.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::chain::Chain;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingMode {
    /// `J -> J + δ`
    Additive,
    /// `J -> J (1 + δ)`
    Multiplicative,
    None,
}

/// Fields are only ever perturbed additively; most designs have zero fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldMode {
    Additive,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistributionKind {
    /// Uniform on `[-param, param]`.
    Uniform,
    /// Normal with mean 0 and standard deviation `param`.
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub kind: DistributionKind,
    pub param: f64,
}

impl Distribution {
    pub fn uniform(half_width: f64) -> Self {
        Distribution {
            kind: DistributionKind::Uniform,
            param: half_width,
        }
    }

    pub fn normal(sigma: f64) -> Self {
        Distribution {
            kind: DistributionKind::Normal,
            param: sigma,
        }
    }

    pub fn with_param(self, param: f64) -> Self {
        Distribution { param, ..self }
    }

    /// Maps a uniform variate in (0, 1) to this distribution.
    pub fn transform(&self, u: f64) -> f64 {
        if self.param == 0.0 {
            return 0.0;
        }
        match self.kind {
            DistributionKind::Uniform => (2.0 * u - 1.0) * self.param,
            DistributionKind::Normal => self.param * standard_normal_quantile(u),
        }
    }

    pub fn std_dev(&self) -> f64 {
        match self.kind {
            DistributionKind::Uniform => self.param / 3f64.sqrt(),
            DistributionKind::Normal => self.param,
        }
    }
}

fn standard_normal_quantile(u: f64) -> f64 {
    Normal::standard().inverse_cdf(u)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    pub coupling_mode: CouplingMode,
    pub field_mode: FieldMode,
    pub coupling_dist: Distribution,
    pub field_dist: Distribution,
    pub seed: u64,
}

impl DisorderSpec {
    /// No disorder at all.
    pub fn none(seed: u64) -> Self {
        DisorderSpec {
            coupling_mode: CouplingMode::None,
            field_mode: FieldMode::None,
            coupling_dist: Distribution::normal(0.0),
            field_dist: Distribution::normal(0.0),
            seed,
        }
    }

    /// Normal disorder of strength `sigma_j` on couplings (in `mode`) and
    /// absolute `sigma_b` on fields.
    pub fn normal(mode: CouplingMode, sigma_j: f64, sigma_b: f64, seed: u64) -> Self {
        DisorderSpec {
            coupling_mode: mode,
            field_mode: FieldMode::Additive,
            coupling_dist: Distribution::normal(sigma_j),
            field_dist: Distribution::normal(sigma_b),
            seed,
        }
    }

    /// Uniform `±delta` errors on couplings only.
    pub fn uniform_couplings(mode: CouplingMode, delta: f64, seed: u64) -> Self {
        DisorderSpec {
            coupling_mode: mode,
            field_mode: FieldMode::None,
            coupling_dist: Distribution::uniform(delta),
            field_dist: Distribution::uniform(0.0),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, d) in [("coupling", self.coupling_dist), ("field", self.field_dist)] {
            if !(d.param >= 0.0 && d.param.is_finite()) {
                return Err(invalid(format!(
                    "{name} disorder strength must be finite and >= 0, got {}",
                    d.param
                )));
            }
        }
        Ok(())
    }

    /// True when no draw can change the chain.
    pub fn is_zero(&self) -> bool {
        let couplings_fixed =
            self.coupling_mode == CouplingMode::None || self.coupling_dist.param == 0.0;
        let fields_fixed = self.field_mode == FieldMode::None || self.field_dist.param == 0.0;
        couplings_fixed && fields_fixed
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: DisorderSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }
}

/// Which chain parameter a draw perturbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum ParameterKind {
    Coupling = 1,
    Field = 2,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Raw 64-bit counter value for one draw.
pub fn counter_bits(seed: u64, sample_index: u64, site: u64, kind: ParameterKind) -> u64 {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ sample_index);
    h = splitmix64(h ^ site);
    splitmix64(h ^ (kind as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// Uniform variate strictly inside (0, 1).
pub fn counter_uniform(seed: u64, sample_index: u64, site: u64, kind: ParameterKind) -> f64 {
    let bits = counter_bits(seed, sample_index, site, kind) >> 11;
    (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// One disorder realization of `base`. Couplings may change sign; nothing
/// is clamped.
pub fn sample_disordered_chain(
    base: &Chain,
    spec: &DisorderSpec,
    sample_index: u64,
) -> Result<Chain> {
    spec.validate()?;
    let couplings = base
        .couplings()
        .iter()
        .enumerate()
        .map(|(site, &j)| {
            let draw = || {
                let u = counter_uniform(
                    spec.seed,
                    sample_index,
                    site as u64,
                    ParameterKind::Coupling,
                );
                spec.coupling_dist.transform(u)
            };
            match spec.coupling_mode {
                CouplingMode::None => j,
                CouplingMode::Additive => j + draw(),
                CouplingMode::Multiplicative => j * (1.0 + draw()),
            }
        })
        .collect();
    let fields = base
        .fields()
        .iter()
        .enumerate()
        .map(|(site, &b)| match spec.field_mode {
            FieldMode::None => b,
            FieldMode::Additive => {
                let u = counter_uniform(spec.seed, sample_index, site as u64, ParameterKind::Field);
                b + spec.field_dist.transform(u)
            }
        })
        .collect();
    Chain::new(couplings, fields, base.label())
}
