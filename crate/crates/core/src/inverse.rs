//! Inverse eigenvalue problem for persymmetric Jacobi matrices.
//!
//! A Jacobi matrix is fixed by its spectrum together with the squared first
//! components of its eigenvectors (the spectral weights). For a mirror
//! symmetric matrix those weights follow from the spectrum alone,
//! `w_k ∝ 1 / prod_{j != k} |λ_k - λ_j|`, and the matrix is then recovered
//! by running Lanczos on `diag(λ)` from the start vector `sqrt(w)`.

use serde::{Deserialize, Serialize};

use crate::chain::Chain;
use crate::error::{invalid, Error, Result};
use crate::spectral::eigendecompose;

/// A target single-excitation spectrum, ascending and symmetric about zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SpectrumTarget {
    eigenvalues: Vec<f64>,
}

impl TryFrom<Vec<f64>> for SpectrumTarget {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        SpectrumTarget::new(values)
    }
}

impl From<SpectrumTarget> for Vec<f64> {
    fn from(target: SpectrumTarget) -> Self {
        target.eigenvalues
    }
}

impl SpectrumTarget {
    pub fn new(eigenvalues: Vec<f64>) -> Result<Self> {
        let n = eigenvalues.len();
        if n < 2 {
            return Err(invalid("a target spectrum needs at least 2 values"));
        }
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(invalid("target eigenvalues must be finite"));
        }
        if eigenvalues.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("target eigenvalues must be strictly increasing"));
        }
        let scale = eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for k in 0..n {
            if (eigenvalues[k] + eigenvalues[n - 1 - k]).abs() > 1e-12 * scale {
                return Err(invalid("target spectrum must be symmetric about 0"));
            }
        }
        Ok(SpectrumTarget { eigenvalues })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    fn scale(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Spectral weights of the unique persymmetric Jacobi matrix with the given
/// simple spectrum. Computed in log space; normalized to sum 1.
pub fn persymmetric_weights(eigenvalues: &[f64]) -> Vec<f64> {
    let logs: Vec<f64> = eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &lk)| {
            -eigenvalues
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &lj)| (lk - lj).abs().ln())
                .sum::<f64>()
        })
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Lanczos on `diag(eigenvalues)` from `sqrt(weights)`, with full double
/// reorthogonalization. Returns `(diagonal, offdiagonal)`.
pub fn jacobi_from_spectral_data(eigenvalues: &[f64], weights: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = eigenvalues.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut q: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    q.iter_mut().for_each(|x| *x /= norm);

    let mut diagonal = Vec::with_capacity(n);
    let mut offdiagonal = Vec::with_capacity(n.saturating_sub(1));
    for j in 0..n {
        let mut r: Vec<f64> = q.iter().zip(eigenvalues).map(|(x, l)| x * l).collect();
        let alpha: f64 = r.iter().zip(&q).map(|(a, b)| a * b).sum();
        diagonal.push(alpha);
        basis.push(q.clone());
        if j + 1 == n {
            break;
        }
        for _ in 0..2 {
            for b in &basis {
                let proj: f64 = r.iter().zip(b).map(|(a, c)| a * c).sum();
                r.iter_mut().zip(b).for_each(|(a, c)| *a -= proj * c);
            }
        }
        let beta = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        offdiagonal.push(beta);
        q = r.into_iter().map(|x| x / beta).collect();
    }
    (diagonal, offdiagonal)
}

/// Field-free mirror-symmetric chain with the target spectrum. The result is
/// verified by re-diagonalizing it.
pub fn inverse_persymmetric_jacobi(target: &SpectrumTarget) -> Result<Chain> {
    let values = target.eigenvalues();
    let n = values.len();
    let scale = target.scale();
    let weights = persymmetric_weights(values);
    let (diagonal, mut couplings) = jacobi_from_spectral_data(values, &weights);

    if let Some(a) = diagonal.iter().find(|a| a.abs() > 1e-8 * scale) {
        return Err(Error::Reconstruction(format!(
            "reconstructed diagonal entry {a} is not zero"
        )));
    }
    if let Some(j) = couplings
        .iter()
        .find(|j| j.is_nan() || **j <= 0.0 || !j.is_finite())
    {
        return Err(Error::Reconstruction(format!("non-positive coupling {j}")));
    }
    for k in 0..couplings.len() / 2 {
        let (a, b) = (couplings[k], couplings[n - 2 - k]);
        if (a - b).abs() > 1e-9 * scale {
            return Err(Error::Reconstruction(format!(
                "couplings {k} and {} break mirror symmetry: {a} vs {b}",
                n - 2 - k
            )));
        }
        let mean = 0.5 * (a + b);
        couplings[k] = mean;
        couplings[n - 2 - k] = mean;
    }

    let chain = Chain::field_free(couplings, format!("inverse-persymmetric n={n}"))?;
    let check = eigendecompose(&chain.single_excitation_matrix())?;
    for (got, want) in check.values().iter().zip(values) {
        if (got - want).abs() > 1e-8 * scale {
            return Err(Error::Reconstruction(format!(
                "round trip gave eigenvalue {got}, target {want}"
            )));
        }
    }
    Ok(chain)
}
