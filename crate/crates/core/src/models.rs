//! Chain families, their transfer times, and the swap-operator trace
//! identities that bound transfer times of mirror-symmetric chains.

use std::f64::consts::PI;

use crate::chain::Chain;
use crate::encoding::fidelity_single;
use crate::error::{invalid, Error, Result};
use crate::inverse::{inverse_persymmetric_jacobi, SpectrumTarget};
use crate::peak::{first_local_max, SCAN_STEP};
use crate::spectral::{eigendecompose, Eigensystem};

pub fn uniform_chain(n: usize) -> Result<Chain> {
    if n < 2 {
        return Err(invalid(format!("chain length must be >= 2, got {n}")));
    }
    Chain::field_free(vec![1.0; n - 1], format!("uniform n={n}"))
}

/// Uniform chain with the two outermost couplings at each end replaced:
/// `J_1 = J_{N-1} = x`, `J_2 = J_{N-2} = y`.
pub fn apollaro_chain(n: usize, x: f64, y: f64) -> Result<Chain> {
    if n < 5 {
        return Err(invalid(format!("apollaro chain needs n >= 5, got {n}")));
    }
    if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
        return Err(invalid(format!(
            "apollaro parameters must be positive, got x={x}, y={y}"
        )));
    }
    let mut couplings = vec![1.0; n - 1];
    couplings[0] = x;
    couplings[n - 2] = x;
    couplings[1] = y;
    couplings[n - 3] = y;
    Chain::field_free(couplings, format!("apollaro n={n} x={x} y={y}"))
}

/// Perfect-state-transfer chain with couplings `∝ sqrt(n(N-n))`, normalized
/// so the largest coupling is 1.
pub fn pst_chain(n: usize) -> Result<Chain> {
    if n < 2 {
        return Err(invalid(format!("chain length must be >= 2, got {n}")));
    }
    let nf = n as f64;
    let norm = if n.is_multiple_of(2) {
        nf
    } else {
        (nf * nf - 1.0).sqrt()
    };
    let couplings = (1..n)
        .map(|m| {
            let m = m as f64;
            2.0 * (m * (nf - m)).sqrt() / norm
        })
        .collect();
    Chain::field_free(couplings, format!("pst n={n}"))
}

/// Transfer time `pi / Δ` of a chain with an equally spaced spectrum, checked
/// to give end-to-end amplitude 1.
pub fn pst_transfer_time(chain: &Chain) -> Result<f64> {
    let eig = eigendecompose(&chain.single_excitation_matrix())?;
    pst_time_from_spectrum(&eig)
}

pub(crate) fn pst_time_from_spectrum(eig: &Eigensystem) -> Result<f64> {
    let values = eig.values();
    let n = values.len();
    let gaps: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let spacing = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let worst = gaps.iter().map(|g| (g - spacing).abs()).fold(0.0, f64::max);
    if spacing.is_nan() || spacing <= 0.0 || worst > 1e-8 * spacing.max(1.0) {
        return Err(Error::NotPst(format!(
            "spectrum is not equally spaced (gap deviation {worst:.3e})"
        )));
    }
    let t = PI / spacing;
    let amplitude = eig.amplitude(0, n - 1, t).norm();
    if amplitude < 1.0 - 1e-9 {
        return Err(Error::NotPst(format!(
            "end-to-end amplitude {amplitude} at t = {t} is not 1"
        )));
    }
    Ok(t)
}

/// `±1, ±2², …, ±(N/2)²` for even `n`; `0, ±1, …, ±((N-1)/2)²` for odd `n`.
pub fn quadratic_spectrum(n: usize) -> Result<SpectrumTarget> {
    if n < 2 {
        return Err(invalid(format!("chain length must be >= 2, got {n}")));
    }
    let half = n / 2;
    let mut values: Vec<f64> = (1..=half).map(|q| (q * q) as f64).collect();
    let negatives: Vec<f64> = values.iter().rev().map(|v| -v).collect();
    if n % 2 == 1 {
        values.insert(0, 0.0);
    }
    let mut all = negatives;
    all.extend(values);
    SpectrumTarget::new(all)
}

/// Field-free mirror-symmetric chain with the quadratic spectrum, unscaled.
pub fn quadratic_chain(n: usize) -> Result<Chain> {
    let chain = inverse_persymmetric_jacobi(&quadratic_spectrum(n)?)?;
    Ok(chain.with_label(format!("quadratic n={n}")))
}

/// Lower bound on the transfer time of the quadratic chain once rescaled to
/// unit maximum coupling.
pub fn quadratic_time_bound(n: usize) -> Result<f64> {
    if n < 4 {
        return Err(invalid(format!(
            "quadratic time bound needs n >= 4, got {n}"
        )));
    }
    let nf = n as f64;
    Ok(if n.is_multiple_of(2) {
        PI / 16.0 * nf * (nf + 2.0)
    } else {
        PI / 8.0 * ((nf + 1.0) * (nf - 1.0) * (nf * nf - 5.0)).sqrt()
    })
}

/// The two evaluations of a swap-operator trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceIdentity {
    /// From the matrix entries.
    pub structural: f64,
    /// From the spectrum, assuming eigenvector parities alternate with the
    /// top eigenvector symmetric.
    pub spectral: f64,
}

impl TraceIdentity {
    pub fn agrees(&self, tol: f64) -> bool {
        (self.structural - self.spectral).abs() <= tol
    }
}

fn parity_sign(n: usize, k: usize) -> f64 {
    // parity of the k-th (0-based, ascending) eigenvector of a persymmetric
    // Jacobi matrix with positive couplings: the top one is symmetric
    if (n - 1 - k).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn parity_applies(chain: &Chain) -> bool {
    let scale = chain.max_abs_coupling().max(1.0);
    chain.is_mirror_symmetric(1e-9 * scale) && chain.couplings().iter().all(|&j| j > 0.0)
}

fn check_identity(chain: &Chain, identity: TraceIdentity) -> Result<TraceIdentity> {
    let scale = identity.structural.abs().max(1.0);
    if parity_applies(chain) && !identity.agrees(1e-8 * scale) {
        return Err(Error::TraceMismatch {
            structural: identity.structural,
            spectral: identity.spectral,
        });
    }
    Ok(identity)
}

/// `Tr(S H_1)` for even `N`: structurally `2 J_{N/2}`, spectrally the
/// parity-weighted eigenvalue sum.
pub fn swap_trace_first(chain: &Chain) -> Result<TraceIdentity> {
    let n = chain.len();
    if !n.is_multiple_of(2) {
        return Err(invalid(
            "Tr(S H) identity needs even N; use the second-moment identity",
        ));
    }
    let structural = 2.0 * chain.couplings()[n / 2 - 1];
    let eig = eigendecompose(&chain.single_excitation_matrix())?;
    let spectral = eig
        .values()
        .iter()
        .enumerate()
        .map(|(k, l)| parity_sign(n, k) * l)
        .sum();
    check_identity(
        chain,
        TraceIdentity {
            structural,
            spectral,
        },
    )
}

/// `Tr(S H_1²)` for odd `N`, field-free: structurally `(J_{(N-1)/2} +
/// J_{(N+1)/2})²`, i.e. `4 J²_{(N-1)/2}` under mirror symmetry.
pub fn swap_trace_second(chain: &Chain) -> Result<TraceIdentity> {
    let n = chain.len();
    if n % 2 != 1 {
        return Err(invalid(
            "Tr(S H²) identity needs odd N; use the first-moment identity",
        ));
    }
    if !chain.is_field_free() {
        return Err(invalid("Tr(S H²) identity is stated for field-free chains"));
    }
    let c = (n - 1) / 2;
    let j = chain.couplings();
    let structural = (j[c - 1] + j[c]).powi(2);
    let eig = eigendecompose(&chain.single_excitation_matrix())?;
    let spectral = eig
        .values()
        .iter()
        .enumerate()
        .map(|(k, l)| parity_sign(n, k) * l * l)
        .sum();
    check_identity(
        chain,
        TraceIdentity {
            structural,
            spectral,
        },
    )
}

/// `(N + 0.8 N^{1/3}) / 2`: where the first arrival of a uniform-like chain sits.
pub fn uniform_peak_hint(n: usize) -> f64 {
    let nf = n as f64;
    0.5 * (nf + 0.8 * nf.cbrt())
}

/// First local maximum of the end-to-end fidelity in `[0, 2 * hint]`.
/// Returns `(time, fidelity)`.
pub fn first_peak_time(chain: &Chain, hint: f64) -> Result<(f64, f64)> {
    if !(hint > 0.0 && hint.is_finite()) {
        return Err(invalid(format!("search hint must be positive, got {hint}")));
    }
    let n = chain.len();
    let eig = Eigensystem::for_sites(&chain.single_excitation_matrix(), &[0, n - 1])?;
    let threshold = 0.01;
    let window = 2.0 * hint;
    let (t, amplitude) = first_local_max(
        |t| eig.amplitude(0, n - 1, t).norm(),
        window,
        SCAN_STEP,
        threshold,
    )
    .ok_or(Error::NoTransferPeak { threshold, window })?;
    Ok((t, fidelity_single(amplitude.min(1.0))?))
}
