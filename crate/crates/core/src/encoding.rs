//! Optimal encodings over small end windows and the fidelity formulas that
//! score them.
//!
//! The windowed propagator `M` (rows: output sites, columns: input sites) is
//! decomposed by SVD. Its largest singular value is the best achievable
//! single-excitation transfer amplitude; the leading right singular vector is
//! the encoding and the matching left singular vector the arriving state.
//! Multi-excitation Slater encodings use the leading `k` singular values.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::chain::{TransferWindow, FORMAT_VERSION};
use crate::error::{invalid, Result};
use crate::spectral::Eigensystem;
use crate::svd::jacobi_svd;

/// Amplitudes above 1 by less than this are rounding, not physics.
const UNIT_SLACK: f64 = 1e-9;

/// `√2 − 1`: above this leading singular value single-excitation encoding is optimal.
pub const SINGLE_EXCITATION_THRESHOLD: f64 = std::f64::consts::SQRT_2 - 1.0;

#[derive(Debug, Clone)]
pub struct TransferMatrix {
    /// `|out| x |in|`; entry (r, c) is `<out[r]| e^{-iHt} |in[c]>`.
    pub entries: DMatrix<Complex64>,
    pub window: TransferWindow,
}

pub fn transfer_matrix(eig: &Eigensystem, window: &TransferWindow) -> Result<TransferMatrix> {
    let n = eig.n();
    if window.sites().iter().any(|&s| s >= n) {
        return Err(invalid(format!("window sites out of range for n = {n}")));
    }
    if let Some(s) = window
        .sites()
        .into_iter()
        .find(|s| !eig.tracked_sites().contains(s))
    {
        return Err(invalid(format!(
            "eigensystem does not track window site {s}"
        )));
    }
    Ok(TransferMatrix {
        entries: eig.propagator_block(window.output_sites(), window.input_sites(), window.time()),
        window: window.clone(),
    })
}

#[derive(Debug, Clone)]
pub struct EncodingSolution {
    /// Descending.
    pub singular_values: Vec<f64>,
    /// Encodings over the input window (right singular vectors).
    pub input_vectors: Vec<Vec<Complex64>>,
    /// Arriving states over the output window (left singular vectors).
    pub output_vectors: Vec<Vec<Complex64>>,
    pub window: TransferWindow,
}

/// SVD of the transfer matrix in a fixed gauge: each input vector's
/// largest-magnitude entry is real positive and, for nonzero singular values,
/// the output vector is exactly `M u / λ`.
pub fn optimal_encoding(m: &TransferMatrix) -> EncodingSolution {
    let svd = jacobi_svd(&m.entries);
    let r = svd.values.len();
    let mut input_vectors = Vec::with_capacity(r);
    let mut output_vectors = Vec::with_capacity(r);
    let cutoff = 1e-12;
    for k in 0..r {
        let mut u: Vec<Complex64> = svd.right.column(k).iter().copied().collect();
        let mut v: Vec<Complex64> = svd.left.column(k).iter().copied().collect();
        let lead = u.iter().copied().fold(Complex64::new(0.0, 0.0), |best, x| {
            if x.norm() > best.norm() {
                x
            } else {
                best
            }
        });
        if lead.norm() > 0.0 {
            let phase = (lead / lead.norm()).conj();
            u.iter_mut().for_each(|x| *x *= phase);
            v.iter_mut().for_each(|x| *x *= phase);
        }
        let lambda = svd.values[k];
        if lambda > cutoff {
            let uv = nalgebra::DVector::from_vec(u.clone());
            v = (&m.entries * uv / Complex64::new(lambda, 0.0))
                .iter()
                .copied()
                .collect();
        }
        input_vectors.push(u);
        output_vectors.push(v);
    }
    EncodingSolution {
        singular_values: svd.values,
        input_vectors,
        output_vectors,
        window: m.window.clone(),
    }
}

/// Largest singular value of the windowed propagator.
pub fn leading_singular_value(eig: &Eigensystem, window: &TransferWindow) -> Result<f64> {
    let m = transfer_matrix(eig, window)?;
    if m.entries.len() == 1 {
        return Ok(m.entries[(0, 0)].norm());
    }
    Ok(jacobi_svd(&m.entries).values[0])
}

fn check_amplitude(lambda: f64) -> Result<f64> {
    if !(0.0..=1.0 + UNIT_SLACK).contains(&lambda) {
        return Err(invalid(format!("singular value {lambda} outside [0, 1]")));
    }
    Ok(lambda.min(1.0))
}

fn check_all(lambdas: &[f64]) -> Result<Vec<f64>> {
    if lambdas.is_empty() {
        return Err(invalid("need at least one singular value"));
    }
    lambdas.iter().map(|&l| check_amplitude(l)).collect()
}

/// Input-averaged fidelity `1/3 + (1 + λ)²/6` of a transfer with amplitude λ.
pub fn fidelity_single(lambda: f64) -> Result<f64> {
    let l = check_amplitude(lambda)?;
    Ok(1.0 / 3.0 + (1.0 + l).powi(2) / 6.0)
}

/// Fidelity of a Slater encoding on the given singular values, with the
/// optimal decoding: `1/3 + (1+P)²/6 + (1 − P² − Q)/6`, where
/// `P = Π λ_i` and `Q = Π (1 − λ_i²)`.
pub fn fidelity_multi(lambdas: &[f64]) -> Result<f64> {
    let ls = check_all(lambdas)?;
    let p: f64 = ls.iter().product();
    let q: f64 = ls.iter().map(|l| 1.0 - l * l).product();
    Ok(1.0 / 3.0 + (1.0 + p).powi(2) / 6.0 + (1.0 - p * p - q) / 6.0)
}

/// The all-quasiparticles-arrive score `1/3 + (1 + Π λ_i)²/6`.
pub fn fidelity_haselgrove(lambdas: &[f64]) -> Result<f64> {
    let ls = check_all(lambdas)?;
    let p: f64 = ls.iter().product();
    Ok(1.0 / 3.0 + (1.0 + p).powi(2) / 6.0)
}

/// Change in [`fidelity_multi`] from appending `next` to `prefix`.
pub fn excitation_gain(prefix: &[f64], next: f64) -> Result<f64> {
    let ls = check_all(prefix)?;
    let next = check_amplitude(next)?;
    let p: f64 = ls.iter().product();
    let q: f64 = ls.iter().map(|l| 1.0 - l * l).product();
    Ok((2.0 * (next - 1.0) * p + next * next * q) / 6.0)
}

/// [`fidelity_multi`] for `n` equal singular values λ: `(4 + 2λⁿ − (1 − λ²)ⁿ)/6`.
pub fn fidelity_equal_values(lambda: f64, n: u32) -> Result<f64> {
    let l = check_amplitude(lambda)?;
    Ok((4.0 + 2.0 * l.powi(n as i32) - (1.0 - l * l).powi(n as i32)) / 6.0)
}

/// Best number of excitations to encode with: the argmax of
/// [`fidelity_multi`] over prefixes, smallest count on ties.
pub fn best_excitation_count(lambdas: &[f64]) -> Result<(usize, f64)> {
    let ls = check_all(lambdas)?;
    if ls.windows(2).any(|w| w[1] > w[0]) {
        return Err(invalid("singular values must be in descending order"));
    }
    let mut best = (1, fidelity_multi(&ls[..1])?);
    for k in 2..=ls.len() {
        let f = fidelity_multi(&ls[..k])?;
        if f > best.1 {
            best = (k, f);
        }
    }
    Ok(best)
}

/// Unencoded fidelity from the first to the last site at time `t`.
pub fn end_to_end_fidelity(eig: &Eigensystem, t: f64) -> Result<f64> {
    let n = eig.n();
    fidelity_single(eig.amplitude(0, n - 1, t).norm())
}

fn interleave(v: &[Complex64]) -> Vec<f64> {
    v.iter().flat_map(|z| [z.re, z.im]).collect()
}

#[derive(Serialize)]
struct EncodingReport<'a> {
    format_version: u32,
    time: f64,
    input_sites: Vec<usize>,
    output_sites: Vec<usize>,
    singular_values: &'a [f64],
    input_vectors: Vec<Vec<f64>>,
    output_vectors: Vec<Vec<f64>>,
}

impl EncodingSolution {
    /// JSON with 1-based site labels and vectors as interleaved `[re, im, …]`.
    pub fn to_json_value(&self) -> serde_json::Value {
        let report = EncodingReport {
            format_version: FORMAT_VERSION,
            time: self.window.time(),
            input_sites: self.window.input_sites().iter().map(|s| s + 1).collect(),
            output_sites: self.window.output_sites().iter().map(|s| s + 1).collect(),
            singular_values: &self.singular_values,
            input_vectors: self.input_vectors.iter().map(|v| interleave(v)).collect(),
            output_vectors: self.output_vectors.iter().map(|v| interleave(v)).collect(),
        };
        serde_json::to_value(report).expect("encoding report is plain data")
    }
}
