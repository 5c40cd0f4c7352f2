//! Spectral decomposition of the single-excitation Hamiltonian and the
//! propagator `e^{-iHt}` built from it.
//!
//! The eigensolver is the implicit-shift QL iteration for symmetric
//! tridiagonal matrices (EISPACK `tql2` lineage). Eigenvector components can
//! be accumulated for every site or only for a subset of sites; the latter is
//! what the Monte Carlo loops use, since only the encoding and decoding
//! windows enter the transfer matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::chain::SingleExcitationMatrix;
use crate::error::{invalid, Error, Result};

const QL_TOLERANCE: f64 = 1e-14;
const QL_MAX_ITERATIONS: usize = 50;
const UNTRACKED: usize = usize::MAX;

/// Eigenvalues (ascending) and eigenvector components of a single-excitation
/// matrix. Components are stored for a set of tracked sites; a full
/// decomposition tracks every site.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    values: Vec<f64>,
    /// site -> row in `components`, or `UNTRACKED`.
    row_of_site: Vec<usize>,
    tracked: Vec<usize>,
    /// `tracked.len() x n`, row-major; entry (r, k) is v_k(tracked[r]).
    components: Vec<f64>,
}

/// Full eigendecomposition. Each eigenvector is gauged so that its
/// largest-magnitude component is positive.
pub fn eigendecompose(h: &SingleExcitationMatrix) -> Result<Eigensystem> {
    let sites: Vec<usize> = (0..h.dim()).collect();
    let mut eig = Eigensystem::for_sites(h, &sites)?;
    eig.fix_gauge();
    Ok(eig)
}

impl Eigensystem {
    /// Eigenvalues plus the eigenvector components on `sites` only.
    /// Costs O(N^2 |sites|) instead of O(N^3).
    pub fn for_sites(h: &SingleExcitationMatrix, sites: &[usize]) -> Result<Self> {
        let n = h.dim();
        if h.offdiagonal.len() + 1 != n {
            return Err(invalid("offdiagonal must have n - 1 entries"));
        }
        let mut row_of_site = vec![UNTRACKED; n];
        let mut tracked = Vec::with_capacity(sites.len());
        for &s in sites {
            if s >= n {
                return Err(invalid(format!("site {s} out of range for n = {n}")));
            }
            if row_of_site[s] == UNTRACKED {
                row_of_site[s] = tracked.len();
                tracked.push(s);
            }
        }
        let rows = tracked.len();
        let mut z = vec![0.0; rows * n];
        for (r, &s) in tracked.iter().enumerate() {
            z[r * n + s] = 1.0;
        }
        let mut d = h.diagonal.clone();
        let mut e = h.offdiagonal.clone();
        e.push(0.0);
        tql2(&mut d, &mut e, &mut z, rows)?;
        sort_ascending(&mut d, &mut z, rows);
        Ok(Eigensystem {
            values: d,
            row_of_site,
            tracked,
            components: z,
        })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_full(&self) -> bool {
        self.tracked.len() == self.n()
    }

    pub fn tracked_sites(&self) -> &[usize] {
        &self.tracked
    }

    /// v_k(site). Panics if `site` is not tracked.
    #[inline]
    pub fn component(&self, site: usize, k: usize) -> f64 {
        let row = self.row_of_site[site];
        assert!(
            row != UNTRACKED,
            "site {site} not tracked by this eigensystem"
        );
        self.components[row * self.n() + k]
    }

    fn row(&self, site: usize) -> &[f64] {
        let row = self.row_of_site[site];
        assert!(
            row != UNTRACKED,
            "site {site} not tracked by this eigensystem"
        );
        let n = self.n();
        &self.components[row * n..(row + 1) * n]
    }

    /// Eigenvector `k` as a length-N vector. Requires a full decomposition.
    pub fn vector(&self, k: usize) -> Vec<f64> {
        assert!(self.is_full(), "eigenvectors need a full decomposition");
        (0..self.n()).map(|s| self.component(s, k)).collect()
    }

    /// `e^{-i lambda_k t}` for every k.
    pub fn phases(&self, t: f64) -> Vec<Complex64> {
        self.values
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -l * t))
            .collect()
    }

    /// `<j| e^{-iHt} |i>`.
    pub fn amplitude(&self, i: usize, j: usize, t: f64) -> Complex64 {
        let phases = self.phases(t);
        self.amplitude_with(&phases, i, j)
    }

    pub(crate) fn amplitude_with(&self, phases: &[Complex64], i: usize, j: usize) -> Complex64 {
        let (ri, rj) = (self.row(i), self.row(j));
        let mut acc = Complex64::new(0.0, 0.0);
        for ((&a, &b), &p) in ri.iter().zip(rj).zip(phases) {
            acc += p * (a * b);
        }
        acc
    }

    /// Block of the propagator with rows `to` and columns `from`:
    /// entry (r, c) is `<to[r]| e^{-iHt} |from[c]>`.
    pub fn propagator_block(&self, to: &[usize], from: &[usize], t: f64) -> DMatrix<Complex64> {
        let phases = self.phases(t);
        DMatrix::from_fn(to.len(), from.len(), |r, c| {
            self.amplitude_with(&phases, from[c], to[r])
        })
    }

    /// The whole N x N propagator. Requires a full decomposition.
    pub fn propagator(&self, t: f64) -> DMatrix<Complex64> {
        assert!(self.is_full(), "full propagator needs a full decomposition");
        let sites: Vec<usize> = (0..self.n()).collect();
        self.propagator_block(&sites, &sites, t)
    }

    fn fix_gauge(&mut self) {
        let n = self.n();
        let rows = self.tracked.len();
        for k in 0..n {
            let mut best = 0.0_f64;
            let mut sign = 1.0;
            for r in 0..rows {
                let v = self.components[r * n + k];
                if v.abs() > best {
                    best = v.abs();
                    sign = v.signum();
                }
            }
            if sign < 0.0 {
                for r in 0..rows {
                    self.components[r * n + k] = -self.components[r * n + k];
                }
            }
        }
    }
}

/// `<j| e^{-iHt} |i>` for a chain's eigensystem.
pub fn propagator_amplitude(eig: &Eigensystem, i: usize, j: usize, t: f64) -> Complex64 {
    eig.amplitude(i, j, t)
}

pub fn full_propagator(eig: &Eigensystem, t: f64) -> DMatrix<Complex64> {
    eig.propagator(t)
}

/// Implicit QL with Wilkinson-style shifts. `d` holds the diagonal, `e` the
/// off-diagonal padded with a trailing zero. Rotations are applied to the
/// columns of the `rows x n` matrix `z`.
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut [f64], rows: usize) -> Result<()> {
    let n = d.len();
    let mut f = 0.0;
    let mut tst1 = 0.0_f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= QL_TOLERANCE * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iterations = 0;
            loop {
                iterations += 1;
                if iterations > QL_MAX_ITERATIONS {
                    return Err(Error::NoConvergence {
                        index: l,
                        iterations: QL_MAX_ITERATIONS,
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for row in z.chunks_exact_mut(n).take(rows) {
                        let h = row[i + 1];
                        row[i + 1] = s * row[i] + c * h;
                        row[i] = c * row[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= QL_TOLERANCE * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

fn sort_ascending(d: &mut [f64], z: &mut [f64], rows: usize) {
    let n = d.len();
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        for j in i + 1..n {
            if d[j] < d[k] {
                k = j;
            }
        }
        if k != i {
            d.swap(i, k);
            for row in z.chunks_exact_mut(n).take(rows) {
                row.swap(i, k);
            }
        }
    }
}
