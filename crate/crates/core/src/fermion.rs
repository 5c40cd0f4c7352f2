//! Brute-force check of the free-fermion reduction: evolve k-excitation
//! states directly and compare with determinants of single-excitation
//! propagator blocks.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::chain::{Chain, FORMAT_VERSION};
use crate::error::{invalid, Error, Result};
use crate::spectral::{eigendecompose, Eigensystem};

pub const MAX_SITES: usize = 14;
pub const MAX_EXCITATIONS: usize = 3;

/// All k-subsets of `0..n`, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcitationBasis {
    n: usize,
    k: usize,
    states: Vec<Vec<usize>>,
}

impl ExcitationBasis {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(invalid(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
        }
        let mut states = Vec::new();
        let mut current: Vec<usize> = (0..k).collect();
        loop {
            states.push(current.clone());
            // advance the rightmost index that still has room
            let Some(pos) = (0..k).rev().find(|&i| current[i] < n - k + i) else {
                break;
            };
            current[pos] += 1;
            for i in pos + 1..k {
                current[i] = current[i - 1] + 1;
            }
        }
        Ok(ExcitationBasis { n, k, states })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Vec<usize>] {
        &self.states
    }

    pub fn index_of(&self, occupied: &[usize]) -> Option<usize> {
        self.states
            .binary_search_by(|s| s.as_slice().cmp(occupied))
            .ok()
    }
}

/// The chain Hamiltonian restricted to k excitations. The diagonal holds
/// `Σ_occupied B_n`; the remaining constant of the spin form, `-½ Σ B_n`, is
/// kept in `offset` and never enters the evolution.
#[derive(Debug, Clone)]
pub struct SubspaceHamiltonian {
    pub basis: ExcitationBasis,
    pub matrix: DMatrix<f64>,
    pub offset: f64,
}

fn check_size(n: usize, k: usize) -> Result<()> {
    if n > MAX_SITES || k > MAX_EXCITATIONS {
        return Err(Error::SizeGuard(format!(
            "subspace oracle limited to N <= {MAX_SITES}, k <= {MAX_EXCITATIONS}; got N = {n}, k = {k}"
        )));
    }
    Ok(())
}

pub fn build_subspace_hamiltonian(chain: &Chain, k: usize) -> Result<SubspaceHamiltonian> {
    let n = chain.len();
    check_size(n, k)?;
    let basis = ExcitationBasis::new(n, k)?;
    let dim = basis.len();
    let (j, b) = (chain.couplings(), chain.fields());
    let mut matrix = DMatrix::<f64>::zeros(dim, dim);
    for (row, state) in basis.states().iter().enumerate() {
        matrix[(row, row)] = state.iter().map(|&s| b[s]).sum();
        // hop one excitation to an empty right neighbour; adjacent moves
        // cross no other fermion, so the amplitude carries no sign
        for (slot, &s) in state.iter().enumerate() {
            if s + 1 < n && !state.contains(&(s + 1)) {
                let mut moved = state.clone();
                moved[slot] = s + 1;
                let col = basis.index_of(&moved).expect("moved state is in the basis");
                matrix[(row, col)] = j[s];
                matrix[(col, row)] = j[s];
            }
        }
    }
    Ok(SubspaceHamiltonian {
        basis,
        matrix,
        offset: -0.5 * b.iter().sum::<f64>(),
    })
}

/// Direct evolution `exp(-iHt)` inside the subspace, from a dense
/// eigendecomposition.
pub struct SubspaceEvolution {
    basis: ExcitationBasis,
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl SubspaceEvolution {
    pub fn new(h: SubspaceHamiltonian) -> Self {
        let eig = SymmetricEigen::new(h.matrix);
        SubspaceEvolution {
            basis: h.basis,
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        }
    }

    pub fn basis(&self) -> &ExcitationBasis {
        &self.basis
    }

    pub fn propagator(&self, t: f64) -> DMatrix<Complex64> {
        let dim = self.values.len();
        let phased = DMatrix::from_fn(dim, dim, |r, m| {
            Complex64::from_polar(1.0, -self.values[m] * t) * self.vectors[(r, m)]
        });
        phased * self.vectors.transpose().map(Complex64::from)
    }

    pub fn amplitude(&self, from: &[usize], to: &[usize], t: f64) -> Result<Complex64> {
        let (Some(f), Some(g)) = (self.basis.index_of(from), self.basis.index_of(to)) else {
            return Err(invalid("site sets are not sorted k-subsets of the chain"));
        };
        Ok((0..self.values.len())
            .map(|m| {
                Complex64::from_polar(1.0, -self.values[m] * t)
                    * self.vectors[(g, m)]
                    * self.vectors[(f, m)]
            })
            .sum())
    }
}

fn check_sets(n: usize, from: &[usize], to: &[usize]) -> Result<()> {
    if from.len() != to.len() || from.is_empty() {
        return Err(invalid(
            "from and to sets must be non-empty and of equal size",
        ));
    }
    for set in [from, to] {
        if set.windows(2).any(|w| w[0] >= w[1]) || set.iter().any(|&s| s >= n) {
            return Err(invalid(
                "site sets must be strictly increasing and within the chain",
            ));
        }
    }
    Ok(())
}

/// `det U(t)[to, from]` with both sets in ascending order.
pub fn determinant_amplitude(
    eig: &Eigensystem,
    from: &[usize],
    to: &[usize],
    t: f64,
) -> Result<Complex64> {
    check_sets(eig.n(), from, to)?;
    for s in from.iter().chain(to) {
        if !eig.tracked_sites().contains(s) {
            return Err(invalid(format!("site {s} not tracked by the eigensystem")));
        }
    }
    Ok(eig.propagator_block(to, from, t).determinant())
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub format_version: u32,
    pub n: usize,
    pub k: usize,
    pub t: f64,
    pub dimension: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Largest `|direct - determinant|` over every pair of basis states.
pub fn verify_free_fermion(chain: &Chain, k: usize, t: f64) -> Result<f64> {
    let direct = SubspaceEvolution::new(build_subspace_hamiltonian(chain, k)?);
    let u_direct = direct.propagator(t);
    let u1 = eigendecompose(&chain.single_excitation_matrix())?.propagator(t);
    let states = direct.basis().states();
    let mut worst: f64 = 0.0;
    for (c, from) in states.iter().enumerate() {
        for (r, to) in states.iter().enumerate() {
            let block = DMatrix::from_fn(k, k, |a, b| u1[(to[a], from[b])]);
            worst = worst.max((block.determinant() - u_direct[(r, c)]).norm());
        }
    }
    Ok(worst)
}

pub fn oracle_report(chain: &Chain, k: usize, t: f64, tolerance: f64) -> Result<OracleReport> {
    let max_deviation = verify_free_fermion(chain, k, t)?;
    Ok(OracleReport {
        format_version: FORMAT_VERSION,
        n: chain.len(),
        k,
        t,
        dimension: ExcitationBasis::new(chain.len(), k)?.len(),
        max_deviation,
        tolerance,
        passed: max_deviation <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{pst_chain, pst_transfer_time, uniform_chain};

    #[test]
    fn basis_is_lexicographic() {
        let b = ExcitationBasis::new(4, 2).unwrap();
        let expect: Vec<Vec<usize>> = vec![
            vec![0, 1],
            vec![0, 2],
            vec![0, 3],
            vec![1, 2],
            vec![1, 3],
            vec![2, 3],
        ];
        assert_eq!(b.states(), expect.as_slice());
        assert_eq!(ExcitationBasis::new(14, 3).unwrap().len(), 364);
        assert_eq!(b.index_of(&[1, 3]), Some(4));
        assert_eq!(b.index_of(&[3, 1]), None);
    }

    #[test]
    fn k1_is_single_excitation_matrix() {
        let chain = Chain::new(vec![0.4, 1.1, 0.7], vec![0.1, -0.2, 0.3, 0.0], "c").unwrap();
        let h = build_subspace_hamiltonian(&chain, 1).unwrap();
        let dense = chain.single_excitation_matrix().to_dense();
        for (r, row) in dense.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                assert_eq!(h.matrix[(r, c)], v);
            }
        }
        assert!((h.offset + 0.1).abs() < 1e-15);
    }

    #[test]
    fn size_guard() {
        let chain = uniform_chain(15).unwrap();
        assert!(matches!(
            build_subspace_hamiltonian(&chain, 2),
            Err(Error::SizeGuard(_))
        ));
        let small = uniform_chain(6).unwrap();
        assert!(matches!(
            build_subspace_hamiltonian(&small, 4),
            Err(Error::SizeGuard(_))
        ));
    }

    #[test]
    fn determinant_at_time_zero() {
        let eig = eigendecompose(&uniform_chain(6).unwrap().single_excitation_matrix()).unwrap();
        assert!((determinant_amplitude(&eig, &[0, 2], &[0, 2], 0.0).unwrap() - 1.0).norm() < 1e-14);
        assert!(
            determinant_amplitude(&eig, &[0, 2], &[1, 2], 0.0)
                .unwrap()
                .norm()
                < 1e-14
        );
        assert!(determinant_amplitude(&eig, &[2, 0], &[1, 2], 0.0).is_err());
    }

    #[test]
    fn k1_deviation_tiny() {
        let chain = Chain::new(
            vec![0.9, 1.2, 0.5, 0.8],
            vec![0.3, 0.0, -0.1, 0.2, 0.0],
            "c",
        )
        .unwrap();
        assert!(verify_free_fermion(&chain, 1, 2.3).unwrap() <= 1e-12);
    }

    #[test]
    fn uniform_eight_two_excitations() {
        let chain = uniform_chain(8).unwrap();
        assert!(verify_free_fermion(&chain, 2, 3.7).unwrap() <= 1e-8);
    }

    #[test]
    fn pst_pair_transfers_perfectly() {
        let chain = pst_chain(6).unwrap();
        let t = pst_transfer_time(&chain).unwrap();
        let eig = eigendecompose(&chain.single_excitation_matrix()).unwrap();
        let amp = determinant_amplitude(&eig, &[0, 1], &[4, 5], t).unwrap();
        assert!((amp.norm() - 1.0).abs() < 1e-8);
        let direct = SubspaceEvolution::new(build_subspace_hamiltonian(&chain, 2).unwrap());
        assert!((direct.amplitude(&[0, 1], &[4, 5], t).unwrap() - amp).norm() < 1e-8);
    }
}
