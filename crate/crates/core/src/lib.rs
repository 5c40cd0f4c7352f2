//! Quantum state transfer through disordered XX spin chains.
//!
//! The crate covers the whole pipeline: chain families and their
//! single-excitation spectra, optimal single-excitation encodings from the
//! singular value decomposition of windowed propagators, closed-form fidelity
//! formulas for single- and multi-excitation codes, seeded disorder ensembles
//! with quantile statistics, re-optimization of end couplings against
//! disorder, and a brute-force free-fermion check of the multi-excitation
//! reduction.

pub mod chain;
pub mod disorder;
pub mod encoding;
pub mod error;
pub mod fermion;
pub mod inverse;
pub mod models;
pub mod montecarlo;
pub mod nelder_mead;
pub mod peak;
pub mod robust;
pub mod spectral;
pub mod stats;
pub mod svd;

pub use chain::{Chain, SingleExcitationMatrix, TransferWindow};
pub use disorder::{CouplingMode, DisorderSpec, Distribution, FieldMode};
pub use encoding::{EncodingSolution, TransferMatrix};
pub use error::{Error, Result};
pub use inverse::SpectrumTarget;
pub use montecarlo::{SweepAxis, SweepDescriptor, SweepGrid, TimePolicy, WindowPolicy};
pub use robust::{Metric, Objective, OptimizationResult};
pub use spectral::{eigendecompose, Eigensystem};
pub use stats::FidelityStats;
