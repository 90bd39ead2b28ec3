//! Wigner matrix simulation and verification of mesoscopic linear
//! eigenvalue statistics.
//!
//! The crate samples Wigner ensembles, computes linear statistics of their
//! spectra on mesoscopic windows eta = N^{-alpha}, and checks the empirical
//! laws against the limiting Gaussian-process predictions: the resolvent
//! covariance kernel -2/(b1 - conj b2)^2, the H^{1/2} variance of general
//! test functions, the complex-class halving, the expectation-bias decay,
//! and the local semicircle law. It also samples the limiting processes
//! themselves and cross-checks traces through the Helffer-Sjostrand
//! functional calculus.
//!
//! Modules follow the pipeline: [`ensemble`] draws matrices, [`spectral`]
//! turns them into spectra and resolvents, [`theory`] provides the
//! deterministic predictions, [`gp`] samples the limits, [`hs`] verifies
//! the functional calculus, and [`stats`] runs the Monte Carlo experiments
//! that tie them together.

// Validation uses `!(x > 0.0)` deliberately: unlike `x <= 0.0` it also
// rejects NaN inputs.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ensemble;
pub mod error;
pub mod gp;
pub mod hs;
pub mod quad;
pub mod rng;
pub mod spectral;
pub mod stats;
pub mod sum;
pub mod theory;

pub use ensemble::{sample_matrix, EnsembleSpec, EntryLaw, MatrixSample, SymmetryClass};
pub use error::{Error, Result};
pub use gp::GPConfig;
pub use hs::{AlmostAnalyticExtension, CutoffFunction, ExtensionVariant};
pub use spectral::{eigenvalues, Spectrum};
pub use stats::{Est, EstC};
pub use theory::{MesoscopicScale, TestFunction};
