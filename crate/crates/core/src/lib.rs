//! Linear-optical estimation of multivariate traces `tr(ρ_1 ρ_2 … ρ_M)`.
//!
//! States of `M` systems, each carrying `d` internal modes, are interfered on
//! an `M`-port Fourier interferometer. Photon counting, binning by
//! `f(S) = Σ_j j·S_j mod M` and a discrete Fourier transform recover the
//! cyclic expectations `X_k`, of which `X_1` is the trace of the product.
//!
//! [`protocol::estimate_multivariate_trace`] is the main entry point;
//! [`oracle`] holds independent density-matrix references.

pub mod applications;
pub mod capacity;
pub mod cli;
pub mod error;
pub mod fock;
pub mod interferometer;
pub mod oracle;
pub mod protocol;

pub use error::{Error, Result};
