//! Quantities built on the trace estimator: state overlaps, Rényi entropies,
//! spectra, kernel matrices and phase-space quasiprobabilities.

mod kernel;
mod quasi;
mod spectrum;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::MixedState;
use crate::oracle::LIFT_TOLERANCE;
use crate::protocol::{estimate_multivariate_trace, Mode};

pub use kernel::{classifier_eval, kernel_matrix, KernelMatrix};
pub use quasi::{
    husimi_grid, husimi_q, husimi_reference, kirkwood_dirac, positive_p, positive_p_reference, wigner_grid,
    wigner_point, wigner_reference, GridPoint, QuasiGrid, WignerSeries, HUSIMI_TAIL_TOLERANCE,
    WIGNER_REMAINDER_TOLERANCE,
};
pub use spectrum::{spectrum_from_power_traces, spectrum_from_traces, SpectrumReport};

/// Overlap `tr(ρ_1 ρ_2)` from two-state interference.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomOverlap {
    /// `2·P_0 − 1`, clipped to `[−2ε, 1 + 2ε]` in sampled mode.
    pub value: f64,
    /// Unclipped `2·P_0 − 1`.
    pub raw: f64,
    #[serde(rename = "P0")]
    pub p0: f64,
    /// Interval holding the overlap with probability `1 − δ`; a single point
    /// in exact mode.
    pub lower: f64,
    pub upper: f64,
}

pub fn hom_overlap(rho1: &MixedState, rho2: &MixedState, mode: Mode) -> Result<HomOverlap> {
    let e = estimate_multivariate_trace(&[rho1.clone(), rho2.clone()], mode)?;
    let p0 = e.p0();
    let raw = 2.0 * p0 - 1.0;
    let eps = e.epsilon;
    let value = if mode.is_exact() {
        raw
    } else {
        raw.clamp(-2.0 * eps, 1.0 + 2.0 * eps)
    };
    Ok(HomOverlap {
        value,
        raw,
        p0,
        lower: raw - 2.0 * eps,
        upper: raw + 2.0 * eps,
    })
}

/// `H_α(ρ) = ln tr(ρ^α) / (1 − α)` for integer `α ≥ 2`, from `α` copies of `ρ`.
pub fn renyi_entropy(rho: &MixedState, alpha: usize, mode: Mode) -> Result<f64> {
    let t = power_trace(rho, alpha, mode)?;
    if t <= 0.0 {
        return Err(Error::UndefinedEntropy(t));
    }
    Ok(t.ln() / (1.0 - alpha as f64))
}

/// `tr(ρ^k)` for `k ≥ 2`. In exact mode the imaginary part must vanish.
pub(crate) fn power_trace(rho: &MixedState, k: usize, mode: Mode) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("power must be at least 2, got {k}")));
    }
    let copies = vec![rho.clone(); k];
    let delta = estimate_multivariate_trace(&copies, mode)?.delta;
    if mode.is_exact() && (delta.im.abs() > LIFT_TOLERANCE || delta.re <= 0.0) {
        return Err(Error::Consistency(format!("tr(ρ^{k}) = {delta} is not real positive")));
    }
    Ok(delta.re)
}
