//! Phase-space quasiprobabilities as overlaps and third-order traces.
//!
//! Coherent and displaced Fock states are truncated in total photon number
//! and renormalized by the constructors. Every amplitude kept is exact, so
//! when the cutoff covers the support of `ρ` the overlap with the truncated
//! state, rescaled by the kept mass, equals the untruncated overlap.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hom_overlap;
use crate::error::{Error, Result};
use crate::fock::{
    coherent_cutoff, displaced_fock_state, enumerate_sector, inner_product, truncated_coherent_state, MixedState,
    PureState,
};
use crate::oracle::direct_multivariate_trace;
use crate::protocol::{estimate_multivariate_trace, Mode};

/// Largest discarded coherent-state mass accepted for an explicit cutoff.
pub const HUSIMI_TAIL_TOLERANCE: f64 = 1e-7;

/// Discarded mass targeted when the cutoff is chosen automatically.
const AUTO_TAIL: f64 = 1e-12;

/// Largest unsummed probability mass accepted in the Wigner parity series.
pub const WIGNER_REMAINDER_TOLERANCE: f64 = 1e-10;

/// Highest total photon number the adaptive Wigner series will reach.
const MAX_SERIES_ORDER: usize = 400;

fn check_dimension(rho: &MixedState, alpha: &[Complex64]) -> Result<()> {
    let d = rho.layout().num_internal();
    if alpha.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: alpha.len(),
        });
    }
    Ok(())
}

/// Coherent state for overlaps with `rho`, and the mass it keeps.
fn coherent_for(rho: &MixedState, alpha: &[Complex64], cutoff: Option<usize>) -> Result<(PureState, f64)> {
    let mean: f64 = alpha.iter().map(|a| a.norm_sqr()).sum();
    let t = match cutoff {
        Some(c) => truncated_coherent_state(alpha, c)?,
        None => {
            let c = coherent_cutoff(mean, AUTO_TAIL).max(rho.max_photons() as usize);
            truncated_coherent_state(alpha, c)?
        }
    };
    let kept = 1.0 - t.tail_mass;
    Ok((t.within(HUSIMI_TAIL_TOLERANCE)?, kept))
}

/// `Q(α) = ⟨α|ρ|α⟩ / π^d`.
pub fn husimi_q(rho: &MixedState, alpha: &[Complex64], cutoff: Option<usize>, mode: Mode) -> Result<f64> {
    check_dimension(rho, alpha)?;
    let (coherent, kept) = coherent_for(rho, alpha, cutoff)?;
    let overlap = hom_overlap(rho, &coherent.into(), mode)?.value * kept;
    Ok(overlap / PI.powi(alpha.len() as i32))
}

/// [`husimi_q`] from the Gram chain of the same truncated coherent state.
pub fn husimi_reference(rho: &MixedState, alpha: &[Complex64], cutoff: Option<usize>) -> Result<f64> {
    check_dimension(rho, alpha)?;
    let (coherent, kept) = coherent_for(rho, alpha, cutoff)?;
    let overlap = direct_multivariate_trace(&[rho.clone(), coherent.into()])?.re * kept;
    Ok(overlap / PI.powi(alpha.len() as i32))
}

/// `⟨b|a⟩⟨a|ρ|b⟩ = tr(|a⟩⟨a| ρ |b⟩⟨b|)`.
pub fn kirkwood_dirac(rho: &MixedState, a: &PureState, b: &PureState, mode: Mode) -> Result<Complex64> {
    let states = [a.clone().into(), rho.clone(), b.clone().into()];
    Ok(estimate_multivariate_trace(&states, mode)?.delta)
}

/// `P(α, β) = ⟨β|α⟩⟨α|ρ|β⟩ / π^{2d}`.
pub fn positive_p(
    rho: &MixedState,
    alpha: &[Complex64],
    beta: &[Complex64],
    cutoff: Option<usize>,
    mode: Mode,
) -> Result<Complex64> {
    check_dimension(rho, alpha)?;
    check_dimension(rho, beta)?;
    let (a, ka) = coherent_for(rho, alpha, cutoff)?;
    let (b, kb) = coherent_for(rho, beta, cutoff)?;
    let delta = estimate_multivariate_trace(&[a.into(), rho.clone(), b.into()], mode)?.delta;
    Ok(delta * (ka * kb) / PI.powi(2 * alpha.len() as i32))
}

/// [`positive_p`] from the Gram chain of the same truncated coherent states.
pub fn positive_p_reference(
    rho: &MixedState,
    alpha: &[Complex64],
    beta: &[Complex64],
    cutoff: Option<usize>,
) -> Result<Complex64> {
    check_dimension(rho, alpha)?;
    check_dimension(rho, beta)?;
    let (a, ka) = coherent_for(rho, alpha, cutoff)?;
    let (b, kb) = coherent_for(rho, beta, cutoff)?;
    let chain = direct_multivariate_trace(&[a.into(), rho.clone(), b.into()])?;
    Ok(chain * (ka * kb) / PI.powi(2 * alpha.len() as i32))
}

/// Wigner value with the parity series order used and its remainder bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerSeries {
    pub value: f64,
    pub n_max: usize,
    /// `1 − Σ_{|n| ≤ n_max} ⟨n|D(α)† ρ D(α)|n⟩`; the truncation error of
    /// `value` is at most `(2/π)^d` times this.
    pub remainder: f64,
}

/// `W(α) = (2/π)^d Σ_n (−1)^{|n|} ⟨n|D(α)† ρ D(α)|n⟩`, each term an overlap
/// of `ρ` with a displaced Fock state.
///
/// Without `n_max` the series runs until the remainder drops below
/// [`WIGNER_REMAINDER_TOLERANCE`]. The displacement cutoff defaults to the
/// largest photon number in `ρ` and may not be smaller.
pub fn wigner_point(
    rho: &MixedState,
    alpha: &[Complex64],
    n_max: Option<usize>,
    cutoff: Option<usize>,
    mode: Mode,
) -> Result<WignerSeries> {
    wigner_series(rho, alpha, n_max, cutoff, Some(mode))
}

/// [`wigner_point`] with every term taken from exact inner products.
pub fn wigner_reference(
    rho: &MixedState,
    alpha: &[Complex64],
    n_max: Option<usize>,
    cutoff: Option<usize>,
) -> Result<WignerSeries> {
    wigner_series(rho, alpha, n_max, cutoff, None)
}

fn wigner_series(
    rho: &MixedState,
    alpha: &[Complex64],
    n_max: Option<usize>,
    cutoff: Option<usize>,
    mode: Option<Mode>,
) -> Result<WignerSeries> {
    check_dimension(rho, alpha)?;
    let d = alpha.len();
    let support = rho.max_photons() as usize;
    let cutoff = cutoff.unwrap_or(support);
    if cutoff < support {
        return Err(Error::InvalidArgument(format!(
            "displacement cutoff {cutoff} is below the photon support {support} of the state"
        )));
    }
    let limit = n_max.unwrap_or(MAX_SERIES_ORDER);

    let mut sum = 0.0;
    let mut captured = 0.0;
    let mut term = 0u64;
    let mut order = 0;
    loop {
        let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
        for n in enumerate_sector(order as u32, d)? {
            let mode = mode.map(|m| m.substream(term));
            if let Some((estimate, exact)) = displaced_overlap(rho, alpha, n.counts(), cutoff, mode)? {
                sum += sign * estimate;
                captured += exact;
            }
            term += 1;
        }
        let remainder = (1.0 - captured).max(0.0);
        let done = match n_max {
            Some(n) => order >= n,
            None => order >= support && remainder <= WIGNER_REMAINDER_TOLERANCE,
        };
        if done || order >= limit {
            if remainder > WIGNER_REMAINDER_TOLERANCE {
                return Err(Error::SeriesNotConverged { remainder, n_max: order });
            }
            return Ok(WignerSeries {
                value: (2.0 / PI).powi(d as i32) * sum,
                n_max: order,
                remainder,
            });
        }
        order += 1;
    }
}

/// Estimate and exact value of `⟨n|D† ρ D|n⟩`; the estimate comes from the
/// protocol when a mode is given. `None` when the displaced state has no
/// weight on the kept photon numbers.
fn displaced_overlap(
    rho: &MixedState,
    alpha: &[Complex64],
    n: &[u32],
    cutoff: usize,
    mode: Option<Mode>,
) -> Result<Option<(f64, f64)>> {
    let t = match displaced_fock_state(alpha, n, cutoff) {
        Ok(t) => t,
        // every kept amplitude fell below the pruning threshold
        Err(Error::InvalidState(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let kept = 1.0 - t.tail_mass;
    let state = t.state;
    if kept <= 0.0 {
        return Ok(None);
    }
    let mut exact = 0.0;
    for (w, phi) in rho.components() {
        exact += w * inner_product(phi, &state)?.norm_sqr();
    }
    let estimate = match mode {
        Some(mode) => hom_overlap(rho, &state.into(), mode)?.value,
        None => exact,
    };
    Ok(Some((estimate * kept, exact * kept)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub value: f64,
}

/// Values on a rectangular grid of single-mode `α`, ordered with the real
/// part varying slowest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiGrid {
    pub points: Vec<GridPoint>,
}

impl QuasiGrid {
    /// Evaluate `f(α, index)` on every grid point; `index` is the point's
    /// position in the output and doubles as its sampling stream.
    pub fn evaluate<F>(re: &[f64], im: &[f64], f: F) -> Result<Self>
    where
        F: Fn(Complex64, u64) -> Result<f64> + Sync,
    {
        let coords: Vec<(f64, f64)> = re.iter().flat_map(|&x| im.iter().map(move |&y| (x, y))).collect();
        let points = coords
            .par_iter()
            .enumerate()
            .map(|(i, &(x, y))| {
                f(Complex64::new(x, y), i as u64).map(|value| GridPoint {
                    alpha_re: x,
                    alpha_im: y,
                    value,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { points })
    }

    /// `Σ value · cell` for a grid of uniform spacing.
    pub fn integrate(&self, cell_area: f64) -> f64 {
        self.points.iter().map(|p| p.value).sum::<f64>() * cell_area
    }
}

/// Husimi function of a single-mode state on a grid.
pub fn husimi_grid(rho: &MixedState, re: &[f64], im: &[f64], mode: Mode) -> Result<QuasiGrid> {
    QuasiGrid::evaluate(re, im, |a, i| husimi_q(rho, &[a], None, mode.substream(i)))
}

/// Wigner function of a single-mode state on a grid.
pub fn wigner_grid(rho: &MixedState, re: &[f64], im: &[f64], n_max: Option<usize>, mode: Mode) -> Result<QuasiGrid> {
    QuasiGrid::evaluate(re, im, |a, i| {
        // each point's series terms get their own block of streams
        wigner_point(rho, &[a], n_max, None, mode.substream(i << 32)).map(|w| w.value)
    })
}
