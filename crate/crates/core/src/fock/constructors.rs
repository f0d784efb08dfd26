//! Standard state families: single photons, dual-rail qubits, truncated
//! coherent states and displaced Fock states.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{enumerate_sector, ModeLayout, OccupationVector, PureState};
use crate::error::{Error, Result};

/// One photon spread over the internal modes of a single system,
/// `Σ_α c_α a†_α |vac⟩`, normalized.
pub fn single_photon_state(internal_amplitudes: &[Complex64]) -> Result<PureState> {
    let layout = ModeLayout::single(internal_amplitudes.len())?;
    let d = internal_amplitudes.len();
    let terms = internal_amplitudes.iter().enumerate().map(|(alpha, &c)| {
        let mut occ = vec![0u32; d];
        occ[alpha] = 1;
        (OccupationVector::new(occ), c)
    });
    PureState::from_amplitudes(layout, terms).map_err(|e| match e {
        Error::InvalidState(_) => Error::InvalidArgument("single photon needs a non-zero amplitude vector".into()),
        other => other,
    })
}

/// `cos(θ/2)|1,0⟩ + e^{iφ} sin(θ/2)|0,1⟩` over two rails.
pub fn dual_rail_qubit(theta: f64, phi: f64) -> PureState {
    let (s, c) = (theta / 2.0).sin_cos();
    single_photon_state(&[Complex64::new(c, 0.0), Complex64::from_polar(s, phi)])
        .expect("dual-rail amplitudes have unit norm")
}

/// A state obtained by cutting an infinite photon-number expansion, with the
/// probability mass that was discarded.
#[derive(Clone, Debug)]
pub struct Truncated {
    pub state: PureState,
    pub tail_mass: f64,
    pub cutoff: usize,
    /// Smallest cutoff meeting the tolerance that was used to build this
    /// state; filled in by the constructors for error reporting.
    suggested: Option<usize>,
}

impl Truncated {
    /// Accept the truncation if the discarded mass is at most `tolerance`.
    pub fn within(self, tolerance: f64) -> Result<PureState> {
        if self.tail_mass > tolerance {
            return Err(Error::Truncation {
                tail_mass: self.tail_mass,
                tolerance,
                suggested_cutoff: self.suggested.unwrap_or(self.cutoff + 1),
            });
        }
        Ok(self.state)
    }
}

/// `P(N > cutoff)` for `N ~ Poisson(mean)`.
pub(crate) fn poisson_tail(mean: f64, cutoff: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    // sum the tail directly so that tiny tails keep their relative precision
    let mut term = (-mean).exp();
    for n in 1..=cutoff {
        term *= mean / n as f64;
    }
    let mut tail = 0.0;
    let mut n = cutoff + 1;
    loop {
        term *= mean / n as f64;
        tail += term;
        if (n as f64) > mean && term <= tail * 1e-17 {
            break;
        }
        if term == 0.0 && (n as f64) > mean {
            break;
        }
        n += 1;
    }
    tail.min(1.0)
}

/// Smallest total-photon cutoff whose discarded Poisson mass is ≤ `tolerance`.
pub fn coherent_cutoff(mean_photons: f64, tolerance: f64) -> usize {
    let mut cutoff = mean_photons.floor() as usize;
    while poisson_tail(mean_photons, cutoff) > tolerance {
        cutoff += 1;
    }
    if mean_photons == 0.0 {
        0
    } else {
        cutoff
    }
}

const MAX_MEAN_PHOTONS: f64 = 400.0;

/// Multimode coherent state `|β⟩` keeping total photon numbers ≤ `cutoff`,
/// renormalized. The discarded Poisson mass is reported in the result.
pub fn truncated_coherent_state(beta: &[Complex64], cutoff: usize) -> Result<Truncated> {
    let layout = ModeLayout::single(beta.len())?;
    let mean: f64 = beta.iter().map(|b| b.norm_sqr()).sum();
    if !mean.is_finite() || mean > MAX_MEAN_PHOTONS {
        return Err(Error::InvalidArgument(format!(
            "coherent amplitude with mean photon number {mean} is out of range"
        )));
    }
    let d = beta.len();
    // table[α][k] = β_α^k / √k!
    let tables: Vec<Vec<Complex64>> = beta
        .iter()
        .map(|&b| {
            let mut t = Vec::with_capacity(cutoff + 1);
            let mut v = Complex64::new(1.0, 0.0);
            t.push(v);
            for k in 1..=cutoff {
                v = v * b / (k as f64).sqrt();
                t.push(v);
            }
            t
        })
        .collect();

    let mut terms = Vec::new();
    for n in 0..=cutoff as u32 {
        for occ in enumerate_sector(n, d)? {
            let amp = occ
                .counts()
                .iter()
                .enumerate()
                .fold(Complex64::new(1.0, 0.0), |acc, (alpha, &k)| acc * tables[alpha][k as usize]);
            terms.push((occ, amp));
        }
    }
    let state = PureState::from_amplitudes(layout, terms)?;
    let tail_mass = poisson_tail(mean, cutoff);
    Ok(Truncated {
        state,
        tail_mass,
        cutoff,
        suggested: Some(coherent_cutoff(mean, 1e-7).max(cutoff + 1)),
    })
}

/// Amplitudes `⟨m|D(α)|n⟩` for `m = 0..=cutoff`, from
/// `D(α)|n⟩ = (a† − α*)^n |α⟩ / √n!`. Each entry depends only on lower-index
/// coherent amplitudes, so the truncated vector is exact entry by entry.
fn displaced_fock_single(alpha: Complex64, n: u32, cutoff: usize) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(cutoff + 1);
    let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    v.push(c);
    for m in 1..=cutoff {
        c = c * alpha / (m as f64).sqrt();
        v.push(c);
    }
    let ac = alpha.conj();
    for k in 1..=n {
        let mut next = vec![Complex64::default(); cutoff + 1];
        for m in 0..=cutoff {
            let raised = if m > 0 { v[m - 1] * (m as f64).sqrt() } else { Complex64::default() };
            next[m] = raised - ac * v[m];
        }
        let scale = 1.0 / (k as f64).sqrt();
        v = next.into_iter().map(|z| z * scale).collect();
    }
    v
}

/// Multimode displaced Fock state `D(α)|n⟩` (one displacement and one Fock
/// index per internal mode), keeping total photon numbers ≤ `cutoff`.
pub fn displaced_fock_state(alpha: &[Complex64], fock: &[u32], cutoff: usize) -> Result<Truncated> {
    if alpha.len() != fock.len() {
        return Err(Error::DimensionMismatch {
            expected: alpha.len(),
            found: fock.len(),
        });
    }
    let layout = ModeLayout::single(alpha.len())?;
    let mean: f64 = alpha.iter().map(|b| b.norm_sqr()).sum();
    if !mean.is_finite() || mean > MAX_MEAN_PHOTONS {
        return Err(Error::InvalidArgument(format!(
            "displacement with mean photon number {mean} is out of range"
        )));
    }
    let d = alpha.len();
    let singles: Vec<Vec<Complex64>> = alpha
        .iter()
        .zip(fock)
        .map(|(&a, &n)| displaced_fock_single(a, n, cutoff))
        .collect();

    let mut terms = Vec::new();
    let mut kept = 0.0;
    for total in 0..=cutoff as u32 {
        for occ in enumerate_sector(total, d)? {
            let amp = occ
                .counts()
                .iter()
                .enumerate()
                .fold(Complex64::new(1.0, 0.0), |acc, (m, &k)| acc * singles[m][k as usize]);
            kept += amp.norm_sqr();
            terms.push((occ, amp));
        }
    }
    let tail_mass = (1.0 - kept).max(0.0);
    let state = PureState::from_amplitudes(layout, terms)?;
    let guess = (mean + fock.iter().sum::<u32>() as f64).ceil() as usize;
    Ok(Truncated {
        state,
        tail_mass,
        cutoff,
        suggested: Some(guess.max(cutoff + 1)),
    })
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random single photon over `d` internal modes.
pub fn random_single_photon<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<PureState> {
    let amps: Vec<Complex64> = (0..d).map(|_| complex_gaussian(rng)).collect();
    single_photon_state(&amps)
}

/// Random pure state of one system with Gaussian amplitudes on every
/// occupation vector of total photon number ≤ `max_photons`.
pub fn random_pure_state<R: Rng + ?Sized>(d: usize, max_photons: u32, rng: &mut R) -> Result<PureState> {
    let layout = ModeLayout::single(d)?;
    let mut terms = Vec::new();
    for n in 0..=max_photons {
        for occ in enumerate_sector(n, d)? {
            terms.push((occ, complex_gaussian(rng)));
        }
    }
    PureState::from_amplitudes(layout, terms)
}
