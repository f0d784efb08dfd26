//! Lifting a mode unitary to the many-photon Fock space.
//!
//! Each input basis key is evolved on its own and only the reachable output
//! sector is visited. Because `U ⊗ I_d` never mixes internal modes, the
//! evolution of a key factorizes into independent `M`-mode problems, one per
//! internal mode `α`, and the output is their product.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{permanent, ModeUnitary};
use crate::capacity;
use crate::error::{Error, Result};
use crate::fock::{enumerate_sector, MixedState, ModeLayout, OccupationVector, PureState};

/// All nonzero amplitudes `⟨S|φ(U)|T⟩` for one species of photons over the
/// `M` system modes, in ascending order of `S`.
///
/// The amplitudes equal `per(U[S,T]) / √(∏S_i! ∏T_j!)`; they are generated by
/// expanding `∏_j (Σ_k U_{kj} a†_k)^{T_j} / √T_j! |vac⟩` one creation operator
/// at a time, which yields every output permanent of the column multiset `T`
/// in one pass and avoids the alternating sums of Ryser's formula when columns
/// repeat many times.
pub fn transition_amplitudes(u: &ModeUnitary, input: &[u32]) -> Result<Vec<(Vec<u32>, Complex64)>> {
    let m = u.dimension();
    if input.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: input.len(),
        });
    }
    let n: u32 = input.iter().sum();
    let size = capacity::sector_size(n, m)?;
    capacity::check(|| format!("output sector ({n} photons, {m} modes)"), size)?;

    let mut current: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
    current.insert(vec![0; m], Complex64::new(1.0, 0.0));
    for (j, &count) in input.iter().enumerate() {
        for r in 1..=count {
            let scale = 1.0 / (r as f64).sqrt();
            let mut next: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
            for (occ, amp) in &current {
                for k in 0..m {
                    let ukj = u.entry(k, j);
                    if ukj == Complex64::default() {
                        continue;
                    }
                    let mut out = occ.clone();
                    // a†|s⟩ = √(s+1)|s+1⟩
                    let raise = ((out[k] + 1) as f64).sqrt();
                    out[k] += 1;
                    *next.entry(out).or_default() += amp * ukj * (raise * scale);
                }
            }
            current = next;
        }
    }
    Ok(current.into_iter().filter(|(_, a)| *a != Complex64::default()).collect())
}

type SpeciesTable = HashMap<Vec<u32>, Vec<(Vec<u32>, Complex64)>>;

fn species_input(key: &OccupationVector, layout: &ModeLayout, alpha: usize) -> Vec<u32> {
    (0..layout.num_systems()).map(|j| key[layout.flat(j, alpha)]).collect()
}

fn check_reachable(key: &OccupationVector, layout: &ModeLayout) -> Result<()> {
    let m = layout.num_systems();
    let mut reachable: u128 = 1;
    for alpha in 0..layout.num_internal() {
        let n: u32 = (0..m).map(|j| key[layout.flat(j, alpha)]).sum();
        reachable = reachable.saturating_mul(capacity::sector_size(n, m)?);
    }
    capacity::check(
        || format!("reachable outputs of a {}-photon key", key.total_photons()),
        reachable,
    )
}

fn evolve_key(
    key: &OccupationVector,
    amp: Complex64,
    layout: &ModeLayout,
    table: &SpeciesTable,
) -> Vec<(OccupationVector, Complex64)> {
    let d = layout.num_internal();
    let mut partial: Vec<(Vec<u32>, Complex64)> = vec![(vec![0; layout.num_modes()], amp)];
    for alpha in 0..d {
        let outs = &table[&species_input(key, layout, alpha)];
        let mut next = Vec::with_capacity(partial.len() * outs.len());
        for (occ, a) in &partial {
            for (s, b) in outs {
                let mut o = occ.clone();
                for (j, &sj) in s.iter().enumerate() {
                    o[layout.flat(j, alpha)] = sj;
                }
                next.push((o, a * b));
            }
        }
        partial = next;
    }
    partial.into_iter().map(|(o, a)| (OccupationVector::new(o), a)).collect()
}

/// Apply `φ(U ⊗ I_d)` to a pure state whose layout has `U.dimension()` systems.
/// Photon number is conserved key by key.
///
/// Keys are evolved in parallel; contributions are then summed in ascending
/// input-key order, so results do not depend on the worker count.
pub fn lift_and_apply(u: &ModeUnitary, psi: &PureState) -> Result<PureState> {
    let layout = *psi.layout();
    if layout.num_systems() != u.dimension() {
        return Err(Error::DimensionMismatch {
            expected: u.dimension(),
            found: layout.num_systems(),
        });
    }
    for key in psi.amplitudes().keys() {
        check_reachable(key, &layout)?;
    }

    let species: BTreeSet<Vec<u32>> = psi
        .amplitudes()
        .keys()
        .flat_map(|k| (0..layout.num_internal()).map(move |a| species_input(k, &layout, a)))
        .collect();
    let species: Vec<Vec<u32>> = species.into_iter().collect();
    let expansions = species
        .par_iter()
        .map(|t| transition_amplitudes(u, t))
        .collect::<Result<Vec<_>>>()?;
    let table: SpeciesTable = species.into_iter().zip(expansions).collect();

    let keys: Vec<(&OccupationVector, &Complex64)> = psi.iter().collect();
    let contributions: Vec<Vec<(OccupationVector, Complex64)>> = keys
        .par_iter()
        .map(|(k, a)| evolve_key(k, **a, &layout, &table))
        .collect();

    let mut out: BTreeMap<OccupationVector, Complex64> = BTreeMap::new();
    for contrib in contributions {
        for (k, a) in contrib {
            *out.entry(k).or_default() += a;
        }
    }
    Ok(PureState::from_map(layout, out))
}

/// Unfactored reference lift: for each key, enumerate the whole output sector
/// over all `M·d` modes and take Ryser permanents of `(U ⊗ I_d)[S,T]`.
/// Exponentially slower than [`lift_and_apply`]; intended for cross-checks.
pub fn lift_and_apply_reference(u: &ModeUnitary, psi: &PureState) -> Result<PureState> {
    let layout = *psi.layout();
    if layout.num_systems() != u.dimension() {
        return Err(Error::DimensionMismatch {
            expected: u.dimension(),
            found: layout.num_systems(),
        });
    }
    let modes = layout.num_modes();
    let d = layout.num_internal();
    let v = |row: usize, col: usize| -> Complex64 {
        let (k, a) = (row / d, row % d);
        let (j, b) = (col / d, col % d);
        if a == b {
            u.entry(k, j)
        } else {
            Complex64::default()
        }
    };
    let fact = |k: u32| (1..=k).map(|t| t as f64).product::<f64>();

    let mut out: BTreeMap<OccupationVector, Complex64> = BTreeMap::new();
    for (key, amp) in psi.iter() {
        let n = key.total_photons();
        let cols: Vec<usize> = (0..modes).flat_map(|i| std::iter::repeat_n(i, key[i] as usize)).collect();
        let t_fact: f64 = key.counts().iter().map(|&t| fact(t)).product();
        for s in enumerate_sector(n, modes)? {
            let rows: Vec<usize> = (0..modes).flat_map(|i| std::iter::repeat_n(i, s[i] as usize)).collect();
            let sub = DMatrix::from_fn(n as usize, n as usize, |r, c| v(rows[r], cols[c]));
            let s_fact: f64 = s.counts().iter().map(|&x| fact(x)).product();
            let a = permanent(&sub) / (s_fact * t_fact).sqrt();
            *out.entry(s).or_default() += amp * a;
        }
    }
    Ok(PureState::from_map(layout, out))
}

/// Evolve every pure component of a mixture; weights are unchanged.
pub fn apply_to_mixture(u: &ModeUnitary, rho: &MixedState) -> Result<MixedState> {
    let comps = rho
        .components()
        .iter()
        .map(|(w, s)| Ok((*w, lift_and_apply(u, s)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MixedState::from_parts(*rho.layout(), comps))
}
