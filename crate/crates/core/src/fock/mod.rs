//! Fock-space foundation: mode layouts, occupation vectors, sparse pure states
//! and convex mixtures.
//!
//! Modes are labelled by a system index `j` (one per interfering state) and an
//! internal index `α` (polarization, rail, frequency bin, ...). Every module in
//! the crate uses the same flat ordering `flat(j, α) = j·d + α`.

mod constructors;
mod serial;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::capacity;
use crate::error::{Error, Result};

pub use constructors::{
    coherent_cutoff, displaced_fock_state, dual_rail_qubit, random_pure_state,
    random_single_photon, single_photon_state, truncated_coherent_state, Truncated,
};
pub use serial::{ComponentDoc, LayoutDoc, MixedStateDoc, PureStateDoc, TermDoc};

/// Amplitudes with modulus below this are dropped after arithmetic.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Tolerance for normalization and weight-sum invariants.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Shape of the mode grid: `num_systems` systems, each with `num_internal`
/// internal modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LayoutDoc", into = "LayoutDoc")]
pub struct ModeLayout {
    num_systems: usize,
    num_internal: usize,
}

impl ModeLayout {
    pub fn new(num_systems: usize, num_internal: usize) -> Result<Self> {
        if num_systems == 0 || num_internal == 0 {
            return Err(Error::InvalidArgument(format!(
                "layout needs positive sizes, got M={num_systems}, d={num_internal}"
            )));
        }
        Ok(Self {
            num_systems,
            num_internal,
        })
    }

    /// Layout of a single system with `d` internal modes.
    pub fn single(num_internal: usize) -> Result<Self> {
        Self::new(1, num_internal)
    }

    pub fn num_systems(&self) -> usize {
        self.num_systems
    }

    pub fn num_internal(&self) -> usize {
        self.num_internal
    }

    /// Total number of flat modes, `M·d`.
    pub fn num_modes(&self) -> usize {
        self.num_systems * self.num_internal
    }

    #[inline]
    pub fn flat(&self, system: usize, internal: usize) -> usize {
        debug_assert!(system < self.num_systems && internal < self.num_internal);
        system * self.num_internal + internal
    }

    #[inline]
    pub fn unflat(&self, index: usize) -> (usize, usize) {
        debug_assert!(index < self.num_modes());
        (index / self.num_internal, index % self.num_internal)
    }
}

/// Photon counts over the flat mode grid. Ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationVector(Vec<u32>);

impl OccupationVector {
    pub fn new(counts: Vec<u32>) -> Self {
        Self(counts)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_photons(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }

    /// Counts of system `j`, i.e. the block `[j·d, (j+1)·d)`.
    pub fn system_block(&self, layout: &ModeLayout, system: usize) -> &[u32] {
        let d = layout.num_internal();
        &self.0[system * d..(system + 1) * d]
    }
}

impl From<Vec<u32>> for OccupationVector {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl std::ops::Index<usize> for OccupationVector {
    type Output = u32;
    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

/// All weak compositions of `total` into `num_modes` parts, in
/// lexicographically descending order: `(2,0), (1,1), (0,2)`.
pub fn enumerate_sector(total: u32, num_modes: usize) -> Result<Vec<OccupationVector>> {
    let size = capacity::sector_size(total, num_modes)?;
    capacity::check(|| format!("sector ({total} photons, {num_modes} modes)"), size)?;

    let mut out = Vec::with_capacity(size as usize);
    let mut current = vec![0u32; num_modes];
    fill_descending(&mut current, 0, total, &mut out);
    debug_assert_eq!(out.len() as u128, size);
    Ok(out)
}

fn fill_descending(current: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<OccupationVector>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(OccupationVector(current.to_vec()));
        return;
    }
    for k in (0..=remaining).rev() {
        current[pos] = k;
        fill_descending(current, pos + 1, remaining - k, out);
    }
    current[pos] = 0;
}

/// Sparse pure state over a fixed layout. Keys may carry different total photon
/// numbers; absent keys have amplitude zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    layout: ModeLayout,
    amplitudes: BTreeMap<OccupationVector, Complex64>,
}

impl PureState {
    /// Build a normalized state from (possibly unnormalized, possibly repeated)
    /// terms. Repeated keys are summed.
    pub fn from_amplitudes<I>(layout: ModeLayout, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (OccupationVector, Complex64)>,
    {
        let mut map: BTreeMap<OccupationVector, Complex64> = BTreeMap::new();
        for (key, amp) in terms {
            if key.len() != layout.num_modes() {
                return Err(Error::LayoutMismatch(format!(
                    "occupation vector of length {} in a layout with {} modes",
                    key.len(),
                    layout.num_modes()
                )));
            }
            if !(amp.re.is_finite() && amp.im.is_finite()) {
                return Err(Error::InvalidState("non-finite amplitude".into()));
            }
            *map.entry(key).or_default() += amp;
        }
        let mut state = Self::from_map(layout, map);
        let norm = state.norm_sqr().sqrt();
        if norm <= PRUNE_THRESHOLD {
            return Err(Error::InvalidState("state has zero norm".into()));
        }
        for amp in state.amplitudes.values_mut() {
            *amp /= norm;
        }
        Ok(state)
    }

    /// Wrap an amplitude map without renormalizing; tiny entries are pruned.
    pub(crate) fn from_map(layout: ModeLayout, mut map: BTreeMap<OccupationVector, Complex64>) -> Self {
        map.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
        Self {
            layout,
            amplitudes: map,
        }
    }

    pub fn vacuum(layout: ModeLayout) -> Self {
        let mut map = BTreeMap::new();
        map.insert(OccupationVector::zeros(layout.num_modes()), Complex64::new(1.0, 0.0));
        Self {
            layout,
            amplitudes: map,
        }
    }

    /// Fock basis state with the given flat occupations.
    pub fn fock(layout: ModeLayout, occupations: Vec<u32>) -> Result<Self> {
        Self::from_amplitudes(layout, [(OccupationVector(occupations), Complex64::new(1.0, 0.0))])
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &BTreeMap<OccupationVector, Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, key: &OccupationVector) -> Complex64 {
        self.amplitudes.get(key).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&OccupationVector, &Complex64)> {
        self.amplitudes.iter()
    }

    /// Number of stored basis keys.
    pub fn support_size(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn max_photons(&self) -> u32 {
        self.amplitudes.keys().map(|k| k.total_photons()).max().unwrap_or(0)
    }

    /// Probability of each total photon number.
    pub fn photon_number_distribution(&self) -> BTreeMap<u32, f64> {
        let mut dist = BTreeMap::new();
        for (k, a) in &self.amplitudes {
            *dist.entry(k.total_photons()).or_insert(0.0) += a.norm_sqr();
        }
        dist
    }
}

/// `⟨a|b⟩ = Σ conj(a_v)·b_v` over shared keys.
pub fn inner_product(a: &PureState, b: &PureState) -> Result<Complex64> {
    if a.layout != b.layout {
        return Err(Error::LayoutMismatch(format!(
            "inner product of {:?} and {:?}",
            a.layout, b.layout
        )));
    }
    // walk the smaller map, look up in the larger one
    let (small, large, conj_small) = if a.amplitudes.len() <= b.amplitudes.len() {
        (a, b, true)
    } else {
        (b, a, false)
    };
    let mut acc = Complex64::default();
    for (key, &x) in &small.amplitudes {
        if let Some(&y) = large.amplitudes.get(key) {
            acc += if conj_small { x.conj() * y } else { y.conj() * x };
        }
    }
    Ok(acc)
}

/// Convex mixture of pure states sharing one layout.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedState {
    layout: ModeLayout,
    components: Vec<(f64, PureState)>,
}

impl MixedState {
    pub fn new(components: Vec<(f64, PureState)>) -> Result<Self> {
        let Some((_, first)) = components.first() else {
            return Err(Error::InvalidState("mixture needs at least one component".into()));
        };
        let layout = first.layout;
        let mut total = 0.0;
        for (w, s) in &components {
            if !(*w > 0.0 && *w <= 1.0 + NORM_TOLERANCE) {
                return Err(Error::InvalidState(format!("mixture weight {w} outside (0, 1]")));
            }
            if s.layout != layout {
                return Err(Error::LayoutMismatch("mixture components differ in layout".into()));
            }
            if (s.norm_sqr() - 1.0).abs() > NORM_TOLERANCE {
                return Err(Error::InvalidState(format!(
                    "mixture component has norm² {}",
                    s.norm_sqr()
                )));
            }
            total += w;
        }
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("mixture weights sum to {total}")));
        }
        Ok(Self { layout, components })
    }

    pub fn pure(state: PureState) -> Self {
        Self {
            layout: state.layout,
            components: vec![(1.0, state)],
        }
    }

    /// Equal-weight mixture of the given states.
    pub fn uniform(states: Vec<PureState>) -> Result<Self> {
        let w = 1.0 / states.len().max(1) as f64;
        Self::new(states.into_iter().map(|s| (w, s)).collect())
    }

    /// Mixture assembled by a trusted transformation (weights already valid).
    pub(crate) fn from_parts(layout: ModeLayout, components: Vec<(f64, PureState)>) -> Self {
        Self { layout, components }
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn components(&self) -> &[(f64, PureState)] {
        &self.components
    }

    pub fn is_pure(&self) -> bool {
        self.components.len() == 1
    }

    pub fn max_photons(&self) -> u32 {
        self.components.iter().map(|(_, s)| s.max_photons()).max().unwrap_or(0)
    }

    pub fn weight_sum(&self) -> f64 {
        self.components.iter().map(|(w, _)| w).sum()
    }
}

impl From<PureState> for MixedState {
    fn from(state: PureState) -> Self {
        Self::pure(state)
    }
}

/// `ρ_1 ⊗ ρ_2 ⊗ … ⊗ ρ_M` for single-system states sharing `d`. Occupation
/// vectors are concatenated in system order; mixtures distribute.
pub fn tensor_product(states: &[MixedState]) -> Result<MixedState> {
    let Some(first) = states.first() else {
        return Err(Error::InvalidArgument("tensor product of zero states".into()));
    };
    let d = first.layout.num_internal();
    for s in states {
        if s.layout.num_systems() != 1 {
            return Err(Error::LayoutMismatch(format!(
                "tensor factors must be single-system states, got M={}",
                s.layout.num_systems()
            )));
        }
        if s.layout.num_internal() != d {
            return Err(Error::LayoutMismatch(format!(
                "internal dimensions differ: {} vs {d}",
                s.layout.num_internal()
            )));
        }
    }
    let layout = ModeLayout::new(states.len(), d)?;

    let mut acc: Vec<(f64, Vec<&PureState>)> = vec![(1.0, Vec::new())];
    for s in states {
        let mut next = Vec::with_capacity(acc.len() * s.components.len());
        for (w, factors) in &acc {
            for (wc, c) in &s.components {
                let mut f = factors.clone();
                f.push(c);
                next.push((w * wc, f));
            }
        }
        acc = next;
    }

    let components = acc
        .into_iter()
        .map(|(w, factors)| (w, pure_product(layout, &factors)))
        .collect();
    Ok(MixedState::from_parts(layout, components))
}

fn pure_product(layout: ModeLayout, factors: &[&PureState]) -> PureState {
    let mut terms: Vec<(Vec<u32>, Complex64)> = vec![(Vec::with_capacity(layout.num_modes()), Complex64::new(1.0, 0.0))];
    for f in factors {
        let mut next = Vec::with_capacity(terms.len() * f.amplitudes.len());
        for (key, amp) in &terms {
            for (k, a) in &f.amplitudes {
                let mut v = key.clone();
                v.extend_from_slice(k.counts());
                next.push((v, amp * a));
            }
        }
        terms = next;
    }
    let map = terms
        .into_iter()
        .map(|(k, a)| (OccupationVector(k), a))
        .collect();
    PureState::from_map(layout, map)
}
