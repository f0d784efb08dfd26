//! Multivariate trace estimation by Fourier interferometry.
//!
//! The pipeline for states `ρ_1 … ρ_M`:
//!
//! 1. prepare `Ω = ρ_1 ⊗ … ⊗ ρ_M`;
//! 2. send it through the inverse Fourier interferometer, `Ω_out = F† Ω F`;
//! 3. count photons per system ignoring internal modes, giving `S = (S_0 … S_{M−1})`;
//! 4. bin each outcome by `f(S) = Σ_j j·S_j mod M` and estimate `P_j`;
//! 5. recover `X_k = Σ_j ω^{jk} P_j`. Then `X_1 = tr(ρ_1 ρ_2 … ρ_M)`.
//!
//! Sampled mode draws from the exact outcome distribution and uses only the
//! empirical bin frequencies, exactly as an experiment would.

pub mod dft;
mod sampling;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{tensor_product, MixedState, ModeLayout, OccupationVector, NORM_TOLERANCE};
use crate::interferometer::{apply_to_mixture, ModeUnitary};

pub use sampling::{sample_patterns, sample_patterns_on_stream};

/// Aggregate photon counts per system, `S_j = Σ_α n_{j,α}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OutcomePattern(Vec<u32>);

impl OutcomePattern {
    pub fn new(counts: Vec<u32>) -> Self {
        Self(counts)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn num_systems(&self) -> usize {
        self.0.len()
    }
}

/// `f(S) = Σ_j j·S_j mod M`.
pub fn bin_function(s: &OutcomePattern) -> usize {
    let m = s.0.len() as u64;
    if m == 0 {
        return 0;
    }
    let total = s.0.iter().enumerate().fold(0u64, |acc, (j, &sj)| (acc + (j as u64 * sj as u64) % m) % m);
    total as usize
}

/// Photon counts per system, summing over internal modes.
pub fn aggregate_counts(v: &OccupationVector, layout: &ModeLayout) -> Result<OutcomePattern> {
    if v.len() != layout.num_modes() {
        return Err(Error::LayoutMismatch(format!(
            "occupation vector of length {} for {} modes",
            v.len(),
            layout.num_modes()
        )));
    }
    Ok(OutcomePattern(
        (0..layout.num_systems())
            .map(|j| v.system_block(layout, j).iter().sum())
            .collect(),
    ))
}

/// Probability of each outcome pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternDistribution {
    num_systems: usize,
    probs: BTreeMap<OutcomePattern, f64>,
}

impl PatternDistribution {
    pub fn from_map(num_systems: usize, probs: BTreeMap<OutcomePattern, f64>) -> Result<Self> {
        let mut total = 0.0;
        for (s, &p) in &probs {
            if s.num_systems() != num_systems {
                return Err(Error::LayoutMismatch("pattern length differs from M".into()));
            }
            if !(-NORM_TOLERANCE..=1.0 + NORM_TOLERANCE).contains(&p) {
                return Err(Error::InvalidArgument(format!("probability {p} outside [0, 1]")));
            }
            total += p;
        }
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Consistency(format!("pattern probabilities sum to {total}")));
        }
        Ok(Self { num_systems, probs })
    }

    pub fn num_systems(&self) -> usize {
        self.num_systems
    }

    pub fn probability(&self, s: &OutcomePattern) -> f64 {
        self.probs.get(s).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&OutcomePattern, f64)> {
        self.probs.iter().map(|(s, p)| (s, *p))
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Outcome distribution of photon counting on `Ω_out`: for every component,
/// `|amplitude|²` summed over keys with the same aggregate pattern, weighted
/// by the mixture.
pub fn exact_pattern_distribution(omega_out: &MixedState) -> Result<PatternDistribution> {
    let layout = *omega_out.layout();
    let mut probs: BTreeMap<OutcomePattern, f64> = BTreeMap::new();
    for (w, psi) in omega_out.components() {
        for (v, a) in psi.iter() {
            *probs.entry(aggregate_counts(v, &layout)?).or_insert(0.0) += w * a.norm_sqr();
        }
    }
    PatternDistribution::from_map(layout.num_systems(), probs)
}

/// `P_0 … P_{M−1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BinnedProbabilities(Vec<f64>);

impl BinnedProbabilities {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidArgument("need at least one bin".into()));
        }
        if p.iter().any(|x| !(-NORM_TOLERANCE..=1.0 + NORM_TOLERANCE).contains(x)) {
            return Err(Error::InvalidArgument("bin probability outside [0, 1]".into()));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidArgument(format!("bin probabilities sum to {total}")));
        }
        Ok(Self(p))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn num_bins(&self) -> usize {
        self.0.len()
    }
}

/// Empirical bin frequencies of a sample.
pub fn estimate_binned(samples: &[OutcomePattern]) -> Result<BinnedProbabilities> {
    let Some(first) = samples.first() else {
        return Err(Error::InvalidArgument("no samples".into()));
    };
    let m = first.num_systems();
    let mut counts = vec![0u64; m];
    for s in samples {
        if s.num_systems() != m {
            return Err(Error::LayoutMismatch("samples differ in M".into()));
        }
        counts[bin_function(s)] += 1;
    }
    Ok(BinnedProbabilities(frequencies(&counts, samples.len() as u64)))
}

fn frequencies(counts: &[u64], n: u64) -> Vec<f64> {
    counts.iter().map(|&c| c as f64 / n as f64).collect()
}

/// Exact `P_j = Σ_{S: f(S)=j} D_S`.
pub fn exact_binned(dist: &PatternDistribution) -> BinnedProbabilities {
    let mut p = vec![0.0; dist.num_systems()];
    for (s, prob) in dist.iter() {
        p[bin_function(s)] += prob;
    }
    BinnedProbabilities(p)
}

/// `X_k = Σ_j ω^{jk} P_j`.
pub fn recover_x(p: &BinnedProbabilities) -> Vec<Complex64> {
    let pc: Vec<Complex64> = p.0.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    dft::expectations_from_bins(&pc)
}

/// Hoeffding sample count for precision `epsilon` on each `P_j` with failure
/// probability `delta_fail`: `⌈ln(2/δ) / (2ε²)⌉`.
pub fn sample_count(epsilon: f64, delta_fail: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(delta_fail > 0.0 && delta_fail < 1.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {delta_fail}")));
    }
    let n = ((2.0 / delta_fail).ln() / (2.0 * epsilon * epsilon)).ceil();
    if n > u64::MAX as f64 / 2.0 {
        return Err(Error::InvalidArgument("sample count overflows".into()));
    }
    Ok(n as u64)
}

/// Hoeffding precision reached by `shots` samples at failure probability `delta_fail`.
pub fn hoeffding_epsilon(shots: u64, delta_fail: f64) -> f64 {
    ((2.0 / delta_fail).ln() / (2.0 * shots as f64)).sqrt()
}

pub const DEFAULT_DELTA_FAIL: f64 = 0.05;

/// Sample budget and randomness for sampled mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub shots: u64,
    pub seed: u64,
    /// Independent keystream of the seeded generator.
    #[serde(default)]
    pub stream: u64,
    pub delta_fail: f64,
}

impl SamplingPlan {
    pub fn new(shots: u64, seed: u64) -> Self {
        Self {
            shots,
            seed,
            stream: 0,
            delta_fail: DEFAULT_DELTA_FAIL,
        }
    }

    /// Enough shots for precision `epsilon` with probability `1 − delta_fail`.
    pub fn for_precision(epsilon: f64, delta_fail: f64, seed: u64) -> Result<Self> {
        Ok(Self {
            shots: sample_count(epsilon, delta_fail)?,
            seed,
            stream: 0,
            delta_fail,
        })
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn epsilon(&self) -> f64 {
        hoeffding_epsilon(self.shots, self.delta_fail)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    Exact,
    Sampled(SamplingPlan),
}

impl Mode {
    pub fn sampled(shots: u64, seed: u64) -> Self {
        Mode::Sampled(SamplingPlan::new(shots, seed))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Mode::Exact)
    }

    /// Hoeffding precision of each binned probability; zero in exact mode.
    pub fn epsilon(&self) -> f64 {
        match self {
            Mode::Exact => 0.0,
            Mode::Sampled(p) => p.epsilon(),
        }
    }

    /// Same plan shifted `offset` streams further; exact mode is unchanged.
    pub fn substream(self, offset: u64) -> Self {
        match self {
            Mode::Exact => Mode::Exact,
            Mode::Sampled(p) => Mode::Sampled(p.with_stream(p.stream.wrapping_add(offset))),
        }
    }

    pub fn stream(&self) -> Option<u64> {
        match self {
            Mode::Exact => None,
            Mode::Sampled(p) => Some(p.stream),
        }
    }

    /// Same plan on another stream; exact mode is unchanged.
    pub fn on_stream(self, stream: u64) -> Self {
        match self {
            Mode::Exact => Mode::Exact,
            Mode::Sampled(p) => Mode::Sampled(p.with_stream(stream)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    Exact,
    Sampled,
}

/// Result of one protocol run.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantEstimate {
    pub num_systems: usize,
    pub num_internal: usize,
    pub mode: ModeKind,
    pub binned: BinnedProbabilities,
    /// `X_0 … X_{M−1}`.
    pub x: Vec<Complex64>,
    /// The multivariate trace estimate, `X_1`.
    pub delta: Complex64,
    pub sample_count: u64,
    pub seed: Option<u64>,
    pub stream: Option<u64>,
    /// Hoeffding precision of each `P_j` (zero in exact mode).
    pub epsilon: f64,
    /// Failure probability of the precision guarantee (zero in exact mode).
    pub delta_fail: f64,
    /// Standard error of each `X_k` from the multinomial bin statistics.
    pub stderr: Vec<f64>,
}

impl InvariantEstimate {
    pub fn confidence(&self) -> f64 {
        1.0 - self.delta_fail
    }

    /// `P_0`, the weight of the cyclically symmetric part of the input.
    pub fn p0(&self) -> f64 {
        self.binned.values()[0]
    }
}

fn check_inputs(states: &[MixedState]) -> Result<ModeLayout> {
    if states.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "the protocol needs at least two states, got {}",
            states.len()
        )));
    }
    let layout = *states[0].layout();
    if layout.num_systems() != 1 {
        return Err(Error::LayoutMismatch("input states must be single-system".into()));
    }
    if states.iter().any(|s| *s.layout() != layout) {
        return Err(Error::LayoutMismatch("input states differ in internal dimension".into()));
    }
    Ok(layout)
}

/// `Ω_out = F† (ρ_1 ⊗ … ⊗ ρ_M) F`.
pub fn output_state(states: &[MixedState]) -> Result<MixedState> {
    check_inputs(states)?;
    let omega = tensor_product(states)?;
    let f_dag = ModeUnitary::fourier(states.len()).adjoint();
    apply_to_mixture(&f_dag, &omega)
}

/// Run the full estimation pipeline. `delta` of the result estimates
/// `tr(ρ_1 ρ_2 … ρ_M)`.
pub fn estimate_multivariate_trace(states: &[MixedState], mode: Mode) -> Result<InvariantEstimate> {
    let layout = check_inputs(states)?;
    let m = states.len();
    let dist = exact_pattern_distribution(&output_state(states)?)?;
    estimate_from_distribution(&dist, layout.num_internal(), mode).map(|mut e| {
        e.num_systems = m;
        e
    })
}

/// Binning and Fourier postprocessing on a known outcome distribution.
pub fn estimate_from_distribution(dist: &PatternDistribution, num_internal: usize, mode: Mode) -> Result<InvariantEstimate> {
    let m = dist.num_systems();
    match mode {
        Mode::Exact => {
            let binned = exact_binned(dist);
            let mut x = recover_x(&binned);
            if (x[0] - Complex64::new(1.0, 0.0)).norm() > NORM_TOLERANCE {
                return Err(Error::Consistency(format!("X_0 = {} in exact mode", x[0])));
            }
            x[0] = Complex64::new(1.0, 0.0);
            Ok(InvariantEstimate {
                num_systems: m,
                num_internal,
                mode: ModeKind::Exact,
                delta: x[1 % m],
                binned,
                x,
                sample_count: 0,
                seed: None,
                stream: None,
                epsilon: 0.0,
                delta_fail: 0.0,
                stderr: vec![0.0; m],
            })
        }
        Mode::Sampled(plan) => {
            if plan.shots == 0 {
                return Err(Error::InvalidArgument("sampled mode needs at least one shot".into()));
            }
            if !(plan.delta_fail > 0.0 && plan.delta_fail < 1.0) {
                return Err(Error::InvalidArgument("delta must lie in (0, 1)".into()));
            }
            let patterns: Vec<&OutcomePattern> = dist.iter().map(|(s, _)| s).collect();
            let mut counts = vec![0u64; m];
            for i in sampling::sample_indices(dist, plan.shots, plan.seed, plan.stream) {
                counts[bin_function(patterns[i])] += 1;
            }
            let binned = BinnedProbabilities(frequencies(&counts, plan.shots));
            let x = recover_x(&binned);
            // Var(ω^{k f}) = 1 − |X_k|² under the multinomial bin statistics
            let stderr = x
                .iter()
                .map(|xk| ((1.0 - xk.norm_sqr()).max(0.0) / plan.shots as f64).sqrt())
                .collect();
            Ok(InvariantEstimate {
                num_systems: m,
                num_internal,
                mode: ModeKind::Sampled,
                delta: x[1 % m],
                binned,
                x,
                sample_count: plan.shots,
                seed: Some(plan.seed),
                stream: Some(plan.stream),
                epsilon: plan.epsilon(),
                delta_fail: plan.delta_fail,
                stderr,
            })
        }
    }
}

/// JSON form of an [`InvariantEstimate`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EstimateDoc {
    #[serde(rename = "M")]
    pub num_systems: usize,
    pub d: usize,
    pub mode: ModeKind,
    #[serde(rename = "N")]
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stream: Option<u64>,
    #[serde(rename = "P")]
    pub binned: Vec<f64>,
    #[serde(rename = "X")]
    pub x: Vec<[f64; 2]>,
    pub delta: [f64; 2],
    pub epsilon: f64,
    pub delta_fail: f64,
    pub stderr: Vec<f64>,
}

impl From<&InvariantEstimate> for EstimateDoc {
    fn from(e: &InvariantEstimate) -> Self {
        Self {
            num_systems: e.num_systems,
            d: e.num_internal,
            mode: e.mode,
            shots: (e.mode == ModeKind::Sampled).then_some(e.sample_count),
            seed: e.seed,
            stream: e.stream.filter(|&s| s != 0),
            binned: e.binned.values().to_vec(),
            x: e.x.iter().map(|z| [z.re, z.im]).collect(),
            delta: [e.delta.re, e.delta.im],
            epsilon: e.epsilon,
            delta_fail: e.delta_fail,
            stderr: e.stderr.clone(),
        }
    }
}

impl TryFrom<EstimateDoc> for InvariantEstimate {
    type Error = Error;
    fn try_from(doc: EstimateDoc) -> Result<Self> {
        if doc.binned.len() != doc.num_systems || doc.x.len() != doc.num_systems {
            return Err(Error::InvalidArgument("P and X must have length M".into()));
        }
        Ok(Self {
            num_systems: doc.num_systems,
            num_internal: doc.d,
            mode: doc.mode,
            binned: BinnedProbabilities::new(doc.binned)?,
            x: doc.x.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
            delta: Complex64::new(doc.delta[0], doc.delta[1]),
            sample_count: doc.shots.unwrap_or(0),
            seed: doc.seed,
            stream: match doc.mode {
                ModeKind::Exact => None,
                ModeKind::Sampled => Some(doc.stream.unwrap_or(0)),
            },
            epsilon: doc.epsilon,
            delta_fail: doc.delta_fail,
            stderr: doc.stderr,
        })
    }
}

impl Serialize for InvariantEstimate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EstimateDoc::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for InvariantEstimate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        InvariantEstimate::try_from(EstimateDoc::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
