//! Experiment configuration documents.
//!
//! ```json
//! {
//!   "experiment": {"kind": "hom", "states": [
//!     {"type": "linear_polarization", "angle": 0.0},
//!     {"type": "linear_polarization", "angle": "$t"}
//!   ]},
//!   "mode": {"kind": "sampled", "epsilon": 0.05, "delta": 0.05},
//!   "seed": 7,
//!   "validate": true
//! }
//! ```
//!
//! String values of the form `"$name"` are placeholders filled in by sweeps.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fock::{
    coherent_cutoff, dual_rail_qubit, random_pure_state, random_single_photon, single_photon_state,
    truncated_coherent_state, MixedState, ModeLayout, PureState,
};
use crate::protocol::{Mode, SamplingPlan, DEFAULT_DELTA_FAIL};

/// Tail mass accepted for coherent states in configs.
const COHERENT_TAIL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub mode: ModeSpec,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub validate: bool,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    #[serde(default)]
    pub kind: ModeName,
    #[serde(default)]
    pub shots: Option<u64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    #[default]
    Exact,
    Sampled,
}

impl ModeSpec {
    pub fn resolve(&self, seed: u64) -> Result<Mode> {
        match self.kind {
            ModeName::Exact => {
                if self.shots.is_some() || self.epsilon.is_some() {
                    return Err(Error::InvalidArgument("exact mode takes no shots or epsilon".into()));
                }
                Ok(Mode::Exact)
            }
            ModeName::Sampled => match (self.shots, self.epsilon) {
                (Some(n), None) => {
                    if n == 0 {
                        return Err(Error::InvalidArgument("shots must be positive".into()));
                    }
                    let mut plan = SamplingPlan::new(n, seed);
                    if let Some(d) = self.delta {
                        if !(d > 0.0 && d < 1.0) {
                            return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {d}")));
                        }
                        plan.delta_fail = d;
                    }
                    Ok(Mode::Sampled(plan))
                }
                (None, Some(eps)) => Ok(Mode::Sampled(SamplingPlan::for_precision(
                    eps,
                    self.delta.unwrap_or(DEFAULT_DELTA_FAIL),
                    seed,
                )?)),
                _ => Err(Error::InvalidArgument(
                    "sampled mode needs exactly one of shots or epsilon".into(),
                )),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    Trace {
        states: Vec<StateSpec>,
    },
    Hom {
        states: Vec<StateSpec>,
    },
    Suppression {
        states: Vec<StateSpec>,
    },
    Renyi {
        state: StateSpec,
        alpha: usize,
    },
    Spectrum {
        state: StateSpec,
        rank_bound: usize,
    },
    Kernel {
        states: Vec<StateSpec>,
        #[serde(default)]
        ids: Option<Vec<String>>,
    },
    Quasiprob(Box<QuasiSpec>),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Trace { .. } => "trace",
            Experiment::Hom { .. } => "hom",
            Experiment::Suppression { .. } => "suppression",
            Experiment::Renyi { .. } => "renyi",
            Experiment::Spectrum { .. } => "spectrum",
            Experiment::Kernel { .. } => "kernel",
            Experiment::Quasiprob(_) => "quasiprob",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuasiFunction {
    Husimi,
    Wigner,
    PositiveP,
    KirkwoodDirac,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasiSpec {
    pub function: QuasiFunction,
    pub state: StateSpec,
    /// Phase-space point, one `[re, im]` per internal mode.
    #[serde(default)]
    pub alpha: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub beta: Option<Vec<[f64; 2]>>,
    /// Basis states for Kirkwood-Dirac values.
    #[serde(default)]
    pub a: Option<StateSpec>,
    #[serde(default)]
    pub b: Option<StateSpec>,
    #[serde(default)]
    pub cutoff: Option<usize>,
    #[serde(default)]
    pub n_max: Option<usize>,
    /// Single-mode grid; replaces `alpha` for Husimi and Wigner values.
    #[serde(default)]
    pub grid: Option<GridSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub re: AxisRange,
    pub im: AxisRange,
}

/// `start, start + step, …` up to and including `stop`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl AxisRange {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.step.is_nan() || self.step <= 0.0 || self.stop < self.start {
            return Err(Error::InvalidArgument("grid axis needs step > 0 and stop >= start".into()));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| self.start + self.step * i as f64).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    SinglePhoton {
        amplitudes: Vec<[f64; 2]>,
    },
    DualRail {
        theta: f64,
        #[serde(default)]
        phi: f64,
    },
    LinearPolarization {
        angle: f64,
    },
    Coherent {
        beta: Vec<[f64; 2]>,
        #[serde(default)]
        cutoff: Option<usize>,
    },
    Fock {
        occupations: Vec<u32>,
    },
    RandomSinglePhoton {
        d: usize,
        seed: u64,
    },
    RandomPure {
        d: usize,
        max_photons: u32,
        seed: u64,
    },
    Mixture {
        components: Vec<WeightedSpec>,
    },
    /// A serialized pure state or mixture.
    Inline {
        state: Value,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedSpec {
    pub weight: f64,
    pub state: StateSpec,
}

pub(crate) fn complex_vec(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().map(|p| Complex64::new(p[0], p[1])).collect()
}

impl StateSpec {
    pub fn build(&self) -> Result<MixedState> {
        match self {
            StateSpec::Mixture { components } => {
                let mut parts = Vec::with_capacity(components.len());
                for c in components {
                    let m = c.state.build()?;
                    for (w, s) in m.components() {
                        parts.push((c.weight * w, s.clone()));
                    }
                }
                MixedState::new(parts)
            }
            StateSpec::Inline { state } => {
                if state.get("components").is_some() {
                    serde_json::from_value::<MixedState>(state.clone())
                        .map_err(|e| Error::InvalidState(format!("inline mixture: {e}")))
                } else {
                    serde_json::from_value::<PureState>(state.clone())
                        .map(Into::into)
                        .map_err(|e| Error::InvalidState(format!("inline state: {e}")))
                }
            }
            other => other.build_pure().map(Into::into),
        }
    }

    pub fn build_pure(&self) -> Result<PureState> {
        match self {
            StateSpec::SinglePhoton { amplitudes } => single_photon_state(&complex_vec(amplitudes)),
            StateSpec::DualRail { theta, phi } => Ok(dual_rail_qubit(*theta, *phi)),
            StateSpec::LinearPolarization { angle } => single_photon_state(&[
                Complex64::new(angle.cos(), 0.0),
                Complex64::new(angle.sin(), 0.0),
            ]),
            StateSpec::Coherent { beta, cutoff } => {
                let beta = complex_vec(beta);
                let mean: f64 = beta.iter().map(|b| b.norm_sqr()).sum();
                let cutoff = cutoff.unwrap_or_else(|| coherent_cutoff(mean, COHERENT_TAIL));
                truncated_coherent_state(&beta, cutoff)?.within(COHERENT_TAIL)
            }
            StateSpec::Fock { occupations } => PureState::fock(ModeLayout::single(occupations.len())?, occupations.clone()),
            StateSpec::RandomSinglePhoton { d, seed } => random_single_photon(*d, &mut ChaCha8Rng::seed_from_u64(*seed)),
            StateSpec::RandomPure { d, max_photons, seed } => {
                random_pure_state(*d, *max_photons, &mut ChaCha8Rng::seed_from_u64(*seed))
            }
            StateSpec::Inline { state } => serde_json::from_value::<PureState>(state.clone())
                .map_err(|e| Error::InvalidState(format!("inline state: {e}"))),
            StateSpec::Mixture { .. } => {
                let m = self.build()?;
                if !m.is_pure() {
                    return Err(Error::InvalidArgument("expected a pure state, got a mixture".into()));
                }
                Ok(m.components()[0].1.clone())
            }
        }
    }
}

pub fn build_states(specs: &[StateSpec]) -> Result<Vec<MixedState>> {
    specs.iter().map(StateSpec::build).collect()
}

/// Replace every string `"$name"` with `value`; returns how many were replaced.
pub fn substitute(doc: &mut Value, name: &str, value: f64) -> usize {
    let key = format!("${name}");
    match doc {
        Value::String(s) if *s == key => {
            *doc = number(value);
            1
        }
        Value::Array(items) => items.iter_mut().map(|v| substitute(v, name, value)).sum(),
        Value::Object(map) => map.values_mut().map(|v| substitute(v, name, value)).sum(),
        _ => 0,
    }
}

/// Integral values become JSON integers so they fit integer fields.
fn number(value: f64) -> Value {
    if value.fract() == 0.0 && value.abs() < 9.0e15 {
        Value::from(value as i64)
    } else {
        Value::from(value)
    }
}

/// Set the sampling budget of a config document for a `shots` or `epsilon`
/// sweep axis.
pub fn set_budget(doc: &mut Value, axis: &str, value: f64) -> Result<()> {
    let root = doc
        .as_object_mut()
        .ok_or_else(|| Error::InvalidArgument("config must be a JSON object".into()))?;
    let mode = root
        .entry("mode")
        .or_insert_with(|| serde_json::json!({"kind": "sampled"}));
    let mode = mode
        .as_object_mut()
        .ok_or_else(|| Error::InvalidArgument("mode must be an object".into()))?;
    mode.insert("kind".into(), Value::from("sampled"));
    mode.remove("shots");
    mode.remove("epsilon");
    mode.insert(axis.into(), number(value));
    Ok(())
}
