//! Executes one experiment and compares it with the classical reference.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::{build_states, complex_vec, Experiment, QuasiFunction, QuasiSpec};
use crate::applications::{
    husimi_grid, husimi_q, husimi_reference, hom_overlap, kernel_matrix, kirkwood_dirac, positive_p,
    positive_p_reference, renyi_entropy, spectrum_from_power_traces, spectrum_from_traces, wigner_grid,
    wigner_point, wigner_reference, GridPoint, QuasiGrid,
};
use crate::error::{Error, Result};
use crate::fock::{tensor_product, MixedState};
use crate::oracle::{direct_multivariate_trace, symmetric_projection_weight, LIFT_TOLERANCE};
use crate::protocol::{estimate_multivariate_trace, Mode};

/// Tolerance for exact-mode validation.
pub const EXACT_TOLERANCE: f64 = LIFT_TOLERANCE;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub protocol_value: [f64; 2],
    pub oracle_value: [f64; 2],
    pub abs_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub struct Outcome {
    pub result: Value,
    pub comparison: Comparison,
    /// Kernel experiments also produce a CSV table.
    pub csv: Option<String>,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Protocol and reference values plus the sampled-mode error scale, i.e.
/// the tolerance is `scale · ε` when sampling.
struct Values {
    protocol: Complex64,
    oracle: Complex64,
    /// Largest error over all compared entries, if more than the headline
    /// values are compared.
    worst: Option<f64>,
    scale: f64,
}

impl Values {
    fn scalar(protocol: Complex64, oracle: Complex64, scale: f64) -> Self {
        Self {
            protocol,
            oracle,
            worst: None,
            scale,
        }
    }
}

fn at_least(states: &[MixedState], n: usize, what: &str) -> Result<()> {
    if states.len() < n {
        return Err(Error::InvalidArgument(format!("{what} needs at least {n} states, got {}", states.len())));
    }
    Ok(())
}

pub fn execute(experiment: &Experiment, mode: Mode, tolerance: Option<f64>) -> Result<Outcome> {
    let mut csv = None;
    let (result, values) = match experiment {
        Experiment::Trace { states } => {
            let states = build_states(states)?;
            at_least(&states, 2, "trace")?;
            let e = estimate_multivariate_trace(&states, mode)?;
            let oracle = direct_multivariate_trace(&states)?;
            let m = states.len() as f64;
            (serde_json::to_value(&e).map_err(json_error)?, Values::scalar(e.delta, oracle, m))
        }
        Experiment::Hom { states } => {
            let states = build_states(states)?;
            if states.len() != 2 {
                return Err(Error::InvalidArgument(format!("hom needs exactly 2 states, got {}", states.len())));
            }
            let o = hom_overlap(&states[0], &states[1], mode)?;
            let oracle = direct_multivariate_trace(&states)?;
            (serde_json::to_value(o).map_err(json_error)?, Values::scalar(real(o.value), oracle, 2.0))
        }
        Experiment::Suppression { states } => {
            let states = build_states(states)?;
            at_least(&states, 2, "suppression")?;
            let e = estimate_multivariate_trace(&states, mode)?;
            let p0_oracle = symmetric_projection_weight(&tensor_product(&states)?)?;
            let threshold = if mode.is_exact() { EXACT_TOLERANCE } else { e.epsilon };
            let p0 = e.p0();
            let result = json!({
                "P0": p0,
                "is_symmetric": p0 >= 1.0 - threshold,
                "threshold": threshold,
                "estimate": e,
            });
            (result, Values::scalar(real(p0), real(p0_oracle), 1.0))
        }
        Experiment::Renyi { state, alpha } => {
            let rho = state.build()?;
            let h = renyi_entropy(&rho, *alpha, mode)?;
            let t = direct_multivariate_trace(&vec![rho; *alpha])?.re;
            let oracle = t.ln() / (1.0 - *alpha as f64);
            // first-order propagation of |Δt| ≤ α·ε through ln
            let scale = *alpha as f64 / ((*alpha as f64 - 1.0) * t);
            (json!({"alpha": alpha, "entropy": h}), Values::scalar(real(h), real(oracle), scale))
        }
        Experiment::Spectrum { state, rank_bound } => {
            let rho = state.build()?;
            let s = spectrum_from_traces(&rho, *rank_bound, mode)?;
            let mut traces = vec![1.0];
            for k in 2..=*rank_bound {
                traces.push(direct_multivariate_trace(&vec![rho.clone(); k])?.re);
            }
            let reference = spectrum_from_power_traces(traces, EXACT_TOLERANCE)?;
            let worst = s
                .eigenvalues
                .iter()
                .zip(&reference.eigenvalues)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            let n = *rank_bound as f64;
            let values = Values {
                protocol: real(s.largest_eigenvalue),
                oracle: real(reference.largest_eigenvalue),
                worst: Some(worst),
                scale: n * n,
            };
            (serde_json::to_value(&s).map_err(json_error)?, values)
        }
        Experiment::Kernel { states, ids } => {
            let states = build_states(states)?;
            let k = kernel_matrix(&states, ids.clone(), mode)?;
            let mut worst: f64 = 0.0;
            for i in 0..states.len() {
                for j in 0..states.len() {
                    let o = direct_multivariate_trace(&[states[i].clone(), states[j].clone()])?.re;
                    worst = worst.max((k.get(i, j) - o).abs());
                }
            }
            let oracle01 = direct_multivariate_trace(&states[..2])?.re;
            csv = Some(k.to_csv());
            let values = Values {
                protocol: real(k.get(0, 1)),
                oracle: real(oracle01),
                worst: Some(worst),
                scale: 2.0,
            };
            (serde_json::to_value(&k).map_err(json_error)?, values)
        }
        Experiment::Quasiprob(q) => quasiprob(q, mode)?,
    };

    let eps = mode.epsilon();
    let tolerance = tolerance.unwrap_or(if mode.is_exact() { EXACT_TOLERANCE } else { values.scale * eps });
    let abs_error = values.worst.unwrap_or((values.protocol - values.oracle).norm());
    Ok(Outcome {
        result,
        comparison: Comparison {
            protocol_value: pair(values.protocol),
            oracle_value: pair(values.oracle),
            abs_error,
            tolerance,
            passed: abs_error <= tolerance,
        },
        csv,
    })
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Consistency(format!("result serialization: {e}"))
}

fn require<'a, T>(v: &'a Option<T>, what: &str) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| Error::InvalidArgument(format!("quasiprob needs `{what}`")))
}

/// Each Wigner term is an overlap known to `2ε`.
fn wigner_scale(n_max: usize, d: i32) -> f64 {
    let terms = (n_max + 1).pow(d as u32) as f64;
    (2.0 / PI).powi(d) * 2.0 * terms
}

fn grid_values(g: &QuasiGrid, r: &QuasiGrid, scale: f64) -> Values {
    let worst = g
        .points
        .iter()
        .zip(&r.points)
        .map(|(a, b)| (a.value - b.value).abs())
        .fold(0.0, f64::max);
    Values {
        protocol: real(g.points.first().map_or(0.0, |p| p.value)),
        oracle: real(r.points.first().map_or(0.0, |p| p.value)),
        worst: Some(worst),
        scale,
    }
}

fn quasiprob(q: &QuasiSpec, mode: Mode) -> Result<(Value, Values)> {
    let rho = q.state.build()?;
    let d = rho.layout().num_internal() as i32;
    let name = serde_json::to_value(q.function).map_err(json_error)?;

    if let Some(grid) = &q.grid {
        if d != 1 {
            return Err(Error::InvalidArgument("grids need a single internal mode".into()));
        }
        let (re, im) = (grid.re.values()?, grid.im.values()?);
        let (g, values) = match q.function {
            QuasiFunction::Husimi => {
                let g = husimi_grid(&rho, &re, &im, mode)?;
                let r = QuasiGrid::evaluate(&re, &im, |a, _| husimi_reference(&rho, &[a], None))?;
                let v = grid_values(&g, &r, 2.0 / PI);
                (g, v)
            }
            QuasiFunction::Wigner => {
                let g = wigner_grid(&rho, &re, &im, q.n_max, mode)?;
                let mut longest = 0;
                let mut points = Vec::with_capacity(g.points.len());
                for &x in &re {
                    for &y in &im {
                        let w = wigner_reference(&rho, &[Complex64::new(x, y)], q.n_max, None)?;
                        longest = longest.max(w.n_max);
                        points.push(GridPoint { alpha_re: x, alpha_im: y, value: w.value });
                    }
                }
                let r = QuasiGrid { points };
                let v = grid_values(&g, &r, wigner_scale(longest, 1));
                (g, v)
            }
            _ => return Err(Error::InvalidArgument("grids support husimi and wigner only".into())),
        };
        let mut doc = serde_json::to_value(&g).map_err(json_error)?;
        doc["function"] = name;
        return Ok((doc, values));
    }

    match q.function {
        QuasiFunction::Husimi => {
            let alpha = complex_vec(require(&q.alpha, "alpha")?);
            let v = husimi_q(&rho, &alpha, q.cutoff, mode)?;
            let r = husimi_reference(&rho, &alpha, q.cutoff)?;
            let scale = 2.0 / PI.powi(d);
            Ok((json!({"function": name, "alpha": q.alpha, "value": v}), Values::scalar(real(v), real(r), scale)))
        }
        QuasiFunction::Wigner => {
            let alpha = complex_vec(require(&q.alpha, "alpha")?);
            let w = wigner_point(&rho, &alpha, q.n_max, q.cutoff, mode)?;
            let r = wigner_reference(&rho, &alpha, q.n_max, q.cutoff)?;
            let scale = wigner_scale(w.n_max, d);
            let doc = json!({
                "function": name,
                "alpha": q.alpha,
                "value": w.value,
                "n_max": w.n_max,
                "remainder": w.remainder,
            });
            Ok((doc, Values::scalar(real(w.value), real(r.value), scale)))
        }
        QuasiFunction::PositiveP => {
            let alpha = complex_vec(require(&q.alpha, "alpha")?);
            let beta = complex_vec(require(&q.beta, "beta")?);
            let v = positive_p(&rho, &alpha, &beta, q.cutoff, mode)?;
            let r = positive_p_reference(&rho, &alpha, &beta, q.cutoff)?;
            let scale = 3.0 / PI.powi(2 * d);
            let doc = json!({"function": name, "alpha": q.alpha, "beta": q.beta, "value": pair(v)});
            Ok((doc, Values::scalar(v, r, scale)))
        }
        QuasiFunction::KirkwoodDirac => {
            let a = require(&q.a, "a")?.build_pure()?;
            let b = require(&q.b, "b")?.build_pure()?;
            let v = kirkwood_dirac(&rho, &a, &b, mode)?;
            let r = direct_multivariate_trace(&[a.into(), rho.clone(), b.into()])?;
            Ok((json!({"function": name, "value": pair(v)}), Values::scalar(v, r, 3.0)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::ExperimentConfig;

    fn run(doc: Value) -> Outcome {
        let cfg: ExperimentConfig = serde_json::from_value(doc).unwrap();
        let mode = cfg.mode.resolve(cfg.seed.unwrap_or(0)).unwrap();
        execute(&cfg.experiment, mode, cfg.tolerance).unwrap()
    }

    #[test]
    fn hom_identical_photons() {
        let o = run(json!({"experiment": {"kind": "hom", "states": [
            {"type": "dual_rail", "theta": 0.4}, {"type": "dual_rail", "theta": 0.4}]}}));
        assert!((o.result["value"].as_f64().unwrap() - 1.0).abs() < 1e-10);
        assert!(o.comparison.passed);
    }

    #[test]
    fn suppression_on_distinguishable_photons() {
        let o = run(json!({"experiment": {"kind": "suppression", "states": [
            {"type": "fock", "occupations": [1, 0, 0]},
            {"type": "fock", "occupations": [0, 1, 0]},
            {"type": "fock", "occupations": [0, 0, 1]}]}}));
        assert_eq!(o.result["is_symmetric"], false);
        assert!((o.result["P0"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-10);
        assert!(o.comparison.passed);
    }

    #[test]
    fn sampled_trace_records_budget() {
        let o = run(json!({"experiment": {"kind": "trace", "states": [
            {"type": "random_single_photon", "d": 2, "seed": 1},
            {"type": "random_single_photon", "d": 2, "seed": 2},
            {"type": "random_single_photon", "d": 2, "seed": 3}]},
            "mode": {"kind": "sampled", "epsilon": 0.05, "delta": 0.05}, "seed": 11}));
        assert_eq!(o.result["N"], 738);
        assert!((o.comparison.tolerance - 3.0 * crate::protocol::hoeffding_epsilon(738, 0.05)).abs() < 1e-15);
    }

    #[test]
    fn every_experiment_validates_in_exact_mode() {
        let docs = [
            json!({"kind": "renyi", "alpha": 2, "state": {"type": "mixture", "components": [
                {"weight": 0.5, "state": {"type": "fock", "occupations": [1, 0]}},
                {"weight": 0.5, "state": {"type": "fock", "occupations": [0, 1]}}]}}),
            json!({"kind": "spectrum", "rank_bound": 3, "state": {"type": "mixture", "components": [
                {"weight": 0.5, "state": {"type": "fock", "occupations": [1, 0, 0]}},
                {"weight": 0.3, "state": {"type": "fock", "occupations": [0, 1, 0]}},
                {"weight": 0.2, "state": {"type": "fock", "occupations": [0, 0, 1]}}]}}),
            json!({"kind": "kernel", "ids": ["x", "y", "z"], "states": [
                {"type": "linear_polarization", "angle": 0.0},
                {"type": "linear_polarization", "angle": 0.5},
                {"type": "linear_polarization", "angle": 1.0}]}),
            json!({"kind": "quasiprob", "function": "husimi", "state": {"type": "fock", "occupations": [1]},
                   "alpha": [[0.5, 0.2]]}),
            json!({"kind": "quasiprob", "function": "wigner", "state": {"type": "fock", "occupations": [1]},
                   "alpha": [[0.5, 0.2]]}),
            json!({"kind": "quasiprob", "function": "positive_p", "state": {"type": "fock", "occupations": [1]},
                   "alpha": [[0.5, 0.2]], "beta": [[0.1, -0.3]]}),
            json!({"kind": "quasiprob", "function": "kirkwood_dirac", "state": {"type": "dual_rail", "theta": 0.3},
                   "a": {"type": "dual_rail", "theta": 1.0}, "b": {"type": "dual_rail", "theta": 2.0, "phi": 0.5}}),
            json!({"kind": "quasiprob", "function": "wigner", "state": {"type": "fock", "occupations": [0]},
                   "grid": {"re": {"start": -1, "stop": 1, "step": 0.5}, "im": {"start": 0, "stop": 0.5, "step": 0.5}}}),
        ];
        for exp in docs {
            let o = run(json!({"experiment": exp.clone()}));
            assert!(o.comparison.passed, "{exp}: {:?}", o.comparison);
        }
    }

    #[test]
    fn kernel_emits_csv() {
        let o = run(json!({"experiment": {"kind": "kernel", "ids": ["a", "b"], "states": [
            {"type": "linear_polarization", "angle": 0.0},
            {"type": "linear_polarization", "angle": 0.5}]}}));
        assert!(o.csv.unwrap().starts_with("id,a,b\n"));
    }
}
