//! Acceptance checks. Each test prints one `PASS`/`FAIL` line with the
//! measured figure before asserting, so `cargo test --test acceptance --
//! --nocapture` doubles as a report.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};
use std::path::Path;
use std::process::Command;

use bargmann::applications::{husimi_q, husimi_reference, renyi_entropy, spectrum_from_traces, wigner_point, wigner_reference};
use bargmann::fock::{
    enumerate_sector, random_pure_state, random_single_photon, single_photon_state, tensor_product, MixedState,
    ModeLayout, PureState,
};
use bargmann::interferometer::{lift_and_apply, ModeUnitary};
use bargmann::oracle::{cyclic_expectation, direct_multivariate_trace};
use bargmann::protocol::{estimate_from_distribution, estimate_multivariate_trace, exact_pattern_distribution, output_state, Mode};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(criterion: &str, passed: bool, detail: String) {
    println!("{} {criterion}: {detail}", if passed { "PASS" } else { "FAIL" });
    assert!(passed, "{criterion}: {detail}");
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn photon(amps: &[f64]) -> MixedState {
    let a: Vec<Complex64> = amps.iter().map(|&x| c(x, 0.0)).collect();
    single_photon_state(&a).unwrap().into()
}

/// Random one-system state, pure or a two-component mixture.
fn random_state(d: usize, max_photons: u32, mixed: bool, rng: &mut ChaCha8Rng) -> MixedState {
    let a = random_pure_state(d, max_photons, rng).unwrap();
    if !mixed {
        return a.into();
    }
    let b = random_pure_state(d, max_photons, rng).unwrap();
    let w = rng.random_range(0.1..0.9);
    MixedState::new(vec![(w, a), (1.0 - w, b)]).unwrap()
}

/// Instance set shared by the trace and cyclic-expectation checks:
/// `M ∈ {2,3,4}`, `d ≤ 2`, at most four photons in total.
fn random_instances(count: usize, seed: u64) -> Vec<Vec<MixedState>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let m = 2 + i % 3;
            let d = 1 + (i / 3) % 2;
            let per_system = 4 / m as u32;
            let mixed = (i / 6) % 2 == 1;
            (0..m).map(|_| random_state(d, per_system, mixed, &mut rng)).collect()
        })
        .collect()
}

#[test]
fn trace_estimate_equals_gram_chain() {
    let instances = random_instances(100, 1);
    let mut worst: f64 = 0.0;
    for states in &instances {
        let e = estimate_multivariate_trace(states, Mode::Exact).unwrap();
        let direct = direct_multivariate_trace(states).unwrap();
        worst = worst.max((e.delta - direct).norm());
    }
    report(
        "exact trace vs Gram chain",
        worst < 1e-8,
        format!("{} instances, max |Δ − oracle| = {worst:.2e}", instances.len()),
    );
}

#[test]
fn recovered_expectations_equal_cyclic_oracle() {
    let instances = random_instances(100, 1);
    let mut worst: f64 = 0.0;
    for states in &instances {
        let e = estimate_multivariate_trace(states, Mode::Exact).unwrap();
        let omega = tensor_product(states).unwrap();
        for (k, x) in e.x.iter().enumerate() {
            worst = worst.max((x - cyclic_expectation(&omega, k)).norm());
        }
    }
    report(
        "recovered X_k vs cyclic expectations",
        worst < 1e-8,
        format!("{} instances, all k, max error = {worst:.2e}", instances.len()),
    );
}

#[test]
fn two_photon_bunching_probability() {
    let h = photon(&[1.0, 0.0]);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let t = i as f64 * FRAC_PI_2 / 19.0;
        let r = photon(&[t.cos(), t.sin()]);
        let p0 = estimate_multivariate_trace(&[h.clone(), r], Mode::Exact).unwrap().p0();
        worst = worst.max((p0 - (1.0 + t.cos().powi(2)) / 2.0).abs());
    }
    report(
        "P_0 = (1 + cos²t)/2",
        worst < 1e-10,
        format!("20 angles in [0, π/2], max error = {worst:.2e}"),
    );
}

#[test]
fn suppression_of_nonzero_bins() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_leak: f64 = 0.0;
    let mut worst_p0: f64 = 0.0;
    for m in 2..=5 {
        let theta = rng.random_range(0.0..PI);
        let same = photon(&[theta.cos(), theta.sin()]);
        let mut states = vec![same.clone(); m];
        let p = estimate_multivariate_trace(&states, Mode::Exact).unwrap().binned;
        worst_leak = worst_leak.max(p.values()[1..].iter().cloned().fold(0.0, f64::max));

        states[m - 1] = photon(&[(theta + 0.1).cos(), (theta + 0.1).sin()]);
        let p0 = estimate_multivariate_trace(&states, Mode::Exact).unwrap().p0();
        worst_p0 = worst_p0.max(p0);
    }
    report(
        "identical inputs suppress P_j, j ≠ 0",
        worst_leak < 1e-10,
        format!("M = 2..5, max P_j = {worst_leak:.2e}"),
    );
    report(
        "0.1 rad perturbation breaks suppression",
        worst_p0 < 1.0 - 1e-4,
        format!("M = 2..5, max P_0 = {worst_p0:.6}"),
    );
}

#[test]
fn second_expectation_factorizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for i in 0..25 {
        let d = 2 + i % 2;
        let s: Vec<MixedState> = (0..4).map(|_| random_single_photon(d, &mut rng).unwrap().into()).collect();
        let x2 = estimate_multivariate_trace(&s, Mode::Exact).unwrap().x[2];
        let a = direct_multivariate_trace(&[s[0].clone(), s[2].clone()]).unwrap();
        let b = direct_multivariate_trace(&[s[1].clone(), s[3].clone()]).unwrap();
        worst = worst.max((x2 - a * b).norm());
    }
    report(
        "X_2 = tr(ρ1ρ3)·tr(ρ2ρ4)",
        worst < 1e-8,
        format!("25 instances, max error = {worst:.2e}"),
    );
}

/// Fixed three-system instance for the sampling checks.
fn sampling_instance() -> (bargmann::protocol::PatternDistribution, Vec<f64>, Complex64) {
    let states = vec![
        photon(&[1.0, 0.0]),
        single_photon_state(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap().into(),
        photon(&[0.5, 0.75f64.sqrt()]),
    ];
    let dist = exact_pattern_distribution(&output_state(&states).unwrap()).unwrap();
    let exact = estimate_from_distribution(&dist, 2, Mode::Exact).unwrap();
    (dist, exact.binned.values().to_vec(), exact.delta)
}

#[test]
fn hoeffding_coverage() {
    let (dist, p, _) = sampling_instance();
    let eps = 0.05;
    let runs = 200;
    let misses = (0..runs)
        .filter(|&seed| {
            let e = estimate_from_distribution(&dist, 2, Mode::sampled(738, seed)).unwrap();
            e.binned.values().iter().zip(&p).any(|(a, b)| (a - b).abs() > eps)
        })
        .count();
    let fraction = misses as f64 / runs as f64;
    report(
        "Hoeffding coverage at N = 738",
        fraction <= 0.05,
        format!("{misses}/{runs} runs with some |P̂_j − P_j| > {eps} (fraction {fraction:.3})"),
    );
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

#[test]
fn error_decays_as_inverse_square_root() {
    let (dist, _, delta) = sampling_instance();
    let shots = [100u64, 1_000, 10_000, 100_000];
    let points: Vec<(f64, f64)> = shots
        .iter()
        .map(|&n| {
            let errors = (0..20)
                .map(|seed| (estimate_from_distribution(&dist, 2, Mode::sampled(n, seed)).unwrap().delta - delta).norm())
                .collect();
            ((n as f64).ln(), median(errors).ln())
        })
        .collect();
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    report(
        "convergence slope",
        (slope + 0.5).abs() <= 0.1,
        format!("log-log slope of median error over N = 1e2..1e5 is {slope:.3}"),
    );
}

fn orthogonal_mixture(weights: &[f64]) -> MixedState {
    let d = weights.len();
    let l = ModeLayout::single(d).unwrap();
    MixedState::new(
        weights
            .iter()
            .enumerate()
            .map(|(i, &w)| {
                let mut occ = vec![0; d];
                occ[i] = 1;
                (w, PureState::fock(l, occ).unwrap())
            })
            .collect(),
    )
    .unwrap()
}

#[test]
fn spectrum_from_power_traces() {
    let mut worst: f64 = 0.0;
    for weights in [vec![0.75, 0.25], vec![0.5, 0.3, 0.2]] {
        let rho = orthogonal_mixture(&weights);
        let s = spectrum_from_traces(&rho, weights.len(), Mode::Exact).unwrap();
        assert!(s.flagged.is_empty());
        for (z, w) in s.eigenvalues.iter().zip(&weights) {
            worst = worst.max((z - c(*w, 0.0)).norm());
        }
    }
    report(
        "spectrum recovery",
        worst < 1e-6,
        format!("(0.75, 0.25) and (0.5, 0.3, 0.2), max eigenvalue error = {worst:.2e}"),
    );
}

#[test]
fn renyi_two_of_maximal_mixture() {
    let h2 = renyi_entropy(&orthogonal_mixture(&[0.5, 0.5]), 2, Mode::Exact).unwrap();
    let err = (h2 - LN_2).abs();
    report("H_2 of (0.5, 0.5) = ln 2", err < 1e-8, format!("H_2 = {h2:.12}, error = {err:.2e}"));
}

#[test]
fn quasiprobability_spot_values() {
    let l = ModeLayout::single(1).unwrap();
    let vacuum: MixedState = PureState::vacuum(l).into();
    let one: MixedState = PureState::fock(l, vec![1]).unwrap().into();
    let origin = [c(0.0, 0.0)];

    let q = husimi_q(&vacuum, &origin, None, Mode::Exact).unwrap();
    let q_ref = husimi_reference(&vacuum, &origin, None).unwrap();
    let w0 = wigner_point(&vacuum, &origin, None, None, Mode::Exact).unwrap().value;
    let w0_ref = wigner_reference(&vacuum, &origin, None, None).unwrap().value;
    let w1 = wigner_point(&one, &origin, None, None, Mode::Exact).unwrap().value;
    let w1_ref = wigner_reference(&one, &origin, None, None).unwrap().value;

    let errors = [
        (q - 1.0 / PI).abs(),
        (q - q_ref).abs(),
        (w0 - 2.0 / PI).abs(),
        (w0 - w0_ref).abs(),
        (w1 + 2.0 / PI).abs(),
        (w1 - w1_ref).abs(),
    ];
    let worst = errors.iter().cloned().fold(0.0, f64::max);
    report(
        "quasiprobability spot values",
        worst < 1e-8,
        format!("Q_vac(0) = {q:.10}, W_vac(0) = {w0:.10}, W_1(0) = {w1:.10}, max error = {worst:.2e}"),
    );
}

/// Random entangled multi-system state spread over a few photon-number sectors.
fn random_multisystem(m: usize, d: usize, rng: &mut ChaCha8Rng) -> PureState {
    let layout = ModeLayout::new(m, d).unwrap();
    let mut terms = Vec::new();
    for n in 0..=3u32 {
        if rng.random_bool(0.5) || n == 1 {
            for occ in enumerate_sector(n, m * d).unwrap() {
                terms.push((occ, c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))));
            }
        }
    }
    PureState::from_amplitudes(layout, terms).unwrap()
}

#[test]
fn lift_preserves_norm_and_photon_number() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_norm: f64 = 0.0;
    let mut worst_sector: f64 = 0.0;
    for i in 0..1000 {
        let m = 2 + i % 2;
        let d = 1 + (i / 2) % 2;
        let u = ModeUnitary::random(m, &mut rng);
        let psi = random_multisystem(m, d, &mut rng);
        let out = lift_and_apply(&u, &psi).unwrap();
        worst_norm = worst_norm.max((out.norm_sqr() - psi.norm_sqr()).abs());
        let before = psi.photon_number_distribution();
        let after = out.photon_number_distribution();
        for (n, p) in &after {
            worst_sector = worst_sector.max((p - before.get(n).copied().unwrap_or(0.0)).abs());
        }
        for (n, p) in &before {
            worst_sector = worst_sector.max((p - after.get(n).copied().unwrap_or(0.0)).abs());
        }
    }
    report(
        "lift unitarity and number conservation",
        worst_norm < 1e-8 && worst_sector < 1e-8,
        format!("1000 random lifts, max norm deviation = {worst_norm:.2e}, max sector weight change = {worst_sector:.2e}"),
    );
}

fn run_cli(config: &Path, out: &Path) -> Vec<u8> {
    let status = Command::new(env!("CARGO_BIN_EXE_bargmann"))
        .arg("run")
        .arg(config)
        .arg("--out")
        .arg(out)
        .status()
        .unwrap();
    assert!(status.success());
    std::fs::read(out).unwrap()
}

#[test]
fn cli_runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        r#"{"experiment":{"kind":"trace","states":[
            {"type":"random_single_photon","d":2,"seed":1},
            {"type":"random_single_photon","d":2,"seed":2},
            {"type":"random_single_photon","d":2,"seed":3}]},
          "mode":{"kind":"sampled","epsilon":0.05,"delta":0.05},"seed":17,"validate":true}"#,
        r#"{"experiment":{"kind":"kernel","states":[
            {"type":"dual_rail","theta":0.3,"phi":0.1},
            {"type":"dual_rail","theta":1.2,"phi":0.4},
            {"type":"dual_rail","theta":2.0,"phi":2.2}]},
          "mode":{"kind":"sampled","shots":500},"seed":5}"#,
    ];
    let mut identical = true;
    for (i, text) in configs.iter().enumerate() {
        let config = dir.path().join(format!("c{i}.json"));
        std::fs::write(&config, text).unwrap();
        let a = run_cli(&config, &dir.path().join(format!("a{i}.json")));
        let b = run_cli(&config, &dir.path().join(format!("b{i}.json")));
        identical &= !a.is_empty() && a == b;
    }
    report(
        "CLI determinism",
        identical,
        format!("{} sampled configs run twice with the same seed, result JSON byte-identical: {identical}", configs.len()),
    );
}
