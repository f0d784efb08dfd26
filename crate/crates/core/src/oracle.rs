//! Brute-force ground truth for the estimation pipeline.
//!
//! Nothing here touches interferometers or permanents: multivariate traces
//! are Gram-chain products of inner products, and cyclic expectations are
//! computed by permuting the system blocks of occupation vectors directly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{inner_product, MixedState, OccupationVector, PureState};

/// Tolerance for identities that involve only state arithmetic.
pub const ARITHMETIC_TOLERANCE: f64 = 1e-10;

/// Tolerance for cross-checks that go through lifted unitaries.
pub const LIFT_TOLERANCE: f64 = 1e-8;

/// `tr(ρ_1 ρ_2 … ρ_M)` as a weighted sum over component tuples of the Gram
/// chain `⟨φ_1|φ_2⟩⟨φ_2|φ_3⟩…⟨φ_M|φ_1⟩`.
pub fn direct_multivariate_trace(states: &[MixedState]) -> Result<Complex64> {
    let Some(first) = states.first() else {
        return Err(Error::InvalidArgument("multivariate trace of zero states".into()));
    };
    let layout = *first.layout();
    if layout.num_systems() != 1 {
        return Err(Error::LayoutMismatch("multivariate trace needs single-system states".into()));
    }
    if states.iter().any(|s| *s.layout() != layout) {
        return Err(Error::LayoutMismatch("states differ in internal dimension".into()));
    }

    let m = states.len();
    let mut total = Complex64::default();
    let mut index = vec![0usize; m];
    loop {
        let mut weight = 1.0;
        let mut chain = Complex64::new(1.0, 0.0);
        for i in 0..m {
            let (w, phi) = &states[i].components()[index[i]];
            let (_, next) = &states[(i + 1) % m].components()[index[(i + 1) % m]];
            weight *= w;
            chain *= inner_product(phi, next)?;
        }
        total += chain * weight;

        // odometer over component indices
        let mut pos = 0;
        loop {
            if pos == m {
                return Ok(total);
            }
            index[pos] += 1;
            if index[pos] < states[pos].components().len() {
                break;
            }
            index[pos] = 0;
            pos += 1;
        }
    }
}

/// Occupation vector whose system block `j` is block `j − k (mod M)` of `v`.
fn shift_blocks(v: &OccupationVector, num_systems: usize, num_internal: usize, k: usize) -> OccupationVector {
    let counts = v.counts();
    let mut out = vec![0u32; counts.len()];
    for j in 0..num_systems {
        let src = (j + num_systems - k % num_systems) % num_systems;
        out[j * num_internal..(j + 1) * num_internal]
            .copy_from_slice(&counts[src * num_internal..(src + 1) * num_internal]);
    }
    OccupationVector::new(out)
}

fn pure_cyclic_expectation(psi: &PureState, k: usize) -> Complex64 {
    let l = psi.layout();
    psi.iter()
        .map(|(v, a)| a.conj() * psi.amplitude(&shift_blocks(v, l.num_systems(), l.num_internal(), k)))
        .sum()
}

/// Cyclic expectation `X_k = Σ_v conj(ψ(v))·ψ(σ_k v)` summed over the mixture,
/// where `σ_k` moves system block `j − k` to block `j`.
///
/// With this orientation `X_1` of a product state is the Gram chain
/// `tr(ρ_1 ρ_2 … ρ_M)`, and `X_k` is the expectation of `(F D F†)^k`, the
/// operator the Fourier protocol measures.
pub fn cyclic_expectation(omega: &MixedState, k: usize) -> Complex64 {
    omega
        .components()
        .iter()
        .map(|(w, psi)| pure_cyclic_expectation(psi, k) * *w)
        .sum()
}

/// `X_0 … X_{M−1}`.
pub fn cyclic_expectations(omega: &MixedState) -> Vec<Complex64> {
    (0..omega.layout().num_systems())
        .map(|k| cyclic_expectation(omega, k))
        .collect()
}

/// Weight of the cyclically symmetric subspace, `tr(Π_C Ω) = (1/M) Σ_k X_k`.
pub fn symmetric_projection_weight(omega: &MixedState) -> Result<f64> {
    let xs = cyclic_expectations(omega);
    let mean: Complex64 = xs.iter().sum::<Complex64>() / xs.len() as f64;
    if mean.im.abs() > ARITHMETIC_TOLERANCE {
        return Err(Error::Consistency(format!(
            "symmetric projection weight has imaginary part {:.3e}",
            mean.im
        )));
    }
    Ok(mean.re)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclicSymmetryReport {
    pub is_symmetric: bool,
    #[serde(rename = "P0")]
    pub p0: f64,
    #[serde(rename = "worst_Xk_deviation")]
    pub worst_xk_deviation: f64,
}

/// `Ω` is cyclically symmetric iff `P_0 = 1`; reports `P_0` and
/// `max_k |X_k − 1|`.
pub fn certify_cyclic_symmetry(omega: &MixedState, tol: f64) -> Result<CyclicSymmetryReport> {
    let xs = cyclic_expectations(omega);
    let p0 = symmetric_projection_weight(omega)?;
    let worst = xs
        .iter()
        .map(|x| (x - Complex64::new(1.0, 0.0)).norm())
        .fold(0.0, f64::max);
    Ok(CyclicSymmetryReport {
        is_symmetric: (p0 - 1.0).abs() <= tol,
        p0,
        worst_xk_deviation: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{random_pure_state, random_single_photon, single_photon_state, tensor_product, ModeLayout};
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn photon(a: f64, b: f64) -> MixedState {
        single_photon_state(&[c(a, 0.0), c(b, 0.0)]).unwrap().into()
    }

    #[test]
    fn identical_pure_trace_is_one() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let s: MixedState = random_pure_state(2, 2, &mut rng).unwrap().into();
        for m in 1..5 {
            let t = direct_multivariate_trace(&vec![s.clone(); m]).unwrap();
            assert!((t - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn orthogonal_pair_trace_is_zero() {
        let t = direct_multivariate_trace(&[photon(1.0, 0.0), photon(0.0, 1.0)]).unwrap();
        assert_eq!(t, c(0.0, 0.0));
    }

    #[test]
    fn three_state_gram_chain() {
        let a = single_photon_state(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let b = single_photon_state(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let cc = single_photon_state(&[c(0.0, 0.6), c(0.8, 0.0)]).unwrap();
        // ⟨a|b⟩ = 0.6, ⟨b|c⟩ = 0.6·0.6i·... computed by hand:
        // ⟨b|c⟩ = 0.6·0.6i + (−0.8i)·0.8 = 0.36i − 0.64i = −0.28i, ⟨c|a⟩ = −0.6i
        let expected = c(0.6, 0.0) * c(0.0, -0.28) * c(0.0, -0.6);
        let t = direct_multivariate_trace(&[a.into(), b.into(), cc.into()]).unwrap();
        assert!((t - expected).norm() < 1e-14);
    }

    #[test]
    fn lemma_on_random_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for m in 2..=4 {
            let states: Vec<MixedState> = (0..m)
                .map(|_| {
                    MixedState::new(vec![
                        (0.3, random_pure_state(2, 1, &mut rng).unwrap()),
                        (0.7, random_pure_state(2, 1, &mut rng).unwrap()),
                    ])
                    .unwrap()
                })
                .collect();
            let omega = tensor_product(&states).unwrap();
            let x1 = cyclic_expectation(&omega, 1);
            let direct = direct_multivariate_trace(&states).unwrap();
            assert!((x1 - direct).norm() < 1e-10, "M={m}");
            assert!((cyclic_expectation(&omega, 0) - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn x2_factorizes_for_four_photons() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let states: Vec<MixedState> = (0..4).map(|_| random_single_photon(3, &mut rng).unwrap().into()).collect();
        let omega = tensor_product(&states).unwrap();
        let x2 = cyclic_expectation(&omega, 2);
        let t13 = direct_multivariate_trace(&[states[0].clone(), states[2].clone()]).unwrap();
        let t24 = direct_multivariate_trace(&[states[1].clone(), states[3].clone()]).unwrap();
        assert!((x2 - t13 * t24).norm() < 1e-10);
    }

    #[test]
    fn hermitian_symmetry_for_identical_copies() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let rho = MixedState::new(vec![
            (0.5, random_pure_state(2, 1, &mut rng).unwrap()),
            (0.5, random_pure_state(2, 1, &mut rng).unwrap()),
        ])
        .unwrap();
        let omega = tensor_product(&vec![rho; 4]).unwrap();
        let xs = cyclic_expectations(&omega);
        assert!((xs[3] - xs[1].conj()).norm() < 1e-12);
    }

    #[test]
    fn projection_weights() {
        let same = tensor_product(&[photon(0.6, 0.8), photon(0.6, 0.8), photon(0.6, 0.8)]).unwrap();
        assert!((symmetric_projection_weight(&same).unwrap() - 1.0).abs() < 1e-12);

        let orth2 = tensor_product(&[photon(1.0, 0.0), photon(0.0, 1.0)]).unwrap();
        assert!((symmetric_projection_weight(&orth2).unwrap() - 0.5).abs() < 1e-12);

        let e = |i: usize| -> MixedState {
            let mut v = vec![c(0.0, 0.0); 3];
            v[i] = c(1.0, 0.0);
            single_photon_state(&v).unwrap().into()
        };
        let orth3 = tensor_product(&[e(0), e(1), e(2)]).unwrap();
        assert!((symmetric_projection_weight(&orth3).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn certification() {
        let same = tensor_product(&[photon(0.6, 0.8), photon(0.6, 0.8)]).unwrap();
        let r = certify_cyclic_symmetry(&same, 1e-10).unwrap();
        assert!(r.is_symmetric);
        assert!(r.worst_xk_deviation < 1e-12);

        let dist = tensor_product(&[photon(1.0, 0.0), photon(0.0, 1.0)]).unwrap();
        let r = certify_cyclic_symmetry(&dist, 1e-10).unwrap();
        assert!(!r.is_symmetric);
        assert!((r.p0 - 0.5).abs() < 1e-12);

        // ρ⊗ρ with ρ mixed: P0 = (1 + tr ρ²)/2
        let l = ModeLayout::single(2).unwrap();
        let rho = MixedState::new(vec![
            (0.7, crate::fock::PureState::fock(l, vec![1, 0]).unwrap()),
            (0.3, crate::fock::PureState::fock(l, vec![0, 1]).unwrap()),
        ])
        .unwrap();
        let omega = tensor_product(&[rho.clone(), rho]).unwrap();
        let r = certify_cyclic_symmetry(&omega, 1e-10).unwrap();
        assert!(!r.is_symmetric);
        assert!((r.p0 - (1.0 + 0.49 + 0.09) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn shift_blocks_orientation() {
        let v = OccupationVector::new(vec![1, 0, 0, 2, 3, 3]);
        assert_eq!(shift_blocks(&v, 3, 2, 1).counts(), &[3, 3, 1, 0, 0, 2]);
        assert_eq!(shift_blocks(&v, 3, 2, 3).counts(), v.counts());
    }
}
