use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::power_trace;
use crate::error::{Error, Result};
use crate::fock::MixedState;
use crate::protocol::Mode;

/// Eigenvalues are flagged when their real part leaves `[−tol, 1 + tol]` or
/// their imaginary part exceeds `tol`. In sampled mode `tol` grows by the
/// sampling precision times the rank bound.
const SPECTRUM_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// `tr ρ^k` for `k = 1..=n`; the first entry is 1 by normalization.
    pub power_traces: Vec<f64>,
    /// `c_1 … c_n` of `λ^n + c_1 λ^{n−1} + … + c_n`.
    pub char_poly_coeffs: Vec<f64>,
    /// Roots of the characteristic polynomial, descending by real part.
    #[serde(with = "complex_pairs")]
    pub eigenvalues: Vec<Complex64>,
    pub largest_eigenvalue: f64,
    /// Indices into `eigenvalues` that are not valid density-operator
    /// eigenvalues within tolerance.
    pub flagged: Vec<usize>,
}

mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let v: Vec<[f64; 2]> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|p| Complex64::new(p[0], p[1])).collect())
    }
}

/// Newton identities: `k·c_k = −Σ_{i=1..k} c_{k−i} t_i` with `c_0 = 1`.
pub(crate) fn newton_coefficients(power_traces: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for k in 1..=power_traces.len() {
        let s: f64 = (1..=k).map(|i| c[k - i] * power_traces[i - 1]).sum();
        c.push(-s / k as f64);
    }
    c.split_off(1)
}

/// Roots of the monic polynomial `λ^n + c_1 λ^{n−1} + … + c_n` from the
/// eigenvalues of its companion matrix.
pub(crate) fn monic_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::RootFinding("non-finite polynomial coefficient".into()));
    }
    let mut companion = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        companion[(0, j)] = -coeffs[j];
    }
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    let roots: Vec<Complex64> = companion.complex_eigenvalues().iter().copied().collect();
    if roots.len() != n || roots.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::RootFinding(format!("companion eigensolve returned {} roots for degree {n}", roots.len())));
    }
    Ok(roots)
}

/// Spectrum of `ρ` from `tr ρ^k`, `k = 2..=rank_bound`, estimated on
/// independent streams.
pub fn spectrum_from_traces(rho: &MixedState, rank_bound: usize, mode: Mode) -> Result<SpectrumReport> {
    if rank_bound < 2 {
        return Err(Error::InvalidArgument(format!("rank bound must be at least 2, got {rank_bound}")));
    }
    let mut power_traces = vec![1.0];
    for k in 2..=rank_bound {
        power_traces.push(power_trace(rho, k, mode.substream(k as u64))?);
    }
    let tol = SPECTRUM_TOLERANCE + mode.epsilon() * rank_bound as f64;
    spectrum_from_power_traces(power_traces, tol)
}

/// Characteristic polynomial and roots from `t_1 … t_n`; roots outside the
/// density-operator range by more than `tol` are flagged.
pub fn spectrum_from_power_traces(power_traces: Vec<f64>, tol: f64) -> Result<SpectrumReport> {
    if power_traces.is_empty() {
        return Err(Error::InvalidArgument("no power traces".into()));
    }
    let char_poly_coeffs = newton_coefficients(&power_traces);
    let mut eigenvalues = monic_roots(&char_poly_coeffs)?;
    eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    let flagged = eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, z)| z.re < -tol || z.re > 1.0 + tol || z.im.abs() > tol)
        .map(|(i, _)| i)
        .collect();
    Ok(SpectrumReport {
        largest_eigenvalue: eigenvalues[0].re,
        power_traces,
        char_poly_coeffs,
        eigenvalues,
        flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{dual_rail_qubit, ModeLayout, PureState};

    fn orthogonal_mixture(weights: &[f64]) -> MixedState {
        let l = ModeLayout::single(weights.len()).unwrap();
        MixedState::new(
            weights
                .iter()
                .enumerate()
                .map(|(i, &w)| {
                    let mut occ = vec![0; weights.len()];
                    occ[i] = 1;
                    (w, PureState::fock(l, occ).unwrap())
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn newton_identities() {
        let c = newton_coefficients(&[1.0, 0.625]);
        assert!((c[0] + 1.0).abs() < 1e-15);
        assert!((c[1] - 0.1875).abs() < 1e-15);
    }

    #[test]
    fn quadratic_roots() {
        let mut r = monic_roots(&[-1.0, 0.1875]).unwrap();
        r.sort_by(|a, b| b.re.total_cmp(&a.re));
        assert!((r[0] - Complex64::new(0.75, 0.0)).norm() < 1e-12);
        assert!((r[1] - Complex64::new(0.25, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn skewed_pair() {
        let s = spectrum_from_traces(&orthogonal_mixture(&[0.75, 0.25]), 2, Mode::Exact).unwrap();
        assert!((s.power_traces[1] - 0.625).abs() < 1e-10);
        assert!((s.char_poly_coeffs[1] - 0.1875).abs() < 1e-10);
        assert!((s.largest_eigenvalue - 0.75).abs() < 1e-8);
        assert!((s.eigenvalues[1].re - 0.25).abs() < 1e-8);
        assert!(s.flagged.is_empty());
    }

    #[test]
    fn degenerate_pair() {
        let s = spectrum_from_traces(&orthogonal_mixture(&[0.5, 0.5]), 2, Mode::Exact).unwrap();
        for z in &s.eigenvalues {
            assert!((z - Complex64::new(0.5, 0.0)).norm() < 1e-6);
        }
        let sum: Complex64 = s.eigenvalues.iter().sum();
        assert!((sum.re - 1.0).abs() < 1e-6);
    }

    #[test]
    fn pure_state_spectrum() {
        let rho: MixedState = dual_rail_qubit(0.2, 0.9).into();
        let s = spectrum_from_traces(&rho, 3, Mode::Exact).unwrap();
        assert!((s.largest_eigenvalue - 1.0).abs() < 1e-6);
        for z in &s.eigenvalues[1..] {
            assert!(z.norm() < 1e-4);
        }
    }

    #[test]
    fn rejects_small_rank_bound() {
        assert!(spectrum_from_traces(&orthogonal_mixture(&[0.5, 0.5]), 1, Mode::Exact).is_err());
    }

    #[test]
    fn report_json_roundtrip() {
        let s = spectrum_from_traces(&orthogonal_mixture(&[0.75, 0.25]), 2, Mode::Exact).unwrap();
        let back: SpectrumReport = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
