//! Discrete Fourier relations between binned probabilities `P_j` and cyclic
//! expectations `X_k`:
//!
//! `P_j = (1/M) Σ_k ω^{−jk} X_k`  and  `X_k = Σ_j ω^{jk} P_j`, `ω = e^{2πi/M}`.
//!
//! `M` is tiny (the number of interfering states), so a direct O(M²) sum
//! keeps the summation order fixed and exact.

use num_complex::Complex64;

use crate::interferometer::root_of_unity;

/// `X_k = Σ_j ω^{jk} P_j`.
pub fn expectations_from_bins(p: &[Complex64]) -> Vec<Complex64> {
    let m = p.len();
    (0..m)
        .map(|k| p.iter().enumerate().map(|(j, pj)| root_of_unity(j * k, m) * pj).sum())
        .collect()
}

/// `P_j = (1/M) Σ_k ω^{−jk} X_k`.
pub fn bins_from_expectations(x: &[Complex64]) -> Vec<Complex64> {
    let m = x.len();
    (0..m)
        .map(|j| {
            let s: Complex64 = x
                .iter()
                .enumerate()
                .map(|(k, xk)| root_of_unity(j * k, m).conj() * xk)
                .sum();
            s / m as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn point_mass() {
        let x = expectations_from_bins(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        for xk in x {
            assert!((xk - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn uniform_pair() {
        let x = expectations_from_bins(&[c(0.5, 0.0), c(0.5, 0.0)]);
        assert!((x[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(x[1].norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn roundtrip(m in 1usize..9, seed in proptest::collection::vec(-1.0f64..1.0, 18)) {
            let mut x: Vec<Complex64> = (0..m).map(|k| c(seed[2 * k], seed[2 * k + 1])).collect();
            x[0] = c(1.0, 0.0);
            let p = bins_from_expectations(&x);
            let back = expectations_from_bins(&p);
            for (a, b) in x.iter().zip(&back) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }
}
