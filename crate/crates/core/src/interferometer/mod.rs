//! Linear interferometers on the system index and their lift to Fock space.
//!
//! A [`ModeUnitary`] `U` acts on creation operators as
//! `a†_{j,α} ↦ Σ_k U_{k,j} a†_{k,α}` for every internal mode `α`, so the full
//! mode transformation is `U ⊗ I_d`. Transition amplitudes between Fock states
//! are `⟨S|φ(U)|T⟩ = per(U[S,T]) / √(∏S_i! ∏T_j!)`.

mod lift;
mod permanent;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use lift::{apply_to_mixture, lift_and_apply, lift_and_apply_reference, transition_amplitudes};
pub use permanent::permanent;

/// Entrywise tolerance for `U†U = I`.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

/// `M×M` unitary acting on system indices.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeUnitary {
    matrix: DMatrix<Complex64>,
}

impl ModeUnitary {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "mode unitary must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let u = Self { matrix };
        let dev = u.unitarity_deviation();
        if dev > UNITARY_TOLERANCE {
            return Err(Error::InvalidArgument(format!("matrix is not unitary (max |U†U - I| = {dev:.3e})")));
        }
        Ok(u)
    }

    fn from_trusted(matrix: DMatrix<Complex64>) -> Self {
        debug_assert!(Self { matrix: matrix.clone() }.unitarity_deviation() < 1e-9);
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_trusted(DMatrix::identity(dim, dim))
    }

    /// `F_{k,j} = ω^{jk} / √M` with `ω = exp(2πi/M)`.
    pub fn fourier(dim: usize) -> Self {
        let scale = 1.0 / (dim as f64).sqrt();
        Self::from_trusted(DMatrix::from_fn(dim, dim, |k, j| root_of_unity(j * k, dim) * scale))
    }

    /// Cyclic shift `a†_j ↦ a†_{j+1 mod M}`: column `j` maps to row `j+1`.
    pub fn cyclic(dim: usize) -> Self {
        Self::from_trusted(DMatrix::from_fn(dim, dim, |k, j| {
            if k == (j + 1) % dim {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::default()
            }
        }))
    }

    /// `diag(ω⁰, ω¹, …, ω^{M−1})`.
    pub fn diagonal_phases(dim: usize) -> Self {
        Self::from_trusted(DMatrix::from_fn(dim, dim, |k, j| {
            if k == j {
                root_of_unity(j, dim)
            } else {
                Complex64::default()
            }
        }))
    }

    /// `[[cos θ, −e^{−iφ} sin θ], [e^{iφ} sin θ, cos θ]]`.
    pub fn beamsplitter(theta: f64, phi: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(c, 0.0),
                -Complex64::from_polar(s, -phi),
                Complex64::from_polar(s, phi),
                Complex64::new(c, 0.0),
            ],
        );
        Self::from_trusted(m)
    }

    /// Haar-random unitary (QR of a complex Gaussian matrix with phase fix).
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let g = DMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
        });
        let qr = g.qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..dim {
            let d = r[(j, j)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
        Self::from_trusted(q)
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    /// Matrix product `self · other`; lifting is a homomorphism, so this is
    /// "apply `other`, then `self`".
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dimension() != other.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: other.dimension(),
            });
        }
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn powu(&self, exp: u32) -> Self {
        let mut acc = DMatrix::identity(self.dimension(), self.dimension());
        for _ in 0..exp {
            acc = &acc * &self.matrix;
        }
        Self { matrix: acc }
    }

    /// `max |(U†U − I)_{ij}|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dimension();
        let p = self.matrix.adjoint() * &self.matrix;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p[(i, j)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// `max |A_{ij} − B_{ij}|`.
    pub fn max_entry_distance(&self, other: &Self) -> f64 {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `exp(2πi·k/n)` with `k` reduced mod `n` first so large products stay exact.
pub fn root_of_unity(k: usize, n: usize) -> Complex64 {
    let k = k % n;
    let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
    Complex64::from_polar(1.0, angle)
}

/// JSON form: row-major `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
struct ModeUnitaryDoc {
    dimension: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

impl Serialize for ModeUnitary {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dimension();
        let entries = (0..n)
            .map(|r| (0..n).map(|c| [self.matrix[(r, c)].re, self.matrix[(r, c)].im]).collect())
            .collect();
        ModeUnitaryDoc { dimension: n, entries }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModeUnitary {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = ModeUnitaryDoc::deserialize(d)?;
        let n = doc.dimension;
        if doc.entries.len() != n || doc.entries.iter().any(|r| r.len() != n) {
            return Err(D::Error::custom("entries do not match dimension"));
        }
        let m = DMatrix::from_fn(n, n, |r, c| Complex64::new(doc.entries[r][c][0], doc.entries[r][c][1]));
        ModeUnitary::new(m).map_err(D::Error::custom)
    }
}
