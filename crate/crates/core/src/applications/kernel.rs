use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hom_overlap;
use crate::error::{Error, Result};
use crate::fock::MixedState;
use crate::protocol::Mode;

/// Symmetric matrix of pairwise overlaps `K_ij = tr(ρ_i ρ_j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelMatrix {
    pub ids: Vec<String>,
    pub values: Vec<Vec<f64>>,
    /// Sampling stream used for each unordered pair `(i, j, stream)`, `i < j`.
    /// Empty in exact mode.
    pub streams: Vec<(usize, usize, u64)>,
}

impl KernelMatrix {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    /// CSV with a header row of ids and each row led by its id.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id");
        for id in &self.ids {
            out.push(',');
            out.push_str(id);
        }
        out.push('\n');
        for (id, row) in self.ids.iter().zip(&self.values) {
            out.push_str(id);
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// Overlap kernel over encoded states. Each unordered pair is estimated once,
/// on its own stream, and mirrored; the diagonal uses exact purities.
pub fn kernel_matrix(states: &[MixedState], ids: Option<Vec<String>>, mode: Mode) -> Result<KernelMatrix> {
    let n = states.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("kernel needs at least two states, got {n}")));
    }
    let ids = match ids {
        Some(ids) if ids.len() != n => {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: ids.len(),
            })
        }
        Some(ids) => ids,
        None => (0..n).map(|i| i.to_string()).collect(),
    };
    let d = states[0].layout();
    if states.iter().any(|s| s.layout() != d) {
        return Err(Error::LayoutMismatch("encoded states differ in layout".into()));
    }

    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let off: Vec<f64> = pairs
        .par_iter()
        .enumerate()
        .map(|(p, &(i, j))| hom_overlap(&states[i], &states[j], mode.substream(p as u64)).map(|o| o.value))
        .collect::<Result<_>>()?;
    let diag: Vec<f64> = states
        .par_iter()
        .map(|s| hom_overlap(s, s, Mode::Exact).map(|o| o.value))
        .collect::<Result<_>>()?;

    let mut values = vec![vec![0.0; n]; n];
    for (i, v) in diag.into_iter().enumerate() {
        values[i][i] = v;
    }
    for (&(i, j), v) in pairs.iter().zip(off) {
        values[i][j] = v;
        values[j][i] = v;
    }
    let streams = match mode.stream() {
        Some(base) => pairs
            .iter()
            .enumerate()
            .map(|(p, &(i, j))| (i, j, base.wrapping_add(p as u64)))
            .collect(),
        None => Vec::new(),
    };
    Ok(KernelMatrix { ids, values, streams })
}

/// `sign(Σ_i a_i y_i K_i + b)` with `sign(0) = +1`.
pub fn classifier_eval(k_row: &[f64], coeffs: &[f64], labels: &[i8], bias: f64) -> Result<i8> {
    if coeffs.len() != k_row.len() {
        return Err(Error::DimensionMismatch {
            expected: k_row.len(),
            found: coeffs.len(),
        });
    }
    if labels.len() != k_row.len() {
        return Err(Error::DimensionMismatch {
            expected: k_row.len(),
            found: labels.len(),
        });
    }
    if labels.iter().any(|&y| y != 1 && y != -1) {
        return Err(Error::InvalidArgument("labels must be +1 or -1".into()));
    }
    let s: f64 = k_row
        .iter()
        .zip(coeffs)
        .zip(labels)
        .map(|((k, a), &y)| a * y as f64 * k)
        .sum::<f64>()
        + bias;
    Ok(if s >= 0.0 { 1 } else { -1 })
}
