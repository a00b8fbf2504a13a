//! Exact eigenvalues and spectral statistics for desk-scale graphs.

use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::error::{invalid, Error, Result};
use crate::graph::Multigraph;
use crate::matrix::DenseMatrix;

/// Absolute symmetry tolerance accepted by [`eigenvalues_sym`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Default threshold for counting an eigenvalue as zero.
pub const ZERO_TOL: f64 = 1e-8;

/// Ascending eigenvalues with an absolute accuracy estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub tol: f64,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0f64, |r, x| r.max(x.abs()))
    }

    /// (1/n) sum of lambda^s for s = 0..=s_max.
    pub fn moments(&self, s_max: usize) -> Vec<f64> {
        let n = self.values.len() as f64;
        let mut out = vec![0.0; s_max + 1];
        for &x in &self.values {
            let mut pow = 1.0;
            for m in out.iter_mut() {
                *m += pow;
                pow *= x;
            }
        }
        out.iter_mut().for_each(|m| *m /= n);
        out
    }
}

/// All eigenvalues of a dense symmetric matrix, ascending.
pub fn eigenvalues_sym(m: &DenseMatrix) -> Result<Spectrum> {
    let (diff, row, col) = m.asymmetry();
    let scale = m.row(row).get(col).map_or(1.0, |x| x.abs().max(1.0));
    if diff > SYMMETRY_TOL * scale || diff.is_nan() {
        return Err(Error::NotSymmetric { row, col, diff });
    }
    let n = m.dim();
    let values = eigen::symmetric_eigenvalues(m.clone().into_vec(), n)?;
    let radius = values.iter().fold(0.0f64, |r, x| r.max(x.abs()));
    let tol = 8.0 * (n.max(1) as f64) * f64::EPSILON * radius.max(1.0);
    Ok(Spectrum { values, tol })
}

pub fn laplacian_spectrum(g: &Multigraph) -> Result<Spectrum> {
    eigenvalues_sym(&g.laplacian())
}

pub fn adjacency_spectrum(g: &Multigraph) -> Result<Spectrum> {
    eigenvalues_sym(&g.adjacency())
}

/// Second-smallest Laplacian eigenvalue. A disconnected graph yields its
/// computed (tiny) value, not a clamped zero.
pub fn algebraic_connectivity(g: &Multigraph) -> Result<f64> {
    if g.n() < 2 {
        return invalid("algebraic connectivity needs at least 2 vertices");
    }
    Ok(laplacian_spectrum(g)?.values[1])
}

/// Fraction of eigenvalues with |lambda| <= zero_tol.
pub fn zero_eigenvalue_fraction(s: &Spectrum, zero_tol: f64) -> f64 {
    if s.is_empty() {
        return 0.0;
    }
    let zeros = s.values.iter().filter(|x| x.abs() <= zero_tol).count();
    zeros as f64 / s.len() as f64
}

/// Number of eigenvalues with |lambda| <= zero_tol.
pub fn kernel_dimension(s: &Spectrum, zero_tol: f64) -> usize {
    s.values.iter().filter(|x| x.abs() <= zero_tol).count()
}

/// Kolmogorov-Smirnov distance between the empirical distribution of a
/// sorted sample and `cdf`.
///
/// At every sample point `x` both one-sided limits are compared: the
/// empirical right limit against `cdf(x)` and the empirical left limit
/// against `cdf(x.next_down())`. For a continuous `cdf` this is the exact
/// supremum; for a `cdf` with an atom at a sample point the atom is matched
/// side by side, so a single sample at the location of a unit step scores 0.
pub fn ks_distance<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let n = sample.len();
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let mut worst = 0.0f64;
    let mut i = 0;
    while i < n {
        let x = sample[i];
        let mut j = i;
        while j < n && sample[j] == x {
            j += 1;
        }
        let left = i as f64 / nf;
        let right = j as f64 / nf;
        worst = worst.max((right - cdf(x)).abs());
        worst = worst.max((left - cdf(x.next_down())).abs());
        i = j;
    }
    worst
}
