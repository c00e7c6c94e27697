//! Symmetric circulant matrices: the two-time covariance of a stationary
//! periodic process, diagonalized by the DFT.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::Dft;
use crate::grid::TimeGrid;
use crate::spectrum::SampledSpectrum;

/// Symmetric circulant matrix stored by its first row: `C[j][l] = row[(l - j) mod n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Circulant {
    row: Vec<f64>,
}

impl Circulant {
    /// Builds from a first row, which must satisfy `row[d] == row[n - d]`.
    pub fn from_first_row(row: Vec<f64>) -> Result<Self> {
        let n = row.len();
        if n == 0 {
            return Err(Error::InvalidSpectrum("empty circulant".into()));
        }
        let scale = row.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for d in 1..n {
            if (row[d] - row[n - d]).abs() > 1e-12 * scale {
                return Err(Error::NotCirculant { row: 0, col: d });
            }
        }
        Ok(Self { row })
    }

    /// Builds the circulant whose eigenvalue at DFT index `k` is `eigenvalues[k]`.
    /// The eigenvalues must be even under `k -> n - k`.
    pub fn from_eigenvalues(eigenvalues: &[f64]) -> Result<Self> {
        let n = eigenvalues.len();
        let dft = Dft::new(n);
        let buf: Vec<Complex64> = eigenvalues.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut row = dft.inverse_real(buf);
        symmetrize(&mut row);
        Self::from_first_row(row)
    }

    /// Reads a dense matrix, checking every entry against the first row.
    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: m.ncols(),
            });
        }
        let row: Vec<f64> = (0..n).map(|l| m[(0, l)]).collect();
        let scale = row.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
        for j in 0..n {
            for l in 0..n {
                if (m[(j, l)] - row[(l + n - j) % n]).abs() > tol {
                    return Err(Error::NotCirculant { row: j, col: l });
                }
            }
        }
        Self::from_first_row(row)
    }

    pub fn len(&self) -> usize {
        self.row.len()
    }

    pub fn is_empty(&self) -> bool {
        self.row.is_empty()
    }

    pub fn first_row(&self) -> &[f64] {
        &self.row
    }

    pub fn entry(&self, j: usize, l: usize) -> f64 {
        let n = self.row.len();
        self.row[(l + n - j % n) % n]
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.row.len();
        DMatrix::from_fn(n, n, |j, l| self.row[(l + n - j) % n])
    }

    /// Eigenvalues in DFT order: `lambda_k = sum_d row[d] exp(-2 pi i k d / n)`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        Dft::new(self.row.len())
            .forward_real(&self.row)
            .into_iter()
            .map(|c| c.re)
            .collect()
    }

    /// Smallest and largest eigenvalue.
    pub fn eigenvalue_range(&self) -> (f64, f64) {
        self.eigenvalues()
            .into_iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }

    /// Scales every entry.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            row: self.row.iter().map(|v| v * factor).collect(),
        }
    }

    /// Entry-wise sum of two circulants of equal order.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(Self {
            row: self.row.iter().zip(&other.row).map(|(a, b)| a + b).collect(),
        })
    }
}

fn symmetrize(row: &mut [f64]) {
    let n = row.len();
    for d in 1..n.div_ceil(2) {
        let avg = 0.5 * (row[d] + row[n - d]);
        row[d] = avg;
        row[n - d] = avg;
    }
}

/// Covariance matrix of the periodic stationary process with spectrum `s`:
/// `C[j][l] = 1/(n dt) sum_k S_k cos(omega_k (j - l) dt)`.
pub fn circulant_covariance(s: &SampledSpectrum) -> Circulant {
    let grid = s.grid().time_grid();
    let eigenvalues: Vec<f64> = s.values().iter().map(|v| v / grid.dt()).collect();
    // Spectra from the models are even; an odd component would make the
    // process complex, so only the even part is kept.
    let n = eigenvalues.len();
    let even: Vec<f64> = (0..n).map(|k| 0.5 * (eigenvalues[k] + eigenvalues[(n - k) % n])).collect();
    Circulant::from_eigenvalues(&even).expect("even eigenvalues give a symmetric circulant")
}

/// Eigenvalues of a dense symmetric circulant, in DFT order matching the
/// frequency-grid bins.
pub fn circulant_eigenvalues(c: &DMatrix<f64>) -> Result<Vec<f64>> {
    Ok(Circulant::from_dense(c)?.eigenvalues())
}

/// Diagonal entry of `C^-1` for a circulant with the given eigenvalues.
pub fn inverse_diagonal(eigenvalues: &[f64]) -> f64 {
    eigenvalues.iter().map(|l| 1.0 / l).sum::<f64>() / eigenvalues.len() as f64
}

/// Dense orders above this are refused by callers that materialize matrices.
pub const DENSE_CAP: usize = 8192;

pub fn check_dense_cap(grid: TimeGrid) -> Result<()> {
    if grid.len() > DENSE_CAP {
        return Err(Error::DenseCapExceeded {
            n: grid.len(),
            cap: DENSE_CAP,
        });
    }
    Ok(())
}
