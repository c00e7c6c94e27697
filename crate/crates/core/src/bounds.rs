//! Quantum Cramér-Rao bounds on force waveform estimation.
//!
//! The total Fisher information splits into a quantum part, set by the
//! two-time covariance of the position that couples to the force, and a
//! classical part, the inverse prior covariance. On a periodic grid both are
//! circulant and the matrix bound `Sigma >= F^-1` diagonalizes bin by bin
//! into the spectral form
//!
//! `C(omega) (S_dq(omega) + hbar^2 / (4 S_dx(omega))) >= hbar^2 / 4`.

use crate::circulant::{circulant_covariance, Circulant};
use crate::error::{Error, Result};
use crate::grid::{FrequencyGrid, TimeGrid};
use crate::models::{
    coupled_position_spectrum, prior_spectrum, transfer_function, PriorModel, SensorModel,
};
use crate::spectrum::{spectrum_integral, SampledSpectrum};

/// Bound density `(hbar^2/4) S_dx / (S_dq S_dx + hbar^2/4)`.
///
/// Written in this rational form so that `S_dx = 0` gives zero and
/// `S_dx = inf` gives `hbar^2 / (4 S_dq)`.
pub fn qcrb_density(s_dq: f64, s_dx: f64, hbar: f64) -> f64 {
    let q = 0.25 * hbar * hbar;
    if s_dx == 0.0 {
        0.0
    } else if s_dx.is_infinite() {
        q / s_dq
    } else {
        q * s_dx / (s_dq * s_dx + q)
    }
}

/// Standard quantum limit `hbar / |G(omega)|` on every bin.
pub fn sql_spectrum(sensor: &SensorModel, grid: FrequencyGrid) -> Result<SampledSpectrum> {
    let g = transfer_function(&sensor.osc, grid)?;
    let hbar = sensor.hbar();
    SampledSpectrum::new(grid, g.values().iter().map(|g| hbar / g.norm()).collect())
}

/// Lower bound on the error spectrum of any force estimator.
pub fn spectral_qcrb(
    sensor: &SensorModel,
    prior: &PriorModel,
    grid: FrequencyGrid,
) -> Result<SampledSpectrum> {
    let s_dq = coupled_position_spectrum(sensor, grid)?;
    let s_dx = prior_spectrum(prior, grid);
    let hbar = sensor.hbar();
    s_dq.zip_with(&s_dx, |q, x| qcrb_density(q, x, hbar))
}

/// Lower bound on the point estimation error `<(x~(t) - x(t))^2>`.
pub fn point_qcrb(sensor: &SensorModel, prior: &PriorModel, grid: FrequencyGrid) -> Result<f64> {
    Ok(spectrum_integral(&spectral_qcrb(sensor, prior, grid)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// Error-spectrum bound, N^2 s.
    pub c_min: SampledSpectrum,
    /// Point-error bound, N^2.
    pub pi_min: f64,
    pub s_sql: SampledSpectrum,
}

impl BoundReport {
    pub fn compute(sensor: &SensorModel, prior: &PriorModel, grid: FrequencyGrid) -> Result<Self> {
        let c_min = spectral_qcrb(sensor, prior, grid)?;
        let pi_min = spectrum_integral(&c_min);
        Ok(Self {
            c_min,
            pi_min,
            s_sql: sql_spectrum(sensor, grid)?,
        })
    }
}

/// Quantum Fisher matrix `F^Q = (4 dt^2 / hbar^2) Cov(dq_j, dq_k)`.
///
/// Its eigenvalue at bin `k` is `4 dt S_dq(omega_k) / hbar^2`.
pub fn fisher_quantum_matrix(sensor: &SensorModel, grid: TimeGrid) -> Result<Circulant> {
    let s_dq = coupled_position_spectrum(sensor, grid.frequencies())?;
    let dt = grid.dt();
    let hbar = sensor.hbar();
    Ok(circulant_covariance(&s_dq).scaled(4.0 * dt * dt / (hbar * hbar)))
}

/// Classical (prior) Fisher matrix: the inverse prior covariance.
///
/// Its eigenvalue at bin `k` is `dt / S_dx(omega_k)`. Fails when the prior
/// spectrum vanishes on any bin, as for a band-limited prior.
pub fn fisher_classical_matrix(prior: &PriorModel, grid: TimeGrid) -> Result<Circulant> {
    let freq = grid.frequencies();
    let s_dx = prior_spectrum(prior, freq);
    let dt = grid.dt();
    let eigenvalues = s_dx
        .values()
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            if s > 0.0 {
                Ok(dt / s)
            } else {
                Err(Error::SingularPrior { omega: freq.omega(i) })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Circulant::from_eigenvalues(&eigenvalues)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FisherMatrices {
    pub grid: TimeGrid,
    pub f_quantum: Circulant,
    pub f_classical: Circulant,
}

impl FisherMatrices {
    pub fn compute(sensor: &SensorModel, prior: &PriorModel, grid: TimeGrid) -> Result<Self> {
        Ok(Self {
            grid,
            f_quantum: fisher_quantum_matrix(sensor, grid)?,
            f_classical: fisher_classical_matrix(prior, grid)?,
        })
    }

    pub fn total(&self) -> Circulant {
        self.f_quantum
            .add(&self.f_classical)
            .expect("both parts share the grid")
    }

    /// Eigenvalues of the total Fisher matrix in DFT order, each required > 0.
    pub fn total_eigenvalues(&self) -> Result<Vec<f64>> {
        let freq = self.grid.frequencies();
        let lq = self.f_quantum.eigenvalues();
        let lc = self.f_classical.eigenvalues();
        lq.iter()
            .zip(&lc)
            .enumerate()
            .map(|(i, (a, b))| {
                let l = a + b;
                if l > 0.0 && l.is_finite() {
                    Ok(l)
                } else {
                    Err(Error::SingularFisher { omega: freq.omega(i) })
                }
            })
            .collect()
    }
}

/// Diagonal entry of `F^-1`, the same at every time by stationarity:
/// `(1/n) sum_k 1 / lambda_k`.
pub fn matrix_point_bound(fm: &FisherMatrices) -> Result<f64> {
    let lambda = fm.total_eigenvalues()?;
    Ok(lambda.iter().map(|l| 1.0 / l).sum::<f64>() / lambda.len() as f64)
}

/// Bound on the stationary quadratic cost with frequency weights `w`:
/// `domega/2pi sum_k w_k dt / lambda_k`, where `dt / lambda_k` is the bound
/// density on bin `k`.
pub fn weighted_cost_bound(fm: &FisherMatrices, weights: &SampledSpectrum) -> Result<f64> {
    if weights.grid() != fm.grid.frequencies() {
        return Err(Error::InvalidSpectrum("weights live on a different grid".into()));
    }
    let lambda = fm.total_eigenvalues()?;
    let dt = fm.grid.dt();
    let density = SampledSpectrum::new(
        weights.grid(),
        lambda
            .iter()
            .zip(weights.values())
            .map(|(l, w)| w * dt / l)
            .collect(),
    )?;
    Ok(spectrum_integral(&density))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{NoiseModel, OscillatorParams, Topology};

    fn sensor(topology: Topology, gamma: f64, s_xi: f64) -> SensorModel {
        SensorModel::new(
            OscillatorParams::new(1.0, 1.0, gamma, 1.0).unwrap(),
            NoiseModel::quantum_limited(s_xi, 1.0).unwrap(),
            topology,
        )
        .unwrap()
    }

    #[test]
    fn density_limits() {
        // 4 S_dq / hbar^2 = 4, prior term dropped.
        assert!((qcrb_density(1.0, f64::INFINITY, 1.0) - 0.25).abs() < 1e-15);
        assert_eq!(qcrb_density(1.0, 0.0, 1.0), 0.0);
        // No quantum information: the bound is the prior.
        assert!((qcrb_density(0.0, 10.0, 1.0) - 10.0).abs() < 1e-14);
    }

    #[test]
    fn sql_values() {
        let g0 = TimeGrid::new(16, 0.5).unwrap().frequencies();
        let s = sql_spectrum(&sensor(Topology::Qnc, 0.0, 0.5), g0).unwrap();
        assert!((s.at(0) - 1.0).abs() < 1e-15);

        let osc = OscillatorParams::new(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!((1.0 / osc.response(2f64.sqrt()).unwrap().norm() - 1.0).abs() < 1e-12);
        let damped = OscillatorParams::new(1.0, 1.0, 0.1, 1.0).unwrap();
        assert!((1.0 / damped.response(1.0).unwrap().norm() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn band_limited_prior_gives_zero_bound_out_of_band() {
        let grid = TimeGrid::new(256, 0.1).unwrap().frequencies();
        let prior = PriorModel::band_limited(1.0, 2.0).unwrap();
        let c = spectral_qcrb(&sensor(Topology::Standard, 1e-3, 0.5), &prior, grid).unwrap();
        for i in 0..grid.len() {
            if grid.omega(i).abs() > 2.0 {
                assert_eq!(c.at(i), 0.0);
            } else {
                assert!(c.at(i) > 0.0);
            }
        }
        assert!(matches!(
            fisher_classical_matrix(&prior, grid.time_grid()),
            Err(Error::SingularPrior { .. })
        ));
    }

    #[test]
    fn flat_prior_fisher_is_scaled_identity() {
        // A flat prior is an OU spectrum only approximately, so build it directly.
        let g = TimeGrid::new(16, 0.25).unwrap();
        let s0 = 2.0;
        let c = Circulant::from_eigenvalues(&[g.dt() / s0; 16]).unwrap();
        let dense = c.to_dense();
        for j in 0..16 {
            for l in 0..16 {
                let expected = if j == l { g.dt() / s0 } else { 0.0 };
                assert!((dense[(j, l)] - expected).abs() < 1e-15);
            }
        }
        let fm = FisherMatrices {
            grid: g,
            f_quantum: Circulant::from_first_row(vec![0.0; 16]).unwrap(),
            f_classical: c,
        };
        let bound = matrix_point_bound(&fm).unwrap();
        assert!((bound - s0 / g.dt()).abs() < 1e-12);
        let flat = SampledSpectrum::constant(g.frequencies(), s0).unwrap();
        assert!((bound - spectrum_integral(&flat)).abs() < 1e-12);
    }

    #[test]
    fn two_bin_classical_fisher() {
        let g = TimeGrid::new(2, 0.5).unwrap();
        let (a, b) = (3.0, 0.5);
        let c = Circulant::from_eigenvalues(&[g.dt() / a, g.dt() / b]).unwrap();
        let eig = c.eigenvalues();
        assert!((eig[0] - g.dt() / a).abs() < 1e-15);
        assert!((eig[1] - g.dt() / b).abs() < 1e-15);
    }

    #[test]
    fn weighted_cost_with_indicator_weights() {
        let grid = TimeGrid::new(64, 0.2).unwrap();
        let s = sensor(Topology::Standard, 1e-2, 0.5);
        let prior = PriorModel::ornstein_uhlenbeck(0.3, 1.0).unwrap();
        let fm = FisherMatrices::compute(&s, &prior, grid).unwrap();
        let lambda = fm.total_eigenvalues().unwrap();
        let k = 5;
        let mut w = vec![0.0; 64];
        w[k] = 1.0;
        let weights = SampledSpectrum::new(grid.frequencies(), w).unwrap();
        let got = weighted_cost_bound(&fm, &weights).unwrap();
        let expected = grid.frequencies().spacing() / (2.0 * std::f64::consts::PI) * grid.dt() / lambda[k];
        assert!((got - expected).abs() < 1e-15 * expected.max(1.0));

        let ones = SampledSpectrum::constant(grid.frequencies(), 1.0).unwrap();
        let all = weighted_cost_bound(&fm, &ones).unwrap();
        let point = matrix_point_bound(&fm).unwrap();
        assert!((all - point).abs() < 1e-13 * point);
    }

    #[test]
    fn singular_total_fisher_is_reported() {
        let g = TimeGrid::new(4, 1.0).unwrap();
        let zero = Circulant::from_first_row(vec![0.0; 4]).unwrap();
        let fm = FisherMatrices {
            grid: g,
            f_quantum: zero.clone(),
            f_classical: zero,
        };
        assert!(matches!(matrix_point_bound(&fm), Err(Error::SingularFisher { .. })));
    }
}
