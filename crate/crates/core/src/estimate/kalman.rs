//! Kalman filter and RTS fixed-interval smoother on the state `[q, p, x]`
//! (`[Q, dp, x]` with backaction cancellation), with an Ornstein-Uhlenbeck
//! force.
//!
//! Continuous model:
//!
//! ```text
//! dq/dt = p / m
//! dp/dt = -m omega_m^2 q - gamma p + x + xi      (xi only in the standard topology)
//! dx/dt = -kappa x + sqrt(2 kappa P) w
//! y_j   = q(t_j) + eta_j,   Var(eta_j) = S_eta / dt
//! ```
//!
//! The transition and process noise over one sample are exact, obtained from
//! the matrix exponential of the Van Loan block generator.

use nalgebra::{Matrix3, RowVector3, SMatrix, Vector3};

use crate::error::{invalid, Error, Result};
use crate::models::{PriorModel, SensorModel};

const FORCE: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceModel {
    pub dt: f64,
    pub transition: Matrix3<f64>,
    pub process_noise: Matrix3<f64>,
    pub observation: RowVector3<f64>,
    pub observation_variance: f64,
    /// Stationary state covariance, used as the initial condition.
    pub initial_covariance: Matrix3<f64>,
}

impl StateSpaceModel {
    pub fn from_models(sensor: &SensorModel, prior: &PriorModel, dt: f64) -> Result<Self> {
        let PriorModel::OrnsteinUhlenbeck { kappa, p_var } = *prior else {
            return Err(Error::UnsupportedPrior(
                "only the Ornstein-Uhlenbeck prior is Markov in finite dimension".into(),
            ));
        };
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("grid.dt", format!("must be > 0, got {dt}")));
        }
        let osc = sensor.osc;
        if osc.gamma <= 0.0 {
            return Err(invalid("gamma", "the state-space model needs gamma > 0 to be stationary"));
        }
        let generator = Matrix3::new(
            0.0, 1.0 / osc.mass, 0.0,
            -osc.mass * osc.omega_m * osc.omega_m, -osc.gamma, 1.0,
            0.0, 0.0, -kappa,
        );
        let backaction = if sensor.backaction_in_record() {
            sensor.noise.s_xi
        } else {
            0.0
        };
        let intensity = Matrix3::from_diagonal(&Vector3::new(0.0, backaction, 2.0 * kappa * p_var));
        let (transition, process_noise) = discretize(&generator, &intensity, dt);
        let initial_covariance = stationary_covariance(&transition, &process_noise)?;
        Ok(Self {
            dt,
            transition,
            process_noise,
            observation: RowVector3::new(1.0, 0.0, 0.0),
            observation_variance: sensor.noise.s_eta / dt,
            initial_covariance,
        })
    }

    /// One Riccati step: predicted covariance to the next predicted covariance.
    pub fn riccati_step(&self, predicted: &Matrix3<f64>) -> Matrix3<f64> {
        let filtered = self.update_covariance(predicted).0;
        self.predict_covariance(&filtered)
    }

    fn predict_covariance(&self, filtered: &Matrix3<f64>) -> Matrix3<f64> {
        let p = self.transition * filtered * self.transition.transpose() + self.process_noise;
        symmetrize(p)
    }

    /// Joseph-form measurement update; returns the filtered covariance, the
    /// gain and the innovation variance.
    fn update_covariance(&self, predicted: &Matrix3<f64>) -> (Matrix3<f64>, Vector3<f64>, f64) {
        let h = self.observation;
        let s = (h * predicted * h.transpose())[(0, 0)] + self.observation_variance;
        let k = predicted * h.transpose() / s;
        let i_kh = Matrix3::identity() - k * h;
        let p = i_kh * predicted * i_kh.transpose() + k * k.transpose() * self.observation_variance;
        (symmetrize(p), k, s)
    }

    /// Steady-state predicted and filtered covariances, by iterating the
    /// Riccati recursion from the stationary prior until it stops moving.
    pub fn steady_state(&self) -> Result<(Matrix3<f64>, Matrix3<f64>)> {
        let mut p = self.initial_covariance;
        for _ in 0..1_000_000 {
            let next = self.riccati_step(&p);
            let change = (next - p).abs().max();
            p = next;
            if change <= 1e-15 * p.abs().max() {
                return Ok((p, self.update_covariance(&p).0));
            }
        }
        Err(Error::InvalidParameter {
            name: "grid.dt",
            reason: "Riccati recursion did not converge".into(),
        })
    }
}

fn symmetrize(p: Matrix3<f64>) -> Matrix3<f64> {
    (p + p.transpose()) * 0.5
}

/// Exact zero-order discretization of `dX = A X dt + dW`, `E dW dW' = Qc dt`.
fn discretize(a: &Matrix3<f64>, qc: &Matrix3<f64>, dt: f64) -> (Matrix3<f64>, Matrix3<f64>) {
    let mut m = SMatrix::<f64, 6, 6>::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&(-a * dt));
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(&(qc * dt));
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&(a.transpose() * dt));
    let e = m.exp();
    let phi = e.fixed_view::<3, 3>(3, 3).transpose();
    let q = phi * e.fixed_view::<3, 3>(0, 3);
    (phi, symmetrize(q))
}

/// Solves `P = F P F' + Q` through the Kronecker-product linear system.
fn stationary_covariance(f: &Matrix3<f64>, q: &Matrix3<f64>) -> Result<Matrix3<f64>> {
    let lhs = SMatrix::<f64, 9, 9>::identity() - f.kronecker(f);
    let rhs = SMatrix::<f64, 9, 1>::from_column_slice(q.as_slice());
    let sol = lhs.lu().solve(&rhs).ok_or_else(|| Error::InvalidParameter {
        name: "gamma",
        reason: "dynamics have no stationary covariance".into(),
    })?;
    Ok(symmetrize(Matrix3::from_column_slice(sol.as_slice())))
}

fn check_psd(p: &Matrix3<f64>, step: usize) -> Result<()> {
    let eig = p.symmetric_eigenvalues();
    let (lo, hi) = (eig.min(), eig.max());
    if lo < -1e-10 * hi.abs() || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::NonPsdCovariance {
            step,
            min_eigenvalue: lo,
            max_eigenvalue: hi,
        });
    }
    Ok(())
}

/// Forward pass over a record.
#[derive(Debug, Clone)]
pub struct FilterOutput {
    pub predicted_states: Vec<Vector3<f64>>,
    pub predicted_covariances: Vec<Matrix3<f64>>,
    pub filtered_states: Vec<Vector3<f64>>,
    pub filtered_covariances: Vec<Matrix3<f64>>,
    pub innovation_variances: Vec<f64>,
}

impl FilterOutput {
    pub fn force_estimate(&self) -> Vec<f64> {
        self.filtered_states.iter().map(|s| s[FORCE]).collect()
    }

    pub fn force_variance(&self) -> Vec<f64> {
        self.filtered_covariances.iter().map(|p| p[(FORCE, FORCE)]).collect()
    }

    /// Force variance at the final step, where the recursion has settled.
    pub fn steady_state_force_variance(&self) -> f64 {
        self.filtered_covariances.last().map_or(f64::NAN, |p| p[(FORCE, FORCE)])
    }
}

pub fn kalman_filter(y: &[f64], model: &StateSpaceModel) -> Result<FilterOutput> {
    let n = y.len();
    let mut out = FilterOutput {
        predicted_states: Vec::with_capacity(n),
        predicted_covariances: Vec::with_capacity(n),
        filtered_states: Vec::with_capacity(n),
        filtered_covariances: Vec::with_capacity(n),
        innovation_variances: Vec::with_capacity(n),
    };
    let mut state = Vector3::zeros();
    let mut cov = model.initial_covariance;
    for (j, &obs) in y.iter().enumerate() {
        if j > 0 {
            state = model.transition * state;
            cov = model.predict_covariance(&cov);
        }
        out.predicted_states.push(state);
        out.predicted_covariances.push(cov);

        let (filtered, gain, s) = model.update_covariance(&cov);
        let innovation = obs - (model.observation * state)[0];
        state += gain * innovation;
        cov = filtered;
        check_psd(&cov, j)?;

        out.filtered_states.push(state);
        out.filtered_covariances.push(cov);
        out.innovation_variances.push(s);
    }
    Ok(out)
}

/// Backward pass.
#[derive(Debug, Clone)]
pub struct SmootherOutput {
    pub states: Vec<Vector3<f64>>,
    pub covariances: Vec<Matrix3<f64>>,
}

impl SmootherOutput {
    pub fn force_estimate(&self) -> Vec<f64> {
        self.states.iter().map(|s| s[FORCE]).collect()
    }

    pub fn force_variance(&self) -> Vec<f64> {
        self.covariances.iter().map(|p| p[(FORCE, FORCE)]).collect()
    }

    /// Indices of the middle 80% of the record.
    pub fn interior(&self) -> std::ops::Range<usize> {
        let n = self.states.len();
        let edge = n / 10;
        edge..n - edge
    }

    /// Mean smoothed force variance over the interior.
    pub fn interior_force_variance(&self) -> f64 {
        let range = self.interior();
        let len = range.len() as f64;
        self.covariances[range].iter().map(|p| p[(FORCE, FORCE)]).sum::<f64>() / len
    }
}

pub fn rts_smoother(filter: &FilterOutput, model: &StateSpaceModel) -> Result<SmootherOutput> {
    let n = filter.filtered_states.len();
    if n == 0 {
        return Ok(SmootherOutput {
            states: Vec::new(),
            covariances: Vec::new(),
        });
    }
    let mut states = filter.filtered_states.clone();
    let mut covs = filter.filtered_covariances.clone();
    for j in (0..n - 1).rev() {
        let pred = &filter.predicted_covariances[j + 1];
        let chol = pred.cholesky().ok_or_else(|| {
            let eig = pred.symmetric_eigenvalues();
            Error::NonPsdCovariance {
                step: j + 1,
                min_eigenvalue: eig.min(),
                max_eigenvalue: eig.max(),
            }
        })?;
        // C = P_f F' P_pred^-1, computed as (P_pred^-1 F P_f)'.
        let gain = chol.solve(&(model.transition * filter.filtered_covariances[j])).transpose();
        states[j] = filter.filtered_states[j] + gain * (states[j + 1] - filter.predicted_states[j + 1]);
        let p = filter.filtered_covariances[j] + gain * (covs[j + 1] - pred) * gain.transpose();
        covs[j] = symmetrize(p);
        check_psd(&covs[j], j)?;
    }
    Ok(SmootherOutput {
        states,
        covariances: covs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{NoiseModel, OscillatorParams, Topology};

    fn model(topology: Topology, s_xi: f64, kappa: f64) -> StateSpaceModel {
        let sensor = SensorModel::new(
            OscillatorParams::new(1.0, 1.0, 1e-3, 1.0).unwrap(),
            NoiseModel::quantum_limited(s_xi, 1.0).unwrap(),
            topology,
        )
        .unwrap();
        let prior = PriorModel::ornstein_uhlenbeck(kappa, 1.0).unwrap();
        StateSpaceModel::from_models(&sensor, &prior, 0.05).unwrap()
    }

    #[test]
    fn force_block_is_exact_ou() {
        let m = model(Topology::Qnc, 0.5, 0.2);
        assert!((m.transition[(2, 2)] - (-0.2f64 * 0.05).exp()).abs() < 1e-14);
        let q = 1.0 - (-2.0f64 * 0.2 * 0.05).exp();
        assert!((m.process_noise[(2, 2)] - q).abs() < 1e-13);
        assert!((m.initial_covariance[(2, 2)] - 1.0).abs() < 1e-9);
        // No backaction on the collective momentum: noise only enters through x.
        let std = model(Topology::Standard, 0.5, 0.2);
        assert!(std.process_noise[(1, 1)] > m.process_noise[(1, 1)]);
    }

    #[test]
    fn stationary_covariance_is_fixed_point() {
        let m = model(Topology::Standard, 0.5, 0.2);
        let p = m.initial_covariance;
        let next = m.transition * p * m.transition.transpose() + m.process_noise;
        assert!((next - p).abs().max() < 1e-8 * p.abs().max());
    }

    #[test]
    fn band_limited_prior_is_unsupported() {
        let sensor = SensorModel::new(
            OscillatorParams::new(1.0, 1.0, 1e-3, 1.0).unwrap(),
            NoiseModel::quantum_limited(0.5, 1.0).unwrap(),
            Topology::Qnc,
        )
        .unwrap();
        let prior = PriorModel::band_limited(1.0, 1.0).unwrap();
        assert!(matches!(
            StateSpaceModel::from_models(&sensor, &prior, 0.05),
            Err(Error::UnsupportedPrior(_))
        ));
    }

    #[test]
    fn nearly_noiseless_observation_pins_position() {
        // S_xi huge -> S_eta tiny: the position is known almost exactly.
        let m = model(Topology::Qnc, 1e8, 0.2);
        let y = vec![0.0; 400];
        let out = kalman_filter(&y, &m).unwrap();
        let last = out.filtered_covariances.last().unwrap();
        assert!(last[(0, 0)] <= m.observation_variance * 1.0000001);
        let s = *out.innovation_variances.last().unwrap();
        assert!(s < 1e-6, "innovation variance {s}");
    }

    #[test]
    fn smoothing_beats_filtering_for_slow_force() {
        let m = model(Topology::Standard, 0.5, 1e-3);
        let y = vec![0.0; 4000];
        let f = kalman_filter(&y, &m).unwrap();
        let s = rts_smoother(&f, &m).unwrap();
        let mid = 2000;
        assert!(s.force_variance()[mid] < 0.5 * f.force_variance()[mid]);
        for j in s.interior() {
            assert!(s.force_variance()[j] <= f.force_variance()[j] * (1.0 + 1e-12));
        }
    }
}
