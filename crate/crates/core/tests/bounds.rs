mod common;

use common::{direct_dft, even_band_integral, gain_squared, ou_density};
use forcebound::bounds::{
    fisher_classical_matrix, fisher_quantum_matrix, matrix_point_bound, point_qcrb, spectral_qcrb,
    sql_spectrum, weighted_cost_bound, BoundReport, FisherMatrices,
};
use forcebound::models::{
    coupled_position_spectrum, observation_noise_spectrum, prior_spectrum, NoiseModel, OscillatorParams,
    PriorModel, SensorModel, Topology,
};
use forcebound::spectrum::{spectrum_integral, SampledSpectrum};
use forcebound::TimeGrid;
use proptest::prelude::*;
use std::f64::consts::PI;

fn sensor(topology: Topology, gamma: f64, s_xi: f64) -> SensorModel {
    SensorModel::new(
        OscillatorParams::new(1.0, 1.0, gamma, 1.0).unwrap(),
        NoiseModel::quantum_limited(s_xi, 1.0).unwrap(),
        topology,
    )
    .unwrap()
}

fn ou() -> PriorModel {
    PriorModel::ornstein_uhlenbeck(0.2, 1.0).unwrap()
}

/// Continuous bound integrand `(4|G|^2 S_xi / hbar^2 + 1/S_dx)^-1`, hbar = m = omega_m = 1.
fn bound_integrand(gamma: f64, s_xi: f64, omega: f64) -> f64 {
    1.0 / (4.0 * gain_squared(1.0, 1.0, gamma, omega) * s_xi + 1.0 / ou_density(0.2, 1.0, omega))
}

const BREAKS: [f64; 9] = [0.2, 0.5, 0.9, 0.99, 0.999, 1.0, 1.001, 1.01, 1.1];

#[test]
fn point_bound_matches_quadrature_oracle() {
    let grid = TimeGrid::new(1 << 16, 0.05).unwrap();
    let got = point_qcrb(&sensor(Topology::Standard, 1e-3, 0.5), &ou(), grid.frequencies()).unwrap();
    let band = even_band_integral(&|w| bound_integrand(1e-3, 0.5, w), PI / grid.dt(), &BREAKS, 1e-14);
    assert!((got - band).abs() < 0.01 * band, "grid {got} vs oracle {band}");
}

#[test]
fn quantum_fisher_diagonal_is_position_variance() {
    // Resolvable resonance: gamma = 0.1 against a bin width of ~0.012.
    let (gamma, s_xi) = (0.1, 0.5);
    let grid = TimeGrid::new(1 << 14, 0.03).unwrap();
    let fq = fisher_quantum_matrix(&sensor(Topology::Standard, gamma, s_xi), grid).unwrap();
    let dt = grid.dt();
    let var_q = even_band_integral(
        &|w| gain_squared(1.0, 1.0, gamma, w) * s_xi,
        PI / dt,
        &[0.5, 0.9, 0.95, 1.0, 1.05, 1.1, 2.0],
        1e-14,
    );
    // Closed form of the full-line integral, S_xi / (2 m^2 omega_m^2 gamma).
    assert!((var_q - s_xi / (2.0 * gamma)).abs() < 1e-3 * var_q);
    let diag = fq.first_row()[0];
    let expected = 4.0 * dt * dt * var_q;
    assert!((diag - expected).abs() < 0.01 * expected, "{diag} vs {expected}");
}

#[test]
fn quantum_fisher_eigenvalues() {
    let grid = TimeGrid::new(256, 0.05).unwrap();
    let s = sensor(Topology::Standard, 1e-2, 0.5);
    let fq = fisher_quantum_matrix(&s, grid).unwrap();
    let s_dq = coupled_position_spectrum(&s, grid.frequencies()).unwrap();
    let oracle = direct_dft(fq.first_row());
    let scale = 4.0 * grid.dt() * s_dq.values().iter().fold(0.0f64, |a, &b| a.max(b));
    for k in 0..256 {
        let expected = 4.0 * grid.dt() * s_dq.at(k);
        assert!((oracle[k].0 - expected).abs() < 1e-12 * scale);
    }
}

#[test]
fn classical_fisher_eigenvalues_for_ou() {
    let grid = TimeGrid::new(128, 0.1).unwrap();
    let fc = fisher_classical_matrix(&ou(), grid).unwrap();
    let oracle = direct_dft(fc.first_row());
    let freq = grid.frequencies();
    for (k, (re, _)) in oracle.iter().enumerate() {
        let w = freq.omega(k);
        let expected = grid.dt() * (0.04 + w * w) / (2.0 * 0.2);
        assert!((re - expected).abs() < 1e-10 * expected);
    }
}

#[test]
fn matrix_bound_equals_spectral_bound() {
    for topology in [Topology::Standard, Topology::Qnc] {
        let grid = TimeGrid::new(4096, 0.05).unwrap();
        let s = sensor(topology, 1e-3, 0.5);
        let fm = FisherMatrices::compute(&s, &ou(), grid).unwrap();
        let matrix = matrix_point_bound(&fm).unwrap();
        let spectral = point_qcrb(&s, &ou(), grid.frequencies()).unwrap();
        assert!((matrix - spectral).abs() <= 1e-10 * spectral, "{matrix} vs {spectral}");
    }
}

#[test]
fn matrix_bound_matches_dense_inverse() {
    let grid = TimeGrid::new(96, 0.1).unwrap();
    let fm = FisherMatrices::compute(&sensor(Topology::Standard, 0.05, 0.5), &ou(), grid).unwrap();
    let total = fm.f_quantum.to_dense() + fm.f_classical.to_dense();
    let inv = total.try_inverse().unwrap();
    let bound = matrix_point_bound(&fm).unwrap();
    for j in 0..96 {
        assert!((inv[(j, j)] - bound).abs() < 1e-9 * bound);
    }
}

#[test]
fn banded_cost_matches_quadrature() {
    let grid = TimeGrid::new(1 << 15, 0.05).unwrap();
    let freq = grid.frequencies();
    let kappa = 0.2;
    let fm = FisherMatrices::compute(&sensor(Topology::Standard, 1e-3, 0.5), &ou(), grid).unwrap();
    let weights = SampledSpectrum::from_fn(freq, |w| if w.abs() <= kappa { 1.0 } else { 0.0 }).unwrap();
    let got = weighted_cost_bound(&fm, &weights).unwrap();
    let oracle = even_band_integral(&|w| bound_integrand(1e-3, 0.5, w), kappa, &[], 1e-14);
    assert!((got - oracle).abs() < 0.01 * oracle, "{got} vs {oracle}");
}

#[test]
fn prior_only_limit() {
    let grid = TimeGrid::new(1 << 16, 0.05).unwrap().frequencies();
    let pi = point_qcrb(&sensor(Topology::Standard, 1e-3, 1e-12), &ou(), grid).unwrap();
    assert!((pi - 1.0).abs() < 0.01);
}

#[test]
fn report_is_consistent() {
    let grid = TimeGrid::new(512, 0.05).unwrap().frequencies();
    let r = BoundReport::compute(&sensor(Topology::Qnc, 1e-3, 0.5), &ou(), grid).unwrap();
    assert_eq!(r.pi_min, spectrum_integral(&r.c_min));
    assert!(r.c_min.values().iter().all(|&v| v >= 0.0));
}

#[test]
fn standard_noise_never_beats_sql() {
    let grid = TimeGrid::new(1 << 12, 0.05).unwrap().frequencies();
    let s = sensor(Topology::Standard, 1e-3, 0.5);
    let sz = observation_noise_spectrum(&s, grid).unwrap();
    let sql = sql_spectrum(&s, grid).unwrap();
    for i in 0..grid.len() {
        assert!(sz.at(i) >= sql.at(i) * (1.0 - 1e-14));
    }
    // Touches the limit at DC, where S_xi = hbar / (2 |G(0)|).
    assert!((sz.at(0) - sql.at(0)).abs() < 1e-12);
}

fn arb_sensor() -> impl Strategy<Value = (SensorModel, PriorModel)> {
    (
        0.2f64..5.0,
        0.2f64..5.0,
        1e-3f64..0.5,
        0.05f64..5.0,
        0.5f64..3.0,
        prop::bool::ANY,
        0.05f64..1.0,
        0.2f64..4.0,
    )
        .prop_map(|(m, wm, gamma_ratio, s_xi, excess, qnc, kappa, p)| {
            let hbar = 1.0;
            let osc = OscillatorParams::new(m, wm, gamma_ratio * wm, hbar).unwrap();
            let noise = if excess < 1.0 + 1e-9 {
                NoiseModel::quantum_limited(s_xi, hbar).unwrap()
            } else {
                NoiseModel::new(s_xi, excess * hbar * hbar / (4.0 * s_xi), false).unwrap()
            };
            let topology = if qnc { Topology::Qnc } else { Topology::Standard };
            (
                SensorModel::new(osc, noise, topology).unwrap(),
                PriorModel::ornstein_uhlenbeck(kappa, p).unwrap(),
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bound_never_exceeds_prior((s, prior) in arb_sensor()) {
        let grid = TimeGrid::new(256, 0.07).unwrap().frequencies();
        let c = spectral_qcrb(&s, &prior, grid).unwrap();
        let sx = prior_spectrum(&prior, grid);
        for i in 0..grid.len() {
            prop_assert!(c.at(i) <= sx.at(i) * (1.0 + 1e-14));
        }
    }

    #[test]
    fn bound_saturates_uncertainty_product((s, prior) in arb_sensor()) {
        let grid = TimeGrid::new(256, 0.07).unwrap().frequencies();
        let c = spectral_qcrb(&s, &prior, grid).unwrap();
        let sq = coupled_position_spectrum(&s, grid).unwrap();
        let sx = prior_spectrum(&prior, grid);
        let q = 0.25 * s.hbar() * s.hbar();
        for i in 0..grid.len() {
            let product = c.at(i) * (sq.at(i) + q / sx.at(i));
            prop_assert!((product - q).abs() <= 1e-12 * q);
        }
    }

    #[test]
    fn more_backaction_never_loosens_bound((s, prior) in arb_sensor()) {
        let grid = TimeGrid::new(128, 0.07).unwrap().frequencies();
        let mut louder = s;
        louder.noise = NoiseModel::quantum_limited(2.0 * s.noise.s_xi, s.hbar()).unwrap();
        let a = spectral_qcrb(&s, &prior, grid).unwrap();
        let b = spectral_qcrb(&louder, &prior, grid).unwrap();
        for i in 0..grid.len() {
            prop_assert!(b.at(i) <= a.at(i));
        }
    }

    #[test]
    fn fisher_matrices_are_psd((s, prior) in arb_sensor()) {
        let grid = TimeGrid::new(128, 0.07).unwrap();
        let fm = FisherMatrices::compute(&s, &prior, grid).unwrap();
        for c in [&fm.f_quantum, &fm.f_classical, &fm.total()] {
            let (lo, hi) = c.eigenvalue_range();
            prop_assert!(lo >= -1e-10 * hi);
        }
        let spectral = point_qcrb(&s, &prior, grid.frequencies()).unwrap();
        let matrix = matrix_point_bound(&fm).unwrap();
        prop_assert!((matrix - spectral).abs() <= 1e-10 * spectral);
    }
}
