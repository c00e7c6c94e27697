//! Independent numerical oracles for the integration tests. Nothing here
//! calls into the library's transforms or spectrum code.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 48)
}

/// `integral f domega / 2pi` over `[-omega_max, omega_max]` for an even `f`,
/// splitting at the given breakpoints.
pub fn even_band_integral(f: &dyn Fn(f64) -> f64, omega_max: f64, breaks: &[f64], tol: f64) -> f64 {
    let mut edges = vec![0.0];
    edges.extend(breaks.iter().copied().filter(|&b| b > 0.0 && b < omega_max));
    edges.push(omega_max);
    let half: f64 = edges
        .windows(2)
        .map(|w| adaptive_simpson(f, w[0], w[1], tol))
        .sum();
    2.0 * half / (2.0 * PI)
}

/// `|G(omega)|^2` of the damped oscillator, written out directly.
pub fn gain_squared(m: f64, omega_m: f64, gamma: f64, omega: f64) -> f64 {
    let re = omega_m * omega_m - omega * omega;
    let im = gamma * omega;
    1.0 / (m * m * (re * re + im * im))
}

pub fn ou_density(kappa: f64, p: f64, omega: f64) -> f64 {
    2.0 * kappa * p / (kappa * kappa + omega * omega)
}

/// Spectrum of the OU process sampled every `dt`, folded into the Nyquist band.
pub fn folded_ou_density(kappa: f64, p: f64, dt: f64, omega: f64) -> f64 {
    let a = kappa * dt;
    p * dt * a.sinh() / (a.cosh() - (omega * dt).cos())
}

/// Direct O(n^2) DFT of a real sequence, `X_k = sum_j x_j exp(-2 pi i j k / n)`.
pub fn direct_dft(x: &[f64]) -> Vec<(f64, f64)> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter().enumerate().fold((0.0, 0.0), |(re, im), (j, &v)| {
                let phase = -2.0 * PI * ((j * k) % n) as f64 / n as f64;
                (re + v * phase.cos(), im + v * phase.sin())
            })
        })
        .collect()
}

pub fn mean_and_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
