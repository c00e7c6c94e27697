//! Uniform periodic sampling lattices.
//!
//! A [`TimeGrid`] of `n` samples spaced `dt` apart is treated as one period of
//! a periodic signal. Its conjugate [`FrequencyGrid`] carries the angular
//! frequencies `omega_k = 2 pi k / (n dt)` for integer `k` in `[-n/2, n/2)`.
//!
//! Frequency-indexed arrays throughout the crate are stored in DFT order:
//! array index `i` holds bin `k = i` for `2 i < n` and `k = i - n` otherwise.
//! So index 0 is `omega = 0` and, for even `n`, index `n/2` is the unpaired
//! Nyquist bin at `-pi/dt`. [`FrequencyGrid::monotone_order`] gives the
//! permutation that lists bins by increasing frequency; reports use it.

use std::f64::consts::PI;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    n: usize,
    dt: f64,
}

impl TimeGrid {
    pub fn new(n: usize, dt: f64) -> Result<Self> {
        if n < 2 {
            return Err(invalid("grid.n", format!("need at least 2 samples, got {n}")));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("grid.dt", format!("must be finite and > 0, got {dt}")));
        }
        Ok(Self { n, dt })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Record duration `T = n dt`.
    pub fn duration(&self) -> f64 {
        self.n as f64 * self.dt
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.time(j))
    }

    pub fn frequencies(&self) -> FrequencyGrid {
        FrequencyGrid { time: *self }
    }
}

/// Angular-frequency lattice conjugate to a [`TimeGrid`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    time: TimeGrid,
}

impl FrequencyGrid {
    pub fn time_grid(&self) -> TimeGrid {
        self.time
    }

    pub fn len(&self) -> usize {
        self.time.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Bin width `2 pi / (n dt)`.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.time.duration()
    }

    /// Signed bin number of DFT index `i`.
    pub fn bin_number(&self, i: usize) -> i64 {
        let n = self.time.n;
        if 2 * i < n {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Angular frequency of DFT index `i`.
    pub fn omega(&self, i: usize) -> f64 {
        self.bin_number(i) as f64 * self.spacing()
    }

    /// All bin frequencies in DFT order.
    pub fn omegas(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.omega(i)).collect()
    }

    /// DFT index of the bin at `-omega_i`. The DC bin and the Nyquist bin
    /// (even `n`) map to themselves.
    pub fn mirror(&self, i: usize) -> usize {
        let n = self.len();
        (n - i) % n
    }

    /// DFT indices sorted by increasing frequency.
    pub fn monotone_order(&self) -> Vec<usize> {
        let n = self.len();
        let first_negative = n.div_ceil(2);
        (first_negative..n).chain(0..first_negative).collect()
    }

    /// DFT index of the bin at integer bin number `k`, if on the grid.
    pub fn index_of_bin(&self, k: i64) -> Option<usize> {
        let n = self.len() as i64;
        let i = k.rem_euclid(n) as usize;
        (self.bin_number(i) == k).then_some(i)
    }
}
