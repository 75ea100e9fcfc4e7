use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform periodic grid on `[-L/2, L/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    length: f64,
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("grid needs at least one node".into()));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Config(format!("domain length must be positive, got {length}")));
        }
        Ok(Self { n, length })
    }

    /// Grid spanning `periods` wavelengths of the modulation wavenumber `omega`.
    pub fn for_modulation(n: usize, omega: f64, periods: usize) -> Result<Self> {
        if !(omega > 0.0) || periods == 0 {
            return Err(Error::Config(format!(
                "modulation grid needs omega > 0 and periods >= 1 (omega={omega}, periods={periods})"
            )));
        }
        Self::new(n, periods as f64 * 2.0 * PI / omega)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        -0.5 * self.length + i as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Signed integer mode index in FFT order: `0, 1, .., n/2-1, -n/2, .., -1`.
    pub fn mode_index(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < (n + 1) / 2 {
            i
        } else {
            i - n
        }
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let dk = 2.0 * PI / self.length;
        (0..self.n).map(|i| dk * self.mode_index(i) as f64).collect()
    }

    /// True when `omega` is an integer multiple of the fundamental wavenumber.
    pub fn resolves(&self, omega: f64) -> bool {
        let ratio = omega * self.length / (2.0 * PI);
        (ratio - ratio.round()).abs() < 1e-9 * ratio.abs().max(1.0) && ratio.round().abs() < self.n as f64 / 2.0
    }
}
