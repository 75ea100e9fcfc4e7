use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::Grid;

/// FFT plans and wavenumbers for periodic spectral differentiation.
#[derive(Clone)]
pub struct Spectral {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    k: Vec<f64>,
    scratch: Vec<Complex64>,
    dealias: Option<Vec<bool>>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral")
            .field("n", &self.k.len())
            .field("dealias", &self.dealias.is_some())
            .finish()
    }
}

impl Spectral {
    pub fn new(grid: &Grid) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.len();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            forward,
            inverse,
            k: grid.wavenumbers(),
            scratch: vec![Complex64::default(); scratch_len],
            dealias: None,
        }
    }

    /// Enable the 2/3 rule: modes with `|index| > n/3` are zeroed by [`Spectral::dealias`].
    pub fn with_dealiasing(mut self, grid: &Grid) -> Self {
        let cutoff = grid.len() as i64 / 3;
        self.dealias = Some(
            (0..grid.len())
                .map(|i| grid.mode_index(i).abs() > cutoff)
                .collect(),
        );
        self
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn forward(&mut self, buf: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, &mut self.scratch);
    }

    /// Normalised inverse transform.
    pub fn inverse(&mut self, buf: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, &mut self.scratch);
        let scale = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|v| *v *= scale);
    }

    /// `out = ∂²/∂ξ² input`.
    pub fn second_derivative(&mut self, input: &[Complex64], out: &mut [Complex64]) {
        out.copy_from_slice(input);
        self.forward(out);
        for (v, k) in out.iter_mut().zip(&self.k) {
            *v *= -k * k;
        }
        self.inverse(out);
    }

    /// `out = ∂/∂ξ input`.
    pub fn first_derivative(&mut self, input: &[Complex64], out: &mut [Complex64]) {
        out.copy_from_slice(input);
        self.forward(out);
        for (v, k) in out.iter_mut().zip(&self.k) {
            *v *= Complex64::new(0.0, *k);
        }
        self.inverse(out);
    }

    /// Multiply each Fourier mode by `multiplier[i]` (applied in spectral space).
    pub fn apply_multiplier(&mut self, buf: &mut [Complex64], multiplier: &[Complex64]) {
        self.forward(buf);
        for (v, m) in buf.iter_mut().zip(multiplier) {
            *v *= m;
        }
        self.inverse(buf);
    }

    /// Apply the 2/3-rule filter if enabled.
    pub fn dealias(&mut self, buf: &mut [Complex64]) {
        if let Some(mask) = self.dealias.clone() {
            self.forward(buf);
            for (v, drop) in buf.iter_mut().zip(&mask) {
                if *drop {
                    *v = Complex64::default();
                }
            }
            self.inverse(buf);
        }
    }

    pub fn dealiasing(&self) -> bool {
        self.dealias.is_some()
    }
}
