//! Maximum stretching number (finite-window local Lyapunov exponent) from the
//! NLS tangent equation
//!
//! ```text
//! i δ_t + ½ δ_ξξ + 2|ψ|² δ + ψ² conj(δ) = 0
//! ```
//!
//! integrated with the background `ψ` frozen over each window.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nls::{ComplexField, FieldSeries, Grid, Spectral};

/// Default window length in NLS time units.
pub const DEFAULT_WINDOW: f64 = 5e-3;

/// A tangent-space deviation with its cached Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationField {
    values: Vec<Complex64>,
    norm: f64,
}

impl DeviationField {
    pub fn new(values: Vec<Complex64>) -> Self {
        let norm = euclidean_norm(&values);
        Self { values, norm }
    }

    /// Uniform random entries in `[-0.5, 0.5]` (real and imaginary parts), scaled to unit norm.
    pub fn random_unit(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..n)
            .map(|_| Complex64::new(rng.random_range(-0.5..=0.5), rng.random_range(-0.5..=0.5)))
            .collect();
        let mut dev = Self::new(values);
        dev.renormalize();
        dev
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            norm: self.norm * factor.abs(),
        }
    }

    /// Rescale to unit norm; a zero deviation is left unchanged.
    pub fn renormalize(&mut self) {
        if self.norm > 0.0 {
            let inv = 1.0 / self.norm;
            self.values.iter_mut().for_each(|v| *v *= inv);
            self.norm = euclidean_norm(&self.values);
        }
    }
}

fn euclidean_norm(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Reusable integrator for the tangent equation on one grid.
#[derive(Debug, Clone)]
pub struct TangentIntegrator {
    grid: Grid,
    spectral: Spectral,
    half_step: Option<(f64, Vec<Complex64>)>,
}

impl TangentIntegrator {
    pub fn new(grid: Grid) -> Self {
        Self {
            grid,
            spectral: Spectral::new(&grid),
            half_step: None,
        }
    }

    fn linear_half(&mut self, dt: f64) -> Vec<Complex64> {
        match &self.half_step {
            Some((cached, prop)) if *cached == dt => prop.clone(),
            _ => {
                let prop: Vec<Complex64> = self
                    .spectral
                    .wavenumbers()
                    .iter()
                    .map(|k| Complex64::new(0.0, -0.25 * k * k * dt).exp())
                    .collect();
                self.half_step = Some((dt, prop.clone()));
                prop
            }
        }
    }

    /// Advance `values` by `dt` with `background` held fixed: spectral linear
    /// half-step, exact local 2×2 flow of the coupling terms, spectral half-step.
    pub fn step_in_place(&mut self, background: &[Complex64], values: &mut [Complex64], dt: f64) {
        let half = self.linear_half(dt);
        self.spectral.apply_multiplier(values, &half);
        for (d, psi) in values.iter_mut().zip(background) {
            *d = local_flow(*psi, *d, dt);
        }
        self.spectral.apply_multiplier(values, &half);
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }
}

/// Exact solution of `δ_t = i(2|ψ|²δ + ψ² conj δ)` for frozen `ψ`.
///
/// In real coordinates `(u, v)` the generator is traceless with determinant
/// `3|ψ|⁴`, so the flow is `cos(ωt)·I + sin(ωt)/ω·A` with `ω = √3 |ψ|²`.
fn local_flow(psi: Complex64, d: Complex64, dt: f64) -> Complex64 {
    let s = psi.norm_sqr();
    let sq = psi * psi;
    let (p, q) = (sq.re, sq.im);
    // A = [[-q, p - 2s], [p + 2s, q]]
    let (u, v) = (d.re, d.im);
    let au = -q * u + (p - 2.0 * s) * v;
    let av = (p + 2.0 * s) * u + q * v;
    let omega = 3f64.sqrt() * s;
    let (c, sinc) = if omega * dt == 0.0 {
        (1.0, dt)
    } else {
        ((omega * dt).cos(), (omega * dt).sin() / omega)
    };
    Complex64::new(c * u + sinc * au, c * v + sinc * av)
}

/// Advance a deviation over `dt` along a frozen background.
pub fn tangent_step(background: &ComplexField, dev: &DeviationField, dt: f64) -> Result<DeviationField> {
    if dev.values.len() != background.grid().len() {
        return Err(Error::Config("deviation and background grids differ".into()));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Config(format!("tangent step needs dt > 0, got {dt}")));
    }
    let mut values = dev.values.clone();
    TangentIntegrator::new(background.grid()).step_in_place(background.values(), &mut values, dt);
    if let Some(node) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { node });
    }
    Ok(DeviationField::new(values))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StretchingSample {
    /// Start time of the window.
    pub t: f64,
    pub chi: f64,
    pub max_envelope: f64,
}

/// Stretching numbers `χ = ln(‖δ(t+Δt)‖/‖δ(t)‖)/Δt` along a sampled trajectory.
///
/// A single random unit deviation is evolved; each window uses the snapshot
/// at its start as the frozen background and renormalises afterwards.
pub fn stretching_series(trajectory: &FieldSeries, dt_window: f64, seed: u64) -> Result<Vec<StretchingSample>> {
    if !(dt_window > 0.0) {
        return Err(Error::Config(format!("window must be positive, got {dt_window}")));
    }
    if ((trajectory.dt_sample() - dt_window) / dt_window).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "trajectory spacing {} does not match window {}",
            trajectory.dt_sample(),
            dt_window
        )));
    }
    let grid = trajectory.grid();
    let mut integrator = TangentIntegrator::new(grid);
    let mut dev = DeviationField::random_unit(grid.len(), seed);
    let mut out = Vec::with_capacity(trajectory.len().saturating_sub(1));
    for j in 0..trajectory.len().saturating_sub(1) {
        let before = dev.norm;
        integrator.step_in_place(trajectory.frame(j), &mut dev.values, dt_window);
        dev.norm = euclidean_norm(&dev.values);
        if !dev.norm.is_finite() || dev.norm == 0.0 {
            return Err(Error::Config(format!("deviation degenerated in window {j}")));
        }
        out.push(StretchingSample {
            t: trajectory.time(j),
            chi: (dev.norm / before).ln() / dt_window,
            max_envelope: trajectory.max_envelope(j),
        });
        dev.renormalize();
    }
    Ok(out)
}
