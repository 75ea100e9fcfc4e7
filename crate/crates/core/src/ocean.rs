//! Random-sea initial conditions from the JONSWAP spectrum and the mapping
//! between physical deep-water variables and the dimensionless NLS.
//!
//! Physical envelope `A(X)` and NLS field `ψ(ξ)` are related by
//! `ξ = 2εK_p X`, `t = ε²ω_p T` and `ψ = K_p/(ε√2) · conj(A)`, where the
//! steepness scale `ε` is fixed by requiring `⟨|ψ|²⟩ = 1`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nls::{ComplexField, Grid, Spectral};

pub const GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeaStateParams {
    /// Significant wave height (m).
    pub hs: f64,
    /// Peak period (s).
    pub tp: f64,
    /// Peak-enhancement factor.
    pub gamma_s: f64,
    pub g: f64,
}

impl Default for SeaStateParams {
    fn default() -> Self {
        Self {
            hs: 8.0,
            tp: 8.0,
            gamma_s: 3.3,
            g: GRAVITY,
        }
    }
}

impl SeaStateParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.hs > 0.0 && self.tp > 0.0 && self.gamma_s >= 1.0 && self.g > 0.0) {
            return Err(Error::Domain(format!(
                "sea state needs hs > 0, tp > 0, gamma_s >= 1, g > 0 (got {self:?})"
            )));
        }
        Ok(())
    }

    pub fn peak_frequency(&self) -> f64 {
        1.0 / self.tp
    }

    /// `G0(γ) = 0.1244 + 0.05 γ`.
    pub fn g0(&self) -> f64 {
        0.1244 + 0.05 * self.gamma_s
    }

    /// Energy scale `A_J = H_s² f_p⁴ / (16 G0)`.
    pub fn energy_scale(&self) -> f64 {
        let fp = self.peak_frequency();
        self.hs * self.hs * fp.powi(4) / (16.0 * self.g0())
    }

    /// Frequency of a deep-water wave with wavenumber `k`.
    pub fn frequency_of(&self, k: f64) -> f64 {
        (self.g * k).sqrt() / (2.0 * PI)
    }
}

/// JONSWAP frequency spectrum `S(f)` in m²/Hz.
pub fn jonswap_spectrum(f: f64, params: &SeaStateParams) -> Result<f64> {
    if !(f > 0.0) {
        return Err(Error::Domain(format!("frequency must be positive, got {f}")));
    }
    let fp = params.peak_frequency();
    let sigma = if f <= fp { 0.07 } else { 0.09 };
    let r = (-0.5 * ((f / fp - 1.0) / sigma).powi(2)).exp();
    Ok(params.energy_scale() / f.powi(5) * (-1.25 * (f / fp).powi(-4)).exp() * params.gamma_s.powf(r))
}

/// Wavenumber spectrum `S(K) = S(f)·df/dK` with `df/dK = f/(2K)` from deep-water dispersion.
pub fn wavenumber_spectrum(k: f64, params: &SeaStateParams) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
    }
    let f = params.frequency_of(k);
    Ok(jonswap_spectrum(f, params)? * f / (2.0 * k))
}

/// Carrier wavenumber, frequency and steepness scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarrierScales {
    pub k_p: f64,
    pub omega_p: f64,
    pub eps: f64,
}

impl CarrierScales {
    /// Peak-carrier scales of a sea state; `eps` is set by [`to_nls_variables`].
    pub fn from_sea_state(params: &SeaStateParams, eps: f64) -> Self {
        let omega_p = 2.0 * PI / params.tp;
        Self {
            k_p: omega_p * omega_p / params.g,
            omega_p,
            eps,
        }
    }

    pub fn nls_time(&self, physical_seconds: f64) -> f64 {
        self.eps * self.eps * self.omega_p * physical_seconds
    }

    pub fn physical_time(&self, nls_time: f64) -> f64 {
        nls_time / (self.eps * self.eps * self.omega_p)
    }

    pub fn nls_space(&self, physical_metres: f64) -> f64 {
        2.0 * self.eps * self.k_p * physical_metres
    }

    pub fn physical_space(&self, xi: f64) -> f64 {
        xi / (2.0 * self.eps * self.k_p)
    }
}

/// Positive periodic wavenumbers `K_i = i·2π/L` for `i = 1 .. n/2 − 1`.
pub fn positive_wavenumbers(grid: &Grid) -> Vec<f64> {
    let dk = 2.0 * PI / grid.length();
    (1..grid.len().div_ceil(2)).map(|i| i as f64 * dk).collect()
}

fn random_phases(count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random_range(0.0..2.0 * PI)).collect()
}

fn superpose(params: &SeaStateParams, k_grid: &[f64], phases: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    if k_grid.iter().any(|&k| !(k > 0.0)) {
        return Err(Error::Domain("wavenumbers must be strictly positive".into()));
    }
    let dk = match k_grid {
        [] => return Ok(vec![0.0; x.len()]),
        [k] => *k,
        [k0, k1, ..] => k1 - k0,
    };
    let amplitudes = k_grid
        .iter()
        .map(|&k| Ok((2.0 * wavenumber_spectrum(k, params)? * dk).sqrt()))
        .collect::<Result<Vec<_>>>()?;
    Ok(x
        .iter()
        .map(|&xi| {
            k_grid
                .iter()
                .zip(&amplitudes)
                .zip(phases)
                .map(|((k, c), phi)| c * (k * xi + phi).cos())
                .sum()
        })
        .collect())
}

/// Surface elevation `η(X) = Σ C_i cos(K_i X + φ_i)` with `C_i = √(2 S(K_i) dK)`
/// and phases uniform on `[0, 2π)` drawn from `seed`.
pub fn surface_realization(
    params: &SeaStateParams,
    k_grid: &[f64],
    x: &[f64],
    seed: u64,
) -> Result<Vec<f64>> {
    params.validate()?;
    let phases = random_phases(k_grid.len(), seed);
    superpose(params, k_grid, &phases, x)
}

/// Analytic signal `η + i H[η]` of a periodic real signal.
pub fn analytic_signal(eta: &[f64]) -> Vec<Complex64> {
    let n = eta.len();
    if n == 0 {
        return Vec::new();
    }
    let grid = Grid::new(n, 1.0).expect("non-empty");
    let mut spectral = Spectral::new(&grid);
    let mut buf: Vec<Complex64> = eta.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    spectral.forward(&mut buf);
    for (i, v) in buf.iter_mut().enumerate() {
        let m = grid.mode_index(i);
        // zero and Nyquist modes are left untouched
        if m > 0 && !(n.is_multiple_of(2) && i == n / 2) {
            *v *= 2.0;
        } else if m < 0 && !(n.is_multiple_of(2) && i == n / 2) {
            *v = Complex64::default();
        }
    }
    spectral.inverse(&mut buf);
    buf
}

/// Physical envelope `A(X) = (η + i H[η]) / exp(i K_p X)`.
pub fn envelope_from_elevation(eta: &[f64], grid: &Grid, k_p: f64) -> Result<ComplexField> {
    if eta.len() != grid.len() {
        return Err(Error::Config("elevation length does not match grid".into()));
    }
    let analytic = analytic_signal(eta);
    let values = analytic
        .into_iter()
        .zip(grid.nodes())
        .map(|(z, x)| z * Complex64::new(0.0, -k_p * x).exp())
        .collect();
    ComplexField::new(*grid, values)
}

/// Map a physical envelope to the NLS field, choosing `eps` so that `⟨|ψ|²⟩ = 1`.
///
/// Returns the field on the stretched grid `ξ = 2εK_p X` and the completed scales.
pub fn to_nls_variables(envelope: &ComplexField, scales: &CarrierScales) -> Result<(ComplexField, CarrierScales)> {
    let mean_sq = envelope.norm_density();
    if !(mean_sq > 0.0) {
        return Err(Error::DegenerateScaling);
    }
    let eps = scales.k_p * (0.5 * mean_sq).sqrt();
    let scales = CarrierScales { eps, ..*scales };
    let factor = scales.k_p / (eps * SQRT_2);
    let grid = Grid::new(envelope.grid().len(), scales.nls_space(envelope.grid().length()))?;
    let values = envelope.values().iter().map(|a| a.conj() * factor).collect();
    Ok((ComplexField::new(grid, values)?, scales))
}

/// Inverse of [`to_nls_variables`] for given scales.
pub fn from_nls_variables(psi: &ComplexField, scales: &CarrierScales) -> Result<ComplexField> {
    if !(scales.eps > 0.0) {
        return Err(Error::Domain(format!("steepness scale must be positive, got {}", scales.eps)));
    }
    let factor = scales.eps * SQRT_2 / scales.k_p;
    let grid = Grid::new(psi.grid().len(), scales.physical_space(psi.grid().length()))?;
    let values = psi.values().iter().map(|p| p.conj() * factor).collect();
    ComplexField::new(grid, values)
}

/// Total variance `∫ S(f) df` by composite Simpson quadrature over `[f_lo, f_hi]`.
pub fn spectral_variance(params: &SeaStateParams, f_lo: f64, f_hi: f64, intervals: usize) -> Result<f64> {
    let n = intervals + intervals % 2;
    let h = (f_hi - f_lo) / n as f64;
    let mut acc = jonswap_spectrum(f_lo, params)? + jonswap_spectrum(f_hi, params)?;
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * jonswap_spectrum(f_lo + i as f64 * h, params)?;
    }
    Ok(acc * h / 3.0)
}

/// A JONSWAP sea state mapped onto an NLS grid.
#[derive(Debug, Clone)]
pub struct SeaInitialCondition {
    pub psi: ComplexField,
    pub scales: CarrierScales,
    /// Physical grid the elevation was synthesised on.
    pub physical_grid: Grid,
    pub elevation: Vec<f64>,
    /// Carrier actually removed: `K_p` rounded to the nearest grid wavenumber.
    pub carrier_wavenumber: f64,
    pub iterations: usize,
}

/// Build a unit-norm NLS initial condition on `nls_grid` from a seeded sea state.
///
/// The physical domain length depends on `eps` through `ξ = 2εK_p X`, and
/// `eps` depends on the synthesised envelope, so the two are iterated to a
/// fixed point. The carrier is rounded to a grid wavenumber so the envelope
/// stays periodic.
pub fn nls_initial_condition(
    params: &SeaStateParams,
    nls_grid: &Grid,
    seed: u64,
) -> Result<SeaInitialCondition> {
    params.validate()?;
    let fp = params.peak_frequency();
    let m0 = spectral_variance(params, 0.05 * fp, 20.0 * fp, 20_000)?;
    let base = CarrierScales::from_sea_state(params, 0.0);
    let mut eps = base.k_p * m0.sqrt();
    let probe = Grid::new(nls_grid.len(), 1.0)?;
    let phases = random_phases(positive_wavenumbers(&probe).len(), seed);

    const MAX_ITER: usize = 200;
    for iteration in 1..=MAX_ITER {
        let physical = Grid::new(nls_grid.len(), nls_grid.length() / (2.0 * eps * base.k_p))?;
        let k_grid = positive_wavenumbers(&physical);
        let x = physical.nodes();
        let eta = superpose(params, &k_grid, &phases, &x)?;
        let dk = 2.0 * PI / physical.length();
        let carrier = (base.k_p / dk).round().max(1.0) * dk;
        if carrier > *k_grid.last().unwrap_or(&0.0) {
            return Err(Error::Domain(format!(
                "{} nodes cannot resolve the peak wavenumber {:.4} 1/m on a {:.1} m domain; use more nodes",
                nls_grid.len(),
                base.k_p,
                physical.length()
            )));
        }
        let envelope = envelope_from_elevation(&eta, &physical, carrier)?;
        let (psi, scales) = to_nls_variables(&envelope, &base)?;
        let converged = ((scales.eps - eps) / eps).abs() <= 1e-13;
        eps = scales.eps;
        if converged || iteration == MAX_ITER {
            if !converged {
                log::warn!("steepness scale did not settle after {MAX_ITER} iterations");
            }
            let psi = ComplexField::new(*nls_grid, psi.into_values())?;
            return Ok(SeaInitialCondition {
                psi,
                scales,
                physical_grid: physical,
                elevation: eta,
                carrier_wavenumber: carrier,
                iterations: iteration,
            });
        }
    }
    unreachable!("loop returns on its last iteration")
}
