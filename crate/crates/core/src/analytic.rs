//! Closed-form NLS solutions, modulation-instability mode arithmetic and
//! initial conditions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::nls::{ComplexField, Grid};

/// One modulation-instability mode: parameter `a`, wavenumber `Ω = 2√(1−2a)`
/// and growth factor `γ = √(8a(1−2a))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    pub a: f64,
    pub omega: f64,
    pub gamma: f64,
}

pub fn mode_params(a: f64) -> Result<ModeSpec> {
    if !(a > 0.0 && a < 0.5) {
        return Err(Error::Domain(format!("modulation parameter must lie in (0, 0.5), got {a}")));
    }
    Ok(ModeSpec {
        a,
        omega: 2.0 * (1.0 - 2.0 * a).sqrt(),
        gamma: (8.0 * a * (1.0 - 2.0 * a)).sqrt(),
    })
}

/// Mode with wavenumber `omega`, for `0 < omega < 2`.
pub fn mode_from_omega(omega: f64) -> Result<ModeSpec> {
    if !(omega > 0.0 && omega < 2.0) {
        return Err(Error::Domain(format!("wavenumber must lie in (0, 2), got {omega}")));
    }
    let half = 0.5 * omega;
    let a = 0.5 * (1.0 - half * half);
    Ok(ModeSpec {
        a,
        omega,
        // γ = √(8a)·(Ω/2) avoids cancellation in 1 − 2a
        gamma: (8.0 * a).sqrt() * half,
    })
}

/// All unstable harmonics `jΩ < 2` of a fundamental wavenumber, ordered by `j`.
pub fn unstable_modes(omega_fundamental: f64) -> Result<Vec<ModeSpec>> {
    if !(omega_fundamental > 0.0 && omega_fundamental < 2.0) {
        return Err(Error::Domain(format!(
            "fundamental wavenumber must lie in (0, 2), got {omega_fundamental}"
        )));
    }
    Ok((1..)
        .map(|j| j as f64 * omega_fundamental)
        .take_while(|&w| w < 2.0)
        .map(|w| mode_from_omega(w).expect("0 < jΩ < 2"))
        .collect())
}

/// Evaluate the Akhmediev breather at time `t` on `grid`.
pub fn akhmediev_field(a: f64, t: f64, grid: &Grid) -> Result<ComplexField> {
    let mode = mode_params(a)?;
    if !grid.resolves(mode.omega) {
        log::warn!(
            "domain length {} is not a multiple of the breather period {}",
            grid.length(),
            2.0 * std::f64::consts::PI / mode.omega
        );
    }
    let cosh = (mode.gamma * t).cosh();
    let sinh = (mode.gamma * t).sinh();
    let numerator = Complex64::new(2.0 * (1.0 - 2.0 * a) * cosh, mode.gamma * sinh);
    let carrier = Complex64::new(0.0, t).exp();
    let root = (2.0 * a).sqrt();
    let mut values = Vec::with_capacity(grid.len());
    for (node, x) in grid.nodes().into_iter().enumerate() {
        let den = root * (mode.omega * x).cos() - cosh;
        if den.abs() < 1e-14 {
            return Err(Error::SingularEvaluation { node, value: den });
        }
        values.push((1.0 + numerator / den) * carrier);
    }
    ComplexField::new(*grid, values)
}

/// Plane wave seeded by one harmonic: `A0 + 2·a1·cos(Ωξ)`, `A0 = √(1 − 2a1²)`.
pub fn seeded_plane_wave(a1: f64, omega: f64, grid: &Grid) -> Result<ComplexField> {
    if !(a1 >= 0.0) {
        return Err(Error::Domain(format!("seed amplitude must be non-negative, got {a1}")));
    }
    if 2.0 * a1 * a1 >= 1.0 {
        return Err(Error::Domain(format!("seed amplitude {a1} leaves no background (2·a1² ≥ 1)")));
    }
    let a0 = (1.0 - 2.0 * a1 * a1).sqrt();
    ComplexField::from_fn(*grid, |x| Complex64::new(a0 + 2.0 * a1 * (omega * x).cos(), 0.0))
}

/// Peak height `1 + 2 Σ √(2 a_j)` reached when all listed modes synchronise.
pub fn max_intensity_peak(modes: &[ModeSpec]) -> Result<f64> {
    if modes.is_empty() {
        return Err(Error::Domain("maximal-intensity peak needs at least one mode".into()));
    }
    Ok(1.0 + 2.0 * modes.iter().map(|m| (2.0 * m.a).sqrt()).sum::<f64>())
}
