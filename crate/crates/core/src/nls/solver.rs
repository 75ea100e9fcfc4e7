use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::{ComplexField, FieldSeries, Grid, Spectral};
use crate::error::{Error, Result};

pub const DEFAULT_TAYLOR_ORDER: usize = 6;
pub const MAX_TAYLOR_ORDER: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Taylor,
    SplitStep,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Taylor => "taylor",
            Method::SplitStep => "split_step",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "taylor" => Ok(Method::Taylor),
            "split_step" | "split-step" | "splitstep" => Ok(Method::SplitStep),
            other => Err(Error::Config(format!("unknown solver method `{other}`"))),
        }
    }
}

/// Time stepper for `i ψ_t + ½ ψ_ξξ + |ψ|² ψ = 0` on a periodic grid.
///
/// Holds FFT plans and work buffers so repeated steps do not allocate.
#[derive(Debug, Clone)]
pub struct NlsSolver {
    grid: Grid,
    spectral: Spectral,
    order: usize,
    coeffs: Vec<Vec<Complex64>>,
    // Cauchy products Σ_n ψ^[n] ψ^[p-n]
    squares: Vec<Vec<Complex64>>,
    work: Vec<Complex64>,
    linear_cache: Option<(f64, Vec<Complex64>)>,
}

impl NlsSolver {
    pub fn new(grid: Grid, order: usize) -> Result<Self> {
        if !(1..=MAX_TAYLOR_ORDER).contains(&order) {
            return Err(Error::Config(format!(
                "Taylor order must be in 1..={MAX_TAYLOR_ORDER}, got {order}"
            )));
        }
        let n = grid.len();
        Ok(Self {
            grid,
            spectral: Spectral::new(&grid),
            order,
            coeffs: vec![vec![Complex64::default(); n]; order + 1],
            squares: vec![vec![Complex64::default(); n]; order],
            work: vec![Complex64::default(); n],
            linear_cache: None,
        })
    }

    pub fn with_dealiasing(mut self, enabled: bool) -> Self {
        if enabled {
            self.spectral = self.spectral.with_dealiasing(&self.grid);
        }
        self
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn check_grid(&self, field: &ComplexField) -> Result<()> {
        if field.grid() != self.grid {
            return Err(Error::Config("field grid does not match solver grid".into()));
        }
        Ok(())
    }

    /// Fill `self.coeffs[0..=order]` with the Taylor coefficients of `values`.
    fn fill_coefficients(&mut self, values: &[Complex64]) -> Result<()> {
        let n = values.len();
        self.coeffs[0].copy_from_slice(values);
        for m in 0..self.order {
            // squares[m] = Σ_{n=0}^{m} ψ^[n] ψ^[m-n]
            {
                let done = &self.coeffs[..=m];
                let sq = &mut self.squares[m];
                for i in 0..n {
                    let mut acc = Complex64::default();
                    for p in 0..=m {
                        acc += done[p][i] * done[m - p][i];
                    }
                    sq[i] = acc;
                }
            }
            self.spectral
                .second_derivative(&self.coeffs[m], &mut self.work);
            let factor = Complex64::new(0.0, 1.0 / (m + 1) as f64);
            let (done, rest) = self.coeffs.split_at_mut(m + 1);
            let next = &mut rest[0];
            for i in 0..n {
                // Σ_j conj(ψ^[j]) Σ_n ψ^[n] ψ^[m-j-n]
                let mut cubic = Complex64::default();
                for j in 0..=m {
                    cubic += done[j][i].conj() * self.squares[m - j][i];
                }
                let v = factor * (0.5 * self.work[i] + cubic);
                if !v.is_finite() {
                    return Err(Error::Overflow { order: m + 1 });
                }
                next[i] = v;
            }
        }
        Ok(())
    }

    /// Taylor coefficients `ψ^[0..=order]` of the solution through `field`.
    pub fn taylor_coefficients(&mut self, field: &ComplexField) -> Result<Vec<ComplexField>> {
        self.check_grid(field)?;
        field.check_finite()?;
        self.fill_coefficients(field.values())?;
        Ok(self
            .coeffs
            .iter()
            .map(|c| ComplexField::from_parts_unchecked(self.grid, c.clone()))
            .collect())
    }

    /// One truncated-Taylor step, in place.
    pub fn taylor_step_in_place(&mut self, values: &mut [Complex64], dt: f64) -> Result<()> {
        self.fill_coefficients(values)?;
        for i in 0..values.len() {
            let mut acc = self.coeffs[self.order][i];
            for m in (0..self.order).rev() {
                acc = acc * dt + self.coeffs[m][i];
            }
            values[i] = acc;
        }
        self.spectral.dealias(values);
        Ok(())
    }

    pub fn taylor_step(&mut self, field: &ComplexField, dt: f64) -> Result<ComplexField> {
        self.check_grid(field)?;
        check_dt(dt)?;
        field.check_finite()?;
        let mut values = field.values().to_vec();
        self.taylor_step_in_place(&mut values, dt)?;
        Ok(ComplexField::from_parts_unchecked(self.grid, values))
    }

    fn linear_propagator(&mut self, dt: f64) -> Vec<Complex64> {
        match &self.linear_cache {
            Some((cached, prop)) if *cached == dt => prop.clone(),
            _ => {
                let prop: Vec<Complex64> = self
                    .spectral
                    .wavenumbers()
                    .iter()
                    .map(|k| Complex64::new(0.0, -0.5 * k * k * dt).exp())
                    .collect();
                self.linear_cache = Some((dt, prop.clone()));
                prop
            }
        }
    }

    /// One Strang split step (half nonlinear, full linear, half nonlinear), in place.
    pub fn split_step_in_place(&mut self, values: &mut [Complex64], dt: f64) -> Result<()> {
        let half = 0.5 * dt;
        for v in values.iter_mut() {
            *v *= Complex64::new(0.0, v.norm_sqr() * half).exp();
        }
        let prop = self.linear_propagator(dt);
        self.spectral.apply_multiplier(values, &prop);
        for v in values.iter_mut() {
            *v *= Complex64::new(0.0, v.norm_sqr() * half).exp();
        }
        self.spectral.dealias(values);
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { node });
        }
        Ok(())
    }

    pub fn split_step(&mut self, field: &ComplexField, dt: f64) -> Result<ComplexField> {
        self.check_grid(field)?;
        check_dt(dt)?;
        field.check_finite()?;
        let mut values = field.values().to_vec();
        self.split_step_in_place(&mut values, dt)?;
        Ok(ComplexField::from_parts_unchecked(self.grid, values))
    }

    pub fn step_in_place(&mut self, method: Method, values: &mut [Complex64], dt: f64) -> Result<()> {
        match method {
            Method::Taylor => self.taylor_step_in_place(values, dt),
            Method::SplitStep => self.split_step_in_place(values, dt),
        }
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt.is_finite() && dt >= 0.0) {
        return Err(Error::Config(format!("time step must be non-negative, got {dt}")));
    }
    Ok(())
}

/// Taylor coefficients `ψ^[0..=order]` of the NLS solution through `field`.
pub fn taylor_coefficients(field: &ComplexField, order: usize) -> Result<Vec<ComplexField>> {
    NlsSolver::new(field.grid(), order)?.taylor_coefficients(field)
}

pub fn taylor_step(field: &ComplexField, dt: f64, order: usize) -> Result<ComplexField> {
    NlsSolver::new(field.grid(), order)?.taylor_step(field, dt)
}

pub fn split_step(field: &ComplexField, dt: f64) -> Result<ComplexField> {
    NlsSolver::new(field.grid(), 1)?.split_step(field, dt)
}

/// Settings for [`simulate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub sample_stride: usize,
    pub method: Method,
    pub order: usize,
    pub dealias: bool,
    /// Time assigned to the initial condition.
    pub t0: f64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            dt: 2e-4,
            n_steps: 0,
            sample_stride: 25,
            method: Method::Taylor,
            order: DEFAULT_TAYLOR_ORDER,
            dealias: false,
            t0: 0.0,
        }
    }
}

/// Integrate from `ic`, keeping every `sample_stride`-th state.
///
/// The initial condition is always the first sample; a trailing partial
/// stride is not integrated.
pub fn simulate(ic: &ComplexField, cfg: &SimulationConfig) -> Result<FieldSeries> {
    simulate_with(ic, cfg, |_, _| {})
}

/// As [`simulate`], calling `on_sample(j, frame)` after each stored sample.
pub fn simulate_with(
    ic: &ComplexField,
    cfg: &SimulationConfig,
    mut on_sample: impl FnMut(usize, &[Complex64]),
) -> Result<FieldSeries> {
    if !(cfg.dt.is_finite() && cfg.dt > 0.0) {
        return Err(Error::Config(format!("time step must be positive, got {}", cfg.dt)));
    }
    if cfg.sample_stride == 0 {
        return Err(Error::Config("sample stride must be at least 1".into()));
    }
    ic.check_finite()?;
    let grid = ic.grid();
    let mut solver = NlsSolver::new(grid, cfg.order)?.with_dealiasing(cfg.dealias);
    let n_samples = cfg.n_steps / cfg.sample_stride;
    let provenance = format!(
        "method={};dt={:?};stride={};order={};dealias={};t0={:?}",
        cfg.method, cfg.dt, cfg.sample_stride, cfg.order, cfg.dealias, cfg.t0
    );
    let mut series = FieldSeries::new(
        grid,
        cfg.t0,
        cfg.dt * cfg.sample_stride as f64,
        Vec::with_capacity(n_samples + 1),
        provenance,
    )?;
    let mut state = ic.values().to_vec();
    on_sample(0, &state);
    series.push(state.clone())?;
    let mut step = 0;
    for j in 1..=n_samples {
        for _ in 0..cfg.sample_stride {
            step += 1;
            solver
                .step_in_place(cfg.method, &mut state, cfg.dt)
                .map_err(|e| Error::SolverStep {
                    step,
                    source: Box::new(e),
                })?;
        }
        on_sample(j, &state);
        series.push(state.clone())?;
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nls::energies;

    fn plane(grid: Grid, a: f64) -> ComplexField {
        ComplexField::from_fn(grid, |_| Complex64::new(a, 0.0)).unwrap()
    }

    #[test]
    fn constant_field_first_coefficient() {
        let grid = Grid::new(16, 5.0).unwrap();
        let c = taylor_coefficients(&plane(grid, 0.7), 1).unwrap();
        for v in c[1].values() {
            assert!((v - Complex64::new(0.0, 0.343)).norm() < 1e-15);
        }
    }

    #[test]
    fn zero_field_has_zero_coefficients() {
        let grid = Grid::new(16, 5.0).unwrap();
        let c = taylor_coefficients(&ComplexField::zeros(grid), 6).unwrap();
        assert_eq!(c.len(), 7);
        assert!(c.iter().all(|f| f.values().iter().all(|v| v.norm() == 0.0)));
    }

    #[test]
    fn taylor_plane_wave_matches_exact_phase() {
        let grid = Grid::new(32, 10.0).unwrap();
        let a0 = 1.3;
        for &dt in &[1e-2, 5e-3] {
            let out = taylor_step(&plane(grid, a0), dt, 6).unwrap();
            let exact = Complex64::new(0.0, a0 * a0 * dt).exp() * a0;
            let bound = (a0 * a0 * dt).powi(7) / 5040.0 * a0 * 2.0 + 1e-15;
            for v in out.values() {
                assert!((v - exact).norm() <= bound, "dt={dt}: {}", (v - exact).norm());
            }
        }
    }

    #[test]
    fn zero_dt_is_identity() {
        let grid = Grid::new(32, 10.0).unwrap();
        let f = ComplexField::from_fn(grid, |x| Complex64::new(x.cos(), 0.3 * x.sin())).unwrap();
        let out = taylor_step(&f, 0.0, 6).unwrap();
        assert_eq!(out.values(), f.values());
    }

    #[test]
    fn split_step_plane_wave_is_exact() {
        let grid = Grid::new(32, 10.0).unwrap();
        let out = split_step(&plane(grid, 0.9), 0.01).unwrap();
        let exact = Complex64::new(0.0, 0.81 * 0.01).exp() * 0.9;
        for v in out.values() {
            assert!((v - exact).norm() < 1e-14);
        }
    }

    #[test]
    fn split_step_preserves_norm() {
        let grid = Grid::new(64, 12.0).unwrap();
        let f = ComplexField::from_fn(grid, |x| {
            Complex64::new(1.0 + 0.3 * (0.5 * x).cos(), 0.2 * x.sin())
        })
        .unwrap();
        let n0 = f.norm_density();
        let out = split_step(&f, 1e-3).unwrap();
        assert!(((out.norm_density() - n0) / n0).abs() <= 1e-13);
    }

    #[test]
    fn order_out_of_range_is_rejected() {
        let grid = Grid::new(8, 1.0).unwrap();
        assert!(NlsSolver::new(grid, 0).is_err());
        assert!(NlsSolver::new(grid, 13).is_err());
    }

    #[test]
    fn overflow_names_the_order() {
        let grid = Grid::new(8, 1.0).unwrap();
        let f = plane(grid, 1e120);
        assert!(matches!(taylor_coefficients(&f, 3), Err(Error::Overflow { order: 1 })));
    }

    #[test]
    fn simulate_sampling() {
        let grid = Grid::new(16, 8.0).unwrap();
        let ic = plane(grid, 1.0);
        let cfg = SimulationConfig {
            n_steps: 0,
            ..Default::default()
        };
        assert_eq!(simulate(&ic, &cfg).unwrap().len(), 1);
        let cfg = SimulationConfig {
            n_steps: 110,
            ..Default::default()
        };
        let s = simulate(&ic, &cfg).unwrap();
        assert_eq!(s.len(), 5);
        assert!((s.dt_sample() - 5e-3).abs() < 1e-18);
        assert_eq!(s.provenance_value("method"), Some("taylor"));
    }

    #[test]
    fn plane_wave_energy_is_constant_under_simulation() {
        let grid = Grid::new(16, 8.0).unwrap();
        let cfg = SimulationConfig {
            n_steps: 500,
            sample_stride: 100,
            ..Default::default()
        };
        let s = simulate(&plane(grid, 1.0), &cfg).unwrap();
        let h0 = energies(&s.field(0)).hamiltonian;
        let h1 = energies(&s.field(s.len() - 1)).hamiltonian;
        assert!((h1 - h0).abs() < 1e-12);
    }
}
