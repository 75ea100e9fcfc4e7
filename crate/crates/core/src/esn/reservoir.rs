use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sparse::{estimate_spectral_radius, CsrMatrix};
use crate::error::{Error, Result};

/// How `noise_var` is read when perturbing training inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseScale {
    #[default]
    Variance,
    StdDev,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EsnHyperParams {
    /// Hidden nodes per reservoir.
    pub d_s: usize,
    /// Nonzeros per row of the recurrent matrix.
    pub degree: usize,
    /// Target spectral radius of `|W_x|`.
    pub rho: f64,
    /// Input weights are drawn from `[-alpha, alpha]`.
    pub alpha: f64,
    pub beta: f64,
    /// Washout steps discarded before training.
    pub n_w: usize,
    pub noise_var: f64,
    pub noise_scale: NoiseScale,
    /// Nonzeros per row of the input matrix.
    pub input_degree: usize,
    pub seed: u64,
}

impl Default for EsnHyperParams {
    fn default() -> Self {
        Self {
            d_s: 800,
            degree: 3,
            rho: 0.6,
            alpha: 0.5,
            beta: 1e-4,
            n_w: 100,
            noise_var: 0.02,
            noise_scale: NoiseScale::Variance,
            input_degree: 1,
            seed: 0,
        }
    }
}

impl EsnHyperParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.d_s == 0 {
            return fail("d_s must be at least 1".into());
        }
        if self.degree == 0 || self.degree > self.d_s {
            return fail(format!("degree must lie in [1, d_s = {}], got {}", self.d_s, self.degree));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return fail(format!("rho must be positive, got {}", self.rho));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return fail(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return fail(format!("beta must be non-negative, got {}", self.beta));
        }
        if !(self.noise_var >= 0.0 && self.noise_var.is_finite()) {
            return fail(format!("noise_var must be non-negative, got {}", self.noise_var));
        }
        if self.input_degree == 0 {
            return fail("input_degree must be at least 1".into());
        }
        Ok(())
    }

    /// Standard deviation of the training-input noise.
    pub fn noise_std(&self) -> f64 {
        match self.noise_scale {
            NoiseScale::Variance => self.noise_var.sqrt(),
            NoiseScale::StdDev => self.noise_var,
        }
    }
}

/// Recurrent and input matrices of one echo-state reservoir. The same
/// reservoir drives every spatial partition.
#[derive(Debug, Clone, PartialEq)]
pub struct Reservoir {
    hp: EsnHyperParams,
    d_in: usize,
    w_x: CsrMatrix,
    w_u: CsrMatrix,
}

pub fn build_reservoir(hp: &EsnHyperParams, d_in: usize) -> Result<Reservoir> {
    hp.validate()?;
    if d_in == 0 {
        return Err(Error::Config("reservoir input dimension must be at least 1".into()));
    }
    if hp.input_degree > d_in {
        return Err(Error::Config(format!(
            "input_degree {} exceeds input dimension {d_in}",
            hp.input_degree
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    let mut triplets = Vec::with_capacity(hp.d_s * hp.degree);
    for row in 0..hp.d_s {
        let mut cols = sample(&mut rng, hp.d_s, hp.degree).into_vec();
        cols.sort_unstable();
        for col in cols {
            triplets.push((row, col, rng.random_range(-1.0..=1.0)));
        }
    }
    let mut w_x = CsrMatrix::from_triplets(hp.d_s, hp.d_s, &triplets)?;
    let radius = estimate_spectral_radius(&w_x.abs())?;
    if !(radius > 0.0) {
        return Err(Error::Config("recurrent matrix has zero spectral radius; change the seed".into()));
    }
    w_x.scale(hp.rho / radius);

    let mut triplets = Vec::with_capacity(hp.d_s * hp.input_degree);
    for row in 0..hp.d_s {
        let mut cols = sample(&mut rng, d_in, hp.input_degree).into_vec();
        cols.sort_unstable();
        for col in cols {
            triplets.push((row, col, rng.random_range(-hp.alpha..=hp.alpha)));
        }
    }
    let w_u = CsrMatrix::from_triplets(hp.d_s, d_in, &triplets)?;
    Ok(Reservoir { hp: *hp, d_in, w_x, w_u })
}

impl Reservoir {
    /// Reassemble from stored matrices (checkpoint loading).
    pub fn from_parts(hp: EsnHyperParams, w_x: CsrMatrix, w_u: CsrMatrix) -> Result<Self> {
        hp.validate()?;
        if w_x.rows() != hp.d_s || w_x.cols() != hp.d_s || w_u.rows() != hp.d_s {
            return Err(Error::Config(format!(
                "matrix shapes {}x{} and {}x{} do not match d_s = {}",
                w_x.rows(),
                w_x.cols(),
                w_u.rows(),
                w_u.cols(),
                hp.d_s
            )));
        }
        Ok(Self {
            hp,
            d_in: w_u.cols(),
            w_x,
            w_u,
        })
    }

    pub fn hyperparams(&self) -> &EsnHyperParams {
        &self.hp
    }

    pub fn d_s(&self) -> usize {
        self.hp.d_s
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn w_x(&self) -> &CsrMatrix {
        &self.w_x
    }

    pub fn w_u(&self) -> &CsrMatrix {
        &self.w_u
    }

    /// `x ← tanh(W_x x + W_u u)`, reusing `scratch` (length `d_s`).
    pub fn advance_in_place(&self, x: &mut [f64], u: &[f64], scratch: &mut [f64]) {
        scratch.iter_mut().for_each(|s| *s = 0.0);
        self.w_x.mul_add(x, scratch);
        self.w_u.mul_add(u, scratch);
        x.iter_mut().zip(scratch.iter()).for_each(|(x, s)| *x = s.tanh());
    }

    /// Drive the reservoir from `x0` through `inputs`, returning every state
    /// after each input.
    pub fn drive(&self, x0: &[f64], inputs: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let mut x = x0.to_vec();
        let mut scratch = vec![0.0; self.hp.d_s];
        inputs
            .iter()
            .map(|u| {
                self.advance_in_place(&mut x, u, &mut scratch);
                x.clone()
            })
            .collect()
    }
}

pub fn advance_state(res: &Reservoir, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
    if x.len() != res.d_s() || u.len() != res.d_in() {
        return Err(Error::Config(format!(
            "state/input lengths {}/{} do not match reservoir {}/{}",
            x.len(),
            u.len(),
            res.d_s(),
            res.d_in()
        )));
    }
    let mut out = x.to_vec();
    res.advance_in_place(&mut out, u, &mut vec![0.0; res.d_s()]);
    Ok(out)
}
