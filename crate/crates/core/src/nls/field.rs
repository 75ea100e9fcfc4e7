use std::ops::Range;

use num_complex::Complex64;

use super::Grid;
use crate::error::{Error, Result};

/// Complex envelope sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Config(format!(
                "field has {} values but grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { node });
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        Self { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.nodes().into_iter().map(f).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn max_modulus(&self) -> f64 {
        max_modulus(&self.values)
    }

    /// Length-averaged `|ψ|²`.
    pub fn norm_density(&self) -> f64 {
        norm_density(&self.values)
    }

    /// Euclidean distance to `other`, relative to the norm of `other`.
    pub fn relative_l2_error(&self, reference: &ComplexField) -> f64 {
        let num: f64 = self
            .values
            .iter()
            .zip(&reference.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let den: f64 = reference.values.iter().map(|b| b.norm_sqr()).sum();
        (num / den).sqrt()
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(node) => Err(Error::NonFinite { node }),
            None => Ok(()),
        }
    }
}

pub(crate) fn max_modulus(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub(crate) fn norm_density(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm_sqr()).sum::<f64>() / values.len() as f64
}

/// Interleave a complex frame as `[Re ψ0, Im ψ0, Re ψ1, Im ψ1, ..]`.
pub fn interleave(values: &[Complex64]) -> Vec<f64> {
    values.iter().flat_map(|v| [v.re, v.im]).collect()
}

/// Inverse of [`interleave`].
pub fn deinterleave(flat: &[f64]) -> Vec<Complex64> {
    flat.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

/// A uniformly sampled trajectory of complex fields on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSeries {
    grid: Grid,
    t0: f64,
    dt_sample: f64,
    frames: Vec<Vec<Complex64>>,
    provenance: String,
}

impl FieldSeries {
    pub fn new(
        grid: Grid,
        t0: f64,
        dt_sample: f64,
        frames: Vec<Vec<Complex64>>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if !(dt_sample.is_finite() && dt_sample > 0.0) {
            return Err(Error::Config(format!("sample spacing must be positive, got {dt_sample}")));
        }
        if !t0.is_finite() {
            return Err(Error::Config("series start time must be finite".into()));
        }
        if let Some(j) = frames.iter().position(|f| f.len() != grid.len()) {
            return Err(Error::Config(format!(
                "snapshot {j} has {} values, grid has {}",
                frames[j].len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid,
            t0,
            dt_sample,
            frames,
            provenance: provenance.into(),
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt_sample(&self) -> f64 {
        self.dt_sample
    }

    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt_sample
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.time(j)).collect()
    }

    /// Index of the sample closest to time `t`, if it lies inside the series.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let j = ((t - self.t0) / self.dt_sample).round();
        if j < 0.0 || j as usize >= self.len() {
            None
        } else {
            Some(j as usize)
        }
    }

    pub fn frame(&self, j: usize) -> &[Complex64] {
        &self.frames[j]
    }

    pub fn frames(&self) -> &[Vec<Complex64>] {
        &self.frames
    }

    pub fn field(&self, j: usize) -> ComplexField {
        ComplexField::from_parts_unchecked(self.grid, self.frames[j].clone())
    }

    pub fn flattened(&self, j: usize) -> Vec<f64> {
        interleave(&self.frames[j])
    }

    pub fn max_envelope(&self, j: usize) -> f64 {
        max_modulus(&self.frames[j])
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn set_provenance(&mut self, provenance: impl Into<String>) {
        self.provenance = provenance.into();
    }

    /// Value of a `key=value` entry in the `;`-separated provenance string.
    pub fn provenance_value(&self, key: &str) -> Option<&str> {
        self.provenance
            .split(';')
            .filter_map(|kv| kv.split_once('='))
            .find(|(k, _)| k.trim() == key)
            .map(|(_, v)| v.trim())
    }

    /// Sub-series over a sample range; times are preserved and a `t0`
    /// provenance entry follows the new start.
    pub fn slice(&self, range: Range<usize>) -> Result<Self> {
        if range.end > self.len() || range.start > range.end {
            return Err(Error::Config(format!(
                "slice {:?} outside series of {} samples",
                range,
                self.len()
            )));
        }
        Ok(Self {
            grid: self.grid,
            t0: self.time(range.start),
            dt_sample: self.dt_sample,
            frames: self.frames[range.clone()].to_vec(),
            provenance: with_t0_entry(&self.provenance, self.time(range.start)),
        })
    }

    pub fn push(&mut self, frame: Vec<Complex64>) -> Result<()> {
        if frame.len() != self.grid.len() {
            return Err(Error::Config("snapshot length does not match grid".into()));
        }
        self.frames.push(frame);
        Ok(())
    }
}

/// Provenance with its `t0` entry (added if absent) set to `t0`.
pub(crate) fn with_t0_entry(provenance: &str, t0: f64) -> String {
    let mut parts: Vec<String> = provenance
        .split(';')
        .filter(|kv| !kv.is_empty() && kv.split_once('=').is_none_or(|(k, _)| k.trim() != "t0"))
        .map(str::to_string)
        .collect();
    parts.push(format!("t0={t0:?}"));
    parts.join(";")
}
