use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::{EsnHyperParams, Reservoir};
use crate::error::{Error, Result};
use crate::nls::{interleave, FieldSeries};

/// Split of the interleaved `[Re ψ₀, Im ψ₀, Re ψ₁, …]` state into `M`
/// disjoint output windows of `m_out` entries, each read through an input
/// window widened by `overlap` entries per side (periodic).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Partition {
    m_reservoirs: usize,
    m_out: usize,
    overlap: usize,
}

impl Partition {
    /// `width` is the flattened state length, twice the number of nodes.
    pub fn new(width: usize, m_reservoirs: usize, overlap: usize) -> Result<Self> {
        if m_reservoirs == 0 || width == 0 || !width.is_multiple_of(m_reservoirs) {
            return Err(Error::Config(format!(
                "state width {width} is not divisible into {m_reservoirs} reservoirs"
            )));
        }
        if !overlap.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "overlap must be even so real/imaginary pairs stay together, got {overlap}"
            )));
        }
        if overlap >= width {
            return Err(Error::Config(format!("overlap {overlap} exceeds state width {width}")));
        }
        Ok(Self {
            m_reservoirs,
            m_out: width / m_reservoirs,
            overlap,
        })
    }

    pub fn m_reservoirs(&self) -> usize {
        self.m_reservoirs
    }

    pub fn m_out(&self) -> usize {
        self.m_out
    }

    pub fn overlap(&self) -> usize {
        self.overlap
    }

    pub fn d_in(&self) -> usize {
        self.m_out + 2 * self.overlap
    }

    pub fn width(&self) -> usize {
        self.m_out * self.m_reservoirs
    }

    /// Reservoir `k`'s output window of a flattened state.
    pub fn output_window<'a>(&self, flat: &'a [f64], k: usize) -> &'a [f64] {
        &flat[k * self.m_out..(k + 1) * self.m_out]
    }

    /// Reservoir `k`'s input window of a flattened state, wrapping periodically.
    pub fn fill_input(&self, flat: &[f64], k: usize, out: &mut [f64]) {
        let width = self.width();
        let start = k * self.m_out + width - self.overlap;
        for (i, o) in out.iter_mut().enumerate() {
            *o = flat[(start + i) % width];
        }
    }

    pub fn input_window(&self, flat: &[f64], k: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.d_in()];
        self.fill_input(flat, k, &mut out);
        out
    }

    /// Concatenate per-reservoir output windows into one flattened state.
    pub fn assemble(&self, windows: &[Vec<f64>]) -> Vec<f64> {
        debug_assert_eq!(windows.len(), self.m_reservoirs);
        windows.concat()
    }

    fn check_series(&self, series: &FieldSeries) -> Result<()> {
        if 2 * series.grid().len() != self.width() {
            return Err(Error::Config(format!(
                "series has {} flattened entries per frame, partition expects {}",
                2 * series.grid().len(),
                self.width()
            )));
        }
        Ok(())
    }
}

/// Per-reservoir input and one-step-ahead target sequences of a series.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedSeries {
    /// `inputs[k][j]` is reservoir `k`'s input window of frame `j`.
    pub inputs: Vec<Vec<Vec<f64>>>,
    /// `targets[k][j]` is reservoir `k`'s output window of frame `j + 1`.
    pub targets: Vec<Vec<Vec<f64>>>,
}

impl PartitionedSeries {
    pub fn len(&self) -> usize {
        self.inputs.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn partition_series(series: &FieldSeries, part: &Partition) -> Result<PartitionedSeries> {
    part.check_series(series)?;
    let flat: Vec<Vec<f64>> = series.frames().iter().map(|f| interleave(f)).collect();
    let pairs = flat.len().saturating_sub(1);
    let mut inputs = vec![Vec::with_capacity(pairs); part.m_reservoirs];
    let mut targets = vec![Vec::with_capacity(pairs); part.m_reservoirs];
    for j in 0..pairs {
        for k in 0..part.m_reservoirs {
            inputs[k].push(part.input_window(&flat[j], k));
            targets[k].push(part.output_window(&flat[j + 1], k).to_vec());
        }
    }
    Ok(PartitionedSeries { inputs, targets })
}

/// Retained hidden states of one reservoir as columns, with the matching
/// target windows.
#[derive(Debug, Clone, PartialEq)]
pub struct StateMatrix {
    pub k: usize,
    /// `d_s × columns`
    pub states: DMatrix<f64>,
    /// `m_out × columns`
    pub targets: DMatrix<f64>,
}

impl StateMatrix {
    pub fn columns(&self) -> usize {
        self.states.ncols()
    }
}

/// Noise generator for reservoir `k` of training series `series_index`.
/// Stream 0 of the seed is reserved for the reservoir matrices.
pub(crate) fn noise_rng(seed: u64, series_index: usize, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1 + ((series_index as u64) << 32) + k as u64);
    rng
}

/// Drive each reservoir from a zero state through its (noise-perturbed)
/// inputs and keep the states after the washout.
pub fn harvest_states(
    res: &Reservoir,
    data: &PartitionedSeries,
    hp: &EsnHyperParams,
    series_index: usize,
) -> Result<Vec<StateMatrix>> {
    let n = data.len();
    if n <= hp.n_w {
        return Err(Error::Config(format!(
            "series provides {n} training steps, washout needs more than {}",
            hp.n_w
        )));
    }
    if let Some(u) = data.inputs.first().and_then(|s| s.first()) {
        if u.len() != res.d_in() {
            return Err(Error::Config(format!(
                "input windows have {} entries, reservoir expects {}",
                u.len(),
                res.d_in()
            )));
        }
    }
    let std = hp.noise_std();
    let normal = Normal::new(0.0, std).map_err(|e| Error::Config(e.to_string()))?;
    let d_s = res.d_s();
    let kept = n - hp.n_w;
    Ok((0..data.inputs.len())
        .into_par_iter()
        .map(|k| {
            let mut rng = noise_rng(hp.seed, series_index, k);
            let m_out = data.targets[k][0].len();
            let mut states = DMatrix::zeros(d_s, kept);
            let mut targets = DMatrix::zeros(m_out, kept);
            let mut x = vec![0.0; d_s];
            let mut scratch = vec![0.0; d_s];
            let mut u = vec![0.0; res.d_in()];
            for j in 0..n {
                u.copy_from_slice(&data.inputs[k][j]);
                if std > 0.0 {
                    u.iter_mut().for_each(|v| *v += normal.sample(&mut rng));
                }
                res.advance_in_place(&mut x, &u, &mut scratch);
                if j >= hp.n_w {
                    let col = j - hp.n_w;
                    states.column_mut(col).copy_from_slice(&x);
                    targets.column_mut(col).copy_from_slice(&data.targets[k][j]);
                }
            }
            StateMatrix { k, states, targets }
        })
        .collect())
}
