//! Parallel echo-state networks over a periodic spatial partition.
//!
//! Every reservoir shares the same sparse recurrent matrix `W_x` and input
//! matrix `W_u`; reservoir `k` reads an overlapping window of the state and
//! predicts its own disjoint window one step ahead:
//!
//! ```text
//! x_{j+1} = tanh(W_x x_j + W_u u_j),   ŷ_{j+1} = W_o x_{j+1}
//! ```

mod checkpoint;
mod partition;
mod readout;
mod reservoir;
mod sparse;

use nalgebra::DVectorView;
use rayon::prelude::*;

pub use checkpoint::{checkpoint_bytes, checkpoint_from_bytes, read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use partition::{harvest_states, partition_series, Partition, PartitionedSeries, StateMatrix};
pub use readout::{train_readout, Readout, ReadoutMode};
pub use reservoir::{advance_state, build_reservoir, EsnHyperParams, NoiseScale, Reservoir};
pub use sparse::{estimate_spectral_radius, CsrMatrix};

use crate::error::{Error, Result};
use crate::nls::FieldSeries;

/// A trained parallel reservoir computer.
#[derive(Debug, Clone, PartialEq)]
pub struct EsnModel {
    reservoir: Reservoir,
    partition: Partition,
    readout: Readout,
}

impl EsnModel {
    pub fn new(reservoir: Reservoir, partition: Partition, readout: Readout) -> Result<Self> {
        if reservoir.d_in() != partition.d_in() {
            return Err(Error::Config(format!(
                "reservoir takes {} inputs, partition supplies {}",
                reservoir.d_in(),
                partition.d_in()
            )));
        }
        if let Readout::Independent(ws) = &readout {
            if ws.len() != partition.m_reservoirs() {
                return Err(Error::Config(format!(
                    "{} readouts for {} reservoirs",
                    ws.len(),
                    partition.m_reservoirs()
                )));
            }
        }
        for w in readout.matrices() {
            if w.nrows() != partition.m_out() || w.ncols() != reservoir.d_s() {
                return Err(Error::Config(format!(
                    "readout is {}x{}, expected {}x{}",
                    w.nrows(),
                    w.ncols(),
                    partition.m_out(),
                    reservoir.d_s()
                )));
            }
        }
        Ok(Self {
            reservoir,
            partition,
            readout,
        })
    }

    /// Build the reservoir, harvest every training series (each with its
    /// own washout and noise stream) and fit the readout on the pooled states.
    pub fn train(hp: &EsnHyperParams, partition: Partition, series: &[FieldSeries], mode: ReadoutMode) -> Result<Self> {
        if series.is_empty() {
            return Err(Error::Config("training needs at least one series".into()));
        }
        let reservoir = build_reservoir(hp, partition.d_in())?;
        let mut states = Vec::new();
        for (s, data) in series.iter().enumerate() {
            let windows = partition_series(data, &partition)?;
            states.extend(harvest_states(&reservoir, &windows, hp, s)?);
        }
        let readout = train_readout(&states, hp.beta, mode, partition.m_reservoirs())?;
        log::info!(
            "trained {} readout on {} state columns",
            mode,
            states.iter().map(StateMatrix::columns).sum::<usize>()
        );
        Self::new(reservoir, partition, readout)
    }

    pub fn reservoir(&self) -> &Reservoir {
        &self.reservoir
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn readout(&self) -> &Readout {
        &self.readout
    }

    pub fn hyperparams(&self) -> &EsnHyperParams {
        self.reservoir.hyperparams()
    }

    /// Zero hidden state for every reservoir.
    pub fn zero_states(&self) -> Vec<Vec<f64>> {
        vec![vec![0.0; self.reservoir.d_s()]; self.partition.m_reservoirs()]
    }

    /// Readout of reservoir `k` for hidden state `x`.
    pub fn output(&self, k: usize, x: &[f64]) -> Vec<f64> {
        let w = self.readout.matrix(k);
        (w * DVectorView::from_slice(x, x.len())).as_slice().to_vec()
    }

    /// Advance every reservoir on its window of the flattened state `input`
    /// and return the assembled one-step prediction.
    pub fn step(&self, states: &mut [Vec<f64>], input: &[f64]) -> Vec<f64> {
        debug_assert_eq!(input.len(), self.partition.width());
        let windows: Vec<Vec<f64>> = states
            .par_iter_mut()
            .enumerate()
            .map(|(k, x)| {
                let u = self.partition.input_window(input, k);
                let mut scratch = vec![0.0; x.len()];
                self.reservoir.advance_in_place(x, &u, &mut scratch);
                self.output(k, x)
            })
            .collect();
        self.partition.assemble(&windows)
    }
}
