use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::StateMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReadoutMode {
    /// One readout for every reservoir (translation-invariant data).
    #[default]
    Shared,
    Independent,
}

impl fmt::Display for ReadoutMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReadoutMode::Shared => "shared",
            ReadoutMode::Independent => "independent",
        })
    }
}

impl FromStr for ReadoutMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shared" => Ok(ReadoutMode::Shared),
            "independent" => Ok(ReadoutMode::Independent),
            other => Err(Error::Config(format!(
                "unknown readout mode `{other}` (expected shared or independent)"
            ))),
        }
    }
}

/// Trained output matrices, each `m_out × d_s`.
#[derive(Debug, Clone, PartialEq)]
pub enum Readout {
    Shared(DMatrix<f64>),
    Independent(Vec<DMatrix<f64>>),
}

impl Readout {
    pub fn mode(&self) -> ReadoutMode {
        match self {
            Readout::Shared(_) => ReadoutMode::Shared,
            Readout::Independent(_) => ReadoutMode::Independent,
        }
    }

    pub fn matrix(&self, k: usize) -> &DMatrix<f64> {
        match self {
            Readout::Shared(w) => w,
            Readout::Independent(ws) => &ws[k],
        }
    }

    pub fn matrices(&self) -> Vec<&DMatrix<f64>> {
        match self {
            Readout::Shared(w) => vec![w],
            Readout::Independent(ws) => ws.iter().collect(),
        }
    }
}

/// Normal-equation blocks `X Xᵀ` and `X Yᵀ` of one state matrix.
fn gram(sm: &StateMatrix) -> (DMatrix<f64>, DMatrix<f64>) {
    let xt = sm.states.transpose();
    (&sm.states * &xt, &sm.states * sm.targets.transpose())
}

/// Sum the blocks in input order regardless of thread scheduling, so that
/// reruns are bit-identical.
fn accumulate(items: &[&StateMatrix]) -> (DMatrix<f64>, DMatrix<f64>) {
    let d_s = items[0].states.nrows();
    let m_out = items[0].targets.nrows();
    let mut g = DMatrix::zeros(d_s, d_s);
    let mut b = DMatrix::zeros(d_s, m_out);
    for chunk in items.chunks(rayon::current_num_threads().max(1)) {
        let parts: Vec<_> = chunk.par_iter().map(|sm| gram(sm)).collect();
        for (pg, pb) in parts {
            g += pg;
            b += pb;
        }
    }
    (g, b)
}

/// Solve `(G + βI) W_oᵀ = B` by Cholesky.
fn solve(mut g: DMatrix<f64>, b: DMatrix<f64>, beta: f64) -> Result<DMatrix<f64>> {
    for i in 0..g.nrows() {
        g[(i, i)] += beta;
    }
    let chol = g.cholesky().ok_or(Error::SingularSystem)?;
    let w_t = chol.solve(&b);
    if w_t.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem);
    }
    Ok(w_t.transpose())
}

/// Ridge regression of targets on states. Several state matrices may share
/// a reservoir index (one per training series); in independent mode they
/// are pooled per index, in shared mode all are pooled.
pub fn train_readout(states: &[StateMatrix], beta: f64, mode: ReadoutMode, m_reservoirs: usize) -> Result<Readout> {
    if states.is_empty() {
        return Err(Error::Config("no state matrices to train on".into()));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::Config(format!("beta must be non-negative, got {beta}")));
    }
    let (d_s, m_out) = (states[0].states.nrows(), states[0].targets.nrows());
    for sm in states {
        if sm.states.ncols() != sm.targets.ncols() {
            return Err(Error::Config(format!(
                "reservoir {}: {} state columns but {} target columns",
                sm.k,
                sm.states.ncols(),
                sm.targets.ncols()
            )));
        }
        if sm.states.nrows() != d_s || sm.targets.nrows() != m_out {
            return Err(Error::Config("state matrices disagree in shape".into()));
        }
        if sm.k >= m_reservoirs {
            return Err(Error::Config(format!("reservoir index {} out of range", sm.k)));
        }
    }
    match mode {
        ReadoutMode::Shared => {
            let all: Vec<&StateMatrix> = states.iter().collect();
            let (g, b) = accumulate(&all);
            Ok(Readout::Shared(solve(g, b, beta)?))
        }
        ReadoutMode::Independent => {
            let per_k = (0..m_reservoirs)
                .into_par_iter()
                .map(|k| {
                    let mine: Vec<&StateMatrix> = states.iter().filter(|s| s.k == k).collect();
                    if mine.is_empty() {
                        return Err(Error::Config(format!("no training states for reservoir {k}")));
                    }
                    let (g, b) = accumulate(&mine);
                    solve(g, b, beta)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Readout::Independent(per_k))
        }
    }
}
