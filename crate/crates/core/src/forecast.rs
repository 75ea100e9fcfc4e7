//! One-step (teacher-forced) and autonomous prediction with a trained
//! [`EsnModel`], intermittent assimilation, norm-preserving rescaling and
//! error metrics.

use std::fmt;
use std::io;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::esn::EsnModel;
use crate::nls::{deinterleave, energies_with, EnergyReport, FieldSeries, Spectral};

/// Default PH tolerance.
pub const DEFAULT_EPSILON: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ForecastMode {
    #[default]
    TeacherForced,
    Autonomous,
}

impl fmt::Display for ForecastMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ForecastMode::TeacherForced => "onestep",
            ForecastMode::Autonomous => "auto",
        })
    }
}

impl FromStr for ForecastMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "onestep" | "teacher_forced" => Ok(ForecastMode::TeacherForced),
            "auto" | "autonomous" => Ok(ForecastMode::Autonomous),
            other => Err(Error::Config(format!(
                "unknown forecast mode `{other}` (expected onestep or auto)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForecastOptions {
    pub mode: ForecastMode,
    /// Index of the first predicted frame. Frames before it are ground-truth input.
    pub start_index: usize,
    pub steps: usize,
    /// Feed the true state instead of the prediction every this many steps.
    pub assimilation_interval: Option<usize>,
    /// Rescale every prediction to the norm of the last ground-truth input.
    pub normalize: bool,
    pub epsilon: f64,
}

impl Default for ForecastOptions {
    fn default() -> Self {
        Self {
            mode: ForecastMode::TeacherForced,
            start_index: 101,
            steps: 1,
            assimilation_interval: None,
            normalize: false,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

impl ForecastOptions {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Config("forecast needs at least one step".into()));
        }
        if self.assimilation_interval == Some(0) {
            return Err(Error::Config("assimilation interval must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastRun {
    /// Frames `start_index .. start_index + steps`, stamped with the truth times.
    pub predicted: FieldSeries,
    /// `e_j` for every predicted frame that has ground truth; may be shorter
    /// than the prediction when an autonomous run outlives the data.
    pub nrmse: Vec<f64>,
    pub options: ForecastOptions,
    pub provenance: String,
}

impl ForecastRun {
    pub fn horizon(&self) -> PredictionHorizon {
        prediction_horizon(&self.nrmse, self.options.epsilon)
    }
}

/// Earliest step at which the error reaches the tolerance. A censored
/// horizon never reached it and reports the number of steps examined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PredictionHorizon {
    pub steps: usize,
    pub censored: bool,
}

pub fn prediction_horizon(errors: &[f64], epsilon: f64) -> PredictionHorizon {
    match errors.iter().position(|e| *e >= epsilon) {
        Some(steps) => PredictionHorizon { steps, censored: false },
        None => PredictionHorizon {
            steps: errors.len(),
            censored: true,
        },
    }
}

/// `‖ŷ − y‖ / ‖y‖` over the whole field.
pub fn nrmse(predicted: &[Complex64], truth: &[Complex64]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::Config(format!(
            "prediction has {} nodes, truth has {}",
            predicted.len(),
            truth.len()
        )));
    }
    let den: f64 = truth.iter().map(|v| v.norm_sqr()).sum();
    if den == 0.0 {
        return Err(Error::UndefinedMetric);
    }
    let num: f64 = predicted.iter().zip(truth).map(|(p, t)| (p - t).norm_sqr()).sum();
    Ok((num / den).sqrt())
}

fn flat_nrmse(predicted: &[f64], truth: &[f64]) -> Result<f64> {
    let den: f64 = truth.iter().map(|v| v * v).sum();
    if den == 0.0 {
        return Err(Error::UndefinedMetric);
    }
    let num: f64 = predicted.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok((num / den).sqrt())
}

fn euclidean(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Per-reservoir inputs rebuilt from per-reservoir predictions: each window
/// is flanked by the neighbouring predictions, periodically in `k`.
pub fn reassemble_inputs(windows: &[Vec<f64>], model: &EsnModel) -> Vec<Vec<f64>> {
    let part = model.partition();
    let flat = part.assemble(windows);
    (0..part.m_reservoirs()).map(|k| part.input_window(&flat, k)).collect()
}

/// Short hex digest identifying a model.
pub fn model_fingerprint(model: &EsnModel) -> String {
    hex16(&Sha256::digest(crate::esn::checkpoint_bytes(model)))
}

/// Short hex digest of a series' grid, timing and samples.
pub fn series_fingerprint(series: &FieldSeries) -> String {
    let mut h = Sha256::new();
    h.update((series.grid().len() as u64).to_le_bytes());
    h.update(series.grid().length().to_le_bytes());
    h.update(series.t0().to_le_bytes());
    h.update(series.dt_sample().to_le_bytes());
    for frame in series.frames() {
        for v in frame {
            h.update(v.re.to_le_bytes());
            h.update(v.im.to_le_bytes());
        }
    }
    hex16(&h.finalize())
}

fn hex16(digest: &[u8]) -> String {
    hex::encode(&digest[..8])
}

fn check_inputs(model: &EsnModel, series: &FieldSeries, opts: &ForecastOptions) -> Result<()> {
    opts.validate()?;
    if 2 * series.grid().len() != model.partition().width() {
        return Err(Error::Config(format!(
            "series has {} nodes, model expects {}",
            series.grid().len(),
            model.partition().width() / 2
        )));
    }
    let n_w = model.hyperparams().n_w;
    if opts.start_index <= n_w {
        return Err(Error::Config(format!(
            "start index {} falls inside the {n_w}-step washout",
            opts.start_index
        )));
    }
    if opts.start_index > series.len() {
        return Err(Error::DataAvailability {
            step: opts.start_index - 1,
            available: series.len(),
        });
    }
    Ok(())
}

fn run(model: &EsnModel, series: &FieldSeries, opts: &ForecastOptions, ids: (&str, &str)) -> Result<ForecastRun> {
    check_inputs(model, series, opts)?;
    let j0 = opts.start_index;
    let truth = |j: usize| -> Result<Vec<f64>> {
        if j < series.len() {
            Ok(series.flattened(j))
        } else {
            Err(Error::DataAvailability {
                step: j,
                available: series.len(),
            })
        }
    };
    let mut states = model.zero_states();
    let mut y = Vec::new();
    let mut last_truth = Vec::new();
    for j in 0..j0 {
        last_truth = series.flattened(j);
        y = model.step(&mut states, &last_truth);
    }
    let reference = euclidean(&last_truth);
    if opts.normalize && reference == 0.0 {
        return Err(Error::DegenerateScaling);
    }
    let teacher = opts.mode == ForecastMode::TeacherForced;
    let mut frames = Vec::with_capacity(opts.steps);
    let mut errors = Vec::with_capacity(opts.steps);
    for i in 0..opts.steps {
        let j = j0 + i;
        if opts.normalize {
            let norm = euclidean(&y);
            if norm == 0.0 {
                return Err(Error::DegenerateScaling);
            }
            let c = reference / norm;
            y.iter_mut().for_each(|v| *v *= c);
        }
        if j < series.len() {
            errors.push(flat_nrmse(&y, &series.flattened(j))?);
        }
        frames.push(deinterleave(&y));
        if i + 1 == opts.steps {
            break;
        }
        let assimilate = opts.assimilation_interval.is_some_and(|n| (i + 1) % n == 0);
        let input = if teacher || assimilate { truth(j)? } else { std::mem::take(&mut y) };
        y = model.step(&mut states, &input);
    }
    let provenance = format!(
        "model={};data={};mode={};j0={};steps={};assimilate={};normalize={};epsilon={:?}",
        ids.0,
        ids.1,
        opts.mode,
        j0,
        opts.steps,
        opts.assimilation_interval.map_or("none".to_string(), |n| n.to_string()),
        opts.normalize,
        opts.epsilon
    );
    let predicted = FieldSeries::new(series.grid(), series.time(j0), series.dt_sample(), frames, provenance.clone())?;
    Ok(ForecastRun {
        predicted,
        nrmse: errors,
        options: *opts,
        provenance,
    })
}

/// Forecast according to `opts.mode`.
pub fn forecast(model: &EsnModel, series: &FieldSeries, opts: &ForecastOptions) -> Result<ForecastRun> {
    run(model, series, opts, (&model_fingerprint(model), &series_fingerprint(series)))
}

/// One-step prediction: every input is ground truth.
pub fn teacher_forced_run(model: &EsnModel, series: &FieldSeries, opts: &ForecastOptions) -> Result<ForecastRun> {
    forecast(
        model,
        series,
        &ForecastOptions {
            mode: ForecastMode::TeacherForced,
            ..*opts
        },
    )
}

/// Prediction fed back as input from `start_index` on, with optional
/// assimilation and normalisation.
pub fn autonomous_run(model: &EsnModel, series: &FieldSeries, opts: &ForecastOptions) -> Result<ForecastRun> {
    forecast(
        model,
        series,
        &ForecastOptions {
            mode: ForecastMode::Autonomous,
            ..*opts
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub t0: f64,
    pub start_index: usize,
    pub horizon: PredictionHorizon,
    /// Horizon in time units of the series.
    pub ph_time: f64,
}

/// Autonomous runs from each start time, in parallel. Each run is cut
/// short where the ground truth ends, since no horizon can be measured past it.
pub fn ph_sweep(model: &EsnModel, series: &FieldSeries, t0s: &[f64], opts: &ForecastOptions) -> Result<Vec<SweepPoint>> {
    let ids = (model_fingerprint(model), series_fingerprint(series));
    t0s.par_iter()
        .map(|&t0| {
            let start_index = series.index_of(t0).ok_or_else(|| {
                Error::Config(format!(
                    "start time {t0} outside the series span [{}, {}]",
                    series.t0(),
                    series.time(series.len().saturating_sub(1))
                ))
            })?;
            let o = ForecastOptions {
                mode: ForecastMode::Autonomous,
                start_index,
                steps: opts.steps.min(series.len() - start_index).max(1),
                ..*opts
            };
            let r = run(model, series, &o, (&ids.0, &ids.1))?;
            let horizon = r.horizon();
            Ok(SweepPoint {
                t0,
                start_index,
                horizon,
                ph_time: horizon.steps as f64 * series.dt_sample(),
            })
        })
        .collect()
}

/// Energies of every predicted frame.
pub fn energy_trace(run: &ForecastRun) -> Vec<EnergyReport> {
    series_energies(&run.predicted)
}

pub fn series_energies(series: &FieldSeries) -> Vec<EnergyReport> {
    let mut spectral = Spectral::new(&series.grid());
    series.frames().iter().map(|f| energies_with(&mut spectral, f)).collect()
}

/// Round-trip-exact decimal form of a float.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(format!("csv: {e}"))
}

/// Per-step metrics as CSV: `j,t,nrmse,max_env,ke,pe,ham`. `nrmse` is empty
/// where no ground truth exists.
pub fn write_metrics_csv(run: &ForecastRun, out: impl io::Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["j", "t", "nrmse", "max_env", "ke", "pe", "ham"]).map_err(csv_error)?;
    for (i, e) in energy_trace(run).iter().enumerate() {
        w.write_record([
            (run.options.start_index + i).to_string(),
            format_float(run.predicted.time(i)),
            run.nrmse.get(i).map_or(String::new(), |v| format_float(*v)),
            format_float(run.predicted.max_envelope(i)),
            format_float(e.kinetic),
            format_float(e.potential),
            format_float(e.hamiltonian),
        ])
        .map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

/// Sweep results as CSV: `t0,ph_steps,ph_time,censored`.
pub fn write_sweep_csv(points: &[SweepPoint], out: impl io::Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t0", "ph_steps", "ph_time", "censored"]).map_err(csv_error)?;
    for p in points {
        w.write_record([
            format_float(p.t0),
            p.horizon.steps.to_string(),
            format_float(p.ph_time),
            p.horizon.censored.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}
