//! The `rogue-rc` command line.
//!
//! Every subcommand reads an [`ExperimentConfig`]; flags are shorthands for
//! config keys and `--section.key=value` overrides any key. Each output file
//! gets a `<output>.provenance` sidecar recording the command, the hash of
//! the effective configuration, the seeds and the hashes of all inputs.

pub mod config;
pub mod dataset;

use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

pub use config::{parse_config, parse_config_str, ExperimentConfig, InitialKind, CONFIG_DIR_ENV, DEFAULT_CONFIG_NAME};
pub use dataset::{dataset_bytes, dataset_from_bytes, read_dataset, write_dataset, DATASET_MAGIC, DATASET_VERSION};

use crate::analytic::{akhmediev_field, max_intensity_peak, mode_params, seeded_plane_wave, unstable_modes};
use crate::error::{Error, Result};
use crate::esn::{read_checkpoint, write_checkpoint, EsnModel, Partition};
use crate::forecast::{
    format_float, forecast, ph_sweep, series_energies, write_metrics_csv, write_sweep_csv, ForecastMode,
    ForecastOptions,
};
use crate::lyapunov::stretching_series;
use crate::nls::{simulate, FieldSeries, SimulationConfig};
use crate::ocean::nls_initial_condition;

#[derive(Debug, Parser)]
#[command(
    name = "rogue-rc",
    version,
    about = "NLS rogue-wave simulation and echo-state-network forecasting",
    after_help = "Any configuration key can be set with --section.key=value, e.g. --esn.beta=1e-3."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the NLS from the configured initial condition and store the sampled field
    Simulate(SimulateArgs),
    /// As simulate, starting from a random JONSWAP sea state
    Jonswap(SimulateArgs),
    /// Train a parallel reservoir computer on one or more datasets
    Train(TrainArgs),
    /// Predict a dataset with a trained model and write per-step metrics
    Predict(PredictArgs),
    /// Prediction horizon of autonomous runs over a range of start times
    Sweep(SweepArgs),
    /// Finite-time stretching numbers along a stored trajectory
    Lyapunov(DatasetArgs),
    /// Compare a predicted dataset with the truth, or check the peak of a simulation
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Configuration file (TOML)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    common: Common,
    /// Training dataset; repeat for several
    #[arg(long)]
    dataset: Vec<PathBuf>,
    /// Where to write the model checkpoint
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ForecastFlags {
    /// onestep or auto
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    assimilate_every: Option<usize>,
    #[arg(long)]
    normalize: bool,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    /// Also store the predicted field as a dataset
    #[arg(long)]
    predicted: Option<PathBuf>,
    #[command(flatten)]
    forecast: ForecastFlags,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    #[command(flatten)]
    forecast: ForecastFlags,
}

#[derive(Debug, Args)]
struct DatasetArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    dataset: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    common: Common,
    /// Dataset to evaluate
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Ground truth to compare against
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Check the largest envelope against the maximal-intensity peak
    #[arg(long)]
    validate_peak: bool,
}

type Overrides = Vec<(String, String)>;

fn push(o: &mut Overrides, key: &str, value: Option<impl ToString>) {
    if let Some(v) = value {
        o.push((key.to_string(), v.to_string()));
    }
}

fn path_text(p: &Option<PathBuf>) -> Option<String> {
    p.as_ref().map(|p| p.display().to_string())
}

impl Common {
    fn overrides(&self, o: &mut Overrides) {
        push(o, "paths.output", path_text(&self.output));
    }
}

impl ForecastFlags {
    fn overrides(&self, o: &mut Overrides) {
        push(o, "forecast.mode", self.mode.clone());
        push(o, "forecast.t0", self.t0);
        push(o, "forecast.steps", self.steps);
        push(o, "forecast.assimilate_every", self.assimilate_every);
        if self.normalize {
            push(o, "forecast.normalize", Some(true));
        }
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Jonswap(_) => "jonswap",
            Command::Train(_) => "train",
            Command::Predict(_) => "predict",
            Command::Sweep(_) => "sweep",
            Command::Lyapunov(_) => "lyapunov",
            Command::Evaluate(_) => "evaluate",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Simulate(a) | Command::Jonswap(a) => &a.common,
            Command::Train(a) => &a.common,
            Command::Predict(a) => &a.common,
            Command::Sweep(a) => &a.common,
            Command::Lyapunov(a) => &a.common,
            Command::Evaluate(a) => &a.common,
        }
    }

    fn overrides(&self) -> Overrides {
        let mut o = Vec::new();
        self.common().overrides(&mut o);
        match self {
            Command::Simulate(_) => {}
            Command::Jonswap(_) => push(&mut o, "initial.kind", Some("jonswap")),
            Command::Train(a) => {
                if !a.dataset.is_empty() {
                    let list: Vec<String> = a.dataset.iter().map(|p| p.display().to_string()).collect();
                    push(&mut o, "paths.train", Some(list.join(",")));
                }
                push(&mut o, "paths.model", path_text(&a.model));
            }
            Command::Predict(a) => {
                push(&mut o, "paths.dataset", path_text(&a.dataset));
                push(&mut o, "paths.model", path_text(&a.model));
                push(&mut o, "paths.predicted", path_text(&a.predicted));
                a.forecast.overrides(&mut o);
            }
            Command::Sweep(a) => {
                push(&mut o, "paths.dataset", path_text(&a.dataset));
                push(&mut o, "paths.model", path_text(&a.model));
                a.forecast.overrides(&mut o);
            }
            Command::Lyapunov(a) => push(&mut o, "paths.dataset", path_text(&a.dataset)),
            Command::Evaluate(a) => {
                push(&mut o, "paths.dataset", path_text(&a.dataset));
                push(&mut o, "paths.truth", path_text(&a.truth));
                if a.validate_peak {
                    push(&mut o, "validate.max_intensity", Some(true));
                }
            }
        }
        o
    }
}

/// Split `--section.key=value` overrides from the arguments clap handles.
fn extract_overrides(args: Vec<String>) -> std::result::Result<(Vec<String>, Overrides), String> {
    let mut rest = Vec::with_capacity(args.len());
    let mut overrides = Vec::new();
    for arg in args {
        match arg.strip_prefix("--") {
            Some(body) if body.split('=').next().is_some_and(|k| k.contains('.')) => {
                let (key, value) = body
                    .split_once('=')
                    .ok_or_else(|| format!("override `{arg}` needs a value: --{body}=<value>"))?;
                overrides.push((key.to_string(), value.to_string()));
            }
            _ => rest.push(arg),
        }
    }
    Ok((rest, overrides))
}

fn default_config_path() -> Option<PathBuf> {
    let dir = std::env::var_os(CONFIG_DIR_ENV)?;
    let path = Path::new(&dir).join(DEFAULT_CONFIG_NAME);
    path.is_file().then_some(path)
}

/// Run the command line; returns the process exit code (2 for usage and
/// configuration errors, 1 for runtime failures).
pub fn run(args: impl IntoIterator<Item = String>) -> i32 {
    let (rest, extra) = match extract_overrides(args.into_iter().collect()) {
        Ok(split) => split,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(rest) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let cfg = match load_config(&cli.command, &extra) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match execute(&cli.command, &cfg) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn load_config(command: &Command, extra: &Overrides) -> Result<ExperimentConfig> {
    let path = command.common().config.clone().or_else(default_config_path);
    let mut cfg = match &path {
        Some(p) => {
            log::info!("configuration {}", p.display());
            parse_config(p)?
        }
        None => ExperimentConfig::default(),
    };
    let mut overrides = command.overrides();
    overrides.extend(extra.iter().cloned());
    cfg.apply_overrides(&overrides)?;
    Ok(cfg)
}

fn execute(command: &Command, cfg: &ExperimentConfig) -> Result<()> {
    let mut run = Run::new(command.name(), cfg);
    match command {
        Command::Simulate(_) | Command::Jonswap(_) => simulate_cmd(&mut run)?,
        Command::Train(_) => train_cmd(&mut run)?,
        Command::Predict(_) => predict_cmd(&mut run)?,
        Command::Sweep(_) => sweep_cmd(&mut run)?,
        Command::Lyapunov(_) => lyapunov_cmd(&mut run)?,
        Command::Evaluate(_) => evaluate_cmd(&mut run)?,
    }
    run.finish()
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn file_sha256(path: &Path) -> Result<String> {
    Ok(sha256_hex(&std::fs::read(path).map_err(|e| Error::io(path, e))?))
}

/// Bookkeeping for one invocation: inputs read and outputs written.
struct Run<'a> {
    command: &'static str,
    cfg: &'a ExperimentConfig,
    inputs: Vec<(PathBuf, String)>,
    outputs: Vec<PathBuf>,
}

impl<'a> Run<'a> {
    fn new(command: &'static str, cfg: &'a ExperimentConfig) -> Self {
        Self {
            command,
            cfg,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    fn input(&mut self, path: &Path) -> Result<()> {
        let digest = file_sha256(path)?;
        self.inputs.push((path.to_path_buf(), digest));
        Ok(())
    }

    fn read_dataset(&mut self, path: &Path) -> Result<FieldSeries> {
        self.input(path)?;
        read_dataset(path)
    }

    fn read_model(&mut self, path: &Path) -> Result<EsnModel> {
        self.input(path)?;
        read_checkpoint(path)
    }

    fn create(&mut self, path: &Path) -> Result<BufWriter<File>> {
        self.outputs.push(path.to_path_buf());
        File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
    }

    fn wrote(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    fn provenance(&self, output: &Path) -> Result<String> {
        let mut s = String::new();
        let _ = writeln!(s, "tool = rogue-rc {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "command = {}", self.command);
        let _ = writeln!(s, "config_sha256 = {}", sha256_hex(self.cfg.render().as_bytes()));
        let _ = writeln!(
            s,
            "seeds = esn:{} sea:{} lyapunov:{}",
            self.cfg.esn.hp.seed, self.cfg.sea.seed, self.cfg.lyapunov.seed
        );
        for (path, digest) in &self.inputs {
            let _ = writeln!(s, "input {} sha256={digest}", path.display());
        }
        let _ = writeln!(s, "output {} sha256={}", output.display(), file_sha256(output)?);
        Ok(s)
    }

    fn finish(self) -> Result<()> {
        for out in &self.outputs {
            let mut side = out.as_os_str().to_owned();
            side.push(".provenance");
            let side = PathBuf::from(side);
            std::fs::write(&side, self.provenance(out)?).map_err(|e| Error::io(&side, e))?;
        }
        Ok(())
    }
}

fn required<'p>(path: &'p Option<PathBuf>, what: &str, key: &str) -> Result<&'p Path> {
    path.as_deref()
        .ok_or_else(|| Error::Config(format!("{what} path missing: set {key} or pass the flag")))
}

/// Initial condition and its description for the dataset provenance.
fn initial_condition(cfg: &ExperimentConfig) -> Result<(crate::nls::ComplexField, String)> {
    let init = &cfg.initial;
    let grid = init.grid()?;
    match init.kind {
        InitialKind::SeededPlaneWave => {
            let omega = mode_params(init.a)?.omega;
            let ic = seeded_plane_wave(init.seed_amplitude, omega, &grid)?;
            let desc = format!("ic=seeded_plane_wave;a={:?};a1={:?};omega={:?}", init.a, init.seed_amplitude, omega);
            Ok((ic, desc))
        }
        InitialKind::Akhmediev => {
            let ic = akhmediev_field(init.a, init.time, &grid)?;
            Ok((ic, format!("ic=akhmediev;a={:?};time={:?}", init.a, init.time)))
        }
        InitialKind::Jonswap => {
            let sea = nls_initial_condition(&cfg.sea.params, &grid, cfg.sea.seed)?;
            let p = &cfg.sea.params;
            let desc = format!(
                "ic=jonswap;hs={:?};tp={:?};gamma={:?};seed={};eps={:?};k_p={:?};omega_p={:?}",
                p.hs, p.tp, p.gamma_s, cfg.sea.seed, sea.scales.eps, sea.carrier_wavenumber, sea.scales.omega_p
            );
            Ok((sea.psi, desc))
        }
    }
}

fn simulate_cmd(run: &mut Run) -> Result<()> {
    let cfg = run.cfg;
    let output = required(&cfg.paths.output, "output", "paths.output")?.to_path_buf();
    let (ic, desc) = initial_condition(cfg)?;
    let t0 = match cfg.initial.kind {
        InitialKind::Akhmediev => cfg.initial.time,
        _ => 0.0,
    };
    let sim = SimulationConfig {
        dt: cfg.solver.dt,
        n_steps: cfg.solver.steps,
        sample_stride: cfg.solver.stride,
        method: cfg.solver.method,
        order: cfg.solver.order,
        dealias: cfg.solver.dealias,
        t0,
    };
    log::info!("integrating {} steps on {} nodes", sim.n_steps, ic.grid().len());
    let mut series = simulate(&ic, &sim)?;
    series.set_provenance(format!("{};{desc}", series.provenance()));
    write_dataset(&series, &output)?;
    run.wrote(&output);
    let peak = (0..series.len()).map(|j| series.max_envelope(j)).fold(0.0, f64::max);
    println!("wrote {} samples to {} (max |psi| = {peak:.6})", series.len(), output.display());
    Ok(())
}

/// Restrict a series to the configured training window.
fn training_window(series: FieldSeries, cfg: &ExperimentConfig, path: &Path) -> Result<FieldSeries> {
    let (start, end) = (cfg.train.t_start, cfg.train.t_end);
    if start.is_none() && end.is_none() {
        return Ok(series);
    }
    let locate = |t: f64| {
        series.index_of(t).ok_or_else(|| {
            Error::Config(format!(
                "training time {t} outside {} (spans [{}, {}])",
                path.display(),
                series.t0(),
                series.time(series.len().saturating_sub(1))
            ))
        })
    };
    let a = start.map(locate).transpose()?.unwrap_or(0);
    let b = end.map(locate).transpose()?.unwrap_or(series.len() - 1);
    series.slice(a..b + 1)
}

fn train_cmd(run: &mut Run) -> Result<()> {
    let cfg = run.cfg;
    if cfg.paths.train.is_empty() {
        return Err(Error::Config("no training datasets: set paths.train or pass --dataset".into()));
    }
    let model_path = required(&cfg.paths.model, "model", "paths.model")?.to_path_buf();
    let mut series = Vec::with_capacity(cfg.paths.train.len());
    for path in &cfg.paths.train {
        let s = run.read_dataset(path)?;
        series.push(training_window(s, cfg, path)?);
    }
    let width = 2 * series[0].grid().len();
    if let Some(bad) = series.iter().position(|s| s.grid() != series[0].grid()) {
        return Err(Error::Config(format!(
            "{} has a different grid from {}",
            cfg.paths.train[bad].display(),
            cfg.paths.train[0].display()
        )));
    }
    let partition = Partition::new(width, cfg.partition.reservoirs, cfg.partition.overlap)?;
    let model = EsnModel::train(&cfg.esn.hp, partition, &series, cfg.esn.readout)?;
    write_checkpoint(&model, &model_path)?;
    run.wrote(&model_path);
    println!(
        "trained {} reservoirs of {} nodes on {} series; model in {}",
        cfg.partition.reservoirs,
        cfg.esn.hp.d_s,
        series.len(),
        model_path.display()
    );
    Ok(())
}

fn forecast_options(cfg: &ExperimentConfig, series: &FieldSeries, model: &EsnModel) -> Result<ForecastOptions> {
    let f = &cfg.forecast;
    let start_index = match f.t0 {
        Some(t0) => series
            .index_of(t0)
            .ok_or_else(|| Error::Config(format!("forecast start {t0} is not a sample time of the dataset")))?,
        None => model.hyperparams().n_w + 1,
    };
    let available = series.len().saturating_sub(start_index);
    let steps = match (f.steps, f.mode) {
        (Some(n), _) => n,
        (None, _) => available.max(1),
    };
    let opts = ForecastOptions {
        mode: f.mode,
        start_index,
        steps,
        assimilation_interval: f.assimilate_every,
        normalize: f.normalize,
        epsilon: f.epsilon,
    };
    opts.validate()?;
    Ok(opts)
}

fn predict_cmd(run: &mut Run) -> Result<()> {
    let cfg = run.cfg;
    let output = required(&cfg.paths.output, "output", "paths.output")?.to_path_buf();
    let model = run.read_model(required(&cfg.paths.model, "model", "paths.model")?)?;
    let series = run.read_dataset(required(&cfg.paths.dataset, "dataset", "paths.dataset")?)?;
    let opts = forecast_options(cfg, &series, &model)?;
    let result = forecast(&model, &series, &opts)?;
    let out = run.create(&output)?;
    write_metrics_csv(&result, out)?;
    if let Some(path) = &cfg.paths.predicted {
        write_dataset(&result.predicted, path)?;
        run.wrote(path);
    }
    let h = result.horizon();
    let mut sorted = result.nrmse.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted.get(sorted.len() / 2).copied().unwrap_or(f64::NAN);
    println!(
        "{} run of {} steps from t={}: median NRMSE {:.4e}, horizon {} steps{}",
        opts.mode,
        opts.steps,
        series.time(opts.start_index),
        median,
        h.steps,
        if h.censored { " (censored)" } else { "" }
    );
    Ok(())
}

fn sweep_cmd(run: &mut Run) -> Result<()> {
    let cfg = run.cfg;
    let output = required(&cfg.paths.output, "output", "paths.output")?.to_path_buf();
    let model = run.read_model(required(&cfg.paths.model, "model", "paths.model")?)?;
    let series = run.read_dataset(required(&cfg.paths.dataset, "dataset", "paths.dataset")?)?;
    if series.len() <= model.hyperparams().n_w + 1 {
        return Err(Error::DataAvailability {
            step: model.hyperparams().n_w + 1,
            available: series.len(),
        });
    }
    let first = series.time(model.hyperparams().n_w + 1);
    let last = series.time(series.len() - 1);
    let start = cfg.sweep.t0_start.unwrap_or(first);
    let end = cfg.sweep.t0_end.unwrap_or(last);
    // snap onto sample times so every start is admissible
    let mut t0s = Vec::new();
    let mut t = start;
    while t <= end + 1e-9 * cfg.sweep.t0_step {
        let j = ((t - series.t0()) / series.dt_sample()).round() as usize;
        if j < series.len() && t0s.last() != Some(&series.time(j)) {
            t0s.push(series.time(j));
        }
        t += cfg.sweep.t0_step;
    }
    if t0s.is_empty() {
        return Err(Error::Config(format!("sweep range [{start}, {end}] contains no sample time")));
    }
    let opts = ForecastOptions {
        mode: ForecastMode::Autonomous,
        start_index: model.hyperparams().n_w + 1,
        steps: cfg.sweep.steps.unwrap_or(series.len()),
        assimilation_interval: cfg.forecast.assimilate_every,
        normalize: cfg.forecast.normalize,
        epsilon: cfg.forecast.epsilon,
    };
    let points = ph_sweep(&model, &series, &t0s, &opts)?;
    write_sweep_csv(&points, run.create(&output)?)?;
    println!("{} start times swept; results in {}", points.len(), output.display());
    Ok(())
}

fn lyapunov_cmd(run: &mut Run) -> Result<()> {
    let cfg = run.cfg;
    let output = required(&cfg.paths.output, "output", "paths.output")?.to_path_buf();
    let series = run.read_dataset(required(&cfg.paths.dataset, "dataset", "paths.dataset")?)?;
    let samples = stretching_series(&series, cfg.lyapunov.window, cfg.lyapunov.seed)?;
    let mut w = csv::Writer::from_writer(run.create(&output)?);
    let csv_err = |e: csv::Error| Error::Format(format!("csv: {e}"));
    w.write_record(["t", "chi", "max_env"]).map_err(csv_err)?;
    for s in &samples {
        w.write_record([format_float(s.t), format_float(s.chi), format_float(s.max_envelope)])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(&output, e))?;
    let mean = samples.iter().map(|s| s.chi).sum::<f64>() / samples.len().max(1) as f64;
    println!("{} windows, mean stretching {mean:.6}", samples.len());
    Ok(())
}

fn evaluate_cmd(run: &mut Run) -> Result<()> {
    let cfg = run.cfg;
    let series = run.read_dataset(required(&cfg.paths.dataset, "dataset", "paths.dataset")?)?;
    let truth = match &cfg.paths.truth {
        Some(p) => Some(run.read_dataset(p)?),
        None => None,
    };
    if let Some(truth) = &truth {
        if truth.grid() != series.grid() {
            return Err(Error::Config("dataset and truth are on different grids".into()));
        }
    }
    let errors: Vec<Option<f64>> = (0..series.len())
        .map(|j| {
            let Some(truth) = &truth else { return Ok(None) };
            match truth.index_of(series.time(j)) {
                Some(i) => crate::forecast::nrmse(series.frame(j), truth.frame(i)).map(Some),
                None => Ok(None),
            }
        })
        .collect::<Result<_>>()?;
    if let Some(output) = cfg.paths.output.clone() {
        let mut w = csv::Writer::from_writer(run.create(&output)?);
        let csv_err = |e: csv::Error| Error::Format(format!("csv: {e}"));
        w.write_record(["j", "t", "nrmse", "max_env", "ke", "pe", "ham"]).map_err(csv_err)?;
        for (j, e) in series_energies(&series).iter().enumerate() {
            w.write_record([
                j.to_string(),
                format_float(series.time(j)),
                errors[j].map_or(String::new(), format_float),
                format_float(series.max_envelope(j)),
                format_float(e.kinetic),
                format_float(e.potential),
                format_float(e.hamiltonian),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io(&output, e))?;
    }
    let matched: Vec<f64> = errors.iter().flatten().copied().collect();
    if truth.is_some() {
        if matched.is_empty() {
            return Err(Error::Config("dataset and truth share no sample times".into()));
        }
        let ph = crate::forecast::prediction_horizon(&matched, cfg.forecast.epsilon);
        let mean = matched.iter().sum::<f64>() / matched.len() as f64;
        println!(
            "{} matched frames, mean NRMSE {}, horizon {} steps{}",
            matched.len(),
            format_float(mean),
            ph.steps,
            if ph.censored { " (censored)" } else { "" }
        );
    }
    if cfg.validate.max_intensity {
        let (j, observed) = (0..series.len())
            .map(|j| (j, series.max_envelope(j)))
            .fold((0, 0.0), |best, c| if c.1 > best.1 { c } else { best });
        let expected = max_intensity_peak(&unstable_modes(cfg.validate.omega)?)?;
        let rel = (observed - expected).abs() / expected;
        println!(
            "peak |psi| = {observed:.6} at t={:.4}; maximal-intensity prediction {expected:.6} (relative difference {rel:.3e})",
            series.time(j)
        );
        if rel > cfg.validate.tolerance {
            return Err(Error::Domain(format!(
                "observed peak {observed:.6} differs from {expected:.6} by more than {}",
                cfg.validate.tolerance
            )));
        }
    }
    Ok(())
}
