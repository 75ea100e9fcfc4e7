//! Experiment configuration: a TOML file of `[section]` tables with flat
//! keys. Unknown sections and keys are rejected; every error names the key
//! and its line. Command-line overrides use the same keys as
//! `--section.key=value` and report line 0.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use toml::de::{DeTable, DeValue};

use crate::analytic::mode_params;
use crate::error::{Error, Result};
use crate::esn::{EsnHyperParams, NoiseScale, ReadoutMode};
use crate::forecast::{ForecastMode, DEFAULT_EPSILON};
use crate::lyapunov::DEFAULT_WINDOW;
use crate::nls::{Grid, Method, DEFAULT_TAYLOR_ORDER, MAX_TAYLOR_ORDER};
use crate::ocean::SeaStateParams;

/// Environment variable naming the directory searched for `rogue-rc.toml`
/// when no `--config` is given.
pub const CONFIG_DIR_ENV: &str = "ROGUE_RC_CONFIG_DIR";
pub const DEFAULT_CONFIG_NAME: &str = "rogue-rc.toml";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    SeededPlaneWave,
    Akhmediev,
    Jonswap,
}

impl InitialKind {
    fn name(self) -> &'static str {
        match self {
            InitialKind::SeededPlaneWave => "seeded_plane_wave",
            InitialKind::Akhmediev => "akhmediev",
            InitialKind::Jonswap => "jonswap",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSection {
    pub method: Method,
    pub dt: f64,
    pub steps: usize,
    pub stride: usize,
    pub order: usize,
    pub dealias: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialSection {
    pub kind: InitialKind,
    /// Modulation parameter; sets the fundamental wavenumber `Ω = 2√(1−2a)`.
    pub a: f64,
    /// Harmonic seed amplitude of the seeded plane wave.
    pub seed_amplitude: f64,
    pub nodes: usize,
    /// Domain length in breather periods `2π/Ω`.
    pub periods: usize,
    /// Breather evaluation time; also the time stamp of the first sample.
    pub time: f64,
    /// Explicit NLS domain length (overrides `periods`).
    pub length: Option<f64>,
}

impl InitialSection {
    pub fn grid(&self) -> Result<Grid> {
        match self.length {
            Some(length) => Grid::new(self.nodes, length),
            None => Grid::new(self.nodes, self.periods as f64 * 2.0 * PI / mode_params(self.a)?.omega),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeaSection {
    pub params: SeaStateParams,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EsnSection {
    pub hp: EsnHyperParams,
    pub readout: ReadoutMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionSection {
    pub reservoirs: usize,
    pub overlap: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainSection {
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastSection {
    pub mode: ForecastMode,
    /// First predicted time; defaults to the first sample after the washout.
    pub t0: Option<f64>,
    /// Defaults to the rest of the series.
    pub steps: Option<usize>,
    pub assimilate_every: Option<usize>,
    pub normalize: bool,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSection {
    pub t0_start: Option<f64>,
    pub t0_end: Option<f64>,
    pub t0_step: f64,
    /// Longest run per start time.
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovSection {
    pub window: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateSection {
    /// Compare the observed peak of `evaluate`'s dataset with the maximal-intensity formula.
    pub max_intensity: bool,
    pub omega: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathsSection {
    pub dataset: Option<PathBuf>,
    pub train: Vec<PathBuf>,
    pub model: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub predicted: Option<PathBuf>,
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub solver: SolverSection,
    pub initial: InitialSection,
    pub sea: SeaSection,
    pub esn: EsnSection,
    pub partition: PartitionSection,
    pub train: TrainSection,
    pub forecast: ForecastSection,
    pub sweep: SweepSection,
    pub lyapunov: LyapunovSection,
    pub validate: ValidateSection,
    pub paths: PathsSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            solver: SolverSection {
                method: Method::Taylor,
                dt: 2e-4,
                steps: 100_000,
                stride: 25,
                order: DEFAULT_TAYLOR_ORDER,
                dealias: false,
            },
            initial: InitialSection {
                kind: InitialKind::SeededPlaneWave,
                a: 0.4802,
                seed_amplitude: 1e-4,
                nodes: 256,
                periods: 1,
                time: 0.0,
                length: None,
            },
            sea: SeaSection {
                params: SeaStateParams::default(),
                seed: 0,
            },
            esn: EsnSection {
                hp: EsnHyperParams::default(),
                readout: ReadoutMode::Shared,
            },
            partition: PartitionSection {
                reservoirs: 64,
                overlap: 4,
            },
            train: TrainSection::default(),
            forecast: ForecastSection {
                mode: ForecastMode::TeacherForced,
                t0: None,
                steps: None,
                assimilate_every: None,
                normalize: false,
                epsilon: DEFAULT_EPSILON,
            },
            sweep: SweepSection {
                t0_start: None,
                t0_end: None,
                t0_step: 0.25,
                steps: None,
            },
            lyapunov: LyapunovSection {
                window: DEFAULT_WINDOW,
                seed: 0,
            },
            validate: ValidateSection {
                max_intensity: false,
                omega: 0.39799,
                tolerance: 0.05,
            },
            paths: PathsSection::default(),
        }
    }
}

/// A value from the file (typed TOML) or from the command line (text).
#[derive(Clone, Copy)]
pub enum Raw<'a> {
    Toml(&'a DeValue<'a>),
    Text(&'a str),
}

type Check<T> = std::result::Result<T, String>;

impl Raw<'_> {
    fn describe(&self) -> &'static str {
        match self {
            Raw::Toml(DeValue::String(_)) => "a string",
            Raw::Toml(DeValue::Integer(_)) => "an integer",
            Raw::Toml(DeValue::Float(_)) => "a float",
            Raw::Toml(DeValue::Boolean(_)) => "a boolean",
            Raw::Toml(DeValue::Datetime(_)) => "a datetime",
            Raw::Toml(DeValue::Array(_)) => "an array",
            Raw::Toml(DeValue::Table(_)) => "a table",
            Raw::Text(_) => "text",
        }
    }

    fn string(&self) -> Check<String> {
        match self {
            Raw::Toml(DeValue::String(s)) => Ok(s.to_string()),
            Raw::Text(s) => Ok(s.to_string()),
            other => Err(format!("expected a string, found {}", other.describe())),
        }
    }

    fn float(&self) -> Check<f64> {
        let parsed = match self {
            Raw::Toml(DeValue::Float(f)) => f.as_str().replace('_', "").parse::<f64>().ok(),
            Raw::Toml(DeValue::Integer(_)) => self.int().ok().map(|i| i as f64),
            Raw::Text(s) => s.trim().parse::<f64>().ok(),
            other => return Err(format!("expected a number, found {}", other.describe())),
        };
        match parsed {
            Some(v) if v.is_finite() => Ok(v),
            _ => Err("expected a finite number".into()),
        }
    }

    fn int(&self) -> Check<i64> {
        match self {
            Raw::Toml(DeValue::Integer(i)) => i64::from_str_radix(&i.as_str().replace('_', ""), i.radix())
                .map_err(|e| format!("bad integer: {e}")),
            Raw::Text(s) => s.trim().parse::<i64>().map_err(|_| format!("expected an integer, found `{s}`")),
            other => Err(format!("expected an integer, found {}", other.describe())),
        }
    }

    fn count(&self) -> Check<usize> {
        usize::try_from(self.int()?).map_err(|_| "expected a non-negative integer".to_string())
    }

    fn seed(&self) -> Check<u64> {
        u64::try_from(self.int()?).map_err(|_| "seeds are non-negative integers".to_string())
    }

    fn boolean(&self) -> Check<bool> {
        match self {
            Raw::Toml(DeValue::Boolean(b)) => Ok(*b),
            Raw::Text(s) => match s.trim() {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                other => Err(format!("expected true or false, found `{other}`")),
            },
            other => Err(format!("expected a boolean, found {}", other.describe())),
        }
    }

    fn is_none(&self) -> bool {
        matches!(self, Raw::Text(s) if s.trim() == "none") || matches!(self, Raw::Toml(DeValue::String(s)) if s == "none")
    }

    fn paths(&self) -> Check<Vec<PathBuf>> {
        match self {
            Raw::Toml(DeValue::Array(items)) => items
                .iter()
                .map(|v| Raw::Toml(v.get_ref()).string().map(PathBuf::from))
                .collect(),
            Raw::Toml(DeValue::String(s)) => Ok(vec![PathBuf::from(s.as_ref())]),
            Raw::Text(s) => Ok(s.split(',').filter(|p| !p.is_empty()).map(PathBuf::from).collect()),
            other => Err(format!("expected a path list, found {}", other.describe())),
        }
    }
}

fn positive(v: f64) -> Check<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

fn non_negative(v: f64) -> Check<f64> {
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("must be non-negative, got {v}"))
    }
}

fn at_least(v: usize, min: usize) -> Check<usize> {
    if v >= min {
        Ok(v)
    } else {
        Err(format!("must be at least {min}, got {v}"))
    }
}

fn optional<T>(raw: Raw, f: impl FnOnce(Raw) -> Check<T>) -> Check<Option<T>> {
    if raw.is_none() {
        Ok(None)
    } else {
        f(raw).map(Some)
    }
}

impl ExperimentConfig {
    /// Set one key. The error string is the complaint about the value.
    pub fn apply(&mut self, section: &str, key: &str, raw: Raw) -> Check<()> {
        match (section, key) {
            ("solver", "method") => self.solver.method = raw.string()?.parse().map_err(|e: Error| e.to_string())?,
            ("solver", "dt") => self.solver.dt = positive(raw.float()?)?,
            ("solver", "steps") => self.solver.steps = raw.count()?,
            ("solver", "stride") => self.solver.stride = at_least(raw.count()?, 1)?,
            ("solver", "order") => {
                let order = raw.count()?;
                if !(1..=MAX_TAYLOR_ORDER).contains(&order) {
                    return Err(format!("must lie in [1, {MAX_TAYLOR_ORDER}], got {order}"));
                }
                self.solver.order = order;
            }
            ("solver", "dealias") => self.solver.dealias = raw.boolean()?,

            ("initial", "kind") => {
                self.initial.kind = match raw.string()?.as_str() {
                    "seeded_plane_wave" => InitialKind::SeededPlaneWave,
                    "akhmediev" => InitialKind::Akhmediev,
                    "jonswap" => InitialKind::Jonswap,
                    other => {
                        return Err(format!(
                            "unknown kind `{other}` (expected seeded_plane_wave, akhmediev or jonswap)"
                        ))
                    }
                }
            }
            ("initial", "a") => {
                let a = raw.float()?;
                if !(a > 0.0 && a < 0.5) {
                    return Err(format!("must lie in (0, 0.5), got {a}"));
                }
                self.initial.a = a;
            }
            ("initial", "seed_amplitude") => self.initial.seed_amplitude = non_negative(raw.float()?)?,
            ("initial", "nodes") => self.initial.nodes = at_least(raw.count()?, 2)?,
            ("initial", "periods") => self.initial.periods = at_least(raw.count()?, 1)?,
            ("initial", "time") => self.initial.time = raw.float()?,
            ("initial", "length") => self.initial.length = optional(raw, |r| positive(r.float()?))?,

            ("sea", "hs") => self.sea.params.hs = positive(raw.float()?)?,
            ("sea", "tp") => self.sea.params.tp = positive(raw.float()?)?,
            ("sea", "gamma") => {
                let g = raw.float()?;
                if g < 1.0 {
                    return Err(format!("must be at least 1, got {g}"));
                }
                self.sea.params.gamma_s = g;
            }
            ("sea", "g") => self.sea.params.g = positive(raw.float()?)?,
            ("sea", "seed") => self.sea.seed = raw.seed()?,

            ("esn", "d_s") => self.esn.hp.d_s = at_least(raw.count()?, 1)?,
            ("esn", "degree") => self.esn.hp.degree = at_least(raw.count()?, 1)?,
            ("esn", "rho") => self.esn.hp.rho = positive(raw.float()?)?,
            ("esn", "alpha") => self.esn.hp.alpha = positive(raw.float()?)?,
            ("esn", "beta") => self.esn.hp.beta = non_negative(raw.float()?)?,
            ("esn", "n_w") => self.esn.hp.n_w = raw.count()?,
            ("esn", "noise_var") => self.esn.hp.noise_var = non_negative(raw.float()?)?,
            ("esn", "noise_scale") => {
                self.esn.hp.noise_scale = match raw.string()?.as_str() {
                    "variance" => NoiseScale::Variance,
                    "std" => NoiseScale::StdDev,
                    other => return Err(format!("unknown noise scale `{other}` (expected variance or std)")),
                }
            }
            ("esn", "input_degree") => self.esn.hp.input_degree = at_least(raw.count()?, 1)?,
            ("esn", "seed") => self.esn.hp.seed = raw.seed()?,
            ("esn", "readout") => self.esn.readout = raw.string()?.parse().map_err(|e: Error| e.to_string())?,

            ("partition", "reservoirs") => self.partition.reservoirs = at_least(raw.count()?, 1)?,
            ("partition", "overlap") => {
                let l = raw.count()?;
                if l % 2 != 0 {
                    return Err(format!("must be even, got {l}"));
                }
                self.partition.overlap = l;
            }

            ("train", "t_start") => self.train.t_start = optional(raw, |r| r.float())?,
            ("train", "t_end") => self.train.t_end = optional(raw, |r| r.float())?,

            ("forecast", "mode") => self.forecast.mode = raw.string()?.parse().map_err(|e: Error| e.to_string())?,
            ("forecast", "t0") => self.forecast.t0 = optional(raw, |r| r.float())?,
            ("forecast", "steps") => self.forecast.steps = optional(raw, |r| at_least(r.count()?, 1))?,
            ("forecast", "assimilate_every") => {
                // 0 switches assimilation off
                self.forecast.assimilate_every = optional(raw, |r| r.count())?.filter(|&n| n > 0)
            }
            ("forecast", "normalize") => self.forecast.normalize = raw.boolean()?,
            ("forecast", "epsilon") => self.forecast.epsilon = positive(raw.float()?)?,

            ("sweep", "t0_start") => self.sweep.t0_start = optional(raw, |r| r.float())?,
            ("sweep", "t0_end") => self.sweep.t0_end = optional(raw, |r| r.float())?,
            ("sweep", "t0_step") => self.sweep.t0_step = positive(raw.float()?)?,
            ("sweep", "steps") => self.sweep.steps = optional(raw, |r| at_least(r.count()?, 1))?,

            ("lyapunov", "window") => self.lyapunov.window = positive(raw.float()?)?,
            ("lyapunov", "seed") => self.lyapunov.seed = raw.seed()?,

            ("validate", "max_intensity") => self.validate.max_intensity = raw.boolean()?,
            ("validate", "omega") => {
                let w = raw.float()?;
                if !(w > 0.0 && w < 2.0) {
                    return Err(format!("must lie in (0, 2), got {w}"));
                }
                self.validate.omega = w;
            }
            ("validate", "tolerance") => self.validate.tolerance = positive(raw.float()?)?,

            ("paths", "dataset") => self.paths.dataset = optional(raw, |r| r.string().map(PathBuf::from))?,
            ("paths", "train") => self.paths.train = raw.paths()?,
            ("paths", "model") => self.paths.model = optional(raw, |r| r.string().map(PathBuf::from))?,
            ("paths", "output") => self.paths.output = optional(raw, |r| r.string().map(PathBuf::from))?,
            ("paths", "predicted") => self.paths.predicted = optional(raw, |r| r.string().map(PathBuf::from))?,
            ("paths", "truth") => self.paths.truth = optional(raw, |r| r.string().map(PathBuf::from))?,

            _ => return Err(format!("unknown key `{section}.{key}`")),
        }
        Ok(())
    }

    /// Checks that involve more than one key; returns the key to blame.
    fn cross_check(&self) -> std::result::Result<(), (&'static str, String)> {
        if self.esn.hp.degree > self.esn.hp.d_s {
            return Err((
                "esn.degree",
                format!("degree {} exceeds d_s {}", self.esn.hp.degree, self.esn.hp.d_s),
            ));
        }
        if self.solver.steps < self.solver.stride && self.solver.steps > 0 {
            return Err((
                "solver.steps",
                format!("{} steps is shorter than one stride of {}", self.solver.steps, self.solver.stride),
            ));
        }
        if let (Some(a), Some(b)) = (self.train.t_start, self.train.t_end) {
            if b <= a {
                return Err(("train.t_end", format!("window end {b} is not after start {a}")));
            }
        }
        let mut seen: Vec<(&'static str, &Path)> = Vec::new();
        let p = &self.paths;
        let named = [
            ("paths.dataset", p.dataset.as_deref()),
            ("paths.model", p.model.as_deref()),
            ("paths.output", p.output.as_deref()),
            ("paths.predicted", p.predicted.as_deref()),
            ("paths.truth", p.truth.as_deref()),
        ];
        let all = named
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k, v)))
            .chain(p.train.iter().map(|t| ("paths.train", t.as_path())));
        for (key, path) in all {
            if let Some((other, _)) = seen.iter().find(|(_, q)| *q == path) {
                // several training datasets may legitimately equal the evaluation dataset
                if !(key == "paths.train" && *other == "paths.dataset") {
                    return Err((key, format!("`{}` is also used as {other}", path.display())));
                }
            }
            seen.push((key, path));
        }
        Ok(())
    }

    /// Apply `section.key=value` overrides in order, then re-run the
    /// cross-key checks.
    pub fn apply_overrides(&mut self, overrides: &[(String, String)]) -> Result<()> {
        for (name, value) in overrides {
            let (section, key) = name.split_once('.').ok_or_else(|| Error::Parse {
                line: 0,
                key: name.clone(),
                message: "override keys take the form section.key".into(),
            })?;
            self.apply(section, key, Raw::Text(value)).map_err(|message| Error::Parse {
                line: 0,
                key: name.clone(),
                message,
            })?;
        }
        self.cross_check().map_err(|(key, message)| Error::Parse {
            line: 0,
            key: key.into(),
            message,
        })
    }

    /// Canonical TOML rendering of every key; parsing it back reproduces
    /// the configuration. Its hash identifies a run.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let opt_f = |v: Option<f64>| v.map_or("\"none\"".to_string(), |v| format!("{v:?}"));
        let opt_u = |v: Option<usize>| v.map_or("\"none\"".to_string(), |v| v.to_string());
        let opt_p = |v: &Option<PathBuf>| v.as_ref().map_or("\"none\"".to_string(), |p| format!("{:?}", p.display().to_string()));
        let c = self;
        let _ = write!(
            s,
            "[solver]\nmethod = \"{}\"\ndt = {:?}\nsteps = {}\nstride = {}\norder = {}\ndealias = {}\n\n",
            c.solver.method, c.solver.dt, c.solver.steps, c.solver.stride, c.solver.order, c.solver.dealias
        );
        let _ = write!(
            s,
            "[initial]\nkind = \"{}\"\na = {:?}\nseed_amplitude = {:?}\nnodes = {}\nperiods = {}\ntime = {:?}\nlength = {}\n\n",
            c.initial.kind.name(),
            c.initial.a,
            c.initial.seed_amplitude,
            c.initial.nodes,
            c.initial.periods,
            c.initial.time,
            opt_f(c.initial.length)
        );
        let sp = &c.sea.params;
        let _ = write!(
            s,
            "[sea]\nhs = {:?}\ntp = {:?}\ngamma = {:?}\ng = {:?}\nseed = {}\n\n",
            sp.hs, sp.tp, sp.gamma_s, sp.g, c.sea.seed
        );
        let hp = &c.esn.hp;
        let _ = write!(
            s,
            "[esn]\nd_s = {}\ndegree = {}\nrho = {:?}\nalpha = {:?}\nbeta = {:?}\nn_w = {}\nnoise_var = {:?}\n\
             noise_scale = \"{}\"\ninput_degree = {}\nseed = {}\nreadout = \"{}\"\n\n",
            hp.d_s,
            hp.degree,
            hp.rho,
            hp.alpha,
            hp.beta,
            hp.n_w,
            hp.noise_var,
            match hp.noise_scale {
                NoiseScale::Variance => "variance",
                NoiseScale::StdDev => "std",
            },
            hp.input_degree,
            hp.seed,
            c.esn.readout
        );
        let _ = write!(
            s,
            "[partition]\nreservoirs = {}\noverlap = {}\n\n",
            c.partition.reservoirs, c.partition.overlap
        );
        let _ = write!(
            s,
            "[train]\nt_start = {}\nt_end = {}\n\n",
            opt_f(c.train.t_start),
            opt_f(c.train.t_end)
        );
        let f = &c.forecast;
        let _ = write!(
            s,
            "[forecast]\nmode = \"{}\"\nt0 = {}\nsteps = {}\nassimilate_every = {}\nnormalize = {}\nepsilon = {:?}\n\n",
            f.mode,
            opt_f(f.t0),
            opt_u(f.steps),
            f.assimilate_every.unwrap_or(0),
            f.normalize,
            f.epsilon
        );
        let _ = write!(
            s,
            "[sweep]\nt0_start = {}\nt0_end = {}\nt0_step = {:?}\nsteps = {}\n\n",
            opt_f(c.sweep.t0_start),
            opt_f(c.sweep.t0_end),
            c.sweep.t0_step,
            opt_u(c.sweep.steps)
        );
        let _ = write!(
            s,
            "[lyapunov]\nwindow = {:?}\nseed = {}\n\n",
            c.lyapunov.window, c.lyapunov.seed
        );
        let _ = write!(
            s,
            "[validate]\nmax_intensity = {}\nomega = {:?}\ntolerance = {:?}\n\n",
            c.validate.max_intensity, c.validate.omega, c.validate.tolerance
        );
        let train: Vec<String> = c.paths.train.iter().map(|p| format!("{:?}", p.display().to_string())).collect();
        let _ = write!(
            s,
            "[paths]\ndataset = {}\ntrain = [{}]\nmodel = {}\noutput = {}\npredicted = {}\ntruth = {}\n",
            opt_p(&c.paths.dataset),
            train.join(", "),
            opt_p(&c.paths.model),
            opt_p(&c.paths.output),
            opt_p(&c.paths.predicted),
            opt_p(&c.paths.truth)
        );
        s
    }
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].bytes().filter(|b| *b == b'\n').count() + 1
}

/// Parse configuration text. Keys not given keep their defaults.
pub fn parse_config_str(src: &str) -> Result<ExperimentConfig> {
    let table = DeTable::parse(src).map_err(|e| Error::Parse {
        line: e.span().map_or(0, |s| line_of(src, s.start)),
        key: String::new(),
        message: e.message().to_string(),
    })?;
    let mut cfg = ExperimentConfig::default();
    let mut lines: HashMap<String, usize> = HashMap::new();
    for (section, body) in table.get_ref().iter() {
        let section_line = line_of(src, section.span().start);
        let DeValue::Table(entries) = body.get_ref() else {
            return Err(Error::Parse {
                line: section_line,
                key: section.get_ref().to_string(),
                message: "top-level keys must sit inside a [section]".into(),
            });
        };
        for (key, value) in entries.iter() {
            let name = format!("{}.{}", section.get_ref(), key.get_ref());
            let line = line_of(src, key.span().start);
            cfg.apply(section.get_ref(), key.get_ref(), Raw::Toml(value.get_ref()))
                .map_err(|message| Error::Parse {
                    line,
                    key: name.clone(),
                    message,
                })?;
            lines.insert(name, line);
        }
    }
    cfg.cross_check().map_err(|(key, message)| Error::Parse {
        line: lines.get(key).copied().unwrap_or(0),
        key: key.into(),
        message,
    })?;
    Ok(cfg)
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&src)
}
