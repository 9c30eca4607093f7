//! Repeated-trial harness comparing plain ANFIS with optimizer-tuned model
//! structures.
//!
//! Run `r` of every method uses seed `base + r` and therefore the same
//! train/test split, so methods are compared on paired data. Inside a run the
//! train partition is split again into a fit part and a validation part; the
//! optimizers minimize validation RMSE of models trained on the fit part. The
//! chosen structure is then retrained on the whole train partition and scored
//! on train and test.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::anfis::{self, TrainConfig, TrainMode};
use crate::anpso::{self, MetaConfig, MetaTrace};
use crate::baselines::{self, BaselineConfig, DeParams, GaParams, HsParams};
use crate::data::{self, DataError, Dataset, SplitSpec};
use crate::fis::FisModel;
use crate::metrics;
use crate::pso::{self, ControlParams, SwarmConfig};
use crate::sampling::derive_seed;
use crate::tuner::{self, FisGenome, Fitness, TunerError};
use crate::OptimResult;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("run failed: {0}")]
    Run(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "ANFIS")]
    Anfis,
    #[serde(rename = "PSO-ANFIS")]
    PsoAnfis,
    #[serde(rename = "DE-ANFIS")]
    DeAnfis,
    #[serde(rename = "GA-ANFIS")]
    GaAnfis,
    #[serde(rename = "HS-ANFIS")]
    HsAnfis,
    #[serde(rename = "ANPSO-ANFIS")]
    AnpsoAnfis,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Anfis,
        Method::PsoAnfis,
        Method::DeAnfis,
        Method::GaAnfis,
        Method::HsAnfis,
        Method::AnpsoAnfis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Anfis => "ANFIS",
            Method::PsoAnfis => "PSO-ANFIS",
            Method::DeAnfis => "DE-ANFIS",
            Method::GaAnfis => "GA-ANFIS",
            Method::HsAnfis => "HS-ANFIS",
            Method::AnpsoAnfis => "ANPSO-ANFIS",
        }
    }

    /// Accepts the table names and short forms such as `anpso` or `de`.
    pub fn parse(s: &str) -> Option<Method> {
        let key = s.to_ascii_lowercase();
        let key = key.strip_suffix("-anfis").unwrap_or(&key);
        Some(match key {
            "anfis" => Method::Anfis,
            "pso" => Method::PsoAnfis,
            "de" => Method::DeAnfis,
            "ga" => Method::GaAnfis,
            "hs" => Method::HsAnfis,
            "anpso" => Method::AnpsoAnfis,
            _ => return None,
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// ANFIS training used inside the search (`search_epochs`) and for the final
/// model (`epochs`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnfisSettings {
    pub epochs: usize,
    pub search_epochs: usize,
    pub learning_rate: f64,
    pub clip_norm: f64,
    pub mode: TrainMode,
}

impl Default for AnfisSettings {
    fn default() -> Self {
        AnfisSettings {
            epochs: 100,
            search_epochs: 10,
            learning_rate: 0.01,
            clip_norm: 1.0,
            mode: TrainMode::Hybrid,
        }
    }
}

impl AnfisSettings {
    fn train_config(&self, epochs: usize, seed: u64) -> TrainConfig {
        TrainConfig {
            epochs,
            learning_rate: self.learning_rate,
            mode: self.mode,
            seed,
            clip_norm: self.clip_norm,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SwarmSettings {
    pub particles: usize,
    pub params: ControlParams,
    /// Velocity limit as a fraction of each gene's range.
    pub v_max_fraction: f64,
}

impl Default for SwarmSettings {
    fn default() -> Self {
        SwarmSettings {
            particles: 30,
            params: ControlParams::default(),
            v_max_fraction: 0.2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineSettings {
    pub population: usize,
    pub ga: GaParams,
    pub de: DeParams,
    pub hs: HsParams,
}

impl Default for BaselineSettings {
    fn default() -> Self {
        BaselineSettings {
            population: 20,
            ga: GaParams::default(),
            de: DeParams::default(),
            hs: HsParams::default(),
        }
    }
}

/// Everything a single tuning run needs besides its data and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MethodSettings {
    /// Objective evaluations for the structure search. Meta-level probe
    /// evaluations of the adaptive swarm are counted separately.
    pub max_evals: usize,
    /// Share of the train partition held out to score candidate structures.
    pub validation_fraction: f64,
    pub anfis: AnfisSettings,
    pub swarm: SwarmSettings,
    /// The `seed` field is ignored; each run derives its own.
    pub meta: MetaConfig,
    pub baselines: BaselineSettings,
}

impl Default for MethodSettings {
    fn default() -> Self {
        MethodSettings {
            max_evals: 3000,
            validation_fraction: 0.3,
            anfis: AnfisSettings::default(),
            swarm: SwarmSettings::default(),
            meta: MetaConfig::default(),
            baselines: BaselineSettings::default(),
        }
    }
}

impl MethodSettings {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::Config(m.to_string()));
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return bad("validation_fraction must lie in (0, 1)");
        }
        if self.anfis.epochs == 0 || self.anfis.search_epochs == 0 {
            return bad("epoch counts must be at least 1");
        }
        if self.swarm.particles == 0 {
            return bad("swarm needs at least one particle");
        }
        if self.max_evals < 2 * self.swarm.particles.max(self.baselines.population) {
            return bad("max_evals must cover at least two swarm or population generations");
        }
        self.meta.validate().map_err(|e| ExperimentError::Config(e.to_string()))?;
        Ok(())
    }

    /// Swarm iterations affordable under `max_evals` after initialization.
    pub fn swarm_iterations(&self) -> usize {
        (self.max_evals / self.swarm.particles).saturating_sub(1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    pub methods: Vec<Method>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub settings: MethodSettings,
}

fn default_train_fraction() -> f64 {
    0.7
}

fn default_runs() -> usize {
    30
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

impl ExperimentConfig {
    pub fn new(dataset: impl Into<PathBuf>, methods: Vec<Method>) -> Self {
        ExperimentConfig {
            dataset: dataset.into(),
            train_fraction: default_train_fraction(),
            methods,
            runs: default_runs(),
            seed: 0,
            output_dir: default_output(),
            settings: MethodSettings::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.runs == 0 {
            return Err(ExperimentError::Config("runs must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(ExperimentError::Config("methods must not be empty".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(ExperimentError::Config("train_fraction must lie in (0, 1)".into()));
        }
        self.settings.validate()
    }

    pub fn run_seed(&self, run: usize) -> u64 {
        self.seed.wrapping_add(run as u64)
    }
}

/// Reads a comma-separated table (target in the last column) and min-max
/// normalizes its features.
pub fn load_dataset(path: &Path) -> Result<Dataset, ExperimentError> {
    let raw = fs::read_to_string(path).map_err(|source| ExperimentError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let ds = data::parse_last_column_target(&raw)?;
    if ds.n_features() > tuner::MAX_INPUTS {
        return Err(ExperimentError::Config(format!(
            "dataset has {} features; at most {} are supported",
            ds.n_features(),
            tuner::MAX_INPUTS
        )));
    }
    Ok(data::normalize(&ds))
}

/// Stream labels for the seeds derived from a run seed.
const FIT_SPLIT_STREAM: u64 = 1;
const TRAIN_STREAM: u64 = 2;
const SEARCH_STREAM: u64 = 3;
const META_STREAM: u64 = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub train_rmse: f64,
    pub test_rmse: f64,
    pub train_r: f64,
    pub test_r: f64,
}

impl Scores {
    pub fn of(model: &FisModel, train: &Dataset, test: &Dataset) -> Scores {
        let r = |ds: &Dataset| {
            metrics::r_value(&model.predict(&ds.features), &ds.targets).map_or(0.0, |r| r.value)
        };
        Scores {
            train_rmse: anfis::evaluate_rmse(model, train),
            test_rmse: anfis::evaluate_rmse(model, test),
            train_r: r(train),
            test_r: r(test),
        }
    }
}

/// Result of tuning and training one model.
#[derive(Clone, Debug)]
pub struct TuneOutcome {
    pub method: Method,
    pub genome: FisGenome,
    pub model: FisModel,
    pub summary: String,
    /// Best validation RMSE found by the search; `None` for plain ANFIS.
    pub search_value: Option<f64>,
    /// Optimizer trace (`iteration,best_value`), or the training trace
    /// (`epoch,train_rmse`) for plain ANFIS.
    pub trace_csv: String,
    pub meta: Option<MetaTrace>,
    pub evaluations: usize,
    pub train_epochs: usize,
    pub diverged: bool,
}

/// Tunes (unless `method` is plain ANFIS) and trains a model on `train`.
/// All randomness comes from `seed`.
pub fn tune(method: Method, train: &Dataset, settings: &MethodSettings, seed: u64) -> Result<TuneOutcome, ExperimentError> {
    settings.validate()?;
    let run_err = |e: &dyn std::fmt::Display| ExperimentError::Run(e.to_string());
    let default = tuner::default_genome();
    let train_seed = derive_seed(seed, TRAIN_STREAM);

    let (genome, search_value, search_trace, meta, evaluations) = if method == Method::Anfis {
        (default, None, None, None, 0)
    } else {
        let (fit_idx, val_idx) = data::split_indices(
            train.n_samples(),
            &SplitSpec {
                train_fraction: 1.0 - settings.validation_fraction,
                seed: derive_seed(seed, FIT_SPLIT_STREAM),
            },
        )?;
        let (fit, val) = (train.subset(&fit_idx), train.subset(&val_idx));
        let fitness = Fitness::new(&fit, &val, settings.anfis.train_config(settings.anfis.search_epochs, train_seed));
        let objective = |g: &[f64]| fitness.objective(g);
        let (result, meta) = search(method, settings, seed, default.0.clone(), &objective).map_err(|e| run_err(&e))?;
        let genome = FisGenome::new(result.best.clone()).map_err(|e| run_err(&e))?;
        (genome, Some(result.value), Some(result.trace_csv()), meta, result.evaluations)
    };

    let model = tuner::decode(&genome, train.n_features()).map_err(|e| run_err(&e))?;
    let trained = anfis::train(&model, train, &settings.anfis.train_config(settings.anfis.epochs, train_seed))
        .map_err(|e| run_err(&e))?;
    Ok(TuneOutcome {
        method,
        summary: tuner::summarize(&trained.model),
        genome,
        search_value,
        trace_csv: search_trace.unwrap_or_else(|| trained.to_csv()),
        meta,
        evaluations,
        train_epochs: trained.rmse.len(),
        diverged: trained.diverged,
        model: trained.model,
    })
}

#[derive(Debug, Error)]
enum SearchError {
    #[error(transparent)]
    Swarm(#[from] pso::PsoError),
    #[error(transparent)]
    Adaptive(#[from] anpso::AnpsoError),
    #[error(transparent)]
    Baseline(#[from] baselines::BaselineError),
    #[error(transparent)]
    Tuner(#[from] TunerError),
}

fn search<F>(
    method: Method,
    settings: &MethodSettings,
    seed: u64,
    start: Vec<f64>,
    objective: &F,
) -> Result<(OptimResult, Option<MetaTrace>), SearchError>
where
    F: Fn(&[f64]) -> f64,
{
    let bounds = FisGenome::bounds();
    let search_seed = derive_seed(seed, SEARCH_STREAM);
    let swarm = || SwarmConfig {
        n_particles: settings.swarm.particles,
        params: settings.swarm.params,
        v_max: bounds.iter().map(|(lo, hi)| settings.swarm.v_max_fraction * (hi - lo)).collect(),
        bounds: bounds.clone(),
        max_iters: settings.swarm_iterations(),
        seed: search_seed,
        initial_points: vec![start.clone()],
    };
    let baseline = |m: baselines::Method| BaselineConfig {
        method: m,
        population: settings.baselines.population,
        max_evals: settings.max_evals,
        bounds: bounds.clone(),
        seed: search_seed,
        ga: settings.baselines.ga,
        de: settings.baselines.de,
        hs: settings.baselines.hs,
        initial_points: vec![start.clone()],
    };
    Ok(match method {
        Method::Anfis => unreachable!("plain ANFIS does not search"),
        Method::PsoAnfis => (pso::optimize(&swarm(), objective)?, None),
        Method::AnpsoAnfis => {
            let meta = MetaConfig {
                seed: derive_seed(seed, META_STREAM),
                ..settings.meta.clone()
            };
            let out = anpso::optimize_adaptive(&swarm(), &meta, objective)?;
            (out.result, Some(out.meta))
        }
        Method::DeAnfis => (baselines::optimize(&baseline(baselines::Method::De), objective)?, None),
        Method::GaAnfis => (baselines::optimize(&baseline(baselines::Method::Ga), objective)?, None),
        Method::HsAnfis => (baselines::optimize(&baseline(baselines::Method::Hs), objective)?, None),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: Method,
    pub run: usize,
    pub seed: u64,
    /// Failure message; failed runs carry no scores and are left out of the
    /// statistics.
    pub error: Option<String>,
    pub scores: Option<Scores>,
    pub search_value: Option<f64>,
    pub evaluations: usize,
    pub meta_evaluations: usize,
    pub summary: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub max: f64,
    pub min: f64,
    pub average: f64,
}

impl Summary {
    /// `None` for an empty slice.
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let average = (values.iter().sum::<f64>() / values.len() as f64).clamp(min, max);
        Some(Summary { max, min, average })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionStats {
    pub rmse: Summary,
    pub r: Summary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodStats {
    pub method: Method,
    pub runs: usize,
    pub failed: usize,
    /// `None` when every run failed.
    pub train: Option<PartitionStats>,
    pub test: Option<PartitionStats>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub methods: Vec<MethodStats>,
}

impl TrialStats {
    pub fn from_records(methods: &[Method], records: &[RunRecord]) -> TrialStats {
        let methods = methods
            .iter()
            .map(|&m| {
                let mine: Vec<&RunRecord> = records.iter().filter(|r| r.method == m).collect();
                let ok: Vec<&Scores> = mine.iter().filter_map(|r| r.scores.as_ref()).collect();
                let part = |rmse: fn(&Scores) -> f64, r: fn(&Scores) -> f64| {
                    let a: Vec<f64> = ok.iter().map(|s| rmse(s)).collect();
                    let b: Vec<f64> = ok.iter().map(|s| r(s)).collect();
                    Some(PartitionStats {
                        rmse: Summary::of(&a)?,
                        r: Summary::of(&b)?,
                    })
                };
                MethodStats {
                    method: m,
                    runs: ok.len(),
                    failed: mine.len() - ok.len(),
                    train: part(|s| s.train_rmse, |s| s.train_r),
                    test: part(|s| s.test_rmse, |s| s.test_r),
                }
            })
            .collect();
        TrialStats { methods }
    }

    pub fn get(&self, method: Method) -> Option<&MethodStats> {
        self.methods.iter().find(|m| m.method == method)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,partition,runs,failed,rmse_max,rmse_min,rmse_average,r_max,r_min,r_average\n");
        for m in &self.methods {
            for (name, part) in [("train", &m.train), ("test", &m.test)] {
                match part {
                    Some(p) => writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{},{}",
                        m.method, name, m.runs, m.failed, p.rmse.max, p.rmse.min, p.rmse.average, p.r.max, p.r.min, p.r.average
                    ),
                    None => writeln!(out, "{},{},{},{},,,,,,", m.method, name, m.runs, m.failed),
                }
                .unwrap();
            }
        }
        out
    }

    /// Aligned plain-text table, one block per method.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<12} {:<6} {:>4} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}\n",
            "method", "part", "runs", "rmse max", "rmse min", "rmse avg", "r max", "r min", "r avg"
        );
        for m in &self.methods {
            for (name, part) in [("train", &m.train), ("test", &m.test)] {
                match part {
                    Some(p) => writeln!(
                        out,
                        "{:<12} {:<6} {:>4} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>9.4}",
                        m.method.name(),
                        name,
                        m.runs,
                        p.rmse.max,
                        p.rmse.min,
                        p.rmse.average,
                        p.r.max,
                        p.r.min,
                        p.r.average
                    ),
                    None => writeln!(out, "{:<12} {:<6} {:>4} (all runs failed)", m.method.name(), name, m.runs),
                }
                .unwrap();
            }
        }
        out
    }
}

pub fn records_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(
        "method,run,seed,status,train_rmse,test_rmse,train_r,test_r,search_value,evaluations,meta_evaluations,structure\n",
    );
    for r in records {
        let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
        let s = r.scores.as_ref();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},\"{}\"",
            r.method,
            r.run,
            r.seed,
            if r.error.is_some() { "failed" } else { "ok" },
            opt(s.map(|s| s.train_rmse)),
            opt(s.map(|s| s.test_rmse)),
            opt(s.map(|s| s.train_r)),
            opt(s.map(|s| s.test_r)),
            opt(r.search_value),
            r.evaluations,
            r.meta_evaluations,
            r.summary
        )
        .unwrap();
    }
    out
}

#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub records: Vec<RunRecord>,
    pub stats: TrialStats,
}

fn write(path: &Path, contents: &str) -> Result<(), ExperimentError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| ExperimentError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| ExperimentError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs every method `runs` times on already loaded data, without writing
/// files. `artifacts` receives each successful run's outcome.
pub fn run_trials(
    cfg: &ExperimentConfig,
    dataset: &Dataset,
    mut artifacts: impl FnMut(usize, &TuneOutcome) -> Result<(), ExperimentError>,
) -> Result<ExperimentOutcome, ExperimentError> {
    cfg.validate()?;
    let mut records = Vec::new();
    for &method in &cfg.methods {
        for run in 0..cfg.runs {
            let seed = cfg.run_seed(run);
            let (train, test) = data::split(
                dataset,
                &SplitSpec {
                    train_fraction: cfg.train_fraction,
                    seed,
                },
            )?;
            let mut record = RunRecord {
                method,
                run,
                seed,
                error: None,
                scores: None,
                search_value: None,
                evaluations: 0,
                meta_evaluations: 0,
                summary: String::new(),
            };
            match tune(method, &train, &cfg.settings, seed) {
                Ok(out) if out.diverged => {
                    record.error = Some("final training diverged".into());
                }
                Ok(out) => {
                    record.scores = Some(Scores::of(&out.model, &train, &test));
                    record.search_value = out.search_value;
                    record.evaluations = out.evaluations;
                    record.meta_evaluations = out.meta.as_ref().map_or(0, |m| m.meta_evaluations);
                    record.summary.clone_from(&out.summary);
                    artifacts(run, &out)?;
                }
                Err(e) => record.error = Some(e.to_string()),
            }
            if let Some(e) = &record.error {
                log::warn!("{method} run {run} failed and is excluded from the statistics: {e}");
            } else {
                log::info!("{method} run {run} done");
            }
            records.push(record);
        }
    }
    let stats = TrialStats::from_records(&cfg.methods, &records);
    Ok(ExperimentOutcome { records, stats })
}

#[derive(Serialize)]
struct Manifest<'a> {
    package: &'static str,
    version: &'static str,
    config: &'a ExperimentConfig,
    dataset_samples: usize,
    dataset_features: usize,
    run_seeds: Vec<u64>,
    split_protocol: &'static str,
    failed_runs: usize,
}

/// Loads the dataset, runs the trials and writes `stats.csv`, `stats.txt`,
/// `runs.csv`, `manifest.json` and per-run `trace.csv` / `model.json` (plus
/// `meta.csv` for the adaptive swarm) under `output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, ExperimentError> {
    cfg.validate()?;
    let dataset = load_dataset(&cfg.dataset)?;
    let out_dir = &cfg.output_dir;
    let outcome = run_trials(cfg, &dataset, |run, out| {
        let dir = out_dir.join("runs").join(out.method.name()).join(run.to_string());
        write(&dir.join("trace.csv"), &out.trace_csv)?;
        write(&dir.join("model.json"), &out.model.to_json())?;
        if let Some(meta) = &out.meta {
            write(&dir.join("meta.csv"), &meta.to_csv())?;
        }
        Ok(())
    })?;
    write(&out_dir.join("stats.csv"), &outcome.stats.to_csv())?;
    write(&out_dir.join("stats.txt"), &outcome.stats.to_table())?;
    write(&out_dir.join("runs.csv"), &records_csv(&outcome.records))?;
    let manifest = Manifest {
        package: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        dataset_samples: dataset.n_samples(),
        dataset_features: dataset.n_features(),
        run_seeds: (0..cfg.runs).map(|r| cfg.run_seed(r)).collect(),
        split_protocol: "paired: run r of every method uses seed base+r and the same train/test split",
        failed_runs: outcome.records.iter().filter(|r| r.error.is_some()).count(),
    };
    write(&out_dir.join("manifest.json"), &serde_json::to_string_pretty(&manifest)?)?;
    Ok(outcome)
}
