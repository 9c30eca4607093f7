use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anpso::anpso::{optimize_adaptive, MetaConfig};
use anpso::baselines::{self, BaselineConfig};
use anpso::data::{self, SplitSpec, BUPA_FEATURE_NAMES};
use anpso::experiment::{self, ExperimentConfig, Method, MethodSettings, Scores};
use anpso::fis::FisModel;
use anpso::one_plus_one_ea::{self, EaConfig};
use anpso::pso::{self, SwarmConfig};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "anpso", version, about = "Fuzzy model structure tuning with an adaptive particle swarm")]
struct Cli {
    /// Base seed for every random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Directory for output files.
    #[arg(long, global = true, env = "ANPSO_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a repeated-trial experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Tune and train one model on a dataset.
    Tune {
        /// anfis, pso, de, ga, hs or anpso.
        #[arg(long, default_value = "anpso")]
        method: String,
        #[arg(long)]
        dataset: PathBuf,
        /// Structure-search evaluation budget.
        #[arg(long, default_value_t = 3000)]
        evals: usize,
        #[arg(long, default_value_t = 0.7)]
        train_fraction: f64,
        /// Optional JSON file with method settings; overrides --evals.
        #[arg(long)]
        settings: Option<PathBuf>,
    },
    /// Print the rule base of a saved model.
    Describe {
        #[arg(long)]
        model: PathBuf,
    },
    /// Run every optimizer on a test function.
    Bench {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Repetitions with seeds seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        runs: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Sphere,
    Rastrigin,
}

type Error = Box<dyn std::error::Error>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    let seed = cli.seed;
    let out = cli.output_dir;
    match cli.command {
        Command::Run { config } => run(&config, seed, out),
        Command::Tune {
            method,
            dataset,
            evals,
            train_fraction,
            settings,
        } => tune(&method, &dataset, evals, train_fraction, settings.as_deref(), seed.unwrap_or(0), out),
        Command::Describe { model } => describe(&model),
        Command::Bench { suite, runs } => bench(suite, runs, seed.unwrap_or(0), out),
    }
}

fn write(path: &Path, contents: &str) -> Result<(), Error> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()).into())
}

fn run(config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<(), Error> {
    let text = fs::read_to_string(config).map_err(|e| format!("cannot read {}: {e}", config.display()))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(dir) = out {
        cfg.output_dir = dir;
    }
    // Relative dataset paths are taken from the config file's directory.
    if cfg.dataset.is_relative() && !cfg.dataset.exists() {
        if let Some(base) = config.parent() {
            cfg.dataset = base.join(&cfg.dataset);
        }
    }
    let outcome = experiment::run_experiment(&cfg)?;
    print!("{}", outcome.stats.to_table());
    println!("results written to {}", cfg.output_dir.display());
    Ok(())
}

fn feature_names(n: usize) -> Vec<&'static str> {
    if n == BUPA_FEATURE_NAMES.len() {
        BUPA_FEATURE_NAMES.to_vec()
    } else {
        Vec::new()
    }
}

fn tune(
    method: &str,
    dataset: &Path,
    evals: usize,
    train_fraction: f64,
    settings: Option<&Path>,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<(), Error> {
    let method = Method::parse(method).ok_or_else(|| format!("unknown method '{method}'"))?;
    let settings = match settings {
        Some(p) => serde_json::from_str(&fs::read_to_string(p)?)?,
        None => MethodSettings {
            max_evals: evals,
            ..Default::default()
        },
    };
    let ds = experiment::load_dataset(dataset)?;
    let (train, test) = data::split(&ds, &SplitSpec { train_fraction, seed })?;
    let outcome = experiment::tune(method, &train, &settings, seed)?;
    let scores = Scores::of(&outcome.model, &train, &test);

    let dir = out.unwrap_or_else(|| PathBuf::from("tune-out"));
    write(&dir.join("model.json"), &outcome.model.to_json())?;
    write(&dir.join("trace.csv"), &outcome.trace_csv)?;
    if let Some(meta) = &outcome.meta {
        write(&dir.join("meta.csv"), &meta.to_csv())?;
    }
    let report = serde_json::json!({
        "method": method,
        "seed": seed,
        "settings": settings,
        "structure": outcome.summary,
        "search_value": outcome.search_value,
        "evaluations": outcome.evaluations,
        "meta_evaluations": outcome.meta.as_ref().map_or(0, |m| m.meta_evaluations),
        "genome": outcome.genome,
        "scores": scores,
    });
    write(&dir.join("report.json"), &serde_json::to_string_pretty(&report)?)?;

    println!("{method}: {}", outcome.summary);
    println!(
        "train rmse {:.4} r {:.4} | test rmse {:.4} r {:.4}",
        scores.train_rmse, scores.train_r, scores.test_rmse, scores.test_r
    );
    print!("{}", outcome.model.describe(&feature_names(ds.n_features())));
    println!("results written to {}", dir.display());
    Ok(())
}

fn describe(path: &Path) -> Result<(), Error> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let model = FisModel::from_json(&text)?;
    print!("{}", model.describe(&feature_names(model.n_inputs())));
    Ok(())
}

fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64 + x.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos()).sum::<f64>()
}

struct BenchRow {
    method: &'static str,
    dims: usize,
    budget: String,
    seed: u64,
    value: f64,
    evaluations: usize,
}

fn bench(suite: Suite, runs: u64, base_seed: u64, out: Option<PathBuf>) -> Result<(), Error> {
    let mut rows = Vec::new();
    for seed in base_seed..base_seed + runs {
        match suite {
            Suite::Sphere => bench_sphere(seed, &mut rows)?,
            Suite::Rastrigin => bench_rastrigin(seed, &mut rows)?,
        }
    }
    let mut csv = String::from("method,dims,budget,seed,best_value,evaluations\n");
    for r in &rows {
        writeln!(csv, "{},{},{},{},{},{}", r.method, r.dims, r.budget, r.seed, r.value, r.evaluations)?;
        println!(
            "{:<6} {:>3}-D {:<14} seed {:<4} best {:<12.4e} evals {}",
            r.method, r.dims, r.budget, r.seed, r.value, r.evaluations
        );
    }
    let name = match suite {
        Suite::Sphere => "bench-sphere.csv",
        Suite::Rastrigin => "bench-rastrigin.csv",
    };
    let path = out.unwrap_or_else(|| PathBuf::from(".")).join(name);
    write(&path, &csv)?;
    println!("results written to {}", path.display());
    Ok(())
}

fn swarm(dims: usize, lim: f64, iters: usize, seed: u64) -> SwarmConfig {
    SwarmConfig {
        max_iters: iters,
        seed,
        ..SwarmConfig::new(vec![(-lim, lim); dims])
    }
}

fn baseline(method: baselines::Method, dims: usize, evals: usize, seed: u64) -> BaselineConfig {
    BaselineConfig {
        seed,
        ..BaselineConfig::new(method, vec![(-5.0, 5.0); dims], evals)
    }
}

fn bench_sphere(seed: u64, rows: &mut Vec<BenchRow>) -> Result<(), Error> {
    let r = pso::optimize(&swarm(2, 5.0, 200, seed), sphere)?;
    rows.push(BenchRow { method: "PSO", dims: 2, budget: "200 iters".into(), seed, value: r.value, evaluations: r.evaluations });
    let ea = one_plus_one_ea::run(sphere, &EaConfig { seed, ..EaConfig::new(vec![(-5.0, 5.0); 10], 5000) })?;
    rows.push(BenchRow { method: "EA-V1", dims: 10, budget: "5000 gens".into(), seed, value: ea.value, evaluations: ea.evaluations });
    for (m, name, evals) in [
        (baselines::Method::Ga, "GA", 2000),
        (baselines::Method::De, "DE", 2000),
        (baselines::Method::Hs, "HS", 5000),
    ] {
        let r = baselines::optimize(&baseline(m, 2, evals, seed), sphere)?;
        rows.push(BenchRow { method: name, dims: 2, budget: format!("{evals} evals"), seed, value: r.value, evaluations: r.evaluations });
    }
    Ok(())
}

fn bench_rastrigin(seed: u64, rows: &mut Vec<BenchRow>) -> Result<(), Error> {
    let dims = 10;
    let iters = 500;
    let cfg = swarm(dims, 5.12, iters, seed);
    let budget = format!("{iters} iters");
    let r = pso::optimize(&cfg, rastrigin)?;
    rows.push(BenchRow { method: "PSO", dims, budget: budget.clone(), seed, value: r.value, evaluations: r.evaluations });
    let meta = MetaConfig { seed, ..Default::default() };
    let a = optimize_adaptive(&cfg, &meta, rastrigin)?;
    rows.push(BenchRow { method: "ANPSO", dims, budget, seed, value: a.result.value, evaluations: a.result.evaluations });
    let evals = 30 * (iters + 1);
    for (m, name) in [(baselines::Method::Ga, "GA"), (baselines::Method::De, "DE"), (baselines::Method::Hs, "HS")] {
        let mut c = baseline(m, dims, evals, seed);
        c.bounds = vec![(-5.12, 5.12); dims];
        let r = baselines::optimize(&c, rastrigin)?;
        rows.push(BenchRow { method: name, dims, budget: format!("{evals} evals"), seed, value: r.value, evaluations: r.evaluations });
    }
    Ok(())
}
