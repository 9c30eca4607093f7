//! Vanilla genetic algorithm, differential evolution and harmony search over
//! the same box-bounded space as the swarm optimizers.
//!
//! Each run stops once `max_evals` objective evaluations are spent (DE stops
//! at the last whole generation that fits). Traces hold the best-so-far value
//! after each generation; for harmony search a generation is one new harmony.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sampling::{seeded, ChaCha8Rng, Sampler};
use crate::trace::{clamp_to, sanitize};
use crate::{Bounds, OptimResult};

#[derive(Debug, Error, PartialEq)]
pub enum BaselineError {
    #[error("bounds are empty")]
    NoDimensions,
    #[error("bound {0} is not a finite interval with lo < hi")]
    BadBound(usize),
    #[error("population must be at least {min}, got {got}")]
    Population { min: usize, got: usize },
    #[error("evaluation budget {budget} is smaller than the population {population}")]
    Budget { budget: usize, population: usize },
    #[error("{0} must lie in [0, 1]")]
    Rate(&'static str),
    #[error("differential weight must lie in [0, 2]")]
    Weight,
    #[error("initial point has {found} dimensions, expected {expected}")]
    InitialPoint { expected: usize, found: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Ga,
    De,
    Hs,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    pub crossover_rate: f64,
    /// Per-gene probability of a Gaussian perturbation.
    pub mutation_rate: f64,
    /// Mutation step as a fraction of each bound's width.
    pub mutation_scale: f64,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            crossover_rate: 0.9,
            mutation_rate: 0.1,
            mutation_scale: 0.1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeParams {
    pub f: f64,
    pub cr: f64,
}

impl Default for DeParams {
    fn default() -> Self {
        DeParams { f: 0.5, cr: 0.9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HsParams {
    pub hmcr: f64,
    pub par: f64,
    /// Pitch adjustment bandwidth as a fraction of each bound's width.
    pub bandwidth: f64,
}

impl Default for HsParams {
    fn default() -> Self {
        HsParams {
            hmcr: 0.9,
            par: 0.3,
            bandwidth: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub method: Method,
    /// Population size, or harmony memory size for HS.
    pub population: usize,
    pub max_evals: usize,
    pub bounds: Vec<Bounds>,
    pub seed: u64,
    #[serde(default)]
    pub ga: GaParams,
    #[serde(default)]
    pub de: DeParams,
    #[serde(default)]
    pub hs: HsParams,
    /// Replace the first random individuals.
    #[serde(default)]
    pub initial_points: Vec<Vec<f64>>,
}

impl BaselineConfig {
    pub fn new(method: Method, bounds: Vec<Bounds>, max_evals: usize) -> Self {
        BaselineConfig {
            method,
            population: 20,
            max_evals,
            bounds,
            seed: 0,
            ga: GaParams::default(),
            de: DeParams::default(),
            hs: HsParams::default(),
            initial_points: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), BaselineError> {
        if self.bounds.is_empty() {
            return Err(BaselineError::NoDimensions);
        }
        if let Some(i) = self
            .bounds
            .iter()
            .position(|&(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo < hi))
        {
            return Err(BaselineError::BadBound(i));
        }
        // Harmony search runs with any memory size; DE needs three donors
        // besides the target.
        let min = if self.method == Method::Hs { 1 } else { 4 };
        if self.population < min {
            return Err(BaselineError::Population {
                min,
                got: self.population,
            });
        }
        if self.max_evals < self.population {
            return Err(BaselineError::Budget {
                budget: self.max_evals,
                population: self.population,
            });
        }
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        match self.method {
            Method::Ga => {
                if !unit(self.ga.crossover_rate) {
                    return Err(BaselineError::Rate("crossover rate"));
                }
                if !unit(self.ga.mutation_rate) {
                    return Err(BaselineError::Rate("mutation rate"));
                }
                if !(self.ga.mutation_scale >= 0.0) {
                    return Err(BaselineError::Rate("mutation scale"));
                }
            }
            Method::De => {
                if !(0.0..=2.0).contains(&self.de.f) {
                    return Err(BaselineError::Weight);
                }
                if !unit(self.de.cr) {
                    return Err(BaselineError::Rate("crossover rate"));
                }
            }
            Method::Hs => {
                if !unit(self.hs.hmcr) {
                    return Err(BaselineError::Rate("memory consideration rate"));
                }
                if !unit(self.hs.par) {
                    return Err(BaselineError::Rate("pitch adjustment rate"));
                }
                if !unit(self.hs.bandwidth) {
                    return Err(BaselineError::Rate("bandwidth"));
                }
            }
        }
        if let Some(p) = self.initial_points.iter().find(|p| p.len() != self.bounds.len()) {
            return Err(BaselineError::InitialPoint {
                expected: self.bounds.len(),
                found: p.len(),
            });
        }
        Ok(())
    }
}

/// Runs the configured method.
pub fn optimize<F>(cfg: &BaselineConfig, objective: F) -> Result<OptimResult, BaselineError>
where
    F: Fn(&[f64]) -> f64,
{
    match cfg.method {
        Method::Ga => ga_optimize(objective, cfg),
        Method::De => de_optimize(objective, cfg),
        Method::Hs => hs_optimize(objective, cfg),
    }
}

struct Counter<F> {
    objective: F,
    evaluations: usize,
    nan: usize,
}

impl<F: Fn(&[f64]) -> f64> Counter<F> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        let (v, nan) = sanitize((self.objective)(x));
        self.evaluations += 1;
        self.nan += usize::from(nan);
        v
    }

    fn finish(self, best: Vec<f64>, value: f64, trace: Vec<f64>) -> OptimResult {
        OptimResult {
            best,
            value,
            trace,
            evaluations: self.evaluations,
            nan_evaluations: self.nan,
        }
    }
}

fn random_population<S: Sampler>(cfg: &BaselineConfig, rng: &mut S) -> Vec<Vec<f64>> {
    (0..cfg.population)
        .map(|i| {
            let mut x: Vec<f64> = cfg.bounds.iter().map(|&(lo, hi)| rng.range(lo, hi)).collect();
            if let Some(p) = cfg.initial_points.get(i) {
                x.clone_from(p);
                clamp_to(&mut x, &cfg.bounds);
            }
            x
        })
        .collect()
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    best
}

fn argmax(values: &[f64]) -> usize {
    let mut worst = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[worst] {
            worst = i;
        }
    }
    worst
}

/// Generational GA: binary tournaments, uniform crossover, per-gene
/// Gaussian mutation, and the best individual copied unchanged.
pub fn ga_optimize<F>(objective: F, cfg: &BaselineConfig) -> Result<OptimResult, BaselineError>
where
    F: Fn(&[f64]) -> f64,
{
    let cfg = &BaselineConfig { method: Method::Ga, ..cfg.clone() };
    cfg.validate()?;
    let mut rng = seeded(cfg.seed);
    let mut f = Counter { objective, evaluations: 0, nan: 0 };
    let n = cfg.population;
    let mut pop = random_population(cfg, &mut rng);
    let mut fit: Vec<f64> = pop.iter().map(|x| f.eval(x)).collect();
    let e = argmin(&fit);
    let (mut best, mut best_value) = (pop[e].clone(), fit[e]);
    let mut trace = Vec::new();
    let GaParams {
        crossover_rate,
        mutation_rate,
        mutation_scale,
    } = cfg.ga;

    while f.evaluations < cfg.max_evals {
        let elite = argmin(&fit);
        let mut next = vec![pop[elite].clone()];
        let mut next_fit = vec![fit[elite]];
        while next.len() < n && f.evaluations < cfg.max_evals {
            let tournament = |rng: &mut ChaCha8Rng| {
                let (a, b) = (rng.index(n), rng.index(n));
                if fit[a] <= fit[b] {
                    a
                } else {
                    b
                }
            };
            let (pa, pb) = (tournament(&mut rng), tournament(&mut rng));
            let mut child = if rng.uniform() < crossover_rate {
                pop[pa]
                    .iter()
                    .zip(&pop[pb])
                    .map(|(&a, &b)| if rng.uniform() < 0.5 { a } else { b })
                    .collect()
            } else {
                pop[pa].clone()
            };
            for (x, &(lo, hi)) in child.iter_mut().zip(&cfg.bounds) {
                if rng.uniform() < mutation_rate {
                    *x += rng.normal() * mutation_scale * (hi - lo);
                }
            }
            clamp_to(&mut child, &cfg.bounds);
            let v = f.eval(&child);
            if v < best_value {
                best_value = v;
                best.clone_from(&child);
            }
            next.push(child);
            next_fit.push(v);
        }
        // A budget cut mid-generation leaves a partial population; keep the
        // previous members in the open slots.
        while next.len() < n {
            let i = next.len();
            next.push(pop[i].clone());
            next_fit.push(fit[i]);
        }
        pop = next;
        fit = next_fit;
        trace.push(best_value);
    }
    Ok(f.finish(best, best_value, trace))
}

/// DE/rand/1/bin with synchronous generations and greedy `<=` replacement.
pub fn de_optimize<F>(objective: F, cfg: &BaselineConfig) -> Result<OptimResult, BaselineError>
where
    F: Fn(&[f64]) -> f64,
{
    let cfg = &BaselineConfig { method: Method::De, ..cfg.clone() };
    cfg.validate()?;
    let mut rng = seeded(cfg.seed);
    let mut f = Counter { objective, evaluations: 0, nan: 0 };
    let n = cfg.population;
    let dims = cfg.bounds.len();
    let mut pop = random_population(cfg, &mut rng);
    let mut fit: Vec<f64> = pop.iter().map(|x| f.eval(x)).collect();
    let mut trace = Vec::new();
    let DeParams { f: weight, cr } = cfg.de;

    while f.evaluations + n <= cfg.max_evals {
        let mut next = pop.clone();
        let mut next_fit = fit.clone();
        for i in 0..n {
            let [a, b, c] = distinct_others(i, n, &mut rng);
            let forced = rng.index(dims);
            let mut trial: Vec<f64> = (0..dims)
                .map(|d| {
                    if rng.uniform() < cr || d == forced {
                        pop[a][d] + weight * (pop[b][d] - pop[c][d])
                    } else {
                        pop[i][d]
                    }
                })
                .collect();
            clamp_to(&mut trial, &cfg.bounds);
            let v = f.eval(&trial);
            if v <= fit[i] {
                next[i] = trial;
                next_fit[i] = v;
            }
        }
        pop = next;
        fit = next_fit;
        trace.push(fit[argmin(&fit)]);
    }
    let b = argmin(&fit);
    Ok(f.finish(pop[b].clone(), fit[b], trace))
}

/// Three distinct indices in `0..n`, none equal to `i`.
fn distinct_others<S: Sampler>(i: usize, n: usize, rng: &mut S) -> [usize; 3] {
    let mut out = [usize::MAX; 3];
    for k in 0..3 {
        loop {
            let j = rng.index(n);
            if j != i && !out[..k].contains(&j) {
                out[k] = j;
                break;
            }
        }
    }
    out
}

/// Harmony search: each new harmony takes every component from memory with
/// probability HMCR (then pitch-adjusted with probability PAR) or uniformly
/// at random, and replaces the worst memory entry if strictly better.
pub fn hs_optimize<F>(objective: F, cfg: &BaselineConfig) -> Result<OptimResult, BaselineError>
where
    F: Fn(&[f64]) -> f64,
{
    let cfg = &BaselineConfig { method: Method::Hs, ..cfg.clone() };
    cfg.validate()?;
    let mut rng = seeded(cfg.seed);
    let mut f = Counter { objective, evaluations: 0, nan: 0 };
    let n = cfg.population;
    let mut memory = random_population(cfg, &mut rng);
    let mut fit: Vec<f64> = memory.iter().map(|x| f.eval(x)).collect();
    let mut trace = Vec::new();
    let HsParams { hmcr, par, bandwidth } = cfg.hs;

    while f.evaluations < cfg.max_evals {
        let mut h: Vec<f64> = cfg
            .bounds
            .iter()
            .enumerate()
            .map(|(d, &(lo, hi))| {
                if rng.uniform() < hmcr {
                    let mut v = memory[rng.index(n)][d];
                    if rng.uniform() < par {
                        v += bandwidth * (hi - lo) * rng.range(-1.0, 1.0);
                    }
                    v
                } else {
                    rng.range(lo, hi)
                }
            })
            .collect();
        clamp_to(&mut h, &cfg.bounds);
        let v = f.eval(&h);
        let worst = argmax(&fit);
        if v < fit[worst] {
            memory[worst] = h;
            fit[worst] = v;
        }
        trace.push(fit[argmin(&fit)]);
    }
    let b = argmin(&fit);
    Ok(f.finish(memory[b].clone(), fit[b], trace))
}
