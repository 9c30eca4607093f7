//! Elitist (1+1) evolutionary algorithm with a 1/5-success-rule step size.
//!
//! Each gene mutates independently with probability `mutation_prob`
//! (default `1/N`) by adding `sigma * N(0, 1)`; the offspring is clamped to
//! the box and replaces the parent only on strict improvement. After every
//! generation the step size grows by [`F_UP`] on success. On failure,
//! [`Variant::V1`] shrinks it by [`F_DOWN`] and [`Variant::V2`] keeps it.
//! With `F_DOWN = F_UP^(-1/4)` the step size is stationary at a success
//! rate of exactly one in five.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sampling::{seeded, Sampler};
use crate::trace::{clamp_to, sanitize, trace_to_csv};
use crate::Bounds;

pub const F_UP: f64 = 1.5;
/// `F_UP^(-1/4)`.
pub const F_DOWN: f64 = 0.903_602_003_609_845;
pub const MIN_SIGMA: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Variant {
    /// Grow on success, shrink on failure.
    #[default]
    V1,
    /// Grow on success, keep the step size on failure.
    V2,
}

#[derive(Debug, Error, PartialEq)]
pub enum EaError {
    #[error("need at least one generation")]
    NoGenerations,
    #[error("initial step size must be positive")]
    BadSigma,
    #[error("mutation probability must lie in (0, 1], got {0}")]
    BadMutationProb(f64),
    #[error("search space has no dimensions")]
    NoDimensions,
    #[error("dimension {0}: lower bound must be below upper bound")]
    BadBounds(usize),
    #[error("start point has {found} entries for {dims} dimensions")]
    StartLength { found: usize, dims: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EaConfig {
    pub generations: usize,
    pub variant: Variant,
    pub sigma0: f64,
    /// `None` means `1 / dims`.
    pub mutation_prob: Option<f64>,
    pub bounds: Vec<Bounds>,
    pub seed: u64,
    /// Starting parent; drawn uniformly in the box when absent.
    #[serde(default)]
    pub start: Option<Vec<f64>>,
}

impl EaConfig {
    pub fn new(bounds: Vec<Bounds>, generations: usize) -> Self {
        EaConfig {
            generations,
            variant: Variant::V1,
            sigma0: 1.0,
            mutation_prob: None,
            bounds,
            seed: 0,
            start: None,
        }
    }

    pub fn dims(&self) -> usize {
        self.bounds.len()
    }

    pub fn effective_mutation_prob(&self) -> f64 {
        self.mutation_prob.unwrap_or(1.0 / self.dims().max(1) as f64)
    }

    pub fn validate(&self) -> Result<(), EaError> {
        if self.generations == 0 {
            return Err(EaError::NoGenerations);
        }
        if !(self.sigma0 > 0.0) {
            return Err(EaError::BadSigma);
        }
        if self.bounds.is_empty() {
            return Err(EaError::NoDimensions);
        }
        if let Some(i) = self.bounds.iter().position(|(lo, hi)| !(lo < hi)) {
            return Err(EaError::BadBounds(i));
        }
        let p = self.effective_mutation_prob();
        if !(p > 0.0 && p <= 1.0) {
            return Err(EaError::BadMutationProb(p));
        }
        if let Some(s) = &self.start {
            if s.len() != self.dims() {
                return Err(EaError::StartLength {
                    found: s.len(),
                    dims: self.dims(),
                });
            }
        }
        Ok(())
    }
}

/// Offspring of `x`: each gene, with probability `mutation_prob`, gets
/// `sigma * N(0, 1)` added; the result is clamped to `bounds`.
pub fn mutate<S: Sampler + ?Sized>(x: &[f64], sigma: f64, mutation_prob: f64, bounds: &[Bounds], rng: &mut S) -> Vec<f64> {
    let mut y = x.to_vec();
    for yi in &mut y {
        if rng.uniform() < mutation_prob {
            *yi += sigma * rng.normal();
        }
    }
    clamp_to(&mut y, bounds);
    y
}

pub fn adapt_sigma(sigma: f64, success: bool, variant: Variant) -> f64 {
    let next = match (success, variant) {
        (true, _) => sigma * F_UP,
        (false, Variant::V1) => sigma * F_DOWN,
        (false, Variant::V2) => sigma,
    };
    next.max(MIN_SIGMA)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EaState {
    pub x: Vec<f64>,
    pub fx: f64,
    pub sigma: f64,
    pub success_history: Vec<bool>,
}

impl EaState {
    pub fn new(x: Vec<f64>, fx: f64, sigma: f64) -> Self {
        EaState {
            x,
            fx: sanitize(fx).0,
            sigma,
            success_history: Vec::new(),
        }
    }

    /// One mutate / select / adapt cycle. Returns whether the offspring won.
    pub fn generation<F, S>(&mut self, objective: &F, cfg: &EaConfig, rng: &mut S) -> bool
    where
        F: Fn(&[f64]) -> f64,
        S: Sampler + ?Sized,
    {
        let y = mutate(&self.x, self.sigma, cfg.effective_mutation_prob(), &cfg.bounds, rng);
        let (fy, _) = sanitize(objective(&y));
        let success = fy < self.fx;
        if success {
            self.x = y;
            self.fx = fy;
        }
        self.sigma = adapt_sigma(self.sigma, success, cfg.variant);
        self.success_history.push(success);
        success
    }

    pub fn success_rate(&self) -> f64 {
        if self.success_history.is_empty() {
            return 0.0;
        }
        self.success_history.iter().filter(|&&s| s).count() as f64 / self.success_history.len() as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EaResult {
    pub best: Vec<f64>,
    pub value: f64,
    /// Value of the starting point (NaN scored as `+inf`).
    pub initial_value: f64,
    /// Step size after each generation.
    pub sigma_trace: Vec<f64>,
    /// Parent value after each generation.
    pub value_trace: Vec<f64>,
    pub successes: usize,
    pub evaluations: usize,
}

impl EaResult {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.sigma_trace.len().max(1) as f64
    }

    /// `generation,sigma,best_value` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("generation,sigma,best_value\n");
        for (g, (s, v)) in self.sigma_trace.iter().zip(&self.value_trace).enumerate() {
            out.push_str(&format!("{},{},{}\n", g + 1, s, v));
        }
        out
    }

    pub fn value_trace_csv(&self) -> String {
        trace_to_csv(&self.value_trace)
    }
}

pub fn run<F>(objective: F, cfg: &EaConfig) -> Result<EaResult, EaError>
where
    F: Fn(&[f64]) -> f64,
{
    cfg.validate()?;
    let mut rng = seeded(cfg.seed);
    let mut x = match &cfg.start {
        Some(s) => s.clone(),
        None => cfg.bounds.iter().map(|&(lo, hi)| rng.range(lo, hi)).collect(),
    };
    clamp_to(&mut x, &cfg.bounds);
    let fx = objective(&x);
    let mut state = EaState::new(x, fx, cfg.sigma0);
    let initial_value = state.fx;
    let mut sigma_trace = Vec::with_capacity(cfg.generations);
    let mut value_trace = Vec::with_capacity(cfg.generations);
    for _ in 0..cfg.generations {
        state.generation(&objective, cfg, &mut rng);
        sigma_trace.push(state.sigma);
        value_trace.push(state.fx);
    }
    let successes = state.success_history.iter().filter(|&&s| s).count();
    Ok(EaResult {
        best: state.x,
        value: state.fx,
        initial_value,
        sigma_trace,
        value_trace,
        successes,
        evaluations: cfg.generations + 1,
    })
}
