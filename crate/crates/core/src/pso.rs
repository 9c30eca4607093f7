//! Inertia-weight particle swarm optimization (minimization).
//!
//! Velocity update per component:
//! `v <- w*v + c1*r1*(xbest - x) + c2*r2*(gbest - x)` with fresh uniform
//! `r1, r2` per component, then `|v| <= v_max` and `x <- x + v`. A position
//! leaving the box is clamped to the violated bound and that velocity
//! component is zeroed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sampling::{seeded, Sampler};
use crate::trace::{clamp_to, sanitize};
use crate::{Bounds, OptimResult};

#[derive(Debug, Error, PartialEq)]
pub enum PsoError {
    #[error("need at least 2 particles, got {0}")]
    TooFewParticles(usize),
    #[error("search space has no dimensions")]
    NoDimensions,
    #[error("dimension {0}: lower bound must be below upper bound")]
    BadBounds(usize),
    #[error("dimension {0}: velocity cap must be positive")]
    BadVelocityCap(usize),
    #[error("v_max has {found} entries for {dims} dimensions")]
    VelocityCapLength { found: usize, dims: usize },
    #[error("cognitive and social coefficients must be non-negative")]
    NegativeCoefficient,
    #[error("initial point {0} has the wrong dimension")]
    InitialPoint(usize),
}

/// Inertia weight and acceleration coefficients, the parameters ANPSO adapts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlParams {
    pub w: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Default for ControlParams {
    fn default() -> Self {
        ControlParams { w: 0.7, c1: 1.5, c2: 1.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwarmConfig {
    pub n_particles: usize,
    pub params: ControlParams,
    pub v_max: Vec<f64>,
    pub bounds: Vec<Bounds>,
    pub max_iters: usize,
    pub seed: u64,
    /// Points that replace the first random particles at initialization.
    #[serde(default)]
    pub initial_points: Vec<Vec<f64>>,
}

impl SwarmConfig {
    /// Defaults: 30 particles, `w = 0.7`, `c1 = c2 = 1.5`, `v_max` at 20% of
    /// each dimension's range, 100 iterations.
    pub fn new(bounds: Vec<Bounds>) -> Self {
        let v_max = bounds.iter().map(|(lo, hi)| 0.2 * (hi - lo)).collect();
        SwarmConfig {
            n_particles: 30,
            params: ControlParams::default(),
            v_max,
            bounds,
            max_iters: 100,
            seed: 0,
            initial_points: Vec::new(),
        }
    }

    pub fn dims(&self) -> usize {
        self.bounds.len()
    }

    pub fn validate(&self) -> Result<(), PsoError> {
        if self.n_particles < 2 {
            return Err(PsoError::TooFewParticles(self.n_particles));
        }
        if self.bounds.is_empty() {
            return Err(PsoError::NoDimensions);
        }
        if let Some(i) = self.bounds.iter().position(|(lo, hi)| !(lo < hi)) {
            return Err(PsoError::BadBounds(i));
        }
        if self.v_max.len() != self.dims() {
            return Err(PsoError::VelocityCapLength {
                found: self.v_max.len(),
                dims: self.dims(),
            });
        }
        if let Some(i) = self.v_max.iter().position(|v| !(*v > 0.0)) {
            return Err(PsoError::BadVelocityCap(i));
        }
        if !(self.params.c1 >= 0.0 && self.params.c2 >= 0.0) {
            return Err(PsoError::NegativeCoefficient);
        }
        if let Some(i) = self.initial_points.iter().position(|p| p.len() != self.dims()) {
            return Err(PsoError::InitialPoint(i));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwarmState {
    pub positions: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    pub best_positions: Vec<Vec<f64>>,
    pub best_values: Vec<f64>,
    pub global_best: Vec<f64>,
    pub global_best_value: f64,
    pub iteration: usize,
    pub evaluations: usize,
    pub nan_evaluations: usize,
}

impl SwarmState {
    /// Uniform positions in the box (after any configured initial points) and
    /// uniform velocities in `[-v_max, v_max]`.
    pub fn initialize<F, S>(cfg: &SwarmConfig, objective: &F, rng: &mut S) -> Self
    where
        F: Fn(&[f64]) -> f64,
        S: Sampler + ?Sized,
    {
        let n = cfg.n_particles;
        let mut positions = Vec::with_capacity(n);
        let mut velocities = Vec::with_capacity(n);
        for p in 0..n {
            let mut x: Vec<f64> = cfg.bounds.iter().map(|&(lo, hi)| rng.range(lo, hi)).collect();
            let v = cfg.v_max.iter().map(|&vm| rng.range(-vm, vm)).collect();
            if let Some(seed_point) = cfg.initial_points.get(p) {
                x.clone_from(seed_point);
                clamp_to(&mut x, &cfg.bounds);
            }
            positions.push(x);
            velocities.push(v);
        }
        let mut nan_evaluations = 0;
        let best_values: Vec<f64> = positions
            .iter()
            .map(|x| {
                let (v, nan) = sanitize(objective(x));
                nan_evaluations += usize::from(nan);
                v
            })
            .collect();
        let g = argmin(&best_values);
        SwarmState {
            global_best: positions[g].clone(),
            global_best_value: best_values[g],
            best_positions: positions.clone(),
            best_values,
            positions,
            velocities,
            iteration: 0,
            evaluations: n,
            nan_evaluations,
        }
    }
}

/// First index of the smallest value (ties keep the earliest).
fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    best
}

/// One synchronous swarm update: move every particle, then evaluate and
/// update personal and global bests on strict improvement.
pub fn step<F, S>(state: &mut SwarmState, cfg: &SwarmConfig, objective: &F, rng: &mut S)
where
    F: Fn(&[f64]) -> f64,
    S: Sampler + ?Sized,
{
    let ControlParams { w, c1, c2 } = cfg.params;
    for p in 0..state.positions.len() {
        let x = &mut state.positions[p];
        let v = &mut state.velocities[p];
        let xb = &state.best_positions[p];
        for d in 0..x.len() {
            let r1 = rng.uniform();
            let r2 = rng.uniform();
            let vm = cfg.v_max[d];
            let nv = w * v[d] + c1 * r1 * (xb[d] - x[d]) + c2 * r2 * (state.global_best[d] - x[d]);
            v[d] = nv.clamp(-vm, vm);
            let (lo, hi) = cfg.bounds[d];
            let nx = x[d] + v[d];
            if nx < lo || nx > hi {
                x[d] = nx.clamp(lo, hi);
                v[d] = 0.0;
            } else {
                x[d] = nx;
            }
        }
    }
    for p in 0..state.positions.len() {
        let (value, nan) = sanitize(objective(&state.positions[p]));
        state.nan_evaluations += usize::from(nan);
        if value < state.best_values[p] {
            state.best_values[p] = value;
            state.best_positions[p].clone_from(&state.positions[p]);
            if value < state.global_best_value {
                state.global_best_value = value;
                state.global_best.clone_from(&state.positions[p]);
            }
        }
    }
    state.evaluations += state.positions.len();
    state.iteration += 1;
}

/// Runs `max_iters` steps from a seeded random initialization. The trace
/// holds the global-best value after each step.
pub fn optimize<F>(cfg: &SwarmConfig, objective: F) -> Result<OptimResult, PsoError>
where
    F: Fn(&[f64]) -> f64,
{
    cfg.validate()?;
    let mut rng = seeded(cfg.seed);
    let mut state = SwarmState::initialize(cfg, &objective, &mut rng);
    let mut trace = Vec::with_capacity(cfg.max_iters);
    for _ in 0..cfg.max_iters {
        step(&mut state, cfg, &objective, &mut rng);
        trace.push(state.global_best_value);
    }
    Ok(OptimResult {
        best: state.global_best,
        value: state.global_best_value,
        trace,
        evaluations: state.evaluations,
        nan_evaluations: state.nan_evaluations,
    })
}
