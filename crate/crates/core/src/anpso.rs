//! Adaptive PSO: every `retune_period` iterations a (1+1)-EA searches the
//! control parameters `(w, c1, c2)` for the running swarm.
//!
//! A candidate triple is scored by a probe: clone the swarm, advance the
//! clone `probe_iters` steps under the candidate and read off its global-best
//! value. All candidates of one retune share the same probe random stream, so
//! they are compared on identical randomness. The EA starts from the
//! incumbent triple, which makes the returned triple never worse than the
//! incumbent under the probe. The main swarm, and its random stream, are
//! never touched by a retune.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use thiserror::Error;

use crate::one_plus_one_ea::{self, EaConfig, EaError, Variant};
use crate::pso::{self, ControlParams, PsoError, SwarmConfig, SwarmState};
use crate::sampling::{derive_seed, seeded};
use crate::{Bounds, OptimResult};

#[derive(Debug, Error, PartialEq)]
pub enum AnpsoError {
    #[error(transparent)]
    Swarm(#[from] PsoError),
    #[error(transparent)]
    Ea(#[from] EaError),
    #[error("invalid meta config: {0}")]
    Config(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamBounds {
    pub w: Bounds,
    pub c1: Bounds,
    pub c2: Bounds,
}

impl Default for ParamBounds {
    fn default() -> Self {
        ParamBounds {
            w: (0.4, 0.9),
            c1: (0.5, 2.5),
            c2: (0.5, 2.5),
        }
    }
}

impl ParamBounds {
    fn as_array(&self) -> [Bounds; 3] {
        [self.w, self.c1, self.c2]
    }

    pub fn contains(&self, p: &ControlParams) -> bool {
        let inside = |v: f64, (lo, hi): Bounds| lo <= v && v <= hi;
        inside(p.w, self.w) && inside(p.c1, self.c1) && inside(p.c2, self.c2)
    }

    pub fn clamp(&self, p: &ControlParams) -> ControlParams {
        ControlParams {
            w: p.w.clamp(self.w.0, self.w.1),
            c1: p.c1.clamp(self.c1.0, self.c1.1),
            c2: p.c2.clamp(self.c2.0, self.c2.1),
        }
    }

    /// Maps parameters onto the unit cube the EA searches.
    fn to_unit(&self, p: &ControlParams) -> Vec<f64> {
        [p.w, p.c1, p.c2]
            .iter()
            .zip(self.as_array())
            .map(|(v, (lo, hi))| ((v - lo) / (hi - lo)).clamp(0.0, 1.0))
            .collect()
    }

    fn from_unit(&self, z: &[f64]) -> ControlParams {
        let [w, c1, c2] = self.as_array().map(|(lo, hi)| (lo, hi - lo));
        ControlParams {
            w: w.0 + z[0] * w.1,
            c1: c1.0 + z[1] * c1.1,
            c2: c2.0 + z[2] * c2.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetaConfig {
    pub retune_period: usize,
    pub ea_generations: usize,
    pub ea_variant: Variant,
    pub param_bounds: ParamBounds,
    pub probe_iters: usize,
    /// EA step size in unit-cube coordinates (fraction of each range).
    pub ea_sigma0: f64,
    /// Scales `ea_generations` (rounded) so the meta search can be shrunk.
    pub budget_factor: f64,
    pub seed: u64,
}

impl Default for MetaConfig {
    fn default() -> Self {
        MetaConfig {
            retune_period: 10,
            ea_generations: 100,
            ea_variant: Variant::V1,
            param_bounds: ParamBounds::default(),
            probe_iters: 10,
            ea_sigma0: 0.1,
            budget_factor: 1.0,
            seed: 0,
        }
    }
}

impl MetaConfig {
    pub fn effective_generations(&self) -> usize {
        (self.ea_generations as f64 * self.budget_factor).round() as usize
    }

    pub fn validate(&self) -> Result<(), AnpsoError> {
        if self.retune_period == 0 {
            return Err(AnpsoError::Config("retune period must be at least 1"));
        }
        if self.probe_iters == 0 {
            return Err(AnpsoError::Config("probe iterations must be at least 1"));
        }
        if !(self.ea_sigma0 > 0.0) {
            return Err(AnpsoError::Config("EA step size must be positive"));
        }
        if !(self.budget_factor >= 0.0) {
            return Err(AnpsoError::Config("budget factor must be non-negative"));
        }
        if self.param_bounds.as_array().iter().any(|(lo, hi)| !(lo < hi)) {
            return Err(AnpsoError::Config("parameter bounds must be non-empty intervals"));
        }
        Ok(())
    }
}

/// Probe score of `candidate`: global-best value of a copy of `snapshot`
/// after `probe_iters` steps driven by the stream seeded with `probe_seed`.
pub fn meta_objective<F>(
    candidate: ControlParams,
    snapshot: &SwarmState,
    cfg: &SwarmConfig,
    objective: &F,
    probe_iters: usize,
    probe_seed: u64,
) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let mut probe = snapshot.clone();
    let probe_cfg = SwarmConfig {
        params: candidate,
        ..cfg.clone()
    };
    let mut rng = seeded(probe_seed);
    for _ in 0..probe_iters {
        pso::step(&mut probe, &probe_cfg, objective, &mut rng);
    }
    probe.global_best_value
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetuneOutcome {
    pub params: ControlParams,
    /// Probe score of the parameters in force before the retune.
    pub incumbent_fitness: f64,
    /// Probe score of the returned parameters.
    pub fitness: f64,
    /// Objective evaluations spent on probes.
    pub evaluations: usize,
}

/// Stream seeds for the `index`-th retune: `(probe, ea)`.
pub fn retune_seeds(meta_seed: u64, index: u64) -> (u64, u64) {
    let base = derive_seed(meta_seed, index);
    (derive_seed(base, 0), derive_seed(base, 1))
}

/// Searches new control parameters for the swarm in `state`.
pub fn retune<F>(state: &SwarmState, cfg: &SwarmConfig, meta: &MetaConfig, objective: &F, index: u64) -> RetuneOutcome
where
    F: Fn(&[f64]) -> f64,
{
    let (probe_seed, ea_seed) = retune_seeds(meta.seed, index);
    let bounds = meta.param_bounds;
    let start = bounds.to_unit(&cfg.params);
    let incumbent = bounds.clamp(&cfg.params);
    let decode = |z: &[f64]| if z == start.as_slice() { incumbent } else { bounds.from_unit(z) };
    let probe = |z: &[f64]| meta_objective(decode(z), state, cfg, objective, meta.probe_iters, probe_seed);
    let per_probe = meta.probe_iters * state.positions.len();

    let generations = meta.effective_generations();
    if generations == 0 {
        let fitness = probe(&start);
        return RetuneOutcome {
            params: incumbent,
            incumbent_fitness: fitness,
            fitness,
            evaluations: per_probe,
        };
    }
    let ea_cfg = EaConfig {
        generations,
        variant: meta.ea_variant,
        sigma0: meta.ea_sigma0,
        mutation_prob: None,
        bounds: vec![(0.0, 1.0); 3],
        seed: ea_seed,
        start: Some(start.clone()),
    };
    let res = one_plus_one_ea::run(&probe, &ea_cfg).expect("EA config is valid by construction");
    // The start point decodes to the exact incumbent so that round-off in
    // the unit-cube mapping never shows up as a parameter change.
    let params = if res.successes == 0 { incumbent } else { decode(&res.best) };
    RetuneOutcome {
        params,
        incumbent_fitness: res.initial_value,
        fitness: res.value,
        evaluations: res.evaluations * per_probe,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetuneRecord {
    pub iteration: usize,
    pub old: ControlParams,
    pub new: ControlParams,
    pub incumbent_fitness: f64,
    pub probe_fitness: f64,
}

impl RetuneRecord {
    pub fn changed(&self) -> bool {
        self.old != self.new
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetaTrace {
    pub records: Vec<RetuneRecord>,
    /// Objective evaluations spent on probes, reported separately from the
    /// main swarm's budget.
    pub meta_evaluations: usize,
}

impl MetaTrace {
    /// `iteration,w,c1,c2,probe_fitness` CSV of the parameters adopted at
    /// each retune.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,w,c1,c2,probe_fitness\n");
        for r in &self.records {
            writeln!(out, "{},{},{},{},{}", r.iteration, r.new.w, r.new.c1, r.new.c2, r.probe_fitness).unwrap();
        }
        out
    }

    pub fn change_fraction(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.records.iter().filter(|r| r.changed()).count() as f64 / self.records.len() as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptiveResult {
    pub result: OptimResult,
    pub meta: MetaTrace,
}

/// PSO with periodic control-parameter retuning. With a retune period longer
/// than `max_iters` this reproduces [`pso::optimize`] exactly.
pub fn optimize_adaptive<F>(cfg: &SwarmConfig, meta: &MetaConfig, objective: F) -> Result<AdaptiveResult, AnpsoError>
where
    F: Fn(&[f64]) -> f64,
{
    cfg.validate()?;
    meta.validate()?;
    let mut current = cfg.clone();
    let mut rng = seeded(cfg.seed);
    let mut state = SwarmState::initialize(&current, &objective, &mut rng);
    let mut trace = Vec::with_capacity(cfg.max_iters);
    let mut meta_trace = MetaTrace::default();

    for it in 1..=cfg.max_iters {
        pso::step(&mut state, &current, &objective, &mut rng);
        trace.push(state.global_best_value);
        if it % meta.retune_period == 0 {
            let index = meta_trace.records.len() as u64;
            let out = retune(&state, &current, meta, &objective, index);
            meta_trace.meta_evaluations += out.evaluations;
            meta_trace.records.push(RetuneRecord {
                iteration: it,
                old: current.params,
                new: out.params,
                incumbent_fitness: out.incumbent_fitness,
                probe_fitness: out.fitness,
            });
            current.params = out.params;
        }
    }
    Ok(AdaptiveResult {
        result: OptimResult {
            best: state.global_best,
            value: state.global_best_value,
            trace,
            evaluations: state.evaluations,
            nan_evaluations: state.nan_evaluations,
        },
        meta: meta_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    fn rastrigin(x: &[f64]) -> f64 {
        10.0 * x.len() as f64 + x.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos()).sum::<f64>()
    }

    fn swarm(dims: usize, lim: f64, iters: usize, seed: u64) -> SwarmConfig {
        SwarmConfig {
            max_iters: iters,
            seed,
            ..SwarmConfig::new(vec![(-lim, lim); dims])
        }
    }

    fn snapshot<F: Fn(&[f64]) -> f64>(cfg: &SwarmConfig, f: &F, steps: usize) -> SwarmState {
        let mut rng = seeded(cfg.seed);
        let mut s = SwarmState::initialize(cfg, f, &mut rng);
        for _ in 0..steps {
            pso::step(&mut s, cfg, f, &mut rng);
        }
        s
    }

    #[test]
    fn unit_cube_mapping_round_trips() {
        let b = ParamBounds::default();
        let p = ControlParams { w: 0.65, c1: 1.0, c2: 2.0 };
        let back = b.from_unit(&b.to_unit(&p));
        assert!((back.w - p.w).abs() < 1e-12 && (back.c1 - p.c1).abs() < 1e-12 && (back.c2 - p.c2).abs() < 1e-12);
    }

    #[test]
    fn probe_on_flat_landscape_returns_snapshot_value() {
        let cfg = swarm(3, 5.0, 0, 1);
        let flat = |_: &[f64]| 2.5;
        let snap = snapshot(&cfg, &flat, 3);
        for c in [ControlParams { w: 0.4, c1: 0.5, c2: 2.5 }, ControlParams::default()] {
            assert_eq!(meta_objective(c, &snap, &cfg, &flat, 10, 9), snap.global_best_value);
        }
    }

    #[test]
    fn probe_matches_main_loop_and_leaves_snapshot_alone() {
        let cfg = swarm(4, 5.0, 0, 3);
        let snap = snapshot(&cfg, &sphere, 5);
        let copy = snap.clone();
        let value = meta_objective(cfg.params, &snap, &cfg, &sphere, 7, 1234);
        assert_eq!(snap, copy);
        let mut manual = snap.clone();
        let mut rng = seeded(1234);
        for _ in 0..7 {
            pso::step(&mut manual, &cfg, &sphere, &mut rng);
        }
        assert_eq!(value, manual.global_best_value);
    }

    #[test]
    fn probe_cannot_worsen_converged_swarm() {
        let cfg = swarm(2, 5.0, 0, 4);
        let mut snap = snapshot(&cfg, &sphere, 2);
        snap.global_best = vec![1e-5 / 2f64.sqrt(); 2];
        snap.global_best_value = 1e-10;
        for c in [ControlParams { w: 0.9, c1: 2.5, c2: 0.5 }, ControlParams { w: 0.4, c1: 0.5, c2: 2.5 }] {
            assert!(meta_objective(c, &snap, &cfg, &sphere, 10, 5) <= 1e-9);
        }
    }

    #[test]
    fn zero_generations_keeps_incumbent() {
        let cfg = swarm(3, 5.0, 0, 2);
        let snap = snapshot(&cfg, &sphere, 3);
        let meta = MetaConfig {
            ea_generations: 0,
            ..Default::default()
        };
        let out = retune(&snap, &cfg, &meta, &sphere, 0);
        let p = out.params;
        assert!((p.w - 0.7).abs() < 1e-12 && (p.c1 - 1.5).abs() < 1e-12 && (p.c2 - 1.5).abs() < 1e-12);
        assert_eq!(out.fitness, out.incumbent_fitness);
    }

    #[test]
    fn retune_is_elitist_on_rastrigin() {
        for seed in 0..5 {
            let cfg = swarm(5, 5.12, 0, seed);
            let snap = snapshot(&cfg, &rastrigin, 20);
            let meta = MetaConfig {
                ea_generations: 30,
                seed,
                ..Default::default()
            };
            let out = retune(&snap, &cfg, &meta, &rastrigin, 0);
            let (probe_seed, _) = retune_seeds(meta.seed, 0);
            let incumbent = meta_objective(cfg.params, &snap, &cfg, &rastrigin, meta.probe_iters, probe_seed);
            let chosen = meta_objective(out.params, &snap, &cfg, &rastrigin, meta.probe_iters, probe_seed);
            assert_eq!(incumbent, out.incumbent_fitness);
            assert_eq!(chosen, out.fitness);
            assert!(chosen <= incumbent);
            assert!(meta.param_bounds.contains(&out.params));
        }
    }

    #[test]
    fn long_period_reproduces_plain_pso() {
        let cfg = swarm(3, 5.0, 40, 8);
        let meta = MetaConfig {
            retune_period: 41,
            ..Default::default()
        };
        let adaptive = optimize_adaptive(&cfg, &meta, sphere).unwrap();
        let plain = pso::optimize(&cfg, sphere).unwrap();
        assert_eq!(adaptive.result, plain);
        assert!(adaptive.meta.records.is_empty());
    }

    #[test]
    fn record_count_and_bounds() {
        let cfg = swarm(3, 5.12, 500, 1);
        let meta = MetaConfig {
            budget_factor: 0.05,
            probe_iters: 2,
            ..Default::default()
        };
        let res = optimize_adaptive(&cfg, &meta, rastrigin).unwrap();
        assert_eq!(res.meta.records.len(), 50);
        assert!(res.meta.records.iter().all(|r| meta.param_bounds.contains(&r.new)));
        assert!(res.result.trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(res.meta.meta_evaluations, 50 * 6 * 2 * 30);
        let csv = res.meta.to_csv();
        assert_eq!(csv.lines().count(), 51);
    }

    #[test]
    fn adaptive_runs_are_reproducible() {
        let cfg = swarm(4, 5.12, 60, 21);
        let meta = MetaConfig {
            ea_generations: 10,
            seed: 4,
            ..Default::default()
        };
        let a = optimize_adaptive(&cfg, &meta, rastrigin).unwrap();
        let b = optimize_adaptive(&cfg, &meta, rastrigin).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn meta_config_validation() {
        let bad = MetaConfig {
            retune_period: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = MetaConfig {
            probe_iters: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!(
            MetaConfig {
                budget_factor: 0.25,
                ..Default::default()
            }
            .effective_generations(),
            25
        );
    }
}
