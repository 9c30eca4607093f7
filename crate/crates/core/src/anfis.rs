//! ANFIS parameter learning.
//!
//! Hybrid mode solves the consequent coefficients by least squares with the
//! premises fixed, then takes one clipped gradient step on the premise (MF)
//! parameters. Backprop mode takes clipped gradient steps on both sets.
//! Gradients are full-batch gradients of the mean squared error.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::Dataset;
use crate::fis::{ConsequentOrder, FisError, FisModel};
use crate::sampling::{seeded, Sampler};

/// RMSE above which training is declared diverged.
pub const DIVERGENCE_RMSE: f64 = 1e6;

#[derive(Debug, Error, PartialEq)]
pub enum AnfisError {
    #[error("training data is empty")]
    EmptyData,
    #[error("model has {model} inputs but data has {data} features")]
    Dimension { model: usize, data: usize },
    #[error("invalid training config: {0}")]
    Config(&'static str),
    #[error(transparent)]
    Model(#[from] FisError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TrainMode {
    #[default]
    Hybrid,
    Backprop,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub mode: TrainMode,
    /// Seeds the small random slopes backprop starts from when the model
    /// carries untrained (all-zero) consequents.
    pub seed: u64,
    /// Gradient steps are rescaled to at most this Euclidean norm.
    pub clip_norm: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 100,
            learning_rate: 0.01,
            mode: TrainMode::Hybrid,
            seed: 0,
            clip_norm: 1.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), AnfisError> {
        if self.epochs == 0 {
            return Err(AnfisError::Config("epochs must be at least 1"));
        }
        if !(self.learning_rate >= 0.0) || !self.learning_rate.is_finite() {
            return Err(AnfisError::Config("learning rate must be finite and non-negative"));
        }
        if !(self.clip_norm > 0.0) {
            return Err(AnfisError::Config("clip norm must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct TrainTrace {
    /// Train RMSE per epoch, measured in the epoch's forward pass (after the
    /// least-squares solve in hybrid mode). Shorter than `epochs` only when
    /// training diverged.
    pub rmse: Vec<f64>,
    pub model: FisModel,
    /// RMSE of the returned model on the training data.
    pub final_rmse: f64,
    pub diverged: bool,
    /// Least-squares solves that hit a rank-deficient design matrix.
    pub rank_deficient_solves: usize,
    /// Samples that fell back to uniform firing in the last forward pass.
    pub fallback_samples: usize,
    pub wall_time: Duration,
}

impl TrainTrace {
    /// `epoch,train_rmse` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_rmse\n");
        for (i, v) in self.rmse.iter().enumerate() {
            writeln!(out, "{},{}", i + 1, v).unwrap();
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct LseOutcome {
    pub model: FisModel,
    /// The design matrix had numerical rank below its column count; the
    /// minimum-norm solution was used.
    pub rank_deficient: bool,
}

/// Flat parameter layout: offset of each `(input, mf)` pair in the premise
/// vector, ordered input-major then MF then parameter.
struct Layout {
    offsets: Vec<Vec<usize>>,
    len: usize,
}

impl Layout {
    fn of(model: &FisModel) -> Self {
        let mut len = 0;
        let offsets = model
            .inputs
            .iter()
            .map(|mfs| {
                mfs.iter()
                    .map(|mf| {
                        let o = len;
                        len += mf.n_params();
                        o
                    })
                    .collect()
            })
            .collect();
        Layout { offsets, len }
    }
}

pub fn premise_params(model: &FisModel) -> Vec<f64> {
    model.inputs.iter().flatten().flat_map(|mf| mf.params()).collect()
}

/// Writes premise parameters back in canonical order. No repair is applied.
pub fn set_premise_params(model: &mut FisModel, params: &[f64]) {
    let mut at = 0;
    for mf in model.inputs.iter_mut().flatten() {
        let n = mf.n_params();
        mf.set_params(&params[at..at + n]);
        at += n;
    }
    assert_eq!(at, params.len(), "premise parameter count mismatch");
}

pub fn consequent_params(model: &FisModel) -> Vec<f64> {
    model.rules.iter().flat_map(|r| r.consequent.iter().copied()).collect()
}

pub fn set_consequent_params(model: &mut FisModel, params: &[f64]) {
    let k = model.order.coefficients(model.n_inputs());
    assert_eq!(params.len(), k * model.n_rules(), "consequent parameter count mismatch");
    for (rule, chunk) in model.rules.iter_mut().zip(params.chunks(k)) {
        rule.consequent.copy_from_slice(chunk);
    }
}

/// Keeps every MF valid after a gradient step.
pub fn project_premises(model: &mut FisModel) {
    model.inputs.iter_mut().flatten().for_each(|mf| mf.repair());
}

/// Per-sample forward quantities reused by the LSE solve and the gradients.
struct Forward {
    /// `mu[i][m]` per sample, flattened per input.
    mu: Vec<Vec<Vec<f64>>>,
    raw: Vec<Vec<f64>>,
    normalized: Vec<Vec<f64>>,
    total: Vec<f64>,
    fallback: Vec<bool>,
}

impl Forward {
    fn run(model: &FisModel, data: &Dataset) -> Self {
        let n = data.n_samples();
        let mut fwd = Forward {
            mu: Vec::with_capacity(n),
            raw: Vec::with_capacity(n),
            normalized: Vec::with_capacity(n),
            total: Vec::with_capacity(n),
            fallback: Vec::with_capacity(n),
        };
        for x in &data.features {
            let mu = model.memberships(x);
            let firing = model.fire_from_memberships(&mu);
            fwd.total.push(firing.raw.iter().sum());
            fwd.fallback.push(firing.fallback);
            fwd.raw.push(firing.raw);
            fwd.normalized.push(firing.normalized);
            fwd.mu.push(mu);
        }
        fwd
    }

    fn outputs(&self, model: &FisModel, data: &Dataset) -> Vec<f64> {
        self.normalized
            .iter()
            .zip(&data.features)
            .map(|(wn, x)| wn.iter().zip(&model.rules).map(|(w, r)| w * r.output(x)).sum())
            .collect()
    }

    fn fallback_count(&self) -> usize {
        self.fallback.iter().filter(|&&f| f).count()
    }
}

fn check_dims(model: &FisModel, data: &Dataset) -> Result<(), AnfisError> {
    if data.is_empty() {
        return Err(AnfisError::EmptyData);
    }
    if data.n_features() != model.n_inputs() {
        return Err(AnfisError::Dimension {
            model: model.n_inputs(),
            data: data.n_features(),
        });
    }
    Ok(())
}

fn rmse_from(outputs: &[f64], targets: &[f64]) -> f64 {
    let sse: f64 = outputs.iter().zip(targets).map(|(y, t)| (y - t) * (y - t)).sum();
    (sse / targets.len() as f64).sqrt()
}

/// Consequent design matrix: row `j` holds `w̄_k(x_j) * [x_j, 1]` for every
/// rule `k` (or just `w̄_k(x_j)` for zeroth order), so that the model output
/// is `A * theta` with `theta` the flattened consequents.
pub fn consequent_design(model: &FisModel, data: &Dataset) -> DMatrix<f64> {
    design_from(&Forward::run(model, data), model, data)
}

fn design_from(fwd: &Forward, model: &FisModel, data: &Dataset) -> DMatrix<f64> {
    let k = model.order.coefficients(model.n_inputs());
    let cols = k * model.n_rules();
    DMatrix::from_fn(data.n_samples(), cols, |j, c| {
        let (rule, coef) = (c / k, c % k);
        let wn = fwd.normalized[j][rule];
        match model.order {
            ConsequentOrder::Zeroth => wn,
            ConsequentOrder::First if coef < k - 1 => wn * data.features[j][coef],
            ConsequentOrder::First => wn,
        }
    })
}

/// Least-squares solution of `a * theta = y`. Well-conditioned systems go
/// through the Cholesky-factored normal equations; anything else falls back
/// to an SVD pseudo-inverse, which yields the minimum-norm solution.
/// Returns the solution and whether the matrix was numerically rank deficient.
pub fn least_squares(a: &DMatrix<f64>, y: &DVector<f64>) -> (DVector<f64>, bool) {
    let (n, p) = a.shape();
    if n >= p {
        let gram = a.tr_mul(a);
        let max_diag = gram.diagonal().max();
        if let Some(chol) = gram.clone().cholesky() {
            let l = chol.l_dirty();
            let min_pivot = (0..p).map(|i| l[(i, i)] * l[(i, i)]).fold(f64::INFINITY, f64::min);
            if max_diag > 0.0 && min_pivot > 1e-10 * max_diag {
                let theta = chol.solve(&a.tr_mul(y));
                if theta.iter().all(|v| v.is_finite()) {
                    return (theta, false);
                }
            }
        }
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = smax * (n.max(p) as f64) * f64::EPSILON;
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    let theta = svd.solve(y, tol).expect("u and v^T were computed");
    (theta, rank < p)
}

/// Consequent coefficients minimizing the squared training error with the
/// premise parameters held fixed.
pub fn lse_consequents(model: &FisModel, data: &Dataset) -> Result<LseOutcome, AnfisError> {
    check_dims(model, data)?;
    let fwd = Forward::run(model, data);
    let mut out = model.clone();
    let rank_deficient = solve_into(&fwd, &mut out, data);
    Ok(LseOutcome {
        model: out,
        rank_deficient,
    })
}

fn solve_into(fwd: &Forward, model: &mut FisModel, data: &Dataset) -> bool {
    let a = design_from(fwd, model, data);
    let y = DVector::from_column_slice(&data.targets);
    let (theta, deficient) = least_squares(&a, &y);
    set_consequent_params(model, theta.as_slice());
    deficient
}

/// Gradient of the mean squared error w.r.t. every premise parameter, in the
/// order of [`premise_params`].
pub fn premise_gradients(model: &FisModel, data: &Dataset) -> Result<Vec<f64>, AnfisError> {
    check_dims(model, data)?;
    let fwd = Forward::run(model, data);
    let outputs = fwd.outputs(model, data);
    Ok(premise_grad_from(&fwd, &outputs, model, data))
}

/// Gradient of the mean squared error w.r.t. every consequent coefficient, in
/// the order of [`consequent_params`].
pub fn consequent_gradients(model: &FisModel, data: &Dataset) -> Result<Vec<f64>, AnfisError> {
    check_dims(model, data)?;
    let fwd = Forward::run(model, data);
    let outputs = fwd.outputs(model, data);
    Ok(consequent_grad_from(&fwd, &outputs, model, data))
}

fn premise_grad_from(fwd: &Forward, outputs: &[f64], model: &FisModel, data: &Dataset) -> Vec<f64> {
    let layout = Layout::of(model);
    let n_inputs = model.n_inputs();
    let scale = 2.0 / data.n_samples() as f64;
    let mut grad = vec![0.0; layout.len];
    let mut d_mu: Vec<Vec<f64>> = model.inputs.iter().map(|mfs| vec![0.0; mfs.len()]).collect();
    let mut prefix = vec![1.0; n_inputs + 1];
    let mut mf_grad = [0.0; 4];

    for (j, x) in data.features.iter().enumerate() {
        // Uniform fallback firing does not depend on the premises.
        if fwd.fallback[j] {
            continue;
        }
        let y = outputs[j];
        let residual = y - data.targets[j];
        if residual == 0.0 {
            continue;
        }
        let mu = &fwd.mu[j];
        d_mu.iter_mut().flatten().for_each(|v| *v = 0.0);
        for rule in &model.rules {
            let coeff = (rule.output(x) - y) / fwd.total[j];
            if coeff == 0.0 {
                continue;
            }
            // Product of the other inputs' degrees via prefix/suffix sweeps, so
            // zero degrees elsewhere are handled without dividing.
            for i in 0..n_inputs {
                prefix[i + 1] = prefix[i] * mu[i][rule.antecedent[i]];
            }
            let mut suffix = 1.0;
            for i in (0..n_inputs).rev() {
                let m = rule.antecedent[i];
                d_mu[i][m] += coeff * prefix[i] * suffix;
                suffix *= mu[i][m];
            }
        }
        for (i, mfs) in model.inputs.iter().enumerate() {
            for (m, mf) in mfs.iter().enumerate() {
                let dy = d_mu[i][m];
                if dy == 0.0 {
                    continue;
                }
                let np = mf.n_params();
                mf.param_gradient(x[i], &mut mf_grad[..np]);
                let base = layout.offsets[i][m];
                for p in 0..np {
                    grad[base + p] += scale * residual * dy * mf_grad[p];
                }
            }
        }
    }
    grad
}

fn consequent_grad_from(fwd: &Forward, outputs: &[f64], model: &FisModel, data: &Dataset) -> Vec<f64> {
    let k = model.order.coefficients(model.n_inputs());
    let scale = 2.0 / data.n_samples() as f64;
    let mut grad = vec![0.0; k * model.n_rules()];
    for (j, x) in data.features.iter().enumerate() {
        let residual = outputs[j] - data.targets[j];
        for (r, wn) in fwd.normalized[j].iter().enumerate() {
            let g = scale * residual * wn;
            let block = &mut grad[r * k..(r + 1) * k];
            let (bias, slopes) = block.split_last_mut().unwrap();
            *bias += g;
            for (s, xi) in slopes.iter_mut().zip(x) {
                *s += g * xi;
            }
        }
    }
    grad
}

fn clip(grad: &mut [f64], max_norm: f64) {
    let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    if norm > max_norm {
        let s = max_norm / norm;
        grad.iter_mut().for_each(|g| *g *= s);
    }
}

fn descend(params: &mut [f64], grad: &[f64], lr: f64) {
    for (p, g) in params.iter_mut().zip(grad) {
        *p -= lr * g;
    }
}

/// Backprop needs a non-trivial starting point: untrained models get the
/// target mean as every bias and small seeded slopes.
fn init_consequents(model: &mut FisModel, data: &Dataset, seed: u64) {
    if consequent_params(model).iter().any(|&c| c != 0.0) {
        return;
    }
    let mean = data.targets.iter().sum::<f64>() / data.n_samples() as f64;
    let mut rng = seeded(seed);
    for rule in &mut model.rules {
        let (bias, slopes) = rule.consequent.split_last_mut().unwrap();
        *bias = mean;
        for s in slopes {
            *s = rng.range(-0.01, 0.01);
        }
    }
}

pub fn train(model: &FisModel, data: &Dataset, cfg: &TrainConfig) -> Result<TrainTrace, AnfisError> {
    let started = Instant::now();
    cfg.validate()?;
    model.validate()?;
    check_dims(model, data)?;

    let mut model = model.clone();
    if cfg.mode == TrainMode::Backprop {
        init_consequents(&mut model, data, cfg.seed);
    }
    let mut rmse = Vec::with_capacity(cfg.epochs);
    let mut diverged = false;
    let mut rank_deficient_solves = 0;

    for _ in 0..cfg.epochs {
        let fwd = Forward::run(&model, data);
        if cfg.mode == TrainMode::Hybrid && solve_into(&fwd, &mut model, data) {
            rank_deficient_solves += 1;
        }
        let outputs = fwd.outputs(&model, data);
        let epoch_rmse = rmse_from(&outputs, &data.targets);
        if !(epoch_rmse <= DIVERGENCE_RMSE) {
            diverged = true;
            break;
        }
        rmse.push(epoch_rmse);
        if cfg.learning_rate == 0.0 {
            continue;
        }

        let mut grad = premise_grad_from(&fwd, &outputs, &model, data);
        let n_premise = grad.len();
        if cfg.mode == TrainMode::Backprop {
            grad.extend(consequent_grad_from(&fwd, &outputs, &model, data));
        }
        if grad.iter().any(|g| !g.is_finite()) {
            diverged = true;
            break;
        }
        clip(&mut grad, cfg.clip_norm);

        let mut premises = premise_params(&model);
        descend(&mut premises, &grad[..n_premise], cfg.learning_rate);
        set_premise_params(&mut model, &premises);
        project_premises(&mut model);
        if cfg.mode == TrainMode::Backprop {
            let mut cons = consequent_params(&model);
            descend(&mut cons, &grad[n_premise..], cfg.learning_rate);
            set_consequent_params(&mut model, &cons);
        }
    }

    let fwd = Forward::run(&model, data);
    let final_rmse = rmse_from(&fwd.outputs(&model, data), &data.targets);
    if !final_rmse.is_finite() {
        diverged = true;
    }
    Ok(TrainTrace {
        rmse,
        final_rmse,
        diverged,
        rank_deficient_solves,
        fallback_samples: fwd.fallback_count(),
        model,
        wall_time: started.elapsed(),
    })
}

/// RMSE of `model` on `data`.
pub fn evaluate_rmse(model: &FisModel, data: &Dataset) -> f64 {
    rmse_from(&model.predict(&data.features), &data.targets)
}
