//! Sugeno fuzzy inference with ANFIS training, plus a particle swarm whose
//! control parameters are re-tuned online by a (1+1) evolutionary algorithm.
//!
//! The pieces compose bottom-up:
//!
//! * [`data`] loads and normalizes the BUPA liver-disorders table and splits it.
//! * [`fis`] evaluates a first-order Takagi–Sugeno model; [`anfis`] trains one
//!   with hybrid least-squares/gradient learning or plain backpropagation.
//! * [`pso`], [`one_plus_one_ea`] and [`baselines`] are box-bounded minimizers
//!   sharing the [`OptimResult`] shape; [`anpso`] couples the first two.
//! * [`tuner`] maps a fixed-length real genome onto a model structure so any
//!   optimizer can search rule counts, MF counts, MF kinds and MF ranges.
//! * [`experiment`] runs repeated paired-seed trials and aggregates
//!   RMSE / R-value statistics computed by [`metrics`].

pub mod anfis;
pub mod anpso;
pub mod baselines;
pub mod data;
pub mod experiment;
pub mod fis;
pub mod metrics;
pub mod one_plus_one_ea;
pub mod pso;
pub mod sampling;
pub mod tuner;

mod trace;

pub use trace::OptimResult;

/// Closed interval `(lo, hi)` for one search dimension.
pub type Bounds = (f64, f64);
