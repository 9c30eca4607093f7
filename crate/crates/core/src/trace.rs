use std::fmt::Write;

use serde::{Deserialize, Serialize};

/// Outcome of a box-bounded minimization run. Every optimizer in the crate
/// returns this shape so experiment code can treat methods uniformly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimResult {
    pub best: Vec<f64>,
    pub value: f64,
    /// Best-so-far value after each iteration / generation.
    pub trace: Vec<f64>,
    /// Objective evaluations spent, initialization included.
    pub evaluations: usize,
    /// Evaluations that returned NaN and were scored as `+inf`.
    pub nan_evaluations: usize,
}

impl OptimResult {
    /// `iteration,best_value` CSV, one row per trace entry (1-based).
    pub fn trace_csv(&self) -> String {
        trace_to_csv(&self.trace)
    }
}

pub(crate) fn trace_to_csv(trace: &[f64]) -> String {
    let mut out = String::from("iteration,best_value\n");
    for (i, v) in trace.iter().enumerate() {
        writeln!(out, "{},{}", i + 1, v).unwrap();
    }
    out
}

/// NaN objective values are scored as `+inf` so they never become a best.
#[inline]
pub(crate) fn sanitize(value: f64) -> (f64, bool) {
    if value.is_nan() {
        (f64::INFINITY, true)
    } else {
        (value, false)
    }
}

#[inline]
pub(crate) fn clamp_to(x: &mut [f64], bounds: &[crate::Bounds]) {
    for (xi, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *xi = xi.clamp(lo, hi);
    }
}
