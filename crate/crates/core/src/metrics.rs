//! Error and correlation measures reported for every trained model.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("prediction and target lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {0} values")]
    TooShort(usize),
}

fn check(pred: &[f64], target: &[f64], min_len: usize) -> Result<(), MetricsError> {
    if pred.len() != target.len() {
        return Err(MetricsError::LengthMismatch(pred.len(), target.len()));
    }
    if pred.len() < min_len {
        return Err(MetricsError::TooShort(min_len));
    }
    Ok(())
}

pub fn mse(pred: &[f64], target: &[f64]) -> Result<f64, MetricsError> {
    check(pred, target, 1)?;
    let sum: f64 = pred.iter().zip(target).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok(sum / pred.len() as f64)
}

pub fn rmse(pred: &[f64], target: &[f64]) -> Result<f64, MetricsError> {
    mse(pred, target).map(f64::sqrt)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RValue {
    pub value: f64,
    /// One of the vectors was constant, so the correlation is undefined and
    /// `value` is reported as 0.
    pub degenerate: bool,
}

/// Pearson correlation between predictions and targets.
pub fn r_value(pred: &[f64], target: &[f64]) -> Result<RValue, MetricsError> {
    check(pred, target, 2)?;
    let n = pred.len() as f64;
    let mp = pred.iter().sum::<f64>() / n;
    let mt = target.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (p, t) in pred.iter().zip(target) {
        let (dp, dt) = (p - mp, t - mt);
        sxy += dp * dt;
        sxx += dp * dp;
        syy += dt * dt;
    }
    if !(sxx > 0.0 && syy > 0.0) || !sxy.is_finite() {
        return Ok(RValue {
            value: 0.0,
            degenerate: true,
        });
    }
    Ok(RValue {
        value: (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0),
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rmse_examples() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(rmse(&[2.0, 3.0, 4.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert!((rmse(&[0.2, 0.8], &[0.0, 1.0]).unwrap() - 0.2).abs() < 1e-15);
        assert!((mse(&[0.2, 0.8], &[0.0, 1.0]).unwrap() - 0.04).abs() < 1e-15);
    }

    #[test]
    fn rmse_errors() {
        assert_eq!(rmse(&[1.0], &[1.0, 2.0]), Err(MetricsError::LengthMismatch(1, 2)));
        assert_eq!(rmse(&[], &[]), Err(MetricsError::TooShort(1)));
    }

    #[test]
    fn r_value_examples() {
        let t = [0.3, 1.2, -0.5, 2.0];
        assert!((r_value(&t, &t).unwrap().value - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = t.iter().map(|v| -v).collect();
        assert!((r_value(&neg, &t).unwrap().value + 1.0).abs() < 1e-12);
        // Hand computation: cov 2.5, var 1 and 6.333.. -> 2.5 / sqrt(6.333..).
        let r = r_value(&[1.0, 2.0, 3.0], &[2.0, 4.0, 7.0]).unwrap();
        assert!((r.value - 0.9933992677987828).abs() < 1e-12);
        assert!(!r.degenerate);
    }

    #[test]
    fn constant_vector_is_degenerate() {
        let r = r_value(&[1.0, 1.0, 1.0], &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(r, RValue { value: 0.0, degenerate: true });
        assert_eq!(r_value(&[1.0], &[1.0]), Err(MetricsError::TooShort(2)));
    }
}
