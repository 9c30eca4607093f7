//! First-order Takagi–Sugeno inference (ANFIS layers 1–5).
//!
//! Layer 1 evaluates membership functions, layer 2 multiplies the selected
//! degrees into rule firing strengths (product t-norm), layer 3 normalizes
//! them, layer 4 scales each rule's linear consequent and layer 5 sums.

use std::fmt::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Lower bound kept on Gaussian widths after repairs.
pub const MIN_SIGMA: f64 = 1e-4;

#[derive(Debug, Error, PartialEq)]
pub enum FisError {
    #[error("model has no rules")]
    NoRules,
    #[error("model has no inputs")]
    NoInputs,
    #[error("input {0} has no membership functions")]
    NoMembershipFunctions(usize),
    #[error("rule {rule}: antecedent has {found} entries, model has {inputs} inputs")]
    AntecedentLength { rule: usize, found: usize, inputs: usize },
    #[error("rule {rule}: input {input} references MF {index}, only {available} exist")]
    MfIndex {
        rule: usize,
        input: usize,
        index: usize,
        available: usize,
    },
    #[error("rule {rule}: expected {expected} consequent coefficients, found {found}")]
    ConsequentLength { rule: usize, expected: usize, found: usize },
    #[error("input {input} MF {mf}: {reason}")]
    InvalidMf { input: usize, mf: usize, reason: &'static str },
    #[error("non-finite consequent coefficient in rule {0}")]
    NonFiniteConsequent(usize),
    #[error("invalid model JSON: {0}")]
    Json(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MfKind {
    Triangle,
    Gaussian,
    Trapezoid,
}

impl MfKind {
    pub const ALL: [MfKind; 3] = [MfKind::Triangle, MfKind::Gaussian, MfKind::Trapezoid];

    pub fn n_params(self) -> usize {
        match self {
            MfKind::Triangle => 3,
            MfKind::Gaussian => 2,
            MfKind::Trapezoid => 4,
        }
    }
}

impl fmt::Display for MfKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MfKind::Triangle => "triangle",
            MfKind::Gaussian => "gaussian",
            MfKind::Trapezoid => "trapezoid",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MembershipFunction {
    /// `a <= b <= c`, peak at `b`.
    Triangle { a: f64, b: f64, c: f64 },
    Gaussian { center: f64, sigma: f64 },
    /// `a <= b <= c <= d`, plateau on `[b, c]`.
    Trapezoid { a: f64, b: f64, c: f64, d: f64 },
}

// Rising edge on (lo, hi) and falling edge on (lo, hi); callers guarantee
// the strict interior so the denominators are positive.
#[inline]
fn rise(x: f64, lo: f64, hi: f64) -> f64 {
    (x - lo) / (hi - lo)
}

#[inline]
fn fall(x: f64, lo: f64, hi: f64) -> f64 {
    (hi - x) / (hi - lo)
}

impl MembershipFunction {
    pub fn kind(&self) -> MfKind {
        match self {
            MembershipFunction::Triangle { .. } => MfKind::Triangle,
            MembershipFunction::Gaussian { .. } => MfKind::Gaussian,
            MembershipFunction::Trapezoid { .. } => MfKind::Trapezoid,
        }
    }

    pub fn n_params(&self) -> usize {
        self.kind().n_params()
    }

    /// Membership degree in `[0, 1]`; zero outside the support.
    pub fn eval(&self, x: f64) -> f64 {
        let y = match *self {
            MembershipFunction::Triangle { a, b, c } => {
                if x < a || x > c {
                    0.0
                } else if x < b {
                    rise(x, a, b)
                } else if x == b {
                    1.0
                } else {
                    fall(x, b, c)
                }
            }
            MembershipFunction::Gaussian { center, sigma } => {
                let u = (x - center) / sigma;
                (-0.5 * u * u).exp()
            }
            MembershipFunction::Trapezoid { a, b, c, d } => {
                if x < a || x > d {
                    0.0
                } else if x < b {
                    rise(x, a, b)
                } else if x <= c {
                    1.0
                } else {
                    fall(x, c, d)
                }
            }
        };
        if y.is_nan() {
            0.0
        } else {
            y.clamp(0.0, 1.0)
        }
    }

    /// Partial derivatives of the degree at `x` w.r.t. each parameter, in
    /// declaration order. Piecewise-linear kinds use the interior one-sided
    /// derivative and report 0 exactly on a breakpoint.
    pub fn param_gradient(&self, x: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|g| *g = 0.0);
        match *self {
            MembershipFunction::Triangle { a, b, c } => {
                if a < x && x < b {
                    let d = b - a;
                    out[0] = (x - b) / (d * d);
                    out[1] = -(x - a) / (d * d);
                } else if b < x && x < c {
                    let d = c - b;
                    out[1] = (c - x) / (d * d);
                    out[2] = (x - b) / (d * d);
                }
            }
            MembershipFunction::Gaussian { center, sigma } => {
                let dx = x - center;
                let mu = (-0.5 * dx * dx / (sigma * sigma)).exp();
                out[0] = mu * dx / (sigma * sigma);
                out[1] = mu * dx * dx / (sigma * sigma * sigma);
            }
            MembershipFunction::Trapezoid { a, b, c, d } => {
                if a < x && x < b {
                    let w = b - a;
                    out[0] = (x - b) / (w * w);
                    out[1] = -(x - a) / (w * w);
                } else if c < x && x < d {
                    let w = d - c;
                    out[2] = (d - x) / (w * w);
                    out[3] = (x - c) / (w * w);
                }
            }
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            MembershipFunction::Triangle { a, b, c } => vec![a, b, c],
            MembershipFunction::Gaussian { center, sigma } => vec![center, sigma],
            MembershipFunction::Trapezoid { a, b, c, d } => vec![a, b, c, d],
        }
    }

    /// Overwrites the parameters in declaration order; `p` must hold exactly
    /// [`n_params`](Self::n_params) values. No repair is applied.
    pub fn set_params(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.n_params(), "parameter count mismatch");
        match self {
            MembershipFunction::Triangle { a, b, c } => {
                (*a, *b, *c) = (p[0], p[1], p[2]);
            }
            MembershipFunction::Gaussian { center, sigma } => {
                (*center, *sigma) = (p[0], p[1]);
            }
            MembershipFunction::Trapezoid { a, b, c, d } => {
                (*a, *b, *c, *d) = (p[0], p[1], p[2], p[3]);
            }
        }
    }

    /// Restores the ordering / width invariants: breakpoints are sorted
    /// ascending and Gaussian widths are floored at [`MIN_SIGMA`].
    pub fn repair(&mut self) {
        match self {
            MembershipFunction::Gaussian { sigma, .. } => {
                if !(sigma.abs() >= MIN_SIGMA) {
                    *sigma = MIN_SIGMA;
                } else {
                    *sigma = sigma.abs();
                }
            }
            _ => {
                let mut p = self.params();
                p.sort_by(f64::total_cmp);
                self.set_params(&p);
            }
        }
    }

    pub fn repaired(mut self) -> Self {
        self.repair();
        self
    }

    pub fn check(&self) -> Result<(), &'static str> {
        let p = self.params();
        if p.iter().any(|v| !v.is_finite()) {
            return Err("non-finite parameter");
        }
        match *self {
            MembershipFunction::Gaussian { sigma, .. } if sigma <= 0.0 => Err("gaussian sigma must be positive"),
            MembershipFunction::Gaussian { .. } => Ok(()),
            _ if p.windows(2).any(|w| w[0] > w[1]) => Err("breakpoints must be non-decreasing"),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ConsequentOrder {
    /// Constant output per rule (one coefficient).
    Zeroth,
    /// Linear in every input plus a bias (`n_inputs + 1` coefficients).
    #[default]
    First,
}

impl ConsequentOrder {
    pub fn coefficients(self, n_inputs: usize) -> usize {
        match self {
            ConsequentOrder::Zeroth => 1,
            ConsequentOrder::First => n_inputs + 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    /// MF index per input variable.
    pub antecedent: Vec<usize>,
    /// `[p_1, .., p_k, r]` for first order, `[r]` for zeroth order.
    pub consequent: Vec<f64>,
}

impl Rule {
    /// Value of the rule's consequent at `x`.
    #[inline]
    pub fn output(&self, x: &[f64]) -> f64 {
        let (bias, slopes) = self.consequent.split_last().expect("consequent is never empty");
        slopes.iter().zip(x).map(|(p, xi)| p * xi).sum::<f64>() + bias
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Firing {
    pub raw: Vec<f64>,
    pub normalized: Vec<f64>,
    /// Every raw strength was zero; `normalized` holds the uniform `1/R`.
    pub fallback: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Inference {
    pub output: f64,
    pub fallback: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FisModel {
    /// Membership functions of each input variable.
    pub inputs: Vec<Vec<MembershipFunction>>,
    pub rules: Vec<Rule>,
    #[serde(default)]
    pub order: ConsequentOrder,
}

impl FisModel {
    pub fn new(
        inputs: Vec<Vec<MembershipFunction>>,
        rules: Vec<Rule>,
        order: ConsequentOrder,
    ) -> Result<Self, FisError> {
        let model = FisModel { inputs, rules, order };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), FisError> {
        if self.inputs.is_empty() {
            return Err(FisError::NoInputs);
        }
        if self.rules.is_empty() {
            return Err(FisError::NoRules);
        }
        for (i, mfs) in self.inputs.iter().enumerate() {
            if mfs.is_empty() {
                return Err(FisError::NoMembershipFunctions(i));
            }
            for (m, mf) in mfs.iter().enumerate() {
                mf.check()
                    .map_err(|reason| FisError::InvalidMf { input: i, mf: m, reason })?;
            }
        }
        let n = self.n_inputs();
        let k = self.order.coefficients(n);
        for (r, rule) in self.rules.iter().enumerate() {
            if rule.antecedent.len() != n {
                return Err(FisError::AntecedentLength {
                    rule: r,
                    found: rule.antecedent.len(),
                    inputs: n,
                });
            }
            for (i, &m) in rule.antecedent.iter().enumerate() {
                if m >= self.inputs[i].len() {
                    return Err(FisError::MfIndex {
                        rule: r,
                        input: i,
                        index: m,
                        available: self.inputs[i].len(),
                    });
                }
            }
            if rule.consequent.len() != k {
                return Err(FisError::ConsequentLength {
                    rule: r,
                    expected: k,
                    found: rule.consequent.len(),
                });
            }
            if rule.consequent.iter().any(|v| !v.is_finite()) {
                return Err(FisError::NonFiniteConsequent(r));
            }
        }
        Ok(())
    }

    pub fn n_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn n_rules(&self) -> usize {
        self.rules.len()
    }

    /// Layer 1: degree of every MF of every input at `x`.
    pub fn memberships(&self, x: &[f64]) -> Vec<Vec<f64>> {
        assert_eq!(x.len(), self.n_inputs(), "input length mismatch");
        self.inputs
            .iter()
            .zip(x)
            .map(|(mfs, &xi)| mfs.iter().map(|mf| mf.eval(xi)).collect())
            .collect()
    }

    /// Layers 2–3 from precomputed memberships.
    pub fn fire_from_memberships(&self, mu: &[Vec<f64>]) -> Firing {
        let raw: Vec<f64> = self
            .rules
            .iter()
            .map(|rule| rule.antecedent.iter().enumerate().map(|(i, &m)| mu[i][m]).product())
            .collect();
        let total: f64 = raw.iter().sum();
        if total > 0.0 && total.is_finite() {
            let normalized = raw.iter().map(|w| w / total).collect();
            Firing {
                raw,
                normalized,
                fallback: false,
            }
        } else {
            let r = raw.len();
            Firing {
                raw,
                normalized: vec![1.0 / r as f64; r],
                fallback: true,
            }
        }
    }

    pub fn fire_rules(&self, x: &[f64]) -> Firing {
        self.fire_from_memberships(&self.memberships(x))
    }

    pub fn evaluate(&self, x: &[f64]) -> Inference {
        let firing = self.fire_rules(x);
        let output = firing
            .normalized
            .iter()
            .zip(&self.rules)
            .map(|(w, rule)| w * rule.output(x))
            .sum();
        Inference {
            output,
            fallback: firing.fallback,
        }
    }

    pub fn infer(&self, x: &[f64]) -> f64 {
        self.evaluate(x).output
    }

    pub fn predict(&self, rows: &[Vec<f64>]) -> Vec<f64> {
        rows.iter().map(|x| self.infer(x)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, FisError> {
        let model: FisModel = serde_json::from_str(text).map_err(|e| FisError::Json(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    /// Human-readable IF-THEN rendering of the rule base. `names` labels the
    /// inputs; missing names fall back to `x1..xn`.
    pub fn describe(&self, names: &[&str]) -> String {
        let label = |i: usize| names.get(i).map_or_else(|| format!("x{}", i + 1), |s| s.to_string());
        let mut out = String::new();
        writeln!(out, "Inputs:").unwrap();
        for (i, mfs) in self.inputs.iter().enumerate() {
            for (m, mf) in mfs.iter().enumerate() {
                writeln!(out, "  {}.mf{} = {}", label(i), m + 1, format_mf(mf)).unwrap();
            }
        }
        writeln!(out, "Rules:").unwrap();
        for (r, rule) in self.rules.iter().enumerate() {
            let premise: Vec<String> = rule
                .antecedent
                .iter()
                .enumerate()
                .map(|(i, &m)| format!("{} is mf{}", label(i), m + 1))
                .collect();
            let (bias, slopes) = rule.consequent.split_last().unwrap();
            let mut rhs: Vec<String> = slopes
                .iter()
                .enumerate()
                .map(|(i, p)| format!("{p:+.4}*{}", label(i)))
                .collect();
            rhs.push(format!("{bias:+.4}"));
            writeln!(out, "  R{}: IF {} THEN y = {}", r + 1, premise.join(" AND "), rhs.join(" ")).unwrap();
        }
        out
    }
}

fn format_mf(mf: &MembershipFunction) -> String {
    match *mf {
        MembershipFunction::Triangle { a, b, c } => format!("triangle({a:.4}, {b:.4}, {c:.4})"),
        MembershipFunction::Gaussian { center, sigma } => format!("gaussian(c={center:.4}, sigma={sigma:.4})"),
        MembershipFunction::Trapezoid { a, b, c, d } => format!("trapezoid({a:.4}, {b:.4}, {c:.4}, {d:.4})"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gauss(center: f64, sigma: f64) -> MembershipFunction {
        MembershipFunction::Gaussian { center, sigma }
    }

    fn constant_rule(antecedent: Vec<usize>, r: f64) -> Rule {
        Rule {
            antecedent,
            consequent: vec![r],
        }
    }

    #[test]
    fn mf_reference_values() {
        assert_eq!(gauss(0.5, 0.1).eval(0.5), 1.0);
        let tri = MembershipFunction::Triangle { a: 0.0, b: 0.5, c: 1.0 };
        assert_eq!(tri.eval(0.25), 0.5);
        assert_eq!(tri.eval(-0.1), 0.0);
        assert_eq!(tri.eval(1.1), 0.0);
        let trap = MembershipFunction::Trapezoid { a: 0.0, b: 0.2, c: 0.8, d: 1.0 };
        assert_eq!(trap.eval(0.5), 1.0);
        assert!((trap.eval(0.9) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_triangle_has_no_nan() {
        let tri = MembershipFunction::Triangle { a: 0.0, b: 0.5, c: 0.5 };
        for x in [0.0, 0.25, 0.4999999, 0.5, 0.5000001, 1.0] {
            let y = tri.eval(x);
            assert!(y.is_finite() && (0.0..=1.0).contains(&y));
        }
        assert_eq!(tri.eval(0.5), 1.0);
        let spike = MembershipFunction::Triangle { a: 0.3, b: 0.3, c: 0.3 };
        assert_eq!(spike.eval(0.3), 1.0);
        assert_eq!(spike.eval(0.31), 0.0);
    }

    #[test]
    fn repair_sorts_and_floors() {
        let t = MembershipFunction::Triangle { a: 0.9, b: 0.1, c: 0.5 }.repaired();
        assert_eq!(t, MembershipFunction::Triangle { a: 0.1, b: 0.5, c: 0.9 });
        assert_eq!(gauss(0.2, 0.0).repaired(), gauss(0.2, MIN_SIGMA));
        assert_eq!(gauss(0.2, -0.3).repaired(), gauss(0.2, 0.3));
    }

    #[test]
    fn firing_normalization_examples() {
        let one = FisModel::new(vec![vec![gauss(0.5, 0.1)]], vec![constant_rule(vec![0], 0.7)], ConsequentOrder::Zeroth)
            .unwrap();
        let f = one.fire_rules(&[0.5]);
        assert_eq!(f.raw, vec![1.0]);
        assert_eq!(f.normalized, vec![1.0]);
        assert_eq!(one.infer(&[0.5]), 0.7);
        assert!((one.infer(&[0.8]) - 0.7).abs() < 1e-12);

        // Two ramps giving raw strengths (0.6, 0.2) at x = 0.6.
        let m = FisModel::new(
            vec![vec![
                MembershipFunction::Triangle { a: 0.0, b: 1.0, c: 2.0 },
                MembershipFunction::Triangle { a: 0.4, b: 1.4, c: 2.4 },
            ]],
            vec![constant_rule(vec![0], 1.0), constant_rule(vec![1], -1.0)],
            ConsequentOrder::Zeroth,
        )
        .unwrap();
        let f = m.fire_rules(&[0.6]);
        assert!((f.raw[0] - 0.6).abs() < 1e-12 && (f.raw[1] - 0.2).abs() < 1e-12);
        assert!((f.normalized[0] - 0.75).abs() < 1e-12);
        assert!((f.normalized[1] - 0.25).abs() < 1e-12);

        let f = m.fire_from_memberships(&[vec![0.2, 0.2]]);
        assert_eq!(f.normalized, vec![0.5, 0.5]);
    }

    #[test]
    fn weighted_average_examples() {
        // Equal firing, constants 0 and 1.
        let m = FisModel::new(
            vec![vec![gauss(0.5, 0.2), gauss(0.5, 0.2)]],
            vec![constant_rule(vec![0], 0.0), constant_rule(vec![1], 1.0)],
            ConsequentOrder::Zeroth,
        )
        .unwrap();
        assert!((m.infer(&[0.1]) - 0.5).abs() < 1e-15);

        // Normalized (0.75, 0.25) with constants (1, -1).
        let m = FisModel::new(
            vec![vec![
                MembershipFunction::Trapezoid { a: -1.0, b: 0.0, c: 1.0, d: 2.0 },
                MembershipFunction::Triangle { a: 0.0, b: 1.0, c: 2.0 },
            ]],
            vec![constant_rule(vec![0], 1.0), constant_rule(vec![1], -1.0)],
            ConsequentOrder::Zeroth,
        )
        .unwrap();
        // At x = 1/3: trapezoid 1.0, triangle 1/3 -> normalized (0.75, 0.25).
        assert!((m.infer(&[1.0 / 3.0]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_firing_uses_uniform_fallback() {
        let m = FisModel::new(
            vec![vec![
                MembershipFunction::Triangle { a: 0.0, b: 0.1, c: 0.2 },
                MembershipFunction::Triangle { a: 0.3, b: 0.4, c: 0.5 },
            ]],
            vec![constant_rule(vec![0], 2.0), constant_rule(vec![1], 4.0)],
            ConsequentOrder::Zeroth,
        )
        .unwrap();
        let f = m.fire_rules(&[0.9]);
        assert!(f.fallback);
        assert_eq!(f.normalized, vec![0.5, 0.5]);
        let inf = m.evaluate(&[0.9]);
        assert!(inf.fallback);
        assert_eq!(inf.output, 3.0);
    }

    #[test]
    fn first_order_consequent() {
        let rule = Rule {
            antecedent: vec![0, 0],
            consequent: vec![2.0, -1.0, 0.5],
        };
        assert_eq!(rule.output(&[1.0, 3.0]), 2.0 - 3.0 + 0.5);
    }

    #[test]
    fn validation_catches_structural_errors() {
        let mfs = vec![vec![gauss(0.0, 1.0)]];
        assert_eq!(FisModel::new(mfs.clone(), vec![], ConsequentOrder::First), Err(FisError::NoRules));
        assert!(matches!(
            FisModel::new(mfs.clone(), vec![constant_rule(vec![1], 0.0)], ConsequentOrder::Zeroth),
            Err(FisError::MfIndex { .. })
        ));
        assert!(matches!(
            FisModel::new(mfs.clone(), vec![constant_rule(vec![0], 0.0)], ConsequentOrder::First),
            Err(FisError::ConsequentLength { expected: 2, .. })
        ));
        assert!(matches!(
            FisModel::new(vec![vec![gauss(0.0, 0.0)]], vec![constant_rule(vec![0], 0.0)], ConsequentOrder::Zeroth),
            Err(FisError::InvalidMf { .. })
        ));
        assert!(matches!(
            FisModel::new(vec![vec![]], vec![constant_rule(vec![0], 0.0)], ConsequentOrder::Zeroth),
            Err(FisError::NoMembershipFunctions(0))
        ));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let m = FisModel::new(
            vec![
                vec![gauss(0.2, 0.1), MembershipFunction::Triangle { a: 0.0, b: 0.5, c: 1.0 }],
                vec![MembershipFunction::Trapezoid { a: 0.0, b: 0.1, c: 0.2, d: 0.3 }],
            ],
            vec![Rule {
                antecedent: vec![1, 0],
                consequent: vec![0.1, 0.2, 0.3],
            }],
            ConsequentOrder::First,
        )
        .unwrap();
        let back = FisModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        let broken = m.to_json().replace("\"antecedent\": [\n        1,", "\"antecedent\": [\n        5,");
        assert!(FisModel::from_json(&broken).is_err());
        assert!(m.describe(&["mcv", "alkphos"]).contains("R1: IF mcv is mf2 AND alkphos is mf1"));
    }

    fn arb_mf() -> impl Strategy<Value = MembershipFunction> {
        prop_oneof![
            (-1.0..2.0f64, -1.0..2.0f64, -1.0..2.0f64)
                .prop_map(|(a, b, c)| MembershipFunction::Triangle { a, b, c }.repaired()),
            (-1.0..2.0f64, 1e-3..2.0f64).prop_map(|(c, s)| gauss(c, s)),
            (-1.0..2.0f64, -1.0..2.0f64, -1.0..2.0f64, -1.0..2.0f64)
                .prop_map(|(a, b, c, d)| MembershipFunction::Trapezoid { a, b, c, d }.repaired()),
        ]
    }

    proptest! {
        #[test]
        fn mf_degree_in_unit_interval(mf in arb_mf(), x in -5.0..5.0f64) {
            let y = mf.eval(x);
            prop_assert!((0.0..=1.0).contains(&y));
        }

        #[test]
        fn constant_consequents_reproduce_constant(
            centers in proptest::collection::vec(0.0..1.0f64, 1..5),
            v in -3.0..3.0f64,
            x in 0.0..1.0f64,
        ) {
            let mfs: Vec<_> = centers.iter().map(|&c| gauss(c, 0.3)).collect();
            let rules = (0..mfs.len()).map(|m| constant_rule(vec![m], v)).collect();
            let m = FisModel::new(vec![mfs], rules, ConsequentOrder::Zeroth).unwrap();
            prop_assert!((m.infer(&[x]) - v).abs() <= 1e-12 * v.abs().max(1.0));
        }
    }
}
