//! Real-coded genome for the structure of a fuzzy model, and the
//! train-then-validate fitness the optimizers minimize.
//!
//! Layout of the 133 genes, all in `[0, 1]`:
//!
//! | genes      | meaning                                            |
//! |------------|----------------------------------------------------|
//! | 0          | rule count, 1..=10                                 |
//! | 1..7       | MF count per input, 1..=5                          |
//! | 7..13      | MF type per input (triangle, gaussian, trapezoid)  |
//! | 13..73     | (center, width) per MF, input-major, 5 slots each  |
//! | 73..133    | antecedent MF index, rule-major, 6 slots per rule  |
//!
//! Genes past the active counts are ignored.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::anfis::{self, TrainConfig};
use crate::data::Dataset;
use crate::fis::{ConsequentOrder, FisModel, MembershipFunction, MfKind, Rule};
use crate::Bounds;

pub const MAX_RULES: usize = 10;
pub const MAX_INPUTS: usize = 6;
pub const MAX_MFS: usize = 5;
pub const SHAPE_GENES_PER_MF: usize = 2;
pub const GENOME_LEN: usize = 1 + MAX_INPUTS + MAX_INPUTS + MAX_INPUTS * MAX_MFS * SHAPE_GENES_PER_MF + MAX_RULES * MAX_INPUTS;

const MF_COUNT_OFFSET: usize = 1;
const MF_TYPE_OFFSET: usize = MF_COUNT_OFFSET + MAX_INPUTS;
const SHAPE_OFFSET: usize = MF_TYPE_OFFSET + MAX_INPUTS;
const ANTECEDENT_OFFSET: usize = SHAPE_OFFSET + MAX_INPUTS * MAX_MFS * SHAPE_GENES_PER_MF;

/// Smallest decoded MF width.
pub const MIN_WIDTH: f64 = 1e-3;

/// Objective value for genomes whose training diverged or produced a
/// non-finite error.
pub const PENALTY: f64 = 1e6;

#[derive(Debug, Error, PartialEq)]
pub enum TunerError {
    #[error("genome has {0} genes, expected {GENOME_LEN}")]
    Length(usize),
    #[error("genome supports 1 to {MAX_INPUTS} inputs, got {0}")]
    Inputs(usize),
    #[error(transparent)]
    Train(#[from] anfis::AnfisError),
}

/// Index into `k` equal bins of `[0, 1]`, with `g = 1` in the last bin.
fn bin(g: f64, k: usize) -> usize {
    ((g.clamp(0.0, 1.0) * k as f64).floor() as usize).min(k - 1)
}

/// Gene value at the middle of bin `i` of `k`.
pub fn bin_center(i: usize, k: usize) -> f64 {
    (i as f64 + 0.5) / k as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FisGenome(pub Vec<f64>);

impl FisGenome {
    pub fn new(genes: Vec<f64>) -> Result<Self, TunerError> {
        if genes.len() != GENOME_LEN {
            return Err(TunerError::Length(genes.len()));
        }
        Ok(FisGenome(genes))
    }

    pub fn bounds() -> Vec<Bounds> {
        vec![(0.0, 1.0); GENOME_LEN]
    }

    pub fn genes(&self) -> &[f64] {
        &self.0
    }

    fn gene(&self, i: usize) -> f64 {
        self.0[i].clamp(0.0, 1.0)
    }

    pub fn rule_count(&self) -> usize {
        bin(self.gene(0), MAX_RULES) + 1
    }

    pub fn mf_count(&self, input: usize) -> usize {
        bin(self.gene(MF_COUNT_OFFSET + input), MAX_MFS) + 1
    }

    pub fn mf_kind(&self, input: usize) -> MfKind {
        MfKind::ALL[bin(self.gene(MF_TYPE_OFFSET + input), MfKind::ALL.len())]
    }

    /// `(center, width)` genes of MF `mf` of `input`.
    pub fn shape(&self, input: usize, mf: usize) -> (f64, f64) {
        let at = SHAPE_OFFSET + (input * MAX_MFS + mf) * SHAPE_GENES_PER_MF;
        (self.gene(at), self.gene(at + 1))
    }

    pub fn antecedent(&self, rule: usize, input: usize) -> usize {
        bin(self.gene(ANTECEDENT_OFFSET + rule * MAX_INPUTS + input), MAX_MFS) % self.mf_count(input)
    }
}

/// Membership function built from a `(center, width)` gene pair.
pub fn shape_to_mf(kind: MfKind, center: f64, width: f64) -> MembershipFunction {
    let w = width.max(MIN_WIDTH);
    let c = center;
    let mf = match kind {
        MfKind::Triangle => MembershipFunction::Triangle {
            a: c - w,
            b: c,
            c: c + w,
        },
        MfKind::Gaussian => MembershipFunction::Gaussian {
            center: c,
            sigma: (w * 0.5).max(MIN_WIDTH),
        },
        MfKind::Trapezoid => MembershipFunction::Trapezoid {
            a: c - w,
            b: c - w / 2.0,
            c: c + w / 2.0,
            d: c + w,
        },
    };
    mf.repaired()
}

/// Decodes a genome into a first-order model over `n_inputs` inputs with
/// zero consequents. Genes outside `[0, 1]` are clamped.
pub fn decode(genome: &FisGenome, n_inputs: usize) -> Result<FisModel, TunerError> {
    if genome.0.len() != GENOME_LEN {
        return Err(TunerError::Length(genome.0.len()));
    }
    if n_inputs == 0 || n_inputs > MAX_INPUTS {
        return Err(TunerError::Inputs(n_inputs));
    }
    let inputs: Vec<Vec<MembershipFunction>> = (0..n_inputs)
        .map(|i| {
            let kind = genome.mf_kind(i);
            (0..genome.mf_count(i))
                .map(|m| {
                    let (c, w) = genome.shape(i, m);
                    shape_to_mf(kind, c, w)
                })
                .collect()
        })
        .collect();
    let order = ConsequentOrder::First;
    let rules = (0..genome.rule_count())
        .map(|r| Rule {
            antecedent: (0..n_inputs).map(|i| genome.antecedent(r, i)).collect(),
            consequent: vec![0.0; order.coefficients(n_inputs)],
        })
        .collect();
    Ok(FisModel::new(inputs, rules, order).expect("decoded models satisfy the model invariants"))
}

/// Genome for the unoptimized reference model: two Gaussian MFs per input
/// centered on the ends of the normalized range and crossing at 0.5 with
/// degree 0.5, plus two rules (all inputs low, all inputs high).
pub fn default_genome() -> FisGenome {
    let mut g = vec![0.5; GENOME_LEN];
    g[0] = bin_center(1, MAX_RULES);
    let sigma = 0.5 / (2.0 * std::f64::consts::LN_2).sqrt();
    for i in 0..MAX_INPUTS {
        g[MF_COUNT_OFFSET + i] = bin_center(1, MAX_MFS);
        g[MF_TYPE_OFFSET + i] = bin_center(1, MfKind::ALL.len());
        for (m, center) in [0.0, 1.0].into_iter().enumerate() {
            let at = SHAPE_OFFSET + (i * MAX_MFS + m) * SHAPE_GENES_PER_MF;
            g[at] = center;
            g[at + 1] = 2.0 * sigma;
        }
        for r in 0..2 {
            g[ANTECEDENT_OFFSET + r * MAX_INPUTS + i] = bin_center(r, MAX_MFS);
        }
    }
    FisGenome(g)
}

/// One-line structural summary, e.g. `rules=2 mfs=[2,2] types=[gaussian,gaussian]`.
pub fn summarize(model: &FisModel) -> String {
    let counts: Vec<String> = model.inputs.iter().map(|mfs| mfs.len().to_string()).collect();
    let kinds: Vec<String> = model
        .inputs
        .iter()
        .map(|mfs| mfs.first().map_or(String::from("-"), |m| m.kind().to_string()))
        .collect();
    format!("rules={} mfs=[{}] types=[{}]", model.n_rules(), counts.join(","), kinds.join(","))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitnessReport {
    pub genome: FisGenome,
    pub summary: String,
    pub train_rmse: f64,
    pub val_rmse: f64,
    pub epochs: usize,
    /// Training diverged or an error was non-finite; `objective` is [`PENALTY`].
    pub penalized: bool,
    pub objective: f64,
}

/// Fitness context: decodes a genome, trains it on `train` and scores it on
/// `val`. Training uses `train_cfg` as given, so its seed must come from the
/// experiment rather than the genome.
#[derive(Clone, Debug)]
pub struct Fitness<'a> {
    pub train: &'a Dataset,
    pub val: &'a Dataset,
    pub train_cfg: TrainConfig,
}

impl<'a> Fitness<'a> {
    pub fn new(train: &'a Dataset, val: &'a Dataset, train_cfg: TrainConfig) -> Self {
        Fitness { train, val, train_cfg }
    }

    pub fn train_model(&self, genome: &FisGenome) -> Result<(FisModel, FitnessReport), TunerError> {
        let model = decode(genome, self.train.n_features())?;
        let summary = summarize(&model);
        let trace = anfis::train(&model, self.train, &self.train_cfg)?;
        let val_rmse = anfis::evaluate_rmse(&trace.model, self.val);
        let penalized = trace.diverged || !trace.final_rmse.is_finite() || !val_rmse.is_finite();
        let report = FitnessReport {
            genome: genome.clone(),
            summary,
            train_rmse: trace.final_rmse,
            val_rmse,
            epochs: trace.rmse.len(),
            penalized,
            objective: if penalized { PENALTY } else { val_rmse.min(PENALTY) },
        };
        Ok((trace.model, report))
    }

    pub fn report(&self, genome: &FisGenome) -> Result<FitnessReport, TunerError> {
        self.train_model(genome).map(|(_, r)| r)
    }

    /// Objective for the optimizers: validation RMSE, or [`PENALTY`].
    pub fn objective(&self, genes: &[f64]) -> f64 {
        match FisGenome::new(genes.to_vec()).and_then(|g| self.report(&g)) {
            Ok(r) => r.objective,
            Err(_) => PENALTY,
        }
    }
}
