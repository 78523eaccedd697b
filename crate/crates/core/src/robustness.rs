//! Confusion matrices, rate statistics and coupling × length sweeps.
//!
//! A sweep is split into independent [`SweepTask`]s so callers can run them
//! in any order or in parallel; [`assemble`] sorts outcomes before tallying.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::asymmetry::{detect, normalized_asymmetry};
use crate::data::{add_observational_noise_all, TimeSeries};
use crate::embedding::EmbeddingParams;
use crate::error::{Error, Result};
use crate::estimators::{te_spectrum, Estimator};
use crate::rng::Seed;
use crate::stats::median;
use crate::systems::{generate, random_chain, Coupling, Family, Realization};

/// Tally of binary predictions against ground truth.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn record(&mut self, predicted: bool, truth: bool) {
        match (predicted, truth) {
            (true, true) => self.tp += 1,
            (false, false) => self.tn += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        self.tp += other.tp;
        self.tn += other.tn;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }
}

/// Element-wise tally of predictions against truths.
pub fn confusion(preds: &[bool], truths: &[bool]) -> Result<ConfusionMatrix> {
    if preds.len() != truths.len() {
        return Err(Error::LengthMismatch { expected: truths.len(), found: preds.len() });
    }
    let mut cm = ConfusionMatrix::default();
    for (&p, &t) in preds.iter().zip(truths) {
        cm.record(p, t);
    }
    Ok(cm)
}

/// Matthews correlation coefficient; 0 when any marginal is empty.
pub fn mcc(cm: &ConfusionMatrix) -> Result<f64> {
    if cm.total() == 0 {
        return Err(Error::EmptyMatrix);
    }
    let [tp, tn, fp, fn_] = [cm.tp, cm.tn, cm.fp, cm.fn_].map(|v| v as f64);
    let denom = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(((tp * tn - fp * fn_) / libm::sqrt(denom)).clamp(-1.0, 1.0))
}

/// Standard rates; `None` where the denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub accuracy: Option<f64>,
    pub tpr: Option<f64>,
    pub tnr: Option<f64>,
    pub fpr: Option<f64>,
    pub fnr: Option<f64>,
    pub ppv: Option<f64>,
    pub npv: Option<f64>,
    pub f1: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn rates(cm: &ConfusionMatrix) -> Rates {
    let &ConfusionMatrix { tp, tn, fp, fn_ } = cm;
    Rates {
        accuracy: ratio(tp + tn, cm.total()),
        tpr: ratio(tp, tp + fn_),
        tnr: ratio(tn, tn + fp),
        fpr: ratio(fp, tn + fp),
        fnr: ratio(fn_, tp + fn_),
        ppv: ratio(tp, tp + fp),
        npv: ratio(tn, tn + fn_),
        f1: ratio(2 * tp, 2 * tp + fp + fn_),
    }
}

/// Detections in both directions of one pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairPrediction {
    pub x_to_y: bool,
    pub y_to_x: bool,
    pub a_xy: Option<f64>,
    pub a_yx: Option<f64>,
}

/// 𝒜^f(η_max) for `source → target` under the rule `𝒜^f > 1`.
fn directed(
    source: &TimeSeries,
    target: &TimeSeries,
    params: &EmbeddingParams,
    eta_max: usize,
    f: f64,
    estimator: &Estimator,
) -> Result<Option<f64>> {
    let spec = te_spectrum(source, target, &[], params, eta_max, estimator)?;
    normalized_asymmetry(&spec, eta_max, f)
}

/// Applies the detection rule at `η_max` in both directions.
pub fn classify_pair(
    x: &TimeSeries,
    y: &TimeSeries,
    params: &EmbeddingParams,
    eta_max: usize,
    f: f64,
    estimator: &Estimator,
) -> Result<PairPrediction> {
    let a_xy = directed(x, y, params, eta_max, f, estimator)?;
    let a_yx = directed(y, x, params, eta_max, f, estimator)?;
    Ok(PairPrediction {
        x_to_y: detect(a_xy, 1.0).is_positive(),
        y_to_x: detect(a_yx, 1.0).is_positive(),
        a_xy,
        a_yx,
    })
}

/// A coupling × length benchmark for one family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub family: Family,
    /// Coupling bins; each realization draws uniformly within its bin.
    pub couplings: Vec<Coupling>,
    pub lengths: Vec<usize>,
    pub ensemble_size: usize,
    /// Defaults to `10 + Γ − 1` for the family's largest random lag Γ.
    #[serde(default)]
    pub eta_max: Option<usize>,
    #[serde(default = "one")]
    pub f: f64,
    #[serde(default)]
    pub estimator: Estimator,
    #[serde(default)]
    pub params: EmbeddingParams,
    /// Variables per chain system.
    #[serde(default = "two")]
    pub chain_len: usize,
    /// Fraction of each series' standard deviation; family default when absent.
    #[serde(default)]
    pub observational_noise: Option<f64>,
    pub master_seed: Seed,
}

fn one() -> f64 {
    1.0
}

fn two() -> usize {
    2
}

impl SweepConfig {
    pub fn eta_max(&self) -> usize {
        self.eta_max.unwrap_or(10 + self.family.max_random_lag() - 1)
    }

    pub fn observational_noise(&self) -> f64 {
        self.observational_noise.unwrap_or_else(|| self.family.observational_noise())
    }

    pub fn validate(&self) -> Result<()> {
        if self.couplings.is_empty() || self.lengths.is_empty() {
            return Err(Error::InvalidParams("coupling and length grids must be nonempty".into()));
        }
        if self.ensemble_size == 0 {
            return Err(Error::InvalidParams("ensemble_size must be at least 1".into()));
        }
        if !(self.f.is_finite() && self.f > 0.0) {
            return Err(Error::InvalidParams("f must be positive".into()));
        }
        if self.eta_max() == 0 {
            return Err(Error::InvalidParams("eta_max must be at least 1".into()));
        }
        self.params.validate()
    }
}

/// One realization within one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepTask {
    pub coupling: usize,
    pub length: usize,
    pub member: usize,
    pub seed: Seed,
}

/// Every realization of the sweep, in grid order.
pub fn tasks(cfg: &SweepConfig) -> Vec<SweepTask> {
    let mut out = Vec::with_capacity(cfg.couplings.len() * cfg.lengths.len() * cfg.ensemble_size);
    for coupling in 0..cfg.couplings.len() {
        for length in 0..cfg.lengths.len() {
            for member in 0..cfg.ensemble_size {
                let seed = cfg.master_seed.derive_path(&[coupling as u64, length as u64, member as u64]);
                out.push(SweepTask { coupling, length, member, seed });
            }
        }
    }
    out
}

/// One directed pairwise prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectedOutcome {
    pub source: usize,
    pub target: usize,
    pub truth: bool,
    pub predicted: bool,
    pub a_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskOutcome {
    pub task: SweepTask,
    /// Predictions for every ordered pair, or the failure message.
    pub result: core::result::Result<Vec<DirectedOutcome>, String>,
}

/// Redraws for realizations that diverge from their random initial state.
const GENERATION_ATTEMPTS: u64 = 20;

fn realize(cfg: &SweepConfig, task: &SweepTask) -> Result<Realization> {
    let n = cfg.lengths[task.length];
    let coupling = cfg.couplings[task.coupling];
    let mut last = Error::EmptyRange;
    for attempt in 0..GENERATION_ATTEMPTS {
        let seed = task.seed.derive_path(&[0, attempt]);
        let spec = random_chain(cfg.family, coupling, n, cfg.chain_len, seed)?;
        match generate(&spec) {
            Ok(r) => return Ok(r),
            Err(e @ Error::Diverged { .. }) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Generates, perturbs and classifies one realization.
pub fn run_task(cfg: &SweepConfig, task: &SweepTask) -> TaskOutcome {
    let run = || -> Result<Vec<DirectedOutcome>> {
        let real = realize(cfg, task)?;
        let noise = cfg.observational_noise();
        let series = if noise > 0.0 {
            add_observational_noise_all(&real.series, noise, task.seed.derive(1))?
        } else {
            real.series
        };
        let cols = series.columns();
        let eta = cfg.eta_max();
        let mut out = Vec::new();
        for i in 0..cols.len() {
            for j in i + 1..cols.len() {
                let p = classify_pair(&cols[i], &cols[j], &cfg.params, eta, cfg.f, &cfg.estimator)?;
                for (s, t, predicted, a) in [(i, j, p.x_to_y, p.a_xy), (j, i, p.y_to_x, p.a_yx)] {
                    out.push(DirectedOutcome { source: s, target: t, truth: real.truth.has_edge(s, t), predicted, a_norm: a });
                }
            }
        }
        Ok(out)
    };
    TaskOutcome { task: *task, result: run().map_err(|e| e.to_string()) }
}

/// Statistics for one (coupling, length) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub coupling: Coupling,
    pub length: usize,
    pub confusion: ConfusionMatrix,
    /// `None` when no realization succeeded.
    pub mcc: Option<f64>,
    pub rates: Rates,
    /// Median 𝒜^f over directed pairs with a true edge.
    pub median_a_causal: Option<f64>,
    /// Median 𝒜^f over directed pairs without an edge.
    pub median_a_noncausal: Option<f64>,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub cells: Vec<SweepCell>,
}

fn median_of(values: Vec<f64>) -> Option<f64> {
    (!values.is_empty()).then(|| median(&values))
}

/// Tallies outcomes into cells. Independent of the order of `outcomes`.
pub fn assemble(cfg: &SweepConfig, mut outcomes: Vec<TaskOutcome>) -> SweepResult {
    outcomes.sort_by_key(|o| (o.task.coupling, o.task.length, o.task.member));
    let mut cells = Vec::with_capacity(cfg.couplings.len() * cfg.lengths.len());
    for (ci, &coupling) in cfg.couplings.iter().enumerate() {
        for (li, &length) in cfg.lengths.iter().enumerate() {
            let mut cm = ConfusionMatrix::default();
            let (mut causal, mut noncausal, mut failures) = (Vec::new(), Vec::new(), 0);
            for o in outcomes.iter().filter(|o| o.task.coupling == ci && o.task.length == li) {
                match &o.result {
                    Ok(dirs) => {
                        for d in dirs {
                            cm.record(d.predicted, d.truth);
                            if let Some(a) = d.a_norm {
                                if d.truth { causal.push(a) } else { noncausal.push(a) }
                            }
                        }
                    }
                    Err(_) => failures += 1,
                }
            }
            cells.push(SweepCell {
                coupling,
                length,
                confusion: cm,
                mcc: mcc(&cm).ok(),
                rates: rates(&cm),
                median_a_causal: median_of(causal),
                median_a_noncausal: median_of(noncausal),
                failures,
            });
        }
    }
    SweepResult { config: cfg.clone(), cells }
}

/// Runs every task sequentially.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let outcomes = tasks(cfg).iter().map(|t| run_task(cfg, t)).collect();
    Ok(assemble(cfg, outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn cm(tp: u64, tn: u64, fp: u64, fn_: u64) -> ConfusionMatrix {
        ConfusionMatrix { tp, tn, fp, fn_ }
    }

    #[test]
    fn confusion_tallies() {
        let t = [true, true, false, false];
        assert_eq!(confusion(&t, &t).unwrap(), cm(2, 2, 0, 0));
        let neg: Vec<bool> = t.iter().map(|b| !b).collect();
        assert_eq!(confusion(&neg, &t).unwrap(), cm(0, 0, 2, 2));
        let preds = [true, true, false, false];
        let truths = [true, false, true, false];
        assert_eq!(confusion(&preds, &truths).unwrap(), cm(1, 1, 1, 1));
        assert!(matches!(confusion(&[true], &[]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn mcc_reference_values() {
        assert_eq!(mcc(&cm(50, 50, 0, 0)).unwrap(), 1.0);
        assert_eq!(mcc(&cm(25, 25, 25, 25)).unwrap(), 0.0);
        assert_eq!(mcc(&cm(0, 0, 25, 25)).unwrap(), -1.0);
        assert_eq!(mcc(&cm(0, 40, 0, 0)).unwrap(), 0.0);
        assert_eq!(mcc(&ConfusionMatrix::default()), Err(Error::EmptyMatrix));
    }

    #[test]
    fn rate_reference_values() {
        let r = rates(&cm(8, 88, 2, 2));
        assert!((r.ppv.unwrap() - 0.8).abs() < 1e-15);
        assert!((r.tpr.unwrap() - 0.8).abs() < 1e-15);
        assert!((r.f1.unwrap() - 0.8).abs() < 1e-15);
        let z = rates(&cm(0, 5, 0, 3));
        assert_eq!((z.tpr, z.fnr), (Some(0.0), Some(1.0)));
        assert_eq!(z.ppv, None);
        let p = rates(&cm(10, 10, 0, 0));
        assert_eq!((p.accuracy, p.tpr, p.tnr, p.fpr, p.fnr, p.f1), (Some(1.0), Some(1.0), Some(1.0), Some(0.0), Some(0.0), Some(1.0)));
    }

    fn tiny(family: Family) -> SweepConfig {
        SweepConfig {
            family,
            couplings: vec![Coupling::Fixed(0.0), Coupling::Range(0.8, 1.0)],
            lengths: vec![200, 300],
            ensemble_size: 3,
            eta_max: Some(3),
            f: 1.0,
            estimator: Estimator::default(),
            params: EmbeddingParams::default(),
            chain_len: 2,
            observational_noise: None,
            master_seed: Seed(42),
        }
    }

    #[test]
    fn sweep_counts_and_order_independence() {
        let cfg = tiny(Family::LogisticChain);
        let mut outcomes: Vec<TaskOutcome> = tasks(&cfg).iter().map(|t| run_task(&cfg, t)).collect();
        let a = assemble(&cfg, outcomes.clone());
        outcomes.reverse();
        let b = assemble(&cfg, outcomes);
        assert_eq!(a, b);
        assert_eq!(a.cells.len(), 4);
        for cell in &a.cells {
            assert_eq!(cell.confusion.total() as usize, (cfg.ensemble_size - cell.failures) * 2);
        }
        // No true edges without coupling.
        assert_eq!(a.cells[0].confusion.tp + a.cells[0].confusion.fn_, 0);
        assert_eq!(sweep(&cfg).unwrap(), a);
    }

    #[test]
    fn sweep_rejects_empty_grid() {
        let mut cfg = tiny(Family::HenonChain);
        cfg.lengths.clear();
        assert!(sweep(&cfg).is_err());
    }

    #[test]
    fn default_eta_extends_with_family_lags() {
        let mut cfg = tiny(Family::LogisticChain);
        cfg.eta_max = None;
        assert_eq!(cfg.eta_max(), 14);
        cfg.family = Family::NoiseUniform;
        assert_eq!(cfg.eta_max(), 10);
    }
}
