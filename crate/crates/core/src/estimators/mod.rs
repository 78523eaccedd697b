//! Transfer-entropy estimators and lag spectra.

mod binning;
mod knn;

pub use binning::{
    binning_heuristic, box_probabilities, te_binned_averaged, te_visitation_frequency, Partition,
};
pub use knn::{mi_kraskov, te_nearest_neighbor, Decomposition, Points};

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::data::TimeSeries;
use crate::embedding::{build_embedding, Embedding, EmbeddingParams};
use crate::error::{Error, Result};

/// Transfer-entropy estimator selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Estimator {
    /// Visitation frequencies averaged over two heuristic partitions.
    VisitationFrequency,
    /// Visitation frequencies on one fixed partition.
    FixedBins { bins: usize },
    /// KSG mutual-information differences.
    NearestNeighbor { k1: usize, k2: usize, decomposition: Decomposition },
}

impl Default for Estimator {
    fn default() -> Self {
        Estimator::VisitationFrequency
    }
}

impl Estimator {
    /// The nearest-neighbour estimator with `k1 = 2`, `k2 = 3`.
    pub const fn nearest_neighbor() -> Self {
        Estimator::NearestNeighbor { k1: 2, k2: 3, decomposition: Decomposition::ChainRule }
    }

    /// Short identifier: `vf`, `vf-fixed` or `nn`.
    pub fn id(&self) -> &'static str {
        match self {
            Estimator::VisitationFrequency => "vf",
            Estimator::FixedBins { .. } => "vf-fixed",
            Estimator::NearestNeighbor { .. } => "nn",
        }
    }

    /// Parses `vf` or `nn` into the default configuration of that estimator.
    pub fn from_id(id: &str) -> Result<Self> {
        match id {
            "vf" => Ok(Estimator::VisitationFrequency),
            "nn" => Ok(Self::nearest_neighbor()),
            other => Err(Error::InvalidInput(alloc::format!("unknown estimator '{other}'"))),
        }
    }

    /// Transfer entropy in bits for one embedding.
    pub fn transfer_entropy(&self, emb: &Embedding) -> Result<f64> {
        match *self {
            Estimator::VisitationFrequency => te_binned_averaged(emb),
            Estimator::FixedBins { bins } => te_visitation_frequency(emb, bins),
            Estimator::NearestNeighbor { k1, k2, decomposition } => {
                te_nearest_neighbor(emb, k1, k2, decomposition)
            }
        }
    }
}

/// Transfer entropies at lags `−η_max..=−1` and `1..=η_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TESpectrum {
    pub estimator: String,
    pub params: EmbeddingParams,
    /// Signed lags in ascending order, zero excluded.
    pub lags: Vec<i32>,
    pub values: Vec<f64>,
}

impl TESpectrum {
    pub fn eta_max(&self) -> usize {
        self.lags.len() / 2
    }

    /// Transfer entropy at signed lag `lag`.
    pub fn get(&self, lag: i32) -> Option<f64> {
        let m = self.eta_max() as i32;
        match lag {
            0 => None,
            l if l.abs() > m => None,
            l if l < 0 => Some(self.values[(l + m) as usize]),
            l => Some(self.values[(l + m - 1) as usize]),
        }
    }

    /// `(TE(ν), TE(−ν))` for `ν = 1..=η_max`.
    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let m = self.eta_max() as i32;
        (1..=m).map(|v| (self.get(v).unwrap(), self.get(-v).unwrap()))
    }
}

/// Estimates the transfer entropy from `source` to `target` at every lag in
/// `±1..=±eta_max`, conditioning on `conds`.
pub fn te_spectrum(
    source: &TimeSeries,
    target: &TimeSeries,
    conds: &[TimeSeries],
    params: &EmbeddingParams,
    eta_max: usize,
    estimator: &Estimator,
) -> Result<TESpectrum> {
    if eta_max == 0 {
        return Err(Error::InvalidInput("eta_max must be at least 1".into()));
    }
    let m = eta_max as i32;
    let lags: Vec<i32> = (-m..=m).filter(|&l| l != 0).collect();
    let values = lags
        .iter()
        .map(|&eta| {
            let emb = build_embedding(source, target, conds, &params.at_lag(eta))?;
            let te = estimator.transfer_entropy(&emb)?;
            if te.is_finite() {
                Ok(te)
            } else {
                Err(Error::InvalidInput(alloc::format!("non-finite transfer entropy at lag {eta}")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TESpectrum { estimator: estimator.id().into(), params: *params, lags, values })
}
