//! Predictive asymmetry and the detection rule.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::TESpectrum;

/// `Σ_{ν=1..η} TE(ν) − TE(−ν)` in bits.
pub fn predictive_asymmetry(spec: &TESpectrum, eta: usize) -> Result<f64> {
    check_lag(spec, eta)?;
    Ok(spec.pairs().take(eta).map(|(f, b)| f - b).sum())
}

/// `𝔸(η) / ((f/η) · Σ_{ν=±1..±η} TE(ν))`.
///
/// `None` when the denominator is not strictly positive; such values never
/// count as a detection.
pub fn normalized_asymmetry(spec: &TESpectrum, eta: usize, f: f64) -> Result<Option<f64>> {
    check_lag(spec, eta)?;
    check_f(f)?;
    let (num, total) =
        spec.pairs().take(eta).fold((0.0, 0.0), |(n, t), (fw, bw)| (n + (fw - bw), t + fw + bw));
    Ok(normalize(num, total, eta, f))
}

fn normalize(num: f64, total: f64, eta: usize, f: f64) -> Option<f64> {
    let denom = f / eta as f64 * total;
    if denom > 0.0 && denom.is_finite() {
        Some(num / denom)
    } else {
        None
    }
}

fn check_lag(spec: &TESpectrum, eta: usize) -> Result<()> {
    let max = spec.eta_max();
    if eta == 0 || eta > max {
        return Err(Error::LagOutOfRange { eta, max });
    }
    Ok(())
}

fn check_f(f: f64) -> Result<()> {
    if f.is_finite() && f > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(alloc::format!("normalization factor must be positive, got {f}")))
    }
}

/// Binary verdict on directional coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detection {
    Positive,
    Negative,
}

impl Detection {
    pub fn is_positive(self) -> bool {
        self == Detection::Positive
    }
}

/// Positive iff `a_norm > threshold`; undefined values are negative.
pub fn detect(a_norm: Option<f64>, threshold: f64) -> Detection {
    match a_norm {
        Some(a) if a > threshold => Detection::Positive,
        _ => Detection::Negative,
    }
}

/// 𝔸 and 𝒜^f at every `η = 1..=η_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymmetryCurve {
    pub etas: Vec<usize>,
    pub a: Vec<f64>,
    /// `None` where the normalization is undefined.
    pub a_norm: Vec<Option<f64>>,
    pub f: f64,
}

impl AsymmetryCurve {
    pub fn from_spectrum(spec: &TESpectrum, f: f64) -> Result<Self> {
        check_f(f)?;
        let m = spec.eta_max();
        let (mut etas, mut a, mut a_norm) = (Vec::with_capacity(m), Vec::with_capacity(m), Vec::with_capacity(m));
        let (mut num, mut total) = (0.0, 0.0);
        for (i, (fw, bw)) in spec.pairs().enumerate() {
            num += fw - bw;
            total += fw + bw;
            etas.push(i + 1);
            a.push(num);
            a_norm.push(normalize(num, total, i + 1, f));
        }
        Ok(AsymmetryCurve { etas, a, a_norm, f })
    }

    pub fn eta_max(&self) -> usize {
        self.etas.len()
    }

    /// 𝒜^f at the largest lag.
    pub fn last_normalized(&self) -> Option<f64> {
        self.a_norm.last().copied().flatten()
    }
}
