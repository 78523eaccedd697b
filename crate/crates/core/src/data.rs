//! Time-series containers and observational noise.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Seed;
use crate::stats;

/// A uniformly sampled scalar series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    dt: f64,
    label: String,
}

impl TimeSeries {
    /// Builds a series with unit spacing.
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        Self::with_dt(label, values, 1.0)
    }

    pub fn with_dt(label: impl Into<String>, values: Vec<f64>, dt: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("time series must not be empty".into()));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidInput(alloc::format!("dt must be positive, got {dt}")));
        }
        Ok(TimeSeries { values, dt, label: label.into() })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; a series holds at least one value.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Contiguous sub-series `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> Result<TimeSeries> {
        if len == 0 || start + len > self.len() {
            return Err(Error::InvalidInput(alloc::format!(
                "slice {start}..{} out of range for length {}",
                start + len,
                self.len()
            )));
        }
        Ok(TimeSeries {
            values: self.values[start..start + len].to_vec(),
            dt: self.dt,
            label: self.label.clone(),
        })
    }
}

/// Equal-length columns sharing one sample spacing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiSeries {
    columns: Vec<TimeSeries>,
}

impl MultiSeries {
    pub fn new(columns: Vec<TimeSeries>) -> Result<Self> {
        let first = columns
            .first()
            .ok_or_else(|| Error::InvalidInput("a multi-series needs at least one column".into()))?;
        let (len, dt) = (first.len(), first.dt());
        for c in &columns[1..] {
            if c.len() != len {
                return Err(Error::LengthMismatch { expected: len, found: c.len() });
            }
            if c.dt() != dt {
                return Err(Error::InvalidInput(alloc::format!(
                    "column '{}' has dt {} but expected {dt}",
                    c.label(),
                    c.dt()
                )));
            }
        }
        Ok(MultiSeries { columns })
    }

    /// Builds labelled unit-spacing columns from raw vectors.
    pub fn from_columns(labels: &[&str], data: Vec<Vec<f64>>) -> Result<Self> {
        if labels.len() != data.len() {
            return Err(Error::LengthMismatch { expected: labels.len(), found: data.len() });
        }
        let cols = labels
            .iter()
            .zip(data)
            .map(|(l, v)| TimeSeries::new(*l, v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(cols)
    }

    pub fn columns(&self) -> &[TimeSeries] {
        &self.columns
    }

    pub fn into_columns(self) -> Vec<TimeSeries> {
        self.columns
    }

    pub fn column(&self, i: usize) -> Option<&TimeSeries> {
        self.columns.get(i)
    }

    pub fn by_label(&self, label: &str) -> Option<&TimeSeries> {
        self.columns.iter().find(|c| c.label() == label)
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn len(&self) -> usize {
        self.columns[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.label().to_string()).collect()
    }
}

/// Observations with Gaussian uncertainty in both value and age.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertainSeries {
    pub value_mean: Vec<f64>,
    pub value_sd: Vec<f64>,
    pub age_mean: Vec<f64>,
    pub age_sd: Vec<f64>,
}

impl UncertainSeries {
    pub fn new(
        value_mean: Vec<f64>,
        value_sd: Vec<f64>,
        age_mean: Vec<f64>,
        age_sd: Vec<f64>,
    ) -> Result<Self> {
        let n = value_mean.len();
        if n == 0 {
            return Err(Error::InvalidInput("uncertain series must not be empty".into()));
        }
        for v in [&value_sd, &age_mean, &age_sd] {
            if v.len() != n {
                return Err(Error::LengthMismatch { expected: n, found: v.len() });
            }
        }
        for v in [&value_mean, &value_sd, &age_mean, &age_sd] {
            if let Some(index) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite { index });
            }
        }
        if value_sd.iter().chain(&age_sd).any(|&s| s < 0.0) {
            return Err(Error::InvalidInput("standard deviations must be non-negative".into()));
        }
        let increasing = age_mean.windows(2).all(|w| w[1] > w[0]);
        let decreasing = age_mean.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(Error::InvalidInput("age_mean must be strictly monotone".into()));
        }
        Ok(UncertainSeries { value_mean, value_sd, age_mean, age_sd })
    }

    pub fn len(&self) -> usize {
        self.value_mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value_mean.is_empty()
    }
}

/// Adds i.i.d. zero-mean Gaussian noise with standard deviation
/// `fraction × sd(ts)`.
pub fn add_observational_noise(ts: &TimeSeries, fraction: f64, seed: Seed) -> Result<TimeSeries> {
    if ts.len() < 2 {
        return Err(Error::TooShort { len: ts.len(), needed: 2 });
    }
    if !(fraction.is_finite() && fraction >= 0.0) {
        return Err(Error::InvalidInput(alloc::format!("noise fraction must be >= 0, got {fraction}")));
    }
    let scale = fraction * stats::std_dev(ts.values());
    if scale == 0.0 {
        return Ok(ts.clone());
    }
    let mut rng = seed.rng();
    let values = ts
        .values()
        .iter()
        .map(|&v| {
            let z: f64 = StandardNormal.sample(&mut rng);
            v + scale * z
        })
        .collect();
    TimeSeries::with_dt(ts.label(), values, ts.dt())
}

/// Applies [`add_observational_noise`] to every column with independent streams.
pub fn add_observational_noise_all(ms: &MultiSeries, fraction: f64, seed: Seed) -> Result<MultiSeries> {
    let cols = ms
        .columns()
        .iter()
        .enumerate()
        .map(|(i, c)| add_observational_noise(c, fraction, seed.derive(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    MultiSeries::new(cols)
}
