//! Random-segment and uncertainty-resampling ensembles with percentile
//! ribbons.
//!
//! Each ensemble member first resamples uncertain inputs (when any), then
//! picks a random segment, then computes 𝒜^f(η) for `η = 1..=η_max` in both
//! directions. Members are independent; see [`member`] and [`aggregate`].

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::asymmetry::AsymmetryCurve;
use crate::data::{TimeSeries, UncertainSeries};
use crate::embedding::EmbeddingParams;
use crate::error::{Error, Result};
use crate::estimators::{te_spectrum, Estimator};
use crate::rng::{RngExt, Seed};
use crate::stats::quantile_in_place;

/// How many random contiguous segments to draw and how long they are.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub count: usize,
    pub min_frac: f64,
    pub max_frac: f64,
    pub seed: Seed,
}

impl SegmentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidParams("segment count must be at least 1".into()));
        }
        let ok = |f: f64| f > 0.0 && f <= 1.0;
        if !ok(self.min_frac) || !ok(self.max_frac) {
            return Err(Error::InvalidParams("segment fractions must lie in (0, 1]".into()));
        }
        if self.min_frac > self.max_frac {
            return Err(Error::InvalidParams(format!(
                "min_frac ({}) must not exceed max_frac ({})",
                self.min_frac, self.max_frac
            )));
        }
        Ok(())
    }
}

/// A contiguous window `start..start + len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub len: usize,
}

fn length_bounds(n: usize, spec: &SegmentSpec) -> (usize, usize) {
    let lo = libm::ceil(spec.min_frac * n as f64 - 1e-9) as usize;
    let hi = libm::floor(spec.max_frac * n as f64 + 1e-9) as usize;
    (lo.clamp(1, n), hi.clamp(1, n).max(lo.min(n)))
}

/// The `index`-th segment of an ensemble over a series of length `n`.
pub fn segment_at(n: usize, spec: &SegmentSpec, index: usize) -> Segment {
    let (lo, hi) = length_bounds(n, spec);
    let mut rng = spec.seed.derive(index as u64).rng();
    let len = if hi > lo { rng.random_range(lo..=hi) } else { lo };
    let start = if n > len { rng.random_range(0..=n - len) } else { 0 };
    Segment { start, len }
}

/// Segment bounds for a series of length `n`; the shortest possible
/// segment must hold at least `min_len` points.
pub fn segment_bounds(n: usize, spec: &SegmentSpec, min_len: usize) -> Result<Vec<Segment>> {
    spec.validate()?;
    let shortest = libm::floor(spec.min_frac * n as f64) as usize;
    if shortest < min_len.max(1) {
        return Err(Error::TooShort { len: shortest, needed: min_len.max(1) });
    }
    Ok((0..spec.count).map(|i| segment_at(n, spec, i)).collect())
}

/// Random contiguous segments of `ts`.
pub fn random_segments(ts: &TimeSeries, spec: &SegmentSpec) -> Result<Vec<TimeSeries>> {
    segment_bounds(ts.len(), spec, 2)?.into_iter().map(|s| ts.slice(s.start, s.len)).collect()
}

/// A resampled, regularly binned realization of an uncertain record.
#[derive(Debug, Clone, PartialEq)]
pub struct Resampled {
    pub series: TimeSeries,
    /// Index of the first bin, i.e. the bin holding ages in
    /// `[first_bin·w, (first_bin + 1)·w)`.
    pub first_bin: i64,
    /// Adjacent observations whose drawn ages swapped order.
    pub inversions: usize,
}

/// Draws ages and values from their Gaussian uncertainties, sorts by age
/// and averages within bins of width `bin_width` anchored at age 0.
///
/// Empty interior bins are linearly interpolated; the output spans the
/// first through last occupied bin in increasing age.
pub fn resample_uncertain(us: &UncertainSeries, bin_width: f64, seed: Seed) -> Result<Resampled> {
    draw_and_bin(us, bin_width, Some(seed))
}

/// Bins the mean ages and values without drawing noise.
pub fn bin_means(us: &UncertainSeries, bin_width: f64) -> Result<Resampled> {
    draw_and_bin(us, bin_width, None)
}

fn draw_and_bin(us: &UncertainSeries, bin_width: f64, seed: Option<Seed>) -> Result<Resampled> {
    if !(bin_width.is_finite() && bin_width > 0.0) {
        return Err(Error::InvalidParams("bin width must be positive".into()));
    }
    let mut points: Vec<(f64, f64)> = match seed {
        Some(seed) => {
            let mut rng = seed.rng();
            let mut draw = |m: f64, s: f64| -> Result<f64> {
                if s == 0.0 {
                    return Ok(m);
                }
                let d = Normal::new(m, s).map_err(|e| Error::InvalidInput(e.to_string()))?;
                Ok(d.sample(&mut rng))
            };
            (0..us.len())
                .map(|i| Ok((draw(us.age_mean[i], us.age_sd[i])?, draw(us.value_mean[i], us.value_sd[i])?)))
                .collect::<Result<_>>()?
        }
        None => us.age_mean.iter().copied().zip(us.value_mean.iter().copied()).collect(),
    };
    let ascending = us.age_mean.len() < 2 || us.age_mean[1] > us.age_mean[0];
    let expected = |a: f64, b: f64| if ascending { a <= b } else { a >= b };
    let inversions = points.windows(2).filter(|w| !expected(w[0].0, w[1].0)).count();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));

    let bin = |age: f64| libm::floor(age / bin_width) as i64;
    let first = bin(points[0].0);
    let last = bin(points[points.len() - 1].0);
    if last <= first {
        return Err(Error::EmptyRange);
    }
    let nbins = (last - first + 1) as usize;
    let mut sums = vec![0.0; nbins];
    let mut counts = vec![0usize; nbins];
    for &(age, value) in &points {
        let b = (bin(age) - first) as usize;
        sums[b] += value;
        counts[b] += 1;
    }
    let mut values: Vec<Option<f64>> =
        sums.iter().zip(&counts).map(|(&s, &c)| (c > 0).then(|| s / c as f64)).collect();
    let mut prev = 0;
    for i in 1..nbins {
        if values[i].is_some() {
            if i > prev + 1 {
                let (a, b) = (values[prev].unwrap(), values[i].unwrap());
                for (j, v) in values.iter_mut().enumerate().take(i).skip(prev + 1) {
                    let t = (j - prev) as f64 / (i - prev) as f64;
                    *v = Some(a + (b - a) * t);
                }
            }
            prev = i;
        }
    }
    let series = TimeSeries::with_dt("resampled", values.into_iter().map(|v| v.unwrap()).collect(), bin_width)?;
    Ok(Resampled { series, first_bin: first, inversions })
}

/// Inputs to an ensemble: two aligned series or two uncertain records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleInput {
    Series { x: TimeSeries, y: TimeSeries },
    Uncertain { x: UncertainSeries, y: UncertainSeries, bin_width: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub segments: SegmentSpec,
    /// Distinct uncertainty draws, cycled over members; 0 bins the means.
    /// Ignored for plain series.
    #[serde(default)]
    pub resamples: usize,
    pub eta_max: usize,
    #[serde(default = "one")]
    pub f: f64,
    #[serde(default)]
    pub estimator: Estimator,
    #[serde(default)]
    pub params: EmbeddingParams,
    /// Lower and upper percentiles in `[0, 100]`.
    #[serde(default = "default_levels")]
    pub percentiles: (f64, f64),
}

fn one() -> f64 {
    1.0
}

fn default_levels() -> (f64, f64) {
    (10.0, 90.0)
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        self.segments.validate()?;
        self.params.validate()?;
        let (lo, hi) = self.percentiles;
        if !(0.0..=100.0).contains(&lo) || !(0.0..=100.0).contains(&hi) || lo > hi {
            return Err(Error::InvalidParams("percentiles must satisfy 0 <= lo <= hi <= 100".into()));
        }
        if self.eta_max == 0 {
            return Err(Error::InvalidParams("eta_max must be at least 1".into()));
        }
        if !(self.f.is_finite() && self.f > 0.0) {
            return Err(Error::InvalidParams("f must be positive".into()));
        }
        Ok(())
    }
}

/// Both directional curves for one ensemble member.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberCurves {
    pub x_to_y: AsymmetryCurve,
    pub y_to_x: AsymmetryCurve,
    pub inversions: usize,
}

fn align(x: &Resampled, y: &Resampled) -> Result<(TimeSeries, TimeSeries)> {
    let start = x.first_bin.max(y.first_bin);
    let end = (x.first_bin + x.series.len() as i64).min(y.first_bin + y.series.len() as i64);
    if end - start < 2 {
        return Err(Error::EmptyRange);
    }
    let len = (end - start) as usize;
    let xs = x.series.slice((start - x.first_bin) as usize, len)?;
    let ys = y.series.slice((start - y.first_bin) as usize, len)?;
    Ok((xs, ys))
}

/// Computes ensemble member `index`.
pub fn member(input: &EnsembleInput, cfg: &EnsembleConfig, index: usize) -> Result<MemberCurves> {
    let (x, y, inversions) = match input {
        EnsembleInput::Series { x, y } => {
            if x.len() != y.len() {
                return Err(Error::LengthMismatch { expected: x.len(), found: y.len() });
            }
            (x.clone(), y.clone(), 0)
        }
        EnsembleInput::Uncertain { x, y, bin_width } => {
            let (rx, ry) = if cfg.resamples == 0 {
                (bin_means(x, *bin_width)?, bin_means(y, *bin_width)?)
            } else {
                let draw = (index % cfg.resamples) as u64;
                let base = cfg.segments.seed.derive_path(&[u64::MAX, draw]);
                (resample_uncertain(x, *bin_width, base.derive(0))?, resample_uncertain(y, *bin_width, base.derive(1))?)
            };
            let inv = rx.inversions + ry.inversions;
            let (xs, ys) = align(&rx, &ry)?;
            (xs, ys, inv)
        }
    };
    let n = x.len();
    let shortest = libm::floor(cfg.segments.min_frac * n as f64) as usize;
    if shortest < 2 {
        return Err(Error::TooShort { len: shortest, needed: 2 });
    }
    let seg = segment_at(n, &cfg.segments, index);
    let (xs, ys) = (x.slice(seg.start, seg.len)?, y.slice(seg.start, seg.len)?);
    let curve = |s: &TimeSeries, t: &TimeSeries| -> Result<AsymmetryCurve> {
        let spec = te_spectrum(s, t, &[], &cfg.params, cfg.eta_max, &cfg.estimator)?;
        AsymmetryCurve::from_spectrum(&spec, cfg.f)
    };
    Ok(MemberCurves { x_to_y: curve(&xs, &ys)?, y_to_x: curve(&ys, &xs)?, inversions })
}

/// Per-η percentile ribbon of 𝒜^f for one direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleCurve {
    pub direction: String,
    pub etas: Vec<usize>,
    /// `None` where no member had a defined value.
    pub median: Vec<Option<f64>>,
    pub lower: Vec<Option<f64>>,
    pub upper: Vec<Option<f64>>,
    pub levels: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub x_to_y: EnsembleCurve,
    pub y_to_x: EnsembleCurve,
    pub members: usize,
    pub failures: usize,
    /// Total age inversions over all uncertainty draws.
    pub inversions: usize,
}

fn ribbon(direction: &str, curves: &[&AsymmetryCurve], eta_max: usize, levels: (f64, f64)) -> EnsembleCurve {
    let mut out = EnsembleCurve {
        direction: direction.into(),
        etas: (1..=eta_max).collect(),
        median: Vec::with_capacity(eta_max),
        lower: Vec::with_capacity(eta_max),
        upper: Vec::with_capacity(eta_max),
        levels,
    };
    for i in 0..eta_max {
        let mut v: Vec<f64> = curves.iter().filter_map(|c| c.a_norm.get(i).copied().flatten()).collect();
        let q = |v: &mut Vec<f64>, p: f64| (!v.is_empty()).then(|| quantile_in_place(v, p));
        out.median.push(q(&mut v, 0.5));
        out.lower.push(q(&mut v, levels.0 / 100.0));
        out.upper.push(q(&mut v, levels.1 / 100.0));
    }
    out
}

/// Aggregates member results; failed members are dropped and counted.
/// Independent of member order.
pub fn aggregate(cfg: &EnsembleConfig, members: &[Result<MemberCurves>]) -> EnsembleResult {
    let ok: Vec<&MemberCurves> = members.iter().filter_map(|m| m.as_ref().ok()).collect();
    let xy: Vec<&AsymmetryCurve> = ok.iter().map(|m| &m.x_to_y).collect();
    let yx: Vec<&AsymmetryCurve> = ok.iter().map(|m| &m.y_to_x).collect();
    EnsembleResult {
        x_to_y: ribbon("x_to_y", &xy, cfg.eta_max, cfg.percentiles),
        y_to_x: ribbon("y_to_x", &yx, cfg.eta_max, cfg.percentiles),
        members: ok.len(),
        failures: members.len() - ok.len(),
        inversions: ok.iter().map(|m| m.inversions).sum(),
    }
}

/// Runs all `cfg.segments.count` members sequentially.
pub fn ensemble_asymmetry(input: &EnsembleInput, cfg: &EnsembleConfig) -> Result<EnsembleResult> {
    cfg.validate()?;
    let members: Vec<_> = (0..cfg.segments.count).map(|i| member(input, cfg, i)).collect();
    if !members.iter().any(|m| m.is_ok()) {
        if let Some(Err(e)) = members.into_iter().next() {
            return Err(e);
        }
        unreachable!("validated count is at least 1");
    }
    Ok(aggregate(cfg, &members))
}
