//! Generalized delay reconstruction.
//!
//! A row of an [`Embedding`] built at base time `t` holds, in order:
//!
//! * `k` future target values `T(t + jη)` for `j = k, …, 1`,
//! * `l` present/past target values `T(t − iτ)` for `i = 0, …, l − 1`,
//! * `m` present/past source values `S(t − iτ)`,
//! * `n` present/past values of each conditional series, in the order given.
//!
//! Negative `η` places the "future" block in the past. Base times are
//! trimmed so that lags `+η` and `−η` always yield the same number of
//! rows, which keeps forward and backward transfer entropies comparable.

use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::data::TimeSeries;
use crate::error::{Error, Result};

/// Embedding dimensions without the prediction lag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingParams {
    /// Future target values.
    pub k: usize,
    /// Present and past target values.
    pub l: usize,
    /// Present and past source values.
    pub m: usize,
    /// Present and past values per conditional series (0 if none).
    pub n: usize,
    /// Embedding delay.
    pub tau: usize,
}

impl Default for EmbeddingParams {
    fn default() -> Self {
        EmbeddingParams { k: 1, l: 1, m: 1, n: 0, tau: 1 }
    }
}

impl EmbeddingParams {
    pub fn at_lag(self, eta: i32) -> EmbeddingSpec {
        EmbeddingSpec { params: self, eta }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.l == 0 || self.m == 0 || self.tau == 0 {
            return Err(Error::InvalidInput("k, l, m and tau must all be at least 1".into()));
        }
        Ok(())
    }

    /// Total columns for `conds` conditional series.
    pub fn dimension(&self, conds: usize) -> usize {
        self.k + self.l + self.m + self.n * conds
    }

    /// Deepest backward offset (in samples) used by the past blocks.
    fn past_depth(&self) -> usize {
        (self.l.max(self.m).max(self.n) - 1) * self.tau
    }
}

/// Full specification of one embedding, including the signed prediction lag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingSpec {
    pub params: EmbeddingParams,
    pub eta: i32,
}

impl EmbeddingSpec {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.eta == 0 {
            return Err(Error::InvalidInput("prediction lag must be nonzero".into()));
        }
        Ok(())
    }
}

/// Which series a column was taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    TargetFuture,
    TargetPast,
    SourcePast,
    Conditional(usize),
}

/// A column's role and its offset from the base time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Column {
    pub role: Role,
    pub lag: i64,
}

/// Base times (0-based, half-open) for which every coordinate exists.
///
/// Forward lags use `[d, N − kη)`, backward lags `[max(d, k|η|), N − min(d, k|η|))`
/// where `d` is the past depth, so both directions give `N − d − k|η|` rows.
pub fn valid_range(len: usize, spec: &EmbeddingSpec) -> Range<usize> {
    let depth = spec.params.past_depth();
    let reach = spec.params.k * spec.eta.unsigned_abs() as usize;
    let (start, trim_end) = if spec.eta > 0 {
        (depth, reach)
    } else {
        (depth.max(reach), depth.min(reach))
    };
    let end = len.saturating_sub(trim_end);
    if start >= end {
        start..start
    } else {
        start..end
    }
}

/// A matrix of delay vectors with its column bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    points: Vec<f64>,
    dim: usize,
    columns: Vec<Column>,
    source_length: usize,
}

impl Embedding {
    /// Builds an embedding from already-assembled rows. Used for tests and
    /// for callers that construct their own point sets.
    pub fn from_rows(rows: &[Vec<f64>], columns: Vec<Column>, source_length: usize) -> Result<Self> {
        let dim = columns.len();
        if rows.is_empty() {
            return Err(Error::EmptyEmbedding { len: source_length });
        }
        let mut points = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::LengthMismatch { expected: dim, found: r.len() });
            }
            points.extend_from_slice(r);
        }
        Ok(Embedding { points, dim, columns, source_length })
    }

    pub fn rows(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim)
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn source_length(&self) -> usize {
        self.source_length
    }

    /// Column indices of the target's future block.
    pub fn future_cols(&self) -> Vec<usize> {
        self.cols_where(|r| r == Role::TargetFuture)
    }

    pub fn target_past_cols(&self) -> Vec<usize> {
        self.cols_where(|r| r == Role::TargetPast)
    }

    pub fn source_cols(&self) -> Vec<usize> {
        self.cols_where(|r| r == Role::SourcePast)
    }

    pub fn conditional_cols(&self) -> Vec<usize> {
        self.cols_where(|r| matches!(r, Role::Conditional(_)))
    }

    fn cols_where(&self, pred: impl Fn(Role) -> bool) -> Vec<usize> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| pred(c.role))
            .map(|(i, _)| i)
            .collect()
    }

    /// Values of column `c` across all rows.
    pub fn column_values(&self, c: usize) -> impl Iterator<Item = f64> + '_ {
        self.iter_rows().map(move |r| r[c])
    }

    /// A copy with rows reordered by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Embedding {
        let mut points = Vec::with_capacity(self.points.len());
        for &i in perm {
            points.extend_from_slice(self.row(i));
        }
        Embedding { points, dim: self.dim, columns: self.columns.clone(), source_length: self.source_length }
    }
}

/// Assembles the delay vectors `(T_f, T_pp, S_pp, C_pp)` for every valid base time.
pub fn build_embedding(
    source: &TimeSeries,
    target: &TimeSeries,
    conds: &[TimeSeries],
    spec: &EmbeddingSpec,
) -> Result<Embedding> {
    spec.validate()?;
    let len = target.len();
    if source.len() != len {
        return Err(Error::LengthMismatch { expected: len, found: source.len() });
    }
    for c in conds {
        if c.len() != len {
            return Err(Error::LengthMismatch { expected: len, found: c.len() });
        }
    }
    let p = spec.params;
    if (p.n == 0) != conds.is_empty() {
        return Err(Error::InvalidInput(
            "conditional series require n >= 1, and n >= 1 requires conditional series".into(),
        ));
    }

    let tau = p.tau as i64;
    let eta = spec.eta as i64;
    let mut columns = Vec::with_capacity(p.dimension(conds.len()));
    for j in (1..=p.k as i64).rev() {
        columns.push(Column { role: Role::TargetFuture, lag: j * eta });
    }
    for i in 0..p.l as i64 {
        columns.push(Column { role: Role::TargetPast, lag: -i * tau });
    }
    for i in 0..p.m as i64 {
        columns.push(Column { role: Role::SourcePast, lag: -i * tau });
    }
    for c in 0..conds.len() {
        for i in 0..p.n as i64 {
            columns.push(Column { role: Role::Conditional(c), lag: -i * tau });
        }
    }

    let range = valid_range(len, spec);
    if range.is_empty() {
        return Err(Error::EmptyEmbedding { len });
    }
    let dim = columns.len();
    let mut points = Vec::with_capacity(range.len() * dim);
    let (t, s) = (target.values(), source.values());
    for base in range {
        for col in &columns {
            let idx = (base as i64 + col.lag) as usize;
            let v = match col.role {
                Role::TargetFuture | Role::TargetPast => t[idx],
                Role::SourcePast => s[idx],
                Role::Conditional(c) => conds[c].values()[idx],
            };
            points.push(v);
        }
    }
    Ok(Embedding { points, dim, columns, source_length: len })
}

/// First lag at which the sample autocorrelation drops to zero or below.
/// Useful as a data-driven choice of `tau`.
pub fn autocorrelation_zero_crossing(ts: &TimeSeries, max_lag: usize) -> Option<usize> {
    let x = ts.values();
    let n = x.len();
    let mean = crate::stats::mean(x);
    let var: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    if var == 0.0 {
        return None;
    }
    (1..=max_lag.min(n.saturating_sub(1))).find(|&lag| {
        let c: f64 = (0..n - lag).map(|i| (x[i] - mean) * (x[i + lag] - mean)).sum();
        c / var <= 0.0
    })
}
