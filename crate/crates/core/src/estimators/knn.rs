//! Kraskov–Stögbauer–Grassberger nearest-neighbour estimation.

use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::stats::digamma;

/// A row-major point cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    data: Vec<f64>,
    dim: usize,
}

impl Points {
    pub fn new(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || data.len() % dim != 0 {
            return Err(Error::InvalidInput("point data is not a whole number of rows".into()));
        }
        Ok(Points { data, dim })
    }

    /// Gathers `cols` of every embedding row.
    pub fn from_embedding(emb: &Embedding, cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(emb.rows() * cols.len());
        for r in emb.iter_rows() {
            data.extend(cols.iter().map(|&c| r[c]));
        }
        Points { data, dim: cols.len() }
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    fn is_constant(&self) -> bool {
        let first = self.row(0);
        (1..self.len()).all(|i| self.row(i) == first)
    }
}

fn max_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

/// Rows sorted by their first coordinate, for pruned neighbour scans.
struct SortedIndex<'a> {
    pts: &'a Points,
    order: Vec<usize>,
    pos: Vec<usize>,
    key: Vec<f64>,
}

impl<'a> SortedIndex<'a> {
    fn new(pts: &'a Points) -> Self {
        let mut order: Vec<usize> = (0..pts.len()).collect();
        order.sort_by(|&a, &b| lex_cmp(pts.row(a), pts.row(b)));
        let mut pos = alloc::vec![0; pts.len()];
        for (p, &i) in order.iter().enumerate() {
            pos[i] = p;
        }
        let key = order.iter().map(|&i| pts.row(i)[0]).collect();
        SortedIndex { pts, order, pos, key }
    }

    /// Max-norm distance from point `i` to its `k`-th nearest other point.
    fn kth_distance(&self, i: usize, k: usize, best: &mut Vec<f64>) -> f64 {
        best.clear();
        let p = self.pos[i];
        let xi = self.pts.row(i);
        let c0 = self.key[p];
        let n = self.order.len();
        let (mut lo, mut hi) = (p, p + 1);
        let mut lo_open = p > 0;
        let mut hi_open = hi < n;
        while lo_open || hi_open {
            let bound = if best.len() == k { best[k - 1] } else { f64::INFINITY };
            // Alternate sides, always taking the closer candidate first.
            let take_lo = match (lo_open, hi_open) {
                (true, true) => c0 - self.key[lo - 1] <= self.key[hi] - c0,
                (l, _) => l,
            };
            let j = if take_lo {
                lo -= 1;
                lo_open = lo > 0;
                self.order[lo]
            } else {
                let j = self.order[hi];
                hi += 1;
                hi_open = hi < n;
                j
            };
            if (self.key[self.pos[j]] - c0).abs() > bound {
                // Candidates only get farther along the first axis from here.
                break;
            }
            let d = max_dist(xi, self.pts.row(j));
            if d < bound {
                let at = best.partition_point(|&b| b <= d);
                if best.len() == k {
                    best.pop();
                }
                best.insert(at, d);
            }
        }
        best.last().copied().unwrap_or(f64::INFINITY)
    }

    /// Number of other points strictly within `eps` of point `i`.
    fn count_within(&self, i: usize, eps: f64) -> usize {
        let xi = self.pts.row(i);
        let c0 = xi[0];
        let start = self.key.partition_point(|&v| c0 - v >= eps);
        let mut count = 0;
        for p in start..self.key.len() {
            if self.key[p] - c0 >= eps {
                break;
            }
            let j = self.order[p];
            if j != i && max_dist(xi, self.pts.row(j)) < eps {
                count += 1;
            }
        }
        count
    }
}

/// Number of coincident pairs, counted from groups of identical rows.
fn duplicate_pairs(pts: &Points) -> u64 {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(pts.row(a), pts.row(b)));
    let mut pairs = 0u64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && pts.row(order[j]) == pts.row(order[i]) {
            j += 1;
        }
        let g = (j - i) as u64;
        pairs += g * (g - 1) / 2;
        i = j;
    }
    pairs
}

/// Mutual information `I(A; B)` in bits, KSG estimator 1 with the max-norm.
///
/// Returns 0 when either block is constant. Fails with
/// [`Error::DegenerateDistances`] when more than half of all point pairs in
/// the joint space coincide.
pub fn mi_kraskov(a: &Points, b: &Points, k: usize) -> Result<f64> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: b.len() });
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if n < k + 1 {
        return Err(Error::TooFewPoints { needed: k + 1, got: n });
    }
    if a.is_constant() || b.is_constant() {
        return Ok(0.0);
    }

    let mut joint = Vec::with_capacity(n * (a.dim() + b.dim()));
    for i in 0..n {
        joint.extend_from_slice(a.row(i));
        joint.extend_from_slice(b.row(i));
    }
    let joint = Points { data: joint, dim: a.dim() + b.dim() };

    let total_pairs = (n as u64) * (n as u64 - 1) / 2;
    let zero_pairs = duplicate_pairs(&joint);
    if 2 * zero_pairs > total_pairs {
        return Err(Error::DegenerateDistances { zero_pairs, total_pairs });
    }

    let (ji, ai, bi) = (SortedIndex::new(&joint), SortedIndex::new(a), SortedIndex::new(b));
    // Histogram of marginal counts; summing by count value makes the result
    // independent of row order.
    let mut hist = alloc::vec![0u64; n];
    let mut best = Vec::with_capacity(k);
    for i in 0..n {
        let eps = ji.kth_distance(i, k, &mut best);
        hist[ai.count_within(i, eps)] += 1;
        hist[bi.count_within(i, eps)] += 1;
    }
    let marginal: f64 = hist
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(m, &c)| c as f64 * digamma(m as f64 + 1.0))
        .sum::<f64>()
        / n as f64;
    let nats = digamma(k as f64) + digamma(n as f64) - marginal;
    Ok(nats / core::f64::consts::LN_2)
}

/// How the transfer entropy is split into two mutual informations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decomposition {
    /// `I(T_f; S_pp, T_pp, C_pp) − I(T_f; T_pp, C_pp)`, the chain rule.
    #[default]
    ChainRule,
    /// `I(T_f; S_pp, T_pp, C_pp) − I(T_f; S_pp)`. Kept for comparison with
    /// results computed that way; it is not a conditional mutual information.
    SourceOnly,
}

/// Transfer entropy in bits as a difference of two KSG mutual informations,
/// using `k1` neighbours for the first term and `k2` for the second.
pub fn te_nearest_neighbor(emb: &Embedding, k1: usize, k2: usize, decomposition: Decomposition) -> Result<f64> {
    if emb.rows() == 0 {
        return Err(Error::EmptyEmbedding { len: emb.source_length() });
    }
    let needed = k1.max(k2) + 1;
    if emb.rows() < needed {
        return Err(Error::TooFewPoints { needed, got: emb.rows() });
    }
    let fut = Points::from_embedding(emb, &emb.future_cols());
    let mut cond = emb.target_past_cols();
    cond.extend(emb.conditional_cols());
    let src = emb.source_cols();
    let full: Vec<usize> = src.iter().chain(&cond).copied().collect();

    let first = mi_kraskov(&fut, &Points::from_embedding(emb, &full), k1)?;
    let second = match decomposition {
        Decomposition::ChainRule => mi_kraskov(&fut, &Points::from_embedding(emb, &cond), k2)?,
        Decomposition::SourceOnly => mi_kraskov(&fut, &Points::from_embedding(emb, &src), k2)?,
    };
    Ok(first - second)
}
