//! Visitation-frequency estimation on regular grids.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::embedding::Embedding;
use crate::error::{Error, Result};

/// Relative widening applied to each axis so the maximum lands inside the
/// last box.
const EXTENT_MARGIN: f64 = 1e-9;

/// Number of boxes per axis for the two partitions that get averaged:
/// `floor(N^(1/(dim+1)))`, at least 2, and one more than that.
pub fn binning_heuristic(n: usize, dim: usize) -> (usize, usize) {
    let n = n.max(1) as u128;
    let exp = (dim + 1) as u32;
    let mut r = libm::floor(libm::pow(n as f64, 1.0 / exp as f64)) as u128;
    // Correct for pow() landing just below an exact integer root.
    while (r + 1).checked_pow(exp).is_some_and(|p| p <= n) {
        r += 1;
    }
    while r > 0 && r.checked_pow(exp).is_none_or(|p| p > n) {
        r -= 1;
    }
    let lo = (r as usize).max(2);
    (lo, lo + 1)
}

/// A regular grid over the bounding box of an embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub bins_per_axis: usize,
    /// Per-axis `(min, max)` after widening.
    pub extent: Vec<(f64, f64)>,
}

impl Partition {
    pub fn new(emb: &Embedding, bins_per_axis: usize) -> Result<Self> {
        if bins_per_axis == 0 {
            return Err(Error::InvalidInput("bins_per_axis must be at least 1".into()));
        }
        let extent = (0..emb.dim())
            .map(|c| {
                let (lo, hi) = emb
                    .column_values(c)
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
                let scale = (hi - lo).abs().max(hi.abs()).max(lo.abs()).max(f64::MIN_POSITIVE);
                (lo, hi + EXTENT_MARGIN * scale)
            })
            .collect();
        Ok(Partition { bins_per_axis, extent })
    }

    /// Box index of `v` along `axis`. Intervals are right-open; the widened
    /// upper edge keeps the maximum in the last box.
    pub fn bin(&self, axis: usize, v: f64) -> u32 {
        let (lo, hi) = self.extent[axis];
        let width = (hi - lo) / self.bins_per_axis as f64;
        if width <= 0.0 {
            return 0;
        }
        let b = libm::floor((v - lo) / width);
        (b.max(0.0) as usize).min(self.bins_per_axis - 1) as u32
    }

    /// Box labels for every row, stored row-major.
    fn label(&self, emb: &Embedding) -> Vec<u32> {
        let mut out = Vec::with_capacity(emb.rows() * emb.dim());
        for row in emb.iter_rows() {
            out.extend(row.iter().enumerate().map(|(a, &v)| self.bin(a, v)));
        }
        out
    }
}

/// Occupancy counts of the occupied boxes over the columns in `subset`,
/// in ascending box order.
fn box_counts(labels: &[u32], dim: usize, subset: &[usize], bins: usize) -> Vec<usize> {
    let rows = labels.len() / dim;
    if subset.is_empty() {
        return alloc::vec![rows];
    }
    let fits = (bins as u128).checked_pow(subset.len() as u32).is_some();
    let mut counts = Vec::new();
    if fits {
        let mut keys: Vec<u128> = (0..rows)
            .map(|r| {
                subset
                    .iter()
                    .fold(0u128, |acc, &c| acc * bins as u128 + labels[r * dim + c] as u128)
            })
            .collect();
        keys.sort_unstable();
        let mut i = 0;
        while i < keys.len() {
            let j = i + keys[i..].iter().take_while(|&&k| k == keys[i]).count();
            counts.push(j - i);
            i = j;
        }
    } else {
        let cmp = |a: usize, b: usize| -> Ordering {
            subset
                .iter()
                .map(|&c| labels[a * dim + c].cmp(&labels[b * dim + c]))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        };
        let mut idx: Vec<usize> = (0..rows).collect();
        idx.sort_unstable_by(|&a, &b| cmp(a, b));
        let mut i = 0;
        while i < idx.len() {
            let mut j = i + 1;
            while j < idx.len() && cmp(idx[i], idx[j]).is_eq() {
                j += 1;
            }
            counts.push(j - i);
            i = j;
        }
    }
    counts
}

fn entropy_bits(counts: &[usize], total: usize) -> f64 {
    let n = total as f64;
    -counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            p * libm::log2(p)
        })
        .sum::<f64>()
}

/// Empirical probabilities of all occupied boxes of the full partition.
pub fn box_probabilities(emb: &Embedding, bins: usize) -> Result<Vec<f64>> {
    let part = Partition::new(emb, bins)?;
    let labels = part.label(emb);
    let all: Vec<usize> = (0..emb.dim()).collect();
    let n = emb.rows() as f64;
    Ok(box_counts(&labels, emb.dim(), &all, bins).into_iter().map(|c| c as f64 / n).collect())
}

/// Plug-in conditional mutual information `I(T_f; S_pp | T_pp, C_pp)` in bits
/// from box visitation frequencies.
pub fn te_visitation_frequency(emb: &Embedding, bins: usize) -> Result<f64> {
    if emb.rows() == 0 {
        return Err(Error::EmptyEmbedding { len: emb.source_length() });
    }
    let part = Partition::new(emb, bins)?;
    let labels = part.label(emb);
    let dim = emb.dim();
    let fut = emb.future_cols();
    let src = emb.source_cols();
    let mut cond = emb.target_past_cols();
    cond.extend(emb.conditional_cols());

    let join = |a: &[usize], b: &[usize]| -> Vec<usize> { a.iter().chain(b).copied().collect() };
    let n = emb.rows();
    let h = |subset: &[usize]| entropy_bits(&box_counts(&labels, dim, subset, bins), n);

    let te = h(&join(&fut, &cond)) + h(&join(&src, &cond))
        - h(&cond)
        - h(&join(&join(&fut, &src), &cond));
    // Plug-in CMI is nonnegative; only rounding can push it below zero.
    Ok(te.max(0.0))
}

/// Mean of [`te_visitation_frequency`] over the two partitions picked by
/// [`binning_heuristic`] for the embedding's source length and dimension.
pub fn te_binned_averaged(emb: &Embedding) -> Result<f64> {
    let (lo, hi) = binning_heuristic(emb.source_length(), emb.dim());
    Ok(0.5 * (te_visitation_frequency(emb, lo)? + te_visitation_frequency(emb, hi)?))
}
