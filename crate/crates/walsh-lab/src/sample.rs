//! Functions sampled on dyadic grids.
//!
//! A rank-`(m_1, ..., m_d)` grid splits the `d`-fold product group into
//! `2^(m_1 + ... + m_d)` rectangular cosets. A `SampledFunction` holds one
//! value per coset, flat in row-major order with the first axis slowest, so
//! slicing along the first coordinate is contiguous. Cell `j` on axis `i`
//! is the coset anchored at the point whose coordinates are the bits of `j`
//! (see [`GroupPoint::from_index`]).
//!
//! All integrals are means against normalized Haar measure: every coset of
//! a rank-`m` grid has measure `2^-m`. Sums are accumulated pairwise in a
//! fixed tree order, so results do not depend on thread count or chunking
//! anywhere downstream.

use crate::error::{Error, Result};
use crate::point::{DyadicInterval, GroupPoint};

/// Pairwise (cascade) summation with a fixed tree shape.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Pairwise summation of `f(x)` over a slice, same tree shape as
/// [`pairwise_sum`].
pub(crate) fn pairwise_map_sum(xs: &[f64], f: &impl Fn(f64) -> f64) -> f64 {
    if xs.len() <= 32 {
        let mut acc = 0.0;
        for &x in xs {
            acc += f(x);
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_map_sum(&xs[..mid], f) + pairwise_map_sum(&xs[mid..], f)
}

/// A real-valued function on a product of dyadic groups, constant on the
/// cosets of a fixed-rank grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    ranks: Vec<u32>,
    values: Vec<f64>,
}

fn grid_len(ranks: &[u32]) -> usize {
    let total: u32 = ranks.iter().sum();
    assert!(total < usize::BITS, "grid of rank sum {total} overflows the address space");
    1usize << total
}

impl SampledFunction {
    /// Wraps an existing value buffer. The buffer length must match the
    /// grid size `2^(m_1 + ... + m_d)`.
    pub fn new(ranks: Vec<u32>, values: Vec<f64>) -> Result<Self> {
        let want = grid_len(&ranks);
        if values.len() != want {
            return Err(Error::ShapeMismatch {
                ranks,
                want,
                got: values.len(),
            });
        }
        Ok(SampledFunction { ranks, values })
    }

    pub fn zeros(ranks: &[u32]) -> Self {
        SampledFunction {
            ranks: ranks.to_vec(),
            values: vec![0.0; grid_len(ranks)],
        }
    }

    pub fn constant(ranks: &[u32], value: f64) -> Self {
        SampledFunction {
            ranks: ranks.to_vec(),
            values: vec![value; grid_len(ranks)],
        }
    }

    /// Samples a pointwise-defined function: the closure receives one
    /// `GroupPoint` per axis (the coset anchors of the cell).
    pub fn from_fn(ranks: &[u32], mut f: impl FnMut(&[GroupPoint]) -> f64) -> Self {
        let mut out = SampledFunction::zeros(ranks);
        let mut anchors: Vec<GroupPoint> =
            ranks.iter().map(|&m| GroupPoint::zero(m)).collect();
        for flat in 0..out.values.len() {
            out.decompose(flat, |axis, j| {
                anchors[axis] = GroupPoint::from_index(j, ranks[axis]);
            });
            out.values[flat] = f(&anchors);
        }
        out
    }

    /// One-dimensional convenience wrapper around [`SampledFunction::from_fn`].
    pub fn from_fn_1d(rank: u32, mut f: impl FnMut(GroupPoint) -> f64) -> Self {
        let values = (0..1usize << rank)
            .map(|j| f(GroupPoint::from_index(j, rank)))
            .collect();
        SampledFunction {
            ranks: vec![rank],
            values,
        }
    }

    /// Indicator of a dyadic rectangle, sampled at the given ranks. Each
    /// interval's rank must not exceed the grid rank of its axis.
    pub fn indicator(intervals: &[DyadicInterval], ranks: &[u32]) -> Result<Self> {
        if intervals.len() != ranks.len() {
            return Err(Error::DimensionMismatch {
                want: ranks.len(),
                got: intervals.len(),
            });
        }
        for (iv, &m) in intervals.iter().zip(ranks) {
            if iv.rank() > m {
                return Err(Error::RankTooSmall {
                    n: 1usize << iv.rank(),
                    rank: m,
                    max: 1usize << m,
                });
            }
        }
        Ok(SampledFunction::from_fn(ranks, |anchors| {
            let inside = intervals
                .iter()
                .zip(anchors)
                .all(|(iv, anchor)| iv.contains(anchor));
            if inside {
                1.0
            } else {
                0.0
            }
        }))
    }

    pub fn dims(&self) -> usize {
        self.ranks.len()
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub(crate) fn into_parts(self) -> (Vec<u32>, Vec<f64>) {
        (self.ranks, self.values)
    }

    /// Row-major flat index of a multi-index, first axis slowest.
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.ranks.len(), "index arity mismatch");
        let mut flat = 0usize;
        for (axis, &j) in idx.iter().enumerate() {
            let size = 1usize << self.ranks[axis];
            assert!(j < size, "axis {axis}: cell {j} out of range (< {size})");
            flat = (flat << self.ranks[axis]) | j;
        }
        flat
    }

    /// Calls `visit(axis, cell)` for each axis coordinate of a flat index.
    fn decompose(&self, flat: usize, mut visit: impl FnMut(usize, usize)) {
        let mut rest = flat;
        for axis in (0..self.ranks.len()).rev() {
            let size = 1usize << self.ranks[axis];
            visit(axis, rest & (size - 1));
            rest >>= self.ranks[axis];
        }
    }

    pub fn value_at(&self, idx: &[usize]) -> f64 {
        self.values[self.flat_index(idx)]
    }

    /// Integral against normalized Haar measure: the mean of the cell
    /// values. Exact (up to rounding) because the function is constant on
    /// each coset.
    pub fn integrate(&self) -> f64 {
        pairwise_sum(&self.values) / self.values.len() as f64
    }

    /// The L^p quasi-norm for `0 < p < inf`, or the grid maximum of `|f|`
    /// when `p` is infinite. Panics for `p <= 0`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        assert!(p > 0.0, "lp_norm needs p > 0, got {p}");
        if p.is_infinite() {
            return self
                .values
                .iter()
                .fold(0.0f64, |acc, &v| acc.max(v.abs()));
        }
        let mean = pairwise_map_sum(&self.values, &|v: f64| v.abs().powf(p))
            / self.values.len() as f64;
        mean.powf(1.0 / p)
    }

    /// Composes with `tau_a` applied to one axis: returns `x -> f(..., tau_a(x_i), ...)`.
    pub fn compose_tau_axis(&self, axis: usize, a: u32) -> Self {
        assert!(axis < self.dims());
        assert!(a <= self.ranks[axis]);
        let mut out = self.clone();
        let inner: u32 = self.ranks[axis + 1..].iter().sum();
        let axis_len = 1usize << self.ranks[axis];
        let outer_len = self.values.len() >> (self.ranks[axis] + inner);
        for o in 0..outer_len {
            for j in 0..axis_len {
                // tau is an involution, so reading from the tau'd cell is the
                // same as writing to it.
                let src = GroupPoint::from_index(j, self.ranks[axis]).tau(a).index();
                for i in 0..1usize << inner {
                    let dst_flat = ((o << self.ranks[axis] | j) << inner) | i;
                    let src_flat = ((o << self.ranks[axis] | src) << inner) | i;
                    out.values[dst_flat] = self.values[src_flat];
                }
            }
        }
        out
    }

    /// Pointwise combination with another function on the same grid.
    pub fn zip_with(&self, other: &SampledFunction, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.ranks, other.ranks, "grid shape mismatch");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        SampledFunction {
            ranks: self.ranks.clone(),
            values,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        SampledFunction {
            ranks: self.ranks.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn sub(&self, other: &SampledFunction) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    /// In-place pointwise `max(self, |other|)`; the running reduction used
    /// by the maximal operators.
    pub fn max_abs_in_place(&mut self, other: &SampledFunction) {
        assert_eq!(self.ranks, other.ranks, "grid shape mismatch");
        for (v, &o) in self.values.iter_mut().zip(&other.values) {
            *v = v.max(o.abs());
        }
    }
}

// ===== tests
