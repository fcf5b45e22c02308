//! Partial sums, Cesàro means, and the maximal operators built from them.
//!
//! Everything here runs through a single spectral identity: dyadic
//! convolution multiplies Paley coefficients, so applying the summation
//! kernel `K_n` to `f` is a per-axis reweighting of the spectrum followed
//! by one inverse transform,
//!
//! ```text
//! (sigma_n f)^(i) = f^(i) * prod_l Khat_{n_l}(i_l).
//! ```
//!
//! Partial sums are the special case of 0/1 weights. For the Kaczmarz
//! system the weights are routed through the block permutation before being
//! applied to Paley slots; the sampled grid is transformed exactly once per
//! input function, no matter how many indices are evaluated afterwards,
//! which is what makes maximal operators over large cone families cheap.
//!
//! The second half of the module is the martingale side: conditional
//! expectations onto dyadic-rectangle algebras, the maximal function over a
//! sequence of those algebras, the associated Hardy quasi-norm, and an atom
//! checker for the rectangle Hardy-space theory.

use crate::cesaro::{cesaro_kernel_paley_coeffs, CesaroOrder};
use crate::error::{Error, Result};
use crate::point::DyadicInterval;
use crate::sample::SampledFunction;
use crate::systems::SystemKind;
use crate::transform::{fourier_coeffs, Spectrum};

/// A function's Paley spectrum, cached so that many summation indices can
/// be evaluated against it without repeating the forward transform.
#[derive(Clone, Debug)]
pub struct MeanEvaluator {
    ranks: Vec<u32>,
    coeffs: Vec<f64>,
}

impl MeanEvaluator {
    pub fn new(f: &SampledFunction) -> Self {
        let (ranks, coeffs) = fourier_coeffs(f, SystemKind::Paley).into_parts();
        MeanEvaluator { ranks, coeffs }
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    /// Rectangular partial sum `S_n f = sum_{k_l < n_l} fhat(k) psi_k`.
    /// An index of 0 empties that axis and the sum is identically zero;
    /// an index of `2^rank` keeps the whole resolved spectrum.
    pub fn partial_sum(&self, n: &[usize], system: SystemKind) -> Result<SampledFunction> {
        self.check_arity(n.len())?;
        let mut weights = Vec::with_capacity(self.ranks.len());
        for (&n_l, &rank) in n.iter().zip(&self.ranks) {
            let size = 1usize << rank;
            if n_l > size {
                return Err(Error::RankTooSmall {
                    n: n_l,
                    rank,
                    max: size,
                });
            }
            // Paley slot i belongs to the system function with index
            // paley_index(i) (the block permutation is an involution), so
            // the box keeps slot i exactly when that index is below n_l.
            let w: Vec<f64> = (0..size)
                .map(|i| if system.paley_index(i) < n_l { 1.0 } else { 0.0 })
                .collect();
            weights.push(w);
        }
        Ok(self.apply_axis_weights(&weights))
    }

    /// The (C, alpha) mean `sigma_n f`, one Cesàro order per axis.
    pub fn cesaro_mean(
        &self,
        n: &[usize],
        alpha: &[CesaroOrder],
        system: SystemKind,
    ) -> Result<SampledFunction> {
        self.check_arity(n.len())?;
        self.check_arity(alpha.len())?;
        let mut weights = Vec::with_capacity(self.ranks.len());
        for ((&n_l, &a_l), &rank) in n.iter().zip(alpha).zip(&self.ranks) {
            weights.push(cesaro_kernel_paley_coeffs(n_l, a_l, system, rank)?);
        }
        Ok(self.apply_axis_weights(&weights))
    }

    /// Pointwise supremum of `|sigma_n f|` over a family of indices.
    pub fn maximal_over(
        &self,
        family: &[Vec<usize>],
        alpha: &[CesaroOrder],
        system: SystemKind,
    ) -> Result<MaximalField> {
        if family.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let mut values = SampledFunction::zeros(&self.ranks);
        for n in family {
            let mean = self.cesaro_mean(n, alpha, system)?;
            values.max_abs_in_place(&mean);
        }
        Ok(MaximalField {
            values,
            family_size: family.len(),
        })
    }

    fn check_arity(&self, got: usize) -> Result<()> {
        if got != self.ranks.len() {
            return Err(Error::DimensionMismatch {
                want: self.ranks.len(),
                got,
            });
        }
        Ok(())
    }

    /// Multiplies each Paley coefficient by the product of its per-axis
    /// weights and inverts.
    fn apply_axis_weights(&self, weights: &[Vec<f64>]) -> SampledFunction {
        // shift of axis l = total rank of the axes that vary faster
        let mut shifts = vec![0u32; self.ranks.len()];
        let mut acc = 0;
        for l in (0..self.ranks.len()).rev() {
            shifts[l] = acc;
            acc += self.ranks[l];
        }
        let mut coeffs = self.coeffs.clone();
        for (flat, c) in coeffs.iter_mut().enumerate() {
            let mut w = 1.0;
            for l in 0..self.ranks.len() {
                let i_l = (flat >> shifts[l]) & ((1usize << self.ranks[l]) - 1);
                w *= weights[l][i_l];
            }
            *c *= w;
        }
        Spectrum::new(SystemKind::Paley, self.ranks.clone(), coeffs)
            .expect("cached spectrum keeps its shape")
            .inverse()
    }
}

/// One-shot rectangular partial sum; see [`MeanEvaluator::partial_sum`].
pub fn partial_sum(
    f: &SampledFunction,
    n: &[usize],
    system: SystemKind,
) -> Result<SampledFunction> {
    MeanEvaluator::new(f).partial_sum(n, system)
}

/// One-shot Cesàro mean; see [`MeanEvaluator::cesaro_mean`].
pub fn cesaro_mean(
    f: &SampledFunction,
    n: &[usize],
    alpha: &[CesaroOrder],
    system: SystemKind,
) -> Result<SampledFunction> {
    MeanEvaluator::new(f).cesaro_mean(n, alpha, system)
}

/// The pointwise maximum of `|sigma_n f|` over an index family, together
/// with how many indices contributed.
#[derive(Clone, Debug)]
pub struct MaximalField {
    values: SampledFunction,
    family_size: usize,
}

impl MaximalField {
    pub fn values(&self) -> &SampledFunction {
        &self.values
    }

    pub fn family_size(&self) -> usize {
        self.family_size
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        self.values.lp_norm(p)
    }

    pub fn into_values(self) -> SampledFunction {
        self.values
    }
}

/// Conditional expectation of `f` onto the algebra of dyadic rectangles of
/// ranks `m`: every cell's value becomes the average of `f` over the
/// rank-`m` rectangle containing it. Entries of `m` beyond a sampled rank
/// saturate there, since a sampled function is already constant on its own
/// resolution cells and conditioning finer changes nothing.
pub fn conditional_expectation(f: &SampledFunction, m: &[u32]) -> SampledFunction {
    assert_eq!(m.len(), f.dims(), "index arity mismatch");
    let ranks = f.ranks();
    let clamped: Vec<u32> = m.iter().zip(ranks).map(|(&a, &r)| a.min(r)).collect();

    // shift of axis l within the fine flat index
    let mut shifts = vec![0u32; ranks.len()];
    let mut acc = 0;
    for l in (0..ranks.len()).rev() {
        shifts[l] = acc;
        acc += ranks[l];
    }
    // coarse cells are indexed by the low (x_0..x_{m-1}) coordinate bits of
    // each axis, packed with the same axis order as the fine grid
    let coarse_len: usize = clamped.iter().map(|&a| 1usize << a).product();
    let mut sums = vec![0.0f64; coarse_len];
    let coarse_of = |flat: usize| -> usize {
        let mut c = 0usize;
        for l in 0..ranks.len() {
            let i_l = (flat >> shifts[l]) & ((1usize << ranks[l]) - 1);
            c = (c << clamped[l]) | (i_l & ((1usize << clamped[l]) - 1));
        }
        c
    };
    for (flat, &v) in f.values().iter().enumerate() {
        sums[coarse_of(flat)] += v;
    }
    let cell_count = (f.len() / coarse_len) as f64;
    let values: Vec<f64> = (0..f.len())
        .map(|flat| sums[coarse_of(flat)] / cell_count)
        .collect();
    SampledFunction::new(ranks.to_vec(), values).expect("shape preserved")
}

/// Martingale maximal function over a sequence of rectangle algebras:
/// `max_k |E_{m_k} f|` pointwise.
pub fn martingale_maximal(f: &SampledFunction, seq: &[Vec<u32>]) -> Result<SampledFunction> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    for m in seq {
        if m.len() != f.dims() {
            return Err(Error::DimensionMismatch {
                want: f.dims(),
                got: m.len(),
            });
        }
    }
    let mut out = SampledFunction::zeros(f.ranks());
    for m in seq {
        out.max_abs_in_place(&conditional_expectation(f, m));
    }
    Ok(out)
}

/// The Hardy quasi-norm attached to a martingale subsequence: the `L^p`
/// norm of [`martingale_maximal`]. Meaningful for any `p > 0`, including
/// the sub-unit exponents the cone theory runs on.
pub fn hardy_norm(f: &SampledFunction, seq: &[Vec<u32>], p: f64) -> Result<f64> {
    Ok(martingale_maximal(f, seq)?.lp_norm(p))
}

/// Outcome of testing a candidate `p`-atom against its rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AtomCheck {
    /// vanishes outside the rectangle (exact zeros)
    pub supported: bool,
    /// `sup |a| <= measure(I)^{-1/p}`, up to a relative 1e-12
    pub bounded: bool,
    /// `integral of a over I` is zero, up to 1e-12 of the trivial bound
    pub mean_zero: bool,
}

impl AtomCheck {
    pub fn is_atom(&self) -> bool {
        self.supported && self.bounded && self.mean_zero
    }
}

/// Tests the three `p`-atom conditions for `a` on the dyadic rectangle
/// `rect` (one interval per axis). The sampling must resolve the rectangle:
/// each interval rank may not exceed the corresponding sampled rank.
pub fn atom_check(a: &SampledFunction, rect: &[DyadicInterval], p: f64) -> Result<AtomCheck> {
    assert!(p > 0.0, "atom exponent must be positive, got {p}");
    if rect.len() != a.dims() {
        return Err(Error::DimensionMismatch {
            want: a.dims(),
            got: rect.len(),
        });
    }
    for (interval, &rank) in rect.iter().zip(a.ranks()) {
        if interval.rank() > rank {
            return Err(Error::RankTooSmall {
                n: 1usize << interval.rank(),
                rank,
                max: 1usize << rank,
            });
        }
    }

    let ranks = a.ranks();
    let mut shifts = vec![0u32; ranks.len()];
    let mut acc = 0;
    for l in (0..ranks.len()).rev() {
        shifts[l] = acc;
        acc += ranks[l];
    }
    let in_rect = |flat: usize| -> bool {
        rect.iter().enumerate().all(|(l, interval)| {
            let i_l = (flat >> shifts[l]) & ((1usize << ranks[l]) - 1);
            interval.contains(&crate::point::GroupPoint::from_index(i_l, ranks[l]))
        })
    };

    let mut supported = true;
    let mut sup = 0.0f64;
    for (flat, &v) in a.values().iter().enumerate() {
        if in_rect(flat) {
            sup = sup.max(v.abs());
        } else if v != 0.0 {
            supported = false;
        }
    }
    let measure: f64 = rect.iter().map(|i| i.measure()).product();
    let bound = measure.powf(-1.0 / p);
    let bounded = sup <= bound * (1.0 + 1e-12);
    // the integral over the rectangle equals the integral over the whole
    // grid whenever the support condition holds; scale the tolerance by the
    // largest value the integral could take
    let integral = a.integrate();
    let mean_zero = integral.abs() <= 1e-12 * (sup * measure).max(f64::MIN_POSITIVE);
    Ok(AtomCheck {
        supported,
        bounded,
        mean_zero,
    })
}

// ===== tests
