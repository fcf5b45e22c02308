//! Fast Walsh-Hadamard analysis and synthesis.
//!
//! With grid cells indexed so that bit `k` of the cell index is the
//! coordinate `x_k`, the plain radix-2 butterfly network computes
//! `y[n] = sum_j (-1)^{popcount(n & j)} x[j]`, which is exactly the matrix
//! of Paley-ordered Walsh functions. The forward transform divides by the
//! grid size so the output entries are genuine integrals
//! `f_hat(n) = integral f * w_n`; the inverse applies the same butterflies
//! unnormalized. Kaczmarz coefficients are never computed by inner
//! products: they are the Paley coefficients read through the
//! block-preserving permutation of [`kaczmarz_perm`], one axis at a time.

use crate::error::Result;
use crate::sample::SampledFunction;
use crate::systems::{kaczmarz_perm, SystemKind};

/// Unnormalized in-place Walsh-Hadamard butterflies on a power-of-two slice.
/// Applied twice this multiplies by the length, so callers scale once for
/// whichever direction needs it.
pub fn fwht_in_place(values: &mut [f64]) {
    assert!(
        values.len().is_power_of_two(),
        "transform length {} is not a power of two",
        values.len()
    );
    let mut h = 1;
    while h < values.len() {
        for chunk in values.chunks_exact_mut(2 * h) {
            let (a, b) = chunk.split_at_mut(h);
            for i in 0..h {
                let x = a[i];
                let y = b[i];
                a[i] = x + y;
                b[i] = x - y;
            }
        }
        h <<= 1;
    }
}

/// Butterflies along one axis of a flat row-major grid (first axis slowest).
fn fwht_along_axis(values: &mut [f64], ranks: &[u32], axis: usize) {
    let axis_len = 1usize << ranks[axis];
    let inner: usize = 1usize << ranks[axis + 1..].iter().sum::<u32>();
    let block = axis_len * inner;
    for base in (0..values.len()).step_by(block) {
        let mut h = 1;
        while h < axis_len {
            for start in (0..axis_len).step_by(2 * h) {
                for k in start..start + h {
                    let i1 = base + k * inner;
                    let i2 = base + (k + h) * inner;
                    for off in 0..inner {
                        let x = values[i1 + off];
                        let y = values[i2 + off];
                        values[i1 + off] = x + y;
                        values[i2 + off] = x - y;
                    }
                }
            }
            h <<= 1;
        }
    }
}

fn fwht_all_axes(values: &mut [f64], ranks: &[u32]) {
    for axis in 0..ranks.len() {
        fwht_along_axis(values, ranks, axis);
    }
}

/// Walsh coefficients of a sampled function, in the chosen enumeration.
///
/// Coefficient `n = (n_1, ..., n_d)` is the integral of `f` against the
/// product character `psi_{n_1} x ... x psi_{n_d}`, stored on the same
/// row-major layout as the function itself.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    system: SystemKind,
    ranks: Vec<u32>,
    coeffs: Vec<f64>,
}

impl Spectrum {
    /// Wraps raw coefficients; the layout contract is the same as
    /// [`SampledFunction::new`].
    pub fn new(system: SystemKind, ranks: Vec<u32>, coeffs: Vec<f64>) -> Result<Self> {
        // reuse the shape validation
        let f = SampledFunction::new(ranks, coeffs)?;
        let (ranks, coeffs) = f.into_parts();
        Ok(Spectrum { system, ranks, coeffs })
    }

    pub fn system(&self) -> SystemKind {
        self.system
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn coeff(&self, idx: &[usize]) -> f64 {
        assert_eq!(idx.len(), self.ranks.len());
        let mut flat = 0usize;
        for (axis, &j) in idx.iter().enumerate() {
            assert!(j < 1usize << self.ranks[axis]);
            flat = (flat << self.ranks[axis]) | j;
        }
        self.coeffs[flat]
    }

    /// Synthesizes the sampled function `sum_n coeff(n) psi_n`.
    pub fn inverse(&self) -> SampledFunction {
        let mut values = match self.system {
            SystemKind::Paley => self.coeffs.clone(),
            SystemKind::Kaczmarz => permute_axes_by_perm(&self.coeffs, &self.ranks),
        };
        fwht_all_axes(&mut values, &self.ranks);
        SampledFunction::new(self.ranks.clone(), values).expect("shape preserved")
    }

    pub(crate) fn into_parts(self) -> (Vec<u32>, Vec<f64>) {
        (self.ranks, self.coeffs)
    }

    /// The same coefficients rebased to the other enumeration. A no-op on
    /// the values when the system already matches.
    pub fn to_system(&self, system: SystemKind) -> Spectrum {
        if system == self.system {
            return self.clone();
        }
        // pi is an involution, so the same gather converts in either
        // direction.
        Spectrum {
            system,
            ranks: self.ranks.clone(),
            coeffs: permute_axes_by_perm(&self.coeffs, &self.ranks),
        }
    }
}

/// Walsh coefficients of `f` in the requested enumeration.
pub fn fourier_coeffs(f: &SampledFunction, system: SystemKind) -> Spectrum {
    let mut coeffs = f.values().to_vec();
    fwht_all_axes(&mut coeffs, f.ranks());
    let scale = 1.0 / f.len() as f64;
    for c in coeffs.iter_mut() {
        *c *= scale;
    }
    let coeffs = match system {
        SystemKind::Paley => coeffs,
        SystemKind::Kaczmarz => permute_axes_by_perm(&coeffs, f.ranks()),
    };
    Spectrum {
        system,
        ranks: f.ranks().to_vec(),
        coeffs,
    }
}

/// Gathers `out[n] = in[pi(n)]` with the Kaczmarz permutation applied to
/// every axis coordinate independently.
fn permute_axes_by_perm(coeffs: &[f64], ranks: &[u32]) -> Vec<f64> {
    let mut out = vec![0.0; coeffs.len()];
    for (flat, slot) in out.iter_mut().enumerate() {
        let mut rest = flat;
        let mut src = 0usize;
        let mut shift_acc = 0u32;
        for &rank in ranks.iter().rev() {
            let coord = rest & ((1usize << rank) - 1);
            src |= kaczmarz_perm(coord) << shift_acc;
            rest >>= rank;
            shift_acc += rank;
        }
        *slot = coeffs[src];
    }
    out
}

// ===== tests
