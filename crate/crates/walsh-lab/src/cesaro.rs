//! Cesàro numbers and summation kernels.
//!
//! The Cesàro numbers are the generalized binomial coefficients
//!
//! ```text
//! A_j^alpha = (alpha+1)(alpha+2)...(alpha+j) / j!,    A_0^alpha = 1,
//! ```
//!
//! computed here by the stable recurrence `A_j = A_{j-1} (alpha+j)/j`. They
//! satisfy `A_j^1 = j+1`, grow like `j^alpha / Gamma(alpha+1)`, and telescope:
//! the prefix sum of `A_i^{alpha-1}` up to `M` is exactly `A_M^alpha`.
//!
//! The `n`-th Dirichlet kernel of a system `psi` is `D_n = sum_{k<n} psi_k`,
//! and the (C, alpha) kernel of order `N` is the weighted average
//!
//! ```text
//! K_N^alpha = (1/A_N^alpha) sum_{k=0}^{N} A_{N-k}^{alpha-1} D_k.
//! ```
//!
//! Two independent routes are provided. The definitional route accumulates
//! partial sums of pointwise-evaluated characters and costs `O(N 2^m)`; it
//! is the reference. The spectral route uses the closed form of the kernel's
//! Paley coefficients — the telescoping identity gives
//! `K_N_hat(j) = A_{N-1-j}^alpha / A_N^alpha` for `j < N` and zero above, with
//! Kaczmarz kernels reading the same values through the block permutation —
//! and synthesizes in `O(2^m m)`. Surveys and experiments run on the
//! spectral route; tests pin it to the definitional one.

use crate::error::{Error, Result};
use crate::sample::SampledFunction;
use crate::systems::SystemKind;
use crate::transform::Spectrum;
use rayon::prelude::*;

/// The Cesàro number `A_j^alpha`. Requires `alpha > -1`; the recurrence is
/// exact for integer `alpha` and stable for the fractional orders used by
/// the kernels (where `alpha - 1` lies in `(-1, 0]`).
pub fn cesaro_number(j: usize, alpha: f64) -> f64 {
    assert!(alpha > -1.0, "Cesàro numbers need alpha > -1, got {alpha}");
    let mut a = 1.0;
    for i in 1..=j {
        // multiply before dividing: for integer alpha every intermediate
        // stays an exact integer, so A_j^1 = j + 1 holds without drift
        a = a * (alpha + i as f64) / i as f64;
    }
    a
}

/// The table `A_0^alpha, ..., A_up_to^alpha` in one pass.
pub fn cesaro_numbers(up_to: usize, alpha: f64) -> Vec<f64> {
    assert!(alpha > -1.0, "Cesàro numbers need alpha > -1, got {alpha}");
    let mut table = Vec::with_capacity(up_to + 1);
    let mut a = 1.0;
    table.push(a);
    for i in 1..=up_to {
        a = a * (alpha + i as f64) / i as f64;
        table.push(a);
    }
    table
}

/// Incrementally advanced Cesàro number, for index paths that move far
/// faster than one step per iteration (superlinear cone axes reach indices
/// in the millions, too many to tabulate per step).
pub(crate) struct RunningCesaro {
    alpha: f64,
    index: usize,
    value: f64,
}

impl RunningCesaro {
    pub fn new(alpha: f64) -> Self {
        assert!(alpha > -1.0);
        RunningCesaro { alpha, index: 0, value: 1.0 }
    }

    /// Advances to `A_j^alpha`; `j` must be non-decreasing across calls.
    pub fn advance_to(&mut self, j: usize) -> f64 {
        assert!(j >= self.index, "RunningCesaro only moves forward");
        while self.index < j {
            self.index += 1;
            self.value = self.value * (self.alpha + self.index as f64) / self.index as f64;
        }
        self.value
    }
}

/// A summation order `alpha` restricted to the range `(0, 1]` covered by
/// the kernel theory.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct CesaroOrder(f64);

impl CesaroOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha <= 1.0 {
            Ok(CesaroOrder(alpha))
        } else {
            Err(Error::AlphaOutOfRange(alpha))
        }
    }

    pub fn get(&self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for CesaroOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The smallest rank whose grid resolves indices below `n`, i.e. the
/// smallest `m` with `n <= 2^m`.
pub fn smallest_exact_rank(n: usize) -> u32 {
    let mut m = 0;
    while (1usize << m) < n {
        m += 1;
    }
    m
}

fn check_rank(n: usize, rank: u32) -> Result<()> {
    if rank < usize::BITS && n > (1usize << rank) {
        return Err(Error::RankTooSmall {
            n,
            rank,
            max: 1usize << rank,
        });
    }
    Ok(())
}

/// The Dirichlet kernel `D_n = sum_{k<n} psi_k` sampled at the given rank,
/// which must satisfy `n <= 2^rank` so the kernel is coset-constant.
///
/// Synthesized from its spectrum, which keeps every value an exact small
/// integer: `D_{2^k}` is `2^k` on the rank-`k` interval at zero and vanishes
/// elsewhere, in either enumeration.
pub fn dirichlet_kernel(n: usize, system: SystemKind, rank: u32) -> Result<SampledFunction> {
    check_rank(n, rank)?;
    let mut coeffs = vec![0.0; 1usize << rank];
    for k in 0..n {
        coeffs[system.paley_index(k)] = 1.0;
    }
    let spectrum = Spectrum::new(SystemKind::Paley, vec![rank], coeffs)?;
    Ok(spectrum.inverse())
}

/// Paley-basis coefficients of the (C, alpha) kernel `K_N` of the chosen
/// system, at the given rank. This is the closed form the spectral route
/// synthesizes from, and the multiplier used to apply Cesàro means by
/// dyadic convolution.
pub fn cesaro_kernel_paley_coeffs(
    n: usize,
    alpha: CesaroOrder,
    system: SystemKind,
    rank: u32,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::BadParameter("Cesàro kernel order N must be >= 1".into()));
    }
    check_rank(n, rank)?;
    let a = cesaro_numbers(n, alpha.get());
    let a_n = a[n];
    let mut coeffs = vec![0.0; 1usize << rank];
    for (i, slot) in coeffs.iter_mut().enumerate() {
        let j = system.paley_index(i);
        if j < n {
            *slot = a[n - 1 - j] / a_n;
        }
    }
    Ok(coeffs)
}

/// The (C, alpha) kernel via the closed-form spectrum, `O(2^m m)`.
pub fn cesaro_kernel_spectral(
    n: usize,
    alpha: CesaroOrder,
    system: SystemKind,
    rank: u32,
) -> Result<SampledFunction> {
    let coeffs = cesaro_kernel_paley_coeffs(n, alpha, system, rank)?;
    Ok(Spectrum::new(SystemKind::Paley, vec![rank], coeffs)?.inverse())
}

/// The (C, alpha) kernel straight from the definition: a running Dirichlet
/// sum of pointwise-evaluated characters, weighted by `A_{N-k}^{alpha-1}`.
/// Costs `O(N 2^m)`; the reference implementation for the spectral route.
pub fn cesaro_kernel_definitional(
    n: usize,
    alpha: CesaroOrder,
    system: SystemKind,
    rank: u32,
) -> Result<SampledFunction> {
    if n == 0 {
        return Err(Error::BadParameter("Cesàro kernel order N must be >= 1".into()));
    }
    check_rank(n, rank)?;
    let weights = cesaro_numbers(n, alpha.get() - 1.0);
    let a_n = cesaro_number(n, alpha.get());
    let cells = 1usize << rank;
    let mut dirichlet = vec![0.0; cells];
    let mut acc = vec![0.0; cells];
    // k = 0 contributes nothing since D_0 = 0
    for k in 1..=n {
        for (j, d) in dirichlet.iter_mut().enumerate() {
            *d += system.eval(k - 1, &crate::point::GroupPoint::from_index(j, rank));
        }
        let w = weights[n - k];
        for (slot, d) in acc.iter_mut().zip(&dirichlet) {
            *slot += w * d;
        }
    }
    for v in acc.iter_mut() {
        *v /= a_n;
    }
    SampledFunction::new(vec![rank], acc)
}

/// Closed form of the kernel's integral: the zeroth coefficient
/// `A_{N-1}^alpha / A_N^alpha`, the same for both enumerations.
pub fn cesaro_kernel_mean(n: usize, alpha: CesaroOrder) -> f64 {
    assert!(n >= 1);
    let a = cesaro_numbers(n, alpha.get());
    a[n - 1] / a[n]
}

/// L^1 norms of the kernels `K_1, ..., K_max_n` at a fixed rank.
#[derive(Clone, Debug)]
pub struct KernelTable {
    system: SystemKind,
    alpha: CesaroOrder,
    rank: u32,
    norms: Vec<f64>,
}

impl KernelTable {
    pub fn system(&self) -> SystemKind {
        self.system
    }

    pub fn alpha(&self) -> CesaroOrder {
        self.alpha
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn max_n(&self) -> usize {
        self.norms.len()
    }

    /// `||K_N||_1` for `N` from 1 to `max_n`, indexed by `N - 1`.
    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn norm(&self, n: usize) -> f64 {
        self.norms[n - 1]
    }

    /// Per-block maxima `(j, max{||K_N||_1 : 2^j <= N < 2^{j+1}})` over the
    /// blocks intersecting the surveyed range. The stabilization (or not)
    /// of this sequence is the uniform-boundedness diagnostic.
    pub fn block_maxima(&self) -> Vec<(u32, f64)> {
        let mut out = Vec::new();
        let mut j = 0u32;
        while (1usize << j) <= self.max_n() {
            let lo = 1usize << j;
            let hi = (1usize << (j + 1)).min(self.max_n() + 1);
            let max = self.norms[lo - 1..hi - 1]
                .iter()
                .fold(f64::NEG_INFINITY, |a, &b| a.max(b));
            out.push((j, max));
            j += 1;
        }
        out
    }
}

/// Surveys `||K_N^alpha||_1` for `N = 1..=max_n` on a rank-`rank` grid via
/// the spectral route. Kernel constructions are independent per `N`, so the
/// sweep is parallel; results land in an indexed table and each norm uses
/// the fixed-tree summation, so the output is identical at any thread count.
pub fn kernel_norm_survey(
    system: SystemKind,
    alpha: CesaroOrder,
    max_n: usize,
    rank: u32,
) -> Result<KernelTable> {
    if max_n == 0 {
        return Err(Error::BadParameter("survey needs max_n >= 1".into()));
    }
    check_rank(max_n, rank)?;
    let norms = (1..=max_n)
        .into_par_iter()
        .map(|n| {
            let kernel = cesaro_kernel_spectral(n, alpha, system, rank)?;
            Ok(kernel.lp_norm(1.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(KernelTable {
        system,
        alpha,
        rank,
        norms,
    })
}

// ===== tests
