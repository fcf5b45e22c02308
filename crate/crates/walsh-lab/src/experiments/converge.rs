//! Convergence of cone-indexed Cesàro means on well-behaved functions.
//!
//! The restricted maximal operator story has a positive side: along indices
//! inside a cone, the means sigma_n f converge to f for nice f, and the
//! dyadic subsequence n = 2^{nbar(n1)} makes the rate visible on a finite
//! grid. This experiment builds one test function, sweeps n1 over a range,
//! and reports the L^1 and uniform errors at each cone index.
//!
//! For a character polynomial with nonnegative coefficients the uniform
//! error has an exact closed form. Writing f = sum_j c_j psi_j, the mean
//! with box index n multiplies the term at j by
//! `prod_l A_{n_l - 1 - j_l} / A_{n_l}` (zero once an axis index escapes
//! its box), so the error is largest at the origin, where every character
//! equals one. That value is reported alongside the measured error as a
//! cross-check of the whole transform pipeline.

use crate::cesaro::{cesaro_kernel_spectral, cesaro_numbers, CesaroOrder};
use crate::cones::ConeSpec;
use crate::error::{Error, Result};
use crate::experiments::ExperimentRecord;
use crate::point::DyadicInterval;
use crate::sample::SampledFunction;
use crate::summation::MeanEvaluator;
use crate::systems::SystemKind;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

/// Test functions with known convergence behaviour.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestFunction {
    /// Indicator of the product of rank-2 intervals at the origin.
    Indicator,
    /// A fixed character polynomial with nonnegative coefficients on small
    /// indices, expanded in the system under test.
    Polynomial,
}

impl TestFunction {
    /// Spectrum of the polynomial variant: `(per-axis indices, coefficient)`.
    fn terms(d: usize) -> Vec<(Vec<usize>, f64)> {
        let spread = |head: &[usize]| {
            let mut idx = vec![0usize; d];
            for (slot, &v) in idx.iter_mut().zip(head) {
                *slot = v;
            }
            idx
        };
        vec![
            (spread(&[0, 0]), 0.75),
            (spread(&[1, 0]), 0.5),
            (spread(&[3, 1]), 0.25),
            (spread(&[7, 2]), 0.125),
        ]
    }

    fn sample(&self, ranks: &[u32], system: SystemKind) -> Result<SampledFunction> {
        match self {
            TestFunction::Indicator => {
                let intervals: Vec<DyadicInterval> = ranks
                    .iter()
                    .map(|&r| {
                        if r < 2 {
                            return Err(Error::BadParameter(
                                "the indicator test function needs rank >= 2 per axis".into(),
                            ));
                        }
                        Ok(DyadicInterval::at_zero(2))
                    })
                    .collect::<Result<_>>()?;
                SampledFunction::indicator(&intervals, ranks)
            }
            TestFunction::Polynomial => {
                let terms = Self::terms(ranks.len());
                for (idx, _) in &terms {
                    for (&j, &r) in idx.iter().zip(ranks) {
                        if j >= 1usize << r {
                            return Err(Error::RankTooSmall {
                                n: j + 1,
                                rank: r,
                                max: 1usize << r,
                            });
                        }
                    }
                }
                Ok(SampledFunction::from_fn(ranks, |pts| {
                    terms
                        .iter()
                        .map(|(idx, c)| {
                            c * idx
                                .iter()
                                .zip(pts)
                                .map(|(&j, pt)| system.eval(j, pt))
                                .product::<f64>()
                        })
                        .sum()
                }))
            }
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Indicator => write!(f, "indicator"),
            TestFunction::Polynomial => write!(f, "polynomial"),
        }
    }
}

impl FromStr for TestFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "indicator" => Ok(TestFunction::Indicator),
            "polynomial" => Ok(TestFunction::Polynomial),
            other => Err(Error::BadParameter(format!(
                "unknown test function {other:?}, expected indicator or polynomial"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConvergeRow {
    pub n1: u32,
    pub index: Vec<usize>,
    pub e1: f64,
    pub einf: f64,
    pub einf_closed: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ConvergeReport {
    pub function: TestFunction,
    pub system: SystemKind,
    pub rows: Vec<ConvergeRow>,
    pub wall_time_s: f64,
}

impl ConvergeReport {
    pub fn records(&self) -> Vec<ExperimentRecord> {
        self.rows
            .iter()
            .map(|row| {
                let index = row
                    .index
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("x");
                let mut r = ExperimentRecord::new("converge", row.e1)
                    .param("function", self.function)
                    .param("system", self.system)
                    .param("n1", row.n1)
                    .param("index", index)
                    .derived("einf", row.einf);
                if let Some(closed) = row.einf_closed {
                    r = r.derived("einf_closed", closed);
                }
                r.wall_time_s = self.wall_time_s;
                r
            })
            .collect()
    }
}

/// Sweeps `n1` over `n1_lo..=n1_hi`, forming the cone index `2^{nbar(n1)}`
/// one dyadic layer per axis, and measures how far the Cesàro mean at that
/// index sits from the test function.
pub fn convergence_experiment(
    function: TestFunction,
    cone: &ConeSpec,
    alpha: &[CesaroOrder],
    n1_lo: u32,
    n1_hi: u32,
    system: SystemKind,
) -> Result<ConvergeReport> {
    let started = Instant::now();
    if alpha.len() != cone.dims() {
        return Err(Error::DimensionMismatch {
            want: cone.dims(),
            got: alpha.len(),
        });
    }
    if n1_lo < 1 || n1_hi < n1_lo {
        return Err(Error::BadParameter(format!(
            "converge needs 1 <= n1_lo <= n1_hi, got {n1_lo}..{n1_hi}"
        )));
    }

    let nbars: Vec<Vec<u32>> = (n1_lo..=n1_hi).map(|n1| cone.nbar_of(n1)).collect();
    let mut ranks = vec![0u32; cone.dims()];
    for nbar in &nbars {
        for (slot, &r) in ranks.iter_mut().zip(nbar) {
            *slot = (*slot).max(r);
        }
    }
    let total_bits: u32 = ranks.iter().sum();
    if total_bits > 24 {
        return Err(Error::BadParameter(format!(
            "converge grid needs 2^{total_bits} cells, beyond the desk cap of 2^24"
        )));
    }

    let f = function.sample(&ranks, system)?;
    let sup_f = f.lp_norm(f64::INFINITY);
    let evaluator = MeanEvaluator::new(&f);

    let mut rows = Vec::with_capacity(nbars.len());
    for (nbar, n1) in nbars.iter().zip(n1_lo..=n1_hi) {
        let index: Vec<usize> = nbar.iter().map(|&m| 1usize << m).collect();
        if !cone.contains(&index) {
            return Err(Error::ContractViolation(format!(
                "dyadic index {index:?} escaped its own cone at n1 = {n1}"
            )));
        }
        let sigma = evaluator.cesaro_mean(&index, alpha, system)?;

        // every mean is dominated by the product of kernel L^1 norms; a
        // breach means the transform pipeline is corrupt, not the data
        let mut envelope = sup_f;
        for ((&n_l, &a_l), &r_l) in index.iter().zip(alpha).zip(&ranks) {
            envelope *= cesaro_kernel_spectral(n_l, a_l, system, r_l)?.lp_norm(1.0);
        }
        let sup_sigma = sigma.lp_norm(f64::INFINITY);
        if sup_sigma > envelope * (1.0 + 1e-9) {
            return Err(Error::ContractViolation(format!(
                "mean at {index:?} reached sup {sup_sigma}, over the kernel envelope {envelope}"
            )));
        }

        let diff = sigma.sub(&f);
        let einf_closed = match function {
            TestFunction::Polynomial => {
                Some(polynomial_einf(&TestFunction::terms(cone.dims()), &index, alpha))
            }
            TestFunction::Indicator => None,
        };
        rows.push(ConvergeRow {
            n1,
            index,
            e1: diff.lp_norm(1.0),
            einf: diff.lp_norm(f64::INFINITY),
            einf_closed,
        });
    }
    Ok(ConvergeReport {
        function,
        system,
        rows,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

/// Exact uniform error of the mean on a nonnegative character polynomial:
/// the damping factors all peak at the origin.
fn polynomial_einf(terms: &[(Vec<usize>, f64)], index: &[usize], alpha: &[CesaroOrder]) -> f64 {
    let tables: Vec<Vec<f64>> = index
        .iter()
        .zip(alpha)
        .map(|(&n_l, &a_l)| cesaro_numbers(n_l, a_l.get()))
        .collect();
    terms
        .iter()
        .map(|(idx, c)| {
            let kept: f64 = idx
                .iter()
                .zip(index)
                .zip(&tables)
                .map(|((&j, &n_l), a)| if j < n_l { a[n_l - 1 - j] / a[n_l] } else { 0.0 })
                .product();
            c * (1.0 - kept)
        })
        .sum()
}

// ===== tests
