//! The family of functions that defeats the restricted maximal operator.
//!
//! For every martingale Hardy exponent below the critical index the cone
//! maximal operator of Walsh-Kaczmarz Cesàro means is unbounded, and the
//! witness is explicit. Fix a cone and orders alpha_1 <= ... <= alpha_d,
//! put p0 = 1/(1 + alpha_1), and for a block height n1 take
//!
//! ```text
//! f(x) = (D_{2^{n1+1}} - D_{2^{n1}})(x^1) * prod_{j>=2} w_{2^{nbar_j}-1}(x^j),
//! ```
//!
//! with nbar the cone profile of n1. The Walsh-Kaczmarz spectrum of f is
//! the indicator of one dyadic box, its Hardy norm is exactly
//! 2^{(1 - 1/p0) n1}, and the maximal function over the cone indices
//! L^N = (2^{n1} + N, gamma_j-images) is large on a set that the Hardy
//! norm cannot see. The ratio
//!
//! ```text
//! R(n1) = || max_N |sigma_{L^N} f| ||_{p0} / ||f||_{H_{p0}}
//! ```
//!
//! then grows with n1, which is the quantitative content of the
//! counterexample.
//!
//! Two evaluation paths are available. The faithful one samples f on a
//! d-dimensional grid and runs the full transform machinery; it is
//! exponential in the sum of ranks, so it serves as an oracle at small n1.
//! The scaled path rests on an exact identity: on the dyadic box the means
//! collapse to a one-dimensional weighted kernel,
//!
//! ```text
//! |sigma_{L^N} f(x)| = c_N |K_N^{w,alpha_1}(tau_{n1} x^1)|,
//! c_N = (A_N^{a1} / A_{L_1}^{a1}) prod_{j>=2} A_{L_j - 2^{nbar_j}}^{a_j} / A_{L_j}^{a_j},
//! ```
//!
//! because the axis-j factor of f occupies the single Walsh-Kaczmarz index
//! 2^{nbar_j} - 1 and the axis-1 block rearranges through tau into an
//! ordinary Walsh kernel. The identity is checked pointwise against the
//! oracle in the tests and on demand per run.

use crate::cesaro::{
    cesaro_kernel_spectral, dirichlet_kernel, smallest_exact_rank, CesaroOrder, RunningCesaro,
};
use crate::cones::ConeSpec;
use crate::error::{Error, Result};
use crate::experiments::{log_log_slope_upper_half, ExperimentRecord};
use crate::sample::SampledFunction;
use crate::summation::{hardy_norm, MeanEvaluator};
use crate::systems::{walsh_paley, SystemKind};
use rayon::prelude::*;
use std::time::Instant;

/// One witness function, pinned to a cone, orders, and block height.
#[derive(Clone, Debug)]
pub struct CounterexampleSpec {
    n1: u32,
    cone: ConeSpec,
    alpha: Vec<CesaroOrder>,
}

impl CounterexampleSpec {
    pub fn new(n1: u32, cone: ConeSpec, alpha: Vec<CesaroOrder>) -> Result<Self> {
        if n1 < 2 {
            return Err(Error::BadParameter(
                "the witness needs n1 >= 2 so that ln n1 > 0".into(),
            ));
        }
        if alpha.len() != cone.dims() {
            return Err(Error::DimensionMismatch {
                want: cone.dims(),
                got: alpha.len(),
            });
        }
        for pair in alpha.windows(2) {
            if pair[1].get() < pair[0].get() {
                return Err(Error::BadParameter(
                    "counterexample orders must be non-decreasing; the first axis carries the critical exponent".into(),
                ));
            }
        }
        Ok(CounterexampleSpec { n1, cone, alpha })
    }

    pub fn n1(&self) -> u32 {
        self.n1
    }

    pub fn cone(&self) -> &ConeSpec {
        &self.cone
    }

    pub fn alpha(&self) -> &[CesaroOrder] {
        &self.alpha
    }

    /// The critical Hardy exponent 1/(1 + alpha_1); the orders being in
    /// (0, 1] pins it to [1/2, 1).
    pub fn p0(&self) -> f64 {
        1.0 / (1.0 + self.alpha[0].get())
    }

    /// Cone profile of the block height: `(n1, nbar_2, ..., nbar_d)`.
    pub fn nbar(&self) -> Vec<u32> {
        self.cone.nbar_of(self.n1)
    }

    /// The smallest per-axis ranks that resolve the witness itself.
    pub fn min_ranks(&self) -> Vec<u32> {
        let mut out = self.nbar();
        out[0] = self.n1 + 1;
        out
    }
}

/// Samples the witness on a grid. Axis 1 must resolve the spectral block
/// `[2^{n1}, 2^{n1+1})` and axis j the character `w_{2^{nbar_j}-1}`.
pub fn build_counterexample(
    spec: &CounterexampleSpec,
    ranks: &[u32],
) -> Result<SampledFunction> {
    let min = spec.min_ranks();
    if ranks.len() != min.len() {
        return Err(Error::DimensionMismatch {
            want: min.len(),
            got: ranks.len(),
        });
    }
    for (&need, &have) in min.iter().zip(ranks) {
        if have < need {
            return Err(Error::RankTooSmall {
                n: 1usize << need,
                rank: have,
                max: 1usize << have,
            });
        }
    }
    let n1 = spec.n1;
    let block = dirichlet_kernel(1usize << (n1 + 1), SystemKind::Paley, ranks[0])?
        .sub(&dirichlet_kernel(1usize << n1, SystemKind::Paley, ranks[0])?);
    let tables: Vec<Vec<f64>> = std::iter::once(block.values().to_vec())
        .chain(min.iter().zip(ranks).skip(1).map(|(&nbar_j, &rank)| {
            let idx = (1usize << nbar_j) - 1;
            (0..1usize << rank)
                .map(|i| walsh_paley(idx, &crate::point::GroupPoint::from_index(i, rank)))
                .collect()
        }))
        .collect();
    Ok(SampledFunction::from_fn(ranks, |pts| {
        tables
            .iter()
            .zip(pts)
            .map(|(table, pt)| table[pt.index()])
            .product()
    }))
}

/// The scale factors `c_N` of the one-dimensional reduction, indexed by N
/// (slot 0 unused). Every Cesàro number involved moves forward with N, so
/// one running recurrence per axis covers the whole family.
fn scale_table(spec: &CounterexampleSpec) -> Result<Vec<f64>> {
    let n1 = spec.n1;
    let nbar = spec.nbar();
    let d = spec.cone.dims();
    let half = 1usize << n1;
    let mut run_n = RunningCesaro::new(spec.alpha[0].get());
    let mut run_l1 = RunningCesaro::new(spec.alpha[0].get());
    let mut runs_m: Vec<RunningCesaro> = (1..d)
        .map(|j| RunningCesaro::new(spec.alpha[j].get()))
        .collect();
    let mut runs_l: Vec<RunningCesaro> = (1..d)
        .map(|j| RunningCesaro::new(spec.alpha[j].get()))
        .collect();
    let mut c = vec![0.0; half];
    for nn in 1..half {
        let l = spec.cone.ln_index(n1, nn)?;
        let mut c_n = run_n.advance_to(nn) / run_l1.advance_to(l[0]);
        for j in 1..d {
            let m_j = l[j] - (1usize << nbar[j]);
            c_n *= runs_m[j - 1].advance_to(m_j) / runs_l[j - 1].advance_to(l[j]);
        }
        c[nn] = c_n;
    }
    Ok(c)
}

/// `max_N c_N |K_N^{w,alpha_1}|` on the rank-`n1` line. The p0-norm of this
/// profile equals the p0-norm of the d-dimensional maximal function, since
/// tau_{n1} permutes cells and the remaining axes only flip signs.
fn reduced_max_profile(spec: &CounterexampleSpec) -> Result<SampledFunction> {
    let n1 = spec.n1;
    let half = 1usize << n1;
    let c = scale_table(spec)?;
    let zero = || vec![0.0f64; half];
    let folded = (1..half)
        .into_par_iter()
        .fold(zero, |mut acc, nn| {
            let kernel = cesaro_kernel_spectral(nn, spec.alpha[0], SystemKind::Paley, n1)
                .expect("kernel index range was validated");
            for (slot, &v) in acc.iter_mut().zip(kernel.values()) {
                *slot = slot.max(c[nn] * v.abs());
            }
            acc
        })
        .reduce(zero, |mut acc, other| {
            for (slot, v) in acc.iter_mut().zip(other) {
                *slot = slot.max(v);
            }
            acc
        });
    SampledFunction::new(vec![n1], folded)
}

/// Hardy norm of the witness through the martingale machinery on the
/// one-dimensional block profile; the later axes contribute factors of
/// modulus one. Equals 2^{(1 - 1/p0) n1} exactly.
fn reduced_hardy(spec: &CounterexampleSpec) -> Result<f64> {
    let n1 = spec.n1;
    let block = dirichlet_kernel(1usize << (n1 + 1), SystemKind::Paley, n1 + 1)?
        .sub(&dirichlet_kernel(1usize << n1, SystemKind::Paley, n1 + 1)?);
    let seq: Vec<Vec<u32>> = (0..=n1 + 1).map(|k| vec![k]).collect();
    hardy_norm(&block, &seq, spec.p0())
}

/// Runs the witness through the full d-dimensional pipeline: sample,
/// transform, every cone mean, maximal function, martingale Hardy norm.
/// Exponential in the summed ranks; used as an oracle at small n1.
pub fn full_ratio(spec: &CounterexampleSpec) -> Result<(f64, f64)> {
    let n1 = spec.n1;
    let half = 1usize << n1;
    let nbar = spec.nbar();
    let d = spec.cone.dims();
    let l_max = spec.cone.ln_index(n1, half - 1)?;
    let mut ranks = vec![n1 + 1];
    for j in 1..d {
        ranks.push(smallest_exact_rank(l_max[j]).max(nbar[j]));
    }
    let total: u32 = ranks.iter().sum();
    if total > 24 {
        return Err(Error::BadParameter(format!(
            "oracle grid needs 2^{total} cells, beyond the desk cap of 2^24"
        )));
    }

    let f = build_counterexample(spec, &ranks)?;
    let evaluator = MeanEvaluator::new(&f);
    let family: Vec<Vec<usize>> = (1..half)
        .map(|nn| spec.cone.ln_index(n1, nn))
        .collect::<Result<_>>()?;
    let field = evaluator.maximal_over(&family, &spec.alpha, SystemKind::Kaczmarz)?;

    // product of kernel L^1 norms dominates each mean; take the family max
    let sup_f = f.lp_norm(f64::INFINITY);
    let mut envelope: f64 = 0.0;
    for index in &family {
        let mut bound = sup_f;
        for ((&n_l, &a_l), &r_l) in index.iter().zip(&spec.alpha).zip(&ranks) {
            bound *= cesaro_kernel_spectral(n_l, a_l, SystemKind::Kaczmarz, r_l)?.lp_norm(1.0);
        }
        envelope = envelope.max(bound);
    }
    let sup_field = field.values().lp_norm(f64::INFINITY);
    if sup_field > envelope * (1.0 + 1e-9) {
        return Err(Error::ContractViolation(format!(
            "maximal field reached sup {sup_field}, over the kernel envelope {envelope}"
        )));
    }

    let seq: Vec<Vec<u32>> = (0..=n1 + 1)
        .map(|k| {
            if k == 0 {
                vec![0; d]
            } else {
                spec.cone.nbar_of(k)
            }
        })
        .collect();
    let hardy = hardy_norm(&f, &seq, spec.p0())?;
    Ok((field.lp_norm(spec.p0()), hardy))
}

#[derive(Clone, Copy, Debug)]
pub struct RatioRow {
    pub n1: u32,
    pub numerator: f64,
    pub hardy: f64,
    pub ratio: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct OracleComparison {
    pub n1: u32,
    pub reduced: f64,
    pub full: f64,
    pub gap: f64,
}

#[derive(Clone, Debug)]
pub struct RatioReport {
    pub alpha: Vec<f64>,
    pub p0: f64,
    pub rows: Vec<RatioRow>,
    /// Fitted slope of ln R against ln(n1 / ln n1) over the larger
    /// heights; NaN when fewer than two heights were requested.
    pub slope: f64,
    pub oracle: Option<OracleComparison>,
    pub wall_time_s: f64,
}

impl RatioReport {
    pub fn records(&self) -> Vec<ExperimentRecord> {
        let alpha = self
            .alpha
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let mut out: Vec<ExperimentRecord> = self
            .rows
            .iter()
            .map(|row| {
                let x = row.n1 as f64 / (row.n1 as f64).ln();
                let mut r = ExperimentRecord::new("counterexample", row.ratio)
                    .param("n1", row.n1)
                    .param("alpha", &alpha)
                    .param("p0", self.p0)
                    .derived("numerator", row.numerator)
                    .derived("hardy", row.hardy)
                    .derived("n1_over_log", x);
                r.wall_time_s = self.wall_time_s;
                r
            })
            .collect();
        if !self.slope.is_nan() {
            let mut r = ExperimentRecord::new("counterexample-slope", self.slope)
                .param("alpha", &alpha)
                .param("p0", self.p0);
            r.wall_time_s = self.wall_time_s;
            out.push(r);
        }
        if let Some(oracle) = &self.oracle {
            let mut r = ExperimentRecord::new("counterexample-oracle", oracle.gap)
                .param("n1", oracle.n1)
                .param("alpha", &alpha)
                .derived("reduced", oracle.reduced)
                .derived("full", oracle.full);
            r.wall_time_s = self.wall_time_s;
            out.push(r);
        }
        out
    }
}

/// Measures R(n1) across a list of block heights. The scaled
/// one-dimensional path does the measuring; when `check_oracle` is set the
/// smallest height is recomputed through the full d-dimensional pipeline
/// and the relative gap is reported.
pub fn ratio_experiment(
    n1_list: &[u32],
    cone: &ConeSpec,
    alpha: &[CesaroOrder],
    check_oracle: bool,
) -> Result<RatioReport> {
    let started = Instant::now();
    if n1_list.is_empty() {
        return Err(Error::BadParameter(
            "ratio experiment needs at least one block height".into(),
        ));
    }
    for pair in n1_list.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::BadParameter(
                "block heights must be strictly increasing".into(),
            ));
        }
    }
    if *n1_list.last().unwrap() > 14 {
        return Err(Error::BadParameter(
            "block heights beyond 14 exceed the desk cap (2^n1 kernels on a 2^n1 line)".into(),
        ));
    }

    let mut rows = Vec::with_capacity(n1_list.len());
    for &n1 in n1_list {
        let spec = CounterexampleSpec::new(n1, cone.clone(), alpha.to_vec())?;
        let numerator = reduced_max_profile(&spec)?.lp_norm(spec.p0());
        let hardy = reduced_hardy(&spec)?;
        rows.push(RatioRow {
            n1,
            numerator,
            hardy,
            ratio: numerator / hardy,
        });
    }

    let slope = if rows.len() >= 2 {
        let xs: Vec<f64> = rows
            .iter()
            .map(|r| r.n1 as f64 / (r.n1 as f64).ln())
            .collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
        log_log_slope_upper_half(&xs, &ys)
    } else {
        f64::NAN
    };

    let oracle = if check_oracle {
        let n1 = n1_list[0];
        let spec = CounterexampleSpec::new(n1, cone.clone(), alpha.to_vec())?;
        let (numerator, hardy) = full_ratio(&spec)?;
        let full = numerator / hardy;
        let reduced = rows[0].ratio;
        Some(OracleComparison {
            n1,
            reduced,
            full,
            gap: (reduced - full).abs() / full,
        })
    } else {
        None
    };

    Ok(RatioReport {
        alpha: alpha.iter().map(|a| a.get()).collect(),
        p0: 1.0 / (1.0 + alpha[0].get()),
        rows,
        slope,
        oracle,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

// ===== tests
