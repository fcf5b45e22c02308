//! Self-verification of the two Walsh enumerations at a chosen resolution.
//!
//! Three facts are measured, not assumed. Within every dyadic block the two
//! systems contain the same functions (the rearrangement is a block
//! bijection). Every Kaczmarz function factors through the head Rademacher
//! function and a bit-reversed Paley function. And both sampled systems are
//! orthonormal, checked spectrally: the transform of a sampled character
//! must be a coordinate unit vector, which encodes all the inner products
//! of one character against the whole system at once.

use crate::error::Result;
use crate::experiments::ExperimentRecord;
use crate::point::GroupPoint;
use crate::sample::SampledFunction;
use crate::systems::{kaczmarz, kaczmarz_perm, order, rademacher, walsh_paley, SystemKind};
use crate::transform::fourier_coeffs;
use rayon::prelude::*;
use std::time::Instant;

/// Measured defects of the system implementations at one resolution. All
/// four should be zero-ish; the orthonormality defects absorb transform
/// rounding, the other two are exact integer arithmetic.
#[derive(Clone, Debug)]
pub struct SystemsReport {
    pub resolution: u32,
    pub blocks_agree: bool,
    pub tau_factorization_defect: f64,
    pub unit_defect_paley: f64,
    pub unit_defect_kaczmarz: f64,
    pub wall_time_s: f64,
}

impl SystemsReport {
    pub fn records(&self) -> Vec<ExperimentRecord> {
        let base = |name: &str, value: f64| {
            let mut r = ExperimentRecord::new("systems-check", value)
                .param("check", name)
                .param("m", self.resolution);
            r.wall_time_s = self.wall_time_s;
            r
        };
        vec![
            base("block-bijection", if self.blocks_agree { 1.0 } else { 0.0 }),
            base("tau-factorization", self.tau_factorization_defect),
            base("orthonormality-paley", self.unit_defect_paley),
            base("orthonormality-kaczmarz", self.unit_defect_kaczmarz),
        ]
    }

    pub fn pass(&self, tol: f64) -> bool {
        self.blocks_agree
            && self.tau_factorization_defect <= tol
            && self.unit_defect_paley <= tol
            && self.unit_defect_kaczmarz <= tol
    }
}

/// Runs all checks on the rank-`m` grid over indices `n < 2^m`.
pub fn systems_check(m: u32) -> Result<SystemsReport> {
    let started = Instant::now();
    let size = 1usize << m;

    // the permutation restricted to each block is a bijection of the block
    let mut blocks_agree = true;
    for t in 0..m {
        let lo = 1usize << t;
        let hi = 1usize << (t + 1);
        let mut seen = vec![false; hi - lo];
        for n in lo..hi {
            let p = kaczmarz_perm(n);
            if p < lo || p >= hi || seen[p - lo] {
                blocks_agree = false;
                break;
            }
            seen[p - lo] = true;
        }
    }

    // kappa_n(x) = r_|n|(x) w_{n - 2^|n|}(tau_|n| x) for every n and cell
    let tau_factorization_defect = (1..size)
        .into_par_iter()
        .map(|n| {
            let t = order(n);
            let rest = n - (1usize << t);
            let mut worst = 0.0f64;
            for j in 0..size {
                let x = GroupPoint::from_index(j, m);
                let lhs = kaczmarz(n, &x);
                let rhs = rademacher(t, &x) * walsh_paley(rest, &x.tau(t));
                worst = worst.max((lhs - rhs).abs());
            }
            worst
        })
        .reduce(|| 0.0f64, f64::max);

    // orthonormality: the spectrum of a sampled character is a unit vector
    let unit_defect = |system: SystemKind| {
        (0..size)
            .into_par_iter()
            .map(|n| {
                let f = SampledFunction::from_fn_1d(m, |x| system.eval(n, &x));
                let spectrum = fourier_coeffs(&f, system);
                let mut worst = 0.0f64;
                for (i, &c) in spectrum.coeffs().iter().enumerate() {
                    let want = if i == n { 1.0 } else { 0.0 };
                    worst = worst.max((c - want).abs());
                }
                worst
            })
            .reduce(|| 0.0f64, f64::max)
    };
    let unit_defect_paley = unit_defect(SystemKind::Paley);
    let unit_defect_kaczmarz = unit_defect(SystemKind::Kaczmarz);

    Ok(SystemsReport {
        resolution: m,
        blocks_agree,
        tau_factorization_defect,
        unit_defect_paley,
        unit_defect_kaczmarz,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

// ===== tests

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_at_moderate_resolution() {
        let report = systems_check(7).unwrap();
        assert!(report.blocks_agree);
        assert_eq!(report.tau_factorization_defect, 0.0);
        assert!(report.pass(1e-12));
    }

    #[test]
    fn records_carry_the_resolution() {
        let report = systems_check(4).unwrap();
        let records = report.records();
        assert_eq!(records.len(), 4);
        assert!(records.iter().all(|r| r.params["m"] == "4"));
        assert_eq!(records[0].value, 1.0);
    }
}
