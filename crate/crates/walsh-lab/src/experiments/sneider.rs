//! Pointwise growth of the Walsh-Kaczmarz Dirichlet kernels.
//!
//! The rearranged Dirichlet kernel D_n^kappa grows like log n on a set of
//! substantial measure, in sharp contrast with the Walsh-Paley kernel,
//! which stays bounded along lacunary rows at almost every point. This
//! probe tracks D_n^kappa(x) = sum_{k<n} kappa_k(x) across the whole grid
//! and records, at the block ends n = 2^j - 1:
//!
//! * the measure of { x : D_n(x) / ln n >= C } for each C on a ladder,
//! * the same with D_n replaced by max_{N in block} D_N, so a spike
//!   anywhere inside the dyadic block counts,
//! * the ratio at zero, D_n(0) / ln n, which equals n / ln n exactly and
//!   anchors the unboundedness claim.

use crate::error::{Error, Result};
use crate::experiments::ExperimentRecord;
use crate::point::GroupPoint;
use crate::systems::kaczmarz;
use rayon::prelude::*;
use std::time::Instant;

#[derive(Clone, Copy, Debug)]
pub struct ExceedanceRow {
    pub j: u32,
    pub n: usize,
    pub c: f64,
    pub point_measure: f64,
    pub blockmax_measure: f64,
}

#[derive(Clone, Debug)]
pub struct SneiderReport {
    pub rank: u32,
    pub zero_ratios: Vec<(usize, f64)>,
    pub exceedance: Vec<ExceedanceRow>,
    pub wall_time_s: f64,
}

impl SneiderReport {
    pub fn records(&self) -> Vec<ExperimentRecord> {
        let mut out = Vec::new();
        for row in &self.exceedance {
            for (mode, value) in [
                ("point", row.point_measure),
                ("blockmax", row.blockmax_measure),
            ] {
                let mut r = ExperimentRecord::new("sneider", value)
                    .param("rank", self.rank)
                    .param("j", row.j)
                    .param("n", row.n)
                    .param("c", row.c)
                    .param("mode", mode);
                r.wall_time_s = self.wall_time_s;
                out.push(r);
            }
        }
        for &(n, ratio) in &self.zero_ratios {
            let mut r = ExperimentRecord::new("sneider-zero", ratio)
                .param("rank", self.rank)
                .param("n", n);
            r.wall_time_s = self.wall_time_s;
            out.push(r);
        }
        out
    }
}

/// Sweeps the Dirichlet partial sums over a rank-`rank` grid and snapshots
/// exceedance statistics at each n = 2^j - 1 for j in `js`. Ratios use the
/// natural logarithm. Each grid cell carries its own independent sweep, so
/// the scan parallelizes over cells without any cross-cell reduction.
pub fn sneider_probe(rank: u32, js: &[u32], ladder: &[f64]) -> Result<SneiderReport> {
    let started = Instant::now();
    if js.is_empty() || ladder.is_empty() {
        return Err(Error::BadParameter(
            "sneider needs at least one block index and one threshold".into(),
        ));
    }
    for pair in js.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::BadParameter(
                "sneider block indices must be strictly increasing".into(),
            ));
        }
    }
    if js[0] < 2 {
        return Err(Error::BadParameter(
            "sneider block indices start at j = 2 so that ln n > 0".into(),
        ));
    }
    let j_max = *js.last().unwrap();
    if j_max > rank {
        return Err(Error::RankTooSmall {
            n: 1usize << j_max,
            rank,
            max: 1usize << rank,
        });
    }
    if rank > 16 {
        return Err(Error::BadParameter(format!(
            "sneider rank {rank} exceeds the desk cap of 16"
        )));
    }
    for &c in ladder {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::BadParameter(
                "sneider thresholds must be positive and finite".into(),
            ));
        }
    }

    let size = 1usize << rank;
    // per cell: for each requested j, the pair (D_{2^j-1}/ln, block max of D_N/ln)
    let snapshots: Vec<Vec<(f64, f64)>> = (0..size)
        .into_par_iter()
        .map(|cell| {
            let x = GroupPoint::from_index(cell, rank);
            let mut d = 0.0f64;
            let mut out = Vec::with_capacity(js.len());
            let mut next = 0;
            let mut block_max = f64::NEG_INFINITY;
            for n in 1..(1usize << j_max) {
                if n == 1usize << (js[next] - 1) {
                    // entering the dyadic block that ends at 2^{js[next]}-1
                    block_max = f64::NEG_INFINITY;
                }
                d += kaczmarz(n - 1, &x);
                // d now holds D_n(x)
                if n >= 2 {
                    block_max = block_max.max(d / (n as f64).ln());
                }
                if n == (1usize << js[next]) - 1 {
                    out.push((d / (n as f64).ln(), block_max));
                    next += 1;
                    if next == js.len() {
                        break;
                    }
                }
            }
            out
        })
        .collect();

    let mut exceedance = Vec::with_capacity(js.len() * ladder.len());
    for (slot, &j) in js.iter().enumerate() {
        let n = (1usize << j) - 1;
        for &c in ladder {
            let mut point_hits = 0usize;
            let mut block_hits = 0usize;
            for snap in &snapshots {
                let (point, block) = snap[slot];
                if point >= c {
                    point_hits += 1;
                }
                if block >= c {
                    block_hits += 1;
                }
            }
            exceedance.push(ExceedanceRow {
                j,
                n,
                c,
                point_measure: point_hits as f64 / size as f64,
                blockmax_measure: block_hits as f64 / size as f64,
            });
        }
    }
    let zero_ratios = js
        .iter()
        .enumerate()
        .map(|(slot, &j)| (((1usize << j) - 1), snapshots[0][slot].0))
        .collect();

    Ok(SneiderReport {
        rank,
        zero_ratios,
        exceedance,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

// ===== tests

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_at_zero_is_n() {
        // kappa_k(0) = 1 for every k, so D_n(0) = n; the zero rows must
        // report exactly n / ln n
        let report = sneider_probe(6, &[2, 3, 4, 5, 6], &[0.1]).unwrap();
        for &(n, ratio) in &report.zero_ratios {
            let want = n as f64 / (n as f64).ln();
            assert!(
                (ratio - want).abs() <= 1e-12 * want,
                "n = {n}: {ratio} vs {want}"
            );
        }
    }

    #[test]
    fn zero_ratio_grows_without_bound() {
        let report = sneider_probe(10, &[3, 4, 5, 6, 7, 8, 9, 10], &[0.1]).unwrap();
        for pair in report.zero_ratios.windows(2) {
            assert!(pair[1].1 > pair[0].1, "{:?} then {:?}", pair[0], pair[1]);
        }
        let first = report.zero_ratios.first().unwrap().1;
        let last = report.zero_ratios.last().unwrap().1;
        assert!(last / first > 4.0, "{first} to {last}");
    }

    #[test]
    fn measures_are_probabilities_and_monotone_in_threshold() {
        let ladder = [0.05, 0.1, 0.2, 0.5, 1.0];
        let report = sneider_probe(8, &[4, 6, 8], &ladder).unwrap();
        for j in [4u32, 6, 8] {
            let rows: Vec<_> = report.exceedance.iter().filter(|r| r.j == j).collect();
            assert_eq!(rows.len(), ladder.len());
            for row in &rows {
                assert!((0.0..=1.0).contains(&row.point_measure));
                assert!((0.0..=1.0).contains(&row.blockmax_measure));
                // the block max dominates the block-end value pointwise
                assert!(row.blockmax_measure >= row.point_measure);
            }
            for pair in rows.windows(2) {
                assert!(pair[1].point_measure <= pair[0].point_measure);
                assert!(pair[1].blockmax_measure <= pair[0].blockmax_measure);
            }
        }
    }

    #[test]
    fn low_threshold_set_stays_large() {
        // the log-growth set has substantial measure: at C = 0.1 the
        // exceedance set keeps more than half the group across blocks
        let report = sneider_probe(10, &[4, 5, 6, 7, 8, 9, 10], &[0.1]).unwrap();
        for row in &report.exceedance {
            assert!(
                row.point_measure > 0.5,
                "j = {}: measure {}",
                row.j,
                row.point_measure
            );
        }
    }

    #[test]
    fn rejects_bad_requests() {
        assert!(sneider_probe(6, &[], &[0.1]).is_err());
        assert!(sneider_probe(6, &[3], &[]).is_err());
        assert!(sneider_probe(6, &[1, 3], &[0.1]).is_err());
        assert!(sneider_probe(6, &[3, 3], &[0.1]).is_err());
        assert!(sneider_probe(6, &[3, 7], &[0.1]).is_err());
        assert!(sneider_probe(6, &[3], &[-1.0]).is_err());
        assert!(sneider_probe(20, &[3], &[0.1]).is_err());
    }

    #[test]
    fn records_include_both_modes_and_zero_rows() {
        let report = sneider_probe(5, &[3, 5], &[0.1, 0.5]).unwrap();
        let records = report.records();
        let point = records.iter().filter(|r| r.params.get("mode").map(String::as_str) == Some("point")).count();
        let blockmax = records.iter().filter(|r| r.params.get("mode").map(String::as_str) == Some("blockmax")).count();
        let zero = records.iter().filter(|r| r.experiment == "sneider-zero").count();
        assert_eq!(point, 4);
        assert_eq!(blockmax, 4);
        assert_eq!(zero, 2);
    }
}
