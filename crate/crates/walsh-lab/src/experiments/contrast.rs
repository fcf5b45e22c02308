//! Side-by-side kernel values at a fixed point.
//!
//! The two systems share every dyadic partial sum, yet their Cesàro kernels
//! behave very differently at individual points. At x = e_0 the Fejér
//! kernels K_{2^j} illustrate the split: the Walsh-Paley values settle
//! toward 1/2, while the Walsh-Kaczmarz values grow without bound. The
//! rearrangement pulls mass toward the origin of each dyadic block, and a
//! point with a single low-order one sits in the path of that mass.

use crate::cesaro::{cesaro_kernel_paley_coeffs, CesaroOrder};
use crate::error::{Error, Result};
use crate::experiments::ExperimentRecord;
use crate::sample::pairwise_sum;
use crate::systems::SystemKind;
use std::time::Instant;

#[derive(Clone, Copy, Debug)]
pub struct ContrastRow {
    pub j: u32,
    pub n: usize,
    pub kaczmarz: f64,
    pub paley: f64,
}

#[derive(Clone, Debug)]
pub struct ContrastReport {
    pub x_bits: u64,
    pub alpha: f64,
    pub rows: Vec<ContrastRow>,
    pub wall_time_s: f64,
}

impl ContrastReport {
    pub fn records(&self) -> Vec<ExperimentRecord> {
        let mut out = Vec::with_capacity(self.rows.len() * 2);
        for row in &self.rows {
            for (system, value) in [
                (SystemKind::Kaczmarz, row.kaczmarz),
                (SystemKind::Paley, row.paley),
            ] {
                let mut r = ExperimentRecord::new("contrast", value)
                    .param("j", row.j)
                    .param("n", row.n)
                    .param("alpha", self.alpha)
                    .param("system", system)
                    .param("x", format!("0b{:b}", self.x_bits));
                r.wall_time_s = self.wall_time_s;
                out.push(r);
            }
        }
        out
    }
}

/// Evaluates K_{2^j} for both systems at the point whose coordinates are
/// the bits of `x_bits`, for each j in `js`.
pub fn kernel_contrast_probe(
    x_bits: u64,
    js: &[u32],
    alpha: CesaroOrder,
) -> Result<ContrastReport> {
    let started = Instant::now();
    if js.is_empty() {
        return Err(Error::BadParameter("contrast needs at least one j".into()));
    }
    for pair in js.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::BadParameter(
                "contrast block exponents must be strictly increasing".into(),
            ));
        }
    }
    if js[0] == 0 || *js.last().unwrap() > 22 {
        return Err(Error::BadParameter(
            "contrast block exponents must lie in 1..=22".into(),
        ));
    }
    let bit_len = 64 - x_bits.leading_zeros();
    let rows = js
        .iter()
        .map(|&j| {
            let rank = j.max(bit_len);
            let n = 1usize << j;
            let value = |system| -> Result<f64> {
                let coeffs = cesaro_kernel_paley_coeffs(n, alpha, system, rank)?;
                // evaluate the expansion directly: w_i(x) is the parity of
                // the bits that i and x share
                let terms: Vec<f64> = coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| {
                        if (i as u64 & x_bits).count_ones() % 2 == 0 {
                            c
                        } else {
                            -c
                        }
                    })
                    .collect();
                Ok(pairwise_sum(&terms))
            };
            Ok(ContrastRow {
                j,
                n,
                kaczmarz: value(SystemKind::Kaczmarz)?,
                paley: value(SystemKind::Paley)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ContrastReport {
        x_bits,
        alpha: alpha.get(),
        rows,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

// ===== tests
