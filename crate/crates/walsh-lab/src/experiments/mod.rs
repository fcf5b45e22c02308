//! The packaged experiments: each submodule turns one quantitative
//! phenomenon of cone-restricted Cesàro summability into a deterministic
//! batch computation emitting [`records::ExperimentRecord`] rows.
//!
//! - [`systems_check`]: enumeration agreement, factorization, orthonormality
//! - [`survey`]: uniform boundedness of Kaczmarz kernel norms
//! - [`goginava`]: the lower-bound integral behind the divergence result
//! - [`counterexample`]: the divergence ratio along the interior index path
//! - [`converge`]: cone-restricted convergence rates for test functions
//! - [`sneider`]: pointwise growth of Kaczmarz Dirichlet kernels
//! - [`contrast`]: Kaczmarz vs Paley kernel values at dyadic rationals
//!
//! Every engine is deterministic at any thread count: parallel pieces
//! reduce through exact operations (pointwise max) or fixed-shape sums, and
//! records serialize with sorted keys.

pub mod contrast;
pub mod converge;
pub mod counterexample;
pub mod goginava;
pub mod records;
pub mod sneider;
pub mod survey;
pub mod systems_check;

pub use records::{to_csv_string, to_jsonl_string, write_csv, write_jsonl, ExperimentRecord};

/// Least-squares slope of `ln y` against `ln x`, fitted over the largest
/// half of the sampled range (`xs` ascending). Small-argument transients
/// would otherwise pollute growth-exponent estimates.
pub fn log_log_slope_upper_half(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "need one y per x");
    assert!(xs.len() >= 2, "slope needs at least two points");
    let keep = xs.len().div_ceil(2).max(2);
    let start = xs.len() - keep;
    let pts: Vec<(f64, f64)> = xs[start..]
        .iter()
        .zip(&ys[start..])
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::log_log_slope_upper_half;

    #[test]
    fn recovers_a_pure_power_law() {
        let xs: Vec<f64> = (1..=8).map(|k| k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(1.5)).collect();
        let slope = log_log_slope_upper_half(&xs, &ys);
        assert!((slope - 1.5).abs() < 1e-12);
    }

    #[test]
    fn ignores_a_small_x_transient() {
        // corrupt the smallest samples; the fit window never sees them
        let xs: Vec<f64> = (1..=8).map(|k| k as f64).collect();
        let mut ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        ys[0] = 100.0;
        ys[1] = 0.001;
        let slope = log_log_slope_upper_half(&xs, &ys);
        assert!((slope - 2.0).abs() < 1e-12);
    }
}
