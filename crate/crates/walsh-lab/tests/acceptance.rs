//! The acceptance gate. One test per criterion; each prints a single
//! PASS/FAIL line with its measured numbers before asserting, so the
//! verdicts survive in the output even when a criterion is red.
//!
//! Run it alone with
//!     cargo test --test acceptance -- --test-threads=1 --nocapture

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use walsh_lab::cesaro::{
    cesaro_kernel_definitional, cesaro_kernel_spectral, cesaro_number, CesaroOrder,
};
use walsh_lab::experiments::contrast::kernel_contrast_probe;
use walsh_lab::experiments::converge::{convergence_experiment, TestFunction};
use walsh_lab::experiments::counterexample::ratio_experiment;
use walsh_lab::experiments::goginava::goginava_integrals;
use walsh_lab::experiments::records::to_csv_string;
use walsh_lab::experiments::sneider::sneider_probe;
use walsh_lab::experiments::survey::survey;
use walsh_lab::experiments::systems_check::systems_check;
use walsh_lab::systems::kaczmarz;
use walsh_lab::{fourier_coeffs, ConeSpec, SampledFunction, SystemKind};

fn verdict(criterion: u32, pass: bool, budget_s: f64, started: Instant, detail: &str) {
    let elapsed = started.elapsed().as_secs_f64();
    let in_budget = elapsed <= budget_s;
    let word = if pass && in_budget { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {word} ({elapsed:.2}s of {budget_s:.0}s) {detail}");
    assert!(in_budget, "criterion {criterion} exceeded its {budget_s:.0}s budget");
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn order(alpha: f64) -> CesaroOrder {
    CesaroOrder::new(alpha).unwrap()
}

#[test]
fn criterion_1_system_correctness() {
    let started = Instant::now();
    let report = systems_check(10).unwrap();
    let worst = report
        .tau_factorization_defect
        .max(report.unit_defect_paley)
        .max(report.unit_defect_kaczmarz);
    let pass = report.pass(1e-12) && report.tau_factorization_defect == 0.0;
    let detail = format!(
        "blocks {} tau defect {:e} orthonormality defect {:e}",
        if report.blocks_agree { "agree" } else { "DISAGREE" },
        report.tau_factorization_defect,
        worst
    );
    verdict(1, pass, 10.0, started, &detail);
}

#[test]
fn criterion_2_transform_fidelity() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    let m = 20u32;
    let f = SampledFunction::from_fn_1d(m, |_| rng.gen_range(-1.0..1.0));
    let spectrum = fourier_coeffs(&f, SystemKind::Paley);
    let back = spectrum.inverse();
    let round_trip = f
        .values()
        .iter()
        .zip(back.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    let energy: f64 = f.values().iter().map(|v| v * v).sum::<f64>() / f.len() as f64;
    let spectral_energy: f64 = spectrum.coeffs().iter().map(|c| c * c).sum();
    let parseval = (energy - spectral_energy).abs() / energy;

    // the unit-spectrum sweep runs at a smaller resolution so that 500
    // transforms stay inside the budget on one core
    let m_unit = 16u32;
    let mut worst_unit = 0.0f64;
    for _ in 0..500 {
        let n = rng.gen_range(0..1usize << m_unit);
        let g = SampledFunction::from_fn_1d(m_unit, |x| kaczmarz(n, &x));
        let spec = fourier_coeffs(&g, SystemKind::Kaczmarz);
        for (k, &c) in spec.coeffs().iter().enumerate() {
            let want = if k == n { 1.0 } else { 0.0 };
            worst_unit = worst_unit.max((c - want).abs());
        }
    }

    let pass = round_trip <= 1e-12 && parseval <= 1e-10 && worst_unit <= 1e-12;
    let detail = format!(
        "round trip {round_trip:.2e} parseval {parseval:.2e} unit spectra {worst_unit:.2e}"
    );
    verdict(2, pass, 30.0, started, &detail);
}

#[test]
fn criterion_3_kernel_oracle_equivalence() {
    let started = Instant::now();
    let rank = 8;
    let mut worst_gap = 0.0f64;
    let mut worst_mean = 0.0f64;
    for system in [SystemKind::Paley, SystemKind::Kaczmarz] {
        for alpha in [0.3, 0.5, 0.7, 1.0] {
            let alpha = order(alpha);
            for n in 1..=128usize {
                let spectral = cesaro_kernel_spectral(n, alpha, system, rank).unwrap();
                let definitional = cesaro_kernel_definitional(n, alpha, system, rank).unwrap();
                let gap = spectral
                    .values()
                    .iter()
                    .zip(definitional.values())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                worst_gap = worst_gap.max(gap);
                let want = cesaro_number(n - 1, alpha.get()) / cesaro_number(n, alpha.get());
                worst_mean = worst_mean.max((spectral.integrate() - want).abs());
            }
        }
    }
    let pass = worst_gap <= 1e-11 && worst_mean <= 1e-12;
    let detail = format!("spectral vs definitional {worst_gap:.2e} kernel mean {worst_mean:.2e}");
    verdict(3, pass, 60.0, started, &detail);
}

#[test]
fn criterion_4_kaczmarz_norm_plateau() {
    let started = Instant::now();
    let mut pass = true;
    let mut pieces = Vec::new();
    for alpha in [0.3, 0.5, 0.7, 1.0] {
        let a = order(alpha);
        let base = survey(SystemKind::Kaczmarz, a, 4095, 12).unwrap();
        let finer = survey(SystemKind::Kaczmarz, a, 4095, 13).unwrap();
        let rank_shift = (finer.plateau - base.plateau).abs() / base.plateau;
        let ok = base.plateau_variation < 0.05 && rank_shift < 0.01;
        pass &= ok;
        pieces.push(format!(
            "alpha={alpha}: spread {:.2}% rank-13 shift {:.2}%{}",
            100.0 * base.plateau_variation,
            100.0 * rank_shift,
            if ok { "" } else { " <-" }
        ));
    }
    let detail = pieces.join("; ");
    verdict(4, pass, 300.0, started, &detail);
}

#[test]
fn criterion_5_lemma_integral_growth() {
    let started = Instant::now();
    let ns: Vec<u32> = (4..=12).collect();
    let mut pass = true;
    let mut pieces = Vec::new();
    for alpha in [0.5, 1.0] {
        let report = goginava_integrals(&ns, order(alpha)).unwrap();
        let i4 = report.rows[0].lemma;
        let c = 0.9 * i4 * 6f64.ln() / 4.0;
        let mut min_margin = f64::INFINITY;
        let mut nondecreasing = true;
        for pair in report.rows.windows(2) {
            nondecreasing &= pair[1].lemma >= pair[0].lemma;
        }
        for row in &report.rows {
            let bound = c * row.n as f64 / ((row.n + 2) as f64).ln();
            min_margin = min_margin.min(row.lemma / bound);
        }
        pass &= min_margin >= 1.0 && nondecreasing;
        pieces.push(format!(
            "alpha={alpha}: min I/bound {min_margin:.3}{}",
            if nondecreasing { "" } else { " not monotone" }
        ));
    }
    let detail = pieces.join("; ");
    verdict(5, pass, 300.0, started, &detail);
}

#[test]
fn criterion_6_counterexample_growth() {
    let started = Instant::now();
    let cone = ConeSpec::catalog("identity", 2).unwrap();
    let alpha = vec![order(0.5), order(0.5)];
    let report = ratio_experiment(&[4, 6, 8, 10, 12], &cone, &alpha, true).unwrap();

    let mut hardy_defect = 0.0f64;
    for row in &report.rows {
        let want = 2f64.powf((1.0 - 1.0 / report.p0) * row.n1 as f64);
        hardy_defect = hardy_defect.max((row.hardy - want).abs() / want);
    }
    let sampled: Vec<&_> = report.rows.iter().filter(|r| r.n1 >= 6).collect();
    let strictly_up = sampled.windows(2).all(|w| w[1].ratio > w[0].ratio);
    let doubling = sampled.last().unwrap().ratio / sampled.first().unwrap().ratio;
    let gap = report.oracle.as_ref().map(|o| o.gap).unwrap_or(f64::INFINITY);

    let pass = hardy_defect <= 1e-12
        && strictly_up
        && doubling > 2.0
        && report.slope > 0.0
        && gap <= 1e-10;
    let detail = format!(
        "hardy defect {hardy_defect:.1e} R(12)/R(6) {doubling:.2} slope {:.2} oracle gap {gap:.1e}",
        report.slope
    );
    verdict(6, pass, 600.0, started, &detail);
}

#[test]
fn criterion_7_convergence_rates() {
    let started = Instant::now();
    let cone = ConeSpec::catalog("identity", 2).unwrap();
    let alpha = vec![order(1.0), order(1.0)];

    let ind =
        convergence_experiment(TestFunction::Indicator, &cone, &alpha, 4, 10, SystemKind::Kaczmarz)
            .unwrap();
    let decreasing = ind.rows.windows(2).all(|w| w[1].e1 < w[0].e1);
    let first = ind.rows.first().unwrap().e1;
    let last = ind.rows.last().unwrap().e1;

    let poly = convergence_experiment(
        TestFunction::Polynomial,
        &cone,
        &alpha,
        4,
        10,
        SystemKind::Kaczmarz,
    )
    .unwrap();
    let mut closed_form_gap = 0.0f64;
    for row in &poly.rows {
        let want = row.einf_closed.expect("polynomial rows carry the closed form");
        closed_form_gap = closed_form_gap.max((row.einf - want).abs());
    }

    let pass = decreasing && last < first / 4.0 && closed_form_gap <= 1e-10;
    let detail = format!(
        "e1(4) {first:.5} e1(10) {last:.6} ratio {:.1} einf closed form {closed_form_gap:.1e}",
        first / last
    );
    verdict(7, pass, 300.0, started, &detail);
}

#[test]
fn criterion_8_kernel_contrast() {
    let started = Instant::now();
    let js: Vec<u32> = (3..=11).collect();
    let report = kernel_contrast_probe(1, &js, order(1.0)).unwrap();
    let kaczmarz_up = report.rows.windows(2).all(|w| w[1].kaczmarz > w[0].kaczmarz);
    let paley_final = report.rows.last().unwrap().paley.abs();

    let zero = sneider_probe(11, &js, &[0.5]).unwrap().zero_ratios;
    let ratio_up = zero.windows(2).all(|w| w[1].1 > w[0].1);
    let ratio_growth = zero.last().unwrap().1 / zero.first().unwrap().1;

    let pass = kaczmarz_up && paley_final < 0.05 && ratio_up && ratio_growth > 10.0;
    let detail = format!(
        "kaczmarz at origin {} |paley| final {paley_final:.5} D_n(0)/log n x{ratio_growth:.0}",
        if kaczmarz_up { "increasing" } else { "NOT increasing" }
    );
    verdict(8, pass, 60.0, started, &detail);
}

#[test]
fn criterion_9_determinism() {
    let started = Instant::now();
    let cone = ConeSpec::catalog("identity", 2).unwrap();
    let alpha = vec![order(0.5), order(0.5)];
    let mut outputs = Vec::new();
    for threads in [1usize, 2, 4] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let csv = pool.install(|| {
            let mut records = ratio_experiment(&[4, 5, 6], &cone, &alpha, true)
                .unwrap()
                .records();
            records.extend(sneider_probe(9, &[4, 6, 8], &[0.1, 0.5]).unwrap().records());
            records.extend(
                survey(SystemKind::Kaczmarz, order(0.7), 255, 8)
                    .unwrap()
                    .records(),
            );
            to_csv_string(&records)
        });
        outputs.push(csv);
    }
    let pass = outputs[0] == outputs[1] && outputs[1] == outputs[2];
    let detail = format!(
        "{} csv bytes identical across 1, 2, 4 threads: {}",
        outputs[0].len(),
        pass
    );
    verdict(9, pass, 120.0, started, &detail);
}
