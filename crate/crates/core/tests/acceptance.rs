//! Acceptance criteria. Runs without the libtest harness and prints one
//! `[PASS]`/`[FAIL]` line per criterion; exits nonzero if any fails.

mod common;

use std::time::Instant;

use betting_enhancer::selftest::{adversarial_stream, adaptive_simpson, bisect_betting_quantile, raw_jumper_log10_trace};
use betting_enhancer::{
    betting_quantile, gaussian_quantile, uniform_stream, BettingLine, BettingMartingale, ContinuousForecast,
    EnhancedForecast, GaussianForecast, MeanJumperState, SimpleJumperState,
};

use common::{default_dataset, report, run_mean, run_simple};

const DEFAULT_SEED: u64 = 2021;

fn ac1_changepoint_reproduction() -> bool {
    let obs = default_dataset(DEFAULT_SEED);
    let start = Instant::now();
    let ledger = run_simple(&obs, 0.01, 1.0);
    let elapsed = start.elapsed().as_secs_f64();
    let final_log10 = ledger.final_log10_capital();
    let at_cp = 10f64.powf(ledger.per_step[999].log10_capital);

    let mut finals: Vec<f64> = (DEFAULT_SEED..DEFAULT_SEED + 20)
        .map(|seed| run_simple(&default_dataset(seed), 0.01, 1.0).final_log10_capital())
        .collect();
    finals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = 0.5 * (finals[9] + finals[10]);

    let passed = (70.0..=110.0).contains(&final_log10)
        && (80.0..=100.0).contains(&median)
        && (1e-4..=1.0).contains(&at_cp)
        && elapsed < 1.0;
    report(
        "AC1 changepoint reproduction",
        passed,
        &format!(
            "final log10 S = {final_log10:.3} in [70,110]; 20-seed median {median:.3} in [80,100]; \
             S_1000 = {at_cp:.4} in [1e-4,1]; run time {elapsed:.3}s < 1s"
        ),
    );
    passed
}

fn ac2_loss_gap_equals_capital() -> bool {
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    for seed in DEFAULT_SEED..DEFAULT_SEED + 20 {
        let obs = default_dataset(seed);
        for ledger in [run_simple(&obs, 0.01, 1.0), run_simple(&obs, 0.01, 2.0), run_mean(&obs, 1.0), run_mean(&obs, 2.0)] {
            assert_eq!(ledger.per_step.len(), 2000);
            worst = worst.max(ledger.max_identity_error());
            runs += 1;
        }
    }
    let ledger = run_simple(&default_dataset(DEFAULT_SEED), 0.01, 1.0);
    let gap = ledger.cum_base - ledger.cum_enhanced;
    let passed = worst <= 1e-9;
    report(
        "AC2 loss gap equals log10 capital",
        passed,
        &format!(
            "max |(cum_base - cum_enh) - log10 S| over {runs} runs x 2000 steps = {worst:e} <= 1e-9; \
             final gap {gap:.3} vs log10 S {:.3}",
            ledger.final_log10_capital()
        ),
    );
    passed
}

/// Observation streams whose PIT values under N(0, 1) mix uniform noise with
/// adversarial patterns, including values far enough out to clamp.
fn fuzz_observations(k: usize) -> Vec<f64> {
    let us = adversarial_stream(k, 1000 + k as u64, 2000);
    let jitter = uniform_stream(5000 + k as u64, 2000);
    us.iter()
        .zip(jitter)
        .map(|(&u, j)| {
            if u <= 0.0 {
                -12.0 - 30.0 * j
            } else if u >= 1.0 {
                12.0 + 30.0 * j
            } else {
                gaussian_quantile(u).unwrap()
            }
        })
        .collect()
}

fn ac3_mean_jumper_guarantees() -> bool {
    let bound = 4f64.log10() + 1e-9;
    let floor = 0.25 - 1e-12;
    let mut min_capital = f64::INFINITY;
    let mut max_excess = f64::NEG_INFINITY;
    for k in 0..100 {
        let range = if k % 2 == 0 { 1.0 } else { 2.0 };
        let ledger = run_mean(&fuzz_observations(k), range);
        let mut base = 0.0;
        let mut enhanced = 0.0;
        for r in &ledger.per_step {
            base += r.loss_base;
            enhanced += r.loss_enhanced;
            min_capital = min_capital.min(10f64.powf(r.log10_capital));
            max_excess = max_excess.max(enhanced - base);
        }

        // the same stream fed straight to the martingale, exact 0s and 1s included
        let mut m = MeanJumperState::new(&MeanJumperState::default_jump_rates(), range).unwrap();
        for u in adversarial_stream(k, 1000 + k as u64, 2000) {
            min_capital = min_capital.min(m.step(u).unwrap());
        }
    }
    let passed = min_capital >= floor && max_excess <= bound;
    report(
        "AC3 Mean Jumper guarantees",
        passed,
        &format!(
            "100 fuzz streams x 2000: min capital {min_capital:.6} >= 0.25; \
             max (cum_enh - cum_base) {max_excess:.6} <= log10(4) = {:.6}",
            4f64.log10()
        ),
    );
    passed
}

fn ac4_martingale_property() -> bool {
    let start = Instant::now();
    let mut total = 0.0;
    let mut worst_first: f64 = 0.0;
    let streams = 10_000;
    for seed in 0..streams {
        let mut s = SimpleJumperState::new(0.01, 1.0).unwrap();
        let us = uniform_stream(seed as u64, 50);
        let first = s.step(us[0]).unwrap();
        worst_first = worst_first.max((first - 1.0).abs());
        let mut cap = first;
        for &u in &us[1..] {
            cap = s.step(u).unwrap();
        }
        total += cap;
    }
    let mean = total / streams as f64;
    let elapsed = start.elapsed().as_secs_f64();
    let passed = (0.95..=1.05).contains(&mean) && worst_first <= 1e-12 && elapsed < 10.0;
    report(
        "AC4 martingale property",
        passed,
        &format!(
            "mean S_50 over 10000 streams = {mean:.5} in [0.95,1.05]; max |S_1 - 1| = {worst_first:e}; \
             {elapsed:.2}s < 10s"
        ),
    );
    passed
}

fn ac5_enhancement_calculus() -> bool {
    let mut worst_mass: f64 = 0.0;
    for eps in [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
        let e = EnhancedForecast::new(GaussianForecast::standard(), BettingLine::new(eps).unwrap());
        let mass = adaptive_simpson(&|y| e.density(y), -10.0, 10.0, 1e-10);
        worst_mass = worst_mass.max((mass - 1.0).abs());
    }

    let mut worst_bisect: f64 = 0.0;
    let mut worst_closed: f64 = 0.0;
    let mut cells = 0;
    for i in 0..21 {
        let eps = (-2.0 + 0.2 * i as f64).clamp(-2.0, 2.0);
        let line = BettingLine::new(eps).unwrap();
        for j in 1..20 {
            let q = 0.05 * j as f64;
            let v = betting_quantile(line, q);
            worst_bisect = worst_bisect.max((v - bisect_betting_quantile(eps, q)).abs());
            cells += 1;
        }
        if eps.abs() > 1e-12 {
            let closed = (eps - 2.0 + (eps * eps + 4.0).sqrt()) / (2.0 * eps);
            worst_closed = worst_closed.max((betting_quantile(line, 0.5) - closed).abs());
        }
    }
    assert_eq!(cells, 21 * 19);
    let passed = worst_mass <= 1e-8 && worst_bisect <= 1e-12 && worst_closed <= 1e-12;
    report(
        "AC5 enhancement calculus",
        passed,
        &format!(
            "max |mass - 1| = {worst_mass:e} <= 1e-8; 21x19 grid max |v - bisection| = {worst_bisect:e} <= 1e-12; \
             q=0.5 closed form max gap {worst_closed:e} <= 1e-12"
        ),
    );
    passed
}

fn ac6_raw_recursion_equivalence() -> bool {
    let mut worst: f64 = 0.0;
    for seed in 0..1000u64 {
        let us = uniform_stream(10_000 + seed, 100);
        let (jump_rate, range) = [(0.01, 1.0), (0.001, 2.0), (0.1, 0.5), (1.0, 1.5)][(seed % 4) as usize];
        let raw = raw_jumper_log10_trace(&us, jump_rate, range);
        let mut s = SimpleJumperState::new(jump_rate, range).unwrap();
        for (&u, expected) in us.iter().zip(&raw) {
            s.step(u).unwrap();
            worst = worst.max((s.log10_capital() - expected).abs());
        }
    }
    let mut s = SimpleJumperState::new(0.01, 1.0).unwrap();
    s.step(1.0).unwrap();
    let s2 = s.step(1.0).unwrap();
    let passed = worst <= 1e-9 && (s2 - 1.165).abs() <= 1e-12;
    report(
        "AC6 raw Jumper recursion equivalence",
        passed,
        &format!("1000 streams x 100: max log10 gap {worst:e} <= 1e-9; S_2 = {s2:.15} vs 1.165"),
    );
    passed
}

fn ac7_wider_range_improves() -> bool {
    let obs = default_dataset(DEFAULT_SEED);
    let one = run_simple(&obs, 0.01, 1.0);
    let two = run_simple(&obs, 0.01, 2.0);
    let gap = |l: &betting_enhancer::LossLedger| l.cum_enhanced - l.cum_oracle;
    let post_median = |l: &betting_enhancer::LossLedger| {
        l.per_step[1000..].iter().map(|r| r.median_enhanced).sum::<f64>() / 1000.0
    };
    let (g1, g2) = (gap(&one), gap(&two));
    let (m1, m2) = (post_median(&one), post_median(&two));
    let passed = g2 < g1 && (m2 - 1.0).abs() < (m1 - 1.0).abs();
    report(
        "AC7 E=2 improvement",
        passed,
        &format!(
            "enhanced - oracle loss: E=2 {g2:.3} < E=1 {g1:.3}; post-changepoint mean median: E=2 {m2:.4}, E=1 {m1:.4} (target 1)"
        ),
    );
    passed
}

fn main() {
    let criteria: [fn() -> bool; 7] = [
        ac1_changepoint_reproduction,
        ac2_loss_gap_equals_capital,
        ac3_mean_jumper_guarantees,
        ac4_martingale_property,
        ac5_enhancement_calculus,
        ac6_raw_recursion_equivalence,
        ac7_wider_range_improves,
    ];
    let failed = criteria.iter().filter(|c| !c()).count();
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
