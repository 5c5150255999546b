//! Reference computations and the checks behind `betting-enhancer selftest`.
//!
//! The helpers here deliberately avoid the production code paths: the raw
//! Jumper trace carries unnormalized capitals, quantiles of the betting
//! integral are found by bisection, and densities are integrated with
//! adaptive Simpson.

use crate::enhance::{betting_quantile, EnhancedForecast};
use crate::evalloss::{run_experiment, LogBase};
use crate::forecast::{ContinuousForecast, GaussianForecast};
use crate::martingale::{BettingLine, BettingMartingale, MeanJumperState, SimpleJumperState};
use crate::simgen::{format_sig17, generate, uniform_stream, ChangepointSpec};

/// First 20 values of the default changepoint dataset (seed 2021).
pub const GOLDEN_SEED_2021: &str = include_str!("../tests/data/golden_seed2021.txt");

/// The Jumper recursion on raw capitals `C_ε`, returning `log10 S_n` after
/// every input. Inputs are clamped the same way the production code clamps.
pub fn raw_jumper_log10_trace(us: &[f64], jump_rate: f64, range: f64) -> Vec<f64> {
    let eps = [-range, 0.0, range];
    let mut c = [1.0 / 3.0; 3];
    let mut total = 1.0;
    let mut out = Vec::with_capacity(us.len());
    for &u in us {
        let u = crate::forecast::clamp_pit(u);
        for (ck, e) in c.iter_mut().zip(eps) {
            *ck = (1.0 - jump_rate) * *ck + jump_rate / 3.0 * total;
            *ck *= 1.0 + e * (u - 0.5);
        }
        total = c[0] + c[1] + c[2];
        out.push(total.log10());
    }
    out
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 50)
}

/// Solves `(1 − ε/2)v + (ε/2)v² = q` on `[0, 1]` by bisection.
pub fn bisect_betting_quantile(eps: f64, q: f64) -> f64 {
    let integral = |v: f64| (1.0 - 0.5 * eps) * v + 0.5 * eps * v * v;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if integral(mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// PIT streams that try to push a Jumper around: constant extremes,
/// alternation, long runs, and uniform noise mixed with extremes.
pub fn adversarial_stream(kind: usize, seed: u64, len: usize) -> Vec<f64> {
    let noise = uniform_stream(seed, len);
    (0..len)
        .map(|i| match kind % 6 {
            0 => 0.0,
            1 => 1.0,
            2 => (i % 2) as f64,
            3 => {
                if (i / 50) % 2 == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            4 => {
                if noise[i] < 0.3 {
                    (noise[i] * 10.0).floor() % 2.0
                } else {
                    noise[i]
                }
            }
            _ => noise[i] * noise[i],
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name, passed, detail }
}

/// Runs every selftest check against the given golden text.
pub fn run_checks(golden: &str) -> Vec<CheckOutcome> {
    vec![
        check_hand_trace(),
        check_first_step(),
        check_raw_equivalence(),
        check_normalization(),
        check_quadratic_vs_bisection(),
        check_likelihood_ratio_identity(),
        check_mean_jumper_floor(),
        check_golden(golden),
    ]
}

fn check_hand_trace() -> CheckOutcome {
    let mut s = SimpleJumperState::new(0.01, 1.0).expect("valid parameters");
    let s1 = s.step(1.0).expect("u in range");
    let s2 = s.step(1.0).expect("u in range");
    let ok = (s1 - 1.0).abs() <= 1e-12 && (s2 - 1.165).abs() <= 1e-12;
    outcome("hand_trace_s2", ok, format!("S_1 = {s1}, S_2 = {s2} (expected 1.165)"))
}

fn check_first_step() -> CheckOutcome {
    let mut worst: f64 = 0.0;
    for (i, u) in uniform_stream(11, 200).into_iter().enumerate() {
        let range = [0.5, 1.0, 2.0][i % 3];
        let mut s = SimpleJumperState::new(0.01, range).expect("valid parameters");
        worst = worst.max((s.step(u).expect("u in range") - 1.0).abs());
    }
    outcome("first_step_neutrality", worst <= 1e-12, format!("max |S_1 - 1| = {worst:e}"))
}

fn check_raw_equivalence() -> CheckOutcome {
    let mut worst: f64 = 0.0;
    for seed in 0..200u64 {
        let us = uniform_stream(seed, 100);
        let raw = raw_jumper_log10_trace(&us, 0.01, 1.0);
        let mut s = SimpleJumperState::new(0.01, 1.0).expect("valid parameters");
        for (u, expected) in us.iter().zip(raw) {
            s.step(*u).expect("u in range");
            worst = worst.max((s.log10_capital() - expected).abs());
        }
    }
    outcome("raw_recursion_equivalence", worst <= 1e-9, format!("max log10 gap = {worst:e}"))
}

fn check_normalization() -> CheckOutcome {
    let mut worst: f64 = 0.0;
    for eps in [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
        let e = EnhancedForecast::new(GaussianForecast::standard(), BettingLine::new(eps).expect("|eps| <= 2"));
        let mass = adaptive_simpson(&|y| e.density(y), -10.0, 10.0, 1e-10);
        worst = worst.max((mass - 1.0).abs());
    }
    outcome("density_normalization", worst <= 1e-8, format!("max |mass - 1| = {worst:e}"))
}

fn check_quadratic_vs_bisection() -> CheckOutcome {
    let mut worst: f64 = 0.0;
    for i in 0..=20 {
        let eps = -2.0 + 0.2 * i as f64;
        let line = BettingLine::new(eps.clamp(-2.0, 2.0)).expect("|eps| <= 2");
        for j in 1..=19 {
            let q = 0.05 * j as f64;
            worst = worst.max((betting_quantile(line, q) - bisect_betting_quantile(line.eps_eff(), q)).abs());
        }
    }
    outcome("quadratic_vs_bisection", worst <= 1e-12, format!("max |v - v_bisect| = {worst:e}"))
}

fn check_likelihood_ratio_identity() -> CheckOutcome {
    let obs = match generate(&ChangepointSpec::default()) {
        Ok(v) => v,
        Err(e) => return outcome("likelihood_ratio_identity", false, e.to_string()),
    };
    let base = GaussianForecast::standard();
    let mut mj = SimpleJumperState::new(0.01, 1.0).expect("valid parameters");
    match run_experiment(&obs, &base, &mut mj, &base, LogBase::Ten) {
        Ok(ledger) => {
            let err = ledger.max_identity_error();
            outcome(
                "likelihood_ratio_identity",
                err <= 1e-9,
                format!("max gap = {err:e}, final log10 capital = {:.3}", ledger.final_log10_capital()),
            )
        }
        Err(e) => outcome("likelihood_ratio_identity", false, e.to_string()),
    }
}

fn check_mean_jumper_floor() -> CheckOutcome {
    let mut lowest = f64::INFINITY;
    for kind in 0..6 {
        for range in [1.0, 2.0] {
            let mut m = MeanJumperState::new(&MeanJumperState::default_jump_rates(), range).expect("valid set");
            for u in adversarial_stream(kind, kind as u64, 2000) {
                lowest = lowest.min(m.step(u).expect("u in range"));
            }
        }
    }
    outcome("mean_jumper_floor", lowest >= 0.25 - 1e-12, format!("min capital = {lowest}"))
}

fn check_golden(golden: &str) -> CheckOutcome {
    let spec = ChangepointSpec { n_pre: 20, n_post: 0, ..Default::default() };
    let expected: String = match generate(&spec) {
        Ok(v) => v.iter().map(|x| format_sig17(*x) + "\n").collect(),
        Err(e) => return outcome("golden_seed2021", false, e.to_string()),
    };
    let ok = golden == expected;
    let detail = if ok {
        "first 20 values match byte for byte".to_string()
    } else {
        let line = golden
            .lines()
            .zip(expected.lines())
            .position(|(a, b)| a != b)
            .map_or_else(|| "length differs".to_string(), |i| format!("first mismatch on line {}", i + 1));
        format!("golden file differs from generator output: {line}")
    };
    outcome("golden_seed2021", ok, detail)
}
