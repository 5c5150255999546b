#![allow(dead_code)]

use betting_enhancer::evalloss::PiecewiseGaussian;
use betting_enhancer::{
    generate, run_experiment, ChangepointSpec, GaussianForecast, LogBase, LossLedger, MeanJumperState,
    SimpleJumperState,
};

/// Kolmogorov–Smirnov distance between the sample and Uniform[0, 1].
pub fn ks_uniform(sample: &[f64]) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let x = x.clamp(0.0, 1.0);
            ((i as f64 + 1.0) / n - x).max(x - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

pub fn default_dataset(seed: u64) -> Vec<f64> {
    generate(&ChangepointSpec { seed, ..Default::default() }).unwrap()
}

pub fn default_oracle() -> PiecewiseGaussian {
    PiecewiseGaussian {
        changepoint: 1000,
        pre: GaussianForecast::standard(),
        post: GaussianForecast::new(1.0, 1.0).unwrap(),
    }
}

pub fn run_simple(obs: &[f64], jump_rate: f64, range: f64) -> LossLedger {
    let mut mj = SimpleJumperState::new(jump_rate, range).unwrap();
    run_experiment(obs, &GaussianForecast::standard(), &mut mj, &default_oracle(), LogBase::Ten).unwrap()
}

pub fn run_mean(obs: &[f64], range: f64) -> LossLedger {
    let mut mj = MeanJumperState::new(&MeanJumperState::default_jump_rates(), range).unwrap();
    run_experiment(obs, &GaussianForecast::standard(), &mut mj, &default_oracle(), LogBase::Ten).unwrap()
}

pub fn report(id: &str, passed: bool, detail: &str) {
    let mark = if passed { "PASS" } else { "FAIL" };
    println!("[{mark}] {id}: {detail}");
}
