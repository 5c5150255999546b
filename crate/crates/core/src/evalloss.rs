//! Log-loss accounting for base, enhanced and oracle forecasters.
//!
//! The enhanced density at `y_n` is `b_n(u_n)` times the base density, so
//! the per-step loss gap between base and enhanced forecasters is
//! `log b_n(u_n)`, the log of the martingale's growth factor. Summed over the
//! run, `cum_base − cum_enhanced` equals the martingale's log capital.

use serde::{Deserialize, Serialize};

use crate::enhance::EnhancedForecast;
use crate::forecast::{pit, ContinuousForecast, GaussianForecast};
use crate::martingale::BettingMartingale;
use crate::{Error, Result};

/// Logarithm base used for losses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    Ten,
    Natural,
}

impl LogBase {
    pub fn from_base10_flag(base10: bool) -> Self {
        if base10 {
            LogBase::Ten
        } else {
            LogBase::Natural
        }
    }

    /// Converts a natural log into this base.
    pub fn from_ln(self, ln: f64) -> f64 {
        match self {
            LogBase::Ten => ln / std::f64::consts::LN_10,
            LogBase::Natural => ln,
        }
    }

    /// Converts a log10 value into this base.
    pub fn from_log10(self, log10: f64) -> f64 {
        match self {
            LogBase::Ten => log10,
            LogBase::Natural => log10 * std::f64::consts::LN_10,
        }
    }

    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Ten => x.log10(),
            LogBase::Natural => x.ln(),
        }
    }
}

/// `−log₁₀(density_value)`; `+∞` when the density is not positive.
pub fn log_loss(density_value: f64) -> f64 {
    log_loss_in(density_value, LogBase::Ten)
}

pub fn log_loss_in(density_value: f64, base: LogBase) -> f64 {
    if density_value > 0.0 {
        -base.log(density_value)
    } else {
        f64::INFINITY
    }
}

/// Loss from a natural-log density, with the same sentinel.
fn loss_from_log_density(log_density: f64, base: LogBase) -> f64 {
    if log_density.is_nan() || log_density == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        -base.from_ln(log_density)
    }
}

/// Produces the forecast for step `n` (1-based).
pub trait ForecastPolicy {
    type Forecast: ContinuousForecast;

    fn forecast(&self, step: usize) -> Self::Forecast;
}

impl ForecastPolicy for GaussianForecast {
    type Forecast = GaussianForecast;

    fn forecast(&self, _step: usize) -> GaussianForecast {
        *self
    }
}

impl<F, T> ForecastPolicy for F
where
    F: Fn(usize) -> T,
    T: ContinuousForecast,
{
    type Forecast = T;

    fn forecast(&self, step: usize) -> T {
        self(step)
    }
}

/// One Gaussian up to and including step `changepoint`, another after it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiecewiseGaussian {
    pub changepoint: usize,
    pub pre: GaussianForecast,
    pub post: GaussianForecast,
}

impl ForecastPolicy for PiecewiseGaussian {
    type Forecast = GaussianForecast;

    fn forecast(&self, step: usize) -> GaussianForecast {
        if step <= self.changepoint {
            self.pre
        } else {
            self.post
        }
    }
}

/// One step of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub step: usize,
    pub y: f64,
    pub u: f64,
    pub eps_eff: f64,
    pub log10_capital: f64,
    pub loss_base: f64,
    pub loss_enhanced: f64,
    pub loss_oracle: f64,
    pub median_enhanced: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossLedger {
    pub cum_base: f64,
    pub cum_enhanced: f64,
    pub cum_oracle: f64,
    pub base: LogBase,
    pub per_step: Vec<TrajectoryRow>,
}

impl LossLedger {
    fn new(base: LogBase) -> Self {
        Self {
            cum_base: 0.0,
            cum_enhanced: 0.0,
            cum_oracle: 0.0,
            base,
            per_step: Vec::new(),
        }
    }

    pub fn final_log10_capital(&self) -> f64 {
        self.per_step.last().map_or(0.0, |r| r.log10_capital)
    }

    pub fn min_log10_capital(&self) -> f64 {
        self.per_step
            .iter()
            .map(|r| r.log10_capital)
            .fold(0.0, f64::min)
    }

    /// Largest `|(cum_base − cum_enhanced) − log capital|` over the run, in
    /// the ledger's log base. Infinite if any loss is infinite.
    pub fn max_identity_error(&self) -> f64 {
        let mut base = 0.0;
        let mut enhanced = 0.0;
        let mut worst: f64 = 0.0;
        for r in &self.per_step {
            base += r.loss_base;
            enhanced += r.loss_enhanced;
            let gap = (base - enhanced) - self.base.from_log10(r.log10_capital);
            worst = worst.max(if gap.is_nan() { f64::INFINITY } else { gap.abs() });
        }
        worst
    }

    /// True if any recorded loss hit the infinite-loss sentinel.
    pub fn has_infinite_loss(&self) -> bool {
        self.per_step.iter().any(|r| {
            r.loss_base.is_infinite() || r.loss_enhanced.is_infinite() || r.loss_oracle.is_infinite()
        })
    }
}

/// Runs base, enhanced and oracle forecasters over `observations`.
///
/// At each step the enhanced forecast is built from the betting line the
/// martingale offers *before* seeing `y_n`; the martingale is then stepped
/// with the base forecast's PIT value.
pub fn run_experiment<B, O, M>(
    observations: &[f64],
    base: &B,
    martingale: &mut M,
    oracle: &O,
    log_base: LogBase,
) -> Result<LossLedger>
where
    B: ForecastPolicy,
    O: ForecastPolicy,
    M: BettingMartingale + ?Sized,
{
    if observations.is_empty() {
        return Err(Error::Parameter("no observations to evaluate".into()));
    }
    let mut ledger = LossLedger::new(log_base);
    ledger.per_step.reserve(observations.len());
    for (i, &y) in observations.iter().enumerate() {
        let step = i + 1;
        let base_forecast = base.forecast(step);
        let line = martingale.peek_betting();
        let enhanced = EnhancedForecast::new(&base_forecast, line);
        let oracle_forecast = oracle.forecast(step);

        let loss_base = loss_from_log_density(base_forecast.log_density(y), log_base);
        let loss_enhanced = loss_from_log_density(enhanced.log_density(y), log_base);
        let loss_oracle = loss_from_log_density(oracle_forecast.log_density(y), log_base);
        let median_enhanced = enhanced.median()?;

        let u = pit(&base_forecast, y);
        martingale.step(u)?;

        ledger.cum_base += loss_base;
        ledger.cum_enhanced += loss_enhanced;
        ledger.cum_oracle += loss_oracle;
        ledger.per_step.push(TrajectoryRow {
            step,
            y,
            u,
            eps_eff: line.eps_eff(),
            log10_capital: martingale.log10_capital(),
            loss_base,
            loss_enhanced,
            loss_oracle,
            median_enhanced,
        });
    }
    Ok(ledger)
}
