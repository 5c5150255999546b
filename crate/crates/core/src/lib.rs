//! Betting against probabilistic forecasters.
//!
//! A forecaster issues a continuous predictive distribution `F_n` for each
//! outcome `y_n`. The probability integral transform `u_n = F_n(y_n)` turns
//! the forecasts into a stream that is i.i.d. uniform whenever the
//! forecaster is correct, so a betting martingale on `u_n` is a test of the
//! forecaster. The martingale's betting function `b_n` also defines a new,
//! *enhanced* forecaster with density `b_n(F_n) f_n` whose likelihood ratio
//! against the original forecaster is exactly the martingale's capital.
//!
//! Modules:
//!
//! - [`forecast`]: predictive distributions, Gaussian special functions, PIT.
//! - [`martingale`]: Simple Jumper and Mean Jumper betting martingales.
//! - [`enhance`]: the enhanced forecaster built from a betting line.
//! - [`evalloss`]: log-loss bookkeeping for base, enhanced and oracle forecasters.
//! - [`simgen`]: deterministic changepoint datasets and uniform fuzz streams.
//! - [`cli`]: the `betting-enhancer` command-line front end.

pub mod cli;
pub mod enhance;
pub mod evalloss;
pub mod forecast;
pub mod martingale;
pub mod selftest;
pub mod simgen;

pub use enhance::{betting_integral, betting_quantile, EnhancedForecast};
pub use evalloss::{log_loss, run_experiment, LogBase, LossLedger, TrajectoryRow};
pub use forecast::{gaussian_cdf, gaussian_quantile, pit, ContinuousForecast, GaussianForecast};
pub use martingale::{BettingLine, BettingMartingale, MeanJumperState, SimpleJumperState};
pub use simgen::{generate, uniform_stream, ChangepointSpec};

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("{name} = {value} is outside {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// A constructor parameter was invalid.
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
