//! The enhanced forecaster.
//!
//! Given a base forecast with CDF `F` and density `f`, and a betting line
//! `b`, the enhanced forecast has density `b(F(y))·f(y)` and CDF `B(F(y))`
//! where `B(v) = ∫₀ᵛ b = (1 − ε/2)v + (ε/2)v²`. Its likelihood ratio against
//! the base forecast at `y` is `b(F(y))`, the bet's payoff.

use crate::forecast::{check_probability, clamp_pit, ContinuousForecast};
use crate::martingale::BettingLine;
use crate::Result;

/// `B(v) = ∫₀ᵛ b(u) du` on `[0, 1]`.
pub fn betting_integral(line: BettingLine, v: f64) -> f64 {
    let half = 0.5 * line.eps_eff();
    ((1.0 - half) * v + half * v * v).clamp(0.0, 1.0)
}

/// The `v ∈ [0, 1]` with `B(v) = q`.
///
/// Uses the root `2q / (a + √(a² + 2εq))` with `a = 1 − ε/2`, the
/// rationalized form of `(−a + √(a² + 2εq))/ε`. It has no cancellation as
/// `ε → 0` and reduces to `v = q` at `ε = 0`.
pub fn betting_quantile(line: BettingLine, q: f64) -> f64 {
    let eps = line.eps_eff();
    let a = 1.0 - 0.5 * eps;
    let disc = (a * a + 2.0 * eps * q).max(0.0);
    let denom = a + disc.sqrt();
    if denom == 0.0 {
        // only reachable at ε = 2, q = 0
        return 0.0;
    }
    (2.0 * q / denom).clamp(0.0, 1.0)
}

/// Base forecast reweighted by a betting line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnhancedForecast<F> {
    base: F,
    line: BettingLine,
}

impl<F: ContinuousForecast> EnhancedForecast<F> {
    pub fn new(base: F, line: BettingLine) -> Self {
        Self { base, line }
    }

    pub fn base(&self) -> &F {
        &self.base
    }

    pub fn line(&self) -> BettingLine {
        self.line
    }

    pub fn median(&self) -> Result<f64> {
        self.quantile(0.5)
    }
}

impl<F: ContinuousForecast> ContinuousForecast for EnhancedForecast<F> {
    fn density(&self, y: f64) -> f64 {
        self.line.eval(clamp_pit(self.base.cdf(y))) * self.base.density(y)
    }

    fn cdf(&self, y: f64) -> f64 {
        betting_integral(self.line, self.base.cdf(y))
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        self.base.quantile(betting_quantile(self.line, p))
    }

    fn log_density(&self, y: f64) -> f64 {
        self.line.eval(clamp_pit(self.base.cdf(y))).ln() + self.base.log_density(y)
    }
}
