//! Jumper betting martingales over PIT values.
//!
//! A Simple Jumper keeps capital on three linear calibrators
//! `f_ε(u) = 1 + ε(u − 0.5)` for `ε ∈ {−E, 0, +E}`. Before every bet a
//! fraction `J` of the total capital is redistributed evenly over the three
//! (the "jump"), after which each pot is multiplied by its calibrator at the
//! observed `u`.
//!
//! Weights are stored normalized and the capital is carried separately as
//! `log10_capital`, so trajectories that reach `10^±300` and beyond stay
//! representable.
//!
//! Because the three calibrators are linear in `u`, the mixture bet is itself
//! a single line `1 + ε_eff(u − 0.5)`; see [`BettingLine`]. The same holds for
//! any capital-weighted average of Simple Jumpers, which is how the Mean
//! Jumper exposes its bet.

use serde::{Deserialize, Serialize};

use crate::forecast::clamp_pit;
use crate::{Error, Result};

/// Largest `|ε|` for which `1 + ε(u − 0.5)` stays nonnegative on `[0, 1]`.
pub const MAX_EPS: f64 = 2.0;

/// The linear betting function `b(u) = 1 + eps_eff·(u − 0.5)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BettingLine {
    eps_eff: f64,
}

impl BettingLine {
    pub fn new(eps_eff: f64) -> Result<Self> {
        if !(eps_eff.is_finite() && eps_eff.abs() <= MAX_EPS) {
            return Err(Error::Parameter(format!(
                "betting line slope must lie in [-2, 2], got {eps_eff}"
            )));
        }
        Ok(Self { eps_eff })
    }

    /// The identity calibrator `b ≡ 1`.
    pub fn neutral() -> Self {
        Self { eps_eff: 0.0 }
    }

    pub fn eps_eff(&self) -> f64 {
        self.eps_eff
    }

    /// `b(u)`. The argument is clamped away from 0 and 1 first.
    pub fn eval(&self, u: f64) -> f64 {
        1.0 + self.eps_eff * (clamp_pit(u) - 0.5)
    }

    // Slopes produced by mixing are convex combinations of values in
    // [-E, E]; the clamp only removes rounding overshoot.
    fn from_mixture(eps_eff: f64) -> Self {
        Self {
            eps_eff: eps_eff.clamp(-MAX_EPS, MAX_EPS),
        }
    }
}

/// Common interface of the betting martingales.
pub trait BettingMartingale {
    /// The betting function the next call to [`step`](Self::step) will use.
    fn peek_betting(&self) -> BettingLine;

    /// Consumes one PIT value and returns the new capital `S_n`.
    fn step(&mut self, u: f64) -> Result<f64>;

    fn log10_capital(&self) -> f64;

    fn steps(&self) -> u64;

    fn capital(&self) -> f64 {
        10f64.powf(self.log10_capital())
    }

    /// Guaranteed lower bound on the capital, if the martingale has one.
    fn capital_floor(&self) -> Option<f64> {
        None
    }
}

fn check_u(u: f64) -> Result<()> {
    if (0.0..=1.0).contains(&u) {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "u",
            value: u,
            expected: "[0, 1]",
        })
    }
}

/// State of a Simple Jumper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SimpleJumperSnapshot")]
pub struct SimpleJumperState {
    /// Normalized weights for `ε = −E, 0, +E`.
    weights: [f64; 3],
    #[serde(rename = "J")]
    jump_rate: f64,
    #[serde(rename = "E")]
    range: f64,
    log10_capital: f64,
    steps: u64,
}

#[derive(Deserialize)]
struct SimpleJumperSnapshot {
    weights: [f64; 3],
    #[serde(rename = "J")]
    jump_rate: f64,
    #[serde(rename = "E")]
    range: f64,
    log10_capital: f64,
    steps: u64,
}

impl TryFrom<SimpleJumperSnapshot> for SimpleJumperState {
    type Error = Error;

    fn try_from(s: SimpleJumperSnapshot) -> Result<Self> {
        let mut state = SimpleJumperState::new(s.jump_rate, s.range)?;
        let sum: f64 = s.weights.iter().sum();
        if s.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Parameter(format!(
                "snapshot weights must be nonnegative and sum to 1, got {:?}",
                s.weights
            )));
        }
        if !s.log10_capital.is_finite() {
            return Err(Error::Parameter("snapshot log10_capital must be finite".into()));
        }
        state.weights = s.weights;
        state.log10_capital = s.log10_capital;
        state.steps = s.steps;
        Ok(state)
    }
}

impl SimpleJumperState {
    /// Fresh Simple Jumper with jump rate `J ∈ (0, 1]` and range `E ∈ (0, 2]`.
    pub fn new(jump_rate: f64, range: f64) -> Result<Self> {
        if !(jump_rate > 0.0 && jump_rate <= 1.0) {
            return Err(Error::Parameter(format!("jump rate J must lie in (0, 1], got {jump_rate}")));
        }
        if !(range > 0.0 && range <= MAX_EPS) {
            return Err(Error::Parameter(format!("range E must lie in (0, 2], got {range}")));
        }
        Ok(Self {
            weights: [1.0 / 3.0; 3],
            jump_rate,
            range,
            log10_capital: 0.0,
            steps: 0,
        })
    }

    pub fn weights(&self) -> [f64; 3] {
        self.weights
    }

    pub fn jump_rate(&self) -> f64 {
        self.jump_rate
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    /// Overwrites the normalized weights. Intended for replaying or probing
    /// states; the capital is left untouched.
    pub fn with_weights(mut self, weights: [f64; 3]) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || !(sum > 0.0) {
            return Err(Error::Parameter(format!("weights must be nonnegative, got {weights:?}")));
        }
        self.weights = weights.map(|w| w / sum);
        Ok(self)
    }

    /// Weights after the jump `C_ε := (1 − J)C_ε + (J/3)C`, with `C = 1`.
    fn mixed(&self) -> [f64; 3] {
        let total: f64 = self.weights.iter().sum();
        let share = self.jump_rate / 3.0 * total;
        self.weights.map(|w| (1.0 - self.jump_rate) * w + share)
    }

    fn line_from(&self, mixed: &[f64; 3]) -> BettingLine {
        let total: f64 = mixed.iter().sum();
        BettingLine::from_mixture((mixed[2] - mixed[0]) / total * self.range)
    }
}

impl BettingMartingale for SimpleJumperState {
    fn peek_betting(&self) -> BettingLine {
        self.line_from(&self.mixed())
    }

    fn step(&mut self, u: f64) -> Result<f64> {
        check_u(u)?;
        let d = clamp_pit(u) - 0.5;
        let mixed = self.mixed();
        let before: f64 = mixed.iter().sum();
        let eps = [-self.range, 0.0, self.range];
        let mut bet = [0.0; 3];
        for k in 0..3 {
            bet[k] = mixed[k] * (1.0 + eps[k] * d);
        }
        let after: f64 = bet.iter().sum();
        self.weights = bet.map(|w| w / after);
        self.log10_capital += (after / before).log10();
        self.steps += 1;
        Ok(self.capital())
    }

    fn log10_capital(&self) -> f64 {
        self.log10_capital
    }

    fn steps(&self) -> u64 {
        self.steps
    }
}

/// Equal-weight average of Simple Jumpers over a set of jump rates that
/// includes `J = 1`.
///
/// The `J = 1` component redistributes everything before every bet, so it
/// always bets `b ≡ 1` and its capital stays at 1. The average therefore
/// never drops below `1/|𝒥|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeanJumperSnapshot")]
pub struct MeanJumperState {
    components: Vec<SimpleJumperState>,
}

#[derive(Deserialize)]
struct MeanJumperSnapshot {
    components: Vec<SimpleJumperState>,
}

impl TryFrom<MeanJumperSnapshot> for MeanJumperState {
    type Error = Error;

    fn try_from(s: MeanJumperSnapshot) -> Result<Self> {
        let rates: Vec<f64> = s.components.iter().map(|c| c.jump_rate).collect();
        check_jump_set(&rates)?;
        let range = s.components[0].range;
        if s.components.iter().any(|c| c.range != range) {
            return Err(Error::Parameter("all Mean Jumper components must share E".into()));
        }
        let steps = s.components[0].steps;
        if s.components.iter().any(|c| c.steps != steps) {
            return Err(Error::Parameter("Mean Jumper components disagree on step count".into()));
        }
        Ok(Self {
            components: s.components,
        })
    }
}

fn check_jump_set(rates: &[f64]) -> Result<()> {
    if rates.is_empty() {
        return Err(Error::Parameter("the set of jump rates is empty".into()));
    }
    if !rates.contains(&1.0) {
        return Err(Error::Parameter(format!("the set of jump rates must contain J = 1, got {rates:?}")));
    }
    for (i, a) in rates.iter().enumerate() {
        if rates[..i].contains(a) {
            return Err(Error::Parameter(format!("duplicate jump rate {a}")));
        }
    }
    Ok(())
}

impl MeanJumperState {
    pub fn new(jump_rates: &[f64], range: f64) -> Result<Self> {
        check_jump_set(jump_rates)?;
        let components = jump_rates
            .iter()
            .map(|&j| SimpleJumperState::new(j, range))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { components })
    }

    /// The four-rate set `{10⁻³, 10⁻², 10⁻¹, 1}`.
    pub fn default_jump_rates() -> [f64; 4] {
        [1e-3, 1e-2, 1e-1, 1.0]
    }

    pub fn components(&self) -> &[SimpleJumperState] {
        &self.components
    }

    pub fn range(&self) -> f64 {
        self.components[0].range
    }

    /// Component capitals divided by the largest one, with that largest
    /// log10 capital.
    fn relative_capitals(&self) -> (Vec<f64>, f64) {
        let top = self
            .components
            .iter()
            .map(|c| c.log10_capital)
            .fold(f64::NEG_INFINITY, f64::max);
        let rel = self
            .components
            .iter()
            .map(|c| 10f64.powf(c.log10_capital - top))
            .collect();
        (rel, top)
    }
}

impl BettingMartingale for MeanJumperState {
    fn peek_betting(&self) -> BettingLine {
        let (rel, _) = self.relative_capitals();
        let total: f64 = rel.iter().sum();
        let weighted: f64 = rel
            .iter()
            .zip(&self.components)
            .map(|(w, c)| w * c.peek_betting().eps_eff)
            .sum();
        BettingLine::from_mixture(weighted / total)
    }

    fn step(&mut self, u: f64) -> Result<f64> {
        check_u(u)?;
        for c in &mut self.components {
            c.step(u)?;
        }
        Ok(self.capital())
    }

    fn log10_capital(&self) -> f64 {
        let (rel, top) = self.relative_capitals();
        let mean: f64 = rel.iter().sum::<f64>() / rel.len() as f64;
        top + mean.log10()
    }

    fn steps(&self) -> u64 {
        self.components[0].steps
    }

    fn capital_floor(&self) -> Option<f64> {
        Some(1.0 / self.components.len() as f64)
    }
}
