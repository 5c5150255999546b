//! Continuous predictive distributions and the probability integral transform.
//!
//! The standard normal CDF is computed from `erfc`, evaluated with the
//! all-positive Taylor series `erf(x) = 2/√π · e^{-x²} · Σ 2ⁿ x^{2n+1} / (2n+1)!!`
//! for small arguments and the Laplace continued fraction for `erfc` in the
//! tail. Both branches keep absolute error near machine epsilon on `|x| ≤ 8`
//! and the tail branch keeps relative accuracy down to underflow.
//!
//! Transcendental calls go through `libm` so that results, and therefore the
//! simulated datasets built on [`gaussian_quantile`], do not depend on the
//! platform's math library.

use crate::{Error, Result};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// PIT values are kept this far away from 0 and 1 before they reach a
/// betting function.
pub const PIT_CLAMP: f64 = 1e-15;

/// Switch from the series to the continued fraction at this `erfc` argument.
const ERFC_CF_THRESHOLD: f64 = 2.0;

/// A one-dimensional continuous predictive distribution.
///
/// Implementations must have a continuous CDF. Where the CDF is flat the
/// quantile is set-valued and implementations return the infimum.
pub trait ContinuousForecast {
    fn density(&self, y: f64) -> f64;

    fn cdf(&self, y: f64) -> f64;

    /// Quantile function on the open interval `(0, 1)`.
    fn quantile(&self, p: f64) -> Result<f64>;

    /// Natural log of the density. Override when a direct formula avoids
    /// underflow in the tails.
    fn log_density(&self, y: f64) -> f64 {
        self.density(y).ln()
    }
}

impl<T: ContinuousForecast + ?Sized> ContinuousForecast for &T {
    fn density(&self, y: f64) -> f64 {
        (**self).density(y)
    }
    fn cdf(&self, y: f64) -> f64 {
        (**self).cdf(y)
    }
    fn quantile(&self, p: f64) -> Result<f64> {
        (**self).quantile(p)
    }
    fn log_density(&self, y: f64) -> f64 {
        (**self).log_density(y)
    }
}

/// Gaussian predictive distribution `N(mean, stddev²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianForecast {
    mean: f64,
    stddev: f64,
}

impl GaussianForecast {
    pub fn new(mean: f64, stddev: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::Parameter(format!("gaussian mean must be finite, got {mean}")));
        }
        if !(stddev.is_finite() && stddev > 0.0) {
            return Err(Error::Parameter(format!(
                "gaussian stddev must be positive and finite, got {stddev}"
            )));
        }
        Ok(Self { mean, stddev })
    }

    pub fn standard() -> Self {
        Self { mean: 0.0, stddev: 1.0 }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn stddev(&self) -> f64 {
        self.stddev
    }

    fn standardize(&self, y: f64) -> f64 {
        (y - self.mean) / self.stddev
    }
}

impl ContinuousForecast for GaussianForecast {
    fn density(&self, y: f64) -> f64 {
        gaussian_pdf(self.standardize(y)) / self.stddev
    }

    fn cdf(&self, y: f64) -> f64 {
        gaussian_cdf(self.standardize(y))
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        Ok(self.mean + self.stddev * gaussian_quantile(p)?)
    }

    fn log_density(&self, y: f64) -> f64 {
        let z = self.standardize(y);
        -0.5 * z * z - libm::log(SQRT_2PI * self.stddev)
    }
}

/// Probability integral transform `forecast.cdf(y)`.
pub fn pit<F: ContinuousForecast + ?Sized>(forecast: &F, y: f64) -> f64 {
    forecast.cdf(y)
}

/// Keeps a PIT value inside `[PIT_CLAMP, 1 - PIT_CLAMP]`.
pub fn clamp_pit(u: f64) -> f64 {
    u.clamp(PIT_CLAMP, 1.0 - PIT_CLAMP)
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "p",
            value: p,
            expected: "(0, 1)",
        })
    }
}

/// Standard normal density.
pub fn gaussian_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * libm::exp(-0.5 * x * x)
}

/// Standard normal CDF `Φ(x)`.
pub fn gaussian_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let z = x * std::f64::consts::FRAC_1_SQRT_2;
    if x < 0.0 {
        0.5 * erfc_nonneg(-z)
    } else {
        1.0 - 0.5 * erfc_nonneg(z)
    }
}

/// Complementary error function for `x ≥ 0`.
fn erfc_nonneg(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < ERFC_CF_THRESHOLD {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    FRAC_2_SQRT_PI * libm::exp(-x2) * sum
}

/// `erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …))))`,
/// evaluated with the modified Lentz method.
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..300 {
        let a = 0.5 * k as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    libm::exp(-x * x) / (f * std::f64::consts::PI.sqrt())
}

/// Standard normal quantile `Φ⁻¹(p)`.
///
/// Acklam's rational approximation (relative error about 1e-9) followed by
/// one Halley step against [`gaussian_cdf`]. The upper half is mapped onto
/// the lower half so that the refinement always works with a small,
/// accurately represented tail probability.
pub fn gaussian_quantile(p: f64) -> Result<f64> {
    check_probability(p)?;
    if p > 0.5 {
        return Ok(-lower_quantile(1.0 - p));
    }
    Ok(lower_quantile(p))
}

fn lower_quantile(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p <= 0.5);
    if p == 0.5 {
        return 0.0;
    }
    let mut x = acklam(p);
    let density = gaussian_pdf(x);
    if density > 0.0 {
        let u = (gaussian_cdf(x) - p) / density;
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    if p < P_LOW {
        let q = libm::sqrt(-2.0 * libm::log(p));
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}
