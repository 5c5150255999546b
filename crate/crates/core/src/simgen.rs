//! Deterministic datasets: Gaussian blocks around a changepoint, and
//! uniform fuzz streams.
//!
//! The generator is xoshiro256++ seeded by four outputs of splitmix64.
//! Uniforms are the top 53 bits of a draw scaled by 2⁻⁵³. Gaussians are
//! `mean + sd·Φ⁻¹(v)` where `v = (k + ½)·2⁻⁵³` is the midpoint of the same
//! 53-bit lattice cell, which keeps `v` strictly inside `(0, 1)`. Every value
//! is a pure function of the seed.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::forecast::gaussian_quantile;
use crate::{Error, Result};

const TWO_POW_NEG_53: f64 = 1.0 / (1u64 << 53) as f64;

/// splitmix64, used only to expand a 64-bit seed into generator state.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}

/// xoshiro256++.
#[derive(Debug, Clone)]
pub struct Xoshiro256PlusPlus {
    s: [u64; 4],
}

impl Xoshiro256PlusPlus {
    pub fn seed_from_u64(seed: u64) -> Self {
        let mut sm = SplitMix64::new(seed);
        Self {
            s: [sm.next_u64(), sm.next_u64(), sm.next_u64(), sm.next_u64()],
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[0].wrapping_add(s[3]).rotate_left(23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform on `[0, 1)` from the top 53 bits.
    pub fn next_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_POW_NEG_53
    }

    /// Uniform on `(0, 1)`: the midpoint of the 53-bit cell.
    fn next_open_uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * TWO_POW_NEG_53
    }

    /// Standard normal draw by inversion.
    pub fn next_standard_normal(&mut self) -> f64 {
        gaussian_quantile(self.next_open_uniform()).expect("open uniform lies in (0, 1)")
    }
}

/// Two Gaussian blocks joined at a changepoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChangepointSpec {
    pub n_pre: usize,
    pub n_post: usize,
    pub mean_pre: f64,
    pub sd_pre: f64,
    pub mean_post: f64,
    pub sd_post: f64,
    pub seed: u64,
}

impl Default for ChangepointSpec {
    /// 1000 draws from N(0, 1) followed by 1000 from N(1, 1), seed 2021.
    fn default() -> Self {
        Self {
            n_pre: 1000,
            n_post: 1000,
            mean_pre: 0.0,
            sd_pre: 1.0,
            mean_post: 1.0,
            sd_post: 1.0,
            seed: 2021,
        }
    }
}

impl ChangepointSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, sd) in [("sd_pre", self.sd_pre), ("sd_post", self.sd_post)] {
            if !(sd.is_finite() && sd > 0.0) {
                return Err(Error::Parameter(format!("{name} must be positive, got {sd}")));
            }
        }
        for (name, mean) in [("mean_pre", self.mean_pre), ("mean_post", self.mean_post)] {
            if !mean.is_finite() {
                return Err(Error::Parameter(format!("{name} must be finite, got {mean}")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n_pre + self.n_post
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `# changepoint ...` header line of a dataset file.
    pub fn header_line(&self) -> String {
        format!(
            "# changepoint n_pre={} n_post={} mean_pre={} sd_pre={} mean_post={} sd_post={} seed={}",
            self.n_pre, self.n_post, self.mean_pre, self.sd_pre, self.mean_post, self.sd_post, self.seed
        )
    }

    /// Parses a line produced by [`header_line`](Self::header_line).
    pub fn parse_header(line: &str) -> Option<Self> {
        let rest = line.trim().strip_prefix('#')?.trim().strip_prefix("changepoint")?;
        let mut spec = ChangepointSpec::default();
        for field in rest.split_whitespace() {
            let (key, value) = field.split_once('=')?;
            match key {
                "n_pre" => spec.n_pre = value.parse().ok()?,
                "n_post" => spec.n_post = value.parse().ok()?,
                "mean_pre" => spec.mean_pre = value.parse().ok()?,
                "sd_pre" => spec.sd_pre = value.parse().ok()?,
                "mean_post" => spec.mean_post = value.parse().ok()?,
                "sd_post" => spec.sd_post = value.parse().ok()?,
                "seed" => spec.seed = value.parse().ok()?,
                _ => return None,
            }
        }
        Some(spec)
    }
}

/// The dataset described by `spec`.
pub fn generate(spec: &ChangepointSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.len());
    for _ in 0..spec.n_pre {
        out.push(spec.mean_pre + spec.sd_pre * rng.next_standard_normal());
    }
    for _ in 0..spec.n_post {
        out.push(spec.mean_post + spec.sd_post * rng.next_standard_normal());
    }
    Ok(out)
}

/// `n` uniforms on `[0, 1)` from the dataset generator.
pub fn uniform_stream(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    (0..n).map(|_| rng.next_uniform()).collect()
}

/// Decimal text with 17 significant digits, e.g. `-1.2345678901234567e-1`.
pub fn format_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Dataset file contents: the header line, then one value per line.
pub fn format_dataset(spec: &ChangepointSpec, values: &[f64]) -> String {
    let mut text = spec.header_line();
    text.push('\n');
    for v in values {
        let _ = writeln!(text, "{}", format_sig17(*v));
    }
    text
}

/// A parsed dataset file.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub spec: Option<ChangepointSpec>,
    pub values: Vec<f64>,
}

/// Parses dataset text. Lines starting with `#` are comments; the first
/// `# changepoint` comment, if any, becomes `spec`.
pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let mut spec = None;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if spec.is_none() {
                spec = ChangepointSpec::parse_header(line);
            }
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| Error::Parameter(format!("line {}: not a number: {line:?}", lineno + 1)))?;
        if !v.is_finite() {
            return Err(Error::Parameter(format!("line {}: non-finite observation", lineno + 1)));
        }
        values.push(v);
    }
    Ok(Dataset { spec, values })
}
