//! `betting-enhancer` command line.
//!
//! Subcommands:
//!
//! - `generate` writes a changepoint dataset file.
//! - `run` evaluates base, enhanced and oracle forecasters on a dataset and
//!   writes the trajectory CSV and a JSON summary.
//! - `selftest` runs the built-in invariant checks.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 invariant
//! failure.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::evalloss::{run_experiment, LogBase, LossLedger, PiecewiseGaussian};
use crate::forecast::GaussianForecast;
use crate::martingale::{BettingMartingale, MeanJumperState, SimpleJumperState};
use crate::selftest::{run_checks, GOLDEN_SEED_2021};
use crate::simgen::{format_dataset, format_sig17, generate, parse_dataset, ChangepointSpec};

pub const SEED_ENV: &str = "BETTING_ENHANCER_SEED";

pub const CSV_HEADER: &str = "step,y,u,eps_eff,log10_capital,loss_base,loss_enh,loss_oracle,median_enh";

/// Tolerance of the likelihood-ratio identity checked after every run.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("invariant failure: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "betting-enhancer", version, about = "Bet against a probabilistic forecaster and enhance it")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a changepoint dataset file.
    Generate(GenerateArgs),
    /// Run an experiment and write trajectory CSV plus summary JSON.
    Run(Box<RunArgs>),
    /// Run the built-in invariant checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct SpecArgs {
    #[arg(long)]
    pub n_pre: Option<usize>,
    #[arg(long)]
    pub n_post: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub mean_pre: Option<f64>,
    #[arg(long)]
    pub sd_pre: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mean_post: Option<f64>,
    #[arg(long)]
    pub sd_post: Option<f64>,
    /// Seed; also read from BETTING_ENHANCER_SEED.
    #[arg(long, env = SEED_ENV)]
    pub seed: Option<u64>,
}

impl SpecArgs {
    fn any_shape_flag(&self) -> bool {
        self.n_pre.is_some()
            || self.n_post.is_some()
            || self.mean_pre.is_some()
            || self.sd_pre.is_some()
            || self.mean_post.is_some()
            || self.sd_post.is_some()
    }

    fn apply(&self, spec: &mut ChangepointSpec) {
        if let Some(v) = self.n_pre {
            spec.n_pre = v;
        }
        if let Some(v) = self.n_post {
            spec.n_post = v;
        }
        if let Some(v) = self.mean_pre {
            spec.mean_pre = v;
        }
        if let Some(v) = self.sd_pre {
            spec.sd_pre = v;
        }
        if let Some(v) = self.mean_post {
            spec.mean_post = v;
        }
        if let Some(v) = self.sd_post {
            spec.sd_post = v;
        }
        if let Some(v) = self.seed {
            spec.seed = v;
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Destination file.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MartingaleKind {
    #[default]
    Simple,
    Mean,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Dataset file written by `generate` (or any one-value-per-line file).
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, value_enum)]
    pub martingale_kind: Option<MartingaleKind>,
    /// Jump rate J of the Simple Jumper.
    #[arg(long)]
    pub jump_rate: Option<f64>,
    /// Comma-separated jump rates of the Mean Jumper (must include 1).
    #[arg(long, value_delimiter = ',')]
    pub jump_rates: Option<Vec<f64>>,
    /// Range E of the bets, in (0, 2].
    #[arg(long)]
    pub eps_range: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub base_mean: Option<f64>,
    #[arg(long)]
    pub base_sd: Option<f64>,
    /// Oracle as `changepoint:mean_pre:sd_pre:mean_post:sd_post`.
    #[arg(long, allow_hyphen_values = true)]
    pub oracle: Option<String>,
    /// Report losses in base 10 (true) or natural log (false).
    #[arg(long, action = clap::ArgAction::Set)]
    pub loss_base10: Option<bool>,
    /// Trajectory CSV destination.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Summary JSON destination; printed to stdout regardless.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// 1-based step at which to report the capital.
    #[arg(long)]
    pub changepoint: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Golden file to check instead of the embedded copy.
    #[arg(long)]
    pub golden: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DatasetSource {
    Path(PathBuf),
    Inline(ChangepointSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub mean: f64,
    pub sd: f64,
}

impl GaussianSpec {
    fn forecast(self, what: &str) -> Result<GaussianForecast, CliError> {
        GaussianForecast::new(self.mean, self.sd).map_err(|e| CliError::Config(format!("{what}: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSpec {
    pub changepoint: usize,
    pub pre: GaussianSpec,
    pub post: GaussianSpec,
}

impl OracleSpec {
    fn from_changepoint(spec: &ChangepointSpec) -> Self {
        Self {
            changepoint: spec.n_pre,
            pre: GaussianSpec { mean: spec.mean_pre, sd: spec.sd_pre },
            post: GaussianSpec { mean: spec.mean_post, sd: spec.sd_post },
        }
    }

    fn parse(text: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = text.split(':').collect();
        let bad = || CliError::Config(format!("--oracle expects changepoint:mean_pre:sd_pre:mean_post:sd_post, got {text:?}"));
        if parts.len() != 5 {
            return Err(bad());
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
        Ok(Self {
            changepoint: parts[0].trim().parse().map_err(|_| bad())?,
            pre: GaussianSpec { mean: num(parts[1])?, sd: num(parts[2])? },
            post: GaussianSpec { mean: num(parts[3])?, sd: num(parts[4])? },
        })
    }

    fn policy(self) -> Result<PiecewiseGaussian, CliError> {
        Ok(PiecewiseGaussian {
            changepoint: self.changepoint,
            pre: self.pre.forecast("oracle pre")?,
            post: self.post.forecast("oracle post")?,
        })
    }
}

/// Everything needed to run one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub martingale_kind: MartingaleKind,
    pub jump_rate: f64,
    pub jump_rates: Vec<f64>,
    pub eps_range: f64,
    pub base: GaussianSpec,
    pub oracle: Option<OracleSpec>,
    pub loss_base10: bool,
    pub output: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub changepoint: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: DatasetSource::Inline(ChangepointSpec::default()),
            martingale_kind: MartingaleKind::Simple,
            jump_rate: 0.01,
            jump_rates: MeanJumperState::default_jump_rates().to_vec(),
            eps_range: 1.0,
            base: GaussianSpec { mean: 0.0, sd: 1.0 },
            oracle: None,
            loss_base10: true,
            output: None,
            summary: None,
            changepoint: None,
        }
    }
}

impl ExperimentConfig {
    /// Config file (if any) overlaid with command-line flags.
    pub fn from_args(args: &RunArgs) -> Result<Self, CliError> {
        let mut cfg = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(path) = &args.dataset {
            cfg.dataset = DatasetSource::Path(path.clone());
        }
        match &mut cfg.dataset {
            DatasetSource::Inline(spec) => args.spec.apply(spec),
            DatasetSource::Path(_) if args.spec.any_shape_flag() => {
                return Err(CliError::Config("dataset shape flags cannot be combined with a dataset file".into()));
            }
            DatasetSource::Path(_) => {}
        }
        if let Some(v) = args.martingale_kind {
            cfg.martingale_kind = v;
        }
        if let Some(v) = args.jump_rate {
            cfg.jump_rate = v;
        }
        if let Some(v) = &args.jump_rates {
            cfg.jump_rates = v.clone();
        }
        if let Some(v) = args.eps_range {
            cfg.eps_range = v;
        }
        if let Some(v) = args.base_mean {
            cfg.base.mean = v;
        }
        if let Some(v) = args.base_sd {
            cfg.base.sd = v;
        }
        if let Some(text) = &args.oracle {
            cfg.oracle = Some(OracleSpec::parse(text)?);
        }
        if let Some(v) = args.loss_base10 {
            cfg.loss_base10 = v;
        }
        if let Some(v) = &args.output {
            cfg.output = Some(v.clone());
        }
        if let Some(v) = &args.summary {
            cfg.summary = Some(v.clone());
        }
        if let Some(v) = args.changepoint {
            cfg.changepoint = Some(v);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.build_martingale()?;
        self.base.forecast("base")?;
        if let Some(oracle) = self.oracle {
            oracle.policy()?;
        }
        if let DatasetSource::Inline(spec) = &self.dataset {
            spec.validate()?;
        }
        if self.changepoint == Some(0) {
            return Err(CliError::Config("changepoint is a 1-based step index".into()));
        }
        Ok(())
    }

    pub fn build_martingale(&self) -> Result<Box<dyn BettingMartingale>, CliError> {
        Ok(match self.martingale_kind {
            MartingaleKind::Simple => Box::new(SimpleJumperState::new(self.jump_rate, self.eps_range)?),
            MartingaleKind::Mean => Box::new(MeanJumperState::new(&self.jump_rates, self.eps_range)?),
        })
    }

    /// Observations plus the changepoint spec that produced them, if known.
    pub fn load_dataset(&self) -> Result<(Vec<f64>, Option<ChangepointSpec>), CliError> {
        match &self.dataset {
            DatasetSource::Inline(spec) => Ok((generate(spec)?, Some(*spec))),
            DatasetSource::Path(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read dataset {}: {e}", path.display())))?;
                let parsed = parse_dataset(&text)?;
                Ok((parsed.values, parsed.spec))
            }
        }
    }
}

/// Summary of one run, written as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub martingale_kind: MartingaleKind,
    pub jump_rate: Option<f64>,
    pub jump_rates: Option<Vec<f64>>,
    pub eps_range: f64,
    pub loss_base10: bool,
    pub steps: usize,
    pub final_log10_capital: f64,
    pub final_capital: f64,
    pub min_log10_capital: f64,
    pub min_capital: f64,
    pub capital_floor: Option<f64>,
    pub cum_loss_base: f64,
    pub cum_loss_enh: f64,
    pub cum_loss_oracle: f64,
    pub changepoint: Option<usize>,
    pub log10_capital_at_changepoint: Option<f64>,
    pub capital_at_changepoint: Option<f64>,
    pub mean_median_enh_after_changepoint: Option<f64>,
    pub max_identity_error: f64,
    pub infinite_losses: bool,
}

/// Output of [`execute_run`].
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub ledger: LossLedger,
    pub summary: RunSummary,
}

/// Runs the experiment described by `cfg` without touching the filesystem
/// except to read a dataset file.
pub fn execute_run(cfg: &ExperimentConfig) -> Result<RunOutcome, CliError> {
    cfg.validate()?;
    let (observations, spec) = cfg.load_dataset()?;
    if observations.is_empty() {
        return Err(CliError::Config("dataset has no observations".into()));
    }
    let base = cfg.base.forecast("base")?;
    let oracle_spec = cfg.oracle.or_else(|| spec.as_ref().map(OracleSpec::from_changepoint));
    let oracle = match oracle_spec {
        Some(o) => o.policy()?,
        None => PiecewiseGaussian { changepoint: usize::MAX, pre: base, post: base },
    };
    let mut martingale = cfg.build_martingale()?;
    let log_base = LogBase::from_base10_flag(cfg.loss_base10);
    let ledger = run_experiment(&observations, &base, martingale.as_mut(), &oracle, log_base)?;

    let changepoint = cfg
        .changepoint
        .or(oracle_spec.map(|o| o.changepoint))
        .filter(|&cp| cp >= 1 && cp <= ledger.per_step.len());
    let at_cp = changepoint.map(|cp| ledger.per_step[cp - 1].log10_capital);
    let after_cp = changepoint.and_then(|cp| {
        let rows = &ledger.per_step[cp..];
        (!rows.is_empty()).then(|| rows.iter().map(|r| r.median_enhanced).sum::<f64>() / rows.len() as f64)
    });
    let final_log10 = ledger.final_log10_capital();
    let min_log10 = ledger.min_log10_capital();
    let summary = RunSummary {
        martingale_kind: cfg.martingale_kind,
        jump_rate: (cfg.martingale_kind == MartingaleKind::Simple).then_some(cfg.jump_rate),
        jump_rates: (cfg.martingale_kind == MartingaleKind::Mean).then(|| cfg.jump_rates.clone()),
        eps_range: cfg.eps_range,
        loss_base10: cfg.loss_base10,
        steps: ledger.per_step.len(),
        final_log10_capital: final_log10,
        final_capital: 10f64.powf(final_log10),
        min_log10_capital: min_log10,
        min_capital: 10f64.powf(min_log10),
        capital_floor: martingale.capital_floor(),
        cum_loss_base: ledger.cum_base,
        cum_loss_enh: ledger.cum_enhanced,
        cum_loss_oracle: ledger.cum_oracle,
        changepoint,
        log10_capital_at_changepoint: at_cp,
        capital_at_changepoint: at_cp.map(|l| 10f64.powf(l)),
        mean_median_enh_after_changepoint: after_cp,
        max_identity_error: ledger.max_identity_error(),
        infinite_losses: ledger.has_infinite_loss(),
    };
    Ok(RunOutcome { ledger, summary })
}

/// Invariants every run must satisfy.
pub fn check_run(summary: &RunSummary) -> Result<(), CliError> {
    // written so that a NaN error also fails
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !summary.infinite_losses && !(summary.max_identity_error <= IDENTITY_TOLERANCE) {
        return Err(CliError::Invariant(format!(
            "loss gap differs from log capital by {:e}",
            summary.max_identity_error
        )));
    }
    if let Some(floor) = summary.capital_floor {
        if summary.min_capital < floor - 1e-12 {
            return Err(CliError::Invariant(format!(
                "capital {} fell below the floor {floor}",
                summary.min_capital
            )));
        }
    }
    Ok(())
}

fn csv_number(x: f64) -> String {
    format_sig17(x)
}

/// Writes the trajectory CSV.
pub fn write_trajectory<W: Write>(ledger: &LossLedger, out: W) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "{CSV_HEADER}")?;
    for r in &ledger.per_step {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.step,
            csv_number(r.y),
            csv_number(r.u),
            csv_number(r.eps_eff),
            csv_number(r.log10_capital),
            csv_number(r.loss_base),
            csv_number(r.loss_enhanced),
            csv_number(r.loss_oracle),
            csv_number(r.median_enhanced),
        )?;
    }
    out.flush()
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn stdout_line(text: &str) -> Result<(), CliError> {
    writeln!(std::io::stdout().lock(), "{text}").map_err(|e| CliError::Io(format!("stdout: {e}")))
}

fn cmd_generate(args: &GenerateArgs) -> Result<(), CliError> {
    let mut spec = ChangepointSpec::default();
    args.spec.apply(&mut spec);
    let values = generate(&spec)?;
    fs::write(&args.output, format_dataset(&spec, &values)).map_err(|e| io_err(&args.output, e))?;
    let mean = |xs: &[f64]| (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64);
    let (pre, post) = values.split_at(spec.n_pre);
    let show = |m: Option<f64>| m.map_or_else(|| "n/a".to_string(), |m| format!("{m:.6}"));
    stdout_line(&format!(
        "wrote {} values to {} (pre mean {}, post mean {})",
        values.len(),
        args.output.display(),
        show(mean(pre)),
        show(mean(post))
    ))
}

fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let cfg = ExperimentConfig::from_args(args)?;
    let outcome = execute_run(&cfg)?;
    if let Some(path) = &cfg.output {
        let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
        write_trajectory(&outcome.ledger, file).map_err(|e| io_err(path, e))?;
    }
    let json = serde_json::to_string_pretty(&outcome.summary).expect("summary serializes");
    if let Some(path) = &cfg.summary {
        fs::write(path, format!("{json}\n")).map_err(|e| io_err(path, e))?;
    }
    stdout_line(&json)?;
    check_run(&outcome.summary)
}

fn cmd_selftest(args: &SelftestArgs) -> Result<(), CliError> {
    let golden = match &args.golden {
        Some(path) => fs::read_to_string(path).map_err(|e| io_err(path, e))?,
        None => GOLDEN_SEED_2021.to_string(),
    };
    let results = run_checks(&golden);
    let mut failed = Vec::new();
    for r in &results {
        stdout_line(&format!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail))?;
        if !r.passed {
            failed.push(r.name);
        }
    }
    stdout_line(&format!("{}/{} checks passed", results.len() - failed.len(), results.len()))?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invariant(format!("failed checks: {}", failed.join(", "))))
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Run(args) => cmd_run(args.as_ref()),
        Command::Selftest(args) => cmd_selftest(args),
    }
}

/// Parses the process arguments, runs, and maps errors to exit codes.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_matches_documented_defaults() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.jump_rate, 0.01);
        assert_eq!(cfg.eps_range, 1.0);
        assert_eq!(cfg.jump_rates, vec![0.001, 0.01, 0.1, 1.0]);
        assert_eq!(cfg.base, GaussianSpec { mean: 0.0, sd: 1.0 });
        assert!(cfg.loss_base10);
        cfg.validate().unwrap();
    }

    #[test]
    fn config_json_accepts_inline_and_path_datasets() {
        let inline: ExperimentConfig =
            serde_json::from_str(r#"{"dataset":{"n_pre":10,"n_post":5},"eps_range":2.0}"#).unwrap();
        assert_eq!(
            inline.dataset,
            DatasetSource::Inline(ChangepointSpec { n_pre: 10, n_post: 5, ..Default::default() })
        );
        assert_eq!(inline.eps_range, 2.0);
        let path: ExperimentConfig = serde_json::from_str(r#"{"dataset":"data.txt","martingale_kind":"mean"}"#).unwrap();
        assert_eq!(path.dataset, DatasetSource::Path("data.txt".into()));
        assert_eq!(path.martingale_kind, MartingaleKind::Mean);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"bogus":1}"#).is_err());
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        let bad_e = ExperimentConfig { eps_range: 2.5, ..Default::default() };
        assert!(matches!(bad_e.validate(), Err(CliError::Config(_))));
        let bad_set = ExperimentConfig {
            martingale_kind: MartingaleKind::Mean,
            jump_rates: vec![0.1, 0.5],
            ..Default::default()
        };
        assert!(bad_set.validate().is_err());
        let bad_base = ExperimentConfig { base: GaussianSpec { mean: 0.0, sd: -1.0 }, ..Default::default() };
        assert!(bad_base.validate().is_err());
    }

    #[test]
    fn oracle_flag_parsing() {
        let o = OracleSpec::parse("1000:0:1:1:1").unwrap();
        assert_eq!(o.changepoint, 1000);
        assert_eq!(o.post, GaussianSpec { mean: 1.0, sd: 1.0 });
        assert!(OracleSpec::parse("1000:0:1").is_err());
        assert!(OracleSpec::parse("x:0:1:1:1").is_err());
    }

    #[test]
    fn summary_agrees_with_ledger() {
        let cfg = ExperimentConfig {
            dataset: DatasetSource::Inline(ChangepointSpec { n_pre: 100, n_post: 100, ..Default::default() }),
            ..Default::default()
        };
        let out = execute_run(&cfg).unwrap();
        let last = out.ledger.per_step.last().unwrap();
        assert_eq!(out.summary.steps, 200);
        assert_eq!(out.summary.final_log10_capital, last.log10_capital);
        assert_eq!(out.summary.changepoint, Some(100));
        assert_eq!(out.summary.log10_capital_at_changepoint, Some(out.ledger.per_step[99].log10_capital));
        check_run(&out.summary).unwrap();
    }

    #[test]
    fn csv_has_fixed_header_and_one_row_per_step() {
        let cfg = ExperimentConfig {
            dataset: DatasetSource::Inline(ChangepointSpec { n_pre: 3, n_post: 2, ..Default::default() }),
            ..Default::default()
        };
        let out = execute_run(&cfg).unwrap();
        let mut buf = Vec::new();
        write_trajectory(&out.ledger, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("1,"));
        assert_eq!(lines[5].split(',').count(), 9);
    }

    #[test]
    fn invariant_check_flags_floor_violation() {
        let cfg = ExperimentConfig {
            dataset: DatasetSource::Inline(ChangepointSpec { n_pre: 10, n_post: 0, ..Default::default() }),
            martingale_kind: MartingaleKind::Mean,
            ..Default::default()
        };
        let mut summary = execute_run(&cfg).unwrap().summary;
        check_run(&summary).unwrap();
        summary.min_capital = 0.1;
        assert!(matches!(check_run(&summary), Err(CliError::Invariant(_))));
        assert_eq!(CliError::Invariant(String::new()).exit_code(), 3);
    }
}
