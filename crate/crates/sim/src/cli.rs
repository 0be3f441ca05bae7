//! Command-line front end.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use screenfail_core::{
    marginal_moments, CovarianceStructure, RegressionModel, RetentionRule,
};

use crate::error::HarnessError;
use crate::harness::{
    replication_dataset, run_experiment, DimensionRule, ExperimentConfig, ModelSpec, DEFAULT_SEED,
};
use crate::report::{save_report, write_dataset_csv, write_report_csv};
use crate::validate::run_checks;

/// Environment variable that overrides the default `--seed`.
pub const SEED_ENV: &str = "SCREENFAIL_SEED";

#[derive(Parser, Debug, Clone, PartialEq)]
#[command(name = "screenfail", version, about = "Monte Carlo study of marginal-correlation screening failures")]
pub struct CliInvocation {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum Command {
    /// AR(1) design in which x1 is marginally uncorrelated with y.
    Example1(Example1Args),
    /// Equicorrelated design in which x1..x4 are dominated by null predictors.
    Example2(Example2Args),
    /// User-specified sparse model.
    Custom(CustomArgs),
    /// Print population Cov(y, x_i) and Cor(y, x_i).
    Moments(MomentsArgs),
    /// Run the built-in invariant checks.
    Validate,
}

/// `linear:<c>`, `square` or `fixed:<p>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PRule(pub DimensionRule);

impl FromStr for PRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let positive = |v: &str| match v.parse::<usize>() {
            Ok(x) if x > 0 => Ok(x),
            _ => Err(format!("expected a positive integer in p-rule, got `{v}`")),
        };
        match s.split_once(':') {
            None if s == "square" => Ok(Self(DimensionRule::Square)),
            Some(("linear", c)) => Ok(Self(DimensionRule::Linear(positive(c)?))),
            Some(("fixed", p)) => Ok(Self(DimensionRule::Fixed(positive(p)?))),
            _ => Err(format!("unknown p-rule `{s}` (expected linear:<c>, square or fixed:<p>)")),
        }
    }
}

impl fmt::Display for PRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            DimensionRule::Linear(c) => write!(f, "linear:{c}"),
            DimensionRule::Square => f.write_str("square"),
            DimensionRule::Fixed(p) => write!(f, "fixed:{p}"),
        }
    }
}

/// One-based `index:value` coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaTerm {
    pub index: usize,
    pub value: f64,
}

impl FromStr for BetaTerm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (i, v) = s.split_once(':').ok_or_else(|| format!("expected <index>:<value>, got `{s}`"))?;
        let index = i.parse::<usize>().ok().filter(|&i| i >= 1).ok_or_else(|| format!("bad one-based index `{i}`"))?;
        let value = v.parse::<f64>().map_err(|_| format!("bad coefficient value `{v}`"))?;
        Ok(Self { index, value })
    }
}

impl fmt::Display for BetaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.index, self.value)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum RetentionKind {
    /// Keep the n largest |w|.
    TopN,
    /// Keep floor(n / ln n).
    NOverLogN,
    /// Keep floor(n^(1-theta)); needs --theta.
    Power,
    /// Keep a fixed number; needs --k.
    Fixed,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureKind {
    Ar1,
    Equicorrelated,
    Identity,
}

/// Flags shared by the experiment subcommands.
#[derive(Args, Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Monte Carlo replications per sample size.
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = RetentionKind::TopN)]
    pub retention: RetentionKind,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Report path; `-` writes the CSV to stdout without a sidecar.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Also write replication 1 of the first sample size as `y,x1,...,xp`.
    #[arg(long)]
    pub dump_dataset: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct Example1Args {
    #[arg(long, value_delimiter = ',', default_values_t = [50usize, 200, 500, 1000])]
    pub n: Vec<usize>,
    #[arg(long = "p-rule", default_value = "linear:2")]
    pub p_rule: PRule,
    #[arg(long, default_value_t = 0.25, allow_negative_numbers = true)]
    pub rho: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sigma: f64,
    #[command(flatten)]
    pub run: RunOptions,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct Example2Args {
    #[arg(long, value_delimiter = ',', default_values_t = [100usize, 500, 1000])]
    pub n: Vec<usize>,
    #[arg(long = "p-rule", default_value = "linear:2")]
    pub p_rule: PRule,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub rho: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub important_cov: f64,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub unimportant_cov: f64,
    #[command(flatten)]
    pub run: RunOptions,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct CustomArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [100usize])]
    pub n: Vec<usize>,
    #[arg(long = "p-rule", default_value = "linear:2")]
    pub p_rule: PRule,
    #[arg(long, value_enum)]
    pub structure: StructureKind,
    /// Required for ar1 and equicorrelated.
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    /// Comma-separated one-based `index:value` pairs.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub beta: Vec<BetaTerm>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub intercept: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sigma: f64,
    /// One-based variables to track (default: the support of --beta).
    #[arg(long, value_delimiter = ',')]
    pub track: Vec<usize>,
    #[command(flatten)]
    pub run: RunOptions,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct MomentsArgs {
    /// Which construction: 1 (AR(1)) or 2 (equicorrelation).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub example: u8,
    /// Defaults to 0.25 for example 1 and 0.1 for example 2.
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub important_cov: f64,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub unimportant_cov: f64,
    /// Number of predictors to print.
    #[arg(long, default_value_t = 10)]
    pub p: usize,
}

fn join<T: fmt::Display>(values: &[T]) -> String {
    values.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl RunOptions {
    fn push_args(&self, args: &mut Vec<String>) {
        let mut push = |k: &str, v: String| {
            args.push(k.to_string());
            args.push(v);
        };
        push("--reps", self.reps.to_string());
        push("--seed", self.seed.to_string());
        push("--retention", self.retention.to_possible_value().unwrap().get_name().to_string());
        if let Some(t) = self.theta {
            push("--theta", t.to_string());
        }
        if let Some(k) = self.k {
            push("--k", k.to_string());
        }
        if let Some(o) = &self.output {
            push("--output", o.display().to_string());
        }
        if let Some(w) = self.workers {
            push("--workers", w.to_string());
        }
        push("--format", self.format.to_possible_value().unwrap().get_name().to_string());
        if let Some(d) = &self.dump_dataset {
            push("--dump-dataset", d.display().to_string());
        }
    }

    fn retention_rule(&self) -> Result<RetentionRule, String> {
        match self.retention {
            RetentionKind::TopN => Ok(RetentionRule::TopN),
            RetentionKind::NOverLogN => Ok(RetentionRule::NOverLogN),
            RetentionKind::Power => self.theta.map(RetentionRule::Power).ok_or_else(|| "--retention power needs --theta".into()),
            RetentionKind::Fixed => self.k.map(RetentionRule::FixedK).ok_or_else(|| "--retention fixed needs --k".into()),
        }
    }
}

impl CliInvocation {
    /// Arguments (without the program name) that parse back to `self`.
    pub fn to_args(&self) -> Vec<String> {
        let mut args = Vec::new();
        let flag = |args: &mut Vec<String>, k: &str, v: String| {
            args.push(k.to_string());
            args.push(v);
        };
        match &self.command {
            Command::Example1(a) => {
                args.push("example1".into());
                flag(&mut args, "--n", join(&a.n));
                flag(&mut args, "--p-rule", a.p_rule.to_string());
                flag(&mut args, "--rho", a.rho.to_string());
                flag(&mut args, "--a", a.a.to_string());
                flag(&mut args, "--sigma", a.sigma.to_string());
                a.run.push_args(&mut args);
            }
            Command::Example2(a) => {
                args.push("example2".into());
                flag(&mut args, "--n", join(&a.n));
                flag(&mut args, "--p-rule", a.p_rule.to_string());
                flag(&mut args, "--rho", a.rho.to_string());
                flag(&mut args, "--sigma", a.sigma.to_string());
                flag(&mut args, "--important-cov", a.important_cov.to_string());
                flag(&mut args, "--unimportant-cov", a.unimportant_cov.to_string());
                a.run.push_args(&mut args);
            }
            Command::Custom(a) => {
                args.push("custom".into());
                flag(&mut args, "--n", join(&a.n));
                flag(&mut args, "--p-rule", a.p_rule.to_string());
                flag(&mut args, "--structure", a.structure.to_possible_value().unwrap().get_name().to_string());
                if let Some(r) = a.rho {
                    flag(&mut args, "--rho", r.to_string());
                }
                flag(&mut args, "--beta", join(&a.beta));
                flag(&mut args, "--intercept", a.intercept.to_string());
                flag(&mut args, "--sigma", a.sigma.to_string());
                if !a.track.is_empty() {
                    flag(&mut args, "--track", join(&a.track));
                }
                a.run.push_args(&mut args);
            }
            Command::Moments(a) => {
                args.push("moments".into());
                flag(&mut args, "--example", a.example.to_string());
                if let Some(r) = a.rho {
                    flag(&mut args, "--rho", r.to_string());
                }
                flag(&mut args, "--a", a.a.to_string());
                flag(&mut args, "--sigma", a.sigma.to_string());
                flag(&mut args, "--important-cov", a.important_cov.to_string());
                flag(&mut args, "--unimportant-cov", a.unimportant_cov.to_string());
                flag(&mut args, "--p", a.p.to_string());
            }
            Command::Validate => args.push("validate".into()),
        }
        args
    }

    /// `screenfail <args>` as one line.
    pub fn command_line(&self) -> String {
        std::iter::once("screenfail".to_string()).chain(self.to_args()).collect::<Vec<_>>().join(" ")
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(_) | HarnessError::Model { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn experiment_config(invocation: &CliInvocation) -> Result<(ExperimentConfig, &RunOptions), Failure> {
    let (model, n, p_rule, run, track): (ModelSpec, &Vec<usize>, PRule, &RunOptions, Option<Vec<usize>>) =
        match &invocation.command {
            Command::Example1(a) => {
                (ModelSpec::Example1 { rho: a.rho, a: a.a, sigma: a.sigma }, &a.n, a.p_rule, &a.run, None)
            }
            Command::Example2(a) => (
                ModelSpec::Example2 {
                    rho: a.rho,
                    sigma: a.sigma,
                    important_cov: a.important_cov,
                    unimportant_cov: a.unimportant_cov,
                },
                &a.n,
                a.p_rule,
                &a.run,
                None,
            ),
            Command::Custom(a) => {
                let p = a.beta.iter().map(|b| b.index).max().unwrap_or(1);
                let usage = |e: screenfail_core::Error| Failure::Usage(e.to_string());
                let structure = match (a.structure, a.rho) {
                    (StructureKind::Ar1, Some(rho)) => CovarianceStructure::ar1(rho, p).map_err(usage)?,
                    (StructureKind::Equicorrelated, Some(rho)) => {
                        CovarianceStructure::equicorrelated(rho, p).map_err(usage)?
                    }
                    (StructureKind::Identity, _) => CovarianceStructure::identity(p).map_err(usage)?,
                    (_, None) => return Err(Failure::Usage("--rho is required for this structure".into())),
                };
                let model = RegressionModel::new(a.intercept, a.beta.iter().map(|b| (b.index - 1, b.value)), a.sigma, structure)
                    .map_err(usage)?;
                let track = if a.track.is_empty() {
                    None
                } else {
                    if a.track.contains(&0) {
                        return Err(Failure::Usage("--track indices are one-based".into()));
                    }
                    Some(a.track.iter().map(|t| t - 1).collect())
                };
                (ModelSpec::Custom(model), &a.n, a.p_rule, &a.run, track)
            }
            _ => unreachable!("not an experiment subcommand"),
        };
    let mut config = ExperimentConfig::new(model, n.clone())
        .with_dimension(p_rule.0)
        .with_replications(run.reps)
        .with_seed(run.seed)
        .with_retention(run.retention_rule().map_err(Failure::Usage)?);
    if let Some(t) = track {
        config = config.with_tracked(t);
    }
    Ok((config, run))
}

fn run_experiment_command(invocation: &CliInvocation, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let (config, run) = experiment_config(invocation)?;
    for warning in config.validate()? {
        writeln!(err, "warning: {warning}")?;
    }
    if let Some(path) = &run.dump_dataset {
        let data = replication_dataset(&config, 0, 0)?;
        let file = std::fs::File::create(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
        write_dataset_csv(&data, std::io::BufWriter::new(file))?;
    }
    let workers = run
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    if workers == 0 {
        return Err(Failure::Usage("--workers must be positive".into()));
    }
    let report = run_experiment(&config, workers)?;
    match run.output.as_deref() {
        Some(p) if p.as_os_str() == "-" => write_report_csv(&report, &mut *out)?,
        other => {
            let path = other.map(PathBuf::from).unwrap_or_else(|| PathBuf::from(format!("{}.csv", report.example)));
            let meta = save_report(&report, &path, Some(&invocation.command_line()))
                .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
            for row in &report.rows {
                writeln!(
                    out,
                    "n={:<6} p={:<8} x{:<4} failed {:>5}/{:<5} = {:.3} (se {:.3})",
                    row.n, row.p, row.variable + 1, row.failure_count, row.replications, row.failure_proportion, row.mc_se
                )?;
            }
            writeln!(out, "wrote {} and {}", path.display(), meta.display())?;
        }
    }
    Ok(())
}

/// Rounds away floating-point dust so exact zeros print as `0`.
fn tidy(v: f64) -> f64 {
    let r = (v * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn run_moments(args: &MomentsArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let spec = match args.example {
        1 => ModelSpec::Example1 { rho: args.rho.unwrap_or(0.25), a: args.a, sigma: args.sigma },
        _ => ModelSpec::Example2 {
            rho: args.rho.unwrap_or(0.1),
            sigma: args.sigma,
            important_cov: args.important_cov,
            unimportant_cov: args.unimportant_cov,
        },
    };
    let model = spec.build(args.p).map_err(|e| Failure::Usage(e.to_string()))?;
    let mm = marginal_moments(&model);
    let beta: Vec<String> = model.coefficients().iter().map(|&(i, b)| format!("beta{}={}", i + 1, tidy(b))).collect();
    writeln!(out, "{} p={} {} sigma={} Var(y)={}", spec.label(), args.p, beta.join(" "), model.noise_sd(), tidy(mm.var_y))?;
    for i in 0..args.p {
        writeln!(
            out,
            "Cov(y,x{i1}) = {}\tCor(y,x{i1}) = {}",
            tidy(mm.cov_y_x[i]),
            tidy(mm.cor_y_x[i]),
            i1 = i + 1
        )?;
    }
    Ok(())
}

fn run_validate(out: &mut dyn Write) -> Result<(), Failure> {
    let checks = run_checks();
    let mut failed = 0;
    for c in &checks {
        writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        failed += usize::from(!c.passed);
    }
    if failed > 0 {
        return Err(Failure::Runtime(format!("{failed} of {} checks failed", checks.len())));
    }
    Ok(())
}

/// Parses `argv` (including the program name) and runs it, returning the
/// process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let invocation = match CliInvocation::try_parse_from(argv) {
        Ok(inv) => inv,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    let result = match &invocation.command {
        Command::Moments(args) => run_moments(args, out),
        Command::Validate => run_validate(out),
        _ => run_experiment_command(&invocation, out, err),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {}", msg.replace('\n', " "));
            2
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "error: {}", msg.replace('\n', " "));
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_rule_parsing() {
        assert_eq!("linear:2".parse::<PRule>().unwrap(), PRule(DimensionRule::Linear(2)));
        assert_eq!("square".parse::<PRule>().unwrap(), PRule(DimensionRule::Square));
        assert_eq!("fixed:40".parse::<PRule>().unwrap(), PRule(DimensionRule::Fixed(40)));
        assert!("linear:0".parse::<PRule>().is_err());
        assert!("cube".parse::<PRule>().is_err());
        assert_eq!(PRule(DimensionRule::Fixed(40)).to_string(), "fixed:40");
    }

    #[test]
    fn beta_term_parsing() {
        assert_eq!("3:-2.5".parse::<BetaTerm>().unwrap(), BetaTerm { index: 3, value: -2.5 });
        assert!("0:1".parse::<BetaTerm>().is_err());
        assert!("1".parse::<BetaTerm>().is_err());
    }

    #[test]
    fn defaults_follow_presets() {
        let inv = CliInvocation::try_parse_from(["screenfail", "example1", "--seed", "1"]).unwrap();
        let Command::Example1(a) = inv.command else { panic!() };
        assert_eq!(a.n, vec![50, 200, 500, 1000]);
        assert_eq!((a.rho, a.a, a.sigma), (0.25, 3.0, 1.0));
        assert_eq!(a.p_rule, PRule(DimensionRule::Linear(2)));
        assert_eq!(a.run.reps, 100);
        let inv = CliInvocation::try_parse_from(["screenfail", "example2", "--seed", "1"]).unwrap();
        let Command::Example2(a) = inv.command else { panic!() };
        assert_eq!((a.rho, a.sigma, a.important_cov, a.unimportant_cov), (0.1, 1.0, 1.0, 4.0));
    }

    #[test]
    fn round_trip_through_command_line() {
        for argv in [
            vec!["screenfail", "example1", "--n", "50,200", "--reps", "10", "--seed", "3", "--workers", "2", "--output", "x.csv"],
            vec!["screenfail", "example2", "--p-rule", "square", "--n", "25", "--retention", "power", "--theta", "0.5", "--seed", "1"],
            vec!["screenfail", "custom", "--structure", "ar1", "--rho", "0.3", "--beta", "1:10,4:-2", "--track", "1", "--seed", "9"],
            vec!["screenfail", "moments", "--example", "2", "--p", "12"],
            vec!["screenfail", "validate"],
        ] {
            let inv = CliInvocation::try_parse_from(&argv).unwrap();
            let line = inv.command_line();
            let reparsed = CliInvocation::try_parse_from(line.split_whitespace()).unwrap();
            assert_eq!(inv, reparsed, "{line}");
        }
    }
}
