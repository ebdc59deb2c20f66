//! Command-line front end: list, run and sweep checks.
//!
//! [`main_with`] is the whole program; the `lpverify` binary only forwards
//! `std::env::args` and the standard streams to it.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::absnorm::AbsoluteNorm;
use crate::checks::{registry, run_check, CheckReport, CheckSpec, DEFAULT_QUAD_TOL};
use crate::embed::{case1_lhs, case1_reference, case2_identity, EmbeddingModel, GaussianProcessSpec};
use crate::stochastic::SampleStream;
use crate::Error;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Sample budget of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Profile {
    /// At most 10⁵ samples per estimate.
    Quick,
    /// At most 10⁷ samples per estimate.
    #[default]
    Full,
}

impl Profile {
    pub fn max_samples(self) -> usize {
        match self {
            Profile::Quick => 100_000,
            Profile::Full => 10_000_000,
        }
    }
}

/// A batch of checks and how to run it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub checks: Vec<CheckSpec>,
    pub jobs: usize,
    pub out_path: Option<PathBuf>,
    pub profile: Profile,
}

impl RunConfig {
    /// Runs every check on a pool of `jobs` workers. Reports come back sorted
    /// by name whatever the completion order.
    pub fn run(&self) -> crate::Result<Vec<CheckReport>> {
        let cap = self.profile.max_samples();
        let specs: Vec<CheckSpec> = self
            .checks
            .iter()
            .cloned()
            .map(|mut s| {
                s.samples = s.samples.min(cap);
                s
            })
            .collect();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs.max(1))
            .build()
            .map_err(|e| Error::Param(format!("cannot start {} workers: {e}", self.jobs)))?;
        let mut reports = pool.install(|| specs.par_iter().map(run_check).collect::<crate::Result<Vec<_>>>())?;
        reports.sort_by(|a, b| a.name.cmp(&b.name));
        Ok(reports)
    }
}

#[derive(Debug, Parser)]
#[command(name = "lpverify", version, about = "Run the numerical verification checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags that override every check's own configuration.
#[derive(Debug, Args)]
pub struct GlobalArgs {
    #[arg(long, global = true, env = "LPVERIFY_SEED")]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub tol_sigma: Option<f64>,
    #[arg(long, global = true)]
    pub quad_tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON array of check specifications.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write `runtime_ms` as null so that reports are byte-reproducible.
    #[arg(long, global = true)]
    pub omit_timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the registered checks and their parameters.
    List,
    /// Run the named checks.
    Run {
        #[arg(long = "check")]
        checks: Vec<String>,
        #[arg(long, value_enum, default_value_t)]
        profile: Profile,
    },
    /// Run every registered check.
    All {
        #[arg(long, value_enum, default_value_t)]
        profile: Profile,
    },
    /// Write a CSV table.
    Sweep {
        #[command(subcommand)]
        table: Sweep,
    },
}

#[derive(Debug, Subcommand)]
pub enum Sweep {
    /// `r, ratio` with ratio = |M_{p,N}(r) / M_{p,2}(r)|.
    SecondDerivative {
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        p: f64,
        #[arg(long, default_value = "lq:3")]
        norm: String,
        #[arg(long, value_parser = parse_points, default_value = "1.5,1.9,1.99,1.999")]
        r: Points,
    },
    /// `t, lhs, rhs, stderr` for the standard embedding.
    Case1 {
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 1.5)]
        q: f64,
        #[arg(long, default_value_t = 2.0)]
        r: f64,
        #[arg(long, value_parser = parse_points, default_value = "0.1,0.5,1.0,2.0,5.0,10.0")]
        t: Points,
    },
    /// `t, lhs, rhs, stderr` for the Gaussian embedding; stderr is combined.
    Case2 {
        #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
        p: f64,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1.5)]
        q: f64,
        #[arg(long, default_value_t = 2.0)]
        r: f64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, value_parser = parse_points, default_value = "0.5,1.0,2.0")]
        t: Points,
    },
}

/// A comma-separated list of numbers; the empty string is the empty list.
#[derive(Debug, Clone, PartialEq)]
pub struct Points(pub Vec<f64>);

fn parse_points(text: &str) -> Result<Points, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| format!("{s:?}: {e}")))
        .collect::<Result<_, _>>()
        .map(Points)
}

/// Runs the program on `args` (including the program name) and returns the
/// exit code. Reports and tables go to `stdout` unless `--out` is given;
/// `stderr` only receives human-readable summaries.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            if e.downcast_ref::<Error>().is_some_and(|e| matches!(e, Error::Param(_))) {
                EXIT_USAGE
            } else {
                EXIT_FAIL
            }
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> anyhow::Result<i32> {
    match &cli.command {
        Command::List => {
            write!(stdout, "{}", cmd_list())?;
            Ok(EXIT_PASS)
        }
        Command::Run { checks, profile } => {
            let mut specs = config_specs(&cli.global)?;
            specs.extend(checks.iter().map(CheckSpec::new));
            if specs.is_empty() {
                return Err(Error::Param("nothing to run: pass --check or --config".into()).into());
            }
            cmd_run(&cli.global, specs, *profile, stdout, stderr)
        }
        Command::All { profile } => {
            let given = config_specs(&cli.global)?;
            let mut specs: Vec<CheckSpec> = registry()
                .iter()
                .map(|c| given.iter().find(|s| s.name == c.name).cloned().unwrap_or_else(|| CheckSpec::new(c.name)))
                .collect();
            specs.extend(given.into_iter().filter(|s| registry().iter().all(|c| c.name != s.name)));
            cmd_run(&cli.global, specs, *profile, stdout, stderr)
        }
        Command::Sweep { table } => {
            let csv = cmd_sweep(table, &cli.global)?;
            emit(&cli.global, csv.as_bytes(), stdout)?;
            Ok(EXIT_PASS)
        }
    }
}

/// Registered checks with their parameter schemas.
pub fn cmd_list() -> String {
    let mut out = String::new();
    for info in registry() {
        out.push_str(&format!("{}\n    {}\n", info.name, info.summary));
        for p in (info.params)() {
            out.push_str(&format!("    --param {} = {}  ({})\n", p.key, p.default, p.doc));
        }
    }
    out
}

fn config_specs(global: &GlobalArgs) -> anyhow::Result<Vec<CheckSpec>> {
    let Some(path) = &global.config else { return Ok(Vec::new()) };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| Error::Param(format!("{}: {e}", path.display())).into())
}

fn apply_overrides(global: &GlobalArgs, mut spec: CheckSpec) -> CheckSpec {
    if let Some(seed) = global.seed {
        spec.seed = seed;
    }
    if let Some(n) = global.samples {
        spec.samples = n;
    }
    if let Some(t) = global.tol_sigma {
        spec.tol_sigma = t;
    }
    if let Some(t) = global.quad_tol {
        spec.quad_tol = t;
    }
    spec
}

fn cmd_run(
    global: &GlobalArgs,
    specs: Vec<CheckSpec>,
    profile: Profile,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> anyhow::Result<i32> {
    let config = RunConfig {
        checks: specs.into_iter().map(|s| apply_overrides(global, s)).collect(),
        jobs: global.jobs,
        out_path: global.out.clone(),
        profile,
    };
    let mut reports = config.run()?;
    if global.omit_timing {
        reports.iter_mut().for_each(|r| r.runtime_ms = None);
    }
    for r in &reports {
        writeln!(stderr, "{:<28} {:?}  max {:.2}σ{}", r.name, r.status, r.max_discrepancy_sigma, match &r.cause {
            Some(c) => format!("  ({c})"),
            None => String::new(),
        })?;
    }
    let mut json = serde_json::to_string_pretty(&reports)?;
    json.push('\n');
    emit(global, json.as_bytes(), stdout)?;
    let failed = reports.iter().filter(|r| !r.passed() && r.status != crate::checks::Status::Skipped).count();
    writeln!(stderr, "{} checks, {failed} failed", reports.len())?;
    Ok(if failed == 0 { EXIT_PASS } else { EXIT_FAIL })
}

fn emit(global: &GlobalArgs, bytes: &[u8], stdout: &mut dyn Write) -> anyhow::Result<()> {
    match &global.out {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => stdout.write_all(bytes).map_err(Into::into),
    }
}

/// The CSV text of a sweep, header included.
pub fn cmd_sweep(table: &Sweep, global: &GlobalArgs) -> crate::Result<String> {
    let seed = global.seed.unwrap_or(0);
    let samples = global.samples.unwrap_or(crate::checks::DEFAULT_SAMPLES);
    let tol = global.quad_tol.unwrap_or(DEFAULT_QUAD_TOL);
    let mut out = String::new();
    match table {
        Sweep::SecondDerivative { p, norm, r } => {
            let norm = AbsoluteNorm::parse(norm)?;
            out.push_str("r,ratio\n");
            for (r, ratio, _) in crate::checks::second_derivative_sweep(&norm, *p, &r.0, tol)? {
                out.push_str(&format!("{r},{ratio}\n"));
            }
        }
        Sweep::Case1 { p, q, r, t } => {
            let stream = SampleStream::new(seed).named("sweep case1");
            out.push_str("t,lhs,rhs,stderr\n");
            for &t in &t.0 {
                let lhs = case1_lhs(*p, *q, *r, t, samples, &stream.named(&format!("t = {t}")))?;
                out.push_str(&format!("{t},{},{},{}\n", lhs.mean.re, case1_reference(*p, *r, t), lhs.stderr));
            }
        }
        Sweep::Case2 { p, m, q, r, n, t } => {
            let model = EmbeddingModel::case2(*p, *m, *q, *r, *n)?;
            let spec = GaussianProcessSpec::identity(m + n)?;
            let stream = SampleStream::new(seed).named("sweep case2");
            out.push_str("t,lhs,rhs,stderr\n");
            for &t in &t.0 {
                let (lhs, rhs) = case2_identity(&model, &spec, t, samples, &stream.named(&format!("t = {t}")))?;
                let se = lhs.stderr.hypot(rhs.stderr);
                out.push_str(&format!("{t},{},{},{se}\n", lhs.mean.re, rhs.mean.re));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = main_with(std::iter::once("lpverify").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn list_names_every_check() {
        let (code, out, _) = run(&["list"]);
        assert_eq!(code, 0);
        assert!(out.contains("check-mellinh") && out.contains("check-main-example-neg"));
        assert_eq!(out.lines().filter(|l| l.starts_with("check-")).count(), registry().len());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(&["run", "--check", "check-duplication", "--seed", "0"]).0, 0);
        assert_eq!(run(&["run", "--check", "check-nope"]).0, 2);
        assert_eq!(run(&["run"]).0, 2);
        assert_eq!(run(&["frobnicate"]).0, 2);
        // samples = 0 fails inside the check
        assert_eq!(run(&["run", "--check", "check-moment-samplers", "--samples", "0"]).0, 1);
    }

    #[test]
    fn report_goes_to_stdout_and_summary_to_stderr() {
        let (_, out, err) = run(&["run", "--check", "check-symmetrize", "--omit-timing"]);
        let reports: Vec<CheckReport> = serde_json::from_str(&out).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].runtime_ms, None);
        assert!(err.contains("check-symmetrize") && !err.contains('{'));
    }

    #[test]
    fn profile_caps_samples() {
        let config = RunConfig {
            checks: vec![CheckSpec::new("check-duplication").with_samples(10_000_000_000)],
            jobs: 2,
            out_path: None,
            profile: Profile::Quick,
        };
        assert_eq!(config.run().unwrap()[0].samples, 100_000);
    }

    #[test]
    fn second_derivative_sweep_decreases() {
        let (code, out, _) = run(&["sweep", "second-derivative"]);
        assert_eq!(code, 0);
        let ratios: Vec<f64> = out.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
        assert_eq!(ratios.len(), 4);
        assert!(ratios.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let (code, out, _) = run(&["sweep", "case1", "--t="]);
        assert_eq!(code, 0);
        assert_eq!(out, "t,lhs,rhs,stderr\n");
    }
}
