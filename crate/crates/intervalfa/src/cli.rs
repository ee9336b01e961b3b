//! Command-line front end: ingestion, pipeline orchestration, file outputs.
//!
//! Exit codes: 0 success, 2 input error, 3 numeric failure, 4 non-convergence
//! (results are still written in full before exiting with 4).

use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::error::Result;
use crate::factor::{eigendecompose, extract_paf, extract_pcf, kaiser_count, Extraction};
use crate::interval::{Dataset, Model};
use crate::io::{read_csv, write_csv, write_loadings_csv, write_scores_csv};
use crate::plot::factor_plane_svg;
use crate::report::{
    ConfigEcho, DatasetInfo, FitReport, RunReport, ScoresReport, SummaryReport,
};
use crate::scores::{estimate_anderson_rubin, estimate_bartlett, OptConfig, ScoreMethod};
use crate::stats::{summarize, CovDef};
use crate::synth::{case_spec, generate_dataset, ModePolicy, SynthConfig};

#[derive(Parser)]
#[command(
    name = "intervalfa",
    version,
    about = "Factor analysis for interval-valued data"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Symbolic means, variances, covariances and correlations
    Stats(StatsArgs),
    /// Factor extraction on the symbolic correlation matrix
    Fit(FitArgs),
    /// Factor extraction plus interval-valued factor scores
    Scores(ScoresArgs),
    /// Synthetic benchmark dataset generation plus a fit of it
    Synth(SynthArgs),
}

/// `--factors auto` or an explicit count.
#[derive(Clone, Copy, Debug)]
enum FactorsArg {
    Auto,
    Fixed(usize),
}

impl FromStr for FactorsArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            return Ok(FactorsArg::Auto);
        }
        s.parse::<usize>()
            .map(FactorsArg::Fixed)
            .map_err(|_| format!("expected \"auto\" or a positive integer, got {s:?}"))
    }
}

impl std::fmt::Display for FactorsArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FactorsArg::Auto => write!(f, "auto"),
            FactorsArg::Fixed(k) => write!(f, "{k}"),
        }
    }
}

/// `--scores none|bartlett|anderson-rubin`.
#[derive(Clone, Copy, Debug)]
struct ScoresArg(Option<ScoreMethod>);

impl FromStr for ScoresArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "none" {
            return Ok(ScoresArg(None));
        }
        ScoreMethod::from_str(s).map(|m| ScoresArg(Some(m))).map_err(|e| e.to_string())
    }
}

impl ScoresArg {
    fn as_str(&self) -> &'static str {
        match self.0 {
            None => "none",
            Some(m) => m.as_str(),
        }
    }
}

fn parse_model(s: &str) -> std::result::Result<Model, String> {
    Model::from_str(s).map_err(|e| e.to_string())
}

fn parse_covdef(s: &str) -> std::result::Result<CovDef, String> {
    CovDef::from_str(s).map_err(|e| e.to_string())
}

fn parse_extraction(s: &str) -> std::result::Result<Extraction, String> {
    Extraction::from_str(s).map_err(|e| e.to_string())
}

#[derive(Args)]
struct CommonArgs {
    /// Within-interval model: uniform, symtri or tri
    #[arg(long, value_parser = parse_model, default_value = "uniform")]
    model: Model,
    /// Covariance definition: cov1, cov2 or cov3
    #[arg(long, value_parser = parse_covdef, default_value = "cov3")]
    covdef: CovDef,
    /// Output directory; created if missing
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct FitFlags {
    /// Extraction method: pcf or paf
    #[arg(long, value_parser = parse_extraction, default_value = "pcf")]
    extract: Extraction,
    /// Number of factors: auto (eigenvalues above one) or an explicit count
    #[arg(long, default_value = "auto")]
    factors: FactorsArg,
    /// Score estimator: none, bartlett or anderson-rubin
    #[arg(long, default_value = "none")]
    scores: ScoresArg,
}

#[derive(Args)]
struct StatsArgs {
    /// Input CSV
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    fit: FitFlags,
    /// Seed for score-estimation restarts
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ScoresArgs {
    /// Input CSV
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
    /// Extraction method: pcf or paf
    #[arg(long, value_parser = parse_extraction, default_value = "pcf")]
    extract: Extraction,
    /// Number of factors: auto (eigenvalues above one) or an explicit count
    #[arg(long, default_value = "auto")]
    factors: FactorsArg,
    /// Score estimator: bartlett or anderson-rubin
    #[arg(long, value_parser = ScoreMethod::from_str, default_value = "bartlett")]
    scores: ScoreMethod,
    /// Seed for score-estimation restarts
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SynthArgs {
    /// Benchmark case, 1 through 6
    #[arg(long)]
    case: usize,
    /// Number of units
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Generator seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    fit: FitFlags,
}

/// Parses real process arguments and runs; returns the process exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

/// Testable entry point.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with exit code 0.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

struct Job {
    config: ConfigEcho,
    data: Dataset,
    model: Model,
    covdef: CovDef,
    /// None for the stats command.
    extraction: Option<(Extraction, FactorsArg)>,
    scores: Option<ScoreMethod>,
    seed: u64,
    out: PathBuf,
    /// Extra files to write alongside the report, e.g. the synthetic dataset.
    emit_dataset: bool,
}

fn dispatch(cli: Cli) -> Result<i32> {
    let job = match cli.command {
        Command::Stats(a) => {
            let data = read_csv(&a.input)?;
            Job {
                config: ConfigEcho {
                    command: "stats".into(),
                    input: Some(a.input.display().to_string()),
                    model: a.common.model.as_str().into(),
                    covdef: a.common.covdef.as_str().into(),
                    extract: None,
                    factors: None,
                    scores: "none".into(),
                    seed: None,
                    case: None,
                    n: None,
                    out: a.common.out.display().to_string(),
                },
                data,
                model: a.common.model,
                covdef: a.common.covdef,
                extraction: None,
                scores: None,
                seed: 0,
                out: a.common.out,
                emit_dataset: false,
            }
        }
        Command::Fit(a) => {
            let data = read_csv(&a.input)?;
            Job {
                config: ConfigEcho {
                    command: "fit".into(),
                    input: Some(a.input.display().to_string()),
                    model: a.common.model.as_str().into(),
                    covdef: a.common.covdef.as_str().into(),
                    extract: Some(a.fit.extract.as_str().into()),
                    factors: Some(a.fit.factors.to_string()),
                    scores: a.fit.scores.as_str().into(),
                    seed: Some(a.seed),
                    case: None,
                    n: None,
                    out: a.common.out.display().to_string(),
                },
                data,
                model: a.common.model,
                covdef: a.common.covdef,
                extraction: Some((a.fit.extract, a.fit.factors)),
                scores: a.fit.scores.0,
                seed: a.seed,
                out: a.common.out,
                emit_dataset: false,
            }
        }
        Command::Scores(a) => {
            let data = read_csv(&a.input)?;
            Job {
                config: ConfigEcho {
                    command: "scores".into(),
                    input: Some(a.input.display().to_string()),
                    model: a.common.model.as_str().into(),
                    covdef: a.common.covdef.as_str().into(),
                    extract: Some(a.extract.as_str().into()),
                    factors: Some(a.factors.to_string()),
                    scores: a.scores.as_str().into(),
                    seed: Some(a.seed),
                    case: None,
                    n: None,
                    out: a.common.out.display().to_string(),
                },
                data,
                model: a.common.model,
                covdef: a.common.covdef,
                extraction: Some((a.extract, a.factors)),
                scores: Some(a.scores),
                seed: a.seed,
                out: a.common.out,
                emit_dataset: false,
            }
        }
        Command::Synth(a) => {
            let spec = case_spec(a.case)?;
            let mode_policy = match a.common.model {
                Model::Triangular => ModePolicy::RandomInInterval,
                _ => ModePolicy::None,
            };
            let cfg = SynthConfig {
                n: a.n,
                centers: spec.clone(),
                ranges: spec,
                mode_policy,
                seed: a.seed,
            };
            let data = generate_dataset(&cfg)?;
            Job {
                config: ConfigEcho {
                    command: "synth".into(),
                    input: None,
                    model: a.common.model.as_str().into(),
                    covdef: a.common.covdef.as_str().into(),
                    extract: Some(a.fit.extract.as_str().into()),
                    factors: Some(a.fit.factors.to_string()),
                    scores: a.fit.scores.as_str().into(),
                    seed: Some(a.seed),
                    case: Some(a.case),
                    n: Some(a.n),
                    out: a.common.out.display().to_string(),
                },
                data,
                model: a.common.model,
                covdef: a.common.covdef,
                extraction: Some((a.fit.extract, a.fit.factors)),
                scores: a.fit.scores.0,
                seed: a.seed,
                out: a.common.out,
                emit_dataset: true,
            }
        }
    };
    execute(job)
}

fn execute(job: Job) -> Result<i32> {
    std::fs::create_dir_all(&job.out)?;
    let mut timings: Vec<(String, f64)> = Vec::new();
    let mut clock = Instant::now();
    let mut lap = |timings: &mut Vec<(String, f64)>, stage: &str| {
        let now = Instant::now();
        timings.push((stage.to_string(), (now - clock).as_secs_f64() * 1e3));
        clock = now;
    };

    let summary = summarize(&job.data, job.model, job.covdef)?;
    lap(&mut timings, "summarize");

    let mut exit = 0;
    let mut fit_report = None;
    let mut scores_report = None;
    let mut scores_result = None;

    if let Some((method, factors)) = job.extraction {
        let (eigenvalues, _) = eigendecompose(&summary.correlation)?;
        let kaiser = kaiser_count(&eigenvalues);
        let m = match factors {
            FactorsArg::Auto => kaiser.max(1),
            FactorsArg::Fixed(k) => k,
        };
        let fit = match method {
            Extraction::Pcf => extract_pcf(&summary.correlation, m)?,
            Extraction::Paf => {
                extract_paf(&summary.correlation, m, crate::factor::PAF_TOL, crate::factor::PAF_MAX_ITER)?
            }
        };
        lap(&mut timings, "extract");
        if !fit.converged {
            eprintln!(
                "warning: {} did not converge within {} iterations",
                method.as_str(),
                fit.iterations
            );
            exit = 4;
        }

        if let Some(score_method) = job.scores {
            let (z, _, _) = job.data.standardize(job.model)?;
            let cfg = OptConfig { seed: job.seed, ..OptConfig::default() };
            let scores = match score_method {
                ScoreMethod::Bartlett => estimate_bartlett(&z, &fit, job.model, &cfg)?,
                ScoreMethod::AndersonRubin => {
                    estimate_anderson_rubin(&z, &fit, job.model, &cfg)?
                }
            };
            lap(&mut timings, "scores");
            if let Some(c) = scores.max_abs_corr {
                eprintln!("max |off-diagonal score correlation| = {c:.6}");
            }
            if !scores.converged {
                eprintln!("warning: score estimation did not converge");
                exit = 4;
            }
            scores_report = Some(ScoresReport::from(&scores));
            scores_result = Some(scores);
        }
        fit_report = Some((FitReport::new(&fit, kaiser), fit));
    }

    if job.emit_dataset {
        write_csv(job.out.join("dataset.csv"), &job.data)?;
    }
    if let Some((_, fit)) = &fit_report {
        write_loadings_csv(job.out.join("loadings.csv"), fit, job.data.names())?;
    }
    if let Some(scores) = &scores_result {
        write_scores_csv(job.out.join("scores.csv"), scores)?;
        if scores.m() >= 2 {
            std::fs::write(job.out.join("factors.svg"), factor_plane_svg(scores, None)?)?;
        } else {
            eprintln!("factors.svg skipped: the factor-plane plot needs at least two factors");
        }
    }

    let report = RunReport {
        config: job.config,
        dataset: DatasetInfo::from(&job.data),
        summary: Some(SummaryReport::from(&summary)),
        fit: fit_report.map(|(r, _)| r),
        scores: scores_report,
        timings_ms: timings,
    };
    crate::report::write_report(job.out.join("report.json"), &report)?;
    for (stage, ms) in &report.timings_ms {
        eprintln!("{stage}: {ms:.2} ms");
    }
    Ok(exit)
}
