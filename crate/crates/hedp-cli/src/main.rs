//! `hedp` command-line tool: validate input documents, predict defects for
//! a task/profile pair, score predictions against a debugging corpus, and
//! render a combined summary.
//!
//! Exit codes: 0 on success, 1 when validation findings were reported, 2 on
//! usage, file, or parse errors. Any input path may be `-` to read standard
//! input.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hedp::catalog::{self, EngineConfig, ErrorMode, ReviewDepths};
use hedp::corpus::{self, Corpus};
use hedp::engine::{self, EngineError, PredictionReport};
use hedp::metrics::{self, MatchMap};
use hedp::model::{self, KnowledgeProfile, TaskModel};
use hedp::ValidationFinding;

#[derive(Parser)]
#[command(
    name = "hedp",
    version,
    about = "Predict software defects from task models and knowledge profiles, and score the predictions against debugging histories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the given documents and list validation findings
    Validate(ValidateArgs),
    /// Match the error-mode catalog against a task model and knowledge profile
    Predict(PredictArgs),
    /// Compute coverage, persistence, accuracy, and saved-effort metrics over a corpus
    Evaluate(EvaluateArgs),
    /// Predict, then evaluate, and emit one combined text summary
    Report(ReportArgs),
}

#[derive(Args)]
#[group(required = true, multiple = true)]
struct ValidateArgs {
    /// Error-mode catalog (.eps scenario file)
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Task model document
    #[arg(long)]
    task: Option<PathBuf>,
    /// Knowledge profile document
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Defect corpus file
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Prediction report document; its rationale is re-verified when --task
    /// and --profile are also given
    #[arg(long)]
    predictions: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    /// Error-mode catalog (.eps scenario file); defaults to the built-in catalog
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Task model document
    #[arg(long)]
    task: PathBuf,
    /// Knowledge profile document
    #[arg(long)]
    profile: PathBuf,
    #[command(flatten)]
    engine: EngineArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Defect corpus file carrying the defect table and debugging histories
    #[arg(long)]
    corpus: PathBuf,
    /// Prediction report document; when given, the corpus match map is
    /// cross-checked against its scenario refs
    #[arg(long)]
    predictions: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ReportArgs {
    /// Error-mode catalog (.eps scenario file); defaults to the built-in catalog
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Task model document
    #[arg(long)]
    task: PathBuf,
    /// Knowledge profile document
    #[arg(long)]
    profile: PathBuf,
    /// Defect corpus file
    #[arg(long)]
    corpus: PathBuf,
    #[command(flatten)]
    engine: EngineArgs,
    /// Write to this file instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
    /// Prefix the summary with a tool/version banner
    #[arg(long)]
    banner: bool,
}

#[derive(Args)]
struct EngineArgs {
    /// How many times more often a competing rule must have succeeded to mask the fitting one
    #[arg(long, default_value_t = 10.0)]
    strength_ratio: f64,
    /// Fraction of a requirement's features a rule must cover to count as known
    #[arg(long, default_value_t = 1.0)]
    overlap_threshold: f64,
    /// `all-strict-prefixes` or comma-separated review depths such as `1,2,3`
    #[arg(long, default_value = "all-strict-prefixes", value_parser = parse_review_depths)]
    review_depths: ReviewDepths,
    /// Absolute tolerance when checking a linear fit against relation samples
    #[arg(long, default_value_t = 1e-6)]
    fit_tolerance: f64,
}

impl EngineArgs {
    fn to_config(&self) -> EngineConfig {
        EngineConfig {
            strength_ratio: self.strength_ratio,
            overlap_threshold: self.overlap_threshold,
            review_depths: self.review_depths.clone(),
            fit_tolerance: self.fit_tolerance,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output format: human-readable text, CSV tables, or a machine-readable document
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to this file instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
    /// Prefix text output with a tool/version banner (ignored for csv/document)
    #[arg(long)]
    banner: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Document,
}

fn parse_review_depths(text: &str) -> Result<ReviewDepths, String> {
    if text == "all-strict-prefixes" {
        return Ok(ReviewDepths::AllStrictPrefixes);
    }
    let mut depths = BTreeSet::new();
    for part in text.split(',') {
        let depth: usize = part.trim().parse().map_err(|_| {
            format!("expected `all-strict-prefixes` or comma-separated depths, got `{text}`")
        })?;
        depths.insert(depth);
    }
    Ok(ReviewDepths::Set(depths))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Validate(args) => run_validate(args),
        Command::Predict(args) => run_predict(args),
        Command::Evaluate(args) => run_evaluate(args),
        Command::Report(args) => run_report(args),
    }
}

fn display_name(path: &Path) -> String {
    if path.as_os_str() == "-" {
        "standard input".to_string()
    } else {
        path.display().to_string()
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .context("reading standard input")?;
        Ok(text)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn ensure_single_stdin(paths: &[Option<&PathBuf>]) -> Result<()> {
    let stdin_count = paths
        .iter()
        .flatten()
        .filter(|p| p.as_os_str() == "-")
        .count();
    if stdin_count > 1 {
        bail!("standard input (`-`) may back at most one input path");
    }
    Ok(())
}

fn load_catalog_file(path: &Path) -> Result<Vec<ErrorMode>> {
    let text = read_input(path)?;
    catalog::load_catalog(&text).with_context(|| format!("parsing catalog {}", display_name(path)))
}

fn load_catalog_arg(path: &Option<PathBuf>) -> Result<Vec<ErrorMode>> {
    match path {
        Some(path) => load_catalog_file(path),
        None => Ok(catalog::builtin_catalog()),
    }
}

fn load_task(path: &Path) -> Result<TaskModel> {
    let text = read_input(path)?;
    serde_json::from_str(&text)
        .with_context(|| format!("parsing task model {}", display_name(path)))
}

fn load_profile(path: &Path) -> Result<KnowledgeProfile> {
    let text = read_input(path)?;
    serde_json::from_str(&text)
        .with_context(|| format!("parsing knowledge profile {}", display_name(path)))
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    let text = read_input(path)?;
    corpus::parse_corpus(&text).with_context(|| format!("parsing corpus {}", display_name(path)))
}

fn load_predictions(path: &Path) -> Result<PredictionReport> {
    let text = read_input(path)?;
    serde_json::from_str(&text)
        .with_context(|| format!("parsing prediction report {}", display_name(path)))
}

fn emit(output: &Option<PathBuf>, content: &str) -> Result<()> {
    match output {
        Some(path) if path.as_os_str() != "-" => {
            fs::write(path, content).with_context(|| format!("writing {}", path.display()))
        }
        _ => io::stdout()
            .write_all(content.as_bytes())
            .context("writing standard output"),
    }
}

fn banner_line() -> String {
    format!("hedp {}\n\n", env!("CARGO_PKG_VERSION"))
}

fn document<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value).context("serializing document")?;
    text.push('\n');
    Ok(text)
}

fn run_validate(args: ValidateArgs) -> Result<ExitCode> {
    ensure_single_stdin(&[
        args.catalog.as_ref(),
        args.task.as_ref(),
        args.profile.as_ref(),
        args.corpus.as_ref(),
        args.predictions.as_ref(),
    ])?;

    let mut findings: Vec<(String, ValidationFinding)> = Vec::new();
    let mut collect = |source: &Path, batch: Vec<ValidationFinding>| {
        let name = display_name(source);
        findings.extend(batch.into_iter().map(|f| (name.clone(), f)));
    };

    if let Some(path) = &args.catalog {
        let modes = load_catalog_file(path)?;
        for mode in &modes {
            collect(path, catalog::validate_mode(mode));
        }
    }
    let task = match &args.task {
        Some(path) => {
            let task = load_task(path)?;
            collect(path, model::validate_task(&task));
            Some(task)
        }
        None => None,
    };
    let profile = match &args.profile {
        Some(path) => {
            let profile = load_profile(path)?;
            collect(path, model::validate_profile(&profile));
            Some(profile)
        }
        None => None,
    };
    if let Some(path) = &args.corpus {
        let corpus = load_corpus(path)?;
        collect(path, corpus::validate_corpus(&corpus));
    }
    if let Some(path) = &args.predictions {
        let report = load_predictions(path)?;
        collect(path, report.config.validate());
        if let (Some(task), Some(profile)) = (&task, &profile) {
            let verification: Vec<ValidationFinding> = report
                .predictions
                .iter()
                .filter_map(|prediction| {
                    engine::verify_rationale(prediction, task, profile, &report.config)
                        .err()
                        .map(|message| {
                            ValidationFinding::new(prediction.prediction_id.clone(), message)
                        })
                })
                .collect();
            collect(path, verification);
        }
    }

    if findings.is_empty() {
        println!("no findings");
        Ok(ExitCode::SUCCESS)
    } else {
        for (source, finding) in &findings {
            println!("{source}: {finding}");
        }
        Ok(ExitCode::from(1))
    }
}

fn run_predict(args: PredictArgs) -> Result<ExitCode> {
    ensure_single_stdin(&[args.catalog.as_ref(), Some(&args.task), Some(&args.profile)])?;
    let catalog = load_catalog_arg(&args.catalog)?;
    let task = load_task(&args.task)?;
    let profile = load_profile(&args.profile)?;
    let config = args.engine.to_config();

    let report = match engine::predict_all(&catalog, &task, &profile, &config) {
        Ok(report) => report,
        Err(EngineError::InvalidInputs(findings)) => {
            for finding in &findings {
                eprintln!("{finding}");
            }
            return Ok(ExitCode::from(1));
        }
        Err(other) => return Err(other.into()),
    };

    let content = match args.output.format {
        Format::Text if args.output.banner => banner_line() + &engine::render_text(&report),
        Format::Text => engine::render_text(&report),
        Format::Csv => engine::render_csv(&report),
        Format::Document => document(&report)?,
    };
    emit(&args.output.output, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn run_evaluate(args: EvaluateArgs) -> Result<ExitCode> {
    ensure_single_stdin(&[Some(&args.corpus), args.predictions.as_ref()])?;
    let corpus = load_corpus(&args.corpus)?;
    let mut findings: Vec<(String, ValidationFinding)> = corpus::validate_corpus(&corpus)
        .into_iter()
        .map(|f| (display_name(&args.corpus), f))
        .collect();

    let matches = MatchMap::from_corpus(&corpus);
    if let Some(path) = &args.predictions {
        let prediction_report = load_predictions(path)?;
        findings.extend(
            matches
                .validate(&corpus, &prediction_report)
                .into_iter()
                .map(|f| (display_name(path), f)),
        );
    }

    let report = metrics::compute_report(&corpus, &matches)?;
    let content = match args.output.format {
        Format::Text if args.output.banner => banner_line() + &metrics::render_text(&report),
        Format::Text => metrics::render_text(&report),
        Format::Csv => metrics::render_csv(&report),
        Format::Document => document(&report)?,
    };
    emit(&args.output.output, &content)?;

    if findings.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        for (source, finding) in &findings {
            eprintln!("{source}: {finding}");
        }
        Ok(ExitCode::from(1))
    }
}

fn run_report(args: ReportArgs) -> Result<ExitCode> {
    ensure_single_stdin(&[
        args.catalog.as_ref(),
        Some(&args.task),
        Some(&args.profile),
        Some(&args.corpus),
    ])?;
    let catalog = load_catalog_arg(&args.catalog)?;
    let task = load_task(&args.task)?;
    let profile = load_profile(&args.profile)?;
    let corpus = load_corpus(&args.corpus)?;
    let config = args.engine.to_config();

    let prediction_report = match engine::predict_all(&catalog, &task, &profile, &config) {
        Ok(report) => report,
        Err(EngineError::InvalidInputs(findings)) => {
            for finding in &findings {
                eprintln!("{finding}");
            }
            return Ok(ExitCode::from(1));
        }
        Err(other) => return Err(other.into()),
    };

    let matches = MatchMap::from_corpus(&corpus);
    let mut findings: Vec<(String, ValidationFinding)> = corpus::validate_corpus(&corpus)
        .into_iter()
        .map(|f| (display_name(&args.corpus), f))
        .collect();
    findings.extend(
        matches
            .validate(&corpus, &prediction_report)
            .into_iter()
            .map(|f| (display_name(&args.corpus), f)),
    );
    let metrics_report = metrics::compute_report(&corpus, &matches)?;

    let mut content = String::new();
    if args.banner {
        content.push_str(&banner_line());
    }
    content.push_str(&engine::render_text(&prediction_report));
    content.push('\n');
    content.push_str(&metrics::render_text(&metrics_report));
    emit(&args.output, &content)?;

    if findings.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        for (source, finding) in &findings {
            eprintln!("{source}: {finding}");
        }
        Ok(ExitCode::from(1))
    }
}
