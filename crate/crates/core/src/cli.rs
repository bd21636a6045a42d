//! The `logprep` command line.
//!
//! Exit codes: 0 success, 1 I/O or malformed input file, 2 invalid
//! configuration, 3 prediction and ground truth cover different lines.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{OutputFormat, RunConfig};
use crate::corpus::{self, ColumnMap, GroundTruthEntry, LogFormat, LogRecord};
use crate::masker::{match_statistics, save_catalog};
use crate::metrics::{self, EvaluationReport, SubgroupKind, SubgroupSpec};
use crate::parsers::{self, ParseOutcome, ParserKind};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "logprep",
    version,
    about = "Mask, parse and evaluate log datasets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mask every line and write the effective catalog.
    Preprocess(CommonArgs),
    /// Mask and parse; writes structured.csv and templates.csv.
    Parse(CommonArgs),
    /// Parse (or read a prediction) and score it against the ground truth.
    Evaluate {
        #[command(flatten)]
        common: CommonArgs,
        /// A structured.csv from an earlier `parse` run, used instead of parsing.
        #[arg(long)]
        prediction: Option<PathBuf>,
    },
    /// Compare the catalog's matches with ground-truth variable spans.
    MatchStats(CommonArgs),
    /// Scores per frequency or complexity band.
    SubgroupReport(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dataset: raw log (with --log-format), structured CSV, or one message per line.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Structured CSV with LineId, Content and EventTemplate columns.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Header format such as "<Date> <Time> <Level>: <Content>".
    #[arg(long)]
    log_format: Option<String>,
    /// Catalog JSON file or builtin:{default,loghub-legacy,none,domain:<dataset>}.
    #[arg(long)]
    catalog: Option<String>,
    #[arg(long)]
    parser: Option<ParserKind>,
    #[arg(long)]
    drain_depth: Option<usize>,
    #[arg(long)]
    drain_st: Option<f64>,
    #[arg(long)]
    drain_max_children: Option<usize>,
    /// Lines scanned to decide which rules apply.
    #[arg(long)]
    prefix: Option<usize>,
    #[arg(long)]
    no_applicability_filter: bool,
    #[arg(long)]
    subgroup: Option<SubgroupKind>,
    /// Share of templates in each frequency band.
    #[arg(long)]
    fraction: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<OutputFormat>,
}

impl CommonArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.input {
            cfg.dataset_path = Some(v.clone());
        }
        if let Some(v) = &self.truth {
            cfg.ground_truth_path = Some(v.clone());
        }
        if let Some(v) = &self.log_format {
            cfg.log_format = Some(v.clone());
        }
        if let Some(v) = &self.catalog {
            cfg.catalog_path = Some(v.clone());
        }
        if let Some(v) = self.parser {
            cfg.parser.parser_kind = v;
        }
        if let Some(v) = self.drain_depth {
            cfg.parser.drain_depth = v;
        }
        if let Some(v) = self.drain_st {
            cfg.parser.drain_similarity_threshold = v;
        }
        if let Some(v) = self.drain_max_children {
            cfg.parser.drain_max_children = v;
        }
        if let Some(v) = self.prefix {
            cfg.applicability_prefix = Some(v);
        }
        if self.no_applicability_filter {
            cfg.applicability_prefix = None;
        }
        if self.subgroup.is_some() || self.fraction.is_some() {
            let spec = cfg.subgroup.get_or_insert_with(SubgroupSpec::default);
            if let Some(kind) = self.subgroup {
                spec.kind = kind;
            }
            if let Some(f) = self.fraction {
                spec.frequency_fraction = f;
            }
        }
        if let Some(v) = &self.out {
            cfg.output_dir = v.clone();
        }
        if let Some(v) = self.format {
            cfg.format = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { .. } | Error::MissingColumn { .. } | Error::Csv { .. } => 1,
        Error::LogFormat { .. } | Error::Catalog(_) | Error::Config(_) | Error::Json(_) => 2,
        Error::Mismatch(_) => 3,
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Preprocess(args) => cmd_preprocess(&args.resolve()?),
        Command::Parse(args) => cmd_parse(&args.resolve()?),
        Command::Evaluate { common, prediction } => {
            cmd_evaluate(&common.resolve()?, prediction.as_deref())
        }
        Command::MatchStats(args) => cmd_match_stats(&args.resolve()?),
        Command::SubgroupReport(args) => cmd_subgroup_report(&args.resolve()?),
    }
}

/// Reads the dataset named by the config.
pub fn load_records(cfg: &RunConfig) -> Result<Vec<LogRecord>> {
    let path = cfg.input()?;
    if let Some(fmt) = &cfg.log_format {
        return Ok(corpus::parse_raw_log(path, &LogFormat::parse(fmt)?)?.records);
    }
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        return corpus::load_csv_records(path, &ColumnMap::default());
    }
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(String::from_utf8_lossy(&bytes)
        .lines()
        .enumerate()
        .map(|(i, line)| LogRecord::from_content(i as u64 + 1, line))
        .collect())
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    Ok(BufWriter::new(file))
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    let mut w = create(dir, name)?;
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(&path, e))
}

fn csv_err(dir: &Path, name: &str, e: csv::Error) -> Error {
    Error::csv(dir.join(name), &e)
}

pub fn cmd_preprocess(cfg: &RunConfig) -> Result<()> {
    let catalog = cfg.catalog()?;
    let records = load_records(cfg)?;
    let (effective, masked) = parsers::preprocess(&records, &catalog, cfg.preprocessing())?;
    let dir = &cfg.output_dir;
    let mut text = masked.join("\n");
    if !masked.is_empty() {
        text.push('\n');
    }
    write_text(dir, "masked.log", &text)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    save_catalog(&effective, dir.join("effective_catalog.json"))?;
    println!(
        "masked {} lines; {} of {} rules enabled",
        masked.len(),
        effective.enabled_count(),
        effective.len()
    );
    Ok(())
}

fn run_parser(cfg: &RunConfig) -> Result<ParseOutcome> {
    let catalog = cfg.catalog()?;
    let records = load_records(cfg)?;
    let start = std::time::Instant::now();
    let outcome =
        parsers::parse_with_preprocessing(&records, &catalog, cfg.preprocessing(), &cfg.parser)?;
    log::info!("parsed {} lines in {:.2?}", records.len(), start.elapsed());
    Ok(outcome)
}

pub fn cmd_parse(cfg: &RunConfig) -> Result<()> {
    let outcome = run_parser(cfg)?;
    let dir = &cfg.output_dir;
    outcome
        .write_structured_csv(create(dir, "structured.csv")?)
        .map_err(|e| csv_err(dir, "structured.csv", e))?;
    outcome
        .write_templates_csv(create(dir, "templates.csv")?)
        .map_err(|e| csv_err(dir, "templates.csv", e))?;
    println!(
        "{} lines, {} templates",
        outcome.len(),
        outcome.groups.len()
    );
    Ok(())
}

fn load_truth(cfg: &RunConfig) -> Result<Vec<GroundTruthEntry>> {
    corpus::load_structured_csv(cfg.truth()?)
}

fn dataset_label(cfg: &RunConfig) -> String {
    cfg.truth()
        .or_else(|_| cfg.input())
        .ok()
        .and_then(|p| p.file_stem())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn configuration_label(cfg: &RunConfig) -> String {
    let catalog = cfg.catalog_path.as_deref().unwrap_or("builtin:default");
    let parser = match cfg.parser.parser_kind {
        ParserKind::Drain => "drain",
        ParserKind::Lfa => "lfa",
    };
    format!("{parser}+{catalog}")
}

fn write_report(cfg: &RunConfig, report: &EvaluationReport) -> Result<()> {
    let dir = &cfg.output_dir;
    match cfg.format {
        OutputFormat::Json => write_text(dir, "report.json", &(report.to_json()? + "\n")),
        OutputFormat::Csv => {
            let (dataset, configuration) = (dataset_label(cfg), configuration_label(cfg));
            metrics::write_summary_csv(
                &[(&dataset, &configuration, report)],
                create(dir, "report.csv")?,
            )
            .map_err(|e| csv_err(dir, "report.csv", e))
        }
    }
}

pub fn cmd_evaluate(cfg: &RunConfig, prediction: Option<&Path>) -> Result<()> {
    let truth = load_truth(cfg)?;
    let outcome = match prediction {
        Some(path) => ParseOutcome::read_structured_csv(path)?,
        None => run_parser(cfg)?,
    };
    let report = match &cfg.subgroup {
        Some(spec) => metrics::evaluate_with_subgroups(&outcome, &truth, spec)?,
        None => metrics::evaluate(&outcome, &truth)?,
    };
    write_report(cfg, &report)?;
    println!(
        "GA {:.3}  PA {:.3}  FGA {:.3}  FTA {:.3}",
        report.ga, report.pa, report.fga, report.fta
    );
    Ok(())
}

pub fn cmd_match_stats(cfg: &RunConfig) -> Result<()> {
    let truth = load_truth(cfg)?;
    let report = match_statistics(&truth, &cfg.catalog()?);
    let dir = &cfg.output_dir;
    match cfg.format {
        OutputFormat::Json => write_text(dir, "match_stats.json", &(report.to_json()? + "\n"))?,
        OutputFormat::Csv => report
            .write_csv(create(dir, "match_stats.csv")?)
            .map_err(|e| csv_err(dir, "match_stats.csv", e))?,
    }
    println!(
        "precision {:.3}  recall {:.3}",
        report.dataset.precision, report.dataset.recall
    );
    Ok(())
}

pub fn cmd_subgroup_report(cfg: &RunConfig) -> Result<()> {
    let truth = load_truth(cfg)?;
    let spec = cfg.subgroup.clone().unwrap_or_default();
    let outcome = run_parser(cfg)?;
    let report = metrics::evaluate_with_subgroups(&outcome, &truth, &spec)?;
    let dir = &cfg.output_dir;
    match cfg.format {
        OutputFormat::Json => {
            let json = serde_json::to_string_pretty(&report.subgroup_breakdowns)?;
            write_text(dir, "subgroups.json", &(json + "\n"))?;
        }
        OutputFormat::Csv => {
            let name = "subgroups.csv";
            let mut w = csv::Writer::from_writer(create(dir, name)?);
            let rows = report.subgroup_breakdowns.iter();
            (|| -> csv::Result<()> {
                w.write_record([
                    "band",
                    "GA",
                    "PA",
                    "FGA",
                    "FTA",
                    "messages",
                    "truth_templates",
                    "predicted_templates",
                ])?;
                for (band, s) in rows {
                    w.write_record([
                        band.clone(),
                        format!("{:.6}", s.scores.ga),
                        format!("{:.6}", s.scores.pa),
                        format!("{:.6}", s.scores.fga),
                        format!("{:.6}", s.scores.fta),
                        s.counts.messages.to_string(),
                        s.counts.truth_templates.to_string(),
                        s.counts.predicted_templates.to_string(),
                    ])?;
                }
                w.flush()?;
                Ok(())
            })()
            .map_err(|e| csv_err(dir, name, e))?;
        }
    }
    for (band, s) in &report.subgroup_breakdowns {
        println!(
            "{band}: {} messages  GA {:.3}  PA {:.3}  FGA {:.3}  FTA {:.3}",
            s.counts.messages, s.scores.ga, s.scores.pa, s.scores.fga, s.scores.fta
        );
    }
    Ok(())
}
