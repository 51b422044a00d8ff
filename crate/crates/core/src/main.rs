use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use faithcheck::corpus::load_corpus;
use faithcheck::overlap::{Aggregation, MetricName};
use faithcheck::run::{
    default_metrics, profile_tsv, run_correlate, run_profile, run_score, BackendChoice, OutputFormat, RunConfig,
    RunError, DEFAULT_CONCURRENCY,
};

/// Faithfulness and abstractiveness metrics for generated summaries.
#[derive(Parser, Debug)]
#[command(name = "faithcheck", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Abstractiveness profile of a corpus.
    Profile(Common),
    /// Per-sentence metric scores.
    Score(Common),
    /// Correlation of metrics with human scores.
    Correlate(Common),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Agg {
    Avg,
    Max,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Backend {
    Lexical,
    Remote,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Tsv,
    Json,
}

#[derive(Args, Debug)]
struct Common {
    /// JSONL corpus.
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated: rouge1, rouge2, rougeL, bleu4, ref-rouge1, ref-rouge2,
    /// ref-rougeL, feqa, external:NAME.
    #[arg(long, value_delimiter = ',')]
    metric: Vec<String>,
    #[arg(long, value_enum, default_value = "avg")]
    agg: Agg,
    #[arg(long, value_enum, default_value = "lexical")]
    backend: Backend,
    /// QA service base URL for the remote backend.
    #[arg(long, env = "FAITHCHECK_QA_ENDPOINT")]
    endpoint: Option<String>,
    #[arg(long, default_value_t = faithcheck::abstractiveness::DEFAULT_K_MAX)]
    k_max: usize,
    #[arg(long, default_value_t = faithcheck::feqa::DEFAULT_MAX_SPANS)]
    max_spans: usize,
    /// N-gram orders for the novel n-gram columns.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    ngram_orders: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_CONCURRENCY)]
    concurrency: usize,
    #[arg(long, value_enum, default_value = "tsv")]
    format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Split each summary entry into sentences.
    #[arg(long)]
    split_summary: bool,
}

impl Common {
    fn config(&self) -> Result<RunConfig, RunError> {
        let metrics = if self.metric.is_empty() {
            default_metrics()
        } else {
            self.metric
                .iter()
                .map(|m| m.trim().parse::<MetricName>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(RunError::Config)?
        };
        let backend = match self.backend {
            Backend::Lexical => BackendChoice::Lexical,
            Backend::Remote => BackendChoice::Remote {
                endpoint: self
                    .endpoint
                    .clone()
                    .ok_or_else(|| RunError::Config("--backend remote needs --endpoint".into()))?,
            },
        };
        let config = RunConfig {
            metrics,
            aggregation: match self.agg {
                Agg::Avg => Aggregation::Avg,
                Agg::Max => Aggregation::Max,
            },
            k_max: self.k_max,
            ngram_orders: self.ngram_orders.clone(),
            backend,
            max_spans: self.max_spans,
            concurrency: self.concurrency,
            format: match self.format {
                Format::Tsv => OutputFormat::Tsv,
                Format::Json => OutputFormat::Json,
            },
            split_summary: self.split_summary,
        };
        config.validate()?;
        Ok(config)
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Returns the report text and whether any backend call failed.
fn execute(command: &Command) -> Result<(String, bool), RunError> {
    let (Command::Profile(common) | Command::Score(common) | Command::Correlate(common)) = command;
    let config = common.config()?;
    let corpus = load_corpus(&common.input)?;
    let tsv = config.format == OutputFormat::Tsv;
    Ok(match command {
        Command::Profile(_) => {
            let report = run_profile(&corpus, &config)?;
            (if tsv { profile_tsv(&report) } else { json(&report) }, false)
        }
        Command::Score(_) => {
            let table = run_score(&corpus, &config)?;
            let failed = table.backend_failures() > 0;
            (if tsv { table.to_tsv() } else { json(&table) }, failed)
        }
        Command::Correlate(_) => {
            let (table, scores) = run_correlate(&corpus, &config)?;
            let failed = scores.backend_failures() > 0;
            (if tsv { table.to_tsv() } else { json(&table) }, failed)
        }
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (Command::Profile(common) | Command::Score(common) | Command::Correlate(common)) = &cli.command;

    let (text, failed) = match execute(&cli.command) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let written = match &common.output {
        Some(path) => fs::write(path, text.as_bytes()),
        None => io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if failed {
        eprintln!("warning: some QA backend requests failed; affected rows are marked");
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
