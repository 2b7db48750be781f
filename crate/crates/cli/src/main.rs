use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, Subcommand};
use tracescore_cli::advantages::advantages_stream;
use tracescore_cli::datagen::{datagen_stream, DatagenArgs};
use tracescore_cli::eval::{cardinality_stream, eval_stream, ReportFormat};
use tracescore_cli::score::score_stream;
use tracescore_cli::{service, CliError, RunSummary, ScoringSettings};
use tracescore_core::datagen::HttpProvider;

#[derive(Parser)]
#[command(name = "tracescore", version, about = "Score, normalize and evaluate reasoning traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Io {
    /// JSON Lines input; stdin when omitted or "-"
    input: Option<PathBuf>,
    /// Output file; stdout when omitted
    #[arg(short, long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Score ScoreRequest lines
    Score {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        settings: ScoringSettings,
    },
    /// Group-normalized advantages for {group_id, id, reward} lines
    Advantages {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 1e-4)]
        epsilon: f64,
    },
    /// Set-level metrics for {pred, gt} lines
    Eval {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_name = "PATH")]
        lexicon: Option<PathBuf>,
        /// Field whose value splits the report into groups
        #[arg(long, value_name = "FIELD")]
        group_by: Option<String>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
    },
    /// Label-count histogram for {pred, gt} lines
    ReportCardinality {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Generate training samples from modality descriptions
    Datagen {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        args: DatagenArgs,
    },
    /// Run the HTTP scoring service
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
        #[command(flatten)]
        settings: ScoringSettings,
    },
}

impl Io {
    fn reader(&self) -> Result<Box<dyn BufRead>, CliError> {
        match &self.input {
            Some(p) if p.as_os_str() != "-" => {
                let f = File::open(p).map_err(|e| CliError::Config(format!("input {}: {e}", p.display())))?;
                Ok(Box::new(BufReader::new(f)))
            }
            _ => Ok(Box::new(BufReader::new(io::stdin().lock()))),
        }
    }

    fn writer(&self) -> Result<Box<dyn Write>, CliError> {
        match &self.output {
            Some(p) => {
                let f = File::create(p).map_err(|e| CliError::Config(format!("output {}: {e}", p.display())))?;
                Ok(Box::new(BufWriter::new(f)))
            }
            None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        }
    }
}

fn run(cmd: Command) -> Result<RunSummary, CliError> {
    match cmd {
        Command::Score { io, settings } => {
            let ctx = settings.build()?;
            score_stream(&ctx, io.reader()?, io.writer()?)
        }
        Command::Advantages { io, epsilon } => {
            let cfg = ScoringSettings { epsilon, ..Default::default() }.grpo()?;
            advantages_stream(&cfg, io.reader()?, io.writer()?)
        }
        Command::Eval { io, lexicon, group_by, format } => {
            let lex = ScoringSettings { lexicon, ..Default::default() }.load_lexicon()?;
            eval_stream(&lex, group_by.as_deref(), format, io.reader()?, io.writer()?, io::stderr().lock())
        }
        Command::ReportCardinality { io, csv } => {
            cardinality_stream(io.reader()?, csv.as_deref(), io.writer()?, io::stderr().lock())
        }
        Command::Datagen { io, args } => {
            let (chat, reasoner): (HttpProvider, HttpProvider) =
                args.provider_config()?.build().map_err(|e| CliError::Config(e.to_string()))?;
            let cfg = args.pipeline_config()?;
            let ledger: Box<dyn Write> = match &args.failures {
                Some(p) => Box::new(BufWriter::new(
                    File::create(p).map_err(|e| CliError::Config(format!("failures {}: {e}", p.display())))?,
                )),
                None => Box::new(io::stderr().lock()),
            };
            datagen_stream(&chat, &reasoner, &cfg, io.reader()?, io.writer()?, ledger)
        }
        Command::Serve { bind, settings } => {
            // blocking HTTP clients must exist before the async runtime starts
            let ctx = Arc::new(settings.build()?);
            let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
            rt.block_on(service::serve(ctx, &bind))?;
            Ok(RunSummary::default())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = run(cli.command).context("tracescore");
    match result {
        Ok(summary) => {
            if summary.failures > 0 {
                log::warn!("{} of {} lines failed", summary.failures, summary.lines);
            }
            ExitCode::from(summary.exit_code() as u8)
        }
        Err(e) => {
            let code = e.downcast_ref::<CliError>().map_or(1, CliError::exit_code);
            eprintln!("error: {e:#}");
            ExitCode::from(code as u8)
        }
    }
}
