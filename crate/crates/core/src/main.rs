use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use codeppl::clean::CleanMode;
use codeppl::config::{Overrides, RunConfig};
use codeppl::pipeline::{self, ScoresInput};
use codeppl::protocol::mock::{MockScorer, MockServer};

#[derive(Parser)]
#[command(name = "codeppl", version, about = "Perplexity of language models on multi-language source code")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Filter projects, deduplicate files and draw the seeded sample.
    Curate(Common),
    /// Clean, tokenize and score the sampled files.
    Perplexity(Common),
    /// Summarize one or more scores files into a report.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Scores files, optionally as LABEL=PATH.
        #[arg(required = true)]
        scores: Vec<ScoresInput>,
    },
    /// Handshake an external scorer and validate the wire protocol.
    ProtocolCheck {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Scorer id from the config (endpoint read from its environment
        /// variable) or an endpoint such as tcp://host:port.
        #[arg(long)]
        scorer: String,
    },
    /// Serve a fixture-backed mock scorer.
    #[command(hide = true)]
    MockScorer {
        fixture: PathBuf,
        /// Address to listen on; speaks on stdin/stdout when absent.
        #[arg(long)]
        listen: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    ctx_size: Option<usize>,
    #[arg(long)]
    stride: Option<usize>,
    /// Restrict the run to one configured scorer.
    #[arg(long)]
    scorer: Option<String>,
    #[arg(long)]
    clean_mode: Option<CleanMode>,
    #[arg(long)]
    workers: Option<usize>,
    /// Output root, replacing the config's out_dir.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(&self.config)?;
        cfg.apply(&Overrides {
            seed: self.seed,
            ctx_size: self.ctx_size,
            stride: self.stride,
            scorer: self.scorer.clone(),
            clean_mode: self.clean_mode,
            workers: self.workers,
            out: self.out.clone(),
        })?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Curate(c) => {
            let out = pipeline::cmd_curate(&c.load()?)?;
            for s in &out.funnel {
                println!("{:<10} {:>8} {}", s.stage, s.count, s.unit);
            }
            println!("sample: {}", out.sample_csv.display());
        }
        Command::Perplexity(c) => {
            let out = pipeline::cmd_perplexity(&c.load()?)?;
            println!("ctx_size {} ({})", out.context.ctx_size, out.context.source);
            for r in &out.runs {
                println!(
                    "{}: {} scored, {} failed -> {}",
                    r.scorer_id,
                    r.result.scores.len(),
                    r.result.failures.len(),
                    r.scores_csv.display()
                );
            }
            if !out.skipped.is_empty() {
                println!("{} files skipped before scoring", out.skipped.len());
            }
        }
        Command::Analyze { common, scores } => {
            let cfg = common.load()?;
            let bundle = pipeline::cmd_analyze(&cfg, &scores, None)?;
            for f in &bundle.files {
                println!("{}", f.display());
            }
            for n in &bundle.notes {
                eprintln!("note: {n}");
            }
        }
        Command::ProtocolCheck { config, scorer } => {
            let cfg = config.as_deref().map(RunConfig::load).transpose()?;
            let endpoint = pipeline::resolve_endpoint(cfg.as_ref(), &scorer)?;
            let report = pipeline::protocol_check(&endpoint)?;
            for s in &report.steps {
                println!("ok  {:<12} {}", s.name, s.detail);
            }
        }
        Command::MockScorer { fixture, listen } => {
            let mock = MockScorer::load(&fixture).with_context(|| fixture.display().to_string())?;
            match listen {
                Some(addr) => {
                    let server = MockServer::bind(&addr, mock)?;
                    eprintln!("listening on {}", server.endpoint());
                    server.join();
                }
                None => {
                    let stdin = std::io::stdin();
                    mock.serve_lines(stdin.lock(), std::io::stdout().lock())?;
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
