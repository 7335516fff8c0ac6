use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use tweetflow::config::PipelineConfig;
use tweetflow::corpus::Language;
use tweetflow::pipeline::{Pipeline, Stage};
use tweetflow::{Error, Result};

/// Deterministic tweet-corpus mining pipeline.
#[derive(Debug, Parser)]
#[command(name = "tweetflow", version)]
struct Cli {
    /// Stage to run, or `all` for the whole pipeline in order.
    stage: String,
    /// Pipeline configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Input corpus, overriding `input`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output directory, overriding `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Global seed, overriding `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Restrict processing to one language.
    #[arg(long, value_parser = ["en", "it"])]
    lang: Option<String>,
    /// Worker threads; 1 is the reference behaviour.
    #[arg(long)]
    threads: Option<usize>,
    /// Pick tourism topics by hand instead of by dictionary overlap.
    #[arg(long)]
    interactive: bool,
}

fn absolute(p: &Path) -> Result<PathBuf> {
    if p.is_absolute() {
        return Ok(p.to_path_buf());
    }
    let cwd = std::env::current_dir().map_err(|e| Error::Config(format!("current directory: {e}")))?;
    Ok(cwd.join(p))
}

fn run(cli: Cli) -> Result<()> {
    let stage: Option<Stage> = match cli.stage.as_str() {
        "all" => None,
        name => Some(name.parse()?),
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let mut config = PipelineConfig::load(&cli.config)?;
    // flags are relative to the working directory, config entries to the config file
    if let Some(p) = &cli.input {
        config.input = Some(absolute(p)?);
    }
    if let Some(p) = &cli.out {
        config.output_dir = Some(absolute(p)?);
    }
    if cli.seed.is_some() {
        config.seed = cli.seed;
    }
    if let Some(code) = &cli.lang {
        config.languages = vec![Language::parse(code)?];
    }
    let pipeline = Pipeline::new(config)?.interactive(cli.interactive);
    let summaries = match stage {
        Some(stage) => vec![pipeline.run(stage)?],
        None => pipeline.run_all()?,
    };
    for s in summaries {
        println!("{}: {} files", s.stage, s.files.len());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tweetflow: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
