use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cgnn::cli::{self, EvalSplit, RunConfig};
use cgnn::metrics::Averaging;
use cgnn::model::PoolKind;
use cgnn::{Error, Result};

#[derive(Parser)]
#[command(
    name = "cgnn",
    version,
    about = "Classify traffic sessions with a chained-graph neural network"
)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    /// Log per-epoch progress.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

/// Overrides applied on top of the config file (or the defaults).
#[derive(Args, Default)]
struct Overrides {
    /// Flat `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    p: Option<usize>,
    #[arg(long, global = true)]
    d1: Option<usize>,
    #[arg(long, global = true)]
    d2: Option<usize>,
    #[arg(long, global = true)]
    layers: Option<usize>,
    #[arg(long, global = true)]
    k1: Option<usize>,
    #[arg(long, global = true)]
    k2: Option<usize>,
    /// avg, max or sum.
    #[arg(long, global = true)]
    pooling: Option<PoolKind>,
    /// Divide input bytes by 255.
    #[arg(long, global = true)]
    standardize: bool,
    /// Leading share of each session's packets to keep.
    #[arg(long, global = true)]
    fraction: Option<f64>,
    /// Drop packets to or from port 53.
    #[arg(long, global = true)]
    drop_dns: bool,
    #[arg(long, global = true)]
    lr: Option<f64>,
    #[arg(long, global = true)]
    batch_size: Option<usize>,
    #[arg(long, global = true)]
    max_epochs: Option<usize>,
    #[arg(long, global = true)]
    patience: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    split_seed: Option<u64>,
    #[arg(long, global = true, env = "CGNN_THREADS")]
    threads: Option<usize>,
    /// macro or weighted.
    #[arg(long, global = true)]
    average: Option<Averaging>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a dataset from <root>/<label>/*.pcap.
    Preprocess { root: PathBuf, out: PathBuf },
    /// Train on a dataset and write best.cgm1 and train_report.csv.
    Train { dataset: PathBuf, out_dir: PathBuf },
    /// Score a checkpoint and write a confusion heat-map CSV.
    Evaluate {
        dataset: PathBuf,
        checkpoint: PathBuf,
        /// test or all.
        #[arg(long, default_value = "test")]
        split: EvalSplit,
        #[arg(long, default_value = "heatmap.csv")]
        heatmap: PathBuf,
    },
    /// Classify each session of a capture.
    Predict {
        pcap: PathBuf,
        checkpoint: PathBuf,
        /// Also write per-class probabilities.
        #[arg(long)]
        probs_csv: Option<PathBuf>,
    },
    /// Describe a dataset or checkpoint file.
    Inspect { file: PathBuf },
    /// Print the effective configuration.
    Config,
}

impl Overrides {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                    path: path.clone(),
                    source: e,
                })?;
                RunConfig::parse(&text)?
            }
            None => RunConfig::default(),
        };
        macro_rules! apply {
            ($($field:ident => $target:ident),* $(,)?) => {
                $(if let Some(v) = self.$field { cfg.$target = v; })*
            };
        }
        apply!(
            p => p, d1 => d1, d2 => d2, layers => layers, k1 => k1, k2 => k2, pooling => pooling,
            fraction => fraction, lr => lr, batch_size => batch_size, max_epochs => max_epochs,
            patience => patience, seed => seed, split_seed => split_seed, threads => threads,
            average => average,
        );
        cfg.standardize |= self.standardize;
        cfg.drop_dns |= self.drop_dns;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if let Command::Inspect { file } = &cli.command {
        return cli::inspect(file, &mut out);
    }
    let cfg = cli.overrides.resolve()?;
    if let Command::Config = cli.command {
        write!(out, "{cfg}").map_err(|e| Error::Io {
            path: "<stdout>".into(),
            source: e,
        })?;
        return Ok(());
    }
    eprint!("# effective config\n{cfg}");
    match &cli.command {
        Command::Preprocess { root, out: dest } => {
            cli::preprocess(root, dest, &cfg, &mut out).map(drop)
        }
        Command::Train { dataset, out_dir } => {
            cli::train(dataset, out_dir, &cfg, &mut out).map(drop)
        }
        Command::Evaluate {
            dataset,
            checkpoint,
            split,
            heatmap,
        } => cli::evaluate(dataset, checkpoint, *split, heatmap, &cfg, &mut out).map(drop),
        Command::Predict {
            pcap,
            checkpoint,
            probs_csv,
        } => cli::predict(
            pcap,
            checkpoint,
            probs_csv.as_deref().map(Path::new),
            &cfg,
            &mut out,
        )
        .map(drop),
        Command::Inspect { .. } | Command::Config => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
