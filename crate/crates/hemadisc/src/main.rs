use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hemadisc::config::RunConfig;
use hemadisc::{commands, Error, Result};
use hemadisc_core::data::SplitSpec;
use hemadisc_core::discriminator::OptimizerKind;

#[derive(Parser)]
#[command(name = "hemadisc", version, about = "IDA vs beta-thalassemia-trait discrimination from CBC indices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every subcommand that reads a run configuration.
/// Flags override values from `--config`.
#[derive(Args, Default)]
struct RunFlags {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    ni: Option<usize>,
    #[arg(long)]
    hms: Option<usize>,
    #[arg(long)]
    hmcr: Option<f64>,
    #[arg(long)]
    par: Option<f64>,
    #[arg(long)]
    bw: Option<f64>,
    /// Turn on dynamic HMCR/PAR adaptation (same as `--optimizer dhs`).
    #[arg(long)]
    dynamic: bool,
    #[arg(long, value_parser = parse_optimizer)]
    optimizer: Option<OptimizerKind>,
    #[arg(long)]
    k: Option<usize>,
}

fn parse_optimizer(s: &str) -> std::result::Result<OptimizerKind, String> {
    s.parse().map_err(|_| "expected one of hs, dhs, ga".to_string())
}

impl RunFlags {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let mut set = |k: &str, v: Option<String>| -> Result<()> {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
            Ok(())
        };
        set("seed", self.seed.map(|v| v.to_string()))?;
        set("ni", self.ni.map(|v| v.to_string()))?;
        set("hms", self.hms.map(|v| v.to_string()))?;
        set("hmcr", self.hmcr.map(|v| v.to_string()))?;
        set("par", self.par.map(|v| v.to_string()))?;
        set("bw", self.bw.map(|v| v.to_string()))?;
        set("k", self.k.map(|v| v.to_string()))?;
        if let Some(o) = self.optimizer {
            cfg.optimizer = o;
            cfg.dynamic = None;
        }
        if self.dynamic {
            cfg.dynamic = Some(true);
        }
        cfg.resolved_optimizer()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the pairwise similarity matrix and the selected indices.
    Pbis {
        cohort: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Train a discriminator; writes model.txt, trace.csv and run.config.
    Train {
        cohort: PathBuf,
        #[command(flatten)]
        run: RunFlags,
        #[arg(long, default_value = "run")]
        out: PathBuf,
    },
    /// Print the tree output and diagnosis for every sample.
    Predict { model: PathBuf, cohort: PathBuf },
    /// Metric report of a model on a labelled cohort.
    Evaluate {
        model: PathBuf,
        cohort: PathBuf,
        /// Also write the report CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Paired standard vs dynamic harmony search runs.
    CompareHs {
        cohort: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
        #[command(flatten)]
        run: RunFlags,
        #[arg(long, default_value = "compare")]
        out: PathBuf,
    },
    /// Traditional CBC index formulas, optionally next to a trained model.
    Baselines {
        cohort: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic class-III cohort.
    Synth {
        #[arg(long)]
        n_ida: usize,
        #[arg(long)]
        n_btt: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Seeded train/test split of the non-NORMAL samples.
    Split {
        cohort: PathBuf,
        #[arg(long)]
        train: usize,
        #[arg(long)]
        test: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "split")]
        out: PathBuf,
    },
}

fn run(cmd: Command) -> Result<String> {
    match cmd {
        Command::Pbis { cohort, run } => commands::pbis(&cohort, &run.resolve()?),
        Command::Train { cohort, run, out } => commands::train(&cohort, &run.resolve()?, &out),
        Command::Predict { model, cohort } => commands::predict(&model, &cohort),
        Command::Evaluate { model, cohort, out } => commands::evaluate(&model, &cohort, out.as_deref()),
        Command::CompareHs { cohort, seeds, run, out } => commands::compare_hs(&cohort, &run.resolve()?, &seeds, &out),
        Command::Baselines { cohort, model, out } => commands::baselines(&cohort, model.as_deref(), out.as_deref()),
        Command::Synth { n_ida, n_btt, seed, out } => commands::synth(n_ida, n_btt, seed, &out),
        Command::Split { cohort, train, test, seed, out } => {
            commands::split_cohort(&cohort, SplitSpec::new(train, test, seed), &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(Error::exit_kind(&e) as u8)
        }
    }
}
