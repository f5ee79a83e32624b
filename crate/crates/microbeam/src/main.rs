use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use microbeam::commands;
use microbeam::fsutil::read_text;
use microbeam::{ExperimentConfig, Profile, Result};

/// Two-beam micro-Doppler walker classification.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// Base parameter set; config files override it key by key.
    #[arg(long, value_enum, default_value_t = Profile::Desk, global = true)]
    profile: Profile,
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides scene.master_seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize raw data cubes and a manifest.
    Simulate {
        #[arg(long)]
        out: PathBuf,
    },
    /// Beamform and compute spectrogram pairs for every cube.
    Process {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit PCA and nearest-neighbor models on the training split.
    Train {
        #[arg(long)]
        spectrograms: PathBuf,
        #[arg(long)]
        model: PathBuf,
    },
    /// Print the confusion matrix on held-out examples.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        spectrograms: PathBuf,
        /// Score every listed example, including the training ones.
        #[arg(long)]
        all: bool,
    },
    /// Write a PGM preview of a spectrogram file.
    Render {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the effective configuration.
    Config,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let text = match &cli.config {
        Some(path) => read_text(path)?,
        None => String::new(),
    };
    let mut cfg = ExperimentConfig::parse(&text, cli.profile)?;
    if let Some(seed) = cli.seed {
        cfg.scene.master_seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate { out } => {
            let cfg = load_config(&cli)?;
            let entries = commands::simulate(&cfg, out)?;
            println!("wrote {} cubes to {}", entries.len(), out.display());
        }
        Command::Process { dataset, out } => {
            let cfg = load_config(&cli)?;
            let pairs = commands::process(&cfg, dataset, out)?;
            println!("wrote {} spectrogram pairs to {}", pairs.len(), out.display());
        }
        Command::Train { spectrograms, model } => {
            let cfg = load_config(&cli)?;
            let trained = commands::train(&cfg, spectrograms, model)?;
            println!(
                "trained on {} examples, feature length {}, saved {}",
                trained.train_indices.len(),
                trained.nn.dim(),
                model.display()
            );
        }
        Command::Evaluate {
            model,
            spectrograms,
            all,
        } => {
            let cm = commands::evaluate(model, spectrograms, *all)?;
            print!("{}", commands::report(&cm));
        }
        Command::Render { input, out } => {
            let out = out.clone().unwrap_or_else(|| commands::default_render_path(input));
            let (w, h) = commands::render(input, &out)?;
            println!("wrote {w}x{h} image to {}", out.display());
        }
        Command::Config => print!("{}", load_config(&cli)?.to_text()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

