//! Batch experiment runner behind the `dynsync` binary.

mod config;
mod presets;
mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{
    validate_schema, AnalysisSpec, ExperimentConfig, InitialState, Method, ObservableName, ObservableSpec, RandomDraw, RandomField, RandomList,
    SCHEMA,
};
pub use presets::{list_presets, preset, Preset, PRESET_NAMES};
pub use run::{run_experiment, RunReport};

use crate::error::Error;

#[derive(Debug, Parser)]
#[command(name = "dynsync", version, about = "Synchronisation in dephased spin-1 and Hubbard chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Output directory (overrides `output_dir` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run a named preset.
    Preset {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List the available presets.
    ListPresets,
    /// Check a config against the schema without running it.
    Validate { config: PathBuf },
}

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Schema(_) | Error::Json(_) => 2,
        Error::DenseCapExceeded { .. } => 3,
        Error::Io(_) => 1,
        _ => 4,
    }
}

fn set_threads(threads: Option<usize>) -> Result<(), Error> {
    if let Some(k) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build_global()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn load(path: &PathBuf) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(path)?;
    ExperimentConfig::from_json(&text)
}

fn report(r: &RunReport, out: &std::path::Path) {
    println!("wrote {} files to {}", r.files.len() + 1, out.display());
    if let Some(s) = &r.summary {
        println!("{}", serde_json::to_string_pretty(s).unwrap_or_default());
    }
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config, out, threads } => {
            set_threads(threads)?;
            let cfg = load(&config)?;
            let out = out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("dynsync-out"));
            let r = run_experiment(&cfg, &out, None)?;
            report(&r, &out);
        }
        Command::Preset { name, out, seed, threads } => {
            set_threads(threads)?;
            let p = preset(&name).ok_or_else(|| Error::Schema(format!("unknown preset `{name}` (see list-presets)")))??;
            let p = match seed {
                Some(s) => p.with_seed(s),
                None => p,
            };
            let out = out.unwrap_or_else(|| PathBuf::from(format!("dynsync-{name}")));
            let extra = serde_json::to_value(&p)?;
            let r = run_experiment(&p.config, &out, Some(extra))?;
            report(&r, &out);
        }
        Command::ListPresets => {
            for p in list_presets() {
                println!("{:<24}{}", p.name, p.parameters);
                if let Some(s) = p.substitution {
                    println!("{:<24}[{s}]", "");
                }
            }
        }
        Command::Validate { config } => {
            load(&config)?;
            println!("{}: ok", config.display());
        }
    }
    Ok(())
}

/// Entry point shared by the binary and tests; returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
