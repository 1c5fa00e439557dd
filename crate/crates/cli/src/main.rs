use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oddsym_core::config::{ExperimentConfig, Task};
use oddsym_core::experiment::{execute, load_config, preset_catalog, write_artifacts, RunStatus};

#[derive(Parser)]
#[command(name = "oddsym", version, about = "Weighted double-well energies: minimizers, bounds and certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the task of a config file (or built-in preset name).
    Run {
        config: String,
        /// Output directory; `ODDSYM_OUT` takes precedence.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        mesh: Option<usize>,
        /// Worker threads; 0 means available parallelism.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// List the built-in configs.
    Presets,
    /// Print the hypothesis audit of a config as JSON.
    Audit { config: String },
}

fn load(path: &str) -> Result<ExperimentConfig, ExitCode> {
    load_config(path).map_err(|e| {
        eprintln!("oddsym: {path}: {e}");
        ExitCode::from(1)
    })
}

fn code(status: RunStatus) -> ExitCode {
    ExitCode::from(status.exit_code() as u8)
}

fn run(config: &str, out: Option<PathBuf>, seed: Option<u64>, mesh: Option<usize>, jobs: Option<usize>) -> Result<ExitCode, ExitCode> {
    let mut cfg = load(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(n) = mesh {
        cfg.mesh = n;
    }
    if let Some(j) = jobs {
        cfg.jobs = j;
    }
    let dir = std::env::var_os("ODDSYM_OUT")
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .or(out)
        .or_else(|| cfg.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(&cfg.name));
    let result = execute(&cfg);
    if let Some(msg) = &result.message {
        eprintln!("oddsym: {}: {msg}", cfg.name);
    }
    match write_artifacts(&dir, &result) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            Ok(code(result.status))
        }
        Err(e) => {
            eprintln!("oddsym: writing {}: {e}", dir.display());
            Err(ExitCode::from(1))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.command {
        Command::Run {
            config,
            out,
            seed,
            mesh,
            jobs,
        } => run(&config, out, seed, mesh, jobs),
        Command::Presets => {
            for (name, text) in preset_catalog() {
                match ExperimentConfig::parse(text) {
                    Ok(c) => println!("{name:<28} {:<9} {}", c.task.name(), c.exercises),
                    Err(e) => println!("{name:<28} invalid: {e}"),
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Audit { config } => load(&config).map(|mut cfg| {
            cfg.task = Task::Audit;
            let result = execute(&cfg);
            match result.artifact("report.json") {
                Some(r) => print!("{r}"),
                None => eprintln!("oddsym: {}", result.message.as_deref().unwrap_or("audit failed")),
            }
            code(result.status)
        }),
    };
    r.unwrap_or_else(|c| c)
}
