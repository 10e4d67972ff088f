use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qchaos_cli::{output_dir, run_in, validate, ExperimentKind};

#[derive(Parser)]
#[command(name = "qchaos", version, about = "Coherence-based quantum chaos experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Overrides the config's output directory and $QCHAOS_OUTPUT_DIR.
        #[arg(short, long)]
        output_dir: Option<PathBuf>,
    },
    /// Check a config file and report every problem found.
    Validate { config: PathBuf },
    /// List the experiment kinds.
    ListExperiments,
}

fn load(path: &PathBuf) -> Result<qchaos_cli::ExperimentConfig, ExitCode> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return Err(ExitCode::from(1));
        }
    };
    validate(&text).map_err(|errors| {
        eprintln!("{}: {} problem(s)", path.display(), errors.0.len());
        for e in &errors.0 {
            eprintln!("  {e}");
        }
        ExitCode::from(2)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListExperiments => {
            for k in ExperimentKind::ALL {
                println!("{:<16}{}", k.name(), k.description());
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match load(&config) {
            Ok(c) => {
                println!("{}: ok ({})", config.display(), c.experiment.name());
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
        Command::Run { config, output_dir: dir } => {
            let c = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let dir = output_dir(&c, dir.as_deref());
            match run_in(&c, &dir) {
                Ok(m) => {
                    for f in &m.files {
                        println!("{}  {} rows", dir.join(&f.name).display(), f.rows);
                    }
                    println!("done in {:.2} s", m.wall_time_seconds);
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}

