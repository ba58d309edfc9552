use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lmg_qudit::runner::{self, RunError};

#[derive(Parser)]
#[command(name = "sim", about = "LMG-on-a-qudit protocol runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every job in a TOML config (or a JSON sidecar from an earlier run).
    Run {
        config: PathBuf,
        /// Also write a matplotlib script per run.
        #[arg(long)]
        plot: bool,
        #[arg(long, env = "SIM_JOBS")]
        jobs: Option<usize>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the bundled config for a figure panel.
    Reproduce {
        figure: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        plot: bool,
        #[arg(long, env = "SIM_JOBS")]
        jobs: Option<usize>,
    },
    ListFigures,
}

fn set_jobs(jobs: Option<usize>) -> Result<(), RunError> {
    if let Some(n) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| RunError::Config(format!("--jobs: {e}")))?;
    }
    Ok(())
}

fn run_all(configs: &[runner::RunConfig], out: &std::path::Path, plot: bool) -> Result<(), RunError> {
    for cfg in configs {
        for path in runner::run_to_dir(cfg, out, plot)? {
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, plot, jobs, out } => {
            set_jobs(jobs).and_then(|_| run_all(&runner::load_config(&config)?, &out, plot))
        }
        Command::Reproduce { figure, out, plot, jobs } => set_jobs(jobs).and_then(|_| {
            let fig = runner::figure(&figure)?;
            let out = out.unwrap_or_else(|| PathBuf::from(format!("figure_{}", fig.id)));
            run_all(&runner::parse_config(fig.config, false)?, &out, plot)
        }),
        Command::ListFigures => {
            for f in &runner::FIGURES {
                println!("{:<4} {}", f.id, f.description);
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
