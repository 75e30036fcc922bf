use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use laminate_cli::{run, Command};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Solve,
    Release,
    Evolve,
    Homogenize,
    Study,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Solve => Command::Solve,
            Cmd::Release => Command::Release,
            Cmd::Evolve => Command::Evolve,
            Cmd::Homogenize => Command::Homogenize,
            Cmd::Study => Command::Study,
        }
    }
}

/// Crack growth in layered anti-plane bodies.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Args {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `run.out` (default `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum)]
    command: Cmd,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(n) = args.threads {
        if n == 0 {
            eprintln!("--threads must be >= 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("cannot start thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", args.config.display());
            return ExitCode::from(1);
        }
    };
    let out = args.out.unwrap_or_else(|| {
        laminate_cli::parse_config_str(&text)
            .ok()
            .and_then(|c| c.out)
            .map_or_else(|| PathBuf::from("out"), PathBuf::from)
    });
    match run(args.command.into(), &text, &out) {
        Ok(summary) => {
            for line in &summary.lines {
                println!("{line}");
            }
            println!("wrote {} files to {}", summary.files.len(), summary.out_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
