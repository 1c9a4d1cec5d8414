use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use regge_cli::{commands, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "regge", about = "Regge poles and cross-section decompositions for a shell-plus-well potential")]
struct Args {
    /// Configuration file (`section.key = value` lines).
    #[arg(long, global = true, conflicts_with = "preset")]
    config: Option<String>,
    /// Built-in parameter set.
    #[arg(long, global = true, value_parser = ["fig2", "fig3", "fig4", "fig5"])]
    preset: Option<String>,
    /// Output file; overrides `output.path`. Standard output otherwise.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Worker threads for per-energy work (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Type of the trajectory through the selected level.
    Classify,
    /// Regge pole traced over the energy grid.
    Trajectory,
    /// Cross-section decomposition on the energy grid.
    Decompose,
    /// All poles in the scan region at each grid energy.
    Poles,
    /// Oracle comparison report.
    Verify,
}

fn load(args: &Args) -> Result<RunConfig, CliError> {
    Ok(match (&args.config, &args.preset) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(name)) => RunConfig::preset(name)?,
        (None, None) => RunConfig::default(),
    })
}

fn emit(path: Option<&str>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn run(args: &Args) -> Result<(), CliError> {
    if let Some(n) = args.threads {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let cfg = load(args)?;
    let out = args.out.clone().or_else(|| cfg.output_path.clone());
    let result = match args.command {
        Command::Classify => commands::cmd_classify(&cfg),
        Command::Trajectory => commands::cmd_trajectory(&cfg),
        Command::Decompose => commands::cmd_decompose(&cfg),
        Command::Poles => commands::cmd_poles(&cfg),
        Command::Verify => commands::cmd_verify(&cfg),
    };
    let written = match &result {
        Ok(text) | Err(CliError::Numerical { partial: Some(text), .. }) => emit(out.as_deref(), text),
        Err(_) => Ok(()),
    };
    if let Err(e) = written {
        return Err(CliError::Numerical { message: format!("writing output: {e}"), partial: None });
    }
    result.map(|_| ())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("regge: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
