//! `verify`: runs the verification suites and writes a JSON report.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lieharm::harness::{exit_code, run, RunConfig};
use lieharm::Error;

#[derive(Parser, Debug)]
#[command(name = "verify", version, about = "Seeded verification of eigenfunctions and p-harmonic functions on compact symmetric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Spaces or groups, e.g. `SUn_SOn:3`, `Spn_Un` or `SO:4` (repeatable, comma separated).
    #[arg(long, global = true)]
    space: Vec<String>,
    /// Values of n for entries without one, e.g. `2,3,4`.
    #[arg(long, global = true)]
    n: Option<String>,
    #[arg(long, global = true)]
    samples: Option<String>,
    #[arg(long, global = true)]
    tol: Option<String>,
    #[arg(long, global = true)]
    sigma: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long = "p-max", global = true)]
    p_max: Option<String>,
    /// Cap on jet evaluations per iterated Laplacian.
    #[arg(long, global = true)]
    budget: Option<String>,
    /// Config file with `key = value` lines and `[suite]` sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Report path.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    Eigen,
    Dual,
    Pharmonic,
    Identities,
    Crosscheck,
    All,
}

fn build_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        cfg.apply_file(&text)?;
    }
    cfg.apply_env(std::env::vars())?;
    if !cli.space.is_empty() {
        cfg.set("space", &cli.space.join(","))?;
    }
    let flags = [
        ("n", &cli.n),
        ("samples", &cli.samples),
        ("tol", &cli.tol),
        ("sigma", &cli.sigma),
        ("seed", &cli.seed),
        ("p_max", &cli.p_max),
        ("budget", &cli.budget),
        ("out", &cli.out),
        ("jobs", &cli.jobs),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    match cli.command {
        None => {}
        Some(Command::All) => cfg.set("suites", "eigen,dual,pharmonic,identities,crosscheck")?,
        Some(c) => cfg.set("suites", &format!("{c:?}").to_ascii_lowercase())?,
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = build_config(&cli).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(report) => {
            print!("{}", report.summary_table());
            ExitCode::from(exit_code(&report) as u8)
        }
        Err(e) => {
            eprintln!("verify: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
