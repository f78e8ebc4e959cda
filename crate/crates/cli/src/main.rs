use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use driftheat_cli::config::CheckName;
use driftheat_cli::run::{default_scenario, identities, schur, sweep, table, transfer, verify};
use driftheat_cli::{CliError, RunReport, Scenario};

#[derive(Parser)]
#[command(name = "driftheat", version, about = "Drift heat semigroup verification lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Common {
    /// Scenario file (TOML)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the scenario seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for report.jsonl and CSV files
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks listed in a scenario
    Verify(Common),
    /// Sweep c, gamma, epsilon or tau as given in the scenario's [sweep] section
    Sweep(Common),
    /// Divergence and Bochner identities on seeded random jets
    Identities {
        #[command(flatten)]
        common: Common,
        /// Jets per batch
        #[arg(long)]
        count: Option<usize>,
    },
    /// Schur-test algebra and row constants
    Schur(Common),
    /// Soliton-to-flow norm identity and heat-kernel checks
    Transfer(Common),
    /// Reproduce the three reference tables as CSV
    Table(Common),
}

fn load(c: &Common, name: &str, checks: Vec<CheckName>, required: bool) -> Result<Scenario, CliError> {
    let mut s = match &c.config {
        Some(p) => Scenario::load(p)?,
        None if required => return Err(CliError::Config("--config is required".into())),
        None => default_scenario(name, checks),
    };
    if let Some(seed) = c.seed {
        s.seed = Some(seed);
    }
    Ok(s)
}

fn execute(cmd: Command) -> Result<(RunReport, PathBuf), CliError> {
    Ok(match cmd {
        Command::Verify(c) => (verify(&load(&c, "verify", vec![], true)?, c.jobs)?, c.out),
        Command::Sweep(c) => (sweep(&load(&c, "sweep", vec![], true)?, c.jobs)?, c.out),
        Command::Identities { common, count } => {
            let mut s = load(&common, "identities", vec![], false)?;
            if let Some(n) = count {
                if n == 0 {
                    return Err(CliError::Config("--count must be positive".into()));
                }
                s.identities.count = n;
            }
            (identities(&s, common.jobs)?, common.out)
        }
        Command::Schur(c) => (schur(&load(&c, "schur", vec![], false)?, c.jobs)?, c.out),
        Command::Transfer(c) => (transfer(&load(&c, "transfer", vec![], false)?, c.jobs)?, c.out),
        Command::Table(c) => {
            let s = load(&c, "table", vec![], false)?;
            (table(&s, &c.out)?, c.out)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(cli.command).and_then(|(report, out)| {
        report.write(&out)?;
        print!("{}", report.table());
        Ok(report.exit_code())
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("driftheat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
