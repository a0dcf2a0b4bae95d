use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use exchange_lab::config::ModelName;
use exchange_lab::{simulate, verify, zreport, LabError};

#[derive(Parser)]
#[command(name = "exchange-lab", version, about = "Energy exchange between a quantum system and its environment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a configured model over its time grid.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides output.path from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named verification suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Also check the model in this run configuration.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Print the expansion terms and the truncation-error table.
    Zassenhaus {
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long, default_value = "pauli")]
        scenario: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Model registry.
    Models {
        #[command(subcommand)]
        action: ModelsAction,
    },
}

#[derive(Subcommand)]
enum ModelsAction {
    List,
}

fn dispatch(cli: Cli) -> Result<(), LabError> {
    match cli.command {
        Command::Simulate { config, out } => simulate::cmd_simulate(&config, out.as_deref()),
        Command::Verify { suite, json, config } => {
            let report = verify::cmd_verify(&suite, json.as_deref(), config.as_deref())?;
            let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(LabError::Verification(format!("failed checks: {}", failed.join(", "))))
            }
        }
        Command::Zassenhaus { order, scenario, out } => zreport::cmd_zassenhaus(order, &scenario, out.as_deref()),
        Command::Models { action: ModelsAction::List } => {
            for m in ModelName::ALL {
                println!("{:<20}{}", m.as_str(), m.description());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
