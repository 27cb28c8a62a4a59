use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kreiss_lab::artifacts::format_float;
use kreiss_lab::{config, describe, exit, run_config, OUT_ENV};

#[derive(Parser)]
#[command(name = "kreiss-lab", version, about = "Resolvent and semigroup growth-bound laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the stages of a config and write artifacts.
    Run {
        config: PathBuf,
        /// Output directory; overrides the config and the environment.
        #[arg(long, env = OUT_ENV)]
        out: Option<PathBuf>,
    },
    /// Print the plan of a config without computing anything.
    Describe { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, out } => match run_config(&config, out) {
            Ok((output, dir)) => {
                for e in &output.report.entries {
                    println!(
                        "{} {} margin={} slack={}",
                        if e.pass { "PASS" } else { "FAIL" },
                        e.check,
                        format_float(e.worst_margin),
                        format_float(e.slack)
                    );
                }
                println!("artifacts: {}", dir.display());
                if output.all_pass() {
                    exit::PASS
                } else {
                    exit::VERIFICATION_FAILED
                }
            }
            Err(err) => {
                eprintln!("error: {err}");
                err.exit_code()
            }
        },
        Command::Describe { config } => match config::load(&config).and_then(|c| c.plan()) {
            Ok(plan) => {
                print!("{}", describe::describe(&plan));
                exit::PASS
            }
            Err(err) => {
                eprintln!("error: {err}");
                err.exit_code()
            }
        },
    };
    ExitCode::from(code)
}
