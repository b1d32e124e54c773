mod config;
mod eval;
mod poles;
mod stokes;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::GlobalOpts;

/// q-Borel summation, q-hyperterminants and Stokes data from the command line.
#[derive(Parser, Debug)]
#[command(name = "qres", version, about)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a q-special function or a Borel–Laplace sum.
    Eval(eval::EvalArgs),
    /// Stokes multipliers of the order-one q-Painlevé solution.
    Stokes(stokes::StokesArgs),
    /// Poles, zeros and fixed points of the regular solution.
    Poles(poles::PolesArgs),
    /// Run the property suites.
    Verify(verify::VerifyArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match &cli.command {
        Command::Eval(a) => eval::run(a, &cli.global),
        Command::Stokes(a) => stokes::run(a, &cli.global),
        Command::Poles(a) => poles::run(a, &cli.global),
        Command::Verify(a) => verify::run(a, &cli.global),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(msg) = e.message() {
                eprintln!("qres: {msg}");
            }
            ExitCode::from(e.code())
        }
    }
}
