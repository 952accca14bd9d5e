//! `spd` — decides ubiquity and strict positive definiteness of character
//! sets on `F x T^r`, emits machine-checkable certificates, re-verifies
//! them, computes zero sets, and runs the numerical verification harness.
//!
//! Exit codes: 0 decided/verified, 1 decided negative (with certificate),
//! 2 inconclusive (scan bounds exhausted), 64 input error.

mod commands;

use clap::{Parser, Subcommand, ValueEnum};
use std::io::Read;
use std::process::ExitCode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "spd", version, about = "Ubiquity and strict positive definiteness on F x T^r")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Payload file, or "-" for stdin.
    #[arg(long, global = true, default_value = "-")]
    input: String,

    /// Largest subgroup index visited by scans.
    #[arg(long, global = true, default_value_t = 12)]
    max_index: u64,

    /// Sup-norm search radius on the Z^r part.
    #[arg(long, global = true, default_value_t = 1000)]
    radius: i64,

    /// Numerical tolerance for the verification harness.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,

    /// Seed for randomized coefficient trials.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a set meets every finite-index coset.
    DecideUbiquity,
    /// Decide strict positive definiteness, with certificates.
    DecideSpd,
    /// Re-verify a previously emitted response and its certificate.
    Witness,
    /// Zero set of a rational-phase trigonometric polynomial.
    ZeroSet,
    /// Bounded subgroup/coset scan for ubiquity counterexamples.
    Scan,
    /// Synthesize a function from Fourier data and check the
    /// positive-definiteness identities numerically.
    SynthVerify,
    /// Desk-scale checks of the staircase counterexample family.
    Staircase,
}

fn read_payload(path: &str) -> std::io::Result<String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let params = commands::Params {
        max_index: cli.max_index,
        radius: cli.radius,
        tolerance: cli.tolerance,
        seed: cli.seed,
    };

    let payload = match read_payload(&cli.input) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{{\"error\": \"cannot read input: {e}\"}}");
            return ExitCode::from(64);
        }
    };

    let outcome = match cli.command {
        Command::DecideUbiquity => commands::decide_ubiquity(&payload, &params),
        Command::DecideSpd => commands::decide_spd(&payload, &params),
        Command::Witness => commands::witness(&payload, &params),
        Command::ZeroSet => commands::zero_set(&payload, &params),
        Command::Scan => commands::scan(&payload, &params),
        Command::SynthVerify => commands::synth_verify(&payload, &params),
        Command::Staircase => commands::staircase(&payload, &params),
    };

    match outcome {
        Ok(response) => {
            match cli.format {
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&response.body).expect("serializable"));
                }
                Format::Text => {
                    for line in &response.text {
                        println!("{line}");
                    }
                }
            }
            ExitCode::from(response.exit)
        }
        Err(e) => {
            let msg = serde_json::json!({ "error": e.to_string() });
            eprintln!("{}", serde_json::to_string(&msg).expect("serializable"));
            ExitCode::from(64)
        }
    }
}
