//! `qcarrier` — command-line front end for the secure-carrier simulator.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 detection/verification
//! failure. Log level comes from the QCARRIER_LOG environment variable.

mod commands;
mod config;

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "qcarrier",
    version,
    about = "Secure quantum carrier protocol simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct IoArgs {
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Run a session from a TOML/JSON scenario and write its transcript
    RunSession {
        /// Scenario file (TOML, JSON accepted)
        #[arg(long)]
        config: PathBuf,
        /// Overrides the scenario's rng_seed
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Print the basis-vector relation table and code residuals for (k, n)
    VerifyCode {
        /// Threshold k
        k: u32,
        /// Player count n (odd prime)
        n: u32,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Check carrier invariance, round trips and in-transit secrecy
    VerifyCarrier {
        /// Scheme variant
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        /// Threshold k (kn only)
        #[arg(short, long)]
        k: Option<u32>,
        /// Player count n (nn and kn)
        #[arg(short, long)]
        n: Option<u32>,
        /// Round parity for the (2,2)/(n,n) carriers
        #[arg(long, value_enum, default_value_t = ParityArg::Odd)]
        parity: ParityArg,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Run an adversary experiment described by a config file
    Attack {
        /// Attack description (TOML, JSON accepted)
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for Monte Carlo sweeps
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Power-sum table S_k(p) for all primes p ≤ p-max, cross-checked
    PowerSums {
        /// Largest modulus to tabulate (≤ 101)
        #[arg(long = "p-max")]
        p_max: u32,
        #[command(flatten)]
        io: IoArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Kd,
    TwoTwo,
    Nn,
    Kn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ParityArg {
    Odd,
    Even,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("QCARRIER_LOG", "warn"))
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err)
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) =>
        {
            print!("{err}");
            std::process::exit(0);
        }
        Err(err) => {
            eprintln!("{err}");
            std::process::exit(1);
        }
    };

    let outcome = match cli.command {
        Command::RunSession { config, seed, io } => commands::run_session(&config, seed, &io),
        Command::VerifyCode { k, n, io } => commands::verify_code(k, n, &io),
        Command::VerifyCarrier {
            scheme,
            k,
            n,
            parity,
            io,
        } => commands::verify_carrier(scheme, k, n, parity, &io),
        Command::Attack {
            config,
            seed,
            jobs,
            io,
        } => commands::attack(&config, seed, jobs, &io),
        Command::PowerSums { p_max, io } => commands::power_sums(p_max, &io),
    };

    match outcome {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(1);
        }
    }
}
