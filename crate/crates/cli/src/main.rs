//! `catlab`: command-line front end for the quantum cat-map lab.

mod commands;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use catlab::CatError;

#[derive(Parser, Debug)]
#[command(name = "catlab", version, about = "Quantum cat maps, coherent states and quasimodes")]
pub struct Cli {
    /// Cap on worker threads for parallel kernels (0 = one per core).
    #[arg(long, global = true, env = "CATLAB_THREADS", default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Anti-Wick quantization, read off the Husimi density.
    Aw,
    /// Weyl quantization (Fourier symbols only).
    W,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate the prime periodic orbits of exact length T.
    Orbits {
        /// Matrix entries A,B,C,D.
        #[arg(long, value_parser = commands::parse_matrix, allow_hyphen_values = true)]
        matrix: [i64; 4],
        /// Orbit length.
        #[arg(long = "T")]
        t: u32,
        /// Largest admissible lattice size Tr(M^T) - 2.
        #[arg(long, default_value_t = catlab::classical::DEFAULT_ENUMERATION_GUARD)]
        guard: u64,
        /// Output JSON file (stdout if omitted).
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Check unitarity and exact Egorov for the quantized map.
    PropagatorCheck {
        #[arg(long, value_parser = commands::parse_matrix, allow_hyphen_values = true)]
        matrix: [i64; 4],
        /// Hilbert-space dimension.
        #[arg(long = "N")]
        n: usize,
        /// Egorov is checked for all |n|_inf <= this bound.
        #[arg(long, default_value_t = 3)]
        max_freq: i64,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Husimi density of a stored state on a G x G grid, as CSV plus a JSON sidecar.
    Husimi {
        /// State file (CATSTATE binary or JSON).
        #[arg(long)]
        state: std::path::PathBuf,
        /// Map whose squeezing fixes the analyzing coherent states.
        #[arg(long, value_parser = commands::parse_matrix, allow_hyphen_values = true, default_value = "2,1,1,1")]
        matrix: [i64; 4],
        #[arg(long = "G", default_value_t = 256)]
        g: usize,
        #[arg(long)]
        out: std::path::PathBuf,
    },
    /// Expectation of a quantized symbol in a stored state.
    Expect {
        #[arg(long)]
        state: std::path::PathBuf,
        /// Symbol JSON: [[n1, n2, re, im], ...], or a sampled/bump object.
        #[arg(long)]
        symbol: std::path::PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Aw)]
        mode: Mode,
        #[arg(long, value_parser = commands::parse_matrix, allow_hyphen_values = true, default_value = "2,1,1,1")]
        matrix: [i64; 4],
        /// Quadrature grid for anti-Wick (default: resolution floor, at least 256).
        #[arg(long = "G")]
        g: Option<usize>,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Build a quasimode from a TOML config and run all diagnostics.
    Quasimode {
        #[arg(long)]
        config: std::path::PathBuf,
        /// Report path (overrides outputs.report).
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Run a scaling ladder from a TOML config and write a CSV table with a slope footer.
    Sweep {
        #[arg(long)]
        config: std::path::PathBuf,
        /// CSV path (overrides `out` in the config; stdout if neither is set).
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Run the numerical acceptance checks twice and compare the reports byte for byte.
    Selftest {
        #[arg(long, default_value_t = catlab::selftest::DEFAULT_SEED)]
        seed: u64,
        /// Comma-separated subset of criteria 1-9.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// Report path (stdout if omitted).
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
}

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;
pub const EXIT_INTERNAL: u8 = 4;

/// Failure of a subcommand, mapped onto an exit code.
#[derive(Debug)]
pub enum Failure {
    Cat(CatError),
    /// A check ran but did not pass.
    Checks(String),
    Internal(String),
}

impl From<CatError> for Failure {
    fn from(e: CatError) -> Self {
        Failure::Cat(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Cat(e) if e.is_numeric() => EXIT_NUMERIC,
            Failure::Cat(_) => EXIT_CONFIG,
            Failure::Checks(_) => EXIT_NUMERIC,
            Failure::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        let (kind, message) = match self {
            Failure::Cat(e) => (e.kind(), e.to_string()),
            Failure::Checks(m) => ("CheckFailed", m.clone()),
            Failure::Internal(m) => ("Internal", m.clone()),
        };
        serde_json::json!({ "error": kind, "message": message, "exit_code": self.code() })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("{}", Failure::Internal(e.to_string()).to_json());
            return ExitCode::from(EXIT_INTERNAL);
        }
    }
    let command = cli.command;
    let outcome = std::panic::catch_unwind(move || commands::dispatch(command));
    let failure = match outcome {
        Ok(Ok(())) => return ExitCode::SUCCESS,
        Ok(Err(f)) => f,
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Failure::Internal(msg)
        }
    };
    eprintln!("{}", failure.to_json());
    ExitCode::from(failure.code())
}
