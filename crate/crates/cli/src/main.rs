//! `hyperschottky`: period matrices, reconstruction, invariants and identity
//! checks from the command line, with JSON in and out.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 bad input, 3 numerical
//! non-convergence, 4 hyperellipticity failure, 5 inversion failure.

mod commands;
mod doc;

use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hyperschottky::algebra::AlgebraError;
use hyperschottky::identities::IdentityError;
use hyperschottky::igusa::IgusaError;
use hyperschottky::periods::PeriodError;
use hyperschottky::reconstruct::ReconstructError;
use hyperschottky::symcurve::SymError;
use hyperschottky::theta::ThetaError;

#[derive(Parser, Debug)]
#[command(name = "hyperschottky", version, about = "Hyperelliptic curves from period matrices and back")]
struct Cli {
    /// Working precision in decimal digits.
    #[arg(long, global = true, default_value_t = 50)]
    digits: u32,
    /// Acceptance tolerance for checks and verifications.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Output file (`-` for stdout).
    #[arg(short, long, global = true, default_value = "-")]
    output: String,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Ω₁, Ω₂, Z and the characteristic dictionary of a real-rooted curve.
    Periods {
        /// Curve document (`-` for stdin).
        input: String,
    },
    /// Symmetric model from a normalized period matrix Z.
    Reconstruct {
        input: String,
        #[arg(long)]
        genus: Option<usize>,
    },
    /// Igusa–Clebsch invariants, discriminants and bad-reduction primes.
    Invariants { input: String },
    /// Symmetric genus-2 models with given Igusa–Clebsch invariants.
    IgusaInvert {
        input: String,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
    },
    /// Numerical identity checks.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
pub enum Mode {
    Exact,
    Numeric,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
pub enum Suite {
    Thomae,
    Rosenhain,
    Frobenius,
    Igusa,
    Jacobi,
    All,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub msg: String,
}

impl CliError {
    pub fn new(code: u8, msg: impl Into<String>) -> Self {
        CliError { code, msg: msg.into() }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        Self::new(2, msg)
    }

    pub fn from_algebra(e: AlgebraError) -> Self {
        match e {
            AlgebraError::NoConvergence { .. } => Self::new(3, e.to_string()),
            _ => Self::input(e.to_string()),
        }
    }

    pub fn from_sym(e: SymError) -> Self {
        match e {
            SymError::Algebra(a) => Self::from_algebra(a),
            _ => Self::input(e.to_string()),
        }
    }

    pub fn from_theta(e: ThetaError) -> Self {
        match e {
            ThetaError::RadiusCap { .. } => Self::new(3, e.to_string()),
            _ => Self::input(e.to_string()),
        }
    }

    pub fn from_period(e: PeriodError) -> Self {
        match e {
            PeriodError::NonReal(_) | PeriodError::Collision(..) => Self::input(e.to_string()),
            PeriodError::Theta(t) => Self::from_theta(t),
            _ => Self::new(3, e.to_string()),
        }
    }

    pub fn from_reconstruct(e: ReconstructError) -> Self {
        match e {
            ReconstructError::Theta(t) => Self::from_theta(t),
            ReconstructError::Sym(s) => Self::from_sym(s),
            ReconstructError::Genus { .. } | ReconstructError::Parity(_) => Self::input(e.to_string()),
            ReconstructError::NotHyperelliptic { .. }
            | ReconstructError::NoPair
            | ReconstructError::Companions(_)
            | ReconstructError::AuxiliaryMismatch(_) => Self::new(4, e.to_string()),
            _ => Self::new(3, e.to_string()),
        }
    }

    pub fn from_igusa(e: IgusaError) -> Self {
        match e {
            IgusaError::NoCandidate | IgusaError::Elimination(_) => Self::new(5, e.to_string()),
            IgusaError::Algebra(a) => Self::from_algebra(a),
            _ => Self::input(e.to_string()),
        }
    }

    pub fn from_identity(e: IdentityError) -> Self {
        match e {
            IdentityError::Period(p) => Self::from_period(p),
            IdentityError::Theta(t) => Self::from_theta(t),
            _ => Self::input(e.to_string()),
        }
    }
}

fn read_input(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| CliError::input(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| CliError::input(format!("{path}: {e}")))
    }
}

fn write_output(path: &str, text: &str) -> Result<(), CliError> {
    if path == "-" {
        let mut out = io::stdout().lock();
        out.write_all(text.as_bytes()).and_then(|_| out.write_all(b"\n")).map_err(|e| CliError::input(format!("stdout: {e}")))
    } else {
        fs::write(path, format!("{text}\n")).map_err(|e| CliError::input(format!("{path}: {e}")))
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    if cli.digits < 10 {
        return Err(CliError::input("--digits must be at least 10"));
    }
    let p = hyperschottky::num::Precision::digits(cli.digits);
    let (value, code) = match &cli.cmd {
        Cmd::Periods { input } => (commands::periods(&read_input(input)?, p)?, 0),
        Cmd::Reconstruct { input, genus } => (commands::reconstruct(&read_input(input)?, *genus, p, cli.tol)?, 0),
        Cmd::Invariants { input } => (commands::invariants(&read_input(input)?, p)?, 0),
        Cmd::IgusaInvert { input, mode } => (commands::igusa_invert(&read_input(input)?, *mode, p, cli.tol)?, 0),
        Cmd::Verify { suite, seed } => {
            let (v, ok) = commands::verify(*suite, *seed, p, cli.tol)?;
            (v, if ok { 0 } else { 1 })
        }
    };
    let text = serde_json::to_string_pretty(&value).expect("serializable");
    write_output(&cli.output, &text)?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let doc = serde_json::json!({ "error": e.msg, "exit_code": e.code });
            eprintln!("{doc}");
            ExitCode::from(e.code)
        }
    }
}
