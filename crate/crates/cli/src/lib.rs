//! Command-line front end for `bargmann-core`.
//!
//! [`run_command`] parses an argument vector, runs one library operation and
//! writes JSON (or CSV where supported) to the given writer. Exit codes: 0 on
//! success, 2 for usage and input validation errors, 1 for numerical failures.

mod commands;
mod document;

use std::io::Write;
use std::path::{Path, PathBuf};

use bargmann_core::linalg::StateTuple;
use bargmann_core::Error as CoreError;
use clap::{Args, Parser, Subcommand, ValueEnum};

pub use document::{tuple_document, validate_document, StateEntry, StateKind, TupleDocument, ValidationError};

/// Environment variable that overrides `--seed`.
pub const SEED_ENV: &str = "BARGMANN_SEED";
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EquivalenceMode {
    Unitary,
    Projective,
    Orbit,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Seed for randomized commands (overridden by BARGMANN_SEED).
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Worker threads for seeded Monte-Carlo work; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, global = true, default_value_t = bargmann_core::tolerance::PSD_FLOOR)]
    pub psd_floor: f64,
    #[arg(long, global = true, default_value_t = bargmann_core::tolerance::EQUALITY_TOL)]
    pub equality_tol: f64,
    #[arg(long, global = true, default_value_t = bargmann_core::tolerance::BOUNDARY_TOL)]
    pub boundary_tol: f64,
    /// Largest shot count per part accepted by `estimate`.
    #[arg(long, global = true, default_value_t = 100_000_000)]
    pub shot_cap: usize,
}

#[derive(Debug, Parser)]
#[command(name = "bargmann", version, about = "Bargmann invariants of quantum state tuples")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Invariant Tr(rho_1 ... rho_n) of a tuple.
    Invariant {
        #[arg(long)]
        input: PathBuf,
    },
    /// Invariant of a re-indexed tuple (zero-based, comma separated, repeats allowed).
    Nproduct {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        indices: Vec<usize>,
    },
    /// Boundary curve r_n(theta) of the attainable region.
    Boundary {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 360)]
        points: usize,
    },
    /// Whether a complex number lies in the attainable region.
    Membership {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        re: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        im: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Leftmost real point and largest imaginary part of the region.
    Bounds {
        #[arg(long)]
        n: usize,
    },
    /// Extremal qubit tuple with parameter t (or the one reaching angle theta).
    Obg {
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with = "theta")]
        t: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
    },
    /// Envelope parameter t* at a point (defaults to the boundary point at theta).
    Envelope {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        r: Option<f64>,
    },
    /// Circulant tuple with the same invariant phase and no smaller modulus.
    Circulantize {
        #[arg(long)]
        input: PathBuf,
    },
    /// Circulant channel: Choi matrix summary, or its action on the Gram matrix of a tuple.
    Channel {
        #[arg(long, required_unless_present = "input")]
        n: Option<usize>,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Joint unitary, projective-unitary or mixed-orbit equivalence of two tuples.
    Equivalence {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long, value_enum, default_value_t = EquivalenceMode::Projective)]
        mode: EquivalenceMode,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long, default_value_t = bargmann_core::equivalence::DEFAULT_WORD_CAP)]
        word_cap: usize,
    },
    /// Rebuild a tuple from its invariants.
    Reconstruct {
        #[arg(long)]
        input: PathBuf,
    },
    /// Simulated cycle-test estimate of the invariant.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
    },
    /// Overlap statistics of Haar-random pairs.
    PdfSample {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 100_000)]
        pairs: usize,
    },
    /// The 18 local-unitary invariants of a two-qubit state.
    Lu {
        #[arg(long)]
        input: PathBuf,
    },
    /// Entanglement of a two-qubit state from seven invariants, with the PPT check.
    Entanglement {
        #[arg(long)]
        input: PathBuf,
    },
    /// Quadratic satisfied by the invariant of a qubit tuple.
    Imaginarity {
        #[arg(long)]
        input: PathBuf,
    },
}

/// Validated runtime settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub psd_floor: f64,
    pub equality_tol: f64,
    pub boundary_tol: f64,
    pub shot_cap: usize,
    pub threads: usize,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn from_args(g: &GlobalArgs, env_seed: Option<&str>) -> Result<Self, CliError> {
        let seed = match env_seed {
            Some(s) => s
                .trim()
                .parse()
                .map_err(|_| CliError::Validation(format!("{SEED_ENV}={s:?} is not a 64-bit unsigned integer")))?,
            None => g.seed,
        };
        for (name, v) in [
            ("psd-floor", g.psd_floor),
            ("equality-tol", g.equality_tol),
            ("boundary-tol", g.boundary_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Validation(format!("--{name} must be positive, got {v}")));
            }
        }
        if g.threads == 0 {
            return Err(CliError::Validation("--threads must be at least 1".into()));
        }
        Ok(Self {
            seed,
            psd_floor: g.psd_floor,
            equality_tol: g.equality_tol,
            boundary_tol: g.boundary_tol,
            shot_cap: g.shot_cap,
            threads: g.threads,
            format: g.format,
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::CrossCheck(_) | CoreError::NotRealizable(_) | CoreError::InconsistentOracle { .. } => {
                CliError::Numeric(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<ValidationError> for CliError {
    fn from(e: ValidationError) -> Self {
        CliError::Validation(e.to_string())
    }
}

/// Reads and validates a tuple document.
pub fn load_tuple(path: &Path) -> Result<StateTuple, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let doc: TupleDocument = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    validate_document(&doc).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Runs one command line (`argv[0]` is the program name), reading the seed
/// override from the environment.
pub fn run_command(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let env_seed = std::env::var(SEED_ENV).ok();
    run_command_with_seed(argv, env_seed.as_deref(), out, err)
}

/// [`run_command`] with the seed override passed explicitly.
pub fn run_command_with_seed(argv: &[String], env_seed: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    let result = RunConfig::from_args(&cli.global, env_seed).and_then(|cfg| commands::dispatch(&cli.command, &cfg, out));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
