//! Command-line front end for the ringideal engine.
//!
//! [`run`] executes one [`RunConfig`] and returns the exit code together
//! with the rendered report; `main.rs` only parses flags.

mod bench;
mod commands;
mod report;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ringideal::blackbox::{RingSpec, Side};
use ringideal::qsim::Backend;
use ringideal::ringops::PrimeTestMethod;
use ringideal::Error;

pub use bench::{bench_queries, fit_exponent, BenchFamily, BenchRow, BenchTable};
pub use report::{Report, SCHEMA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_LOW_CONFIDENCE: i32 = 4;
pub const EXIT_VERIFY_DIVERGED: i32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Basis,
    Order,
    RingOrder,
    Equal,
    Member,
    Witness,
    Intersect,
    Colon,
    Annihilate,
    Unit,
    Inverse,
    One,
    Zero,
    Neg,
    Solve,
    Prime,
    HomKernel,
    HomInjective,
    HomSurjective,
    BenchQueries,
}

impl Command {
    pub const ALL: [Command; 20] = [
        Command::Basis,
        Command::Order,
        Command::RingOrder,
        Command::Equal,
        Command::Member,
        Command::Witness,
        Command::Intersect,
        Command::Colon,
        Command::Annihilate,
        Command::Unit,
        Command::Inverse,
        Command::One,
        Command::Zero,
        Command::Neg,
        Command::Solve,
        Command::Prime,
        Command::HomKernel,
        Command::HomInjective,
        Command::HomSurjective,
        Command::BenchQueries,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Basis => "basis",
            Command::Order => "order",
            Command::RingOrder => "ring-order",
            Command::Equal => "equal",
            Command::Member => "member",
            Command::Witness => "witness",
            Command::Intersect => "intersect",
            Command::Colon => "colon",
            Command::Annihilate => "annihilate",
            Command::Unit => "unit",
            Command::Inverse => "inverse",
            Command::One => "one",
            Command::Zero => "zero",
            Command::Neg => "neg",
            Command::Solve => "solve",
            Command::Prime => "prime",
            Command::HomKernel => "hom-kernel",
            Command::HomInjective => "hom-injective",
            Command::HomSurjective => "hom-surjective",
            Command::BenchQueries => "bench-queries",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown command `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputMode {
    #[default]
    Human,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Path of a ring description file, or the description itself.
    pub ring: Option<String>,
    pub ideal: Option<String>,
    pub ideal2: Option<String>,
    pub side: Side,
    pub element: Option<String>,
    pub element2: Option<String>,
    /// Codomain ring for the homomorphism commands, like `ring`.
    pub codomain: Option<String>,
    /// Rows of the coordinate matrix of the homomorphism, `a,b;c,d`.
    pub hom: Option<String>,
    pub backend: Backend,
    pub seed: u64,
    pub epsilon: f64,
    pub verify: bool,
    pub count_queries: bool,
    pub output: OutputMode,
    pub prime_method: PrimeTestMethod,
    pub family: BenchFamily,
    pub k_min: u32,
    pub k_max: u32,
    pub debug_codes: bool,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            ring: None,
            ideal: None,
            ideal2: None,
            side: Side::TwoSided,
            element: None,
            element2: None,
            codomain: None,
            hom: None,
            backend: Backend::Exact,
            seed: 0,
            epsilon: 1e-6,
            verify: false,
            count_queries: false,
            output: OutputMode::Human,
            prime_method: PrimeTestMethod::Divisor,
            family: BenchFamily::Modular,
            k_min: 4,
            k_max: 14,
            debug_codes: false,
        }
    }
}

/// Exit code and rendered report of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub exit_code: i32,
    pub output: String,
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::InvalidSpec { .. } | Error::InvalidCode(_) => EXIT_PARSE,
        Error::LowConfidence(_) => EXIT_LOW_CONFIDENCE,
        _ => EXIT_PRECONDITION,
    }
}

/// Reads a ring from a file path or from inline text, accepting either the
/// `ring.key = value` format or the one-line form such as `modular 12`.
pub fn load_ring_spec(source: &str) -> Result<RingSpec, Error> {
    let text = if Path::new(source).is_file() {
        std::fs::read_to_string(source).map_err(|e| Error::Parse(format!("cannot read `{source}`: {e}")))?
    } else {
        source.to_string()
    };
    if text.contains('=') {
        RingSpec::parse_description(&text)
    } else {
        text.trim().parse()
    }
}

pub fn parse_side(s: &str) -> Result<Side, Error> {
    match s {
        "left" => Ok(Side::Left),
        "right" => Ok(Side::Right),
        "two" | "two-sided" | "both" => Ok(Side::TwoSided),
        other => Err(Error::Parse(format!("unknown side `{other}`"))),
    }
}

pub fn parse_prime_method(s: &str) -> Result<PrimeTestMethod, Error> {
    match s {
        "divisor" => Ok(PrimeTestMethod::Divisor),
        "period" => Ok(PrimeTestMethod::Period),
        other => Err(Error::Parse(format!("unknown prime-test method `{other}`"))),
    }
}

/// Runs one command.
pub fn run(config: &RunConfig) -> Outcome {
    let mut report = Report::new(config);
    let code = match commands::execute(config, &mut report) {
        Ok(code) => code,
        Err(e) => {
            report.set_error(&e);
            exit_code_for(&e)
        }
    };
    let output = match config.output {
        OutputMode::Json => report.to_json(),
        OutputMode::Human => report.to_human(config.count_queries),
    };
    Outcome { exit_code: code, output }
}
