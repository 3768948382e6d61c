use std::process::ExitCode;

use clap::Parser;
use ringideal::qsim::Backend;
use ringideal_cli::{parse_prime_method, parse_side, run, BenchFamily, Command, OutputMode, RunConfig, EXIT_PARSE};

/// Ideal computations in black-box finite rings.
#[derive(Debug, Parser)]
#[command(name = "ringideal", version)]
struct Args {
    /// Operation to run.
    #[arg(value_enum)]
    command: Command,

    /// Ring description file, or the description inline (e.g. "modular 12").
    #[arg(long)]
    ring: Option<String>,

    /// Comma-separated generator literals of the ideal.
    #[arg(long)]
    ideal: Option<String>,

    /// Generators of the second ideal.
    #[arg(long)]
    ideal2: Option<String>,

    /// left, right or two.
    #[arg(long, default_value = "two")]
    side: String,

    /// Element literal (the `a` of `solve`).
    #[arg(long)]
    element: Option<String>,

    /// Second element literal (the `b` of `solve`).
    #[arg(long)]
    element2: Option<String>,

    /// Codomain ring of the homomorphism.
    #[arg(long)]
    codomain: Option<String>,

    /// Homomorphism as a matrix on additive coordinates, rows split by `;`.
    #[arg(long)]
    hom: Option<String>,

    #[arg(long, default_value = "exact")]
    backend: String,

    #[arg(long, env = "RINGIDEAL_SEED", default_value_t = 0)]
    seed: u64,

    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,

    /// Cross-check against brute force (small rings only).
    #[arg(long)]
    verify: bool,

    /// Print oracle query counts.
    #[arg(long)]
    count_queries: bool,

    /// Emit one JSON document.
    #[arg(long)]
    json: bool,

    /// divisor or period.
    #[arg(long, default_value = "divisor")]
    prime_method: String,

    #[arg(long, value_enum, default_value = "modular")]
    family: BenchFamily,

    #[arg(long, default_value_t = 4)]
    k_min: u32,

    #[arg(long, default_value_t = 14)]
    k_max: u32,

    /// Show raw element codes next to literals.
    #[arg(long)]
    debug_codes: bool,
}

fn config(a: Args) -> Result<RunConfig, ringideal::Error> {
    Ok(RunConfig {
        command: a.command,
        ring: a.ring,
        ideal: a.ideal,
        ideal2: a.ideal2,
        side: parse_side(&a.side)?,
        element: a.element,
        element2: a.element2,
        codomain: a.codomain,
        hom: a.hom,
        backend: a.backend.parse::<Backend>()?,
        seed: a.seed,
        epsilon: a.epsilon,
        verify: a.verify,
        count_queries: a.count_queries,
        output: if a.json { OutputMode::Json } else { OutputMode::Human },
        prime_method: parse_prime_method(&a.prime_method)?,
        family: a.family,
        k_min: a.k_min,
        k_max: a.k_max,
        debug_codes: a.debug_codes,
    })
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE as u8 } else { 0 });
        }
    };
    let cfg = match config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_PARSE as u8);
        }
    };
    let out = run(&cfg);
    print!("{}", out.output);
    ExitCode::from(out.exit_code as u8)
}
