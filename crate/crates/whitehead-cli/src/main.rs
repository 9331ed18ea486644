//! `whitehead` command-line front end.

mod run;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use whitehead::Error;

pub const SCHEMA: u64 = 1;

#[derive(Parser, Debug)]
#[command(name = "whitehead", version, about = "Reduced Whitehead groups, symbols, forms and Witt vectors")]
pub struct Cli {
    /// Emit a machine-readable JSON report.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Exit with status 5 when a result cannot be certified.
    #[arg(long, global = true)]
    pub require_certificate: bool,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// SK₁ of a Platonov algebra from a JSON configuration.
    Sk1 {
        #[arg(long)]
        config: String,
    },
    /// Evaluate an invariant of SK₁.
    Invariant {
        #[command(subcommand)]
        which: InvariantCmd,
    },
    /// Iterated tame residues and the top cohomology coordinate of a symbol.
    Residue {
        #[arg(long)]
        field: String,
        #[arg(long)]
        symbol: String,
        #[arg(long = "mod")]
        modulus: u64,
        /// Residue variables, outermost first.
        #[arg(long, value_delimiter = ',')]
        at: Vec<String>,
    },
    /// Quadratic form report for `diag(…)` or `pfister(…)`.
    Form {
        expr: String,
        #[arg(long, default_value = "Q")]
        field: String,
        /// Extra bindings `name=expr,…`.
        #[arg(long, value_delimiter = ',')]
        bind: Vec<String>,
    },
    /// Witt vector arithmetic over F_q.
    Wittvec {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        l: usize,
        /// Field order (defaults to p).
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        op: WittOp,
        #[arg(long, value_delimiter = ',')]
        lhs: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        rhs: Vec<String>,
    },
    /// Lift `[a,b) ⊗ [c,d)` from characteristic 2 to `(4a+1,b) ⊗ (4c+1,d)`.
    Lift {
        #[arg(long)]
        algebra: String,
    },
    /// Kahn's bound n̄ or the torsion exponent m.
    Bounds(BoundsArgs),
    /// Centre formulas and SK₁ non-triviality witnesses.
    Centre {
        #[arg(long)]
        field: String,
        #[arg(long)]
        algebra: Option<String>,
        /// `a,b,c,d` for the value ⟪4a+1,b,4c+1,d⟫.
        #[arg(long, value_delimiter = ',')]
        biquat: Vec<String>,
        #[arg(long, default_value = "auto")]
        zeta: String,
    },
    /// Run the embedded oracle suites.
    Selftest,
}

#[derive(Subcommand, Debug, Clone)]
pub enum InvariantCmd {
    /// KMRT invariant of an SL₁ element of a biquaternion algebra.
    Kmrt {
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value = "Q")]
        field: String,
        /// Element expression, or `random` for a seeded commutator.
        #[arg(long)]
        element: String,
        /// Symplectic involution choice in 0..3.
        #[arg(long, default_value_t = 0)]
        involution: usize,
    },
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct BoundsArgs {
    #[arg(long)]
    pub n: Option<u64>,
    /// Tuples `(p,ind,per),…`.
    #[arg(long)]
    pub factors: Option<String>,
}

#[derive(clap::ValueEnum, Debug, Clone, Copy)]
pub enum WittOp {
    Add,
    Sub,
    Mul,
    Neg,
    Frob,
    Wp,
}

/// Failure carrying a documented exit status.
#[derive(Debug)]
pub struct Failure {
    pub status: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Syntax(_) | Error::Invalid(_) => 2,
            Error::Unsupported(_) => 3,
            Error::Precision(_) => 4,
            Error::Undecided(_) => 5,
        };
        Failure { status, message: e.to_string() }
    }
}

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure { status: 2, message: msg.into() }
}

/// Result payload of a verb, before wrapping in the report envelope.
pub struct Outcome {
    pub input: Value,
    pub result: Value,
    pub certificates: Vec<Value>,
    pub conventions: Value,
    pub text: String,
    /// Some certificate is undecided.
    pub undecided: bool,
    /// Explicit failure (selftest).
    pub failed: bool,
}

/// Write to stdout once; a closed pipe is not an error.
fn emit(s: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(s.as_bytes()).and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let out = run::dispatch(&cli);
    let ms = start.elapsed().as_secs_f64() * 1000.0;
    match out {
        Ok(o) => {
            let status = if o.failed {
                1
            } else if o.undecided && cli.require_certificate {
                5
            } else {
                0
            };
            if cli.json {
                let report = json!({
                    "schema": SCHEMA,
                    "verb": run::verb(&cli.cmd),
                    "input": o.input,
                    "result": o.result,
                    "certificates": o.certificates,
                    "conventions": o.conventions,
                    "timing_ms": ms,
                });
                emit(&format!("{}\n", serde_json::to_string_pretty(&report).unwrap()));
            } else {
                emit(&o.text);
                if status == 5 {
                    eprintln!("error: result is undecided and --require-certificate was given");
                }
            }
            ExitCode::from(status)
        }
        Err(f) => {
            if cli.json {
                let report = json!({
                    "schema": SCHEMA,
                    "verb": run::verb(&cli.cmd),
                    "error": f.message,
                    "status": f.status,
                });
                emit(&format!("{}\n", serde_json::to_string_pretty(&report).unwrap()));
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status)
        }
    }
}
