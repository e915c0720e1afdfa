//! Command-line harness: analysis, dynamics, optima, online greedy,
//! non-atomic equilibria, adversarial-instance generation, bound tables,
//! and batch experiments over game files.
//!
//! Exit codes: 0 success, 1 validation error, 2 size cap exceeded,
//! 3 non-convergence. Failures emit a machine-readable JSON object on
//! standard error.

mod experiment;
mod ops;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use nswlb::Error;

#[derive(Parser)]
#[command(name = "nswlb", version, about = "Selfish and online load balancing under the Nash social welfare objective")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a profile on a game: NSW, player costs, equilibrium verdict.
    Analyze {
        /// Game JSON file.
        game: PathBuf,
        /// Profile JSON ({"choices": [...]} or {"flows": [[...]]}); defaults
        /// to the file's designated equilibrium metadata.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Run best-response dynamics to a pure Nash equilibrium.
    Dynamics {
        game: PathBuf,
        /// round-robin | max-weight | random
        #[arg(long, default_value = "round-robin")]
        schedule: String,
        /// Seed for the random schedule.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        max_sweeps: usize,
        /// Starting profile JSON; defaults to every player's first strategy.
        #[arg(long)]
        start: Option<PathBuf>,
        /// Write a per-sweep trace CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Compute an NSW-optimal profile.
    Opt {
        game: PathBuf,
        /// brute | matching (matching falls back to brute force when its
        /// preconditions fail)
        #[arg(long, default_value = "matching")]
        method: String,
    },
    /// Replay the online greedy assignment on an instance with an arrival order.
    Greedy { instance: PathBuf },
    /// Compute a Wardrop equilibrium flow of a non-atomic game.
    Nonatomic {
        game: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
    },
    /// Emit an adversarial instance from a named family.
    Generate {
        /// weightedLB | identicalLB | unweightedLB | nonAtomic |
        /// onlineGreedyLB | onlineUniversal | linearCG
        family: String,
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        s: Option<String>,
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        o: Option<String>,
        #[arg(long)]
        h: Option<String>,
        /// Latency spec, e.g. "poly:0,1" or "const:2".
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        g: Option<String>,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        eps: Option<String>,
        /// restricted | symmetric (weightedLB only)
        #[arg(long)]
        variant: Option<String>,
        /// Output file; defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the tight-bound table for degree-p polynomials plus grid-sup
    /// confirmations.
    VerifyBounds {
        #[arg(long, default_value_t = 1)]
        p: u32,
        #[arg(long, default_value = "poly")]
        family: String,
    },
    /// Run a batch plan and write a CSV of predicted vs measured ratios.
    Experiment {
        plan: PathBuf,
        /// Output directory for results.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker threads for independent instances.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::TooLarge { .. } => 2,
        Error::DidNotConverge(_) => 3,
        _ => 1,
    }
}

fn error_kind(code: i32) -> &'static str {
    match code {
        2 => "sizeCap",
        3 => "nonConvergence",
        _ => "validation",
    }
}

fn run(cli: Cli) -> nswlb::Result<()> {
    match cli.cmd {
        Cmd::Analyze { game, profile } => ops::analyze(&game, profile.as_deref()),
        Cmd::Dynamics { game, schedule, seed, max_sweeps, start, trace } => {
            ops::dynamics(&game, &schedule, seed, max_sweeps, start.as_deref(), trace.as_deref())
        }
        Cmd::Opt { game, method } => ops::opt(&game, &method),
        Cmd::Greedy { instance } => ops::greedy(&instance),
        Cmd::Nonatomic { game, max_iters, eps } => ops::nonatomic(&game, max_iters, eps),
        Cmd::Generate { family, m, s, k, o, h, f, g, p, n, eps, variant, out } => {
            let mut params = std::collections::BTreeMap::new();
            for (key, value) in [
                ("m", m), ("s", s), ("k", k), ("o", o), ("h", h), ("f", f),
                ("g", g), ("p", p), ("n", n), ("eps", eps), ("variant", variant),
            ] {
                if let Some(v) = value {
                    params.insert(key.to_string(), v);
                }
            }
            ops::generate(&family, &params, out.as_deref())
        }
        Cmd::VerifyBounds { p, family } => ops::verify_bounds(p, &family),
        Cmd::Experiment { plan, out, jobs } => experiment::run(&plan, &out, jobs),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        let code = exit_code(&e);
        eprintln!(
            "{}",
            serde_json::json!({ "error": e.to_string(), "kind": error_kind(code) })
        );
        std::process::exit(code);
    }
}
