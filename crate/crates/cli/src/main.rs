//! `twofold` command-line front end.
//!
//! Exit status: 0 on success, 1 for an unknown or missing command, 2 for a
//! validation error, 3 when a budget ran out (Unknown pairs, Undecided
//! cells, unresolved gaps, search without result).

mod commands;

use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use commands::Failure;

#[derive(Parser, Debug)]
#[command(name = "twofold", version, about = "Certified computations for twofold Cantor sets")]
struct Cli {
    /// Use outward-rounded f64 intervals instead of exact rationals.
    #[arg(long, global = true)]
    float: bool,
    /// Worker threads for parallel modules (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Attach run metadata (version, timing) to the output.
    #[arg(long, global = true)]
    meta: bool,
    #[command(subcommand)]
    command: Command,
}

/// Parameters of the system; decimals are read exactly.
#[derive(Args, Debug, Clone)]
struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    p: String,
    #[arg(long, allow_hyphen_values = true)]
    q: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Similarity dimension, optionally with the truncated-system ladder.
    Dim {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Number of ladder rungs to report.
        #[arg(long, default_value_t = 0)]
        ladder: u32,
    },
    /// Certify the twofold condition for all pairs with m + n <= max-sum.
    CheckTf {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 12)]
        max_sum: u32,
        #[arg(long, default_value_t = 10)]
        depth: u32,
    },
    /// Raster the parameter square and classify every cell (CSV).
    Scan {
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[arg(long, default_value_t = 12)]
        max_sum: u32,
        #[arg(long, default_value_t = 10)]
        depth: u32,
        #[arg(long, default_value = "0")]
        p_lo: String,
        #[arg(long, default_value = "1/16")]
        p_hi: String,
        #[arg(long, default_value = "0")]
        q_lo: String,
        #[arg(long, default_value = "1/16")]
        q_hi: String,
        /// Curves q = p^s sampled where they cross a cell.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        seeds: Vec<u32>,
        /// Also write an SVG raster here.
        #[arg(long)]
        svg: Option<std::path::PathBuf>,
    },
    /// Classify q samples along a fixed p (CSV).
    Slice {
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, default_value_t = 1024)]
        samples: usize,
        #[arg(long, default_value_t = 12)]
        max_sum: u32,
        #[arg(long, default_value_t = 10)]
        depth: u32,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        seeds: Vec<u32>,
    },
    /// Pairs (m, n) with p^m / q^n tending to 1.
    WitnessWsp {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[arg(long, default_value_t = 64)]
        precision: u32,
    },
    /// Exponent pairs whose order flips between two parameter pairs.
    WitnessOrder {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long = "p2", allow_hyphen_values = true)]
        p2: String,
        #[arg(long = "q2", allow_hyphen_values = true)]
        q2: String,
        #[arg(long, default_value_t = 200)]
        max_exp: u32,
    },
    /// Evaluate an alternating-sum representation at the given parameters.
    Transport {
        #[command(flatten)]
        params: ParamArgs,
        /// Representation as JSON, e.g. `[[0,0],[1,0]]`.
        #[arg(long, conflicts_with = "address", required_unless_present = "address")]
        rep: Option<String>,
        /// Eventually periodic address, e.g. `3,(1)`.
        #[arg(long)]
        address: Option<String>,
    },
    /// Gap functional near an anchor, at one scale or along t = (pq)^-k.
    Gap {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "1")]
        t: String,
        #[arg(long, default_value = "1")]
        r: String,
        #[arg(long, default_value_t = 2)]
        depth: u32,
        /// `origin`, `zero:WORD` (image of 0) or `one:WORD` (image of 1).
        #[arg(long, default_value = "origin")]
        anchor: String,
        /// Probe k = 0..=k-max as CSV instead of a single value.
        #[arg(long)]
        k_max: Option<u32>,
    },
    /// Interval cover of K, A or B (CSV).
    Cover {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "K")]
        set: String,
        #[arg(long, default_value_t = 4)]
        depth: u32,
    },
    /// Box-counting slope of a point list, or of the middle-thirds set.
    Boxdim {
        /// File with one number per line.
        #[arg(long, conflicts_with = "middle_thirds", required_unless_present = "middle_thirds")]
        input: Option<std::path::PathBuf>,
        #[arg(long)]
        middle_thirds: Option<u32>,
        /// Box sizes, largest first (default 2^-3 .. 2^-12).
        #[arg(long, value_delimiter = ',')]
        scales: Vec<f64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 1,
                _ => 2,
            });
        }
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let start = Instant::now();
    match commands::run(&cli) {
        Ok(outcome) => {
            emit(&cli, outcome.output, start);
            ExitCode::from(if outcome.exhausted { 3 } else { 0 })
        }
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

fn emit(cli: &Cli, output: commands::Output, start: Instant) {
    let meta = serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "elapsed_ms": start.elapsed().as_millis() as u64,
        "jobs": rayon::current_num_threads(),
    });
    match output {
        commands::Output::Json(mut v) => {
            if cli.meta {
                v["meta"] = meta;
            }
            println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
        }
        commands::Output::Text(s) => {
            print!("{s}");
            if cli.meta {
                eprintln!("{meta}");
            }
        }
    }
}
