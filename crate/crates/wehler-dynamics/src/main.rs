//! Thin command-line front end over [`wehler_dynamics::report`].
//!
//! Every subcommand parses its flags into a [`RunConfig`], dispatches
//! through [`report::run`], and prints the JSON report to stdout (or
//! `--out`). Reports are byte-identical for identical configurations;
//! wall-clock timing goes to stderr only, and only under `--timing`.

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use wehler_dynamics::report::{self, CommandSpec, RunConfig, RunError};

#[derive(Parser)]
#[command(name = "wehler-dynamics", version, about = "Exact dynamics on Wehler K3 surfaces")]
struct Cli {
    /// Seed for all randomness (one chacha12-v1 stream family).
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads for parallel censuses.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Overrides every floating tolerance (exact checks are unaffected).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Write a CSV rendering of the results here (census histograms).
    #[arg(long, global = true)]
    csv: Option<String>,
    /// Print elapsed wall-clock time to stderr.
    #[arg(long, global = true, default_value_t = false)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a word in the three involutions on the intersection lattice.
    Classify {
        /// Comma-separated letters, leftmost applied last (e.g. 3,2,1).
        #[arg(long)]
        word: String,
    },
    /// Breadth-first orbit closure of a rational point.
    Orbit {
        /// Path to a surface JSON file.
        #[arg(long)]
        surface: String,
        /// Start point: "origin" or "x=[a:b],y=[c:d],z=[e:f]".
        #[arg(long, default_value = "origin")]
        start: String,
        /// Maximum number of visited points before giving up.
        #[arg(long, default_value_t = 1000)]
        budget: usize,
    },
    /// Count points of the reduced surface over small prime fields.
    Census {
        #[arg(long)]
        surface: String,
        /// Primes of good reduction (repeat or comma-separate).
        #[arg(long = "prime", value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        /// Also partition the points into involution orbits.
        #[arg(long, default_value_t = false)]
        partition: bool,
    },
    /// Canonical heights of a point along a loxodromic word.
    Height {
        #[arg(long)]
        surface: String,
        /// Comma-separated word letters, leftmost applied last.
        #[arg(long)]
        word: String,
        #[arg(long)]
        start: String,
        /// Number of Tate iterations (at least 2).
        #[arg(long, default_value_t = 4)]
        budget: u32,
    },
    /// Stationary height for a measure on words.
    Stationary {
        #[arg(long)]
        surface: String,
        /// Support words; repeat the flag for each word.
        #[arg(long = "word", required = true)]
        words: Vec<String>,
        /// Rational weights matching the words (default: uniform).
        #[arg(long = "weight")]
        weights: Vec<String>,
        #[arg(long)]
        start: String,
        /// Evaluation depth of the recursion tree.
        #[arg(long, default_value_t = 6)]
        depth: u32,
    },
    /// Fixed-point machinery for torus automorphisms.
    Torus {
        #[command(subcommand)]
        action: TorusAction,
    },
    /// The resolution chart atlas of the 1/5(1,2) singular point.
    Kummer {
        #[command(subcommand)]
        action: KummerAction,
    },
    /// Run the thirteen-criterion self-check suite.
    Acceptance {
        /// Negative control: corrupt the spectral gate's input matrix.
        #[arg(long, default_value_t = false)]
        corrupt_spectral_gate: bool,
    },
}

#[derive(Subcommand)]
enum TorusAction {
    /// Count fixed points of a power of an affine torus map.
    Fix(TorusFixArgs),
}

#[derive(Args)]
struct TorusFixArgs {
    /// 2x2 matrix over the order, e.g. "[[2,1],[1,1]]"; entries may be
    /// [a,b] pairs meaning a + b i (or a + b w).
    #[arg(long)]
    matrix: String,
    /// Coefficient order: Z2, Zi, or Zw.
    #[arg(long, default_value = "Z2")]
    order: String,
    /// The power n of the map whose fixed points are counted.
    #[arg(long, default_value_t = 1)]
    power: u32,
    /// Torsion translation "N:c0,c1,c2,c3" meaning (c0/N, ..., c3/N).
    #[arg(long)]
    translation: Option<String>,
}

#[derive(Subcommand)]
enum KummerAction {
    /// Validate the chart atlas; --report emits the full data.
    Charts {
        #[arg(long, default_value_t = false)]
        report: bool,
    },
}

fn build_spec(command: &Command) -> Result<CommandSpec, RunError> {
    Ok(match command {
        Command::Classify { word } => CommandSpec::Classify {
            word: report::parse_word_letters(word)?,
        },
        Command::Orbit {
            surface,
            start,
            budget,
        } => CommandSpec::Orbit {
            surface: surface.clone(),
            start: start.clone(),
            budget: *budget,
        },
        Command::Census {
            surface,
            primes,
            partition,
        } => CommandSpec::Census {
            surface: surface.clone(),
            primes: primes.clone(),
            partition: *partition,
        },
        Command::Height {
            surface,
            word,
            start,
            budget,
        } => CommandSpec::Height {
            surface: surface.clone(),
            word: report::parse_word_letters(word)?,
            start: start.clone(),
            iterations: *budget,
        },
        Command::Stationary {
            surface,
            words,
            weights,
            start,
            depth,
        } => CommandSpec::Stationary {
            surface: surface.clone(),
            words: words
                .iter()
                .map(|w| report::parse_word_letters(w))
                .collect::<Result<_, _>>()?,
            weights: weights.clone(),
            start: start.clone(),
            depth: *depth,
        },
        Command::Torus {
            action: TorusAction::Fix(args),
        } => CommandSpec::TorusFix {
            matrix: args.matrix.clone(),
            order: args.order.clone(),
            power: args.power,
            translation: args.translation.clone(),
        },
        Command::Kummer {
            action: KummerAction::Charts { report },
        } => CommandSpec::KummerCharts { report: *report },
        Command::Acceptance {
            corrupt_spectral_gate,
        } => CommandSpec::Acceptance {
            corrupt_spectral_gate: *corrupt_spectral_gate,
        },
    })
}

fn emit(cli: &Cli, rendered: String, csv: Option<String>) -> Result<(), String> {
    match &cli.out {
        Some(path) => std::fs::write(path, rendered).map_err(|e| format!("cannot write {path}: {e}"))?,
        None => print!("{rendered}"),
    }
    match (&cli.csv, csv) {
        (Some(path), Some(data)) => {
            std::fs::write(path, data).map_err(|e| format!("cannot write {path}: {e}"))?
        }
        (Some(_), None) => unreachable!("csv requests are validated by the dispatcher"),
        _ => {}
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let spec = match build_spec(&cli.command) {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let config = RunConfig {
        command: spec,
        seed: cli.seed,
        workers: cli.workers.max(1),
        tol: cli.tol,
        csv: cli.csv.is_some(),
        rng: report::RNG_NAME,
    };
    let outcome = match report::run(&config) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Err(message) = emit(&cli, outcome.report.to_json_string(), outcome.csv) {
        eprintln!("{message}");
        return ExitCode::from(2);
    }
    if cli.timing {
        eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    }
    ExitCode::from(outcome.exit_code as u8)
}
