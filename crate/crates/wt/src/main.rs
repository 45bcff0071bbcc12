//! `wt` — command-line front end for the `wtower` library.
//!
//! Subcommands mirror the library modules: `tree` for single-tree queries,
//! `forest` for intersection-forest invariants and cleanup, `eta` for the
//! crossing-change pipeline, `clasper` for surgery effect reports, and
//! `ihx` for relation-lattice reduction.
//!
//! Exit codes: 0 on success, 1 on a domain error (bad input data, reported
//! on stderr), 2 on a usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;

#[derive(Debug)]
pub enum CliError {
    /// The command line was well formed but the input data was not.
    Domain(String),
    /// Flag combinations that clap cannot rule out by itself.
    Usage(String),
}

impl CliError {
    pub fn domain(msg: impl Into<String>) -> CliError {
        CliError::Domain(msg.into())
    }

    pub fn usage(msg: impl Into<String>) -> CliError {
        CliError::Usage(msg.into())
    }
}

#[derive(Parser)]
#[command(
    name = "wt",
    version,
    about = "Exact invariants of framed and twisted tree forests",
    long_about = "Exact computations over framed and twisted labeled trees: \
                  canonical forms, forest invariants and their beta series, \
                  crossing-change polynomials, surgery effect reports, and \
                  reduction modulo the tree relation lattice."
)]
struct Cli {
    /// Emit a machine-readable JSON report instead of plain text.
    ///
    /// With several inputs the report is a single JSON array, in input
    /// order; with one input it is a single JSON object.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Queries on a single tree expression.
    Tree {
        #[command(subcommand)]
        cmd: TreeCmd,
    },
    /// Invariants and cleanup of intersection-forest files.
    Forest {
        #[command(subcommand)]
        cmd: ForestCmd,
    },
    /// Crossing-change records -> self-intersection polynomial -> beta series.
    Eta {
        /// File of crossing-change records: one `+ INT` or `- INT` per
        /// line, `#` comments. Repeat the flag to process several files.
        #[arg(long, value_name = "FILE", required = true)]
        crossings: Vec<PathBuf>,

        /// Print the series in x = (1-t)(1-1/t) instead of the Laurent
        /// polynomial in t.
        #[arg(long = "x-series")]
        x_series: bool,
    },
    /// Predicted effect of clasper surgeries on the beta invariants.
    Clasper {
        #[command(subcommand)]
        cmd: ClasperCmd,
    },
    /// Reduction modulo the antisymmetry/three-term relation lattice.
    Ihx {
        #[command(subcommand)]
        cmd: IhxCmd,
    },
}

#[derive(Subcommand)]
enum TreeCmd {
    /// Print the order (trivalent vertex count) of each expression.
    Order {
        /// Tree expression: `<J,K>`, `J^inf`, or a bare bracketing.
        #[arg(value_name = "EXPR", required = true)]
        exprs: Vec<String>,
    },
    /// Print the canonical spelling of each expression.
    Canon {
        #[arg(value_name = "EXPR", required = true)]
        exprs: Vec<String>,
    },
    /// Decide beta-badness of each expression (labels must lie in {1,2}).
    Bad {
        #[arg(value_name = "EXPR", required = true)]
        exprs: Vec<String>,
    },
}

#[derive(Subcommand)]
enum ForestCmd {
    /// Largest tower order the forest certifies.
    Order {
        #[arg(value_name = "FILE", required = true)]
        files: Vec<PathBuf>,
    },
    /// Largest Cochran tower order the forest certifies.
    Cochran {
        #[arg(value_name = "FILE", required = true)]
        files: Vec<PathBuf>,
    },
    /// The beta invariants the forest determines.
    Beta {
        /// Report depths 1..=I only.
        #[arg(long, value_name = "I", value_parser = clap::value_parser!(u32).range(1..))]
        max: Option<u32>,

        #[arg(value_name = "FILE", required = true)]
        files: Vec<PathBuf>,
    },
    /// Rewrite a forest into one certifying the target Cochran order.
    Normalize {
        /// Requested Cochran order: a positive even integer 2k.
        #[arg(long, value_name = "N", value_parser = parse_even_target)]
        target: u32,

        /// Drop in-range bad entries no rewrite rule covers, recording
        /// the assumption in the move log, instead of failing.
        #[arg(long)]
        assume_eliminable: bool,

        /// Write the move log (JSON) to this file; requires one input.
        #[arg(long, value_name = "FILE")]
        log: Option<PathBuf>,

        #[arg(value_name = "FILE", required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ClasperCmd {
    /// JSON report of per-surgery and combined beta shifts.
    ///
    /// Input files use the forest grammar; each entry is read as one
    /// surgery. The report is always JSON.
    Effects {
        /// Largest beta index to report on.
        #[arg(long, value_name = "K", default_value_t = 4,
              value_parser = clap::value_parser!(u32).range(1..))]
        max: u32,

        #[arg(value_name = "FILE", required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Subcommand)]
enum IhxCmd {
    /// Reduce integer combinations of glued trees to canonical residues.
    ///
    /// Expression files hold one `INT * <tree>` term per line; `#`
    /// comments. All trees must share the declared leaf-label multiset.
    Reduce {
        /// Refuse lattices above this order (relator count grows fast).
        #[arg(long, value_name = "N")]
        order: u32,

        /// Leaf-label multiset of the lattice, e.g. `1,1,2,2`.
        #[arg(long, value_name = "LABELS", value_delimiter = ',', required = true,
              value_parser = clap::value_parser!(u32).range(1..))]
        labels: Vec<u32>,

        #[arg(value_name = "FILE", required = true)]
        files: Vec<PathBuf>,
    },
}

fn parse_even_target(s: &str) -> Result<u32, String> {
    let v: u32 = s
        .parse()
        .map_err(|_| format!("`{s}` is not a non-negative integer"))?;
    if v < 2 || v % 2 != 0 {
        return Err(format!("target must be a positive even integer, got {v}"));
    }
    Ok(v)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    let out = match cli.verb {
        Verb::Tree { cmd } => match cmd {
            TreeCmd::Order { exprs } => commands::tree_order(&exprs, json),
            TreeCmd::Canon { exprs } => commands::tree_canon(&exprs, json),
            TreeCmd::Bad { exprs } => commands::tree_bad(&exprs, json),
        },
        Verb::Forest { cmd } => match cmd {
            ForestCmd::Order { files } => commands::forest_order(&files, json),
            ForestCmd::Cochran { files } => commands::forest_cochran(&files, json),
            ForestCmd::Beta { max, files } => commands::forest_beta(&files, max, json),
            ForestCmd::Normalize {
                target,
                assume_eliminable,
                log,
                files,
            } => {
                commands::forest_normalize(&files, target, assume_eliminable, log.as_deref(), json)
            }
        },
        Verb::Eta {
            crossings,
            x_series,
        } => commands::eta(&crossings, x_series, json),
        Verb::Clasper { cmd } => match cmd {
            ClasperCmd::Effects { max, files } => commands::clasper_effects(&files, max),
        },
        Verb::Ihx { cmd } => match cmd {
            IhxCmd::Reduce {
                order,
                labels,
                files,
            } => commands::ihx_reduce(&files, order, &labels, json),
        },
    };
    match out {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(CliError::Domain(msg)) => {
            eprintln!("wt: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("wt: {msg}");
            ExitCode::from(2)
        }
    }
}
