//! Batch frontend for `kgraph-core`: graph files, subcommands and reports.
//!
//! [`run`] executes one [`RunConfig`] and returns a [`Report`] plus the
//! process exit code: 0 when every check passes, 1 when one fails, 2 for
//! parse and precondition errors, 3 when a budget is exhausted.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kgraph_core::Degree;
use serde::Serialize;
use thiserror::Error;

pub mod format;
pub mod report;
mod run;

pub use format::{emit_graph, parse_graph, MatrixBundle};
pub use report::{CheckResult, Report, Status};
pub use run::run;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] kgraph_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use kgraph_core::Error as E;
        match self {
            CliError::Core(
                E::ClosureBudgetExceeded(_)
                | E::BudgetExceeded { .. }
                | E::UniverseTooLarge { .. }
                | E::FixpointBudgetExceeded(_),
            ) => 3,
            _ => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "kgraph", version, about = "Exhaustive sets, satiations and boundary-path representations of finite k-graphs")]
pub struct Cli {
    /// Graph file (JSON).
    pub graph: PathBuf,
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Options {
    /// Degree window, comma separated, e.g. `2,1`. Required for cyclic graphs.
    #[arg(long, global = true, value_parser = parse_degree)]
    #[serde(serialize_with = "ser_degree")]
    pub depth: Option<Degree>,
    /// Largest family size in the finite exhaustive window.
    #[arg(long, global = true)]
    pub max_size: Option<usize>,
    /// Budget for closures, subset enumeration and fixpoint rounds.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Backend::Exact)]
    pub backend: Backend,
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for the randomised parts of `verify`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results are merged in canonical order.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum Command {
    /// Validate the graph and print its shape.
    Validate,
    /// List paths from a vertex, or from every vertex.
    Paths {
        #[arg(long)]
        vertex: Option<String>,
    },
    /// Minimal common extensions of two paths.
    Mce { p: String, q: String },
    /// `Ext(mu; E)`.
    Ext {
        mu: String,
        /// Comma-separated paths of `E`.
        #[arg(long)]
        family: String,
    },
    /// The closure `Pi E` of a set of paths.
    PiClosure { paths: Vec<String> },
    #[command(subcommand)]
    Exhaustive(ExhaustiveCommand),
    /// The satiation of the given generators.
    Satiate(Generators),
    #[command(subcommand)]
    Boundary(BoundaryCommand),
    /// Emit the boundary-path representation as a matrix bundle.
    Represent(Generators),
    /// Check the relations and, with `--all`, the full uniqueness suite.
    Verify {
        #[command(flatten)]
        generators: Generators,
        /// Matrix bundle to check instead of the boundary-path representation.
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long)]
        all: bool,
    },
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "action")]
pub enum ExhaustiveCommand {
    /// Decide whether a comma-separated family is exhaustive.
    Check { family: String },
    /// Enumerate finite exhaustive families at a vertex.
    Enumerate {
        #[arg(long)]
        vertex: String,
    },
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "action")]
pub enum BoundaryCommand {
    /// All boundary paths of the satiation.
    List(Generators),
    /// Build a boundary path at a vertex, optionally avoiding a family.
    Construct {
        #[command(flatten)]
        generators: Generators,
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        avoid: Option<String>,
    },
    /// Whether a path is aperiodic.
    Aperiodic { path: String },
    /// Condition (C) for the satiation.
    ConditionC(Generators),
}

#[derive(Args, Debug, Clone, Default, Serialize)]
pub struct Generators {
    /// A generating family, comma separated; repeat for more.
    #[arg(long = "generator", short = 'g')]
    pub generators: Vec<String>,
}

fn parse_degree(text: &str) -> Result<Degree, String> {
    text.split(',')
        .map(|c| c.trim().parse::<u32>().map_err(|e| format!("bad degree `{text}`: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .map(Degree::new)
}

fn ser_degree<S: serde::Serializer>(d: &Option<Degree>, s: S) -> Result<S::Ok, S::Error> {
    match d {
        Some(d) => s.collect_seq(d.coords()),
        None => s.serialize_none(),
    }
}

/// Everything one run needs.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub graph: PathBuf,
    pub command: Command,
    #[serde(flatten)]
    pub options: Options,
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        RunConfig { graph: cli.graph, command: cli.command, options: cli.options }
    }
}
