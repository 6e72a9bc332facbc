use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hcquad::Domain;

#[derive(Debug, Parser)]
#[command(name = "hcquad", version, about = "Truncated Gauss–Laguerre rules and sparse grids for weighted integrals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write output to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads for integrand evaluation (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DomainArg {
    Half,
    Full,
}

impl From<DomainArg> for Domain {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Half => Domain::HalfLine,
            DomainArg::Full => Domain::FullLine,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Full,
    Truncated,
    Symmetrized,
}

/// Weight `x^alpha e^(-a x + b)` (or its Laplace form) and the truncation.
#[derive(Debug, Clone, Args)]
pub struct WeightArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, default_value_t = hcquad::DEFAULT_THETA)]
    pub theta: f64,
    #[arg(long, value_enum, default_value_t = DomainArg::Half)]
    pub domain: DomainArg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One-dimensional rule: index, node, weight.
    Nodes {
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = KindArg::Truncated)]
        kind: KindArg,
        #[command(flatten)]
        weight: WeightArgs,
    },
    /// Merged sparse grid: coordinates, coefficient, multiplicity.
    Grid {
        #[arg(long)]
        xi: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[command(flatten)]
        weight: WeightArgs,
    },
    /// Integrate a registry function with the sparse grid.
    Integrate {
        #[arg(long)]
        integrand: String,
        /// Grid level; exclusive with --budget.
        #[arg(long, conflicts_with = "budget", required_unless_present = "budget")]
        xi: Option<usize>,
        /// Largest grid with at most this many terms.
        #[arg(long)]
        budget: Option<u128>,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[command(flatten)]
        weight: WeightArgs,
    },
    /// Error against the exact integral over a range of grid levels, with a
    /// fitted convergence rate.
    Sweep {
        #[arg(long)]
        integrand: String,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        from: usize,
        #[arg(long)]
        to: usize,
        /// Smoothness used for the optional log-corrected fit.
        #[arg(long)]
        r: Option<u32>,
        /// Levels at the start of the range left out of the fits.
        #[arg(long, default_value_t = 2)]
        fit_skip: usize,
        #[command(flatten)]
        weight: WeightArgs,
    },
    /// Certified worst-case integrand vanishing on the nodes of a rule or grid.
    Fool {
        /// 1-D adversary: the truncated rule with the largest order keeping at
        /// most n nodes.
        #[arg(long, conflicts_with_all = ["xi", "from"])]
        n: Option<usize>,
        /// Adversary: the sparse grid of this level.
        #[arg(long, conflicts_with = "from")]
        xi: Option<usize>,
        /// Sweep mode: levels `from..=to` (node budgets 2^k in 1-D, grid
        /// levels otherwise).
        #[arg(long, requires = "to")]
        from: Option<usize>,
        #[arg(long, requires = "from")]
        to: Option<usize>,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[command(flatten)]
        weight: WeightArgs,
    },
}
