use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "banach", version, about = "Estimate geometric constants of finite-dimensional normed spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate one constant and print value ± error bound with its witness.
    Compute {
        #[command(flatten)]
        common: Common,
        /// T, T1, T2, J, CNJ, CNJp, A2, Akt or delta.
        #[arg(long)]
        constant: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Estimate a constant over a parameter grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        constant: String,
        /// A value `a` or an inclusive range `a:b`.
        #[arg(long)]
        kappa: Option<String>,
        #[arg(long)]
        tau: Option<String>,
        #[arg(long)]
        eps: Option<String>,
        /// Spacing of range points.
        #[arg(long, default_value_t = 0.25)]
        step: f64,
    },
    /// Check a theorem numerically and print the report.
    Verify {
        #[command(flatten)]
        common: Common,
        /// t1-bounds, t1-vs-t, t2-bounds, t2-delta, t2-cnj, t2-vs-t, uns,
        /// normal-structure or ball-sphere.
        #[arg(long)]
        theorem: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Print the optimizing pair of a constant and re-evaluate it.
    Witness {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        constant: String,
        #[command(flatten)]
        params: ParamArgs,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// euclid:<n>, lp:<p>:<n>, lp:inf:<n>, dayjames or poly:<file>.
    #[arg(long)]
    pub space: String,
    /// Grid points per full turn of each angle.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Largest acceptable error bound.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Recompute even if a matching record is cached.
    #[arg(long)]
    pub no_cache: bool,
    /// Search configuration file (TOML, or JSON with a .json extension).
    /// Flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Run the search on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}
