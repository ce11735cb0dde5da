mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dstar_core::asymptotics::MuMethod;
use dstar_core::pattern_gf::Variant;
use dstar_core::PatternSpec;
use serde::Serialize;

use crate::config::{RunConfig, UsageError};

const CSV_HELP: &str = "\
CSV columns (--format csv):
  counts       n,t_n,r_n,p_n,enumerated_t_n
  enumerate    n,index,level_sequence
  dist         pattern_i,pattern_j,n,k,t_nk
  moments      pattern_i,pattern_j,n,trees,mean,variance,skewness,mean_num,mean_den,variance_num,variance_den
  singularity  quantity,value,error
  mu           pattern_i,pattern_j,method,value,error,singularity,extrapolation,flagged
  sigma        pattern_i,pattern_j,value,error,flagged
  lambda       alpha,k,i,j,mu,contribution
  conjecture   n,trees,strict,equalities,violations,escalated,min_margin
  gnp          trial,connected,edges,randic,randic_over_n,avg_distance,diameter
  verify       pattern_i,pattern_j,n,matches

Exit status: 0 success, 1 a checked claim failed (oracle mismatch, conjecture
violation) or the computation errored, 2 usage error.";

#[derive(Parser, Debug)]
#[command(name = "dstar", version, about = "Double-star occurrences in random unlabeled trees", after_help = CSV_HELP)]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Coefficient cache directory.
    #[arg(long, global = true, env = "DSTAR_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Leave the generation time out of the JSON envelope.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    /// Root-sum form for patterns with 1 < i < j.
    #[arg(long, global = true, default_value = "repaired")]
    pub variant: Variant,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Free, rooted and planted tree counts.
    Counts {
        #[arg(long, default_value_t = 30)]
        max_n: usize,
        /// Also count by running the generator up to this order.
        #[arg(long, default_value_t = 0)]
        enumerate_max: usize,
        /// Also read t_n off the three pattern systems at u = 1.
        #[arg(long)]
        check_systems: bool,
    },
    /// Every free tree of one order, as level sequences.
    Enumerate {
        #[arg(long)]
        n: usize,
    },
    /// Exact occurrence distribution and its summary.
    Dist {
        #[arg(long)]
        pattern: PatternSpec,
        /// One or more orders, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
    },
    /// Exact moments from the jet track.
    Moments {
        #[arg(long)]
        pattern: PatternSpec,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        jet_order: usize,
    },
    /// x0, b and the identity check.
    Singularity {
        #[arg(long, default_value_t = 400)]
        order: usize,
    },
    /// Mean growth constant of one pattern.
    Mu {
        #[arg(long)]
        pattern: PatternSpec,
        #[arg(long, default_value = "both")]
        method: MuMethod,
        #[arg(long, default_value_t = 400)]
        order: usize,
    },
    /// Variance growth constant of one pattern.
    Sigma {
        #[arg(long)]
        pattern: PatternSpec,
        #[arg(long, default_value_t = 400)]
        order: usize,
    },
    /// Bracket on the linear Randić constant.
    Lambda {
        #[arg(short = 'K', long = "K")]
        k: usize,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "-0.5")]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 400)]
        order: usize,
    },
    /// Exhaustive R ≥ D scan over small trees.
    Conjecture {
        #[arg(long, default_value_t = 12)]
        max_n: usize,
    },
    /// R against D on G(n, p) samples.
    Gnp {
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 5)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generating-function distributions against enumeration.
    Verify {
        #[arg(long, default_value_t = 12)]
        max_n: usize,
        #[arg(long, default_value_t = 6)]
        max_j: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cfg = match RunConfig::from_cli(&cli) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    log::info!("config: {}", serde_json::to_string(&cfg).unwrap_or_default());
    match commands::run(&cli, &cfg) {
        Ok(out) => match output::emit(&cfg, &out) {
            Ok(()) if out.passed => ExitCode::SUCCESS,
            Ok(()) => {
                eprintln!("check failed: {}", out.message);
                ExitCode::from(1)
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
        Err(e) => match e.downcast::<UsageError>() {
            Ok(u) => usage(u),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
    }
}

fn usage(e: UsageError) -> ExitCode {
    eprintln!("usage error: {e}");
    ExitCode::from(2)
}
