use std::path::PathBuf;

use dstar_core::asymptotics::MuMethod;
use dstar_core::pattern_gf::Variant;
use dstar_core::PatternSpec;
use serde::Serialize;

use crate::{Cli, Command, Format};

/// Largest order the exhaustive enumerators accept.
pub const ENUM_MAX: usize = 20;
/// Smallest truncation order the asymptotic commands accept.
pub const ASYM_MIN_ORDER: usize = 100;

#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Everything that determines a run's output, checked before any work.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern: Option<PatternSpec>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub n: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jet_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub alpha: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<MuMethod>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub format: Format,
    pub cache_dir: Option<PathBuf>,
    pub variant: Variant,
    #[serde(skip)]
    pub timestamp: bool,
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), UsageError> {
    if cond {
        Ok(())
    } else {
        Err(UsageError(msg()))
    }
}

fn default_cache_dir() -> Option<PathBuf> {
    if let Some(x) = std::env::var_os("XDG_CACHE_HOME") {
        return Some(PathBuf::from(x).join("dstar"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("dstar"))
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, UsageError> {
        let mut cfg = RunConfig {
            command: "",
            pattern: None,
            n: Vec::new(),
            order: None,
            jet_order: None,
            k: None,
            alpha: Vec::new(),
            method: None,
            p: None,
            trials: None,
            seed: None,
            format: cli.format,
            cache_dir: if cli.no_cache {
                None
            } else {
                cli.cache_dir.clone().or_else(default_cache_dir)
            },
            variant: cli.variant,
            timestamp: !cli.no_timestamp,
        };
        match &cli.command {
            Command::Counts {
                max_n,
                enumerate_max,
                check_systems: _,
            } => {
                cfg.command = "counts";
                check(*max_n >= 1, || "--max-n must be at least 1".into())?;
                check(*enumerate_max <= ENUM_MAX.min(*max_n), || {
                    format!("--enumerate-max must be at most min(--max-n, {ENUM_MAX})")
                })?;
                cfg.order = Some(*max_n);
            }
            Command::Enumerate { n } => {
                cfg.command = "enumerate";
                check((1..=ENUM_MAX).contains(n), || format!("--n must lie in 1..={ENUM_MAX}"))?;
                cfg.n = vec![*n];
            }
            Command::Dist { pattern, n } => {
                cfg.command = "dist";
                check(n.iter().all(|&v| v >= 1), || "--n values must be at least 1".into())?;
                cfg.pattern = Some(*pattern);
                cfg.n = n.clone();
                cfg.order = n.iter().max().copied();
            }
            Command::Moments {
                pattern,
                n,
                jet_order,
            } => {
                cfg.command = "moments";
                check(n.iter().all(|&v| v >= 1), || "--n values must be at least 1".into())?;
                check((2..=8).contains(jet_order), || "--jet-order must lie in 2..=8".into())?;
                cfg.pattern = Some(*pattern);
                cfg.n = n.clone();
                cfg.order = n.iter().max().copied();
                cfg.jet_order = Some(*jet_order);
            }
            Command::Singularity { order } => {
                cfg.command = "singularity";
                cfg.order = Some(asym_order(*order)?);
            }
            Command::Mu {
                pattern,
                method,
                order,
            } => {
                cfg.command = "mu";
                cfg.pattern = Some(*pattern);
                cfg.method = Some(*method);
                cfg.order = Some(asym_order(*order)?);
            }
            Command::Sigma { pattern, order } => {
                cfg.command = "sigma";
                cfg.pattern = Some(*pattern);
                cfg.order = Some(asym_order(*order)?);
            }
            Command::Lambda { k, alpha, order } => {
                cfg.command = "lambda";
                check((2..=40).contains(k), || "--K must lie in 2..=40".into())?;
                check(alpha.iter().all(|&a| a < 0.0), || "--alpha values must be negative".into())?;
                cfg.k = Some(*k);
                cfg.alpha = alpha.clone();
                cfg.order = Some(asym_order(*order)?);
            }
            Command::Conjecture { max_n } => {
                cfg.command = "conjecture";
                check((2..=ENUM_MAX).contains(max_n), || {
                    format!("--max-n must lie in 2..={ENUM_MAX}")
                })?;
                cfg.order = Some(*max_n);
            }
            Command::Gnp { n, p, trials, seed } => {
                cfg.command = "gnp";
                check(*n >= 2, || "--n must be at least 2".into())?;
                check(*p > 0.0 && *p < 1.0, || "--p must lie strictly between 0 and 1".into())?;
                check(*trials >= 1, || "--trials must be at least 1".into())?;
                cfg.n = vec![*n];
                cfg.p = Some(*p);
                cfg.trials = Some(*trials);
                cfg.seed = Some(*seed);
            }
            Command::Verify { max_n, max_j } => {
                cfg.command = "verify";
                check((2..=ENUM_MAX).contains(max_n), || {
                    format!("--max-n must lie in 2..={ENUM_MAX}")
                })?;
                check(*max_j >= 2, || "--max-j must be at least 2".into())?;
                cfg.order = Some(*max_n);
                cfg.k = Some(*max_j);
            }
        }
        Ok(cfg)
    }
}

fn asym_order(order: usize) -> Result<usize, UsageError> {
    check(order >= ASYM_MIN_ORDER, || {
        format!("--order must be at least {ASYM_MIN_ORDER}")
    })?;
    Ok(order)
}
