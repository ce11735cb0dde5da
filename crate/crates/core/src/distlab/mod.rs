//! Probabilistic diagnostics on exact occurrence distributions: moments,
//! distance to the normal law, the `n^{3/4}` concentration tail, and the
//! Wiener-index growth over all trees of a given order.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::exact::{ser_opt_rational, ser_rational, to_f64};
use crate::pattern_gf::{solve_bivariate, BiSolution, GfError, SolveOptions, SystemSolution};
use crate::pseries::Coeff;
use crate::treelab::{gen_free_trees, wiener, PatternSpec, TreeLabError};

#[cfg(test)]
mod tests;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DistError {
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error(transparent)]
    TreeLab(#[from] TreeLabError),
    #[error("empty n grid")]
    EmptyGrid,
    #[error("range {lo}..={hi} is invalid: {reason}")]
    Range {
        lo: usize,
        hi: usize,
        reason: &'static str,
    },
}

/// Exact summary of `X_n`, the number of occurrences of one pattern in a
/// uniform free tree on `n` vertices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistSummary {
    pub pattern: PatternSpec,
    pub n: usize,
    #[serde(serialize_with = "ser_display")]
    pub trees: BigInt,
    #[serde(serialize_with = "ser_rational")]
    pub mean: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub variance: BigRational,
    /// Absent when the variance vanishes or the track lacks a third moment.
    pub skewness: Option<f64>,
    /// Absent on the jet track and for degenerate distributions.
    pub kolmogorov_to_normal: Option<f64>,
    /// `Pr[|X − E X| > n^{3/4}]`; absent on the jet track.
    #[serde(serialize_with = "ser_opt_rational")]
    pub tail_prob: Option<BigRational>,
    /// `Var X / n^{3/2}`
    pub chebyshev_bound: f64,
    /// `tail_prob ≤ Var X / n^{3/2}`, decided exactly.
    pub chebyshev_holds: Option<bool>,
    /// Variance zero: `X_n` is constant.
    pub degenerate: bool,
    /// Smallest and largest `k` with `t_{n,k} > 0`.
    pub support: Option<(usize, usize)>,
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn int(v: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Summary of `X_n`. On the jet track only the moment fields are filled.
pub fn summarize<C: Coeff>(sol: &SystemSolution<C>, n: usize) -> Result<DistSummary, DistError> {
    let m = sol.moments(n)?;
    let mean = m.mean();
    let variance = m.variance();
    let degenerate = variance.is_zero();
    let chebyshev_bound = to_f64(&variance) / (n as f64).powf(1.5);
    let mut out = DistSummary {
        pattern: sol.pattern,
        n,
        trees: m.trees.clone(),
        skewness: m.skewness(),
        kolmogorov_to_normal: None,
        tail_prob: None,
        chebyshev_bound,
        chebyshev_holds: None,
        degenerate,
        support: None,
        mean,
        variance,
    };
    let dist = match sol.distribution(n) {
        Ok(d) => d,
        Err(GfError::NoDistribution) => return Ok(out),
        Err(e) => return Err(e.into()),
    };
    let total: BigInt = dist.values().sum();
    debug_assert_eq!(total, m.trees, "row does not sum to t_n");
    out.support = Some((
        *dist.keys().next().expect("t_n > 0"),
        *dist.keys().next_back().expect("t_n > 0"),
    ));
    let tail = tail_probability(&dist, &total, &out.mean, n);
    // tail ≤ var / n^{3/2}  ⇔  tail²·n³ ≤ var², both sides non-negative
    let n3 = int(n).pow(3);
    out.chebyshev_holds = Some(&tail * &tail * n3 <= &out.variance * &out.variance);
    out.tail_prob = Some(tail);
    if !degenerate {
        out.kolmogorov_to_normal = Some(kolmogorov(&dist, &total, &out.mean, &out.variance));
    }
    Ok(out)
}

/// Exact `Pr[|X − mean| > n^{3/4}]`, deciding `|k − mean| > n^{3/4}` as
/// `(k − mean)⁴ > n³`.
fn tail_probability(
    dist: &BTreeMap<usize, BigInt>,
    total: &BigInt,
    mean: &BigRational,
    n: usize,
) -> BigRational {
    let n3 = int(n).pow(3);
    let hits: BigInt = dist
        .iter()
        .filter(|(&k, _)| (int(k) - mean).pow(4) > n3)
        .map(|(_, c)| c)
        .sum();
    BigRational::new(hits, total.clone())
}

/// `sup_k |F(k) − Φ((k + ½ − μ)/σ)|` over `k = −1, 0, …, kmax`, with `F`
/// the exact CDF.
fn kolmogorov(
    dist: &BTreeMap<usize, BigInt>,
    total: &BigInt,
    mean: &BigRational,
    variance: &BigRational,
) -> f64 {
    let mu = to_f64(mean);
    let sd = to_f64(variance).sqrt();
    let z = |x: f64| normal_cdf((x + 0.5 - mu) / sd);
    let kmax = *dist.keys().next_back().expect("non-empty");
    let mut best = z(-1.0);
    let mut cum = BigInt::zero();
    for k in 0..=kmax {
        if let Some(c) = dist.get(&k) {
            cum += c;
        }
        let f = BigRational::new(cum.clone(), total.clone()).to_f64().unwrap_or(f64::NAN);
        best = best.max((f - z(k as f64)).abs());
    }
    best
}

/// Skewness and Kolmogorov distance over a grid of orders.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalityTrend {
    pub pattern: PatternSpec,
    pub rows: Vec<DistSummary>,
    /// `|skewness|` strictly decreasing along the grid.
    pub skewness_decreasing: bool,
    pub kolmogorov_decreasing: bool,
    /// At most one increase along the grid and last below first.
    pub skewness_trend: bool,
    pub kolmogorov_trend: bool,
}

fn strictly_decreasing(v: &[Option<f64>]) -> bool {
    v.iter().all(Option::is_some) && v.windows(2).all(|w| w[1].unwrap() < w[0].unwrap())
}

fn weakly_decreasing(v: &[Option<f64>]) -> bool {
    if v.is_empty() || v.iter().any(Option::is_none) {
        return false;
    }
    let inversions = v.windows(2).filter(|w| w[1].unwrap() >= w[0].unwrap()).count();
    inversions <= 1 && v[v.len() - 1].unwrap() < v[0].unwrap()
}

/// Normality diagnostics on a solved bivariate track.
pub fn normality_trend(sol: &BiSolution, grid: &[usize]) -> Result<NormalityTrend, DistError> {
    if grid.is_empty() {
        return Err(DistError::EmptyGrid);
    }
    let rows = grid
        .par_iter()
        .map(|&n| summarize(sol, n))
        .collect::<Result<Vec<_>, _>>()?;
    let skew: Vec<_> = rows.iter().map(|r| r.skewness.map(f64::abs)).collect();
    let ks: Vec<_> = rows.iter().map(|r| r.kolmogorov_to_normal).collect();
    Ok(NormalityTrend {
        pattern: sol.pattern,
        skewness_decreasing: strictly_decreasing(&skew),
        kolmogorov_decreasing: strictly_decreasing(&ks),
        skewness_trend: weakly_decreasing(&skew),
        kolmogorov_trend: weakly_decreasing(&ks),
        rows,
    })
}

/// Solves the bivariate track up to the largest grid point, then runs
/// [`normality_trend`].
pub fn normality_trend_for(
    pattern: PatternSpec,
    grid: &[usize],
    opts: SolveOptions,
) -> Result<NormalityTrend, DistError> {
    let top = *grid.iter().max().ok_or(DistError::EmptyGrid)?;
    let sol = solve_bivariate(pattern, top, opts)?;
    normality_trend(&sol, grid)
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// `ln y − (intercept + slope·ln x)` per point.
    pub residuals: Vec<f64>,
}

pub fn loglog_fit(points: &[(f64, f64)]) -> LogLogFit {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = pts.iter().map(|p| p.1 - intercept - slope * p.0).collect();
    LogLogFit {
        slope,
        intercept,
        residuals,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WienerRow {
    pub n: usize,
    pub trees: u64,
    /// `E W(T_n)` over the uniform free tree.
    #[serde(serialize_with = "ser_rational")]
    pub mean_w: BigRational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WienerScaling {
    pub rows: Vec<WienerRow>,
    /// Orders used in the fit (the top half of the range).
    pub fit_from: usize,
    pub fit_to: usize,
    pub fit: LogLogFit,
}

/// Exact mean Wiener index over every free tree of order `n`.
pub fn mean_wiener(n: usize) -> Result<WienerRow, DistError> {
    let trees = gen_free_trees(n);
    let total = trees
        .par_iter()
        .map(|t| wiener(&t.to_graph()))
        .try_reduce(|| 0u64, |a, b| Ok(a + b))?;
    Ok(WienerRow {
        n,
        trees: trees.len() as u64,
        mean_w: BigRational::new(total.into(), trees.len().into()),
    })
}

/// Exact `E W(T_n)` for `n` in `lo..=hi`, with a log-log slope fitted over
/// `n ≥ (lo + hi)/2`.
pub fn wiener_scaling(lo: usize, hi: usize) -> Result<WienerScaling, DistError> {
    if lo < 2 {
        return Err(DistError::Range {
            lo,
            hi,
            reason: "W needs at least two vertices",
        });
    }
    let fit_from = (lo + hi) / 2;
    if hi < fit_from + 1 {
        return Err(DistError::Range {
            lo,
            hi,
            reason: "the fit needs two points",
        });
    }
    let rows = (lo..=hi).map(mean_wiener).collect::<Result<Vec<_>, _>>()?;
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.n >= fit_from)
        .map(|r| (r.n as f64, to_f64(&r.mean_w)))
        .collect();
    Ok(WienerScaling {
        fit: loglog_fit(&points),
        fit_from,
        fit_to: hi,
        rows,
    })
}
