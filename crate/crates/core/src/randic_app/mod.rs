//! The Randić index against the average distance: an exhaustive scan over
//! small trees with exact tie-breaking, G(n, p) sampling, and the
//! linear-growth statement assembled from the λ bracket.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{all_mu_singular, lambda_bracket, AsymError, LambdaBracket, Singularity};
use crate::distlab::{loglog_fit, LogLogFit};
use crate::exact::{ser_rational, to_f64, ExactRational};
use crate::treelab::{
    count_free, gen_free_trees, gnp_sample_with, randic, scaled_inv_sqrt, wiener, FreeTree,
    SimpleGraph, TreeLabError,
};

#[cfg(test)]
mod tests;

/// Below this `|R − D|` the floating-point verdict is not trusted.
pub const ESCALATE_BELOW: f64 = 1e-6;
/// Starting precision (decimal digits) for the exact comparison.
pub const EXACT_DIGITS: u32 = 50;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RandicError {
    #[error(transparent)]
    TreeLab(#[from] TreeLabError),
    #[error(transparent)]
    Asym(#[from] AsymError),
    #[error("n_max = {0} is outside 2..=20")]
    ScanRange(usize),
    #[error("p = {0} must lie strictly between 0 and 1")]
    Probability(f64),
    #[error("need at least two vertices, got {0}")]
    TooSmall(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Strict,
    Equal,
    Violation,
}

/// One tree with its two invariants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub n: usize,
    /// Canonical level sequence.
    pub tree: String,
    pub edges: String,
    pub randic: f64,
    pub avg_distance: ExactRational,
    /// `R − D`, from the high-precision evaluation when it was needed.
    pub margin: f64,
    pub escalated: bool,
}

#[derive(Clone, Debug)]
struct TreeEval {
    verdict: Verdict,
    randic: f64,
    d: BigRational,
    margin: f64,
    escalated: bool,
}

/// `Σ_e 1/√(d_u d_v)` as `Σ_s q_s √s` over square-free `s`.
fn randic_surd(degrees: &[usize], edges: &[(usize, usize)]) -> BTreeMap<u64, BigRational> {
    let mut out: BTreeMap<u64, BigRational> = BTreeMap::new();
    for &(a, b) in edges {
        let m = (degrees[a] * degrees[b]) as u64;
        let (s, f) = squarefree_split(m);
        // 1/√(s f²) = √s / (f s)
        *out.entry(s).or_insert_with(BigRational::zero) +=
            BigRational::new(1.into(), BigInt::from(f * s));
    }
    out
}

/// `m = s·f²` with `s` square-free.
fn squarefree_split(mut m: u64) -> (u64, u64) {
    let (mut s, mut f) = (1, 1);
    let mut p = 2;
    while p * p <= m {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        f *= p.pow(e / 2);
        if e % 2 == 1 {
            s *= p;
        }
        p += 1;
    }
    (s * m, f)
}

/// Exact comparison of `R` with `D`. Square roots of distinct square-free
/// integers are linearly independent over ℚ, so `R = D` exactly when every
/// edge product is a square and the rational parts agree. Otherwise the sign
/// comes from fixed-point evaluation, doubling the digits until the
/// truncation error cannot flip it. Returns the ordering and `R − D`.
pub fn compare_exact(g: &SimpleGraph, d: &BigRational) -> (Ordering, f64) {
    let surd = randic_surd(g.degrees(), g.edges());
    if surd.keys().all(|&s| s == 1) {
        let r = surd.get(&1).cloned().unwrap_or_else(BigRational::zero);
        let diff = r - d;
        return (diff.cmp(&BigRational::zero()), to_f64(&diff));
    }
    let deg = g.degrees();
    let mut digits = EXACT_DIGITS;
    loop {
        let scale = BigUint::from(10u8).pow(digits);
        // two floors per edge, each losing less than one unit
        let r: BigUint = g
            .edges()
            .iter()
            .map(|&(a, b)| scaled_inv_sqrt((deg[a] * deg[b]) as u64, digits))
            .sum();
        let ds = (d * BigRational::from_integer(BigInt::from(scale.clone()))).floor();
        let diff = BigInt::from(r) - ds.to_integer();
        let slack = BigInt::from(2 * g.edges().len() + 1);
        if diff > slack || diff < -slack.clone() {
            let margin = BigRational::new(diff.clone(), BigInt::from(scale));
            return (diff.cmp(&BigInt::zero()), to_f64(&margin));
        }
        digits *= 2;
    }
}

fn evaluate(g: &SimpleGraph) -> Result<TreeEval, TreeLabError> {
    let n = g.n();
    let w = wiener(g)?;
    let d = BigRational::new(w.into(), (n * (n - 1) / 2).into());
    let r = randic(g);
    let approx = r - to_f64(&d);
    let (verdict, margin, escalated) = if approx.abs() < ESCALATE_BELOW {
        let (ord, m) = compare_exact(g, &d);
        let v = match ord {
            Ordering::Greater => Verdict::Strict,
            Ordering::Equal => Verdict::Equal,
            Ordering::Less => Verdict::Violation,
        };
        (v, m, true)
    } else if approx > 0.0 {
        (Verdict::Strict, approx, false)
    } else {
        (Verdict::Violation, approx, false)
    };
    Ok(TreeEval {
        verdict,
        randic: r,
        d,
        margin,
        escalated,
    })
}

fn witness(t: &FreeTree, e: &TreeEval) -> Witness {
    Witness {
        n: t.n(),
        tree: t.to_string(),
        edges: t.edge_list_string(),
        randic: e.randic,
        avg_distance: ExactRational::from(&e.d),
        margin: e.margin,
        escalated: e.escalated,
    }
}

/// Per-order results of the scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub n: usize,
    pub trees: u64,
    /// The enumerated count equals `t_n` from the counting series.
    pub count_matches_series: bool,
    pub strict: u64,
    pub equalities: u64,
    pub violations: u64,
    pub escalated: u64,
    /// Smallest `R − D` among trees that are not exact ties.
    pub min_margin: Option<Witness>,
    pub mean_randic_over_n: f64,
    #[serde(serialize_with = "ser_rational")]
    pub mean_avg_distance: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub max_avg_distance: BigRational,
    /// Every tree has `0 < R/(n−1) ≤ 1`.
    pub randic_per_edge_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub n_min: usize,
    pub n_max: usize,
    pub rows: Vec<ScanRow>,
    pub violations: Vec<Witness>,
    pub equalities: Vec<Witness>,
    /// Smallest `R − D` over the whole scan, ties excluded.
    pub min_margin: Option<Witness>,
    pub total_trees: u64,
}

impl ConjectureReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn better(a: Option<Witness>, b: Option<Witness>) -> Option<Witness> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y.margin < x.margin { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

fn scan_order(n: usize) -> Result<(ScanRow, Vec<Witness>, Vec<Witness>), RandicError> {
    let trees = gen_free_trees(n);
    let evals = trees
        .par_iter()
        .map(|t| evaluate(&t.to_graph()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut row = ScanRow {
        n,
        trees: trees.len() as u64,
        count_matches_series: count_free(n) == BigInt::from(trees.len()),
        strict: 0,
        equalities: 0,
        violations: 0,
        escalated: 0,
        min_margin: None,
        mean_randic_over_n: 0.0,
        mean_avg_distance: BigRational::zero(),
        max_avg_distance: BigRational::zero(),
        randic_per_edge_ok: true,
    };
    let (mut viol, mut eq) = (Vec::new(), Vec::new());
    let mut sum_r = 0.0;
    let mut sum_d = BigRational::zero();
    for (t, e) in trees.iter().zip(&evals) {
        match e.verdict {
            Verdict::Strict => row.strict += 1,
            Verdict::Equal => {
                row.equalities += 1;
                eq.push(witness(t, e));
            }
            Verdict::Violation => {
                row.violations += 1;
                viol.push(witness(t, e));
            }
        }
        if e.verdict != Verdict::Equal
            && row.min_margin.as_ref().is_none_or(|w| e.margin < w.margin)
        {
            row.min_margin = Some(witness(t, e));
        }
        row.escalated += e.escalated as u64;
        let per_edge = e.randic / (n - 1) as f64;
        row.randic_per_edge_ok &= per_edge > 0.0 && per_edge <= 1.0 + 1e-12;
        sum_r += e.randic;
        sum_d += &e.d;
        if e.d > row.max_avg_distance {
            row.max_avg_distance = e.d.clone();
        }
    }
    row.mean_randic_over_n = sum_r / (trees.len() * n) as f64;
    row.mean_avg_distance = sum_d / BigRational::from_integer(trees.len().into());
    Ok((row, viol, eq))
}

/// Classifies every free tree with `2 ≤ n ≤ n_max` by the sign of `R − D`.
pub fn conjecture_scan(n_max: usize) -> Result<ConjectureReport, RandicError> {
    if !(2..=20).contains(&n_max) {
        return Err(RandicError::ScanRange(n_max));
    }
    let mut report = ConjectureReport {
        n_min: 2,
        n_max,
        rows: Vec::new(),
        violations: Vec::new(),
        equalities: Vec::new(),
        min_margin: None,
        total_trees: 0,
    };
    for n in 2..=n_max {
        let (row, viol, eq) = scan_order(n)?;
        log::debug!("scan n = {n}: {} trees, {} violations", row.trees, row.violations);
        report.total_trees += row.trees;
        report.min_margin = better(report.min_margin.take(), row.min_margin.clone());
        report.violations.extend(viol);
        report.equalities.extend(eq);
        report.rows.push(row);
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GnpTrial {
    pub trial: u64,
    pub connected: bool,
    pub edges: usize,
    pub randic: f64,
    pub randic_over_n: f64,
    pub avg_distance: Option<f64>,
    pub diameter: Option<usize>,
    pub randic_exceeds_d: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GnpReport {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub trials: Vec<GnpTrial>,
    /// Disconnected samples, left out of every distance statistic.
    pub disconnected: usize,
    pub mean_randic_over_n: f64,
    pub max_avg_distance: Option<f64>,
    /// Share of connected samples with `R > D`.
    pub fraction_randic_exceeds_d: Option<f64>,
}

/// Wiener index and diameter in one pass of breadth-first searches; `None`
/// when disconnected.
fn wiener_and_diameter(g: &SimpleGraph) -> Option<(u64, usize)> {
    let per_source: Vec<Option<(u64, usize)>> = (0..g.n())
        .into_par_iter()
        .map(|v| {
            let prof = g.distance_profile(v);
            (prof.iter().sum::<usize>() == g.n()).then(|| {
                let s = prof.iter().enumerate().map(|(d, &c)| (d * c) as u64).sum();
                (s, prof.len() - 1)
            })
        })
        .collect();
    let mut total = 0;
    let mut diam = 0;
    for x in per_source {
        let (s, e) = x?;
        total += s;
        diam = diam.max(e);
    }
    Some((total / 2, diam))
}

/// The generator for trial `t`: ChaCha8 seeded from `seed`, on stream `t`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Samples `trials` graphs from G(n, p) and compares `R` with `D` on each.
pub fn gnp_conjecture_check(
    n: usize,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<GnpReport, RandicError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(RandicError::Probability(p));
    }
    if n < 2 {
        return Err(RandicError::TooSmall(n));
    }
    let rows = (0..trials)
        .map(|t| {
            let g = gnp_sample_with(n, p, &mut trial_rng(seed, t))?;
            let r = randic(&g);
            let wd = wiener_and_diameter(&g);
            let d = wd.map(|(w, _)| w as f64 / (n * (n - 1) / 2) as f64);
            Ok(GnpTrial {
                trial: t,
                connected: wd.is_some(),
                edges: g.edges().len(),
                randic: r,
                randic_over_n: r / n as f64,
                avg_distance: d,
                diameter: wd.map(|x| x.1),
                randic_exceeds_d: d.map(|d| r > d),
            })
        })
        .collect::<Result<Vec<_>, RandicError>>()?;
    let connected: Vec<&GnpTrial> = rows.iter().filter(|r| r.connected).collect();
    let max_d = connected
        .iter()
        .filter_map(|r| r.avg_distance)
        .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))));
    let frac = (!connected.is_empty()).then(|| {
        connected.iter().filter(|r| r.randic_exceeds_d == Some(true)).count() as f64
            / connected.len() as f64
    });
    Ok(GnpReport {
        n,
        p,
        seed,
        disconnected: rows.len() - connected.len(),
        mean_randic_over_n: rows.iter().map(|r| r.randic_over_n).sum::<f64>() / rows.len().max(1) as f64,
        max_avg_distance: max_d,
        fraction_randic_exceeds_d: frac,
        trials: rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderSummary {
    pub n: usize,
    pub mean_randic_over_n: f64,
    /// `mean_randic_over_n` lies inside the λ bracket.
    pub inside_bracket: bool,
    pub mean_avg_distance: f64,
    pub max_avg_distance: f64,
    pub all_randic_exceed_d: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthFit {
    pub fit_from: usize,
    pub fit_to: usize,
    /// `D ≈ e^{intercept}·n^{slope}`
    pub fit: LogLogFit,
    /// Smallest `n` past which `λ_lower·n` exceeds the fitted growth; `None`
    /// when the fitted exponent is not below one.
    pub crossover: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticStatement {
    pub k: usize,
    pub order: usize,
    pub lambda: LambdaBracket,
    pub bracket_inside_unit: bool,
    pub orders: Vec<OrderSummary>,
    pub mean_d_growth: GrowthFit,
    pub max_d_growth: GrowthFit,
    /// Every tree at the largest scanned order has `R > D`.
    pub all_exceed_at_n_max: bool,
}

/// Orders used for the D growth fits: the last seven scanned.
pub const GROWTH_FIT_ORDERS: usize = 7;

fn growth_fit(points: &[(usize, f64)], lambda_lower: f64) -> GrowthFit {
    let from = points.len().saturating_sub(GROWTH_FIT_ORDERS);
    let pts: Vec<(f64, f64)> = points[from..].iter().map(|&(n, d)| (n as f64, d)).collect();
    let fit = loglog_fit(&pts);
    // λ n > A n^γ  ⇔  n > (A/λ)^{1/(1−γ)}
    let crossover = (fit.slope < 1.0 && lambda_lower > 0.0)
        .then(|| (fit.intercept.exp() / lambda_lower).powf(1.0 / (1.0 - fit.slope)));
    GrowthFit {
        fit_from: points[from].0,
        fit_to: points[points.len() - 1].0,
        fit,
        crossover,
    }
}

/// λ bracket at truncation `k` from series of order `order`, set against the
/// exhaustive scan up to `n_max`.
pub fn asymptotic_statement(
    k: usize,
    order: usize,
    n_max: usize,
) -> Result<AsymptoticStatement, RandicError> {
    let sing = Singularity::compute(order)?;
    let mus: BTreeMap<_, _> = all_mu_singular(&sing, k)?
        .into_iter()
        .map(|(p, (e, _))| (p, e))
        .collect();
    let lambda = lambda_bracket(&mus, k, -0.5)?;
    let scan = conjecture_scan(n_max)?;
    statement_from(k, order, lambda, &scan)
}

/// [`asymptotic_statement`] from an existing bracket and scan.
pub fn statement_from(
    k: usize,
    order: usize,
    lambda: LambdaBracket,
    scan: &ConjectureReport,
) -> Result<AsymptoticStatement, RandicError> {
    if scan.rows.len() < 2 {
        return Err(RandicError::ScanRange(scan.n_max));
    }
    let orders: Vec<OrderSummary> = scan
        .rows
        .iter()
        .map(|r| OrderSummary {
            n: r.n,
            mean_randic_over_n: r.mean_randic_over_n,
            inside_bracket: r.mean_randic_over_n >= lambda.lower
                && r.mean_randic_over_n <= lambda.upper,
            mean_avg_distance: to_f64(&r.mean_avg_distance),
            max_avg_distance: to_f64(&r.max_avg_distance),
            all_randic_exceed_d: r.equalities == 0 && r.violations == 0,
        })
        .collect();
    let mean_pts: Vec<_> = orders.iter().map(|o| (o.n, o.mean_avg_distance)).collect();
    let max_pts: Vec<_> = orders.iter().map(|o| (o.n, o.max_avg_distance)).collect();
    Ok(AsymptoticStatement {
        k,
        order,
        bracket_inside_unit: lambda.lower > 0.1 && lambda.upper < 1.0,
        mean_d_growth: growth_fit(&mean_pts, lambda.lower),
        max_d_growth: growth_fit(&max_pts, lambda.lower),
        all_exceed_at_n_max: orders.last().is_some_and(|o| o.all_randic_exceed_d),
        orders,
        lambda,
    })
}
