//! Singularity constants and the per-pattern growth constants of the mean
//! and variance of the occurrence count, each by two independent routes.

mod singularity;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::pattern_gf::{solve_jet, GfError, JetSolution, SolveOptions};
use crate::pseries::{
    eval_tail, free_series, partial_sum, ratio_to_f64, rooted_series, scaled_term, Coeff, Estimate,
    SeriesError, TailModel, UniSeries,
};
use crate::treelab::{all_patterns, CaseKind, PatternSpec};

pub use singularity::{
    characteristic, compute_b, find_x0, find_x0_from, fx_identity, ratio_radius, BEstimate,
    X0Estimate, P_EXPONENT,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AsymError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error("order {order} is too small; need at least {need}")]
    OrderTooSmall { order: usize, need: usize },
    #[error("no sign change found while solving {0}")]
    NoBracket(&'static str),
    #[error("the tail bound needs alpha < 0, got {0}")]
    AlphaNotNegative(f64),
}

/// Default window of trailing differences fed to the Aitken step.
pub const AITKEN_WINDOW: usize = 50;
/// Order of the jet-track solve used for `w` (only points `x0^k`, `k ≥ 2`,
/// are evaluated, where the series converges geometrically).
pub const W_ORDER: usize = 150;

/// `x0`, `b` and the planted-tree series they came from, shared by all
/// per-pattern computations.
#[derive(Clone, Debug)]
pub struct Singularity {
    pub x0: X0Estimate,
    pub b: BEstimate,
    p: UniSeries,
}

impl Singularity {
    pub fn compute(order: usize) -> Result<Self, AsymError> {
        let p = rooted_series(order);
        let x0 = find_x0_from(&p)?;
        let b = compute_b(&x0, &p)?;
        Ok(Singularity { x0, b, p })
    }

    pub fn p(&self) -> &UniSeries {
        &self.p
    }

    /// `2/(x0·b²)`
    pub fn scale(&self) -> Estimate {
        let (x, b) = (self.x0.value, self.b.value);
        let v = 2.0 / (x * b * b);
        let rel = self.x0.error / x + 2.0 * self.b.error / b;
        Estimate::new(v, v * rel)
    }
}

/// `Z(S_L; s)` and its derivative at `u = 1` for `s_k(u) = a_k + u^k·b_k`;
/// `a[k−1]`, `b[k−1]` hold the values for index `k`.
pub fn cycle_index_derivative(l: usize, a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut z = vec![1.0];
    let mut dz = vec![0.0];
    for m in 1..=l {
        let (mut v, mut dv) = (0.0, 0.0);
        for k in 1..=m {
            let s = a[k - 1] + b[k - 1];
            v += s * z[m - k];
            dv += k as f64 * b[k - 1] * z[m - k] + s * dz[m - k];
        }
        z.push(v / m as f64);
        dz.push(dv / m as f64);
    }
    (z[l], dz[l])
}

/// `p` at the points `x0^e`, with `p(x0) = 1` exactly.
struct PointValues {
    x0: f64,
    p: Vec<f64>,
}

impl PointValues {
    fn new(p: &UniSeries, x0: f64, max_exp: usize) -> Self {
        let mut vals = vec![0.0, 1.0];
        for e in 2..=max_exp {
            vals.push(partial_sum(p.coeffs(), x0.powi(e as i32)));
        }
        PointValues { x0, p: vals }
    }

    fn at(&self, e: usize) -> f64 {
        self.p[e]
    }

    /// `Z(S_L; p)` evaluated at `x0^m`.
    fn z_of_p(&self, l: usize, m: usize) -> f64 {
        let a: Vec<f64> = (1..=l).map(|k| self.at(m * k)).collect();
        cycle_index_derivative(l, &a, &vec![0.0; l]).0
    }

    /// `x·Z(S_{d−1}; p)` at `x0^m`: the planted trees whose root has degree
    /// `d`, at `u = 1`.
    fn rooted_class(&self, d: usize, m: usize) -> f64 {
        self.x0.powi(m as i32) * self.z_of_p(d - 1, m)
    }
}

/// `Σ_{ℓ1+ℓ2=L} Z(S_ℓ1; A)·Z(S_ℓ2; B)·ℓ2` at `x0`, for `A = p − B` and
/// `B` given per exponent.
fn root_sum(pv: &PointValues, l: usize, b_at: impl Fn(usize) -> f64) -> f64 {
    let b: Vec<f64> = (1..=l).map(&b_at).collect();
    let a: Vec<f64> = (1..=l).map(|k| pv.at(k) - b[k - 1]).collect();
    cycle_index_derivative(l, &a, &b).1
}

/// Result of [`compute_w`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WEstimate {
    pub value: f64,
    pub error: f64,
    /// `Σ_{k≥2} p_u(x0^k, 1)`
    pub pu_sum: f64,
    /// `x0` times the case-specific root sums.
    pub root_sum: f64,
}

impl WEstimate {
    pub fn estimate(&self) -> Estimate {
        Estimate::new(self.value, self.error)
    }
}

fn w_at(sol: &JetSolution, p: &UniSeries, x0: f64) -> (f64, f64, f64) {
    let (i, j) = (sol.pattern.i(), sol.pattern.j());
    let pv = PointValues::new(p, x0, j * j + 2);
    let pu: Vec<BigInt> = sol
        .p
        .coeffs()
        .iter()
        .map(|c| c.factorial_moments(1).expect("jet order ≥ 2")[1].clone())
        .collect();
    // Terms fall like x0^{k−1}; 60 of them reach 1e-28.
    let pu_sum: f64 = (2..60).map(|k| partial_sum(&pu, x0.powi(k))).sum();
    let root = match sol.pattern.case_kind() {
        CaseKind::DistinctBoth => {
            root_sum(&pv, i - 1, |k| pv.rooted_class(j, k))
                + root_sum(&pv, j - 1, |k| pv.rooted_class(i, k))
        }
        CaseKind::OneIsLeaf => root_sum(&pv, j - 1, |k| x0.powi(k as i32)),
        CaseKind::Equal => root_sum(&pv, j - 1, |k| pv.rooted_class(j, k)),
    };
    (pu_sum + x0 * root, pu_sum, x0 * root)
}

/// `w(i,j)` from the jet-track solution of the pattern. The error is the
/// response of the formula to the quoted `x0` error plus the truncation of
/// the `p_u` sums.
pub fn compute_w(sol: &JetSolution, sing: &Singularity) -> Result<WEstimate, AsymError> {
    if sol.order() < 40 {
        return Err(AsymError::OrderTooSmall {
            order: sol.order(),
            need: 40,
        });
    }
    let x0 = sing.x0.value;
    let (v, pu_sum, root) = w_at(sol, &sing.p, x0);
    let (v2, _, _) = w_at(sol, &sing.p, x0 + sing.x0.error.max(1e-15));
    // last retained p_u term at x0² bounds the truncation
    let n = sol.order();
    let last = sol.p.coeff(n).factorial_moments(1).expect("jet order ≥ 2")[1].clone();
    let trunc = scaled_term(&last, 2.0 * x0.ln(), n).abs() * 2.0;
    Ok(WEstimate {
        value: v,
        error: (v2 - v).abs() + trunc,
        pu_sum,
        root_sum: root,
    })
}

/// Limit of a slowly converging sequence by Aitken's Δ² over a trailing
/// window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extrapolated {
    pub estimate: Estimate,
    /// The accelerated window moved by less than 1% of the level.
    pub settled: bool,
    /// The raw trailing window the estimate came from.
    pub raw: Vec<f64>,
}

/// Aitken Δ² on the last `window` entries of `seq`. The value is the final
/// accelerated term; the error is the largest change among the last quarter
/// of accelerated terms, or the raw spread if that is smaller.
pub fn aitken_limit(seq: &[f64], window: usize) -> Extrapolated {
    let w = window.min(seq.len());
    let raw = seq[seq.len() - w..].to_vec();
    let mut acc = Vec::new();
    for t in raw.windows(3) {
        let d2 = t[2] - 2.0 * t[1] + t[0];
        if d2.abs() > 1e-300 && d2.is_finite() {
            acc.push(t[2] - (t[2] - t[1]).powi(2) / d2);
        } else {
            acc.push(t[2]);
        }
    }
    let raw_spread = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - raw.iter().cloned().fold(f64::INFINITY, f64::min);
    if acc.is_empty() {
        let v = *raw.last().unwrap_or(&f64::NAN);
        return Extrapolated {
            estimate: Estimate::new(v, raw_spread.abs()),
            settled: false,
            raw,
        };
    }
    let v = *acc.last().unwrap();
    let tail = &acc[acc.len() - (acc.len() / 4).max(1)..];
    let drift = tail.iter().map(|a| (a - v).abs()).fold(0.0, f64::max);
    let err = drift.min(raw_spread.abs()).max(f64::EPSILON * v.abs());
    Extrapolated {
        estimate: Estimate::new(v, err),
        settled: raw_spread.abs() < 0.01 * v.abs().max(1e-300),
        raw,
    }
}

/// `m1/m0` and the variance of `X_n` for `n = 1..=order`, exactly.
fn exact_moments(sol: &JetSolution) -> Result<Vec<(BigRational, BigRational)>, AsymError> {
    (1..=sol.order())
        .map(|n| {
            let m = sol.moments(n)?;
            Ok((m.mean(), m.variance()))
        })
        .collect()
}

fn to_f64(q: &BigRational) -> f64 {
    ratio_to_f64(q.numer(), q.denom())
}

/// `E X_n − E X_{n−1}` and `Var X_n − Var X_{n−1}` for `n = 2..=order`,
/// differenced exactly before conversion.
pub fn moment_differences(sol: &JetSolution) -> Result<(Vec<f64>, Vec<f64>), AsymError> {
    let m = exact_moments(sol)?;
    let mean = m.windows(2).map(|w| to_f64(&(&w[1].0 - &w[0].0))).collect();
    let var = m.windows(2).map(|w| to_f64(&(&w[1].1 - &w[0].1))).collect();
    Ok((mean, var))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MuMethod {
    Singularity,
    Extrapolation,
    #[default]
    Both,
}

impl std::str::FromStr for MuMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "singularity" => Ok(MuMethod::Singularity),
            "extrapolation" => Ok(MuMethod::Extrapolation),
            "both" => Ok(MuMethod::Both),
            other => Err(format!("unknown method {other:?} (singularity|extrapolation|both)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MuEstimate {
    pub pattern: PatternSpec,
    pub method: MuMethod,
    pub value: f64,
    pub error: f64,
    pub w: Option<WEstimate>,
    pub singularity: Option<Estimate>,
    pub extrapolation: Option<Extrapolated>,
    /// Routes disagree beyond their combined errors, or the extrapolation
    /// did not settle.
    pub flagged: bool,
}

impl MuEstimate {
    pub fn estimate(&self) -> Estimate {
        Estimate::new(self.value, self.error)
    }

    /// `|singular − extrapolated| / singular`, when both routes ran.
    pub fn relative_spread(&self) -> Option<f64> {
        let (s, e) = (self.singularity?, self.extrapolation.as_ref()?);
        Some((s.value - e.estimate.value).abs() / s.value.abs())
    }
}

/// `μ = 2·w/(x0·b²)` from a jet solution of order ≥ 40.
pub fn mu_singular(sol: &JetSolution, sing: &Singularity) -> Result<(Estimate, WEstimate), AsymError> {
    let w = compute_w(sol, sing)?;
    let s = sing.scale();
    let v = s.value * w.value;
    let err = s.error * w.value + s.value * w.error;
    Ok((Estimate::new(v, err), w))
}

/// `μ(i,j)` by the requested route(s). `order` is the jet-track order used
/// for the extrapolation route.
pub fn compute_mu(
    pattern: PatternSpec,
    sing: &Singularity,
    method: MuMethod,
    order: usize,
) -> Result<MuEstimate, AsymError> {
    let opts = SolveOptions {
        verify_fixed_point: false,
        ..Default::default()
    };
    let singular = match method {
        MuMethod::Extrapolation => None,
        _ => {
            let sol = solve_jet(pattern, W_ORDER, 2, opts)?;
            Some(mu_singular(&sol, sing)?)
        }
    };
    let extrap = match method {
        MuMethod::Singularity => None,
        _ => {
            if order < AITKEN_WINDOW + 3 {
                return Err(AsymError::OrderTooSmall {
                    order,
                    need: AITKEN_WINDOW + 3,
                });
            }
            let sol = solve_jet(pattern, order, 3, opts)?;
            let (mean_diff, _) = moment_differences(&sol)?;
            Some(aitken_limit(&mean_diff, AITKEN_WINDOW))
        }
    };
    let (value, error, flagged) = match (&singular, &extrap) {
        (Some((s, _)), None) => (s.value, s.error, false),
        (None, Some(e)) => (e.estimate.value, e.estimate.error, !e.settled),
        (Some((s, _)), Some(e)) => {
            let spread = (s.value - e.estimate.value).abs();
            let flagged = !e.settled || spread > s.error + e.estimate.error;
            (s.value, s.error.max(spread), flagged)
        }
        (None, None) => unreachable!("every method runs at least one route"),
    };
    Ok(MuEstimate {
        pattern,
        method,
        value,
        error,
        w: singular.map(|(_, w)| w),
        singularity: singular.map(|(s, _)| s),
        extrapolation: extrap,
        flagged,
    })
}

/// Variance growth constant from the variance differences.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaEstimate {
    pub pattern: PatternSpec,
    pub value: f64,
    pub error: f64,
    pub extrapolation: Extrapolated,
    pub flagged: bool,
}

pub fn sigma_estimate(pattern: PatternSpec, order: usize) -> Result<SigmaEstimate, AsymError> {
    if order < AITKEN_WINDOW + 3 {
        return Err(AsymError::OrderTooSmall {
            order,
            need: AITKEN_WINDOW + 3,
        });
    }
    let opts = SolveOptions {
        verify_fixed_point: false,
        ..Default::default()
    };
    let sol = solve_jet(pattern, order, 3, opts)?;
    let (_, var_diff) = moment_differences(&sol)?;
    let e = aitken_limit(&var_diff, AITKEN_WINDOW);
    Ok(SigmaEstimate {
        pattern,
        value: e.estimate.value,
        error: e.estimate.error,
        flagged: !e.settled,
        extrapolation: e,
    })
}

/// Bracket on `λ_α = Σ_{i≤j} μ(i,j)·(ij)^α`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaBracket {
    pub alpha: f64,
    pub k: usize,
    pub lower: f64,
    pub upper: f64,
    /// Propagated `μ` error, already applied to `lower` and `upper`.
    pub error: f64,
    /// `Σ_{i≤j≤K} μ(i,j)`
    pub mu_sum: f64,
    pub terms: Vec<LambdaTerm>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LambdaTerm {
    pub i: usize,
    pub j: usize,
    pub mu: f64,
    pub contribution: f64,
}

/// `(ij)^α`, with `α = −½` routed through `sqrt` as in the Randić index.
fn weight(i: usize, j: usize, alpha: f64) -> f64 {
    crate::treelab::edge_weight(i * j, alpha)
}

/// `lower = Σ_{i≤j≤K} μ(i,j)(ij)^α − err`, `upper = lower + max(0, 1 −
/// Σμ)·K^α + 2·err`, since every edge outside the truncation has
/// `ij > K` and `α < 0`.
pub fn lambda_bracket(
    mus: &BTreeMap<PatternSpec, Estimate>,
    k: usize,
    alpha: f64,
) -> Result<LambdaBracket, AsymError> {
    if alpha >= 0.0 || alpha.is_nan() {
        return Err(AsymError::AlphaNotNegative(alpha));
    }
    let mut terms = Vec::new();
    let (mut sum, mut mu_sum, mut err, mut mu_err) = (0.0, 0.0, 0.0, 0.0);
    for (p, mu) in mus.iter().filter(|(p, _)| p.j() <= k) {
        let w = weight(p.i(), p.j(), alpha);
        sum += mu.value * w;
        mu_sum += mu.value;
        err += mu.error * w;
        mu_err += mu.error;
        terms.push(LambdaTerm {
            i: p.i(),
            j: p.j(),
            mu: mu.value,
            contribution: mu.value * w,
        });
    }
    let rest = (1.0 - mu_sum + mu_err).max(0.0);
    Ok(LambdaBracket {
        alpha,
        k,
        lower: sum - err,
        upper: sum + err + rest * (k as f64).powf(alpha),
        error: err,
        mu_sum,
        terms,
    })
}

/// Singularity-route `μ` for every pattern with `j ≤ k`, in parallel.
pub fn all_mu_singular(
    sing: &Singularity,
    k: usize,
) -> Result<BTreeMap<PatternSpec, (Estimate, WEstimate)>, AsymError> {
    let opts = SolveOptions {
        verify_fixed_point: false,
        ..Default::default()
    };
    all_patterns(k)
        .into_par_iter()
        .map(|p| {
            let sol = solve_jet(p, W_ORDER, 2, opts)?;
            Ok((p, mu_singular(&sol, sing)?))
        })
        .collect()
}

/// `(1 + r(x0²))/2`, the value `t(x0, 1)` must take.
pub fn t_at_x0_target(sing: &Singularity) -> f64 {
    let x = sing.x0.value;
    (1.0 + partial_sum(sing.p.coeffs(), x * x)) / 2.0
}

/// `t(x0,1)` from the free-tree series with the `n^{-5/2}` tail model. The
/// error adds the change of the value across the quoted `x0` error.
pub fn t_at_x0(sing: &Singularity) -> Result<Estimate, AsymError> {
    let t = free_series(sing.p.order());
    let x = sing.x0.value;
    let model = TailModel {
        radius: x,
        exponent: -2.5,
    };
    let e = eval_tail(t.coeffs(), x, model)?;
    let shifted = eval_tail(t.coeffs(), x - sing.x0.error, model)?;
    Ok(Estimate::new(
        e.value,
        e.error_bound + (e.value - shifted.value).abs(),
    ))
}

/// Machine-readable summary of the constants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticConstants {
    pub x0: X0Estimate,
    pub b: BEstimate,
    pub patterns: Vec<PatternConstants>,
    pub lambda: Option<LambdaBracket>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PatternConstants {
    pub i: usize,
    pub j: usize,
    pub w: Option<WEstimate>,
    pub mu: MuEstimate,
    pub sigma: Option<SigmaEstimate>,
}

/// Builds the constants report for `patterns`: `μ` by `method` with
/// extrapolation order `order`, `σ` when `with_sigma`, and the `λ` bracket
/// over all patterns with `j ≤ K` when requested.
pub fn constants_report(
    sing: &Singularity,
    patterns: &[PatternSpec],
    method: MuMethod,
    order: usize,
    with_sigma: bool,
    lambda: Option<(usize, f64)>,
) -> Result<AsymptoticConstants, AsymError> {
    let rows: Result<Vec<_>, AsymError> = patterns
        .par_iter()
        .map(|&p| {
            let mu = compute_mu(p, sing, method, order)?;
            let sigma = if with_sigma {
                Some(sigma_estimate(p, order)?)
            } else {
                None
            };
            Ok(PatternConstants {
                i: p.i(),
                j: p.j(),
                w: mu.w,
                mu,
                sigma,
            })
        })
        .collect();
    let lambda = match lambda {
        Some((k, alpha)) => {
            let mus = all_mu_singular(sing, k)?
                .into_iter()
                .map(|(p, (e, _))| (p, e))
                .collect();
            Some(lambda_bracket(&mus, k, alpha)?)
        }
        None => None,
    };
    Ok(AsymptoticConstants {
        x0: sing.x0,
        b: sing.b,
        patterns: rows?,
        lambda,
    })
}
