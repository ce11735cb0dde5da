//! Counting series for double-star occurrences in free trees, and the exact
//! occurrence distributions and moments read off them.

mod solve;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::pseries::{
    free_series, rooted_series, CacheKey, CacheRecord, Coeff, CoeffCache, CoeffCodec, Jet, Series,
    UPoly,
};
use crate::treelab::{CaseKind, PatternError, PatternSpec};

pub use solve::{
    solve, solve_case1, solve_case2, solve_case3, verify_fixed_point, SolveOptions, Variant,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GfError {
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("pattern {pattern} is not handled by the {expected:?} system")]
    WrongCase {
        pattern: PatternSpec,
        expected: CaseKind,
    },
    #[error("n = {n} exceeds the truncation order {order}")]
    OrderExceeded { n: usize, order: usize },
    #[error("the jet track carries moments only; solve the bivariate track for distributions")]
    NoDistribution,
    #[error("factorial moment {m} needs jet order at least {}", m + 1)]
    JetOrderTooSmall { m: usize },
    #[error("second pass changed series {series} at degree {degree}")]
    FixedPointMismatch { series: &'static str, degree: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

/// The solved series of one case system, truncated at a common order.
///
/// For `(1, j)` the `ai` slot holds the series `x` (the leaf side), and for
/// `(j, j)` it duplicates `aj`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSolution<C> {
    pub pattern: PatternSpec,
    pub variant: Variant,
    pub a0: Series<C>,
    pub ai: Series<C>,
    pub aj: Series<C>,
    pub p: Series<C>,
    pub r: Series<C>,
    pub t: Series<C>,
}

pub type BiSolution = SystemSolution<UPoly>;
pub type JetSolution = SystemSolution<Jet>;

impl<C: Coeff> SystemSolution<C> {
    #[allow(clippy::too_many_arguments)]
    fn new(
        pattern: PatternSpec,
        variant: Variant,
        a0: Series<C>,
        ai: Series<C>,
        aj: Series<C>,
        p: Series<C>,
        r: Series<C>,
        t: Series<C>,
    ) -> Self {
        SystemSolution {
            pattern,
            variant,
            a0,
            ai,
            aj,
            p,
            r,
            t,
        }
    }

    pub fn order(&self) -> usize {
        self.t.order()
    }

    fn check_n(&self, n: usize) -> Result<(), GfError> {
        if n > self.order() {
            return Err(GfError::OrderExceeded {
                n,
                order: self.order(),
            });
        }
        Ok(())
    }

    /// The partition of `p` into root classes, and the `u = 1` collapse of
    /// `p` and `t` onto the plain tree series.
    pub fn check_invariants(&self) -> Result<(), GfError> {
        let order = self.order();
        let parts = match self.pattern.case_kind() {
            CaseKind::DistinctBoth => self.a0.add(&self.ai).add(&self.aj),
            CaseKind::OneIsLeaf => self.ai.add(&self.a0).add(&self.aj),
            CaseKind::Equal => self.a0.add(&self.aj),
        };
        if let Some(n) = (0..=order).find(|&n| parts.coeff(n) != self.p.coeff(n)) {
            return Err(GfError::Invariant(format!(
                "root classes do not sum to p at degree {n}"
            )));
        }
        let rooted = rooted_series(order);
        let free = free_series(order);
        for n in 0..=order {
            if &self.p.coeff(n).at_one() != rooted.coeff(n) {
                return Err(GfError::Invariant(format!("p(x,1) differs at degree {n}")));
            }
            if &self.t.coeff(n).at_one() != free.coeff(n) {
                return Err(GfError::Invariant(format!("t(x,1) differs at degree {n}")));
            }
        }
        Ok(())
    }

    /// `Σ_k C(k,m)·t_{n,k}` for `m = 0..=upto`.
    pub fn factorial_moments(&self, n: usize, upto: usize) -> Result<Vec<BigInt>, GfError> {
        self.check_n(n)?;
        self.t
            .coeff(n)
            .factorial_moments(upto)
            .ok_or(GfError::JetOrderTooSmall { m: upto })
    }

    /// Normalized moments of `X_n`, using the third factorial moment when the
    /// track carries it.
    pub fn moments(&self, n: usize) -> Result<Moments, GfError> {
        let upto = match self.factorial_moments(n, 3) {
            Ok(_) => 3,
            Err(GfError::JetOrderTooSmall { .. }) => 2,
            Err(e) => return Err(e),
        };
        let fm = self.factorial_moments(n, upto)?;
        Ok(Moments::from_factorial(n, &fm))
    }

    /// Row `k → t_{n,k}` of the exact distribution (zero entries omitted).
    pub fn distribution(&self, n: usize) -> Result<BTreeMap<usize, BigInt>, GfError> {
        self.check_n(n)?;
        let poly = self.t.coeff(n).as_poly().ok_or(GfError::NoDistribution)?;
        Ok(poly
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !Zero::is_zero(*c))
            .map(|(k, c)| (k, c.clone()))
            .collect())
    }
}

/// Free-function form of [`SystemSolution::distribution`].
pub fn occurrence_distribution<C: Coeff>(
    sol: &SystemSolution<C>,
    n: usize,
) -> Result<BTreeMap<usize, BigInt>, GfError> {
    sol.distribution(n)
}

/// Free-function form of [`SystemSolution::factorial_moments`].
pub fn factorial_moments<C: Coeff>(
    sol: &SystemSolution<C>,
    n: usize,
    upto: usize,
) -> Result<Vec<BigInt>, GfError> {
    sol.factorial_moments(n, upto)
}

/// Exact moments of `X_n` over the uniform free tree of order `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Moments {
    pub n: usize,
    /// `t_n`
    #[serde(serialize_with = "ser_display")]
    pub trees: BigInt,
    /// `E[C(X,m)]` for `m = 0..`, at least up to `m = 2`.
    #[serde(skip)]
    pub factorial: Vec<BigRational>,
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl Moments {
    /// From unnormalized sums `Σ_k C(k,m)·t_{n,k}`, `m = 0..`.
    pub fn from_factorial(n: usize, fm: &[BigInt]) -> Self {
        let trees = fm[0].clone();
        let factorial = fm
            .iter()
            .map(|m| BigRational::new(m.clone(), trees.clone()))
            .collect();
        Moments {
            n,
            trees,
            factorial,
        }
    }

    pub fn mean(&self) -> BigRational {
        self.factorial[1].clone()
    }

    /// `2·E[C(X,2)] + E X − (E X)²`
    pub fn variance(&self) -> BigRational {
        let mean = self.mean();
        BigRational::from_integer(2.into()) * &self.factorial[2] + &mean - &mean * &mean
    }

    /// `E(X − E X)³`, if the third factorial moment is available.
    pub fn third_central(&self) -> Option<BigRational> {
        let f3 = self.factorial.get(3)?;
        let int = |v: i64| BigRational::from_integer(v.into());
        let mean = self.mean();
        let ex2 = int(2) * &self.factorial[2] + &mean;
        let ex3 = int(6) * f3 + int(6) * &self.factorial[2] + &mean;
        Some(ex3 - int(3) * &mean * ex2 + int(2) * &mean * &mean * &mean)
    }

    /// `None` when the variance is zero or the third moment is missing.
    pub fn skewness(&self) -> Option<f64> {
        let var = self.variance();
        if var.is_zero() {
            return None;
        }
        let mu3 = self.third_central()?.to_f64()?;
        Some(mu3 / var.to_f64()?.powf(1.5))
    }
}

/// `solve` on the full bivariate track.
pub fn solve_bivariate(
    pattern: PatternSpec,
    order: usize,
    opts: SolveOptions,
) -> Result<BiSolution, GfError> {
    solve(pattern, order, &UPoly::constant(0), opts)
}

/// `solve` on the jet track with `jet_order` components.
pub fn solve_jet(
    pattern: PatternSpec,
    order: usize,
    jet_order: usize,
    opts: SolveOptions,
) -> Result<JetSolution, GfError> {
    solve(pattern, order, &Jet::zero(jet_order), opts)
}

const SERIES_NAMES: [&str; 6] = ["a0", "ai", "aj", "p", "r", "t"];

impl<C: CoeffCodec> SystemSolution<C> {
    /// Cache key for a solve with these parameters.
    pub fn cache_key(pattern: PatternSpec, order: usize, proto: &C, variant: Variant) -> CacheKey {
        CacheKey {
            kind: C::TRACK.to_owned(),
            pattern: Some((pattern.i(), pattern.j())),
            variant: effective_variant(pattern, variant).as_str().to_owned(),
            order_x: order,
            jet_order: proto.jet_order(),
        }
    }

    fn to_record(&self, key: &CacheKey) -> CacheRecord {
        let mut rec = CacheRecord::new(key);
        for (name, s) in SERIES_NAMES.iter().zip(self.all_series()) {
            rec.put(name, s);
        }
        rec
    }

    fn from_record(rec: &CacheRecord, pattern: PatternSpec, proto: &C, variant: Variant) -> Option<Self> {
        let mut it = SERIES_NAMES.iter().map(|name| rec.get(name, proto));
        let mut next = || it.next().flatten();
        let (a0, ai, aj, p, r, t) = (next()?, next()?, next()?, next()?, next()?, next()?);
        let order = t.order();
        [&a0, &ai, &aj, &p, &r]
            .iter()
            .all(|s| s.order() == order)
            .then(|| SystemSolution::new(pattern, variant, a0, ai, aj, p, r, t))
    }

    fn all_series(&self) -> [&Series<C>; 6] {
        [&self.a0, &self.ai, &self.aj, &self.p, &self.r, &self.t]
    }

    pub fn track(&self) -> &'static str {
        C::TRACK
    }
}

/// The variant only changes the case-1 system.
fn effective_variant(pattern: PatternSpec, variant: Variant) -> Variant {
    match pattern.case_kind() {
        CaseKind::DistinctBoth => variant,
        _ => Variant::Repaired,
    }
}

/// Like [`solve`], but reads and writes the on-disk cache. Returns the
/// solution and whether it came from the cache. Cached records are checked
/// against the invariants before use; a record that fails them is a miss.
pub fn solve_cached<C: CoeffCodec>(
    pattern: PatternSpec,
    order: usize,
    proto: &C,
    opts: SolveOptions,
    cache: Option<&CoeffCache>,
) -> Result<(SystemSolution<C>, bool), GfError> {
    let variant = effective_variant(pattern, opts.variant);
    let key = SystemSolution::cache_key(pattern, order, proto, variant);
    if let Some(cache) = cache {
        if let Some(rec) = cache.load(&key) {
            if let Some(sol) = SystemSolution::from_record(&rec, pattern, proto, variant) {
                if sol.order() == order && sol.check_invariants().is_ok() {
                    log::debug!("cache hit {}", cache.path_for(&key).display());
                    return Ok((sol, true));
                }
            }
            log::warn!("discarding unusable cache record {}", cache.path_for(&key).display());
        }
    }
    let sol = solve(pattern, order, proto, opts)?;
    if let Some(cache) = cache {
        if let Err(e) = cache.store(&key, &sol.to_record(&key)) {
            log::warn!("cache write failed: {e}");
        }
    }
    Ok((sol, false))
}

/// CSV rows `pattern_i,pattern_j,n,k,t_nk` for `n` in `ns`, with a header.
pub fn distribution_csv(
    sol: &BiSolution,
    ns: impl IntoIterator<Item = usize>,
) -> Result<String, GfError> {
    let mut out = String::from("pattern_i,pattern_j,n,k,t_nk\n");
    let (i, j) = (sol.pattern.i(), sol.pattern.j());
    for n in ns {
        for (k, c) in sol.distribution(n)? {
            writeln!(out, "{i},{j},{n},{k},{c}").expect("write to String");
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
