//! Exact truncated power series with the plethystic operators used by the
//! tree functional equations, plus numeric evaluation near the singularity.

mod cache;
mod numeric;
mod ops;
mod ring;
mod series;

pub use cache::{CacheKey, CacheRecord, CoeffCache, CoeffCodec, CACHE_FORMAT_VERSION};
pub use numeric::{
    eval_tail, ln_abs, partial_sum, ratio_to_f64, scaled_term, tail_sum, Estimate, TailEval,
    TailModel,
};
pub use ops::{cycle_index_apply, cycle_index_table, sym_exp, CycleTower, EulerTower};
pub use ring::{Coeff, Jet, UPoly};
pub use series::{BiSeries, JetSeries, Series, UniSeries};

use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SeriesError {
    #[error("symmetric exponential needs a series with zero constant term")]
    NonZeroConstant,
    #[error("x = {x} is outside the disk of convergence (radius {radius})")]
    OutsideDisk { x: f64, radius: f64 },
    #[error("tail sum diverges at the radius for this exponent")]
    DivergentTail,
    #[error("series of order {0} is too short for a tail fit")]
    TooShort(usize),
}

/// Planted-tree series `p(x) = x·exp(Σ_k p(x^k)/k)` through `x^order`;
/// equal to the rooted-tree series `r(x)`.
pub fn rooted_series(order: usize) -> UniSeries {
    let zero = BigInt::default();
    let mut p = vec![zero.clone(); order + 1];
    let mut euler = EulerTower::new(&zero);
    for n in 1..=order {
        euler.push(&p);
        p[n] = euler.get(n - 1).clone();
    }
    Series::from_coeffs(p)
}

/// Free-tree series via `t = r − ½p² + ½p(x²)`.
pub fn free_series(order: usize) -> UniSeries {
    let p = rooted_series(order);
    otter_free(&p, &p)
}

/// `r − ½p² + ½p(x²)` for univariate `r`, `p`.
pub fn otter_free(r: &UniSeries, p: &UniSeries) -> UniSeries {
    r.scale(&2.into())
        .sub(&p.mul(p))
        .add(&p.pleth(2))
        .div_exact(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rooted_tree_counts() {
        let r = rooted_series(10);
        let expected = [0, 1, 1, 2, 4, 9, 20, 48, 115, 286, 719];
        assert_eq!(r, UniSeries::from_ints(10, &expected));
    }

    #[test]
    fn free_tree_counts() {
        let t = free_series(12);
        let expected = [0, 1, 1, 1, 2, 3, 6, 11, 23, 47, 106, 235, 551];
        assert_eq!(t, UniSeries::from_ints(12, &expected));
    }

    #[test]
    fn rooted_series_satisfies_its_equation() {
        let p = rooted_series(40);
        let rhs = sym_exp(&p).unwrap().mul_x();
        assert_eq!(rhs, p);
    }

    #[test]
    fn planted_by_root_degree_sums_to_p() {
        // Σ_k x·Z(S_{k−1}; p) over root degrees k recovers p.
        let n = 25;
        let p = rooted_series(n);
        let table = cycle_index_table(n, &p);
        let total = table
            .iter()
            .fold(UniSeries::zero(n, &BigInt::default()), |acc, z| acc.add(&z.mul_x()));
        assert_eq!(total, p);
    }

    #[test]
    fn square_matches_bruteforce_convolution() {
        let p = rooted_series(10);
        let sq = p.mul(&p);
        let brute: BigInt = (0..=10).map(|a| p.coeff(a) * p.coeff(10 - a)).sum();
        assert_eq!(sq.coeff(10), &brute);
    }
}
