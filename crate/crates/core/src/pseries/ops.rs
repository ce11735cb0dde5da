//! Cycle-index and symmetric-exponential operators, in batch form and as
//! incremental towers that advance one degree at a time.
//!
//! The incremental forms are what the degree-by-degree solver drives: to get
//! coefficient `d` of an operator output they only need input coefficients up
//! to `d` (and for `Z(S_k; f)` with `k ≥ 2`, only up to `d − 1`).

use super::ring::Coeff;
use super::series::Series;
use super::SeriesError;

/// `Z(S_k; f)` for one `k`, by the recurrence
/// `Z(S_k; f) = (1/k) Σ_{m=1..k} f(x^m, u^m) · Z(S_{k−m}; f)`.
pub fn cycle_index_apply<C: Coeff>(k: usize, f: &Series<C>) -> Series<C> {
    cycle_index_table(k, f).pop().expect("table has k + 1 entries")
}

/// `[Z(S_0; f), …, Z(S_kmax; f)]`.
pub fn cycle_index_table<C: Coeff>(kmax: usize, f: &Series<C>) -> Vec<Series<C>> {
    let order = f.order();
    let plethed: Vec<Series<C>> = (1..=kmax).map(|m| f.pleth(m)).collect();
    let mut table = vec![Series::one(order, f.proto())];
    for k in 1..=kmax {
        let mut acc = Series::zero(order, f.proto());
        for m in 1..=k {
            acc = acc.add(&plethed[m - 1].mul(&table[k - m]));
        }
        table.push(acc.div_exact(k as u64));
    }
    table
}

/// The multiset operator `exp(Σ_{k≥1} f(x^k, u^k)/k) = Σ_k Z(S_k; f)`.
pub fn sym_exp<C: Coeff>(f: &Series<C>) -> Result<Series<C>, SeriesError> {
    if !f.coeff(0).is_zero() {
        return Err(SeriesError::NonZeroConstant);
    }
    let mut tower = EulerTower::new(f.proto());
    for _ in 0..=f.order() {
        tower.push(f.coeffs());
    }
    Ok(Series::from_coeffs(tower.into_coeffs()))
}

/// Incremental Euler transform.
///
/// With `C_s = Σ_{b | s} b · f_b(u^{s/b})`, the output `g = sym_exp(f)`
/// satisfies `d · g_d = Σ_{s=1..d} C_s · g_{d−s}`.
#[derive(Clone, Debug)]
pub struct EulerTower<C> {
    weights: Vec<C>,
    out: Vec<C>,
}

impl<C: Coeff> EulerTower<C> {
    pub fn new(proto: &C) -> Self {
        EulerTower {
            weights: vec![proto.zero_like()],
            out: Vec::new(),
        }
    }

    /// Number of output coefficients already known.
    pub fn len(&self) -> usize {
        self.out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out.is_empty()
    }

    pub fn get(&self, d: usize) -> &C {
        &self.out[d]
    }

    /// Computes the next output coefficient `d = self.len()`. Needs `f`
    /// known through degree `d`.
    pub fn push(&mut self, f: &[C]) {
        let d = self.out.len();
        if d == 0 {
            self.out.push(self.weights[0].one_like());
            return;
        }
        let mut w = self.weights[0].zero_like();
        for b in 1..=d {
            if d % b == 0 && !f[b].is_zero() {
                w.add_assign_ref(&f[b].pleth(d / b).scale(&b.into()));
            }
        }
        self.weights.push(w);
        let mut acc = self.weights[0].zero_like();
        for s in 1..=d {
            acc.mul_add_assign(&self.weights[s], &self.out[d - s]);
        }
        self.out.push(acc.div_exact(d as u64));
    }

    pub fn coeffs(&self) -> &[C] {
        &self.out
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.out
    }
}

/// Incremental `Z(S_0; f) … Z(S_kmax; f)` for a growing series `f`.
#[derive(Clone, Debug)]
pub struct CycleTower<C> {
    kmax: usize,
    /// `z[k][d]` = coefficient of `x^d` in `Z(S_k; f)`.
    z: Vec<Vec<C>>,
    /// `plethed[m-1][b]` = `f_b(u^m)`, cached.
    plethed: Vec<Vec<C>>,
}

impl<C: Coeff> CycleTower<C> {
    pub fn new(kmax: usize) -> Self {
        CycleTower {
            kmax,
            z: vec![Vec::new(); kmax + 1],
            plethed: vec![Vec::new(); kmax],
        }
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    pub fn len(&self) -> usize {
        self.z[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.z[0].is_empty()
    }

    pub fn get(&self, k: usize, d: usize) -> &C {
        &self.z[k][d]
    }

    pub fn row(&self, k: usize) -> &[C] {
        &self.z[k]
    }

    /// Computes degree `d = self.len()` of every `Z(S_k; f)`; needs `f`
    /// known through degree `d` (`f[0]` must be zero).
    pub fn push(&mut self, f: &[C]) {
        let d = self.len();
        let zero = f[0].zero_like();
        self.z[0].push(if d == 0 { zero.one_like() } else { zero.clone() });
        for m in 1..=self.kmax {
            let cache = &mut self.plethed[m - 1];
            while cache.len() * m <= d {
                let b = cache.len();
                cache.push(f[b].pleth(m));
            }
        }
        for k in 1..=self.kmax {
            let mut acc = zero.clone();
            for m in 1..=k {
                let lower = &self.z[k - m];
                let cache = &self.plethed[m - 1];
                let mut b = 1;
                while b * m <= d {
                    let (fb, zl) = (&cache[b], &lower[d - b * m]);
                    if !fb.is_zero() && !zl.is_zero() {
                        acc.mul_add_assign(fb, zl);
                    }
                    b += 1;
                }
            }
            self.z[k].push(acc.div_exact(k as u64));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pseries::ring::{Jet, UPoly};
    use crate::pseries::series::{BiSeries, UniSeries};
    use num_bigint::BigInt;
    use num_traits::One;

    /// Independent oracle: explicit sum over the partitions of `k`,
    /// `Z(S_k) = Σ_λ Π s_m^{c_m} / (Π m^{c_m} c_m!)`.
    fn partition_sum<C: Coeff>(k: usize, f: &Series<C>) -> Series<C> {
        fn partitions(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if n == 0 {
                out.push(cur.clone());
                return;
            }
            for part in (1..=n.min(max)).rev() {
                cur.push(part);
                partitions(n - part, part, cur, out);
                cur.pop();
            }
        }
        let mut parts = Vec::new();
        partitions(k, k, &mut Vec::new(), &mut parts);
        let k_fact: BigInt = (1..=k).map(BigInt::from).product();
        let mut acc = Series::zero(f.order(), f.proto());
        for lambda in parts {
            let mut counts = vec![0usize; k + 1];
            for &m in &lambda {
                counts[m] += 1;
            }
            let mut z_lambda = BigInt::one();
            let mut term = Series::one(f.order(), f.proto());
            for (m, &c) in counts.iter().enumerate().skip(1) {
                for t in 1..=c {
                    z_lambda *= BigInt::from(m) * BigInt::from(t);
                    term = term.mul(&f.pleth(m));
                }
            }
            acc = acc.add(&term.scale(&(&k_fact / z_lambda)));
        }
        let kf: u64 = (1..=k as u64).product();
        acc.div_exact(kf)
    }

    fn generic_bi(order: usize) -> BiSeries {
        // f = x + 2x^2 u + x^3 (1 + u^2) + 3x^4 u - x^5
        let mut c = vec![UPoly::default(); order + 1];
        c[1] = UPoly::constant(1);
        c[2] = UPoly::monomial(2, 1);
        c[3] = UPoly::new(vec![1.into(), 0.into(), 1.into()]);
        c[4] = UPoly::monomial(3, 1);
        c[5] = UPoly::constant(-1);
        Series::from_coeffs(c)
    }

    #[test]
    fn z0_is_one() {
        let f = generic_bi(8);
        assert_eq!(cycle_index_apply(0, &f), BiSeries::one(8, &UPoly::default()));
    }

    #[test]
    fn z3_matches_displayed_formula() {
        let f = generic_bi(12);
        let expected = f
            .mul(&f)
            .mul(&f)
            .add(&f.mul(&f.pleth(2)).scale(&3.into()))
            .add(&f.pleth(3).scale(&2.into()))
            .div_exact(6);
        assert_eq!(cycle_index_apply(3, &f), expected);
    }

    #[test]
    fn recurrence_matches_partition_sum() {
        let f = generic_bi(12);
        for k in 0..=6 {
            assert_eq!(cycle_index_apply(k, &f), partition_sum(k, &f), "k = {k}");
        }
        let fj = f.to_jets(4);
        for k in 0..=6 {
            assert_eq!(cycle_index_apply(k, &fj), partition_sum(k, &fj), "jet k = {k}");
        }
    }

    #[test]
    fn tower_matches_batch() {
        let f = generic_bi(14);
        let batch = cycle_index_table(6, &f);
        let mut tower = CycleTower::new(6);
        for _ in 0..=14 {
            tower.push(f.coeffs());
        }
        for (k, s) in batch.iter().enumerate() {
            assert_eq!(tower.row(k), s.coeffs(), "k = {k}");
        }
    }

    #[test]
    fn sym_exp_of_zero_and_x() {
        let zero = UniSeries::zero(6, &BigInt::default());
        assert_eq!(sym_exp(&zero).unwrap(), UniSeries::one(6, &BigInt::default()));
        let x = UniSeries::x(6, &BigInt::default());
        assert_eq!(
            sym_exp(&x).unwrap(),
            UniSeries::from_ints(6, &[1, 1, 1, 1, 1, 1, 1])
        );
    }

    #[test]
    fn sym_exp_rejects_constant_term() {
        let one = UniSeries::one(4, &BigInt::default());
        assert_eq!(sym_exp(&one), Err(SeriesError::NonZeroConstant));
    }

    #[test]
    fn sym_exp_is_sum_of_cycle_indices() {
        let f = generic_bi(10);
        let table = cycle_index_table(10, &f);
        let total = table
            .iter()
            .fold(BiSeries::zero(10, &UPoly::default()), |acc, z| acc.add(z));
        assert_eq!(sym_exp(&f).unwrap(), total);
        let fj = f.to_jets(3);
        let tj = cycle_index_table(10, &fj)
            .iter()
            .fold(Series::zero(10, &Jet::zero(3)), |acc, z| acc.add(z));
        assert_eq!(sym_exp(&fj).unwrap(), tj);
    }
}
