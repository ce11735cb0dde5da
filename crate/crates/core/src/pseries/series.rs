use num_bigint::BigInt;

use super::ring::{Coeff, Jet, UPoly};

/// A power series in `x` truncated after `x^N`, with coefficients in a
/// [`Coeff`] ring. Index `n` holds the coefficient of `x^n`, including the
/// constant term at index 0, so the backing vector has length `N + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<C> {
    coeffs: Vec<C>,
}

/// Full bivariate counting series `Σ c_{n,k} x^n u^k`.
pub type BiSeries = Series<UPoly>;
/// Series whose coefficients are jets in `u − 1`.
pub type JetSeries = Series<Jet>;
/// Univariate series (the `u = 1` specialization).
pub type UniSeries = Series<BigInt>;

impl<C: Coeff> Series<C> {
    /// The zero series of order `n`, shaped like `proto`.
    pub fn zero(order: usize, proto: &C) -> Self {
        Series {
            coeffs: vec![proto.zero_like(); order + 1],
        }
    }

    pub fn one(order: usize, proto: &C) -> Self {
        let mut s = Self::zero(order, proto);
        s.coeffs[0] = proto.one_like();
        s
    }

    /// The series `x`.
    pub fn x(order: usize, proto: &C) -> Self {
        Self::monomial(order, 1, proto.one_like())
    }

    /// `c·x^n`, or zero if `n` exceeds the order.
    pub fn monomial(order: usize, n: usize, c: C) -> Self {
        let mut s = Self::zero(order, &c);
        if n <= order {
            s.coeffs[n] = c;
        }
        s
    }

    /// Builds a series from coefficients `c_0..=c_N`.
    pub fn from_coeffs(coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least its constant term");
        Series { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &C {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn proto(&self) -> &C {
        &self.coeffs[0]
    }

    pub fn truncate(&self, order: usize) -> Self {
        let keep = order.min(self.order());
        Series {
            coeffs: self.coeffs[..=keep].to_vec(),
        }
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        Series {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| {
                let mut c = self.coeffs[k].clone();
                c.add_assign_ref(&other.coeffs[k]);
                c
            })
            .collect();
        Series { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| {
                let mut c = self.coeffs[k].clone();
                c.sub_assign_ref(&other.coeffs[k]);
                c
            })
            .collect();
        Series { coeffs }
    }

    /// Cauchy product truncated at the smaller order.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut out = Self::zero(n, self.proto());
        for a in 0..=n {
            if self.coeffs[a].is_zero() {
                continue;
            }
            for b in 0..=n - a {
                if !other.coeffs[b].is_zero() {
                    out.coeffs[a + b].mul_add_assign(&self.coeffs[a], &other.coeffs[b]);
                }
            }
        }
        out
    }

    /// Coefficient `n` of `self · other` without forming the product.
    pub fn mul_coeff(&self, other: &Self, n: usize) -> C {
        mul_coeff_slices(&self.coeffs, &other.coeffs, n)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        self.map(|c| c.scale(k))
    }

    pub fn div_exact(&self, k: u64) -> Self {
        self.map(|c| c.div_exact(k))
    }

    pub fn neg(&self) -> Self {
        self.map(Coeff::neg)
    }

    /// Multiplies by `x`, dropping the term that falls past the order.
    pub fn mul_x(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        coeffs.push(self.proto().zero_like());
        coeffs.extend(self.coeffs[..self.order()].iter().cloned());
        Series { coeffs }
    }

    /// Multiplies by `u^e`.
    pub fn shift_u(&self, e: usize) -> Self {
        self.map(|c| c.shift_u(e))
    }

    /// Multiplies by `(1 − u)`.
    pub fn one_minus_u(&self) -> Self {
        self.map(Coeff::one_minus_u)
    }

    /// `f(x^m, u^m)`: coefficient `(n, k)` moves to `(mn, mk)`.
    pub fn pleth(&self, m: usize) -> Self {
        assert!(m >= 1, "plethystic index must be positive");
        let n = self.order();
        let mut out = Self::zero(n, self.proto());
        for (k, c) in self.coeffs.iter().enumerate() {
            if k * m > n {
                break;
            }
            out.coeffs[k * m] = c.pleth(m);
        }
        out
    }

    /// Specialization at `u = 1`.
    pub fn at_one(&self) -> UniSeries {
        Series {
            coeffs: self.coeffs.iter().map(Coeff::at_one).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Coeff::is_zero)
    }
}

impl BiSeries {
    /// Collapses every coefficient to its jet at `u = 1`.
    pub fn to_jets(&self, jet_order: usize) -> JetSeries {
        self.map(|c| c.to_jet(jet_order))
    }
}

impl UniSeries {
    pub fn from_ints(order: usize, values: &[i64]) -> Self {
        let mut s = Self::zero(order, &BigInt::default());
        for (n, &v) in values.iter().enumerate().take(order + 1) {
            s.coeffs[n] = BigInt::from(v);
        }
        s
    }
}

/// `Σ_a f_a · g_{n−a}` over the indices present in both slices.
pub(crate) fn mul_coeff_slices<C: Coeff>(f: &[C], g: &[C], n: usize) -> C {
    let mut acc = f[0].zero_like();
    let lo = n.saturating_sub(g.len() - 1);
    for a in lo..=n.min(f.len() - 1) {
        let (fa, gb) = (&f[a], &g[n - a]);
        if !fa.is_zero() && !gb.is_zero() {
            acc.mul_add_assign(fa, gb);
        }
    }
    acc
}
