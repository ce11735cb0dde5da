//! Coefficient rings for truncated series in `x`.
//!
//! Every coefficient stands for an integer polynomial in the marking
//! variable `u`. Three representations are provided:
//!
//! * [`BigInt`] is the specialization `u = 1` (univariate counting series).
//! * [`UPoly`] keeps the full polynomial in `u` (exact distributions).
//! * [`Jet`] keeps the Taylor jet in `ε = u − 1` truncated at order `J`;
//!   component `m` is the factorial-moment sum `Σ_k C(k,m)·c_k`.
//!
//! All three are closed under the operations the functional equations need,
//! including the plethystic substitution `u → u^m`. Divisions only ever occur
//! where the true result is an integer, so [`Coeff::div_exact`] checks the
//! remainder and panics otherwise.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// A commutative ring of coefficients marking the pattern count.
pub trait Coeff: Clone + Debug + PartialEq + Send + Sync {
    /// The additive identity with the same shape (jet order) as `self`.
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, other: &Self);
    fn sub_assign_ref(&mut self, other: &Self);
    fn mul_ref(&self, other: &Self) -> Self;

    /// `self += a * b`.
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        let prod = a.mul_ref(b);
        self.add_assign_ref(&prod);
    }

    fn scale(&self, k: &BigInt) -> Self;

    /// Division by a positive integer that is known to be exact.
    ///
    /// Panics when a remainder is left over: that means a counting-series
    /// invariant was broken upstream.
    fn div_exact(&self, k: u64) -> Self;

    /// The substitution `u → u^m`.
    fn pleth(&self, m: usize) -> Self;

    /// Multiplication by `u^e`.
    fn shift_u(&self, e: usize) -> Self;

    /// Multiplication by `(1 − u)`.
    fn one_minus_u(&self) -> Self;

    /// Value at `u = 1`.
    fn at_one(&self) -> BigInt;

    /// Factorial-moment sums `Σ_k C(k,m)·c_k` for `m = 0..=upto`, or `None`
    /// when the representation does not carry that many.
    fn factorial_moments(&self, upto: usize) -> Option<Vec<BigInt>>;

    /// The full polynomial in `u`, when this representation keeps it.
    fn as_poly(&self) -> Option<&UPoly> {
        None
    }

    fn neg(&self) -> Self {
        let mut z = self.zero_like();
        z.sub_assign_ref(self);
        z
    }
}

fn checked_div(v: &BigInt, k: u64) -> BigInt {
    let (q, r) = v.div_rem(&BigInt::from(k));
    assert!(Zero::is_zero(&r), "inexact division of {v} by {k}");
    q
}

impl Coeff for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }

    fn one_like(&self) -> Self {
        BigInt::one()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }

    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }

    fn scale(&self, k: &BigInt) -> Self {
        self * k
    }

    fn div_exact(&self, k: u64) -> Self {
        checked_div(self, k)
    }

    fn pleth(&self, _m: usize) -> Self {
        self.clone()
    }

    fn shift_u(&self, _e: usize) -> Self {
        self.clone()
    }

    fn one_minus_u(&self) -> Self {
        BigInt::zero()
    }

    fn at_one(&self) -> BigInt {
        self.clone()
    }

    fn factorial_moments(&self, upto: usize) -> Option<Vec<BigInt>> {
        (upto == 0).then(|| vec![self.clone()])
    }
}

/// Dense polynomial in `u` with trailing zeros trimmed; the zero polynomial
/// is the empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UPoly(Vec<BigInt>);

impl UPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UPoly(coeffs)
    }

    pub fn constant(v: impl Into<BigInt>) -> Self {
        UPoly::new(vec![v.into()])
    }

    /// `c·u^k`.
    pub fn monomial(c: impl Into<BigInt>, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = c.into();
        UPoly::new(v)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    /// Coefficient of `u^k` (zero past the degree).
    pub fn get(&self, k: usize) -> BigInt {
        self.0.get(k).cloned().unwrap_or_default()
    }

    /// Degree in `u`; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    /// Collapses to the jet at `u = 1` of the given order.
    pub fn to_jet(&self, order: usize) -> Jet {
        let moments = binomial_moments(&self.0, order.saturating_sub(1));
        Jet(moments)
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
    }
}

/// `Σ_k C(k,m)·c_k` for `m = 0..=upto`.
fn binomial_moments(c: &[BigInt], upto: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); upto + 1];
    for (k, ck) in c.iter().enumerate() {
        if Zero::is_zero(ck) {
            continue;
        }
        let mut binom = BigInt::one();
        for (m, slot) in out.iter_mut().enumerate() {
            if m > k {
                break;
            }
            *slot += &binom * ck;
            binom = binom * (k - m) / (m + 1);
        }
    }
    out
}

impl Coeff for UPoly {
    fn zero_like(&self) -> Self {
        UPoly(Vec::new())
    }

    fn one_like(&self) -> Self {
        UPoly::constant(1)
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add_assign_ref(&mut self, other: &Self) {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), BigInt::zero());
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
        self.trim();
    }

    fn sub_assign_ref(&mut self, other: &Self) {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), BigInt::zero());
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a -= b;
        }
        self.trim();
    }

    fn mul_ref(&self, other: &Self) -> Self {
        let mut out = self.zero_like();
        out.mul_add_assign(self, other);
        out
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        if a.0.is_empty() || b.0.is_empty() {
            return;
        }
        let len = a.0.len() + b.0.len() - 1;
        if self.0.len() < len {
            self.0.resize(len, BigInt::zero());
        }
        for (p, x) in a.0.iter().enumerate() {
            if Zero::is_zero(x) {
                continue;
            }
            for (q, y) in b.0.iter().enumerate() {
                if !Zero::is_zero(y) {
                    self.0[p + q] += x * y;
                }
            }
        }
        self.trim();
    }

    fn scale(&self, k: &BigInt) -> Self {
        UPoly::new(self.0.iter().map(|c| c * k).collect())
    }

    fn div_exact(&self, k: u64) -> Self {
        UPoly(self.0.iter().map(|c| checked_div(c, k)).collect())
    }

    fn pleth(&self, m: usize) -> Self {
        if m == 1 || self.0.len() <= 1 {
            return self.clone();
        }
        let mut v = vec![BigInt::zero(); (self.0.len() - 1) * m + 1];
        for (k, c) in self.0.iter().enumerate() {
            v[k * m] = c.clone();
        }
        UPoly(v)
    }

    fn shift_u(&self, e: usize) -> Self {
        if self.0.is_empty() || e == 0 {
            return self.clone();
        }
        let mut v = vec![BigInt::zero(); e];
        v.extend(self.0.iter().cloned());
        UPoly(v)
    }

    fn one_minus_u(&self) -> Self {
        let mut out = self.clone();
        out.sub_assign_ref(&self.shift_u(1));
        out
    }

    fn at_one(&self) -> BigInt {
        self.0.iter().sum()
    }

    fn factorial_moments(&self, upto: usize) -> Option<Vec<BigInt>> {
        Some(binomial_moments(&self.0, upto))
    }

    fn as_poly(&self) -> Option<&UPoly> {
        Some(self)
    }
}

/// Truncated Taylor jet at `u = 1`: component `m` is the coefficient of
/// `ε^m` with `u = 1 + ε`. The length is the jet order and is never zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jet(Vec<BigInt>);

impl Jet {
    pub fn zero(order: usize) -> Self {
        assert!(order >= 1, "jet order must be at least 1");
        Jet(vec![BigInt::zero(); order])
    }

    pub fn from_components(c: Vec<BigInt>) -> Self {
        assert!(!c.is_empty(), "jet order must be at least 1");
        Jet(c)
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[BigInt] {
        &self.0
    }

    /// `(1 + ε)^m − 1` truncated to this jet's order.
    fn delta(m: usize, order: usize) -> Jet {
        let mut v = vec![BigInt::zero(); order];
        let mut binom = BigInt::one();
        for (l, slot) in v.iter_mut().enumerate().skip(1) {
            if l > m {
                break;
            }
            binom = binom * (m - l + 1) / l;
            *slot = binom.clone();
        }
        Jet(v)
    }
}

impl Coeff for Jet {
    fn zero_like(&self) -> Self {
        Jet::zero(self.0.len())
    }

    fn one_like(&self) -> Self {
        let mut j = self.zero_like();
        j.0[0] = BigInt::one();
        j
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    fn add_assign_ref(&mut self, other: &Self) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }

    fn sub_assign_ref(&mut self, other: &Self) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a -= b;
        }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        let mut out = self.zero_like();
        out.mul_add_assign(self, other);
        out
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        let order = self.0.len().min(a.0.len()).min(b.0.len());
        for p in 0..order {
            if Zero::is_zero(&a.0[p]) {
                continue;
            }
            for q in 0..order - p {
                if !Zero::is_zero(&b.0[q]) {
                    self.0[p + q] += &a.0[p] * &b.0[q];
                }
            }
        }
    }

    fn scale(&self, k: &BigInt) -> Self {
        Jet(self.0.iter().map(|c| c * k).collect())
    }

    fn div_exact(&self, k: u64) -> Self {
        Jet(self.0.iter().map(|c| checked_div(c, k)).collect())
    }

    fn pleth(&self, m: usize) -> Self {
        if m == 1 || self.0.len() == 1 {
            return self.clone();
        }
        // Horner in δ = (1+ε)^m − 1.
        let delta = Jet::delta(m, self.0.len());
        let mut acc = self.zero_like();
        for c in self.0.iter().rev() {
            acc = acc.mul_ref(&delta);
            acc.0[0] += c;
        }
        acc
    }

    fn shift_u(&self, e: usize) -> Self {
        let mut out = self.clone();
        for _ in 0..e {
            for k in (1..out.0.len()).rev() {
                let prev = out.0[k - 1].clone();
                out.0[k] += prev;
            }
        }
        out
    }

    fn one_minus_u(&self) -> Self {
        let mut v = vec![BigInt::zero(); self.0.len()];
        for k in 1..v.len() {
            v[k] = -&self.0[k - 1];
        }
        Jet(v)
    }

    fn at_one(&self) -> BigInt {
        self.0[0].clone()
    }

    fn factorial_moments(&self, upto: usize) -> Option<Vec<BigInt>> {
        (upto < self.0.len()).then(|| self.0[..=upto].to_vec())
    }
}
