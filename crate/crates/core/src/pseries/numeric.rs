//! Floating-point evaluation of exact series, with a tail model for points
//! close to the dominant singularity.

use num_bigint::{BigInt, Sign};
use num_traits::{ToPrimitive, Zero};

use super::SeriesError;

/// Natural log of `|v|`; `-inf` for zero. Works past the `f64` range.
pub fn ln_abs(v: &BigInt) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().expect("fits in f64").abs().ln();
    }
    let shift = bits - 64;
    let top = (v.magnitude() >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `v · scale^n` as an `f64`, computed in log space so huge coefficients
/// times tiny powers do not overflow.
pub fn scaled_term(v: &BigInt, ln_scale: f64, n: usize) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let mag = (ln_abs(v) + n as f64 * ln_scale).exp();
    if v.sign() == Sign::Minus {
        -mag
    } else {
        mag
    }
}

/// `num / den` to double precision, for arbitrarily large operands.
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    assert!(!den.is_zero(), "zero denominator");
    if num.is_zero() {
        return 0.0;
    }
    // Shift so the quotient carries ~64 significant bits.
    let shift = 64i64 + den.bits() as i64 - num.bits() as i64;
    let q = if shift >= 0 {
        (num << shift as usize) / den
    } else {
        (num >> (-shift) as usize) / den
    };
    q.to_f64().expect("64-bit quotient") * 2f64.powi(-shift as i32)
}

/// Plain partial sum `Σ_{n ≤ N} c_n x^n`.
pub fn partial_sum(coeffs: &[BigInt], x: f64) -> f64 {
    assert!(x > 0.0, "evaluation point must be positive");
    let lx = x.ln();
    coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| scaled_term(c, lx, n))
        .sum()
}

/// Coefficient asymptotics `c_n ≈ C · radius^{-n} · n^{exponent}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailModel {
    pub radius: f64,
    pub exponent: f64,
}

/// A value with an absolute error estimate.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Estimate { value, error }
    }

    /// Whether `target` lies within `tol` plus this estimate's own error.
    pub fn agrees_with(&self, target: f64, tol: f64) -> bool {
        (self.value - target).abs() <= tol + self.error
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailEval {
    pub value: f64,
    pub error_bound: f64,
    pub partial: f64,
    pub tail: f64,
}

/// `Σ_{n > N} q^n n^α` for `0 < q ≤ 1`.
pub fn tail_sum(q: f64, alpha: f64, from: usize) -> Result<f64, SeriesError> {
    if q >= 1.0 && alpha >= -1.0 {
        return Err(SeriesError::DivergentTail);
    }
    const EXPLICIT: usize = 20_000;
    let lq = q.ln();
    let mut sum = 0.0;
    let end = from + EXPLICIT;
    for n in from + 1..=end {
        let term = (n as f64 * lq + alpha * (n as f64).ln()).exp();
        sum += term;
        if term < 1e-18 * sum {
            return Ok(sum);
        }
    }
    let m = end as f64 + 1.0;
    let first = (m * lq + alpha * m.ln()).exp();
    let geometric = if q < 1.0 { first / (1.0 - q) } else { f64::INFINITY };
    if alpha >= -1.0 {
        return Ok(sum + geometric);
    }
    // Euler–Maclaurin remainder of Σ_{n ≥ m} n^α, damped by q^m.
    let em = m.powf(alpha + 1.0) / (-alpha - 1.0) + 0.5 * m.powf(alpha)
        - alpha * m.powf(alpha - 1.0) / 12.0;
    Ok(sum + geometric.min((m * lq).exp() * em))
}

/// Evaluates `Σ c_n x^n` as partial sum through `N = coeffs.len() − 1`
/// plus an analytic tail from the model `c_n ≈ ρ^{-n} n^α·(C + D/n)`.
///
/// `C` and `D` are fitted at the ends of the last quarter of the
/// coefficients. The error bound adds the change in the tail when the fit
/// uses the last eighth instead, and the largest residual of the fit inside
/// the window times the tail sum.
pub fn eval_tail(coeffs: &[BigInt], x: f64, model: TailModel) -> Result<TailEval, SeriesError> {
    let n_max = coeffs.len() - 1;
    if x <= 0.0 || x > model.radius || !x.is_finite() {
        return Err(SeriesError::OutsideDisk {
            x,
            radius: model.radius,
        });
    }
    let window = (n_max / 4).max(8);
    if n_max < window + 8 {
        return Err(SeriesError::TooShort(n_max));
    }
    let lr = model.radius.ln();
    let normalized =
        |n: usize| scaled_term(&coeffs[n], lr, n) * (n as f64).powf(-model.exponent);
    // c(n) = C + D/n through two points
    let fit = |a: usize, b: usize| {
        let (ca, cb) = (normalized(a), normalized(b));
        let (fa, fb) = (a as f64, b as f64);
        let c = (fb * cb - fa * ca) / (fb - fa);
        let d = (ca - c) * fa;
        (c, d)
    };
    let (c, d) = fit(n_max - window, n_max);
    let (c2, d2) = fit(n_max - window / 2, n_max);
    let residual = (n_max - window..=n_max)
        .map(|n| (normalized(n) - c - d / n as f64).abs())
        .fold(0.0, f64::max);
    let q = (x / model.radius).min(1.0);
    let t0 = tail_sum(q, model.exponent, n_max)?;
    let t1 = tail_sum(q, model.exponent - 1.0, n_max)?;
    let partial = partial_sum(coeffs, x);
    let tail = c * t0 + d * t1;
    let tail2 = c2 * t0 + d2 * t1;
    Ok(TailEval {
        value: partial + tail,
        error_bound: (tail - tail2).abs() + residual * t0 + f64::EPSILON * partial.abs() * 8.0,
        partial,
        tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_abs_large_and_small() {
        let big = BigInt::from(3u8).pow(2000);
        assert!((ln_abs(&big) - 2000.0 * 3f64.ln()).abs() < 1e-9);
        assert!((ln_abs(&BigInt::from(-20)) - 20f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn ratio_of_huge_integers() {
        let a = BigInt::from(7u8).pow(900);
        let b = BigInt::from(7u8).pow(899) * 3;
        assert!((ratio_to_f64(&a, &b) - 7.0 / 3.0).abs() < 1e-15);
        assert!((ratio_to_f64(&BigInt::from(-1), &BigInt::from(8)) + 0.125).abs() < 1e-18);
    }

    #[test]
    fn tail_sum_matches_zeta_tail() {
        // Σ_{n>0} n^{-3/2} = ζ(3/2) = 2.612375348685488...
        let t = tail_sum(1.0, -1.5, 0).unwrap();
        assert!((t - 2.612_375_348_685_488).abs() < 1e-9, "{t}");
        let g = tail_sum(0.5, 0.0, 0).unwrap();
        assert!((g - 1.0).abs() < 1e-12);
        assert!(tail_sum(1.0, -0.5, 10).is_err());
    }

    #[test]
    fn eval_tail_on_exact_model() {
        // c_n = 2^n n^{-3/2} scaled to integers would lose precision, so use
        // c_n = 4^n: radius 1/4, exponent 0; sum at x=1/8 is 1/(1-1/2) = 2.
        let coeffs: Vec<BigInt> = (0..200).map(|n| BigInt::from(4u8).pow(n)).collect();
        let model = TailModel {
            radius: 0.25,
            exponent: 0.0,
        };
        let e = eval_tail(&coeffs, 0.125, model).unwrap();
        assert!((e.value - 2.0).abs() < 1e-12, "{e:?}");
        assert!(eval_tail(&coeffs, 0.3, model).is_err());
        assert!(eval_tail(&coeffs, -0.1, model).is_err());
    }
}
