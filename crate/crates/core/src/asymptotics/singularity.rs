//! The dominant singularity `x0` of the tree series and the square-root
//! coefficient `b` in `p(x) = 1 − b·(x0 − x)^{1/2} + O(x0 − x)`.

use num_bigint::BigInt;
use serde::Serialize;

use crate::pseries::{
    eval_tail, partial_sum, ratio_to_f64, rooted_series, Estimate, TailModel, UniSeries,
};

use super::AsymError;

/// Exponent of `n` in `p_n ~ C·x0^{-n}·n^{-3/2}`.
pub const P_EXPONENT: f64 = -1.5;

/// Result of [`find_x0`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct X0Estimate {
    /// Root of `p(x) = 1`, with the tail error folded into the bracket.
    pub value: f64,
    pub error: f64,
    /// Radius from the coefficient-ratio method, used as the tail model.
    pub ratio_radius: Estimate,
    /// Root of `ln x + 1 + Σ_{k≥2} p(x^k)/k = 0`, which only needs `p` well
    /// inside the disk.
    pub characteristic: f64,
    /// `|value − characteristic|`
    pub spread: f64,
    /// `p(0.3)`, which must be below 1.
    pub value_at_03: f64,
    pub order: usize,
}

impl X0Estimate {
    pub fn estimate(&self) -> Estimate {
        Estimate::new(self.value, self.error)
    }
}

/// Radius of convergence from `c_n/c_{n−1} = ρ^{-1}·(n/(n−1))^α·(1 + O(n⁻²))`
/// with one Richardson step in `1/n²`. The error is the change between the
/// extrapolants at `N` and `3N/4`.
pub fn ratio_radius(coeffs: &[BigInt], exponent: f64) -> Result<Estimate, AsymError> {
    let n = coeffs.len() - 1;
    if n < 40 {
        return Err(AsymError::OrderTooSmall { order: n, need: 40 });
    }
    let inv = |m: usize| {
        let ratio = ratio_to_f64(&coeffs[m], &coeffs[m - 1]);
        ratio * ((m - 1) as f64 / m as f64).powf(exponent)
    };
    let rich = |m: usize| {
        let h = m / 2;
        let (a, b) = ((m * m) as f64, (h * h) as f64);
        (a * inv(m) - b * inv(h)) / (a - b)
    };
    let best = rich(n);
    let other = rich(3 * n / 4);
    let rho = 1.0 / best;
    Ok(Estimate::new(rho, (1.0 / other - rho).abs()))
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> Option<(f64, f64)> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo.is_nan() || fhi.is_nan() || flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((0.5 * (lo + hi), hi - lo))
}

/// Sum `Σ_{k≥from} f(k)` for terms that decay geometrically; stops once
/// terms fall below `1e-18` of the running total.
fn geometric_sum(from: usize, f: impl Fn(usize) -> f64) -> f64 {
    let mut total = 0.0;
    for k in from.. {
        let t = f(k);
        total += t;
        if t.abs() <= 1e-18 * total.abs().max(1e-300) || k > 4000 {
            break;
        }
    }
    total
}

/// `ln x + 1 + Σ_{k≥2} p(x^k)/k`, zero exactly at `x0`.
pub fn characteristic(p: &UniSeries, x: f64) -> f64 {
    x.ln() + 1.0 + geometric_sum(2, |k| partial_sum(p.coeffs(), x.powi(k as i32)) / k as f64)
}

/// `x0` from the planted-tree series to order `order`.
pub fn find_x0(order: usize) -> Result<X0Estimate, AsymError> {
    find_x0_from(&rooted_series(order))
}

pub fn find_x0_from(p: &UniSeries) -> Result<X0Estimate, AsymError> {
    let coeffs = p.coeffs();
    let ratio = ratio_radius(coeffs, P_EXPONENT)?;
    // Stretch the model radius past the ratio estimate so that x0 is inside
    // the bracket even when the estimate falls short.
    let radius = ratio.value + 2.0 * ratio.error + 1e-12;
    let model = TailModel {
        radius,
        exponent: P_EXPONENT,
    };
    let eval = |x: f64| eval_tail(coeffs, x, model);
    let lo = 0.3;
    let value_at_03 = eval(lo)?.value;
    let f = |x: f64| eval(x).map(|e| e.value - 1.0).unwrap_or(f64::NAN);
    let (root, width) = bisect(lo, radius, f).ok_or(AsymError::NoBracket("p(x) = 1"))?;
    // Roots of p ± error = 1 bound the effect of the tail model.
    let shifted = |sign: f64| {
        let g = |x: f64| {
            eval(x)
                .map(|e| e.value + sign * e.error_bound - 1.0)
                .unwrap_or(f64::NAN)
        };
        bisect(lo, radius, g).map(|(r, _)| r).unwrap_or(radius)
    };
    let (x_hi, x_lo) = (shifted(-1.0), shifted(1.0));
    // The model radius is itself uncertain, and the root cannot be resolved
    // below that.
    let error = (root - x_lo).abs().max((x_hi - root).abs()) + width + (radius - ratio.value);

    let (characteristic_root, _) = bisect(0.3, 0.4, |x| characteristic(p, x))
        .ok_or(AsymError::NoBracket("characteristic equation"))?;
    Ok(X0Estimate {
        value: root,
        error,
        ratio_radius: ratio,
        characteristic: characteristic_root,
        spread: (root - characteristic_root).abs(),
        value_at_03,
        order: p.order(),
    })
}

/// Result of [`compute_b`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BEstimate {
    /// Richardson route, with the cross-route spread included in the error.
    pub value: f64,
    pub error: f64,
    /// `√(2·lim p_x(1−p)/p)` along `x0 − h`, Richardson in `√h`.
    pub richardson: Estimate,
    /// `lim (1 − p(x0 − h))/√h`, Richardson in `√h`.
    pub fit: Estimate,
    /// `1/x0 + Σ_{k≥2} p'(x0^k)·x0^{k−1}`, which should equal `b²/2`.
    pub identity: Estimate,
    /// Routes disagree by more than 1%.
    pub flagged: bool,
}

impl BEstimate {
    pub fn estimate(&self) -> Estimate {
        Estimate::new(self.value, self.error)
    }
}

/// Ladder `h_k = h0·2^{-k}`: `√h` shrinks by `√2` per level.
const LADDER_H0: f64 = 0.04;
const G_ERROR_CAP: f64 = 1e-7;
const LADDER_RATIO: f64 = std::f64::consts::SQRT_2;

/// Richardson table for `g(s) = G + a1·s + a2·s² + …` sampled at
/// `s_k = s0·r^{-k}`. Returns the last diagonal entry and the change from
/// the previous diagonal.
fn richardson(values: &[f64], r: f64) -> Estimate {
    let mut table: Vec<Vec<f64>> = Vec::new();
    for (k, &v) in values.iter().enumerate() {
        let mut row = vec![v];
        for m in 1..=k {
            let f = r.powi(m as i32);
            let prev = &table[k - 1];
            row.push((f * row[m - 1] - prev[m - 1]) / (f - 1.0));
        }
        table.push(row);
    }
    let last = table.last().expect("non-empty ladder");
    let best = *last.last().unwrap();
    let prev = if table.len() >= 2 {
        *table[table.len() - 2].last().unwrap()
    } else {
        f64::INFINITY
    };
    Estimate::new(best, (best - prev).abs())
}

/// `b` at `x0`, by the Richardson ladder and the square-root fit.
pub fn compute_b(x0: &X0Estimate, p: &UniSeries) -> Result<BEstimate, AsymError> {
    let coeffs = p.coeffs();
    let n = p.order();
    let x = x0.value;
    let deriv: Vec<BigInt> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k)
        .collect();
    let p_model = TailModel {
        radius: x,
        exponent: P_EXPONENT,
    };
    let d_model = TailModel {
        radius: x,
        exponent: P_EXPONENT + 1.0,
    };
    // Stop once the fitted tail dominates or its error stops being
    // negligible next to the Richardson corrections.
    let h_min = 0.25 * x / n as f64;
    let mut g_vals = Vec::new();
    let mut fit_vals = Vec::new();
    let mut g_err: f64 = 0.0;
    let mut fit_err: f64 = 0.0;
    let mut h = LADDER_H0;
    while h >= h_min && g_vals.len() < 16 {
        let at = x - h;
        let pv = eval_tail(coeffs, at, p_model)?;
        let dv = eval_tail(&deriv, at, d_model)?;
        // deriv holds c_{k+1}·(k+1) at index k
        let px = dv.value;
        let g = px * (1.0 - pv.value) / pv.value;
        let dg = dv.error_bound * (1.0 - pv.value) / pv.value + px * pv.error_bound / pv.value.powi(2);
        if dg > G_ERROR_CAP && g_vals.len() >= 3 {
            break;
        }
        g_vals.push(g);
        g_err = g_err.max(dg);
        fit_vals.push((1.0 - pv.value) / h.sqrt());
        fit_err = fit_err.max(pv.error_bound / h.sqrt());
        h /= 2.0;
    }
    if g_vals.len() < 3 {
        return Err(AsymError::OrderTooSmall {
            order: n,
            need: (3.0 * x * 4.0 / LADDER_H0).ceil() as usize,
        });
    }
    let g_lim = richardson(&g_vals, LADDER_RATIO);
    let b_rich = (2.0 * g_lim.value).sqrt();
    // db = dG/b
    let rich = Estimate::new(b_rich, (g_lim.error + g_err) / b_rich);
    let fit_lim = richardson(&fit_vals, LADDER_RATIO);
    let fit = Estimate::new(fit_lim.value, fit_lim.error + fit_err);

    let identity = fx_identity(p, x0)?;
    let spread = (rich.value - fit.value).abs();
    Ok(BEstimate {
        value: rich.value,
        error: rich.error.max(spread),
        richardson: rich,
        fit,
        identity,
        flagged: spread > 0.01 * rich.value,
    })
}

/// `1/x0 + Σ_{k≥2} p'(x0^k)·x0^{k−1}`; every evaluation point is well
/// inside the disk, so only the `x0` uncertainty contributes to the error.
pub fn fx_identity(p: &UniSeries, x0: &X0Estimate) -> Result<Estimate, AsymError> {
    let deriv: Vec<BigInt> = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c * k)
        .collect();
    let at = |x: f64| {
        1.0 / x
            + geometric_sum(2, |k| {
                let y = x.powi(k as i32);
                partial_sum(&deriv, y) / y * x.powi(k as i32 - 1)
            })
    };
    let v = at(x0.value);
    let dv = (at(x0.value + x0.error) - v).abs();
    Ok(Estimate::new(v, dv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_removes_powers() {
        // g(s) = 2 + 3s − s² sampled at s0·√2^{-k}
        let vals: Vec<f64> = (0..5)
            .map(|k| {
                let s = 0.3 / LADDER_RATIO.powi(k);
                2.0 + 3.0 * s - s * s
            })
            .collect();
        let r = richardson(&vals, LADDER_RATIO);
        assert!((r.value - 2.0).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn ratio_method_on_known_radius() {
        // c_n = ⌊4^n·10^60/n²⌋: radius 1/4, exponent −2
        let coeffs: Vec<BigInt> = (0..300u32)
            .map(|n| BigInt::from(4u8).pow(n) * BigInt::from(10u8).pow(60) / BigInt::from(n.max(1)).pow(2))
            .collect();
        let r = ratio_radius(&coeffs, -2.0).unwrap();
        assert!((r.value - 0.25).abs() < 1e-9, "{r:?}");
    }
}
