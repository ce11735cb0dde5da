use super::*;
use crate::pattern_gf::solve_jet;
use crate::treelab::{all_patterns, oracle_distribution};

fn pat(i: usize, j: usize) -> PatternSpec {
    PatternSpec::new(i, j).unwrap()
}

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn bi(p: PatternSpec, order: usize) -> BiSolution {
    solve_bivariate(p, order, SolveOptions::default()).unwrap()
}

#[test]
fn small_summaries() {
    let s = summarize(&bi(pat(1, 2), 6), 4).unwrap();
    assert_eq!((s.mean.clone(), s.variance.clone()), (q(1, 1), q(1, 1)));
    assert_eq!(s.skewness, Some(0.0));
    assert_eq!(s.tail_prob, Some(q(0, 1)));
    assert_eq!(s.support, Some((0, 2)));
    // {0: ½, 2: ½} against N(1, 1): worst gap is at k = 0 and k = 1
    let expected = normal_cdf(0.5) - 0.5;
    assert!((s.kolmogorov_to_normal.unwrap() - expected).abs() < 1e-12);
    assert!((expected - 0.191462461274955).abs() < 1e-10);

    let s = summarize(&bi(pat(2, 2), 6), 5).unwrap();
    assert_eq!((s.mean, s.variance), (q(2, 3), q(8, 9)));
    assert!(!s.degenerate);
}

#[test]
fn degenerate_distribution_is_reported() {
    let s = summarize(&bi(pat(3, 4), 6), 5).unwrap();
    assert!(s.degenerate);
    assert_eq!(s.variance, q(0, 1));
    assert_eq!(s.skewness, None);
    assert_eq!(s.kolmogorov_to_normal, None);
    assert_eq!(s.tail_prob, Some(q(0, 1)));
    assert_eq!(s.chebyshev_holds, Some(true));
}

#[test]
fn jet_track_gives_partial_summary() {
    let sol = solve_jet(pat(1, 3), 30, 4, SolveOptions::default()).unwrap();
    let s = summarize(&sol, 30).unwrap();
    let full = summarize(&bi(pat(1, 3), 30), 30).unwrap();
    assert_eq!(s.mean, full.mean);
    assert_eq!(s.variance, full.variance);
    assert_eq!(s.skewness, full.skewness);
    assert!(s.kolmogorov_to_normal.is_none() && s.tail_prob.is_none());
    assert!(full.tail_prob.is_some());
}

#[test]
fn tail_and_kolmogorov_against_oracle() {
    // recompute both from the enumeration histogram in floating point
    let n = 13;
    for p in all_patterns(4) {
        let s = summarize(&bi(p, n), n).unwrap();
        let hist = oracle_distribution(n, &p);
        let total: u64 = hist.values().sum();
        let mean: f64 = hist.iter().map(|(&k, &c)| k as f64 * c as f64).sum::<f64>() / total as f64;
        let var: f64 = hist
            .iter()
            .map(|(&k, &c)| (k as f64 - mean).powi(2) * c as f64)
            .sum::<f64>()
            / total as f64;
        assert!((to_f64(&s.variance) - var).abs() < 1e-12, "{p}");
        let thr = (n as f64).powf(0.75);
        let tail: u64 = hist
            .iter()
            .filter(|(&k, _)| (k as f64 - mean).abs() > thr)
            .map(|(_, &c)| c)
            .sum();
        assert_eq!(s.tail_prob.clone().unwrap(), q(tail as i64, total as i64), "{p}");
        assert_eq!(s.chebyshev_holds, Some(true));
        if var > 0.0 {
            let sd = var.sqrt();
            let kmax = *hist.keys().next_back().unwrap();
            let mut cum = 0u64;
            let mut best = normal_cdf((-0.5 - mean) / sd);
            for k in 0..=kmax {
                cum += hist.get(&k).copied().unwrap_or(0);
                let f = cum as f64 / total as f64;
                best = best.max((f - normal_cdf((k as f64 + 0.5 - mean) / sd)).abs());
            }
            assert!((s.kolmogorov_to_normal.unwrap() - best).abs() < 1e-12, "{p}");
        }
    }
}

#[test]
fn chebyshev_at_one_hundred() {
    let s = summarize(&bi(pat(1, 2), 100), 100).unwrap();
    assert_eq!(s.chebyshev_holds, Some(true));
    assert!(to_f64(s.tail_prob.as_ref().unwrap()) <= s.chebyshev_bound);
}

#[test]
fn normality_trend_for_leaf_pattern() {
    let t = normality_trend_for(pat(1, 2), &[25, 50, 100], SolveOptions::default()).unwrap();
    assert!(t.skewness_decreasing, "{t:?}");
    assert!(t.kolmogorov_decreasing, "{t:?}");
    assert!(t.skewness_trend && t.kolmogorov_trend);
    assert_eq!(t.rows.len(), 3);
}

#[test]
fn grid_beyond_truncation() {
    let sol = bi(pat(1, 2), 20);
    assert!(matches!(
        normality_trend(&sol, &[10, 30]),
        Err(DistError::Gf(GfError::OrderExceeded { .. }))
    ));
    assert_eq!(normality_trend(&sol, &[]), Err(DistError::EmptyGrid));
}

#[test]
fn trend_predicates() {
    let s = |v: &[f64]| v.iter().map(|&x| Some(x)).collect::<Vec<_>>();
    assert!(strictly_decreasing(&s(&[3.0, 2.0, 1.0])));
    assert!(!strictly_decreasing(&s(&[3.0, 3.5, 1.0])));
    assert!(weakly_decreasing(&s(&[3.0, 3.5, 1.0])));
    assert!(!weakly_decreasing(&s(&[3.0, 3.5, 4.0, 1.0])));
    assert!(!weakly_decreasing(&[Some(1.0), None]));
}

#[test]
fn wiener_means() {
    assert_eq!(mean_wiener(4).unwrap().mean_w, q(19, 2));
    assert_eq!(mean_wiener(2).unwrap().mean_w, q(1, 1));
    let w = wiener_scaling(4, 12).unwrap();
    assert_eq!((w.fit_from, w.fit_to), (8, 12));
    assert_eq!(w.fit.residuals.len(), 5);
    assert!(w.rows.windows(2).all(|r| r[1].mean_w > r[0].mean_w));
    assert!(w.fit.slope > 2.0 && w.fit.slope < 3.0, "{:?}", w.fit);
    assert!(wiener_scaling(1, 5).is_err());
    assert!(wiener_scaling(5, 5).is_err());
}

#[test]
fn loglog_fit_recovers_power_law() {
    let pts: Vec<_> = (1..10).map(|x| (x as f64, 3.0 * (x as f64).powf(2.5))).collect();
    let f = loglog_fit(&pts);
    assert!((f.slope - 2.5).abs() < 1e-12);
    assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
    assert!(f.residuals.iter().all(|r| r.abs() < 1e-12));
}

#[test]
fn summary_json_has_exact_rationals() {
    let s = summarize(&bi(pat(2, 2), 6), 5).unwrap();
    let v = serde_json::to_value(&s).unwrap();
    assert_eq!(v["variance"]["num"], "8");
    assert_eq!(v["variance"]["den"], "9");
    assert_eq!(v["trees"], "3");
}
