//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::BTreeMap;
use std::time::Instant;

use dstar_core::asymptotics::{all_mu_singular, compute_mu, lambda_bracket, MuMethod, Singularity};
use dstar_core::distlab::{normality_trend_for, summarize, wiener_scaling};
use dstar_core::exact::to_f64;
use dstar_core::pattern_gf::{solve, solve_bivariate, SolveOptions};
use dstar_core::pseries::{free_series, rooted_series, Estimate};
use dstar_core::randic_app::{conjecture_scan, gnp_conjecture_check};
use dstar_core::treelab::{all_patterns, count_free_enumerated, oracle_distribution};
use dstar_core::PatternSpec;
use num_bigint::BigInt;

const X0_PUBLISHED: f64 = 0.3383219;
const B_PUBLISHED: f64 = 2.68112266;

type Check = Result<String, String>;

fn pat(i: usize, j: usize) -> PatternSpec {
    PatternSpec::new(i, j).unwrap()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn oracle_equivalence() -> Check {
    let mut rows = 0;
    for p in all_patterns(6) {
        let sol = solve_bivariate(p, 14, SolveOptions::default()).map_err(|e| e.to_string())?;
        for n in 2..=14 {
            let gf = sol.distribution(n).map_err(|e| e.to_string())?;
            let oracle: BTreeMap<usize, BigInt> = oracle_distribution(n, &p)
                .into_iter()
                .map(|(k, c)| (k, BigInt::from(c)))
                .collect();
            ensure(gf == oracle, format!("{p} at n = {n}: {gf:?} vs {oracle:?}"))?;
            rows += 1;
        }
    }
    Ok(format!("{rows} (pattern, n) rows identical, j <= 6, n <= 14"))
}

fn tree_counts() -> Check {
    let order = 200;
    let t = free_series(order);
    let r = rooted_series(order);
    for p in [pat(2, 3), pat(1, 3), pat(2, 2)] {
        let sol = solve(p, order, &BigInt::from(0), SolveOptions::default()).map_err(|e| e.to_string())?;
        ensure(sol.t == t, format!("t(x,1) from the {p} system differs"))?;
        ensure(sol.p == r, format!("p(x,1) from the {p} system differs"))?;
    }
    for n in 1..=16 {
        ensure(
            BigInt::from(count_free_enumerated(n)) == *t.coeff(n),
            format!("enumeration disagrees at n = {n}"),
        )?;
    }
    Ok(format!(
        "three systems reproduce t_n for n <= {order} (t_200 has {} digits); enumeration agrees for n <= 16",
        t.coeff(order).to_string().len()
    ))
}

fn singularity_constants(s: &Singularity, elapsed: f64) -> Check {
    let (x0, b) = (&s.x0, &s.b);
    ensure(
        (x0.value - X0_PUBLISHED).abs() <= 1e-5,
        format!("x0 = {} ± {}", x0.value, x0.error),
    )?;
    let rel = (b.value - B_PUBLISHED).abs() / B_PUBLISHED;
    ensure(rel <= 0.005, format!("b = {} ± {} (rel {rel:.2e})", b.value, b.error))?;
    let half_b2 = b.value * b.value / 2.0;
    let err = b.value * b.error + b.identity.error;
    ensure(
        (half_b2 - b.identity.value).abs() <= err,
        format!("b^2/2 = {half_b2} vs identity {} (allowed {err})", b.identity.value),
    )?;
    ensure(elapsed < 60.0, format!("took {elapsed:.1} s"))?;
    Ok(format!(
        "x0 = {:.9} ± {:.1e}, b = {:.5} ± {:.1e} (rel {rel:.1e}), b^2/2 = {half_b2:.5} vs {:.5}, {elapsed:.2} s",
        x0.value, x0.error, b.value, b.error, b.identity.value
    ))
}

fn mu_cross_validation(s: &Singularity) -> Check {
    let mut parts = Vec::new();
    for p in [pat(1, 2), pat(1, 3), pat(2, 2), pat(2, 3)] {
        let m = compute_mu(p, s, MuMethod::Both, 400).map_err(|e| e.to_string())?;
        let spread = m.relative_spread().ok_or("missing route")?;
        let e = m.extrapolation.as_ref().unwrap();
        ensure(
            spread < 0.01,
            format!("{p}: singular {} vs extrapolated {}", m.singularity.unwrap().value, e.estimate.value),
        )?;
        parts.push(format!("{p} {:.6}/{:.6} ({spread:.1e})", m.singularity.unwrap().value, e.estimate.value));
    }
    Ok(parts.join(", "))
}

fn edge_partition(mus: &BTreeMap<PatternSpec, Estimate>) -> Check {
    let mut prev = 0.0;
    let mut sums = Vec::new();
    for k in 2..=12 {
        let b = lambda_bracket(mus, k, -0.5).map_err(|e| e.to_string())?;
        ensure(b.mu_sum >= prev, format!("sum drops at K = {k}"))?;
        prev = b.mu_sum;
        sums.push(b.mu_sum);
    }
    let err: f64 = mus.values().map(|e| e.error).sum();
    ensure(prev <= 1.0 + err, format!("sum {prev} exceeds 1 + {err}"))?;
    ensure(prev > 0.9, format!("sum at K = 12 is {prev}"))?;
    Ok(format!(
        "monotone over K = 2..=12 (K=2: {:.4}, K=6: {:.4}, K=12: {prev:.5}), quoted error {err:.1e}",
        sums[0], sums[4]
    ))
}

fn lambda_brackets(mus: &BTreeMap<PatternSpec, Estimate>) -> Check {
    let b = lambda_bracket(mus, 12, -0.5).map_err(|e| e.to_string())?;
    ensure(b.lower > 0.1 && b.upper < 1.0, format!("[{}, {}]", b.lower, b.upper))?;
    let width = b.upper - b.lower;
    ensure(width < 0.15, format!("width {width}"))?;
    // the plain Randić weight 1/√(ij), summed independently
    let direct: f64 = mus
        .iter()
        .filter(|(p, _)| p.j() <= 12)
        .map(|(p, e)| e.value * (1.0 / ((p.i() * p.j()) as f64).sqrt()))
        .sum();
    ensure(
        b.lower + b.error == direct || (b.lower + b.error - direct).abs() <= f64::EPSILON * direct,
        format!("α = -1/2 gives {} but 1/sqrt weights give {direct}", b.lower + b.error),
    )?;
    let mut prev = f64::NEG_INFINITY;
    let mut parts = Vec::new();
    for alpha in [-1.0, -0.5, -0.25] {
        let g = lambda_bracket(mus, 12, alpha).map_err(|e| e.to_string())?;
        ensure(g.lower <= g.upper && g.lower > prev, format!("α = {alpha} out of order"))?;
        prev = g.upper;
        parts.push(format!("α={alpha}: [{:.4}, {:.4}]", g.lower, g.upper));
    }
    Ok(format!("λ ∈ [{:.5}, {:.5}], width {width:.4}; {}", b.lower, b.upper, parts.join(", ")))
}

fn normality() -> Check {
    let grid = [25, 50, 100];
    let mut parts = Vec::new();
    for p in [pat(1, 2), pat(1, 3), pat(2, 2)] {
        let t = normality_trend_for(p, &grid, SolveOptions::default()).map_err(|e| e.to_string())?;
        let skew: Vec<_> = t.rows.iter().map(|r| r.skewness.map(f64::abs)).collect();
        let ks: Vec<_> = t.rows.iter().map(|r| r.kolmogorov_to_normal).collect();
        ensure(t.skewness_decreasing, format!("{p} |skewness| {skew:?}"))?;
        ensure(t.kolmogorov_decreasing, format!("{p} Kolmogorov {ks:?}"))?;
        parts.push(format!(
            "{p} skew {:.3}->{:.3} KS {:.4}->{:.4}",
            skew[0].unwrap(),
            skew[2].unwrap(),
            ks[0].unwrap(),
            ks[2].unwrap()
        ));
    }
    let sol = solve_bivariate(pat(1, 2), 200, SolveOptions::default()).map_err(|e| e.to_string())?;
    let s = summarize(&sol, 200).map_err(|e| e.to_string())?;
    let tail = to_f64(s.tail_prob.as_ref().unwrap());
    ensure(s.chebyshev_holds == Some(true), "Chebyshev bound fails on exact data")?;
    ensure(tail < 0.05, format!("tail at n = 200 is {tail}"))?;
    Ok(format!("{}; (1,2) tail at n=200 = {tail:.2e}", parts.join("; ")))
}

fn conjecture() -> Check {
    let r = conjecture_scan(16).map_err(|e| e.to_string())?;
    let last = r.rows.last().unwrap();
    ensure(last.trees == 19320, format!("{} trees at n = 16", last.trees))?;
    ensure(r.rows.iter().all(|x| x.count_matches_series), "enumerated count differs from t_n")?;
    for w in &r.violations {
        println!("    VIOLATION n={} tree [{}] R={} D={}", w.n, w.tree, w.randic, w.avg_distance.decimal);
    }
    ensure(r.violations.is_empty(), format!("{} violations", r.violations.len()))?;
    let eq: Vec<String> = r.equalities.iter().map(|w| format!("n={} [{}]", w.n, w.tree)).collect();
    let m = r.min_margin.as_ref().unwrap();
    Ok(format!(
        "{} trees, 0 violations, equalities: {}; smallest R-D = {:.4} at n={} [{}]",
        r.total_trees,
        eq.join(", "),
        m.margin,
        m.n,
        m.tree
    ))
}

fn gnp() -> Check {
    let r = gnp_conjecture_check(2000, 0.5, 5, 2024).map_err(|e| e.to_string())?;
    ensure(r.disconnected == 0, format!("{} disconnected", r.disconnected))?;
    for t in &r.trials {
        let d = t.avg_distance.unwrap();
        ensure(
            t.randic_over_n > 0.45 && t.randic_over_n < 0.55,
            format!("trial {}: R/n = {}", t.trial, t.randic_over_n),
        )?;
        ensure(d <= 2.2, format!("trial {}: D = {d}", t.trial))?;
        ensure(t.randic_exceeds_d == Some(true), format!("trial {}: R <= D", t.trial))?;
    }
    Ok(format!(
        "5/5 connected, mean R/n = {:.5}, max D = {:.5}, R > D in all",
        r.mean_randic_over_n,
        r.max_avg_distance.unwrap()
    ))
}

fn wiener() -> Check {
    let w = wiener_scaling(4, 16).map_err(|e| e.to_string())?;
    ensure((w.fit_from, w.fit_to) == (10, 16), "fit range")?;
    ensure(w.rows.windows(2).all(|r| r[1].mean_w > r[0].mean_w), "E(W) not increasing")?;
    let s = w.fit.slope;
    ensure((2.2..=2.8).contains(&s), format!("slope {s}"))?;
    let max_res = w.fit.residuals.iter().fold(0.0f64, |a, r| a.max(r.abs()));
    Ok(format!("slope over n in [10,16] = {s:.4}, max residual {max_res:.1e}"))
}

fn main() {
    let mut failed = 0;
    let mut report = |id: usize, name: &str, res: Check| {
        match res {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {why}");
            }
        }
    };
    report(1, "oracle equivalence", oracle_equivalence());
    report(2, "tree counts", tree_counts());
    let start = Instant::now();
    let sing = Singularity::compute(400);
    let elapsed = start.elapsed().as_secs_f64();
    match sing {
        Ok(s) => {
            report(3, "singularity constants", singularity_constants(&s, elapsed));
            report(4, "mu cross-validation", mu_cross_validation(&s));
            match all_mu_singular(&s, 12) {
                Ok(all) => {
                    let mus: BTreeMap<_, _> = all.into_iter().map(|(p, (e, _))| (p, e)).collect();
                    report(5, "edge partition", edge_partition(&mus));
                    report(6, "lambda bracket", lambda_brackets(&mus));
                }
                Err(e) => {
                    report(5, "edge partition", Err(e.to_string()));
                    report(6, "lambda bracket", Err(e.to_string()));
                }
            }
        }
        Err(e) => {
            for (id, name) in [(3, "singularity constants"), (4, "mu cross-validation"), (5, "edge partition"), (6, "lambda bracket")] {
                report(id, name, Err(e.to_string()));
            }
        }
    }
    report(7, "normality diagnostics", normality());
    report(8, "conjecture scan", conjecture());
    report(9, "G(n,p) remark", gnp());
    report(10, "Wiener scaling", wiener());
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria pass");
}
