use std::collections::BTreeMap;

use anyhow::{Context, Result};
use dstar_core::asymptotics::{
    all_mu_singular, compute_mu, lambda_bracket, sigma_estimate, t_at_x0, t_at_x0_target,
    Singularity,
};
use dstar_core::distlab::{normality_trend, summarize};
use dstar_core::pattern_gf::{distribution_csv, solve_cached, SolveOptions};
use dstar_core::pseries::{free_series, rooted_series, CoeffCache, Jet, UPoly};
use dstar_core::randic_app::{conjecture_scan, gnp_conjecture_check};
use dstar_core::treelab::{all_patterns, count_free_enumerated, gen_free_trees, oracle_distribution};
use dstar_core::PatternSpec;
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::{Cli, Command};

/// A finished command: its JSON result, the CSV rendering, and whether every
/// checked claim held.
pub struct Outcome {
    pub result: Value,
    pub csv: String,
    pub passed: bool,
    pub message: String,
}

impl Outcome {
    fn ok(result: Value, csv: String) -> Self {
        Outcome {
            result,
            csv,
            passed: true,
            message: String::new(),
        }
    }
}

fn csv_of<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn opts(cfg: &RunConfig) -> SolveOptions {
    SolveOptions {
        variant: cfg.variant,
        ..Default::default()
    }
}

fn cache(cfg: &RunConfig) -> Option<CoeffCache> {
    cfg.cache_dir.as_ref().map(CoeffCache::new)
}

pub fn run(cli: &Cli, cfg: &RunConfig) -> Result<Outcome> {
    match &cli.command {
        Command::Counts {
            max_n,
            enumerate_max,
            check_systems,
        } => counts(cfg, *max_n, *enumerate_max, *check_systems),
        Command::Enumerate { n } => enumerate(*n),
        Command::Dist { pattern, n } => dist(cfg, *pattern, n),
        Command::Moments {
            pattern,
            n,
            jet_order,
        } => moments(cfg, *pattern, n, *jet_order),
        Command::Singularity { order } => singularity(*order),
        Command::Mu {
            pattern,
            method,
            order,
        } => {
            let sing = Singularity::compute(*order)?;
            let m = compute_mu(*pattern, &sing, *method, *order)?;
            #[derive(Serialize)]
            struct Row {
                pattern_i: usize,
                pattern_j: usize,
                method: String,
                value: f64,
                error: f64,
                singularity: Option<f64>,
                extrapolation: Option<f64>,
                flagged: bool,
            }
            let csv = csv_of([Row {
                pattern_i: pattern.i(),
                pattern_j: pattern.j(),
                method: serde_json::to_value(m.method)?.as_str().unwrap_or("").into(),
                value: m.value,
                error: m.error,
                singularity: m.singularity.map(|s| s.value),
                extrapolation: m.extrapolation.as_ref().map(|e| e.estimate.value),
                flagged: m.flagged,
            }])?;
            let spread = m.relative_spread();
            let mut v = serde_json::to_value(&m)?;
            v["relative_spread"] = json!(spread);
            Ok(Outcome::ok(v, csv))
        }
        Command::Sigma { pattern, order } => {
            let s = sigma_estimate(*pattern, *order)?;
            let csv = format!(
                "pattern_i,pattern_j,value,error,flagged\n{},{},{},{},{}\n",
                pattern.i(),
                pattern.j(),
                s.value,
                s.error,
                s.flagged
            );
            Ok(Outcome::ok(serde_json::to_value(&s)?, csv))
        }
        Command::Lambda { k, alpha, order } => lambda(*k, alpha, *order),
        Command::Conjecture { max_n } => {
            let r = conjecture_scan(*max_n)?;
            for w in &r.violations {
                eprintln!(
                    "VIOLATION n = {} tree [{}]: R = {}, D = {}, R − D = {:e}",
                    w.n, w.tree, w.randic, w.avg_distance.decimal, w.margin
                );
            }
            #[derive(Serialize)]
            struct Row {
                n: usize,
                trees: u64,
                strict: u64,
                equalities: u64,
                violations: u64,
                escalated: u64,
                min_margin: Option<f64>,
            }
            let csv = csv_of(r.rows.iter().map(|x| Row {
                n: x.n,
                trees: x.trees,
                strict: x.strict,
                equalities: x.equalities,
                violations: x.violations,
                escalated: x.escalated,
                min_margin: x.min_margin.as_ref().map(|w| w.margin),
            }))?;
            let passed = r.holds();
            let message = if passed {
                format!(
                    "no violations of R >= D over {} trees; {} equalities",
                    r.total_trees,
                    r.equalities.len()
                )
            } else {
                format!("{} violations of R >= D", r.violations.len())
            };
            Ok(Outcome {
                result: serde_json::to_value(&r)?,
                csv,
                passed,
                message,
            })
        }
        Command::Gnp { n, p, trials, seed } => {
            let r = gnp_conjecture_check(*n, *p, *trials, *seed)?;
            #[derive(Serialize)]
            struct Row {
                trial: u64,
                connected: bool,
                edges: usize,
                randic: f64,
                randic_over_n: f64,
                avg_distance: Option<f64>,
                diameter: Option<usize>,
            }
            let csv = csv_of(r.trials.iter().map(|t| Row {
                trial: t.trial,
                connected: t.connected,
                edges: t.edges,
                randic: t.randic,
                randic_over_n: t.randic_over_n,
                avg_distance: t.avg_distance,
                diameter: t.diameter,
            }))?;
            let bad = r
                .trials
                .iter()
                .filter(|t| t.randic_exceeds_d == Some(false))
                .count();
            Ok(Outcome {
                result: serde_json::to_value(&r)?,
                csv,
                passed: bad == 0,
                message: format!(
                    "{bad} connected samples with R <= D; {} disconnected",
                    r.disconnected
                ),
            })
        }
        Command::Verify { max_n, max_j } => verify(cfg, *max_n, *max_j),
    }
}

fn counts(cfg: &RunConfig, max_n: usize, enumerate_max: usize, check_systems: bool) -> Result<Outcome> {
    let t = free_series(max_n);
    let r = rooted_series(max_n);
    #[derive(Serialize)]
    struct Row {
        n: usize,
        t_n: String,
        r_n: String,
        p_n: String,
        enumerated_t_n: Option<u64>,
    }
    let rows: Vec<Row> = (1..=max_n)
        .map(|n| Row {
            n,
            t_n: t.coeff(n).to_string(),
            r_n: r.coeff(n).to_string(),
            // planted and rooted trees are equinumerous
            p_n: r.coeff(n).to_string(),
            enumerated_t_n: (n <= enumerate_max).then(|| count_free_enumerated(n)),
        })
        .collect();
    let enum_ok = rows
        .iter()
        .all(|row| row.enumerated_t_n.is_none_or(|c| c.to_string() == row.t_n));
    let mut systems = Vec::new();
    if check_systems {
        let store = cache(cfg);
        for p in [(1, 2), (2, 2), (2, 3)] {
            let p = PatternSpec::new(p.0, p.1)?;
            let (sol, hit) = solve_cached(p, max_n, &BigInt::from(0), opts(cfg), store.as_ref())?;
            log::info!("pattern {p} univariate order {max_n}: cache {}", if hit { "hit" } else { "miss" });
            systems.push(json!({
                "pattern": p,
                "t_agrees": sol.t == t,
                "p_agrees": sol.p == r,
            }));
        }
    }
    let sys_ok = systems
        .iter()
        .all(|s| s["t_agrees"] == json!(true) && s["p_agrees"] == json!(true));
    let csv = csv_of(&rows)?;
    Ok(Outcome {
        result: json!({ "rows": rows, "systems": systems }),
        csv,
        passed: enum_ok && sys_ok,
        message: if enum_ok && sys_ok {
            "counts agree".into()
        } else {
            "tree counts disagree".into()
        },
    })
}

fn enumerate(n: usize) -> Result<Outcome> {
    let trees = gen_free_trees(n);
    let seqs: Vec<String> = trees.iter().map(|t| t.to_string()).collect();
    #[derive(Serialize)]
    struct Row<'a> {
        n: usize,
        index: usize,
        level_sequence: &'a str,
    }
    let csv = csv_of(seqs.iter().enumerate().map(|(index, s)| Row {
        n,
        index,
        level_sequence: s,
    }))?;
    Ok(Outcome::ok(
        json!({ "n": n, "count": seqs.len(), "trees": seqs }),
        csv,
    ))
}

fn dist(cfg: &RunConfig, pattern: PatternSpec, ns: &[usize]) -> Result<Outcome> {
    let order = *ns.iter().max().expect("validated non-empty");
    let store = cache(cfg);
    let (sol, hit) = solve_cached(pattern, order, &UPoly::constant(0), opts(cfg), store.as_ref())?;
    log::info!("pattern {pattern} bivariate order {order}: cache {}", if hit { "hit" } else { "miss" });
    let mut rows = Vec::new();
    for &n in ns {
        let summary = summarize(&sol, n)?;
        let dist: BTreeMap<String, String> = sol
            .distribution(n)?
            .into_iter()
            .map(|(k, c)| (k.to_string(), c.to_string()))
            .collect();
        rows.push(json!({ "summary": summary, "t_nk": dist }));
    }
    let mut result = json!({ "pattern": pattern, "variant": sol.variant, "rows": rows });
    if ns.len() > 1 {
        result["normality"] = serde_json::to_value(normality_trend(&sol, ns)?)?;
    }
    let csv = distribution_csv(&sol, ns.iter().copied())?;
    Ok(Outcome::ok(result, csv))
}

fn moments(cfg: &RunConfig, pattern: PatternSpec, ns: &[usize], jet_order: usize) -> Result<Outcome> {
    let order = *ns.iter().max().expect("validated non-empty");
    let store = cache(cfg);
    let (sol, hit) = solve_cached(pattern, order, &Jet::zero(jet_order), opts(cfg), store.as_ref())?;
    log::info!("pattern {pattern} jet order {order}: cache {}", if hit { "hit" } else { "miss" });
    let summaries = ns
        .iter()
        .map(|&n| summarize(&sol, n))
        .collect::<Result<Vec<_>, _>>()?;
    #[derive(Serialize)]
    struct Row {
        pattern_i: usize,
        pattern_j: usize,
        n: usize,
        trees: String,
        mean: String,
        variance: String,
        skewness: Option<f64>,
        mean_num: String,
        mean_den: String,
        variance_num: String,
        variance_den: String,
    }
    let csv = csv_of(summaries.iter().map(|s| {
        let m = dstar_core::exact::ExactRational::from(&s.mean);
        let v = dstar_core::exact::ExactRational::from(&s.variance);
        Row {
            pattern_i: pattern.i(),
            pattern_j: pattern.j(),
            n: s.n,
            trees: s.trees.to_string(),
            mean: m.decimal,
            variance: v.decimal,
            skewness: s.skewness,
            mean_num: m.num,
            mean_den: m.den,
            variance_num: v.num,
            variance_den: v.den,
        }
    }))?;
    Ok(Outcome::ok(
        json!({ "pattern": pattern, "jet_order": jet_order, "rows": summaries }),
        csv,
    ))
}

fn singularity(order: usize) -> Result<Outcome> {
    let sing = Singularity::compute(order)?;
    let (x0, b) = (&sing.x0, &sing.b);
    let half_b2 = b.value * b.value / 2.0;
    let identity_error = b.value * b.error + b.identity.error;
    let t = t_at_x0(&sing)?;
    let result = json!({
        "order": order,
        "x0": x0,
        "b": b,
        "half_b_squared": half_b2,
        "identity_agrees": (half_b2 - b.identity.value).abs() <= identity_error,
        "t_at_x0": t,
        "t_at_x0_target": t_at_x0_target(&sing),
    });
    let csv = format!(
        "quantity,value,error\nx0,{},{}\nb,{},{}\nfx_identity,{},{}\nt_at_x0,{},{}\n",
        x0.value, x0.error, b.value, b.error, b.identity.value, b.identity.error, t.value, t.error
    );
    Ok(Outcome::ok(result, csv))
}

fn lambda(k: usize, alpha: &[f64], order: usize) -> Result<Outcome> {
    let sing = Singularity::compute(order)?;
    let mus: BTreeMap<_, _> = all_mu_singular(&sing, k)?
        .into_iter()
        .map(|(p, (e, _))| (p, e))
        .collect();
    let brackets = alpha
        .iter()
        .map(|&a| lambda_bracket(&mus, k, a))
        .collect::<Result<Vec<_>, _>>()?;
    #[derive(Serialize)]
    struct Row {
        alpha: f64,
        k: usize,
        i: usize,
        j: usize,
        mu: f64,
        contribution: f64,
    }
    let csv = csv_of(brackets.iter().flat_map(|b| {
        b.terms.iter().map(move |t| Row {
            alpha: b.alpha,
            k: b.k,
            i: t.i,
            j: t.j,
            mu: t.mu,
            contribution: t.contribution,
        })
    }))?;
    Ok(Outcome::ok(
        json!({ "k": k, "order": order, "brackets": brackets }),
        csv,
    ))
}

fn verify(cfg: &RunConfig, max_n: usize, max_j: usize) -> Result<Outcome> {
    let store = cache(cfg);
    let mut mismatches = Vec::new();
    let mut invariant_failures = Vec::new();
    #[derive(Serialize)]
    struct Row {
        pattern_i: usize,
        pattern_j: usize,
        n: usize,
        matches: bool,
    }
    let mut rows = Vec::new();
    let patterns = all_patterns(max_j);
    for &p in &patterns {
        let (sol, hit) = solve_cached(p, max_n, &UPoly::constant(0), opts(cfg), store.as_ref())
            .with_context(|| format!("solving {p}"))?;
        log::info!("pattern {p} bivariate order {max_n}: cache {}", if hit { "hit" } else { "miss" });
        if let Err(e) = sol.check_invariants() {
            invariant_failures.push(json!({ "pattern": p, "error": e.to_string() }));
        }
        for n in 2..=max_n {
            let gf = sol.distribution(n)?;
            let oracle: BTreeMap<usize, BigInt> = oracle_distribution(n, &p)
                .into_iter()
                .map(|(k, c)| (k, BigInt::from(c)))
                .collect();
            let matches = gf == oracle;
            if !matches {
                let show = |m: &BTreeMap<usize, BigInt>| -> BTreeMap<String, String> {
                    m.iter().map(|(k, c)| (k.to_string(), c.to_string())).collect()
                };
                mismatches.push(json!({ "pattern": p, "n": n, "gf": show(&gf), "oracle": show(&oracle) }));
            }
            rows.push(Row {
                pattern_i: p.i(),
                pattern_j: p.j(),
                n,
                matches,
            });
        }
    }
    let passed = mismatches.is_empty() && invariant_failures.is_empty();
    let message = if passed {
        "all distributions match oracle".to_string()
    } else {
        format!(
            "{} distribution mismatches, {} invariant failures",
            mismatches.len(),
            invariant_failures.len()
        )
    };
    eprintln!("{message}");
    let csv = csv_of(&rows)?;
    Ok(Outcome {
        result: json!({
            "max_n": max_n,
            "max_j": max_j,
            "variant": cfg.variant,
            "patterns": patterns.len(),
            "checks": rows.len(),
            "mismatches": mismatches,
            "invariant_failures": invariant_failures,
            "message": message,
        }),
        csv,
        passed,
        message,
    })
}
