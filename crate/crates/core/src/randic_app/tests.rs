use super::*;
use crate::treelab::avg_distance;

fn tree(s: &str) -> SimpleGraph {
    s.parse::<FreeTree>().unwrap().to_graph()
}

#[test]
fn squarefree_parts() {
    assert_eq!(squarefree_split(1), (1, 1));
    assert_eq!(squarefree_split(12), (3, 2));
    assert_eq!(squarefree_split(36), (1, 6));
    assert_eq!(squarefree_split(50), (2, 5));
    assert_eq!(squarefree_split(7), (7, 1));
}

#[test]
fn exact_comparison() {
    let p2 = tree("0 1");
    let one = BigRational::from_integer(1.into());
    assert_eq!(compare_exact(&p2, &one), (Ordering::Equal, 0.0));
    // star K_{1,3}: R = √3 against D = 3/2
    let star = tree("0 1 1 1");
    let d = BigRational::new(3.into(), 2.into());
    let (ord, m) = compare_exact(&star, &d);
    assert_eq!(ord, Ordering::Greater);
    assert!((m - (3f64.sqrt() - 1.5)).abs() < 1e-15);
    // √3 is irrational, so no rational D ties with it
    let near = BigRational::new(173205080756887729i64.into(), 100000000000000000i64.into());
    assert_eq!(compare_exact(&star, &near).0, Ordering::Greater);
    let above = near + BigRational::new(1.into(), 10i64.pow(17).into());
    assert_eq!(compare_exact(&star, &above).0, Ordering::Less);
}

#[test]
fn small_scan() {
    let r = conjecture_scan(9).unwrap();
    assert!(r.holds());
    assert_eq!(r.equalities.len(), 1);
    assert_eq!(r.equalities[0].tree, "0 1");
    assert_eq!(r.rows.iter().map(|x| x.trees).sum::<u64>(), r.total_trees);
    assert_eq!(r.rows[8 - 2].trees, 23);
    for row in &r.rows {
        assert!(row.count_matches_series && row.randic_per_edge_ok);
        assert_eq!(row.strict + row.equalities + row.violations, row.trees);
    }
    let m = r.min_margin.as_ref().unwrap();
    assert!(m.margin > 0.0);
    // re-evaluate the witness directly
    let g = tree(&m.tree);
    let d = avg_distance(&g).unwrap();
    let d = *d.numer() as f64 / *d.denom() as f64;
    assert!((randic(&g) - d - m.margin).abs() < 1e-12);
}

#[test]
fn scan_is_deterministic() {
    assert_eq!(conjecture_scan(8).unwrap(), conjecture_scan(8).unwrap());
    assert!(conjecture_scan(1).is_err());
}

#[test]
fn star_of_four() {
    let r = conjecture_scan(4).unwrap();
    let row = &r.rows[2];
    assert_eq!(row.trees, 2);
    // P4: D = 5/3, star: D = 3/2
    assert_eq!(row.max_avg_distance, BigRational::new(5.into(), 3.into()));
    let mean = BigRational::new(19.into(), 12.into());
    assert_eq!(row.mean_avg_distance, mean);
}

#[test]
fn gnp_small_and_reproducible() {
    let a = gnp_conjecture_check(200, 0.5, 3, 11).unwrap();
    let b = gnp_conjecture_check(200, 0.5, 3, 11).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.disconnected, 0);
    assert_eq!(a.fraction_randic_exceeds_d, Some(1.0));
    assert!(a.max_avg_distance.unwrap() < 2.0);
    assert!((a.mean_randic_over_n - 0.5).abs() < 0.05);
    // trials draw from different streams
    assert_ne!(a.trials[0].edges, a.trials[1].edges);
    assert!(gnp_conjecture_check(10, 1.0, 1, 0).is_err());
}

#[test]
fn gnp_sparse_is_disconnected() {
    let r = gnp_conjecture_check(60, 0.01, 4, 5).unwrap();
    assert_eq!(r.disconnected, 4);
    assert_eq!(r.max_avg_distance, None);
    assert_eq!(r.fraction_randic_exceeds_d, None);
}

#[test]
fn wiener_and_diameter_on_path() {
    let g = tree("0 1 2 3 4");
    assert_eq!(wiener_and_diameter(&g), Some((20, 4)));
}

#[test]
fn growth_crossover() {
    // D = n/3 exactly, λ = 0.45: exponent 1 means no crossover from the fit
    let pts: Vec<_> = (4..=12).map(|n| (n, n as f64 / 3.0)).collect();
    let g = growth_fit(&pts, 0.45);
    assert_eq!((g.fit_from, g.fit_to), (6, 12));
    assert!((g.fit.slope - 1.0).abs() < 1e-12);
    let sub: Vec<_> = (4..=12).map(|n| (n, 2.0 * (n as f64).sqrt())).collect();
    let g = growth_fit(&sub, 0.5);
    // 0.5 n > 2 √n  ⇔  n > 16
    assert!((g.crossover.unwrap() - 16.0).abs() < 1e-9);
}
