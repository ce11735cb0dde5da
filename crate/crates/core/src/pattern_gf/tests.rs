use super::*;
use crate::treelab::{all_patterns, oracle_distribution};

fn pat(i: usize, j: usize) -> PatternSpec {
    PatternSpec::new(i, j).unwrap()
}

fn bi(i: usize, j: usize, order: usize) -> BiSolution {
    solve_bivariate(pat(i, j), order, SolveOptions::default()).unwrap()
}

fn row(pairs: &[(usize, i64)]) -> BTreeMap<usize, BigInt> {
    pairs.iter().map(|&(k, c)| (k, BigInt::from(c))).collect()
}

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

#[test]
fn hand_counted_rows() {
    assert_eq!(bi(2, 3, 6).distribution(5).unwrap(), row(&[(0, 2), (1, 1)]));
    let s12 = bi(1, 2, 6);
    assert_eq!(s12.distribution(2).unwrap(), row(&[(0, 1)]));
    assert_eq!(s12.distribution(4).unwrap(), row(&[(0, 1), (2, 1)]));
    assert_eq!(s12.distribution(5).unwrap(), row(&[(0, 1), (1, 1), (2, 1)]));
    assert_eq!(bi(1, 3, 5).distribution(4).unwrap(), row(&[(0, 1), (3, 1)]));
    let s22 = bi(2, 2, 6);
    assert_eq!(s22.distribution(4).unwrap(), row(&[(0, 1), (1, 1)]));
    assert_eq!(s22.distribution(5).unwrap(), row(&[(0, 2), (2, 1)]));
}

#[test]
fn hand_counted_moments() {
    let m = bi(1, 2, 5).moments(4).unwrap();
    assert_eq!(m.mean(), q(1, 1));
    assert_eq!(m.variance(), q(1, 1));
    let m = bi(2, 2, 5).moments(5).unwrap();
    assert_eq!(m.mean(), q(2, 3));
    assert_eq!(m.variance(), q(8, 9));
    // {0: 2/3, 2: 1/3}: third central moment 2/3·(−2/3)³ + 1/3·(4/3)³
    assert_eq!(m.third_central().unwrap(), q(-16, 81) + q(64, 81));
}

#[test]
fn wrong_case_and_excluded_pattern() {
    let o = SolveOptions::default();
    let p = UPoly::constant(0);
    assert!(matches!(solve_case1(1, 3, 5, &p, o), Err(GfError::WrongCase { .. })));
    assert!(matches!(solve_case1(3, 3, 5, &p, o), Err(GfError::WrongCase { .. })));
    assert!(matches!(solve_case3(1, 5, &p, o), Err(GfError::Pattern(PatternError::OneOne))));
    assert!(matches!(solve_case2(1, 5, &p, o), Err(GfError::Pattern(PatternError::OneOne))));
}

#[test]
fn matches_oracle_up_to_twelve() {
    for p in all_patterns(6) {
        let sol = solve_bivariate(p, 12, SolveOptions::default()).unwrap();
        sol.check_invariants().unwrap();
        for n in 2..=12 {
            let oracle: BTreeMap<usize, BigInt> = oracle_distribution(n, &p)
                .into_iter()
                .map(|(k, c)| (k, BigInt::from(c)))
                .collect();
            assert_eq!(sol.distribution(n).unwrap(), oracle, "pattern {p}, n = {n}");
        }
    }
}

#[test]
fn literal_variant_is_rejected_by_oracle() {
    let opts = SolveOptions {
        variant: Variant::Literal,
        verify_fixed_point: true,
    };
    let lit = solve_bivariate(pat(2, 3), 10, opts).unwrap();
    // same counts at u = 1, different distributions
    lit.check_invariants().unwrap();
    let mismatch = (2..=10).any(|n| {
        let oracle: BTreeMap<usize, BigInt> = oracle_distribution(n, &pat(2, 3))
            .into_iter()
            .map(|(k, c)| (k, BigInt::from(c)))
            .collect();
        lit.distribution(n).unwrap() != oracle
    });
    assert!(mismatch);
}

#[test]
fn jet_track_equals_collapsed_bivariate() {
    for p in [pat(1, 2), pat(1, 4), pat(2, 2), pat(2, 3), pat(3, 5), pat(4, 4)] {
        let b = solve_bivariate(p, 40, SolveOptions::default()).unwrap();
        let j = solve_jet(p, 40, 4, SolveOptions::default()).unwrap();
        j.check_invariants().unwrap();
        for (bs, js) in b.all_series().iter().zip(j.all_series()) {
            assert_eq!(&bs.to_jets(4), js, "pattern {p}");
        }
        for n in 1..=40 {
            assert_eq!(b.moments(n).unwrap(), j.moments(n).unwrap());
        }
    }
}

#[test]
fn jet_track_has_no_distribution() {
    let j = solve_jet(pat(1, 2), 10, 3, SolveOptions::default()).unwrap();
    assert_eq!(j.distribution(5), Err(GfError::NoDistribution));
    assert_eq!(j.factorial_moments(5, 3), Err(GfError::JetOrderTooSmall { m: 3 }));
    assert_eq!(j.factorial_moments(5, 2).unwrap().len(), 3);
    assert!(matches!(j.moments(11), Err(GfError::OrderExceeded { .. })));
}

#[test]
fn means_partition_the_edges() {
    for n in 3..=13 {
        let mut total = BigRational::zero();
        for p in all_patterns(n - 1) {
            total += solve_jet(p, n, 3, SolveOptions::default())
                .unwrap()
                .moments(n)
                .unwrap()
                .mean();
        }
        assert_eq!(total, q(n as i64 - 1, 1), "n = {n}");
    }
}

#[test]
fn univariate_track_collapses_to_tree_counts() {
    let s = solve(pat(2, 5), 30, &BigInt::zero(), SolveOptions::default()).unwrap();
    assert_eq!(s.t, free_series(30));
    assert_eq!(s.p, rooted_series(30));
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = CoeffCache::new(dir.path());
    let opts = SolveOptions::default();
    let proto = Jet::zero(3);
    let (cold, hit) = solve_cached(pat(2, 3), 25, &proto, opts, Some(&cache)).unwrap();
    assert!(!hit);
    let (warm, hit) = solve_cached(pat(2, 3), 25, &proto, opts, Some(&cache)).unwrap();
    assert!(hit);
    assert_eq!(cold, warm);
    let lit = SolveOptions {
        variant: Variant::Literal,
        ..opts
    };
    let (_, hit) = solve_cached(pat(2, 3), 25, &proto, lit, Some(&cache)).unwrap();
    assert!(!hit, "variant is part of the key");
    // the flag is irrelevant outside case 1
    solve_cached(pat(1, 3), 12, &proto, opts, Some(&cache)).unwrap();
    let (_, hit) = solve_cached(pat(1, 3), 12, &proto, lit, Some(&cache)).unwrap();
    assert!(hit);
}

#[test]
fn csv_export() {
    let csv = distribution_csv(&bi(1, 2, 5), [4, 5]).unwrap();
    assert_eq!(
        csv,
        "pattern_i,pattern_j,n,k,t_nk\n1,2,4,0,1\n1,2,4,2,1\n1,2,5,0,1\n1,2,5,1,1\n1,2,5,2,1\n"
    );
}
