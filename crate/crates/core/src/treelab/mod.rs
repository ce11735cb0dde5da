//! Exhaustive tree enumeration and exact graph-metric kernels. This is the
//! brute-force side that every generating-function result is checked
//! against.

mod free_tree;
mod graph;
mod pattern;

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use num_bigint::BigInt;
use rayon::prelude::*;

pub use free_tree::{gen_free_trees, FreeTree, FreeTrees};
pub use graph::{
    avg_distance, edge_weight, general_randic, gnp_sample, gnp_sample_with, randic, wiener,
    SimpleGraph,
};
pub use graph::scaled_inv_sqrt;
pub use pattern::{all_patterns, CaseKind, PatternError, PatternSpec};

use crate::pseries::{free_series, rooted_series};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TreeLabError {
    #[error("invalid level sequence {0}")]
    InvalidLevelSequence(String),
    #[error("edge list does not describe a tree")]
    NotATree,
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("self-loop at vertex {0}")]
    Loop(usize),
    #[error("repeated edge {0}-{1}")]
    MultiEdge(usize, usize),
    #[error("graph is disconnected; distances are undefined")]
    Disconnected,
    #[error("need at least two vertices, got {0}")]
    TooSmall(usize),
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
}

/// Number of edges whose endpoint degrees are exactly `{i, j}`.
pub fn pattern_count(t: &FreeTree, p: &PatternSpec) -> usize {
    let deg = t.degrees();
    t.edges()
        .iter()
        .filter(|&&(a, b)| p.matches(deg[a], deg[b]))
        .count()
}

/// Edge counts keyed by sorted endpoint-degree pair.
pub fn degree_pair_counts(t: &FreeTree) -> BTreeMap<(usize, usize), usize> {
    let deg = t.degrees();
    let mut out = BTreeMap::new();
    for (a, b) in t.edges() {
        let key = (deg[a].min(deg[b]), deg[a].max(deg[b]));
        *out.entry(key).or_insert(0) += 1;
    }
    out
}

/// Histogram `k → #trees with k occurrences` over all free trees on `n`
/// vertices.
pub fn oracle_distribution(n: usize, p: &PatternSpec) -> BTreeMap<usize, u64> {
    let trees = gen_free_trees(n);
    trees
        .par_iter()
        .fold(BTreeMap::new, |mut acc, t| {
            *acc.entry(pattern_count(t, p)).or_insert(0u64) += 1;
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, c) in b {
                *a.entry(k).or_insert(0) += c;
            }
            a
        })
}

/// `t_n` from the series identity.
pub fn count_free(n: usize) -> BigInt {
    free_series(n).coeff(n).clone()
}

/// `r_n` (= `p_n`) from the series identity.
pub fn count_rooted(n: usize) -> BigInt {
    rooted_series(n).coeff(n).clone()
}

/// `t_n` by running the free-tree generator.
pub fn count_free_enumerated(n: usize) -> u64 {
    FreeTrees::new(n).count() as u64
}

/// `r_n` by running the rooted-tree successor from the path down to the star.
pub fn count_rooted_enumerated(n: usize) -> u64 {
    assert!(n >= 1);
    let mut seq: Vec<u32> = (0..n as u32).collect();
    let mut count = 1;
    loop {
        let mut p = seq.len() - 1;
        while p > 0 && seq[p] == 1 {
            p -= 1;
        }
        if p == 0 {
            return count;
        }
        let mut q = p - 1;
        while seq[q] != seq[p] - 1 {
            q -= 1;
        }
        for i in p..seq.len() {
            seq[i] = seq[i - p + q];
        }
        count += 1;
    }
}

/// Writes one tree per line as its space-separated level sequence.
pub fn write_trees<W: Write>(mut w: W, trees: &[FreeTree]) -> io::Result<()> {
    for t in trees {
        writeln!(w, "{t}")?;
    }
    Ok(())
}

/// Reads the one-tree-per-line format; blank lines are skipped.
pub fn read_trees<R: BufRead>(r: R) -> Result<Vec<FreeTree>, Box<dyn std::error::Error>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(line.parse()?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(i: usize, j: usize) -> PatternSpec {
        PatternSpec::new(i, j).unwrap()
    }

    #[test]
    fn hand_counted_patterns() {
        let p4: FreeTree = "0 1 2 1".parse().unwrap();
        let k13: FreeTree = "0 1 1 1".parse().unwrap();
        let spider: FreeTree = "0 1 2 1 1".parse().unwrap();
        assert_eq!(pattern_count(&p4, &pat(1, 2)), 2);
        assert_eq!(pattern_count(&k13, &pat(1, 3)), 3);
        assert_eq!(spider.degrees()[0], 3);
        assert_eq!(pattern_count(&spider, &pat(2, 3)), 1);
    }

    #[test]
    fn tree_counts_agree() {
        assert_eq!(count_rooted(2), BigInt::from(1));
        assert_eq!(count_rooted_enumerated(7), 48);
        assert_eq!(count_rooted(7), BigInt::from(48));
        assert_eq!(count_free_enumerated(12), 551);
        for n in 1..=12 {
            assert_eq!(count_free(n), BigInt::from(count_free_enumerated(n)), "n = {n}");
            assert_eq!(count_rooted(n), BigInt::from(count_rooted_enumerated(n)), "n = {n}");
        }
        assert_eq!(count_free_enumerated(10), 106);
    }

    #[test]
    fn edges_partition_by_degree_pair() {
        for n in 2..=11 {
            for t in FreeTrees::new(n) {
                let total: usize = degree_pair_counts(&t).values().sum();
                assert_eq!(total, n - 1);
            }
        }
    }

    #[test]
    fn metrics_are_relabeling_invariant() {
        let t: FreeTree = "0 1 2 3 1 2 1".parse().unwrap();
        let edges = t.edges();
        // reverse the vertex labels
        let n = t.n();
        let relabeled: Vec<_> = edges.iter().map(|&(a, b)| (n - 1 - a, n - 1 - b)).collect();
        let g1 = t.to_graph();
        let g2 = SimpleGraph::from_edges(n, &relabeled).unwrap();
        assert_eq!(wiener(&g1), wiener(&g2));
        assert!((randic(&g1) - randic(&g2)).abs() < 1e-12);
        let t2 = FreeTree::from_edges(n, &relabeled).unwrap();
        assert_eq!(t, t2);
        for p in all_patterns(6) {
            assert_eq!(pattern_count(&t, &p), pattern_count(&t2, &p));
        }
    }

    #[test]
    fn exchange_format_round_trip() {
        let trees = gen_free_trees(7);
        let mut buf = Vec::new();
        write_trees(&mut buf, &trees).unwrap();
        let back = read_trees(&buf[..]).unwrap();
        assert_eq!(back, trees);
    }

    #[test]
    fn oracle_histogram_small() {
        let d = oracle_distribution(5, &pat(2, 3));
        assert_eq!(d, BTreeMap::from([(0, 2), (1, 1)]));
    }
}
