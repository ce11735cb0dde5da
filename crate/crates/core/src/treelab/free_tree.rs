//! Unlabeled free trees as canonical level sequences, and their exhaustive
//! generation in constant amortized time.
//!
//! A tree is rooted at its center. For a bicentral tree the root is the
//! center whose opposite half is smaller (by vertex count, then by canonical
//! level sequence). Children are ordered so that their level sequences are
//! non-increasing lexicographically, which makes the whole sequence the
//! lexicographically largest for that root.

use std::fmt;
use std::str::FromStr;

use super::graph::SimpleGraph;
use super::TreeLabError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeTree {
    level_seq: Vec<u32>,
}

impl FreeTree {
    /// Wraps a level sequence after checking its shape. The sequence is
    /// canonicalized; use [`FreeTree::is_canonical`] to test an input.
    pub fn from_level_seq(seq: Vec<u32>) -> Result<Self, TreeLabError> {
        validate_levels(&seq)?;
        let parents = parents_of(&seq);
        let edges: Vec<(usize, usize)> = parents
            .iter()
            .enumerate()
            .skip(1)
            .map(|(v, &p)| (p, v))
            .collect();
        Ok(canonicalize(seq.len(), &edges))
    }

    /// Builds the canonical tree from an edge list on vertices `0..n`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, TreeLabError> {
        if n == 0 || edges.len() != n - 1 {
            return Err(TreeLabError::NotATree);
        }
        let g = SimpleGraph::from_edges(n, edges)?;
        if !g.is_connected() {
            return Err(TreeLabError::NotATree);
        }
        Ok(canonicalize(n, edges))
    }


    pub fn n(&self) -> usize {
        self.level_seq.len()
    }

    pub fn level_seq(&self) -> &[u32] {
        &self.level_seq
    }

    /// Edges `(parent, child)` of the decoded tree, vertices in sequence order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        parents_of(&self.level_seq)
            .into_iter()
            .enumerate()
            .skip(1)
            .map(|(v, p)| (p, v))
            .collect()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n()];
        for (a, b) in self.edges() {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn to_graph(&self) -> SimpleGraph {
        SimpleGraph::from_edges(self.n(), &self.edges()).expect("decoded tree is simple")
    }

    /// Re-canonicalizes from the decoded edges.
    pub fn recanonicalize(&self) -> FreeTree {
        canonicalize(self.n(), &self.edges())
    }

    pub fn is_canonical(seq: &[u32]) -> bool {
        validate_levels(seq).is_ok()
            && FreeTree::from_level_seq(seq.to_vec()).is_ok_and(|t| t.level_seq == seq)
    }

    /// Edge list as `"u v"` lines, 0-indexed.
    pub fn edge_list_string(&self) -> String {
        self.edges()
            .iter()
            .map(|(a, b)| format!("{a} {b}\n"))
            .collect()
    }
}

impl fmt::Display for FreeTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in &self.level_seq {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for FreeTree {
    type Err = TreeLabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let seq: Result<Vec<u32>, _> = s.split_whitespace().map(str::parse).collect();
        let seq = seq.map_err(|_| TreeLabError::InvalidLevelSequence(s.trim().to_owned()))?;
        FreeTree::from_level_seq(seq)
    }
}

fn validate_levels(seq: &[u32]) -> Result<(), TreeLabError> {
    let bad = || TreeLabError::InvalidLevelSequence(format!("{seq:?}"));
    if seq.first() != Some(&0) {
        return Err(bad());
    }
    for w in seq.windows(2) {
        if w[1] == 0 || w[1] > w[0] + 1 {
            return Err(bad());
        }
    }
    Ok(())
}

fn parents_of(seq: &[u32]) -> Vec<usize> {
    // stack[l] = most recent vertex at level l
    let mut stack: Vec<usize> = Vec::with_capacity(seq.len());
    let mut parent = vec![0; seq.len()];
    for (v, &l) in seq.iter().enumerate() {
        let l = l as usize;
        stack.truncate(l);
        if l > 0 {
            parent[v] = stack[l - 1];
        }
        stack.push(v);
    }
    parent
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

/// Centers by repeated leaf stripping.
fn centers(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &w in &adj[v] {
                deg[w] -= 1;
                if deg[w] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    layer.sort_unstable();
    layer
}

/// Lexicographically largest level sequence of the subtree at `v`
/// (away from `parent`), root at level 0.
fn rooted_canonical(adj: &[Vec<usize>], v: usize, parent: Option<usize>) -> Vec<u32> {
    let mut kids: Vec<Vec<u32>> = adj[v]
        .iter()
        .filter(|&&w| Some(w) != parent)
        .map(|&w| rooted_canonical(adj, w, Some(v)))
        .collect();
    kids.sort_unstable_by(|a, b| b.cmp(a));
    let mut seq = vec![0];
    for k in kids {
        seq.extend(k.into_iter().map(|l| l + 1));
    }
    seq
}

fn canonicalize(n: usize, edges: &[(usize, usize)]) -> FreeTree {
    let adj = adjacency(n, edges);
    let cs = centers(&adj);
    let seq = match cs.as_slice() {
        [c] => rooted_canonical(&adj, *c, None),
        [c1, c2] => {
            // halves across the central edge: `a` hangs off c2, `b` off c1
            let a = rooted_canonical(&adj, *c2, Some(*c1));
            let b = rooted_canonical(&adj, *c1, Some(*c2));
            let root = if (a.len(), &a) <= (b.len(), &b) { *c1 } else { *c2 };
            rooted_canonical(&adj, root, None)
        }
        _ => unreachable!("a tree has one or two centers"),
    };
    FreeTree { level_seq: seq }
}

/// Iterator over all free trees on `n` vertices, each isomorphism class
/// exactly once, in decreasing order of canonical level sequence.
#[derive(Clone, Debug)]
pub struct FreeTrees {
    layout: Option<Vec<u32>>,
    small: Option<Vec<u32>>,
}

impl FreeTrees {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "trees need at least one vertex");
        match n {
            1 => FreeTrees {
                layout: None,
                small: Some(vec![0]),
            },
            2 => FreeTrees {
                layout: None,
                small: Some(vec![0, 1]),
            },
            _ => {
                let layout = (0..=(n / 2) as u32).chain(1..((n + 1) / 2) as u32).collect();
                FreeTrees {
                    layout: Some(layout),
                    small: None,
                }
            }
        }
    }
}

impl Iterator for FreeTrees {
    type Item = FreeTree;

    fn next(&mut self) -> Option<FreeTree> {
        if let Some(seq) = self.small.take() {
            return Some(FreeTree { level_seq: seq });
        }
        let candidate = self.layout.take()?;
        let tree = next_tree(candidate);
        self.layout = next_rooted_tree(&tree, None);
        Some(FreeTree { level_seq: tree })
    }
}

/// All free trees on `n` vertices, collected.
pub fn gen_free_trees(n: usize) -> Vec<FreeTree> {
    FreeTrees::new(n).collect()
}

/// Successor in the rooted-tree (Beyer–Hedetniemi) order.
fn next_rooted_tree(pred: &[u32], p: Option<usize>) -> Option<Vec<u32>> {
    let p = match p {
        Some(p) => p,
        None => {
            let mut p = pred.len() - 1;
            while pred[p] == 1 {
                p -= 1;
            }
            p
        }
    };
    if p == 0 {
        return None;
    }
    let mut q = p - 1;
    while pred[q] != pred[p] - 1 {
        q -= 1;
    }
    let mut out = pred.to_vec();
    for i in p..out.len() {
        out[i] = out[i - p + q];
    }
    Some(out)
}

/// Splits a layout into the first subtree of the root (`left`, rebased to
/// level 0) and the root together with the remaining subtrees (`rest`).
fn split_tree(layout: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let m = layout
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &l)| l == 1)
        .nth(1)
        .map(|(i, _)| i)
        .unwrap_or(layout.len());
    let left = layout[1..m].iter().map(|l| l - 1).collect();
    let mut rest = vec![0];
    rest.extend_from_slice(&layout[m..]);
    (left, rest)
}

/// Returns `candidate` if it is center-rooted and canonical, otherwise the
/// next valid layout.
fn next_tree(candidate: Vec<u32>) -> Vec<u32> {
    let (left, rest) = split_tree(&candidate);
    let left_height = *left.iter().max().expect("left subtree is non-empty");
    let rest_height = *rest.iter().max().expect("rest is non-empty");
    let mut valid = rest_height >= left_height;
    if valid && rest_height == left_height {
        if left.len() > rest.len() || (left.len() == rest.len() && left > rest) {
            valid = false;
        }
    }
    if valid {
        return candidate;
    }
    let p = left.len();
    let mut next = next_rooted_tree(&candidate, Some(p)).expect("p > 0");
    if candidate[p] > 2 {
        let (new_left, _) = split_tree(&next);
        let h = *new_left.iter().max().expect("left subtree is non-empty");
        let len = next.len();
        let suffix_len = h as usize + 1;
        for (k, slot) in next[len - suffix_len..].iter_mut().enumerate() {
            *slot = k as u32 + 1;
        }
    }
    next
}
