//! Simple undirected graphs with the degree- and distance-based indices.

use num_bigint::BigUint;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TreeLabError;

/// Undirected simple graph on vertices `0..n`, adjacency stored as bitsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
    edges: Vec<(usize, usize)>,
    degrees: Vec<usize>,
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        SimpleGraph {
            n,
            words,
            adj: vec![0; n * words],
            edges: Vec::new(),
            degrees: vec![0; n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, TreeLabError> {
        let mut g = SimpleGraph::empty(n);
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<(), TreeLabError> {
        if a >= self.n || b >= self.n {
            return Err(TreeLabError::VertexOutOfRange(a.max(b)));
        }
        if a == b {
            return Err(TreeLabError::Loop(a));
        }
        if self.has_edge(a, b) {
            return Err(TreeLabError::MultiEdge(a, b));
        }
        self.adj[a * self.words + b / 64] |= 1 << (b % 64);
        self.adj[b * self.words + a / 64] |= 1 << (a % 64);
        self.edges.push((a.min(b), a.max(b)));
        self.degrees[a] += 1;
        self.degrees[b] += 1;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.words..(v + 1) * self.words]
    }

    /// Number of vertices at each distance from `src` (index 0 is `src`
    /// itself); unreachable vertices are not counted.
    pub fn distance_profile(&self, src: usize) -> Vec<usize> {
        let w = self.words;
        let mut seen = vec![0u64; w];
        let mut frontier = vec![0u64; w];
        seen[src / 64] |= 1 << (src % 64);
        frontier[src / 64] |= 1 << (src % 64);
        let mut profile = vec![1];
        loop {
            let mut next = vec![0u64; w];
            for (wi, &word) in frontier.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let v = wi * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    for (nw, &r) in next.iter_mut().zip(self.row(v)) {
                        *nw |= r;
                    }
                }
            }
            let mut count = 0;
            for (nw, s) in next.iter_mut().zip(seen.iter_mut()) {
                *nw &= !*s;
                *s |= *nw;
                count += nw.count_ones() as usize;
            }
            if count == 0 {
                return profile;
            }
            profile.push(count);
            frontier = next;
        }
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.distance_profile(0).iter().sum::<usize>() == self.n
    }

    /// Largest eccentricity; `None` if disconnected.
    pub fn diameter(&self) -> Option<usize> {
        let mut best = 0;
        for v in 0..self.n {
            let prof = self.distance_profile(v);
            if prof.iter().sum::<usize>() != self.n {
                return None;
            }
            best = best.max(prof.len() - 1);
        }
        Some(best)
    }
}

/// General Randić index `Σ_{uv ∈ E} (d_u d_v)^α`.
///
/// At `α = −½` each term is evaluated as `1/√(d_u d_v)`, the same expression
/// [`randic`] uses, so the two agree bit for bit.
pub fn general_randic(g: &SimpleGraph, alpha: f64) -> f64 {
    let d = g.degrees();
    g.edges()
        .iter()
        .map(|&(a, b)| edge_weight(d[a] * d[b], alpha))
        .sum()
}

/// Randić index `Σ_{uv ∈ E} 1/√(d_u d_v)`; zero for an edgeless graph.
pub fn randic(g: &SimpleGraph) -> f64 {
    general_randic(g, -0.5)
}

/// `(product)^α`, with the `α = −½` case routed through `sqrt`.
pub fn edge_weight(product: usize, alpha: f64) -> f64 {
    if alpha == -0.5 {
        1.0 / (product as f64).sqrt()
    } else {
        (product as f64).powf(alpha)
    }
}

/// Wiener index: sum of distances over unordered vertex pairs.
pub fn wiener(g: &SimpleGraph) -> Result<u64, TreeLabError> {
    if g.n() < 2 {
        return Err(TreeLabError::TooSmall(g.n()));
    }
    let mut total = 0u64;
    for v in 0..g.n() {
        let prof = g.distance_profile(v);
        if prof.iter().sum::<usize>() != g.n() {
            return Err(TreeLabError::Disconnected);
        }
        total += prof
            .iter()
            .enumerate()
            .map(|(dist, &c)| (dist * c) as u64)
            .sum::<u64>();
    }
    Ok(total / 2)
}

/// Average distance `W / C(n, 2)` as an exact fraction.
pub fn avg_distance(g: &SimpleGraph) -> Result<Ratio<u64>, TreeLabError> {
    let w = wiener(g)?;
    let pairs = (g.n() * (g.n() - 1) / 2) as u64;
    Ok(Ratio::new(w, pairs))
}

/// Erdős–Rényi sample: each of the `C(n,2)` pairs independently with
/// probability `p`, from a ChaCha8 stream seeded with `seed`.
pub fn gnp_sample(n: usize, p: f64, seed: u64) -> Result<SimpleGraph, TreeLabError> {
    gnp_sample_with(n, p, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// [`gnp_sample`] drawing from a caller-supplied generator. Pairs are visited
/// in lexicographic order, one uniform draw each.
pub fn gnp_sample_with<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<SimpleGraph, TreeLabError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(TreeLabError::BadProbability(p));
    }
    let mut g = SimpleGraph::empty(n);
    for a in 0..n {
        for b in a + 1..n {
            if rng.random::<f64>() < p {
                g.add_edge(a, b).expect("fresh pair");
            }
        }
    }
    Ok(g)
}

/// `⌊10^digits / √m⌋` computed exactly.
pub fn scaled_inv_sqrt(m: u64, digits: u32) -> BigUint {
    let scale = BigUint::from(10u8).pow(2 * digits);
    (scale / BigUint::from(m)).sqrt()
}
