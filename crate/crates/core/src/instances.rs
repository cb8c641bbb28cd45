//! Seeded generators for the benchmark instance families and the Hanan grid.
//!
//! Every generator draws from a `ChaCha8Rng` seeded with the given 64-bit
//! seed, so the same seed and parameters always reproduce the same instance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{self, Mask};
use crate::error::{Error, Result};
use crate::graph::RealizationGraph;
use crate::metric::{FiniteMetric, TightPoint};
use crate::splits::{
    compatible, induced_metric, is_two_compatible, l1, PointSet2D, Split, WeightedSplitSystem,
};
use crate::{rat, Rational};

pub const GRID_SIZE: i64 = 1_000_000;
pub const MAX_EDGE_LENGTH: i64 = 1_000_000;
pub const RANDOM_METRIC_MIN: i64 = 1_000_000;
pub const RANDOM_METRIC_MAX: i64 = 2_000_000;
/// Consecutive rejected candidate splits before a system is abandoned.
pub const SPLIT_REJECTION_LIMIT: usize = 10_000;
/// Whole split systems attempted before giving up.
pub const SPLIT_SYSTEM_ATTEMPTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

fn check_size(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::TooFewLabels { min, got: n });
    }
    if n > crate::MAX_LABELS {
        return Err(Error::TooManyLabels(n));
    }
    Ok(())
}

/// `n` distinct integer points drawn uniformly from `[0, 10^6]^2`; repeated
/// draws are resampled.
pub fn gen_l1_points(n: usize, seed: Seed) -> Result<PointSet2D> {
    check_size(n, 2)?;
    let mut rng = seed.rng();
    let mut seen = std::collections::HashSet::new();
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let p = (rng.gen_range(0..=GRID_SIZE), rng.gen_range(0..=GRID_SIZE));
        if seen.insert(p) {
            points.push(p);
        }
    }
    PointSet2D::from_integers(&points)
}

/// An edge-weighted binary tree whose first `leaves` nodes are the leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedTree {
    leaves: usize,
    nodes: usize,
    edges: Vec<(usize, usize, i64)>,
}

impl WeightedTree {
    pub fn leaves(&self) -> usize {
        self.leaves
    }

    pub fn edges(&self) -> &[(usize, usize, i64)] {
        &self.edges
    }

    pub fn total_length(&self) -> Rational {
        rat(self.edges.iter().map(|e| e.2).sum())
    }

    /// Leaf-to-leaf path lengths.
    pub fn leaf_distances(&self) -> Vec<Vec<Rational>> {
        let mut adj = vec![Vec::new(); self.nodes];
        for &(u, v, w) in &self.edges {
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        (0..self.leaves)
            .map(|s| {
                let mut dist = vec![-1i64; self.nodes];
                dist[s] = 0;
                let mut stack = vec![s];
                while let Some(v) = stack.pop() {
                    for &(w, len) in &adj[v] {
                        if dist[w] < 0 {
                            dist[w] = dist[v] + len;
                            stack.push(w);
                        }
                    }
                }
                dist[..self.leaves].iter().map(|&d| rat(d)).collect()
            })
            .collect()
    }

    pub fn metric(&self) -> Result<FiniteMetric> {
        FiniteMetric::new(labels(self.leaves), self.leaf_distances())
    }
}

/// Random leaf-labeled binary tree: leaves are attached one at a time by
/// subdividing a uniformly chosen edge. Edge lengths are uniform in
/// `[1, max_length]`.
pub fn random_binary_tree<R: Rng>(n: usize, max_length: i64, rng: &mut R) -> WeightedTree {
    assert!(n >= 2, "a tree needs two leaves");
    let mut topology: Vec<(usize, usize)> = Vec::new();
    let mut nodes = n;
    if n == 2 {
        topology.push((0, 1));
    } else {
        let hub = nodes;
        nodes += 1;
        topology.extend([(0, hub), (1, hub), (2, hub)]);
        for leaf in 3..n {
            let e = rng.gen_range(0..topology.len());
            let (u, v) = topology[e];
            let mid = nodes;
            nodes += 1;
            topology[e] = (u, mid);
            topology.push((mid, v));
            topology.push((leaf, mid));
        }
    }
    let edges = topology
        .into_iter()
        .map(|(u, v)| (u, v, rng.gen_range(1..=max_length)))
        .collect();
    WeightedTree { leaves: n, nodes, edges }
}

/// Sum of the path metrics of two independent random binary trees on the
/// same leaves.
pub fn gen_double_tree_metric(n: usize, seed: Seed) -> Result<FiniteMetric> {
    check_size(n, 3)?;
    let (first, second) = gen_double_tree_parts(n, seed)?;
    let a = first.leaf_distances();
    let b = second.leaf_distances();
    let sum = a
        .iter()
        .zip(&b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect();
    FiniteMetric::new(labels(n), sum)
}

/// The two summand trees behind [`gen_double_tree_metric`].
pub fn gen_double_tree_parts(n: usize, seed: Seed) -> Result<(WeightedTree, WeightedTree)> {
    check_size(n, 3)?;
    let mut rng = seed.rng();
    let first = random_binary_tree(n, MAX_EDGE_LENGTH, &mut rng);
    let second = random_binary_tree(n, MAX_EDGE_LENGTH, &mut rng);
    Ok((first, second))
}

/// `2n` random splits accepted one by one while the system stays
/// two-compatible, with weights uniform in `[1, 10^6]`. Systems that stall or
/// fail to separate every pair are regenerated.
pub fn gen_two_compatible_system(n: usize, seed: Seed) -> Result<WeightedSplitSystem> {
    check_size(n, 2)?;
    let mut rng = seed.rng();
    for _ in 0..SPLIT_SYSTEM_ATTEMPTS {
        if let Some(system) = try_two_compatible_system(n, &mut rng) {
            if induced_metric(&system).is_ok() {
                return Ok(system);
            }
        }
    }
    Err(Error::GenerationStall(SPLIT_REJECTION_LIMIT))
}

fn try_two_compatible_system<R: Rng>(n: usize, rng: &mut R) -> Option<WeightedSplitSystem> {
    let mut system = WeightedSplitSystem::new(labels(n));
    let mut accepted: Vec<Split> = Vec::with_capacity(2 * n);
    let mut rejected = 0;
    while accepted.len() < 2 * n {
        if rejected >= SPLIT_REJECTION_LIMIT {
            return None;
        }
        let side: Mask = (0..n).filter(|_| rng.gen_bool(0.5)).fold(0, |m, i| m | bits::single(i));
        let weight = rat(rng.gen_range(1..=MAX_EDGE_LENGTH));
        let Some(split) = Split::from_mask(n, side) else {
            rejected += 1;
            continue;
        };
        if system.contains(&split) {
            rejected += 1;
            continue;
        }
        // the new split closes a triangle of pairwise incompatible splits
        // iff two splits it is incompatible with are incompatible themselves
        let clashing: Vec<&Split> =
            accepted.iter().filter(|t| !compatible(&split, t).expect("same ground set")).collect();
        let closes_triangle = clashing.iter().enumerate().any(|(i, a)| {
            clashing[i + 1..].iter().any(|b| !compatible(a, b).expect("same ground set"))
        });
        if closes_triangle {
            rejected += 1;
            continue;
        }
        system.insert(split, weight).expect("fresh split with positive weight");
        accepted.push(split);
        rejected = 0;
    }
    debug_assert!(is_two_compatible(&system));
    Some(system)
}

/// Off-diagonal distances uniform in `[10^6, 2 * 10^6]`; every triangle holds
/// because the largest entry is at most twice the smallest.
pub fn gen_random_metric(n: usize, seed: Seed) -> Result<FiniteMetric> {
    check_size(n, 2)?;
    let mut rng = seed.rng();
    let mut m = vec![vec![rat(0); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = rat(rng.gen_range(RANDOM_METRIC_MIN..=RANDOM_METRIC_MAX));
            m[i][j] = d.clone();
            m[j][i] = d;
        }
    }
    FiniteMetric::new(labels(n), m)
}

/// Shortest-path metric of a cycle with the given edge weights, in cycle order.
pub fn cycle_metric(weights: &[i64]) -> Result<FiniteMetric> {
    let n = weights.len();
    check_size(n, 3)?;
    let total: i64 = weights.iter().sum();
    let mut m = vec![vec![rat(0); n]; n];
    for i in 0..n {
        let mut along = 0;
        for step in 1..n {
            along += weights[(i + step - 1) % n];
            let j = (i + step) % n;
            m[i][j] = rat(along.min(total - along));
        }
    }
    FiniteMetric::new(labels(n), m)
}

/// Integer cycle weights in `[1, max_weight]` such that every edge is the
/// unique shortest path between its endpoints (each weight is below half the
/// total), so that the cycle realizes its own metric.
pub fn random_cycle_weights<R: Rng>(n: usize, max_weight: i64, rng: &mut R) -> Vec<i64> {
    loop {
        let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=max_weight)).collect();
        let total: i64 = w.iter().sum();
        if w.iter().all(|&x| 2 * x < total) {
            return w;
        }
    }
}

/// Fewest vertices found in a half-open half of the cycle with edge weights
/// `weights`, over all ways of cutting the cycle in half. When this is below
/// two, some vertex sits alone on one side of a diameter and the metric can
/// be realized more cheaply than by the cycle itself (a pendant edge replaces
/// two antipodal stretches of the cycle).
pub fn min_vertices_per_half_cycle(weights: &[i64]) -> usize {
    let n = weights.len();
    let total: i64 = weights.iter().sum();
    // doubled positions, so the half length is an integer
    let pos: Vec<i64> = std::iter::once(0).chain(weights[..n - 1].iter().scan(0, |s, w| {
        *s += 2 * w;
        Some(*s)
    })).collect();
    let starts = pos.iter().flat_map(|&p| [p, (p + total) % (2 * total)]);
    starts
        .flat_map(|s| [s, s + 1])
        .map(|t| {
            let inside = pos.iter().filter(|&&p| (p - t).rem_euclid(2 * total) < total).count();
            inside.min(n - inside)
        })
        .min()
        .unwrap_or(0)
}

/// Integer cycle weights in `[1, max_weight]` with at least two vertices in
/// every half of the cycle. For `n = 4` this forces opposite edges to be
/// equal, so that case is drawn directly as a rectangle.
pub fn random_tight_cycle_weights<R: Rng>(n: usize, max_weight: i64, rng: &mut R) -> Result<Vec<i64>> {
    check_size(n, 4)?;
    if n == 4 {
        let (a, b) = (rng.gen_range(1..=max_weight), rng.gen_range(1..=max_weight));
        return Ok(vec![a, b, a, b]);
    }
    for _ in 0..SPLIT_REJECTION_LIMIT {
        let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=max_weight)).collect();
        if min_vertices_per_half_cycle(&w) >= 2 {
            return Ok(w);
        }
    }
    Err(Error::GenerationStall(SPLIT_REJECTION_LIMIT))
}

/// The grid graph on all pairs of occurring x- and y-coordinates with edges
/// between grid neighbours. Grid vertices carry their l1 distance vectors to
/// the input points as coordinates; two grid vertices may share a vector, so
/// they are kept apart by id rather than merged.
pub fn hanan_grid(points: &PointSet2D) -> Result<RealizationGraph> {
    let n = points.len();
    check_size(n, 2)?;
    let mut xs: Vec<&Rational> = points.points().iter().map(|p| &p.0).collect();
    let mut ys: Vec<&Rational> = points.points().iter().map(|p| &p.1).collect();
    xs.sort();
    xs.dedup();
    ys.sort();
    ys.dedup();

    let mut g = RealizationGraph::new(points.labels());
    let mut id = vec![vec![0; ys.len()]; xs.len()];
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            let q = ((*x).clone(), (*y).clone());
            let coords = points.points().iter().map(|p| l1(&q, p)).collect();
            id[i][j] = g.push_vertex(TightPoint::new(coords));
        }
    }
    for i in 0..xs.len() {
        for j in 0..ys.len() {
            if i + 1 < xs.len() {
                g.add_edge(id[i][j], id[i + 1][j], xs[i + 1] - xs[i])?;
            }
            if j + 1 < ys.len() {
                g.add_edge(id[i][j], id[i][j + 1], ys[j + 1] - ys[j])?;
            }
        }
    }
    for (k, p) in points.points().iter().enumerate() {
        let i = xs.binary_search(&&p.0).expect("coordinate present");
        let j = ys.binary_search(&&p.1).expect("coordinate present");
        g.set_label(k, id[i][j]);
    }
    Ok(g)
}
