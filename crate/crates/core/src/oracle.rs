//! Exponential-time ground truth for small instances.
//!
//! Vertex enumeration and adjacency here use plain linear algebra over the
//! rationals (solving and ranking constraint systems) and deliberately avoid
//! the tight-graph combinatorics of [`crate::tightspan`], so the two can be
//! checked against each other.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::{verify_realization, RealizationGraph};
use crate::instances::hanan_grid;
use crate::metric::{linf, FiniteMetric, TightPoint};
use crate::splits::PointSet2D;
use crate::tightspan;
use crate::Rational;

pub const DEFAULT_MAX_N: usize = 6;
pub const DEFAULT_MAX_EDGES: usize = 20;

/// Rank of a rational matrix by fraction-free-enough Gaussian elimination.
fn rank(mut rows: Vec<Vec<Rational>>, cols: usize) -> usize {
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        for i in (r + 1)..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let factor = &rows[i][c] / &rows[r][c];
            for k in c..cols {
                let delta = &factor * &rows[r][k];
                rows[i][k] -= delta;
            }
        }
        r += 1;
    }
    r
}

/// Unique solution of the square system `a * x = b`, if any.
fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        for i in 0..n {
            if i == c || a[i][c].is_zero() {
                continue;
            }
            let factor = &a[i][c] / &a[c][c];
            for k in c..n {
                let delta = &factor * &a[c][k];
                a[i][k] -= delta;
            }
            let delta = &factor * &b[c];
            b[i] -= delta;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn constraint_row(n: usize, x: usize, y: usize) -> Vec<Rational> {
    let mut row = vec![Rational::zero(); n];
    row[x] += Rational::one();
    row[y] += Rational::one();
    row
}

/// Constraint pairs `x <= y`, diagonal included.
fn constraint_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|x| (x..n).map(move |y| (x, y))).collect()
}

fn tight_rows(metric: &FiniteMetric, f: &TightPoint) -> Vec<Vec<Rational>> {
    let n = metric.len();
    constraint_pairs(n)
        .into_iter()
        .filter(|&(x, y)| &f[x] + &f[y] == *metric.dist(x, y))
        .map(|(x, y)| constraint_row(n, x, y))
        .collect()
}

/// Dimension of the smallest face of `P(D)` containing `f`, computed as the
/// corank of its tight constraints.
pub fn face_dim_by_rank(metric: &FiniteMetric, f: &TightPoint) -> Result<usize> {
    if let Some((x, y)) = tightspan::violated_constraint(metric, f)? {
        return Err(Error::NotInPolyhedron(metric.label(x).into(), metric.label(y).into()));
    }
    let n = metric.len();
    Ok(n - rank(tight_rows(metric, f), n))
}

/// Every vertex of `P(D)`, found by solving each square subsystem of the
/// constraints, sorted by coordinates.
pub fn enumerate_vertices(metric: &FiniteMetric, max_n: usize) -> Result<Vec<TightPoint>> {
    let n = metric.len();
    if n > max_n {
        return Err(Error::InstanceTooLarge { what: "ground set", size: n, bound: max_n });
    }
    let pairs = constraint_pairs(n);
    let mut found = BTreeSet::new();
    let mut chosen = Vec::with_capacity(n);
    choose(&pairs, n, 0, &mut chosen, &mut |subset| {
        let a = subset.iter().map(|&(x, y)| constraint_row(n, x, y)).collect();
        let b = subset.iter().map(|&(x, y)| metric.dist(x, y).clone()).collect();
        if let Some(sol) = solve(a, b) {
            let f = TightPoint::new(sol);
            if tightspan::in_polyhedron(metric, &f) {
                found.insert(f);
            }
        }
    });
    for f in &found {
        debug_assert!(tightspan::is_vertex(metric, f).unwrap_or(false));
        debug_assert!(tightspan::in_tight_span(metric, f));
    }
    Ok(found.into_iter().collect())
}

fn choose<F: FnMut(&[(usize, usize)])>(
    items: &[(usize, usize)],
    k: usize,
    from: usize,
    chosen: &mut Vec<(usize, usize)>,
    visit: &mut F,
) {
    if chosen.len() == k {
        visit(chosen);
        return;
    }
    let need = k - chosen.len();
    for i in from..=items.len().saturating_sub(need) {
        chosen.push(items[i]);
        choose(items, k, i + 1, chosen, visit);
        chosen.pop();
    }
}

/// Whether two vertices of `P(D)` span a bounded edge: the minimal face of
/// their midpoint is one-dimensional.
pub fn oracle_adjacent(metric: &FiniteMetric, f: &TightPoint, g: &TightPoint) -> Result<bool> {
    if face_dim_by_rank(metric, f)? != 0 || face_dim_by_rank(metric, g)? != 0 {
        return Err(Error::NotAVertex);
    }
    if f == g {
        return Ok(false);
    }
    Ok(face_dim_by_rank(metric, &f.midpoint(g)?)? == 1)
}

/// The full 1-skeleton of the tight span, with l-infinity edge lengths and
/// each element labeled at its Kuratowski point. Vertices are in coordinate
/// order and edges in lexicographic order of endpoint ids.
pub fn skeleton(metric: &FiniteMetric, max_n: usize) -> Result<RealizationGraph> {
    let vertices = enumerate_vertices(metric, max_n)?;
    let mut g = RealizationGraph::new(metric.labels().to_vec());
    for v in &vertices {
        g.add_vertex(v.clone());
    }
    for i in 0..vertices.len() {
        for j in (i + 1)..vertices.len() {
            if oracle_adjacent(metric, &vertices[i], &vertices[j])? {
                g.add_edge(i, j, linf(&vertices[i], &vertices[j]))?;
            }
        }
    }
    for x in 0..metric.len() {
        let id = g.vertex_id(&metric.kuratowski(x)).expect("Kuratowski points are vertices");
        g.set_label(x, id);
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubRealization {
    /// `keep[e]` for every edge of the input graph.
    pub keep: Vec<bool>,
    pub total_length: Rational,
}

impl SubRealization {
    pub fn edges(&self) -> Vec<usize> {
        (0..self.keep.len()).filter(|&e| self.keep[e]).collect()
    }
}

/// Minimum-length edge subset that still realizes `metric`, by exhaustive
/// branch and bound. Among optimal subsets the lexicographically smallest
/// list of edge ids is returned. Edges that lie on no shortest path between
/// labeled vertices are discarded up front and do not count against
/// `max_edges`.
pub fn min_subrealization(
    graph: &RealizationGraph,
    metric: &FiniteMetric,
    max_edges: usize,
) -> Result<SubRealization> {
    let report = verify_realization(graph, metric)?;
    if let Some(m) = report.mismatch {
        return Err(Error::NotARealization(format!(
            "d({}, {}) is {} in the graph but {} in the metric",
            m.x, m.y, m.graph_distance, m.expected
        )));
    }
    let weights = scaled_weights(graph)?;
    let terminals: Vec<usize> = graph.labeling().iter().map(|v| v.expect("verified")).collect();
    let mut search = SubsetSearch::new(graph, &terminals, weights);
    let useful = search.useful_edges();
    if useful.len() > max_edges {
        return Err(Error::InstanceTooLarge { what: "edges", size: useful.len(), bound: max_edges });
    }
    search.run(&useful);
    let keep = search.best_keep.expect("the whole graph is feasible");
    let total_length =
        graph.edges().iter().zip(&keep).filter(|(_, &k)| k).map(|(e, _)| &e.weight).sum();
    Ok(SubRealization { keep, total_length })
}

/// Minimum Manhattan network length, as the minimal subrealization of the
/// Hanan grid.
pub fn min_manhattan_length(points: &PointSet2D, max_edges: usize) -> Result<Rational> {
    let grid = hanan_grid(points)?;
    let metric = points.l1_metric()?;
    Ok(min_subrealization(&grid, &metric, max_edges)?.total_length)
}

/// Edge weights scaled to integers by the common denominator.
fn scaled_weights(graph: &RealizationGraph) -> Result<Vec<i128>> {
    let lcm = graph.edges().iter().fold(BigInt::one(), |acc, e| acc.lcm(e.weight.denom()));
    graph
        .edges()
        .iter()
        .map(|e| {
            (e.weight.numer() * (&lcm / e.weight.denom()))
                .to_i128()
                .filter(|w| *w < i128::MAX / (graph.edge_count() as i128 + 1))
                .ok_or(Error::InstanceTooLarge { what: "weight scale", size: 0, bound: 0 })
        })
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Choice {
    Open,
    Keep,
    Drop,
}

struct SubsetSearch<'a> {
    graph: &'a RealizationGraph,
    terminals: &'a [usize],
    weights: Vec<i128>,
    adjacency: Vec<Vec<(usize, usize)>>,
    /// Required terminal distances, from the full graph.
    target: Vec<Vec<i128>>,
    choice: Vec<Choice>,
    best: i128,
    best_keep: Option<Vec<bool>>,
}

impl<'a> SubsetSearch<'a> {
    fn new(graph: &'a RealizationGraph, terminals: &'a [usize], weights: Vec<i128>) -> Self {
        let all = vec![Choice::Keep; graph.edge_count()];
        let mut adjacency = vec![Vec::new(); graph.vertex_count()];
        for (i, e) in graph.edges().iter().enumerate() {
            adjacency[e.u].push((e.v, i));
            adjacency[e.v].push((e.u, i));
        }
        let mut s = SubsetSearch {
            graph,
            terminals,
            weights,
            adjacency,
            target: Vec::new(),
            choice: all,
            best: i128::MAX,
            best_keep: None,
        };
        s.target = terminals.iter().map(|&t| s.distances(t)).collect();
        s
    }

    fn distances(&self, source: usize) -> Vec<i128> {
        let n = self.graph.vertex_count();
        let mut dist = vec![i128::MAX; n];
        let mut heap = std::collections::BinaryHeap::new();
        dist[source] = 0;
        heap.push(std::cmp::Reverse((0i128, source)));
        while let Some(std::cmp::Reverse((d, v))) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for (w, e) in self.incident(v) {
                if self.choice[e] == Choice::Drop {
                    continue;
                }
                let cand = d + self.weights[e];
                if cand < dist[w] {
                    dist[w] = cand;
                    heap.push(std::cmp::Reverse((cand, w)));
                }
            }
        }
        dist
    }

    fn incident(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency[v].iter().copied()
    }

    /// Edges on some shortest path between two terminals.
    fn useful_edges(&mut self) -> Vec<usize> {
        let k = self.terminals.len();
        let mut useful = Vec::new();
        for (i, e) in self.graph.edges().iter().enumerate() {
            let w = self.weights[i];
            let on_path = (0..k).any(|a| {
                ((a + 1)..k).any(|b| {
                    let (da, db) = (&self.target[a], &self.target[b]);
                    let d = da[self.terminals[b]];
                    da[e.u] + w + db[e.v] == d || da[e.v] + w + db[e.u] == d
                })
            });
            if on_path {
                useful.push(i);
            } else {
                self.choice[i] = Choice::Drop;
            }
        }
        for &i in &useful {
            self.choice[i] = Choice::Open;
        }
        useful
    }

    /// Shortest-path distances from `source` over edges not dropped, with the
    /// number of shortest paths to each vertex (`None` once it overflows).
    fn distances_and_counts(&self, source: usize) -> (Vec<i128>, Vec<Option<u128>>) {
        let dist = self.distances(source);
        let mut order: Vec<usize> = (0..dist.len()).filter(|&v| dist[v] != i128::MAX).collect();
        order.sort_by_key(|&v| dist[v]);
        let mut count = vec![Some(0u128); dist.len()];
        count[source] = Some(1);
        for &v in order.iter().skip(1) {
            let mut c = Some(0u128);
            for (w, e) in self.incident(v) {
                if self.choice[e] != Choice::Drop && dist[w] != i128::MAX && dist[w] + self.weights[e] == dist[v] {
                    c = c.zip(count[w]).and_then(|(a, b)| a.checked_add(b));
                }
            }
            count[v] = c;
        }
        (dist, count)
    }

    /// `None` if keeping every undecided edge no longer realizes the metric;
    /// otherwise the undecided edges that lie on every shortest path of some
    /// terminal pair and so must be kept.
    fn forced_edges(&self) -> Option<Vec<usize>> {
        let k = self.terminals.len();
        let info: Vec<_> = self.terminals.iter().map(|&t| self.distances_and_counts(t)).collect();
        for a in 0..k {
            for &t in &self.terminals[a + 1..] {
                if info[a].0[t] != self.target[a][t] {
                    return None;
                }
            }
        }
        let mut forced = Vec::new();
        for (i, e) in self.graph.edges().iter().enumerate() {
            if self.choice[i] != Choice::Open {
                continue;
            }
            let w = self.weights[i];
            let on_all = (0..k).any(|a| {
                ((a + 1)..k).any(|b| {
                    let ((da, ca), (db, cb)) = (&info[a], &info[b]);
                    let d = self.target[a][self.terminals[b]];
                    let through = |p: usize, q: usize| {
                        (da[p] != i128::MAX && db[q] != i128::MAX && da[p] + w + db[q] == d)
                            .then(|| ca[p].zip(cb[q]).and_then(|(x, y)| x.checked_mul(y)))
                    };
                    match through(e.u, e.v).or_else(|| through(e.v, e.u)) {
                        Some(Some(c)) => ca[self.terminals[b]] == Some(c),
                        _ => false,
                    }
                })
            });
            if on_all {
                forced.push(i);
            }
        }
        Some(forced)
    }

    fn kept_weight(&self) -> i128 {
        (0..self.choice.len()).filter(|&e| self.choice[e] == Choice::Keep).map(|e| self.weights[e]).sum()
    }

    /// Branches on `useful` heaviest first, trying to drop each edge before
    /// keeping it.
    fn run(&mut self, useful: &[usize]) {
        let mut order = useful.to_vec();
        order.sort_by_key(|&e| (std::cmp::Reverse(self.weights[e]), e));
        self.branch(&order, 0);
    }

    fn record(&mut self, kept: i128) {
        let keep: Vec<bool> = self.choice.iter().map(|&c| c == Choice::Keep).collect();
        let better = kept < self.best || self.best_keep.as_ref().is_some_and(|b| lex_smaller(&keep, b));
        if better {
            self.best = kept;
            self.best_keep = Some(keep);
        }
    }

    fn branch(&mut self, order: &[usize], at: usize) {
        let Some(forced) = self.forced_edges() else { return };
        for &e in &forced {
            self.choice[e] = Choice::Keep;
        }
        let kept = self.kept_weight();
        let next = (at..order.len()).find(|&i| self.choice[order[i]] == Choice::Open);
        if kept > self.best {
            // pruned
        } else if let Some(i) = next {
            if kept == self.best {
                // only the completion that drops everything left can tie
                let open: Vec<usize> = order[i..].iter().copied().filter(|&e| self.choice[e] == Choice::Open).collect();
                for &e in &open {
                    self.choice[e] = Choice::Drop;
                }
                if self.forced_edges().is_some() {
                    self.record(kept);
                }
                for &e in &open {
                    self.choice[e] = Choice::Open;
                }
            } else {
                let e = order[i];
                self.choice[e] = Choice::Drop;
                self.branch(order, i + 1);
                self.choice[e] = Choice::Keep;
                self.branch(order, i + 1);
                self.choice[e] = Choice::Open;
            }
        } else {
            self.record(kept);
        }
        for &e in &forced {
            self.choice[e] = Choice::Open;
        }
    }
}

/// Compares kept-edge id lists lexicographically.
fn lex_smaller(a: &[bool], b: &[bool]) -> bool {
    let ia = (0..a.len()).filter(|&i| a[i]);
    let ib = (0..b.len()).filter(|&i| b[i]);
    ia.lt(ib)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::tests::{int_metric, metric_345};
    use crate::{rat, ratio};

    fn square() -> FiniteMetric {
        int_metric(
            &["a", "b", "c", "d"],
            &[&[0, 1, 2, 1], &[1, 0, 1, 2], &[2, 1, 0, 1], &[1, 2, 1, 0]],
        )
    }

    #[test]
    fn linear_algebra_helpers() {
        let a = vec![vec![rat(2), rat(0)], vec![rat(1), rat(1)]];
        assert_eq!(solve(a.clone(), vec![rat(3), rat(4)]).unwrap(), vec![ratio(3, 2), ratio(5, 2)]);
        assert_eq!(rank(a, 2), 2);
        let singular = vec![vec![rat(1), rat(1)], vec![rat(2), rat(2)]];
        assert!(solve(singular.clone(), vec![rat(1), rat(2)]).is_none());
        assert_eq!(rank(singular, 2), 1);
    }

    #[test]
    fn vertices_of_small_metrics() {
        let two = int_metric(&["a", "b"], &[&[0, 3], &[3, 0]]);
        assert_eq!(enumerate_vertices(&two, 6).unwrap(), vec![two.kuratowski(0), two.kuratowski(1)]);

        let d = metric_345();
        let mut want = vec![
            d.kuratowski(0),
            d.kuratowski(1),
            d.kuratowski(2),
            TightPoint::from_integers(&[1, 2, 3]),
        ];
        want.sort();
        assert_eq!(enumerate_vertices(&d, 6).unwrap(), want);

        let d = square();
        let mut want: Vec<_> = (0..4).map(|x| d.kuratowski(x)).collect();
        want.sort();
        assert_eq!(enumerate_vertices(&d, 6).unwrap(), want);
        assert!(matches!(enumerate_vertices(&d, 3), Err(Error::InstanceTooLarge { .. })));
    }

    #[test]
    fn adjacency_examples() {
        let two = int_metric(&["a", "b"], &[&[0, 3], &[3, 0]]);
        assert!(oracle_adjacent(&two, &two.kuratowski(0), &two.kuratowski(1)).unwrap());

        let d = square();
        assert!(!oracle_adjacent(&d, &d.kuratowski(0), &d.kuratowski(2)).unwrap());
        assert!(oracle_adjacent(&d, &d.kuratowski(0), &d.kuratowski(1)).unwrap());
        let centre = d.kuratowski(0).midpoint(&d.kuratowski(2)).unwrap();
        assert_eq!(face_dim_by_rank(&d, &centre).unwrap(), 2);

        let d = metric_345();
        let m = TightPoint::from_integers(&[1, 2, 3]);
        assert!(oracle_adjacent(&d, &d.kuratowski(0), &m).unwrap());
        assert!(!oracle_adjacent(&d, &d.kuratowski(0), &d.kuratowski(1)).unwrap());
        assert_eq!(
            oracle_adjacent(&d, &d.kuratowski(0), &TightPoint::from_integers(&[2, 3, 4])).unwrap_err(),
            Error::NotAVertex
        );
    }

    #[test]
    fn skeleton_of_square_is_the_cycle() {
        let d = square();
        let g = skeleton(&d, 6).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 4));
        assert_eq!(g.total_length(), rat(4));
    }

    #[test]
    fn subrealization_of_tripod_keeps_everything() {
        let d = metric_345();
        let g = skeleton(&d, 6).unwrap();
        let s = min_subrealization(&g, &d, 20).unwrap();
        assert_eq!(s.total_length, rat(6));
        assert_eq!(s.edges().len(), 3);
    }

    #[test]
    fn subrealization_drops_redundant_edges() {
        // triangle a-b-c plus a redundant long chord a-c through an extra vertex
        let d = int_metric(&["a", "b", "c"], &[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]);
        let mut g = RealizationGraph::with_kuratowski_points(&d);
        g.add_edge(0, 1, rat(1)).unwrap();
        g.add_edge(1, 2, rat(1)).unwrap();
        g.add_edge(0, 2, rat(2)).unwrap();
        let s = min_subrealization(&g, &d, 20).unwrap();
        assert_eq!(s.total_length, rat(2));
        assert_eq!(s.edges(), vec![0, 1]);

        let mut bad = RealizationGraph::with_kuratowski_points(&d);
        bad.add_edge(0, 1, rat(1)).unwrap();
        bad.add_edge(1, 2, rat(2)).unwrap();
        assert!(matches!(min_subrealization(&bad, &d, 20), Err(Error::NotARealization(_))));
    }

    #[test]
    fn lexicographically_smallest_optimum() {
        // two parallel paths a-u-b and a-v-b of equal length: either is optimal
        let d = int_metric(&["a", "b"], &[&[0, 2], &[2, 0]]);
        let mut g = RealizationGraph::with_kuratowski_points(&d);
        let u = g.push_vertex(TightPoint::from_integers(&[1, 1]));
        let v = g.push_vertex(TightPoint::from_integers(&[1, 1]));
        g.add_edge(0, v, rat(1)).unwrap();
        g.add_edge(v, 1, rat(1)).unwrap();
        g.add_edge(0, u, rat(1)).unwrap();
        g.add_edge(u, 1, rat(1)).unwrap();
        let s = min_subrealization(&g, &d, 20).unwrap();
        assert_eq!(s.edges(), vec![0, 1]);
    }

    #[test]
    fn manhattan_examples() {
        let l = PointSet2D::from_integers(&[(0, 0), (2, 0), (0, 1)]).unwrap();
        assert_eq!(min_manhattan_length(&l, 20).unwrap(), rat(3));
        let rect = PointSet2D::from_integers(&[(0, 0), (4, 0), (4, 3), (0, 3)]).unwrap();
        assert_eq!(min_manhattan_length(&rect, 20).unwrap(), rat(14));
        let two = PointSet2D::from_integers(&[(0, 0), (3, 5)]).unwrap();
        assert_eq!(min_manhattan_length(&two, 20).unwrap(), rat(8));
    }
}
