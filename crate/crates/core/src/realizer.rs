//! Geodesic simplex-stepping heuristic for realizations inside the tight span.
//!
//! Pairs are processed by increasing distance. For each pair `{x, y}` the
//! partial graph is first searched for a vertex on an l-infinity geodesic
//! from the current point towards `k_y` that is already reachable at exact
//! l-infinity distance; from there the walk continues one tight-span edge at
//! a time until `k_y` is reached. Every vertex added is a vertex of the tight
//! span and every edge an edge of its 1-skeleton.

use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graph::RealizationGraph;
use crate::metric::{linf, FiniteMetric, TightPoint};
use crate::tightspan::adjacent_vertices;
use crate::Rational;

/// Builds a realization of `metric` as a subgraph of the tight-span 1-skeleton.
pub fn realize(metric: &FiniteMetric) -> Result<RealizationGraph> {
    realize_traced(metric).map(|(g, _)| g)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairTrace {
    pub pair: (usize, usize),
    pub edges_added: usize,
    pub steps: usize,
}

/// [`realize`], also reporting how many edges each pair contributed.
pub fn realize_traced(metric: &FiniteMetric) -> Result<(RealizationGraph, Vec<PairTrace>)> {
    let mut graph = RealizationGraph::with_kuratowski_points(metric);
    let mut trace = Vec::new();
    for (x, y) in metric.pair_schedule() {
        let before = graph.edge_count();
        let steps = find_path(metric, &metric.kuratowski(x), y, &mut graph)?;
        trace.push(PairTrace { pair: (x, y), edges_added: graph.edge_count() - before, steps });
    }
    Ok((graph, trace))
}

/// Extends `graph` so that it holds a path from `start` to `k_target` of
/// length `D_inf(start, k_target)`. Returns the number of simplex steps taken.
pub fn find_path(
    metric: &FiniteMetric,
    start: &TightPoint,
    target: usize,
    graph: &mut RealizationGraph,
) -> Result<usize> {
    let goal = metric.kuratowski(target);
    let mut u = start.clone();
    let mut steps = 0;
    loop {
        let v_id = match graph.vertex_id(&u) {
            Some(u_id) => furthest_reusable(graph, u_id, &goal),
            None => graph.add_vertex(u.clone()),
        };
        let v = graph.vertex(v_id).clone();
        if v == goal {
            return Ok(steps);
        }
        let w = simplex_step(metric, &v, target)?;
        debug_assert!(linf(&w, &goal) < linf(&v, &goal));
        let length = linf(&v, &w);
        let w_id = graph.add_vertex(w.clone());
        graph.add_edge(v_id, w_id, length)?;
        steps += 1;
        u = w;
    }
}

/// Among vertices reachable from `u` at graph distance equal to their
/// l-infinity distance and lying on a geodesic from `u` to `goal`, the one
/// closest to `goal` (ties: smallest coordinates).
///
/// Edge weights are l-infinity distances, so every vertex on a shortest path
/// from `u` to such a vertex qualifies as well. The set is therefore the
/// closure of `u` under edges `{a, b}` with `D_inf(u, b) = D_inf(u, a) + w`
/// and `b` on a geodesic, and only that region is searched.
fn furthest_reusable(graph: &RealizationGraph, u: usize, goal: &TightPoint) -> usize {
    let from = graph.vertex(u);
    let total = linf(from, goal);
    let mut along = HashMap::from([(u, Rational::zero())]);
    let mut stack = vec![u];
    let mut best = (total.clone(), u);
    while let Some(a) = stack.pop() {
        let base = along[&a].clone();
        for (b, w) in graph.neighbors(a) {
            if along.contains_key(&b) {
                continue;
            }
            let p = graph.vertex(b);
            let dist = linf(from, p);
            if dist != &base + w {
                continue;
            }
            let rest = linf(p, goal);
            if &dist + &rest != total {
                continue;
            }
            if rest < best.0 || (rest == best.0 && p < graph.vertex(best.1)) {
                best = (rest, b);
            }
            along.insert(b, dist);
            stack.push(b);
        }
    }
    best.1
}

/// One step from the tight-span vertex `v` to an adjacent vertex on a
/// geodesic towards `k_target`, as close to the target as possible (ties:
/// lexicographically smallest coordinates).
pub fn simplex_step(metric: &FiniteMetric, v: &TightPoint, target: usize) -> Result<TightPoint> {
    let goal = metric.kuratowski(target);
    let failure = || Error::StepFailure { vertex: v.to_string(), target: metric.label(target).to_string() };
    if *v == goal {
        return Err(failure());
    }
    let remaining = linf(v, &goal);
    adjacent_vertices(metric, v)?
        .into_iter()
        .filter_map(|w| {
            let rest = linf(&w.point, &goal);
            (&w.length + &rest == remaining).then_some((rest, w.point))
        })
        .min()
        .map(|(_, p)| p)
        .ok_or_else(failure)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Baselines {
    /// Length of a minimal subrealization of the full 1-skeleton.
    pub min_subrealization: Option<Rational>,
    /// Total length of the full 1-skeleton.
    pub skeleton_length: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatsReport {
    pub vertices: usize,
    pub edges: usize,
    pub total_length: Rational,
    pub r_sg: Option<Rational>,
    pub r_ts: Option<Rational>,
}

pub fn stats(graph: &RealizationGraph, _metric: &FiniteMetric, baselines: &Baselines) -> StatsReport {
    let total = graph.total_length();
    StatsReport {
        vertices: graph.vertex_count(),
        edges: graph.edge_count(),
        r_sg: baselines.min_subrealization.as_ref().map(|b| &total / b),
        r_ts: baselines.skeleton_length.as_ref().map(|b| &total / b),
        total_length: total,
    }
}
