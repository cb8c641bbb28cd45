//! Weighted, labeled graphs with vertices keyed by exact coordinates, and the
//! exact realization check.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::metric::{FiniteMetric, TightPoint};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    /// Smaller endpoint id.
    pub u: usize,
    pub v: usize,
    pub weight: Rational,
}

/// A connected weighted graph with a labeling of ground-set elements to
/// vertices. Vertex ids are assigned in insertion order and are stable.
#[derive(Debug, Clone, Default)]
pub struct RealizationGraph {
    labels: Vec<String>,
    vertices: Vec<TightPoint>,
    index: HashMap<TightPoint, usize>,
    edges: Vec<Edge>,
    edge_index: HashMap<(usize, usize), usize>,
    adjacency: Vec<Vec<(usize, usize)>>,
    labeling: Vec<Option<usize>>,
}

impl RealizationGraph {
    pub fn new(labels: Vec<String>) -> Self {
        let n = labels.len();
        RealizationGraph { labels, labeling: vec![None; n], ..Default::default() }
    }

    /// The edgeless graph on the Kuratowski points, each labeled by its element.
    pub fn with_kuratowski_points(metric: &FiniteMetric) -> Self {
        let mut g = RealizationGraph::new(metric.labels().to_vec());
        for x in 0..metric.len() {
            let id = g.add_vertex(metric.kuratowski(x));
            g.labeling[x] = Some(id);
        }
        g
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Inserts `p` unless an equal point is present; returns its id either way.
    pub fn add_vertex(&mut self, p: TightPoint) -> usize {
        if let Some(&id) = self.index.get(&p) {
            return id;
        }
        let id = self.vertices.len();
        self.index.insert(p.clone(), id);
        self.vertices.push(p);
        self.adjacency.push(Vec::new());
        id
    }

    /// Inserts `p` as a new vertex even if an equal point is present. Lookups
    /// by coordinates keep resolving to the first copy.
    pub fn push_vertex(&mut self, p: TightPoint) -> usize {
        let id = self.vertices.len();
        self.index.entry(p.clone()).or_insert(id);
        self.vertices.push(p);
        self.adjacency.push(Vec::new());
        id
    }

    pub fn vertex_id(&self, p: &TightPoint) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn vertex(&self, id: usize) -> &TightPoint {
        &self.vertices[id]
    }

    pub fn vertices(&self) -> &[TightPoint] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, id: usize) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        self.adjacency[id].iter().map(move |&(w, e)| (w, &self.edges[e].weight))
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_index.contains_key(&(a.min(b), a.max(b)))
    }

    /// Adds the undirected edge `{a, b}`; an existing edge is left untouched.
    /// Returns the edge id.
    pub fn add_edge(&mut self, a: usize, b: usize, weight: Rational) -> Result<usize> {
        if !weight.is_positive() || a == b {
            return Err(Error::NonPositiveWeight(weight.to_string()));
        }
        let key = (a.min(b), a.max(b));
        if let Some(&e) = self.edge_index.get(&key) {
            return Ok(e);
        }
        let e = self.edges.len();
        self.edges.push(Edge { u: key.0, v: key.1, weight });
        self.edge_index.insert(key, e);
        self.adjacency[a].push((b, e));
        self.adjacency[b].push((a, e));
        Ok(e)
    }

    pub fn set_label(&mut self, element: usize, vertex: usize) {
        self.labeling[element] = Some(vertex);
    }

    pub fn labeling(&self) -> &[Option<usize>] {
        &self.labeling
    }

    pub fn label_vertex(&self, element: usize) -> Option<usize> {
        self.labeling[element]
    }

    pub fn total_length(&self) -> Rational {
        self.edges.iter().map(|e| &e.weight).sum()
    }

    /// Exact single-source shortest path distances (`None` = unreachable).
    pub fn distances_from(&self, source: usize) -> Vec<Option<Rational>> {
        dijkstra(self.vertices.len(), source, |v| {
            self.adjacency[v].iter().map(|&(w, e)| (w, &self.edges[e].weight))
        })
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(w, _) in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Subgraph on the edges with `keep[e]`, restricted to vertices that are
    /// labeled or incident to a kept edge. Vertex ids are renumbered in
    /// increasing order of their old ids.
    pub fn edge_subgraph(&self, keep: &[bool]) -> RealizationGraph {
        let mut used = vec![false; self.vertices.len()];
        for v in self.labeling.iter().flatten() {
            used[*v] = true;
        }
        for (e, edge) in self.edges.iter().enumerate() {
            if keep[e] {
                used[edge.u] = true;
                used[edge.v] = true;
            }
        }
        let mut g = RealizationGraph::new(self.labels.clone());
        let mut remap = vec![usize::MAX; self.vertices.len()];
        for (v, p) in self.vertices.iter().enumerate() {
            if used[v] {
                remap[v] = g.push_vertex(p.clone());
            }
        }
        for (e, edge) in self.edges.iter().enumerate() {
            if keep[e] {
                g.add_edge(remap[edge.u], remap[edge.v], edge.weight.clone())
                    .expect("weights were validated on insertion");
            }
        }
        for (x, v) in self.labeling.iter().enumerate() {
            if let Some(v) = v {
                g.labeling[x] = Some(remap[*v]);
            }
        }
        g
    }
}

pub(crate) fn dijkstra<'a, F, I>(n: usize, source: usize, mut adj: F) -> Vec<Option<Rational>>
where
    F: FnMut(usize) -> I,
    I: Iterator<Item = (usize, &'a Rational)>,
{
    let mut dist: Vec<Option<Rational>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(Rational::zero());
    heap.push(Reverse((Rational::zero(), source)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        for (w, weight) in adj(v) {
            if done[w] {
                continue;
            }
            let cand = &d + weight;
            if dist[w].as_ref().is_none_or(|cur| cand < *cur) {
                dist[w] = Some(cand.clone());
                heap.push(Reverse((cand, w)));
            }
        }
    }
    dist
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairMismatch {
    pub x: String,
    pub y: String,
    pub graph_distance: Rational,
    pub expected: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    /// First pair (in label order) whose graph distance differs from the metric.
    pub mismatch: Option<PairMismatch>,
    pub total_length: Rational,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Checks exactly that shortest-path distances between labeled vertices
/// reproduce `metric`.
pub fn verify_realization(graph: &RealizationGraph, metric: &FiniteMetric) -> Result<VerificationReport> {
    let n = metric.len();
    if graph.labels.len() != n {
        return Err(Error::GroundSetMismatch(graph.labels.len(), n));
    }
    if let Some(x) = (0..n).find(|&x| graph.labels[x] != metric.label(x)) {
        return Err(Error::UnknownLabel(graph.labels[x].clone()));
    }
    if let Some(x) = (0..n).find(|&x| graph.labeling[x].is_none()) {
        return Err(Error::UnlabeledElement(metric.label(x).to_string()));
    }
    if !graph.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let mut mismatch = None;
    'outer: for x in 0..n {
        let dist = graph.distances_from(graph.labeling[x].unwrap());
        for y in (x + 1)..n {
            let d = dist[graph.labeling[y].unwrap()].clone().expect("graph is connected");
            if &d != metric.dist(x, y) {
                mismatch = Some(PairMismatch {
                    x: metric.label(x).to_string(),
                    y: metric.label(y).to_string(),
                    graph_distance: d,
                    expected: metric.dist(x, y).clone(),
                });
                break 'outer;
            }
        }
    }
    Ok(VerificationReport { mismatch, total_length: graph.total_length() })
}
