//! Text formats for metrics, point sets and split systems, and graph export
//! as JSON and DOT.
//!
//! Metric files: `n`, then `n` labels, then `n` rows of integers or `p/q`
//! rationals. Split files share the two header lines and continue with one
//! `weight : labels | labels` line per split. Point files hold one `x y` pair
//! per line. In all three, lines starting with `#` are ignored.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::graph::RealizationGraph;
use crate::metric::{FiniteMetric, TightPoint};
use crate::splits::{PointSet2D, Split, WeightedSplitSystem};
use crate::Rational;

/// Parses an integer or `p/q`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.parse().ok()?;
            let q: BigInt = q.parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

fn rational_at(s: &str, line: usize) -> Result<Rational> {
    parse_rational(s).ok_or_else(|| Error::parse(line, format!("`{s}` is not an integer or p/q rational")))
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn read_header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>) -> Result<Vec<String>> {
    let (line, first) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
    let n: usize = first.parse().map_err(|_| Error::parse(line, "expected the number of elements"))?;
    let (line, second) = lines.next().ok_or_else(|| Error::parse(line + 1, "missing label line"))?;
    let labels: Vec<String> = second.split_whitespace().map(str::to_string).collect();
    if labels.len() != n {
        return Err(Error::parse(line, format!("expected {n} labels, found {}", labels.len())));
    }
    Ok(labels)
}

pub fn read_metric(text: &str) -> Result<FiniteMetric> {
    let mut lines = content_lines(text);
    let labels = read_header(&mut lines)?;
    let n = labels.len();
    let mut matrix = Vec::with_capacity(n);
    for (line, row) in lines.by_ref().take(n) {
        let row: Vec<Rational> = row.split_whitespace().map(|t| rational_at(t, line)).collect::<Result<_>>()?;
        if row.len() != n {
            return Err(Error::parse(line, format!("expected {n} entries, found {}", row.len())));
        }
        matrix.push(row);
    }
    if matrix.len() != n {
        return Err(Error::DimensionMismatch { rows: matrix.len(), labels: n });
    }
    if let Some((line, _)) = lines.next() {
        return Err(Error::parse(line, "trailing content after the matrix"));
    }
    FiniteMetric::new(labels, matrix)
}

pub fn write_metric(metric: &FiniteMetric) -> String {
    let mut out = format!("{}\n{}\n", metric.len(), metric.labels().join(" "));
    for row in metric.matrix() {
        let cells: Vec<String> = row.iter().map(|q| q.to_string()).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_points(text: &str) -> Result<PointSet2D> {
    let mut points = Vec::new();
    for (line, l) in content_lines(text) {
        let fields: Vec<&str> = l.split_whitespace().collect();
        let [x, y] = fields.as_slice() else {
            return Err(Error::parse(line, "expected `x y`"));
        };
        points.push((rational_at(x, line)?, rational_at(y, line)?));
    }
    PointSet2D::new(points)
}

pub fn write_points(points: &PointSet2D) -> String {
    points.points().iter().map(|(x, y)| format!("{x} {y}\n")).collect()
}

pub fn read_split_system(text: &str) -> Result<WeightedSplitSystem> {
    let mut lines = content_lines(text);
    let labels = read_header(&mut lines)?;
    let n = labels.len();
    let mut system = WeightedSplitSystem::new(labels);
    for (line, l) in lines {
        let (weight, sides) = l.split_once(':').ok_or_else(|| Error::parse(line, "expected `weight : A | B`"))?;
        let weight = rational_at(weight.trim(), line)?;
        let (a, b) = sides.split_once('|').ok_or_else(|| Error::parse(line, "missing `|`"))?;
        let lookup = |names: &str| -> Result<Vec<usize>> {
            names
                .split_whitespace()
                .map(|name| {
                    system.labels().iter().position(|l| l == name).ok_or_else(|| Error::UnknownLabel(name.to_string()))
                })
                .collect()
        };
        let (a, b) = (lookup(a)?, lookup(b)?);
        let mut seen = vec![false; n];
        for &x in a.iter().chain(&b) {
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::parse(line, format!("`{}` appears twice", system.labels()[x])));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::parse(line, "the two sides must cover every label"));
        }
        if b.is_empty() {
            return Err(Error::EmptySplitSide);
        }
        system.insert(Split::new(n, &a)?, weight)?;
    }
    Ok(system)
}

pub fn write_split_system(system: &WeightedSplitSystem) -> String {
    let labels = system.labels();
    let mut out = format!("{}\n{}\n", labels.len(), labels.join(" "));
    let names = |side: Vec<usize>| side.into_iter().map(|x| labels[x].as_str()).collect::<Vec<_>>().join(" ");
    for (s, w) in system.iter() {
        let _ = writeln!(out, "{w} : {} | {}", names(s.side_a()), names(s.side_b()));
    }
    out
}

/// An input accepted by the realizer: a metric, or something that induces one.
#[derive(Debug, Clone)]
pub enum Instance {
    Metric(FiniteMetric),
    Points(PointSet2D),
    Splits(WeightedSplitSystem),
}

impl Instance {
    pub fn metric(&self) -> Result<FiniteMetric> {
        match self {
            Instance::Metric(d) => Ok(d.clone()),
            Instance::Points(p) => p.l1_metric(),
            Instance::Splits(s) => crate::splits::induced_metric(s),
        }
    }
}

/// Detects the format from the content: two numbers on the first line mean
/// a point file, a `:` after the header means a split file.
pub fn read_instance(text: &str) -> Result<Instance> {
    let mut lines = content_lines(text);
    let first = lines.next().map(|(_, l)| l.split_whitespace().count()).unwrap_or(0);
    if first == 2 {
        return read_points(text).map(Instance::Points);
    }
    if lines.nth(1).is_some_and(|(_, l)| l.contains(':')) {
        return read_split_system(text).map(Instance::Splits);
    }
    read_metric(text).map(Instance::Metric)
}

/// Graph JSON: `nodes` with coordinates keyed by label, `edges` with string
/// weights, and `labels` mapping each element to its node id.
pub fn graph_to_json(graph: &RealizationGraph) -> String {
    let labels = graph.labels();
    let nodes: Vec<Value> = graph
        .vertices()
        .iter()
        .enumerate()
        .map(|(id, p)| {
            let coords: Map<String, Value> =
                labels.iter().zip(p.coords()).map(|(l, q)| (l.clone(), Value::String(q.to_string()))).collect();
            json!({ "id": id, "coords": coords })
        })
        .collect();
    let edges: Vec<Value> = graph
        .edges()
        .iter()
        .map(|e| json!({ "u": e.u, "v": e.v, "weight": e.weight.to_string() }))
        .collect();
    let labeling: Map<String, Value> = labels
        .iter()
        .zip(graph.labeling())
        .filter_map(|(l, v)| v.map(|v| (l.clone(), json!(v))))
        .collect();
    let mut out = serde_json::to_string_pretty(&json!({ "nodes": nodes, "edges": edges, "labels": labeling }))
        .expect("JSON values serialize");
    out.push('\n');
    out
}

fn json_err(msg: impl Into<String>) -> Error {
    Error::parse(0, msg)
}

/// Parses graph JSON. Element order follows the `labels` object; node ids
/// must be `0..k` in order.
pub fn graph_from_json(text: &str) -> Result<RealizationGraph> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    let labeling =
        doc.get("labels").and_then(Value::as_object).ok_or_else(|| json_err("missing `labels` object"))?;
    let labels: Vec<String> = labeling.keys().cloned().collect();
    let mut graph = RealizationGraph::new(labels.clone());

    let nodes = doc.get("nodes").and_then(Value::as_array).ok_or_else(|| json_err("missing `nodes` array"))?;
    for (k, node) in nodes.iter().enumerate() {
        if node.get("id").and_then(Value::as_u64) != Some(k as u64) {
            return Err(json_err(format!("node {k} must have id {k}")));
        }
        let coords =
            node.get("coords").and_then(Value::as_object).ok_or_else(|| json_err(format!("node {k} lacks coords")))?;
        let point = labels
            .iter()
            .map(|l| {
                coords
                    .get(l)
                    .and_then(Value::as_str)
                    .and_then(parse_rational)
                    .ok_or_else(|| json_err(format!("node {k}: bad or missing coordinate `{l}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        graph.push_vertex(TightPoint::new(point));
    }

    let edges = doc.get("edges").and_then(Value::as_array).ok_or_else(|| json_err("missing `edges` array"))?;
    for (k, edge) in edges.iter().enumerate() {
        let end = |key: &str| {
            edge.get(key)
                .and_then(Value::as_u64)
                .map(|v| v as usize)
                .filter(|&v| v < nodes.len())
                .ok_or_else(|| json_err(format!("edge {k}: bad `{key}`")))
        };
        let weight = edge
            .get("weight")
            .and_then(Value::as_str)
            .and_then(parse_rational)
            .ok_or_else(|| json_err(format!("edge {k}: bad weight")))?;
        graph.add_edge(end("u")?, end("v")?, weight)?;
    }

    for (x, (label, id)) in labeling.iter().enumerate() {
        let id = id
            .as_u64()
            .map(|v| v as usize)
            .filter(|&v| v < nodes.len())
            .ok_or_else(|| json_err(format!("label `{label}`: bad node id")))?;
        graph.set_label(x, id);
    }
    Ok(graph)
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn graph_to_dot(graph: &RealizationGraph) -> String {
    let mut names = vec![Vec::new(); graph.vertex_count()];
    for (x, v) in graph.labeling().iter().enumerate() {
        if let Some(v) = v {
            names[*v].push(graph.labels()[x].as_str());
        }
    }
    let mut out = String::from("graph realization {\n");
    for (id, names) in names.iter().enumerate() {
        if names.is_empty() {
            let _ = writeln!(out, "  n{id} [shape=point];");
        } else {
            let _ = writeln!(out, "  n{id} [label=\"{}\"];", dot_escape(&names.join(",")));
        }
    }
    for e in graph.edges() {
        let _ = writeln!(out, "  n{} -- n{} [label=\"{}\"];", e.u, e.v, e.weight);
    }
    out.push_str("}\n");
    out
}

/// Reorders the elements of `graph` to follow `labels`, permuting vertex
/// coordinates to match. Fails if the label sets differ.
pub fn align_labels(graph: &RealizationGraph, labels: &[String]) -> Result<RealizationGraph> {
    let own = graph.labels();
    if own.len() != labels.len() {
        return Err(Error::GroundSetMismatch(own.len(), labels.len()));
    }
    let perm: Vec<usize> = labels
        .iter()
        .map(|l| own.iter().position(|o| o == l).ok_or_else(|| Error::UnknownLabel(l.clone())))
        .collect::<Result<_>>()?;
    let mut g = RealizationGraph::new(labels.to_vec());
    for p in graph.vertices() {
        g.push_vertex(TightPoint::new(perm.iter().map(|&i| p[i].clone()).collect()));
    }
    for e in graph.edges() {
        g.add_edge(e.u, e.v, e.weight.clone())?;
    }
    for (x, &i) in perm.iter().enumerate() {
        if let Some(v) = graph.label_vertex(i) {
            g.set_label(x, v);
        }
    }
    Ok(g)
}
