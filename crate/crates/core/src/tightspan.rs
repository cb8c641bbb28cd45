//! Local polyhedral geometry of `P(D) = { f : f(x) + f(y) >= D(x, y) }`.
//!
//! Everything here works from a single point `f` and the constraints that are
//! tight at it; the tight span is never materialized. The smallest face of
//! `P(D)` containing `f` has dimension equal to the number of connected
//! components of the tight graph without an odd closed walk (a loop counts
//! as odd), so vertices are exactly the points whose tight graph has an odd
//! closed walk in every component.
//!
//! A bounded edge leaving a vertex `f` is determined by a sign vector `d` with
//! entries in `{-1, 0, +1}`. Its support is a connected bipartite piece of
//! one tight-graph component: the negative side is an independent set without
//! loops, the positive side is exactly its tight neighbourhood, and what is
//! left of the component (the zero set) must keep an odd closed walk in each
//! of its components. [`adjacent_vertices`] enumerates these sign vectors by
//! a branching search over the nodes of each component.

use num_traits::{Signed, Zero};

use crate::bits::{self, Mask};
use crate::error::{Error, Result};
use crate::metric::{FiniteMetric, TightPoint};
use crate::Rational;

/// Equality graph of the constraints at a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TightGraph {
    n: usize,
    adj: Vec<Mask>,
    loops: Mask,
}

impl TightGraph {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        bits::contains(self.adj[x], y)
    }

    pub fn has_loop(&self, x: usize) -> bool {
        bits::contains(self.loops, x)
    }

    pub fn neighbors(&self, x: usize) -> Mask {
        self.adj[x]
    }

    /// Edges `(x, y)` with `x < y`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|x| bits::iter(self.adj[x]).filter(move |&y| y > x).map(move |y| (x, y)))
            .collect()
    }

    pub fn loops(&self) -> Vec<usize> {
        bits::iter(self.loops).collect()
    }

    fn is_covered(&self, x: usize) -> bool {
        self.adj[x] != 0 || self.has_loop(x)
    }

    /// Connected components of the subgraph induced on `within`, each
    /// returned together with whether it has an odd closed walk.
    fn components(&self, within: Mask) -> Vec<(Mask, bool)> {
        let mut out = Vec::new();
        let mut left = within;
        while left != 0 {
            let start = left.trailing_zeros() as usize;
            let mut color = vec![0u8; self.n];
            let mut comp: Mask = bits::single(start);
            let mut odd = self.has_loop(start);
            color[start] = 1;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for w in bits::iter(self.adj[v] & within) {
                    if color[w] == 0 {
                        color[w] = 3 - color[v];
                        comp |= bits::single(w);
                        odd |= self.has_loop(w);
                        stack.push(w);
                    } else if color[w] == color[v] {
                        odd = true;
                    }
                }
            }
            left &= !comp;
            out.push((comp, odd));
        }
        out
    }
}

/// Slack `f(x) + f(y) - D(x, y)` of the constraint on `{x, y}` (`x = y`
/// allowed).
fn slack(metric: &FiniteMetric, f: &TightPoint, x: usize, y: usize) -> Rational {
    &f[x] + &f[y] - metric.dist(x, y)
}

fn check_ground(metric: &FiniteMetric, f: &TightPoint) -> Result<()> {
    if f.len() != metric.len() {
        return Err(Error::GroundSetMismatch(f.len(), metric.len()));
    }
    Ok(())
}

/// First violated constraint of `P(D)` in label order, if any.
pub fn violated_constraint(metric: &FiniteMetric, f: &TightPoint) -> Result<Option<(usize, usize)>> {
    check_ground(metric, f)?;
    let n = metric.len();
    for x in 0..n {
        for y in x..n {
            if slack(metric, f, x, y).is_negative() {
                return Ok(Some((x, y)));
            }
        }
    }
    Ok(None)
}

pub fn in_polyhedron(metric: &FiniteMetric, f: &TightPoint) -> bool {
    matches!(violated_constraint(metric, f), Ok(None))
}

pub fn tight_graph(metric: &FiniteMetric, f: &TightPoint) -> Result<TightGraph> {
    if let Some((x, y)) = violated_constraint(metric, f)? {
        return Err(Error::NotInPolyhedron(metric.label(x).into(), metric.label(y).into()));
    }
    let n = metric.len();
    let mut adj = vec![0; n];
    let mut loops = 0;
    for x in 0..n {
        if f[x].is_zero() {
            loops |= bits::single(x);
        }
        for y in (x + 1)..n {
            if slack(metric, f, x, y).is_zero() {
                adj[x] |= bits::single(y);
                adj[y] |= bits::single(x);
            }
        }
    }
    Ok(TightGraph { n, adj, loops })
}

/// `f` lies in `P(D)` and no coordinate can be lowered on its own, i.e. every
/// element is covered by a tight edge or loop.
pub fn in_tight_span(metric: &FiniteMetric, f: &TightPoint) -> bool {
    match tight_graph(metric, f) {
        Ok(t) => (0..t.n).all(|x| t.is_covered(x)),
        Err(_) => false,
    }
}

/// Dimension of the smallest face of `P(D)` containing `f`.
pub fn face_dim(metric: &FiniteMetric, f: &TightPoint) -> Result<usize> {
    let t = tight_graph(metric, f)?;
    Ok(t.components(bits::full(t.n)).into_iter().filter(|&(_, odd)| !odd).count())
}

pub fn is_vertex(metric: &FiniteMetric, f: &TightPoint) -> Result<bool> {
    Ok(face_dim(metric, f)? == 0)
}

/// Normalized direction of a bounded edge of `P(D)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeDirection {
    signs: Vec<i8>,
}

impl EdgeDirection {
    fn from_sets(n: usize, neg: Mask, pos: Mask) -> Self {
        let signs = (0..n)
            .map(|x| {
                if bits::contains(neg, x) {
                    -1
                } else if bits::contains(pos, x) {
                    1
                } else {
                    0
                }
            })
            .collect();
        EdgeDirection { signs }
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn neg_set(&self) -> Vec<usize> {
        (0..self.signs.len()).filter(|&x| self.signs[x] < 0).collect()
    }

    pub fn pos_set(&self) -> Vec<usize> {
        (0..self.signs.len()).filter(|&x| self.signs[x] > 0).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacentVertex {
    pub point: TightPoint,
    /// `D_inf(f, point)`, which equals the step length along the direction.
    pub length: Rational,
    pub direction: EdgeDirection,
}

/// All vertices `w` such that `[f, w]` is a bounded edge of `P(D)`, sorted by
/// coordinate vector.
pub fn adjacent_vertices(metric: &FiniteMetric, f: &TightPoint) -> Result<Vec<AdjacentVertex>> {
    let t = tight_graph(metric, f)?;
    let comps = t.components(bits::full(t.n));
    if comps.iter().any(|&(_, odd)| !odd) {
        return Err(Error::NotAVertex);
    }
    if !(0..t.n).all(|x| t.is_covered(x)) {
        return Err(Error::NotInTightSpan);
    }

    let mut out = Vec::new();
    for (comp, _) in comps {
        let mut search = DirectionSearch::new(&t, comp);
        search.run(0);
        for (neg, pos) in search.found {
            let direction = EdgeDirection::from_sets(t.n, neg, pos);
            let step = step_length(metric, f, &direction.signs)
                .expect("a negative coordinate is always blocked by its diagonal constraint");
            let point = TightPoint::new(
                (0..t.n)
                    .map(|x| match direction.signs[x] {
                        -1 => &f[x] - &step,
                        1 => &f[x] + &step,
                        _ => f[x].clone(),
                    })
                    .collect(),
            );
            out.push(AdjacentVertex { point, length: step, direction });
        }
    }
    out.sort_by(|a, b| a.point.cmp(&b.point));
    out.dedup_by(|a, b| a.point == b.point);
    Ok(out)
}

/// Largest `t` keeping `f + t * d` inside `P(D)`, or `None` for a ray.
fn step_length(metric: &FiniteMetric, f: &TightPoint, d: &[i8]) -> Option<Rational> {
    let n = metric.len();
    let mut best: Option<Rational> = None;
    for x in 0..n {
        for y in x..n {
            let rate = d[x] + d[y];
            if rate >= 0 {
                continue;
            }
            let t = slack(metric, f, x, y) / Rational::from_integer((-rate).into());
            if best.as_ref().is_none_or(|b| t < *b) {
                best = Some(t);
            }
        }
    }
    best
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sign {
    Neg,
    Pos,
    Zero,
}

struct DirectionSearch<'a> {
    t: &'a TightGraph,
    comp: Mask,
    order: Vec<usize>,
    neg: Mask,
    pos: Mask,
    zero: Mask,
    found: Vec<(Mask, Mask)>,
}

impl<'a> DirectionSearch<'a> {
    fn new(t: &'a TightGraph, comp: Mask) -> Self {
        // breadth-first order so that closed neighbourhoods complete early
        let start = comp.trailing_zeros() as usize;
        let mut order = vec![start];
        let mut seen = bits::single(start);
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for w in bits::iter(t.adj[v] & comp & !seen) {
                seen |= bits::single(w);
                order.push(w);
            }
        }
        DirectionSearch { t, comp, order, neg: 0, pos: 0, zero: 0, found: Vec::new() }
    }

    fn assigned(&self) -> Mask {
        self.neg | self.pos | self.zero
    }

    fn run(&mut self, at: usize) {
        let Some(&v) = self.order.get(at) else {
            if self.accept() {
                self.found.push((self.neg, self.pos));
            }
            return;
        };
        if bits::contains(self.assigned(), v) {
            self.run(at + 1);
            return;
        }
        for sign in [Sign::Neg, Sign::Pos, Sign::Zero] {
            let saved = (self.neg, self.pos, self.zero);
            if self.assign(v, sign) && self.locally_consistent() {
                self.run(at + 1);
            }
            (self.neg, self.pos, self.zero) = saved;
        }
    }

    fn assign(&mut self, v: usize, sign: Sign) -> bool {
        let nb = self.t.adj[v];
        match sign {
            Sign::Neg => {
                if self.t.has_loop(v) || nb & (self.neg | self.zero) != 0 {
                    return false;
                }
                self.neg |= bits::single(v);
                self.pos |= nb;
            }
            Sign::Pos => self.pos |= bits::single(v),
            Sign::Zero => {
                if nb & self.neg != 0 {
                    return false;
                }
                self.zero |= bits::single(v);
            }
        }
        true
    }

    /// Checks the nodes whose closed neighbourhood is fully decided.
    fn locally_consistent(&self) -> bool {
        let assigned = self.assigned();
        for v in bits::iter(assigned & self.comp) {
            let nb = self.t.adj[v];
            if nb & !assigned != 0 {
                continue;
            }
            if bits::contains(self.pos, v) && nb & self.neg == 0 {
                return false;
            }
            if bits::contains(self.zero, v) && !self.t.has_loop(v) && nb & self.zero == 0 {
                return false;
            }
        }
        true
    }

    fn accept(&self) -> bool {
        if self.neg == 0 {
            return false;
        }
        // the negative/positive bipartite tight subgraph must be connected
        let support = self.neg | self.pos;
        let start = support.trailing_zeros() as usize;
        let mut reached = bits::single(start);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            let across = if bits::contains(self.neg, v) { self.pos } else { self.neg };
            for w in bits::iter(self.t.adj[v] & across & !reached) {
                reached |= bits::single(w);
                stack.push(w);
            }
        }
        if reached != support {
            return false;
        }
        self.t.components(self.zero).iter().all(|&(_, odd)| odd)
    }
}
