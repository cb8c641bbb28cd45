//! Flow-based mixed-integer program for minimal subrealizations, with an LP
//! text writer and a reader for the same dialect.
//!
//! For every edge `e` of the realization there is a binary `xe{e}`. For every
//! unordered pair `{x, y}` of elements (pair index `j`, pairs in label order)
//! one unit of flow is sent from the vertex of `x` to the vertex of `y`
//! through continuous arc variables `f{e}d{dir}p{j}` (`dir` 0 runs from the
//! lower to the higher vertex id). Arc flows are bounded by their edge
//! variable (`b{e}d{dir}p{j}`), conserved at every vertex (`c{v}p{j}`), and
//! their weighted length is at most the graph distance of the pair
//! (`len{j}`). The objective is the total length of the selected edges.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{verify_realization, RealizationGraph};
use crate::metric::FiniteMetric;
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: Rational,
    pub upper: Option<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn as_str(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }

    fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// A minimization problem over named variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MipModel {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<(usize, Rational)>,
    index: HashMap<String, usize>,
}

impl MipModel {
    pub fn add_variable(&mut self, name: String, kind: VarKind) -> usize {
        if let Some(&i) = self.index.get(&name) {
            return i;
        }
        let upper = (kind == VarKind::Binary).then(Rational::one);
        let i = self.variables.len();
        self.index.insert(name.clone(), i);
        self.variables.push(Variable { name, kind, lower: Rational::zero(), upper });
        i
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn num_binary(&self) -> usize {
        self.variables.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn num_continuous(&self) -> usize {
        self.variables.len() - self.num_binary()
    }
}

/// The subrealization model together with the index maps needed to build
/// assignments for it.
#[derive(Debug, Clone)]
pub struct SubrealizationMip {
    pub model: MipModel,
    /// Element pairs `(x, y)`, `x < y`, indexed by pair number.
    pub pairs: Vec<(usize, usize)>,
    edge_vars: Vec<usize>,
    flow_vars: HashMap<(usize, u8, usize), usize>,
}

pub fn edge_var_name(e: usize) -> String {
    format!("xe{e}")
}

pub fn flow_var_name(e: usize, dir: u8, pair: usize) -> String {
    format!("f{e}d{dir}p{pair}")
}

/// Builds the model for `graph`, which must realize `metric`. With `reduce`,
/// flow variables for a pair exist only on edges lying on some shortest path
/// between the pair's vertices.
pub fn build_subrealization_mip(
    graph: &RealizationGraph,
    metric: &FiniteMetric,
    reduce: bool,
) -> Result<SubrealizationMip> {
    let report = verify_realization(graph, metric)?;
    if let Some(m) = report.mismatch {
        return Err(Error::NotARealization(format!(
            "d({}, {}) is {} in the graph but {} in the metric",
            m.x, m.y, m.graph_distance, m.expected
        )));
    }
    let n = metric.len();
    let terminal = |x: usize| graph.label_vertex(x).expect("verified labeling");
    let from_terminal: Vec<Vec<Option<Rational>>> =
        (0..n).map(|x| graph.distances_from(terminal(x))).collect();

    let mut model = MipModel::default();
    let edge_vars: Vec<usize> =
        (0..graph.edge_count()).map(|e| model.add_variable(edge_var_name(e), VarKind::Binary)).collect();
    model.objective = graph.edges().iter().enumerate().map(|(e, edge)| (edge_vars[e], edge.weight.clone())).collect();

    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| ((x + 1)..n).map(move |y| (x, y))).collect();
    let mut flow_vars = HashMap::new();
    for (j, &(x, y)) in pairs.iter().enumerate() {
        let (dx, dy) = (&from_terminal[x], &from_terminal[y]);
        let target = dx[terminal(y)].clone().expect("connected");
        let on_shortest = |u: usize, v: usize, w: &Rational| {
            let via = |a: usize, b: usize| match (&dx[a], &dy[b]) {
                (Some(p), Some(q)) => p + w + q == target,
                _ => false,
            };
            via(u, v) || via(v, u)
        };
        let edges: Vec<usize> = (0..graph.edge_count())
            .filter(|&e| {
                let edge = &graph.edges()[e];
                !reduce || on_shortest(edge.u, edge.v, &edge.weight)
            })
            .collect();

        let mut balance: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); graph.vertex_count()];
        let mut length_terms = Vec::new();
        for &e in &edges {
            let edge = &graph.edges()[e];
            for (dir, tail, head) in [(0u8, edge.u, edge.v), (1u8, edge.v, edge.u)] {
                let f = model.add_variable(flow_var_name(e, dir, j), VarKind::Continuous);
                flow_vars.insert((e, dir, j), f);
                model.constraints.push(Constraint {
                    name: format!("b{e}d{dir}p{j}"),
                    terms: vec![(f, Rational::one()), (edge_vars[e], -Rational::one())],
                    relation: Relation::Le,
                    rhs: Rational::zero(),
                });
                balance[head].push((f, Rational::one()));
                balance[tail].push((f, -Rational::one()));
                length_terms.push((f, edge.weight.clone()));
            }
        }
        for (v, terms) in balance.into_iter().enumerate() {
            let rhs = if v == terminal(x) {
                -Rational::one()
            } else if v == terminal(y) {
                Rational::one()
            } else {
                Rational::zero()
            };
            if terms.is_empty() && rhs.is_zero() {
                continue;
            }
            model.constraints.push(Constraint { name: format!("c{v}p{j}"), terms, relation: Relation::Eq, rhs });
        }
        model.constraints.push(Constraint {
            name: format!("len{j}"),
            terms: length_terms,
            relation: Relation::Le,
            rhs: target,
        });
    }
    Ok(SubrealizationMip { model, pairs, edge_vars, flow_vars })
}

impl SubrealizationMip {
    /// Assignment selecting the edges in `keep`, with each pair's unit of flow
    /// routed along a shortest path of the selected subgraph (restricted to
    /// arcs that have variables). Pairs left disconnected carry no flow.
    pub fn assignment_for_edges(&self, graph: &RealizationGraph, keep: &[bool]) -> HashMap<String, Rational> {
        let model = &self.model;
        let mut values: HashMap<String, Rational> =
            model.variables.iter().map(|v| (v.name.clone(), Rational::zero())).collect();
        for (e, &k) in keep.iter().enumerate() {
            if k {
                values.insert(model.variables[self.edge_vars[e]].name.clone(), Rational::one());
            }
        }
        for (j, &(x, y)) in self.pairs.iter().enumerate() {
            let (s, t) = (graph.label_vertex(x).unwrap(), graph.label_vertex(y).unwrap());
            let usable = |e: usize| keep[e] && self.flow_vars.contains_key(&(e, 0, j));
            if let Some(path) = shortest_path(graph, s, t, usable) {
                for (e, dir) in path {
                    let name = &model.variables[self.flow_vars[&(e, dir, j)]].name;
                    values.insert(name.clone(), Rational::one());
                }
            }
        }
        values
    }
}

/// Arcs `(edge, dir)` of a shortest `s`-`t` path over usable edges; ties go to
/// the smaller predecessor id.
fn shortest_path<F: Fn(usize) -> bool>(
    graph: &RealizationGraph,
    s: usize,
    t: usize,
    usable: F,
) -> Option<Vec<(usize, u8)>> {
    let nv = graph.vertex_count();
    let mut incident = vec![Vec::new(); nv];
    for (e, edge) in graph.edges().iter().enumerate() {
        if usable(e) {
            incident[edge.u].push((edge.v, e));
            incident[edge.v].push((edge.u, e));
        }
    }
    let dist = crate::graph::dijkstra(nv, s, |v| {
        incident[v].iter().map(|&(w, e)| (w, &graph.edges()[e].weight))
    });
    dist[t].as_ref()?;
    let mut path = Vec::new();
    let mut v = t;
    while v != s {
        let dv = dist[v].as_ref().unwrap();
        let (u, e) = incident[v]
            .iter()
            .filter(|&&(u, e)| dist[u].as_ref().is_some_and(|du| du + &graph.edges()[e].weight == *dv))
            .min()
            .copied()
            .expect("a predecessor on a shortest path");
        let dir = if graph.edges()[e].u == u { 0 } else { 1 };
        path.push((e, dir));
        v = u;
    }
    path.reverse();
    Some(path)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentReport {
    /// Names of violated constraints and bounds, in model order.
    pub violations: Vec<String>,
    pub objective: Rational,
}

impl AssignmentReport {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluates every bound, integrality requirement and constraint exactly.
pub fn check_assignment(model: &MipModel, assignment: &HashMap<String, Rational>) -> Result<AssignmentReport> {
    let values: Vec<&Rational> = model
        .variables
        .iter()
        .map(|v| assignment.get(&v.name).ok_or_else(|| Error::MissingVariable(v.name.clone())))
        .collect::<Result<_>>()?;
    let mut violations = Vec::new();
    for (v, value) in model.variables.iter().zip(&values) {
        let in_bounds = **value >= v.lower && v.upper.as_ref().is_none_or(|u| *value <= u);
        let integral = v.kind == VarKind::Continuous || value.is_integer();
        if !in_bounds || !integral {
            violations.push(v.name.clone());
        }
    }
    let eval = |terms: &[(usize, Rational)]| -> Rational { terms.iter().map(|(i, c)| c * values[*i]).sum() };
    for c in &model.constraints {
        if !c.relation.holds(&eval(&c.terms), &c.rhs) {
            violations.push(c.name.clone());
        }
    }
    Ok(AssignmentReport { violations, objective: eval(&model.objective) })
}

const LINE_WIDTH: usize = 200;

fn has_finite_decimal(q: &Rational) -> bool {
    let mut d = q.denom().clone();
    for p in [2u32, 5] {
        let p = BigInt::from(p);
        while (&d % &p).is_zero() {
            d /= &p;
        }
    }
    d.is_one()
}

/// Exact decimal text of a rational with a terminating expansion.
fn decimal(q: &Rational) -> String {
    if q.is_integer() {
        return q.numer().to_string();
    }
    let mut scale = 0u32;
    let mut scaled = q.clone();
    while !scaled.is_integer() {
        scaled *= Rational::from_integer(10.into());
        scale += 1;
    }
    let digits = scaled.numer().abs().to_string();
    let digits = format!("{digits:0>width$}", width = scale as usize + 1);
    let (int, frac) = digits.split_at(digits.len() - scale as usize);
    let sign = if q.is_negative() { "-" } else { "" };
    format!("{sign}{int}.{frac}")
}

/// Factor that makes every value of a row expressible as a finite decimal.
fn row_scale<'a>(values: impl Iterator<Item = &'a Rational>) -> Rational {
    let mut lcm = BigInt::one();
    for q in values {
        if !has_finite_decimal(q) {
            lcm = lcm.lcm(q.denom());
        }
    }
    Rational::from_integer(lcm)
}

fn write_terms(out: &mut String, line: &mut String, model: &MipModel, terms: &[(usize, Rational)], scale: &Rational) {
    for (k, (i, c)) in terms.iter().enumerate() {
        let c = c * scale;
        let sign = if c.is_negative() { "-" } else { "+" };
        let mag = c.abs();
        let coef = if mag.is_one() { String::new() } else { format!("{} ", decimal(&mag)) };
        let name = &model.variables[*i].name;
        let token = if k == 0 && sign == "+" {
            format!("{coef}{name}")
        } else if k == 0 {
            format!("- {coef}{name}")
        } else {
            format!("{sign} {coef}{name}")
        };
        if line.len() + token.len() + 1 > LINE_WIDTH {
            out.push_str(line.trim_end());
            out.push('\n');
            line.clear();
            line.push_str("   ");
        }
        line.push(' ');
        line.push_str(&token);
    }
}

/// Serializes `model` in LP text format. Coefficients are written as exact
/// decimals; a row containing a value without a finite decimal expansion is
/// multiplied through by the least common denominator of such values.
pub fn write_lp(model: &MipModel) -> String {
    let mut out = String::new();
    let obj_scale = row_scale(model.objective.iter().map(|(_, c)| c));
    if !obj_scale.is_one() {
        let _ = writeln!(out, "\\ objective scaled by {obj_scale}");
    }
    let mut line = String::from("Minimize obj:");
    write_terms(&mut out, &mut line, model, &model.objective, &obj_scale);
    out.push_str(line.trim_end());
    out.push('\n');

    out.push_str("Subject To\n");
    for c in &model.constraints {
        let scale = row_scale(c.terms.iter().map(|(_, q)| q).chain(std::iter::once(&c.rhs)));
        let mut line = format!(" {}:", c.name);
        write_terms(&mut out, &mut line, model, &c.terms, &scale);
        let _ = write!(line, " {} {}", c.relation.as_str(), decimal(&(&c.rhs * &scale)));
        out.push_str(&line);
        out.push('\n');
    }

    out.push_str("Bounds\n");
    for v in &model.variables {
        match &v.upper {
            Some(u) => {
                let _ = writeln!(out, " {} <= {} <= {}", decimal(&v.lower), v.name, decimal(u));
            }
            None => {
                let _ = writeln!(out, " {} >= {}", v.name, decimal(&v.lower));
            }
        }
    }

    let binaries: Vec<&str> =
        model.variables.iter().filter(|v| v.kind == VarKind::Binary).map(|v| v.name.as_str()).collect();
    if !binaries.is_empty() {
        out.push_str("Binary\n");
        let mut line = String::new();
        for b in binaries {
            if line.len() + b.len() + 1 > LINE_WIDTH {
                out.push_str(&line);
                out.push('\n');
                line.clear();
            }
            line.push(' ');
            line.push_str(b);
        }
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str("End\n");
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Name(String),
    Number(Rational),
    Plus,
    Minus,
    Colon,
    Rel(Relation),
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let digits: String = format!("{int}{frac}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let denom = BigInt::from(10u32).pow(frac.len() as u32);
    Some(Rational::new(numer, denom))
}

fn tokenize(text: &str, line_no: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            _ if c.is_whitespace() => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            ':' => {
                out.push(Token::Colon);
                i += 1;
            }
            '<' | '>' | '=' => {
                let rel = match c {
                    '<' => Relation::Le,
                    '>' => Relation::Ge,
                    _ => Relation::Eq,
                };
                i += 1;
                if i < chars.len() && chars[i] == '=' {
                    i += 1;
                } else if c == '=' && i < chars.len() && (chars[i] == '<' || chars[i] == '>') {
                    let rel = if chars[i] == '<' { Relation::Le } else { Relation::Ge };
                    i += 1;
                    out.push(Token::Rel(rel));
                    continue;
                }
                out.push(Token::Rel(rel));
            }
            _ if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let q = parse_decimal(&s).ok_or_else(|| Error::parse(line_no, format!("bad number `{s}`")))?;
                out.push(Token::Number(q));
            }
            _ if c.is_alphabetic() || "_!\"#$%&()/,;?@[]{}~'`|".contains(c) => {
                let start = i;
                while i < chars.len()
                    && !chars[i].is_whitespace()
                    && !"+-:<>=".contains(chars[i])
                {
                    i += 1;
                }
                out.push(Token::Name(chars[start..i].iter().collect()));
            }
            _ => return Err(Error::parse(line_no, format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    Binary,
    General,
    End,
}

fn section_keyword(line: &str) -> Option<(Section, &str)> {
    let lower = line.trim_start().to_ascii_lowercase();
    let trimmed = line.trim_start();
    for (kw, sec) in [
        ("minimize", Section::Objective),
        ("minimum", Section::Objective),
        ("min", Section::Objective),
        ("subject to", Section::Constraints),
        ("such that", Section::Constraints),
        ("s.t.", Section::Constraints),
        ("st", Section::Constraints),
        ("bounds", Section::Bounds),
        ("bound", Section::Bounds),
        ("binaries", Section::Binary),
        ("binary", Section::Binary),
        ("bin", Section::Binary),
        ("generals", Section::General),
        ("general", Section::General),
        ("end", Section::End),
    ] {
        if lower.starts_with(kw) {
            let rest = &trimmed[kw.len()..];
            if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                return Some((sec, rest));
            }
        }
    }
    None
}

/// Parses a linear expression `[name :] terms`; returns the name and terms.
fn parse_expression(
    model: &mut MipModel,
    tokens: &[Token],
    line_no: usize,
) -> Result<(Option<String>, Vec<(usize, Rational)>)> {
    let (name, body) = match tokens {
        [Token::Name(n), Token::Colon, rest @ ..] => (Some(n.clone()), rest),
        _ => (None, tokens),
    };
    let mut terms: Vec<(usize, Rational)> = Vec::new();
    let mut sign = Rational::one();
    let mut coef: Option<Rational> = None;
    for t in body {
        match t {
            Token::Plus => {}
            Token::Minus => sign = -sign,
            Token::Number(q) => coef = Some(coef.unwrap_or_else(Rational::one) * q),
            Token::Name(v) => {
                let i = model.add_variable(v.clone(), VarKind::Continuous);
                let c = &sign * coef.take().unwrap_or_else(Rational::one);
                match terms.iter_mut().find(|(j, _)| *j == i) {
                    Some((_, existing)) => *existing += c,
                    None => terms.push((i, c)),
                }
                sign = Rational::one();
            }
            _ => return Err(Error::parse(line_no, "unexpected token in expression")),
        }
    }
    Ok((name, terms))
}

fn signed_number(tokens: &[Token], line_no: usize) -> Result<Rational> {
    match tokens {
        [Token::Number(q)] => Ok(q.clone()),
        [Token::Minus, Token::Number(q)] => Ok(-q.clone()),
        [Token::Plus, Token::Number(q)] => Ok(q.clone()),
        _ => Err(Error::parse(line_no, "expected a number")),
    }
}

/// Reads the LP dialect produced by [`write_lp`] (minimization, named rows,
/// `Bounds`, `Binary`/`General` sections, `\` comments, continuation lines).
pub fn read_lp(text: &str) -> Result<MipModel> {
    let mut model = MipModel::default();
    let mut section = Section::Preamble;
    // statement text accumulated across continuation lines
    let mut pending = String::new();
    let mut pending_line = 0;

    let flush = |model: &mut MipModel, section: Section, text: &str, line_no: usize| -> Result<()> {
        if text.trim().is_empty() {
            return Ok(());
        }
        let tokens = tokenize(text, line_no)?;
        match section {
            Section::Objective => {
                let (_, terms) = parse_expression(model, &tokens, line_no)?;
                model.objective = terms;
            }
            Section::Constraints => {
                let at = tokens
                    .iter()
                    .position(|t| matches!(t, Token::Rel(_)))
                    .ok_or_else(|| Error::parse(line_no, "constraint without relation"))?;
                let Token::Rel(relation) = tokens[at] else { unreachable!() };
                let (name, terms) = parse_expression(model, &tokens[..at], line_no)?;
                let rhs = signed_number(&tokens[at + 1..], line_no)?;
                let name = name.unwrap_or_else(|| format!("R{}", model.constraints.len()));
                model.constraints.push(Constraint { name, terms, relation, rhs });
            }
            _ => {}
        }
        Ok(())
    };

    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('\\').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        if let Some((sec, rest)) = section_keyword(line) {
            flush(&mut model, section, &pending, pending_line)?;
            pending.clear();
            section = sec;
            pending_line = line_no;
            pending.push_str(rest);
            pending.push(' ');
            continue;
        }
        match section {
            Section::Objective => {
                pending.push_str(line);
                pending.push(' ');
            }
            Section::Constraints => {
                // a new row starts with `name:` or when the previous one is complete
                let tokens = tokenize(line, line_no)?;
                let starts_row = matches!(tokens.as_slice(), [Token::Name(_), Token::Colon, ..]);
                let complete = tokenize(&pending, pending_line)?
                    .iter()
                    .rev()
                    .skip(1)
                    .any(|t| matches!(t, Token::Rel(_)));
                if starts_row || complete {
                    flush(&mut model, section, &pending, pending_line)?;
                    pending.clear();
                    pending_line = line_no;
                }
                pending.push_str(line);
                pending.push(' ');
            }
            Section::Bounds => parse_bound(&mut model, line, line_no)?,
            Section::Binary | Section::General => {
                for name in line.split_whitespace() {
                    let i = model.add_variable(name.to_string(), VarKind::Continuous);
                    if section == Section::Binary {
                        let v = &mut model.variables[i];
                        v.kind = VarKind::Binary;
                        v.lower = Rational::zero();
                        v.upper = Some(Rational::one());
                    }
                }
            }
            Section::Preamble => return Err(Error::parse(line_no, "content before the objective")),
            Section::End => return Err(Error::parse(line_no, "content after End")),
        }
    }
    flush(&mut model, section, &pending, pending_line)?;
    if section != Section::End {
        return Err(Error::parse(text.lines().count(), "missing End"));
    }
    Ok(model)
}

fn parse_bound(model: &mut MipModel, line: &str, line_no: usize) -> Result<()> {
    let words: Vec<&str> = line.split_whitespace().collect();
    if let [name, free] = words.as_slice() {
        if free.eq_ignore_ascii_case("free") {
            let i = model.add_variable(name.to_string(), VarKind::Continuous);
            model.variables[i].upper = None;
            model.variables[i].lower = Rational::from_integer((-1).into()) * Rational::from_integer(BigInt::from(10u32).pow(30));
            return Ok(());
        }
    }
    let tokens = tokenize(line, line_no)?;
    let rels: Vec<usize> = tokens.iter().enumerate().filter(|(_, t)| matches!(t, Token::Rel(_))).map(|(i, _)| i).collect();
    let name_at = tokens
        .iter()
        .position(|t| matches!(t, Token::Name(_)))
        .ok_or_else(|| Error::parse(line_no, "bound without variable"))?;
    let Token::Name(name) = &tokens[name_at] else { unreachable!() };
    let i = model.add_variable(name.clone(), VarKind::Continuous);
    let apply = |model: &mut MipModel, rel: Relation, value: Rational, var_on_left: bool| {
        let v = &mut model.variables[i];
        let rel = match (rel, var_on_left) {
            (Relation::Le, false) => Relation::Ge,
            (Relation::Ge, false) => Relation::Le,
            (r, _) => r,
        };
        match rel {
            Relation::Le => v.upper = Some(value),
            Relation::Ge => v.lower = value,
            Relation::Eq => {
                v.lower = value.clone();
                v.upper = Some(value);
            }
        }
    };
    match rels.as_slice() {
        [r] if *r == name_at + 1 => {
            let Token::Rel(rel) = tokens[*r] else { unreachable!() };
            let value = signed_number(&tokens[r + 1..], line_no)?;
            apply(model, rel, value, true);
        }
        [r] if *r + 1 == name_at => {
            let Token::Rel(rel) = tokens[*r] else { unreachable!() };
            let value = signed_number(&tokens[..*r], line_no)?;
            apply(model, rel, value, false);
        }
        [r1, r2] if *r1 + 1 == name_at && *r2 == name_at + 1 => {
            let (Token::Rel(a), Token::Rel(b)) = (&tokens[*r1], &tokens[*r2]) else { unreachable!() };
            let low = signed_number(&tokens[..*r1], line_no)?;
            let high = signed_number(&tokens[r2 + 1..], line_no)?;
            apply(model, *a, low, false);
            apply(model, *b, high, true);
        }
        _ => return Err(Error::parse(line_no, "unsupported bound")),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::tests::{int_metric, metric_345};
    use crate::metric::TightPoint;
    use crate::{rat, ratio};

    fn tripod() -> (FiniteMetric, RealizationGraph) {
        let d = metric_345();
        let mut g = RealizationGraph::with_kuratowski_points(&d);
        let m = g.add_vertex(TightPoint::from_integers(&[1, 2, 3]));
        g.add_edge(0, m, rat(1)).unwrap();
        g.add_edge(1, m, rat(2)).unwrap();
        g.add_edge(2, m, rat(3)).unwrap();
        (d, g)
    }

    #[test]
    fn tripod_variable_counts() {
        let (d, g) = tripod();
        let full = build_subrealization_mip(&g, &d, false).unwrap();
        assert_eq!(full.model.num_binary(), 3);
        assert_eq!(full.model.variables.len(), 21);
        let reduced = build_subrealization_mip(&g, &d, true).unwrap();
        assert_eq!(reduced.model.variables.len(), 15);
        let pair_ab = (0..3)
            .flat_map(|e| (0..2).map(move |dir| flow_var_name(e, dir, 0)))
            .filter(|n| reduced.model.var_index(n).is_some())
            .count();
        assert_eq!(pair_ab, 4);
    }

    #[test]
    fn two_point_lp_text() {
        let d = int_metric(&["a", "b"], &[&[0, 5], &[5, 0]]);
        let mut g = RealizationGraph::with_kuratowski_points(&d);
        g.add_edge(0, 1, rat(5)).unwrap();
        let mip = build_subrealization_mip(&g, &d, false).unwrap();
        let lp = write_lp(&mip.model);
        assert!(lp.starts_with("Minimize obj: 5 xe0\n"), "{lp}");
        assert!(lp.contains(" c0p0: - f0d0p0 + f0d1p0 = -1\n"), "{lp}");
        assert!(lp.contains(" len0: 5 f0d0p0 + 5 f0d1p0 <= 5\n"), "{lp}");
        assert!(lp.ends_with("Binary\n xe0\nEnd\n"));

        let all = mip.assignment_for_edges(&g, &[true]);
        let r = check_assignment(&mip.model, &all).unwrap();
        assert!(r.feasible(), "{:?}", r.violations);
        assert_eq!(r.objective, rat(5));
    }

    #[test]
    fn conservation_rows_use_equality() {
        let (d, g) = tripod();
        let lp = write_lp(&build_subrealization_mip(&g, &d, false).unwrap().model);
        assert!(lp.lines().any(|l| l.starts_with(" c3p0:") && l.ends_with("= 0")));
    }

    #[test]
    fn dropping_a_tree_edge_breaks_conservation() {
        let (d, g) = tripod();
        let mip = build_subrealization_mip(&g, &d, true).unwrap();
        let ok = check_assignment(&mip.model, &mip.assignment_for_edges(&g, &[true; 3])).unwrap();
        assert!(ok.feasible());
        assert_eq!(ok.objective, rat(6));
        let broken = check_assignment(&mip.model, &mip.assignment_for_edges(&g, &[true, false, true])).unwrap();
        assert!(broken.violations.iter().any(|v| v.starts_with('c')));
    }

    #[test]
    fn missing_variable_is_an_error() {
        let (d, g) = tripod();
        let mip = build_subrealization_mip(&g, &d, true).unwrap();
        let mut a = mip.assignment_for_edges(&g, &[true; 3]);
        a.remove("xe1");
        assert_eq!(check_assignment(&mip.model, &a).unwrap_err(), Error::MissingVariable("xe1".into()));
    }

    #[test]
    fn not_a_realization() {
        let d = metric_345();
        let g = RealizationGraph::with_kuratowski_points(&d);
        assert!(build_subrealization_mip(&g, &d, false).is_err());
        let mut g = RealizationGraph::with_kuratowski_points(&d);
        g.add_edge(0, 1, rat(3)).unwrap();
        g.add_edge(1, 2, rat(5)).unwrap();
        assert!(matches!(build_subrealization_mip(&g, &d, false), Err(Error::NotARealization(_))));
    }

    #[test]
    fn decimals_and_scaling() {
        assert_eq!(decimal(&ratio(1, 2)), "0.5");
        assert_eq!(decimal(&ratio(-7, 4)), "-1.75");
        assert_eq!(decimal(&ratio(3, 40)), "0.075");
        assert_eq!(parse_decimal("0.075"), Some(ratio(3, 40)));
        assert_eq!(row_scale([ratio(1, 3), ratio(1, 2), ratio(5, 6)].iter()), rat(6));

        let mut m = MipModel::default();
        let a = m.add_variable("a".into(), VarKind::Continuous);
        let b = m.add_variable("b".into(), VarKind::Binary);
        m.objective = vec![(a, ratio(1, 2)), (b, rat(2))];
        m.constraints.push(Constraint {
            name: "r".into(),
            terms: vec![(a, ratio(1, 3)), (b, ratio(-1, 2))],
            relation: Relation::Ge,
            rhs: ratio(1, 6),
        });
        let lp = write_lp(&m);
        assert!(lp.contains(" r: 2 a - 3 b >= 1\n"), "{lp}");
        assert!(lp.contains("Minimize obj: 0.5 a + 2 b\n"), "{lp}");
        let back = read_lp(&lp).unwrap();
        assert_eq!(back.constraints[0].terms, vec![(0, rat(2)), (1, rat(-3))]);
        assert_eq!(back.objective, vec![(0, ratio(1, 2)), (1, rat(2))]);
        assert_eq!(back.variables[1].kind, VarKind::Binary);
    }

    #[test]
    fn lp_round_trip_preserves_the_model() {
        let (d, g) = tripod();
        for reduce in [false, true] {
            let mip = build_subrealization_mip(&g, &d, reduce).unwrap();
            let back = read_lp(&write_lp(&mip.model)).unwrap();
            assert_eq!(back.variables.len(), mip.model.variables.len());
            assert_eq!(back.constraints.len(), mip.model.constraints.len());
            let a = mip.assignment_for_edges(&g, &[true; 3]);
            let r1 = check_assignment(&mip.model, &a).unwrap();
            let r2 = check_assignment(&back, &a).unwrap();
            assert_eq!(r1, r2);
        }
    }

    #[test]
    fn long_rows_wrap() {
        let mut m = MipModel::default();
        let terms: Vec<_> = (0..100).map(|i| (m.add_variable(format!("v{i}"), VarKind::Continuous), rat(i + 1))).collect();
        m.constraints.push(Constraint { name: "big".into(), terms: terms.clone(), relation: Relation::Le, rhs: rat(7) });
        m.objective = terms;
        let lp = write_lp(&m);
        assert!(lp.lines().all(|l| l.len() <= LINE_WIDTH + 20));
        let back = read_lp(&lp).unwrap();
        assert_eq!(back.constraints[0].terms.len(), 100);
        assert_eq!(back.objective.len(), 100);
        assert_eq!(back.constraints[0].rhs, rat(7));
    }
}
