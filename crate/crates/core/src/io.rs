//! Text formats: edge lists, trust files, point clouds and arrival CSVs.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::front::ArrivalField;
use crate::graph::{Graph, NodeId};
use crate::labelprop::PointCloud;
use crate::trust::{CategoryMap, TrustGraph};

/// External node names in dense-id order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IdTable {
    names: Vec<String>,
    lookup: HashMap<String, NodeId>,
    /// Ids were plain integers used as-is.
    numeric: bool,
}

impl IdTable {
    pub fn identity(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let lookup = names.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Self { names, lookup, numeric: true }
    }

    pub fn is_numeric(&self) -> bool {
        self.numeric
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.names[id]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id(&self, name: &str) -> Option<NodeId> {
        self.lookup.get(name.trim()).copied()
    }

    /// Resolves a name, reporting unknown ones.
    pub fn resolve(&self, name: &str) -> Result<NodeId> {
        self.id(name).ok_or_else(|| Error::InvalidInput(format!("unknown node {name:?}")))
    }

    fn intern(&mut self, name: &str) -> NodeId {
        if let Some(&i) = self.lookup.get(name) {
            return i;
        }
        self.names.push(name.to_string());
        self.lookup.insert(name.to_string(), self.names.len() - 1);
        self.names.len() - 1
    }
}

/// Non-blank, non-comment lines with 1-based line numbers, CR stripped and
/// each split on commas into trimmed fields.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(k, line)| {
        let line = line.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((k + 1, line.split(',').map(str::trim).collect()))
        }
    })
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Rows of `(src, dst, weight)` with ids resolved either as integers (when
/// every id parses as one) or by first appearance.
fn parse_triples<F>(text: &str, mut weight: F) -> Result<(Graph, IdTable)>
where
    F: FnMut(&str) -> Option<f64>,
{
    let mut rows: Vec<(usize, String, String, f64)> = Vec::new();
    for (idx, (line, fields)) in records(text).enumerate() {
        if fields.len() != 3 {
            return Err(parse_err(line, format!("expected 3 comma-separated fields, found {}", fields.len())));
        }
        match weight(fields[2]) {
            Some(w) => {
                if !(w > 0.0 && w.is_finite()) {
                    return Err(parse_err(line, format!("weight must be positive and finite, got {}", fields[2])));
                }
                if fields[0].is_empty() || fields[1].is_empty() {
                    return Err(parse_err(line, "empty node id"));
                }
                rows.push((line, fields[0].to_string(), fields[1].to_string(), w));
            }
            // A first row with a non-numeric weight is a header.
            None if idx == 0 => {}
            None => return Err(parse_err(line, format!("cannot parse weight {:?}", fields[2]))),
        }
    }
    let numeric = rows.iter().all(|r| r.1.parse::<usize>().is_ok() && r.2.parse::<usize>().is_ok());
    let mut ids = IdTable::default();
    let mut edges = Vec::with_capacity(rows.len());
    if numeric {
        let n = rows.iter().map(|r| r.1.parse::<usize>().unwrap().max(r.2.parse().unwrap()) + 1).max().unwrap_or(0);
        ids = IdTable::identity(n);
        for (line, s, d, w) in &rows {
            edges.push((*line, s.parse().unwrap(), d.parse().unwrap(), *w));
        }
    } else {
        for (line, s, d, w) in &rows {
            let a = ids.intern(s);
            let b = ids.intern(d);
            edges.push((*line, a, b, *w));
        }
    }
    let n = ids.len();
    let mut seen = std::collections::HashSet::new();
    for &(line, a, b, _) in &edges {
        if a == b {
            return Err(parse_err(line, format!("self-loop at {}", ids.name(a))));
        }
        if !seen.insert((a, b)) {
            return Err(parse_err(line, format!("duplicate edge ({}, {})", ids.name(a), ids.name(b))));
        }
    }
    let graph = Graph::new(n, edges.into_iter().map(|(_, a, b, w)| (a, b, w)))
        .map_err(|e| if n == 0 { Error::EmptyGraph } else { e })?;
    Ok((graph, ids))
}

/// Parses `src,dst,weight` lines. `#` starts a comment line and a header row
/// is optional.
pub fn parse_edge_list(text: &str) -> Result<(Graph, IdTable)> {
    parse_triples(text, |s| s.parse::<f64>().ok())
}

/// Trust file: `truster,trustee,rating` where the rating is a number or a
/// category name from `categories`.
pub fn parse_trust_edges(text: &str, categories: &CategoryMap) -> Result<(TrustGraph, IdTable)> {
    let (g, ids) = parse_triples(text, |s| s.parse::<f64>().ok().or_else(|| categories.rating(s)))?;
    Ok((TrustGraph::from_graph(g), ids))
}

/// `src,dst,weight` with a header; weights in shortest round-trip form.
pub fn serialize_edge_list(graph: &Graph, ids: Option<&IdTable>) -> String {
    let mut out = String::from("src,dst,weight\n");
    for (a, b, w) in graph.edges() {
        match ids {
            Some(t) => writeln!(out, "{},{},{}", t.name(a), t.name(b), w),
            None => writeln!(out, "{a},{b},{w}"),
        }
        .expect("writing to a String");
    }
    out
}

/// `printf("%.12g")`: 12 significant digits, trailing zeros dropped,
/// exponent form outside `1e-5 <= |x| < 1e12`; `inf` / `-inf` / `nan`.
pub fn format_g12(x: f64) -> String {
    const P: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (P - 1 - exp) as usize, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `node,arrival_time,front_index` rows in node order; unreached nodes are
/// written as `inf` with front index `-1`.
pub fn write_arrival_csv(field: &ArrivalField) -> String {
    write_named_arrival_csv(field, None)
}

/// Like [`write_arrival_csv`] but prints node names from `names`; rows stay
/// in dense-id order.
pub fn write_named_arrival_csv(field: &ArrivalField, names: Option<&IdTable>) -> String {
    let mut out = String::from("node,arrival_time,front_index\n");
    for i in 0..field.len() {
        let front = field.front_index(i).map_or_else(|| "-1".to_string(), |k| k.to_string());
        let time = format_g12(field.time(i));
        match names {
            Some(t) => writeln!(out, "{},{time},{front}", t.name(i)),
            None => writeln!(out, "{i},{time},{front}"),
        }
        .expect("writing to a String");
    }
    out
}

pub fn parse_arrival_csv(text: &str) -> Result<ArrivalField> {
    let mut u = Vec::new();
    let mut fronts = Vec::new();
    for (idx, (line, fields)) in records(text).enumerate() {
        if idx == 0 && fields.first().is_some_and(|f| f.eq_ignore_ascii_case("node")) {
            continue;
        }
        if fields.len() != 3 {
            return Err(parse_err(line, format!("expected 3 fields, found {}", fields.len())));
        }
        let node: usize = fields[0].parse().map_err(|_| parse_err(line, format!("bad node id {:?}", fields[0])))?;
        if node != u.len() {
            return Err(parse_err(line, format!("expected node {}, found {node}", u.len())));
        }
        let t: f64 = fields[1].parse().map_err(|_| parse_err(line, format!("bad time {:?}", fields[1])))?;
        let k: i64 = fields[2].parse().map_err(|_| parse_err(line, format!("bad front index {:?}", fields[2])))?;
        u.push(t);
        fronts.push(if k < 0 { None } else { Some(k as usize) });
    }
    ArrivalField::from_parts(u, fronts)
}

/// Labels per node (`-1` when unlabeled) plus a tie flag.
pub fn write_label_csv(names: Option<&IdTable>, labels: &[Option<usize>], ties: &[bool]) -> String {
    let mut out = String::from("node,label,tie\n");
    for (i, l) in labels.iter().enumerate() {
        let name = names.map_or_else(|| i.to_string(), |t| t.name(i).to_string());
        let label = l.map_or_else(|| "-1".to_string(), |l| l.to_string());
        writeln!(out, "{name},{label},{}", u8::from(ties[i])).expect("writing to a String");
    }
    out
}

/// One point per row. With `labeled`, the last column is an integer label.
/// A first row that does not parse as numbers is taken as a header.
pub fn parse_point_csv(text: &str, labeled: bool) -> Result<PointCloud> {
    let mut coords = Vec::new();
    let mut labels = Vec::new();
    let mut dim = None;
    for (idx, (line, fields)) in records(text).enumerate() {
        let values: Option<Vec<f64>> = fields.iter().map(|f| f.parse::<f64>().ok()).collect();
        let Some(values) = values else {
            if idx == 0 {
                continue;
            }
            return Err(parse_err(line, "non-numeric field"));
        };
        let width = values.len() - usize::from(labeled);
        if width == 0 {
            return Err(parse_err(line, "no coordinates"));
        }
        match dim {
            None => dim = Some(width),
            Some(d) if d != width => {
                return Err(parse_err(line, format!("expected {d} coordinates, found {width}")));
            }
            _ => {}
        }
        coords.extend_from_slice(&values[..width]);
        if labeled {
            let l = values[width];
            if l < 0.0 || l.fract() != 0.0 {
                return Err(parse_err(line, format!("label must be a nonnegative integer, got {l}")));
            }
            labels.push(l as usize);
        }
    }
    let dim = dim.ok_or_else(|| Error::InvalidInput("no points".into()))?;
    PointCloud::new(dim, coords, labeled.then_some(labels))
}

/// Parses a comma-separated list of node names.
pub fn parse_node_list(list: &str, ids: &IdTable) -> Result<Vec<NodeId>> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| ids.resolve(s)).collect()
}
