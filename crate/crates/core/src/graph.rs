//! Directed weighted graphs and the boundary-value problem attached to them.
//!
//! Nodes are dense indices `0..n`. An edge `(j, i)` with weight `w_{j,i} > 0`
//! makes `j` an in-neighbour of `i`; the solvers read in-neighbours when they
//! evaluate a node and out-neighbours when they push a newly accepted value
//! forward, so both directions are stored in compressed sparse row form.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = usize;

/// Immutable simple digraph with strictly positive edge weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    node_count: usize,
    in_offsets: Vec<usize>,
    in_src: Vec<NodeId>,
    in_weight: Vec<f64>,
    out_offsets: Vec<usize>,
    out_dst: Vec<NodeId>,
    out_weight: Vec<f64>,
}

impl Graph {
    /// Builds a graph on `node_count` nodes from `(src, dst, weight)` triples.
    ///
    /// Rejects self-loops, duplicate ordered pairs, out-of-range ids and
    /// weights that are not strictly positive and finite.
    pub fn new<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        if node_count == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut list: Vec<(NodeId, NodeId, f64)> = Vec::new();
        for (src, dst, weight) in edges {
            for node in [src, dst] {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange { node, node_count });
                }
            }
            if src == dst {
                return Err(Error::SelfLoop(src));
            }
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(Error::InvalidWeight { src, dst, weight });
            }
            list.push((src, dst, weight));
        }

        list.sort_by_key(|&(s, d, _)| (s, d));
        if let Some(w) = list.windows(2).find(|w| w[0].0 == w[1].0 && w[0].1 == w[1].1) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }

        let (out_offsets, out_dst, out_weight) =
            compress(node_count, list.iter().map(|&(s, d, w)| (s, d, w)));
        list.sort_by_key(|&(s, d, _)| (d, s));
        let (in_offsets, in_src, in_weight) =
            compress(node_count, list.iter().map(|&(s, d, w)| (d, s, w)));

        Ok(Self {
            node_count,
            in_offsets,
            in_src,
            in_weight,
            out_offsets,
            out_dst,
            out_weight,
        })
    }

    /// Builds a graph whose node count is one past the largest id mentioned.
    pub fn from_edges(edges: &[(NodeId, NodeId, f64)]) -> Result<Self> {
        let n = edges.iter().map(|&(s, d, _)| s.max(d) + 1).max().unwrap_or(0);
        Self::new(n, edges.iter().copied())
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.out_dst.len()
    }

    /// In-neighbours `j` of `i` together with `w_{j,i}`, ordered by `j`.
    pub fn in_neighbors(&self, i: NodeId) -> impl ExactSizeIterator<Item = (NodeId, f64)> + '_ {
        let range = self.in_offsets[i]..self.in_offsets[i + 1];
        self.in_src[range.clone()]
            .iter()
            .copied()
            .zip(self.in_weight[range].iter().copied())
    }

    /// Out-neighbours `k` of `i` together with `w_{i,k}`, ordered by `k`.
    pub fn out_neighbors(&self, i: NodeId) -> impl ExactSizeIterator<Item = (NodeId, f64)> + '_ {
        let range = self.out_offsets[i]..self.out_offsets[i + 1];
        self.out_dst[range.clone()]
            .iter()
            .copied()
            .zip(self.out_weight[range].iter().copied())
    }

    pub fn in_degree(&self, i: NodeId) -> usize {
        self.in_offsets[i + 1] - self.in_offsets[i]
    }

    pub fn out_degree(&self, i: NodeId) -> usize {
        self.out_offsets[i + 1] - self.out_offsets[i]
    }

    /// `w_{src,dst}` if the edge exists.
    pub fn weight(&self, src: NodeId, dst: NodeId) -> Option<f64> {
        if src >= self.node_count || dst >= self.node_count {
            return None;
        }
        let range = self.in_offsets[dst]..self.in_offsets[dst + 1];
        self.in_src[range.clone()]
            .binary_search(&src)
            .ok()
            .map(|k| self.in_weight[range.start + k])
    }

    pub fn has_edge(&self, src: NodeId, dst: NodeId) -> bool {
        self.weight(src, dst).is_some()
    }

    /// All edges as `(src, dst, weight)`, sorted by `(src, dst)`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        (0..self.node_count).flat_map(move |s| self.out_neighbors(s).map(move |(d, w)| (s, d, w)))
    }

    /// Mean in-degree over all nodes.
    pub fn mean_degree(&self) -> f64 {
        self.edge_count() as f64 / self.node_count as f64
    }

    /// Same edge set with every weight replaced by `f(src, dst, w)`.
    pub fn map_weights<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(NodeId, NodeId, f64) -> f64,
    {
        let edges: Vec<_> = self.edges().map(|(s, d, w)| (s, d, f(s, d, w))).collect();
        Self::new(self.node_count, edges)
    }

    /// Subgraph on the same nodes keeping only edges accepted by `keep`.
    pub fn filter_edges<F>(&self, mut keep: F) -> Self
    where
        F: FnMut(NodeId, NodeId, f64) -> bool,
    {
        let edges: Vec<_> = self.edges().filter(|&(s, d, w)| keep(s, d, w)).collect();
        Self::new(self.node_count, edges).expect("subgraph of a valid graph is valid")
    }
}

fn compress<I>(n: usize, sorted: I) -> (Vec<usize>, Vec<NodeId>, Vec<f64>)
where
    I: Iterator<Item = (NodeId, NodeId, f64)>,
{
    let mut offsets = vec![0usize; n + 1];
    let mut targets = Vec::new();
    let mut weights = Vec::new();
    for (key, other, w) in sorted {
        offsets[key + 1] += 1;
        targets.push(other);
        weights.push(w);
    }
    for k in 0..n {
        offsets[k + 1] += offsets[k];
    }
    (offsets, targets, weights)
}

/// Nodes reachable from `sources` by following edge direction, sorted.
pub fn reachable_from(graph: &Graph, sources: &[NodeId]) -> Vec<NodeId> {
    let mut seen = vec![false; graph.node_count()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if s < seen.len() && !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(j) = queue.pop_front() {
        for (k, _) in graph.out_neighbors(j) {
            if !seen[k] {
                seen[k] = true;
                queue.push_back(k);
            }
        }
    }
    seen.iter().enumerate().filter(|(_, &r)| r).map(|(i, _)| i).collect()
}

/// Exponent `p` of the local `lp` norm, `1 <= p <= inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub const ONE: Exponent = Exponent::Finite(1.0);
    pub const TWO: Exponent = Exponent::Finite(2.0);

    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Accepts a decimal, a fraction such as `3/2`, or `inf`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") {
            return Ok(Exponent::Infinity);
        }
        let parsed = match t.split_once('/') {
            Some((a, b)) => a
                .trim()
                .parse::<f64>()
                .ok()
                .zip(b.trim().parse::<f64>().ok())
                .map(|(a, b)| a / b),
            None => t.parse::<f64>().ok(),
        };
        match parsed {
            Some(p) => Exponent::new(p),
            None => Err(Error::InvalidInput(format!("cannot parse exponent '{s}'"))),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => serializer.serialize_f64(*p),
            Exponent::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(p) => Exponent::new(p),
            Raw::Text(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Boundary data, slowness and model exponent for one solve.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    boundary: Vec<(NodeId, f64)>,
    boundary_value: Vec<Option<f64>>,
    slowness: Vec<f64>,
    p: Exponent,
}

impl ProblemSpec {
    /// `boundary` pairs a node with its prescribed arrival time.
    ///
    /// An empty boundary is accepted here so that [`validate`] can report it;
    /// the solvers reject it.
    pub fn new(
        node_count: usize,
        boundary: Vec<(NodeId, f64)>,
        slowness: Vec<f64>,
        p: Exponent,
    ) -> Result<Self> {
        if slowness.len() != node_count {
            return Err(Error::SlownessLength { got: slowness.len(), expected: node_count });
        }
        if let Some((node, &value)) =
            slowness.iter().enumerate().find(|(_, s)| !(s.is_finite() && **s >= 0.0))
        {
            return Err(Error::InvalidSlowness { node, value });
        }
        if let Exponent::Finite(v) = p {
            Exponent::new(v)?;
        }
        let mut boundary_value = vec![None; node_count];
        for &(node, value) in &boundary {
            if node >= node_count {
                return Err(Error::NodeOutOfRange { node, node_count });
            }
            if !value.is_finite() {
                return Err(Error::InvalidBoundaryValue { node, value });
            }
            if boundary_value[node].replace(value).is_some() {
                return Err(Error::DuplicateBoundary(node));
            }
        }
        let mut boundary = boundary;
        boundary.sort_by_key(|&(n, _)| n);
        Ok(Self { boundary, boundary_value, slowness, p })
    }

    /// Zero boundary values on `sources` and unit slowness everywhere.
    pub fn unit(node_count: usize, sources: &[NodeId], p: Exponent) -> Result<Self> {
        Self::new(
            node_count,
            sources.iter().map(|&s| (s, 0.0)).collect(),
            vec![1.0; node_count],
            p,
        )
    }

    /// Zero boundary values on `sources` with the given slowness.
    pub fn with_sources(sources: &[NodeId], slowness: Vec<f64>, p: Exponent) -> Result<Self> {
        Self::new(slowness.len(), sources.iter().map(|&s| (s, 0.0)).collect(), slowness, p)
    }

    pub fn node_count(&self) -> usize {
        self.slowness.len()
    }

    /// Boundary entries sorted by node id.
    pub fn boundary(&self) -> &[(NodeId, f64)] {
        &self.boundary
    }

    pub fn boundary_nodes(&self) -> Vec<NodeId> {
        self.boundary.iter().map(|&(n, _)| n).collect()
    }

    pub fn boundary_value(&self, i: NodeId) -> Option<f64> {
        self.boundary_value[i]
    }

    pub fn is_boundary(&self, i: NodeId) -> bool {
        self.boundary_value[i].is_some()
    }

    pub fn slowness(&self) -> &[f64] {
        &self.slowness
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn with_p(&self, p: Exponent) -> Self {
        Self { p, ..self.clone() }
    }

    pub fn with_slowness(&self, slowness: Vec<f64>) -> Result<Self> {
        Self::new(self.node_count(), self.boundary.clone(), slowness, self.p)
    }
}

/// Problems that make a solve degenerate without making it invalid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub empty_boundary: bool,
    /// Interior nodes no boundary node can reach; their arrival time is `+inf`.
    pub unreachable: Vec<NodeId>,
    /// Interior nodes with `s_i = 0`.
    pub zero_slowness: Vec<NodeId>,
    /// The spec was built for a different node count than the graph.
    pub size_mismatch: bool,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        !self.empty_boundary
            && !self.size_mismatch
            && self.unreachable.is_empty()
            && self.zero_slowness.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            return f.write_str("ok");
        }
        let mut parts = Vec::new();
        if self.size_mismatch {
            parts.push("problem size does not match graph".to_string());
        }
        if self.empty_boundary {
            parts.push("empty boundary".to_string());
        }
        if !self.unreachable.is_empty() {
            parts.push(format!("unreachable nodes {:?}", self.unreachable));
        }
        if !self.zero_slowness.is_empty() {
            parts.push(format!("zero slowness at {:?}", self.zero_slowness));
        }
        f.write_str(&parts.join("; "))
    }
}

pub fn validate(graph: &Graph, spec: &ProblemSpec) -> ValidationReport {
    let mut report = ValidationReport {
        empty_boundary: spec.boundary().is_empty(),
        ..Default::default()
    };
    if spec.node_count() != graph.node_count() {
        report.size_mismatch = true;
        return report;
    }
    let mut reached = vec![false; graph.node_count()];
    for i in reachable_from(graph, &spec.boundary_nodes()) {
        reached[i] = true;
    }
    for i in 0..graph.node_count() {
        if spec.is_boundary(i) {
            continue;
        }
        if !reached[i] {
            report.unreachable.push(i);
        }
        if spec.slowness()[i] == 0.0 {
            report.zero_slowness.push(i);
        }
    }
    report
}
