//! Brute-force references: generalised travel times over path sets and a
//! subset-enumerating value iteration.
//!
//! These exist to cross-check [`crate::front`]. They enumerate simple paths
//! and every nonempty subset of them, so they only scale to a handful of
//! nodes; the caps in [`OracleCaps`] turn runaway inputs into an explicit
//! [`Error::OracleScaleExceeded`].
//!
//! A path set's travel time is defined recursively through its penultimate
//! truncations, grounded at the trivial one-node path at the source, whose
//! time is the source's boundary value.
//!
//! With the quadratic model a path set can mix in a neighbour whose own
//! travel time is *later* than the resulting time, which lowers the larger
//! root of the quadratic below anything a causal front could reach. Travel
//! times are therefore evaluated under [`Admissibility::Causal`] by default:
//! every truncation level must satisfy `T(P) >= T(P_j)` for all its
//! penultimate nodes `j`. [`Admissibility::Unrestricted`] evaluates the bare
//! recursion.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::front::ArrivalField;
use crate::graph::{Exponent, Graph, NodeId, ProblemSpec};

/// Slack allowed in the causality test `T(P) >= T(P_j)`.
pub const CAUSALITY_SLACK: f64 = 1e-12;

/// Simple directed path `(x_0 = i_1, ..., i_M)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(Vec<NodeId>);

impl Path {
    /// Checks that consecutive nodes are joined by edges and no node repeats.
    pub fn new(graph: &Graph, nodes: Vec<NodeId>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidPath("a path has at least one node".into()));
        }
        let mut seen = vec![false; graph.node_count()];
        for &v in &nodes {
            if v >= graph.node_count() {
                return Err(Error::NodeOutOfRange { node: v, node_count: graph.node_count() });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPath(format!("node {v} repeats")));
            }
        }
        if let Some(w) = nodes.windows(2).find(|w| !graph.has_edge(w[0], w[1])) {
            return Err(Error::InvalidPath(format!("missing edge ({}, {})", w[0], w[1])));
        }
        Ok(Self(nodes))
    }

    pub fn trivial(node: NodeId) -> Self {
        Self(vec![node])
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.0
    }

    pub fn source(&self) -> NodeId {
        self.0[0]
    }

    pub fn target(&self) -> NodeId {
        *self.0.last().expect("paths are nonempty")
    }

    pub fn is_trivial(&self) -> bool {
        self.0.len() == 1
    }

    /// `(p_{x0,j}, j)` with `self = (p_{x0,j}, (j, i))`; `None` for the
    /// trivial path.
    pub fn truncate(&self) -> Option<(Path, NodeId)> {
        if self.is_trivial() {
            return None;
        }
        let head = self.0[..self.0.len() - 1].to_vec();
        let j = *head.last().expect("nonempty");
        Some((Path(head), j))
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Nonempty set of paths with a common source and target, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathSet(Vec<Path>);

impl PathSet {
    pub fn new(mut paths: Vec<Path>) -> Result<Self> {
        let first = paths
            .first()
            .ok_or_else(|| Error::InvalidPath("a path set is nonempty".into()))?;
        let (source, target) = (first.source(), first.target());
        if paths.iter().any(|p| p.source() != source || p.target() != target) {
            return Err(Error::InvalidPath("paths in a set share source and target".into()));
        }
        paths.sort();
        paths.dedup();
        Ok(Self(paths))
    }

    pub fn paths(&self) -> &[Path] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn source(&self) -> NodeId {
        self.0[0].source()
    }

    pub fn target(&self) -> NodeId {
        self.0[0].target()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_trivial()
    }
}

/// Penultimate truncations `j -> P^i_{x0,j}` for `j` in `K(P)`.
///
/// The trivial path set has no truncations and maps to an empty map.
pub fn penultimate_truncation(ps: &PathSet) -> BTreeMap<NodeId, PathSet> {
    let mut groups: BTreeMap<NodeId, Vec<Path>> = BTreeMap::new();
    for path in ps.paths() {
        if let Some((head, j)) = path.truncate() {
            groups.entry(j).or_default().push(head);
        }
    }
    groups
        .into_iter()
        .map(|(j, paths)| (j, PathSet::new(paths).expect("truncations share endpoints")))
        .collect()
}

/// Generalised travel time over path sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TravelModel {
    /// `min_j (T_j + s / w_j)`; pairs with `p = inf`.
    Minimum,
    /// `mu + sqrt(s^2 / z - sigma^2)` with squared-weight moments; pairs with `p = 2`.
    Quadratic,
    /// `(sum w T_j + s) / sum w`; pairs with `p = 1`.
    Linear,
}

impl TravelModel {
    pub const ALL: [TravelModel; 3] = [TravelModel::Minimum, TravelModel::Quadratic, TravelModel::Linear];

    /// Exponent of the eikonal equation this model is equivalent to.
    pub fn exponent(self) -> Exponent {
        match self {
            TravelModel::Minimum => Exponent::Infinity,
            TravelModel::Quadratic => Exponent::TWO,
            TravelModel::Linear => Exponent::ONE,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TravelModel::Minimum => "2(i)",
            TravelModel::Quadratic => "2(ii)",
            TravelModel::Linear => "2(iii)",
        }
    }

    /// Combines truncation times `(T_j, w_{j,i})` at a node with slowness `s`.
    /// `None` when the quadratic model's discriminant is negative.
    pub fn combine(self, parts: &[(f64, f64)], s: f64) -> Option<f64> {
        debug_assert!(!parts.is_empty());
        match self {
            TravelModel::Minimum => {
                Some(parts.iter().map(|&(t, w)| t + s / w).fold(f64::INFINITY, f64::min))
            }
            TravelModel::Linear => {
                let y: f64 = parts.iter().map(|&(_, w)| w).sum();
                let m: f64 = parts.iter().map(|&(t, w)| w * t).sum();
                Some((m + s) / y)
            }
            TravelModel::Quadratic => {
                let z: f64 = parts.iter().map(|&(_, w)| w * w).sum();
                let mu = parts.iter().map(|&(t, w)| w * w * t).sum::<f64>() / z;
                let var = parts.iter().map(|&(t, w)| w * w * (t - mu) * (t - mu)).sum::<f64>() / z;
                let ratio = s * s / z;
                let disc = ratio - var;
                if disc < -1e-12 * ratio.max(1.0) {
                    None
                } else {
                    Some(mu + disc.max(0.0).sqrt())
                }
            }
        }
    }
}

impl fmt::Display for TravelModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Admissibility {
    /// Every truncation level must satisfy `T(P) >= T(P_j)`.
    Causal,
    /// The bare recursion.
    Unrestricted,
}

/// Enumeration limits per `(x0, i)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleCaps {
    pub max_paths: usize,
    pub max_subsets: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        Self { max_paths: 64, max_subsets: 1 << 16 }
    }
}

/// All simple directed paths from `x0` to `i`, in lexicographic order.
pub fn enumerate_simple_paths(graph: &Graph, x0: NodeId, i: NodeId, cap: usize) -> Result<Vec<Path>> {
    enumerate_paths_within(graph, x0, i, cap, |_| true)
}

/// Simple paths from `x0` to `i` whose intermediate nodes all satisfy `allowed`.
fn enumerate_paths_within<F>(graph: &Graph, x0: NodeId, i: NodeId, cap: usize, allowed: F) -> Result<Vec<Path>>
where
    F: Fn(NodeId) -> bool,
{
    let n = graph.node_count();
    for v in [x0, i] {
        if v >= n {
            return Err(Error::NodeOutOfRange { node: v, node_count: n });
        }
    }
    if x0 == i {
        return Err(Error::InvalidInput("path endpoints must differ".into()));
    }
    let mut out = Vec::new();
    let mut on_path = vec![false; n];
    let mut stack = vec![x0];
    on_path[x0] = true;
    dfs(graph, i, cap, &allowed, &mut stack, &mut on_path, &mut out)?;
    Ok(out)
}

fn dfs<F: Fn(NodeId) -> bool>(
    graph: &Graph,
    target: NodeId,
    cap: usize,
    allowed: &F,
    stack: &mut Vec<NodeId>,
    on_path: &mut [bool],
    out: &mut Vec<Path>,
) -> Result<()> {
    let last = *stack.last().expect("nonempty");
    for (k, _) in graph.out_neighbors(last) {
        if on_path[k] {
            continue;
        }
        if k == target {
            if out.len() == cap {
                return Err(Error::OracleScaleExceeded(format!(
                    "more than {cap} simple paths from {} to {target}",
                    stack[0]
                )));
            }
            let mut nodes = stack.clone();
            nodes.push(k);
            out.push(Path(nodes));
        } else if allowed(k) {
            on_path[k] = true;
            stack.push(k);
            dfs(graph, target, cap, allowed, stack, on_path, out)?;
            stack.pop();
            on_path[k] = false;
        }
    }
    Ok(())
}

/// Evaluates the recursion directly on explicit path sets.
pub struct TravelTimeEvaluator<'a> {
    graph: &'a Graph,
    slowness: &'a [f64],
    model: TravelModel,
    admissibility: Admissibility,
    source_value: f64,
    memo: HashMap<PathSet, Option<f64>>,
}

impl<'a> TravelTimeEvaluator<'a> {
    pub fn new(graph: &'a Graph, slowness: &'a [f64], model: TravelModel, admissibility: Admissibility) -> Self {
        Self { graph, slowness, model, admissibility, source_value: 0.0, memo: HashMap::new() }
    }

    /// Time of the trivial path at the source; defaults to 0.
    pub fn with_source_value(mut self, value: f64) -> Self {
        self.source_value = value;
        self.memo.clear();
        self
    }

    /// `None` when the set is inadmissible (negative discriminant, or a
    /// causality violation under [`Admissibility::Causal`]).
    pub fn evaluate(&mut self, ps: &PathSet) -> Option<f64> {
        if ps.is_trivial() {
            return Some(self.source_value);
        }
        if let Some(&v) = self.memo.get(ps) {
            return v;
        }
        let i = ps.target();
        let mut parts = Vec::new();
        let mut value = None;
        let mut ok = true;
        for (j, sub) in penultimate_truncation(ps) {
            match self.evaluate(&sub) {
                Some(t) => parts.push((t, self.graph.weight(j, i).expect("path edges exist"))),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            value = self.model.combine(&parts, self.slowness[i]);
            if let (Some(v), Admissibility::Causal) = (value, self.admissibility) {
                if parts.iter().any(|&(t, _)| v < t - CAUSALITY_SLACK) {
                    value = None;
                }
            }
        }
        self.memo.insert(ps.clone(), value);
        value
    }
}

/// Travel time of `ps` under `model` by the bare recursion, with the trivial
/// path at the source worth 0. `None` when the quadratic discriminant is
/// negative somewhere in the recursion.
pub fn travel_time(graph: &Graph, slowness: &[f64], ps: &PathSet, model: TravelModel) -> Option<f64> {
    TravelTimeEvaluator::new(graph, slowness, model, Admissibility::Unrestricted).evaluate(ps)
}

/// Result of exhaustively minimising over all nonempty subsets of the simple
/// paths between two nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSetMinimum {
    pub value: f64,
    /// Every path set attaining `value` within [`CAUSALITY_SLACK`].
    pub minimizers: Vec<PathSet>,
    pub admissible: usize,
    pub evaluated: usize,
}

/// Paths to `i` plus, for each path, the index of every prefix in the list of
/// prefixes ending at the same node. Path sets become bit masks over these
/// lists, which keeps the subset enumeration allocation-free.
struct PrefixIndex {
    source: NodeId,
    /// Prefix paths ending at each node.
    lists: Vec<Vec<Path>>,
    /// For `(node, idx)`: the truncation `(j, idx_j)`, absent for the trivial path.
    parent: Vec<Vec<Option<(NodeId, usize)>>>,
}

impl PrefixIndex {
    fn build(graph: &Graph, top: &[Path]) -> Result<Self> {
        let n = graph.node_count();
        let source = top[0].source();
        let mut lists: Vec<Vec<Path>> = vec![Vec::new(); n];
        let mut lookup: HashMap<Path, usize> = HashMap::new();
        let mut parent: Vec<Vec<Option<(NodeId, usize)>>> = vec![Vec::new(); n];
        for path in top {
            let nodes = path.nodes();
            let mut prev: Option<(NodeId, usize)> = None;
            for len in 1..=nodes.len() {
                let prefix = Path(nodes[..len].to_vec());
                let node = prefix.target();
                let idx = match lookup.get(&prefix) {
                    Some(&idx) => idx,
                    None => {
                        let idx = lists[node].len();
                        if idx == 64 {
                            return Err(Error::OracleScaleExceeded(format!(
                                "more than 64 distinct prefixes ending at node {node}"
                            )));
                        }
                        lists[node].push(prefix.clone());
                        parent[node].push(prev);
                        lookup.insert(prefix, idx);
                        idx
                    }
                };
                prev = Some((node, idx));
            }
        }
        Ok(Self { source, lists, parent })
    }

    fn to_path_set(&self, node: NodeId, mask: u64) -> PathSet {
        let paths = (0..self.lists[node].len())
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| self.lists[node][b].clone())
            .collect();
        PathSet::new(paths).expect("nonempty mask")
    }
}

struct MaskEvaluator<'a> {
    graph: &'a Graph,
    slowness: &'a [f64],
    model: TravelModel,
    admissibility: Admissibility,
    source_value: f64,
    index: &'a PrefixIndex,
    memo: HashMap<(NodeId, u64), Option<f64>>,
}

impl MaskEvaluator<'_> {
    fn evaluate(&mut self, node: NodeId, mask: u64) -> Option<f64> {
        if node == self.index.source {
            return Some(self.source_value);
        }
        if let Some(&v) = self.memo.get(&(node, mask)) {
            return v;
        }
        let mut groups: Vec<(NodeId, u64)> = Vec::new();
        let mut bits = mask;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let (j, idx) = self.index.parent[node][b].expect("non-trivial prefix");
            match groups.iter_mut().find(|(g, _)| *g == j) {
                Some((_, m)) => *m |= 1 << idx,
                None => groups.push((j, 1 << idx)),
            }
        }
        let mut parts = Vec::with_capacity(groups.len());
        let mut value = None;
        let mut ok = true;
        for (j, sub) in groups {
            match self.evaluate(j, sub) {
                Some(t) => parts.push((t, self.graph.weight(j, node).expect("edge"))),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            value = self.model.combine(&parts, self.slowness[node]);
            if let (Some(v), Admissibility::Causal) = (value, self.admissibility) {
                if parts.iter().any(|&(t, _)| v < t - CAUSALITY_SLACK) {
                    value = None;
                }
            }
        }
        self.memo.insert((node, mask), value);
        value
    }
}

/// Exhaustive minimum of `T` over all nonempty subsets of `paths`, which must
/// share source and target. The trivial path at the source is worth
/// `source_value`.
pub fn minimize_over_subsets(
    graph: &Graph,
    slowness: &[f64],
    paths: &[Path],
    model: TravelModel,
    admissibility: Admissibility,
    source_value: f64,
    caps: OracleCaps,
) -> Result<PathSetMinimum> {
    if paths.is_empty() {
        return Err(Error::InvalidInput("no paths to minimise over".into()));
    }
    PathSet::new(paths.to_vec())?;
    let k = paths.len();
    if k > 63 || (1usize << k) - 1 > caps.max_subsets {
        return Err(Error::OracleScaleExceeded(format!(
            "{k} paths give 2^{k} - 1 path sets, cap is {}",
            caps.max_subsets
        )));
    }
    let index = PrefixIndex::build(graph, paths)?;
    let target = paths[0].target();
    // Top-level bit b of the subset mask refers to paths[b]; map it to the
    // prefix list of the target.
    let top_bits: Vec<u64> = paths
        .iter()
        .map(|p| {
            let idx = index.lists[target].iter().position(|q| q == p).expect("indexed");
            1u64 << idx
        })
        .collect();
    let mut eval = MaskEvaluator {
        graph,
        slowness,
        model,
        admissibility,
        source_value,
        index: &index,
        memo: HashMap::new(),
    };
    let mut best = f64::INFINITY;
    let mut best_masks: Vec<u64> = Vec::new();
    let mut admissible = 0;
    let total = (1u64 << k) - 1;
    for subset in 1..=total {
        let mut mask = 0u64;
        let mut bits = subset;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            mask |= top_bits[b];
        }
        let Some(v) = eval.evaluate(target, mask) else { continue };
        admissible += 1;
        if v < best - CAUSALITY_SLACK {
            best = v;
            best_masks.clear();
            best_masks.push(mask);
        } else if v <= best + CAUSALITY_SLACK {
            best = best.min(v);
            best_masks.push(mask);
        }
    }
    // Drop masks that fell out of the tolerance band as `best` decreased.
    let minimizers = best_masks
        .into_iter()
        .filter(|&m| eval.evaluate(target, m).is_some_and(|v| v <= best + CAUSALITY_SLACK))
        .map(|m| index.to_path_set(target, m))
        .collect();
    Ok(PathSetMinimum { value: best, minimizers, admissible, evaluated: total as usize })
}

/// First arrival time at interior node `i`: the minimum over boundary nodes
/// `x0` and over all causal path sets from `x0` to `i`. Intermediate nodes of
/// the paths are interior. Returns `+inf` when no boundary node reaches `i`.
///
/// Each path set has a single source, so with several boundary nodes the
/// quadratic and linear models cannot mix fronts from different sources the
/// way the eikonal update does; agreement with the front solver is only
/// expected for one boundary node (or for [`TravelModel::Minimum`]).
pub fn first_arrival(
    graph: &Graph,
    spec: &ProblemSpec,
    i: NodeId,
    model: TravelModel,
    caps: OracleCaps,
) -> Result<f64> {
    if spec.node_count() != graph.node_count() {
        return Err(Error::InvalidInput("problem size does not match graph".into()));
    }
    if spec.is_boundary(i) {
        return Err(Error::InvalidInput(format!("node {i} is a boundary node")));
    }
    let mut best = f64::INFINITY;
    for &(x0, value) in spec.boundary() {
        let paths = enumerate_paths_within(graph, x0, i, caps.max_paths, |v| !spec.is_boundary(v))?;
        if paths.is_empty() {
            continue;
        }
        let m = minimize_over_subsets(
            graph,
            spec.slowness(),
            &paths,
            model,
            Admissibility::Causal,
            value,
            caps,
        )?;
        best = best.min(m.value);
    }
    Ok(best)
}

/// [`first_arrival`] at every node; boundary nodes keep their values.
pub fn first_arrival_field(
    graph: &Graph,
    spec: &ProblemSpec,
    model: TravelModel,
    caps: OracleCaps,
) -> Result<Vec<f64>> {
    (0..graph.node_count())
        .map(|i| match spec.boundary_value(i) {
            Some(v) => Ok(v),
            None => first_arrival(graph, spec, i, model, caps),
        })
        .collect()
}

/// Fixed point of `u_i <- min over nonempty K of root_K`, where `root_K`
/// solves `sum_{j in K} (w_j (t - u_j))^p = s_i^p` on `t >= max_K u_j`
/// (`max` instead of the sum for `p = inf`), iterated in Jacobi sweeps from
/// `u = +inf` until no value moves by more than `1e-12`.
///
/// The local solve enumerates neighbour subsets explicitly and shares no code
/// with [`crate::local`].
pub fn value_iteration_solve(graph: &Graph, spec: &ProblemSpec) -> Result<ArrivalField> {
    if spec.node_count() != graph.node_count() {
        return Err(Error::InvalidInput("problem size does not match graph".into()));
    }
    if spec.boundary().is_empty() {
        return Err(Error::EmptyBoundary);
    }
    let n = graph.node_count();
    if let Some(i) = (0..n).find(|&i| graph.in_degree(i) > 16) {
        return Err(Error::OracleScaleExceeded(format!(
            "node {i} has in-degree {}, subset enumeration is capped at 16",
            graph.in_degree(i)
        )));
    }
    let p = spec.p();
    let mut u: Vec<f64> = (0..n).map(|i| spec.boundary_value(i).unwrap_or(f64::INFINITY)).collect();
    let limit = (n * graph.edge_count()).max(n + 1);
    for _ in 0..limit {
        let mut next = u.clone();
        let mut change: f64 = 0.0;
        for i in (0..n).filter(|&i| !spec.is_boundary(i)) {
            let finite: Vec<(f64, f64)> = graph
                .in_neighbors(i)
                .filter(|&(j, _)| u[j].is_finite())
                .map(|(j, w)| (u[j], w))
                .collect();
            let mut best = f64::INFINITY;
            for subset in 1u32..(1u32 << finite.len()) {
                let chosen: Vec<(f64, f64)> = (0..finite.len())
                    .filter(|b| subset >> b & 1 == 1)
                    .map(|b| finite[b])
                    .collect();
                best = best.min(subset_root(&chosen, spec.slowness()[i], p));
            }
            let delta = if best == u[i] { 0.0 } else { (best - u[i]).abs() };
            change = change.max(delta);
            next[i] = best;
        }
        u = next;
        if change <= 1e-12 {
            return Ok(ArrivalField::from_times(u));
        }
    }
    Err(Error::NotConverged(limit))
}

/// Unique `t >= max u_j` with `sum (w_j (t - u_j))^p = s^p` (or the max for
/// `p = inf`), by bisection to adjacent floats.
fn subset_root(chosen: &[(f64, f64)], s: f64, p: Exponent) -> f64 {
    let top = chosen.iter().map(|&(t, _)| t).fold(f64::NEG_INFINITY, f64::max);
    if s == 0.0 {
        return top;
    }
    let w_min = chosen.iter().map(|&(_, w)| w).fold(f64::INFINITY, f64::min);
    let g = |t: f64| -> f64 {
        match p {
            Exponent::Infinity => chosen.iter().map(|&(uj, w)| w * (t - uj)).fold(0.0, f64::max) - s,
            Exponent::Finite(q) => {
                chosen.iter().map(|&(uj, w)| (w * (t - uj)).powf(q)).sum::<f64>() - s.powf(q)
            }
        }
    };
    let (mut lo, mut hi) = (top, top + s / w_min);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Agreement tolerance used by [`equivalence_report`].
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-9;

/// One compared pair of solutions.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceLine {
    pub oracle: String,
    pub solver: String,
    pub max_diff: f64,
    pub pass: bool,
}

impl fmt::Display for EquivalenceLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{} \u{2261} {}: {verdict} (max diff {:.3e})", self.oracle, self.solver, self.max_diff)
    }
}

/// Largest `|a_i - b_i|`, counting equal infinities as agreement and a
/// finite/infinite mismatch as infinite.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| if x == y { 0.0 } else { (x - y).abs() })
        .fold(0.0, |m, d| if d.is_nan() { f64::INFINITY } else { m.max(d) })
}

/// Compares [`first_arrival_field`] for each travel model against the front
/// solver at the matching exponent, and [`value_iteration_solve`] against the
/// front solver for each exponent in `exponents`. `spec`'s own exponent is
/// ignored.
pub fn equivalence_report(
    graph: &Graph,
    spec: &ProblemSpec,
    exponents: &[Exponent],
    caps: OracleCaps,
) -> Result<Vec<EquivalenceLine>> {
    let mut lines = Vec::new();
    for model in TravelModel::ALL {
        let p = model.exponent();
        let front = crate::front::solve(graph, &spec.with_p(p))?;
        let oracle = first_arrival_field(graph, spec, model, caps)?;
        let d = max_abs_diff(&oracle, front.times());
        lines.push(EquivalenceLine {
            oracle: model.label().to_string(),
            solver: format!("front(p={p})"),
            max_diff: d,
            pass: d <= EQUIVALENCE_TOLERANCE,
        });
    }
    for &p in exponents {
        let s = spec.with_p(p);
        let front = crate::front::solve(graph, &s)?;
        let vi = value_iteration_solve(graph, &s)?;
        let d = max_abs_diff(vi.times(), front.times());
        lines.push(EquivalenceLine {
            oracle: format!("value-iteration(p={p})"),
            solver: format!("front(p={p})"),
            max_diff: d,
            pass: d <= EQUIVALENCE_TOLERANCE,
        });
    }
    Ok(lines)
}

/// Small graphs with known answers, each with a source and a target node.
pub mod fixtures {
    use crate::graph::{Graph, NodeId};

    /// `0 -> 1 -> 2`, unit weights.
    pub fn path() -> (Graph, NodeId, NodeId) {
        (Graph::from_edges(&[(0, 1, 1.0), (1, 2, 1.0)]).expect("valid"), 0, 2)
    }

    /// `0 -> {1, 2} -> 3`, unit weights.
    pub fn diamond() -> (Graph, NodeId, NodeId) {
        (Graph::from_edges(&[(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)]).expect("valid"), 0, 3)
    }

    /// 3x3 grid with unit weights in both directions; node `3r + c` sits at
    /// row `r`, column `c`. Source is the corner 0, target the opposite corner 8.
    pub fn grid3() -> (Graph, NodeId, NodeId) {
        let mut edges = Vec::new();
        for r in 0..3 {
            for c in 0..3 {
                let v = 3 * r + c;
                if c < 2 {
                    edges.push((v, v + 1, 1.0));
                    edges.push((v + 1, v, 1.0));
                }
                if r < 2 {
                    edges.push((v, v + 3, 1.0));
                    edges.push((v + 3, v, 1.0));
                }
            }
        }
        (Graph::from_edges(&edges).expect("valid"), 0, 8)
    }

    pub fn by_name(name: &str) -> Option<(Graph, NodeId, NodeId)> {
        match name {
            "path" => Some(path()),
            "diamond" => Some(diamond()),
            "grid3" | "grid" => Some(grid3()),
            _ => None,
        }
    }
}
