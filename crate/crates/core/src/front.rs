//! Label-setting front propagation.
//!
//! Boundary nodes start out known. Whenever a node is accepted, each of its
//! not yet accepted out-neighbours gets a fresh candidate computed from all
//! of its accepted in-neighbours, and the smallest candidate is accepted
//! next. Stale queue entries are skipped on pop. Accepting equal-valued
//! candidates one at a time gives the same values as accepting the whole
//! argmin set at once, because an equal-valued known neighbour has a zero
//! upwind difference.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, ProblemSpec};
use crate::local::{candidate_in_place, Known};

/// Arrival times closer than this are grouped into one front.
pub const FRONT_TIE_TOLERANCE: f64 = 1e-12;

/// Arrival times plus their decomposition into fronts `V_0, ..., V_J`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArrivalField {
    u: Vec<f64>,
    front_index: Vec<Option<usize>>,
    front_values: Vec<f64>,
}

impl ArrivalField {
    /// Groups finite times into fronts: sorted ascending, a new front starts
    /// whenever a time exceeds the first time of the current front by more
    /// than [`FRONT_TIE_TOLERANCE`]. A front's value is its smallest time.
    pub fn from_times(u: Vec<f64>) -> Self {
        let mut order: Vec<NodeId> = (0..u.len()).filter(|&i| u[i].is_finite()).collect();
        order.sort_by(|&a, &b| u[a].total_cmp(&u[b]).then(a.cmp(&b)));
        let mut front_index = vec![None; u.len()];
        let mut front_values: Vec<f64> = Vec::new();
        for i in order {
            match front_values.last() {
                Some(&v) if u[i] - v <= FRONT_TIE_TOLERANCE => {}
                _ => front_values.push(u[i]),
            }
            front_index[i] = Some(front_values.len() - 1);
        }
        Self { u, front_index, front_values }
    }

    /// Rebuilds a field from stored times and front indices, as read back
    /// from CSV.
    pub fn from_parts(u: Vec<f64>, front_index: Vec<Option<usize>>) -> Result<Self> {
        if u.len() != front_index.len() {
            return Err(Error::InvalidInput("times and front indices differ in length".into()));
        }
        let fronts = front_index.iter().flatten().max().map_or(0, |m| m + 1);
        let mut front_values = vec![f64::INFINITY; fronts];
        for (i, idx) in front_index.iter().enumerate() {
            match (idx, u[i].is_finite()) {
                (Some(k), true) => front_values[*k] = front_values[*k].min(u[i]),
                (None, false) => {}
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "node {i}: front index and arrival time disagree on reachability"
                    )))
                }
            }
        }
        if front_values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("front indices are not contiguous".into()));
        }
        if front_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("front values are not increasing".into()));
        }
        Ok(Self { u, front_index, front_values })
    }

    pub fn times(&self) -> &[f64] {
        &self.u
    }

    pub fn into_times(self) -> Vec<f64> {
        self.u
    }

    pub fn time(&self, i: NodeId) -> f64 {
        self.u[i]
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn is_reached(&self, i: NodeId) -> bool {
        self.u[i].is_finite()
    }

    /// Index `k` of the front `V_k` containing `i`; `None` when unreached.
    pub fn front_index(&self, i: NodeId) -> Option<usize> {
        self.front_index[i]
    }

    /// `U_0 < U_1 < ... < U_J`.
    pub fn front_values(&self) -> &[f64] {
        &self.front_values
    }

    /// Members of each front, in node order.
    pub fn fronts(&self) -> Vec<Vec<NodeId>> {
        let mut fronts = vec![Vec::new(); self.front_values.len()];
        for (i, idx) in self.front_index.iter().enumerate() {
            if let Some(k) = idx {
                fronts[*k].push(i);
            }
        }
        fronts
    }
}

/// One step of the front decomposition: `(U_k, V_k, K_k, C_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrontSnapshot {
    pub value: f64,
    pub members: Vec<NodeId>,
    pub known: Vec<NodeId>,
    pub candidates: Vec<NodeId>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FrontTrace {
    pub snapshots: Vec<FrontSnapshot>,
}

impl FrontTrace {
    /// Derives known and candidate sets from a solved field:
    /// `K_l` is the union of the first `l + 1` fronts and `C_l` the
    /// out-neighbours of `K_l` outside it.
    pub fn from_field(graph: &Graph, field: &ArrivalField) -> Self {
        let n = graph.node_count();
        let mut in_known = vec![false; n];
        let mut known = Vec::new();
        let mut snapshots = Vec::new();
        for (k, members) in field.fronts().into_iter().enumerate() {
            for &i in &members {
                in_known[i] = true;
            }
            known.extend_from_slice(&members);
            known.sort_unstable();
            let mut is_candidate = vec![false; n];
            for &j in &known {
                for (i, _) in graph.out_neighbors(j) {
                    if !in_known[i] {
                        is_candidate[i] = true;
                    }
                }
            }
            snapshots.push(FrontSnapshot {
                value: field.front_values()[k],
                members,
                known: known.clone(),
                candidates: (0..n).filter(|&i| is_candidate[i]).collect(),
            });
        }
        Self { snapshots }
    }
}

#[derive(Clone, Copy, Debug)]
struct QueueEntry {
    time: f64,
    node: NodeId,
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for QueueEntry {}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time.total_cmp(&other.time).then(self.node.cmp(&other.node))
    }
}

fn check(graph: &Graph, spec: &ProblemSpec) -> Result<()> {
    if spec.node_count() != graph.node_count() {
        return Err(Error::InvalidInput(format!(
            "problem defined on {} nodes but graph has {}",
            spec.node_count(),
            graph.node_count()
        )));
    }
    if spec.boundary().is_empty() {
        return Err(Error::EmptyBoundary);
    }
    Ok(())
}

/// Solves the front propagation model with the local update selected by
/// `spec.p()`. Unreachable nodes get `+inf`.
pub fn solve(graph: &Graph, spec: &ProblemSpec) -> Result<ArrivalField> {
    Ok(ArrivalField::from_times(propagate(graph, spec, |_, _| {})?))
}

/// [`solve`] plus the front-by-front decomposition.
pub fn solve_with_trace(graph: &Graph, spec: &ProblemSpec) -> Result<(ArrivalField, FrontTrace)> {
    let field = solve(graph, spec)?;
    let trace = FrontTrace::from_field(graph, &field);
    Ok((field, trace))
}

/// Runs [`solve`] for every spec over the shared graph. Results are in input
/// order and do not depend on scheduling.
pub fn multi_source_solve(graph: &Graph, specs: &[ProblemSpec]) -> Vec<Result<ArrivalField>> {
    specs.par_iter().map(|spec| solve(graph, spec)).collect()
}

/// Core sweep. `on_accept(node, time)` is called once per accepted interior
/// node, in acceptance order.
pub fn propagate<F>(graph: &Graph, spec: &ProblemSpec, mut on_accept: F) -> Result<Vec<f64>>
where
    F: FnMut(NodeId, f64),
{
    check(graph, spec)?;
    let n = graph.node_count();
    let s = spec.slowness();
    let p = spec.p();
    let mut u = vec![f64::INFINITY; n];
    let mut accepted = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut scratch: Vec<Known> = Vec::new();

    for &(b, value) in spec.boundary() {
        u[b] = value;
        accepted[b] = true;
    }

    let mut update = |i: NodeId,
                      u: &mut [f64],
                      accepted: &[bool],
                      heap: &mut BinaryHeap<Reverse<QueueEntry>>|
     -> Result<()> {
        scratch.clear();
        scratch.extend(
            graph
                .in_neighbors(i)
                .filter(|&(j, _)| accepted[j])
                .map(|(j, w)| Known::new(u[j], w)),
        );
        let value = candidate_in_place(&mut scratch, s[i], p)?;
        if value < u[i] {
            u[i] = value;
            heap.push(Reverse(QueueEntry { time: value, node: i }));
        }
        Ok(())
    };

    let mut first: Vec<NodeId> = spec
        .boundary()
        .iter()
        .flat_map(|&(b, _)| graph.out_neighbors(b).map(|(i, _)| i))
        .filter(|&i| !accepted[i])
        .collect();
    first.sort_unstable();
    first.dedup();
    for i in first {
        update(i, &mut u, &accepted, &mut heap)?;
    }

    while let Some(Reverse(entry)) = heap.pop() {
        let j = entry.node;
        if accepted[j] || entry.time != u[j] {
            continue;
        }
        accepted[j] = true;
        on_accept(j, entry.time);
        for (i, _) in graph.out_neighbors(j) {
            if !accepted[i] {
                update(i, &mut u, &accepted, &mut heap)?;
            }
        }
    }
    Ok(u)
}
