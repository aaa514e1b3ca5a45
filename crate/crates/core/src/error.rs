use thiserror::Error;

use crate::graph::NodeId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("edge ({src}, {dst}) has non-positive or non-finite weight {weight}")]
    InvalidWeight { src: NodeId, dst: NodeId, weight: f64 },
    #[error("node {node} out of range for graph with {node_count} nodes")]
    NodeOutOfRange { node: NodeId, node_count: usize },
    #[error("graph must have at least one node")]
    EmptyGraph,
    #[error("boundary set is empty")]
    EmptyBoundary,
    #[error("node {0} listed twice in the boundary")]
    DuplicateBoundary(NodeId),
    #[error("invalid boundary value {value} at node {node}")]
    InvalidBoundaryValue { node: NodeId, value: f64 },
    #[error("slowness vector has length {got}, expected {expected}")]
    SlownessLength { got: usize, expected: usize },
    #[error("invalid slowness {value} at node {node}")]
    InvalidSlowness { node: NodeId, value: f64 },
    #[error("exponent p must lie in [1, inf], got {0}")]
    InvalidExponent(f64),
    #[error("no known neighbours: candidate value undefined")]
    NoKnownNeighbours,
    #[error("invalid local input: {0}")]
    InvalidLocalInput(String),
    #[error("root finder did not converge after {iterations} iterations (bracket [{lo}, {hi}])")]
    RootNotConverged { iterations: usize, lo: f64, hi: f64 },
    #[error("oracle scale exceeded: {0}")]
    OracleScaleExceeded(String),
    #[error("value iteration did not converge within {0} sweeps")]
    NotConverged(usize),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid grid parameters: {0}")]
    InvalidGrid(String),
    #[error("node {0} was not reached by the front")]
    Unreached(NodeId),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
