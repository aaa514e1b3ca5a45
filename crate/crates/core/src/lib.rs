//! Information propagation on weighted directed graphs.
//!
//! Arrival times solve the discrete `lp` eikonal equation
//! `||grad_w^+ u_i||_p = s_i` on interior nodes with prescribed values on a
//! boundary set. The production solver is a label-setting front sweep
//! ([`front`]); [`pathset`] holds brute-force references over path sets used
//! to cross-check it. [`euclid`], [`trust`] and [`labelprop`] build the
//! grid experiments and the two applications on top.

pub mod config;
pub mod error;
pub mod euclid;
pub mod front;
pub mod graph;
pub mod io;
pub mod labelprop;
pub mod local;
pub mod pathset;
pub mod trust;

pub use error::{Error, Result};
pub use front::{multi_source_solve, solve, solve_with_trace, ArrivalField, FrontTrace};
pub use graph::{reachable_from, validate, Exponent, Graph, NodeId, ProblemSpec, ValidationReport};
