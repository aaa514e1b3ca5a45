//! Local candidate values and residuals of the discrete eikonal equations.
//!
//! Every candidate solves, for the node being updated, the upwind equation
//!
//! ```text
//! sum_j (w_j (u - u_j)^+)^p = s^p        (1 <= p < inf)
//!   max_j  w_j (u - u_j)^+  = s          (p = inf)
//! ```
//!
//! over its known in-neighbours. The closed forms for `p = 1` and `p = 2` are
//! weighted means over an *active set*: neighbours are taken in ascending
//! order of arrival time and added while they lie strictly below the current
//! root. Neighbours left out therefore satisfy `u_j >= root`, and their
//! positive part vanishes, so the closed form and the positive-part equation
//! always agree.

use crate::error::{Error, Result};
use crate::graph::{Exponent, Graph, NodeId, ProblemSpec};

/// Absolute tolerance of the bracketed root finder.
pub const ROOT_TOLERANCE: f64 = 1e-12;
/// Iteration cap of the bracketed root finder.
pub const ROOT_MAX_ITERATIONS: usize = 200;

/// An accepted in-neighbour: its arrival time and the weight of the edge into
/// the node being updated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Known {
    pub time: f64,
    pub weight: f64,
}

impl Known {
    pub fn new(time: f64, weight: f64) -> Self {
        Self { time, weight }
    }
}

impl From<(f64, f64)> for Known {
    fn from((time, weight): (f64, f64)) -> Self {
        Self { time, weight }
    }
}

/// Known neighbours plus slowness of the node being updated.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateInput {
    pub known: Vec<Known>,
    pub slowness: f64,
}

impl CandidateInput {
    pub fn new<I, K>(known: I, slowness: f64) -> Self
    where
        I: IntoIterator<Item = K>,
        K: Into<Known>,
    {
        Self { known: known.into_iter().map(Into::into).collect(), slowness }
    }

    pub fn solve(&self, p: Exponent) -> Result<f64> {
        candidate(&self.known, self.slowness, p)
    }
}

fn check_input(known: &[Known], s: f64) -> Result<()> {
    if known.is_empty() {
        return Err(Error::NoKnownNeighbours);
    }
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::InvalidLocalInput(format!("slowness {s}")));
    }
    for k in known {
        if !(k.weight.is_finite() && k.weight > 0.0) {
            return Err(Error::InvalidLocalInput(format!("weight {}", k.weight)));
        }
        if !k.time.is_finite() {
            return Err(Error::InvalidLocalInput(format!("arrival time {}", k.time)));
        }
    }
    Ok(())
}

fn sort_by_time(known: &mut [Known]) {
    known.sort_by(|a, b| a.time.total_cmp(&b.time));
}

/// `min_j (u_j + s / w_j)`, the `p = inf` update.
pub fn candidate_inf(known: &[Known], s: f64) -> Result<f64> {
    check_input(known, s)?;
    Ok(inf_unchecked(known, s))
}

fn inf_unchecked(known: &[Known], s: f64) -> f64 {
    known
        .iter()
        .map(|k| k.time + s / k.weight)
        .fold(f64::INFINITY, f64::min)
}

/// Weighted mean `(sum w u + s) / sum w` over the active set, the `p = 1` update.
pub fn candidate_l1(known: &[Known], s: f64) -> Result<f64> {
    check_input(known, s)?;
    let mut sorted = known.to_vec();
    Ok(l1_sorted(sort_then(&mut sorted), s))
}

fn sort_then(known: &mut [Known]) -> &[Known] {
    sort_by_time(known);
    known
}

fn l1_sorted(known: &[Known], s: f64) -> f64 {
    let base = known[0].time;
    let mut weight_sum = 0.0;
    let mut moment = 0.0;
    let mut root = base;
    for (k, nb) in known.iter().enumerate() {
        weight_sum += nb.weight;
        moment += nb.weight * (nb.time - base);
        root = base + (moment + s) / weight_sum;
        match known.get(k + 1) {
            Some(next) if next.time < root => continue,
            _ => break,
        }
    }
    root
}

/// `mu + sqrt(s^2 / z^2 - sigma^2)` over the active set, the `p = 2` update.
pub fn candidate_l2(known: &[Known], s: f64) -> Result<f64> {
    check_input(known, s)?;
    let mut sorted = known.to_vec();
    Ok(l2_sorted(sort_then(&mut sorted), s))
}

fn l2_sorted(known: &[Known], s: f64) -> f64 {
    // Times are shifted by the smallest one; mean and variance are updated
    // incrementally with squared weights.
    let base = known[0].time;
    let mut z2 = 0.0;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut root = base + s / known[0].weight;
    for (k, nb) in known.iter().enumerate() {
        let w2 = nb.weight * nb.weight;
        let v = nb.time - base;
        let z2_new = z2 + w2;
        let delta = v - mean;
        let mean_new = mean + w2 * delta / z2_new;
        let m2_new = m2 + w2 * delta * (v - mean_new);
        let ratio = s * s / z2_new;
        let mut disc = ratio - m2_new / z2_new;
        if disc < 0.0 {
            if disc >= -1e-12 * ratio.max(1.0) {
                disc = 0.0;
            } else {
                break;
            }
        }
        z2 = z2_new;
        mean = mean_new;
        m2 = m2_new;
        root = base + mean + disc.sqrt();
        match known.get(k + 1) {
            Some(next) if next.time < root => continue,
            _ => break,
        }
    }
    root
}

/// Root of `sum_j (w_j (u - u_j)^+)^p = s^p` by bracketed bisection.
///
/// The left side is continuous and nondecreasing in `u`, so the root lies in
/// `[min u_j, min (u_j + s / w_j)]`. The bracket is first narrowed to the
/// interval between the last active time and the next known time; with a
/// single active neighbour the root `u_j + s / w_j` is returned exactly.
pub fn candidate_lp(known: &[Known], s: f64, p: f64) -> Result<f64> {
    check_input(known, s)?;
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    lp_unchecked(known, s, p)
}

fn lp_unchecked(known: &[Known], s: f64, p: f64) -> Result<f64> {
    let mut sorted = known.to_vec();
    sort_by_time(&mut sorted);
    lp_sorted(&sorted, s, p)
}

fn lp_sorted(known: &[Known], s: f64, p: f64) -> Result<f64> {
    let target = s.powf(p);
    let f = |active: &[Known], u: f64| -> f64 {
        active
            .iter()
            .map(|k| {
                let d = u - k.time;
                if d > 0.0 {
                    (k.weight * d).powf(p)
                } else {
                    0.0
                }
            })
            .sum::<f64>()
            - target
    };
    if s == 0.0 {
        return Ok(known[0].time);
    }
    // The active prefix grows while the root lies strictly beyond the next time.
    let mut count = 1;
    while count < known.len() && f(&known[..count], known[count].time) < 0.0 {
        count += 1;
    }
    if count == 1 {
        return Ok(known[0].time + s / known[0].weight);
    }
    let active = &known[..count];
    let mut lo = active[count - 1].time;
    let mut hi = inf_unchecked(known, s);
    if let Some(next) = known.get(count) {
        hi = hi.min(next.time);
    }
    for _ in 0..ROOT_MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= ROOT_TOLERANCE || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if f(active, mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::RootNotConverged { iterations: ROOT_MAX_ITERATIONS, lo, hi })
}

/// Dispatches to the closed form for `p` in `{1, 2, inf}` and to the root
/// finder otherwise.
pub fn candidate(known: &[Known], s: f64, p: Exponent) -> Result<f64> {
    check_input(known, s)?;
    let mut scratch = known.to_vec();
    candidate_in_place(&mut scratch, s, p)
}

/// Like [`candidate`] but reorders `known` instead of copying it. Input
/// validity is the caller's responsibility.
pub(crate) fn candidate_in_place(known: &mut [Known], s: f64, p: Exponent) -> Result<f64> {
    debug_assert!(check_input(known, s).is_ok());
    match p {
        Exponent::Infinity => Ok(inf_unchecked(known, s)),
        Exponent::Finite(1.0) => Ok(l1_sorted(sort_then(known), s)),
        Exponent::Finite(2.0) => Ok(l2_sorted(sort_then(known), s)),
        Exponent::Finite(v) => lp_sorted(sort_then(known), s, v),
    }
}

/// `||grad_w^+ u_i||_p`, the upwind gradient norm at `i`.
///
/// In-neighbours with infinite arrival time contribute nothing.
pub fn upwind_norm(graph: &Graph, u: &[f64], i: NodeId, p: Exponent) -> f64 {
    let ui = u[i];
    let parts = graph.in_neighbors(i).filter_map(|(j, w)| {
        let d = ui - u[j];
        (u[j].is_finite() && d > 0.0).then_some(w * d)
    });
    match p {
        Exponent::Infinity => parts.fold(0.0, f64::max),
        Exponent::Finite(1.0) => parts.sum(),
        Exponent::Finite(v) => parts.map(|x| x.powf(v)).sum::<f64>().powf(1.0 / v),
    }
}

/// `||grad_w^+ u_i||_p - s_i`; zero wherever `u` solves the equation.
/// Unreached nodes (`u_i = inf`) are reported as zero.
pub fn residual(graph: &Graph, spec: &ProblemSpec, u: &[f64], i: NodeId) -> f64 {
    if !u[i].is_finite() {
        return 0.0;
    }
    upwind_norm(graph, u, i, spec.p()) - spec.slowness()[i]
}

/// Largest `|residual|` over reached interior nodes.
pub fn max_residual(graph: &Graph, spec: &ProblemSpec, u: &[f64]) -> f64 {
    (0..graph.node_count())
        .filter(|&i| !spec.is_boundary(i))
        .map(|i| residual(graph, spec, u, i).abs())
        .fold(0.0, f64::max)
}
