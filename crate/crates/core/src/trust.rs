//! Distrust propagation on trust networks.
//!
//! An edge `(i, j)` with rating `omega` means `i` trusts `j`. Information
//! starts at a trusted team and spreads along trust edges with weight
//! `1/omega`, so a late arrival means low trust.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::front::solve;
use crate::graph::{Exponent, Graph, NodeId, ProblemSpec};

/// Scores within this distance share a rank.
pub const RANK_TIE_TOLERANCE: f64 = 1e-9;

/// Rating of each category name in advogato-style trust files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategoryMap(pub HashMap<String, f64>);

impl Default for CategoryMap {
    fn default() -> Self {
        let pairs = [("observer", 0.4), ("apprentice", 0.6), ("journeyer", 0.8), ("master", 1.0)];
        Self(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }
}

impl CategoryMap {
    /// Case-insensitive lookup.
    pub fn rating(&self, category: &str) -> Option<f64> {
        let key = category.trim().to_ascii_lowercase();
        self.0.get(&key).copied().or_else(|| {
            self.0.iter().find(|(k, _)| k.eq_ignore_ascii_case(&key)).map(|(_, v)| *v)
        })
    }
}

/// Directed graph whose edge weights are trust ratings.
#[derive(Clone, Debug, PartialEq)]
pub struct TrustGraph {
    ratings: Graph,
}

impl TrustGraph {
    /// Edges are `(truster, trustee, rating)`; ratings must be positive and
    /// finite.
    pub fn new<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        Ok(Self { ratings: Graph::new(node_count, edges)? })
    }

    pub fn from_graph(ratings: Graph) -> Self {
        Self { ratings }
    }

    pub fn ratings(&self) -> &Graph {
        &self.ratings
    }

    pub fn node_count(&self) -> usize {
        self.ratings.node_count()
    }

    pub fn rating(&self, truster: NodeId, trustee: NodeId) -> Option<f64> {
        self.ratings.weight(truster, trustee)
    }

    /// Every rating multiplied by `c`.
    pub fn rescaled(&self, c: f64) -> Result<Self> {
        Ok(Self { ratings: self.ratings.map_weights(|_, _, w| w * c)? })
    }
}

/// Same edges, weight `1/omega`.
pub fn distrust_graph(tg: &TrustGraph) -> Result<Graph> {
    tg.ratings.map_weights(|_, _, w| 1.0 / w)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankEntry {
    pub node: NodeId,
    pub score: f64,
    /// Competition rank, starting at 1; tied scores share the smaller rank.
    pub rank: usize,
    pub reachable: bool,
}

/// Candidates in ascending score order.
#[derive(Clone, Debug, PartialEq, Default, Serialize)]
pub struct Ranking {
    pub entries: Vec<RankEntry>,
}

impl Ranking {
    /// Sorts ascending; infinite scores go last ordered by node id.
    pub fn from_scores(scores: Vec<(NodeId, f64)>) -> Self {
        let mut scores = scores;
        scores.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let mut entries: Vec<RankEntry> = Vec::with_capacity(scores.len());
        let mut group_start = (0usize, f64::NAN);
        for (pos, (node, score)) in scores.into_iter().enumerate() {
            let same = pos > 0
                && (score == group_start.1 || (score - group_start.1).abs() <= RANK_TIE_TOLERANCE);
            if !same {
                group_start = (pos + 1, score);
            }
            entries.push(RankEntry { node, score, rank: group_start.0, reachable: score.is_finite() });
        }
        Self { entries }
    }

    pub fn order(&self) -> Vec<NodeId> {
        self.entries.iter().map(|e| e.node).collect()
    }

    pub fn score(&self, node: NodeId) -> Option<f64> {
        self.entries.iter().find(|e| e.node == node).map(|e| e.score)
    }

    pub fn rank(&self, node: NodeId) -> Option<usize> {
        self.entries.iter().find(|e| e.node == node).map(|e| e.rank)
    }

    pub fn unreachable(&self) -> Vec<NodeId> {
        self.entries.iter().filter(|e| !e.reachable).map(|e| e.node).collect()
    }
}

/// Arrival times from `team` on the distrust graph with `s = 1`.
pub fn distrust_times(tg: &TrustGraph, team: &[NodeId], p: Exponent) -> Result<Vec<f64>> {
    if team.is_empty() {
        return Err(Error::EmptyBoundary);
    }
    let graph = distrust_graph(tg)?;
    let spec = ProblemSpec::unit(graph.node_count(), team, p)?;
    Ok(solve(&graph, &spec)?.into_times())
}

/// Candidates ranked by arrival time from the team; unreachable ones score
/// `+inf` and come last.
pub fn rank_candidates(tg: &TrustGraph, team: &[NodeId], candidates: &[NodeId], p: Exponent) -> Result<Ranking> {
    let n = tg.node_count();
    if let Some(&c) = candidates.iter().find(|&&c| c >= n) {
        return Err(Error::NodeOutOfRange { node: c, node_count: n });
    }
    let u = distrust_times(tg, team, p)?;
    Ok(Ranking::from_scores(candidates.iter().map(|&c| (c, u[c])).collect()))
}

/// Mean of `1/omega` over everyone who rates `candidate`.
pub fn neighbor_average(tg: &TrustGraph, candidate: NodeId) -> Result<f64> {
    let n = tg.node_count();
    if candidate >= n {
        return Err(Error::NodeOutOfRange { node: candidate, node_count: n });
    }
    let incoming = tg.ratings.in_neighbors(candidate);
    let count = incoming.len();
    if count == 0 {
        return Err(Error::InvalidInput(format!("node {candidate} has no incoming trust edges")));
    }
    Ok(incoming.map(|(_, w)| 1.0 / w).sum::<f64>() / count as f64)
}

pub fn rank_by_neighbor_average(tg: &TrustGraph, candidates: &[NodeId]) -> Result<Ranking> {
    let scores = candidates
        .iter()
        .map(|&c| Ok((c, neighbor_average(tg, c)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Ranking::from_scores(scores))
}

/// Adds `size` nodes rating each other and `target` (both ways) at `rating`.
/// The new nodes get ids `n..n + size`.
pub fn inject_sybil_cluster(tg: &TrustGraph, target: NodeId, size: usize, rating: f64) -> Result<TrustGraph> {
    let n = tg.node_count();
    if target >= n {
        return Err(Error::NodeOutOfRange { node: target, node_count: n });
    }
    if size == 0 {
        return Err(Error::InvalidInput("sybil cluster needs at least one node".into()));
    }
    let mut edges: Vec<(NodeId, NodeId, f64)> = tg.ratings.edges().collect();
    edges.reserve(size * (size + 1));
    for a in n..n + size {
        edges.push((a, target, rating));
        edges.push((target, a, rating));
        for b in n..n + size {
            if a != b {
                edges.push((a, b, rating));
            }
        }
    }
    TrustGraph::new(n + size, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn distrust_weights() {
        let tg = TrustGraph::new(4, [(0, 1, 1.0), (0, 2, 0.4), (2, 3, 0.8)]).unwrap();
        let g = distrust_graph(&tg).unwrap();
        assert_eq!(g.weight(0, 1), Some(1.0));
        assert_eq!(g.weight(0, 2), Some(2.5));
        assert_eq!(g.weight(2, 3), Some(1.25));
        assert!(TrustGraph::new(2, [(0, 1, 0.0)]).is_err());
        assert!(TrustGraph::new(2, [(0, 1, -0.4)]).is_err());
    }

    #[test]
    fn ranking_examples() {
        let tg = TrustGraph::new(2, [(0, 1, 1.0)]).unwrap();
        let r = rank_candidates(&tg, &[0], &[1], Exponent::Infinity).unwrap();
        assert_eq!(r.score(1), Some(1.0));

        // team(0) -> a(1), b(2) -> G(3)
        let tg = TrustGraph::new(4, [(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)]).unwrap();
        let r = rank_candidates(&tg, &[0], &[3], Exponent::ONE).unwrap();
        assert_eq!(r.score(3), Some(1.5));
        let r = rank_candidates(&tg, &[0], &[3], Exponent::TWO).unwrap();
        assert!((r.score(3).unwrap() - (1.0 + FRAC_1_SQRT_2)).abs() < 1e-15);
        assert!(rank_candidates(&tg, &[], &[3], Exponent::TWO).is_err());
    }

    #[test]
    fn ties_and_unreachable() {
        let r = Ranking::from_scores(vec![(5, f64::INFINITY), (3, 2.0), (1, 1.0), (4, 2.0 + 1e-10), (2, f64::INFINITY), (0, 3.0)]);
        assert_eq!(r.order(), vec![1, 3, 4, 0, 2, 5]);
        let ranks: Vec<usize> = r.entries.iter().map(|e| e.rank).collect();
        assert_eq!(ranks, vec![1, 2, 2, 4, 5, 5]);
        assert_eq!(r.unreachable(), vec![2, 5]);
    }

    #[test]
    fn neighbour_average_examples() {
        let tg = TrustGraph::new(4, [(0, 3, 1.0), (1, 3, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(neighbor_average(&tg, 3).unwrap(), 1.0);
        let tg = TrustGraph::new(4, [(0, 3, 0.8), (1, 3, 0.8), (2, 3, 1.0)]).unwrap();
        assert!((neighbor_average(&tg, 3).unwrap() - 3.5 / 3.0).abs() < 1e-15);
        let tg = TrustGraph::new(2, [(0, 1, 0.4)]).unwrap();
        assert_eq!(neighbor_average(&tg, 1).unwrap(), 2.5);
        assert!(neighbor_average(&tg, 0).is_err());
    }

    #[test]
    fn sybil_counts() {
        let tg = TrustGraph::new(3, [(0, 1, 0.6), (1, 2, 0.8)]).unwrap();
        let big = inject_sybil_cluster(&tg, 2, 50, 1.0).unwrap();
        assert_eq!(big.node_count(), 53);
        assert_eq!(big.ratings().edge_count(), 2 + 50 * 49 + 2 * 50);
        let one = inject_sybil_cluster(&tg, 2, 1, 1.0).unwrap();
        assert_eq!(one.ratings().edge_count(), 4);
        assert!(inject_sybil_cluster(&tg, 2, 0, 1.0).is_err());
    }

    #[test]
    fn sybil_lowers_neighbour_average_only() {
        let tg = TrustGraph::new(4, [(0, 1, 0.6), (0, 2, 0.8), (1, 3, 0.6), (2, 3, 0.8)]).unwrap();
        let before = neighbor_average(&tg, 3).unwrap();
        let attacked = inject_sybil_cluster(&tg, 3, 50, 1.0).unwrap();
        assert!(neighbor_average(&attacked, 3).unwrap() < before);
        for p in [Exponent::ONE, Exponent::TWO, Exponent::Infinity] {
            let u0 = distrust_times(&tg, &[0], p).unwrap();
            let u1 = distrust_times(&attacked, &[0], p).unwrap();
            for i in 0..4 {
                assert_eq!(u0[i].to_bits(), u1[i].to_bits());
            }
        }
    }

    #[test]
    fn categories() {
        let m = CategoryMap::default();
        assert_eq!(m.rating("Master"), Some(1.0));
        assert_eq!(m.rating("observer"), Some(0.4));
        assert_eq!(m.rating("journeyer"), Some(0.8));
        assert_eq!(m.rating("apprentice"), Some(0.6));
        assert_eq!(m.rating("guru"), None);
    }
}
