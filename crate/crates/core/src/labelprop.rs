//! Semi-supervised classification by competing fronts.
//!
//! One front is started from each label's seed set; a node takes the label
//! whose front reaches it first.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::front::multi_source_solve;
use crate::graph::{Exponent, Graph, NodeId, ProblemSpec};

/// Points in `R^dim`, stored row-major, with optional ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    labels: Option<Vec<usize>>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>, labels: Option<Vec<usize>>) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidInput(format!("{} coordinates do not split into rows of {dim}", coords.len())));
        }
        if let Some(k) = coords.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite coordinate in point {}", k / dim)));
        }
        if let Some(l) = &labels {
            if l.len() != coords.len() / dim {
                return Err(Error::InvalidInput(format!("{} labels for {} points", l.len(), coords.len() / dim)));
            }
        }
        Ok(Self { dim, coords, labels })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }
}

/// Two interleaved half circles of radius 1: the upper one centred at the
/// origin and a copy rotated by `pi` centred at `(1, 0.5)`. Points are evenly
/// spaced in angle over `[0, pi]`, padded with zeros to `dim` coordinates,
/// and perturbed by `N(0, noise_var)` in every coordinate. Label = moon index.
pub fn two_moons(n: usize, dim: usize, noise_var: f64, seed: u64) -> Result<PointCloud> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("two moons needs a positive even count, got {n}")));
    }
    if dim < 2 {
        return Err(Error::InvalidInput("two moons needs at least 2 dimensions".into()));
    }
    if !(noise_var >= 0.0 && noise_var.is_finite()) {
        return Err(Error::InvalidInput(format!("invalid noise variance {noise_var}")));
    }
    let half = n / 2;
    let noise = Normal::new(0.0, noise_var.sqrt()).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = vec![0.0; n * dim];
    let mut labels = Vec::with_capacity(n);
    for moon in 0..2 {
        for k in 0..half {
            let t = if half == 1 { 0.0 } else { PI * k as f64 / (half - 1) as f64 };
            let (x, y) = if moon == 0 { (t.cos(), t.sin()) } else { (1.0 - t.cos(), 0.5 - t.sin()) };
            let row = &mut coords[(moon * half + k) * dim..(moon * half + k + 1) * dim];
            row[0] = x;
            row[1] = y;
            if noise_var > 0.0 {
                for v in row.iter_mut() {
                    *v += noise.sample(&mut rng);
                }
            }
            labels.push(moon);
        }
    }
    PointCloud::new(dim, coords, Some(labels))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnnWeight {
    /// `exp(-|x_i - x_j|^2 / sqrt(d_k(x_i) d_k(x_j)))`, `d_k` the distance to
    /// the k-th nearest neighbour.
    ZpScaled,
    /// `1 / |x_i - x_j|`.
    InverseDistance,
    /// `exp(-|x_i - x_j|^2 / c)`.
    ExpScaled(f64),
    /// `exp(-|x_i - x_j|^2 / (c sqrt(d_max(x_i) d_max(x_j))))`, `d_max` the
    /// distance to the furthest graph neighbour.
    DmaxScaled(f64),
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Indices and squared distances of the `k` nearest other points of each
/// point, closest first, ties broken by index. Exact brute force.
pub fn k_nearest(cloud: &PointCloud, k: usize) -> Result<Vec<Vec<(NodeId, f64)>>> {
    let n = cloud.len();
    if k == 0 || k >= n {
        return Err(Error::InvalidInput(format!("k must lie in 1..{n}, got {k}")));
    }
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let xi = cloud.point(i);
            let mut d: Vec<(NodeId, f64)> =
                (0..n).filter(|&j| j != i).map(|j| (j, sq_dist(xi, cloud.point(j)))).collect();
            d.select_nth_unstable_by(k - 1, |a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
            d.truncate(k);
            d.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
            d
        })
        .collect())
}

/// Symmetrised k-nearest-neighbour graph: `i` and `j` are joined (both
/// directions, equal weight) when either is among the other's `k` nearest.
pub fn knn_graph(cloud: &PointCloud, k: usize, weight: KnnWeight) -> Result<Graph> {
    let n = cloud.len();
    let nn = k_nearest(cloud, k)?;
    let mut pairs: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    for (i, list) in nn.iter().enumerate() {
        for &(j, _) in list {
            pairs.insert((i.min(j), i.max(j)));
        }
    }
    let dk: Vec<f64> = nn.iter().map(|l| l[k - 1].1.sqrt()).collect();
    let mut dmax = vec![0.0f64; n];
    let pairs: Vec<(NodeId, NodeId, f64)> = pairs
        .into_iter()
        .map(|(a, b)| {
            let d2 = sq_dist(cloud.point(a), cloud.point(b));
            dmax[a] = dmax[a].max(d2.sqrt());
            dmax[b] = dmax[b].max(d2.sqrt());
            (a, b, d2)
        })
        .collect();
    let mut edges = Vec::with_capacity(2 * pairs.len());
    for (a, b, d2) in pairs {
        let w = match weight {
            KnnWeight::ZpScaled => (-d2 / (dk[a] * dk[b]).sqrt()).exp(),
            KnnWeight::InverseDistance => {
                if d2 == 0.0 {
                    return Err(Error::InvalidInput(format!("points {a} and {b} coincide")));
                }
                1.0 / d2.sqrt()
            }
            KnnWeight::ExpScaled(c) => (-d2 / c).exp(),
            KnnWeight::DmaxScaled(c) => (-d2 / (c * (dmax[a] * dmax[b]).sqrt())).exp(),
        };
        edges.push((a, b, w));
        edges.push((b, a, w));
    }
    Graph::new(n, edges)
}

/// Disjoint nonempty seed sets, one per label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSeedSets {
    sets: Vec<Vec<NodeId>>,
}

impl LabeledSeedSets {
    pub fn new(sets: Vec<Vec<NodeId>>) -> Result<Self> {
        if sets.len() < 2 {
            return Err(Error::InvalidInput("need at least two labels".into()));
        }
        let mut seen = BTreeSet::new();
        for (l, set) in sets.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::InvalidInput(format!("seed set for label {l} is empty")));
            }
            for &v in set {
                if !seen.insert(v) {
                    return Err(Error::InvalidInput(format!("node {v} seeds more than one label")));
                }
            }
        }
        Ok(Self { sets })
    }

    pub fn sets(&self) -> &[Vec<NodeId>] {
        &self.sets
    }

    pub fn label_count(&self) -> usize {
        self.sets.len()
    }

    /// Label seeded at `node`, if any.
    pub fn label_of(&self, node: NodeId) -> Option<usize> {
        self.sets.iter().position(|s| s.contains(&node))
    }

    pub fn is_seed(&self, node: NodeId) -> bool {
        self.label_of(node).is_some()
    }

    /// The same sets with labels reordered: new label `l` gets old set `perm[l]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        Self::new(perm.iter().map(|&l| self.sets[l].clone()).collect())
    }
}

/// `per_label` distinct nodes drawn uniformly from each ground-truth class.
pub fn sample_seeds(truth: &[usize], per_label: usize, seed: u64) -> Result<LabeledSeedSets> {
    let labels = truth.iter().copied().max().map_or(0, |m| m + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sets = Vec::with_capacity(labels);
    for l in 0..labels {
        let members: Vec<NodeId> = (0..truth.len()).filter(|&i| truth[i] == l).collect();
        if members.len() < per_label {
            return Err(Error::InvalidInput(format!(
                "label {l} has {} nodes, cannot draw {per_label}",
                members.len()
            )));
        }
        let mut chosen: Vec<NodeId> = sample(&mut rng, members.len(), per_label).into_iter().map(|k| members[k]).collect();
        chosen.sort_unstable();
        sets.push(chosen);
    }
    LabeledSeedSets::new(sets)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    /// `None` when no front reaches the node.
    pub labels: Vec<Option<usize>>,
    /// Several fronts arrived at the minimal time; the smallest label won.
    pub ties: Vec<bool>,
    /// Arrival time of every label's front, indexed `[label][node]`.
    pub times: Vec<Vec<f64>>,
}

/// Minimal times closer than this count as a tie.
pub const LABEL_TIE_TOLERANCE: f64 = 1e-12;

/// Label of the earliest front at every node, with `s = 1`.
pub fn classify(graph: &Graph, seeds: &LabeledSeedSets, p: Exponent) -> Result<Classification> {
    let n = graph.node_count();
    let specs = seeds
        .sets()
        .iter()
        .map(|set| ProblemSpec::unit(n, set, p))
        .collect::<Result<Vec<_>>>()?;
    let times = multi_source_solve(graph, &specs)
        .into_iter()
        .map(|r| r.map(|f| f.into_times()))
        .collect::<Result<Vec<_>>>()?;
    let mut labels = vec![None; n];
    let mut ties = vec![false; n];
    for i in 0..n {
        if let Some(l) = seeds.label_of(i) {
            labels[i] = Some(l);
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for (l, u) in times.iter().enumerate() {
            let t = u[i];
            if !t.is_finite() {
                continue;
            }
            match best {
                None => best = Some((l, t)),
                Some((_, b)) if (t - b).abs() <= LABEL_TIE_TOLERANCE * b.abs().max(1.0) => ties[i] = true,
                Some((_, b)) if t < b => {
                    best = Some((l, t));
                    ties[i] = false;
                }
                _ => {}
            }
        }
        labels[i] = best.map(|(l, _)| l);
    }
    Ok(Classification { labels, ties, times })
}

/// Percentage of non-seed nodes whose prediction matches the truth;
/// unlabeled nodes count as wrong. 100 when every node is a seed.
pub fn accuracy(pred: &[Option<usize>], truth: &[usize], seeds: &LabeledSeedSets) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::InvalidInput(format!("{} predictions for {} nodes", pred.len(), truth.len())));
    }
    let (mut total, mut correct) = (0usize, 0usize);
    for i in (0..truth.len()).filter(|&i| !seeds.is_seed(i)) {
        total += 1;
        if pred[i] == Some(truth[i]) {
            correct += 1;
        }
    }
    Ok(if total == 0 { 100.0 } else { 100.0 * correct as f64 / total as f64 })
}

/// Parameters of the two-moons benchmark.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TwoMoonsConfig {
    pub n: usize,
    pub dim: usize,
    pub noise_var: f64,
    pub k: usize,
    pub per_label: usize,
    pub runs: usize,
    pub data_seed: u64,
    pub label_seed: u64,
    pub weight: KnnWeight,
}

impl Default for TwoMoonsConfig {
    fn default() -> Self {
        Self {
            n: 2000,
            dim: 100,
            noise_var: 0.02,
            k: 10,
            per_label: 15,
            runs: 20,
            data_seed: 7,
            label_seed: 1000,
            weight: KnnWeight::ZpScaled,
        }
    }
}

/// Accuracy of every run for each `p`, sharing one data set and graph; run
/// `r` draws its seeds with `label_seed + r`. Indexed `[p][run]`.
pub fn two_moons_accuracy(cfg: &TwoMoonsConfig, ps: &[Exponent]) -> Result<Vec<Vec<f64>>> {
    let cloud = two_moons(cfg.n, cfg.dim, cfg.noise_var, cfg.data_seed)?;
    let graph = knn_graph(&cloud, cfg.k, cfg.weight)?;
    let truth = cloud.labels().expect("generated with labels");
    let seeds: Vec<LabeledSeedSets> = (0..cfg.runs)
        .map(|r| sample_seeds(truth, cfg.per_label, cfg.label_seed.wrapping_add(r as u64)))
        .collect::<Result<_>>()?;
    ps.iter()
        .map(|&p| {
            seeds
                .par_iter()
                .map(|s| accuracy(&classify(&graph, s, p)?.labels, truth, s))
                .collect()
        })
        .collect()
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}
