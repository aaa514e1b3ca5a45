//! Planar test graphs: regular grids, square stencils and uniform random
//! geometric graphs, plus the error measurements run on them.
//!
//! Lattices are anchored at the origin so that a grid node sits exactly on
//! a centred source, and are clipped to the domain box; nodes near the box
//! edge simply have fewer neighbours.

use std::collections::HashMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::front::{solve, ArrivalField};
use crate::graph::{Exponent, Graph, NodeId, ProblemSpec};

pub type Point = [f64; 2];

/// Scaling of the triangular-grid solution in the convergence table.
pub const C_TRIANGULAR: f64 = 0.866_025_403_784_438_6; // sqrt(3/4)
/// Scaling of the honeycomb solution in the convergence table.
pub const C_HEXAGONAL: f64 = 1.224_744_871_391_589; // sqrt(6/4)

/// `sqrt(kappa / 4)`: maps a `p = 2` solution on a grid with `kappa`
/// neighbours onto the square-grid solution.
pub fn kappa_scale(kappa: f64) -> f64 {
    (kappa / 4.0).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub min: Point,
    pub max: Point,
}

impl Domain {
    pub fn new(min: Point, max: Point) -> Result<Self> {
        let ok = min.iter().chain(&max).all(|v| v.is_finite()) && min[0] < max[0] && min[1] < max[1];
        if !ok {
            return Err(Error::InvalidGrid(format!("empty or non-finite domain {min:?}..{max:?}")));
        }
        Ok(Self { min, max })
    }

    /// `[-a, a]^2`.
    pub fn centered_square(a: f64) -> Self {
        Self { min: [-a, -a], max: [a, a] }
    }

    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    fn contains(&self, x: Point, tol: f64) -> bool {
        (0..2).all(|k| x[k] >= self.min[k] - tol && x[k] <= self.max[k] + tol)
    }

    /// Shrinks every side by `margin`.
    pub fn shrink(&self, margin: f64) -> Result<Self> {
        Self::new([self.min[0] + margin, self.min[1] + margin], [self.max[0] - margin, self.max[1] - margin])
    }
}

impl Default for Domain {
    fn default() -> Self {
        Self::centered_square(1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Square,
    Triangular,
    /// Degree-3 honeycomb with edge length `h`.
    Hexagonal,
    /// Lattice vectors `h(1, 0)` and `h(cos pi/3, sin pi/3)`, four neighbours.
    Rhombus,
}

impl GridKind {
    pub const ALL: [GridKind; 4] = [GridKind::Square, GridKind::Triangular, GridKind::Hexagonal, GridKind::Rhombus];

    /// Interior degree.
    pub fn kappa(self) -> usize {
        match self {
            GridKind::Square | GridKind::Rhombus => 4,
            GridKind::Triangular => 6,
            GridKind::Hexagonal => 3,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            GridKind::Square => "S",
            GridKind::Triangular => "T",
            GridKind::Hexagonal => "H",
            GridKind::Rhombus => "R",
        }
    }
}

impl std::str::FromStr for GridKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "square" | "s" => Ok(GridKind::Square),
            "triangular" | "t" => Ok(GridKind::Triangular),
            "hexagonal" | "honeycomb" | "h" => Ok(GridKind::Hexagonal),
            "rhombus" | "r" => Ok(GridKind::Rhombus),
            _ => Err(Error::InvalidInput(format!("unknown grid kind {s:?}"))),
        }
    }
}

/// Radius of a square-grid stencil, in multiples of the spacing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StencilRadius {
    H,
    Sqrt2H,
    TwoH,
    Sqrt5H,
}

impl StencilRadius {
    pub const ALL: [StencilRadius; 4] =
        [StencilRadius::H, StencilRadius::Sqrt2H, StencilRadius::TwoH, StencilRadius::Sqrt5H];

    fn squared_steps(self) -> i64 {
        match self {
            StencilRadius::H => 1,
            StencilRadius::Sqrt2H => 2,
            StencilRadius::TwoH => 4,
            StencilRadius::Sqrt5H => 5,
        }
    }

    pub fn radius(self, h: f64) -> f64 {
        h * (self.squared_steps() as f64).sqrt()
    }

    pub fn degree(self) -> usize {
        match self {
            StencilRadius::H => 4,
            StencilRadius::Sqrt2H => 8,
            StencilRadius::TwoH => 12,
            StencilRadius::Sqrt5H => 20,
        }
    }
}

/// Radial kernel profile `eta`, nonincreasing with `eta(0) > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelProfile {
    /// `eta(t) = 1` on `[0, 1]`. Edges beyond the bandwidth get weight zero
    /// and are rejected by the graph constructor.
    Indicator,
    /// `eta(t) = exp(-t^2)`.
    Gaussian,
}

impl KernelProfile {
    pub fn eval(self, t: f64) -> f64 {
        match self {
            KernelProfile::Indicator => {
                if t <= 1.0 + 1e-12 {
                    1.0
                } else {
                    0.0
                }
            }
            KernelProfile::Gaussian => (-t * t).exp(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightRule {
    /// `1 / h` on every edge.
    InverseSpacing,
    /// `1 / |x_i - x_j|`.
    InverseDistance,
    /// `eta(|x_i - x_j| / bandwidth) / bandwidth`.
    Kernel { profile: KernelProfile, bandwidth: f64 },
}

impl WeightRule {
    fn weight(self, h: f64, dist: f64) -> f64 {
        match self {
            WeightRule::InverseSpacing => 1.0 / h,
            WeightRule::InverseDistance => 1.0 / dist,
            WeightRule::Kernel { profile, bandwidth } => profile.eval(dist / bandwidth) / bandwidth,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingKind {
    Grid(GridKind),
    Stencil(StencilRadius),
    UniformRandom { count: usize, seed: u64, radius: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingMeta {
    pub kind: EmbeddingKind,
    /// Grid length; for random graphs the mean neighbour distance `eps / sqrt(2)`.
    pub spacing: f64,
    pub domain: Domain,
}

/// A graph with a planar position for every node.
#[derive(Clone, Debug)]
pub struct EmbeddedGraph {
    pub graph: Graph,
    pub coords: Vec<Point>,
    pub meta: EmbeddingMeta,
}

impl EmbeddedGraph {
    pub fn node_count(&self) -> usize {
        self.coords.len()
    }

    /// Node closest to `x` (ties to the smaller id).
    pub fn nearest_node(&self, x: Point) -> NodeId {
        let mut best = (f64::INFINITY, 0);
        for (i, c) in self.coords.iter().enumerate() {
            let d = dist2(*c, x);
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }

    pub fn nearest_nodes(&self, xs: &[Point]) -> Vec<NodeId> {
        xs.iter().map(|&x| self.nearest_node(x)).collect()
    }

    pub fn distance(&self, a: NodeId, b: NodeId) -> f64 {
        dist2(self.coords[a], self.coords[b]).sqrt()
    }

    /// Piecewise-linear value of `field` at `x`: bilinear on square cells,
    /// barycentric on triangular ones. Other embeddings fall back to the
    /// nearest node.
    pub fn interpolate(&self, field: &ArrivalField, x: Point) -> Result<f64> {
        let h = self.meta.spacing;
        let (c, s) = ((PI / 3.0).cos(), (PI / 3.0).sin());
        let (v2, triangles) = match self.meta.kind {
            EmbeddingKind::Grid(GridKind::Square) | EmbeddingKind::Stencil(_) => ([0.0, h], false),
            EmbeddingKind::Grid(GridKind::Triangular) => ([h * c, h * s], true),
            EmbeddingKind::Grid(GridKind::Rhombus) => ([h * c, h * s], false),
            _ => {
                let i = self.nearest_node(x);
                return if field.is_reached(i) { Ok(field.time(i)) } else { Err(Error::Unreached(i)) };
            }
        };
        let b = x[1] / v2[1];
        let a = (x[0] - b * v2[0]) / h;
        let (a0, b0) = (a.floor(), b.floor());
        let (fa, fb) = (a - a0, b - b0);
        let at = |da: f64, db: f64| -> Result<f64> {
            let corner = [(a0 + da) * h + (b0 + db) * v2[0], (b0 + db) * v2[1]];
            let i = self.nearest_node(corner);
            if field.is_reached(i) {
                Ok(field.time(i))
            } else {
                Err(Error::Unreached(i))
            }
        };
        Ok(if !triangles {
            (1.0 - fa) * (1.0 - fb) * at(0.0, 0.0)?
                + fa * (1.0 - fb) * at(1.0, 0.0)?
                + (1.0 - fa) * fb * at(0.0, 1.0)?
                + fa * fb * at(1.0, 1.0)?
        } else if fa + fb <= 1.0 {
            (1.0 - fa - fb) * at(0.0, 0.0)? + fa * at(1.0, 0.0)? + fb * at(0.0, 1.0)?
        } else {
            (fa + fb - 1.0) * at(1.0, 1.0)? + (1.0 - fb) * at(1.0, 0.0)? + (1.0 - fa) * at(0.0, 1.0)?
        })
    }
}

fn dist2(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

fn check_spacing(h: f64, domain: &Domain) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidGrid(format!("spacing must be positive, got {h}")));
    }
    if h > domain.width() || h > domain.height() {
        return Err(Error::InvalidGrid(format!(
            "spacing {h} exceeds the domain ({} x {})",
            domain.width(),
            domain.height()
        )));
    }
    Ok(())
}

/// Sites of a lattice `a v1 + b v2 + offset` inside the domain, keyed by
/// `(a, b, sublattice)`.
struct Lattice {
    coords: Vec<Point>,
    index: HashMap<(i64, i64, u8), NodeId>,
    keys: Vec<(i64, i64, u8)>,
}

impl Lattice {
    fn build(domain: &Domain, v1: Point, v2: Point, offsets: &[Point], tol: f64) -> Self {
        // v1 is horizontal for every lattice used here.
        debug_assert!(v1[1] == 0.0 && v2[1] > 0.0);
        let mut coords = Vec::new();
        let mut index = HashMap::new();
        let mut keys = Vec::new();
        let b_lo = ((domain.min[1] - 2.0 * v2[1]) / v2[1]).floor() as i64;
        let b_hi = ((domain.max[1] + 2.0 * v2[1]) / v2[1]).ceil() as i64;
        for b in b_lo..=b_hi {
            let shift = b as f64 * v2[0];
            let a_lo = ((domain.min[0] - shift) / v1[0]).floor() as i64 - 2;
            let a_hi = ((domain.max[0] - shift) / v1[0]).ceil() as i64 + 2;
            for a in a_lo..=a_hi {
                for (k, off) in offsets.iter().enumerate() {
                    let x = [
                        a as f64 * v1[0] + b as f64 * v2[0] + off[0],
                        b as f64 * v2[1] + off[1],
                    ];
                    if domain.contains(x, tol) {
                        let key = (a, b, k as u8);
                        index.insert(key, coords.len());
                        keys.push(key);
                        coords.push(x);
                    }
                }
            }
        }
        Self { coords, index, keys }
    }

    /// Undirected edges to `(a + da, b + db, sub')` for each offset listed
    /// for the source sublattice.
    fn edges(&self, steps: &[Vec<(i64, i64, u8)>]) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for (i, &(a, b, k)) in self.keys.iter().enumerate() {
            for &(da, db, k2) in &steps[k as usize] {
                if let Some(&j) = self.index.get(&(a + da, b + db, k2)) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

fn assemble(coords: Vec<Point>, pairs: Vec<(NodeId, NodeId)>, rule: WeightRule, meta: EmbeddingMeta) -> Result<EmbeddedGraph> {
    let h = meta.spacing;
    let edges = pairs.into_iter().map(|(i, j)| {
        let w = rule.weight(h, dist2(coords[i], coords[j]).sqrt());
        (i, j, w)
    });
    let graph = Graph::new(coords.len(), edges.collect::<Vec<_>>())?;
    Ok(EmbeddedGraph { graph, coords, meta })
}

/// Regular grid of spacing `h` clipped to `domain`. Each adjacency becomes
/// two directed edges with equal weight.
pub fn make_regular_grid(kind: GridKind, h: f64, domain: Domain, rule: WeightRule) -> Result<EmbeddedGraph> {
    check_spacing(h, &domain)?;
    let tol = 1e-9 * h;
    let (c, s) = ((PI / 3.0).cos(), (PI / 3.0).sin());
    let (lattice, steps) = match kind {
        GridKind::Square => (
            Lattice::build(&domain, [h, 0.0], [0.0, h], &[[0.0, 0.0]], tol),
            vec![vec![(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)]],
        ),
        GridKind::Triangular => (
            Lattice::build(&domain, [h, 0.0], [h * c, h * s], &[[0.0, 0.0]], tol),
            vec![vec![(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (-1, 1, 0), (1, -1, 0)]],
        ),
        GridKind::Rhombus => (
            Lattice::build(&domain, [h, 0.0], [h * c, h * s], &[[0.0, 0.0]], tol),
            vec![vec![(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)]],
        ),
        GridKind::Hexagonal => {
            // A sites on the lattice a1 = (sqrt3 h, 0), a2 = (sqrt3 h / 2, 3h/2);
            // B sites offset by (0, h).
            let r3 = 3f64.sqrt();
            (
                Lattice::build(&domain, [r3 * h, 0.0], [r3 * h / 2.0, 1.5 * h], &[[0.0, 0.0], [0.0, h]], tol),
                vec![
                    vec![(0, 0, 1), (1, -1, 1), (0, -1, 1)],
                    vec![(0, 0, 0), (-1, 1, 0), (0, 1, 0)],
                ],
            )
        }
    };
    let pairs = lattice.edges(&steps);
    let meta = EmbeddingMeta { kind: EmbeddingKind::Grid(kind), spacing: h, domain };
    assemble(lattice.coords, pairs, rule, meta)
}

/// Square grid where every pair within `radius` is joined.
pub fn make_square_stencil_graph(
    h: f64,
    domain: Domain,
    radius: StencilRadius,
    rule: WeightRule,
) -> Result<EmbeddedGraph> {
    check_spacing(h, &domain)?;
    let lattice = Lattice::build(&domain, [h, 0.0], [0.0, h], &[[0.0, 0.0]], 1e-9 * h);
    let r2 = radius.squared_steps();
    let mut offsets = Vec::new();
    for da in -2i64..=2 {
        for db in -2i64..=2 {
            let d = da * da + db * db;
            if d > 0 && d <= r2 {
                offsets.push((da, db, 0u8));
            }
        }
    }
    let pairs = lattice.edges(&[offsets]);
    let meta = EmbeddingMeta { kind: EmbeddingKind::Stencil(radius), spacing: h, domain };
    assemble(lattice.coords, pairs, rule, meta)
}

/// `m` i.i.d. uniform points joined whenever they are within
/// `eps = 4 / sqrt(m)` of each other.
pub fn make_uniform_random(m: usize, domain: Domain, seed: u64, rule: WeightRule) -> Result<EmbeddedGraph> {
    if m < 2 {
        return Err(Error::InvalidGrid(format!("need at least 2 points, got {m}")));
    }
    let eps = 4.0 / (m as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords: Vec<Point> = (0..m)
        .map(|_| {
            [
                rng.random_range(domain.min[0]..domain.max[0]),
                rng.random_range(domain.min[1]..domain.max[1]),
            ]
        })
        .collect();
    let pairs = radius_pairs(&coords, &domain, eps);
    let meta = EmbeddingMeta {
        kind: EmbeddingKind::UniformRandom { count: m, seed, radius: eps },
        spacing: eps / 2f64.sqrt(),
        domain,
    };
    assemble(coords, pairs, rule, meta)
}

/// All ordered pairs within `eps`, via a bucket grid with cell size `eps`.
fn radius_pairs(coords: &[Point], domain: &Domain, eps: f64) -> Vec<(NodeId, NodeId)> {
    let cell = |x: Point| -> (i64, i64) {
        (((x[0] - domain.min[0]) / eps).floor() as i64, ((x[1] - domain.min[1]) / eps).floor() as i64)
    };
    let mut buckets: HashMap<(i64, i64), Vec<NodeId>> = HashMap::new();
    for (i, &x) in coords.iter().enumerate() {
        buckets.entry(cell(x)).or_default().push(i);
    }
    let eps2 = eps * eps;
    let mut pairs = Vec::new();
    for (i, &x) in coords.iter().enumerate() {
        let (cx, cy) = cell(x);
        for dx in -1..=1 {
            for dy in -1..=1 {
                let Some(bucket) = buckets.get(&(cx + dx, cy + dy)) else { continue };
                for &j in bucket {
                    if j != i && dist2(x, coords[j]) <= eps2 {
                        pairs.push((i, j));
                    }
                }
            }
        }
    }
    pairs
}

/// `count` points uniform in `domain` shrunk by `margin`.
pub fn probe_points(domain: &Domain, margin: f64, count: usize, seed: u64) -> Result<Vec<Point>> {
    let inner = domain.shrink(margin)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            [
                rng.random_range(inner.min[0]..inner.max[0]),
                rng.random_range(inner.min[1]..inner.max[1]),
            ]
        })
        .collect())
}

/// Probe placement shared by the convergence and scaling experiments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeProtocol {
    pub count: usize,
    pub margin: f64,
    pub seed: u64,
}

impl Default for ProbeProtocol {
    fn default() -> Self {
        Self { count: 10, margin: 0.1, seed: 2024 }
    }
}

impl ProbeProtocol {
    pub fn points(&self, domain: &Domain) -> Result<Vec<Point>> {
        probe_points(domain, self.margin, self.count, self.seed)
    }
}

/// `(1/|probes|) sum |u(x_i) - c d(x_i, x_0)|^2` with `d` Euclidean between
/// node positions.
pub fn euclidean_error(
    field: &ArrivalField,
    embed: &EmbeddedGraph,
    source: NodeId,
    probes: &[NodeId],
    c: f64,
) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::InvalidInput("no probe nodes".into()));
    }
    let mut sum = 0.0;
    for &i in probes {
        if !field.is_reached(i) {
            return Err(Error::Unreached(i));
        }
        let e = field.time(i) - c * embed.distance(i, source);
        sum += e * e;
    }
    Ok(sum / probes.len() as f64)
}

/// Unit-slowness solve from the node nearest the origin.
pub fn solve_from_origin(embed: &EmbeddedGraph, p: Exponent) -> Result<(NodeId, ArrivalField)> {
    let source = embed.nearest_node([0.0, 0.0]);
    let spec = ProblemSpec::unit(embed.node_count(), &[source], p)?;
    Ok((source, solve(&embed.graph, &spec)?))
}

/// Constant `c` used for grid `kind` in the convergence table.
pub fn table_scale(kind: GridKind) -> f64 {
    match kind {
        GridKind::Square => 1.0,
        GridKind::Triangular => C_TRIANGULAR,
        GridKind::Hexagonal => C_HEXAGONAL,
        GridKind::Rhombus => 1.0,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub kind: GridKind,
    pub h: f64,
    pub scale: f64,
    pub nodes: usize,
    pub error: f64,
}

/// [`euclidean_error`] for every `(kind, h)` pair on `[-1, 1]^2` with
/// `w = 1/h`, `s = 1`, the source at the origin and [`table_scale`]
/// constants. Rows come back in `kinds`-major order.
pub fn convergence_table(kinds: &[GridKind], hs: &[f64], p: Exponent, probes: ProbeProtocol) -> Result<Vec<ConvergenceRow>> {
    let domain = Domain::default();
    let points = probes.points(&domain)?;
    let jobs: Vec<(GridKind, f64)> = kinds.iter().flat_map(|&k| hs.iter().map(move |&h| (k, h))).collect();
    jobs.par_iter()
        .map(|&(kind, h)| {
            let embed = make_regular_grid(kind, h, domain, WeightRule::InverseSpacing)?;
            let (source, field) = solve_from_origin(&embed, p)?;
            let nodes = embed.nearest_nodes(&points);
            let scale = table_scale(kind);
            let error = euclidean_error(&field, &embed, source, &nodes, scale)?;
            Ok(ConvergenceRow { kind, h, scale, nodes: embed.node_count(), error })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingEntry {
    pub kind: GridKind,
    pub scale: f64,
    /// `max_i |scale * u_kind(x_i) - u_S(x_i)| / max_i |u_S(x_i)|` over the probes.
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KappaScalingReport {
    pub h: f64,
    pub p: Exponent,
    pub entries: Vec<ScalingEntry>,
}

impl KappaScalingReport {
    pub fn deviation(&self, kind: GridKind) -> Option<f64> {
        self.entries.iter().find(|e| e.kind == kind).map(|e| e.deviation)
    }
}

/// Compares `sqrt(kappa/4) * u` on the triangular and honeycomb grids with
/// the square-grid solution at the probe points, each field evaluated with
/// [`EmbeddedGraph::interpolate`].
pub fn kappa_scaling_check(h: f64, p: Exponent, probes: ProbeProtocol) -> Result<KappaScalingReport> {
    let domain = Domain::default();
    let points = probes.points(&domain)?;
    let at_probes = |kind: GridKind| -> Result<Vec<f64>> {
        let embed = make_regular_grid(kind, h, domain, WeightRule::InverseSpacing)?;
        let (_, field) = solve_from_origin(&embed, p)?;
        points.iter().map(|&x| embed.interpolate(&field, x)).collect()
    };
    let kinds = [GridKind::Square, GridKind::Triangular, GridKind::Hexagonal];
    let values: Vec<Vec<f64>> = kinds.par_iter().map(|&k| at_probes(k)).collect::<Result<_>>()?;
    let square = &values[0];
    let norm = square.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let entries = kinds[1..]
        .iter()
        .zip(&values[1..])
        .map(|(&kind, vals)| {
            let scale = kappa_scale(kind.kappa() as f64);
            let diff = vals.iter().zip(square).map(|(&u, &us)| (scale * u - us).abs()).fold(0.0, f64::max);
            ScalingEntry { kind, scale, deviation: diff / norm }
        })
        .collect();
    Ok(KappaScalingReport { h, p, entries })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformRow {
    pub m: usize,
    pub mean_degree: f64,
    pub error: f64,
}

/// Uniform random graph experiment: `c_U = sqrt(K/4)` times the solution,
/// averaged over `realisations` graphs at each probe point, against the
/// probe's distance to the origin.
pub fn uniform_random_error(m: usize, realisations: usize, seed: u64, p: Exponent, probes: ProbeProtocol) -> Result<UniformRow> {
    if realisations == 0 {
        return Err(Error::InvalidInput("need at least one realisation".into()));
    }
    let domain = Domain::default();
    let points = probes.points(&domain)?;
    let runs: Vec<(f64, Vec<f64>)> = (0..realisations)
        .into_par_iter()
        .map(|r| {
            let embed = make_uniform_random(m, domain, seed.wrapping_add(r as u64), WeightRule::InverseDistance)?;
            let k = embed.graph.mean_degree();
            let (_, field) = solve_from_origin(&embed, p)?;
            let scaled = embed
                .nearest_nodes(&points)
                .into_iter()
                .map(|i| if field.is_reached(i) { Ok(kappa_scale(k) * field.time(i)) } else { Err(Error::Unreached(i)) })
                .collect::<Result<Vec<_>>>()?;
            Ok((k, scaled))
        })
        .collect::<Result<_>>()?;
    let n = realisations as f64;
    let mean_degree = runs.iter().map(|r| r.0).sum::<f64>() / n;
    let error = points
        .iter()
        .enumerate()
        .map(|(q, x)| {
            let avg = runs.iter().map(|r| r.1[q]).sum::<f64>() / n;
            (avg - (x[0] * x[0] + x[1] * x[1]).sqrt()).powi(2)
        })
        .sum::<f64>()
        / points.len() as f64;
    Ok(UniformRow { m, mean_degree, error })
}
