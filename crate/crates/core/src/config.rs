//! JSON experiment configs. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euclid::{
    make_regular_grid, make_square_stencil_graph, make_uniform_random, Domain, EmbeddedGraph, GridKind, ProbeProtocol,
    StencilRadius, WeightRule,
};
use crate::graph::{Exponent, Graph, NodeId, ProblemSpec};
use crate::io::{parse_edge_list, IdTable};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSource {
    /// Path to an edge-list file, relative to the config file.
    EdgeList(PathBuf),
    Grid {
        kind: GridKind,
        h: f64,
        #[serde(default = "inverse_spacing")]
        weights: WeightRule,
        #[serde(default)]
        domain: Domain,
    },
    Stencil {
        h: f64,
        radius: StencilRadius,
        #[serde(default = "inverse_distance")]
        weights: WeightRule,
        #[serde(default)]
        domain: Domain,
    },
    UniformRandom {
        m: usize,
        seed: u64,
        #[serde(default = "inverse_distance")]
        weights: WeightRule,
        #[serde(default)]
        domain: Domain,
    },
}

fn inverse_spacing() -> WeightRule {
    WeightRule::InverseSpacing
}

fn inverse_distance() -> WeightRule {
    WeightRule::InverseDistance
}

/// A boundary node, by name (edge lists), by id, or by the embedded node
/// nearest a point (generated graphs).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundaryEntry {
    Id(NodeId),
    Name(String),
    Valued {
        node: BoundaryNode,
        #[serde(default)]
        value: f64,
    },
    Point {
        point: [f64; 2],
        #[serde(default)]
        value: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundaryNode {
    Id(NodeId),
    Name(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SlownessSpec {
    #[default]
    Unit,
    Constant(f64),
    Values(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub boundary: Vec<BoundaryEntry>,
    #[serde(default)]
    pub slowness: SlownessSpec,
    pub p: Exponent,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// A config turned into something solvable.
#[derive(Clone, Debug)]
pub struct ResolvedExperiment {
    pub graph: Graph,
    pub spec: ProblemSpec,
    pub ids: IdTable,
    pub embedding: Option<EmbeddedGraph>,
}

fn config_err(e: serde_json::Error) -> Error {
    Error::Config(e.to_string())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(config_err)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Builds the graph and problem. Relative paths resolve against `base`.
    pub fn resolve(&self, base: &Path) -> Result<ResolvedExperiment> {
        let (graph, ids, embedding) = match &self.graph {
            GraphSource::EdgeList(path) => {
                let full = base.join(path);
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", full.display())))?;
                let (g, ids) = parse_edge_list(&text)?;
                (g, ids, None)
            }
            GraphSource::Grid { kind, h, weights, domain } => embedded(make_regular_grid(*kind, *h, *domain, *weights)?),
            GraphSource::Stencil { h, radius, weights, domain } => {
                embedded(make_square_stencil_graph(*h, *domain, *radius, *weights)?)
            }
            GraphSource::UniformRandom { m, seed, weights, domain } => {
                embedded(make_uniform_random(*m, *domain, *seed, *weights)?)
            }
        };
        let n = graph.node_count();
        let node = |b: &BoundaryNode| match b {
            BoundaryNode::Id(i) if ids.is_numeric() || embedding.is_some() => Ok(*i),
            BoundaryNode::Id(i) => ids.resolve(&i.to_string()),
            BoundaryNode::Name(s) => ids.resolve(s),
        };
        let boundary = self
            .boundary
            .iter()
            .map(|b| match b {
                BoundaryEntry::Id(i) => Ok((node(&BoundaryNode::Id(*i))?, 0.0)),
                BoundaryEntry::Name(s) => Ok((node(&BoundaryNode::Name(s.clone()))?, 0.0)),
                BoundaryEntry::Valued { node: b, value } => Ok((node(b)?, *value)),
                BoundaryEntry::Point { point, value } => match &embedding {
                    Some(e) => Ok((e.nearest_node(*point), *value)),
                    None => Err(Error::Config("point boundary entries need a generated graph".into())),
                },
            })
            .collect::<Result<Vec<_>>>()?;
        let slowness = match &self.slowness {
            SlownessSpec::Unit => vec![1.0; n],
            SlownessSpec::Constant(s) => vec![*s; n],
            SlownessSpec::Values(v) => v.clone(),
        };
        let spec = ProblemSpec::new(n, boundary, slowness, self.p)?;
        Ok(ResolvedExperiment { graph, spec, ids, embedding })
    }
}

fn embedded(e: EmbeddedGraph) -> (Graph, IdTable, Option<EmbeddedGraph>) {
    (e.graph.clone(), IdTable::identity(e.node_count()), Some(e))
}

/// Convergence-table benchmark settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchConfig {
    pub kinds: Vec<GridKind>,
    pub hs: Vec<f64>,
    pub p: Exponent,
    pub probes: ProbeProtocol,
    /// Uniform random graph sizes; empty skips that experiment.
    pub uniform_m: Vec<usize>,
    pub uniform_realisations: usize,
    pub uniform_seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            kinds: vec![GridKind::Square, GridKind::Triangular, GridKind::Hexagonal],
            hs: vec![0.08, 0.04, 0.02, 0.01],
            p: Exponent::TWO,
            probes: ProbeProtocol::default(),
            uniform_m: Vec::new(),
            uniform_realisations: 10,
            uniform_seed: 11,
        }
    }
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(config_err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_config() {
        let cfg = ExperimentConfig::from_json(
            r#"{"graph": {"grid": {"kind": "square", "h": 0.5}}, "boundary": [{"point": [0, 0]}], "p": "inf"}"#,
        )
        .unwrap();
        let r = cfg.resolve(Path::new(".")).unwrap();
        assert_eq!(r.graph.node_count(), 25);
        assert_eq!(r.spec.boundary_nodes(), vec![12]);
        assert!(r.spec.p().is_infinite());
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = r#"{"graph": {"grid": {"kind": "square", "h": 0.5}}, "boundary": [0], "p": 2, "colour": "red"}"#;
        assert!(matches!(ExperimentConfig::from_json(bad), Err(Error::Config(_))));
        assert!(BenchConfig::from_json(r#"{"hs": [0.1], "bogus": 1}"#).is_err());
        let b = BenchConfig::from_json(r#"{"hs": [0.1], "p": 1.5}"#).unwrap();
        assert_eq!(b.p, Exponent::new(1.5).unwrap());
        assert_eq!(b.kinds.len(), 3);
    }

    #[test]
    fn edge_list_config() {
        let dir = std::env::temp_dir().join(format!("eik-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("g.csv"), "a,b,1\nb,c,2\n").unwrap();
        let cfg = ExperimentConfig::from_json(
            r#"{"graph": {"edge_list": "g.csv"}, "boundary": ["a", {"node": "c", "value": 0.25}], "slowness": {"constant": 2.0}, "p": 1}"#,
        )
        .unwrap();
        let r = cfg.resolve(&dir).unwrap();
        assert_eq!(r.spec.boundary(), &[(0, 0.0), (2, 0.25)]);
        assert_eq!(r.spec.slowness(), &[2.0, 2.0, 2.0]);
        let missing = ExperimentConfig::from_json(r#"{"graph": {"edge_list": "nope.csv"}, "boundary": [0], "p": 1}"#).unwrap();
        assert!(missing.resolve(&dir).is_err());
        std::fs::remove_dir_all(&dir).ok();
    }
}
