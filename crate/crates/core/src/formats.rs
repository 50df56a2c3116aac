//! JSON file formats. See `docs/formats.md` for the schemas.
//!
//! Every file type has a plain serde struct mirroring the JSON, a loader
//! that turns it into the engine type, and an exporter going the other way.
//! Nested graph and map descriptions may be inline objects or paths
//! relative to the referring file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::branched_graph::{BranchedGraph, CellularMap, Side};
use crate::error::{Error, Result};
use crate::gahler::language::{Alphabet, LanguageOracle, Substitution};
use crate::graph::{EdgeId, Graph, HalfEdge, VertexId};
use crate::holonomy::{ClopenSet, Cylinder};
use crate::inverse_system::InverseSystem;
use crate::local_model::{BranchTree, HalfSpace, Sector};
use crate::profinite::{CoveringTower, GraphCovering};
use crate::rational::{format_rational, parse_rational};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("format structs always serialize")
}

/// An inline value or a path to a file holding it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ref<T> {
    Path(String),
    Inline(T),
}

impl<T: DeserializeOwned + Clone> Ref<T> {
    pub fn resolve(&self, dir: &Path) -> Result<T> {
        match self {
            Ref::Inline(v) => Ok(v.clone()),
            Ref::Path(p) => read_json(&dir.join(p)),
        }
    }
}

fn dir_of(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub id: String,
    pub src: String,
    pub dst: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidesSpec {
    #[serde(rename = "A", default)]
    pub a: Vec<String>,
    #[serde(rename = "B", default)]
    pub b: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    /// When absent, side `A` holds incoming and side `B` outgoing half-edges.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sides: Option<BTreeMap<String, SidesSpec>>,
}

impl GraphFile {
    pub fn plain_graph(&self) -> Result<Graph> {
        Graph::new(
            self.vertices.iter().cloned(),
            self.edges.iter().map(|e| (e.id.clone(), e.src.clone(), e.dst.clone())),
        )
    }

    pub fn to_branched(&self) -> Result<BranchedGraph> {
        let graph = self.plain_graph()?;
        let Some(sides) = &self.sides else {
            return Ok(BranchedGraph::directed(graph));
        };
        for name in sides.keys() {
            graph.vertex_id(name)?;
        }
        let parse = |hs: &[String]| hs.iter().map(|h| graph.parse_half_edge(h)).collect::<Result<Vec<HalfEdge>>>();
        let mut table = Vec::with_capacity(graph.vertex_count());
        for v in graph.vertices() {
            let spec = sides.get(graph.vertex_name(v)).cloned().unwrap_or_default();
            table.push([parse(&spec.a)?, parse(&spec.b)?]);
        }
        BranchedGraph::new(graph, table)
    }

    pub fn from_plain(g: &Graph) -> Self {
        GraphFile {
            vertices: g.vertex_names().to_vec(),
            edges: g
                .edges()
                .map(|e| EdgeSpec {
                    id: g.edge_name(e).to_string(),
                    src: g.vertex_name(g.src(e)).to_string(),
                    dst: g.vertex_name(g.dst(e)).to_string(),
                })
                .collect(),
            sides: None,
        }
    }

    pub fn from_branched(g: &BranchedGraph) -> Self {
        let graph = g.graph();
        let mut out = Self::from_plain(graph);
        let names = |hs: &[HalfEdge]| hs.iter().map(|&h| graph.format_half_edge(h)).collect();
        out.sides = Some(
            graph
                .vertices()
                .map(|v| {
                    let spec = SidesSpec { a: names(g.side(v, Side::A)), b: names(g.side(v, Side::B)) };
                    (graph.vertex_name(v).to_string(), spec)
                })
                .collect(),
        );
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapFile {
    pub vertex_map: BTreeMap<String, String>,
    /// Edge to signed edge path, e.g. `["a", "b-"]`.
    pub edge_map: BTreeMap<String, Vec<String>>,
}

impl MapFile {
    pub fn to_map(&self, domain: Arc<BranchedGraph>, codomain: Arc<BranchedGraph>) -> Result<CellularMap> {
        let (dg, cg) = (domain.graph(), codomain.graph());
        let vertex_map = dg
            .vertices()
            .map(|v| {
                let name = dg.vertex_name(v);
                let image = self.vertex_map.get(name).ok_or_else(|| Error::Schema(format!("vertex `{name}` is not mapped")))?;
                cg.vertex_id(image)
            })
            .collect::<Result<Vec<_>>>()?;
        let edge_map = dg
            .edges()
            .map(|e| {
                let name = dg.edge_name(e);
                let image = self.edge_map.get(name).ok_or_else(|| Error::Schema(format!("edge `{name}` is not mapped")))?;
                image.iter().map(|s| cg.parse_step(s)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        CellularMap::new(domain, codomain, vertex_map, edge_map)
    }

    pub fn from_map(f: &CellularMap) -> Self {
        let (dg, cg) = (f.domain().graph(), f.codomain().graph());
        MapFile {
            vertex_map: dg
                .vertices()
                .map(|v| (dg.vertex_name(v).to_string(), cg.vertex_name(f.vertex_image(v)).to_string()))
                .collect(),
            edge_map: dg
                .edges()
                .map(|e| {
                    let path = f.edge_image(e).iter().map(|&s| cg.format_step(s)).collect();
                    (dg.edge_name(e).to_string(), path)
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationarySpec {
    pub graph: Ref<GraphFile>,
    pub map: Ref<MapFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemFile {
    Stationary { stationary: StationarySpec },
    Explicit { levels: Vec<Ref<GraphFile>>, bonds: Vec<Ref<MapFile>> },
}

impl SystemFile {
    pub fn to_system(&self, dir: &Path) -> Result<InverseSystem> {
        match self {
            SystemFile::Stationary { stationary } => {
                let g = Arc::new(stationary.graph.resolve(dir)?.to_branched()?);
                InverseSystem::stationary(stationary.map.resolve(dir)?.to_map(g.clone(), g)?)
            }
            SystemFile::Explicit { levels, bonds } => {
                let levels = levels
                    .iter()
                    .map(|l| Ok(Arc::new(l.resolve(dir)?.to_branched()?)))
                    .collect::<Result<Vec<_>>>()?;
                if bonds.len() + 1 != levels.len() {
                    return Err(Error::Schema(format!("{} levels need {} bonds", levels.len(), levels.len().saturating_sub(1))));
                }
                let bonds = bonds
                    .iter()
                    .enumerate()
                    .map(|(k, b)| b.resolve(dir)?.to_map(levels[k + 1].clone(), levels[k].clone()))
                    .collect::<Result<Vec<_>>>()?;
                InverseSystem::explicit(levels, bonds)
            }
        }
    }

    /// Inline description of a stationary system or of the materialized
    /// levels `0..=depth`.
    pub fn from_system(sys: &InverseSystem, depth: usize) -> Result<Self> {
        if let Some(m) = sys.stationary_map() {
            return Ok(SystemFile::Stationary {
                stationary: StationarySpec {
                    graph: Ref::Inline(GraphFile::from_branched(m.domain())),
                    map: Ref::Inline(MapFile::from_map(m)),
                },
            });
        }
        let levels = (0..=depth).map(|k| Ok(Ref::Inline(GraphFile::from_branched(&*sys.level(k)?)))).collect::<Result<_>>()?;
        let bonds = (0..depth).map(|k| Ok(Ref::Inline(MapFile::from_map(&*sys.bond(k)?)))).collect::<Result<_>>()?;
        Ok(SystemFile::Explicit { levels, bonds })
    }
}

pub fn load_system(path: &Path) -> Result<InverseSystem> {
    read_json::<SystemFile>(path)?.to_system(&dir_of(path))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeFile {
    pub dimension: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
    /// Vertex to half-space normals; missing vertices get the whole space.
    #[serde(default)]
    pub sectors: BTreeMap<String, Vec<Vec<String>>>,
}

impl TreeFile {
    pub fn to_tree(&self) -> Result<BranchTree> {
        let index = |name: &str| {
            self.vertices.iter().position(|v| v == name).ok_or_else(|| Error::UnknownVertex(name.to_string()))
        };
        for name in self.sectors.keys() {
            index(name)?;
        }
        let edges = self.edges.iter().map(|[a, b]| Ok((index(a)?, index(b)?))).collect::<Result<Vec<_>>>()?;
        let sectors = self
            .vertices
            .iter()
            .map(|v| {
                let normals = self.sectors.get(v).cloned().unwrap_or_default();
                let halfspaces = normals
                    .iter()
                    .map(|n| HalfSpace::new(n.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>>>()?))
                    .collect::<Result<Vec<_>>>()?;
                Sector::new(self.dimension, halfspaces)
            })
            .collect::<Result<Vec<_>>>()?;
        BranchTree::new(self.dimension, self.vertices.clone(), edges, sectors)
    }

    pub fn from_tree(t: &BranchTree) -> Self {
        let names = t.names();
        TreeFile {
            dimension: t.dimension(),
            vertices: names.to_vec(),
            edges: t.edges().iter().map(|&(a, b)| [names[a].clone(), names[b].clone()]).collect(),
            sectors: t
                .sectors()
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let normals =
                        s.halfspaces().iter().map(|h| h.normal().iter().map(format_rational).collect()).collect();
                    (names[i].clone(), normals)
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageFile {
    pub alphabet: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rules: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forbidden: Option<Vec<String>>,
}

impl LanguageFile {
    pub fn to_oracle(&self) -> Result<LanguageOracle> {
        let alphabet = Alphabet::new(&self.alphabet)?;
        match (&self.rules, &self.forbidden) {
            (Some(_), Some(_)) => Err(Error::Schema("give either rules or forbidden words, not both".into())),
            (Some(rules), None) => {
                for key in rules.keys() {
                    if !self.alphabet.contains(key) {
                        return Err(Error::Schema(format!("rule for unknown symbol `{key}`")));
                    }
                }
                let images = self
                    .alphabet
                    .iter()
                    .map(|s| {
                        let image = rules.get(s).ok_or_else(|| Error::Schema(format!("no rule for `{s}`")))?;
                        alphabet.parse_word(image)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(LanguageOracle::substitution(Substitution::new(alphabet, images)?))
            }
            (None, Some(words)) => {
                let words = words.iter().map(|w| alphabet.parse_word(w)).collect::<Result<Vec<_>>>()?;
                LanguageOracle::sft(alphabet, words)
            }
            (None, None) => Ok(LanguageOracle::full_shift(alphabet)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoveringSpec {
    pub total: Ref<GraphFile>,
    pub vertex_map: BTreeMap<String, String>,
    /// Edge to the single base edge it covers.
    pub edge_map: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TowerFile {
    Circle {
        circle_degrees: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        depth: Option<usize>,
    },
    Explicit {
        base: Ref<GraphFile>,
        levels: Vec<CoveringSpec>,
    },
}

impl TowerFile {
    /// Builds the tower; circle shorthands get `depth` levels unless the
    /// file fixes a depth of its own.
    pub fn to_tower(&self, dir: &Path, depth: usize) -> Result<CoveringTower> {
        match self {
            TowerFile::Circle { circle_degrees, depth: fixed } => CoveringTower::circle(circle_degrees, fixed.unwrap_or(depth)),
            TowerFile::Explicit { base, levels } => {
                let mut below = Arc::new(base.resolve(dir)?.plain_graph()?);
                if levels.is_empty() {
                    return CoveringTower::trivial(below);
                }
                let mut bonds = Vec::new();
                for (j, spec) in levels.iter().enumerate() {
                    let total = Arc::new(spec.total.resolve(dir)?.plain_graph()?);
                    let lookup = |map: &BTreeMap<String, String>, name: &str| {
                        map.get(name).cloned().ok_or_else(|| Error::Schema(format!("level {}: `{name}` is not mapped", j + 1)))
                    };
                    let vertex_map = total
                        .vertices()
                        .map(|v| below.vertex_id(&lookup(&spec.vertex_map, total.vertex_name(v))?))
                        .collect::<Result<Vec<VertexId>>>()?;
                    let edge_map = total
                        .edges()
                        .map(|e| below.edge_id(&lookup(&spec.edge_map, total.edge_name(e))?))
                        .collect::<Result<Vec<EdgeId>>>()?;
                    bonds.push(GraphCovering::new(total.clone(), below, vertex_map, edge_map, false)?);
                    below = total;
                }
                CoveringTower::from_coverings(bonds)
            }
        }
    }

    pub fn from_tower(t: &CoveringTower) -> Self {
        let levels = (0..t.depth() - 1)
            .map(|j| {
                let c = t.bond(j);
                let (total, base) = (c.total(), c.base());
                CoveringSpec {
                    total: Ref::Inline(GraphFile::from_plain(total)),
                    vertex_map: total
                        .vertices()
                        .map(|v| (total.vertex_name(v).to_string(), base.vertex_name(c.vertex_image(v)).to_string()))
                        .collect(),
                    edge_map: total
                        .edges()
                        .map(|e| (total.edge_name(e).to_string(), base.edge_name(c.edge_image(e)).to_string()))
                        .collect(),
                }
            })
            .collect();
        TowerFile::Explicit { base: Ref::Inline(GraphFile::from_plain(t.base())), levels }
    }
}

pub fn load_tower(path: &Path, depth: usize) -> Result<CoveringTower> {
    read_json::<TowerFile>(path)?.to_tower(&dir_of(path), depth)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClopenFile {
    pub radius: usize,
    /// Cylinder literals `word@index`.
    pub cylinders: Vec<String>,
}

impl ClopenFile {
    pub fn to_set(&self, oracle: Arc<LanguageOracle>) -> Result<ClopenSet> {
        let cylinders = self
            .cylinders
            .iter()
            .map(|c| Cylinder::parse(oracle.alphabet(), c))
            .collect::<Result<Vec<_>>>()?;
        ClopenSet::from_cylinders(oracle, &cylinders)?.canonicalize(self.radius)
    }

    pub fn from_set(s: &ClopenSet) -> Self {
        let a = s.oracle().alphabet();
        ClopenFile { radius: s.radius(), cylinders: s.cylinders().iter().map(|c| c.format(a)).collect() }
    }
}
