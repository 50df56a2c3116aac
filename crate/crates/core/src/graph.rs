//! Finite directed multigraphs with named cells, oriented steps and half-edges.
//!
//! Loops and parallel edges are allowed. Every edge has two ends: the
//! source end (written `e+`) where it departs and the target end (`e-`)
//! where it arrives. A loop therefore contributes two distinct half-edges
//! at its vertex.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

/// Which end of an edge a half-edge sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    /// The end the edge departs from (`e+`).
    Source,
    /// The end the edge arrives at (`e-`).
    Target,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfEdge {
    pub edge: EdgeId,
    pub end: End,
}

impl HalfEdge {
    pub fn source(edge: EdgeId) -> Self {
        HalfEdge { edge, end: End::Source }
    }

    pub fn target(edge: EdgeId) -> Self {
        HalfEdge { edge, end: End::Target }
    }

    /// Dense index `2 * edge + end`.
    pub fn index(self) -> usize {
        2 * self.edge.0 + usize::from(self.end == End::Target)
    }

    /// The step leaving the vertex along this half-edge.
    pub fn outward(self) -> Step {
        Step { edge: self.edge, forward: self.end == End::Source }
    }
}

/// An edge traversed forwards or backwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub edge: EdgeId,
    pub forward: bool,
}

impl Step {
    pub fn forward(edge: EdgeId) -> Self {
        Step { edge, forward: true }
    }

    pub fn backward(edge: EdgeId) -> Self {
        Step { edge, forward: false }
    }

    pub fn reversed(self) -> Self {
        Step { edge: self.edge, forward: !self.forward }
    }

    /// Half-edge through which the step leaves its start vertex.
    pub fn initial_half_edge(self) -> HalfEdge {
        if self.forward {
            HalfEdge::source(self.edge)
        } else {
            HalfEdge::target(self.edge)
        }
    }

    /// Half-edge through which the step enters its end vertex.
    pub fn terminal_half_edge(self) -> HalfEdge {
        self.reversed().initial_half_edge()
    }
}

/// Reverses a path and each of its steps.
pub fn reverse_path(path: &[Step]) -> Vec<Step> {
    path.iter().rev().map(|s| s.reversed()).collect()
}

/// Cancels adjacent `s s⁻¹` pairs.
pub fn free_reduce(path: &[Step]) -> Vec<Step> {
    let mut out: Vec<Step> = Vec::with_capacity(path.len());
    for &step in path {
        if out.last() == Some(&step.reversed()) {
            out.pop();
        } else {
            out.push(step);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertex_names: Vec<String>,
    edge_names: Vec<String>,
    ends: Vec<(VertexId, VertexId)>,
    vertex_index: HashMap<String, VertexId>,
    edge_index: HashMap<String, EdgeId>,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
}

fn check_name(kind: &str, name: &str) -> Result<()> {
    if name.is_empty() {
        return Err(Error::InvalidGraph(format!("empty {kind} name")));
    }
    if kind == "edge" && (name.ends_with('+') || name.ends_with('-') || name.starts_with('-')) {
        return Err(Error::InvalidGraph(format!(
            "edge name `{name}` clashes with the half-edge/step sign notation"
        )));
    }
    if name.chars().any(char::is_whitespace) {
        return Err(Error::InvalidGraph(format!("{kind} name `{name}` contains whitespace")));
    }
    Ok(())
}

impl Graph {
    /// Builds a graph from vertex names and `(edge, source, target)` triples.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator<Item = (String, String, String)>,
    {
        let vertex_names: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let mut vertex_index = HashMap::new();
        for (i, name) in vertex_names.iter().enumerate() {
            check_name("vertex", name)?;
            if vertex_index.insert(name.clone(), VertexId(i)).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate vertex `{name}`")));
            }
        }
        let mut edge_names = Vec::new();
        let mut ends = Vec::new();
        let mut edge_index = HashMap::new();
        for (name, src, dst) in edges {
            check_name("edge", &name)?;
            let s = *vertex_index.get(&src).ok_or_else(|| Error::UnknownVertex(src.clone()))?;
            let t = *vertex_index.get(&dst).ok_or_else(|| Error::UnknownVertex(dst.clone()))?;
            if edge_index.insert(name.clone(), EdgeId(edge_names.len())).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate edge `{name}`")));
            }
            edge_names.push(name);
            ends.push((s, t));
        }
        Ok(Self::assemble(vertex_names, edge_names, ends, vertex_index, edge_index))
    }

    /// Builds a graph on `vertex_count` vertices named `v0, v1, ...` with
    /// edges `e0, e1, ...`.
    pub fn from_ends(vertex_count: usize, ends: Vec<(VertexId, VertexId)>) -> Self {
        let vertex_names: Vec<String> = (0..vertex_count).map(|i| format!("v{i}")).collect();
        let edge_names: Vec<String> = (0..ends.len()).map(|i| format!("e{i}")).collect();
        Self::from_named_ends(vertex_names, edge_names, ends).expect("generated names are unique")
    }

    /// Builds a graph from explicit names and index-based incidences.
    pub fn from_named_ends(
        vertex_names: Vec<String>,
        edge_names: Vec<String>,
        ends: Vec<(VertexId, VertexId)>,
    ) -> Result<Self> {
        if edge_names.len() != ends.len() {
            return Err(Error::InvalidGraph("edge names and incidences differ in length".into()));
        }
        let mut vertex_index = HashMap::with_capacity(vertex_names.len());
        for (i, name) in vertex_names.iter().enumerate() {
            if vertex_index.insert(name.clone(), VertexId(i)).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate vertex `{name}`")));
            }
        }
        let mut edge_index = HashMap::with_capacity(edge_names.len());
        for (i, name) in edge_names.iter().enumerate() {
            if edge_index.insert(name.clone(), EdgeId(i)).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate edge `{name}`")));
            }
        }
        for &(s, t) in &ends {
            if s.0 >= vertex_names.len() || t.0 >= vertex_names.len() {
                return Err(Error::InvalidGraph("edge endpoint out of range".into()));
            }
        }
        Ok(Self::assemble(vertex_names, edge_names, ends, vertex_index, edge_index))
    }

    fn assemble(
        vertex_names: Vec<String>,
        edge_names: Vec<String>,
        ends: Vec<(VertexId, VertexId)>,
        vertex_index: HashMap<String, VertexId>,
        edge_index: HashMap<String, EdgeId>,
    ) -> Self {
        let mut out_edges = vec![Vec::new(); vertex_names.len()];
        let mut in_edges = vec![Vec::new(); vertex_names.len()];
        for (i, &(s, t)) in ends.iter().enumerate() {
            out_edges[s.0].push(EdgeId(i));
            in_edges[t.0].push(EdgeId(i));
        }
        Graph { vertex_names, edge_names, ends, vertex_index, edge_index, out_edges, in_edges }
    }

    /// The cycle graph with `n` vertices `v0..` and edges `ei: vi -> v(i+1 mod n)`.
    pub fn cycle(n: usize) -> Self {
        assert!(n > 0, "cycle graphs need at least one vertex");
        Self::from_ends(n, (0..n).map(|i| (VertexId(i), VertexId((i + 1) % n))).collect())
    }

    /// One vertex `o` with a loop per given name.
    pub fn rose(petals: &[&str]) -> Self {
        Self::from_named_ends(
            vec!["o".to_string()],
            petals.iter().map(|s| s.to_string()).collect(),
            vec![(VertexId(0), VertexId(0)); petals.len()],
        )
        .expect("petal names must be distinct")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_names.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_count()).map(VertexId)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edge_count()).map(EdgeId)
    }

    pub fn src(&self, e: EdgeId) -> VertexId {
        self.ends[e.0].0
    }

    pub fn dst(&self, e: EdgeId) -> VertexId {
        self.ends[e.0].1
    }

    pub fn ends(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.ends[e.0]
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.0]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edge_names[e.0]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn edge_names(&self) -> &[String] {
        &self.edge_names
    }

    pub fn vertex_id(&self, name: &str) -> Result<VertexId> {
        self.vertex_index.get(name).copied().ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn edge_id(&self, name: &str) -> Result<EdgeId> {
        self.edge_index.get(name).copied().ok_or_else(|| Error::UnknownEdge(name.to_string()))
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_edges[v.0]
    }

    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_edges[v.0]
    }

    /// Vertex a half-edge is attached to.
    pub fn half_edge_vertex(&self, h: HalfEdge) -> VertexId {
        match h.end {
            End::Source => self.src(h.edge),
            End::Target => self.dst(h.edge),
        }
    }

    /// All half-edges attached to `v`: outgoing ends first, then incoming.
    pub fn half_edges_at(&self, v: VertexId) -> Vec<HalfEdge> {
        let mut out: Vec<HalfEdge> = self.out_edges(v).iter().map(|&e| HalfEdge::source(e)).collect();
        out.extend(self.in_edges(v).iter().map(|&e| HalfEdge::target(e)));
        out
    }

    pub fn step_start(&self, s: Step) -> VertexId {
        if s.forward {
            self.src(s.edge)
        } else {
            self.dst(s.edge)
        }
    }

    pub fn step_end(&self, s: Step) -> VertexId {
        if s.forward {
            self.dst(s.edge)
        } else {
            self.src(s.edge)
        }
    }

    /// Checks that consecutive steps meet and returns `(start, end)`.
    pub fn path_endpoints(&self, path: &[Step]) -> Result<(VertexId, VertexId)> {
        let first = path.first().ok_or_else(|| Error::NotAPath("empty path".into()))?;
        let mut at = self.step_start(*first);
        let start = at;
        for (i, &s) in path.iter().enumerate() {
            if s.edge.0 >= self.edge_count() {
                return Err(Error::NotAPath(format!("step {i} uses an unknown edge")));
            }
            if self.step_start(s) != at {
                return Err(Error::NotAPath(format!(
                    "step {i} ({}) does not start at `{}`",
                    self.format_step(s),
                    self.vertex_name(at)
                )));
            }
            at = self.step_end(s);
        }
        Ok((start, at))
    }

    pub fn format_half_edge(&self, h: HalfEdge) -> String {
        let sign = if h.end == End::Source { '+' } else { '-' };
        format!("{}{}", self.edge_name(h.edge), sign)
    }

    pub fn parse_half_edge(&self, text: &str) -> Result<HalfEdge> {
        let text = text.trim();
        if let Some(name) = text.strip_suffix('+') {
            Ok(HalfEdge::source(self.edge_id(name)?))
        } else if let Some(name) = text.strip_suffix('-') {
            Ok(HalfEdge::target(self.edge_id(name)?))
        } else {
            Err(Error::Input(format!("half-edge `{text}` must end in `+` or `-`")))
        }
    }

    pub fn format_step(&self, s: Step) -> String {
        let sign = if s.forward { '+' } else { '-' };
        format!("{}{}", self.edge_name(s.edge), sign)
    }

    /// Parses a signed edge: `a`, `a+` or `+a` forwards, `a-` or `-a` backwards.
    pub fn parse_step(&self, text: &str) -> Result<Step> {
        let text = text.trim();
        if let Ok(e) = self.edge_id(text) {
            return Ok(Step::forward(e));
        }
        let (name, forward) = if let Some(n) = text.strip_suffix('+') {
            (n, true)
        } else if let Some(n) = text.strip_suffix('-') {
            (n, false)
        } else if let Some(n) = text.strip_prefix('+') {
            (n, true)
        } else if let Some(n) = text.strip_prefix('-') {
            (n, false)
        } else {
            return Err(Error::UnknownEdge(text.to_string()));
        };
        Ok(Step { edge: self.edge_id(name)?, forward })
    }

    /// Parses a whitespace separated edge word such as `"a a b-"`.
    pub fn parse_path(&self, text: &str) -> Result<Vec<Step>> {
        text.split_whitespace().map(|t| self.parse_step(t)).collect()
    }

    pub fn format_path(&self, path: &[Step]) -> String {
        path.iter().map(|&s| self.format_step(s)).collect::<Vec<_>>().join(" ")
    }

    /// Breadth-first spanning tree from `root`: for every reached vertex the
    /// step used to enter it (none for the root).
    pub fn spanning_tree(&self, root: VertexId) -> Vec<Option<Option<Step>>> {
        let mut parent: Vec<Option<Option<Step>>> = vec![None; self.vertex_count()];
        parent[root.0] = Some(None);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let steps = self
                .out_edges(v)
                .iter()
                .map(|&e| Step::forward(e))
                .chain(self.in_edges(v).iter().map(|&e| Step::backward(e)));
            for s in steps {
                let w = self.step_end(s);
                if parent[w.0].is_none() {
                    parent[w.0] = Some(Some(s));
                    queue.push_back(w);
                }
            }
        }
        parent
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() == 0 || self.spanning_tree(VertexId(0)).iter().all(Option::is_some)
    }

    /// First Betti number `|E| - |V| + components`.
    pub fn cycle_rank(&self) -> usize {
        let mut seen = vec![false; self.vertex_count()];
        let mut components = 0;
        for v in self.vertices() {
            if !seen[v.0] {
                components += 1;
                for (i, p) in self.spanning_tree(v).iter().enumerate() {
                    if p.is_some() {
                        seen[i] = true;
                    }
                }
            }
        }
        self.edge_count() + components - self.vertex_count()
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "graph with {} vertices and {} edges", self.vertex_count(), self.edge_count())
    }
}
