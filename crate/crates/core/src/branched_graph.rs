//! Branched 1-manifolds (train tracks) and cellular maps between them.
//!
//! The smooth structure at a vertex is a split of its half-edges into two
//! sides, `A` and `B`. A smooth germ through the vertex pairs one half-edge
//! from each side; a vertex is a branch point when some side holds more
//! than one half-edge. A cellular map sends vertices to vertices and edges
//! to nonempty edge paths, and must send each side of a vertex into a
//! single side of the image vertex, the two sides to opposite sides.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{reverse_path, EdgeId, End, Graph, HalfEdge, Step, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }

    fn index(self) -> usize {
        match self {
            Side::A => 0,
            Side::B => 1,
        }
    }
}

/// A structural problem found by validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Offending vertex, edge or half-edge.
    pub subject: String,
    pub message: String,
}

impl Violation {
    pub fn new(subject: impl Into<String>, message: impl Into<String>) -> Self {
        Violation { subject: subject.into(), message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchedGraph {
    graph: Graph,
    sides: Vec<[Vec<HalfEdge>; 2]>,
}

impl BranchedGraph {
    /// Builds and validates a branched graph.
    pub fn new(graph: Graph, sides: Vec<[Vec<HalfEdge>; 2]>) -> Result<Self> {
        let g = Self::from_parts_unchecked(graph, sides);
        match validate_graph(&g) {
            Ok(()) => Ok(g),
            Err(v) => Err(Error::InvalidGraph(join_violations(&v))),
        }
    }

    /// Builds without validation; pair with [`validate_graph`].
    pub fn from_parts_unchecked(graph: Graph, sides: Vec<[Vec<HalfEdge>; 2]>) -> Self {
        BranchedGraph { graph, sides }
    }

    /// Side `A` collects the incoming half-edges, side `B` the outgoing
    /// ones, so every oriented edge path is smooth.
    pub fn directed(graph: Graph) -> Self {
        let sides = graph
            .vertices()
            .map(|v| {
                let incoming = graph.in_edges(v).iter().map(|&e| HalfEdge::target(e)).collect();
                let outgoing = graph.out_edges(v).iter().map(|&e| HalfEdge::source(e)).collect();
                [incoming, outgoing]
            })
            .collect();
        BranchedGraph { graph, sides }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn side(&self, v: VertexId, side: Side) -> &[HalfEdge] {
        &self.sides[v.0][side.index()]
    }

    /// Side of `v` holding `h`, if any.
    pub fn side_of(&self, v: VertexId, h: HalfEdge) -> Option<Side> {
        [Side::A, Side::B].into_iter().find(|&s| self.side(v, s).contains(&h))
    }

    pub fn is_branch_point(&self, v: VertexId) -> bool {
        self.side(v, Side::A).len() > 1 || self.side(v, Side::B).len() > 1
    }

    pub fn branch_points(&self) -> Vec<VertexId> {
        self.graph.vertices().filter(|&v| self.is_branch_point(v)).collect()
    }

    /// All maximal smooth germs through `v`: one half-edge per nonempty side.
    pub fn germs_at(&self, v: VertexId) -> Vec<SmoothGerm> {
        let pick = |s: Side| -> Vec<Option<HalfEdge>> {
            let hs = self.side(v, s);
            if hs.is_empty() {
                vec![None]
            } else {
                hs.iter().copied().map(Some).collect()
            }
        };
        let mut out = Vec::new();
        for a in pick(Side::A) {
            for b in pick(Side::B) {
                if a.is_some() || b.is_some() {
                    out.push(SmoothGerm { vertex: v, a, b });
                }
            }
        }
        out
    }

    pub fn format_germ(&self, germ: &SmoothGerm) -> String {
        let show = |h: Option<HalfEdge>| h.map_or("∂".to_string(), |h| self.graph.format_half_edge(h));
        format!("{}:({}, {})", self.graph.vertex_name(germ.vertex), show(germ.a), show(germ.b))
    }
}

/// Checks the branched-graph invariants: every half-edge sits on exactly one
/// side of the vertex it is attached to.
pub fn validate_graph(g: &BranchedGraph) -> std::result::Result<(), Vec<Violation>> {
    let graph = &g.graph;
    let mut violations = Vec::new();
    if g.sides.len() != graph.vertex_count() {
        violations.push(Violation::new(
            "graph",
            format!("side data for {} vertices, graph has {}", g.sides.len(), graph.vertex_count()),
        ));
        return Err(violations);
    }
    let mut placed: Vec<Option<VertexId>> = vec![None; 2 * graph.edge_count()];
    for v in graph.vertices() {
        for side in [Side::A, Side::B] {
            for &h in g.side(v, side) {
                if h.edge.0 >= graph.edge_count() {
                    violations.push(Violation::new(graph.vertex_name(v), "side lists an unknown edge"));
                    continue;
                }
                let label = graph.format_half_edge(h);
                if placed[h.index()].is_some() {
                    violations.push(Violation::new(label, "duplicated half-edge"));
                    continue;
                }
                placed[h.index()] = Some(v);
                if graph.half_edge_vertex(h) != v {
                    violations.push(Violation::new(
                        label,
                        format!("half-edge is not incident to vertex `{}`", graph.vertex_name(v)),
                    ));
                }
            }
        }
    }
    for e in graph.edges() {
        for h in [HalfEdge::source(e), HalfEdge::target(e)] {
            if placed[h.index()].is_none() {
                violations.push(Violation::new(graph.format_half_edge(h), "half-edge missing from every side"));
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// A 1-dimensional smooth germ through a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SmoothGerm {
    pub vertex: VertexId,
    pub a: Option<HalfEdge>,
    pub b: Option<HalfEdge>,
}

impl SmoothGerm {
    pub fn validate(&self, g: &BranchedGraph) -> Result<()> {
        if self.vertex.0 >= g.graph.vertex_count() {
            return Err(Error::MalformedGerm(format!("unknown vertex index {}", self.vertex.0)));
        }
        if self.a.is_none() && self.b.is_none() {
            return Err(Error::MalformedGerm("germ has no half-edges".into()));
        }
        for (h, side) in [(self.a, Side::A), (self.b, Side::B)] {
            if let Some(h) = h {
                if !g.side(self.vertex, side).contains(&h) {
                    return Err(Error::MalformedGerm(format!(
                        "{} is not on side {side:?} of `{}`",
                        g.graph.format_half_edge(h),
                        g.graph.vertex_name(self.vertex)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Closed star of a vertex: the vertex with its half-edges and edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Star {
    pub vertex: VertexId,
    pub half_edges: Vec<HalfEdge>,
    pub edges: Vec<EdgeId>,
}

pub fn star(g: &BranchedGraph, v: VertexId) -> Result<Star> {
    if v.0 >= g.graph.vertex_count() {
        return Err(Error::UnknownVertex(format!("#{}", v.0)));
    }
    let mut half_edges = g.graph.half_edges_at(v);
    half_edges.sort();
    let edges: BTreeSet<EdgeId> = half_edges.iter().map(|h| h.edge).collect();
    Ok(Star { vertex: v, half_edges, edges: edges.into_iter().collect() })
}

/// Vertex→vertex, edge→edge-path map respecting the two-sided structure.
#[derive(Clone, Debug)]
pub struct CellularMap {
    domain: Arc<BranchedGraph>,
    codomain: Arc<BranchedGraph>,
    vertex_map: Vec<VertexId>,
    edge_map: Vec<Vec<Step>>,
    /// Per domain vertex: true when side `A` lands on side `B` of the image.
    swaps_sides: Vec<bool>,
}

impl PartialEq for CellularMap {
    fn eq(&self, other: &Self) -> bool {
        same_graph(&self.domain, &other.domain)
            && same_graph(&self.codomain, &other.codomain)
            && self.vertex_map == other.vertex_map
            && self.edge_map == other.edge_map
    }
}

/// Graphs are identified by pointer first, structure second.
pub fn same_graph(a: &Arc<BranchedGraph>, b: &Arc<BranchedGraph>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl CellularMap {
    pub fn new(
        domain: Arc<BranchedGraph>,
        codomain: Arc<BranchedGraph>,
        vertex_map: Vec<VertexId>,
        edge_map: Vec<Vec<Step>>,
    ) -> Result<Self> {
        let (swaps_sides, violations) = check_map(&domain, &codomain, &vertex_map, &edge_map);
        if !violations.is_empty() {
            return Err(Error::InvalidMap(join_violations(&violations)));
        }
        Ok(CellularMap { domain, codomain, vertex_map, edge_map, swaps_sides })
    }

    pub fn identity(g: Arc<BranchedGraph>) -> Self {
        let vertex_map = g.graph.vertices().collect();
        let edge_map = g.graph.edges().map(|e| vec![Step::forward(e)]).collect();
        Self::new(g.clone(), g, vertex_map, edge_map).expect("identity maps are cellular")
    }

    pub fn domain(&self) -> &Arc<BranchedGraph> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<BranchedGraph> {
        &self.codomain
    }

    pub fn vertex_image(&self, v: VertexId) -> VertexId {
        self.vertex_map[v.0]
    }

    pub fn edge_image(&self, e: EdgeId) -> &[Step] {
        &self.edge_map[e.0]
    }

    pub fn vertex_map(&self) -> &[VertexId] {
        &self.vertex_map
    }

    pub fn edge_map(&self) -> &[Vec<Step>] {
        &self.edge_map
    }

    /// Image of an oriented step as a codomain path.
    pub fn step_image(&self, s: Step) -> Vec<Step> {
        if s.forward {
            self.edge_map[s.edge.0].clone()
        } else {
            reverse_path(&self.edge_map[s.edge.0])
        }
    }

    /// First half-edge of the image path of `h`, read outward from the
    /// image vertex.
    pub fn image_half_edge(&self, h: HalfEdge) -> HalfEdge {
        let path = &self.edge_map[h.edge.0];
        match h.end {
            End::Source => path[0].initial_half_edge(),
            End::Target => path[path.len() - 1].terminal_half_edge(),
        }
    }

    /// Side of the image vertex receiving side `side` of `v`.
    pub fn image_side(&self, v: VertexId, side: Side) -> Side {
        if self.swaps_sides[v.0] {
            side.other()
        } else {
            side
        }
    }

    pub fn germ_image(&self, germ: &SmoothGerm) -> Result<SmoothGerm> {
        germ.validate(&self.domain)?;
        let a = germ.a.map(|h| self.image_half_edge(h));
        let b = germ.b.map(|h| self.image_half_edge(h));
        let vertex = self.vertex_map[germ.vertex.0];
        Ok(if self.swaps_sides[germ.vertex.0] {
            SmoothGerm { vertex, a: b, b: a }
        } else {
            SmoothGerm { vertex, a, b }
        })
    }

    /// Flattening test: at every domain vertex each side's half-edges share
    /// one image half-edge, so the image of the star is one smooth germ.
    pub fn is_flattening(&self) -> FlatteningCheck {
        for v in self.domain.graph.vertices() {
            for side in [Side::A, Side::B] {
                let hs = self.domain.side(v, side);
                let Some(&first) = hs.first() else { continue };
                let first_image = self.image_half_edge(first);
                for &h in &hs[1..] {
                    let image = self.image_half_edge(h);
                    if image != first_image {
                        return FlatteningCheck::Witness(FlatteningWitness {
                            vertex: v,
                            side,
                            half_edges: [first, h],
                            images: [first_image, image],
                        });
                    }
                }
            }
        }
        FlatteningCheck::Flattening
    }

    /// Ok when every codomain vertex and edge is hit.
    pub fn check_surjective(&self) -> std::result::Result<(), String> {
        let cg = &self.codomain.graph;
        let mut hit_v = vec![false; cg.vertex_count()];
        let mut hit_e = vec![false; cg.edge_count()];
        for v in &self.vertex_map {
            hit_v[v.0] = true;
        }
        for path in &self.edge_map {
            for s in path {
                hit_e[s.edge.0] = true;
                hit_v[cg.src(s.edge).0] = true;
                hit_v[cg.dst(s.edge).0] = true;
            }
        }
        if let Some(v) = hit_v.iter().position(|h| !h) {
            return Err(format!("vertex `{}` has no preimage", cg.vertex_name(VertexId(v))));
        }
        if let Some(e) = hit_e.iter().position(|h| !h) {
            return Err(format!("edge `{}` has no preimage", cg.edge_name(EdgeId(e))));
        }
        Ok(())
    }

    /// Germ-level action on `star(v)`: image half-edge of every half-edge.
    pub fn star_image(&self, v: VertexId) -> Vec<(HalfEdge, HalfEdge)> {
        self.domain.graph.half_edges_at(v).into_iter().map(|h| (h, self.image_half_edge(h))).collect()
    }
}

fn check_map(
    domain: &BranchedGraph,
    codomain: &BranchedGraph,
    vertex_map: &[VertexId],
    edge_map: &[Vec<Step>],
) -> (Vec<bool>, Vec<Violation>) {
    let (dg, cg) = (&domain.graph, &codomain.graph);
    let mut violations = Vec::new();
    if vertex_map.len() != dg.vertex_count() || edge_map.len() != dg.edge_count() {
        violations.push(Violation::new("map", "vertex or edge map does not cover the domain"));
        return (Vec::new(), violations);
    }
    if let Some(v) = vertex_map.iter().find(|v| v.0 >= cg.vertex_count()) {
        violations.push(Violation::new("map", format!("vertex image #{} out of range", v.0)));
        return (Vec::new(), violations);
    }
    let mut paths_ok = true;
    for e in dg.edges() {
        let name = dg.edge_name(e);
        let path = &edge_map[e.0];
        if path.iter().any(|s| s.edge.0 >= cg.edge_count()) {
            violations.push(Violation::new(name, "image path uses an unknown edge"));
            paths_ok = false;
            continue;
        }
        match cg.path_endpoints(path) {
            Err(err) => {
                violations.push(Violation::new(name, err.to_string()));
                paths_ok = false;
            }
            Ok((s, t)) => {
                if s != vertex_map[dg.src(e).0] || t != vertex_map[dg.dst(e).0] {
                    violations.push(Violation::new(name, "image path endpoints disagree with the vertex map"));
                    paths_ok = false;
                }
            }
        }
    }
    if !paths_ok {
        return (Vec::new(), violations);
    }
    let image = |h: HalfEdge| -> HalfEdge {
        let path = &edge_map[h.edge.0];
        match h.end {
            End::Source => path[0].initial_half_edge(),
            End::Target => path[path.len() - 1].terminal_half_edge(),
        }
    };
    let mut swaps = vec![false; dg.vertex_count()];
    for v in dg.vertices() {
        let w = vertex_map[v.0];
        let mut landing: [Option<Side>; 2] = [None, None];
        for side in [Side::A, Side::B] {
            for &h in domain.side(v, side) {
                let Some(target_side) = codomain.side_of(w, image(h)) else {
                    violations.push(Violation::new(dg.format_half_edge(h), "image half-edge has no side"));
                    continue;
                };
                match landing[side.index()] {
                    None => landing[side.index()] = Some(target_side),
                    Some(s) if s != target_side => violations.push(Violation::new(
                        dg.vertex_name(v),
                        format!("side {side:?} is split across both sides of `{}`", cg.vertex_name(w)),
                    )),
                    Some(_) => {}
                }
            }
        }
        match landing {
            [Some(a), Some(b)] if a == b => violations.push(Violation::new(
                dg.vertex_name(v),
                format!("both sides land on side {a:?} of `{}`", cg.vertex_name(w)),
            )),
            [Some(a), _] => swaps[v.0] = a == Side::B,
            [None, Some(b)] => swaps[v.0] = b == Side::A,
            [None, None] => {}
        }
    }
    (swaps, violations)
}

/// Composite `g ∘ f`.
pub fn compose(g: &CellularMap, f: &CellularMap) -> Result<CellularMap> {
    if !same_graph(&f.codomain, &g.domain) {
        return Err(Error::NotComposable("codomain of the first map is not the domain of the second".into()));
    }
    let vertex_map = f.vertex_map.iter().map(|v| g.vertex_map[v.0]).collect();
    let edge_map = f
        .edge_map
        .iter()
        .map(|path| path.iter().flat_map(|&s| g.step_image(s)).collect())
        .collect();
    CellularMap::new(f.domain.clone(), g.codomain.clone(), vertex_map, edge_map)
}

/// Evidence that a map fails to flatten at a vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatteningWitness {
    pub vertex: VertexId,
    pub side: Side,
    pub half_edges: [HalfEdge; 2],
    pub images: [HalfEdge; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlatteningCheck {
    Flattening,
    Witness(FlatteningWitness),
}

impl FlatteningCheck {
    pub fn is_flattening(&self) -> bool {
        matches!(self, FlatteningCheck::Flattening)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{circle, circle_power_map, figure_eight, figure_eight_power_map, two_sided};

    fn path_graph() -> BranchedGraph {
        let g = Graph::new(
            ["u", "v", "w"],
            [("x".to_string(), "u".into(), "v".into()), ("y".to_string(), "v".into(), "w".into())],
        )
        .unwrap();
        BranchedGraph::directed(g)
    }

    #[test]
    fn fixtures_validate() {
        assert!(validate_graph(&circle()).is_ok());
        assert!(validate_graph(&figure_eight()).is_ok());
        assert_eq!(figure_eight().branch_points(), vec![VertexId(0)]);
        assert!(circle().branch_points().is_empty());
    }

    #[test]
    fn duplicated_half_edge_is_reported() {
        let g = Graph::rose(&["e"]);
        let e = EdgeId(0);
        let bad = BranchedGraph::from_parts_unchecked(
            g,
            vec![[vec![HalfEdge::source(e), HalfEdge::target(e)], vec![HalfEdge::source(e)]]],
        );
        let violations = validate_graph(&bad).unwrap_err();
        assert!(violations.iter().any(|v| v.message == "duplicated half-edge" && v.subject == "e+"));
    }

    #[test]
    fn missing_and_misplaced_half_edges_are_reported() {
        let g = path_graph();
        let x = g.graph().edge_id("x").unwrap();
        let missing = BranchedGraph::from_parts_unchecked(
            g.graph().clone(),
            vec![[vec![], vec![]], [vec![HalfEdge::target(x)], vec![]], [vec![], vec![]]],
        );
        let v = validate_graph(&missing).unwrap_err();
        assert!(v.iter().any(|v| v.subject == "x+" && v.message.contains("missing")));
        assert!(v.iter().any(|v| v.subject == "y+"));
        let misplaced = BranchedGraph::from_parts_unchecked(
            g.graph().clone(),
            vec![[vec![HalfEdge::target(x)], vec![]], [vec![], vec![]], [vec![], vec![]]],
        );
        let v = validate_graph(&misplaced).unwrap_err();
        assert!(v.iter().any(|v| v.subject == "x-" && v.message.contains("not incident")));
    }

    #[test]
    fn stars() {
        let c = circle();
        let s = star(&c, VertexId(0)).unwrap();
        assert_eq!(s.edges, vec![EdgeId(0)]);
        assert_eq!(s.half_edges.len(), 2);
        let k = figure_eight();
        let s = star(&k, VertexId(0)).unwrap();
        assert_eq!(s.half_edges.len(), 4);
        assert_eq!(s.edges.len(), 2);
        let p = path_graph();
        let v = p.graph().vertex_id("v").unwrap();
        let s = star(&p, v).unwrap();
        assert_eq!(s.edges, vec![EdgeId(0), EdgeId(1)]);
        assert_eq!(s.half_edges, vec![HalfEdge::target(EdgeId(0)), HalfEdge::source(EdgeId(1))]);
        assert!(star(&p, VertexId(7)).is_err());
    }

    #[test]
    fn compose_with_identity() {
        let f = circle_power_map(2);
        let id = CellularMap::identity(f.codomain().clone());
        assert_eq!(compose(&id, &f).unwrap(), f);
        let id = CellularMap::identity(f.domain().clone());
        assert_eq!(compose(&f, &id).unwrap(), f);
    }

    #[test]
    fn doubling_composes_to_degree_four() {
        let f = circle_power_map(2);
        let ff = compose(&f, &f).unwrap();
        assert_eq!(ff.edge_image(EdgeId(0)), &[Step::forward(EdgeId(0)); 4]);
    }

    #[test]
    fn figure_eight_powers() {
        let p = figure_eight_power_map(2);
        let mut composite = p.clone();
        for m in 2..=5 {
            composite = compose(&p, &composite).unwrap();
            for e in [EdgeId(0), EdgeId(1)] {
                assert_eq!(composite.edge_image(e), vec![Step::forward(e); 1 << m].as_slice());
            }
        }
    }

    #[test]
    fn germ_images() {
        let k = figure_eight();
        let g = k.graph();
        let (a, b) = (g.edge_id("a").unwrap(), g.edge_id("b").unwrap());
        let p = figure_eight_power_map(2);
        let germ = SmoothGerm { vertex: VertexId(0), a: Some(HalfEdge::source(a)), b: Some(HalfEdge::target(b)) };
        assert_eq!(p.germ_image(&germ).unwrap(), germ);
        let id = CellularMap::identity(p.domain().clone());
        assert_eq!(id.germ_image(&germ).unwrap(), germ);
        let c = circle_power_map(2);
        let e = EdgeId(0);
        let cg = c.domain().clone();
        let circle_germ = SmoothGerm {
            vertex: VertexId(0),
            a: cg.side(VertexId(0), Side::A).first().copied(),
            b: cg.side(VertexId(0), Side::B).first().copied(),
        };
        assert_eq!(c.germ_image(&circle_germ).unwrap(), circle_germ);
        assert!(circle_germ.a == Some(HalfEdge::source(e)) || circle_germ.a == Some(HalfEdge::target(e)));
        let malformed = SmoothGerm { vertex: VertexId(0), a: Some(HalfEdge::target(a)), b: None };
        assert!(matches!(p.germ_image(&malformed), Err(Error::MalformedGerm(_))));
    }

    #[test]
    fn flattening_examples() {
        assert!(circle_power_map(2).is_flattening().is_flattening());
        match figure_eight_power_map(2).is_flattening() {
            FlatteningCheck::Witness(w) => {
                assert_eq!(w.vertex, VertexId(0));
                assert_ne!(w.images[0], w.images[1]);
                assert_eq!(w.images, w.half_edges);
            }
            FlatteningCheck::Flattening => panic!("figure-eight doubling must not flatten"),
        }
    }

    #[test]
    fn collapse_to_one_loop_flattens() {
        let k = Arc::new(figure_eight());
        let c = Arc::new(circle());
        let e = Step::forward(EdgeId(0));
        let collapse = CellularMap::new(k, c, vec![VertexId(0)], vec![vec![e], vec![e]]).unwrap();
        assert!(collapse.is_flattening().is_flattening());
        let after_branch = compose(&collapse, &figure_eight_power_map(2)).unwrap();
        assert!(after_branch.is_flattening().is_flattening());
    }

    #[test]
    fn side_coherence_is_enforced() {
        // a ↦ a, b ↦ b⁻¹ sends b+ to side B while a+ stays on side A.
        let k = Arc::new(figure_eight());
        let bad = CellularMap::new(
            k.clone(),
            k,
            vec![VertexId(0)],
            vec![vec![Step::forward(EdgeId(0))], vec![Step::backward(EdgeId(1))]],
        );
        assert!(matches!(bad, Err(Error::InvalidMap(m)) if m.contains("split")));
    }

    #[test]
    fn endpoint_mismatch_is_rejected() {
        let p = Arc::new(path_graph());
        let x = p.graph().edge_id("x").unwrap();
        let y = p.graph().edge_id("y").unwrap();
        let bad = CellularMap::new(
            p.clone(),
            p,
            vec![VertexId(0), VertexId(1), VertexId(2)],
            vec![vec![Step::forward(y)], vec![Step::forward(x)]],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn swapped_sides_are_tracked() {
        // Reversing the circle swaps the sides of its vertex.
        let c = Arc::new(two_sided(Graph::rose(&["e"]), &[(&["e+"], &["e-"])]).unwrap());
        let flip = CellularMap::new(c.clone(), c, vec![VertexId(0)], vec![vec![Step::backward(EdgeId(0))]]).unwrap();
        assert_eq!(flip.image_side(VertexId(0), Side::A), Side::B);
        let germ = SmoothGerm {
            vertex: VertexId(0),
            a: Some(HalfEdge::source(EdgeId(0))),
            b: Some(HalfEdge::target(EdgeId(0))),
        };
        assert_eq!(flip.germ_image(&germ).unwrap(), germ);
    }

    #[test]
    fn compose_rejects_mismatched_maps() {
        let f = circle_power_map(2);
        let p = figure_eight_power_map(2);
        assert!(matches!(compose(&p, &f), Err(Error::NotComposable(_))));
    }
}
