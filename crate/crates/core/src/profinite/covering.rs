//! Finite graph coverings, path lifting and monodromy.

use std::sync::Arc;

use crate::branched_graph::{BranchedGraph, CellularMap, Violation};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, Step, VertexId};

/// A covering map `total → base` sending every edge to a single base edge
/// with the same orientation.
#[derive(Clone, Debug)]
pub struct GraphCovering {
    total: Arc<Graph>,
    base: Arc<Graph>,
    vertex_map: Vec<VertexId>,
    edge_map: Vec<EdgeId>,
    /// Per total vertex: `(base edge, total edge)` for outgoing and incoming edges.
    out_lift: Vec<Vec<(EdgeId, EdgeId)>>,
    in_lift: Vec<Vec<(EdgeId, EdgeId)>>,
    fibers: Vec<Vec<VertexId>>,
}

impl GraphCovering {
    /// Validates and builds a covering. Degree-1 coverings are rejected
    /// unless `allow_trivial` is set.
    pub fn new(
        total: Arc<Graph>,
        base: Arc<Graph>,
        vertex_map: Vec<VertexId>,
        edge_map: Vec<EdgeId>,
        allow_trivial: bool,
    ) -> Result<Self> {
        let c = Self::unchecked(total, base, vertex_map, edge_map)?;
        let violations = c.validate(allow_trivial);
        if violations.is_empty() {
            Ok(c)
        } else {
            let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
            Err(Error::InvalidCovering(text.join("; ")))
        }
    }

    fn unchecked(total: Arc<Graph>, base: Arc<Graph>, vertex_map: Vec<VertexId>, edge_map: Vec<EdgeId>) -> Result<Self> {
        if vertex_map.len() != total.vertex_count() || edge_map.len() != total.edge_count() {
            return Err(Error::InvalidCovering("map tables do not match the total graph".into()));
        }
        if vertex_map.iter().any(|v| v.0 >= base.vertex_count()) || edge_map.iter().any(|e| e.0 >= base.edge_count()) {
            return Err(Error::InvalidCovering("map refers to cells outside the base".into()));
        }
        let mut out_lift = vec![Vec::new(); total.vertex_count()];
        let mut in_lift = vec![Vec::new(); total.vertex_count()];
        for e in total.edges() {
            out_lift[total.src(e).0].push((edge_map[e.0], e));
            in_lift[total.dst(e).0].push((edge_map[e.0], e));
        }
        let mut fibers = vec![Vec::new(); base.vertex_count()];
        for v in total.vertices() {
            fibers[vertex_map[v.0].0].push(v);
        }
        Ok(GraphCovering { total, base, vertex_map, edge_map, out_lift, in_lift, fibers })
    }

    /// The covering of `base` whose sheets over each vertex are `0..degree`
    /// and where the lift of edge `e` starting on sheet `i` ends on sheet
    /// `perms[e][i]`. Vertex `v` on sheet `i` is named `v.i`.
    pub fn from_permutations(base: Arc<Graph>, perms: &[Vec<usize>], allow_trivial: bool) -> Result<Self> {
        if perms.len() != base.edge_count() {
            return Err(Error::InvalidCovering(format!(
                "{} permutations for {} base edges",
                perms.len(),
                base.edge_count()
            )));
        }
        let degree = perms.first().map_or(1, Vec::len);
        for p in perms {
            let mut seen = vec![false; degree];
            if p.len() != degree || p.iter().any(|&i| i >= degree || std::mem::replace(&mut seen[i], true)) {
                return Err(Error::InvalidCovering(format!("{p:?} is not a permutation of 0..{degree}")));
            }
        }
        let vertex_names = base
            .vertices()
            .flat_map(|v| (0..degree).map(move |i| (v, i)))
            .map(|(v, i)| format!("{}.{i}", base.vertex_name(v)))
            .collect();
        let mut edge_names = Vec::new();
        let mut ends = Vec::new();
        let mut edge_map = Vec::new();
        for e in base.edges() {
            for (i, &j) in perms[e.0].iter().enumerate() {
                edge_names.push(format!("{}.{i}", base.edge_name(e)));
                ends.push((VertexId(base.src(e).0 * degree + i), VertexId(base.dst(e).0 * degree + j)));
                edge_map.push(e);
            }
        }
        let vertex_map = base.vertices().flat_map(|v| std::iter::repeat_n(v, degree)).collect();
        let total = Graph::from_named_ends(vertex_names, edge_names, ends)?;
        Self::new(Arc::new(total), base, vertex_map, edge_map, allow_trivial)
    }

    /// The identity covering of `g`.
    pub fn identity(g: Arc<Graph>) -> Self {
        let vertex_map = g.vertices().collect();
        let edge_map = g.edges().collect();
        Self::new(g.clone(), g, vertex_map, edge_map, true).expect("identity is a covering")
    }

    /// Covering axioms: surjective, locally bijective on incident edges,
    /// connected total space and base, and constant degree at least 2.
    pub fn validate(&self, allow_trivial: bool) -> Vec<Violation> {
        let (t, b) = (&*self.total, &*self.base);
        let mut out = Vec::new();
        for e in t.edges() {
            let be = self.edge_map[e.0];
            if self.vertex_map[t.src(e).0] != b.src(be) || self.vertex_map[t.dst(e).0] != b.dst(be) {
                out.push(Violation::new(t.edge_name(e), format!("endpoints do not lie over those of `{}`", b.edge_name(be))));
            }
        }
        for v in t.vertices() {
            let bv = self.vertex_map[v.0];
            for (lifts, expected, dir) in [
                (&self.out_lift[v.0], b.out_edges(bv), "outgoing"),
                (&self.in_lift[v.0], b.in_edges(bv), "incoming"),
            ] {
                let mut got: Vec<EdgeId> = lifts.iter().map(|&(be, _)| be).collect();
                let mut want = expected.to_vec();
                got.sort();
                want.sort();
                if got != want {
                    out.push(Violation::new(
                        t.vertex_name(v),
                        format!("{dir} edges are not in bijection with those at `{}`", b.vertex_name(bv)),
                    ));
                }
            }
        }
        for v in b.vertices() {
            if self.fibers[v.0].is_empty() {
                out.push(Violation::new(b.vertex_name(v), "not covered"));
            }
        }
        if !t.is_connected() {
            out.push(Violation::new("total", "total graph is disconnected"));
        }
        if !b.is_connected() {
            out.push(Violation::new("base", "base graph is disconnected"));
        }
        if out.is_empty() {
            let d = self.degree();
            if self.fibers.iter().any(|f| f.len() != d) {
                out.push(Violation::new("fibers", "fiber sizes differ"));
            } else if d == 1 && !allow_trivial {
                out.push(Violation::new("degree", "covering has degree 1"));
            }
        }
        out
    }

    pub fn total(&self) -> &Arc<Graph> {
        &self.total
    }

    pub fn base(&self) -> &Arc<Graph> {
        &self.base
    }

    pub fn vertex_image(&self, v: VertexId) -> VertexId {
        self.vertex_map[v.0]
    }

    pub fn edge_image(&self, e: EdgeId) -> EdgeId {
        self.edge_map[e.0]
    }

    pub fn vertex_map(&self) -> &[VertexId] {
        &self.vertex_map
    }

    pub fn edge_map(&self) -> &[EdgeId] {
        &self.edge_map
    }

    pub fn degree(&self) -> usize {
        self.fibers.first().map_or(0, Vec::len)
    }

    /// Total vertices over `v`, in increasing order.
    pub fn fiber(&self, v: VertexId) -> &[VertexId] {
        &self.fibers[v.0]
    }

    pub fn step_image(&self, s: Step) -> Step {
        Step { edge: self.edge_map[s.edge.0], forward: s.forward }
    }

    pub fn project(&self, path: &[Step]) -> Vec<Step> {
        path.iter().map(|&s| self.step_image(s)).collect()
    }

    /// The unique lift of a base step starting at total vertex `v`.
    pub fn lift_step(&self, v: VertexId, s: Step) -> Result<Step> {
        let table = if s.forward { &self.out_lift[v.0] } else { &self.in_lift[v.0] };
        table
            .iter()
            .find(|&&(be, _)| be == s.edge)
            .map(|&(_, e)| Step { edge: e, forward: s.forward })
            .ok_or_else(|| {
                Error::NotAPath(format!(
                    "`{}` does not start at `{}`",
                    self.base.format_step(s),
                    self.base.vertex_name(self.vertex_map[v.0])
                ))
            })
    }

    /// Endpoint of the lift of `path` starting at `v`.
    pub fn lift_endpoint(&self, v: VertexId, path: &[Step]) -> Result<VertexId> {
        let mut at = v;
        for &s in path {
            at = self.total.step_end(self.lift_step(at, s)?);
        }
        Ok(at)
    }

    pub fn lift(&self, v: VertexId, path: &[Step]) -> Result<Vec<Step>> {
        let mut at = v;
        let mut out = Vec::with_capacity(path.len());
        for &s in path {
            let l = self.lift_step(at, s)?;
            at = self.total.step_end(l);
            out.push(l);
        }
        Ok(out)
    }

    /// Permutation of the fiber over `base_point` induced by lifting a loop:
    /// entry `i` is the fiber index where the lift from fiber point `i` ends.
    pub fn monodromy(&self, base_point: VertexId, path: &[Step]) -> Result<Vec<usize>> {
        let (s, t) = self.base.path_endpoints(path).unwrap_or((base_point, base_point));
        if s != base_point || t != base_point {
            return Err(Error::NotClosed);
        }
        let fiber = self.fiber(base_point);
        fiber
            .iter()
            .map(|&v| {
                let end = self.lift_endpoint(v, path)?;
                Ok(fiber.binary_search(&end).expect("lifts of loops end in the fiber"))
            })
            .collect()
    }

    /// The covering as a cellular map between directed branched graphs.
    pub fn cellular_map(&self) -> Result<CellularMap> {
        CellularMap::new(
            Arc::new(BranchedGraph::directed((*self.total).clone())),
            Arc::new(BranchedGraph::directed((*self.base).clone())),
            self.vertex_map.clone(),
            self.edge_map.iter().map(|&e| vec![Step::forward(e)]).collect(),
        )
    }
}

/// `lower ∘ upper` for coverings `upper: S'' → S'` and `lower: S' → S`.
pub fn compose_coverings(lower: &GraphCovering, upper: &GraphCovering) -> Result<GraphCovering> {
    if !(Arc::ptr_eq(&upper.base, &lower.total) || *upper.base == *lower.total) {
        return Err(Error::NotComposable("the upper covering's base is not the lower covering's total graph".into()));
    }
    let vertex_map = upper.vertex_map.iter().map(|v| lower.vertex_map[v.0]).collect();
    let edge_map = upper.edge_map.iter().map(|e| lower.edge_map[e.0]).collect();
    GraphCovering::new(upper.total.clone(), lower.base.clone(), vertex_map, edge_map, true)
}
