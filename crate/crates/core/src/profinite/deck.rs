//! Deck transformation groups by path lifting.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::graph::{EdgeId, Step, VertexId};
use crate::profinite::covering::GraphCovering;

/// A covering automorphism, as permutations of total vertices and edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeckTransformation {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl DeckTransformation {
    pub fn identity(c: &GraphCovering) -> Self {
        DeckTransformation { vertices: c.total().vertices().collect(), edges: c.total().edges().collect() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &DeckTransformation) -> DeckTransformation {
        DeckTransformation {
            vertices: other.vertices.iter().map(|v| self.vertices[v.0]).collect(),
            edges: other.edges.iter().map(|e| self.edges[e.0]).collect(),
        }
    }

    pub fn inverse(&self) -> DeckTransformation {
        let mut vertices = vec![VertexId(0); self.vertices.len()];
        for (i, v) in self.vertices.iter().enumerate() {
            vertices[v.0] = VertexId(i);
        }
        let mut edges = vec![EdgeId(0); self.edges.len()];
        for (i, e) in self.edges.iter().enumerate() {
            edges[e.0] = EdgeId(i);
        }
        DeckTransformation { vertices, edges }
    }

    pub fn is_identity(&self) -> bool {
        self.vertices.iter().enumerate().all(|(i, v)| v.0 == i) && self.edges.iter().enumerate().all(|(i, e)| e.0 == i)
    }
}

#[derive(Clone, Debug)]
pub struct DeckGroup {
    /// Total vertex the elements are indexed by.
    pub basepoint: VertexId,
    /// The fiber through `basepoint`.
    pub fiber: Vec<VertexId>,
    /// Sorted by the image of `basepoint`.
    pub elements: Vec<DeckTransformation>,
}

/// Outcome of the regularity test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularityReport {
    pub regular: bool,
    pub degree: usize,
    pub order: usize,
    /// Orbit of the basepoint under the deck group.
    pub orbit: Vec<usize>,
}

impl DeckGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// The element sending the basepoint to `v`, if any.
    pub fn element_at(&self, v: VertexId) -> Option<&DeckTransformation> {
        self.elements.iter().find(|g| g.vertices[self.basepoint.0] == v)
    }

    pub fn exponent(&self) -> usize {
        let lcm = |a: usize, b: usize| {
            let (mut x, mut y) = (a, b);
            while y != 0 {
                (x, y) = (y, x % y);
            }
            a / x * b
        };
        self.elements
            .iter()
            .map(|g| {
                let mut p = g.clone();
                let mut n = 1;
                while !p.is_identity() {
                    p = g.compose(&p);
                    n += 1;
                }
                n
            })
            .fold(1, lcm)
    }

    /// Regular when the group is transitive on the fiber.
    pub fn regularity(&self) -> RegularityReport {
        let orbit: BTreeSet<usize> = self.elements.iter().map(|g| g.vertices[self.basepoint.0].0).collect();
        RegularityReport {
            regular: orbit.len() == self.fiber.len(),
            degree: self.fiber.len(),
            order: self.order(),
            orbit: orbit.into_iter().collect(),
        }
    }
}

/// Extends `basepoint ↦ target` to a deck transformation, propagating along
/// a spanning tree of the total graph and checking every edge.
pub fn extend_deck(c: &GraphCovering, basepoint: VertexId, target: VertexId) -> Option<DeckTransformation> {
    let total = c.total();
    if c.vertex_image(basepoint) != c.vertex_image(target) {
        return None;
    }
    // Breadth-first search; each newly reached vertex is placed by lifting
    // the step that reached it.
    let mut vertices: Vec<Option<VertexId>> = vec![None; total.vertex_count()];
    vertices[basepoint.0] = Some(target);
    let mut queue = std::collections::VecDeque::from([basepoint]);
    while let Some(v) = queue.pop_front() {
        let from = vertices[v.0]?;
        let steps = total
            .out_edges(v)
            .iter()
            .map(|&e| Step::forward(e))
            .chain(total.in_edges(v).iter().map(|&e| Step::backward(e)));
        for s in steps {
            let w = total.step_end(s);
            if vertices[w.0].is_none() {
                let lifted = c.lift_step(from, c.step_image(s)).ok()?;
                vertices[w.0] = Some(total.step_end(lifted));
                queue.push_back(w);
            }
        }
    }
    let vertices: Vec<VertexId> = vertices.into_iter().collect::<Option<_>>()?;
    let mut edges = Vec::with_capacity(total.edge_count());
    for e in total.edges() {
        let lifted = c.lift_step(vertices[total.src(e).0], Step::forward(c.edge_image(e))).ok()?;
        if total.dst(lifted.edge) != vertices[total.dst(e).0] {
            return None;
        }
        edges.push(lifted.edge);
    }
    Some(DeckTransformation { vertices, edges })
}

/// All deck transformations, found by trying every fiber point as the image
/// of the first vertex of the fiber over base vertex 0.
pub fn deck_group(c: &GraphCovering) -> DeckGroup {
    let fiber = c.fiber(VertexId(0)).to_vec();
    let basepoint = fiber[0];
    deck_group_at(c, basepoint)
}

pub fn deck_group_at(c: &GraphCovering, basepoint: VertexId) -> DeckGroup {
    let fiber = c.fiber(c.vertex_image(basepoint)).to_vec();
    let elements = fiber.iter().filter_map(|&t| extend_deck(c, basepoint, t)).collect();
    DeckGroup { basepoint, fiber, elements }
}

pub fn is_regular(c: &GraphCovering) -> RegularityReport {
    deck_group(c).regularity()
}
