//! Standard small examples: circles, the figure-eight, their power maps,
//! and cycle-graph solenoids.

use std::sync::Arc;

use crate::branched_graph::{BranchedGraph, CellularMap};
use crate::error::Result;
use crate::graph::{EdgeId, Graph, HalfEdge, Step, VertexId};
use crate::inverse_system::InverseSystem;

/// Attaches sides given by half-edge names, one `(A, B)` pair per vertex.
pub fn two_sided(graph: Graph, sides: &[(&[&str], &[&str])]) -> Result<BranchedGraph> {
    let parse = |names: &[&str]| -> Result<Vec<HalfEdge>> {
        names.iter().map(|n| graph.parse_half_edge(n)).collect()
    };
    let sides = sides.iter().map(|(a, b)| Ok([parse(a)?, parse(b)?])).collect::<Result<Vec<_>>>()?;
    BranchedGraph::new(graph, sides)
}

/// One vertex `o` with one loop `e`; sides `{e+}` / `{e-}`.
pub fn circle() -> BranchedGraph {
    two_sided(Graph::rose(&["e"]), &[(&["e+"], &["e-"])]).expect("circle is valid")
}

/// Wedge of two circles `a`, `b` at `o`; sides `{a+, b+}` / `{a-, b-}`.
pub fn figure_eight() -> BranchedGraph {
    two_sided(Graph::rose(&["a", "b"]), &[(&["a+", "b+"], &["a-", "b-"])]).expect("figure-eight is valid")
}

/// `e ↦ e^degree` on [`circle`].
pub fn circle_power_map(degree: usize) -> CellularMap {
    let c = Arc::new(circle());
    CellularMap::new(c.clone(), c, vec![VertexId(0)], vec![vec![Step::forward(EdgeId(0)); degree]])
        .expect("power maps are cellular")
}

/// `a ↦ a^degree, b ↦ b^degree` on [`figure_eight`].
pub fn figure_eight_power_map(degree: usize) -> CellularMap {
    let k = Arc::new(figure_eight());
    CellularMap::new(
        k.clone(),
        k,
        vec![VertexId(0)],
        vec![vec![Step::forward(EdgeId(0)); degree], vec![Step::forward(EdgeId(1)); degree]],
    )
    .expect("power maps are cellular")
}

/// Stationary identity on `n` disjoint directed loops.
pub fn identity_system(n: usize) -> InverseSystem {
    let g = Graph::from_ends(n, (0..n).map(|i| (VertexId(i), VertexId(i))).collect());
    let g = Arc::new(BranchedGraph::directed(g));
    InverseSystem::stationary(CellularMap::identity(g)).expect("identity is onto")
}

/// The cycle of length `n` as a directed branched graph.
pub fn directed_cycle(n: usize) -> BranchedGraph {
    BranchedGraph::directed(Graph::cycle(n))
}

/// Reduction `C_upper → C_lower`, `i ↦ i mod lower`, as a cellular map.
pub fn cycle_reduction(upper: Arc<BranchedGraph>, lower: Arc<BranchedGraph>) -> Result<CellularMap> {
    let n = lower.graph().vertex_count();
    let m = upper.graph().vertex_count();
    CellularMap::new(
        upper,
        lower,
        (0..m).map(|i| VertexId(i % n)).collect(),
        (0..m).map(|i| vec![Step::forward(EdgeId(i % n))]).collect(),
    )
}

/// The solenoid tower `C_1 ← C_{d_1} ← C_{d_1 d_2} ← ...` of cycle graphs.
pub fn cycle_solenoid(degrees: &[usize]) -> InverseSystem {
    let mut sizes = vec![1usize];
    for d in degrees {
        sizes.push(sizes.last().unwrap() * d);
    }
    let levels: Vec<Arc<BranchedGraph>> = sizes.iter().map(|&n| Arc::new(directed_cycle(n))).collect();
    let bonds = (0..degrees.len())
        .map(|k| cycle_reduction(levels[k + 1].clone(), levels[k].clone()))
        .collect::<Result<Vec<_>>>()
        .expect("cycle reductions are cellular");
    InverseSystem::explicit(levels, bonds).expect("cycle reductions are onto")
}
