//! Combinatorial engine for inverse limits of branched 1-manifolds.
//!
//! * [`local_model`]: symbolic local branched models in any dimension.
//! * [`branched_graph`]: train tracks, cellular maps and the flattening test.
//! * [`inverse_system`]: projective systems, telescoping, threads and the
//!   lamination verdict.
//! * [`gahler`]: approximant towers of one-dimensional subshifts.
//! * [`holonomy`]: clopen sets of the subshift transversal and shift holonomy.
//! * [`profinite`]: towers of regular graph coverings, deck groups, the
//!   profinite transversal and its invariant metric.
//! * [`formats`] and [`dot`]: JSON files and Graphviz export.

pub mod branched_graph;
pub mod dot;
pub mod error;
pub mod fixtures;
pub mod formats;
pub mod gahler;
pub mod graph;
pub mod holonomy;
pub mod inverse_system;
pub mod local_model;
pub mod profinite;
pub mod rational;

pub use branched_graph::{
    compose, star, validate_graph, BranchedGraph, CellularMap, FlatteningCheck, Side, SmoothGerm, Violation,
};
pub use error::{Error, Result};
pub use graph::{EdgeId, Graph, HalfEdge, Step, VertexId};
pub use inverse_system::{
    enumerate_threads, is_flattening_system, local_box, not_lamination_certificate, telescope, Cell,
    FlatteningVerdict, InverseSystem, LevelSupplier, Thread,
};
pub use gahler::{ApproximantTower, CollaredComplex, LanguageOracle, Separation, Substitution};
pub use holonomy::{compose_holonomy, ClopenSet, Cylinder, HolonomyWord};
pub use local_model::{class_count_profile, glue_classes, projection, sector_contains, BranchTree, HalfSpace, Sector};
pub use profinite::{CoveringTower, DeckGroup, GraphCovering, LeafPoint, ProfiniteElement, TransverseMetricValue};
pub use rational::Rational;
