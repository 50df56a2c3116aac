//! Towers of regular graph coverings, their deck groups, and the profinite
//! group structure and invariant metric on the transversal.

pub mod covering;
pub mod deck;
pub mod tower;

pub use covering::{compose_coverings, GraphCovering};
pub use deck::{deck_group, is_regular, DeckGroup, DeckTransformation, RegularityReport};
pub use tower::{CoveringTower, LeafPoint, ProfiniteElement, QuotientHom, TransverseMetricValue};
