//! Approximant towers of one-dimensional subshift suspensions.

pub mod approximant;
pub mod language;

pub use approximant::{
    bonding_map, build_approximant, pattern_clopen, quotient_cell, separation_depth, window, ApproximantTower,
    CollaredComplex, Separation,
};
pub use language::{Alphabet, LanguageOracle, LanguageSource, Substitution, Word};
