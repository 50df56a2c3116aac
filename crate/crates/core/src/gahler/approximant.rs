//! Collared approximant complexes of a subshift and the maps between them.
//!
//! The complex of collar radius `k` has a vertex for every legal word of
//! length `2k` and an edge for every legal word `w` of length `2k + 1`,
//! running from its length-`2k` prefix to its length-`2k` suffix. The bond
//! from radius `k + 1` down to radius `k` keeps the central subword.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::branched_graph::{BranchedGraph, CellularMap};
use crate::error::{Error, Result};
use crate::gahler::language::{LanguageOracle, Word};
use crate::graph::{EdgeId, Graph, Step, VertexId};
use crate::holonomy::{ClopenSet, Cylinder};
use crate::inverse_system::{InverseSystem, LevelSupplier};

/// Name given to the single vertex of the radius-0 complex.
pub const EMPTY_WORD_NAME: &str = "ε";

#[derive(Clone, Debug)]
pub struct CollaredComplex {
    k: usize,
    graph: Arc<BranchedGraph>,
    vertex_words: Vec<Word>,
    edge_words: Vec<Word>,
    vertex_index: HashMap<Word, VertexId>,
    edge_index: HashMap<Word, EdgeId>,
}

impl CollaredComplex {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn graph(&self) -> &Arc<BranchedGraph> {
        &self.graph
    }

    pub fn vertex_words(&self) -> &[Word] {
        &self.vertex_words
    }

    pub fn edge_words(&self) -> &[Word] {
        &self.edge_words
    }

    pub fn vertex_of(&self, word: &[u8]) -> Option<VertexId> {
        self.vertex_index.get(word).copied()
    }

    pub fn edge_of(&self, word: &[u8]) -> Option<EdgeId> {
        self.edge_index.get(word).copied()
    }
}

pub fn build_approximant(oracle: &LanguageOracle, k: usize) -> Result<CollaredComplex> {
    let vertex_words: Vec<Word> = oracle.legal_words(2 * k)?.to_vec();
    let edge_words: Vec<Word> = oracle.legal_words(2 * k + 1)?.to_vec();
    let vertex_index: HashMap<Word, VertexId> =
        vertex_words.iter().enumerate().map(|(i, w)| (w.clone(), VertexId(i))).collect();
    let edge_index: HashMap<Word, EdgeId> =
        edge_words.iter().enumerate().map(|(i, w)| (w.clone(), EdgeId(i))).collect();
    let mut ends = Vec::with_capacity(edge_words.len());
    for w in &edge_words {
        let n = w.len() - 1;
        let (Some(&s), Some(&t)) = (vertex_index.get(&w[..n]), vertex_index.get(&w[1..])) else {
            return Err(Error::Input(format!(
                "language is not factor-closed at `{}`",
                oracle.alphabet().format_word(w)
            )));
        };
        ends.push((s, t));
    }
    let name = |w: &Word| {
        if w.is_empty() {
            EMPTY_WORD_NAME.to_string()
        } else {
            oracle.alphabet().format_word(w)
        }
    };
    let graph = Graph::from_named_ends(
        vertex_words.iter().map(name).collect(),
        edge_words.iter().map(name).collect(),
        ends,
    )?;
    Ok(CollaredComplex {
        k,
        graph: Arc::new(BranchedGraph::directed(graph)),
        vertex_words,
        edge_words,
        vertex_index,
        edge_index,
    })
}

/// The bond from radius `k + 1` onto radius `k`: every cell goes to the cell
/// of its central subword.
pub fn bonding_map(upper: &CollaredComplex, lower: &CollaredComplex) -> Result<CellularMap> {
    bond_between(upper, lower, upper.graph.clone(), lower.graph.clone())
}

fn bond_between(
    upper: &CollaredComplex,
    lower: &CollaredComplex,
    domain: Arc<BranchedGraph>,
    codomain: Arc<BranchedGraph>,
) -> Result<CellularMap> {
    if upper.k != lower.k + 1 {
        return Err(Error::NotComposable(format!("radius {} does not sit above radius {}", upper.k, lower.k)));
    }
    let central = |w: &Word| w[1..w.len() - 1].to_vec();
    let vertex_map = upper
        .vertex_words
        .iter()
        .map(|w| lower.vertex_of(&central(w)).ok_or_else(|| Error::IllegalWord(format!("{w:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let edge_map = upper
        .edge_words
        .iter()
        .map(|w| {
            lower
                .edge_of(&central(w))
                .map(|e| vec![Step::forward(e)])
                .ok_or_else(|| Error::IllegalWord(format!("{w:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    CellularMap::new(domain, codomain, vertex_map, edge_map)
}

/// The radius-`k` window around the mark of `word`.
pub fn window(word: &[u8], mark: usize, k: usize) -> Result<&[u8]> {
    if mark < k || mark + k >= word.len() {
        return Err(Error::WindowExceedsWord { radius: k, mark, len: word.len() });
    }
    Ok(&word[mark - k..=mark + k])
}

/// The edge of the radius-`k` complex hit by the marked tile of `cyl`.
pub fn quotient_cell(complex: &CollaredComplex, cyl: &Cylinder) -> Result<EdgeId> {
    let w = window(&cyl.word, cyl.mark, complex.k)?;
    complex.edge_of(w).ok_or_else(|| Error::IllegalWord(format!("{w:?}")))
}

/// The set of transversal points around which `cyl` can be read.
pub fn pattern_clopen(oracle: &Arc<LanguageOracle>, cyl: &Cylinder) -> Result<ClopenSet> {
    if !oracle.is_legal(&cyl.word)? {
        return Err(Error::IllegalWord(oracle.alphabet().format_word(&cyl.word)));
    }
    ClopenSet::from_cylinders(oracle.clone(), std::slice::from_ref(cyl))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Separation {
    /// Least radius at which the two points reach different cells.
    At(usize),
    Undistinguished { up_to: usize },
}

/// Least collar radius `k <= max_k` at which the marked points of `x` and
/// `y` land on different edges.
pub fn separation_depth(oracle: &LanguageOracle, x: &Cylinder, y: &Cylinder, max_k: usize) -> Result<Separation> {
    for c in [x, y] {
        if !oracle.is_legal(&c.word)? {
            return Err(Error::IllegalWord(oracle.alphabet().format_word(&c.word)));
        }
    }
    for k in 0..=max_k {
        if window(&x.word, x.mark, k)? != window(&y.word, y.mark, k)? {
            return Ok(Separation::At(k));
        }
    }
    Ok(Separation::Undistinguished { up_to: max_k })
}

/// The whole approximant tower of one language, built on demand.
pub struct ApproximantTower {
    oracle: Arc<LanguageOracle>,
    complexes: RwLock<Vec<Arc<CollaredComplex>>>,
}

impl ApproximantTower {
    pub fn new(oracle: Arc<LanguageOracle>) -> Self {
        ApproximantTower { oracle, complexes: RwLock::default() }
    }

    pub fn oracle(&self) -> &Arc<LanguageOracle> {
        &self.oracle
    }

    pub fn complex(&self, k: usize) -> Result<Arc<CollaredComplex>> {
        if let Some(c) = self.complexes.read().unwrap_or_else(|p| p.into_inner()).get(k) {
            return Ok(c.clone());
        }
        let mut cache = self.complexes.write().unwrap_or_else(|p| p.into_inner());
        while cache.len() <= k {
            let next = build_approximant(&self.oracle, cache.len())?;
            cache.push(Arc::new(next));
        }
        Ok(cache[k].clone())
    }

    /// The tower as a lazily materialized inverse system.
    pub fn system(self: &Arc<Self>) -> InverseSystem {
        InverseSystem::from_supplier(self.clone())
    }
}

impl LevelSupplier for ApproximantTower {
    fn level(&self, k: usize) -> Result<BranchedGraph> {
        Ok((**self.complex(k)?.graph()).clone())
    }

    fn bond(&self, k: usize, upper: &Arc<BranchedGraph>, lower: &Arc<BranchedGraph>) -> Result<CellularMap> {
        bond_between(&*self.complex(k + 1)?, &*self.complex(k)?, upper.clone(), lower.clone())
    }
}
