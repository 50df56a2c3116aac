//! Clopen subsets of a subshift transversal and shift holonomy.
//!
//! A transversal point is a bi-infinite legal sequence marked at position 0.
//! A clopen set is stored canonically at a radius `r` as the set of legal
//! words `x[-r..=r]` of its points.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gahler::language::{Alphabet, LanguageOracle, Word};

/// The points whose window around the origin reads `word`, the origin
/// sitting at index `mark`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cylinder {
    pub word: Word,
    pub mark: usize,
}

impl Cylinder {
    pub fn new(word: Word, mark: usize) -> Result<Self> {
        if mark >= word.len() {
            return Err(Error::Input(format!("mark {mark} outside a word of length {}", word.len())));
        }
        Ok(Cylinder { word, mark })
    }

    /// Parses the literal `word@index`.
    pub fn parse(alphabet: &Alphabet, text: &str) -> Result<Self> {
        let (w, i) = text
            .trim()
            .rsplit_once('@')
            .ok_or_else(|| Error::Input(format!("cylinder `{text}` must look like word@index")))?;
        let mark = i.parse().map_err(|_| Error::Input(format!("bad index in cylinder `{text}`")))?;
        Self::new(alphabet.parse_word(w)?, mark)
    }

    pub fn format(&self, alphabet: &Alphabet) -> String {
        format!("{}@{}", alphabet.format_word(&self.word), self.mark)
    }

    /// Smallest radius whose windows determine membership.
    pub fn radius(&self) -> usize {
        self.mark.max(self.word.len() - 1 - self.mark)
    }
}

#[derive(Clone)]
pub struct ClopenSet {
    oracle: Arc<LanguageOracle>,
    radius: usize,
    words: BTreeSet<Word>,
}

impl fmt::Debug for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.oracle.alphabet();
        let words: Vec<String> = self.words.iter().map(|w| a.format_word(w)).collect();
        f.debug_struct("ClopenSet").field("radius", &self.radius).field("words", &words).finish()
    }
}

impl ClopenSet {
    pub fn empty(oracle: Arc<LanguageOracle>) -> Self {
        ClopenSet { oracle, radius: 0, words: BTreeSet::new() }
    }

    pub fn whole(oracle: Arc<LanguageOracle>) -> Result<Self> {
        let words = oracle.legal_words(1)?.iter().cloned().collect();
        Ok(ClopenSet { oracle, radius: 0, words })
    }

    pub fn from_cylinders(oracle: Arc<LanguageOracle>, cylinders: &[Cylinder]) -> Result<Self> {
        let radius = cylinders.iter().map(Cylinder::radius).max().unwrap_or(0);
        let mut words = BTreeSet::new();
        for c in cylinders {
            words.extend(expand(&oracle, &c.word, radius - c.mark, radius)?);
        }
        Ok(ClopenSet { oracle, radius, words })
    }

    pub fn oracle(&self) -> &Arc<LanguageOracle> {
        &self.oracle
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Canonical words, all of length `2 * radius + 1`.
    pub fn words(&self) -> &BTreeSet<Word> {
        &self.words
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn cylinders(&self) -> Vec<Cylinder> {
        self.words.iter().map(|w| Cylinder { word: w.clone(), mark: self.radius }).collect()
    }

    /// The same set described at the larger radius `r`.
    pub fn canonicalize(&self, r: usize) -> Result<ClopenSet> {
        if r < self.radius {
            return Err(Error::RadiusTooSmall { requested: r, current: self.radius });
        }
        if r == self.radius {
            return Ok(self.clone());
        }
        let d = r - self.radius;
        let words = self
            .oracle
            .legal_words(2 * r + 1)?
            .iter()
            .filter(|w| self.words.contains(&w[d..w.len() - d]))
            .cloned()
            .collect();
        Ok(ClopenSet { oracle: self.oracle.clone(), radius: r, words })
    }

    fn aligned(&self, other: &ClopenSet) -> Result<(ClopenSet, ClopenSet)> {
        if !Arc::ptr_eq(&self.oracle, &other.oracle) {
            return Err(Error::OracleMismatch);
        }
        let r = self.radius.max(other.radius);
        Ok((self.canonicalize(r)?, other.canonicalize(r)?))
    }

    fn combine(&self, other: &ClopenSet, op: impl Fn(&BTreeSet<Word>, &BTreeSet<Word>) -> BTreeSet<Word>) -> Result<Self> {
        let (a, b) = self.aligned(other)?;
        let words = op(&a.words, &b.words);
        Ok(ClopenSet { oracle: a.oracle, radius: a.radius, words })
    }

    pub fn union(&self, other: &ClopenSet) -> Result<ClopenSet> {
        self.combine(other, |a, b| a.union(b).cloned().collect())
    }

    pub fn intersect(&self, other: &ClopenSet) -> Result<ClopenSet> {
        self.combine(other, |a, b| a.intersection(b).cloned().collect())
    }

    pub fn subtract(&self, other: &ClopenSet) -> Result<ClopenSet> {
        self.combine(other, |a, b| a.difference(b).cloned().collect())
    }

    pub fn is_subset(&self, other: &ClopenSet) -> Result<bool> {
        let (a, b) = self.aligned(other)?;
        Ok(a.words.is_subset(&b.words))
    }

    pub fn is_equal(&self, other: &ClopenSet) -> Result<bool> {
        let (a, b) = self.aligned(other)?;
        Ok(a.words == b.words)
    }

    /// Image under `x ↦ y`, `y_j = x_{j + n}`, with the holonomy word that
    /// realizes it.
    pub fn shift(&self, n: i64) -> Result<(ClopenSet, HolonomyWord)> {
        let step = n.unsigned_abs() as usize;
        let base = self.canonicalize(self.radius.max(step))?;
        let r = base.radius;
        // The old window x[-r..=r] is the new window y[-r-n..=r-n].
        let mark = (r as i64 + n) as usize;
        let cylinders: Vec<Cylinder> = base.words.iter().map(|w| Cylinder { word: w.clone(), mark }).collect();
        let image = if cylinders.is_empty() {
            ClopenSet { oracle: self.oracle.clone(), radius: r + step, words: BTreeSet::new() }
        } else {
            ClopenSet::from_cylinders(self.oracle.clone(), &cylinders)?
        };
        let steps = vec![n.signum() as i8; step];
        Ok((image, HolonomyWord { steps, domain: self.clone() }))
    }
}

/// Legal words of length `2r + 1` that read `word` from index `offset`.
fn expand(oracle: &LanguageOracle, word: &[u8], offset: usize, r: usize) -> Result<Vec<Word>> {
    Ok(oracle
        .legal_words(2 * r + 1)?
        .iter()
        .filter(|w| &w[offset..offset + word.len()] == word)
        .cloned()
        .collect())
}

/// A composite of one-tile shifts, defined on `domain`.
#[derive(Clone, Debug)]
pub struct HolonomyWord {
    /// Each entry is `+1` or `-1`.
    pub steps: Vec<i8>,
    pub domain: ClopenSet,
}

impl HolonomyWord {
    pub fn identity(domain: ClopenSet) -> Self {
        HolonomyWord { steps: Vec::new(), domain }
    }

    pub fn displacement(&self) -> i64 {
        self.steps.iter().map(|&s| i64::from(s)).sum()
    }

    /// Image of `set ∩ domain`.
    pub fn apply(&self, set: &ClopenSet) -> Result<ClopenSet> {
        Ok(set.intersect(&self.domain)?.shift(self.displacement())?.0)
    }

    /// The inverse word, defined on the image of the domain.
    pub fn reversed(&self) -> Result<HolonomyWord> {
        let domain = self.domain.shift(self.displacement())?.0;
        Ok(HolonomyWord { steps: self.steps.iter().rev().map(|s| -s).collect(), domain })
    }
}

/// Applies `ws[0]` first. A point stays in the domain when every partial
/// composite lands in the next word's domain.
pub fn compose_holonomy(ws: &[HolonomyWord]) -> Result<HolonomyWord> {
    let (first, rest) = ws.split_first().ok_or_else(|| Error::Input("nothing to compose".into()))?;
    let mut out = first.clone();
    for next in rest {
        let pulled_back = next.domain.shift(-out.displacement())?.0;
        out.domain = out.domain.intersect(&pulled_back)?;
        out.steps.extend_from_slice(&next.steps);
    }
    Ok(out)
}
