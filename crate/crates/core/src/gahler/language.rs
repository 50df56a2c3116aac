//! Factor languages of one-dimensional subshifts.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};

/// A word as a sequence of symbol indices.
pub type Word = Vec<u8>;

const RESERVED: &[char] = &['+', '-', '@', ',', '"', '\\'];

/// Finite alphabet of single-character symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(symbols: &[S]) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Input("alphabet is empty".into()));
        }
        if symbols.len() > u8::MAX as usize {
            return Err(Error::Input("alphabet is too large".into()));
        }
        let mut out = Vec::with_capacity(symbols.len());
        for s in symbols {
            let s = s.as_ref();
            let mut chars = s.chars();
            let (Some(c), None) = (chars.next(), chars.next()) else {
                return Err(Error::Input(format!("symbol `{s}` must be a single character")));
            };
            if c.is_whitespace() || RESERVED.contains(&c) {
                return Err(Error::Input(format!("symbol `{c}` is reserved")));
            }
            if out.contains(&c) {
                return Err(Error::Input(format!("duplicate symbol `{c}`")));
            }
            out.push(c);
        }
        Ok(Alphabet { symbols: out })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        text.chars()
            .map(|c| {
                self.symbols
                    .iter()
                    .position(|&s| s == c)
                    .map(|i| i as u8)
                    .ok_or_else(|| Error::Input(format!("`{c}` is not in the alphabet")))
            })
            .collect()
    }

    pub fn format_word(&self, word: &[u8]) -> String {
        word.iter().map(|&i| self.symbols[i as usize]).collect()
    }

    /// All words of length `len` in lexicographic order.
    fn all_words(&self, len: usize) -> Vec<Word> {
        let mut out = vec![Vec::new()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..self.len() as u8).map(move |s| {
                        let mut w = w.clone();
                        w.push(s);
                        w
                    })
                })
                .collect();
        }
        out
    }
}

/// A substitution rule `symbol ↦ nonempty word`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    alphabet: Alphabet,
    rules: Vec<Word>,
    primitive: bool,
}

impl Substitution {
    pub fn new(alphabet: Alphabet, rules: Vec<Word>) -> Result<Self> {
        if rules.len() != alphabet.len() {
            return Err(Error::Input(format!("{} rules for {} symbols", rules.len(), alphabet.len())));
        }
        for (i, r) in rules.iter().enumerate() {
            if r.is_empty() {
                return Err(Error::Input(format!("rule for `{}` is empty", alphabet.symbols[i])));
            }
        }
        let primitive = is_primitive(&incidence_matrix(alphabet.len(), &rules));
        Ok(Substitution { alphabet, rules, primitive })
    }

    /// `Substitution::parse(&["a", "b"], &[("a", "ab"), ("b", "a")])`.
    pub fn parse(symbols: &[&str], rules: &[(&str, &str)]) -> Result<Self> {
        let alphabet = Alphabet::new(symbols)?;
        let mut images: Vec<Option<Word>> = vec![None; alphabet.len()];
        for (from, to) in rules {
            let from = alphabet.parse_word(from)?;
            let [s] = from.as_slice() else {
                return Err(Error::Input("rules are keyed by single symbols".into()));
            };
            images[*s as usize] = Some(alphabet.parse_word(to)?);
        }
        let rules = images
            .into_iter()
            .enumerate()
            .map(|(i, r)| r.ok_or_else(|| Error::Input(format!("no rule for `{}`", alphabet.symbols[i]))))
            .collect::<Result<Vec<_>>>()?;
        Substitution::new(alphabet, rules)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn rules(&self) -> &[Word] {
        &self.rules
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    pub fn apply(&self, word: &[u8]) -> Word {
        word.iter().flat_map(|&s| self.rules[s as usize].iter().copied()).collect()
    }

    pub fn incidence_matrix(&self) -> Vec<Vec<usize>> {
        incidence_matrix(self.alphabet.len(), &self.rules)
    }
}

/// `m[i][j]` counts occurrences of symbol `j` in the image of `i`.
fn incidence_matrix(n: usize, rules: &[Word]) -> Vec<Vec<usize>> {
    let mut m = vec![vec![0; n]; n];
    for (i, r) in rules.iter().enumerate() {
        for &s in r {
            m[i][s as usize] += 1;
        }
    }
    m
}

/// Some power strictly positive; powers up to Wielandt's bound suffice.
fn is_primitive(m: &[Vec<usize>]) -> bool {
    let n = m.len();
    let pattern: Vec<Vec<bool>> = m.iter().map(|r| r.iter().map(|&x| x > 0).collect()).collect();
    let mut power = pattern.clone();
    for _ in 0..(n - 1) * (n - 1) + 1 {
        if power.iter().all(|r| r.iter().all(|&x| x)) {
            return true;
        }
        power = (0..n)
            .map(|i| (0..n).map(|j| (0..n).any(|k| power[i][k] && pattern[k][j])).collect())
            .collect();
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LanguageSource {
    Substitution(Substitution),
    /// Subshift of finite type given by forbidden words.
    Sft { forbidden: Vec<Word> },
    FullShift,
}

/// Answers legality queries for a subshift language, caching the legal
/// words of every length it has computed.
pub struct LanguageOracle {
    alphabet: Alphabet,
    source: LanguageSource,
    cache: RwLock<BTreeMap<usize, Arc<Vec<Word>>>>,
    cache_dir: Option<PathBuf>,
    warnings: Vec<String>,
}

impl fmt::Debug for LanguageOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LanguageOracle").field("alphabet", &self.alphabet).field("source", &self.source).finish()
    }
}

impl LanguageOracle {
    pub fn substitution(sub: Substitution) -> Self {
        let warnings = if sub.is_primitive() {
            Vec::new()
        } else {
            vec!["substitution is not primitive; using the extendable part of its factor language".into()]
        };
        Self::build(sub.alphabet.clone(), LanguageSource::Substitution(sub), warnings)
    }

    pub fn sft(alphabet: Alphabet, forbidden: Vec<Word>) -> Result<Self> {
        if forbidden.iter().any(Vec::is_empty) {
            return Err(Error::Input("forbidden words must be nonempty".into()));
        }
        Ok(Self::build(alphabet, LanguageSource::Sft { forbidden }, Vec::new()))
    }

    pub fn full_shift(alphabet: Alphabet) -> Self {
        Self::build(alphabet, LanguageSource::FullShift, Vec::new())
    }

    fn build(alphabet: Alphabet, source: LanguageSource, warnings: Vec<String>) -> Self {
        LanguageOracle { alphabet, source, cache: RwLock::default(), cache_dir: None, warnings }
    }

    /// Persists computed word lists as text files under `dir`.
    pub fn with_cache_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.cache_dir = Some(dir.into());
        self
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn source(&self) -> &LanguageSource {
        &self.source
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Stable identifier of the language description.
    pub fn fingerprint(&self) -> String {
        let desc = match &self.source {
            LanguageSource::Substitution(s) => {
                let rules: Vec<String> = s.rules.iter().map(|r| self.alphabet.format_word(r)).collect();
                format!("sub:{}", rules.join(","))
            }
            LanguageSource::Sft { forbidden } => {
                let words: Vec<String> = forbidden.iter().map(|r| self.alphabet.format_word(r)).collect();
                format!("sft:{}", words.join(","))
            }
            LanguageSource::FullShift => "full".to_string(),
        };
        let symbols: String = self.alphabet.symbols.iter().collect();
        format!("{:016x}", fnv1a(format!("{symbols}|{desc}").as_bytes()))
    }

    /// Legal words of length `len`, sorted.
    pub fn legal_words(&self, len: usize) -> Result<Arc<Vec<Word>>> {
        if let Some(words) = self.cache.read().unwrap_or_else(|p| p.into_inner()).get(&len) {
            return Ok(words.clone());
        }
        let words = match self.load(len) {
            Some(words) => words,
            None => {
                let words = self.compute(len)?;
                self.store(len, &words);
                words
            }
        };
        let words = Arc::new(words);
        let mut cache = self.cache.write().unwrap_or_else(|p| p.into_inner());
        Ok(cache.entry(len).or_insert(words).clone())
    }

    pub fn is_legal(&self, word: &[u8]) -> Result<bool> {
        Ok(self.legal_words(word.len())?.binary_search(&word.to_vec()).is_ok())
    }

    fn compute(&self, len: usize) -> Result<Vec<Word>> {
        let words = match &self.source {
            LanguageSource::FullShift => self.alphabet.all_words(len),
            LanguageSource::Sft { forbidden } => sft_words(&self.alphabet, forbidden, len),
            LanguageSource::Substitution(sub) => {
                if sub.is_primitive() {
                    substitution_factors(sub, len).remove(&len).unwrap_or_default().into_iter().collect()
                } else {
                    let factors = substitution_factors(sub, len + 1);
                    let nodes = factors.get(&len).cloned().unwrap_or_default();
                    let edges = factors.get(&(len + 1)).cloned().unwrap_or_default();
                    prune_to_extendable(nodes, &edges)
                }
            }
        };
        if words.is_empty() {
            return Err(Error::EmptyLanguage(format!("no legal words of length {len}")));
        }
        Ok(words)
    }

    fn cache_file(&self, len: usize) -> Option<PathBuf> {
        self.cache_dir.as_ref().map(|d| d.join(format!("{}-{len}.words", self.fingerprint())))
    }

    fn load(&self, len: usize) -> Option<Vec<Word>> {
        let text = fs::read_to_string(self.cache_file(len)?).ok()?;
        let mut words = text
            .lines()
            .map(|l| self.alphabet.parse_word(l.trim()))
            .collect::<Result<Vec<_>>>()
            .ok()?;
        if words.iter().any(|w| w.len() != len) || words.is_empty() {
            return None;
        }
        words.sort();
        Some(words)
    }

    fn store(&self, len: usize, words: &[Word]) {
        let Some(path) = self.cache_file(len) else { return };
        let body: String = words.iter().map(|w| self.alphabet.format_word(w) + "\n").collect();
        if let Some(parent) = path.parent() {
            let _ = fs::create_dir_all(parent);
        }
        // The disk cache is an accelerator only; failures fall back to recomputation.
        let _ = fs::write(path, body);
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3))
}

/// Factors of length `1..=max_len` of the iterated images of the letters.
///
/// A factor of `σ^{n}(a)` of length at most `L` is a factor of `σ(y)` for a
/// factor `y` of `σ^{n-1}(a)` no longer than itself, so closing the letters
/// under "take short factors of the image" reaches every such factor.
fn substitution_factors(sub: &Substitution, max_len: usize) -> BTreeMap<usize, BTreeSet<Word>> {
    let mut seen: HashSet<Word> = HashSet::new();
    let mut stack: Vec<Word> = Vec::new();
    for s in 0..sub.alphabet.len() as u8 {
        if seen.insert(vec![s]) {
            stack.push(vec![s]);
        }
    }
    while let Some(w) = stack.pop() {
        let image = sub.apply(&w);
        for len in 1..=max_len.min(image.len()) {
            for f in image.windows(len) {
                if !seen.contains(f) {
                    seen.insert(f.to_vec());
                    stack.push(f.to_vec());
                }
            }
        }
    }
    let mut by_len: BTreeMap<usize, BTreeSet<Word>> = BTreeMap::new();
    by_len.entry(0).or_default().insert(Vec::new());
    for w in seen {
        by_len.entry(w.len()).or_default().insert(w);
    }
    by_len
}

/// Keeps the words that sit on a bi-infinite path of the graph whose
/// vertices are `nodes` and whose edges `w` join `w[..L]` to `w[1..]`.
fn prune_to_extendable(nodes: BTreeSet<Word>, edges: &BTreeSet<Word>) -> Vec<Word> {
    if nodes.len() == 1 && nodes.contains(&Vec::new()) {
        return if edges.is_empty() { Vec::new() } else { vec![Vec::new()] };
    }
    let mut alive = nodes;
    loop {
        let mut has_out = HashSet::new();
        let mut has_in = HashSet::new();
        for e in edges {
            let (head, tail) = (&e[..e.len() - 1], &e[1..]);
            if alive.contains(head) && alive.contains(tail) {
                has_out.insert(head.to_vec());
                has_in.insert(tail.to_vec());
            }
        }
        let before = alive.len();
        alive.retain(|w| has_out.contains(w) && has_in.contains(w));
        if alive.len() == before {
            return alive.into_iter().collect();
        }
    }
}

fn avoids(word: &[u8], forbidden: &[Word]) -> bool {
    forbidden.iter().all(|f| f.len() > word.len() || !word.windows(f.len()).any(|w| w == f.as_slice()))
}

/// Legal words of a subshift of finite type: paths in the pruned transfer
/// graph on blocks of length `m = max(1, longest forbidden word - 1)`.
fn sft_words(alphabet: &Alphabet, forbidden: &[Word], len: usize) -> Vec<Word> {
    let m = forbidden.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1).max(1);
    let blocks: BTreeSet<Word> = alphabet.all_words(m).into_iter().filter(|w| avoids(w, forbidden)).collect();
    let edges: BTreeSet<Word> = alphabet.all_words(m + 1).into_iter().filter(|w| avoids(w, forbidden)).collect();
    let alive: BTreeSet<Word> = prune_to_extendable(blocks, &edges).into_iter().collect();
    let edges: BTreeSet<Word> = edges
        .into_iter()
        .filter(|e| alive.contains(&e[..m]) && alive.contains(&e[1..]))
        .collect();
    if edges.is_empty() {
        return Vec::new();
    }
    if len <= m + 1 {
        let mut out: BTreeSet<Word> = BTreeSet::new();
        for e in &edges {
            for f in e.windows(len.max(1)) {
                out.insert(if len == 0 { Vec::new() } else { f.to_vec() });
            }
        }
        return out.into_iter().collect();
    }
    let mut words: Vec<Word> = edges.iter().cloned().collect();
    while words[0].len() < len {
        words = words
            .into_iter()
            .flat_map(|w| {
                let edges = &edges;
                (0..alphabet.len() as u8).filter_map(move |s| {
                    let mut next = w.clone();
                    next.push(s);
                    edges.contains(&next[next.len() - m - 1..]).then_some(next)
                })
            })
            .collect();
    }
    words.sort();
    words
}
