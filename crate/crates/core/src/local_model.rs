//! Local branched models in any dimension.
//!
//! A model is the quotient of `D^n × VT` where `VT` are the vertices of a
//! directed tree, each carrying an open polyhedral sector through the origin.
//! The pair `(x, v)` is identified with `(x, v')` whenever the tree has the
//! edge `v → v'` and `x` lies outside the sector of the source vertex `v`.
//! Everything here is exact: points are rational vectors and sector
//! membership is a sign test.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{dot, Rational};

/// The closed half-space `{x : <normal, x> >= 0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfSpace {
    normal: Vec<Rational>,
}

impl HalfSpace {
    pub fn new(normal: Vec<Rational>) -> Result<Self> {
        if normal.is_empty() {
            return Err(Error::Input("half-space normal must have length at least 1".into()));
        }
        if normal.iter().all(Zero::is_zero) {
            return Err(Error::Input("half-space normal must be nonzero".into()));
        }
        Ok(HalfSpace { normal })
    }

    pub fn from_integers(normal: &[i64]) -> Result<Self> {
        Self::new(normal.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn normal(&self) -> &[Rational] {
        &self.normal
    }

    pub fn dimension(&self) -> usize {
        self.normal.len()
    }
}

/// Interior of a finite intersection of half-spaces. The empty family is the
/// whole space; contradictory families give the empty sector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sector {
    dimension: usize,
    halfspaces: Vec<HalfSpace>,
}

impl Sector {
    pub fn new(dimension: usize, halfspaces: Vec<HalfSpace>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Input("sector dimension must be at least 1".into()));
        }
        for h in &halfspaces {
            if h.dimension() != dimension {
                return Err(Error::DimensionMismatch { expected: dimension, got: h.dimension() });
            }
        }
        Ok(Sector { dimension, halfspaces })
    }

    pub fn whole(dimension: usize) -> Self {
        Sector { dimension, halfspaces: Vec::new() }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    /// The same sector cut down by one more half-space.
    pub fn refined(&self, extra: HalfSpace) -> Result<Self> {
        let mut halfspaces = self.halfspaces.clone();
        halfspaces.push(extra);
        Sector::new(self.dimension, halfspaces)
    }
}

/// True iff `<a_i, point> > 0` for every half-space of the sector.
pub fn sector_contains(sector: &Sector, point: &[Rational]) -> Result<bool> {
    if point.len() != sector.dimension {
        return Err(Error::DimensionMismatch { expected: sector.dimension, got: point.len() });
    }
    Ok(sector.halfspaces.iter().all(|h| dot(&h.normal, point).is_positive()))
}

/// A finite directed tree whose vertices carry sectors of a common dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchTree {
    dimension: usize,
    names: Vec<String>,
    edges: Vec<(usize, usize)>,
    sectors: Vec<Sector>,
}

impl BranchTree {
    pub fn new(
        dimension: usize,
        names: Vec<String>,
        edges: Vec<(usize, usize)>,
        sectors: Vec<Sector>,
    ) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::Input("a branch tree needs at least one vertex".into()));
        }
        if sectors.len() != n {
            return Err(Error::Input(format!("{} sectors for {n} vertices", sectors.len())));
        }
        for s in &sectors {
            if s.dimension != dimension {
                return Err(Error::DimensionMismatch { expected: dimension, got: s.dimension });
            }
        }
        let mut seen = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if seen.insert(name.as_str(), i).is_some() {
                return Err(Error::Input(format!("duplicate tree vertex `{name}`")));
            }
        }
        if edges.len() + 1 != n {
            return Err(Error::Input(format!(
                "a tree on {n} vertices has {} edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        let mut forest = UnionFind::new(n);
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(Error::Input("tree edge endpoint out of range".into()));
            }
            if !forest.union(a, b) {
                return Err(Error::Input("tree edges contain a cycle".into()));
            }
        }
        Ok(BranchTree { dimension, names, edges, sectors })
    }

    /// Convenience constructor using vertex names for the edges.
    pub fn from_named(
        dimension: usize,
        vertices: &[&str],
        edges: &[(&str, &str)],
        sectors: Vec<Sector>,
    ) -> Result<Self> {
        let index = |name: &str| {
            vertices
                .iter()
                .position(|v| *v == name)
                .ok_or_else(|| Error::UnknownVertex(name.to_string()))
        };
        let edges = edges.iter().map(|&(a, b)| Ok((index(a)?, index(b)?))).collect::<Result<_>>()?;
        Self::new(dimension, vertices.iter().map(|s| s.to_string()).collect(), edges, sectors)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize> {
        self.names.iter().position(|n| n == name).ok_or_else(|| Error::UnknownVertex(name.into()))
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn sector(&self, v: usize) -> &Sector {
        &self.sectors[v]
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    /// Copy of the tree with one vertex's sector replaced.
    pub fn with_sector(&self, v: usize, sector: Sector) -> Result<Self> {
        let mut sectors = self.sectors.clone();
        *sectors.get_mut(v).ok_or_else(|| Error::UnknownVertex(v.to_string()))? = sector;
        Self::new(self.dimension, self.names.clone(), self.edges.clone(), sectors)
    }
}

/// A point `(x, v)` of `D^n × VT`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalModelPoint {
    coordinates: Vec<Rational>,
    vertex: usize,
}

impl LocalModelPoint {
    pub fn new(tree: &BranchTree, coordinates: Vec<Rational>, vertex: usize) -> Result<Self> {
        check_in_disk(tree.dimension, &coordinates)?;
        if vertex >= tree.vertex_count() {
            return Err(Error::UnknownVertex(vertex.to_string()));
        }
        Ok(LocalModelPoint { coordinates, vertex })
    }

    pub fn coordinates(&self) -> &[Rational] {
        &self.coordinates
    }

    pub fn vertex(&self) -> usize {
        self.vertex
    }
}

fn check_in_disk(dimension: usize, x: &[Rational]) -> Result<()> {
    if x.len() != dimension {
        return Err(Error::DimensionMismatch { expected: dimension, got: x.len() });
    }
    if dot(x, x) > Rational::one() {
        return Err(Error::Input("point lies outside the closed unit disk".into()));
    }
    Ok(())
}

/// Fibers of the quotient map over `x`: the partition of the tree vertices
/// into glued classes. Blocks are sorted, and sorted by least element.
pub fn glue_classes(tree: &BranchTree, x: &[Rational]) -> Result<Vec<Vec<usize>>> {
    check_in_disk(tree.dimension, x)?;
    let mut classes = UnionFind::new(tree.vertex_count());
    for &(source, target) in &tree.edges {
        if !sector_contains(&tree.sectors[source], x)? {
            classes.union(source, target);
        }
    }
    Ok(classes.blocks())
}

/// The first-coordinate projection `Π_T`.
pub fn projection(point: &LocalModelPoint) -> Vec<Rational> {
    point.coordinates.clone()
}

/// Number of glue classes over each sample point.
pub fn class_count_profile(tree: &BranchTree, samples: &[Vec<Rational>]) -> Result<Vec<usize>> {
    samples.iter().map(|x| glue_classes(tree, x).map(|p| p.len())).collect()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    /// Returns false when `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    fn blocks(mut self) -> Vec<Vec<usize>> {
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); self.parent.len()];
        for v in 0..self.parent.len() {
            let r = self.find(v);
            by_root[r].push(v);
        }
        by_root.into_iter().filter(|b| !b.is_empty()).collect()
    }
}
