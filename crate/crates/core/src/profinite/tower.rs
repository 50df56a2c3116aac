//! Towers of regular coverings and the profinite group on their transversal.
//!
//! Level `j` of a tower (`j = 0, 1, ...`) is a connected graph; bond `j`
//! covers level `j` by level `j + 1`. A basepoint thread `x_j` is fixed.
//! The deck group of the composite covering `level j → level 0` acts freely
//! and transitively on the fiber over `x_0`, so its elements are stored as
//! the fiber points `g(x_j)`. The first level contributes only the identity.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{free_reduce, Graph, Step, VertexId};
use crate::profinite::covering::{compose_coverings, GraphCovering};
use crate::profinite::deck::{deck_group_at, DeckGroup};
use crate::rational::{format_rational, inverse_power_of_two, Rational};

/// Largest composite degree for which regularity is checked by enumerating
/// deck transformations. Bases with abelian fundamental group skip the check.
pub const REGULARITY_CHECK_LIMIT: usize = 4096;

static NEXT_TOWER_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug)]
pub struct CoveringTower {
    id: u64,
    bonds: Vec<GraphCovering>,
    to_base: Vec<GraphCovering>,
    basepoints: Vec<VertexId>,
    /// Per level: the step entering each vertex in a search tree rooted at
    /// the basepoint.
    trees: Vec<Vec<Option<Step>>>,
}

/// A coherent tuple of deck elements, one per level.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProfiniteElement {
    tower: u64,
    components: Vec<VertexId>,
}

impl ProfiniteElement {
    pub fn depth(&self) -> usize {
        self.components.len()
    }

    /// Component `j` as the fiber point `g(x_j)`.
    pub fn component(&self, j: usize) -> VertexId {
        self.components[j]
    }

    pub fn components(&self) -> &[VertexId] {
        &self.components
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransverseMetricValue {
    pub partial_sum: Rational,
    pub depth: usize,
    pub error_bound: Rational,
}

impl Serialize for TransverseMetricValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("TransverseMetricValue", 3)?;
        st.serialize_field("partial_sum", &format_rational(&self.partial_sum))?;
        st.serialize_field("depth", &self.depth)?;
        st.serialize_field("error_bound", &format_rational(&self.error_bound))?;
        st.end()
    }
}

/// A point of the suspension: a reduced base path from `x_0` (optionally
/// ending partway along one more step) and a transversal element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafPoint {
    pub path: Vec<Step>,
    pub tail: Option<(Step, Rational)>,
    pub fiber: ProfiniteElement,
}

/// The homomorphism from the deck group of level `level` to that of
/// `level - 1`, with the checks that were run on it.
#[derive(Clone, Debug, Serialize)]
pub struct QuotientHom {
    pub level: usize,
    /// Entry `i` is the image of fiber point `i` (both as fiber indices).
    pub images: Vec<usize>,
    pub source_order: usize,
    pub target_order: usize,
    pub kernel_order: usize,
    /// Pairs `(g, h)` on which `φ(gh) = φ(g)φ(h)` was checked.
    pub pairs_checked: usize,
}

impl CoveringTower {
    /// Builds a tower from consecutive coverings, `bonds[j]` covering the
    /// total graph of `bonds[j - 1]`.
    pub fn from_coverings(bonds: Vec<GraphCovering>) -> Result<Self> {
        let first = bonds.first().ok_or_else(|| Error::Input("a tower needs at least one covering".into()))?;
        let base = first.base().clone();
        Self::build(base, bonds, None)
    }

    /// A single-level tower.
    pub fn trivial(base: Arc<Graph>) -> Result<Self> {
        Self::build(base, Vec::new(), None)
    }

    /// Cycle graphs of sizes `1, d_0, d_0 d_1, ...` with `depth` levels;
    /// the degree list repeats as needed.
    pub fn circle(degrees: &[usize], depth: usize) -> Result<Self> {
        if degrees.is_empty() || degrees.contains(&0) || depth == 0 {
            return Err(Error::Input("circle towers need positive degrees and depth".into()));
        }
        let mut levels = vec![Arc::new(Graph::cycle(1))];
        let mut bonds = Vec::new();
        for j in 0..depth - 1 {
            let lower = levels[j].clone();
            let n = lower.vertex_count();
            let m = n * degrees[j % degrees.len()];
            let upper = Arc::new(Graph::cycle(m));
            bonds.push(GraphCovering::new(
                upper.clone(),
                lower,
                (0..m).map(|i| VertexId(i % n)).collect(),
                (0..m).map(|i| crate::graph::EdgeId(i % n)).collect(),
                false,
            )?);
            levels.push(upper);
        }
        Self::build(levels.swap_remove(0), bonds, None)
    }

    fn build(base: Arc<Graph>, bonds: Vec<GraphCovering>, basepoints: Option<Vec<VertexId>>) -> Result<Self> {
        let mut to_base = vec![GraphCovering::identity(base.clone())];
        for (j, b) in bonds.iter().enumerate() {
            let below = &to_base[j];
            let composite = compose_coverings(below, b)
                .map_err(|e| Error::InvalidCovering(format!("bond {j}: {e}")))?;
            to_base.push(composite);
        }
        let basepoints = match basepoints {
            Some(points) => {
                if points.len() != to_base.len() {
                    return Err(Error::Input(format!("{} basepoints for {} levels", points.len(), to_base.len())));
                }
                for (j, b) in bonds.iter().enumerate() {
                    if points[j + 1].0 >= b.total().vertex_count() || b.vertex_image(points[j + 1]) != points[j] {
                        return Err(Error::IncoherentThread { level: j + 1 });
                    }
                }
                points
            }
            None => {
                let mut points = vec![VertexId(0)];
                for b in &bonds {
                    let below = *points.last().unwrap();
                    points.push(b.fiber(below)[0]);
                }
                points
            }
        };
        let trees = to_base.iter().zip(&basepoints).map(|(c, &x)| search_tree(c.total(), x)).collect();
        let tower = CoveringTower { id: NEXT_TOWER_ID.fetch_add(1, Ordering::Relaxed), bonds, to_base, basepoints, trees };
        tower.check_regular()?;
        Ok(tower)
    }

    fn check_regular(&self) -> Result<()> {
        // Every connected cover of a graph with free abelian (rank <= 1)
        // fundamental group is regular.
        if self.base().cycle_rank() <= 1 {
            return Ok(());
        }
        for (j, c) in self.to_base.iter().enumerate() {
            if c.degree() > REGULARITY_CHECK_LIMIT {
                return Err(Error::Input(format!(
                    "level {j} has degree {} over the base; regularity is only checked up to {REGULARITY_CHECK_LIMIT}",
                    c.degree()
                )));
            }
            let report = deck_group_at(c, self.basepoints[j]).regularity();
            if !report.regular {
                return Err(Error::NotRegular { order: report.order, degree: report.degree });
            }
        }
        Ok(())
    }

    /// The same tower with another basepoint thread.
    pub fn with_basepoints(&self, basepoints: Vec<VertexId>) -> Result<Self> {
        Self::build(self.base().clone(), self.bonds.clone(), Some(basepoints))
    }

    /// Keeps levels `indices[0] < indices[1] < ...`.
    pub fn telescope(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() || indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NonMonotoneIndices);
        }
        if *indices.last().unwrap() >= self.depth() {
            return Err(Error::DepthOutOfRange { requested: *indices.last().unwrap(), available: self.depth() - 1 });
        }
        let bonds = indices.windows(2).map(|w| self.composite(w[1], w[0])).collect::<Result<Vec<_>>>()?;
        let base = self.to_base[indices[0]].total().clone();
        let basepoints = indices.iter().map(|&a| self.basepoints[a]).collect();
        Self::build(base, bonds, Some(basepoints))
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    /// Number of levels.
    pub fn depth(&self) -> usize {
        self.to_base.len()
    }

    pub fn base(&self) -> &Arc<Graph> {
        self.to_base[0].base()
    }

    pub fn level(&self, j: usize) -> &Arc<Graph> {
        self.to_base[j].total()
    }

    pub fn bond(&self, j: usize) -> &GraphCovering {
        &self.bonds[j]
    }

    pub fn basepoints(&self) -> &[VertexId] {
        &self.basepoints
    }

    /// Composite covering from level `upper` onto level `lower`.
    pub fn composite(&self, upper: usize, lower: usize) -> Result<GraphCovering> {
        if upper < lower {
            return Err(Error::NonMonotoneIndices);
        }
        if upper >= self.depth() {
            return Err(Error::DepthOutOfRange { requested: upper, available: self.depth() - 1 });
        }
        let mut c = GraphCovering::identity(self.level(lower).clone());
        for j in lower..upper {
            c = compose_coverings(&c, &self.bonds[j])?;
        }
        Ok(c)
    }

    /// Order of the deck group of level `j` over the base.
    pub fn order(&self, j: usize) -> usize {
        self.to_base[j].degree()
    }

    /// The fiber over `x_0` at level `j`, which indexes that deck group.
    pub fn fiber(&self, j: usize) -> &[VertexId] {
        self.to_base[j].fiber(self.basepoints[0])
    }

    /// Full deck group of level `j` over the base, as permutations.
    pub fn deck_group(&self, j: usize) -> Result<DeckGroup> {
        if j >= self.depth() {
            return Err(Error::DepthOutOfRange { requested: j, available: self.depth() - 1 });
        }
        Ok(deck_group_at(&self.to_base[j], self.basepoints[j]))
    }

    fn tree_path(&self, j: usize, v: VertexId) -> Vec<Step> {
        let g = self.level(j);
        let mut path = Vec::new();
        let mut at = v;
        while let Some(s) = self.trees[j][at.0] {
            path.push(s);
            at = g.step_start(s);
        }
        path.reverse();
        path
    }

    /// `g(v)` for the deck transformation `g` of level `j` with `g(x_j) = p`.
    pub fn deck_apply(&self, j: usize, p: VertexId, v: VertexId) -> VertexId {
        let c = &self.to_base[j];
        let path = c.project(&self.tree_path(j, v));
        c.lift_endpoint(p, &path).expect("lifts exist in coverings")
    }

    fn check(&self, x: &ProfiniteElement) -> Result<()> {
        if x.tower != self.id || x.depth() > self.depth() {
            return Err(Error::ElementMismatch);
        }
        Ok(())
    }

    fn check_pair(&self, x: &ProfiniteElement, y: &ProfiniteElement) -> Result<()> {
        self.check(x)?;
        self.check(y)?;
        if x.depth() != y.depth() {
            return Err(Error::ElementMismatch);
        }
        Ok(())
    }

    pub fn identity(&self, depth: usize) -> Result<ProfiniteElement> {
        self.check_depth(depth)?;
        Ok(ProfiniteElement { tower: self.id, components: self.basepoints[..depth].to_vec() })
    }

    fn check_depth(&self, depth: usize) -> Result<()> {
        if depth == 0 || depth > self.depth() {
            return Err(Error::DepthOutOfRange { requested: depth, available: self.depth() });
        }
        Ok(())
    }

    /// Builds an element from fiber points, checking coherence.
    pub fn element(&self, components: Vec<VertexId>) -> Result<ProfiniteElement> {
        self.check_depth(components.len())?;
        for (j, &c) in components.iter().enumerate() {
            if c.0 >= self.level(j).vertex_count() || self.to_base[j].vertex_image(c) != self.basepoints[0] {
                return Err(Error::Input(format!("component {j} is not in the fiber over the basepoint")));
            }
            if j > 0 && self.bonds[j - 1].vertex_image(c) != components[j - 1] {
                return Err(Error::IncoherentThread { level: j });
            }
        }
        Ok(ProfiniteElement { tower: self.id, components })
    }

    /// The unique coherent element of depth `depth` whose top component is `top`.
    pub fn element_from_top(&self, depth: usize, top: VertexId) -> Result<ProfiniteElement> {
        self.check_depth(depth)?;
        let mut components = vec![top];
        for j in (1..depth).rev() {
            let below = self.bonds[j - 1].vertex_image(*components.last().unwrap());
            components.push(below);
        }
        components.reverse();
        self.element(components)
    }

    pub fn mul(&self, x: &ProfiniteElement, y: &ProfiniteElement) -> Result<ProfiniteElement> {
        self.check_pair(x, y)?;
        let components = (0..x.depth()).map(|j| self.deck_apply(j, x.components[j], y.components[j])).collect();
        Ok(ProfiniteElement { tower: self.id, components })
    }

    pub fn inv(&self, x: &ProfiniteElement) -> Result<ProfiniteElement> {
        self.check(x)?;
        let components = (0..x.depth())
            .map(|j| {
                // Lifting the reversed projection of a path x_j → g(x_j)
                // from x_j ends at g⁻¹(x_j).
                let c = &self.to_base[j];
                let back = crate::graph::reverse_path(&c.project(&self.tree_path(j, x.components[j])));
                c.lift_endpoint(self.basepoints[j], &back).expect("lifts exist in coverings")
            })
            .collect();
        Ok(ProfiniteElement { tower: self.id, components })
    }

    /// `x^n`, by repeated squaring.
    pub fn pow(&self, x: &ProfiniteElement, n: i64) -> Result<ProfiniteElement> {
        let mut base = if n < 0 { self.inv(x)? } else { x.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = self.identity(x.depth())?;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            base = self.mul(&base, &base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn truncate(&self, x: &ProfiniteElement, depth: usize) -> Result<ProfiniteElement> {
        self.check(x)?;
        if depth == 0 || depth > x.depth() {
            return Err(Error::DepthOutOfRange { requested: depth, available: x.depth() });
        }
        Ok(ProfiniteElement { tower: self.id, components: x.components[..depth].to_vec() })
    }

    /// `Σ 2^{-(j+1)} δ(x_j, y_j)` over levels `1 <= j < K`, with the bound
    /// `2^{-K}` on the omitted tail.
    pub fn metric(&self, x: &ProfiniteElement, y: &ProfiniteElement) -> Result<TransverseMetricValue> {
        self.check_pair(x, y)?;
        let depth = x.depth();
        if depth < 2 {
            return Err(Error::DepthTooSmall(depth));
        }
        let mut partial_sum = Rational::zero();
        for j in 1..depth {
            if x.components[j] != y.components[j] {
                partial_sum += inverse_power_of_two(j + 1);
            }
        }
        Ok(TransverseMetricValue { partial_sum, depth, error_bound: inverse_power_of_two(depth) })
    }

    /// Image of a base loop at `x_0`: at each level, the deck element sending
    /// `x_j` to the endpoint of the lifted loop.
    pub fn rep(&self, base_loop: &[Step], depth: usize) -> Result<ProfiniteElement> {
        self.check_depth(depth)?;
        let x0 = self.basepoints[0];
        if !base_loop.is_empty() {
            let (s, t) = self.base().path_endpoints(base_loop)?;
            if s != x0 || t != x0 {
                return Err(Error::NotClosed);
            }
        }
        let components = (0..depth)
            .map(|j| self.to_base[j].lift_endpoint(self.basepoints[j], base_loop))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProfiniteElement { tower: self.id, components })
    }

    /// Action of a base loop `h` on the suspension: the loop is prepended to
    /// the leaf coordinate and its image multiplies the fiber on the left.
    pub fn suspension_act(&self, h: &[Step], point: &LeafPoint) -> Result<LeafPoint> {
        self.check(&point.fiber)?;
        let g = self.rep(h, point.fiber.depth())?;
        let mut path = h.to_vec();
        path.extend_from_slice(&point.path);
        Ok(LeafPoint { path: free_reduce(&path), tail: point.tail.clone(), fiber: self.mul(&g, &point.fiber)? })
    }

    /// The map `Δ_j → Δ_{j-1}` induced by the bond, checked to be a
    /// surjective homomorphism whose kernel has the bond's degree.
    pub fn quotient_hom(&self, j: usize) -> Result<QuotientHom> {
        if j == 0 || j >= self.depth() {
            return Err(Error::DepthOutOfRange { requested: j, available: self.depth() - 1 });
        }
        let upper = self.fiber(j);
        let lower = self.fiber(j - 1);
        let index = |fiber: &[VertexId], v: VertexId| fiber.binary_search(&v).expect("image stays in the fiber");
        let images: Vec<usize> = upper.iter().map(|&p| index(lower, self.bonds[j - 1].vertex_image(p))).collect();
        let mut hit = vec![false; lower.len()];
        for &i in &images {
            hit[i] = true;
        }
        if hit.contains(&false) {
            return Err(Error::Input(format!("quotient map at level {j} is not onto")));
        }
        let identity_index = index(lower, self.basepoints[j - 1]);
        let kernel_order = images.iter().filter(|&&i| i == identity_index).count();
        if kernel_order * lower.len() != upper.len() || kernel_order != self.bonds[j - 1].degree() {
            return Err(Error::NotRegular { order: kernel_order, degree: self.bonds[j - 1].degree() });
        }
        // Check the homomorphism law on all pairs, or on all pairs with a
        // bounded set of left factors for large groups.
        let left = upper.len().min(64);
        let mut pairs_checked = 0;
        for &g in &upper[..left] {
            for &h in upper {
                let gh = self.deck_apply(j, g, h);
                let lhs = images[index(upper, gh)];
                let rhs = index(lower, self.deck_apply(j - 1, lower[images[index(upper, g)]], lower[images[index(upper, h)]]));
                if lhs != rhs {
                    return Err(Error::Input(format!("quotient map at level {j} is not a homomorphism")));
                }
                pairs_checked += 1;
            }
        }
        Ok(QuotientHom {
            level: j,
            images,
            source_order: upper.len(),
            target_order: lower.len(),
            kernel_order,
            pairs_checked,
        })
    }
}

fn search_tree(g: &Graph, root: VertexId) -> Vec<Option<Step>> {
    g.spanning_tree(root).into_iter().map(|p| p.flatten()).collect()
}
