//! Projective systems of branched graphs.
//!
//! Levels are indexed `0, 1, 2, ...`; bond `k` maps level `k + 1` onto level
//! `k`. Levels may be given explicitly, generated from one self-map
//! (stationary systems), or produced on demand by a [`LevelSupplier`]; in the
//! last case they are materialized lazily into a shared cache.

use std::fmt;
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};

use crate::branched_graph::{compose, same_graph, star, BranchedGraph, CellularMap, SmoothGerm, Star};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, HalfEdge, VertexId};
use crate::rational::{format_rational, Rational};

/// Produces the levels and bonds of a system on demand.
pub trait LevelSupplier: Send + Sync {
    fn level(&self, k: usize) -> Result<BranchedGraph>;

    /// Bond from level `k + 1` (`upper`) onto level `k` (`lower`).
    fn bond(&self, k: usize, upper: &Arc<BranchedGraph>, lower: &Arc<BranchedGraph>) -> Result<CellularMap>;

    /// Largest level index, if the supplier is finite.
    fn depth_limit(&self) -> Option<usize> {
        None
    }
}

enum Source {
    Stationary(Arc<CellularMap>),
    Explicit,
    Supplied(Arc<dyn LevelSupplier>),
}

#[derive(Default)]
struct Materialized {
    levels: Vec<Arc<BranchedGraph>>,
    bonds: Vec<Arc<CellularMap>>,
}

pub struct InverseSystem {
    source: Source,
    cache: RwLock<Materialized>,
}

impl fmt::Debug for InverseSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InverseSystem")
            .field("stationary", &self.is_stationary())
            .field("depth_limit", &self.depth_limit())
            .field("materialized_depth", &self.materialized_depth())
            .finish()
    }
}

impl InverseSystem {
    /// The system `S ← S ← S ← ...` with every bond equal to `map`.
    pub fn stationary(map: CellularMap) -> Result<Self> {
        if !same_graph(map.domain(), map.codomain()) {
            return Err(Error::InvalidMap("a stationary bond must map a graph to itself".into()));
        }
        map.check_surjective().map_err(|detail| Error::NotSurjective { level: 0, detail })?;
        Ok(InverseSystem { source: Source::Stationary(Arc::new(map)), cache: RwLock::default() })
    }

    /// A finite system; `bonds[k]` maps `levels[k + 1]` onto `levels[k]`.
    pub fn explicit(levels: Vec<Arc<BranchedGraph>>, bonds: Vec<CellularMap>) -> Result<Self> {
        if levels.is_empty() || bonds.len() + 1 != levels.len() {
            return Err(Error::Input(format!("{} levels need {} bonds", levels.len(), levels.len().max(1) - 1)));
        }
        let mut arcs = Vec::with_capacity(bonds.len());
        for (k, bond) in bonds.into_iter().enumerate() {
            if !same_graph(bond.domain(), &levels[k + 1]) || !same_graph(bond.codomain(), &levels[k]) {
                return Err(Error::NotComposable(format!("bond {k} does not map level {} to level {k}", k + 1)));
            }
            bond.check_surjective().map_err(|detail| Error::NotSurjective { level: k, detail })?;
            arcs.push(Arc::new(bond));
        }
        Ok(InverseSystem {
            source: Source::Explicit,
            cache: RwLock::new(Materialized { levels, bonds: arcs }),
        })
    }

    pub fn from_supplier(supplier: Arc<dyn LevelSupplier>) -> Self {
        InverseSystem { source: Source::Supplied(supplier), cache: RwLock::default() }
    }

    pub fn is_stationary(&self) -> bool {
        matches!(self.source, Source::Stationary(_))
    }

    pub fn stationary_map(&self) -> Option<&Arc<CellularMap>> {
        match &self.source {
            Source::Stationary(m) => Some(m),
            _ => None,
        }
    }

    /// Largest available level index; `None` for unbounded systems.
    pub fn depth_limit(&self) -> Option<usize> {
        match &self.source {
            Source::Stationary(_) => None,
            Source::Explicit => Some(self.read().levels.len() - 1),
            Source::Supplied(s) => s.depth_limit(),
        }
    }

    /// Highest level realized so far.
    pub fn materialized_depth(&self) -> usize {
        match &self.source {
            Source::Stationary(_) => usize::MAX,
            _ => self.read().levels.len().saturating_sub(1),
        }
    }

    fn read(&self) -> std::sync::RwLockReadGuard<'_, Materialized> {
        self.cache.read().unwrap_or_else(|p| p.into_inner())
    }

    fn check_depth(&self, k: usize) -> Result<()> {
        match self.depth_limit() {
            Some(limit) if k > limit => Err(Error::DepthOutOfRange { requested: k, available: limit }),
            _ => Ok(()),
        }
    }

    /// Materializes levels `0..=k` and the bonds between them.
    fn ensure(&self, k: usize) -> Result<()> {
        let Source::Supplied(supplier) = &self.source else { return Ok(()) };
        if self.read().levels.len() > k {
            return Ok(());
        }
        let mut cache = self.cache.write().unwrap_or_else(|p| p.into_inner());
        while cache.levels.len() <= k {
            let next = cache.levels.len();
            let graph = Arc::new(supplier.level(next)?);
            if next > 0 {
                let lower = cache.levels[next - 1].clone();
                let bond = supplier.bond(next - 1, &graph, &lower)?;
                if !same_graph(bond.domain(), &graph) || !same_graph(bond.codomain(), &lower) {
                    return Err(Error::NotComposable(format!("supplied bond {} has the wrong ends", next - 1)));
                }
                bond.check_surjective().map_err(|detail| Error::NotSurjective { level: next - 1, detail })?;
                cache.bonds.push(Arc::new(bond));
            }
            cache.levels.push(graph);
        }
        Ok(())
    }

    pub fn level(&self, k: usize) -> Result<Arc<BranchedGraph>> {
        if let Source::Stationary(m) = &self.source {
            return Ok(m.domain().clone());
        }
        self.check_depth(k)?;
        self.ensure(k)?;
        Ok(self.read().levels[k].clone())
    }

    /// Bond from level `k + 1` onto level `k`.
    pub fn bond(&self, k: usize) -> Result<Arc<CellularMap>> {
        if let Source::Stationary(m) = &self.source {
            return Ok(m.clone());
        }
        self.check_depth(k + 1)?;
        self.ensure(k + 1)?;
        Ok(self.read().bonds[k].clone())
    }

    /// The composite `f_{upper,lower}` from level `upper` to level `lower`.
    pub fn composite(&self, upper: usize, lower: usize) -> Result<CellularMap> {
        if upper < lower {
            return Err(Error::NonMonotoneIndices);
        }
        let mut map = CellularMap::identity(self.level(lower)?);
        for k in lower..upper {
            map = compose(&map, &*self.bond(k)?)?;
        }
        Ok(map)
    }
}

/// Keeps the levels `indices[0] < indices[1] < ...` and composes the bonds
/// between them.
pub fn telescope(sys: &InverseSystem, indices: &[usize]) -> Result<InverseSystem> {
    if indices.is_empty() || indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NonMonotoneIndices);
    }
    let levels = indices.iter().map(|&a| sys.level(a)).collect::<Result<Vec<_>>>()?;
    let bonds = indices.windows(2).map(|w| sys.composite(w[1], w[0])).collect::<Result<Vec<_>>>()?;
    InverseSystem::explicit(levels, bonds)
}

/// A cell of one level: a vertex, or a point inside an edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cell {
    Vertex(VertexId),
    /// `position` lies strictly between 0 (source end) and 1 (target end).
    EdgePoint { edge: EdgeId, position: Rational },
}

impl Cell {
    pub fn edge_point(edge: EdgeId, position: Rational) -> Result<Self> {
        if position <= Rational::zero() || position >= Rational::one() {
            return Err(Error::Input(format!("edge position {} is not in (0,1)", format_rational(&position))));
        }
        Ok(Cell::EdgePoint { edge, position })
    }
}

/// Image of a cell. An edge path of length `m` is parametrized affinely:
/// position `t` lands in segment `⌈mt⌉` at the fractional remainder, or on
/// the vertex between segments when `mt` is an integer.
pub fn map_cell(f: &CellularMap, cell: &Cell) -> Cell {
    match cell {
        Cell::Vertex(v) => Cell::Vertex(f.vertex_image(*v)),
        Cell::EdgePoint { edge, position } => {
            let path = f.edge_image(*edge);
            let scaled = position * Rational::from_integer(path.len().into());
            if scaled.is_integer() {
                let j: usize = scaled.to_integer().try_into().expect("segment index fits in usize");
                let step = path[j - 1];
                Cell::Vertex(f.codomain().graph().step_end(step))
            } else {
                let j = scaled.ceil();
                let local = &scaled - (&j - Rational::one());
                let j: usize = j.to_integer().try_into().expect("segment index fits in usize");
                let step = path[j - 1];
                let position = if step.forward { local } else { Rational::one() - local };
                Cell::EdgePoint { edge: step.edge, position }
            }
        }
    }
}

/// A finite coherent tuple of cells, one per level `0..=depth`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Thread {
    cells: Vec<Cell>,
}

impl Thread {
    pub fn new(cells: Vec<Cell>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::Input("a thread needs at least one cell".into()));
        }
        Ok(Thread { cells })
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, k: usize) -> &Cell {
        &self.cells[k]
    }

    pub fn depth(&self) -> usize {
        self.cells.len() - 1
    }

    /// Verifies that every bond maps the next cell onto the current one.
    pub fn check_coherent(&self, sys: &InverseSystem) -> Result<()> {
        for k in 0..self.depth() {
            let bond = sys.bond(k)?;
            check_cell(bond.domain(), &self.cells[k + 1])?;
            if map_cell(&bond, &self.cells[k + 1]) != self.cells[k] {
                return Err(Error::IncoherentThread { level: k });
            }
        }
        Ok(())
    }

    /// The canonical image under telescoping: keep the cells at `indices`.
    pub fn restrict(&self, indices: &[usize]) -> Result<Thread> {
        let cells = indices
            .iter()
            .map(|&i| {
                self.cells
                    .get(i)
                    .cloned()
                    .ok_or(Error::DepthOutOfRange { requested: i, available: self.depth() })
            })
            .collect::<Result<Vec<_>>>()?;
        Thread::new(cells)
    }

    /// Lifts `base` through the first preimage at every level.
    pub fn lift_first(sys: &InverseSystem, base: Cell, depth: usize) -> Result<Thread> {
        check_cell(&*sys.level(0)?, &base)?;
        let mut cells = vec![base];
        for k in 0..depth {
            let bond = sys.bond(k)?;
            let lifted = first_preimage(&bond, &cells[k]).ok_or_else(|| Error::NotSurjective {
                level: k,
                detail: "cell has no preimage".into(),
            })?;
            cells.push(lifted);
        }
        Thread::new(cells)
    }
}

fn check_cell(owner: &BranchedGraph, cell: &Cell) -> Result<()> {
    let g = owner.graph();
    match cell {
        Cell::Vertex(v) if v.0 < g.vertex_count() => Ok(()),
        Cell::Vertex(v) => Err(Error::UnknownVertex(format!("#{}", v.0))),
        Cell::EdgePoint { edge, .. } if edge.0 < g.edge_count() => Ok(()),
        Cell::EdgePoint { edge, .. } => Err(Error::UnknownEdge(format!("#{}", edge.0))),
    }
}

fn first_preimage(bond: &CellularMap, cell: &Cell) -> Option<Cell> {
    let domain = bond.domain().graph();
    match cell {
        Cell::Vertex(v) => domain.vertices().find(|&u| bond.vertex_image(u) == *v).map(Cell::Vertex),
        Cell::EdgePoint { edge, position } => {
            for e in domain.edges() {
                let path = bond.edge_image(e);
                if let Some(j) = path.iter().position(|s| s.edge == *edge) {
                    let local = if path[j].forward { position.clone() } else { Rational::one() - position };
                    let t = (Rational::from_integer(j.into()) + local) / Rational::from_integer(path.len().into());
                    return Some(Cell::EdgePoint { edge: e, position: t });
                }
            }
            None
        }
    }
}

/// Vertices of level `k + 1` over each vertex of level `k`.
fn vertex_preimages(bond: &CellularMap) -> Vec<Vec<VertexId>> {
    let mut pre = vec![Vec::new(); bond.codomain().graph().vertex_count()];
    for u in bond.domain().graph().vertices() {
        pre[bond.vertex_image(u).0].push(u);
    }
    pre
}

/// All coherent vertex threads of depth `depth` over `base`.
pub fn enumerate_threads(sys: &InverseSystem, depth: usize, base: VertexId) -> Result<Vec<Thread>> {
    let level0 = sys.level(0)?;
    if base.0 >= level0.graph().vertex_count() {
        return Err(Error::UnknownVertex(format!("#{}", base.0)));
    }
    let mut partial: Vec<Vec<VertexId>> = vec![vec![base]];
    for k in 0..depth {
        let pre = vertex_preimages(&*sys.bond(k)?);
        partial = partial
            .into_iter()
            .flat_map(|t| {
                let last = *t.last().expect("threads are nonempty");
                pre[last.0].iter().map(move |&u| {
                    let mut t = t.clone();
                    t.push(u);
                    t
                })
            })
            .collect();
    }
    Ok(partial
        .into_iter()
        .map(|t| Thread { cells: t.into_iter().map(Cell::Vertex).collect() })
        .collect())
}

/// An invariant pair of distinct smooth germs at a fixed vertex of a
/// stationary bond. Every iterate of the bond maps the pair onto itself, so
/// no telescoping can flatten the vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaminationWitness {
    pub vertex: VertexId,
    pub germs: [SmoothGerm; 2],
    pub images: [SmoothGerm; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlatteningVerdict {
    /// Telescoping indices whose bonds all flatten.
    Flattening { indices: Vec<usize> },
    /// No flattening telescoping found inside the window.
    NotFlatteningUpTo { window: usize },
    NotLamination { witness: LaminationWitness },
}

/// Searches for the stationary-system obstruction.
pub fn not_lamination_certificate(sys: &InverseSystem) -> Result<Option<LaminationWitness>> {
    let map = sys.stationary_map().ok_or(Error::NotStationary)?;
    let graph = map.domain();
    for v in graph.graph().vertices().filter(|&v| map.vertex_image(v) == v) {
        let germs = graph.germs_at(v);
        if germs.len() < 2 {
            continue;
        }
        let images = germs.iter().map(|g| map.germ_image(g)).collect::<Result<Vec<_>>>()?;
        let unique_preimage = |i: usize| images.iter().filter(|&img| *img == images[i]).count() == 1;
        for i in 0..germs.len() {
            for j in i + 1..germs.len() {
                let invariant = (images[i] == germs[i] && images[j] == germs[j])
                    || (images[i] == germs[j] && images[j] == germs[i]);
                if invariant && unique_preimage(i) && unique_preimage(j) {
                    return Ok(Some(LaminationWitness {
                        vertex: v,
                        germs: [germs[i], germs[j]],
                        images: [images[i], images[j]],
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Bounded search for a flattening telescoping over levels `0..=window`.
///
/// From each chosen level the least later level whose composite flattens is
/// taken. The search succeeds when at least one bond is found and the part
/// of the window left over is shorter than the longest step used.
pub fn is_flattening_system(sys: &InverseSystem, window: usize) -> Result<FlatteningVerdict> {
    if window == 0 {
        return Err(Error::Input("the flattening window must be at least 1".into()));
    }
    let top = sys.depth_limit().map_or(window, |d| d.min(window));
    if top == 0 {
        let g = sys.level(0)?;
        return Ok(if g.branch_points().is_empty() {
            FlatteningVerdict::Flattening { indices: vec![0] }
        } else {
            FlatteningVerdict::NotFlatteningUpTo { window: 0 }
        });
    }
    let mut indices = vec![0];
    let mut longest_step = 0;
    'chain: loop {
        let start = *indices.last().expect("chain starts at 0");
        let mut composite = CellularMap::identity(sys.level(start)?);
        for k in start + 1..=top {
            composite = compose(&composite, &*sys.bond(k - 1)?)?;
            if composite.is_flattening().is_flattening() {
                indices.push(k);
                longest_step = longest_step.max(k - start);
                continue 'chain;
            }
        }
        break;
    }
    let last = *indices.last().expect("chain starts at 0");
    if indices.len() >= 2 && top - last < longest_step {
        return Ok(FlatteningVerdict::Flattening { indices });
    }
    if sys.is_stationary() {
        if let Some(witness) = not_lamination_certificate(sys)? {
            return Ok(FlatteningVerdict::NotLamination { witness });
        }
    }
    Ok(FlatteningVerdict::NotFlatteningUpTo { window: top })
}

/// The neighborhood at level `k0` whose preimages are examined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Disk {
    Star(Star),
    Edge(EdgeId),
}

/// One piece of the preimage of a disk.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoxComponent {
    /// Star of a vertex over the disk's vertex.
    Vertex(VertexId),
    /// An edge whose image path passes through the disk's vertex between
    /// segments `index - 1` and `index` (0-based).
    Crossing { edge: EdgeId, index: usize },
    /// Segment `index` (0-based) of an edge's image path running over the
    /// disk's edge.
    Segment { edge: EdgeId, index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalBox {
    pub level: usize,
    pub disk: Disk,
    /// `fibers[i]` lists the components at level `level + 1 + i`.
    pub fibers: Vec<Vec<BoxComponent>>,
}

impl LocalBox {
    pub fn component_counts(&self) -> Vec<usize> {
        self.fibers.iter().map(Vec::len).collect()
    }
}

/// Decomposes the preimages of the disk around `thread`'s cell at level
/// `k0` into pieces each mapped bijectively onto the disk.
pub fn local_box(sys: &InverseSystem, thread: &Thread, k0: usize) -> Result<LocalBox> {
    if k0 > thread.depth() {
        return Err(Error::DepthOutOfRange { requested: k0, available: thread.depth() });
    }
    thread.check_coherent(sys)?;
    let base = sys.level(k0)?;
    let disk = match thread.cell(k0) {
        Cell::Vertex(v) => Disk::Star(star(&base, *v)?),
        Cell::EdgePoint { edge, .. } => Disk::Edge(*edge),
    };
    let mut fibers = Vec::new();
    for k in k0 + 1..=thread.depth() {
        let f = sys.composite(k, k0)?;
        let components = match &disk {
            Disk::Edge(target) => edge_components(&f, *target),
            Disk::Star(s) => star_components(&f, s).map_err(|detail| Error::NotLocallyTrivial { level: k, detail })?,
        };
        fibers.push(components);
    }
    Ok(LocalBox { level: k0, disk, fibers })
}

fn edge_components(f: &CellularMap, target: EdgeId) -> Vec<BoxComponent> {
    let mut out = Vec::new();
    for e in f.domain().graph().edges() {
        for (index, s) in f.edge_image(e).iter().enumerate() {
            if s.edge == target {
                out.push(BoxComponent::Segment { edge: e, index });
            }
        }
    }
    out
}

fn star_components(f: &CellularMap, s: &Star) -> std::result::Result<Vec<BoxComponent>, String> {
    let domain = f.domain().graph();
    let codomain = f.codomain().graph();
    let matches_star = |mut hs: Vec<HalfEdge>| {
        hs.sort();
        hs == s.half_edges
    };
    let mut out = Vec::new();
    for u in domain.vertices().filter(|&u| f.vertex_image(u) == s.vertex) {
        let images = domain.half_edges_at(u).into_iter().map(|h| f.image_half_edge(h)).collect();
        if !matches_star(images) {
            return Err(format!("star of vertex `{}` does not map bijectively onto the disk", domain.vertex_name(u)));
        }
        out.push(BoxComponent::Vertex(u));
    }
    for e in domain.edges() {
        let path = f.edge_image(e);
        for index in 1..path.len() {
            if codomain.step_end(path[index - 1]) == s.vertex {
                let pair = vec![path[index - 1].terminal_half_edge(), path[index].initial_half_edge()];
                if !matches_star(pair) {
                    return Err(format!(
                        "interior of edge `{}` crosses the disk's vertex without covering its star",
                        domain.edge_name(e)
                    ));
                }
                out.push(BoxComponent::Crossing { edge: e, index });
            }
        }
    }
    Ok(out)
}
