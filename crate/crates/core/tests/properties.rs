use std::sync::Arc;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use laminate_core::branched_graph::{compose, BranchedGraph, CellularMap};
use laminate_core::gahler::{LanguageOracle, Substitution};
use laminate_core::profinite::{deck_group, GraphCovering};
use laminate_core::{glue_classes, BranchTree, ClopenSet, Cylinder, Graph, HalfSpace, Rational, Sector, Step, VertexId};

/// Random onto map from a fresh directed graph to `lower`, every image path
/// running forward.
fn random_lift(rng: &mut StdRng, lower: &Arc<BranchedGraph>) -> CellularMap {
    let g = lower.graph();
    let n = g.vertex_count();
    let mut vertex_map: Vec<VertexId> = g.vertices().collect();
    vertex_map.extend((0..rng.gen_range(0..=2)).map(|_| VertexId(rng.gen_range(0..n))));
    let fiber = |v: VertexId| -> Vec<usize> { (0..vertex_map.len()).filter(|&u| vertex_map[u] == v).collect() };
    let (mut ends, mut paths) = (Vec::new(), Vec::new());
    for e in g.edges() {
        let mut path = vec![Step::forward(e)];
        for _ in 0..rng.gen_range(0..3) {
            let outs = g.out_edges(g.step_end(*path.last().unwrap()));
            if outs.is_empty() {
                break;
            }
            path.push(Step::forward(outs[rng.gen_range(0..outs.len())]));
        }
        let (from, to) = (fiber(g.src(e)), fiber(g.step_end(*path.last().unwrap())));
        ends.push((VertexId(from[rng.gen_range(0..from.len())]), VertexId(to[rng.gen_range(0..to.len())])));
        paths.push(path);
    }
    let upper = Arc::new(BranchedGraph::directed(Graph::from_ends(vertex_map.len(), ends)));
    CellularMap::new(upper, lower.clone(), vertex_map, paths).unwrap()
}

/// Three composable maps `f: A → B`, `g: B → C`, `h: C → D`.
fn chain(seed: u64) -> (CellularMap, CellularMap, CellularMap) {
    let mut rng = StdRng::seed_from_u64(seed);
    let nv = rng.gen_range(1..=3);
    let ends = (0..rng.gen_range(1..=4)).map(|_| (VertexId(rng.gen_range(0..nv)), VertexId(rng.gen_range(0..nv))));
    let d = Arc::new(BranchedGraph::directed(Graph::from_ends(nv, ends.collect())));
    let h = random_lift(&mut rng, &d);
    let g = random_lift(&mut rng, h.domain());
    let f = random_lift(&mut rng, g.domain());
    (f, g, h)
}

fn fibonacci() -> Arc<LanguageOracle> {
    Arc::new(LanguageOracle::substitution(Substitution::parse(&["a", "b"], &[("a", "ab"), ("b", "a")]).unwrap()))
}

fn clopen(oracle: &Arc<LanguageOracle>, radius: usize, mask: u64) -> ClopenSet {
    let words = oracle.legal_words(2 * radius + 1).unwrap();
    let cylinders: Vec<Cylinder> = words
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> (i % 64) & 1 == 1)
        .map(|(_, w)| Cylinder::new(w.clone(), radius).unwrap())
        .collect();
    ClopenSet::from_cylinders(oracle.clone(), &cylinders).unwrap()
}

/// True when every block of `fine` lies inside a block of `coarse`.
fn refines(fine: &[Vec<usize>], coarse: &[Vec<usize>]) -> bool {
    fine.iter().all(|b| coarse.iter().any(|c| b.iter().all(|v| c.contains(v))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_associative(seed in any::<u64>()) {
        let (f, g, h) = chain(seed);
        let left = compose(&h, &compose(&g, &f).unwrap()).unwrap();
        let right = compose(&compose(&h, &g).unwrap(), &f).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn germ_images_commute_with_composition(seed in any::<u64>()) {
        let (f, g, _) = chain(seed);
        let gf = compose(&g, &f).unwrap();
        let dom = f.domain();
        for v in dom.graph().vertices() {
            for germ in dom.germs_at(v) {
                let stepwise = g.germ_image(&f.germ_image(&germ).unwrap()).unwrap();
                prop_assert_eq!(gf.germ_image(&germ).unwrap(), stepwise);
            }
        }
    }

    #[test]
    fn flattening_propagates_through_composites(seed in any::<u64>()) {
        let (f, g, _) = chain(seed);
        if g.is_flattening().is_flattening() {
            prop_assert!(compose(&g, &f).unwrap().is_flattening().is_flattening());
        }
    }

    #[test]
    fn shrinking_a_sector_coarsens_glue_classes(
        seed in any::<u64>(),
        coords in prop::collection::vec(-3i64..=3, 2),
        extra in prop::collection::vec(-2i64..=2, 2),
    ) {
        prop_assume!(extra.iter().any(|&c| c != 0));
        let mut rng = StdRng::seed_from_u64(seed);
        let n = rng.gen_range(2..=5);
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
        let sectors = (0..n).map(|_| Sector::whole(2)).collect();
        let tree = BranchTree::new(2, (0..n).map(|i| format!("v{i}")).collect(), edges, sectors).unwrap();
        let x: Vec<Rational> = coords.iter().map(|&c| Rational::new(c.into(), 5.into())).collect();
        let v = rng.gen_range(0..n);
        let smaller = tree.sector(v).refined(HalfSpace::from_integers(&extra).unwrap()).unwrap();
        let refined = tree.with_sector(v, smaller).unwrap();
        prop_assert!(refines(&glue_classes(&tree, &x).unwrap(), &glue_classes(&refined, &x).unwrap()));
    }

    #[test]
    fn clopen_sets_form_a_boolean_algebra(a in any::<u64>(), b in any::<u64>(), ra in 0usize..3, rb in 0usize..3) {
        let o = fibonacci();
        let (a, b) = (clopen(&o, ra, a), clopen(&o, rb, b));
        let whole = ClopenSet::whole(o.clone()).unwrap();
        let complement = |s: &ClopenSet| whole.subtract(s).unwrap();
        prop_assert!(complement(&a.union(&b).unwrap()).is_equal(&complement(&a).intersect(&complement(&b)).unwrap()).unwrap());
        prop_assert!(complement(&complement(&a)).is_equal(&a).unwrap());
        prop_assert!(a.intersect(&b).unwrap().is_subset(&a).unwrap());
        prop_assert!(a.is_subset(&a.union(&b).unwrap()).unwrap());
        prop_assert!(a.subtract(&b).unwrap().intersect(&b).unwrap().is_empty());
    }

    #[test]
    fn shifts_compose(mask in any::<u64>(), m in -3i64..=3, n in -3i64..=3) {
        let o = fibonacci();
        let s = clopen(&o, 1, mask);
        let (sm, _) = s.shift(m).unwrap();
        let (smn, _) = sm.shift(n).unwrap();
        let (direct, _) = s.shift(m + n).unwrap();
        prop_assert!(smn.is_equal(&direct).unwrap());
    }

    #[test]
    fn deck_groups_are_closed(perms in prop::collection::vec(Just((0..4).collect::<Vec<usize>>()).prop_shuffle(), 2)) {
        let base = Arc::new(Graph::rose(&["a", "b"]));
        let Ok(c) = GraphCovering::from_permutations(base, &perms, true) else {
            return Ok(());
        };
        let g = deck_group(&c);
        // The action on a fiber is free.
        prop_assert_eq!(4 % g.order(), 0);
        prop_assert_eq!(g.regularity().regular, g.order() == 4);
        for x in &g.elements {
            prop_assert!(g.elements.contains(&x.inverse()));
            for y in &g.elements {
                prop_assert!(g.elements.contains(&x.compose(y)));
            }
        }
    }
}
