//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line.

use std::collections::{BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use laminate_core::branched_graph::{BranchedGraph, CellularMap};
use laminate_core::fixtures::{circle_power_map, cycle_solenoid, figure_eight_power_map};
use laminate_core::gahler::{
    bonding_map, build_approximant, pattern_clopen, quotient_cell, window, Alphabet, LanguageOracle, Substitution,
    Word,
};
use laminate_core::inverse_system::{
    enumerate_threads, is_flattening_system, local_box, telescope, Cell, FlatteningVerdict, InverseSystem, Thread,
};
use laminate_core::{
    glue_classes, BranchTree, ClopenSet, CoveringTower, Cylinder, EdgeId, Graph, HalfSpace, ProfiniteElement,
    Rational, Sector, Step, VertexId,
};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("figure-eight system is not a lamination", criterion_1),
        ("circle doubling system is a solenoid", criterion_2),
        ("telescoping preserves threads", criterion_3),
        ("approximant towers match the language", criterion_4),
        ("pattern clopens nest and form a boolean algebra", criterion_5),
        ("profinite arithmetic matches modular arithmetic", criterion_6),
        ("transverse metric is invariant with bounded truncation error", criterion_7),
        ("representation is faithful at depth", criterion_8),
        ("glue classes match brute-force closure", criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let label = format!("criterion {}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str()) || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS {label}: {name} ({secs:.2}s)"),
            Err(why) => {
                failed += 1;
                println!("FAIL {label}: {name} ({secs:.2}s): {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

// ---- 1 ----

fn criterion_1() -> Outcome {
    let sys = InverseSystem::stationary(figure_eight_power_map(2)).map_err(err)?;
    let map = sys.stationary_map().unwrap().clone();
    let k = map.domain().clone();
    for n in 1..=10 {
        match is_flattening_system(&sys, n).map_err(err)? {
            FlatteningVerdict::NotLamination { witness } => {
                ensure!(witness.vertex == VertexId(0), "window {n}: witness away from the wedge vertex");
                ensure!(witness.germs[0] != witness.germs[1], "window {n}: witness germs coincide");
                let germs = k.germs_at(witness.vertex);
                for (g, img) in witness.germs.iter().zip(&witness.images) {
                    ensure!(germs.contains(g), "window {n}: {g:?} is not a germ at the wedge");
                    // The pair is invariant, so every iterate keeps it apart.
                    ensure!(map.germ_image(g).map_err(err)? == *img, "window {n}: image mismatch");
                }
                let mut imgs = witness.images.to_vec();
                imgs.sort();
                let mut gs = witness.germs.to_vec();
                gs.sort();
                ensure!(imgs == gs, "window {n}: germ pair is not invariant");
            }
            other => return Err(format!("window {n}: {other:?}")),
        }
    }
    Ok(())
}

// ---- 2 ----

fn criterion_2() -> Outcome {
    const K: usize = 10;
    let sys = InverseSystem::stationary(circle_power_map(2)).map_err(err)?;
    for n in 1..=K {
        let v = is_flattening_system(&sys, n).map_err(err)?;
        ensure!(v == FlatteningVerdict::Flattening { indices: (0..=n).collect() }, "window {n}: {v:?}");
    }
    let expected: Vec<usize> = (1..=K).map(|k| 1 << k).collect();
    // Threads of the same solenoid presented as a tower of cycle covers.
    let cycles = cycle_solenoid(&[2; K]);
    let thread_counts: Vec<usize> = (1..=K)
        .map(|k| enumerate_threads(&cycles, k, VertexId(0)).map(|t| t.len()))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    ensure!(thread_counts == expected, "thread counts {thread_counts:?}");
    let half = Rational::new(1.into(), 2.into());
    for base in [Cell::Vertex(VertexId(0)), Cell::edge_point(EdgeId(0), half).map_err(err)?] {
        for s in [&sys, &cycles] {
            let t = Thread::lift_first(s, base.clone(), K).map_err(err)?;
            let counts = local_box(s, &t, 0).map_err(err)?.component_counts();
            ensure!(counts == thread_counts, "local box over {base:?}: {counts:?}");
        }
    }
    Ok(())
}

// ---- 3 ----

/// A random directed graph with at most `max_v` vertices and `max_e` edges.
fn random_graph(rng: &mut StdRng, max_v: usize, max_e: usize) -> Graph {
    let nv = rng.gen_range(1..=max_v);
    let ne = rng.gen_range(1..=max_e);
    let ends = (0..ne).map(|_| (VertexId(rng.gen_range(0..nv)), VertexId(rng.gen_range(0..nv)))).collect();
    Graph::from_ends(nv, ends)
}

/// A random onto cellular map from a new graph to `lower`. Each lower edge
/// is covered by one upper edge whose image starts with it and may continue
/// one step further.
fn random_lift(rng: &mut StdRng, lower: &Arc<BranchedGraph>, max_v: usize) -> CellularMap {
    let g = lower.graph();
    let n = g.vertex_count();
    let extra = rng.gen_range(0..=max_v - n);
    let mut vertex_map: Vec<VertexId> = g.vertices().collect();
    vertex_map.extend((0..extra).map(|_| VertexId(rng.gen_range(0..n))));
    let fiber = |v: VertexId| -> Vec<usize> { (0..vertex_map.len()).filter(|&u| vertex_map[u] == v).collect() };
    let mut ends = Vec::new();
    let mut paths = Vec::new();
    for e in g.edges() {
        let mut path = vec![Step::forward(e)];
        let outs = g.out_edges(g.dst(e));
        if !outs.is_empty() && rng.gen_bool(0.5) {
            path.push(Step::forward(outs[rng.gen_range(0..outs.len())]));
        }
        let end = g.step_end(*path.last().unwrap());
        let (from, to) = (fiber(g.src(e)), fiber(end));
        ends.push((VertexId(from[rng.gen_range(0..from.len())]), VertexId(to[rng.gen_range(0..to.len())])));
        paths.push(path);
    }
    let upper = Arc::new(BranchedGraph::directed(Graph::from_ends(vertex_map.len(), ends)));
    CellularMap::new(upper, lower.clone(), vertex_map, paths).expect("forward lifts are cellular")
}

fn random_system(rng: &mut StdRng, depth: usize) -> InverseSystem {
    let mut levels = vec![Arc::new(BranchedGraph::directed(random_graph(rng, 4, 6)))];
    let mut bonds = Vec::new();
    for _ in 0..depth {
        let f = random_lift(rng, levels.last().unwrap(), 4);
        levels.push(f.domain().clone());
        bonds.push(f);
    }
    InverseSystem::explicit(levels, bonds).expect("random lifts are onto")
}

fn vertex_sequence(t: &Thread) -> Vec<usize> {
    t.cells()
        .iter()
        .map(|c| match c {
            Cell::Vertex(v) => v.0,
            other => panic!("vertex thread holds {other:?}"),
        })
        .collect()
}

fn criterion_3() -> Outcome {
    const DEPTH: usize = 5;
    let mut rng = StdRng::seed_from_u64(3);
    let mut compared = 0;
    for trial in 0..50 {
        let sys = random_system(&mut rng, DEPTH);
        let mut indices: Vec<usize> = (0..=DEPTH).filter(|_| rng.gen_bool(0.6)).collect();
        if indices.is_empty() {
            indices.push(rng.gen_range(0..=DEPTH));
        }
        let tele = telescope(&sys, &indices).map_err(err)?;
        let bottom = sys.level(0).map_err(err)?.graph().vertex_count();
        let tele_bottom = tele.level(0).map_err(err)?.graph().vertex_count();
        for d in 0..indices.len() {
            let mut from_tele = BTreeSet::new();
            for v in 0..tele_bottom {
                for t in enumerate_threads(&tele, d, VertexId(v)).map_err(err)? {
                    t.check_coherent(&tele).map_err(err)?;
                    from_tele.insert(vertex_sequence(&t));
                }
            }
            // Restrict full threads of the original system to the kept levels.
            let mut from_full = BTreeSet::new();
            for v in 0..bottom {
                for t in enumerate_threads(&sys, indices[d], VertexId(v)).map_err(err)? {
                    from_full.insert(vertex_sequence(&t.restrict(&indices[..=d]).map_err(err)?));
                }
            }
            compared += from_tele.len();
            ensure!(
                from_tele == from_full,
                "trial {trial}, indices {indices:?}, depth {d}: {} vs {} threads",
                from_tele.len(),
                from_full.len()
            );
        }
        if indices == (0..=DEPTH).collect::<Vec<_>>() {
            for v in 0..bottom {
                let a = enumerate_threads(&sys, DEPTH, VertexId(v)).map_err(err)?.len();
                let b = enumerate_threads(&tele, DEPTH, VertexId(v)).map_err(err)?.len();
                ensure!(a == b, "trial {trial}: trivial telescoping changed thread count");
            }
        }
    }
    ensure!(compared > 100, "only {compared} threads compared");
    Ok(())
}

// ---- 4 ----

/// Symbol indices of `σ^n(0)` for a substitution given as index rules.
fn iterate(rules: &[&[u8]], min_len: usize) -> Word {
    let mut w = vec![0u8];
    while w.len() < min_len {
        w = w.iter().flat_map(|&s| rules[s as usize].iter().copied()).collect();
    }
    w
}

/// All factors of length `n`.
fn factors(w: &[u8], n: usize) -> BTreeSet<Word> {
    if n == 0 {
        return BTreeSet::from([Vec::new()]);
    }
    w.windows(n).map(<[u8]>::to_vec).collect()
}

fn all_words(n: usize) -> BTreeSet<Word> {
    (0..1usize << n).map(|m| (0..n).map(|i| ((m >> i) & 1) as u8).collect()).collect()
}

struct LanguageCase {
    name: &'static str,
    oracle: Arc<LanguageOracle>,
    /// Independent description of the language: a long legal word, or
    /// `None` for the full shift.
    sample: Option<Word>,
}

impl LanguageCase {
    fn words(&self, n: usize) -> BTreeSet<Word> {
        match &self.sample {
            Some(w) => factors(w, n),
            None => all_words(n),
        }
    }

    fn random_word(&self, rng: &mut StdRng, n: usize) -> Word {
        match &self.sample {
            Some(w) => {
                let i = rng.gen_range(0..=w.len() - n);
                w[i..i + n].to_vec()
            }
            None => (0..n).map(|_| rng.gen_range(0..2u8)).collect(),
        }
    }
}

fn language_cases() -> Vec<LanguageCase> {
    let ab = ["a", "b"];
    let fib = Substitution::parse(&ab, &[("a", "ab"), ("b", "a")]).unwrap();
    let tm = Substitution::parse(&ab, &[("a", "ab"), ("b", "ba")]).unwrap();
    vec![
        LanguageCase {
            name: "fibonacci",
            oracle: Arc::new(LanguageOracle::substitution(fib)),
            sample: Some(iterate(&[&[0, 1], &[0]], 1 << 15)),
        },
        LanguageCase {
            name: "thue-morse",
            oracle: Arc::new(LanguageOracle::substitution(tm)),
            sample: Some(iterate(&[&[0, 1], &[1, 0]], 1 << 15)),
        },
        LanguageCase {
            name: "full 2-shift",
            oracle: Arc::new(LanguageOracle::full_shift(Alphabet::new(&["0", "1"]).unwrap())),
            sample: None,
        },
    ]
}

fn criterion_4() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    for case in language_cases() {
        let name = case.name;
        let complexes = (0..=4).map(|k| build_approximant(&case.oracle, k)).collect::<Result<Vec<_>, _>>().map_err(err)?;
        for (k, c) in complexes.iter().enumerate() {
            let (verts, edges) = (case.words(2 * k), case.words(2 * k + 1));
            let got_v: BTreeSet<Word> = c.vertex_words().iter().cloned().collect();
            let got_e: BTreeSet<Word> = c.edge_words().iter().cloned().collect();
            ensure!(got_v == verts, "{name} k={k}: vertex words differ");
            ensure!(got_e == edges, "{name} k={k}: edge words differ");
            let g = c.graph().graph();
            ensure!(g.vertex_count() == verts.len() && g.edge_count() == edges.len(), "{name} k={k}: cell counts");
            if case.sample.is_none() {
                ensure!(g.vertex_count() == 1 << (2 * k) && g.edge_count() == 1 << (2 * k + 1), "{name} k={k}");
            }
            for e in g.edges() {
                let w = &c.edge_words()[e.0];
                ensure!(c.vertex_words()[g.src(e).0] == w[..2 * k], "{name} k={k}: edge source");
                ensure!(c.vertex_words()[g.dst(e).0] == w[1..], "{name} k={k}: edge target");
            }
        }
        let bonds = (0..4).map(|k| bonding_map(&complexes[k + 1], &complexes[k])).collect::<Result<Vec<_>, _>>().map_err(err)?;
        for (k, b) in bonds.iter().enumerate() {
            ensure!(b.is_flattening().is_flattening(), "{name}: bond {k} is not flattening");
        }
        // Naturality: projecting a marked word to radius k + 1 and then
        // bonding down agrees with projecting straight to radius k.
        for _ in 0..100 {
            let w = case.random_word(&mut rng, 11);
            let cyl = Cylinder::new(w.clone(), 5).map_err(err)?;
            for k in 0..4 {
                let upper = quotient_cell(&complexes[k + 1], &cyl).map_err(err)?;
                let lower = quotient_cell(&complexes[k], &cyl).map_err(err)?;
                ensure!(bonds[k].edge_image(upper) == [Step::forward(lower)], "{name}: square fails at k={k}");
                ensure!(complexes[k].edge_words()[lower.0] == window(&w, 5, k).unwrap(), "{name}: wrong cell");
            }
        }
    }
    Ok(())
}

// ---- 5 ----

/// Membership of the transversal point read from `point` (centered at its
/// middle) in `set`, decided from the set's words.
fn contains(set: &ClopenSet, point: &[u8]) -> bool {
    let mid = point.len() / 2;
    let r = set.radius();
    set.words().contains(&point[mid - r..=mid + r])
}

fn random_clopen(rng: &mut StdRng, oracle: &Arc<LanguageOracle>) -> ClopenSet {
    let r = rng.gen_range(0..=2);
    let words = oracle.legal_words(2 * r + 1).unwrap();
    let keep = rng.gen_range(0.0..1.0);
    let cylinders: Vec<Cylinder> =
        words.iter().filter(|_| rng.gen_bool(keep)).map(|w| Cylinder::new(w.clone(), r).unwrap()).collect();
    ClopenSet::from_cylinders(oracle.clone(), &cylinders).unwrap()
}

fn criterion_5() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let cases = language_cases();
    for case in &cases {
        let name = case.name;
        for _ in 0..100 {
            let w = case.random_word(&mut rng, 13);
            let mut previous: Option<ClopenSet> = None;
            for k in 0..=6 {
                let cyl = Cylinder::new(window(&w, 6, k).map_err(err)?.to_vec(), k).map_err(err)?;
                let set = pattern_clopen(&case.oracle, &cyl).map_err(err)?;
                ensure!(contains(&set, &w), "{name}: point outside its own pattern at k={k}");
                if let Some(p) = &previous {
                    ensure!(set.is_subset(p).map_err(err)?, "{name}: radius {k} pattern not inside radius {}", k - 1);
                }
                previous = Some(set);
            }
        }
    }
    for case in &cases {
        let name = case.name;
        let o = &case.oracle;
        let x = ClopenSet::whole(o.clone()).map_err(err)?;
        let points: Vec<Word> = case.words(7).into_iter().collect();
        for _ in 0..200 {
            let (a, b, c) = (random_clopen(&mut rng, o), random_clopen(&mut rng, o), random_clopen(&mut rng, o));
            let u = |p: &ClopenSet, q: &ClopenSet| p.union(q).unwrap();
            let i = |p: &ClopenSet, q: &ClopenSet| p.intersect(q).unwrap();
            let d = |p: &ClopenSet, q: &ClopenSet| p.subtract(q).unwrap();
            let eq = |p: &ClopenSet, q: &ClopenSet| p.is_equal(q).unwrap();
            ensure!(eq(&u(&a, &b), &u(&b, &a)) && eq(&i(&a, &b), &i(&b, &a)), "{name}: commutativity");
            ensure!(eq(&u(&a, &u(&b, &c)), &u(&u(&a, &b), &c)), "{name}: union associativity");
            ensure!(eq(&i(&a, &i(&b, &c)), &i(&i(&a, &b), &c)), "{name}: intersection associativity");
            ensure!(eq(&i(&a, &u(&b, &c)), &u(&i(&a, &b), &i(&a, &c))), "{name}: distributivity");
            ensure!(eq(&u(&a, &i(&b, &c)), &i(&u(&a, &b), &u(&a, &c))), "{name}: distributivity");
            ensure!(eq(&u(&a, &i(&a, &b)), &a) && eq(&i(&a, &u(&a, &b)), &a), "{name}: absorption");
            ensure!(eq(&d(&x, &u(&a, &b)), &i(&d(&x, &a), &d(&x, &b))), "{name}: de Morgan");
            ensure!(eq(&d(&x, &i(&a, &b)), &u(&d(&x, &a), &d(&x, &b))), "{name}: de Morgan");
            ensure!(eq(&u(&a, &d(&x, &a)), &x) && i(&a, &d(&x, &a)).is_empty(), "{name}: complement");
            ensure!(a.is_subset(&b).unwrap() == eq(&i(&a, &b), &a), "{name}: subset vs intersection");
            let (ab_u, ab_i, ab_d) = (u(&a, &b), i(&a, &b), d(&a, &b));
            for p in &points {
                let (pa, pb) = (contains(&a, p), contains(&b, p));
                ensure!(contains(&ab_u, p) == (pa || pb), "{name}: union membership");
                ensure!(contains(&ab_i, p) == (pa && pb), "{name}: intersection membership");
                ensure!(contains(&ab_d, p) == (pa && !pb), "{name}: difference membership");
            }
        }
    }
    Ok(())
}

// ---- 6, 7, 8 ----

fn generator() -> Vec<Step> {
    vec![Step::forward(EdgeId(0))]
}

/// The element `n` of a circle tower, read off its top level.
fn integer_element(t: &CoveringTower, depth: usize, n: i64) -> ProfiniteElement {
    let m = t.order(depth - 1) as i64;
    t.element_from_top(depth, VertexId(n.rem_euclid(m) as usize)).unwrap()
}

/// Checks that every component of `x` is the residue of `n`.
fn is_residue(t: &CoveringTower, x: &ProfiniteElement, n: i64) -> bool {
    (0..x.depth()).all(|j| x.component(j).0 as i64 == n.rem_euclid(t.order(j) as i64))
}

fn criterion_6() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let cases = [("dyadic", CoveringTower::circle(&[2], 10)), ("mixed", CoveringTower::circle(&[2, 3, 2, 3], 10))];
    for (name, tower) in cases {
        let t = tower.map_err(err)?;
        let depth = t.depth();
        let orders: Vec<usize> = (0..depth).map(|j| t.order(j)).collect();
        let expected: Vec<usize> = if name == "dyadic" {
            (0..depth).map(|j| 1 << j).collect()
        } else {
            vec![1, 2, 6, 12, 36, 72, 216, 432, 1296, 2592]
        };
        ensure!(orders == expected, "{name}: orders {orders:?}");
        let g = t.rep(&generator(), depth).map_err(err)?;
        ensure!(is_residue(&t, &g, 1), "{name}: generator");
        for _ in 0..200 {
            let (a, b) = (rng.gen_range(-5000i64..5000), rng.gen_range(-5000i64..5000));
            let (x, y) = (integer_element(&t, depth, a), integer_element(&t, depth, b));
            ensure!(is_residue(&t, &x, a), "{name}: element {a} is not coherent residues");
            ensure!(is_residue(&t, &t.mul(&x, &y).map_err(err)?, a + b), "{name}: {a} * {b}");
            ensure!(is_residue(&t, &t.inv(&x).map_err(err)?, -a), "{name}: inverse of {a}");
            let e = rng.gen_range(-300i64..300);
            ensure!(is_residue(&t, &t.pow(&g, e).map_err(err)?, e), "{name}: generator^{e}");
            ensure!(is_residue(&t, &t.pow(&x, e).map_err(err)?, a * e), "{name}: {a}^{e}");
        }
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    const K: usize = 12;
    let mut rng = StdRng::seed_from_u64(7);
    let bound = Rational::new(1.into(), (1u64 << K).into());
    for (name, degrees) in [("dyadic", vec![2]), ("mixed", vec![2, 3])] {
        let t = CoveringTower::circle(&degrees, K + 4).map_err(err)?;
        let top = t.order(K + 3) as i64;
        for trial in 0..1000 {
            let [h, x, y] = [0; 3].map(|_| rng.gen_range(0..top));
            let deep = [h, x, y].map(|n| integer_element(&t, K + 4, n));
            let [hk, xk, yk] = deep.clone().map(|e| t.truncate(&e, K).unwrap());
            let d = t.metric(&xk, &yk).map_err(err)?;
            let left = t.metric(&t.mul(&hk, &xk).map_err(err)?, &t.mul(&hk, &yk).map_err(err)?).map_err(err)?;
            let right = t.metric(&t.mul(&xk, &hk).map_err(err)?, &t.mul(&yk, &hk).map_err(err)?).map_err(err)?;
            ensure!(left == d && right == d, "{name} trial {trial}: metric not invariant under {h}");
            ensure!(d.error_bound == bound, "{name}: error bound {:?}", d.error_bound);
            let fine = t.metric(&deep[1], &deep[2]).map_err(err)?;
            let gap = fine.partial_sum.clone() - d.partial_sum.clone();
            ensure!(gap >= Rational::zero() && gap <= bound, "{name} trial {trial}: truncation gap {gap}");
            // Oracle: the first level where the residues differ.
            let oracle = (1..K).filter(|&j| (x - y) % t.order(j) as i64 != 0).fold(Rational::zero(), |acc, j| {
                acc + Rational::new(1.into(), (1u64 << (j + 1)).into())
            });
            ensure!(d.partial_sum == oracle, "{name} trial {trial}: metric {} vs {}", d.partial_sum, oracle);
        }
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    const K: usize = 12;
    let t = CoveringTower::circle(&[2], K + 1).map_err(err)?;
    let g = t.rep(&generator(), K + 1).map_err(err)?;
    let mut x = t.identity(K + 1).map_err(err)?;
    let mut rng = StdRng::seed_from_u64(8);
    for n in 0..=(1i64 << K) {
        for k in 0..=K {
            // Level k carries the quotient of order 2^k.
            let trivial = x.component(k) == t.basepoints()[k];
            ensure!(trivial == (n % (1 << k) == 0), "generator^{n} at level {k}");
        }
        if rng.gen_bool(0.02) {
            ensure!(t.pow(&g, n).map_err(err)? == x, "pow disagrees with repeated product at {n}");
        }
        x = t.mul(&x, &g).map_err(err)?;
    }
    Ok(())
}

// ---- 9 ----

/// A rational point with common denominator `q` and the integer numerators.
struct Sample {
    numerators: Vec<i64>,
    point: Vec<Rational>,
}

fn random_point(rng: &mut StdRng, n: usize) -> Sample {
    loop {
        let q = rng.gen_range(1..=6i64);
        let numerators: Vec<i64> = (0..n).map(|_| rng.gen_range(-q..=q)).collect();
        if numerators.iter().map(|p| p * p).sum::<i64>() <= q * q {
            let point = numerators.iter().map(|&p| Rational::new(p.into(), q.into())).collect();
            return Sample { numerators, point };
        }
    }
}

/// Blocks of the equivalence generated by `related`, by Warshall closure.
fn closure_blocks(n: usize, related: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in related {
        r[a][b] = true;
        r[b][a] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    let mut seen = HashSet::new();
    let mut blocks = Vec::new();
    for (i, row) in r.iter().enumerate() {
        if seen.insert(i) {
            let block: Vec<usize> = (0..n).filter(|&j| row[j]).collect();
            seen.extend(block.iter().copied());
            blocks.push(block);
        }
    }
    blocks
}

fn criterion_9() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    for trial in 0..20 {
        let dim = rng.gen_range(1..=3);
        let nv = rng.gen_range(1..=5);
        let edges: Vec<(usize, usize)> = (1..nv)
            .map(|i| {
                let p = rng.gen_range(0..i);
                if rng.gen_bool(0.5) {
                    (p, i)
                } else {
                    (i, p)
                }
            })
            .collect();
        let mut normals: Vec<Vec<Vec<i64>>> = Vec::new();
        let mut sectors = Vec::new();
        for _ in 0..nv {
            let mut hs = Vec::new();
            while hs.len() < rng.gen_range(0..=2) {
                let a: Vec<i64> = (0..dim).map(|_| rng.gen_range(-2..=2)).collect();
                if a.iter().any(|&c| c != 0) {
                    hs.push(a);
                }
            }
            sectors.push(
                Sector::new(dim, hs.iter().map(|a| HalfSpace::from_integers(a)).collect::<Result<_, _>>().map_err(err)?)
                    .map_err(err)?,
            );
            normals.push(hs);
        }
        let names = (0..nv).map(|i| format!("v{i}")).collect();
        let tree = BranchTree::new(dim, names, edges.clone(), sectors).map_err(err)?;
        for _ in 0..500 {
            let s = random_point(&mut rng, dim);
            // Inside a sector means strictly positive against every normal.
            let inside = |v: usize| {
                normals[v].iter().all(|a| a.iter().zip(&s.numerators).map(|(x, y)| x * y).sum::<i64>() > 0)
            };
            let related: Vec<(usize, usize)> = edges.iter().copied().filter(|&(src, _)| !inside(src)).collect();
            let expected = closure_blocks(nv, &related);
            let got = glue_classes(&tree, &s.point).map_err(err)?;
            ensure!(got == expected, "trial {trial} at {:?}: {got:?} vs {expected:?}", s.numerators);
        }
    }
    Ok(())
}
