//! Generators, independent oracles and property checks shared by the
//! integration targets.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use num_rational::BigRational;
use plumb_core::engine::{LowestIndex, RandomChoice};
use plumb_core::graph::is_negative_definite_by_elimination;
use plumb_core::lattice::{add_pd, conjugate, k_square, spinc_partition};
use plumb_core::{
    basic_vectors, canonical_code, census, d_invariants, h1_order, is_negative_definite,
    is_rational, lens_d_oracle, minimal_relation, path_weight, reduce, run_path, step_weight,
    verdicts, BigInt, CharVector, PlumbingForest, QFormContext,
};
use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Check = std::result::Result<(), TestCaseError>;

// ---------------------------------------------------------------- generators

/// `Π |m(v)|`, the number of box vectors.
pub fn box_size(f: &PlumbingForest) -> u64 {
    f.weights().iter().map(|m| m.unsigned_abs()).product()
}

/// Random forests: vertex `i > 0` hangs off a uniformly chosen earlier
/// vertex, unless `connected` is false and a one-in-ten cut drops the edge.
pub fn forests(
    max_n: usize,
    weights: std::ops::RangeInclusive<i64>,
    connected: bool,
) -> impl Strategy<Value = PlumbingForest> {
    (1..=max_n)
        .prop_flat_map(move |n| {
            (
                vec(any::<u32>(), n),
                vec(0u8..10, n),
                vec(weights.clone(), n),
            )
        })
        .prop_map(move |(picks, cut, weights)| {
            let edges: Vec<_> = (1..weights.len())
                .filter(|&i| connected || cut[i] != 0)
                .map(|i| (picks[i] as usize % i, i))
                .collect();
            PlumbingForest::from_weights(&weights, &edges).unwrap()
        })
}

/// Negative-definite forests with at most `max_box` box vectors.
pub fn negdef(
    max_n: usize,
    wmin: i64,
    connected: bool,
    max_box: u64,
) -> impl Strategy<Value = PlumbingForest> {
    forests(max_n, wmin..=-1, connected)
        .prop_filter("negative definite, small box", move |f| {
            box_size(f) <= max_box && is_negative_definite(f)
        })
}

/// Inverse of a blow-down: `kind` 0 adds an isolated -1 vertex, 1 a -1 leaf
/// at a vertex, 2 subdivides an edge by a -1 vertex.
pub fn blow_up(f: &PlumbingForest, kind: u8, pick: usize) -> PlumbingForest {
    let mut weights = f.weights().to_vec();
    let mut edges = f.edges().to_vec();
    let new = weights.len();
    match kind {
        2 if !edges.is_empty() => {
            let (a, b) = edges.remove(pick % edges.len());
            weights[a] -= 1;
            weights[b] -= 1;
            edges.push((a, new));
            edges.push((new, b));
        }
        1 | 2 if !weights.is_empty() => {
            let v = pick % weights.len();
            weights[v] -= 1;
            edges.push((v, new));
        }
        _ => {}
    }
    weights.push(-1);
    PlumbingForest::from_weights(&weights, &edges).unwrap()
}

/// Negative-definite forests followed by up to three blow-ups.
pub fn blown_up(max_box: u64) -> impl Strategy<Value = PlumbingForest> {
    (negdef(4, -4, false, 256), vec((0u8..3, any::<usize>()), 0..=3))
        .prop_map(|(f, moves)| moves.iter().fold(f, |g, &(k, p)| blow_up(&g, k, p)))
        .prop_filter("small box", move |f| box_size(f) <= max_box)
}

pub fn ctx(f: &PlumbingForest) -> QFormContext {
    QFormContext::negative_definite(f).unwrap()
}

// ------------------------------------------------------------------- oracles

/// Laufer's fundamental-cycle algorithm: starting from `Z = Σ E_v`, add any
/// `E_v` with `Z·E_v = 1`; some `Z·E_v >= 2` means non-rational.
pub fn laufer_rational(f: &PlumbingForest) -> bool {
    let n = f.len();
    let mut z = vec![1i64; n];
    loop {
        let pairing = |v: usize, z: &[i64]| {
            f.weight(v) * z[v] + f.neighbors(v).iter().map(|&u| z[u]).sum::<i64>()
        };
        let mut grew = false;
        for v in 0..n {
            match pairing(v, &z) {
                p if p >= 2 => return false,
                1 => {
                    z[v] += 1;
                    grew = true;
                    break;
                }
                _ => {}
            }
        }
        if !grew {
            return true;
        }
    }
}

/// `p/q = [a₁, …, a_k]⁻` for a chain with weights `-a_i`.
pub fn chain_fraction(weights: &[i64]) -> (i64, i64) {
    let (mut p, mut q) = (1i64, 0i64);
    for &m in weights.iter().rev() {
        (p, q) = (-m * p - q, p);
    }
    (p, q)
}

pub fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v
}

/// `{d(-Y, 𝔱)}` of a forest as a sorted multiset.
pub fn d_minus_multiset(f: &PlumbingForest) -> Vec<BigRational> {
    sorted(d_invariants(&ctx(f)).unwrap().into_iter().map(|d| d.d_minus).collect())
}

/// `{d(-L(p,q), i)}` as a sorted multiset.
pub fn lens_multiset(p: i64, q: i64) -> Vec<BigRational> {
    if p == 1 {
        return vec![lens_d_oracle(1, 0, 0).unwrap()];
    }
    sorted((0..p).map(|i| lens_d_oracle(p, q, i).unwrap()).collect())
}

/// Unlabeled trees on `n` vertices, counted by decoding every Prüfer
/// sequence and coding each tree from its centre(s).
pub fn prufer_tree_count(n: usize) -> usize {
    if n <= 2 {
        return usize::from(n > 0);
    }
    let total = n.pow(n as u32 - 2);
    let mut seen = HashSet::new();
    let mut seq = vec![0usize; n - 2];
    for mut idx in 0..total {
        for s in seq.iter_mut() {
            *s = idx % n;
            idx /= n;
        }
        seen.insert(center_code(&prufer_decode(&seq, n)));
    }
    seen.len()
}

fn prufer_decode(seq: &[usize], n: usize) -> Vec<Vec<usize>> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut adj = vec![Vec::new(); n];
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        adj[leaf].push(s);
        adj[s].push(leaf);
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    adj[rest[0]].push(rest[1]);
    adj[rest[1]].push(rest[0]);
    adj
}

/// Peel leaves to find the centre, then a sorted-parenthesis code.
fn center_code(adj: &[Vec<usize>]) -> String {
    fn code(adj: &[Vec<usize>], v: usize, from: usize) -> String {
        let mut kids: Vec<String> = adj[v]
            .iter()
            .filter(|&&c| c != from)
            .map(|&c| code(adj, c, v))
            .collect();
        kids.sort();
        format!("({})", kids.concat())
    }
    let n = adj.len();
    let mut deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
    let mut left = n;
    while left > 2 {
        left -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &u in &adj[v] {
                deg[u] -= 1;
                if deg[u] == 1 {
                    next.push(u);
                }
            }
        }
        layer = next;
    }
    layer
        .iter()
        .map(|&c| code(adj, c, usize::MAX))
        .min()
        .unwrap()
}

/// Every negative-definite forest with `1..=max_n` vertices and weights in
/// `[wmin, -1]`, one per isomorphism class.
pub fn small_negdef_forests(max_n: usize, wmin: i64) -> Vec<PlumbingForest> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for n in 1..=max_n {
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let span = (-wmin) as usize;
        for mask in 0u32..(1 << pairs.len()) {
            let edges: Vec<_> = (0..pairs.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| pairs[i])
                .collect();
            if edges.len() >= n {
                continue;
            }
            for mut w in 0..span.pow(n as u32) {
                let weights: Vec<i64> = (0..n)
                    .map(|_| {
                        let m = -1 - (w % span) as i64;
                        w /= span;
                        m
                    })
                    .collect();
                let Ok(f) = PlumbingForest::from_weights(&weights, &edges) else {
                    break; // cycle: no weighting helps
                };
                if is_negative_definite(&f) && seen.insert(canonical_code(&f)) {
                    out.push(f);
                }
            }
        }
    }
    out
}

#[derive(Debug, Default)]
pub struct RelationOracleReport {
    pub graphs: usize,
    pub pairs: usize,
    pub edges: u64,
    pub failures: Vec<String>,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
    }
}

/// Brute-force union-find over `U^a ⊗ K` with `a <= max_a` and `K` in the
/// box expanded by `expansion`. Checks that every relation edge preserves the
/// degree `8D·a - D·K² - D·|G|`, then compares the lowest merge level of
/// each (basic, box vector) pair in one class with [`minimal_relation`].
pub fn relation_oracle(f: &PlumbingForest, max_a: i64, expansion: u32) -> RelationOracleReport {
    let c = ctx(f);
    let n = f.len();
    let weights = f.weights();
    let b = 2 * expansion as i64;
    let lo: Vec<i64> = weights.iter().map(|m| m + 2 - b).collect();
    let side: Vec<usize> = weights.iter().map(|m| (-m + b - (m + 2 - b)) as usize / 2 + 1).collect();
    let points: usize = side.iter().product();
    let levels = (max_a + 1) as usize;
    let decode = |mut i: usize| -> Vec<i64> {
        (0..n)
            .map(|v| {
                let x = lo[v] + 2 * (i % side[v]) as i64;
                i /= side[v];
                x
            })
            .collect()
    };
    let encode = |k: &[i64]| -> Option<usize> {
        let mut i = 0;
        for v in (0..n).rev() {
            let t = (k[v] - lo[v]) / 2;
            if t < 0 || t >= side[v] as i64 {
                return None;
            }
            i = i * side[v] + t as usize;
        }
        Some(i)
    };
    let d = c.abs_det();
    let degree = |a: i64, k: &[i64]| 8 * d * a as i128 - c.scaled_k_square(k) - d * n as i128;

    let mut report = RelationOracleReport { graphs: 1, ..Default::default() };
    let mut dsu = Dsu((0..points * levels).collect());
    for i in 0..points {
        let k = decode(i);
        for v in 0..n {
            let kv = CharVector::from_pairings_unchecked(k.clone());
            let next = add_pd(&kv, v, &c);
            let Some(j) = encode(next.pairings()) else { continue };
            let step = step_weight(&kv, v, &c);
            for a in 0..=max_a {
                let a2 = a + step;
                if !(0..=max_a).contains(&a2) {
                    continue;
                }
                report.edges += 1;
                if degree(a, &k) != degree(a2, next.pairings()) {
                    report.failures.push(format!("{f}: degree jumps across {k:?} -> {next}"));
                }
                dsu.union(a as usize * points + i, a2 as usize * points + j);
            }
        }
    }

    let basic = basic_vectors(&c).unwrap();
    let partition = spinc_partition(&c).unwrap();
    let box_vectors: Vec<CharVector> = (0..box_size(f)).map(|i| c.box_vector(i)).collect();
    for class in &basic.classes {
        for k1 in class.basic.iter().map(|b| &b.initial) {
            let i1 = encode(k1.pairings()).unwrap();
            for k2 in &box_vectors {
                if partition.class_of(k2, &c) != Some(class.class.index) {
                    continue;
                }
                report.pairs += 1;
                let w = path_weight(k1, k2, &c).unwrap();
                let i2 = encode(k2.pairings()).unwrap();
                let merge = (0..=max_a).filter(|&a| (0..=max_a).contains(&(a + w))).find(|&a| {
                    dsu.find(a as usize * points + i1) == dsu.find((a + w) as usize * points + i2)
                });
                let found = minimal_relation(k1, k2, &c, expansion);
                let agrees = match (&found, merge) {
                    (Ok(r), Some(a)) => r.n as i64 == a && r.m as i64 == a + w,
                    // only relations that need more than `max_a` may be missed
                    (Ok(r), None) => r.n.max(r.m) as i64 > max_a,
                    (Err(_), None) => true,
                    (Err(_), Some(_)) => false,
                };
                if !agrees {
                    report.failures.push(format!(
                        "{f}: {k1} ~ {k2}: union-find level {merge:?}, search {found:?}"
                    ));
                }
            }
        }
    }
    report
}

/// [`relation_oracle`] over every negative-definite forest with at most four
/// vertices and weights >= -4, with `a <= 8` and expansion 2.
pub fn relation_oracle_sweep() -> RelationOracleReport {
    let mut total = RelationOracleReport::default();
    for f in small_negdef_forests(4, -4) {
        let r = relation_oracle(&f, 8, 2);
        total.graphs += 1;
        total.pairs += r.pairs;
        total.edges += r.edges;
        total.failures.extend(r.failures);
    }
    total
}

// ---------------------------------------------------------------- properties

/// Lowest-index and random vertex choices give the same verdict and the same
/// terminal vector from every box vector.
pub fn strategy_independence(f: &PlumbingForest, seed: u64) -> Check {
    let c = ctx(f);
    let mut rng = RandomChoice(ChaCha8Rng::seed_from_u64(seed));
    for i in 0..box_size(f) {
        let k = c.box_vector(i);
        let a = run_path(&k, &c, &mut LowestIndex).unwrap();
        let b = run_path(&k, &c, &mut rng).unwrap();
        prop_assert_eq!(a.is_basic(), b.is_basic(), "{} from {}", f, k);
        if a.is_basic() {
            prop_assert_eq!(a.outcome, b.outcome, "{} from {}", f, k);
        }
    }
    Ok(())
}

pub fn spinc_count_is_det(f: &PlumbingForest) -> Check {
    let c = ctx(f);
    let classes = spinc_partition(&c).unwrap().len();
    prop_assert_eq!(BigInt::from(classes), h1_order(f), "{}", f);
    Ok(())
}

pub fn step_changes_square(f: &PlumbingForest, index: u64, vertex: usize) -> Check {
    let c = ctx(f);
    let k = c.box_vector(index % box_size(f));
    let v = vertex % f.len();
    let diff = k_square(&add_pd(&k, v, &c), &c) - k_square(&k, &c);
    prop_assert_eq!(diff, BigRational::from_integer((8 * step_weight(&k, v, &c)).into()));
    Ok(())
}

/// `K ↦ -L` (initial to negated terminal) permutes the basic vectors, and
/// conjugate classes share their basic count and `d`.
pub fn conjugation_symmetry(f: &PlumbingForest) -> Check {
    let c = ctx(f);
    let basic = basic_vectors(&c).unwrap();
    let partition = spinc_partition(&c).unwrap();
    let d = d_invariants(&c).unwrap();
    let initials: HashSet<&CharVector> =
        basic.classes.iter().flat_map(|cl| cl.basic.iter().map(|b| &b.initial)).collect();
    for class in &basic.classes {
        for b in &class.basic {
            let mirrored = conjugate(&b.terminal);
            prop_assert!(initials.contains(&mirrored), "{}: -{} is not basic", f, b.terminal);
            let other = partition.class_of(&mirrored, &c).unwrap();
            prop_assert_eq!(class.basic.len(), basic.classes[other].basic.len());
            prop_assert_eq!(&d[class.class.index].d, &d[other].d);
        }
    }
    Ok(())
}

pub fn rational_implies_lspace(f: &PlumbingForest) -> Check {
    let c = ctx(f);
    let v = verdicts(&c, 0).unwrap();
    if v.rational {
        prop_assert!(v.lspace.lspace, "{} is rational but not an L-space", f);
    }
    Ok(())
}

pub fn reduce_preserves(f: &PlumbingForest) -> Check {
    let (g, _) = reduce(f);
    let (cf, cg) = (ctx(f), ctx(&g));
    prop_assert_eq!(h1_order(f), h1_order(&g), "{} -> {}", f, g);
    let (bf, bg) = (basic_vectors(&cf).unwrap(), basic_vectors(&cg).unwrap());
    prop_assert_eq!(bf.spinc_count(), bg.spinc_count());
    prop_assert_eq!(bf.total_basic(), bg.total_basic(), "{} -> {}", f, g);
    prop_assert_eq!(d_minus_multiset(f), d_minus_multiset(&g), "{} -> {}", f, g);
    Ok(())
}

pub fn rational_matches_laufer(f: &PlumbingForest) -> Check {
    let c = ctx(f);
    let rational = is_rational(&c).unwrap();
    prop_assert_eq!(rational, laufer_rational(f), "{}", f);
    let basic = basic_vectors(&c).unwrap();
    prop_assert_eq!(rational, basic.classes[basic.canonical_class].basic.len() == 1);
    Ok(())
}

pub fn code_ignores_labels(f: &PlumbingForest, shuffle: u64) -> Check {
    let n = f.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut s = shuffle;
    for i in (1..n).rev() {
        perm.swap(i, (s % (i as u64 + 1)) as usize);
        s /= i as u64 + 1;
    }
    let mut weights = vec![0; n];
    for v in 0..n {
        weights[perm[v]] = f.weight(v);
    }
    let edges: Vec<_> = f.edges().iter().map(|&(a, b)| (perm[b], perm[a])).collect();
    let g = PlumbingForest::from_weights(&weights, &edges).unwrap();
    prop_assert_eq!(canonical_code(f), canonical_code(&g));
    Ok(())
}

/// Leading minors, elimination and the tree recursion agree on definiteness
/// (and the last two on the determinant).
pub fn negdef_routes_agree(f: &PlumbingForest) -> Check {
    let by_minors = is_negative_definite(f);
    prop_assert_eq!(by_minors, is_negative_definite_by_elimination(f), "{}", f);
    let adjacency: Vec<Vec<usize>> = (0..f.len()).map(|v| f.neighbors(v).to_vec()).collect();
    let fast = census::tree_negdef_det(f.weights(), &adjacency);
    prop_assert_eq!(by_minors, fast.is_some(), "{}", f);
    if let Some(det) = fast {
        prop_assert_eq!(BigInt::from(det), plumb_core::graph::determinant(f));
    }
    Ok(())
}

/// Summing step weights along a random walk gives `path_weight`.
pub fn walk_weight_telescopes(f: &PlumbingForest, index: u64, walk: &[(usize, bool)]) -> Check {
    let c = ctx(f);
    let start = c.box_vector(index % box_size(f));
    let mut k = start.clone();
    let mut total = 0;
    for &(v, forward) in walk {
        let v = v % f.len();
        if forward {
            total += step_weight(&k, v, &c);
            k = add_pd(&k, v, &c);
        } else {
            let back: Vec<i64> =
                k.pairings().iter().zip(c.matrix().row(v)).map(|(x, q)| x - 2 * q).collect();
            k = CharVector::from_pairings_unchecked(back);
            total -= step_weight(&k, v, &c);
        }
    }
    prop_assert_eq!(path_weight(&start, &k, &c).unwrap(), total);
    Ok(())
}

/// Pairs of basic vectors: `m - n = path_weight`, and swapping swaps.
pub fn relation_symmetry(f: &PlumbingForest) -> Check {
    let c = ctx(f);
    let basic = basic_vectors(&c).unwrap();
    for class in &basic.classes {
        for x in &class.basic {
            for y in &class.basic {
                let r = minimal_relation(&x.initial, &y.initial, &c, 2 * f.len() as u32).unwrap();
                let s = minimal_relation(&y.initial, &x.initial, &c, 2 * f.len() as u32).unwrap();
                prop_assert_eq!(
                    r.m as i64 - r.n as i64,
                    path_weight(&x.initial, &y.initial, &c).unwrap()
                );
                prop_assert_eq!((r.n, r.m), (s.m, s.n));
            }
        }
    }
    Ok(())
}

// ------------------------------------------------------------- suite runner

pub const CASES: u32 = 128;

/// A named property, run as its own proptest suite.
pub struct Suite {
    pub name: &'static str,
    pub run: fn(u32) -> std::result::Result<(), String>,
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        max_global_rejects: 100_000,
        failure_persistence: None,
        ..Config::default()
    })
}

macro_rules! suite {
    ($name:literal, $strategy:expr, $check:expr) => {
        Suite {
            name: $name,
            run: |cases| {
                runner(cases)
                    .run(&$strategy, $check)
                    .map_err(|e| e.to_string())
            },
        }
    };
}

/// The acceptance property suites, each run for `cases` random inputs.
pub fn suites() -> Vec<Suite> {
    vec![
        suite!(
            "run_path strategy independence",
            (negdef(6, -5, false, 3000), any::<u64>()),
            |(f, seed)| strategy_independence(&f, seed)
        ),
        suite!(
            "|spinc_classes| = |det|",
            negdef(6, -6, false, 5000),
            |f| spinc_count_is_det(&f)
        ),
        suite!(
            "k_square(add_pd) - k_square = 8·step_weight",
            (negdef(7, -7, false, 100_000), any::<u64>(), any::<usize>()),
            |(f, i, v)| step_changes_square(&f, i, v)
        ),
        suite!(
            "conjugation symmetry of basic sets and d",
            negdef(6, -5, false, 3000),
            |f| conjugation_symmetry(&f)
        ),
        suite!(
            "rational implies L-space",
            negdef(7, -4, true, 5000),
            |f| rational_implies_lspace(&f)
        ),
        suite!(
            "reduce preserves det, spin^c, basic count and d",
            blown_up(20_000),
            |f| reduce_preserves(&f)
        ),
    ]
}

/// Per-degree class counts as a map, for comparing tables.
pub fn counts_map(counts: &[(BigRational, usize)]) -> BTreeMap<BigRational, usize> {
    counts.iter().cloned().collect()
}
