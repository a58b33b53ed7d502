//! Small-graph census: tree shapes, weightings, per-graph records, and the
//! classification checks for integral homology sphere L-spaces.

use std::collections::HashSet;
use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::engine::{basic_vectors, d_invariants_from, default_ar_bound, is_rational, verdicts_from};
use crate::error::{Error, Result};
use crate::graph::{canonical_code, is_minimal, PlumbingForest};
use crate::lattice::QFormContext;
use crate::named;
use crate::rational::to_json_pair;

/// Per-graph box budget inside the census.
pub const CENSUS_BUDGET: u64 = 1_000_000;
/// Largest tree size the shape generator accepts.
pub const MAX_TREE_SIZE: usize = 12;
pub const SCHEMA_VERSION: u32 = 1;

/// An unweighted tree on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeShape {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl TreeShape {
    pub fn with_weights(&self, weights: &[i64]) -> PlumbingForest {
        assert_eq!(weights.len(), self.n);
        PlumbingForest::from_weights(weights, &self.edges).expect("shapes are trees")
    }

    pub fn code(&self) -> String {
        canonical_code(&self.with_weights(&vec![0; self.n]))
    }
}

/// One tree per isomorphism class on `n` vertices, sorted by canonical code.
///
/// Trees on `n` vertices are the trees on `n - 1` vertices with a leaf
/// attached somewhere; duplicates are removed by canonical code.
pub fn enumerate_trees(n: usize) -> Result<Vec<TreeShape>> {
    if n > MAX_TREE_SIZE {
        return Err(Error::Budget {
            needed: n as u128,
            budget: MAX_TREE_SIZE as u64,
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut level = vec![(String::new(), TreeShape { n: 1, edges: Vec::new() })];
    for size in 2..=n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for (_, t) in &level {
            for v in 0..t.n {
                let mut edges = t.edges.clone();
                edges.push((v, size - 1));
                let shape = TreeShape { n: size, edges };
                let code = shape.code();
                if seen.insert(code.clone()) {
                    next.push((code, shape));
                }
            }
        }
        level = next;
    }
    level.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(level.into_iter().map(|(_, t)| t).collect())
}

/// Negative definiteness and `det Q` of a weighted tree in `O(n)`.
///
/// With `A = -Q` rooted anywhere, `D(v) = det A|subtree(v)` satisfies
/// `D(v) = |m(v)| ∏ D(c) - Σ_c D'(c) ∏_{c' ≠ c} D(c')`, where
/// `D'(c) = ∏_{grandchildren g under c} D(g)`. `A` is positive definite iff
/// every `D(v) > 0`. Returns `None` when not negative definite.
pub fn tree_negdef_det(weights: &[i64], adjacency: &[Vec<usize>]) -> Option<i128> {
    TreeEval::new(adjacency).negdef_det(weights)
}

/// Rooted traversal of a fixed tree, reused across many weightings.
struct TreeEval {
    /// children before parents
    post: Vec<usize>,
    children: Vec<Vec<usize>>,
    det: Vec<i128>,
    minor: Vec<i128>,
}

impl TreeEval {
    fn new(adjacency: &[Vec<usize>]) -> Self {
        let n = adjacency.len();
        let mut order = Vec::with_capacity(n);
        let mut children = vec![Vec::new(); n];
        if n > 0 {
            let mut seen = vec![false; n];
            seen[0] = true;
            order.push(0);
            let mut i = 0;
            while i < order.len() {
                let v = order[i];
                for &w in &adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        children[v].push(w);
                        order.push(w);
                    }
                }
                i += 1;
            }
        }
        order.reverse();
        TreeEval {
            post: order,
            children,
            det: vec![0; n],
            minor: vec![1; n],
        }
    }

    fn negdef_det(&mut self, weights: &[i64]) -> Option<i128> {
        let n = weights.len();
        if n == 0 {
            return Some(1);
        }
        for &v in &self.post {
            let mut prod = 1i128;
            for &c in &self.children[v] {
                prod = prod.checked_mul(self.det[c])?;
            }
            let mut d = (-weights[v] as i128).checked_mul(prod)?;
            for &c in &self.children[v] {
                // prod / D(c) · D'(c); D(c) divides prod
                d = d.checked_sub((prod / self.det[c]).checked_mul(self.minor[c])?)?;
            }
            if d <= 0 {
                return None;
            }
            self.det[v] = d;
            self.minor[v] = prod;
        }
        let root = *self.post.last().expect("nonempty");
        let sign = if n % 2 == 0 { 1 } else { -1 };
        Some(sign * self.det[root])
    }
}

fn adjacency(shape: &TreeShape) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); shape.n];
    for &(a, b) in &shape.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

/// A negative-definite weighted tree found by the enumerator.
#[derive(Clone, Debug)]
pub struct WeightedTree {
    pub code: String,
    pub forest: PlumbingForest,
    pub det: i128,
}

/// All negative-definite weightings with weights in `wmin..=-1` of every
/// tree on `n` vertices, one per isomorphism class, sorted by code.
pub fn enumerate_weighted(n: usize, wmin: i64) -> Result<Vec<WeightedTree>> {
    enumerate_weighted_where(n, wmin, |_, _, _| true)
}

/// [`enumerate_weighted`] restricted to weightings accepted by `keep`,
/// which sees the weights, the adjacency lists and `det Q`. Rejected
/// weightings never reach the (comparatively costly) canonical coding.
pub fn enumerate_weighted_where<F>(n: usize, wmin: i64, keep: F) -> Result<Vec<WeightedTree>>
where
    F: Fn(&[i64], &[Vec<usize>], i128) -> bool + Sync,
{
    if wmin > -1 {
        return Err(Error::Verification(format!("minimum weight {wmin} must be at most -1")));
    }
    let span = (-wmin) as u64;
    let total = span.checked_pow(n as u32).ok_or(Error::Budget {
        needed: u128::MAX,
        budget: u64::MAX,
    })?;
    let shapes = enumerate_trees(n)?;
    let mut out: Vec<WeightedTree> = shapes
        .par_iter()
        .map(|shape| {
            let adj = adjacency(shape);
            let mut eval = TreeEval::new(&adj);
            let mut seen = HashSet::new();
            let mut found = Vec::new();
            let mut weights = vec![-1i64; n];
            for index in 0..total {
                let mut rem = index;
                for w in weights.iter_mut().rev() {
                    *w = -1 - (rem % span) as i64;
                    rem /= span;
                }
                let Some(det) = eval.negdef_det(&weights) else { continue };
                if !keep(&weights, &adj, det) {
                    continue;
                }
                let forest = shape.with_weights(&weights);
                let code = canonical_code(&forest);
                if seen.insert(code.clone()) {
                    found.push(WeightedTree { code, forest, det });
                }
            }
            found
        })
        .flatten()
        .collect();
    out.sort_by(|a, b| a.code.cmp(&b.code));
    Ok(out)
}

/// All negative-definite weighted trees with `1..=nmax` vertices.
pub fn enumerate_up_to(nmax: usize, wmin: i64) -> Result<Vec<WeightedTree>> {
    enumerate_up_to_where(nmax, wmin, |_, _, _| true)
}

fn enumerate_up_to_where<F>(nmax: usize, wmin: i64, keep: F) -> Result<Vec<WeightedTree>>
where
    F: Fn(&[i64], &[Vec<usize>], i128) -> bool + Sync,
{
    let mut out = Vec::new();
    for n in 1..=nmax {
        out.extend(enumerate_weighted_where(n, wmin, &keep)?);
    }
    out.sort_by(|a, b| a.code.cmp(&b.code));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E8Report {
    pub max_vertices: usize,
    pub trees: usize,
    pub negative_definite: usize,
    /// Codes of negative-definite all-(-2) trees with `|det| = 1`.
    pub hits: Vec<String>,
    pub passed: bool,
}

/// Among connected negative-definite all-(-2) trees on `<= nmax` vertices,
/// exactly one is unimodular and it is E8.
pub fn verify_e8_unique(nmax: usize) -> Result<E8Report> {
    let e8 = canonical_code(&named::e8());
    let mut trees = 0;
    let mut negdef = 0;
    let mut hits = Vec::new();
    for n in 1..=nmax {
        for shape in enumerate_trees(n)? {
            trees += 1;
            let weights = vec![-2; n];
            if let Some(det) = tree_negdef_det(&weights, &adjacency(&shape)) {
                negdef += 1;
                if det.abs() == 1 {
                    hits.push(canonical_code(&shape.with_weights(&weights)));
                }
            }
        }
    }
    let passed = hits.len() == 1 && hits[0] == e8;
    Ok(E8Report {
        max_vertices: nmax,
        trees,
        negative_definite: negdef,
        hits,
        passed,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassificationReport {
    pub max_vertices: usize,
    pub min_weight: i64,
    /// Minimal negative-definite weightings scanned, before isomorphism dedup.
    pub graphs: usize,
    /// Rationality decided (|det| = 1 graphs and graphs with a -1 vertex).
    pub rationality_checked: usize,
    /// Rational unimodular graphs; should be exactly E8.
    pub rational_zhs: Vec<String>,
    pub violations_a: Vec<String>,
    pub violations_b: Vec<String>,
    pub violations_c: Vec<String>,
    /// Graphs whose box exceeded the census budget.
    pub skipped: Vec<String>,
}

impl ClassificationReport {
    pub fn passed(&self) -> bool {
        self.violations_a.is_empty()
            && self.violations_b.is_empty()
            && self.violations_c.is_empty()
            && self.skipped.is_empty()
    }
}

enum Finding {
    Skipped,
    Checked { rational: bool },
}

/// Checks over minimal connected negative-definite trees, `n <= nmax`,
/// weights `>= wmin`:
///
/// * (a) a rational tree with `|det| = 1` is E8;
/// * (b) a rational tree without `-1` weights and with a weight `<= -3` has
///   `|det| > 1`;
/// * (c) a tree containing a `-1` vertex is not rational.
///
/// Rationality is only decided where one of the checks needs it.
pub fn verify_classification(nmax: usize, wmin: i64) -> Result<ClassificationReport> {
    let e8 = canonical_code(&named::e8());
    let graphs = AtomicUsize::new(0);
    let candidates = enumerate_up_to_where(nmax, wmin, |w, adj, det| {
        let minimal = w.iter().zip(adj).all(|(&m, nb)| !(m == -1 && nb.len() <= 2));
        if !minimal {
            return false;
        }
        graphs.fetch_add(1, Ordering::Relaxed);
        det.abs() == 1 || w.contains(&-1)
    })?;
    let findings = candidates
        .par_iter()
        .map(|g| -> Result<Finding> {
            let ctx = QFormContext::negative_definite(&g.forest)?.with_budget(CENSUS_BUDGET);
            match is_rational(&ctx) {
                Ok(rational) => Ok(Finding::Checked { rational }),
                Err(Error::Budget { .. }) => Ok(Finding::Skipped),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = ClassificationReport {
        max_vertices: nmax,
        min_weight: wmin,
        graphs: graphs.into_inner(),
        ..Default::default()
    };
    for (g, finding) in candidates.iter().zip(findings) {
        let rational = match finding {
            Finding::Skipped => {
                report.skipped.push(g.code.clone());
                continue;
            }
            Finding::Checked { rational } => rational,
        };
        report.rationality_checked += 1;
        let w = g.forest.weights();
        if rational && g.det.abs() == 1 {
            report.rational_zhs.push(g.code.clone());
            if g.code != e8 {
                report.violations_a.push(g.code.clone());
            }
            if !w.contains(&-1) && w.iter().any(|&m| m <= -3) {
                report.violations_b.push(g.code.clone());
            }
        }
        if rational && w.contains(&-1) {
            report.violations_c.push(g.code.clone());
        }
    }
    Ok(report)
}

/// Census record filters; a record must pass all of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Filter {
    Zhs,
    Rational,
    NonRational,
    LSpace,
    NonLSpace,
    Minimal,
}

impl std::str::FromStr for Filter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "zhs" => Filter::Zhs,
            "rational" => Filter::Rational,
            "nonrational" => Filter::NonRational,
            "lspace" => Filter::LSpace,
            "nonlspace" => Filter::NonLSpace,
            "minimal" => Filter::Minimal,
            other => return Err(Error::Verification(format!("unknown filter `{other}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusRecord {
    pub code: String,
    pub weights: Vec<i64>,
    pub edges: Vec<(usize, usize)>,
    pub negdef: bool,
    pub det: i128,
    pub spinc: usize,
    pub basic: usize,
    pub rational: bool,
    pub lspace: bool,
    pub certified: bool,
    pub minimal: bool,
    /// d-invariants, ascending.
    pub d: Vec<num_rational::BigRational>,
}

impl CensusRecord {
    pub fn accepts(&self, filter: Filter) -> bool {
        match filter {
            Filter::Zhs => self.det.abs() == 1,
            Filter::Rational => self.rational,
            Filter::NonRational => !self.rational,
            Filter::LSpace => self.lspace,
            Filter::NonLSpace => !self.lspace,
            Filter::Minimal => self.minimal,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "code": self.code,
            "n": self.weights.len(),
            "weights": self.weights,
            "negdef": self.negdef,
            "det": self.det as i64,
            "spinc": self.spinc,
            "basic": self.basic,
            "rational": self.rational,
            "lspace": if self.lspace { "yes" } else { "no" },
            "certified": self.certified,
            "minimal": self.minimal,
            "d": self.d.iter().map(to_json_pair).collect::<Vec<_>>(),
        })
    }
}

/// Full record for one negative-definite graph under the given budget.
pub fn classify(forest: &PlumbingForest, budget: u64) -> Result<CensusRecord> {
    let ctx = QFormContext::negative_definite(forest)?.with_budget(budget);
    let basic = basic_vectors(&ctx)?;
    let verdicts = verdicts_from(&ctx, &basic, default_ar_bound(&ctx))?;
    let mut d: Vec<_> = d_invariants_from(&ctx, &basic)?.into_iter().map(|x| x.d).collect();
    d.sort();
    let det = i128::try_from(ctx.det()).map_err(|_| Error::Overflow)?;
    Ok(CensusRecord {
        code: canonical_code(forest),
        weights: forest.weights().to_vec(),
        edges: forest.edges().to_vec(),
        negdef: true,
        det,
        spinc: basic.spinc_count(),
        basic: basic.total_basic(),
        rational: verdicts.rational,
        lspace: verdicts.lspace.lspace,
        certified: verdicts.lspace.certified,
        minimal: is_minimal(forest),
        d,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusOutput {
    pub records: Vec<CensusRecord>,
    /// Codes of graphs skipped because their box exceeded the budget.
    pub skipped: Vec<String>,
}

/// Classifies every negative-definite weighted tree with `n <= nmax`,
/// weights `>= wmin`, keeping the records that pass all filters.
pub fn census_scan(nmax: usize, wmin: i64, filters: &[Filter]) -> Result<CensusOutput> {
    let graphs = enumerate_up_to(nmax, wmin)?;
    let results = graphs
        .par_iter()
        .map(|g| match classify(&g.forest, CENSUS_BUDGET) {
            Ok(r) => Ok(Some(r)),
            Err(Error::Budget { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (g, r) in graphs.iter().zip(results) {
        match r {
            Some(r) if filters.iter().all(|&f| r.accepts(f)) => records.push(r),
            Some(_) => {}
            None => skipped.push(g.code.clone()),
        }
    }
    Ok(CensusOutput { records, skipped })
}

pub fn schema_header() -> Value {
    json!({
        "schema": "plumb-census",
        "version": SCHEMA_VERSION,
        "fields": [
            "basic", "certified", "code", "d", "det", "lspace", "minimal", "n", "negdef",
            "rational", "spinc", "weights",
        ],
    })
}

/// Header line followed by one JSON object per record.
pub fn write_jsonl(records: &[CensusRecord], out: &mut impl Write) -> Result<()> {
    writeln!(out, "{}", schema_header())?;
    for r in records {
        writeln!(out, "{}", r.to_json())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{determinant, is_negative_definite};

    #[test]
    fn small_tree_counts() {
        let counts: Vec<_> = (1..=8).map(|n| enumerate_trees(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11, 23]);
        assert!(enumerate_trees(13).is_err());
    }

    #[test]
    fn fast_negdef_matches_minors() {
        for n in 1..=6 {
            for shape in enumerate_trees(n).unwrap() {
                let adj = adjacency(&shape);
                for idx in 0..4u32.pow(n as u32) {
                    let w: Vec<i64> = (0..n).map(|i| -1 - ((idx / 4u32.pow(i as u32)) % 4) as i64).collect();
                    let f = shape.with_weights(&w);
                    let fast = tree_negdef_det(&w, &adj);
                    assert_eq!(fast.is_some(), is_negative_definite(&f), "{f}");
                    if let Some(d) = fast {
                        assert_eq!(num_bigint::BigInt::from(d), determinant(&f));
                    }
                }
            }
        }
    }

    #[test]
    fn weighted_examples() {
        let one: Vec<_> = enumerate_weighted(1, -3).unwrap().iter().map(|g| g.forest.weights().to_vec()).collect();
        assert_eq!(one.len(), 3);
        assert!(one.contains(&vec![-1]) && one.contains(&vec![-3]));
        let two = enumerate_weighted(2, -2).unwrap();
        // (-1,-1) has det 0
        assert_eq!(two.len(), 2);
        assert!(two.iter().all(|g| !g.forest.weights().iter().all(|&w| w == -1)));
    }

    #[test]
    fn e8_is_unique_up_to_eight() {
        let r = verify_e8_unique(8).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.hits, vec![canonical_code(&named::e8())]);
    }

    #[test]
    fn classification_small() {
        let r = verify_classification(5, -3).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn sigma237_record() {
        let out = census_scan(4, -7, &[Filter::Zhs]).unwrap();
        let star = canonical_code(&named::sigma_237());
        let rec = out.records.iter().find(|r| r.code == star).expect("star present");
        assert!(!rec.lspace && !rec.rational && rec.basic == 2);
        let none = census_scan(3, -3, &[Filter::Rational, Filter::NonLSpace]).unwrap();
        assert!(none.records.is_empty());
    }

    #[test]
    fn jsonl_has_header_and_sorted_keys() {
        let rec = classify(&PlumbingForest::chain(&[-3]), CENSUS_BUDGET).unwrap();
        let mut buf = Vec::new();
        write_jsonl(&[rec], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].contains("\"schema\":\"plumb-census\""));
        assert!(lines[1].starts_with("{\"basic\":3,\"certified\":true,\"code\":\"-3\""));
        assert!(lines[1].contains(r#""d":[["-1","2"],["1","6"],["1","6"]]"#));
    }
}
