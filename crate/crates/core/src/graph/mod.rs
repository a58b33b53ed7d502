//! Weighted plumbing forests and their intersection forms.

mod canon;
mod matrix;
mod parse;
mod reduce;

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::{Error, Result};

pub use canon::canonical_code;
pub use matrix::{bareiss_determinant, leading_minors, IntersectionMatrix};
pub use parse::{parse_forest, parse_forest_json};
pub use reduce::{reduce, reduce_with, BlowDown, Move, ReductionTrace};

/// A weighted forest `G`: vertices carry integer weights `m(v)`, edges are
/// unordered and the edge set has no cycles.
///
/// Vertices keep the order in which they were declared; every index-based
/// API in this crate refers to that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlumbingForest {
    ids: Vec<String>,
    weights: Vec<i64>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl PlumbingForest {
    /// Builds a forest, checking ids, endpoints and the forest condition.
    pub fn new(vertices: Vec<(String, i64)>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = HashMap::with_capacity(vertices.len());
        for (i, (id, _)) in vertices.iter().enumerate() {
            if seen.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(id.clone()));
            }
        }
        let (ids, weights): (Vec<_>, Vec<_>) = vertices.into_iter().unzip();
        let n = ids.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut dsu = Dsu::new(n);
        for &(a, b) in &edges {
            if a >= n {
                return Err(Error::NoSuchVertex(a));
            }
            if b >= n {
                return Err(Error::NoSuchVertex(b));
            }
            if a == b {
                return Err(Error::SelfLoop(ids[a].clone()));
            }
            if adjacency[a].contains(&b) {
                return Err(Error::RepeatedEdge(ids[a].clone(), ids[b].clone()));
            }
            if !dsu.union(a, b) {
                return Err(Error::Cycle(ids[a].clone(), ids[b].clone()));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        Ok(PlumbingForest {
            ids,
            weights,
            edges,
            adjacency,
        })
    }

    /// A forest with auto-generated ids `v1..vn`.
    pub fn from_weights(weights: &[i64], edges: &[(usize, usize)]) -> Result<Self> {
        let vertices = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (format!("v{}", i + 1), w))
            .collect();
        Self::new(vertices, edges.to_vec())
    }

    /// A path with the given weights, ids `c1..cn`.
    pub fn chain(weights: &[i64]) -> Self {
        let vertices = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (format!("c{}", i + 1), w))
            .collect();
        let edges = (1..weights.len()).map(|i| (i - 1, i)).collect();
        Self::new(vertices, edges).expect("a path is a forest")
    }

    /// A star: vertex 0 is the center, joined to one vertex per leaf weight.
    pub fn star(center: i64, leaves: &[i64]) -> Self {
        let mut weights = vec![center];
        weights.extend_from_slice(leaves);
        let edges: Vec<_> = (1..weights.len()).map(|i| (0, i)).collect();
        Self::from_weights(&weights, &edges).expect("a star is a forest")
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> i64 {
        self.weights[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    /// Copy of the forest with the weight of `v` replaced.
    pub fn with_weight(&self, v: usize, weight: i64) -> Self {
        let mut out = self.clone();
        out.weights[v] = weight;
        out
    }

    /// Connected components as lists of vertex indices, in file order.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start];
            comp[start] = id;
            let mut i = 0;
            while i < members.len() {
                let v = members[i];
                for &w in &self.adjacency[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                    }
                }
                i += 1;
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Writes the forest in the line-oriented graph format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (id, w) in self.ids.iter().zip(&self.weights) {
            out.push_str(&format!("vertex {id} {w}\n"));
        }
        for &(a, b) in &self.edges {
            out.push_str(&format!("edge {} {}\n", self.ids[a], self.ids[b]));
        }
        out
    }
}

impl fmt::Display for PlumbingForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub(crate) struct Dsu {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

pub fn intersection_matrix(forest: &PlumbingForest) -> IntersectionMatrix {
    IntersectionMatrix::of(forest)
}

/// Sylvester's criterion on the leading principal minors, computed by
/// fraction-free elimination: the k-th minor must have sign `(-1)^k`.
pub fn is_negative_definite(forest: &PlumbingForest) -> bool {
    let q = intersection_matrix(forest);
    let minors = leading_minors(&q);
    if minors.len() < q.size() {
        return false;
    }
    minors.iter().enumerate().all(|(k, minor)| {
        if k % 2 == 0 {
            minor.is_negative()
        } else {
            minor.is_positive()
        }
    })
}

/// Leaf-to-root elimination on each tree: a vertex's effective weight is
/// `m(v) - sum 1/e(c)` over its already-eliminated children. The form is
/// negative definite iff every effective weight is strictly negative.
///
/// This is the Schur-complement route; [`is_negative_definite`] is the
/// minor route. Both are exact.
pub fn is_negative_definite_by_elimination(forest: &PlumbingForest) -> bool {
    use num_rational::BigRational;
    for comp in forest.components() {
        let root = comp[0];
        let mut order = vec![root];
        let mut parent = vec![usize::MAX; forest.len()];
        parent[root] = root;
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            for &w in forest.neighbors(v) {
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    order.push(w);
                }
            }
            i += 1;
        }
        let mut effective: HashMap<usize, BigRational> = HashMap::new();
        for &v in order.iter().rev() {
            let mut e = BigRational::from_integer(BigInt::from(forest.weight(v)));
            for &c in forest.neighbors(v) {
                if parent[c] == v {
                    e -= effective[&c].recip();
                }
            }
            if !e.is_negative() {
                return false;
            }
            effective.insert(v, e);
        }
    }
    true
}

/// `|det Q|`, the order of `H_1(Y(G))` when nonzero; 0 means `Y(G)` is not a
/// rational homology sphere. The empty forest gives 1 (the 3-sphere).
pub fn h1_order(forest: &PlumbingForest) -> BigInt {
    bareiss_determinant(&intersection_matrix(forest)).abs()
}

pub fn determinant(forest: &PlumbingForest) -> BigInt {
    bareiss_determinant(&intersection_matrix(forest))
}

pub fn is_minimal(forest: &PlumbingForest) -> bool {
    (0..forest.len()).all(|v| !(forest.weight(v) == -1 && forest.degree(v) <= 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_cycle_and_bad_edges() {
        let cyc = PlumbingForest::from_weights(&[-2, -2, -2], &[(0, 1), (1, 2), (2, 0)]);
        assert!(matches!(cyc, Err(Error::Cycle(..))));
        let lp = PlumbingForest::from_weights(&[-2], &[(0, 0)]);
        assert!(matches!(lp, Err(Error::SelfLoop(_))));
        let rep = PlumbingForest::from_weights(&[-2, -2], &[(0, 1), (1, 0)]);
        assert!(matches!(rep, Err(Error::RepeatedEdge(..))));
    }

    #[test]
    fn definiteness_examples() {
        assert!(is_negative_definite(&PlumbingForest::chain(&[-2])));
        assert!(!is_negative_definite(&PlumbingForest::chain(&[0])));
        // minors -2, +1, 0
        let c = PlumbingForest::chain(&[-2, -1, -2]);
        assert_eq!(
            leading_minors(&intersection_matrix(&c)),
            vec![BigInt::from(-2), BigInt::from(1), BigInt::from(0)]
        );
        assert!(!is_negative_definite(&c));
        assert!(!is_negative_definite_by_elimination(&c));
        assert!(is_negative_definite(&PlumbingForest::chain(&[])));
    }

    #[test]
    fn h1_examples() {
        assert_eq!(h1_order(&PlumbingForest::chain(&[-2])), BigInt::from(2));
        assert_eq!(
            h1_order(&PlumbingForest::star(-1, &[-2, -3, -7])),
            BigInt::from(1)
        );
        assert_eq!(h1_order(&crate::named::e8()), BigInt::from(1));
        assert_eq!(h1_order(&PlumbingForest::chain(&[])), BigInt::from(1));
    }

    #[test]
    fn minimality() {
        assert!(is_minimal(&crate::named::e8()));
        assert!(!is_minimal(&PlumbingForest::chain(&[-2, -1, -2])));
        assert!(is_minimal(&PlumbingForest::chain(&[])));
        assert!(is_minimal(&PlumbingForest::star(-1, &[-2, -3, -7])));
    }
}
