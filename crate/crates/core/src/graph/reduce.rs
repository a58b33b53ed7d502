//! Blow-downs of weight -1 vertices of degree at most two.
//!
//! * degree 0: the vertex is deleted;
//! * degree 1: deleted, its neighbor's weight goes up by one;
//! * degree 2: deleted, both neighbors go up by one and are joined.
//!
//! Degree-3 (or higher) -1 vertices are left alone.

use std::collections::BTreeSet;

use super::PlumbingForest;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlowDown {
    Isolated,
    Leaf,
    Interior,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Move {
    pub kind: BlowDown,
    /// Id of the deleted vertex.
    pub removed: String,
    /// Ids of its neighbors at the time of the move, each gaining +1.
    pub neighbors: Vec<String>,
}

impl Move {
    pub fn weight_changes(&self) -> Vec<(String, i64)> {
        self.neighbors.iter().map(|id| (id.clone(), 1)).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReductionTrace {
    pub moves: Vec<Move>,
}

impl ReductionTrace {
    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    /// Applies the recorded moves to `input`. Returns `None` if a move does
    /// not fit the graph it is applied to.
    pub fn replay(&self, input: &PlumbingForest) -> Option<PlumbingForest> {
        let mut work = Work::from(input);
        for mv in &self.moves {
            let v = work.index_of(&mv.removed)?;
            if work.weights[v] != -1 {
                return None;
            }
            let mut nbrs: Vec<usize> = Vec::new();
            for id in &mv.neighbors {
                nbrs.push(work.index_of(id)?);
            }
            let actual: BTreeSet<usize> = work.adj[v].iter().copied().collect();
            if actual != nbrs.iter().copied().collect() || actual.len() != nbrs.len() {
                return None;
            }
            work.blow_down(v);
        }
        Some(work.finish())
    }
}

struct Work {
    ids: Vec<String>,
    weights: Vec<i64>,
    alive: Vec<bool>,
    adj: Vec<BTreeSet<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Work {
    fn from(f: &PlumbingForest) -> Self {
        Work {
            ids: f.ids().to_vec(),
            weights: f.weights().to_vec(),
            alive: vec![true; f.len()],
            adj: (0..f.len())
                .map(|v| f.neighbors(v).iter().copied().collect())
                .collect(),
            edges: f.edges().to_vec(),
        }
    }

    fn index_of(&self, id: &str) -> Option<usize> {
        (0..self.ids.len()).find(|&i| self.alive[i] && self.ids[i] == id)
    }

    fn candidates(&self) -> Vec<usize> {
        (0..self.weights.len())
            .filter(|&v| self.alive[v] && self.weights[v] == -1 && self.adj[v].len() <= 2)
            .collect()
    }

    fn blow_down(&mut self, v: usize) -> Move {
        let nbrs: Vec<usize> = self.adj[v].iter().copied().collect();
        let kind = match nbrs.len() {
            0 => BlowDown::Isolated,
            1 => BlowDown::Leaf,
            2 => BlowDown::Interior,
            d => panic!("blow-down of a degree-{d} vertex"),
        };
        for &w in &nbrs {
            self.adj[w].remove(&v);
            self.weights[w] += 1;
        }
        if let [a, b] = nbrs[..] {
            self.adj[a].insert(b);
            self.adj[b].insert(a);
            self.edges.push((a.min(b), a.max(b)));
        }
        self.adj[v].clear();
        self.alive[v] = false;
        self.edges.retain(|&(a, b)| a != v && b != v);
        Move {
            kind,
            removed: self.ids[v].clone(),
            neighbors: nbrs.iter().map(|&w| self.ids[w].clone()).collect(),
        }
    }

    fn finish(self) -> PlumbingForest {
        let mut remap = vec![usize::MAX; self.ids.len()];
        let mut vertices = Vec::new();
        for v in 0..self.ids.len() {
            if self.alive[v] {
                remap[v] = vertices.len();
                vertices.push((self.ids[v].clone(), self.weights[v]));
            }
        }
        let edges = self
            .edges
            .iter()
            .map(|&(a, b)| (remap[a], remap[b]))
            .collect();
        PlumbingForest::new(vertices, edges).expect("blow-downs preserve the forest property")
    }
}

/// Blows down until no weight -1 vertex of degree <= 2 remains, always
/// choosing the first such vertex in file order.
pub fn reduce(forest: &PlumbingForest) -> (PlumbingForest, ReductionTrace) {
    reduce_with(forest, |c| c[0])
}

/// Like [`reduce`], with `choose` picking among the current candidate
/// vertex indices (never called with an empty slice).
pub fn reduce_with(
    forest: &PlumbingForest,
    mut choose: impl FnMut(&[usize]) -> usize,
) -> (PlumbingForest, ReductionTrace) {
    let mut work = Work::from(forest);
    let mut trace = ReductionTrace::default();
    loop {
        let cands = work.candidates();
        if cands.is_empty() {
            break;
        }
        let v = choose(&cands);
        debug_assert!(cands.contains(&v));
        trace.moves.push(work.blow_down(v));
    }
    (work.finish(), trace)
}
