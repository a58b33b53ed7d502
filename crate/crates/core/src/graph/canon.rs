//! Weight-aware canonical codes for forests (AHU codes rooted at centroids).

use super::PlumbingForest;

fn rooted_code(f: &PlumbingForest, v: usize, parent: usize) -> String {
    let mut children: Vec<String> = f
        .neighbors(v)
        .iter()
        .filter(|&&c| c != parent)
        .map(|&c| rooted_code(f, c, v))
        .collect();
    children.sort_unstable();
    let mut out = f.weight(v).to_string();
    if !children.is_empty() {
        out.push('[');
        out.push_str(&children.join(","));
        out.push(']');
    }
    out
}

/// One or two centroids of the component containing `members`.
fn centroids(f: &PlumbingForest, members: &[usize]) -> Vec<usize> {
    let n = members.len();
    let root = members[0];
    let mut order = vec![root];
    let mut parent = vec![usize::MAX; f.len()];
    parent[root] = root;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for &w in f.neighbors(v) {
            if parent[w] == usize::MAX {
                parent[w] = v;
                order.push(w);
            }
        }
        i += 1;
    }
    let mut size = vec![1usize; f.len()];
    for &v in order.iter().rev() {
        if v != root {
            size[parent[v]] += size[v];
        }
    }
    let mut out = Vec::new();
    for &v in &order {
        let mut largest = n - size[v];
        for &w in f.neighbors(v) {
            if parent[w] == v && w != v {
                largest = largest.max(size[w]);
            }
        }
        if 2 * largest <= n {
            out.push(v);
        }
    }
    out
}

/// Equal for two forests exactly when they are isomorphic as weighted
/// graphs. Components are coded separately and sorted.
pub fn canonical_code(forest: &PlumbingForest) -> String {
    let mut parts: Vec<String> = forest
        .components()
        .iter()
        .map(|members| {
            centroids(forest, members)
                .into_iter()
                .map(|c| rooted_code(forest, c, usize::MAX))
                .min()
                .expect("every tree has a centroid")
        })
        .collect();
    parts.sort_unstable();
    if parts.is_empty() {
        "()".to_string()
    } else {
        parts.join("|")
    }
}
