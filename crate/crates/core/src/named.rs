//! Frequently used plumbing graphs.

use crate::graph::PlumbingForest;

/// The negative E8 tree: a path `v1..v7` with `v8` attached to `v5`, all
/// weights -2. Its boundary is the Poincaré sphere.
pub fn e8() -> PlumbingForest {
    PlumbingForest::from_weights(
        &[-2; 8],
        &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)],
    )
    .expect("E8 is a tree")
}

/// Star with center -1 and leaves -2, -3, -7, bounding the Brieskorn sphere
/// Σ(2,3,7).
pub fn sigma_237() -> PlumbingForest {
    PlumbingForest::star(-1, &[-2, -3, -7])
}

/// A path of `n` vertices of weight -2, bounding the lens space L(n+1, n).
pub fn a_chain(n: usize) -> PlumbingForest {
    PlumbingForest::chain(&vec![-2; n])
}
