//! Fixtures shared by the criterion benches.

use plumb_core::{named, PlumbingForest};

/// Graphs of increasing box size used across the benches.
pub fn corpus() -> Vec<(&'static str, PlumbingForest)> {
    vec![
        ("e8", named::e8()),
        ("sigma237", named::sigma_237()),
        ("a8", named::a_chain(8)),
        ("star_-2_-3_-5_-7", PlumbingForest::star(-2, &[-3, -5, -7])),
    ]
}
