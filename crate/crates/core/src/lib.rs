//! Lattice-theoretic and Heegaard Floer invariants of plumbed 3-manifolds.
//!
//! A plumbed manifold is described by a weighted forest (see [`PlumbingForest`]).
//! For negative-definite forests this crate enumerates characteristic vectors,
//! runs the basic-vector path algorithm, decides rationality and the L-space
//! property, computes d-invariants, and reconstructs graded module summaries
//! from the equivalence relations on `U^a ⊗ K`. The [`census`] module sweeps
//! small trees and checks the classification of integral homology sphere
//! L-spaces among them.

pub mod census;
pub mod engine;
mod error;
pub mod graph;
pub mod lattice;
pub mod named;
pub mod rational;
pub mod relations;

pub use engine::{
    ar_status, basic_vectors, d_invariants, is_lspace, is_rational, lens_d_oracle, run_path,
    verdicts, ArStatus, BasicSet, DInvariant, LSpaceVerdict, Outcome, TerminationResult, Verdicts,
};
pub use error::{Error, Result};
pub use graph::{
    canonical_code, h1_order, intersection_matrix, is_minimal, is_negative_definite,
    parse_forest, reduce, IntersectionMatrix, PlumbingForest, ReductionTrace,
};
pub use lattice::{CharVector, QFormContext, SpincClass};
pub use relations::{
    hf_summary, minimal_relation, path_weight, step_weight, truncated_classes, GradedTable,
    HfParams, HfSummary, MinimalRelation, UState,
};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
