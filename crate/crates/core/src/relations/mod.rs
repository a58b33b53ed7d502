//! Relations between `U^a ⊗ K` states.
//!
//! For a vertex `v` let `2n = ⟨K,v⟩ + v·v`. The dual module identifies
//! `U^a ⊗ K` with `U^{a+n} ⊗ (K + 2PD[v])` whenever both exponents are
//! non-negative (this is one statement covering the `n >= 0` and `n <= 0`
//! relations). Along any lattice path the exponent therefore changes by the
//! sum of the step weights `n`, and that sum telescopes:
//!
//! ```text
//! Σ n = (⟨K₁, x⟩ + x·x) / 2 = (K₂² - K₁²) / 8,   where Q x = (k₂ - k₁) / 2.
//! ```
//!
//! So the exponent offset at a lattice point depends only on the point, and
//! the degree `2a - (K² + |G|)/4` is constant on equivalence classes.

mod ellipsoid;
mod graded;

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::lattice::{pd_difference, CharVector, QFormContext};

pub use ellipsoid::{class_points, LatticePoint};
pub use graded::{hf_summary, truncated_classes, ClassSummary, ClassTable, GradedTable, HfParams, HfSummary};

/// `U^a ⊗ K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UState {
    pub a: u64,
    pub k: CharVector,
}

/// `n = (⟨K,v⟩ + v·v) / 2`; an integer because `K` is characteristic.
pub fn step_weight(k: &CharVector, v: usize, ctx: &QFormContext) -> i64 {
    let s = k.get(v) + ctx.weight(v);
    debug_assert_eq!(s % 2, 0, "not characteristic at vertex {v}");
    s / 2
}

/// Total exponent change from `k1` to `k2` along any lattice path.
pub fn path_weight(k1: &CharVector, k2: &CharVector, ctx: &QFormContext) -> Result<i64> {
    let x = pd_difference(k1, k2, ctx).ok_or(Error::NotSameClass)?;
    let pairing: i64 = k1.pairings().iter().zip(&x).map(|(a, b)| a * b).sum();
    let qx = ctx.matrix().apply(&x);
    let square: i64 = x.iter().zip(&qx).map(|(a, b)| a * b).sum();
    Ok((pairing + square) / 2)
}

/// States related to `state` by a single relation, in either direction.
pub fn relation_neighbors(state: &UState, ctx: &QFormContext) -> Vec<UState> {
    let mut out = Vec::new();
    let k = state.k.pairings();
    for v in 0..ctx.len() {
        let row = ctx.matrix().row(v);
        let m = ctx.weight(v);
        // forward: K -> K + 2PD[v], exponent + n
        let n = (k[v] + m) / 2;
        if let Some(a) = state.a.checked_add_signed(n) {
            let next = k.iter().zip(row).map(|(x, q)| x + 2 * q).collect();
            out.push(UState {
                a,
                k: CharVector::from_pairings_unchecked(next),
            });
        }
        // backward: K -> K - 2PD[v], exponent - n'
        let n_back = (k[v] - m) / 2;
        if let Some(a) = state.a.checked_add_signed(-n_back) {
            let prev = k.iter().zip(row).map(|(x, q)| x - 2 * q).collect();
            out.push(UState {
                a,
                k: CharVector::from_pairings_unchecked(prev),
            });
        }
    }
    out
}

/// `U^n ⊗ K₁ ~ U^m ⊗ K₂` with `n`, `m` as small as possible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalRelation {
    pub k1: CharVector,
    pub k2: CharVector,
    pub n: u64,
    pub m: u64,
}

/// Pairing bounds of the characteristic box widened by `2·expansion` on
/// both sides.
pub(crate) fn expanded_bounds(ctx: &QFormContext, expansion: u32) -> Vec<(i64, i64)> {
    let e = 2 * expansion as i64;
    ctx.forest()
        .weights()
        .iter()
        .map(|&m| (m + 2 - e, -m + e))
        .collect()
}

fn in_bounds(k: &[i64], bounds: &[(i64, i64)]) -> bool {
    k.iter().zip(bounds).all(|(&x, &(lo, hi))| lo <= x && x <= hi)
}

/// Finds the minimal relationship between `k1` and `k2` by a bottleneck
/// shortest-path search over lattice points of the expanded box.
///
/// The exponent offset `S(K) = (K² - K₁²)/8` is a function of the point, so
/// a path from `k1` needs a starting exponent of at least `-min S` along it.
/// The search minimizes that dip; then `n` is the dip and `m = n + S(K₂)`.
pub fn minimal_relation(
    k1: &CharVector,
    k2: &CharVector,
    ctx: &QFormContext,
    expansion: u32,
) -> Result<MinimalRelation> {
    ctx.require_negative_definite()?;
    let total = path_weight(k1, k2, ctx)?;
    let bounds = expanded_bounds(ctx, expansion);
    for k in [k1, k2] {
        if !in_bounds(k.pairings(), &bounds) {
            return Err(Error::OutsideBox(k.pairings().to_vec()));
        }
    }
    let weights = ctx.forest().weights();
    let target = k2.pairings();
    // best known dip per point, plus the point's offset S
    let mut best: HashMap<Vec<i64>, (u64, i64)> = HashMap::new();
    let mut heap = BinaryHeap::new();
    best.insert(k1.pairings().to_vec(), (0, 0));
    heap.push(Reverse((0u64, 0i64, k1.pairings().to_vec())));
    let mut settled = 0u64;
    while let Some(Reverse((dip, offset, k))) = heap.pop() {
        if best.get(&k).is_some_and(|&(d, _)| d < dip) {
            continue;
        }
        if k == target {
            debug_assert_eq!(offset, total);
            let n = dip;
            let m = u64::try_from(n as i64 + total).expect("endpoint offset is covered by the dip");
            return Ok(MinimalRelation {
                k1: k1.clone(),
                k2: k2.clone(),
                n,
                m,
            });
        }
        settled += 1;
        if settled > ctx.budget() {
            return Err(Error::Budget {
                needed: settled as u128,
                budget: ctx.budget(),
            });
        }
        for v in 0..ctx.len() {
            let row = ctx.matrix().row(v);
            let m = weights[v];
            let steps = [(1i64, (k[v] + m) / 2), (-1i64, -(k[v] - m) / 2)];
            for (sign, delta) in steps {
                let next: Vec<i64> = k.iter().zip(row).map(|(x, q)| x + 2 * sign * q).collect();
                if !in_bounds(&next, &bounds) {
                    continue;
                }
                let next_offset = offset + delta;
                let next_dip = dip.max(next_offset.min(0).unsigned_abs());
                let better = match best.get(&next) {
                    Some(&(d, _)) => next_dip < d,
                    None => true,
                };
                if better {
                    best.insert(next.clone(), (next_dip, next_offset));
                    heap.push(Reverse((next_dip, next_offset, next)));
                }
            }
        }
    }
    Err(Error::BoundExceeded(expansion))
}
