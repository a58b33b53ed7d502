//! Equivalence classes of `U^a ⊗ K` states, degree by degree.
//!
//! Degrees are kept as integers `Δ = 4|det Q|·δ = 8Da - D·K² - D|G|`
//! (`D = |det Q|`), so that every comparison is exact.
//!
//! A degree level is finite: `-D·K² <= Δ + D|G|`. The window reported for a
//! class is the set of levels that are *complete*, i.e. every state of the
//! level has `a <= max_u` and every lattice point of the level lies in the
//! expanded box. Since relations preserve degree, the count per level is
//! exact.

use num_rational::BigRational;
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::{class_points, expanded_bounds, in_bounds};
use crate::engine::{basic_vectors, d_invariants_from, ArStatus};
use crate::error::{Error, Result};
use crate::graph::Dsu;
use crate::lattice::{spinc_classes, CharVector, QFormContext, SpincClass};
use crate::rational::ratio;

/// Truncation parameters: maximal `U` power and box expansion `B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HfParams {
    pub max_u: u32,
    pub expansion: u32,
}

impl HfParams {
    /// `max_u = 8`, `expansion = 2|G|`.
    pub fn for_context(ctx: &QFormContext) -> Self {
        HfParams {
            max_u: 8,
            expansion: 2 * ctx.len() as u32,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassTable {
    pub class: SpincClass,
    /// Lowest degree present, `-(max K² + |G|)/4`.
    pub bottom: BigRational,
    /// `(degree, number of classes)` over the complete window, ascending.
    pub counts: Vec<(BigRational, usize)>,
    /// The two highest levels of the window each hold exactly one class.
    pub converged: bool,
    pub lattice_points: usize,
    pub states: usize,
}

impl ClassTable {
    pub fn reduced_rank(&self) -> usize {
        self.counts.iter().map(|(_, c)| c.saturating_sub(1)).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedTable {
    pub params: HfParams,
    pub classes: Vec<ClassTable>,
}

/// Lattice point lookup by box code; narrow keys when they fit.
enum PointIndex {
    Narrow(FxHashMap<u64, u32>),
    Wide(FxHashMap<i128, u32>),
}

impl PointIndex {
    fn new(codes: &[i128], span: i128) -> Self {
        let mut narrow = FxHashMap::default();
        let mut wide = FxHashMap::default();
        if span <= u64::MAX as i128 {
            narrow.reserve(codes.len());
            narrow.extend(codes.iter().enumerate().map(|(i, &c)| (c as u64, i as u32)));
            PointIndex::Narrow(narrow)
        } else {
            wide.reserve(codes.len());
            wide.extend(codes.iter().enumerate().map(|(i, &c)| (c, i as u32)));
            PointIndex::Wide(wide)
        }
    }

    fn get(&self, code: i128) -> Option<usize> {
        match self {
            PointIndex::Narrow(m) => m.get(&(code as u64)).map(|&i| i as usize),
            PointIndex::Wide(m) => m.get(&code).map(|&i| i as usize),
        }
    }
}

fn class_table(ctx: &QFormContext, class: &SpincClass, params: HfParams) -> Result<ClassTable> {
    let d = ctx.abs_det();
    let g = ctx.len() as i128;
    let step = 8 * d;
    let rep = &class.representative;
    let to_degree = |delta: i128| ratio(delta, 4 * d);

    // maximal K² in the class, searched inside the shell of the representative
    let k_max = class_points(ctx, rep, -ctx.scaled_k_square(rep.pairings()))?
        .iter()
        .map(|p| p.scaled_square)
        .max()
        .expect("the representative itself is found");
    let bottom = -k_max - g * d;
    let top_by_u = step * params.max_u as i128 + bottom;

    // every point that could appear at a level up to top_by_u
    let bounds = expanded_bounds(ctx, params.expansion);
    let shell = class_points(ctx, rep, top_by_u + g * d)?;
    let first_outside = shell
        .iter()
        .filter(|p| !in_bounds(&p.k, &bounds))
        .map(|p| -p.scaled_square)
        .min();
    // level Δ is complete iff Δ + D|G| < first_outside
    let top_by_box = match first_outside {
        Some(r) => r - g * d - 1,
        None => top_by_u,
    };
    let cap = top_by_u.min(top_by_box);
    let top = if cap < bottom {
        None
    } else {
        Some(bottom + (cap - bottom).div_euclid(step) * step)
    };
    let Some(top) = top else {
        return Ok(ClassTable {
            class: class.clone(),
            bottom: to_degree(bottom),
            counts: Vec::new(),
            converged: false,
            lattice_points: 0,
            states: 0,
        });
    };

    let points: Vec<_> = shell
        .into_iter()
        .filter(|p| -p.scaled_square <= top + g * d)
        .collect();
    // points are keyed by their mixed-radix position in the expanded box
    let mut radix = Vec::with_capacity(bounds.len());
    let mut span = 1i128;
    for &(lo, hi) in &bounds {
        radix.push(span);
        span = span
            .checked_mul(((hi - lo) / 2 + 1) as i128)
            .ok_or(Error::Overflow)?;
    }
    let code = |k: &[i64]| -> i128 {
        k.iter()
            .zip(&bounds)
            .zip(&radix)
            .map(|((&x, &(lo, _)), &r)| ((x - lo) / 2) as i128 * r)
            .sum()
    };
    let codes: Vec<i128> = points.iter().map(|p| code(&p.k)).collect();
    let index = PointIndex::new(&codes, span);
    // a point carries one state per level from the one where it enters
    // (a = 0) upwards; states (a, K) with 8Da - D·K² - D|G| <= top
    let enters: Vec<i128> = points.iter().map(|p| -p.scaled_square - g * d).collect();
    let states: usize = enters.iter().map(|&e| ((top - e) / step + 1) as usize).sum();

    // Relations preserve degree, so at level Δ the states are exactly the
    // points that have entered, and the relations are the lattice edges
    // between two entered points. Sweep the levels upwards, adding points
    // and edges as they enter; classes at Δ are the components so far.
    let weights = ctx.forest().weights();
    let forest = ctx.forest();
    let levels = ((top - bottom) / step + 1) as usize;
    let bucket = |entry: i128| ((entry - bottom) / step) as usize;
    // edges and points grouped by the level at which they enter
    let mut edges: Vec<Vec<(u32, u32)>> = vec![Vec::new(); levels];
    let mut arrivals = vec![0usize; levels];
    for &e in &enters {
        arrivals[bucket(e)] += 1;
    }
    for (i, p) in points.iter().enumerate() {
        'vertex: for v in 0..ctx.len() {
            // K + 2PD[v] moves coordinate v by 2m(v) and each neighbour by 2
            let mut next = codes[i] + weights[v] as i128 * radix[v];
            if p.k[v] + 2 * weights[v] < bounds[v].0 {
                continue;
            }
            for &u in forest.neighbors(v) {
                if p.k[u] + 2 > bounds[u].1 {
                    continue 'vertex;
                }
                next += radix[u];
            }
            let Some(j) = index.get(next) else { continue };
            let n = ((p.k[v] + weights[v]) / 2) as i128;
            // degree is preserved: 8D·n = D·K'² - D·K²
            if step * n != points[j].scaled_square - p.scaled_square {
                return Err(Error::Verification(format!(
                    "relation at vertex {v} changes the degree of {:?}",
                    p.k
                )));
            }
            edges[bucket(enters[i].max(enters[j]))].push((i as u32, j as u32));
        }
    }

    let mut dsu = Dsu::new(points.len());
    let mut components = 0usize;
    let mut counts = Vec::with_capacity(levels);
    for (b, level_edges) in edges.iter().enumerate() {
        components += arrivals[b];
        for &(i, j) in level_edges {
            if dsu.union(i as usize, j as usize) {
                components -= 1;
            }
        }
        counts.push((to_degree(bottom + b as i128 * step), components));
    }
    // a lone level proves nothing; ask for two single-class levels on top
    let converged = counts.len() >= 2 && counts[counts.len() - 2..].iter().all(|&(_, c)| c == 1);
    Ok(ClassTable {
        class: class.clone(),
        bottom: to_degree(bottom),
        counts,
        converged,
        lattice_points: points.len(),
        states,
    })
}

/// Degree-wise class counts of the truncated complex, one table per spin^c
/// class.
pub fn truncated_classes(ctx: &QFormContext, params: HfParams) -> Result<GradedTable> {
    ctx.require_negative_definite()?;
    let classes = spinc_classes(ctx)?;
    let tables = classes
        .par_iter()
        .map(|c| class_table(ctx, c, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(GradedTable {
        params,
        classes: tables,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSummary {
    pub class: usize,
    pub representative: CharVector,
    /// Bottom of the tower, which is `d(-Y, t)`.
    pub bottom: BigRational,
    /// `d(Y, t)` from basic vectors.
    pub d: BigRational,
    pub d_agrees: bool,
    pub reduced_rank: usize,
    pub counts: Vec<(BigRational, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HfSummary {
    pub params: HfParams,
    pub classes: Vec<ClassSummary>,
    pub total_reduced_rank: usize,
    /// The graph is almost rational, so the counts are Heegaard Floer
    /// ranks; otherwise they are those of the combinatorial model only.
    pub certified: bool,
}

/// Tower bottoms and reduced ranks. Fails with [`Error::Unconverged`] when
/// some class has not reached a single-class level inside the window.
pub fn hf_summary(ctx: &QFormContext, params: HfParams, ar: &ArStatus) -> Result<HfSummary> {
    let table = truncated_classes(ctx, params)?;
    if table.classes.iter().any(|c| !c.converged) {
        return Err(Error::Unconverged {
            max_u: params.max_u,
            expansion: params.expansion,
        });
    }
    let basic = basic_vectors(ctx)?;
    let d = d_invariants_from(ctx, &basic)?;
    let classes: Vec<_> = table
        .classes
        .into_iter()
        .zip(d)
        .map(|(t, d)| {
            debug_assert_eq!(t.class.index, d.class);
            ClassSummary {
                class: t.class.index,
                reduced_rank: t.reduced_rank(),
                d_agrees: t.bottom == d.d_minus,
                representative: t.class.representative,
                bottom: t.bottom,
                d: d.d,
                counts: t.counts,
            }
        })
        .collect();
    Ok(HfSummary {
        params,
        total_reduced_rank: classes.iter().map(|c| c.reduced_rank).sum(),
        classes,
        certified: ar.is_yes(),
    })
}
