//! Basic characteristic vectors and the verdicts built on them.
//!
//! Starting from a box vector `K` (`m(v)+2 <= ⟨K,v⟩ <= -m(v)`), repeatedly
//! pick a vertex with `⟨K,v⟩ = -m(v)` and replace `K` by `K + 2PD[v]`. The
//! run stops either inside the shifted box `m(v) <= ⟨L,v⟩ <= -m(v)-2`
//! (the initial vector is *basic*) or as soon as some `⟨K,v⟩ > -m(v)`.
//! Basic vectors correspond to the generators of the dual module with no
//! positive `U`-power representative.

use num_integer::Integer;
use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{
    canonical_char, k_square, spinc_partition, CharVector, QFormContext, SpincClass,
};
use crate::rational::ratio;

/// Picks the next vertex among those with `⟨K,v⟩ = -m(v)`.
pub trait Strategy {
    fn choose(&mut self, candidates: &[usize]) -> usize;
}

/// Lowest vertex index; the default everywhere outside tests.
#[derive(Clone, Copy, Debug, Default)]
pub struct LowestIndex;

impl Strategy for LowestIndex {
    fn choose(&mut self, candidates: &[usize]) -> usize {
        candidates[0]
    }
}

/// Uniformly random choice.
#[derive(Clone, Debug)]
pub struct RandomChoice<R>(pub R);

impl<R: Rng> Strategy for RandomChoice<R> {
    fn choose(&mut self, candidates: &[usize]) -> usize {
        candidates[self.0.gen_range(0..candidates.len())]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Terminated in the shifted box at `L`.
    Basic(CharVector),
    /// `⟨K_n, v⟩ > -m(v)` at this vertex.
    Overflow { vertex: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TerminationResult {
    pub outcome: Outcome,
    pub steps: u64,
}

impl TerminationResult {
    pub fn is_basic(&self) -> bool {
        matches!(self.outcome, Outcome::Basic(_))
    }
}

fn safety_limit(ctx: &QFormContext) -> u64 {
    ctx.box_size().saturating_mul(10).min(u64::MAX as u128) as u64
}

pub fn run_path(
    k: &CharVector,
    ctx: &QFormContext,
    strategy: &mut impl Strategy,
) -> Result<TerminationResult> {
    ctx.require_negative_definite()?;
    if k.len() != ctx.len() || !ctx.in_part_box(k) {
        return Err(Error::OutsideBox(k.pairings().to_vec()));
    }
    run_unchecked(k.pairings().to_vec(), ctx, strategy, safety_limit(ctx))
}

fn run_unchecked(
    mut cur: Vec<i64>,
    ctx: &QFormContext,
    strategy: &mut impl Strategy,
    limit: u64,
) -> Result<TerminationResult> {
    let weights = ctx.forest().weights();
    let mut candidates = Vec::with_capacity(cur.len());
    let mut steps = 0u64;
    loop {
        candidates.clear();
        for (v, (&x, &m)) in cur.iter().zip(weights).enumerate() {
            if x > -m {
                return Ok(TerminationResult {
                    outcome: Outcome::Overflow { vertex: v },
                    steps,
                });
            }
            debug_assert!(x >= m);
            if x == -m {
                candidates.push(v);
            }
        }
        if candidates.is_empty() {
            return Ok(TerminationResult {
                outcome: Outcome::Basic(CharVector::from_pairings_unchecked(cur)),
                steps,
            });
        }
        if steps >= limit {
            return Err(Error::SafetyLimit(limit));
        }
        let v = strategy.choose(&candidates);
        let row = ctx.matrix().row(v);
        for (x, q) in cur.iter_mut().zip(row) {
            *x += 2 * q;
        }
        steps += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicVector {
    pub initial: CharVector,
    pub terminal: CharVector,
    pub steps: u64,
}

#[derive(Clone, Debug)]
pub struct ClassBasics {
    pub class: SpincClass,
    /// Sorted by initial vector.
    pub basic: Vec<BasicVector>,
    pub overflow: u64,
    pub box_count: u64,
}

#[derive(Clone, Debug)]
pub struct BasicSet {
    pub classes: Vec<ClassBasics>,
    pub box_size: u64,
    /// Index of the class containing the canonical vector.
    pub canonical_class: usize,
}

impl BasicSet {
    pub fn total_basic(&self) -> usize {
        self.classes.iter().map(|c| c.basic.len()).sum()
    }

    pub fn spinc_count(&self) -> usize {
        self.classes.len()
    }

    pub fn total_overflow(&self) -> u64 {
        self.classes.iter().map(|c| c.overflow).sum()
    }
}

#[derive(Clone)]
struct Tally {
    basic: Vec<Vec<BasicVector>>,
    overflow: Vec<u64>,
    count: Vec<u64>,
}

impl Tally {
    fn new(n: usize) -> Self {
        Tally {
            basic: vec![Vec::new(); n],
            overflow: vec![0; n],
            count: vec![0; n],
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (i, b) in other.basic.into_iter().enumerate() {
            self.basic[i].extend(b);
            self.overflow[i] += other.overflow[i];
            self.count[i] += other.count[i];
        }
        self
    }
}

/// Runs the path algorithm from every box vector and groups the basic
/// ones by spin^c class.
pub fn basic_vectors(ctx: &QFormContext) -> Result<BasicSet> {
    let size = ctx.checked_box_size()?;
    let partition = spinc_partition(ctx)?;
    let n_classes = partition.len();
    let limit = safety_limit(ctx);
    let tally = (0..size)
        .into_par_iter()
        .try_fold(
            || Tally::new(n_classes),
            |mut acc, i| -> Result<Tally> {
                let k = ctx.box_vector(i);
                let class = partition
                    .class_of(&k, ctx)
                    .expect("box vectors belong to listed classes");
                acc.count[class] += 1;
                let res = run_unchecked(k.pairings().to_vec(), ctx, &mut LowestIndex, limit)?;
                match res.outcome {
                    Outcome::Basic(terminal) => acc.basic[class].push(BasicVector {
                        initial: k,
                        terminal,
                        steps: res.steps,
                    }),
                    Outcome::Overflow { .. } => acc.overflow[class] += 1,
                }
                Ok(acc)
            },
        )
        .try_reduce(|| Tally::new(n_classes), |a, b| Ok(a.merge(b)))?;
    let canonical_class = partition
        .class_of(&canonical_char(ctx), ctx)
        .expect("the canonical vector lies in the box");
    let classes = partition
        .classes
        .into_iter()
        .zip(tally.basic)
        .zip(tally.overflow.into_iter().zip(tally.count))
        .map(|((class, mut basic), (overflow, box_count))| {
            basic.sort_by(|a, b| a.initial.cmp(&b.initial));
            ClassBasics {
                class,
                basic,
                overflow,
                box_count,
            }
        })
        .collect();
    Ok(BasicSet {
        classes,
        box_size: size,
        canonical_class,
    })
}

/// Number of basic vectors in the canonical class, counting no further
/// than `stop_at`.
///
/// The box is walked in lexicographic order while `|det Q|·Q⁻¹k` is updated
/// one coordinate step at a time, so class membership costs `O(|V|)` per
/// vector instead of a matrix product.
pub fn canonical_basic_count(ctx: &QFormContext, stop_at: usize) -> Result<usize> {
    ctx.checked_box_size()?;
    let n = ctx.len();
    let weights = ctx.forest().weights();
    let modulus = 2 * ctx.abs_det();
    let limit = safety_limit(ctx);
    // the walk starts at the canonical vector, so membership means the
    // running offset vanishes mod 2|det| (always true when |det| = 1)
    let mut k: Vec<i64> = weights.iter().map(|m| m + 2).collect();
    let mut offset = vec![0i128; n];
    let mut found = 0;
    loop {
        if offset.iter().all(|x| x.rem_euclid(modulus) == 0)
            && run_unchecked(k.clone(), ctx, &mut LowestIndex, limit)?.is_basic()
        {
            found += 1;
            if found >= stop_at {
                return Ok(found);
            }
        }
        // last coordinate fastest
        let mut v = n;
        loop {
            if v == 0 {
                return Ok(found);
            }
            v -= 1;
            let delta = if k[v] < -weights[v] { 2 } else { 2 * weights[v] + 2 };
            k[v] += delta;
            if modulus > 2 {
                for (i, o) in offset.iter_mut().enumerate() {
                    *o += ctx.scaled_inverse(i, v) * delta as i128;
                }
            }
            if delta > 0 {
                break;
            }
        }
    }
}

/// Rational iff the canonical spin^c class has exactly one basic vector.
pub fn is_rational(ctx: &QFormContext) -> Result<bool> {
    Ok(canonical_basic_count(ctx, 2)? == 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArStatus {
    /// Lowering `m(vertex)` by `delta` gives a rational graph.
    Yes { vertex: usize, delta: i64 },
    /// No witness with `delta <= bound`.
    Unknown { bound: i64 },
}

impl ArStatus {
    pub fn is_yes(&self) -> bool {
        matches!(self, ArStatus::Yes { .. })
    }
}

/// `|V| + Σ |m(v)|`.
pub fn default_ar_bound(ctx: &QFormContext) -> i64 {
    ctx.len() as i64 + ctx.forest().weights().iter().map(|m| m.abs()).sum::<i64>()
}

/// Searches for a vertex whose weight, lowered by some `δ <= bound`, makes
/// the graph rational. Vertices are tried in order, `δ` increasing; a
/// lowered graph that exceeds the enumeration budget ends the scan at that
/// vertex.
pub fn ar_status(ctx: &QFormContext, bound: i64) -> Result<ArStatus> {
    ctx.require_negative_definite()?;
    for v in 0..ctx.len() {
        for delta in 1..=bound {
            let lowered = ctx.with_weight(v, ctx.weight(v) - delta)?;
            match is_rational(&lowered) {
                Ok(true) => return Ok(ArStatus::Yes { vertex: v, delta }),
                Ok(false) => {}
                Err(Error::Budget { .. }) => break,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(ArStatus::Unknown { bound })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LSpaceVerdict {
    pub lspace: bool,
    /// The almost-rational hypothesis was witnessed, so the count criterion
    /// speaks about Heegaard Floer homology and not only the lattice module.
    pub certified: bool,
    pub basic_count: usize,
    pub spinc_count: usize,
}

pub fn is_lspace(ctx: &QFormContext, ar_bound: i64) -> Result<LSpaceVerdict> {
    let basic = basic_vectors(ctx)?;
    let ar = ar_status(ctx, ar_bound)?;
    Ok(lspace_from(&basic, &ar))
}

fn lspace_from(basic: &BasicSet, ar: &ArStatus) -> LSpaceVerdict {
    LSpaceVerdict {
        lspace: basic.total_basic() == basic.spinc_count(),
        certified: ar.is_yes(),
        basic_count: basic.total_basic(),
        spinc_count: basic.spinc_count(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdicts {
    pub lspace: LSpaceVerdict,
    pub rational: bool,
    pub ar: ArStatus,
}

/// All verdicts from one pass over the box plus the AR scan.
pub fn verdicts(ctx: &QFormContext, ar_bound: i64) -> Result<Verdicts> {
    let basic = basic_vectors(ctx)?;
    verdicts_from(ctx, &basic, ar_bound)
}

pub fn verdicts_from(ctx: &QFormContext, basic: &BasicSet, ar_bound: i64) -> Result<Verdicts> {
    let rational = basic.classes[basic.canonical_class].basic.len() == 1;
    let ar = ar_status(ctx, ar_bound)?;
    Ok(Verdicts {
        lspace: lspace_from(basic, &ar),
        rational,
        ar,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DInvariant {
    pub class: usize,
    /// `d(Y(G), 𝔱) = max (K² + |G|) / 4` over basic `K` in the class.
    pub d: BigRational,
    /// `d(-Y(G), 𝔱) = -d(Y(G), 𝔱)`, the tower bottom of `HF⁺(-Y(G))`.
    pub d_minus: BigRational,
}

pub fn d_invariants(ctx: &QFormContext) -> Result<Vec<DInvariant>> {
    d_invariants_from(ctx, &basic_vectors(ctx)?)
}

pub fn d_invariants_from(ctx: &QFormContext, basic: &BasicSet) -> Result<Vec<DInvariant>> {
    let n = ratio(ctx.len() as i128, 1);
    basic
        .classes
        .iter()
        .map(|c| {
            let d = c
                .basic
                .iter()
                .map(|b| (k_square(&b.initial, ctx) + &n) / ratio(4, 1))
                .max()
                .ok_or_else(|| {
                    Error::Verification(format!("spin^c class {} has no basic vector", c.class.index))
                })?;
            Ok(DInvariant {
                class: c.class.index,
                d_minus: -d.clone(),
                d,
            })
        })
        .collect()
}

/// Correction terms of lens spaces by the classical recursion
/// `d(-L(p,q), i) = ((2i+1-p-q)² - pq) / (4pq) - d(-L(q, p mod q), i mod q)`,
/// with `d(-L(1,0), 0) = 0`. The tail enters with a minus sign: one level of
/// the recursion reverses orientation.
pub fn lens_d_oracle(p: i64, q: i64, i: i64) -> Result<BigRational> {
    let invalid = Error::InvalidLens { p, q, i };
    if p == 1 {
        return if i == 0 { Ok(ratio(0, 1)) } else { Err(invalid) };
    }
    if !(0 < q && q < p && p.gcd(&q) == 1 && 0 <= i && i < p) {
        return Err(invalid);
    }
    let (p128, q128) = (p as i128, q as i128);
    let t = 2 * i as i128 + 1 - p128 - q128;
    let head = ratio(t * t - p128 * q128, 4 * p128 * q128);
    let r = p % q;
    let tail = if q == 1 {
        ratio(0, 1)
    } else {
        lens_d_oracle(q, r, i % q)?
    };
    Ok(head - tail)
}
