//! Characteristic vectors, spin^c orbits and the square `K²`.
//!
//! A characteristic vector `K` is stored by its pairings `k_v = ⟨K, v⟩`, so
//! `K + 2PD[v]` changes `k` by twice the `v`-th row of `Q`. Coordinates in
//! the Poincaré-dual basis are only recovered when needed, by exact solves
//! against `|det Q| · Q⁻¹`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::{bareiss_determinant, is_negative_definite, IntersectionMatrix, PlumbingForest};
use crate::rational::ratio;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// A characteristic vector in pairing coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CharVector(Vec<i64>);

impl CharVector {
    /// Checks the parity condition `k_v ≡ m(v) (mod 2)`.
    pub fn new(pairings: Vec<i64>, ctx: &QFormContext) -> Result<Self> {
        let ok = pairings.len() == ctx.len()
            && pairings
                .iter()
                .zip(ctx.forest().weights())
                .all(|(k, m)| (k - m).rem_euclid(2) == 0);
        if ok {
            Ok(CharVector(pairings))
        } else {
            Err(Error::NotCharacteristic(pairings))
        }
    }

    pub fn from_pairings_unchecked(pairings: Vec<i64>) -> Self {
        CharVector(pairings)
    }

    pub fn pairings(&self) -> &[i64] {
        &self.0
    }

    pub fn into_pairings(self) -> Vec<i64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: usize) -> i64 {
        self.0[v]
    }
}

impl fmt::Display for CharVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// One spin^c structure on `Y(G)`: an orbit of `Char(G)` under `2·Q·ℤ^V`,
/// represented by its lexicographically smallest box vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpincClass {
    pub index: usize,
    pub representative: CharVector,
}

/// The intersection form together with its exact inverse.
#[derive(Clone, Debug)]
pub struct QFormContext {
    forest: PlumbingForest,
    matrix: IntersectionMatrix,
    det: BigInt,
    abs_det: i128,
    /// `|det Q| · Q⁻¹`, row-major; an integer matrix.
    scaled_inverse: Vec<i128>,
    negative_definite: bool,
    budget: u64,
}

impl QFormContext {
    /// Requires a nondegenerate form.
    pub fn new(forest: &PlumbingForest) -> Result<Self> {
        let matrix = IntersectionMatrix::of(forest);
        let det = bareiss_determinant(&matrix);
        if det.is_zero() {
            return Err(Error::Degenerate);
        }
        let n = forest.len();
        let inverse = rational_inverse(&matrix);
        let abs_det_big = det.abs();
        let mut scaled_inverse = Vec::with_capacity(n * n);
        for row in &inverse {
            for x in row {
                let scaled = x * BigRational::from_integer(abs_det_big.clone());
                debug_assert!(scaled.is_integer());
                scaled_inverse.push(scaled.to_integer().to_i128().ok_or(Error::Overflow)?);
            }
        }
        let abs_det = abs_det_big.to_i128().ok_or(Error::Overflow)?;
        let ctx = QFormContext {
            forest: forest.clone(),
            negative_definite: is_negative_definite(forest),
            matrix,
            det,
            abs_det,
            scaled_inverse,
            budget: DEFAULT_BUDGET,
        };
        debug_assert!(ctx.inverse_is_exact());
        Ok(ctx)
    }

    /// Requires a negative-definite form.
    pub fn negative_definite(forest: &PlumbingForest) -> Result<Self> {
        let ctx = Self::new(forest).map_err(|e| match e {
            Error::Degenerate => Error::NotNegativeDefinite,
            e => e,
        })?;
        ctx.require_negative_definite()?;
        Ok(ctx)
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Context for the same graph with `m(v)` replaced, keeping the budget.
    pub fn with_weight(&self, v: usize, weight: i64) -> Result<Self> {
        if v >= self.len() {
            return Err(Error::NoSuchVertex(v));
        }
        Ok(Self::new(&self.forest.with_weight(v, weight))?.with_budget(self.budget))
    }

    pub fn forest(&self) -> &PlumbingForest {
        &self.forest
    }

    pub fn matrix(&self) -> &IntersectionMatrix {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.forest.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forest.is_empty()
    }

    pub fn weight(&self, v: usize) -> i64 {
        self.forest.weight(v)
    }

    pub fn det(&self) -> &BigInt {
        &self.det
    }

    pub fn abs_det(&self) -> i128 {
        self.abs_det
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn is_negative_definite(&self) -> bool {
        self.negative_definite
    }

    pub fn require_negative_definite(&self) -> Result<()> {
        if self.negative_definite {
            Ok(())
        } else {
            Err(Error::NotNegativeDefinite)
        }
    }

    /// Entry `(i, j)` of `|det Q| · Q⁻¹`.
    pub fn scaled_inverse(&self, i: usize, j: usize) -> i128 {
        self.scaled_inverse[i * self.len() + j]
    }

    /// `Q⁻¹` as exact rationals.
    pub fn inverse(&self) -> Vec<Vec<BigRational>> {
        let n = self.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| ratio(self.scaled_inverse(i, j), self.abs_det))
                    .collect()
            })
            .collect()
    }

    /// Checks `Q · Q⁻¹ = I` exactly.
    pub fn inverse_is_exact(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let s: i128 = (0..n)
                    .map(|k| self.matrix.get(i, k) as i128 * self.scaled_inverse(k, j))
                    .sum();
                s == if i == j { self.abs_det } else { 0 }
            })
        })
    }

    /// `|det Q| · K²`, an integer.
    pub fn scaled_k_square(&self, k: &[i64]) -> i128 {
        let n = self.len();
        let mut total = 0i128;
        for i in 0..n {
            if k[i] == 0 {
                continue;
            }
            let row = &self.scaled_inverse[i * n..(i + 1) * n];
            let dot: i128 = row.iter().zip(k).map(|(s, &x)| s * x as i128).sum();
            total += k[i] as i128 * dot;
        }
        total
    }

    /// A vector identifying the spin^c class: `|det Q| · Q⁻¹ k` reduced
    /// modulo `2|det Q|`.
    pub fn class_key(&self, k: &[i64]) -> Vec<i128> {
        let n = self.len();
        let modulus = 2 * self.abs_det;
        (0..n)
            .map(|i| {
                let row = &self.scaled_inverse[i * n..(i + 1) * n];
                let dot: i128 = row.iter().zip(k).map(|(s, &x)| s * x as i128).sum();
                dot.rem_euclid(modulus)
            })
            .collect()
    }

    /// Number of vectors in the characteristic box, `∏ |m(v)|`.
    pub fn box_size(&self) -> u128 {
        self.forest
            .weights()
            .iter()
            .map(|&m| m.unsigned_abs() as u128)
            .product()
    }

    /// Box size, or an error when it exceeds the enumeration budget.
    pub fn checked_box_size(&self) -> Result<u64> {
        self.require_negative_definite()?;
        let size = self.box_size();
        if size > self.budget as u128 {
            return Err(Error::Budget {
                needed: size,
                budget: self.budget,
            });
        }
        Ok(size as u64)
    }

    /// The `index`-th box vector in lexicographic order.
    pub fn box_vector(&self, mut index: u64) -> CharVector {
        let w = self.forest.weights();
        let mut k = vec![0i64; w.len()];
        for v in (0..w.len()).rev() {
            let radix = w[v].unsigned_abs();
            let digit = (index % radix) as i64;
            index /= radix;
            k[v] = w[v] + 2 + 2 * digit;
        }
        CharVector(k)
    }

    /// Pairings satisfy `m(v) + 2 <= k_v <= -m(v)` everywhere.
    pub fn in_part_box(&self, k: &CharVector) -> bool {
        k.0.iter()
            .zip(self.forest.weights())
            .all(|(&x, &m)| m + 2 <= x && x <= -m)
    }
}

fn rational_inverse(m: &IntersectionMatrix) -> Vec<Vec<BigRational>> {
    let n = m.size();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = m
                .row(i)
                .iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect();
            row.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("nondegenerate matrix");
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in 0..2 * n {
                    let delta = &factor * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
    }
    a.into_iter().map(|row| row[n..].to_vec()).collect()
}

/// All vectors with `k_v ∈ {m(v)+2, m(v)+4, …, -m(v)}`, sorted.
pub fn char_box(ctx: &QFormContext) -> Result<Vec<CharVector>> {
    let size = ctx.checked_box_size()?;
    Ok((0..size).map(|i| ctx.box_vector(i)).collect())
}

/// `K + 2PD[v]`.
pub fn add_pd(k: &CharVector, v: usize, ctx: &QFormContext) -> CharVector {
    let row = ctx.matrix().row(v);
    CharVector(k.0.iter().zip(row).map(|(x, q)| x + 2 * q).collect())
}

/// Integer solution `x` of `Q x = (k2 - k1) / 2`, if one exists.
pub fn pd_difference(k1: &CharVector, k2: &CharVector, ctx: &QFormContext) -> Option<Vec<i64>> {
    let n = ctx.len();
    let mut half = Vec::with_capacity(n);
    for (a, b) in k1.0.iter().zip(&k2.0) {
        let d = b - a;
        if d % 2 != 0 {
            return None;
        }
        half.push(d / 2);
    }
    let d = ctx.abs_det();
    let mut x = Vec::with_capacity(n);
    for i in 0..n {
        let s: i128 = (0..n)
            .map(|j| ctx.scaled_inverse(i, j) * half[j] as i128)
            .sum();
        if s % d != 0 {
            return None;
        }
        x.push((s / d).to_i64()?);
    }
    Some(x)
}

pub fn same_spinc(k1: &CharVector, k2: &CharVector, ctx: &QFormContext) -> bool {
    pd_difference(k1, k2, ctx).is_some()
}

/// The box partitioned into spin^c classes.
#[derive(Clone, Debug)]
pub struct SpincPartition {
    pub classes: Vec<SpincClass>,
    keys: HashMap<Vec<i128>, usize>,
}

impl SpincPartition {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Index of the class containing `k` (any characteristic vector).
    pub fn class_of(&self, k: &CharVector, ctx: &QFormContext) -> Option<usize> {
        self.keys.get(&ctx.class_key(&k.0)).copied()
    }
}

pub fn spinc_partition(ctx: &QFormContext) -> Result<SpincPartition> {
    let size = ctx.checked_box_size()?;
    let mut keys = HashMap::new();
    let mut classes = Vec::new();
    for i in 0..size {
        let k = ctx.box_vector(i);
        let key = ctx.class_key(&k.0);
        keys.entry(key).or_insert_with(|| {
            classes.push(SpincClass {
                index: classes.len(),
                representative: k,
            });
            classes.len() - 1
        });
    }
    Ok(SpincPartition { classes, keys })
}

/// Spin^c classes met by the box, ordered by representative.
pub fn spinc_classes(ctx: &QFormContext) -> Result<Vec<SpincClass>> {
    Ok(spinc_partition(ctx)?.classes)
}

/// `k_v = m(v) + 2`.
pub fn canonical_char(ctx: &QFormContext) -> CharVector {
    CharVector(ctx.forest().weights().iter().map(|m| m + 2).collect())
}

/// `K² = kᵀ Q⁻¹ k`.
pub fn k_square(k: &CharVector, ctx: &QFormContext) -> BigRational {
    ratio(ctx.scaled_k_square(&k.0), ctx.abs_det())
}

/// `K ↦ -K`.
pub fn conjugate(k: &CharVector) -> CharVector {
    CharVector(k.0.iter().map(|x| -x).collect())
}
