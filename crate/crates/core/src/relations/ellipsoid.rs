//! Lattice points of a spin^c class with bounded `-K²`.
//!
//! Write `K = K₀ + 2Qx`. With `A = -Q` and `c = A⁻¹K₀/2`,
//! `-K² = 4 (x-c)ᵀ A (x-c)`. On a forest, eliminating leaves first gives
//!
//! ```text
//! (x-c)ᵀ A (x-c) = Σ_v e(v) · (y_v - y_parent(v) / e(v))²,   y = x - c,
//! ```
//!
//! where `e(v) = |m(v)| - Σ_children 1/e(child)` (roots have no parent term).
//! Fixing coordinates root-first turns the ellipsoid into nested integer
//! intervals: a Fincke–Pohst search. With `e(v) = a_v/b_v`, `c_v = γ_v/2D`
//! and `L = lcm(a_v b_v)`, every quantity scaled by `4D²L` is an integer, so
//! the search itself runs in plain `i128` arithmetic.

use num_integer::{Integer, Roots};
use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::{CharVector, QFormContext};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePoint {
    pub k: Vec<i64>,
    /// `|det Q| · K²`, an integer.
    pub scaled_square: i128,
}

struct Search<'a> {
    ctx: &'a QFormContext,
    k0: &'a [i64],
    /// vertices, parents before children
    order: Vec<usize>,
    parent: Vec<Option<usize>>,
    /// `e(v) = a/b`
    a: Vec<i128>,
    b: Vec<i128>,
    /// `L / (a_v b_v)`
    w: Vec<i128>,
    gamma: Vec<i128>,
    two_d: i128,
    limit: i128,
    x: Vec<i64>,
    /// `2D·y_v = 2D x_v - γ_v`
    y2d: Vec<i128>,
    out: Vec<LatticePoint>,
}

impl Search<'_> {
    fn emit(&mut self) -> Result<()> {
        let mut k = self.k0.to_vec();
        for (v, &xv) in self.x.iter().enumerate() {
            if xv == 0 {
                continue;
            }
            for (kv, q) in k.iter_mut().zip(self.ctx.matrix().row(v)) {
                *kv += 2 * q * xv;
            }
        }
        let scaled_square = self.ctx.scaled_k_square(&k);
        debug_assert!(-scaled_square <= self.limit);
        if self.out.len() as u64 >= self.ctx.budget() {
            return Err(Error::Budget {
                needed: self.out.len() as u128 + 1,
                budget: self.ctx.budget(),
            });
        }
        self.out.push(LatticePoint { k, scaled_square });
        Ok(())
    }

    /// `room` is the remaining budget of `(x-c)ᵀA(x-c)`, scaled by `4D²L`.
    fn descend(&mut self, t: usize, room: i128) -> Result<()> {
        if t == self.order.len() {
            return self.emit();
        }
        let v = self.order[t];
        let (a, b, w) = (self.a[v], self.b[v], self.w[v]);
        // 2D·a·μ_v
        let centre = match self.parent[v] {
            Some(p) => a * self.gamma[v] + b * self.y2d[p],
            None => a * self.gamma[v],
        };
        let scale = self.two_d * a;
        // N = scale·x - centre, cost N²·w <= room
        let reach = (room / w).sqrt();
        let lo = -(reach - centre).div_euclid(scale);
        let hi = (centre + reach).div_euclid(scale);
        for xi in lo..=hi {
            let n = scale * xi - centre;
            let cost = n * n * w;
            debug_assert!(cost <= room);
            self.x[v] = i64::try_from(xi).map_err(|_| Error::Overflow)?;
            self.y2d[v] = self.two_d * xi - self.gamma[v];
            self.descend(t + 1, room - cost)?;
        }
        Ok(())
    }
}

/// All `K` in the class of `k0` with `-|det Q|·K² <= limit`.
///
/// The output order is deterministic but otherwise unspecified.
pub fn class_points(ctx: &QFormContext, k0: &CharVector, limit: i128) -> Result<Vec<LatticePoint>> {
    ctx.require_negative_definite()?;
    let forest = ctx.forest();
    let n = forest.len();
    if limit < 0 {
        return Ok(Vec::new());
    }
    let mut order = Vec::with_capacity(n);
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let first = order.len();
        order.push(root);
        let mut i = first;
        while i < order.len() {
            let v = order[i];
            for &w in forest.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(v);
                    order.push(w);
                }
            }
            i += 1;
        }
    }

    let mut effective = vec![Ratio::<i128>::zero(); n];
    for &v in order.iter().rev() {
        let mut e = Ratio::from_integer(-forest.weight(v) as i128);
        for &c in forest.neighbors(v) {
            if parent[c] == Some(v) {
                e -= effective[c].recip();
            }
        }
        debug_assert!(e > Ratio::zero());
        effective[v] = e;
    }
    let a: Vec<i128> = effective.iter().map(|e| *e.numer()).collect();
    let b: Vec<i128> = effective.iter().map(|e| *e.denom()).collect();
    let mut l = 1i128;
    for v in 0..n {
        let ab = a[v].checked_mul(b[v]).ok_or(Error::Overflow)?;
        l = (l / l.gcd(&ab)).checked_mul(ab).ok_or(Error::Overflow)?;
    }
    let w = (0..n).map(|v| l / (a[v] * b[v])).collect();

    // c = A⁻¹K₀/2 = -Q⁻¹K₀/2 = γ / 2D with γ = -(|det| Q⁻¹ K₀)
    let d = ctx.abs_det();
    let k0s = k0.pairings();
    let gamma = (0..n)
        .map(|i| -(0..n).map(|j| ctx.scaled_inverse(i, j) * k0s[j] as i128).sum::<i128>())
        .collect();

    // (x-c)ᵀA(x-c) <= limit / 4D, times 4D²L
    let room = limit
        .checked_mul(d)
        .and_then(|r| r.checked_mul(l))
        .ok_or(Error::Overflow)?;
    let mut search = Search {
        ctx,
        k0: k0s,
        order,
        parent,
        a,
        b,
        w,
        gamma,
        two_d: 2 * d,
        limit,
        x: vec![0; n],
        y2d: vec![0; n],
        out: Vec::new(),
    };
    search.descend(0, room)?;
    Ok(search.out)
}
