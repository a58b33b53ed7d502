use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::PlumbingForest;

/// The intersection form of `X(G)` on the vertex basis: weights on the
/// diagonal, 1 for each edge, 0 elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl IntersectionMatrix {
    pub fn of(forest: &PlumbingForest) -> Self {
        let n = forest.len();
        let mut entries = vec![0; n * n];
        for (v, &w) in forest.weights().iter().enumerate() {
            entries[v * n + v] = w;
        }
        for &(a, b) in forest.edges() {
            entries[a * n + b] = 1;
            entries[b * n + a] = 1;
        }
        IntersectionMatrix { n, entries }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// `Q x` for an integer vector `x`.
    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Integer type usable by the fraction-free elimination. Operations return
/// `None` on overflow so a fixed-width attempt can fall back to `BigInt`.
trait ElimInt: Clone {
    fn from_i64(v: i64) -> Self;
    fn mul(&self, other: &Self) -> Option<Self>;
    fn sub(&self, other: &Self) -> Option<Self>;
    fn div_exact(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;
    fn to_big(&self) -> BigInt;
}

impl ElimInt for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        self.checked_mul(*other)
    }
    fn sub(&self, other: &Self) -> Option<Self> {
        self.checked_sub(*other)
    }
    fn div_exact(&self, other: &Self) -> Self {
        debug_assert_eq!(self % other, 0);
        self / other
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl ElimInt for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        Some(self * other)
    }
    fn sub(&self, other: &Self) -> Option<Self> {
        Some(self - other)
    }
    fn div_exact(&self, other: &Self) -> Self {
        self / other
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

enum Elim<T> {
    /// Pivots of the elimination and whether rows were exchanged an odd
    /// number of times. Without exchanges the pivots are the leading
    /// principal minors.
    Pivots(Vec<T>, bool),
    Overflow,
}

/// Bareiss elimination. With `pivoting` the last pivot is the determinant
/// (sign-corrected); without it the run stops at the first zero pivot.
fn bareiss<T: ElimInt>(m: &IntersectionMatrix, pivoting: bool) -> Elim<T> {
    let n = m.size();
    let mut a: Vec<Vec<T>> = (0..n)
        .map(|i| m.row(i).iter().map(|&x| T::from_i64(x)).collect())
        .collect();
    let mut prev = T::from_i64(1);
    let mut pivots = Vec::with_capacity(n);
    let mut negated = false;
    for k in 0..n {
        if a[k][k].is_zero() {
            if !pivoting {
                pivots.push(a[k][k].clone());
                return Elim::Pivots(pivots, negated);
            }
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negated = !negated;
                }
                None => {
                    pivots.push(T::from_i64(0));
                    return Elim::Pivots(pivots, negated);
                }
            }
        }
        pivots.push(a[k][k].clone());
        for i in k + 1..n {
            for j in k + 1..n {
                let lhs = match a[i][j].mul(&a[k][k]) {
                    Some(x) => x,
                    None => return Elim::Overflow,
                };
                let rhs = match a[i][k].mul(&a[k][j]) {
                    Some(x) => x,
                    None => return Elim::Overflow,
                };
                let diff = match lhs.sub(&rhs) {
                    Some(x) => x,
                    None => return Elim::Overflow,
                };
                a[i][j] = diff.div_exact(&prev);
            }
            a[i][k] = T::from_i64(0);
        }
        prev = a[k][k].clone();
    }
    Elim::Pivots(pivots, negated)
}

/// Exact determinant by fraction-free elimination. Tries 128-bit integers
/// first and redoes the computation with big integers on overflow.
pub fn bareiss_determinant(m: &IntersectionMatrix) -> BigInt {
    if m.size() == 0 {
        return BigInt::one();
    }
    let (pivots, negated) = match bareiss::<i128>(m, true) {
        Elim::Pivots(p, neg) => (p.iter().map(ElimInt::to_big).collect::<Vec<_>>(), neg),
        Elim::Overflow => match bareiss::<BigInt>(m, true) {
            Elim::Pivots(p, neg) => (p, neg),
            Elim::Overflow => unreachable!("big integers do not overflow"),
        },
    };
    let det = if pivots.len() < m.size() {
        BigInt::zero()
    } else {
        pivots.last().cloned().unwrap_or_else(BigInt::one)
    };
    if negated {
        -det
    } else {
        det
    }
}

/// Leading principal minors `D_1, D_2, ...`, stopping after the first zero.
pub fn leading_minors(m: &IntersectionMatrix) -> Vec<BigInt> {
    match bareiss::<i128>(m, false) {
        Elim::Pivots(p, _) => p.iter().map(ElimInt::to_big).collect(),
        Elim::Overflow => match bareiss::<BigInt>(m, false) {
            Elim::Pivots(p, _) => p,
            Elim::Overflow => unreachable!("big integers do not overflow"),
        },
    }
}
