//! Domain records shared by the scan, sieve and catalog modules.

use crate::exact::binom;
use num_bigint::BigUint;
use num_traits::Zero;

/// One binomial coefficient, identified by row `n` and entry index `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinomPair {
    pub n: u64,
    pub k: u64,
}

impl BinomPair {
    pub fn new(n: u64, k: u64) -> Self {
        BinomPair { n, k }
    }

    /// The normalization admitted to searches: `2 <= k <= n/2`.
    pub fn is_admissible(&self) -> bool {
        self.k >= 2 && 2 * self.k <= self.n
    }

    /// Diagonal index `n - k`; the scan table is indexed by it.
    pub fn diagonal(&self) -> u64 {
        self.n - self.k
    }

    pub fn value(&self) -> BigUint {
        binom(self.n, self.k)
    }
}

/// An exact collision `C(n,k) = C(m,l)` with `k < l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionRecord {
    pub n: u64,
    pub k: u64,
    pub m: u64,
    pub l: u64,
    pub value: BigUint,
}

impl CollisionRecord {
    /// Builds a record from two equal-valued pairs, orienting so `k < l`.
    /// Equal values force distinct indices, so the order is well defined.
    pub fn from_pairs(a: BinomPair, b: BinomPair, value: BigUint) -> Self {
        debug_assert_ne!(a.k, b.k, "equal values cannot share an index");
        let (first, second) = if a.k < b.k { (a, b) } else { (b, a) };
        CollisionRecord {
            n: first.n,
            k: first.k,
            m: second.n,
            l: second.k,
            value,
        }
    }
}

/// A near collision: `C(m,l) - C(n,k) = d > 0` with `C(m,l) >= d^e`.
/// `(n,k)` is always the smaller side; no `k < l` order is imposed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NearCollisionRecord {
    pub n: u64,
    pub k: u64,
    pub m: u64,
    pub l: u64,
    pub d: BigUint,
    /// The larger side `C(m,l)`.
    pub value: BigUint,
}

/// Result of [`classify_pair`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairClass {
    Collision,
    NearCollision(BigUint),
    Neither,
}

/// Classifies two admissible pairs: equal values collide; a positive
/// difference `d` with `max >= d^near_exponent` is a near collision.
pub fn classify_pair(a: &BinomPair, b: &BinomPair, near_exponent: u32) -> PairClass {
    debug_assert!(a.is_admissible() && b.is_admissible());
    debug_assert_ne!(a, b);
    let va = a.value();
    let vb = b.value();
    if va == vb {
        return PairClass::Collision;
    }
    let (lo, hi) = if va < vb { (&va, &vb) } else { (&vb, &va) };
    let d = hi - lo;
    if !d.is_zero() && d.pow(near_exponent) <= *hi {
        PairClass::NearCollision(d)
    } else {
        PairClass::Neither
    }
}
