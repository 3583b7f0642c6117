//! Exact arbitrary-precision binomial coefficients.
//!
//! Everything here is a pure function on immutable values; the functions are
//! safe to call concurrently from any number of threads.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// `C(n,k)` as an exact integer. Returns 0 when `k > n` and 1 when `k = 0`.
///
/// Uses the multiplicative running-product form, dividing at each step, so
/// intermediates never exceed `C(n,k) * n`.
pub fn binom(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - k + 1 + i;
        acc /= i + 1;
    }
    acc
}

/// `C(n,k)` for a row index too large for a machine word.
///
/// `k` still has to be small enough to iterate over; the arguments to
/// `C(a,2)` arising from the identity families reach ~10^42 while `k <= 9`.
pub fn binom_big(n: &BigUint, k: u64) -> BigUint {
    if BigUint::from(k) > *n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - BigUint::from(i);
        acc /= i + 1;
    }
    acc
}

/// Pascal's rule: given `C(n+k,k)` and `C(n+k,k+1)`, returns `C(n+k+1,k+1)`.
pub fn pascal_step(current: &BigUint, neighbor: &BigUint) -> BigUint {
    current + neighbor
}

/// Inverts the binomial map in its monotone range: returns the unique `n`
/// with `n >= 2k` and `C(n,k) = v`, if one exists.
///
/// `C(n,k)` is strictly increasing in `n` for `n >= 2k`, so a binary search
/// applies once an upper bound is found by doubling from `n = 2k`. Values
/// attained only with `n < 2k` are reported as `None`.
pub fn is_binomial(v: &BigUint, k: u64) -> Option<BigUint> {
    assert!(k >= 2, "is_binomial requires k >= 2");
    if v.is_zero() {
        return None;
    }
    let mut lo = BigUint::from(2 * k);
    if binom_big(&lo, k) > *v {
        return None;
    }
    let mut hi = lo.clone() + 1u32;
    while binom_big(&hi, k) < *v {
        lo = hi.clone();
        hi *= 2u32;
    }
    // invariant: C(lo,k) <= v <= C(hi,k)
    while lo < hi {
        let mid = (&lo + &hi + 1u32) >> 1;
        if binom_big(&mid, k) <= *v {
            lo = mid;
        } else {
            hi = mid - 1u32;
        }
    }
    if binom_big(&lo, k) == *v {
        Some(lo)
    } else {
        None
    }
}
