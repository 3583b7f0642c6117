//! Fixed-precision significands with a wide binary exponent, and
//! directed-rounding intervals over them.
//!
//! A plain `f64` cannot hold binomials near `10^16800` (its exponent range
//! ends around `10^308`), and full exact arithmetic is too slow for a bulk
//! scan. An [`ExtFloat`] keeps a normalized `B`-bit significand (8 to 128
//! bits, default 128) together with a signed 64-bit power-of-two exponent.
//! An [`Interval`] brackets an exact value between a rounded-down and a
//! rounded-up [`ExtFloat`]; when two intervals overlap, the comparison is
//! inconclusive and the caller falls back to exact arithmetic.
//!
//! Only addition and comparison are provided; that is all the scan needs.
//! All values are non-negative.

use crate::{Error, Result};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::cmp::Ordering;

/// Default significand width in bits.
pub const DEFAULT_PRECISION: u32 = 128;
/// Smallest accepted significand width.
pub const MIN_PRECISION: u32 = 8;
/// Largest accepted significand width (one `u128`).
pub const MAX_PRECISION: u32 = 128;

const LOG10_2: f64 = 0.30102999566398119521;

/// A non-negative number `sig * 2^exp` with `sig` normalized into
/// `[2^(bits-1), 2^bits)`. Zero is the canonical `sig = 0, exp = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtFloat {
    sig: u128,
    exp: i64,
    bits: u32,
}

/// Outcome of comparing two intervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntervalCmp {
    Less,
    Greater,
    /// Inconclusive; the caller should recompute both sides exactly.
    Overlapping,
}

/// Validates a significand width.
pub fn check_precision(bits: u32) -> Result<()> {
    if (MIN_PRECISION..=MAX_PRECISION).contains(&bits) {
        Ok(())
    } else {
        Err(Error::Precision(bits))
    }
}

impl ExtFloat {
    pub fn zero(bits: u32) -> Self {
        ExtFloat { sig: 0, exp: 0, bits }
    }

    pub fn is_zero(&self) -> bool {
        self.sig == 0
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    fn max_sig(bits: u32) -> u128 {
        if bits == 128 {
            u128::MAX
        } else {
            (1u128 << bits) - 1
        }
    }

    /// Next representable value up.
    pub fn succ(self) -> Self {
        if self.sig == Self::max_sig(self.bits) {
            ExtFloat {
                sig: 1u128 << (self.bits - 1),
                exp: self.exp + 1,
                bits: self.bits,
            }
        } else {
            ExtFloat {
                sig: self.sig + 1,
                exp: self.exp,
                bits: self.bits,
            }
        }
    }

    /// Rounds `v` toward zero; the flag reports whether bits were dropped.
    fn from_biguint_floor(v: &BigUint, bits: u32) -> (Self, bool) {
        let len = v.bits();
        if len == 0 {
            return (Self::zero(bits), false);
        }
        if len <= bits as u64 {
            let sig = v.to_u128().unwrap() << (bits as u64 - len);
            return (
                ExtFloat {
                    sig,
                    exp: len as i64 - bits as i64,
                    bits,
                },
                false,
            );
        }
        let shift = len - bits as u64;
        let sig = (v >> shift).to_u128().unwrap();
        let inexact = v.trailing_zeros().unwrap_or(0) < shift;
        (
            ExtFloat {
                sig,
                exp: shift as i64,
                bits,
            },
            inexact,
        )
    }

    /// Largest integer `<=` this value.
    pub fn to_biguint_floor(&self) -> BigUint {
        if self.sig == 0 {
            return BigUint::zero();
        }
        if self.exp >= 0 {
            BigUint::from(self.sig) << self.exp as u64
        } else {
            let shift = (-self.exp) as u64;
            if shift >= 128 {
                BigUint::zero()
            } else {
                BigUint::from(self.sig >> shift)
            }
        }
    }

    /// Smallest integer `>=` this value.
    pub fn to_biguint_ceil(&self) -> BigUint {
        if self.sig == 0 {
            return BigUint::zero();
        }
        if self.exp >= 0 {
            return BigUint::from(self.sig) << self.exp as u64;
        }
        let shift = (-self.exp) as u64;
        if shift >= 128 {
            return BigUint::from(1u32);
        }
        let floor = self.sig >> shift;
        let mask = (1u128 << shift) - 1;
        if self.sig & mask == 0 {
            BigUint::from(floor)
        } else {
            BigUint::from(floor) + 1u32
        }
    }

    /// Exact rational value `sig * 2^exp`.
    pub fn to_rational(&self) -> BigRational {
        let sig = num_bigint::BigInt::from(self.sig);
        if self.exp >= 0 {
            BigRational::from(sig << self.exp as u64)
        } else {
            BigRational::new(sig, num_bigint::BigInt::from(1u32) << (-self.exp) as u64)
        }
    }

    /// Directed-rounding addition. `round_up` selects rounding toward
    /// `+inf`; otherwise the sum is truncated.
    fn add_dir(self, other: Self, round_up: bool) -> Self {
        debug_assert_eq!(self.bits, other.bits);
        if other.sig == 0 {
            return self;
        }
        if self.sig == 0 {
            return other;
        }
        let (a, b) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        let bits = a.bits;
        let diff = (a.exp as i128 - b.exp as i128) as u128;
        let (addend, mut sticky) = if diff >= bits as u128 {
            (0u128, true)
        } else {
            let diff = diff as u32; // < bits <= 128
            let mask = (1u128 << diff) - 1;
            (b.sig >> diff, b.sig & mask != 0)
        };
        let (sum, carry) = a.sig.overflowing_add(addend);
        let (sig, exp) = if bits == 128 {
            if carry {
                sticky |= sum & 1 != 0;
                ((1u128 << 127) | (sum >> 1), a.exp + 1)
            } else {
                (sum, a.exp)
            }
        } else if sum >> bits != 0 {
            sticky |= sum & 1 != 0;
            (sum >> 1, a.exp + 1)
        } else {
            (sum, a.exp)
        };
        let result = ExtFloat { sig, exp, bits };
        if round_up && sticky {
            result.succ()
        } else {
            result
        }
    }
}

impl PartialOrd for ExtFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtFloat {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.bits, other.bits);
        match (self.sig == 0, other.sig == 0) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            // same normalization, so exponent dominates
            (false, false) => self.exp.cmp(&other.exp).then(self.sig.cmp(&other.sig)),
        }
    }
}

/// A directed-rounding interval `[lo, hi]` containing one exact value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: ExtFloat,
    pub hi: ExtFloat,
}

impl Interval {
    pub fn zero(bits: u32) -> Self {
        Interval {
            lo: ExtFloat::zero(bits),
            hi: ExtFloat::zero(bits),
        }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

/// The tightest `bits`-bit interval containing the exact integer `v`.
/// Width is at most one unit in the last place.
pub fn ext_from_exact(v: &BigUint, bits: u32) -> Interval {
    debug_assert!(check_precision(bits).is_ok());
    let (lo, inexact) = ExtFloat::from_biguint_floor(v, bits);
    let hi = if inexact { lo.succ() } else { lo };
    Interval { lo, hi }
}

/// Interval sum: `lo` rounds toward `-inf`, `hi` toward `+inf`, so the result
/// contains `x + y` for every `x` in `a` and `y` in `b`.
pub fn interval_add(a: &Interval, b: &Interval) -> Interval {
    Interval {
        lo: a.lo.add_dir(b.lo, false),
        hi: a.hi.add_dir(b.hi, true),
    }
}

/// `Less` iff `a.hi < b.lo`, `Greater` iff `a.lo > b.hi`, otherwise the
/// intervals overlap and nothing can be concluded.
pub fn interval_compare(a: &Interval, b: &Interval) -> IntervalCmp {
    if a.hi < b.lo {
        IntervalCmp::Less
    } else if a.lo > b.hi {
        IntervalCmp::Greater
    } else {
        IntervalCmp::Overlapping
    }
}

/// Largest digit count [`ext_to_decimal`] accepts at this precision.
pub fn max_decimal_digits(bits: u32) -> u32 {
    ((bits as f64) * LOG10_2).floor() as u32 - 1
}

/// Renders `x` in decimal scientific notation, `d.ddd...eEEEE`, truncated
/// after `digits` significant digits (error below one unit in the last
/// requested digit). Lowercase `e`, no plus sign on positive exponents.
///
/// The decimal exponent is located with an integer-exact check, so exponents
/// on the `10^16800` scale cannot be misplaced by float rounding.
pub fn ext_to_decimal(x: &ExtFloat, digits: u32) -> Result<String> {
    let max = max_decimal_digits(x.bits);
    if digits == 0 || digits > max {
        return Err(Error::DigitsExceedPrecision {
            digits,
            bits: x.bits,
            max,
        });
    }
    if x.is_zero() {
        return Ok("0e0".to_string());
    }
    // value is in [2^(p-1), 2^p)
    let p = x.exp + x.bits as i64;
    let mut dec_exp = (((p - 1) as f64) * LOG10_2).floor() as i64;
    for _ in 0..8 {
        // digit string = floor(value / 10^(dec_exp - digits + 1))
        let t = dec_exp - digits as i64 + 1;
        let mut num = BigUint::from(x.sig);
        let mut den = BigUint::from(1u32);
        if x.exp >= 0 {
            num <<= x.exp as u64;
        } else {
            den <<= (-x.exp) as u64;
        }
        if t >= 0 {
            den *= BigUint::from(10u32).pow(t as u32);
        } else {
            num *= BigUint::from(10u32).pow((-t) as u32);
        }
        let d = num / den;
        if d.is_zero() {
            dec_exp -= 1;
            continue;
        }
        let s = d.to_str_radix(10);
        let nd = s.len() as i64;
        if nd != digits as i64 {
            dec_exp += nd - digits as i64;
            continue;
        }
        let rendered = if digits == 1 {
            format!("{s}e{dec_exp}")
        } else {
            format!("{}.{}e{}", &s[..1], &s[1..], dec_exp)
        };
        return Ok(rendered);
    }
    unreachable!("decimal exponent search did not converge");
}
