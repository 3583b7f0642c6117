//! Binomial coefficient collision search toolkit.
//!
//! Two binomial coefficients `C(n,k)` and `C(m,l)` (normalized so that
//! `2 <= k <= n/2`, `2 <= l <= m/2`, `k < l`) *collide* when they are equal,
//! and *nearly collide* when they differ by a small positive `d` with
//! `C(m,l) >= d^e` for a configurable exponent `e` (default 3).
//!
//! The crate provides:
//!
//! * [`exact`] — arbitrary-precision binomials, Pascal-rule updates and
//!   inversion (`is_binomial`);
//! * [`extfloat`] — fixed-precision significands with a wide binary exponent
//!   and directed-rounding intervals over them, so values around `10^16800`
//!   can be compared cheaply;
//! * [`scan`] — globally sorted enumeration of all binomials via a table plus
//!   priority queue, detecting collisions and near collisions with an
//!   approximate fast path and exact fallback;
//! * [`sieve`] — per-`(k,l)` candidate elimination modulo primes using the
//!   image of `n -> C(n,k)` over `F_p`, plus image-size statistics `A(k,p)`;
//! * [`families`] — embedded catalogs of known collisions and `d = 1` near
//!   collisions, the Fibonacci infinite family, and the seven polynomial
//!   near-collision identities;
//! * [`output`] — the machine-readable record format shared by the CLI and
//!   the catalog export.

pub mod exact;
pub mod extfloat;
pub mod families;
pub mod output;
pub mod records;
pub mod scan;
pub mod sieve;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("precision must be between 8 and 128 bits, got {0}")]
    Precision(u32),
    #[error("{digits} digits requested but {bits}-bit significands carry at most {max} digits")]
    DigitsExceedPrecision { digits: u32, bits: u32, max: u32 },
    #[error("no closed form for A({k},p) with p = {p}")]
    UnsupportedClosedForm { k: u64, p: u64 },
    #[error("p = {p} must be a prime larger than k = {k}")]
    PrimeTooSmall { k: u64, p: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid sieve plan: need 2 <= k < l, got k = {k}, l = {l}")]
    InvalidPlan { k: u64, l: u64 },
    #[error("checkpoint does not match the sieve plan: {0}")]
    CheckpointMismatch(String),
    #[error("unsupported checkpoint format version {0}")]
    CheckpointVersion(u32),
    #[error("unknown identity family {0} (valid ids are 1..=7)")]
    UnknownFamily(u8),
    #[error("catalog row ({n},{k},{m},{l}) failed verification: {reason}")]
    CatalogMismatch {
        n: u64,
        k: u64,
        m: u64,
        l: u64,
        reason: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
