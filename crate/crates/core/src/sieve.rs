//! Modular sieve for a fixed pair `(k,l)`: eliminate candidates `m` with
//! `C(m,l) <= M` that cannot satisfy `C(m,l) = C(n,k)`, by comparing
//! `C(m,l) mod p` against the image of `n -> C(n,k)` over `F_p`.
//!
//! For a prime `p > l > k` both maps are polynomial functions of the residue,
//! so `C(m,l) mod p` depends only on `m mod p`. The image of `n -> C(n,k)`
//! covers only a fraction of the residues (about `1 - e^{-1}` for odd `k`,
//! `1 - e^{-1/2}` for even `k`), so every prime removes a constant fraction
//! of the candidate list. Survivors are verified exactly afterwards.

use crate::exact::{binom, is_binomial};
use crate::records::CollisionRecord;
use crate::{Error, Result};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Primes up to and including `bound`.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
    }
    primes
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut b = (base % modulus) as u128;
    let m = modulus as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Legendre symbol `(a/p)` for an odd prime `p`: 1 on nonzero quadratic
/// residues, -1 on non-residues, 0 on multiples of `p`.
pub fn legendre(a: i64, p: u64) -> i32 {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if mod_pow(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// `C(n,k) mod p` via the falling factorial and the inverse of `k!`;
/// requires `p > k` so that `k!` is invertible.
fn binom_mod(n: u64, k: u64, p: u64, inv_kfact: u64) -> u64 {
    let mut acc: u128 = 1;
    let m = p as u128;
    for j in 0..k {
        acc = acc * (((n + p - j % p) % p) as u128) % m;
    }
    (acc * inv_kfact as u128 % m) as u64
}

/// The image of the polynomial map `n -> C(n,k)` on `F_p`.
#[derive(Clone, Debug)]
pub struct ImageStats {
    pub k: u64,
    pub p: u64,
    /// Sorted attained residues.
    pub image: Vec<u64>,
    membership: Vec<bool>,
}

impl ImageStats {
    /// `A(k,p)`, the image size.
    pub fn size(&self) -> u64 {
        self.image.len() as u64
    }

    /// `A(k,p) / p` as an exact rational.
    pub fn density(&self) -> BigRational {
        BigRational::new(self.size().into(), self.p.into())
    }

    pub fn contains(&self, residue: u64) -> bool {
        self.membership[residue as usize]
    }
}

/// Evaluates `f(n) = C(n,k) mod p` over all residues and collects the image.
pub fn image_mod_p(k: u64, p: u64) -> Result<ImageStats> {
    if p <= k {
        return Err(Error::PrimeTooSmall { k, p });
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mut kfact: u64 = 1;
    for j in 2..=k.max(1) {
        kfact = ((kfact as u128 * j as u128) % p as u128) as u64;
    }
    let inv_kfact = mod_pow(kfact, p - 2, p);
    let mut membership = vec![false; p as usize];
    for n in 0..p {
        membership[binom_mod(n, k, p, inv_kfact) as usize] = true;
    }
    let image: Vec<u64> = (0..p).filter(|&r| membership[r as usize]).collect();
    Ok(ImageStats {
        k,
        p,
        image,
        membership,
    })
}

/// Daublebsky von Sterneck's closed forms: `A(3,p) = (2p±1)/3` for
/// `p ≡ ±1 (mod 6)`, and `A(4,p) = (3p+4+χ(-1)+2χ(5)-2χ(10))/8` for `p > 5`
/// with `χ` the quadratic character mod `p`.
pub fn closed_form_a(k: u64, p: u64) -> Result<u64> {
    match k {
        3 => match p % 6 {
            1 => Ok((2 * p + 1) / 3),
            5 => Ok((2 * p - 1) / 3),
            _ => Err(Error::UnsupportedClosedForm { k, p }),
        },
        4 => {
            if p <= 5 || !is_prime(p) {
                return Err(Error::UnsupportedClosedForm { k, p });
            }
            let chi = |x: i64| legendre(x, p) as i64;
            let numerator = 3 * p as i64 + 4 + chi(-1) + 2 * chi(5) - 2 * chi(10);
            Ok((numerator / 8) as u64)
        }
        _ => Err(Error::UnsupportedClosedForm { k, p }),
    }
}

/// Conjectured limit of `A(k,p)/p`: the Birch & Swinnerton-Dyer density
/// `a_k = Σ_{i=1}^k (-1)^{i-1}/i!` for odd `k`, and
/// `Σ_{i=1}^{k/2} (-1)^{i-1}/(2^i i!)` for even `k` (the map is symmetric
/// about `(k+1)/2`, which halves the image).
pub fn density_limit(k: u64) -> BigRational {
    let mut sum = BigRational::zero();
    if k % 2 == 1 {
        let mut fact = BigUint::one();
        for i in 1..=k {
            fact *= i;
            let term = BigRational::new(1.into(), fact.clone().into());
            if i % 2 == 1 {
                sum += term;
            } else {
                sum -= term;
            }
        }
    } else {
        let mut fact = BigUint::one();
        for i in 1..=k / 2 {
            fact *= i;
            let denom = fact.clone() * (BigUint::one() << i);
            let term = BigRational::new(1.into(), denom.into());
            if i % 2 == 1 {
                sum += term;
            } else {
                sum -= term;
            }
        }
    }
    sum
}

/// A sieve task: find all `m` with `C(m,l) <= max_value` such that
/// `C(m,l) = C(n,k)` for some `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SievePlan {
    pub k: u64,
    pub l: u64,
    pub max_value: BigUint,
    pub prime_bound: u64,
}

impl SievePlan {
    pub fn new(k: u64, l: u64, max_value: BigUint) -> Result<Self> {
        if k < 2 || l <= k {
            return Err(Error::InvalidPlan { k, l });
        }
        Ok(SievePlan {
            k,
            l,
            max_value,
            prime_bound: 500,
        })
    }

    /// Largest `m` with `C(m,l) <= max_value`, or `None` when even
    /// `C(2l,l)` exceeds the bound.
    pub fn m_max(&self) -> Option<u64> {
        let l = self.l;
        if binom(2 * l, l) > self.max_value {
            return None;
        }
        let mut lo = 2 * l;
        let mut hi = lo + 1;
        while binom(hi, l) <= self.max_value {
            lo = hi;
            hi = hi.saturating_mul(2);
        }
        while lo < hi {
            let mid = lo + (hi - lo + 1) / 2;
            if binom(mid, l) <= self.max_value {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        Some(lo)
    }

    /// Ascending primes in `(l, prime_bound]`.
    pub fn primes(&self) -> Vec<u64> {
        primes_up_to(self.prime_bound)
            .into_iter()
            .filter(|&p| p > self.l)
            .collect()
    }
}

/// Plain bitmap over a contiguous `m` range with popcount tracking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bitmap {
    words: Vec<u64>,
    len: u64,
    ones: u64,
}

impl Bitmap {
    fn all_set(len: u64) -> Self {
        let nwords = ((len + 63) / 64) as usize;
        let mut words = vec![u64::MAX; nwords];
        if len % 64 != 0 {
            if let Some(last) = words.last_mut() {
                *last = (1u64 << (len % 64)) - 1;
            }
        }
        Bitmap {
            words,
            len,
            ones: len,
        }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.ones == 0
    }

    pub fn count_ones(&self) -> u64 {
        self.ones
    }

    pub fn get(&self, idx: u64) -> bool {
        self.words[(idx / 64) as usize] >> (idx % 64) & 1 == 1
    }

    fn clear(&mut self, idx: u64) {
        let word = &mut self.words[(idx / 64) as usize];
        let mask = 1u64 << (idx % 64);
        if *word & mask != 0 {
            *word &= !mask;
            self.ones -= 1;
        }
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }

    fn to_bytes(&self) -> Vec<u8> {
        self.words.iter().flat_map(|w| w.to_le_bytes()).collect()
    }

    fn from_bytes(bytes: &[u8], len: u64) -> Option<Self> {
        let nwords = ((len + 63) / 64) as usize;
        if bytes.len() != nwords * 8 {
            return None;
        }
        let words: Vec<u64> = bytes
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let ones = words.iter().map(|w| w.count_ones() as u64).sum();
        Some(Bitmap { words, len, ones })
    }
}

/// Resumable sieve state: the survivor bitmap over `[m_min, m_max]` and the
/// primes already applied. Survivors only ever shrink.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveState {
    pub m_min: u64,
    pub m_max: u64,
    pub survivors: Bitmap,
    pub primes_done: Vec<u64>,
}

impl SieveState {
    pub fn new(plan: &SievePlan) -> Self {
        match plan.m_max() {
            Some(m_max) => {
                let m_min = 2 * plan.l;
                SieveState {
                    m_min,
                    m_max,
                    survivors: Bitmap::all_set(m_max - m_min + 1),
                    primes_done: Vec::new(),
                }
            }
            // empty range: C(2l,l) already exceeds the bound
            None => SieveState {
                m_min: 2 * plan.l,
                m_max: 0,
                survivors: Bitmap::all_set(0),
                primes_done: Vec::new(),
            },
        }
    }

    pub fn remaining(&self) -> u64 {
        self.survivors.count_ones()
    }

    pub fn surviving_m(&self) -> Vec<u64> {
        self.survivors.iter_ones().map(|i| self.m_min + i).collect()
    }
}

/// Residues `a mod p` for which `C(a,l)` is outside the image of
/// `n -> C(n,k)` on `F_p`. Pure, so callers may evaluate several primes in
/// parallel before applying them.
pub fn bad_residues(k: u64, l: u64, p: u64) -> Result<Vec<u64>> {
    let image = image_mod_p(k, p)?;
    let mut lfact: u64 = 1;
    for j in 2..=l {
        lfact = ((lfact as u128 * j as u128) % p as u128) as u64;
    }
    let inv_lfact = mod_pow(lfact, p - 2, p);
    Ok((0..p)
        .filter(|&a| !image.contains(binom_mod(a, l, p, inv_lfact)))
        .collect())
}

/// Removes every surviving `m ≡ a (mod p)` for each bad residue `a`.
pub fn apply_bad_residues(state: &mut SieveState, p: u64, bad: &[u64]) {
    if state.survivors.len() == 0 {
        return;
    }
    for &a in bad {
        // first index >= m_min congruent to a mod p
        let offset = (a + p - state.m_min % p) % p;
        let mut idx = offset;
        while idx < state.survivors.len() {
            state.survivors.clear(idx);
            idx += p;
        }
    }
    state.primes_done.push(p);
}

/// Outcome of a completed sieve run.
#[derive(Clone, Debug)]
pub struct SieveOutcome {
    pub collisions: Vec<CollisionRecord>,
    /// Survivors that failed exact verification; diagnostically interesting,
    /// in practice empty.
    pub false_survivors: Vec<u64>,
    pub state: SieveState,
}

/// Exactly verifies every survivor via `is_binomial(C(m,l), k)`.
pub fn verify_survivors(plan: &SievePlan, state: &SieveState) -> (Vec<CollisionRecord>, Vec<u64>) {
    let mut collisions = Vec::new();
    let mut false_survivors = Vec::new();
    for m in state.surviving_m() {
        let value = binom(m, plan.l);
        match is_binomial(&value, plan.k) {
            Some(n) => {
                let n = u64::try_from(n).expect("colliding n exceeds 64 bits");
                collisions.push(CollisionRecord {
                    n,
                    k: plan.k,
                    m,
                    l: plan.l,
                    value,
                });
            }
            None => false_survivors.push(m),
        }
    }
    (collisions, false_survivors)
}

/// Runs the sieve to completion: applies every plan prime in ascending
/// order (stopping early when the list empties), then verifies survivors.
pub fn sieve_pair(plan: &SievePlan, checkpoint: Option<SieveState>) -> Result<SieveOutcome> {
    let mut state = match checkpoint {
        Some(state) => {
            check_state_matches(plan, &state)?;
            state
        }
        None => SieveState::new(plan),
    };
    for p in plan.primes() {
        if state.survivors.is_empty() {
            break;
        }
        if state.primes_done.contains(&p) {
            continue;
        }
        let bad = bad_residues(plan.k, plan.l, p)?;
        apply_bad_residues(&mut state, p, &bad);
    }
    let (collisions, false_survivors) = verify_survivors(plan, &state);
    Ok(SieveOutcome {
        collisions,
        false_survivors,
        state,
    })
}

fn check_state_matches(plan: &SievePlan, state: &SieveState) -> Result<()> {
    let expect = SieveState::new(plan);
    if state.m_min != expect.m_min
        || state.m_max != expect.m_max
        || state.survivors.len() != expect.survivors.len()
    {
        return Err(Error::CheckpointMismatch(format!(
            "range [{}, {}] does not match the plan range [{}, {}]",
            state.m_min, state.m_max, expect.m_min, expect.m_max
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// checkpoint file format

const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CheckpointFile {
    version: u32,
    k: u64,
    l: u64,
    max_value: String,
    prime_bound: u64,
    m_min: u64,
    m_max: u64,
    primes_done: Vec<u64>,
    survivors_hex: String,
}

/// Writes a checkpoint atomically (write-new-then-rename).
pub fn save_checkpoint(path: &Path, plan: &SievePlan, state: &SieveState) -> Result<()> {
    let file = CheckpointFile {
        version: CHECKPOINT_VERSION,
        k: plan.k,
        l: plan.l,
        max_value: plan.max_value.to_str_radix(10),
        prime_bound: plan.prime_bound,
        m_min: state.m_min,
        m_max: state.m_max,
        primes_done: state.primes_done.clone(),
        survivors_hex: hex::encode(state.survivors.to_bytes()),
    };
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, serde_json::to_vec_pretty(&file)?)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Loads a checkpoint and validates it against the plan.
pub fn load_checkpoint(path: &Path, plan: &SievePlan) -> Result<SieveState> {
    let file: CheckpointFile = serde_json::from_slice(&std::fs::read(path)?)?;
    if file.version != CHECKPOINT_VERSION {
        return Err(Error::CheckpointVersion(file.version));
    }
    if file.k != plan.k
        || file.l != plan.l
        || file.max_value != plan.max_value.to_str_radix(10)
        || file.prime_bound != plan.prime_bound
    {
        return Err(Error::CheckpointMismatch(format!(
            "checkpoint is for (k={}, l={}, M={}, prime_bound={})",
            file.k, file.l, file.max_value, file.prime_bound
        )));
    }
    let len = if file.m_max >= file.m_min {
        file.m_max - file.m_min + 1
    } else {
        0
    };
    let bytes = hex::decode(&file.survivors_hex)
        .map_err(|e| Error::CheckpointMismatch(format!("bad survivor bitmap: {e}")))?;
    let survivors = Bitmap::from_bytes(&bytes, len)
        .ok_or_else(|| Error::CheckpointMismatch("survivor bitmap length mismatch".into()))?;
    let state = SieveState {
        m_min: file.m_min,
        m_max: file.m_max,
        survivors,
        primes_done: file.primes_done,
    };
    check_state_matches(plan, &state)?;
    Ok(state)
}
