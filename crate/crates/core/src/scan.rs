//! Globally sorted enumeration of binomial coefficients via a table plus
//! priority queue, detecting collisions and near collisions.
//!
//! The table has one slot per diagonal index `i`; slot `i` walks the values
//! `C(i+k, k)` for `k = 2, 3, ...` and the queue keeps the walk fronts merged
//! in value order. When `C(i+k,k)` is popped its successor is produced by
//! Pascal's rule, `C(i+k+1,k+1) = C(i+k,k) + C(i+k,k+1)`, where the needed
//! neighbor `C(i+k,k+1)` is the current value of slot `i-1` (it was generated
//! there earlier because `C(i+k-1,k) < C(i+k,k)`, and is not yet overwritten
//! because `C(i+k,k+1) > C(i+k,k)`). The one exception is `k = i-1`, where
//! the neighbor `C(2i-1,i)` equals the popped value itself by symmetry.
//! Successors stop once `k >= i`, i.e. past the diagonal center.
//!
//! Every diagonal `i < N` is covered for `k = 2..=i`, so every admissible
//! pair `(m,k)` with `m - k < N` is enumerated exactly once.
//!
//! In the default approximate mode values are directed-rounding intervals;
//! whenever a comparison is inconclusive both sides are recomputed exactly,
//! and every emitted record is verified with exact arithmetic.

use crate::exact::{binom, pascal_step};
use crate::extfloat::{check_precision, ext_from_exact, interval_add, Interval};
use crate::records::{BinomPair, CollisionRecord, NearCollisionRecord};
use crate::Result;
use num_bigint::BigUint;
use num_traits::Zero;
use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap, VecDeque};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanMode {
    Collisions,
    Near,
}

#[derive(Clone, Debug)]
pub struct ScanConfig {
    /// Table and queue size `N`; diagonals `0..N` are enumerated.
    pub max_index: u64,
    pub mode: ScanMode,
    /// Exponent `e` in the admission predicate `C(m,l) >= d^e`.
    pub near_exponent: u32,
    /// Significand width for the approximate fast path.
    pub precision_bits: u32,
    /// Force full exact arithmetic everywhere.
    pub exact: bool,
    /// Exact mode only: independently recompute every Pascal neighbor and
    /// assert the table-dependency claim. Quadratic overhead; for tests.
    pub check_invariants: bool,
}

impl ScanConfig {
    pub fn new(max_index: u64) -> Self {
        ScanConfig {
            max_index,
            mode: ScanMode::Collisions,
            near_exponent: 3,
            precision_bits: crate::extfloat::DEFAULT_PRECISION,
            exact: false,
            check_invariants: false,
        }
    }
}

/// A verified record produced by the scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScanRecord {
    Collision(CollisionRecord),
    Near(NearCollisionRecord),
}

/// Runs a scan to completion and collects the records.
pub fn scan(config: &ScanConfig) -> Result<Vec<ScanRecord>> {
    Ok(Scanner::new(config)?.collect())
}

/// Streaming scan; records are yielded as soon as they are verified.
pub enum Scanner {
    Exact(ExactScanner),
    Approx(ApproxScanner),
}

impl Scanner {
    pub fn new(config: &ScanConfig) -> Result<Self> {
        if config.exact {
            Ok(Scanner::Exact(ExactScanner::new(config)))
        } else {
            check_precision(config.precision_bits)?;
            Ok(Scanner::Approx(ApproxScanner::new(config)))
        }
    }
}

impl Iterator for Scanner {
    type Item = ScanRecord;

    fn next(&mut self) -> Option<ScanRecord> {
        match self {
            Scanner::Exact(s) => s.next(),
            Scanner::Approx(s) => s.next(),
        }
    }
}

fn emit_group(pairs: &mut Vec<BinomPair>, value: &BigUint, out: &mut VecDeque<ScanRecord>) {
    pairs.sort_by_key(|p| p.k);
    for a in 0..pairs.len() {
        for b in a + 1..pairs.len() {
            out.push_back(ScanRecord::Collision(CollisionRecord::from_pairs(
                pairs[a],
                pairs[b],
                value.clone(),
            )));
        }
    }
}

// d can only stay admissible while d^e <= value; (v - w)^e - v is increasing
// in v for d >= 1, e >= 1, so once a ring entry is inadmissible against the
// current pop it is inadmissible against every later one and the tail of the
// ring behind it can be dropped.
fn provably_inadmissible(d_lower: &BigUint, v_upper: &BigUint, e: u32) -> bool {
    if *d_lower <= BigUint::from(1u32) {
        return false;
    }
    // margin of one absorbs endpoint rounding in the approximate path
    let d = d_lower - 1u32;
    if (d.bits() - 1) * e as u64 >= v_upper.bits() {
        return true;
    }
    d.pow(e) > *v_upper
}

// ---------------------------------------------------------------------------
// exact engine

struct ExactEntry {
    value: BigUint,
    diag: u64,
    k: u64,
}

impl PartialEq for ExactEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ExactEntry {}
impl PartialOrd for ExactEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ExactEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // value ascending, then larger k first, then diagonal for determinism
        self.value
            .cmp(&other.value)
            .then_with(|| other.k.cmp(&self.k))
            .then_with(|| self.diag.cmp(&other.diag))
    }
}

pub struct ExactScanner {
    heap: BinaryHeap<Reverse<ExactEntry>>,
    table: Vec<BigUint>,
    out: VecDeque<ScanRecord>,
    mode: ScanMode,
    near_exponent: u32,
    check_invariants: bool,
    run: Vec<BinomPair>,
    run_value: BigUint,
    ring: VecDeque<(BigUint, BinomPair)>,
    prev: Option<BigUint>,
    finished: bool,
}

impl ExactScanner {
    fn new(config: &ScanConfig) -> Self {
        let n = config.max_index;
        let mut heap = BinaryHeap::with_capacity(n as usize);
        let mut table = Vec::with_capacity(n as usize);
        for i in 0..n {
            let value = BigUint::from((i + 2) * (i + 1) / 2);
            heap.push(Reverse(ExactEntry {
                value: value.clone(),
                diag: i,
                k: 2,
            }));
            table.push(value);
        }
        ExactScanner {
            heap,
            table,
            out: VecDeque::new(),
            mode: config.mode,
            near_exponent: config.near_exponent,
            check_invariants: config.check_invariants,
            run: Vec::new(),
            run_value: BigUint::zero(),
            ring: VecDeque::new(),
            prev: None,
            finished: false,
        }
    }

    fn flush_run(&mut self) {
        if self.run.len() > 1 {
            let value = self.run_value.clone();
            let mut pairs = std::mem::take(&mut self.run);
            emit_group(&mut pairs, &value, &mut self.out);
        } else {
            self.run.clear();
        }
    }

    fn detect(&mut self, value: &BigUint, pair: BinomPair) {
        match self.mode {
            ScanMode::Collisions => {
                if !self.run.is_empty() && self.run_value == *value {
                    self.run.push(pair);
                } else {
                    self.flush_run();
                    self.run_value = value.clone();
                    self.run.push(pair);
                }
            }
            ScanMode::Near => {
                let e = self.near_exponent;
                let mut cut = None;
                for idx in (0..self.ring.len()).rev() {
                    let (w, other) = &self.ring[idx];
                    let d = value - w;
                    if d.is_zero() {
                        self.out.push_back(ScanRecord::Collision(
                            CollisionRecord::from_pairs(*other, pair, value.clone()),
                        ));
                    } else if provably_inadmissible(&d, value, e) {
                        cut = Some(idx);
                        break;
                    } else if d.pow(e) <= *value {
                        self.out.push_back(ScanRecord::Near(NearCollisionRecord {
                            n: other.n,
                            k: other.k,
                            m: pair.n,
                            l: pair.k,
                            d,
                            value: value.clone(),
                        }));
                    }
                }
                if let Some(idx) = cut {
                    self.ring.drain(..=idx);
                }
                self.ring.push_back((value.clone(), pair));
            }
        }
    }

    fn step(&mut self) -> bool {
        let Some(Reverse(entry)) = self.heap.pop() else {
            return false;
        };
        let ExactEntry { value, diag, k } = entry;
        if let Some(prev) = &self.prev {
            assert!(*prev <= value, "scan popped values out of order");
        }
        self.prev = Some(value.clone());
        let pair = BinomPair::new(diag + k, k);
        if pair.is_admissible() {
            self.detect(&value, pair);
        }
        if k < diag {
            let neighbor = if k + 1 == diag {
                // C(2i-1, i) = C(2i-1, i-1), the value just popped
                value.clone()
            } else {
                self.table[(diag - 1) as usize].clone()
            };
            if self.check_invariants {
                assert_eq!(
                    neighbor,
                    binom(diag + k, k + 1),
                    "table slot {} does not hold C({},{})",
                    diag - 1,
                    diag + k,
                    k + 1
                );
            }
            let succ = pascal_step(&value, &neighbor);
            self.table[diag as usize] = succ.clone();
            self.heap.push(Reverse(ExactEntry {
                value: succ,
                diag,
                k: k + 1,
            }));
        }
        true
    }
}

impl Iterator for ExactScanner {
    type Item = ScanRecord;

    fn next(&mut self) -> Option<ScanRecord> {
        loop {
            if let Some(record) = self.out.pop_front() {
                return Some(record);
            }
            if self.finished {
                return None;
            }
            if !self.step() {
                self.finished = true;
                self.flush_run();
            }
        }
    }
}

// ---------------------------------------------------------------------------
// approximate engine

struct ApproxEntry {
    key: Interval,
    diag: u64,
    k: u64,
}

impl PartialEq for ApproxEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ApproxEntry {}
impl PartialOrd for ApproxEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ApproxEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .lo
            .cmp(&other.key.lo)
            .then_with(|| self.key.hi.cmp(&other.key.hi))
            .then_with(|| other.k.cmp(&self.k))
            .then_with(|| self.diag.cmp(&other.diag))
    }
}

struct RingEntry {
    hi_ceil: BigUint,
    pair: BinomPair,
}

pub struct ApproxScanner {
    heap: BinaryHeap<Reverse<ApproxEntry>>,
    table: Vec<Interval>,
    out: VecDeque<ScanRecord>,
    mode: ScanMode,
    near_exponent: u32,
    cluster: Vec<BinomPair>,
    cluster_max_hi: Option<crate::extfloat::ExtFloat>,
    ring: VecDeque<RingEntry>,
    exact_cache: HashMap<BinomPair, BigUint>,
    finished: bool,
}

impl ApproxScanner {
    fn new(config: &ScanConfig) -> Self {
        let n = config.max_index;
        let bits = config.precision_bits;
        let mut heap = BinaryHeap::with_capacity(n as usize);
        let mut table = Vec::with_capacity(n as usize);
        for i in 0..n {
            let value = ext_from_exact(&BigUint::from((i + 2) * (i + 1) / 2), bits);
            heap.push(Reverse(ApproxEntry {
                key: value,
                diag: i,
                k: 2,
            }));
            table.push(value);
        }
        ApproxScanner {
            heap,
            table,
            out: VecDeque::new(),
            mode: config.mode,
            near_exponent: config.near_exponent,
            cluster: Vec::new(),
            cluster_max_hi: None,
            ring: VecDeque::new(),
            exact_cache: HashMap::new(),
            finished: false,
        }
    }

    fn exact_value(&mut self, pair: BinomPair) -> BigUint {
        self.exact_cache
            .entry(pair)
            .or_insert_with(|| pair.value())
            .clone()
    }

    /// Recomputes every cluster member exactly, groups equal values and
    /// emits the verified pairwise records.
    fn flush_cluster(&mut self) {
        if self.cluster.len() > 1 {
            let members = std::mem::take(&mut self.cluster);
            let mut valued: Vec<(BigUint, BinomPair)> = members
                .into_iter()
                .map(|p| (self.exact_value(p), p))
                .collect();
            valued.sort();
            let mut start = 0;
            while start < valued.len() {
                let mut end = start + 1;
                while end < valued.len() && valued[end].0 == valued[start].0 {
                    end += 1;
                }
                if end - start > 1 {
                    let value = valued[start].0.clone();
                    let mut pairs: Vec<BinomPair> =
                        valued[start..end].iter().map(|(_, p)| *p).collect();
                    emit_group(&mut pairs, &value, &mut self.out);
                }
                start = end;
            }
        } else {
            self.cluster.clear();
        }
        self.cluster_max_hi = None;
    }

    fn detect(&mut self, iv: &Interval, pair: BinomPair) {
        match self.mode {
            ScanMode::Collisions => {
                // overlapping comparisons are the signal for exact fallback;
                // chain-overlapping pops are clustered and settled exactly
                match self.cluster_max_hi {
                    Some(max_hi) if iv.lo <= max_hi => {
                        self.cluster.push(pair);
                        if iv.hi > max_hi {
                            self.cluster_max_hi = Some(iv.hi);
                        }
                    }
                    _ => {
                        self.flush_cluster();
                        self.cluster.push(pair);
                        self.cluster_max_hi = Some(iv.hi);
                    }
                }
            }
            ScanMode::Near => {
                let e = self.near_exponent;
                let v_lo = iv.lo.to_biguint_floor();
                let v_hi = iv.hi.to_biguint_ceil();
                let mut cut = None;
                for idx in (0..self.ring.len()).rev() {
                    let w_hi = self.ring[idx].hi_ceil.clone();
                    let other = self.ring[idx].pair;
                    let d_lower = if v_lo > w_hi {
                        &v_lo - &w_hi
                    } else {
                        BigUint::zero()
                    };
                    if provably_inadmissible(&d_lower, &v_hi, e) {
                        cut = Some(idx);
                        break;
                    }
                    // candidate: settle exactly
                    let va = self.exact_value(other);
                    let vb = self.exact_value(pair);
                    if va == vb {
                        self.out.push_back(ScanRecord::Collision(
                            CollisionRecord::from_pairs(other, pair, vb),
                        ));
                    } else {
                        let (small, big, lo_v, hi_v) = if va < vb {
                            (other, pair, va, vb)
                        } else {
                            (pair, other, vb, va)
                        };
                        let d = &hi_v - &lo_v;
                        if d.pow(e) <= hi_v {
                            self.out.push_back(ScanRecord::Near(NearCollisionRecord {
                                n: small.n,
                                k: small.k,
                                m: big.n,
                                l: big.k,
                                d,
                                value: hi_v,
                            }));
                        }
                    }
                }
                if let Some(idx) = cut {
                    self.ring.drain(..=idx);
                }
                self.ring.push_back(RingEntry {
                    hi_ceil: v_hi,
                    pair,
                });
            }
        }
    }

    fn step(&mut self) -> bool {
        let Some(Reverse(entry)) = self.heap.pop() else {
            return false;
        };
        let ApproxEntry { key, diag, k } = entry;
        let pair = BinomPair::new(diag + k, k);
        if pair.is_admissible() {
            self.detect(&key, pair);
        }
        if k < diag {
            let neighbor = if k + 1 == diag {
                key
            } else {
                self.table[(diag - 1) as usize]
            };
            let succ = interval_add(&key, &neighbor);
            self.table[diag as usize] = succ;
            self.heap.push(Reverse(ApproxEntry {
                key: succ,
                diag,
                k: k + 1,
            }));
        }
        true
    }
}

impl Iterator for ApproxScanner {
    type Item = ScanRecord;

    fn next(&mut self) -> Option<ScanRecord> {
        loop {
            if let Some(record) = self.out.pop_front() {
                return Some(record);
            }
            if self.finished {
                return None;
            }
            if !self.step() {
                self.finished = true;
                self.flush_cluster();
            }
        }
    }
}
