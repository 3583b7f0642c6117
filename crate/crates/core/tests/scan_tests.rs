//! Cross-checks between the exact and approximate scanners and against the
//! embedded catalog.

use bincoll::families::{catalog, CatalogKind};
use bincoll::scan::{scan, ScanConfig, ScanMode, ScanRecord};
use num_bigint::BigUint;
use std::collections::BTreeSet;

fn collision_set(config: &ScanConfig) -> BTreeSet<(u64, u64, u64, u64, BigUint)> {
    scan(config)
        .unwrap()
        .into_iter()
        .filter_map(|r| match r {
            ScanRecord::Collision(c) => Some((c.n, c.k, c.m, c.l, c.value)),
            ScanRecord::Near(_) => None,
        })
        .collect()
}

fn near_set(config: &ScanConfig) -> BTreeSet<(u64, u64, u64, u64, BigUint, BigUint)> {
    scan(config)
        .unwrap()
        .into_iter()
        .filter_map(|r| match r {
            ScanRecord::Near(n) => Some((n.n, n.k, n.m, n.l, n.d, n.value)),
            ScanRecord::Collision(_) => None,
        })
        .collect()
}

#[test]
fn approx_and_exact_collisions_agree_at_n_2000() {
    let mut approx = ScanConfig::new(2000);
    let mut exact = approx.clone();
    exact.exact = true;
    approx.exact = false;
    let a = collision_set(&approx);
    let e = collision_set(&exact);
    assert_eq!(a, e);
    // the ten desk-scale records plus C(714,272) = C(713,273), whose
    // diagonals 442 and 440 enter at this bound
    assert_eq!(a.len(), 11);
    assert!(a.iter().any(|r| (r.0, r.1, r.2, r.3) == (714, 272, 713, 273)));
}

#[test]
fn approx_and_exact_near_records_agree() {
    for n in [100u64, 400] {
        let mut approx = ScanConfig::new(n);
        approx.mode = ScanMode::Near;
        let mut exact = approx.clone();
        exact.exact = true;
        assert_eq!(near_set(&approx), near_set(&exact), "N={n}");
    }
}

#[test]
fn reduced_precision_still_agrees_after_exact_confirmation() {
    // every candidate is confirmed exactly, so even a coarse significand
    // changes only the work done, never the answer
    for bits in [24u32, 53] {
        let mut config = ScanConfig::new(400);
        config.precision_bits = bits;
        let mut exact = ScanConfig::new(400);
        exact.exact = true;
        assert_eq!(collision_set(&config), collision_set(&exact), "bits={bits}");

        let mut near = config.clone();
        near.mode = ScanMode::Near;
        let mut near_exact = exact.clone();
        near_exact.mode = ScanMode::Near;
        assert_eq!(near_set(&near), near_set(&near_exact), "bits={bits}");
    }
}

#[test]
fn near_scan_at_n_2000_matches_the_catalog_d1_rows() {
    let mut config = ScanConfig::new(2000);
    config.mode = ScanMode::Near;
    let d1: BTreeSet<(u64, u64, u64, u64)> = near_set(&config)
        .into_iter()
        .filter(|r| r.4 == BigUint::from(1u32))
        .map(|r| (r.0, r.1, r.2, r.3))
        .collect();
    let expected: BTreeSet<(u64, u64, u64, u64)> = catalog()
        .into_iter()
        .filter(|row| row.kind == CatalogKind::NearCollisionD1)
        .filter(|row| row.n - row.k < 2000 && row.m - row.l < 2000)
        .map(|row| (row.n, row.k, row.m, row.l))
        .collect();
    // all known d=1 rows up to value 26335 have both diagonals below 2000
    assert_eq!(expected.len(), 11);
    assert_eq!(d1, expected);
}

#[test]
fn near_exponent_five_is_a_subset_of_three() {
    let mut e3 = ScanConfig::new(300);
    e3.mode = ScanMode::Near;
    let mut e5 = e3.clone();
    e5.near_exponent = 5;
    let set3 = near_set(&e3);
    let set5 = near_set(&e5);
    assert!(set5.is_subset(&set3));
    assert!(set5.len() < set3.len());
    for r in &set5 {
        assert!(r.5 >= r.4.pow(5));
    }
}

#[test]
fn scan_honours_the_diagonal_bound() {
    let config = ScanConfig::new(20);
    for record in scan(&config).unwrap() {
        if let ScanRecord::Collision(c) = record {
            assert!(c.n - c.k < 20);
            assert!(c.m - c.l < 20);
        }
    }
}
