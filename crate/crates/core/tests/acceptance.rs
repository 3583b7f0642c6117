//! End-to-end acceptance checks. Each test prints a single `criterion N: pass`
//! line on success so a full run reads as a checklist.

use bincoll::exact::{binom, is_binomial};
use bincoll::extfloat::{ext_from_exact, ext_to_decimal, interval_add, interval_compare, Interval, IntervalCmp};
use bincoll::families;
use bincoll::records::BinomPair;
use bincoll::scan::{scan, ScanConfig, ScanRecord};
use bincoll::sieve::{closed_form_a, density_limit, image_mod_p, primes_up_to};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use std::collections::{BTreeSet, HashMap};
use std::process::Command;
use std::time::Instant;

fn bincoll_cmd(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_bincoll"))
        .args(args)
        .output()
        .expect("failed to launch bincoll")
}

/// Parses jsonl records into (type, n, k, m, l, d, value) tuples.
fn parse_jsonl(stdout: &[u8]) -> Vec<(String, u64, u64, u64, u64, Option<String>, String)> {
    String::from_utf8_lossy(stdout)
        .lines()
        .map(|line| {
            let v: serde_json::Value = serde_json::from_str(line).expect("invalid jsonl line");
            (
                v["type"].as_str().unwrap().to_string(),
                v["n"].as_u64().unwrap(),
                v["k"].as_u64().unwrap(),
                v["m"].as_u64().unwrap(),
                v["l"].as_u64().unwrap(),
                v["d"].as_str().map(|s| s.to_string()),
                v["value"].as_str().unwrap().to_string(),
            )
        })
        .collect()
}

#[test]
fn criterion_01_collision_completeness_at_desk_scale() {
    let start = Instant::now();
    let out = bincoll_cmd(&["scan", "--max-index", "250", "--mode", "collisions"]);
    assert!(out.status.success());
    let records = parse_jsonl(&out.stdout);
    let got: BTreeSet<(u64, u64, u64, u64, String)> = records
        .iter()
        .map(|r| {
            assert_eq!(r.0, "collision");
            (r.1, r.2, r.3, r.4, r.6.clone())
        })
        .collect();
    let expected: BTreeSet<(u64, u64, u64, u64, String)> = [
        (16, 2, 10, 3, "120"),
        (21, 2, 10, 4, "210"),
        (56, 2, 22, 3, "1540"),
        (78, 2, 15, 5, "3003"),
        (78, 2, 14, 6, "3003"),
        (15, 5, 14, 6, "3003"),
        (120, 2, 36, 3, "7140"),
        (153, 2, 19, 5, "11628"),
        (221, 2, 17, 8, "24310"),
        (104, 39, 103, 40, "61218182743304701891431482520"),
    ]
    .into_iter()
    .map(|(n, k, m, l, v)| (n, k, m, l, v.to_string()))
    .collect();
    assert_eq!(records.len(), 10, "expected exactly 10 collision records");
    assert_eq!(got, expected);
    assert!(start.elapsed().as_secs() < 60);
    println!("criterion 1: pass (10 collision records at N=250)");
}

#[test]
fn criterion_02_near_collision_d1_reproduction() {
    let start = Instant::now();
    let out = bincoll_cmd(&["scan", "--max-index", "60", "--mode", "near", "--near-exponent", "3"]);
    assert!(out.status.success());
    let d1: BTreeSet<(u64, u64, u64, u64)> = parse_jsonl(&out.stdout)
        .into_iter()
        .filter(|r| r.0 == "near_collision" && r.5.as_deref() == Some("1"))
        .map(|r| (r.1, r.2, r.3, r.4))
        .collect();
    // ground truth: the catalog d=1 rows whose diagonal indices are both < 60
    let expected: BTreeSet<(u64, u64, u64, u64)> = families::catalog()
        .into_iter()
        .filter(|row| row.kind == families::CatalogKind::NearCollisionD1)
        .filter(|row| row.n - row.k < 60 && row.m - row.l < 60)
        .map(|row| (row.n, row.k, row.m, row.l))
        .collect();
    for value in [21u64, 36, 56, 253, 496, 561, 1771] {
        assert!(
            families::catalog()
                .iter()
                .any(|r| r.value == value
                    && expected.contains(&(r.n, r.k, r.m, r.l))),
            "value {value} missing from the expected filter"
        );
    }
    assert_eq!(d1, expected);
    assert!(start.elapsed().as_secs() < 60);
    println!(
        "criterion 2: pass ({} d=1 rows with both diagonals < 60, including all seven listed values)",
        expected.len()
    );
}

#[test]
fn criterion_03_sieve_correctness() {
    let start = Instant::now();

    let out = bincoll_cmd(&["sieve", "--k", "2", "--l", "3", "--max-value", "10000000000"]);
    assert!(out.status.success());
    let ms: Vec<u64> = parse_jsonl(&out.stdout).iter().map(|r| r.3).collect();
    assert_eq!(ms, vec![10, 22, 36]);

    // m = 15 is the C(15,5) = 3003 = C(78,2) side of the double collision,
    // m = 19 the value 11628; both are genuine k=2 hits below 10^5
    let out = bincoll_cmd(&["sieve", "--k", "2", "--l", "5", "--max-value", "100000"]);
    assert!(out.status.success());
    let ms: Vec<u64> = parse_jsonl(&out.stdout).iter().map(|r| r.3).collect();
    assert_eq!(ms, vec![15, 19]);

    let out = bincoll_cmd(&["sieve", "--k", "3", "--l", "5", "--max-value", "1000000000000"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "expected zero collisions");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("collisions=0 false_survivors=0"), "{stderr}");

    // independent oracle for the empty run: every C(m,5) <= 10^12 through
    // exact binomial inversion
    let bound = BigUint::from(10u64).pow(12);
    let mut m = 10u64;
    while binom(m, 5) <= bound {
        assert!(is_binomial(&binom(m, 5), 3).is_none(), "missed collision at m={m}");
        m += 1;
    }
    assert!(start.elapsed().as_secs() < 120);
    println!("criterion 3: pass (m = 10,22,36; m = 19; empty run confirmed by brute force to m={})", m - 1);
}

#[test]
fn criterion_04_closed_forms_for_image_sizes() {
    let start = Instant::now();
    let mut checked = 0;
    for p in primes_up_to(499) {
        if p >= 5 {
            assert_eq!(
                image_mod_p(3, p).unwrap().size(),
                closed_form_a(3, p).unwrap(),
                "k=3 p={p}"
            );
            checked += 1;
        }
        if p > 5 {
            assert_eq!(
                image_mod_p(4, p).unwrap().size(),
                closed_form_a(4, p).unwrap(),
                "k=4 p={p}"
            );
            checked += 1;
        }
    }
    assert!(start.elapsed().as_secs() < 10);
    println!("criterion 4: pass ({checked} (k,p) closed-form matches, 0 mismatches)");
}

#[test]
fn criterion_05_density_spot_check() {
    let start = Instant::now();
    let primes: Vec<u64> = primes_up_to(1099).into_iter().filter(|&p| p > 900).collect();
    assert!(!primes.is_empty());
    for k in [3u64, 4, 5] {
        let limit = density_limit(k).to_f64().unwrap();
        for &p in &primes {
            let density = image_mod_p(k, p).unwrap().size() as f64 / p as f64;
            assert!(
                (density - limit).abs() < 0.05,
                "k={k} p={p}: density {density} vs limit {limit}"
            );
        }
    }
    assert!(start.elapsed().as_secs() < 30);
    println!("criterion 5: pass (A(k,p)/p within 0.05 of the limit for k=3,4,5 over {} primes)", primes.len());
}

#[test]
fn criterion_06_identity_suite() {
    let start = Instant::now();
    for fam in families::identity_families() {
        for x in 1..=1000 {
            assert!(
                families::identity_eval(fam.id, x).unwrap().holds,
                "family {} x={x}",
                fam.id
            );
        }
    }
    // the quality-5 families stay admissible even under the stricter d^5
    // bound; the quality-3 ones cannot (value ~ d^3 asymptotically)
    let quality5: Vec<u8> = families::identity_families()
        .iter()
        .filter(|f| {
            let q = families::identity_quality(f.id).unwrap();
            (*q.numer(), *q.denom()) == (5, 1)
        })
        .map(|f| f.id)
        .collect();
    assert_eq!(quality5, vec![3, 4, 5]);
    for &id in &quality5 {
        for x in 2..=1000 {
            let e = families::identity_eval(id, x).unwrap();
            assert!(e.right >= e.d.pow(5), "family {id} x={x}");
        }
    }
    assert!(start.elapsed().as_secs() < 30);
    println!("criterion 6: pass (identities 1-7 exact for x <= 1000; quality-5 families meet the d^5 bound)");
}

#[test]
fn criterion_07_fibonacci_family() {
    let start = Instant::now();
    for i in 1..=20 {
        assert!(families::verify_fibonacci(i, false).criterion_holds, "i={i}");
    }
    for i in 1..=4 {
        assert_eq!(families::verify_fibonacci(i, true).exact_equal, Some(true), "i={i}");
    }
    let m4 = families::fibonacci_member(4);
    assert_eq!(u64::try_from(m4.n).unwrap(), 4895);
    assert!(start.elapsed().as_secs() < 120);
    println!("criterion 7: pass (criterion to i=20, exact equality to i=4 incl. C(4895,1869))");
}

/// Rebuilds the interval a long scan would carry for `C(n,k)`: seed Pascal
/// row `n - depth` with tight intervals, then run the recurrence down to row
/// `n` so every step's directed rounding compounds. Only the band of columns
/// `[k - depth, k]` can influence the target entry.
fn scan_style_interval(n: u64, k: u64, depth: u64, bits: u32) -> Interval {
    let n0 = n - depth;
    let jmin = k - depth;
    let mut exact = binom(n0, jmin);
    let mut row: Vec<Interval> = Vec::with_capacity(depth as usize + 1);
    for j in jmin..=k {
        row.push(ext_from_exact(&exact, bits));
        // C(n0, j+1) = C(n0, j) * (n0 - j) / (j + 1)
        exact = exact * (n0 - j) / (j + 1);
    }
    for _ in 0..depth {
        for idx in (1..row.len()).rev() {
            row[idx] = interval_add(&row[idx], &row[idx - 1]);
        }
        // the lowest column loses its left parent and goes stale
        row.remove(0);
    }
    row[0]
}

fn contains(iv: &Interval, v: &BigUint) -> bool {
    iv.lo.to_biguint_floor() <= *v && *v <= iv.hi.to_biguint_ceil()
}

#[test]
fn criterion_08_almost_collision_discrimination() {
    let start = Instant::now();
    let a = binom(102_091, 12_877);
    let b = binom(200_954, 9_642);

    // 128-bit intervals separate the pair outright
    let ia = ext_from_exact(&a, 128);
    let ib = ext_from_exact(&b, 128);
    assert_eq!(interval_compare(&ia, &ib), IntervalCmp::Greater);
    assert_eq!(ext_to_decimal(&ia.lo, 16).unwrap(), "1.256839391954534e16800");
    assert_eq!(ext_to_decimal(&ib.lo, 16).unwrap(), "1.256839391954529e16800");

    // at 53 bits the error accumulated over a couple of thousand table steps
    // blurs the pair together, and only the exact fallback can decide; at
    // 128 bits the same accumulation still separates them cleanly
    let depth = 2000;
    let ia53 = scan_style_interval(102_091, 12_877, depth, 53);
    let ib53 = scan_style_interval(200_954, 9_642, depth, 53);
    assert!(contains(&ia53, &a));
    assert!(contains(&ib53, &b));
    assert_eq!(interval_compare(&ia53, &ib53), IntervalCmp::Overlapping);
    assert_ne!(a, b);
    assert!(a > b);
    let ia128 = scan_style_interval(102_091, 12_877, depth, 128);
    let ib128 = scan_style_interval(200_954, 9_642, depth, 128);
    assert_eq!(interval_compare(&ia128, &ib128), IntervalCmp::Greater);
    assert!(start.elapsed().as_secs() < 60);
    println!("criterion 8: pass (128-bit disjoint with exact 16-digit renderings; 53-bit overlap resolved exactly)");
}

#[test]
fn criterion_09_catalog_integrity() {
    let start = Instant::now();
    let out = bincoll_cmd(&["families", "catalog", "verify"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("9 collisions"), "{stdout}");
    assert!(stdout.contains("20 d=1"), "{stdout}");
    assert!(families::catalog().iter().any(|r| {
        (r.n, r.k, r.m, r.l, r.value) == (160403633, 2, 425779, 3, 12864662659597529)
    }));
    assert!(start.elapsed().as_secs() < 60);
    println!("criterion 9: pass (29 catalog rows re-derived exactly)");
}

#[test]
fn criterion_10_scan_oracle_equivalence() {
    let n_bound = 300u64;
    // brute force: bucket every admissible pair with diagonal < N by value
    let mut buckets: HashMap<BigUint, Vec<BinomPair>> = HashMap::new();
    for diag in 2..n_bound {
        for k in 2..=diag {
            buckets
                .entry(binom(diag + k, k))
                .or_default()
                .push(BinomPair::new(diag + k, k));
        }
    }
    let mut expected: BTreeSet<(u64, u64, u64, u64)> = BTreeSet::new();
    for pairs in buckets.values() {
        for (i, a) in pairs.iter().enumerate() {
            for b in &pairs[i + 1..] {
                let (x, y) = if a.k < b.k { (a, b) } else { (b, a) };
                expected.insert((x.n, x.k, y.n, y.k));
            }
        }
    }

    // exact mode with every internal assertion armed
    let mut config = ScanConfig::new(n_bound);
    config.exact = true;
    config.check_invariants = true;
    let got: BTreeSet<(u64, u64, u64, u64)> = scan(&config)
        .unwrap()
        .into_iter()
        .map(|r| match r {
            ScanRecord::Collision(c) => (c.n, c.k, c.m, c.l),
            ScanRecord::Near(_) => unreachable!(),
        })
        .collect();
    assert_eq!(got, expected);
    println!("criterion 10: pass (scan matches the bucket oracle at N=300 with invariants checked)");
}

#[test]
fn exit_code_contract_for_verification_subcommands() {
    let out = bincoll_cmd(&["families", "verify", "--family", "1", "--x-max", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let out = bincoll_cmd(&["families", "verify", "--family", "12", "--x-max", "5"]);
    assert_eq!(out.status.code(), Some(2), "unknown family id is a usage error");
}
