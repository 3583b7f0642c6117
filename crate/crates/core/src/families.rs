//! Embedded catalogs of the known collisions and `d = 1` near collisions,
//! the Fibonacci infinite family, and the seven polynomial identities that
//! generate infinitely many near collisions.

use crate::exact::{binom, binom_big};
use crate::records::{classify_pair, BinomPair, PairClass};
use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

/// Kind of a catalog row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CatalogKind {
    Collision,
    NearCollisionD1,
}

/// One row of the embedded ground-truth tables. For near collisions the
/// stored value is the larger side, `C(m,l) = C(n,k) + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub n: u64,
    pub k: u64,
    pub m: u64,
    pub l: u64,
    pub value: u64,
    pub kind: CatalogKind,
}

// the six sporadic collisions
const SPORADIC: [(u64, u64, u64, u64, u64); 6] = [
    (16, 2, 10, 3, 120),
    (21, 2, 10, 4, 210),
    (56, 2, 22, 3, 1540),
    (120, 2, 36, 3, 7140),
    (153, 2, 19, 5, 11628),
    (221, 2, 17, 8, 24310),
];

// the double collision 3003, as its three pairwise equalities
const DOUBLE_3003: [(u64, u64, u64, u64, u64); 3] = [
    (78, 2, 15, 5, 3003),
    (78, 2, 14, 6, 3003),
    (15, 5, 14, 6, 3003),
];

// all known near collisions with d = 1; (n,k) is the smaller side
const NEAR_D1: [(u64, u64, u64, u64, u64); 20] = [
    (6, 3, 7, 2, 21),
    (7, 3, 9, 2, 36),
    (11, 2, 8, 3, 56),
    (10, 5, 23, 2, 253),
    (12, 4, 32, 2, 496),
    (16, 3, 34, 2, 561),
    (60, 2, 23, 3, 1771),
    (27, 3, 77, 2, 2926),
    (29, 3, 86, 2, 3655),
    (34, 3, 21, 4, 5985),
    (22, 5, 230, 2, 26335),
    (260, 3, 2407, 2, 2895621),
    (93, 4, 2417, 2, 2919736),
    (62, 5, 3598, 2, 6471003),
    (28, 11, 6554, 2, 21474181),
    (665, 3, 9879, 2, 48792381),
    (135, 5, 26333, 2, 346700278),
    (139, 5, 28358, 2, 402073903),
    (19630, 3, 1587767, 2, 1260501229261),
    (160403633, 2, 425779, 3, 12864662659597529),
];

/// All 29 catalog rows: 6 sporadic collisions, the 3 pairwise equalities of
/// the double collision 3003, and the 20 known `d = 1` near collisions.
pub fn catalog() -> Vec<CatalogEntry> {
    let mut rows = Vec::with_capacity(29);
    for (n, k, m, l, value) in SPORADIC.into_iter().chain(DOUBLE_3003) {
        rows.push(CatalogEntry {
            n,
            k,
            m,
            l,
            value,
            kind: CatalogKind::Collision,
        });
    }
    for (n, k, m, l, value) in NEAR_D1 {
        rows.push(CatalogEntry {
            n,
            k,
            m,
            l,
            value,
            kind: CatalogKind::NearCollisionD1,
        });
    }
    rows
}

/// Report from [`verify_catalog`].
#[derive(Clone, Copy, Debug)]
pub struct CatalogReport {
    pub collisions: usize,
    pub near_d1: usize,
}

/// Recomputes every catalog row with exact arithmetic and checks it also
/// passes [`classify_pair`] with the expected kind. Any mismatch is a hard
/// failure naming the row.
pub fn verify_catalog() -> Result<CatalogReport> {
    let mut collisions = 0;
    let mut near_d1 = 0;
    for row in catalog() {
        let fail = |reason: String| Error::CatalogMismatch {
            n: row.n,
            k: row.k,
            m: row.m,
            l: row.l,
            reason,
        };
        let left = binom(row.n, row.k);
        let right = binom(row.m, row.l);
        let a = BinomPair::new(row.n, row.k);
        let b = BinomPair::new(row.m, row.l);
        if !a.is_admissible() || !b.is_admissible() {
            return Err(fail("pair outside the 2 <= k <= n/2 normalization".into()));
        }
        match row.kind {
            CatalogKind::Collision => {
                if left != right || right != BigUint::from(row.value) {
                    return Err(fail(format!("expected equal values {}", row.value)));
                }
                if classify_pair(&a, &b, 3) != PairClass::Collision {
                    return Err(fail("classify_pair disagrees".into()));
                }
                collisions += 1;
            }
            CatalogKind::NearCollisionD1 => {
                if &left + 1u32 != right || right != BigUint::from(row.value) {
                    return Err(fail(format!("expected difference 1 at value {}", row.value)));
                }
                if classify_pair(&a, &b, 3) != PairClass::NearCollision(BigUint::one()) {
                    return Err(fail("classify_pair disagrees".into()));
                }
                near_d1 += 1;
            }
        }
    }
    Ok(CatalogReport { collisions, near_d1 })
}

// ---------------------------------------------------------------------------
// Fibonacci family

/// Member `i` of the infinite family
/// `C(F(2i+2)F(2i+3), F(2i)F(2i+3)) = C(same-1, same+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibonacciFamilyMember {
    pub i: u64,
    pub n: BigUint,
    pub k: BigUint,
    pub m: BigUint,
    pub l: BigUint,
}

fn fibonacci(i: u64) -> BigUint {
    // F(0) = 0, F(1) = 1, F(i+1) = F(i) + F(i-1)
    let mut a = BigUint::zero();
    let mut b = BigUint::one();
    for _ in 0..i {
        let next = &a + &b;
        a = b;
        b = next;
    }
    a
}

pub fn fibonacci_member(i: u64) -> FibonacciFamilyMember {
    assert!(i >= 1);
    let f2i = fibonacci(2 * i);
    let f2i2 = fibonacci(2 * i + 2);
    let f2i3 = fibonacci(2 * i + 3);
    let n = &f2i2 * &f2i3;
    let k = &f2i * &f2i3;
    FibonacciFamilyMember {
        i,
        m: &n - 1u32,
        l: &k + 1u32,
        n,
        k,
    }
}

/// Verification of one family member.
#[derive(Clone, Debug)]
pub struct FibVerification {
    pub member: FibonacciFamilyMember,
    /// The integer criterion `n(k+1) = (n-k)(n-k-1)`, equivalent to
    /// `C(n,k) = C(n-1,k+1)`.
    pub criterion_holds: bool,
    /// Exact binomial comparison, when requested.
    pub exact_equal: Option<bool>,
}

pub fn verify_fibonacci(i: u64, exact: bool) -> FibVerification {
    let member = fibonacci_member(i);
    let lhs = &member.n * (&member.k + 1u32);
    let diff = &member.n - &member.k;
    let rhs = &diff * (&diff - 1u32);
    let criterion_holds = lhs == rhs;
    let exact_equal = if exact {
        let k = u64::try_from(member.k.clone()).expect("k too large for exact comparison");
        let l = u64::try_from(member.l.clone()).expect("l too large for exact comparison");
        Some(binom_big(&member.n, k) == binom_big(&member.m, l))
    } else {
        None
    };
    FibVerification {
        member,
        criterion_holds,
        exact_equal,
    }
}

// ---------------------------------------------------------------------------
// the seven polynomial identities

/// Integer-coefficient polynomial data for one identity
/// `C(n(x), k) + C(d_arg(x), 2) = C(a(x), 2)`.
///
/// Coefficients are stored lowest degree first, verbatim from the source
/// tables; a transcription test evaluates the identity at small `x`, so any
/// typo surfaces as a reported failure rather than being patched silently.
#[derive(Clone, Debug)]
pub struct IdentityFamily {
    pub id: u8,
    pub k_left: u64,
    pub n_poly: Vec<i64>,
    pub d_arg_poly: Vec<i64>,
    pub a_poly: Vec<i64>,
}

pub fn identity_families() -> Vec<IdentityFamily> {
    vec![
        IdentityFamily {
            id: 1,
            k_left: 3,
            n_poly: vec![3, -12, 12],
            d_arg_poly: vec![0, 1],
            a_poly: vec![-1, 15, -36, 24],
        },
        IdentityFamily {
            id: 2,
            k_left: 3,
            n_poly: vec![5, -12, 12],
            d_arg_poly: vec![0, 1],
            a_poly: vec![-4, 21, -36, 24],
        },
        IdentityFamily {
            id: 3,
            k_left: 5,
            n_poly: vec![15, -60, 60],
            d_arg_poly: vec![0, 1],
            a_poly: vec![-77, 905, -4050, 8700, -9000, 3600],
        },
        IdentityFamily {
            id: 4,
            k_left: 5,
            n_poly: vec![19, -60, 60],
            d_arg_poly: vec![0, 1],
            a_poly: vec![-152, 1355, -4950, 9300, -9000, 3600],
        },
        IdentityFamily {
            id: 5,
            k_left: 5,
            n_poly: vec![62, -240, 240],
            d_arg_poly: vec![-1, 3],
            a_poly: vec![-3597, 35995, -144000, 288000, -288000, 115200],
        },
        IdentityFamily {
            id: 6,
            k_left: 9,
            n_poly: vec![2835, 11340, 11340],
            d_arg_poly: vec![2831, 17001, 34020, 22680],
            a_poly: vec![
                8023467184451,
                144626588131776,
                1158443736409575,
                5411800833695550,
                16249739546454750,
                32522432635935900,
                43386206573682000,
                37201301530092000,
                18603931881780000,
                4134207084840000,
            ],
        },
        IdentityFamily {
            id: 7,
            k_left: 9,
            n_poly: vec![2843, 11340, 11340],
            d_arg_poly: vec![2840, 17019, 34020, 22680],
            a_poly: vec![
                8126002273751,
                146062077851076,
                1167056670132675,
                5440510606648950,
                16307159089299750,
                32591336087349900,
                43432142207958000,
                37214425997028000,
                18603931881780000,
                4134207084840000,
            ],
        },
    ]
}

fn family(id: u8) -> Result<IdentityFamily> {
    identity_families()
        .into_iter()
        .find(|f| f.id == id)
        .ok_or(Error::UnknownFamily(id))
}

fn eval_poly(coeffs: &[i64], x: u64) -> BigUint {
    // Horner over exact integers
    let x = BigInt::from(x);
    let mut acc = BigInt::zero();
    for &c in coeffs.iter().rev() {
        acc = acc * &x + c;
    }
    assert!(!acc.is_negative(), "polynomial argument went negative");
    acc.to_biguint().unwrap()
}

/// The three exact binomials of an identity at one evaluation point.
#[derive(Clone, Debug)]
pub struct IdentityEvaluation {
    pub id: u8,
    pub x: u64,
    pub left_big: BigUint,
    pub left_small: BigUint,
    pub right: BigUint,
    pub holds: bool,
    /// Equals `left_small`; the difference term `C(d_arg(x), 2)`.
    pub d: BigUint,
    pub n_arg: BigUint,
    pub d_arg: BigUint,
    pub a_arg: BigUint,
}

/// Evaluates all three binomials of identity `id` at `x` exactly.
pub fn identity_eval(id: u8, x: u64) -> Result<IdentityEvaluation> {
    assert!(x >= 1);
    let fam = family(id)?;
    let n_arg = eval_poly(&fam.n_poly, x);
    let d_arg = eval_poly(&fam.d_arg_poly, x);
    let a_arg = eval_poly(&fam.a_poly, x);
    let left_big = binom_big(&n_arg, fam.k_left);
    let left_small = binom_big(&d_arg, 2);
    let right = binom_big(&a_arg, 2);
    let holds = &left_big + &left_small == right;
    Ok(IdentityEvaluation {
        id,
        x,
        d: left_small.clone(),
        left_big,
        left_small,
        right,
        holds,
        n_arg,
        d_arg,
        a_arg,
    })
}

/// Quality of an identity: the degree of `x` in the big binomials divided by
/// the degree in the difference term, `(k_left * deg n) / (2 * deg d_arg)`.
pub fn identity_quality(id: u8) -> Result<Ratio<u64>> {
    let fam = family(id)?;
    let deg_n = (fam.n_poly.len() - 1) as u64;
    let deg_d = (fam.d_arg_poly.len() - 1) as u64;
    let deg_a = (fam.a_poly.len() - 1) as u64;
    // both sides of the identity must have the same degree in x
    assert_eq!(fam.k_left * deg_n, 2 * deg_a, "family {id} degree mismatch");
    Ok(Ratio::new(fam.k_left * deg_n, 2 * deg_d))
}
