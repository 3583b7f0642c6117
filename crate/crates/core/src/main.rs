//! `bincoll`: search for coincidences among binomial coefficients.

use bincoll::output::{Format, OutputRecord, RecordWriter};
use bincoll::records::{CollisionRecord, NearCollisionRecord};
use bincoll::scan::{ScanConfig, ScanMode, Scanner};
use bincoll::sieve::{
    apply_bad_residues, bad_residues, closed_form_a, density_limit, image_mod_p, load_checkpoint,
    primes_up_to, save_checkpoint, verify_survivors, SievePlan, SieveState,
};
use bincoll::{families, Error};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "bincoll", version, about = "binomial coefficient collision search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Priority-queue scan over all C(n,k) with diagonal index n-k below a bound.
    Scan(ScanArgs),
    /// Modular sieve for one (k,l) pair up to a value bound.
    Sieve(SieveArgs),
    /// Image sizes A(k,p) of the map n -> C(n,k) over F_p.
    Akp(AkpArgs),
    /// Known collision catalogs and infinite families.
    Families(FamiliesArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Record format.
    #[arg(long, default_value = "jsonl")]
    format: Format,
    /// Write records to a file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl OutputArgs {
    fn writer(&self) -> Result<RecordWriter<Box<dyn Write>>, Error> {
        let out: Box<dyn Write> = match &self.output {
            Some(path) => Box::new(std::fs::File::create(path)?),
            None => Box::new(std::io::stdout().lock()),
        };
        Ok(RecordWriter::new(out, self.format))
    }
}

#[derive(Args)]
struct ScanArgs {
    /// Table size N; all C(n,k) with 2 <= k <= n/2 and n-k < N are visited.
    #[arg(long)]
    max_index: u64,
    /// What to report: exact collisions or near collisions.
    #[arg(long, default_value = "collisions", value_parser = parse_mode)]
    mode: ScanMode,
    /// Exponent e in the near-collision admission bound C(m,l) >= d^e.
    #[arg(long, default_value_t = 3)]
    near_exponent: u32,
    /// Significand width of the approximate fast path, in bits.
    #[arg(long, default_value_t = 128)]
    precision_bits: u32,
    /// Use exact big-integer arithmetic throughout.
    #[arg(long)]
    exact: bool,
    /// Check the table-dependency invariant at every pop (exact mode).
    #[arg(long)]
    check_invariants: bool,
    #[command(flatten)]
    out: OutputArgs,
}

fn parse_mode(s: &str) -> Result<ScanMode, String> {
    match s {
        "collisions" => Ok(ScanMode::Collisions),
        "near" => Ok(ScanMode::Near),
        other => Err(format!("unknown mode {other:?} (expected collisions or near)")),
    }
}

#[derive(Args)]
struct SieveArgs {
    #[arg(long)]
    k: u64,
    #[arg(long)]
    l: u64,
    /// Value bound M, a decimal integer of arbitrary size.
    #[arg(long, value_parser = parse_biguint)]
    max_value: BigUint,
    /// Use all primes p with l < p <= this bound.
    #[arg(long, default_value_t = 500)]
    prime_bound: u64,
    /// Checkpoint file, written after every applied prime.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Resume from the checkpoint file instead of starting fresh.
    #[arg(long, requires = "checkpoint")]
    resume: bool,
    /// Worker threads for computing bad residues.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    out: OutputArgs,
}

fn parse_biguint(s: &str) -> Result<BigUint, String> {
    BigUint::parse_bytes(s.as_bytes(), 10).ok_or_else(|| format!("not a decimal integer: {s:?}"))
}

#[derive(Args)]
struct AkpArgs {
    #[arg(long)]
    k: u64,
    /// A single prime.
    #[arg(long, conflicts_with = "prime_range")]
    p: Option<u64>,
    /// An inclusive prime range A..B.
    #[arg(long, value_parser = parse_range)]
    prime_range: Option<(u64, u64)>,
    /// Also evaluate the closed form for A(k,p) and report agreement.
    #[arg(long)]
    compare_closed_form: bool,
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let a = a.parse().map_err(|e| format!("bad range start: {e}"))?;
    let b = b.parse().map_err(|e| format!("bad range end: {e}"))?;
    Ok((a, b))
}

#[derive(Args)]
struct FamiliesArgs {
    #[command(subcommand)]
    command: FamiliesCommand,
}

#[derive(Subcommand)]
enum FamiliesCommand {
    /// List the polynomial identities and their qualities.
    List,
    /// Evaluate one identity exactly at a point.
    Eval {
        #[arg(long)]
        family: u8,
        #[arg(long)]
        x: u64,
    },
    /// Verify one identity exactly for all 1 <= x <= x-max.
    Verify {
        #[arg(long)]
        family: u8,
        #[arg(long)]
        x_max: u64,
    },
    /// Print (and optionally verify) Fibonacci family members.
    Fib {
        #[arg(long)]
        max_i: u64,
        /// Confirm exact binomial equality for members up to this index.
        #[arg(long)]
        exact_to: Option<u64>,
    },
    /// Operations on the embedded catalog of known coincidences.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// Recompute every catalog row exactly.
    Verify,
    /// Emit the catalog as records.
    Export {
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Precision(_)
                | Error::UnsupportedClosedForm { .. }
                | Error::PrimeTooSmall { .. }
                | Error::NotPrime(_)
                | Error::InvalidPlan { .. }
                | Error::CheckpointMismatch(_)
                | Error::CheckpointVersion(_)
                | Error::UnknownFamily(_) => 2,
                Error::CatalogMismatch { .. } => 3,
                _ => 1,
            }
        }
    };
    std::process::exit(code);
}

fn run(command: Command) -> Result<i32, Error> {
    match command {
        Command::Scan(args) => cmd_scan(args),
        Command::Sieve(args) => cmd_sieve(args),
        Command::Akp(args) => cmd_akp(args),
        Command::Families(args) => cmd_families(args.command),
    }
}

fn cmd_scan(args: ScanArgs) -> Result<i32, Error> {
    let config = ScanConfig {
        max_index: args.max_index,
        mode: args.mode,
        near_exponent: args.near_exponent,
        precision_bits: args.precision_bits,
        exact: args.exact,
        check_invariants: args.check_invariants,
    };
    let start = Instant::now();
    let mut writer = args.out.writer()?;
    let mut count = 0u64;
    for record in Scanner::new(&config)? {
        writer.write(&OutputRecord::from(&record))?;
        count += 1;
    }
    writer.finish()?;
    eprintln!(
        "scan: N={} records={} elapsed={:.3}s",
        args.max_index,
        count,
        start.elapsed().as_secs_f64()
    );
    Ok(0)
}

fn cmd_sieve(args: SieveArgs) -> Result<i32, Error> {
    let start = Instant::now();
    let mut plan = SievePlan::new(args.k, args.l, args.max_value)?;
    plan.prime_bound = args.prime_bound;
    let mut state = if args.resume {
        // requires(checkpoint) guarantees the path is present
        load_checkpoint(args.checkpoint.as_deref().unwrap(), &plan)?
    } else {
        SieveState::new(&plan)
    };
    eprintln!(
        "sieve: k={} l={} m range [{}, {}] candidates={}",
        plan.k,
        plan.l,
        state.m_min,
        state.m_max,
        state.remaining()
    );
    let jobs = args.jobs.max(1);
    let pending: Vec<u64> = plan
        .primes()
        .into_iter()
        .filter(|p| !state.primes_done.contains(p))
        .collect();
    for chunk in pending.chunks(jobs) {
        if state.survivors.is_empty() {
            break;
        }
        // compute a batch of residue lists in parallel, apply in ascending
        // prime order so the per-prime stats are schedule independent
        let computed: Vec<(u64, Vec<u64>)> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunk
                .iter()
                .map(|&p| scope.spawn(move || bad_residues(plan.k, plan.l, p).map(|bad| (p, bad))))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sieve worker panicked"))
                .collect::<Result<_, _>>()
        })?;
        for (p, bad) in computed {
            if state.survivors.is_empty() {
                break;
            }
            let before = state.remaining();
            apply_bad_residues(&mut state, p, &bad);
            let after = state.remaining();
            eprintln!("sieve: p={p} removed={} remaining={after}", before - after);
            if let Some(path) = &args.checkpoint {
                save_checkpoint(path, &plan, &state)?;
            }
        }
    }
    let (collisions, false_survivors) = verify_survivors(&plan, &state);
    let mut writer = args.out.writer()?;
    for c in &collisions {
        writer.write(&OutputRecord::from(c))?;
    }
    writer.finish()?;
    for m in &false_survivors {
        eprintln!("sieve: survivor m={m} failed exact verification");
    }
    eprintln!(
        "sieve: collisions={} false_survivors={} elapsed={:.3}s",
        collisions.len(),
        false_survivors.len(),
        start.elapsed().as_secs_f64()
    );
    Ok(0)
}

fn cmd_akp(args: AkpArgs) -> Result<i32, Error> {
    let primes: Vec<u64> = match (args.p, args.prime_range) {
        (Some(p), None) => vec![p],
        (None, Some((a, b))) => primes_up_to(b).into_iter().filter(|&p| p >= a).collect(),
        _ => {
            eprintln!("error: exactly one of --p and --prime-range is required");
            return Ok(2);
        }
    };
    let out = std::io::stdout();
    let mut out = out.lock();
    for p in primes {
        // k = 1 is a bijection; image_mod_p handles it like any other k
        let stats = image_mod_p(args.k, p)?;
        write!(out, "k={} p={} A={} density={}", args.k, p, stats.size(), stats.density())?;
        if args.compare_closed_form {
            let cf = closed_form_a(args.k, p)?;
            write!(out, " closed_form={cf} match={}", cf == stats.size())?;
        }
        writeln!(out)?;
    }
    let limit = density_limit(args.k);
    eprintln!(
        "akp: k={} density limit {} ~ {:.6}",
        args.k,
        limit,
        limit.to_f64().unwrap_or(f64::NAN)
    );
    Ok(0)
}

fn cmd_families(command: FamiliesCommand) -> Result<i32, Error> {
    let out = std::io::stdout();
    let mut out = out.lock();
    match command {
        FamiliesCommand::List => {
            for fam in families::identity_families() {
                let q = families::identity_quality(fam.id)?;
                writeln!(
                    out,
                    "family={} k={} deg_n={} deg_d_arg={} quality={}",
                    fam.id,
                    fam.k_left,
                    fam.n_poly.len() - 1,
                    fam.d_arg_poly.len() - 1,
                    q
                )?;
            }
            Ok(0)
        }
        FamiliesCommand::Eval { family, x } => {
            let e = families::identity_eval(family, x)?;
            writeln!(out, "family={} x={} n_arg={} d_arg={} a_arg={}", e.id, e.x, e.n_arg, e.d_arg, e.a_arg)?;
            writeln!(out, "C(n,{}) = {}", families::identity_families()[family as usize - 1].k_left, e.left_big)?;
            writeln!(out, "C(d_arg,2) = {}", e.left_small)?;
            writeln!(out, "C(a,2) = {}", e.right)?;
            writeln!(out, "holds={}", e.holds)?;
            Ok(if e.holds { 0 } else { 3 })
        }
        FamiliesCommand::Verify { family, x_max } => {
            let mut failures = 0u64;
            for x in 1..=x_max {
                if !families::identity_eval(family, x)?.holds {
                    writeln!(out, "family={family} x={x} FAILED")?;
                    failures += 1;
                }
            }
            writeln!(out, "family={} checked x=1..{} failures={}", family, x_max, failures)?;
            Ok(if failures == 0 { 0 } else { 3 })
        }
        FamiliesCommand::Fib { max_i, exact_to } => {
            let mut failures = 0u64;
            for i in 1..=max_i {
                let exact = exact_to.is_some_and(|bound| i <= bound);
                let v = families::verify_fibonacci(i, exact);
                writeln!(
                    out,
                    "i={} n={} k={} m={} l={} criterion={}{}",
                    i,
                    v.member.n,
                    v.member.k,
                    v.member.m,
                    v.member.l,
                    v.criterion_holds,
                    match v.exact_equal {
                        Some(eq) => format!(" exact={eq}"),
                        None => String::new(),
                    }
                )?;
                if !v.criterion_holds || v.exact_equal == Some(false) {
                    failures += 1;
                }
            }
            Ok(if failures == 0 { 0 } else { 3 })
        }
        FamiliesCommand::Catalog { command } => match command {
            CatalogCommand::Verify => {
                let report = families::verify_catalog()?;
                writeln!(
                    out,
                    "catalog verified: {} collisions, {} d=1 near collisions",
                    report.collisions, report.near_d1
                )?;
                Ok(0)
            }
            CatalogCommand::Export { out: out_args } => {
                let mut writer = out_args.writer()?;
                for row in families::catalog() {
                    let value = BigUint::from(row.value);
                    let record = match row.kind {
                        families::CatalogKind::Collision => OutputRecord::from(&CollisionRecord {
                            n: row.n,
                            k: row.k,
                            m: row.m,
                            l: row.l,
                            value,
                        }),
                        families::CatalogKind::NearCollisionD1 => {
                            OutputRecord::from(&NearCollisionRecord {
                                n: row.n,
                                k: row.k,
                                m: row.m,
                                l: row.l,
                                d: BigUint::one(),
                                value,
                            })
                        }
                    };
                    writer.write(&record)?;
                }
                writer.finish()?;
                Ok(0)
            }
        },
    }
}
