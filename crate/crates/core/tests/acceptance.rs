//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test -p ffprog --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use num_complex::Complex64;
use num_integer::gcd;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ffprog::cli::DEFAULT_SEED;
use ffprog::counting::{exact_max_free_set, find_progression, parse_spec, DEFAULT_SEARCH_CAP};
use ffprog::experiments::{
    character_norm_decay, counterexample_demo, discorrelation_sweep, restricted_ap_error,
    restricted_ap_experiment, verify_counterexample_identity, weil_corollary_check, FamilyKind,
    OrderSelection, SweepReport, TrialFunctionFamily, DEFAULT_LADDER,
};
use ffprog::field::{divisors, is_prime, kth_power_residues, make_field, pow_mod, residue_indicator_via_characters};
use ffprog::harmonic::{
    fourier, gowers_direct, gowers_direct_power, gowers_fast, mult_derivative, FpFunction, Strategy,
};

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_bounded(p: u64, rng: &mut ChaCha8Rng) -> FpFunction {
    let ctx = make_field(p).unwrap();
    let values = (0..p)
        .map(|_| Complex64::from_polar(rng.gen::<f64>(), rng.gen::<f64>() * std::f64::consts::TAU))
        .collect();
    FpFunction::bounded(ctx, values).unwrap()
}

fn gowers_suite() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let primes = [7u64, 11, 13];
    let mut worst = [0f64; 4];
    for i in 0..200 {
        let p = primes[i % 3];
        let f = random_bounded(p, &mut rng);
        let u1 = gowers_direct(&f, 1).unwrap();
        let u2 = gowers_fast(&f, 2).unwrap();
        let u3_direct = gowers_direct(&f, 3).unwrap();
        let u3_fast = gowers_fast(&f, 3).unwrap();
        ensure(u1 <= u2 + 1e-9 && u2 <= u3_direct + 1e-9, || {
            format!("monotonicity fails: U1={u1} U2={u2} U3={u3_direct} (p={p}, #{i})")
        })?;

        let spectrum = fourier(&f, Strategy::Naive);
        let l4: f64 = spectrum.coeffs.iter().map(|c| c.norm().powi(4)).sum::<f64>().powf(0.25);
        let u2_direct = gowers_direct(&f, 2).unwrap();
        worst[0] = worst[0].max((u2_direct - l4).abs());
        worst[1] = worst[1].max((u3_direct - u3_fast).abs());

        let recursion: f64 = (0..p)
            .map(|h| gowers_direct_power(&mult_derivative(&f, h), 2).unwrap())
            .sum::<f64>()
            / p as f64;
        let direct8 = gowers_direct_power(&f, 3).unwrap();
        worst[2] = worst[2].max((recursion - direct8).abs());
    }
    ensure(worst[0] < 1e-9, || format!("U2 vs l4 of spectrum off by {:e}", worst[0]))?;
    ensure(worst[1] < 1e-7, || format!("direct vs fast U3 off by {:e}", worst[1]))?;
    ensure(worst[2] < 1e-8, || format!("derivative recursion off by {:e}", worst[2]))?;
    Ok(format!(
        "200 functions; max |U2-l4|={:.1e}, |U3 direct-fast|={:.1e}, recursion={:.1e}",
        worst[0], worst[1], worst[2]
    ))
}

fn fourier_suite() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = (0f64, 0f64);
    for p in [7u64, 97, 997, 10007] {
        let f = random_bounded(p, &mut rng);
        let naive = fourier(&f, Strategy::Naive);
        let fast = fourier(&f, Strategy::Fast);
        let diff = naive
            .coeffs
            .iter()
            .zip(&fast.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let energy: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / p as f64;
        let parseval: f64 = fast.coeffs.iter().map(|c| c.norm_sqr()).sum();
        worst.0 = worst.0.max(diff);
        worst.1 = worst.1.max((energy - parseval).abs());
        ensure(diff < 1e-9, || format!("p={p}: naive vs fast differ by {diff:e}"))?;
        ensure((energy - parseval).abs() < 1e-9, || format!("p={p}: Parseval off by {:e}", energy - parseval))?;
    }
    Ok(format!("max l-inf={:.1e}, Parseval={:.1e}", worst.0, worst.1))
}

fn counterexample_suite() -> Result<String, String> {
    let mut cases = 0;
    for p in (3..=31u64).filter(|&p| is_prime(p)) {
        let ctx = make_field(p).unwrap();
        ensure(verify_counterexample_identity(&ctx), || format!("phase identity fails at p={p}"))?;
        for a in 1..p {
            let (lhs, rhs) = counterexample_demo(&ctx, a).unwrap();
            ensure((lhs - 1.0).abs() <= 1e-9 && rhs <= 1e-12, || {
                format!("p={p} a={a}: lhs={lhs} rhs={rhs}")
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} (p, a) pairs"))
}

fn decay_check(kind: FamilyKind) -> Result<String, String> {
    let spec = parse_spec("m=3;P=y^3,y^4").unwrap();
    let report = discorrelation_sweep(&DEFAULT_LADDER, &spec, TrialFunctionFamily::new(kind, DEFAULT_SEED), 20)
        .map_err(|e| e.to_string())?;
    let medians = report.series("median");
    let first = medians.first().unwrap().1;
    let last = medians.last().unwrap().1;
    let fit = report.fit.ok_or("no decay fit")?;
    ensure(last < first && fit.c_hat > 0.0, || {
        format!("{kind}: median {first:e} -> {last:e}, c_hat={}", fit.c_hat)
    })?;
    Ok(format!("{kind}: median {first:.2e} -> {last:.2e}, c_hat={:.3}", fit.c_hat))
}

fn discorrelation_decay() -> Result<String, String> {
    let a = decay_check(FamilyKind::RandomUnimodular)?;
    let b = decay_check(FamilyKind::QuadraticPhase { a: 1 })?;
    Ok(format!("{a}; {b}"))
}

fn character_bounds() -> Result<String, String> {
    let s2 = character_norm_decay(&[101, 997, 10007], 2, OrderSelection::AllDivisors).map_err(|e| e.to_string())?;
    let s3 = character_norm_decay(&[101, 499], 3, OrderSelection::Specific(2)).map_err(|e| e.to_string())?;
    ensure(s2.proof_violations.is_empty(), || format!("s=2 violations {:?}", s2.proof_violations))?;
    ensure(s3.proof_violations.is_empty(), || format!("s=3 violations {:?}", s3.proof_violations))?;
    let headline: Vec<_> = s2.headline_violations.iter().filter(|(p, _)| *p == 10007).collect();
    ensure(headline.is_empty(), || format!("headline bound fails at p=10007: {headline:?}"))?;
    let checked = |r: &SweepReport| r.rows.iter().filter(|row| row.stat.ends_with(":norm")).count();
    let norm = s2
        .report
        .rows
        .iter()
        .find(|r| r.p == 10007 && r.stat == "k=2:norm")
        .map(|r| r.value)
        .unwrap();
    Ok(format!(
        "{} (p, k, s) cases, 0 violations; p=10007 k=2 U2={norm:.4}",
        checked(&s2.report) + checked(&s3.report)
    ))
}

fn weil_suite() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let primes = [13u64, 101, 997];
    let mut worst_ratio = 0f64;
    for i in 0..500 {
        let p = primes[i % 3];
        let r = 1 + (i / 3) % 2;
        let ctx = make_field(p).unwrap();
        let orders: Vec<u64> = divisors(p - 1).into_iter().filter(|&k| k > 1).collect();
        let k = *orders.choose(&mut rng).unwrap();
        let points = loop {
            let pts: Vec<u64> = (0..2 * r).map(|_| rng.gen_range(0..p)).collect();
            let unique = pts.iter().any(|b| pts.iter().filter(|c| *c == b).count() == 1);
            if unique {
                break pts;
            }
        };
        let w = weil_corollary_check(&ctx, k, &points).map_err(|e| e.to_string())?;
        ensure(w.holds, || format!("p={p} k={k} b={points:?}: {} > {}", w.modulus, w.bound))?;
        worst_ratio = worst_ratio.max(w.modulus / w.bound);
    }
    Ok(format!("500 configurations, largest modulus/bound = {worst_ratio:.3}"))
}

fn restricted_counting() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in [101u64, 211, 401] {
        let ctx = make_field(p).unwrap();
        // k = 1 and an order coprime to p - 1 both give k' = 1
        let coprime = (3..).find(|k| gcd(*k, p - 1) == 1).unwrap();
        for k in [1, coprime] {
            for density in [0.3, 0.5, 1.0] {
                let mut set = FixedBitSet::with_capacity(p as usize);
                for x in 0..p as usize {
                    if rng.gen_bool(density) {
                        set.insert(x);
                    }
                }
                let err = restricted_ap_error(&ctx, &set, 3, k).unwrap();
                let boundary = set.count_ones(..) as f64 / (p * p) as f64;
                ensure(err <= 2.0 / p as f64 && (err - boundary).abs() < 1e-15, || {
                    format!("p={p} k={k}: error {err} vs boundary {boundary}")
                })?;
            }
        }
    }
    let report = restricted_ap_experiment(&[101, 211, 401], 3, 2, 0.5, 20, DEFAULT_SEED).map_err(|e| e.to_string())?;
    let medians: Vec<f64> = report.series("median").iter().map(|r| r.1).collect();
    ensure(medians.windows(2).all(|w| w[1] < w[0]), || format!("medians not decreasing: {medians:?}"))?;
    Ok(format!(
        "k'=1 within boundary; medians {}",
        medians.iter().map(|m| format!("{m:.2e}")).collect::<Vec<_>>().join(" > ")
    ))
}

/// Largest subset of `Z/p` avoiding every mask in `forbidden`, by enumeration.
fn brute_force_max(p: u64, forbidden: &[u64]) -> u32 {
    (0u64..1 << p)
        .filter(|set| forbidden.iter().all(|m| set & m != *m))
        .map(|set| set.count_ones())
        .max()
        .unwrap()
}

fn configuration_masks(p: u64, polys: &[u32]) -> Vec<u64> {
    let mut masks = Vec::new();
    for y in 1..p {
        for x in 0..p {
            let mut mask = 0u64;
            for j in 0..3 {
                mask |= 1 << ((x + j * y) % p);
            }
            for &d in polys {
                mask |= 1 << ((x + pow_mod(y, d as u64, p)) % p);
            }
            masks.push(mask);
        }
    }
    masks
}

fn extremal_oracle() -> Result<String, String> {
    let mut summary = Vec::new();
    for (text, degrees) in [("m=3", vec![]), ("m=3;P=y^3,y^4", vec![3u32, 4])] {
        let spec = parse_spec(text).unwrap();
        for p in [3u64, 5, 7, 11] {
            let ctx = make_field(p).unwrap();
            let exact = exact_max_free_set(&ctx, &spec, DEFAULT_SEARCH_CAP).map_err(|e| e.to_string())?;
            let oracle = brute_force_max(p, &configuration_masks(p, &degrees));
            ensure(exact.size as u32 == oracle, || format!("{text} p={p}: search {} vs oracle {oracle}", exact.size))?;
            let mut bits = FixedBitSet::with_capacity(p as usize);
            exact.elements.iter().for_each(|&e| bits.insert(e as usize));
            ensure(find_progression(&ctx, &bits, &spec).is_none(), || format!("{text} p={p}: returned set not free"))?;
            if text == "m=3" && p == 5 {
                ensure(exact.size == 2, || format!("p=5 plain AP value {}", exact.size))?;
            }
            summary.push(format!("{p}:{}", exact.size));
        }
    }
    Ok(format!("sizes {}", summary.join(" ")))
}

fn residue_identities() -> Result<String, String> {
    let mut cases = 0;
    for p in (2..=101u64).filter(|&p| is_prime(p)) {
        let ctx = make_field(p).unwrap();
        for k in 1..=12u64 {
            let mut direct: Vec<u64> = (1..p).map(|x| pow_mod(x, k, p)).collect();
            direct.sort_unstable();
            direct.dedup();
            let reduced = kth_power_residues(&ctx, gcd(k, p - 1)).unwrap().to_vec();
            let plain = kth_power_residues(&ctx, k).unwrap().to_vec();
            let reduced_order = gcd(k, p - 1);
            ensure(direct == reduced && direct == plain, || format!("Q_{k} mismatch at p={p}"))?;
            if p > 2 {
                for x in 0..p {
                    let v = residue_indicator_via_characters(&ctx, reduced_order, x).unwrap();
                    let expected = if direct.binary_search(&x).is_ok() { 1.0 } else { 0.0 };
                    ensure((v - expected).norm() < 1e-9, || format!("indicator p={p} k={k} x={x}: {v}"))?;
                }
            }
            cases += 1;
        }
    }
    Ok(format!("{cases} (p, k) pairs"))
}

fn determinism() -> Result<String, String> {
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_ffprog"))
            .args([
                "discorrelate",
                "--spec",
                "m=3;P=y^3,y^4",
                "--primes",
                "101,211,401,809",
                "--family",
                "random-unimodular",
                "--trials",
                "20",
                "--seed",
                "7",
                "--format",
                "json",
            ])
            .output()
            .expect("binary runs");
        (out.status.code(), out.stdout)
    };
    let (code_a, a) = run();
    let (code_b, b) = run();
    ensure(code_a == Some(0) && code_b == Some(0), || format!("exit codes {code_a:?} {code_b:?}"))?;
    ensure(a == b, || "outputs differ".to_string())?;
    serde_json::from_slice::<SweepReport>(&a).map_err(|e| e.to_string())?;
    Ok(format!("{} identical bytes", a.len()))
}

fn main() {
    let criteria: [(u32, &str, Check, u64); 10] = [
        (1, "Gowers suite", gowers_suite, 30),
        (2, "Fourier suite", fourier_suite, 10),
        (3, "counterexample", counterexample_suite, 5),
        (4, "discorrelation decay", discorrelation_decay, 600),
        (5, "character norms", character_bounds, 300),
        (6, "Weil corollary", weil_suite, 30),
        (7, "restricted differences", restricted_counting, 300),
        (8, "exact extremal sets", extremal_oracle, 120),
        (9, "residue classes", residue_identities, 10),
        (10, "determinism", determinism, 600),
    ];
    let mut failures = 0;
    for (id, name, check, limit) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".to_string()));
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed > Duration::from_secs(limit) {
                Err(format!("took {elapsed:.1?}, limit {limit} s"))
            } else {
                Ok(detail)
            }
        });
        match result {
            Ok(detail) => println!("criterion {id:>2} PASS {name} [{elapsed:.2?}]: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("criterion {id:>2} FAIL {name} [{elapsed:.2?}]: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
