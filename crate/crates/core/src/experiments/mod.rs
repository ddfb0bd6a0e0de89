//! Numerical experiments: discorrelation sweeps, the quadratic-phase failure
//! example, character norms, Weil-type sums, restricted-difference AP counts
//! and greedy progression-free sets.

mod family;
mod report;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rayon::prelude::*;

pub use family::{trial_rng, FamilyKind, TrialFunctionFamily};
pub use report::{fit_decay, median, DecayFit, SweepReport, SweepRow};

use crate::budget;
use crate::counting::search::completes_configuration;
use crate::counting::{find_progression, lambda_ap, lambda_poly, parse_spec, ProgressionSpec};
use crate::error::{Error, Result};
use crate::field::{divisors, kth_power_residues, make_field, mult_character, FieldCtx};
use crate::harmonic::{gowers_fast_power, FpFunction};

/// Ladder used when no primes are given.
pub const DEFAULT_LADDER: [u64; 4] = [101, 211, 401, 809];

/// `|Lambda_{m,P}(f) - Lambda_m(f_0..f_{m-1}) prod_{j>=m} E f_j|`.
pub fn discorrelation_error(ctx: &FieldCtx, spec: &ProgressionSpec, fs: &[FpFunction]) -> Result<f64> {
    spec.require_valid()?;
    discorrelation_gap(ctx, spec, fs)
}

/// [`discorrelation_error`] without the degree-condition check, for looking
/// at configurations where the factorization is expected to fail.
pub fn discorrelation_gap(ctx: &FieldCtx, spec: &ProgressionSpec, fs: &[FpFunction]) -> Result<f64> {
    if let Some(f) = fs.iter().find(|f| f.p() != ctx.p()) {
        return Err(Error::ContextMismatch {
            left: ctx.p(),
            right: f.p(),
        });
    }
    let full = lambda_poly(spec, fs)?;
    let m = spec.m();
    let ap = lambda_ap(&fs[..m])?;
    let means: Complex64 = fs[m..].iter().map(FpFunction::mean).product();
    Ok((full - ap * means).norm())
}

fn odd_field(p: u64) -> Result<Arc<FieldCtx>> {
    let ctx = make_field(p)?;
    ctx.require_odd()?;
    Ok(ctx)
}

fn require_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    Ok(())
}

/// Median and max of the discorrelation error over `trials` draws per prime.
pub fn discorrelation_sweep(
    primes: &[u64],
    spec: &ProgressionSpec,
    family: TrialFunctionFamily,
    trials: u64,
) -> Result<SweepReport> {
    spec.require_valid()?;
    require_trials(trials)?;
    let mut report = SweepReport::new(format!("discorrelate {spec} family={}", family.kind));
    for &p in primes {
        let ctx = odd_field(p)?;
        budget::check((p as u128).pow(2) * spec.len() as u128 * trials as u128)?;
        let errors: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let fs = family.generate(&ctx, t, spec.len())?;
                discorrelation_error(&ctx, spec, &fs)
            })
            .collect::<Result<_>>()?;
        report.push(p, "median", median(&errors), trials, family.seed);
        report.push(p, "max", errors.iter().copied().fold(0.0, f64::max), trials, family.seed);
    }
    Ok(report.finish("median"))
}

/// Phase `Q_j(t)` of the failure example:
/// `Q_0 = -t^2/2 - t`, `Q_1 = t^2`, `Q_2 = -t^2/2`, `Q_3 = t`.
pub fn counterexample_phase(ctx: &FieldCtx, j: usize, t: u64) -> u64 {
    let half = ctx.inv(2).expect("odd modulus");
    let sq = ctx.mul(t, t);
    match j {
        0 => ctx.sub(ctx.neg(ctx.mul(half, sq)), t),
        1 => sq,
        2 => ctx.neg(ctx.mul(half, sq)),
        3 => t,
        _ => panic!("slot {j} out of range"),
    }
}

/// Checks `Q_0(x) + Q_1(x+y) + Q_2(x+2y) + Q_3(x+y^2) = 0` for every `(x, y)`.
pub fn verify_counterexample_identity(ctx: &FieldCtx) -> bool {
    let p = ctx.p();
    (0..p).all(|x| {
        (0..p).all(|y| {
            let points = [x, ctx.add(x, y), ctx.add(x, ctx.mul(2, y)), ctx.add(x, ctx.mul(y, y))];
            let total = points
                .iter()
                .enumerate()
                .fold(0, |acc, (j, &pt)| ctx.add(acc, counterexample_phase(ctx, j, pt)));
            total == 0
        })
    })
}

/// `(|Lambda|, |Lambda_3 E f_3|)` for `f_j = e_p(a Q_j)` on `x, x+y, x+2y, x+y^2`.
pub fn counterexample_demo(ctx: &Arc<FieldCtx>, a: u64) -> Result<(f64, f64)> {
    ctx.require_odd()?;
    let a = a % ctx.p();
    if a == 0 {
        return Err(Error::ZeroPhase);
    }
    let fs: Vec<FpFunction> = (0..4)
        .map(|j| FpFunction::phase(ctx.clone(), |t| ctx.mul(a, counterexample_phase(ctx, j, t))))
        .collect();
    let spec = parse_spec("m=3;P=y^2")?;
    let lhs = lambda_poly(&spec, &fs)?.norm();
    let rhs = (lambda_ap(&fs[..3])? * fs[3].mean()).norm();
    Ok((lhs, rhs))
}

/// Which character orders [`character_norm_decay`] visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderSelection {
    /// Every divisor `k` of `p - 1`.
    AllDivisors,
    /// One order, reduced to `gcd(k, p - 1)` per prime.
    Specific(u64),
}

impl fmt::Display for OrderSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderSelection::AllDivisors => f.write_str("all"),
            OrderSelection::Specific(k) => write!(f, "{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterNormDecay {
    pub report: SweepReport,
    /// `(p, k)` where `||chi||^{2^s} > 2^s p^{-1/2} + p^{-s}`.
    pub proof_violations: Vec<(u64, u64)>,
    /// `(p, k)` where `||chi|| > 2 p^{-2^{-(s+1)}}`.
    pub headline_violations: Vec<(u64, u64)>,
}

/// `2^s p^{-1/2} + p^{-s}`, a bound on `||chi||_{U^s}^{2^s}`.
pub fn proof_bound_power(p: u64, s: u32) -> f64 {
    let p = p as f64;
    2f64.powi(s as i32) / p.sqrt() + p.powi(-(s as i32))
}

/// `2 p^{-2^{-(s+1)}}`.
pub fn headline_bound(p: u64, s: u32) -> f64 {
    2.0 * (p as f64).powf(-(0.5f64.powi(s as i32 + 1)))
}

/// `||chi_k||_{U^s}` for the selected orders, with both bounds per row.
///
/// Rows are named `k=<k>:norm`, `k=<k>:proof_bound`, `k=<k>:headline_bound`;
/// the principal character gets a single `k=1:skipped` row.
pub fn character_norm_decay(primes: &[u64], s: u32, orders: OrderSelection) -> Result<CharacterNormDecay> {
    if !(2..=3).contains(&s) {
        return Err(Error::InvalidDegree(s));
    }
    let mut report = SweepReport::new(format!("chardecay s={s} orders={orders}"));
    let mut proof_violations = Vec::new();
    let mut headline_violations = Vec::new();
    let exponent = 1u32 << s;
    for &p in primes {
        let ctx = odd_field(p)?;
        let mut ks = match orders {
            OrderSelection::AllDivisors => divisors(p - 1),
            OrderSelection::Specific(k) => vec![ctx.normalize_order(k)?],
        };
        ks.sort_unstable();
        ks.dedup();
        for k in ks {
            if k == 1 {
                report.push(p, "k=1:skipped", 0.0, 1, 0);
                continue;
            }
            let chi = mult_character(&ctx, k)?;
            let mut f = FpFunction::new(ctx.clone(), chi.values().to_vec())?;
            f.mark_bounded()?;
            let power = gowers_fast_power(&f, s)?.max(0.0);
            let norm = power.powf(1.0 / exponent as f64);
            let proof = proof_bound_power(p, s);
            let headline = headline_bound(p, s);
            if power > proof {
                proof_violations.push((p, k));
            }
            if norm > headline {
                headline_violations.push((p, k));
            }
            report.push(p, format!("k={k}:norm"), norm, 1, 0);
            report.push(p, format!("k={k}:proof_bound"), proof.powf(1.0 / exponent as f64), 1, 0);
            report.push(p, format!("k={k}:headline_bound"), headline, 1, 0);
        }
    }
    Ok(CharacterNormDecay {
        report: report.finish("k=2:norm"),
        proof_violations,
        headline_violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeilCheck {
    pub modulus: f64,
    pub bound: f64,
    pub holds: bool,
}

/// `|E_x chi((x-b_1)...(x-b_r)) conj(chi)((x-b_{r+1})...(x-b_{2r}))|`
/// against `2r p^{-1/2}`, with `r = points.len() / 2`.
///
/// At least one `b_i` must occur exactly once; otherwise the sum can be
/// large (e.g. `(0, 0, 1, 1)` with the Legendre symbol) and the
/// configuration is rejected as degenerate.
pub fn weil_corollary_check(ctx: &FieldCtx, k: u64, points: &[u64]) -> Result<WeilCheck> {
    if points.is_empty() || points.len() % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "need an even, nonzero number of points, got {}",
            points.len()
        )));
    }
    let chi = mult_character(ctx, ctx.normalize_order(k)?)?;
    if chi.is_principal() {
        return Err(Error::PrincipalCharacter);
    }
    let p = ctx.p();
    let points: Vec<u64> = points.iter().map(|&b| b % p).collect();
    let mut counts: HashMap<u64, usize> = HashMap::new();
    for &b in &points {
        *counts.entry(b).or_default() += 1;
    }
    if !counts.values().any(|&c| c == 1) {
        return Err(Error::DegenerateConfiguration);
    }
    let r = points.len() / 2;
    let (first, second) = points.split_at(r);
    let product = |x: u64, bs: &[u64]| bs.iter().fold(1, |acc, &b| ctx.mul(acc, ctx.sub(x, b)));
    let sum: Complex64 = (0..p)
        .map(|x| chi.at(product(x, first)) * chi.at(product(x, second)).conj())
        .sum();
    let modulus = sum.norm() / p as f64;
    let bound = 2.0 * r as f64 / (p as f64).sqrt();
    Ok(WeilCheck {
        modulus,
        bound,
        holds: modulus <= bound,
    })
}

/// `c[y] = #{x : x, x+y, ..., x+(m-1)y all in A}`.
fn ap_counts_by_difference(p: usize, set: &FixedBitSet, m: usize) -> Vec<u64> {
    (0..p)
        .map(|y| {
            (0..p)
                .filter(|&x| (0..m).all(|j| set.contains((x + j * y) % p)))
                .count() as u64
        })
        .collect()
}

/// `|E 1_A(x)...1_A(x+(m-1)y) 1_{Q_k}(y) - (1/k') E 1_A(x)...1_A(x+(m-1)y)|`.
pub fn restricted_ap_error(ctx: &FieldCtx, set: &FixedBitSet, m: usize, k: u64) -> Result<f64> {
    let q = kth_power_residues(ctx, k)?;
    let p = ctx.size();
    let counts = ap_counts_by_difference(p, set, m);
    let scale = (p * p) as f64;
    let all: u64 = counts.iter().sum();
    let restricted: u64 = (0..p).filter(|&y| q.contains(y as u64)).map(|y| counts[y]).sum();
    Ok((restricted as f64 / scale - all as f64 / scale / q.k_normalized as f64).abs())
}

fn random_set(ctx: &FieldCtx, density: f64, seed: u64, trial: u64) -> FixedBitSet {
    use rand::Rng;
    let mut rng = trial_rng(seed, ctx.p(), trial);
    let mut set = FixedBitSet::with_capacity(ctx.size());
    for x in 0..ctx.size() {
        if rng.gen_bool(density) {
            set.insert(x);
        }
    }
    set
}

/// Median and max of [`restricted_ap_error`] over random sets of the given
/// density, for `1 <= m <= 4`.
pub fn restricted_ap_experiment(
    primes: &[u64],
    m: usize,
    k: u64,
    density: f64,
    trials: u64,
    seed: u64,
) -> Result<SweepReport> {
    if !(1..=4).contains(&m) {
        return Err(Error::InvalidArgument(format!("m must be in 1..=4, got {m}")));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidArgument(format!("density {density} not in [0, 1]")));
    }
    require_trials(trials)?;
    let mut report = SweepReport::new(format!("restricted-ap m={m} k={k} density={density}"));
    for &p in primes {
        let ctx = odd_field(p)?;
        budget::check((p as u128).pow(2) * m as u128 * trials as u128)?;
        let errors: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|t| restricted_ap_error(&ctx, &random_set(&ctx, density, seed, t), m, k))
            .collect::<Result<_>>()?;
        report.push(p, "median", median(&errors), trials, seed);
        report.push(p, "max", errors.iter().copied().fold(0.0, f64::max), trials, seed);
    }
    Ok(report.finish("median"))
}

/// Greedy progression-free set: elements are visited in a seeded random
/// order and kept when they complete no configuration. Returns the sorted
/// set and its density.
pub fn greedy_free_set(ctx: &FieldCtx, spec: &ProgressionSpec, seed: u64) -> (Vec<u64>, f64) {
    let p = ctx.size();
    let mut order: Vec<usize> = (0..p).collect();
    order.shuffle(&mut trial_rng(seed, ctx.p(), 0));
    let offsets = spec.offset_table(ctx);
    let mut set = FixedBitSet::with_capacity(p);
    for a in order {
        if !completes_configuration(p, &offsets, &set, a) {
            set.insert(a);
        }
    }
    assert!(find_progression(ctx, &set, spec).is_none(), "greedy output contains a configuration");
    let elements: Vec<u64> = set.ones().map(|e| e as u64).collect();
    let density = elements.len() as f64 / p as f64;
    (elements, density)
}
