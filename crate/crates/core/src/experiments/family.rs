//! Seeded families of 1-bounded trial functions.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{mult_character, FieldCtx};
use crate::harmonic::FpFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyKind {
    /// `e(theta_x)` with independent uniform phases.
    RandomUnimodular,
    /// `1_A` with each element kept independently with probability `density`.
    RandomIndicator { density: f64 },
    /// `e_p(a x^2 + b x + c)` with fixed `a` and random `b, c`.
    QuadraticPhase { a: u64 },
    /// Legendre symbol of a random affine image, `x -> chi_2(u x + t)`.
    CharacterPhase,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyKind::RandomUnimodular => f.write_str("random-unimodular"),
            FamilyKind::RandomIndicator { density } => write!(f, "random-indicator:{density}"),
            FamilyKind::QuadraticPhase { a } => write!(f, "quadratic-phase:{a}"),
            FamilyKind::CharacterPhase => f.write_str("character-phase"),
        }
    }
}

/// `random-unimodular`, `random-indicator[:density]`, `quadratic-phase[:a]`, `character-phase`.
impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let bad = || Error::InvalidArgument(format!("unknown function family '{s}'"));
        match (name, arg) {
            ("random-unimodular", None) => Ok(FamilyKind::RandomUnimodular),
            ("character-phase", None) => Ok(FamilyKind::CharacterPhase),
            ("random-indicator", arg) => {
                let density = arg.map_or(Ok(0.5), |a| a.parse::<f64>().map_err(|_| bad()))?;
                if !(0.0..=1.0).contains(&density) {
                    return Err(Error::InvalidArgument(format!("density {density} not in [0, 1]")));
                }
                Ok(FamilyKind::RandomIndicator { density })
            }
            ("quadratic-phase", arg) => {
                let a = arg.map_or(Ok(1), |a| a.parse::<u64>().map_err(|_| bad()))?;
                Ok(FamilyKind::QuadraticPhase { a })
            }
            _ => Err(bad()),
        }
    }
}

/// A family together with the seed that drives it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialFunctionFamily {
    pub kind: FamilyKind,
    pub seed: u64,
}

/// Generator for one `(p, trial)` cell: ChaCha8 keyed by `seed`, with the
/// stream id split off from `(p, trial)` so cells never share randomness.
pub fn trial_rng(seed: u64, p: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((p << 32) ^ trial);
    rng
}

impl TrialFunctionFamily {
    pub fn new(kind: FamilyKind, seed: u64) -> Self {
        Self { kind, seed }
    }

    /// `count` functions for trial number `trial` over `ctx`.
    pub fn generate(&self, ctx: &Arc<FieldCtx>, trial: u64, count: usize) -> Result<Vec<FpFunction>> {
        let mut rng = trial_rng(self.seed, ctx.p(), trial);
        (0..count).map(|_| self.draw(ctx, &mut rng)).collect()
    }

    fn draw(&self, ctx: &Arc<FieldCtx>, rng: &mut ChaCha8Rng) -> Result<FpFunction> {
        let p = ctx.p();
        let f = match self.kind {
            FamilyKind::RandomUnimodular => {
                let values = (0..p)
                    .map(|_| Complex64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU))
                    .collect();
                FpFunction::bounded(ctx.clone(), values)?
            }
            FamilyKind::RandomIndicator { density } => {
                let members: Vec<u64> = (0..p).filter(|_| rng.gen_bool(density)).collect();
                FpFunction::indicator(ctx.clone(), members)
            }
            FamilyKind::QuadraticPhase { a } => {
                let a = a % p;
                let b = rng.gen_range(0..p);
                let c = rng.gen_range(0..p);
                let cx = ctx.clone();
                FpFunction::phase(ctx.clone(), move |x| {
                    cx.add(cx.add(cx.mul(a, cx.mul(x, x)), cx.mul(b, x)), c)
                })
            }
            FamilyKind::CharacterPhase => {
                ctx.require_odd()?;
                let chi = mult_character(ctx, 2)?;
                let u = rng.gen_range(1..p);
                let t = rng.gen_range(0..p);
                let mut f = FpFunction::from_fn(ctx.clone(), |x| chi.at(ctx.add(ctx.mul(u, x), t)));
                f.mark_bounded()?;
                f
            }
        };
        Ok(f)
    }
}
