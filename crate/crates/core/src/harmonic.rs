//! Functions on `F_p`, their Fourier transforms and Gowers uniformity norms.
//!
//! All averages use expectation normalization: `f^(a) = E_x f(x) e_p(a x)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::budget;
use crate::error::{Error, Result};
use crate::field::{make_field, FieldCtx};

/// Slack allowed when checking the 1-bounded flag.
pub const BOUND_SLACK: f64 = 1e-12;

/// Magnitudes closer than this are treated as ties in [`max_fourier_coeff`].
pub const TIE_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A complex-valued function on `F_p`, stored densely.
#[derive(Clone)]
pub struct FpFunction {
    ctx: Arc<FieldCtx>,
    values: Vec<Complex64>,
    bounded: bool,
}

impl fmt::Debug for FpFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FpFunction")
            .field("p", &self.ctx.p())
            .field("bounded", &self.bounded)
            .field("values", &self.values)
            .finish()
    }
}

impl FpFunction {
    pub fn new(ctx: Arc<FieldCtx>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != ctx.size() {
            return Err(Error::LengthMismatch {
                expected: ctx.size(),
                actual: values.len(),
            });
        }
        Ok(Self {
            ctx,
            values,
            bounded: false,
        })
    }

    /// Like [`FpFunction::new`] but asserts `sup |f| <= 1`.
    pub fn bounded(ctx: Arc<FieldCtx>, values: Vec<Complex64>) -> Result<Self> {
        let mut f = Self::new(ctx, values)?;
        f.mark_bounded()?;
        Ok(f)
    }

    pub fn from_fn(ctx: Arc<FieldCtx>, mut g: impl FnMut(u64) -> Complex64) -> Self {
        let values = (0..ctx.p()).map(&mut g).collect();
        Self {
            ctx,
            values,
            bounded: false,
        }
    }

    pub fn constant(ctx: Arc<FieldCtx>, c: Complex64) -> Self {
        let bounded = c.norm() <= 1.0 + BOUND_SLACK;
        let values = vec![c; ctx.size()];
        Self {
            ctx,
            values,
            bounded,
        }
    }

    pub fn one(ctx: Arc<FieldCtx>) -> Self {
        Self::constant(ctx, Complex64::new(1.0, 0.0))
    }

    /// `1_A` for the listed elements (reduced mod p).
    pub fn indicator(ctx: Arc<FieldCtx>, elements: impl IntoIterator<Item = u64>) -> Self {
        let mut values = vec![ZERO; ctx.size()];
        for x in elements {
            values[(x % ctx.p()) as usize] = Complex64::new(1.0, 0.0);
        }
        Self {
            ctx,
            values,
            bounded: true,
        }
    }

    /// `x -> e_p(phase(x))` where `phase` returns a residue.
    pub fn phase(ctx: Arc<FieldCtx>, mut phase: impl FnMut(u64) -> u64) -> Self {
        let values = (0..ctx.p()).map(|x| ctx.e_p(phase(x))).collect();
        Self {
            ctx,
            values,
            bounded: true,
        }
    }

    /// The additive character `x -> e_p(a x)`.
    pub fn additive_character(ctx: Arc<FieldCtx>, a: u64) -> Self {
        let c = ctx.clone();
        Self::phase(ctx, move |x| c.mul(a, x))
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn p(&self) -> u64 {
        self.ctx.p()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, x: u64) -> Complex64 {
        self.values[(x % self.ctx.p()) as usize]
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    /// Sets the 1-bounded flag after checking it.
    pub fn mark_bounded(&mut self) -> Result<()> {
        if let Some((index, v)) = self
            .values
            .iter()
            .enumerate()
            .find(|(_, v)| v.norm() > 1.0 + BOUND_SLACK)
        {
            return Err(Error::NotBounded {
                index,
                modulus: v.norm(),
            });
        }
        self.bounded = true;
        Ok(())
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.ctx.p() as f64
    }

    pub fn conj(&self) -> Self {
        Self {
            ctx: self.ctx.clone(),
            values: self.values.iter().map(|v| v.conj()).collect(),
            bounded: self.bounded,
        }
    }

    /// `x -> f(x + t)`.
    pub fn translate(&self, t: u64) -> Self {
        let n = self.values.len();
        let t = (t % self.ctx.p()) as usize;
        Self {
            ctx: self.ctx.clone(),
            values: (0..n).map(|x| self.values[(x + t) % n]).collect(),
            bounded: self.bounded,
        }
    }

    /// Pointwise `a f + b g`.
    pub fn linear_combination(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        same_field(self, other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        FpFunction::new(self.ctx.clone(), values)
    }

    pub fn to_json(&self) -> FpFunctionJson {
        FpFunctionJson {
            p: self.ctx.p(),
            re: self.values.iter().map(|v| v.re).collect(),
            im: self.values.iter().map(|v| v.im).collect(),
        }
    }

    pub fn from_json(json: &FpFunctionJson) -> Result<Self> {
        if json.re.len() != json.im.len() {
            return Err(Error::LengthMismatch {
                expected: json.re.len(),
                actual: json.im.len(),
            });
        }
        let ctx = make_field(json.p)?;
        let values = json
            .re
            .iter()
            .zip(&json.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        let mut f = FpFunction::new(ctx, values)?;
        // Fixtures are usually 1-bounded; the flag is informational.
        let _ = f.mark_bounded();
        Ok(f)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("plain floats serialize")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let json: FpFunctionJson = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("bad function fixture: {e}")))?;
        Self::from_json(&json)
    }
}

/// On-disk fixture form `{ "p": int, "re": [...], "im": [...] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FpFunctionJson {
    pub p: u64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

pub(crate) fn same_field(f: &FpFunction, g: &FpFunction) -> Result<()> {
    if f.p() != g.p() {
        return Err(Error::ContextMismatch {
            left: f.p(),
            right: g.p(),
        });
    }
    Ok(())
}

/// Fourier coefficients `coeffs[a] = f^(a)`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub ctx: Arc<FieldCtx>,
    pub coeffs: Vec<Complex64>,
}

impl Spectrum {
    /// `(sum_a |f^(a)|^s)^{1/s}`; `s = inf` gives the max.
    pub fn l_norm(&self, s: f64) -> f64 {
        if s.is_infinite() {
            self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
        } else {
            self.coeffs
                .iter()
                .map(|c| c.norm().powf(s))
                .sum::<f64>()
                .powf(1.0 / s)
        }
    }

    /// `sum_a |f^(a)|^4`, i.e. `||f||_{U^2}^4`.
    pub fn fourth_moment(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr().powi(2)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Naive,
    Fast,
}

/// Chirp-z transform for arbitrary length `p`.
///
/// Computes `X[a] = sum_x v[x] e_p(a x)` by writing
/// `a x = (a^2 + x^2 - (a - x)^2) / 2`, which turns the sum into a linear
/// convolution with the chirp `exp(-pi i n^2 / p)`; that convolution is done
/// with power-of-two FFTs of length at least `2p - 1`.
pub struct ChirpTransform {
    p: usize,
    chirp: Vec<Complex64>,
    kernel_hat: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for ChirpTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChirpTransform")
            .field("p", &self.p)
            .field("n", &self.kernel_hat.len())
            .finish()
    }
}

impl ChirpTransform {
    pub fn new(p: usize) -> Self {
        let n = (2 * p - 1).next_power_of_two();
        let two_p = 2 * p as u128;
        // n^2 is reduced mod 2p before scaling so the angle stays small.
        let chirp: Vec<Complex64> = (0..p)
            .map(|j| {
                let r = (j as u128 * j as u128 % two_p) as f64;
                Complex64::from_polar(1.0, PI * r / p as f64)
            })
            .collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let mut kernel = vec![ZERO; n];
        kernel[0] = chirp[0].conj();
        for j in 1..p {
            kernel[j] = chirp[j].conj();
            kernel[n - j] = chirp[j].conj();
        }
        forward.process(&mut kernel);
        Self {
            p,
            chirp,
            kernel_hat: kernel,
            forward,
            inverse,
        }
    }

    /// Unnormalized sums `sum_x v[x] e_p(a x)` for every `a`.
    pub fn transform(&self, values: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.p);
        let n = self.kernel_hat.len();
        let mut buf = vec![ZERO; n];
        for (slot, (v, w)) in buf.iter_mut().zip(values.iter().zip(&self.chirp)) {
            *slot = v * w;
        }
        self.forward.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / n as f64;
        self.chirp
            .iter()
            .zip(&buf)
            .map(|(w, c)| w * c * scale)
            .collect()
    }

    /// Expectation-normalized spectrum of `f`.
    pub fn spectrum(&self, f: &FpFunction) -> Spectrum {
        let scale = 1.0 / self.p as f64;
        Spectrum {
            ctx: f.ctx().clone(),
            coeffs: self
                .transform(f.values())
                .into_iter()
                .map(|c| c * scale)
                .collect(),
        }
    }
}

fn naive_spectrum(f: &FpFunction) -> Spectrum {
    let ctx = f.ctx();
    let p = ctx.size();
    let tw = ctx.twiddles();
    let coeffs = (0..p)
        .into_par_iter()
        .map(|a| {
            let mut idx = 0usize;
            let mut acc = ZERO;
            for v in f.values() {
                acc += v * tw[idx];
                idx += a;
                if idx >= p {
                    idx -= p;
                }
            }
            acc / p as f64
        })
        .collect();
    Spectrum {
        ctx: ctx.clone(),
        coeffs,
    }
}

pub fn fourier(f: &FpFunction, strategy: Strategy) -> Spectrum {
    match strategy {
        Strategy::Naive => naive_spectrum(f),
        Strategy::Fast => ChirpTransform::new(f.ctx().size()).spectrum(f),
    }
}

/// `(||f||_{L^s}, ||f||_{l^s})`. Pass `f64::INFINITY` for the sup norm.
pub fn norms(f: &FpFunction, s: f64) -> Result<(f64, f64)> {
    if s.is_nan() || s < 1.0 {
        return Err(Error::InvalidExponent(s));
    }
    if s.is_infinite() {
        let max = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        return Ok((max, max));
    }
    let sum: f64 = f.values().iter().map(|v| v.norm().powf(s)).sum();
    let p = f.p() as f64;
    Ok(((sum / p).powf(1.0 / s), sum.powf(1.0 / s)))
}

/// `<f, g> = E_x f(x) conj(g(x))`.
pub fn inner(f: &FpFunction, g: &FpFunction) -> Result<Complex64> {
    same_field(f, g)?;
    let sum: Complex64 = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| a * b.conj())
        .sum();
    Ok(sum / f.p() as f64)
}

/// `Delta_h f(x) = f(x + h) conj(f(x))`.
pub fn mult_derivative(f: &FpFunction, h: u64) -> FpFunction {
    let vals = f.values();
    let n = vals.len();
    let h = (h % f.p()) as usize;
    FpFunction {
        ctx: f.ctx().clone(),
        values: (0..n).map(|x| vals[(x + h) % n] * vals[x].conj()).collect(),
        bounded: f.is_bounded(),
    }
}

fn clamp_root(avg: f64, s: u32) -> f64 {
    avg.max(0.0).powf(1.0 / (1u64 << s) as f64)
}

/// `||f||_{U^s}^{2^s}` straight from the parallelepiped average.
pub fn gowers_direct_power(f: &FpFunction, s: u32) -> Result<f64> {
    if s == 0 {
        return Err(Error::InvalidDegree(s));
    }
    let p = f.ctx().size();
    budget::check(budget::pow_saturating(p as u64, s + 1))?;
    if s == 1 {
        // E_{x,h} f(x) conj(f(x+h)) factorizes as |E f|^2.
        return Ok(f.mean().norm_sqr());
    }
    let vals = f.values();
    let corners = 1usize << s;
    let conj_flags: Vec<bool> = (0..corners).map(|w| w.count_ones() % 2 == 1).collect();
    let tail_tuples = p.pow(s - 1);

    let per_h1: Vec<Complex64> = (0..p)
        .into_par_iter()
        .map(|h1| {
            let mut h = vec![0usize; s as usize];
            h[0] = h1;
            let mut offsets = vec![0usize; corners];
            let mut total = ZERO;
            for tail in 0..tail_tuples {
                let mut rest = tail;
                for slot in h.iter_mut().skip(1) {
                    *slot = rest % p;
                    rest /= p;
                }
                for (w, off) in offsets.iter_mut().enumerate() {
                    let mut o = 0usize;
                    for (bit, hb) in h.iter().enumerate() {
                        if w >> bit & 1 == 1 {
                            o += hb;
                        }
                    }
                    *off = o % p;
                }
                let mut inner_sum = ZERO;
                for x in 0..p {
                    let mut prod = Complex64::new(1.0, 0.0);
                    for (off, &c) in offsets.iter().zip(&conj_flags) {
                        let v = vals[(x + off) % p];
                        prod *= if c { v.conj() } else { v };
                    }
                    inner_sum += prod;
                }
                total += inner_sum;
            }
            total
        })
        .collect();
    let sum: Complex64 = per_h1.iter().sum();
    Ok(sum.re / (p as f64).powi(s as i32 + 1))
}

/// `||f||_{U^s}` by direct summation over all `(x, h_1, ..., h_s)`.
///
/// Cost is `p^{s+1}` terms, checked against the global budget. Roundoff can
/// leave the average slightly negative; it is clamped to zero before the root.
pub fn gowers_direct(f: &FpFunction, s: u32) -> Result<f64> {
    Ok(clamp_root(gowers_direct_power(f, s)?, s))
}

/// `||f||_{U^s}^{2^s}` averaging `||Delta_h f||_{U^2}^4` over `(s-2)`-tuples.
pub fn gowers_fast_power(f: &FpFunction, s: u32) -> Result<f64> {
    if s < 2 {
        return Err(Error::InvalidDegree(s));
    }
    let p = f.ctx().size();
    let log_p = (usize::BITS - p.leading_zeros()) as u128;
    budget::check(budget::pow_saturating(p as u64, s - 1).saturating_mul(log_p))?;
    let plan = ChirpTransform::new(p);
    if s == 2 {
        return Ok(plan.spectrum(f).fourth_moment());
    }
    let depth = s - 2;
    let tuples = p.pow(depth);
    let per_tuple: Vec<f64> = (0..tuples)
        .into_par_iter()
        .map(|t| {
            let mut g = f.clone();
            let mut rest = t;
            for _ in 0..depth {
                g = mult_derivative(&g, (rest % p) as u64);
                rest /= p;
            }
            plan.spectrum(&g).fourth_moment()
        })
        .collect();
    Ok(per_tuple.iter().sum::<f64>() / tuples as f64)
}

/// `||f||_{U^s}` for `s >= 2` through the `U^2`-Fourier identity.
pub fn gowers_fast(f: &FpFunction, s: u32) -> Result<f64> {
    Ok(clamp_root(gowers_fast_power(f, s)?, s))
}

/// `(a, |f^(a)|)` maximizing `|f^(a)|`; near-ties go to the smallest `a`.
pub fn max_fourier_coeff(f: &FpFunction) -> (u64, f64) {
    let spectrum = fourier(f, Strategy::Fast);
    let mut best = (0u64, spectrum.coeffs[0].norm());
    for (a, c) in spectrum.coeffs.iter().enumerate().skip(1) {
        if c.norm() > best.1 + TIE_TOLERANCE {
            best = (a as u64, c.norm());
        }
    }
    best
}
