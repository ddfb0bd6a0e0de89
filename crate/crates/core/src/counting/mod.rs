//! Weighted counting operators for polynomial progressions and linear forms.
//!
//! Every `Lambda` average ranges over all `(x, y)` in `F_p^2`, `y = 0`
//! included. The set-level searches in [`search`] exclude `y = 0`.

mod grammar;
mod linear;
mod poly;
pub mod search;
mod spec;

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

pub use grammar::{parse_poly, parse_spec};
pub use linear::{lambda_linear, LinearSystemSpec};
pub use poly::IntPolynomial;
pub use search::{exact_max_free_set, find_progression, FreeSet, DEFAULT_SEARCH_CAP};
pub use spec::{validate_spec, ProgressionSpec, Validation};

use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::harmonic::{same_field, FpFunction};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn shared_ctx(fs: &[FpFunction]) -> Result<Arc<FieldCtx>> {
    let first = fs.first().ok_or(Error::LengthMismatch {
        expected: 1,
        actual: 0,
    })?;
    for f in &fs[1..] {
        same_field(first, f)?;
    }
    Ok(first.ctx().clone())
}

fn check_len(fs: &[FpFunction], expected: usize) -> Result<()> {
    if fs.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            actual: fs.len(),
        });
    }
    Ok(())
}

/// `E_{x,y} prod_j f_j(x + offsets[j][y])`.
///
/// Per-`y` partial sums are collected in order and added sequentially, so the
/// result does not depend on the thread schedule.
fn configuration_average(p: usize, offsets: &[Vec<u64>], fs: &[FpFunction]) -> Complex64 {
    let partial: Vec<Complex64> = (0..p)
        .into_par_iter()
        .map(|y| {
            let shifts: Vec<usize> = offsets.iter().map(|o| o[y] as usize).collect();
            let mut acc = ZERO;
            for x in 0..p {
                let mut prod = Complex64::new(1.0, 0.0);
                for (f, &s) in fs.iter().zip(&shifts) {
                    let mut idx = x + s;
                    if idx >= p {
                        idx -= p;
                    }
                    prod *= f.values()[idx];
                }
                acc += prod;
            }
            acc
        })
        .collect();
    partial.iter().sum::<Complex64>() / (p as f64 * p as f64)
}

fn ap_offsets(ctx: &FieldCtx, m: usize) -> Vec<Vec<u64>> {
    (0..m)
        .map(|j| (0..ctx.p()).map(|y| ctx.mul(j as u64, y)).collect())
        .collect()
}

/// `Lambda_m(f_0, ..., f_{m-1}) = E_{x,y} prod_j f_j(x + j y)`.
pub fn lambda_ap(fs: &[FpFunction]) -> Result<Complex64> {
    let ctx = shared_ctx(fs)?;
    let offsets = ap_offsets(&ctx, fs.len());
    Ok(configuration_average(ctx.size(), &offsets, fs))
}

/// `E_{x,y} prod_{j<m} f_j(x + j y) prod_{j>=m} f_j(x + P_j(y))`.
pub fn lambda_poly(spec: &ProgressionSpec, fs: &[FpFunction]) -> Result<Complex64> {
    lambda_poly_with_power(spec, fs, 1)
}

/// The same average with `y` replaced by `y^l` in every slot, i.e. the
/// configuration `x + j y^l`, `x + P_j(y^l)`.
pub fn lambda_poly_with_power(spec: &ProgressionSpec, fs: &[FpFunction], l: u64) -> Result<Complex64> {
    check_len(fs, spec.len())?;
    let ctx = shared_ctx(fs)?;
    if l == 0 {
        return Err(Error::InvalidArgument("power l must be positive".into()));
    }
    let offsets = spec.offset_table_with_power(&ctx, l);
    Ok(configuration_average(ctx.size(), &offsets, fs))
}

/// Dual function for slot `omit`:
/// `F(x) = E_y prod_{j != omit} f_j(x + P_j(y) - P_omit(y))`,
/// so that `<F, conj(f_omit)> = lambda_poly(spec, fs)`.
pub fn dual_function(spec: &ProgressionSpec, fs: &[FpFunction], omit: usize) -> Result<FpFunction> {
    check_len(fs, spec.len())?;
    if omit >= fs.len() {
        return Err(Error::IndexOutOfRange {
            index: omit,
            len: fs.len(),
        });
    }
    let ctx = shared_ctx(fs)?;
    let p = ctx.size();
    let offsets = spec.offset_table(&ctx);
    let values: Vec<Complex64> = (0..p)
        .into_par_iter()
        .map(|x| {
            let mut acc = ZERO;
            for y in 0..p {
                let base = offsets[omit][y];
                let mut prod = Complex64::new(1.0, 0.0);
                for (j, f) in fs.iter().enumerate() {
                    if j == omit {
                        continue;
                    }
                    let shift = ctx.sub(offsets[j][y], base) as usize;
                    prod *= f.values()[(x + shift) % p];
                }
                acc += prod;
            }
            acc / p as f64
        })
        .collect();
    let mut dual = FpFunction::new(ctx, values)?;
    if fs.iter().all(|f| f.is_bounded()) {
        dual.mark_bounded()?;
    }
    Ok(dual)
}
