//! Linear-form averages with variables optionally restricted to `k`-th powers.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{check_len, shared_ctx};
use crate::budget;
use crate::error::{Error, Result};
use crate::harmonic::FpFunction;

/// Largest number of variables `lambda_linear` will enumerate.
pub const MAX_VARIABLES: usize = 3;

/// Pairwise independent forms `L_1, ..., L_m` in `d` variables, with a power
/// `k_j` attached to each variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystemSpec {
    d: usize,
    forms: Vec<Vec<i64>>,
    powers: Vec<u64>,
}

fn proportional(a: &[i64], b: &[i64]) -> bool {
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            if a[i] as i128 * b[j] as i128 != a[j] as i128 * b[i] as i128 {
                return false;
            }
        }
    }
    true
}

impl LinearSystemSpec {
    pub fn new(d: usize, forms: Vec<Vec<i64>>, powers: Vec<u64>) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidSystem(msg));
        if d == 0 {
            return invalid("need at least one variable".into());
        }
        if forms.is_empty() {
            return invalid("need at least one form".into());
        }
        if powers.len() != d {
            return invalid(format!("expected {d} powers, got {}", powers.len()));
        }
        if powers.contains(&0) {
            return invalid("powers must be positive".into());
        }
        for (i, form) in forms.iter().enumerate() {
            if form.len() != d {
                return invalid(format!("form {i} has {} coefficients, expected {d}", form.len()));
            }
            if form.iter().all(|&c| c == 0) {
                return invalid(format!("form {i} is zero"));
            }
        }
        for i in 0..forms.len() {
            for j in (i + 1)..forms.len() {
                if proportional(&forms[i], &forms[j]) {
                    return invalid(format!("forms {i} and {j} are proportional"));
                }
            }
        }
        for (j, &k) in powers.iter().enumerate() {
            if k == 1 {
                continue;
            }
            if let Some(i) = forms
                .iter()
                .position(|f| f.iter().enumerate().all(|(t, &c)| (t == j) == (c != 0)))
            {
                return invalid(format!(
                    "form {i} is a multiple of x_{} while k_{} = {k}",
                    j + 1,
                    j + 1
                ));
            }
        }
        Ok(Self { d, forms, powers })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn forms(&self) -> &[Vec<i64>] {
        &self.forms
    }

    pub fn powers(&self) -> &[u64] {
        &self.powers
    }

    /// Number of forms, `m`.
    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }
}

/// `E_{x in F_p^d} prod_i f_i(L_i(x_1^{k_1}, ..., x_d^{k_d}))`, or the same
/// with plain `x_j` when `restricted` is false.
pub fn lambda_linear(sys: &LinearSystemSpec, fs: &[FpFunction], restricted: bool) -> Result<Complex64> {
    check_len(fs, sys.len())?;
    let ctx = shared_ctx(fs)?;
    let p = ctx.size();
    let needed = budget::pow_saturating(p as u64, sys.d as u32).saturating_mul(sys.len() as u128);
    let budget = budget::global_budget();
    if sys.d > MAX_VARIABLES || needed > budget as u128 {
        return Err(Error::DimensionBudget {
            d: sys.d,
            needed,
            budget,
        });
    }
    let forms: Vec<Vec<u64>> = sys
        .forms
        .iter()
        .map(|f| f.iter().map(|&c| ctx.reduce(c as i128)).collect())
        .collect();
    // substitution table for each variable
    let subs: Vec<Vec<u64>> = sys
        .powers
        .iter()
        .map(|&k| {
            (0..p as u64)
                .map(|x| if restricted { ctx.pow(x, k) } else { x })
                .collect()
        })
        .collect();
    let tail = p.pow(sys.d as u32 - 1);
    let partial: Vec<Complex64> = (0..p)
        .into_par_iter()
        .map(|x0| {
            let mut vars = vec![0u64; sys.d];
            vars[0] = subs[0][x0];
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..tail {
                let mut rest = t;
                for j in 1..sys.d {
                    vars[j] = subs[j][rest % p];
                    rest /= p;
                }
                let mut prod = Complex64::new(1.0, 0.0);
                for (form, f) in forms.iter().zip(fs) {
                    let point = form
                        .iter()
                        .zip(&vars)
                        .fold(0u64, |s, (&c, &v)| ctx.add(s, ctx.mul(c, v)));
                    prod *= f.values()[point as usize];
                }
                acc += prod;
            }
            acc
        })
        .collect();
    Ok(partial.iter().sum::<Complex64>() / (p as f64).powi(sys.d as i32))
}
