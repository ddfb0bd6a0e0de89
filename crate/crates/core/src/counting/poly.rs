//! Integer polynomials in one variable `y`.

use std::fmt;

use crate::field::FieldCtx;

/// Polynomial with `i64` coefficients, lowest degree first, trailing zeros stripped.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<i64>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `c y^d`.
    pub fn monomial(c: i64, d: usize) -> Self {
        let mut coeffs = vec![0; d + 1];
        coeffs[d] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Coefficient of `y^d` (zero past the degree).
    pub fn coeff(&self, d: usize) -> i64 {
        self.coeffs.get(d).copied().unwrap_or(0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree after reducing the coefficients mod `p`.
    pub fn degree_mod(&self, p: u64) -> Option<usize> {
        self.coeffs
            .iter()
            .rposition(|&c| (c as i128).rem_euclid(p as i128) != 0)
    }

    /// `P(y) mod p`: coefficients are reduced first, then Horner in `F_p`.
    pub fn eval_mod(&self, ctx: &FieldCtx, y: u64) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| ctx.add(ctx.mul(acc, y), ctx.reduce(c as i128)))
    }

    /// `P(y^l)`.
    pub fn compose_power(&self, l: usize) -> Self {
        assert!(l >= 1, "exponent must be positive");
        let mut coeffs = vec![0; self.coeffs.len().saturating_sub(1) * l + 1];
        for (d, &c) in self.coeffs.iter().enumerate() {
            coeffs[d * l] = c;
        }
        Self::new(coeffs)
    }
}

impl From<Vec<i64>> for IntPolynomial {
    fn from(coeffs: Vec<i64>) -> Self {
        Self::new(coeffs)
    }
}

/// Highest degree first, e.g. `2y^4+y^3-5`. The zero polynomial prints as `0`.
impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (d, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if c < 0 {
                f.write_str("-")?;
            } else if !first {
                f.write_str("+")?;
            }
            first = false;
            let mag = c.unsigned_abs();
            if d == 0 || mag != 1 {
                write!(f, "{mag}")?;
            }
            match d {
                0 => {}
                1 => f.write_str("y")?,
                _ => write!(f, "y^{d}")?,
            }
        }
        Ok(())
    }
}
