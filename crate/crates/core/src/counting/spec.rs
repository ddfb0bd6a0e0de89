//! Progression configurations and the degree condition.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::IntPolynomial;
use crate::error::{Error, Result};
use crate::field::FieldCtx;

/// Outcome of checking the degree condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validation {
    Valid,
    /// Integer coefficients `a_m, ..., a_{m+k-1}` of a nonzero combination of
    /// degree `< m`, scaled to coprime entries with a positive leading entry.
    Violation(Vec<i64>),
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validation::Valid)
    }
}

/// `x, x+y, ..., x+(m-1)y, x+P_m(y), ..., x+P_{m+k-1}(y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgressionSpec {
    m: usize,
    polys: Vec<IntPolynomial>,
    validation: Validation,
}

impl ProgressionSpec {
    pub fn new(m: usize, polys: Vec<IntPolynomial>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument(
                "progression length m must be at least 1".into(),
            ));
        }
        let validation = degree_condition(m, &polys);
        Ok(Self {
            m,
            polys,
            validation,
        })
    }

    /// Plain `m`-term arithmetic progression.
    pub fn arithmetic(m: usize) -> Result<Self> {
        Self::new(m, Vec::new())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.polys.len()
    }

    /// Number of points in the configuration, `m + k`.
    pub fn len(&self) -> usize {
        self.m + self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn polys(&self) -> &[IntPolynomial] {
        &self.polys
    }

    pub fn validation(&self) -> &Validation {
        &self.validation
    }

    pub fn is_valid(&self) -> bool {
        self.validation.is_valid()
    }

    pub fn require_valid(&self) -> Result<()> {
        match &self.validation {
            Validation::Valid => Ok(()),
            Validation::Violation(w) => Err(Error::InvalidSpec { witness: w.clone() }),
        }
    }

    /// Slot `j` as a polynomial in `y`: `j y` below `m`, then `P_j`.
    pub fn slot_poly(&self, j: usize) -> IntPolynomial {
        if j < self.m {
            IntPolynomial::monomial(j as i64, 1)
        } else {
            self.polys[j - self.m].clone()
        }
    }

    /// `table[j][y] = P_j(y) mod p` with `P_j(y) = j y` for `j < m`.
    pub fn offset_table(&self, ctx: &FieldCtx) -> Vec<Vec<u64>> {
        self.offset_table_with_power(ctx, 1)
    }

    /// Offsets with `y` replaced by `y^l` in every slot.
    pub fn offset_table_with_power(&self, ctx: &FieldCtx, l: u64) -> Vec<Vec<u64>> {
        let ys: Vec<u64> = (0..ctx.p()).map(|y| ctx.pow(y, l)).collect();
        (0..self.len())
            .map(|j| {
                let poly = self.slot_poly(j);
                ys.iter().map(|&y| poly.eval_mod(ctx, y)).collect()
            })
            .collect()
    }

    /// Indices (into `polys`) whose degree drops once coefficients are reduced mod `p`.
    pub fn degree_collapse(&self, p: u64) -> Vec<usize> {
        self.polys
            .iter()
            .enumerate()
            .filter(|(_, poly)| poly.degree_mod(p) != poly.degree())
            .map(|(i, _)| i)
            .collect()
    }
}

/// Renders in the spec-string grammar, e.g. `m=3;P=y^3,y^4`.
impl fmt::Display for ProgressionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={}", self.m)?;
        for (i, poly) in self.polys.iter().enumerate() {
            f.write_str(if i == 0 { ";P=" } else { "," })?;
            write!(f, "{poly}")?;
        }
        Ok(())
    }
}

/// Checks that no nonzero rational combination of `polys` has degree `< m`.
///
/// Only monomials of degree `>= m` matter, so this is the kernel of the
/// coefficient matrix restricted to those rows, found by exact elimination.
pub fn validate_spec(spec: &ProgressionSpec) -> Validation {
    degree_condition(spec.m, &spec.polys)
}

fn degree_condition(m: usize, polys: &[IntPolynomial]) -> Validation {
    let cols = polys.len();
    if cols == 0 {
        return Validation::Valid;
    }
    let top = polys.iter().filter_map(|p| p.degree()).max().unwrap_or(0);
    let mut rows: Vec<Vec<BigRational>> = (m..=top)
        .map(|d| {
            polys
                .iter()
                .map(|p| BigRational::from_integer(BigInt::from(p.coeff(d))))
                .collect()
        })
        .collect();

    // Reduced row echelon form.
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pivot) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pivot);
        let lead = rows[r][c].clone();
        for v in rows[r].iter_mut() {
            *v /= &lead;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let factor = rows[i][c].clone();
                for j in 0..cols {
                    let delta = &factor * &rows[r][j];
                    rows[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let Some(free) = (0..cols).find(|c| !pivots.contains(c)) else {
        return Validation::Valid;
    };

    let mut kernel = vec![BigRational::zero(); cols];
    kernel[free] = BigRational::one();
    for (row, &pc) in pivots.iter().enumerate() {
        kernel[pc] = -rows[row][free].clone();
    }
    Validation::Violation(integer_witness(&kernel))
}

fn integer_witness(kernel: &[BigRational]) -> Vec<i64> {
    let lcm = kernel
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let mut ints: Vec<BigInt> = kernel
        .iter()
        .map(|q| q.numer() * (&lcm / q.denom()))
        .collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    let first_negative = ints.iter().find(|v| !v.is_zero()).is_some_and(|v| v.is_negative());
    for v in ints.iter_mut() {
        *v = &*v / &gcd;
        if first_negative {
            *v = -&*v;
        }
    }
    ints.iter()
        .map(|v| v.to_i64().expect("witness coefficient exceeds 64 bits"))
        .collect()
}
