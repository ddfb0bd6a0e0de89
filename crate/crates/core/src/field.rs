//! Prime field arithmetic, power residues and multiplicative characters.
//!
//! Elements of `F_p` are plain `u64` values in `0..p`. Products go through
//! `u128`, so any 64-bit prime is safe for the scalar arithmetic; tables of
//! length `p` (twiddles, characters, residue sets) are only built on demand.

use std::f64::consts::TAU;
use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;
use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};

/// Witnesses that make Miller-Rabin deterministic for every `n < 3.3 * 10^24`.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &MR_WITNESSES {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors of `n` in increasing order (trial division).
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q.saturating_mul(q) <= n {
        if n % q == 0 {
            out.push(q);
            while n % q == 0 {
                n /= q;
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// The ambient field `F_p` with a fixed primitive root.
#[derive(Debug)]
pub struct FieldCtx {
    p: u64,
    generator: u64,
    twiddles: OnceLock<Vec<Complex64>>,
}

impl FieldCtx {
    pub fn p(&self) -> u64 {
        self.p
    }

    /// `p` as an index bound.
    pub fn size(&self) -> usize {
        self.p as usize
    }

    /// Smallest positive primitive root.
    pub fn generator(&self) -> u64 {
        self.generator
    }

    pub fn reduce(&self, x: i128) -> u64 {
        x.rem_euclid(self.p as i128) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.p as u128) as u64
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.p - b % self.p)
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.p - a % self.p) % self.p
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.p)
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.p)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let a = a % self.p;
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.p - 2))
        }
    }

    /// `e_p(j) = exp(2 pi i j / p)` for `0 <= j < p`. Built on first use.
    pub fn twiddles(&self) -> &[Complex64] {
        self.twiddles.get_or_init(|| {
            let p = self.p as f64;
            (0..self.p)
                .map(|j| Complex64::from_polar(1.0, TAU * (j as f64) / p))
                .collect()
        })
    }

    /// `e_p(x)` for any residue `x`.
    pub fn e_p(&self, x: u64) -> Complex64 {
        self.twiddles()[(x % self.p) as usize]
    }

    pub fn require_odd(&self) -> Result<()> {
        if self.p == 2 {
            Err(Error::EvenModulus(self.p))
        } else {
            Ok(())
        }
    }

    /// `gcd(k, p - 1)`, the order that actually matters for `k`-th powers.
    pub fn normalize_order(&self, k: u64) -> Result<u64> {
        if k == 0 {
            return Err(Error::ZeroOrder);
        }
        Ok(k.gcd(&(self.p - 1)).max(1))
    }
}

/// Builds `F_p`, checking primality and picking the smallest primitive root.
pub fn make_field(p: u64) -> Result<Arc<FieldCtx>> {
    if p < 2 {
        return Err(Error::ModulusTooSmall(p));
    }
    if !is_prime(p) {
        return Err(Error::CompositeModulus(p));
    }
    let generator = if p == 2 {
        1
    } else {
        let factors = prime_factors(p - 1);
        (2..p)
            .find(|&g| factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
            .expect("every prime field has a primitive root")
    };
    Ok(Arc::new(FieldCtx {
        p,
        generator,
        twiddles: OnceLock::new(),
    }))
}

/// The set `Q_k` of nonzero `k`-th powers.
#[derive(Debug, Clone)]
pub struct ResidueClass {
    pub p: u64,
    /// Order as requested by the caller.
    pub k: u64,
    /// `gcd(k, p - 1)`.
    pub k_normalized: u64,
    pub elements: FixedBitSet,
}

impl ResidueClass {
    pub fn contains(&self, x: u64) -> bool {
        self.elements.contains((x % self.p) as usize)
    }

    pub fn len(&self) -> usize {
        self.elements.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.elements.ones().map(|x| x as u64).collect()
    }
}

fn residues_by_exponentiation(ctx: &FieldCtx, k: u64) -> FixedBitSet {
    let mut set = FixedBitSet::with_capacity(ctx.size());
    for x in 1..ctx.p() {
        set.insert(ctx.pow(x, k) as usize);
    }
    set
}

fn residues_from_generator(ctx: &FieldCtx, k: u64) -> FixedBitSet {
    // Q_k is the cyclic subgroup generated by g^k.
    let mut set = FixedBitSet::with_capacity(ctx.size());
    let step = ctx.pow(ctx.generator(), k);
    let mut x = 1u64;
    loop {
        set.insert(x as usize);
        x = ctx.mul(x, step);
        if x == 1 {
            break;
        }
    }
    set
}

/// `Q_k = { x^k : x != 0 }`, computed through the subgroup generated by
/// `g^gcd(k, p-1)`. Debug builds cross-check against direct exponentiation.
pub fn kth_power_residues(ctx: &FieldCtx, k: u64) -> Result<ResidueClass> {
    let k_normalized = ctx.normalize_order(k)?;
    let elements = residues_from_generator(ctx, k_normalized);
    debug_assert_eq!(elements, residues_by_exponentiation(ctx, k));
    Ok(ResidueClass {
        p: ctx.p(),
        k,
        k_normalized,
        elements,
    })
}

/// The multiplicative character `g^l -> e_k(l)`, extended by `chi(0) = 0`.
#[derive(Debug, Clone)]
pub struct MultCharacter {
    pub p: u64,
    pub k: u64,
    /// Discrete log of each value modulo `k` (entry 0 unused).
    exponents: Vec<u32>,
    values: Vec<Complex64>,
}

impl MultCharacter {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, x: u64) -> Complex64 {
        self.values[(x % self.p) as usize]
    }

    /// `l mod k` where `x = g^l`; `None` at zero.
    pub fn exponent(&self, x: u64) -> Option<u32> {
        let x = (x % self.p) as usize;
        (x != 0).then(|| self.exponents[x])
    }

    pub fn is_principal(&self) -> bool {
        self.k == 1
    }

    /// `(1 + chi(x) + ... + chi(x)^{k-1}) / k - 1_{x=0} / k`, which is `1_{Q_k}(x)`.
    pub fn residue_indicator(&self, x: u64) -> Complex64 {
        let chi = self.at(x);
        let mut power = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for _ in 0..self.k {
            sum += power;
            power *= chi;
        }
        let mut out = sum / self.k as f64;
        if x % self.p == 0 {
            out -= 1.0 / self.k as f64;
        }
        out
    }
}

/// Character of order `k` built from the context's primitive root.
pub fn mult_character(ctx: &FieldCtx, k: u64) -> Result<MultCharacter> {
    if k == 0 {
        return Err(Error::ZeroOrder);
    }
    let p = ctx.p();
    if (p - 1) % k != 0 {
        return Err(Error::OrderDoesNotDivide {
            k,
            p_minus_one: p - 1,
        });
    }
    let n = ctx.size();
    let mut exponents = vec![0u32; n];
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    let roots: Vec<Complex64> = (0..k)
        .map(|l| Complex64::from_polar(1.0, TAU * l as f64 / k as f64))
        .collect();
    let mut x = 1u64;
    for l in 0..(p - 1) {
        let e = (l % k) as usize;
        exponents[x as usize] = e as u32;
        values[x as usize] = roots[e];
        x = ctx.mul(x, ctx.generator());
    }
    Ok(MultCharacter {
        p,
        k,
        exponents,
        values,
    })
}

/// `1_{Q_k}(x)` written as an average of powers of `chi_k`.
pub fn residue_indicator_via_characters(ctx: &FieldCtx, k: u64, x: u64) -> Result<Complex64> {
    Ok(mult_character(ctx, k)?.residue_indicator(x))
}
