//! Bit-packed polynomials over GF(2).
//!
//! Bit `i` is the coefficient of `x^i`, so a polynomial and its hex encoding
//! are the same integer: `x^5 + x^4 + x^3 + x + 1` is `0x3b`. The zero
//! polynomial has an empty bit set and no degree.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Carry-less product of two 64-bit chunks.
pub fn clmul64(a: u64, b: u64) -> u128 {
    let mut acc = 0u128;
    let wide = a as u128;
    let mut rest = b;
    while rest != 0 {
        let i = rest.trailing_zeros();
        acc ^= wide << i;
        rest &= rest - 1;
    }
    acc
}

/// Reduce a carry-less product of two polynomials of degree < `n` modulo a
/// degree-`n` modulus (bit `n` set). Requires `n <= 63`.
pub fn reduce128(mut prod: u128, modulus: u64, n: u32) -> u64 {
    debug_assert!(n <= 63 && modulus >> n == 1);
    let m = modulus as u128;
    while prod >> n != 0 {
        let d = 127 - prod.leading_zeros();
        prod ^= m << (d - n);
    }
    prod as u64
}

/// Product of `a` and `b` modulo `modulus`, all packed in `u64`s.
pub fn mulmod64(a: u64, b: u64, modulus: u64, n: u32) -> u64 {
    reduce128(clmul64(a, b), modulus, n)
}

/// A polynomial over GF(2), packed 64 coefficients per limb.
///
/// Limbs are little-endian and never end in a zero limb, so equality of
/// polynomials is equality of limb vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitPoly {
    limbs: Vec<u64>,
}

impl BitPoly {
    pub fn zero() -> Self {
        BitPoly { limbs: Vec::new() }
    }

    pub fn one() -> Self {
        BitPoly { limbs: vec![1] }
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        BitPoly { limbs: vec![2] }
    }

    /// The monomial `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut p = BitPoly::zero();
        p.flip_coeff(k);
        p
    }

    pub fn from_limbs(limbs: Vec<u64>) -> Self {
        let mut p = BitPoly { limbs };
        p.normalize();
        p
    }

    pub fn from_u64(bits: u64) -> Self {
        Self::from_limbs(vec![bits])
    }

    /// The packed bits when the degree is below 64.
    pub fn to_u64(&self) -> Option<u64> {
        match self.limbs.len() {
            0 => Some(0),
            1 => Some(self.limbs[0]),
            _ => None,
        }
    }

    /// Parse the hex encoding, with or without a `0x` prefix.
    pub fn from_hex(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")).unwrap_or(t);
        if t.is_empty() || !t.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(Error::InvalidInput(alloc::format!(
                "not a hex-encoded polynomial: {s:?}"
            )));
        }
        let mut limbs = vec![0u64; (t.len() + 15) / 16];
        for (i, c) in t.chars().rev().enumerate() {
            let nibble = c.to_digit(16).unwrap() as u64;
            limbs[i / 16] |= nibble << (4 * (i % 16));
        }
        Ok(Self::from_limbs(limbs))
    }

    /// Hex encoding with a `0x` prefix; `0x0` for the zero polynomial.
    pub fn to_hex(&self) -> String {
        if self.limbs.is_empty() {
            return String::from("0x0");
        }
        let mut s = String::from("0x");
        let mut first = true;
        for &limb in self.limbs.iter().rev() {
            if first {
                s.push_str(&alloc::format!("{limb:x}"));
                first = false;
            } else {
                s.push_str(&alloc::format!("{limb:016x}"));
            }
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let last = *self.limbs.last()?;
        Some(64 * (self.limbs.len() - 1) + (63 - last.leading_zeros() as usize))
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.limbs
            .get(i / 64)
            .map_or(false, |limb| limb >> (i % 64) & 1 == 1)
    }

    pub fn flip_coeff(&mut self, i: usize) {
        if i / 64 >= self.limbs.len() {
            self.limbs.resize(i / 64 + 1, 0);
        }
        self.limbs[i / 64] ^= 1 << (i % 64);
        self.normalize();
    }

    /// Number of nonzero coefficients.
    pub fn num_terms(&self) -> usize {
        self.limbs.iter().map(|l| l.count_ones() as usize).sum()
    }

    /// Indices of nonzero coefficients, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.num_terms());
        for (j, &limb) in self.limbs.iter().enumerate() {
            let mut rest = limb;
            while rest != 0 {
                out.push(64 * j + rest.trailing_zeros() as usize);
                rest &= rest - 1;
            }
        }
        out
    }

    fn normalize(&mut self) {
        while self.limbs.last() == Some(&0) {
            self.limbs.pop();
        }
    }

    /// Addition = subtraction = XOR in characteristic 2.
    pub fn add(&self, other: &Self) -> Self {
        let (long, short) = if self.limbs.len() >= other.limbs.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut limbs = long.limbs.clone();
        for (i, &limb) in short.limbs.iter().enumerate() {
            limbs[i] ^= limb;
        }
        Self::from_limbs(limbs)
    }

    pub fn shl(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let (words, bits) = (k / 64, k % 64);
        let mut limbs = vec![0u64; self.limbs.len() + words + 1];
        for (i, &limb) in self.limbs.iter().enumerate() {
            limbs[i + words] ^= limb << bits;
            if bits != 0 {
                limbs[i + words + 1] ^= limb >> (64 - bits);
            }
        }
        Self::from_limbs(limbs)
    }

    /// Carry-less schoolbook product.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0u64; self.limbs.len() + other.limbs.len()];
        for (i, &a) in self.limbs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.limbs.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let prod = clmul64(a, b);
                out[i + j] ^= prod as u64;
                out[i + j + 1] ^= (prod >> 64) as u64;
            }
        }
        Self::from_limbs(out)
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// Quotient and remainder of division by `divisor`.
    pub fn divrem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let dd = divisor
            .degree()
            .ok_or(Error::Domain("division by the zero polynomial"))?;
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            quot.flip_coeff(rd - dd);
            rem = rem.add(&divisor.shl(rd - dd));
        }
        Ok((quot, rem))
    }

    pub fn rem(&self, modulus: &Self) -> Result<Self> {
        Ok(self.divrem(modulus)?.1)
    }

    pub fn mulmod(&self, other: &Self, modulus: &Self) -> Result<Self> {
        self.mul(other).rem(modulus)
    }

    /// Greatest common divisor (zero polynomials allowed; gcd(0, b) = b).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a
    }

    /// `self^exp mod modulus` by square-and-multiply.
    pub fn powmod(&self, exp: &BigUint, modulus: &Self) -> Result<Self> {
        use num_traits::Zero;
        if modulus.is_zero() {
            return Err(Error::Domain("zero modulus"));
        }
        let mut result = Self::one().rem(modulus)?;
        if exp.is_zero() {
            return Ok(result);
        }
        let base = self.rem(modulus)?;
        let bits = exp.bits();
        for i in (0..bits).rev() {
            result = result.mulmod(&result, modulus)?;
            if exp.bit(i) {
                result = result.mulmod(&base, modulus)?;
            }
        }
        Ok(result)
    }

    pub fn powmod_u64(&self, exp: u64, modulus: &Self) -> Result<Self> {
        self.powmod(&BigUint::from(exp), modulus)
    }
}

impl fmt::Display for BitPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in self.support().into_iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "1")?,
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Irreducibility over GF(2) by Rabin's criterion: `f` of degree `n` is
/// irreducible iff `x^(2^n) = x (mod f)` and `gcd(x^(2^(n/t)) - x, f) = 1`
/// for every prime `t` dividing `n`.
pub fn is_irreducible(f: &BitPoly) -> Result<bool> {
    let n = match f.degree() {
        None => return Err(Error::InvalidInput(String::from("zero polynomial"))),
        Some(0) => {
            return Err(Error::InvalidInput(String::from(
                "degree-0 polynomial has no irreducibility classification",
            )))
        }
        Some(n) => n,
    };
    if n == 1 {
        return Ok(true);
    }
    // Proper checkpoints n/t for the prime factors t of n.
    let mut checkpoints: Vec<usize> = prime_factors(n).into_iter().map(|t| n / t).collect();
    checkpoints.sort_unstable();
    checkpoints.dedup();

    let x = BitPoly::x().rem(f)?;
    let mut h = x.clone();
    for k in 1..=n {
        h = h.mulmod(&h, f)?;
        if checkpoints.binary_search(&k).is_ok() {
            let g = h.add(&x).gcd(f);
            if g.degree() != Some(0) {
                return Ok(false);
            }
        }
    }
    Ok(h == x)
}

/// Distinct prime factors of a small integer, ascending.
fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
