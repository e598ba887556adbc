//! Scalar fields GF(p) and base extensions GF(p^m) on integer codes.
//!
//! A GF(p^m) element is a length-m digit vector over GF(p) packed into a
//! single `u64` code in mixed radix p. All polynomial machinery below is
//! generic over a [`CoeffField`], so the same Rabin irreducibility test
//! validates the degree-m modulus over GF(p) and the degree-n modulus over
//! GF(p^m).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numstats;

/// Field arithmetic on `u64` codes in `[0, q)`.
pub trait CoeffField {
    fn q(&self) -> u64;
    fn add(&self, a: u64, b: u64) -> u64;
    fn sub(&self, a: u64, b: u64) -> u64;
    fn mul(&self, a: u64, b: u64) -> u64;
    /// Multiplicative inverse of a nonzero code.
    fn inv(&self, a: u64) -> u64;

    fn neg(&self, a: u64) -> u64 {
        self.sub(0, a)
    }

    fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

/// The prime field GF(p), p < 2^16.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if p >= 1 << 16 {
            return Err(Error::UnsupportedSize(alloc::format!(
                "prime modulus must be below 2^16, got {p}"
            )));
        }
        if !numstats::is_prime(p as u64) {
            return Err(Error::InvalidInput(alloc::format!("{p} is not prime")));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u32 {
        self.p
    }
}

impl CoeffField for PrimeField {
    fn q(&self) -> u64 {
        self.p as u64
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p as u64
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p as u64 - b % self.p as u64) % self.p as u64
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        // p < 2^16, codes < p, so the product fits comfortably.
        a * b % self.p as u64
    }

    fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.p as u64 != 0);
        self.pow(a, self.p as u64 - 2)
    }
}

/// The base extension GF(q) = GF(p^m), defined for m >= 2 by a monic
/// irreducible degree-m polynomial over GF(p). For m = 1 it degenerates to
/// GF(p) and the modulus is unused.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseField {
    prime: PrimeField,
    m: usize,
    modulus: Vec<u64>,
    q: u64,
}

impl BaseField {
    /// `modulus` is the degree-m defining polynomial (codes over GF(p), low
    /// to high, monic); `None` picks the default from
    /// [`lex_least_irreducible`].
    pub fn new(prime: PrimeField, m: usize, modulus: Option<Vec<u64>>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput(alloc::string::String::from(
                "extension degree m must be at least 1",
            )));
        }
        let q = (prime.q()).checked_pow(m as u32).ok_or_else(|| {
            Error::UnsupportedSize(alloc::format!("p^m overflows u64 for p={} m={m}", prime.p()))
        })?;
        let modulus = if m == 1 {
            vec![0, 1] // the identity extension; never used in arithmetic
        } else {
            match modulus {
                Some(f) => {
                    if poly_degree(&f) != Some(m) || f[m] != 1 {
                        return Err(Error::InvalidModulus("base modulus must be monic of degree m"));
                    }
                    if f.iter().any(|&c| c >= prime.q()) {
                        return Err(Error::InvalidModulus("base modulus coefficient out of range"));
                    }
                    if f[0] == 0 {
                        return Err(Error::InvalidModulus("base modulus has zero constant term"));
                    }
                    if !is_irreducible_poly(&prime, &f)? {
                        return Err(Error::NotIrreducible);
                    }
                    f
                }
                None => lex_least_irreducible(&prime, m)?,
            }
        };
        Ok(BaseField { prime, m, modulus, q })
    }

    pub fn prime(&self) -> &PrimeField {
        &self.prime
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    fn decode(&self, code: u64) -> Vec<u64> {
        let p = self.prime.q();
        let mut digits = vec![0u64; self.m];
        let mut c = code;
        for d in digits.iter_mut() {
            *d = c % p;
            c /= p;
        }
        digits
    }

    fn encode(&self, digits: &[u64]) -> u64 {
        let p = self.prime.q();
        digits.iter().rev().fold(0u64, |acc, &d| acc * p + d)
    }
}

impl CoeffField for BaseField {
    fn q(&self) -> u64 {
        self.q
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        if self.m == 1 {
            return self.prime.add(a, b);
        }
        let (da, db) = (self.decode(a), self.decode(b));
        let sum: Vec<u64> = da
            .iter()
            .zip(&db)
            .map(|(&x, &y)| self.prime.add(x, y))
            .collect();
        self.encode(&sum)
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        if self.m == 1 {
            return self.prime.sub(a, b);
        }
        let (da, db) = (self.decode(a), self.decode(b));
        let diff: Vec<u64> = da
            .iter()
            .zip(&db)
            .map(|(&x, &y)| self.prime.sub(x, y))
            .collect();
        self.encode(&diff)
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        if self.m == 1 {
            return self.prime.mul(a, b);
        }
        if a == 0 || b == 0 {
            return 0;
        }
        let (da, db) = (self.decode(a), self.decode(b));
        let mut prod = vec![0u64; 2 * self.m - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = self.prime.add(prod[i + j], self.prime.mul(x, y));
            }
        }
        // reduce by the monic modulus
        for d in (self.m..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for j in 0..self.m {
                let t = self.prime.mul(c, self.modulus[j]);
                prod[d - self.m + j] = self.prime.sub(prod[d - self.m + j], t);
            }
        }
        self.encode(&prod[..self.m])
    }

    fn inv(&self, a: u64) -> u64 {
        debug_assert!(a != 0);
        self.pow(a, self.q - 2)
    }
}

// ---- dense polynomials over a CoeffField, coefficients low -> high ----

pub fn poly_normalize(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

pub fn poly_degree(v: &[u64]) -> Option<usize> {
    v.iter().rposition(|&c| c != 0)
}

pub fn poly_add<F: CoeffField>(field: &F, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = field.add(x, y);
    }
    poly_normalize(&mut out);
    out
}

pub fn poly_sub<F: CoeffField>(field: &F, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = field.sub(x, y);
    }
    poly_normalize(&mut out);
    out
}

pub fn poly_mul<F: CoeffField>(field: &F, a: &[u64], b: &[u64]) -> Vec<u64> {
    if poly_degree(a).is_none() || poly_degree(b).is_none() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = field.add(out[i + j], field.mul(x, y));
        }
    }
    poly_normalize(&mut out);
    out
}

pub fn poly_divrem<F: CoeffField>(field: &F, a: &[u64], b: &[u64]) -> Result<(Vec<u64>, Vec<u64>)> {
    let db = poly_degree(b).ok_or(Error::Domain("division by the zero polynomial"))?;
    let lead_inv = field.inv(b[db]);
    let mut rem: Vec<u64> = a.to_vec();
    poly_normalize(&mut rem);
    let mut quot = vec![0u64; a.len().saturating_sub(db)];
    while let Some(dr) = poly_degree(&rem) {
        if dr < db {
            break;
        }
        let c = field.mul(rem[dr], lead_inv);
        quot[dr - db] = c;
        for j in 0..=db {
            let t = field.mul(c, b[j]);
            rem[dr - db + j] = field.sub(rem[dr - db + j], t);
        }
    }
    poly_normalize(&mut rem);
    poly_normalize(&mut quot);
    Ok((quot, rem))
}

pub fn poly_rem<F: CoeffField>(field: &F, a: &[u64], b: &[u64]) -> Result<Vec<u64>> {
    Ok(poly_divrem(field, a, b)?.1)
}

pub fn poly_gcd<F: CoeffField>(field: &F, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut x: Vec<u64> = a.to_vec();
    let mut y: Vec<u64> = b.to_vec();
    poly_normalize(&mut x);
    poly_normalize(&mut y);
    while poly_degree(&y).is_some() {
        let r = poly_rem(field, &x, &y).expect("nonzero divisor");
        x = y;
        y = r;
    }
    x
}

pub fn poly_mulmod<F: CoeffField>(field: &F, a: &[u64], b: &[u64], modulus: &[u64]) -> Result<Vec<u64>> {
    poly_rem(field, &poly_mul(field, a, b), modulus)
}

pub fn poly_powmod<F: CoeffField>(
    field: &F,
    base: &[u64],
    mut exp: u64,
    modulus: &[u64],
) -> Result<Vec<u64>> {
    let mut acc = poly_rem(field, &[1], modulus)?;
    let mut b = poly_rem(field, base, modulus)?;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = poly_mulmod(field, &acc, &b, modulus)?;
        }
        b = poly_mulmod(field, &b, &b, modulus)?;
        exp >>= 1;
    }
    Ok(acc)
}

/// Rabin's irreducibility criterion over GF(q): a degree-n polynomial is
/// irreducible iff `x^(q^n) = x` modulo it and `gcd(x^(q^(n/t)) - x, f) = 1`
/// for every prime `t | n`.
pub fn is_irreducible_poly<F: CoeffField>(field: &F, f: &[u64]) -> Result<bool> {
    let n = match poly_degree(f) {
        None | Some(0) => {
            return Err(Error::InvalidInput(alloc::string::String::from(
                "irreducibility needs degree >= 1",
            )))
        }
        Some(n) => n,
    };
    if n == 1 {
        return Ok(true);
    }
    let mut checkpoints: Vec<usize> = distinct_prime_factors(n).into_iter().map(|t| n / t).collect();
    checkpoints.sort_unstable();
    checkpoints.dedup();

    let x = poly_rem(field, &[0, 1], f)?;
    let mut h = x.clone();
    for k in 1..=n {
        h = poly_powmod(field, &h, field.q(), f)?;
        if checkpoints.binary_search(&k).is_ok() {
            let g = poly_gcd(field, &poly_sub(field, &h, &x), f);
            if poly_degree(&g) != Some(0) {
                return Ok(false);
            }
        }
    }
    Ok(h == x)
}

fn distinct_prime_factors(mut n: usize) -> Vec<usize> {
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

/// The monic irreducible of degree `deg` over `field` with the smallest
/// integer code (coefficients in mixed radix, low digits least significant),
/// restricted to nonzero constant term so the defining element is a unit.
pub fn lex_least_irreducible<F: CoeffField>(field: &F, deg: usize) -> Result<Vec<u64>> {
    let q = field.q();
    let count = q.checked_pow(deg as u32).ok_or_else(|| {
        Error::UnsupportedSize(alloc::format!("q^deg overflows while scanning for a modulus"))
    })?;
    for low in 0..count {
        let mut f = vec![0u64; deg + 1];
        let mut c = low;
        for digit in f.iter_mut().take(deg) {
            *digit = c % q;
            c /= q;
        }
        f[deg] = 1;
        if f[0] == 0 {
            continue;
        }
        if is_irreducible_poly(field, &f)? {
            return Ok(f);
        }
    }
    Err(Error::InvalidInput(alloc::string::String::from(
        "no irreducible polynomial found (impossible for a true prime power)",
    )))
}
