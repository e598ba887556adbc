//! Finite fields GF(p), GF(p^m) and extensions GF(q^n), with the classical
//! primitivity oracles.
//!
//! A [`FieldCtx`] pins down an extension GF(q^n) of GF(q) = GF(p^m) by its
//! defining moduli and precomputes the Frobenius data every algorithm here
//! leans on. Elements are [`FFElem`]s; for p = 2, m = 1 they are bit-packed
//! and multiplied carry-lessly, otherwise they are coefficient vectors over
//! the base field.
//!
//! Index encoding (used by the simulators and all text formats): an element
//! `sum_i c_i x^i` has index `sum_i code(c_i) * q^i`. Over GF(2) this is the
//! same packing as [`BitPoly`]'s hex encoding.

pub mod bitpoly;
pub mod smallfield;

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

pub use bitpoly::{is_irreducible, BitPoly};
use smallfield::{lex_least_irreducible, poly_degree, BaseField, CoeffField, PrimeField};

use crate::error::{Error, Result};
use crate::numstats::{self, Factorization};

/// Internal element representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Rep {
    /// p = 2, m = 1: bit i is the coefficient of x^i.
    Bits(u64),
    /// General tower: GF(q) codes for x^0..x^(n-1), fixed length n.
    Coeffs(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum CtxKind {
    /// GF(2^n) with a bit-packed modulus, n <= 63.
    Gf2 { modulus: u64 },
    /// GF(q^n), modulus as monic GF(q)-code vector of length n + 1.
    Tower { modulus: Vec<u64> },
}

/// An extension field GF(q^n) over GF(q) = GF(p^m).
///
/// Both defining moduli are verified irreducible at construction. The
/// context is immutable; all element operations are pure.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    base: BaseField,
    n: usize,
    kind: CtxKind,
    /// q^n - 1, the order of the multiplicative group.
    group_order: BigUint,
    group_order_u64: u64,
    elem_count: u64,
    /// x^(q^k) mod f for k = 0..n-1.
    frobenius_powers: Vec<Rep>,
    /// x^(q*k) mod f for k = 0..n-1: images of the monomial basis under the
    /// q-power map, so Frobenius is a base-linear combination of these.
    frob_images: Vec<Rep>,
    factorization_of_n: Option<Factorization>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.n == other.n && self.kind == other.kind
    }
}

impl FieldCtx {
    /// GF(2^n) defined by an irreducible `modulus` over GF(2).
    pub fn gf2(modulus: &BitPoly) -> Result<Arc<Self>> {
        let n = modulus
            .degree()
            .ok_or_else(|| Error::InvalidInput(String::from("zero modulus polynomial")))?;
        if n == 0 {
            return Err(Error::InvalidModulus("modulus must have degree >= 1"));
        }
        if n > 63 {
            return Err(Error::UnsupportedSize(alloc::format!(
                "GF(2^n) contexts are capped at n = 63, got {n}"
            )));
        }
        if !modulus.coeff(0) {
            return Err(Error::InvalidModulus("modulus has zero constant term"));
        }
        if !bitpoly::is_irreducible(modulus)? {
            return Err(Error::NotIrreducible);
        }
        let bits = modulus.to_u64().expect("degree <= 63");
        let base = BaseField::new(PrimeField::new(2)?, 1, None)?;
        Self::finish(base, n, CtxKind::Gf2 { modulus: bits })
    }

    /// GF(p^(m n)) as a tower GF(p) -> GF(p^m) -> GF(q^n) with the default
    /// (lexicographically least) moduli.
    pub fn new(p: u32, m: usize, n: usize) -> Result<Arc<Self>> {
        Self::with_moduli(p, m, n, None, None)
    }

    /// As [`FieldCtx::new`] but with caller-supplied moduli: `base_modulus`
    /// over GF(p) (length m + 1, monic) and `modulus` over GF(q) (length
    /// n + 1, monic, codes in mixed radix p).
    pub fn with_moduli(
        p: u32,
        m: usize,
        n: usize,
        base_modulus: Option<&[u64]>,
        modulus: Option<&[u64]>,
    ) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(Error::InvalidInput(String::from("extension degree n must be >= 1")));
        }
        let prime = PrimeField::new(p)?;
        if p == 2 && m == 1 {
            // bit-packed fast path; a base modulus is meaningless for m = 1
            return match modulus {
                None => Self::gf2(&default_gf2_modulus(n)?),
                Some(codes) => {
                    let mut f = BitPoly::zero();
                    for (i, &c) in codes.iter().enumerate() {
                        if c > 1 {
                            return Err(Error::InvalidModulus("GF(2) coefficient out of range"));
                        }
                        if c == 1 {
                            f.flip_coeff(i);
                        }
                    }
                    if f.degree() != Some(n) {
                        return Err(Error::InvalidModulus("modulus must be monic of degree n"));
                    }
                    Self::gf2(&f)
                }
            };
        }
        let base = BaseField::new(prime, m, base_modulus.map(|s| s.to_vec()))?;
        let top = match modulus {
            Some(f) => {
                let f = f.to_vec();
                if poly_degree(&f) != Some(n) || f[n] != 1 {
                    return Err(Error::InvalidModulus("modulus must be monic of degree n"));
                }
                if f.iter().any(|&c| c >= base.q()) {
                    return Err(Error::InvalidModulus("modulus coefficient out of range"));
                }
                if f[0] == 0 {
                    return Err(Error::InvalidModulus("modulus has zero constant term"));
                }
                if !smallfield::is_irreducible_poly(&base, &f)? {
                    return Err(Error::NotIrreducible);
                }
                f
            }
            None => lex_least_irreducible(&base, n)?,
        };
        Self::finish(base, n, CtxKind::Tower { modulus: top })
    }

    fn finish(base: BaseField, n: usize, kind: CtxKind) -> Result<Arc<Self>> {
        let q = base.q();
        let elem_count = q
            .checked_pow(n as u32)
            .filter(|&c| c <= 1u64 << 63)
            .ok_or_else(|| {
                Error::UnsupportedSize(alloc::format!(
                    "field size q^n exceeds 2^63 (q = {q}, n = {n})"
                ))
            })?;
        let group_order_u64 = elem_count - 1;
        let mut ctx = FieldCtx {
            base,
            n,
            kind,
            group_order: BigUint::from(group_order_u64),
            group_order_u64,
            elem_count,
            frobenius_powers: Vec::new(),
            frob_images: Vec::new(),
            factorization_of_n: None,
        };
        // x^q once, then its powers give the monomial images; iterating the
        // resulting linear map gives x^(q^k).
        let x = ctx.rep_x();
        let xq = ctx.rep_pow_u64(&x, q);
        let mut images = Vec::with_capacity(n);
        let mut acc = ctx.rep_one();
        for _ in 0..n {
            images.push(acc.clone());
            acc = ctx.rep_mul(&acc, &xq);
        }
        ctx.frob_images = images;
        let mut powers = Vec::with_capacity(n);
        let mut t = x;
        for _ in 0..n {
            powers.push(t.clone());
            t = ctx.rep_frobenius(&t);
        }
        ctx.frobenius_powers = powers;
        Ok(Arc::new(ctx))
    }

    /// A copy of this context carrying the prime factorization of the group
    /// order, which the order/primitivity oracles require. The simulated
    /// quantum procedures never touch it.
    pub fn with_factored_order(self: &Arc<Self>) -> Result<Arc<Self>> {
        if self.factorization_of_n.is_some() {
            return Ok(self.clone());
        }
        let mut ctx = (**self).clone();
        ctx.factorization_of_n = Some(if self.group_order_u64 == 1 {
            Factorization { value: 1, factors: Vec::new() }
        } else {
            numstats::factorize(self.group_order_u64)?
        });
        Ok(Arc::new(ctx))
    }

    pub fn p(&self) -> u32 {
        self.base.prime().p()
    }

    pub fn m(&self) -> usize {
        self.base.m()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Base field size q = p^m.
    pub fn q(&self) -> u64 {
        self.base.q()
    }

    /// Number of field elements q^n.
    pub fn elem_count(&self) -> u64 {
        self.elem_count
    }

    /// Order of the multiplicative group, N = q^n - 1.
    pub fn group_order(&self) -> &BigUint {
        &self.group_order
    }

    pub fn group_order_u64(&self) -> u64 {
        self.group_order_u64
    }

    pub fn factorization(&self) -> Option<&Factorization> {
        self.factorization_of_n.as_ref()
    }

    pub fn is_binary(&self) -> bool {
        self.p() == 2
    }

    /// Register width in qubits for binary fields: n*m.
    pub fn index_bits(&self) -> Option<u32> {
        self.is_binary().then(|| (self.n * self.base.m()) as u32)
    }

    /// The defining modulus as a BitPoly, for GF(2^n) contexts.
    pub fn modulus_bitpoly(&self) -> Option<BitPoly> {
        match &self.kind {
            CtxKind::Gf2 { modulus } => Some(BitPoly::from_u64(*modulus)),
            CtxKind::Tower { .. } => None,
        }
    }

    /// The defining modulus as GF(q) codes, low to high, monic.
    pub fn modulus_codes(&self) -> Vec<u64> {
        match &self.kind {
            CtxKind::Gf2 { modulus } => {
                (0..=self.n).map(|i| modulus >> i & 1).collect()
            }
            CtxKind::Tower { modulus } => modulus.clone(),
        }
    }

    pub fn base_modulus_codes(&self) -> Vec<u64> {
        self.base.modulus().to_vec()
    }

    pub fn zero(self: &Arc<Self>) -> FFElem {
        FFElem { ctx: self.clone(), rep: self.rep_zero() }
    }

    pub fn one(self: &Arc<Self>) -> FFElem {
        FFElem { ctx: self.clone(), rep: self.rep_one() }
    }

    /// The residue of x, the canonical generator candidate.
    pub fn x(self: &Arc<Self>) -> FFElem {
        FFElem { ctx: self.clone(), rep: self.rep_x() }
    }

    /// x^(q^k) as an element, k < n.
    pub fn frobenius_power(self: &Arc<Self>, k: usize) -> FFElem {
        FFElem { ctx: self.clone(), rep: self.frobenius_powers[k].clone() }
    }

    pub fn element_from_index(self: &Arc<Self>, index: u64) -> Result<FFElem> {
        if index >= self.elem_count {
            return Err(Error::InvalidInput(alloc::format!(
                "element index {index} out of range for a field of {} elements",
                self.elem_count
            )));
        }
        Ok(FFElem { ctx: self.clone(), rep: self.rep_from_index(index) })
    }

    /// Uniform random nonzero element.
    pub fn random_nonzero<R: rand::Rng>(self: &Arc<Self>, rng: &mut R) -> FFElem {
        let idx = rng.gen_range(1..self.elem_count);
        self.element_from_index(idx).expect("index in range")
    }

    // ---- representation-level arithmetic (context checks done by FFElem) ----

    pub(crate) fn rep_zero(&self) -> Rep {
        match &self.kind {
            CtxKind::Gf2 { .. } => Rep::Bits(0),
            CtxKind::Tower { .. } => Rep::Coeffs(vec![0; self.n]),
        }
    }

    pub(crate) fn rep_one(&self) -> Rep {
        match &self.kind {
            CtxKind::Gf2 { .. } => Rep::Bits(1),
            CtxKind::Tower { .. } => {
                let mut c = vec![0; self.n];
                c[0] = 1;
                Rep::Coeffs(c)
            }
        }
    }

    pub(crate) fn rep_x(&self) -> Rep {
        match &self.kind {
            CtxKind::Gf2 { modulus } => {
                if self.n == 1 {
                    // x reduces to the constant term of the modulus
                    Rep::Bits(modulus & 1)
                } else {
                    Rep::Bits(2)
                }
            }
            CtxKind::Tower { modulus } => {
                if self.n == 1 {
                    Rep::Coeffs(vec![self.base.neg(modulus[0])])
                } else {
                    let mut c = vec![0; self.n];
                    c[1] = 1;
                    Rep::Coeffs(c)
                }
            }
        }
    }

    pub(crate) fn rep_is_zero(&self, a: &Rep) -> bool {
        match a {
            Rep::Bits(b) => *b == 0,
            Rep::Coeffs(c) => c.iter().all(|&v| v == 0),
        }
    }

    pub(crate) fn rep_add(&self, a: &Rep, b: &Rep) -> Rep {
        match (a, b) {
            (Rep::Bits(x), Rep::Bits(y)) => Rep::Bits(x ^ y),
            (Rep::Coeffs(x), Rep::Coeffs(y)) => Rep::Coeffs(
                x.iter().zip(y).map(|(&u, &v)| self.base.add(u, v)).collect(),
            ),
            _ => unreachable!("mixed representations within one context"),
        }
    }

    pub(crate) fn rep_sub(&self, a: &Rep, b: &Rep) -> Rep {
        match (a, b) {
            (Rep::Bits(x), Rep::Bits(y)) => Rep::Bits(x ^ y),
            (Rep::Coeffs(x), Rep::Coeffs(y)) => Rep::Coeffs(
                x.iter().zip(y).map(|(&u, &v)| self.base.sub(u, v)).collect(),
            ),
            _ => unreachable!("mixed representations within one context"),
        }
    }

    pub(crate) fn rep_neg(&self, a: &Rep) -> Rep {
        self.rep_sub(&self.rep_zero(), a)
    }

    pub(crate) fn rep_mul(&self, a: &Rep, b: &Rep) -> Rep {
        match (&self.kind, a, b) {
            (CtxKind::Gf2 { modulus }, Rep::Bits(x), Rep::Bits(y)) => {
                Rep::Bits(bitpoly::mulmod64(*x, *y, *modulus, self.n as u32))
            }
            (CtxKind::Tower { modulus }, Rep::Coeffs(x), Rep::Coeffs(y)) => {
                let n = self.n;
                let mut prod = vec![0u64; 2 * n - 1];
                for (i, &u) in x.iter().enumerate() {
                    if u == 0 {
                        continue;
                    }
                    for (j, &v) in y.iter().enumerate() {
                        if v == 0 {
                            continue;
                        }
                        prod[i + j] = self.base.add(prod[i + j], self.base.mul(u, v));
                    }
                }
                for d in (n..prod.len()).rev() {
                    let c = prod[d];
                    if c == 0 {
                        continue;
                    }
                    prod[d] = 0;
                    for j in 0..n {
                        let t = self.base.mul(c, modulus[j]);
                        prod[d - n + j] = self.base.sub(prod[d - n + j], t);
                    }
                }
                prod.truncate(n);
                Rep::Coeffs(prod)
            }
            _ => unreachable!("mixed representations within one context"),
        }
    }

    /// Multiply by a base-field scalar given as a GF(q) code.
    fn rep_scale(&self, c: u64, a: &Rep) -> Rep {
        match a {
            Rep::Bits(x) => Rep::Bits(if c == 0 { 0 } else { *x }),
            Rep::Coeffs(v) => Rep::Coeffs(v.iter().map(|&u| self.base.mul(c, u)).collect()),
        }
    }

    /// GF(q) coefficient codes of the element, low to high, length n.
    fn rep_coeff_codes(&self, a: &Rep) -> Vec<u64> {
        match a {
            Rep::Bits(x) => (0..self.n as u32).map(|i| x >> i & 1).collect(),
            Rep::Coeffs(v) => v.clone(),
        }
    }

    pub(crate) fn rep_pow_u64(&self, a: &Rep, mut e: u64) -> Rep {
        let mut acc = self.rep_one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.rep_mul(&acc, &base);
            }
            base = self.rep_mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub(crate) fn rep_pow_big(&self, a: &Rep, e: &BigUint) -> Rep {
        if e.is_zero() {
            return self.rep_one();
        }
        let mut acc = self.rep_one();
        for i in (0..e.bits()).rev() {
            acc = self.rep_mul(&acc, &acc);
            if e.bit(i) {
                acc = self.rep_mul(&acc, a);
            }
        }
        acc
    }

    /// a^q as the base-linear map sum_k c_k * (x^(q k) mod f).
    pub(crate) fn rep_frobenius(&self, a: &Rep) -> Rep {
        let mut out = self.rep_zero();
        for (k, c) in self.rep_coeff_codes(a).into_iter().enumerate() {
            if c == 0 {
                continue;
            }
            out = self.rep_add(&out, &self.rep_scale(c, &self.frob_images[k]));
        }
        out
    }

    pub(crate) fn rep_index(&self, a: &Rep) -> u64 {
        match a {
            Rep::Bits(x) => *x,
            Rep::Coeffs(v) => {
                let q = self.base.q();
                v.iter().rev().fold(0u64, |acc, &c| acc * q + c)
            }
        }
    }

    pub(crate) fn rep_from_index(&self, index: u64) -> Rep {
        match &self.kind {
            CtxKind::Gf2 { .. } => Rep::Bits(index),
            CtxKind::Tower { .. } => {
                let q = self.base.q();
                let mut v = vec![0u64; self.n];
                let mut c = index;
                for d in v.iter_mut() {
                    *d = c % q;
                    c /= q;
                }
                Rep::Coeffs(v)
            }
        }
    }

    /// Constant element with base-field code `c`.
    fn rep_from_base_code(&self, c: u64) -> Rep {
        match &self.kind {
            CtxKind::Gf2 { .. } => Rep::Bits(c),
            CtxKind::Tower { .. } => {
                let mut v = vec![0u64; self.n];
                v[0] = c;
                Rep::Coeffs(v)
            }
        }
    }

    /// The base-field code of a constant element, or None if it has degree
    /// >= 1 in x.
    fn rep_constant_code(&self, a: &Rep) -> Option<u64> {
        match a {
            Rep::Bits(x) => (*x <= 1).then_some(*x),
            Rep::Coeffs(v) => v[1..].iter().all(|&c| c == 0).then(|| v[0]),
        }
    }

    // ---- index-level helpers for the simulators ----

    pub fn index_add(&self, a: u64, b: u64) -> u64 {
        match &self.kind {
            CtxKind::Gf2 { .. } => a ^ b,
            _ => {
                let r = self.rep_add(&self.rep_from_index(a), &self.rep_from_index(b));
                self.rep_index(&r)
            }
        }
    }

    pub fn index_sub(&self, a: u64, b: u64) -> u64 {
        match &self.kind {
            CtxKind::Gf2 { .. } => a ^ b,
            _ => {
                let r = self.rep_sub(&self.rep_from_index(a), &self.rep_from_index(b));
                self.rep_index(&r)
            }
        }
    }

    pub fn index_mul(&self, a: u64, b: u64) -> u64 {
        match &self.kind {
            CtxKind::Gf2 { modulus } => bitpoly::mulmod64(a, b, *modulus, self.n as u32),
            _ => {
                let r = self.rep_mul(&self.rep_from_index(a), &self.rep_from_index(b));
                self.rep_index(&r)
            }
        }
    }

    pub fn index_frobenius(&self, a: u64) -> u64 {
        self.rep_index(&self.rep_frobenius(&self.rep_from_index(a)))
    }

    /// Index of the residue of x.
    pub fn x_index(&self) -> u64 {
        self.rep_index(&self.rep_x())
    }
}

/// An element of a [`FieldCtx`]. Immutable; operations are pure and check
/// that both operands share a context.
#[derive(Debug, Clone)]
pub struct FFElem {
    ctx: Arc<FieldCtx>,
    rep: Rep,
}

impl PartialEq for FFElem {
    fn eq(&self, other: &Self) -> bool {
        self.same_ctx(other) && self.rep == other.rep
    }
}

impl Eq for FFElem {}

impl FFElem {
    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    fn same_ctx(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx
    }

    fn check_ctx(&self, other: &Self) -> Result<()> {
        if self.same_ctx(other) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn index(&self) -> u64 {
        self.ctx.rep_index(&self.rep)
    }

    pub fn is_zero(&self) -> bool {
        self.ctx.rep_is_zero(&self.rep)
    }

    pub fn is_one(&self) -> bool {
        self.rep == self.ctx.rep_one()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        Ok(FFElem { ctx: self.ctx.clone(), rep: self.ctx.rep_add(&self.rep, &other.rep) })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        Ok(FFElem { ctx: self.ctx.clone(), rep: self.ctx.rep_sub(&self.rep, &other.rep) })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        Ok(FFElem { ctx: self.ctx.clone(), rep: self.ctx.rep_mul(&self.rep, &other.rep) })
    }

    /// Square-and-multiply power with an arbitrary-precision exponent.
    pub fn pow(&self, e: &BigUint) -> Self {
        FFElem { ctx: self.ctx.clone(), rep: self.ctx.rep_pow_big(&self.rep, e) }
    }

    pub fn pow_u64(&self, e: u64) -> Self {
        FFElem { ctx: self.ctx.clone(), rep: self.ctx.rep_pow_u64(&self.rep, e) }
    }

    /// The Frobenius automorphism a -> a^q, computed as a base-linear map on
    /// the coefficients. Agrees with `pow(q)` and is a field bijection.
    pub fn frobenius(&self) -> Self {
        FFElem { ctx: self.ctx.clone(), rep: self.ctx.rep_frobenius(&self.rep) }
    }

    /// Exact multiplicative order. Starts from N = q^n - 1 and strips prime
    /// factors while the power stays 1; requires the factorization of N on
    /// the context.
    pub fn order(&self) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::Domain("the zero element has no multiplicative order"));
        }
        let fact = self.ctx.factorization_of_n.as_ref().ok_or(Error::MissingFactorization)?;
        let mut r = fact.value;
        for &(p, _) in &fact.factors {
            while r % p == 0 && self.pow_u64(r / p).is_one() {
                r /= p;
            }
        }
        Ok(r)
    }

    /// True iff the element generates the whole multiplicative group:
    /// nonzero and `a^(N/d) != 1` for every prime `d | N`.
    pub fn is_primitive(&self) -> Result<bool> {
        if self.is_zero() {
            return Ok(false);
        }
        let fact = self.ctx.factorization_of_n.as_ref().ok_or(Error::MissingFactorization)?;
        let n_val = fact.value;
        for p in fact.primes() {
            if self.pow_u64(n_val / p).is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True iff the n Frobenius conjugates a^(q^k) are pairwise distinct,
    /// i.e. the element lies in no proper subfield containing GF(q).
    pub fn conjugates_distinct(&self) -> bool {
        self.frobenius_orbit_len() == self.ctx.n
    }

    fn frobenius_orbit_len(&self) -> usize {
        let mut len = 1;
        let mut c = self.ctx.rep_frobenius(&self.rep);
        while c != self.rep {
            len += 1;
            debug_assert!(len <= self.ctx.n);
            c = self.ctx.rep_frobenius(&c);
        }
        len
    }

    /// The monic minimal polynomial over GF(q): the product of (X - c) over
    /// the Frobenius orbit of the element. Degree = orbit size; for zero the
    /// convention is X.
    pub fn minimal_polynomial(&self) -> BasePoly {
        let ctx = &self.ctx;
        if self.is_zero() {
            return BasePoly { p: ctx.p(), m: ctx.m(), coeffs: vec![0, 1] };
        }
        let mut orbit = vec![self.rep.clone()];
        let mut c = ctx.rep_frobenius(&self.rep);
        while c != self.rep {
            orbit.push(c.clone());
            c = ctx.rep_frobenius(&c);
        }
        let mut poly: Vec<Rep> = vec![ctx.rep_one()];
        for root in &orbit {
            let neg = ctx.rep_neg(root);
            let mut next = vec![ctx.rep_zero(); poly.len() + 1];
            for (i, coef) in poly.iter().enumerate() {
                next[i + 1] = ctx.rep_add(&next[i + 1], coef);
                next[i] = ctx.rep_add(&next[i], &ctx.rep_mul(coef, &neg));
            }
            poly = next;
        }
        let coeffs = poly
            .iter()
            .map(|r| {
                ctx.rep_constant_code(r)
                    .expect("orbit products are Frobenius-fixed, hence base-field constants")
            })
            .collect();
        BasePoly { p: ctx.p(), m: ctx.m(), coeffs }
    }
}

impl fmt::Display for FFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.index())
    }
}

/// A polynomial over the base field GF(q) of some context, coefficients as
/// GF(q) codes, low to high.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasePoly {
    p: u32,
    m: usize,
    coeffs: Vec<u64>,
}

impl BasePoly {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        poly_degree(&self.coeffs)
    }

    /// Packed integer encoding: `sum_i code(c_i) * q^i`. Over GF(2) this is
    /// the standard hex encoding.
    pub fn code(&self) -> u128 {
        let q = (self.p as u128).pow(self.m as u32);
        self.coeffs.iter().rev().fold(0u128, |acc, &c| acc * q + c as u128)
    }

    /// The same polynomial as a [`BitPoly`] when the base field is GF(2).
    pub fn to_bitpoly(&self) -> Option<BitPoly> {
        if self.p != 2 || self.m != 1 {
            return None;
        }
        let mut out = BitPoly::zero();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 1 {
                out.flip_coeff(i);
            }
        }
        Some(out)
    }

    /// Evaluate at an element whose context has the same base field. Zero
    /// result certifies a root.
    pub fn eval(&self, at: &FFElem) -> Result<FFElem> {
        let ctx = at.ctx();
        if ctx.p() != self.p || ctx.m() != self.m {
            return Err(Error::ContextMismatch);
        }
        let mut acc = ctx.rep_zero();
        for &c in self.coeffs.iter().rev() {
            acc = ctx.rep_mul(&acc, &at.rep);
            acc = ctx.rep_add(&acc, &ctx.rep_from_base_code(c));
        }
        Ok(FFElem { ctx: ctx.clone(), rep: acc })
    }
}

impl fmt::Display for BasePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree().is_none() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (c, i) {
                (c, 0) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, i) => write!(f, "x^{i}")?,
                (c, 1) => write!(f, "{c}*x")?,
                (c, i) => write!(f, "{c}*x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Default modulus for GF(2^n): the irreducible with the smallest hex code
/// and nonzero constant term.
pub fn default_gf2_modulus(n: usize) -> Result<BitPoly> {
    if n == 0 || n > 63 {
        return Err(Error::UnsupportedSize(alloc::format!(
            "GF(2^n) moduli supported for 1 <= n <= 63, got {n}"
        )));
    }
    let high = 1u64 << n;
    let mut low = 1u64;
    while low < high {
        let f = BitPoly::from_u64(high | low);
        if bitpoly::is_irreducible(&f)? {
            return Ok(f);
        }
        low += 2;
    }
    unreachable!("irreducibles of every degree exist over GF(2)")
}

/// Classical primitivity oracle for a polynomial over GF(2): irreducible and
/// the order of x modulo it is exactly 2^n - 1. Ground truth for every
/// simulation test in this crate.
pub fn is_primitive_poly(poly: &BitPoly) -> Result<bool> {
    let n = match poly.degree() {
        None | Some(0) => {
            return Err(Error::InvalidInput(String::from(
                "primitivity needs degree >= 1",
            )))
        }
        Some(n) => n,
    };
    if n > 63 {
        return Err(Error::UnsupportedSize(String::from(
            "primitivity oracle capped at degree 63",
        )));
    }
    if !poly.coeff(0) {
        // divisible by x: either reducible or equal to x, never primitive
        return Ok(false);
    }
    if !bitpoly::is_irreducible(poly)? {
        return Ok(false);
    }
    let ctx = FieldCtx::gf2(poly)?.with_factored_order()?;
    Ok(ctx.x().order()? == ctx.group_order_u64())
}

/// General-q primitivity oracle for a monic modulus over GF(p^m), given as
/// GF(q) codes low to high.
pub fn is_primitive_modulus(p: u32, m: usize, modulus: &[u64]) -> Result<bool> {
    let n = poly_degree(modulus).ok_or_else(|| {
        Error::InvalidInput(String::from("primitivity needs degree >= 1"))
    })?;
    if n == 0 {
        return Err(Error::InvalidInput(String::from("primitivity needs degree >= 1")));
    }
    if modulus[0] == 0 {
        return Ok(false);
    }
    let prime = PrimeField::new(p)?;
    let base = BaseField::new(prime, m, None)?;
    if modulus[n] != 1 {
        return Err(Error::InvalidModulus("modulus must be monic"));
    }
    if !smallfield::is_irreducible_poly(&base, modulus)? {
        return Ok(false);
    }
    let ctx = FieldCtx::with_moduli(p, m, n, None, Some(modulus))?.with_factored_order()?;
    Ok(ctx.x().order()? == ctx.group_order_u64())
}

/// Number of degree-n primitive polynomials over GF(q): phi(q^n - 1) / n.
pub fn count_primitive_polys(n: usize, q: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidInput(String::from("degree must be >= 1")));
    }
    if q < 2 || numstats::factorize(q)?.factors.len() != 1 {
        return Err(Error::InvalidInput(alloc::format!("{q} is not a prime power")));
    }
    let order = q
        .checked_pow(n as u32)
        .and_then(|v| v.checked_sub(1))
        .ok_or_else(|| Error::UnsupportedSize(String::from("q^n overflows u64")))?;
    Ok(numstats::euler_phi(order)? / n as u64)
}
