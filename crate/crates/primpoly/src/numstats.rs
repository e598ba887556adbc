//! Integer number theory and coprimality statistics.
//!
//! The GCD post-processing of the order-finding test succeeds exactly when
//! the drawn multiples of `N/r` are collectively coprime to `r`, so the
//! quantities here (exact pair-coprimality probabilities, their Monte Carlo
//! estimates, and the Mobius-product success probability) quantify how many
//! trials the test needs.

use alloc::string::String;
use alloc::vec::Vec;

use num_integer::Integer;
use num_rational::Ratio;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

/// GCD of a list of integers. At least one value must be nonzero.
pub fn int_gcd(values: &[u64]) -> Result<u64> {
    if values.is_empty() {
        return Err(Error::InvalidInput(String::from("gcd of an empty list")));
    }
    let g = values.iter().fold(0u64, |acc, &v| acc.gcd(&v));
    if g == 0 {
        return Err(Error::InvalidInput(String::from("gcd of all-zero values")));
    }
    Ok(g)
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, valid for all 64-bit inputs with this
/// witness set.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A complete prime factorization, primes ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub value: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// All divisors of `value`, ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut out = alloc::vec![1u64];
        for &(p, e) in &self.factors {
            let base = out.clone();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                out.extend(base.iter().map(|d| d * pk));
            }
        }
        out.sort_unstable();
        out
    }
}

/// Pollard's rho (Brent variant) for a single nontrivial factor of an odd
/// composite.
fn pollard_rho(n: u64) -> u64 {
    debug_assert!(n % 2 == 1 && n > 3 && !is_prime(n));
    // Deterministic parameter sweep; some (c, x0) pairs fail, the sweep does not.
    for c in 1u64.. {
        let f = |x: u64| (mulmod_u64(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

/// Complete prime factorization of `n >= 2` by trial division with a
/// Pollard-rho fallback. Deterministic in `n`.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n < 2 {
        return Err(Error::InvalidInput(alloc::format!(
            "factorize requires n >= 2, got {n}"
        )));
    }
    let mut rest = n;
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let push = |p: u64, factors: &mut Vec<(u64, u32)>, rest: &mut u64| {
        let mut e = 0u32;
        while *rest % p == 0 {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    push(2, &mut factors, &mut rest);
    let mut d = 3u64;
    while d <= 100_000 && d * d <= rest {
        push(d, &mut factors, &mut rest);
        d += 2;
    }
    // What survives trial division is 1, a prime, or a product of primes
    // > 100_000; split it recursively with rho.
    let mut stack = Vec::new();
    if rest > 1 {
        stack.push(rest);
    }
    let mut large: Vec<u64> = Vec::new();
    while let Some(m) = stack.pop() {
        if is_prime(m) {
            large.push(m);
        } else {
            let f = pollard_rho(m);
            stack.push(f);
            stack.push(m / f);
        }
    }
    large.sort_unstable();
    for p in large {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    debug_assert_eq!(
        factors
            .iter()
            .map(|&(p, e)| p.pow(e))
            .product::<u64>(),
        n
    );
    Ok(Factorization { value: n, factors })
}

/// Euler's totient from the factorization of `r >= 1`.
pub fn euler_phi(r: u64) -> Result<u64> {
    if r == 0 {
        return Err(Error::InvalidInput(String::from("euler_phi(0)")));
    }
    if r == 1 {
        return Ok(1);
    }
    let mut phi = r;
    for p in factorize(r)?.primes() {
        phi = phi / p * (p - 1);
    }
    Ok(phi)
}

/// Totient summatory `sum_{i=1..r} phi(i)` by a linear sieve.
pub fn totient_summatory(r: u64) -> Result<u128> {
    if r > 10_000_000 {
        return Err(Error::UnsupportedSize(alloc::format!(
            "totient summatory sieve capped at 10^7, got {r}"
        )));
    }
    let r = r as usize;
    let mut phi = alloc::vec![0u32; r + 1];
    let mut primes: Vec<usize> = Vec::new();
    if r >= 1 {
        phi[1] = 1;
    }
    for i in 2..=r {
        if phi[i] == 0 {
            phi[i] = (i - 1) as u32;
            primes.push(i);
        }
        for &p in &primes {
            if i * p > r {
                break;
            }
            if i % p == 0 {
                phi[i * p] = phi[i] * p as u32;
                break;
            }
            phi[i * p] = phi[i] * (p as u32 - 1);
        }
    }
    Ok(phi.iter().map(|&v| v as u128).sum())
}

/// Exact probability that two independent uniform integers in `[1, r]` are
/// coprime: `(2 * sum_{i<=r} phi(i) - 1) / r^2` (Mertens). Tends to
/// `6/pi^2` as `r` grows.
pub fn pr2_exact(r: u64) -> Result<Ratio<u128>> {
    if r == 0 {
        return Err(Error::InvalidInput(String::from("pr2_exact(0)")));
    }
    let s = totient_summatory(r)?;
    Ok(Ratio::new(2 * s - 1, (r as u128) * (r as u128)))
}

/// One Monte Carlo estimate with its standard error and the seed that
/// produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct CoprimalityReport {
    pub r: u64,
    pub l: u32,
    pub samples: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub seed: u64,
}

fn report(r: u64, l: u32, samples: u64, hits: u64, seed: u64) -> CoprimalityReport {
    let estimate = hits as f64 / samples as f64;
    let stderr = libm::sqrt(estimate * (1.0 - estimate) / samples as f64);
    CoprimalityReport { r, l, samples, estimate, stderr, seed }
}

/// Monte Carlo estimate of the probability that `l` uniform integers in
/// `[1, r]` are coprime. Sample `i` draws from stream `i`, so the result is
/// independent of any work splitting.
pub fn coprimality_mc(r: u64, l: u32, samples: u64, seed: u64) -> Result<CoprimalityReport> {
    if l < 2 {
        return Err(Error::InvalidInput(String::from("coprimality needs L >= 2")));
    }
    if samples == 0 || r == 0 {
        return Err(Error::InvalidInput(String::from("need samples >= 1 and r >= 1")));
    }
    let mut hits = 0u64;
    for i in 0..samples {
        let mut rng = rng::stream(seed, i);
        let mut g = 0u64;
        for _ in 0..l {
            g = g.gcd(&rng.gen_range(1..=r));
            if g == 1 {
                break;
            }
        }
        if g == 1 {
            hits += 1;
        }
    }
    Ok(report(r, l, samples, hits, seed))
}

/// Monte Carlo estimate of `P(gcd(k_1..k_L, r) = 1)` for uniform `k_i` in
/// `[1, r]`: the probability that `L` order-finding samples pin down the
/// order exactly, since each measured value is `(N/r) * k_i`.
pub fn order_recovery_success_prob(
    r: u64,
    l: u32,
    samples: u64,
    seed: u64,
) -> Result<CoprimalityReport> {
    if l < 1 || samples == 0 || r == 0 {
        return Err(Error::InvalidInput(String::from(
            "need L >= 1, samples >= 1 and r >= 1",
        )));
    }
    let mut hits = 0u64;
    for i in 0..samples {
        let mut rng = rng::stream(seed, i);
        let mut g = r;
        for _ in 0..l {
            g = g.gcd(&rng.gen_range(1..=r));
            if g == 1 {
                break;
            }
        }
        if g == 1 {
            hits += 1;
        }
    }
    Ok(report(r, l, samples, hits, seed))
}

/// Exact value of `P(gcd(k_1..k_L, r) = 1)` by Mobius summation over the
/// squarefree divisors of `r`, i.e. `prod_{p | r} (1 - p^-L)`.
pub fn order_recovery_exact(r: u64, l: u32) -> Result<Ratio<u128>> {
    use num_traits::One;
    if r == 0 || l == 0 {
        return Err(Error::InvalidInput(String::from("need r >= 1 and L >= 1")));
    }
    let mut acc = Ratio::one();
    if r == 1 {
        return Ok(acc);
    }
    for p in factorize(r)?.primes() {
        let pl = (p as u128).pow(l);
        acc *= Ratio::new(pl - 1, pl);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gcd_examples() {
        assert_eq!(int_gcd(&[12, 18]).unwrap(), 6);
        assert_eq!(int_gcd(&[15, 1023]).unwrap(), 3);
        assert_eq!(int_gcd(&[7]).unwrap(), 7);
        assert_eq!(int_gcd(&[0, 5]).unwrap(), 5);
        assert!(int_gcd(&[]).is_err());
        assert!(int_gcd(&[0, 0]).is_err());
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(15).unwrap().factors, vec![(3, 1), (5, 1)]);
        assert_eq!(factorize(1023).unwrap().factors, vec![(3, 1), (11, 1), (31, 1)]);
        assert_eq!(
            factorize(65535).unwrap().factors,
            vec![(3, 1), (5, 1), (17, 1), (257, 1)]
        );
        assert_eq!(factorize(1024).unwrap().factors, vec![(2, 10)]);
        assert!(factorize(1).is_err());
        // forces the rho path: product of two primes > 10^5
        let n = 1_000_003u64 * 1_000_033;
        assert_eq!(factorize(n).unwrap().factors, vec![(1_000_003, 1), (1_000_033, 1)]);
    }

    #[test]
    fn divisors_are_complete() {
        assert_eq!(factorize(15).unwrap().divisors(), vec![1, 3, 5, 15]);
        assert_eq!(factorize(63).unwrap().divisors(), vec![1, 3, 7, 9, 21, 63]);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(euler_phi(15).unwrap(), 8);
        assert_eq!(euler_phi(1).unwrap(), 1);
        assert_eq!(euler_phi(1023).unwrap(), 600);
        assert!(euler_phi(0).is_err());
    }

    #[test]
    fn pr2_small_values() {
        // r = 1: only (1,1); r = 2: 3 of 4 pairs coprime.
        assert_eq!(pr2_exact(1).unwrap(), Ratio::new(1, 1));
        assert_eq!(pr2_exact(2).unwrap(), Ratio::new(3, 4));
    }

    /// O(r^2) pair enumeration.
    fn pr2_brute(r: u64) -> Ratio<u128> {
        let mut hits = 0u128;
        for a in 1..=r {
            for b in 1..=r {
                if a.gcd(&b) == 1 {
                    hits += 1;
                }
            }
        }
        Ratio::new(hits, (r as u128) * (r as u128))
    }

    #[test]
    fn pr2_matches_brute_force_spot() {
        for r in [1u64, 2, 3, 10, 37, 100] {
            assert_eq!(pr2_exact(r).unwrap(), pr2_brute(r), "r = {r}");
        }
    }

    #[test]
    fn mc_is_reproducible_and_sane() {
        let a = coprimality_mc(1023, 2, 20_000, 99).unwrap();
        let b = coprimality_mc(1023, 2, 20_000, 99).unwrap();
        assert_eq!(a, b);
        // within 4 standard errors of the exact value
        let exact = pr2_exact(1023).unwrap();
        let exact = *exact.numer() as f64 / *exact.denom() as f64;
        assert!((a.estimate - exact).abs() < 4.0 * a.stderr + 1e-12);
        assert!((a.stderr - libm::sqrt(a.estimate * (1.0 - a.estimate) / 20_000.0)).abs() < 1e-15);
    }

    #[test]
    fn trivial_mc_cases() {
        let r1 = coprimality_mc(1, 4, 1000, 5).unwrap();
        assert_eq!(r1.estimate, 1.0);
        let o1 = order_recovery_success_prob(1, 2, 1000, 5).unwrap();
        assert_eq!(o1.estimate, 1.0);
    }

    /// Enumerate P(gcd(k_1..k_L, r) = 1) exactly.
    fn order_recovery_brute(r: u64, l: u32) -> Ratio<u128> {
        fn rec(r: u64, l: u32, g: u64, hits: &mut u128) {
            if l == 0 {
                if g == 1 {
                    *hits += 1;
                }
                return;
            }
            for k in 1..=r {
                rec(r, l - 1, g.gcd(&k), hits);
            }
        }
        let mut hits = 0u128;
        rec(r, l, r, &mut hits);
        Ratio::new(hits, (r as u128).pow(l))
    }

    #[test]
    fn order_recovery_exact_matches_enumeration() {
        // r = 5, L = 2: only (5,5) fails -> 24/25.
        assert_eq!(order_recovery_brute(5, 2), Ratio::new(24, 25));
        for (r, l) in [(5u64, 2u32), (6, 2), (12, 2), (9, 3), (30, 2), (8, 2)] {
            assert_eq!(
                order_recovery_exact(r, l).unwrap(),
                order_recovery_brute(r, l),
                "r={r} L={l}"
            );
        }
        assert_eq!(order_recovery_exact(1, 2).unwrap(), Ratio::new(1, 1));
    }

    #[test]
    fn order_recovery_mc_matches_exact() {
        let rep = order_recovery_success_prob(60, 2, 50_000, 11).unwrap();
        let exact = order_recovery_exact(60, 2).unwrap();
        let exact = *exact.numer() as f64 / *exact.denom() as f64;
        assert!((rep.estimate - exact).abs() < 4.0 * rep.stderr);
        // conditioning on the divisors of r only helps
        let plain = coprimality_mc(60, 2, 50_000, 11).unwrap();
        assert!(rep.estimate >= plain.estimate - 4.0 * plain.stderr);
    }

    #[test]
    fn primality_spot_checks() {
        assert!(is_prime(2) && is_prime(3) && is_prime(257) && is_prime(1_000_003));
        assert!(!is_prime(0) && !is_prime(1) && !is_prime(65535));
        assert!(is_prime(18_446_744_073_709_551_557)); // largest 64-bit prime
    }

    proptest! {
        #[test]
        fn factorization_reconstructs(n in 2u64..1_000_000_000) {
            let f = factorize(n).unwrap();
            let mut prod = 1u64;
            for &(p, e) in &f.factors {
                prop_assert!(is_prime(p));
                prod *= p.pow(e);
            }
            prop_assert_eq!(prod, n);
            // primes strictly increasing
            prop_assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0));
        }

        #[test]
        fn phi_is_multiplicative(a in 1u64..5000, b in 1u64..5000) {
            if a.gcd(&b) == 1 {
                prop_assert_eq!(
                    euler_phi(a * b).unwrap(),
                    euler_phi(a).unwrap() * euler_phi(b).unwrap()
                );
            }
        }
    }
}
