//! Elementary arithmetic functions: divisors, Euler's totient, the Möbius
//! function, p-adic valuations of integers, the Legendre symbol and primality.
//!
//! Indices handled by the rest of the crate are small, so everything here
//! works on `u64` except where an argument can be a value of a Lucas
//! sequence, which may be arbitrarily large.

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Prime factorization of a positive integer, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn largest_prime(&self) -> Option<(u64, u32)> {
        self.factors.last().copied()
    }

    /// Product of the distinct primes.
    pub fn radical(&self) -> u64 {
        self.primes().product()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn value(&self) -> u64 {
        self.factors.iter().map(|&(p, e)| p.pow(e)).product()
    }
}

const TRIAL_LIMIT: u64 = 1_000_000;

/// Factors `n` by trial division up to 10^6, finishing with Pollard's rho.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::domain("cannot factor 0"));
    }
    let mut n = n;
    let mut factors = Vec::new();
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0;
        while *n % p == 0 {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    push(2, &mut n);
    let mut d = 3;
    while d <= TRIAL_LIMIT && d * d <= n {
        push(d, &mut n);
        d += 2;
    }
    if n > 1 {
        let mut rest = Vec::new();
        split_large(n, &mut rest);
        rest.sort_unstable();
        for p in rest {
            match factors.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => factors.push((p, 1)),
            }
        }
    }
    Ok(Factorization { factors })
}

// Cofactor left after trial division has no prime factor below 10^6.
fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    split_large(d, out);
    split_large(n / d, out);
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Divisors of `n` in ascending order.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    let fact = factorize(n)?;
    let mut divs = vec![1u64];
    for &(p, e) in fact.factors() {
        let len = divs.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    Ok(divs)
}

pub fn euler_phi(n: u64) -> Result<u64> {
    let fact = factorize(n)?;
    Ok(fact
        .factors()
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product())
}

pub fn mobius(n: u64) -> Result<i8> {
    let fact = factorize(n)?;
    if !fact.is_squarefree() {
        return Ok(0);
    }
    Ok(if fact.factors().len() % 2 == 0 { 1 } else { -1 })
}

/// Exponent of `p` in `n` for a positive machine integer.
pub(crate) fn vp_u64(p: u64, mut n: u64) -> u32 {
    debug_assert!(p >= 2 && n > 0);
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

/// p-adic valuation of a nonzero integer.
pub fn vp_int(p: u64, x: &BigInt) -> Result<u32> {
    if !is_prime_u64(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if x.is_zero() {
        return Err(Error::ValuationOfZero(format!("v_{p}(0)")));
    }
    Ok(strip_prime(p, x).0)
}

/// Splits `x = p^e * rest` with `p ∤ rest`; `x` must be nonzero.
pub(crate) fn strip_prime(p: u64, x: &BigInt) -> (u32, BigInt) {
    debug_assert!(!x.is_zero());
    let p = BigInt::from(p);
    let mut rest = x.clone();
    let mut e = 0;
    loop {
        let (q, r) = rest.div_rem(&p);
        if !r.is_zero() {
            return (e, rest);
        }
        rest = q;
        e += 1;
    }
}

/// Legendre symbol (a / p) for an odd prime `p`.
pub fn legendre(a: &BigInt, p: u64) -> Result<i8> {
    if p == 2 || !is_prime_u64(p) {
        return Err(Error::domain(format!(
            "Legendre symbol needs an odd prime, got {p}"
        )));
    }
    let r = a
        .mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("residue fits in u64");
    if r == 0 {
        return Ok(0);
    }
    Ok(if pow_mod(r, (p - 1) / 2, p) == 1 { 1 } else { -1 })
}

/// Outcome of a primality test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primality {
    Composite,
    /// Proven prime (deterministic test below 2^64).
    Prime,
    /// Passed 64 Miller-Rabin rounds with pseudorandom bases; a composite
    /// survives with probability below 2^-128.
    ProbablePrime,
}

impl Primality {
    pub fn is_prime(self) -> bool {
        self != Primality::Composite
    }
}

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
const MR_ROUNDS: usize = 64;

pub fn primality(n: &BigInt) -> Primality {
    if n.sign() != Sign::Plus {
        return Primality::Composite;
    }
    if let Some(small) = n.to_u64() {
        return if is_prime_u64(small) {
            Primality::Prime
        } else {
            Primality::Composite
        };
    }
    let n = n.magnitude();
    for p in SMALL_PRIMES {
        if (n % p).is_zero() {
            return Primality::Composite;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let two_pow = n_minus_1.trailing_zeros().expect("n > 1");
    let d = &n_minus_1 >> two_pow;
    // Seeded from n so that verdicts are reproducible.
    let seed = n.iter_u64_digits().fold(0x9e37_79b9_7f4a_7c15u64, |acc, w| {
        acc.rotate_left(17) ^ w.wrapping_mul(0xff51_afd7_ed55_8ccd)
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two = BigUint::from(2u32);
    'rounds: for _ in 0..MR_ROUNDS {
        let a = rng.gen_biguint_range(&two, &n_minus_1);
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..two_pow {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'rounds;
            }
        }
        return Primality::Composite;
    }
    Primality::ProbablePrime
}

pub fn is_prime(n: &BigInt) -> bool {
    primality(n).is_prime()
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in SMALL_PRIMES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in SMALL_PRIMES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
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

/// Residue of `x` modulo `m` in `0..m`.
pub(crate) fn residue(x: &BigInt, m: u64) -> u64 {
    x.mod_floor(&BigInt::from(m))
        .to_u64()
        .expect("residue fits in u64")
}
