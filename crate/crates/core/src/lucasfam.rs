//! The classical families: Lucas polynomials `U_n`, companion polynomials
//! `W_n = alpha^n + beta^n`, cyclotomic polynomials `Psi_n`, and their
//! integer specializations.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactpoly::{BiPoly, UniPoly};
use crate::numtheory::{divisors, factorize};

/// Integer parameters of the recurrence `X^2 - s X - t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LucasParams {
    pub s: BigInt,
    pub t: BigInt,
}

impl LucasParams {
    pub fn new(s: impl Into<BigInt>, t: impl Into<BigInt>) -> Self {
        LucasParams {
            s: s.into(),
            t: t.into(),
        }
    }

    /// `s^2 + 4t`.
    pub fn discriminant(&self) -> BigInt {
        &self.s * &self.s + BigInt::from(4) * &self.t
    }

    /// True when some atom `P_n(s, t)`, `n >= 2`, vanishes.
    ///
    /// With `t != 0` this happens exactly when `alpha / beta` is a root of
    /// unity; for integer parameters its order is 2, 3, 4 or 6, so one of
    /// `s`, `s^2 + t`, `s^2 + 2t`, `s^2 + 3t` is zero. With `t = 0` the atoms
    /// are `s^phi(n)`, zero only for `s = 0`.
    pub fn is_degenerate(&self) -> bool {
        let s2 = &self.s * &self.s;
        self.s.is_zero()
            || (1..=3).any(|k| (&s2 + BigInt::from(k) * &self.t).is_zero())
    }
}

impl fmt::Display for LucasParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(s={}, t={})", self.s, self.t)
    }
}

pub fn discriminant(params: &LucasParams) -> BigInt {
    params.discriminant()
}

/// Coefficients of a weighted-homogeneous polynomial of weight `w`: entry
/// `j` multiplies `s^(w-2j) t^j`. Every member of both families has this
/// shape, which makes the recurrences plain vector additions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct WeightedForm {
    pub weight: u64,
    pub coeffs: Vec<BigInt>,
}

impl WeightedForm {
    fn constant(c: i64) -> Self {
        WeightedForm {
            weight: 0,
            coeffs: vec![BigInt::from(c)],
        }
    }

    /// Overwrites `self = X_{k-2}` with `X_k = s X_{k-1} + t X_{k-2}`,
    /// reusing its storage.
    fn advance_past(&mut self, prev: &WeightedForm) {
        self.weight = prev.weight + 1;
        let len = (self.weight / 2 + 1) as usize;
        self.coeffs.resize(len, BigInt::zero());
        for j in (1..len).rev() {
            let below = std::mem::take(&mut self.coeffs[j - 1]);
            self.coeffs[j] = below;
            if let Some(x) = prev.coeffs.get(j) {
                self.coeffs[j] += x;
            }
        }
        self.coeffs[0] += &prev.coeffs[0];
    }

    pub fn to_bipoly(&self) -> BiPoly {
        BiPoly::from_terms(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| ((self.weight - 2 * j as u64) as u32, j as u32, c.clone())),
        )
    }
}

/// Visits `W_0, ..., W_upto` in order, keeping only two alive at a time.
pub(crate) fn for_each_companion(upto: u64, mut visit: impl FnMut(u64, &WeightedForm)) {
    let mut older = WeightedForm::constant(2);
    visit(0, &older);
    if upto == 0 {
        return;
    }
    let mut newer = WeightedForm {
        weight: 1,
        coeffs: vec![BigInt::one()],
    };
    visit(1, &newer);
    for k in 2..=upto {
        older.advance_past(&newer);
        std::mem::swap(&mut older, &mut newer);
        visit(k, &newer);
    }
}

pub fn lucas_poly(n: u64) -> BiPoly {
    if n == 0 {
        return BiPoly::zero();
    }
    // U_n has weight n - 1; seed with U_0 as an empty form of weight -1,
    // which contributes nothing to U_2 = s.
    let mut prev2 = WeightedForm {
        weight: 0,
        coeffs: Vec::new(),
    };
    let mut prev = WeightedForm::constant(1);
    for _ in 1..n {
        prev2.advance_past(&prev);
        std::mem::swap(&mut prev, &mut prev2);
    }
    prev.to_bipoly()
}

/// `W_n(s, t) = alpha^n + beta^n`: `W_0 = 2`, `W_1 = s`, same recurrence.
pub fn companion_poly(n: u64) -> BiPoly {
    let mut out = BiPoly::zero();
    for_each_companion(n, |k, w| {
        if k == n {
            out = w.to_bipoly();
        }
    });
    out
}

fn recurrence_int(n: u64, seeds: (BigInt, BigInt), params: &LucasParams) -> BigInt {
    let (mut a, mut b) = seeds;
    for _ in 0..n {
        let next = &params.s * &b + &params.t * &a;
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// `U_n(s, t)` for integer parameters, by the recurrence.
pub fn lucas_int(n: u64, params: &LucasParams) -> BigInt {
    recurrence_int(n, (BigInt::zero(), BigInt::one()), params)
}

/// `W_n(s, t)` for integer parameters, by the recurrence.
pub fn companion_int(n: u64, params: &LucasParams) -> BigInt {
    recurrence_int(n, (BigInt::from(2), params.s.clone()), params)
}

/// `U_0, ..., U_n` at integer parameters.
pub fn lucas_int_table(n: u64, params: &LucasParams) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(BigInt::zero());
    if n >= 1 {
        out.push(BigInt::one());
    }
    for k in 2..=n as usize {
        let next = &params.s * &out[k - 1] + &params.t * &out[k - 2];
        out.push(next);
    }
    out
}

/// `W_0, ..., W_n` at integer parameters.
pub fn companion_int_table(n: u64, params: &LucasParams) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(BigInt::from(2));
    if n >= 1 {
        out.push(params.s.clone());
    }
    for k in 2..=n as usize {
        let next = &params.s * &out[k - 1] + &params.t * &out[k - 2];
        out.push(next);
    }
    out
}

/// Memoized `U_n` and `W_n` polynomials.
#[derive(Debug, Default)]
pub struct SeqCache {
    lucas: Vec<BiPoly>,
    companion: Vec<BiPoly>,
}

impl SeqCache {
    pub fn new() -> Self {
        SeqCache::default()
    }

    pub fn lucas(&mut self, n: u64) -> &BiPoly {
        let n = n as usize;
        while self.lucas.len() <= n {
            let k = self.lucas.len();
            let next = match k {
                0 => BiPoly::zero(),
                1 => BiPoly::one(),
                _ => step_poly(&self.lucas[k - 1], &self.lucas[k - 2]),
            };
            self.lucas.push(next);
        }
        &self.lucas[n]
    }

    pub fn companion(&mut self, n: u64) -> &BiPoly {
        let n = n as usize;
        while self.companion.len() <= n {
            let k = self.companion.len();
            let next = match k {
                0 => BiPoly::constant(2),
                1 => BiPoly::s(),
                _ => step_poly(&self.companion[k - 1], &self.companion[k - 2]),
            };
            self.companion.push(next);
        }
        &self.companion[n]
    }
}

fn step_poly(prev: &BiPoly, prev2: &BiPoly) -> BiPoly {
    let one = BigInt::one();
    let mut next = prev.scale_shift(&one, 1, 0);
    next += &prev2.scale_shift(&one, 0, 1);
    next
}

fn cyclotomic_memo() -> &'static Mutex<HashMap<u64, Arc<UniPoly>>> {
    static MEMO: OnceLock<Mutex<HashMap<u64, Arc<UniPoly>>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// The `n`-th cyclotomic polynomial `Psi_n(q)`, memoized.
pub fn cyclotomic(n: u64) -> Result<Arc<UniPoly>> {
    if n == 0 {
        return Err(Error::domain("cyclotomic index must be positive"));
    }
    if let Some(hit) = cyclotomic_memo().lock().expect("memo poisoned").get(&n) {
        return Ok(Arc::clone(hit));
    }
    let poly = Arc::new(cyclotomic_uncached(n)?);
    cyclotomic_memo()
        .lock()
        .expect("memo poisoned")
        .entry(n)
        .or_insert_with(|| Arc::clone(&poly));
    Ok(poly)
}

/// `Psi_n` without touching the memo table.
///
/// Uses the reduction identities `Psi_n(q) = Psi_r(q^(n/r))` for the radical
/// `r` of `n`, and `Psi_{pm}(q) = Psi_m(q^p) / Psi_m(q)` for a prime `p ∤ m`,
/// stripping the largest prime first so the divisions stay small.
pub fn cyclotomic_uncached(n: u64) -> Result<UniPoly> {
    let fact = factorize(n)?;
    let radical = fact.radical();
    let base = squarefree_cyclotomic(&fact.primes().collect::<Vec<_>>())?;
    Ok(base.inflate((n / radical) as usize))
}

fn squarefree_cyclotomic(primes: &[u64]) -> Result<UniPoly> {
    match primes.split_last() {
        None => Ok(UniPoly::from_i64s(&[-1, 1])),
        Some((&p, rest)) => {
            let inner = squarefree_cyclotomic(rest)?;
            inner
                .inflate(p as usize)
                .exact_div(&inner)
                .map_err(|e| Error::internal(format!("cyclotomic reduction failed: {e}")))
        }
    }
}

/// `Psi_n` by the divisor sieve: `q^n - 1` divided by `Psi_d` for every
/// proper divisor `d` of `n`.
pub fn cyclotomic_sieve(n: u64) -> Result<UniPoly> {
    let divs = divisors(n)?;
    let mut table: HashMap<u64, UniPoly> = HashMap::new();
    for &d in &divs {
        let mut acc = UniPoly::x_pow_minus_one(d as usize);
        for &e in divs.iter().take_while(|&&e| e < d) {
            if d % e == 0 {
                acc = acc.exact_div(&table[&e])?;
            }
        }
        table.insert(d, acc);
    }
    Ok(table.remove(&n).expect("n divides itself"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp(terms: &[(u32, u32, i64)]) -> BiPoly {
        BiPoly::from_terms(terms.iter().copied())
    }

    #[test]
    fn lucas_poly_examples() {
        assert_eq!(lucas_poly(0), BiPoly::zero());
        assert_eq!(lucas_poly(1), BiPoly::one());
        assert_eq!(lucas_poly(2), BiPoly::s());
        assert_eq!(lucas_poly(6), bp(&[(5, 0, 1), (3, 1, 4), (1, 2, 3)]));
        assert_eq!(lucas_poly(6).to_string(), "s^5 + 4*s^3*t + 3*s*t^2");
    }

    #[test]
    fn companion_poly_examples() {
        assert_eq!(companion_poly(0), BiPoly::constant(2));
        assert_eq!(companion_poly(1), BiPoly::s());
        assert_eq!(companion_poly(2), bp(&[(2, 0, 1), (0, 1, 2)]));
        assert_eq!(companion_poly(4), bp(&[(4, 0, 1), (2, 1, 4), (0, 2, 2)]));
    }

    #[test]
    fn cache_matches_direct_construction() {
        let mut cache = SeqCache::new();
        for n in (0..40).rev() {
            assert_eq!(cache.lucas(n), &lucas_poly(n));
            assert_eq!(cache.companion(n), &companion_poly(n));
        }
    }

    #[test]
    fn integer_examples() {
        let fib = LucasParams::new(1, 1);
        assert_eq!(lucas_int(6, &fib), BigInt::from(8));
        assert_eq!(lucas_int(12, &fib), BigInt::from(144));
        assert_eq!(lucas_int(0, &LucasParams::new(7, -3)), BigInt::zero());
        assert_eq!(companion_int(2, &fib), BigInt::from(3));
        assert_eq!(companion_int(0, &LucasParams::new(7, -3)), BigInt::from(2));
        assert_eq!(companion_int(3, &LucasParams::new(2, 2)), BigInt::from(20));
        let table = lucas_int_table(30, &LucasParams::new(3, -2));
        for (n, v) in table.iter().enumerate() {
            assert_eq!(v, &lucas_int(n as u64, &LucasParams::new(3, -2)));
        }
        let table = companion_int_table(30, &fib);
        assert_eq!(table[10], companion_int(10, &fib));
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant(&LucasParams::new(1, 1)), BigInt::from(5));
        assert_eq!(discriminant(&LucasParams::new(2, -1)), BigInt::zero());
        assert_eq!(discriminant(&LucasParams::new(0, 1)), BigInt::from(4));
    }

    #[test]
    fn cyclotomic_examples() {
        assert_eq!(*cyclotomic(1).unwrap(), UniPoly::from_i64s(&[-1, 1]));
        assert_eq!(*cyclotomic(6).unwrap(), UniPoly::from_i64s(&[1, -1, 1]));
        assert_eq!(*cyclotomic(12).unwrap(), UniPoly::from_i64s(&[1, 0, -1, 0, 1]));
        assert!(cyclotomic(0).is_err());
        // first index with a coefficient of absolute value 2
        assert!(cyclotomic(105).unwrap().coeffs().contains(&BigInt::from(-2)));
    }

    #[test]
    fn reduction_agrees_with_sieve() {
        for n in 1..=300 {
            let fast = cyclotomic(n).unwrap();
            assert_eq!(*fast, cyclotomic_sieve(n).unwrap(), "n = {n}");
            assert!(fast.is_monic());
            if n >= 2 {
                assert!(fast.is_palindromic());
            }
        }
    }

    #[test]
    fn cyclotomic_product_is_q_pow_minus_one() {
        for n in 1..=200u64 {
            let prod = divisors(n)
                .unwrap()
                .into_iter()
                .fold(UniPoly::one(), |acc, d| &acc * &cyclotomic(d).unwrap());
            assert_eq!(prod, UniPoly::x_pow_minus_one(n as usize), "n = {n}");
        }
    }

    #[test]
    fn degeneracy_matches_brute_force() {
        for s in -6i64..=6 {
            for t in -12i64..=12 {
                let params = LucasParams::new(s, t);
                let vanishes = (1..=40).any(|n| lucas_int(n, &params).is_zero());
                assert_eq!(params.is_degenerate(), vanishes, "{params}");
            }
        }
    }
}
