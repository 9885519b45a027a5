//! Ranks of appearance and p-adic valuations of `U_n(s, t)` and `P_n(s, t)`.
//!
//! Three routes to `v_p(P_n)` are kept side by side: closed formulas per
//! parameter regime, the Möbius transform of the closed formulas for
//! `v_p(U_n)`, and direct evaluation.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::atoms::atom_eval;
use crate::error::{Error, Result};
use crate::lucasfam::{lucas_int, LucasParams};
use crate::numtheory::{divisors, euler_phi, is_prime_u64, legendre, mobius, residue, strip_prime, vp_int, vp_u64};

/// Parameter regimes, keyed by `a = v_p(s)` and `b = v_p(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// (i) odd `p`, `p ∤ t`.
    PNotDivTOddP,
    /// (ii) `p = 2`, `2 ∤ t`, `2 | s`.
    P2DivS,
    /// (iii) `p = 2`, `2 ∤ t`, `2 ∤ s`.
    P2NotDivS,
    /// (iv) `p ∤ s`, `p | t`.
    PDivTOnly,
    /// (v) `b > 2a`.
    BGt2A,
    /// (v) `b = 2a`.
    BEq2A,
    /// (vi) `b < 2a`, outside the two special cases below.
    BLt2AGeneric,
    /// (viii) `p = 2`, `b = 2a - 1`.
    BEq2AMinus1P2,
    /// (vii) `p = 3`, `b = 2a - 1`.
    BEq2AMinus1P3,
}

impl Regime {
    /// Roman-numeral label.
    pub fn label(self) -> &'static str {
        match self {
            Regime::PNotDivTOddP => "i",
            Regime::P2DivS => "ii",
            Regime::P2NotDivS => "iii",
            Regime::PDivTOnly => "iv",
            Regime::BGt2A | Regime::BEq2A => "v",
            Regime::BLt2AGeneric => "vi",
            Regime::BEq2AMinus1P3 => "vii",
            Regime::BEq2AMinus1P2 => "viii",
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Regime::PNotDivTOddP => "P_NOT_DIV_T_ODD_P",
            Regime::P2DivS => "P2_DIV_S",
            Regime::P2NotDivS => "P2_NOT_DIV_S",
            Regime::PDivTOnly => "P_DIV_T_ONLY",
            Regime::BGt2A => "B_GT_2A",
            Regime::BEq2A => "B_EQ_2A",
            Regime::BLt2AGeneric => "B_LT_2A_GENERIC",
            Regime::BEq2AMinus1P2 => "B_EQ_2A_MINUS_1_P2",
            Regime::BEq2AMinus1P3 => "B_EQ_2A_MINUS_1_P3",
        }
    }

    fn is_b_below_2a(self) -> bool {
        matches!(
            self,
            Regime::BLt2AGeneric | Regime::BEq2AMinus1P2 | Regime::BEq2AMinus1P3
        )
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {}", self.label(), self.code())
    }
}

/// Everything the valuation formulas need to know about `(p, s, t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationCase {
    pub p: u64,
    pub params: LucasParams,
    pub regime: Regime,
    /// `v_p(s)`, `None` for `s = 0`.
    pub a: Option<u32>,
    /// `v_p(t)`; always finite since `t = 0` is rejected.
    pub b: Option<u32>,
    /// `s / p^a` (zero when `s = 0`).
    pub s_prime: BigInt,
    /// `t / p^b`.
    pub t_prime: BigInt,
    pub delta: BigInt,
    /// Rank of appearance of `p`, when defined.
    pub k: Option<u64>,
    /// `v_p(s'^2 + t')` in the regimes `b = 2a - 1`, `p in {2, 3}`.
    pub lambda: Option<u32>,
}

impl ValuationCase {
    pub fn reduced_params(&self) -> LucasParams {
        LucasParams {
            s: self.s_prime.clone(),
            t: self.t_prime.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankResult {
    /// Least `k >= 1` with `p | U_k`; `None` when `p` never divides.
    pub rho: Option<u64>,
    /// `p - (Delta / p)` when it was used to bound the search.
    pub divides_bound: Option<i64>,
}

fn require_prime(p: u64) -> Result<()> {
    if !is_prime_u64(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    Ok(())
}

fn divides(p: u64, x: &BigInt) -> bool {
    residue(x, p) == 0
}

/// Smallest `k >= 1` with `p | U_k(s, t)`.
pub fn rank_of_appearance(p: u64, params: &LucasParams) -> Result<RankResult> {
    require_prime(p)?;
    let undivided = RankResult {
        rho: None,
        divides_bound: None,
    };
    let exact = |rho| RankResult {
        rho: Some(rho),
        divides_bound: None,
    };
    if divides(p, &params.t) {
        return Ok(if divides(p, &params.s) { exact(2) } else { undivided });
    }
    if p == 2 {
        return Ok(exact(if divides(2, &params.s) { 2 } else { 3 }));
    }
    let delta = params.discriminant();
    if divides(p, &delta) {
        return Ok(exact(p));
    }
    let bound = p as i64 - legendre(&delta, p)? as i64;
    let (s, t) = (residue(&params.s, p) as u128, residue(&params.t, p) as u128);
    let candidates = divisors(bound as u64)?;
    let last = *candidates.last().expect("bound >= 1");
    let (mut prev, mut cur) = (0u128, 1u128);
    let mut idx = 1u64;
    for d in candidates {
        while idx < d {
            let next = (s * cur + t * prev) % p as u128;
            prev = cur;
            cur = next;
            idx += 1;
        }
        if cur == 0 {
            return Ok(RankResult {
                rho: Some(d),
                divides_bound: Some(bound),
            });
        }
    }
    Err(Error::internal(format!(
        "{p} divides no U_d for d | {last} at {params}"
    )))
}

/// Determines the regime of `(p, s, t)`.
pub fn classify(p: u64, params: &LucasParams) -> Result<ValuationCase> {
    require_prime(p)?;
    if params.t.is_zero() {
        return Err(Error::Unsupported(
            "atoms degenerate to monomials when t = 0; use the t = 0 profile".into(),
        ));
    }
    let (a, s_prime) = if params.s.is_zero() {
        (None, BigInt::zero())
    } else {
        let (a, rest) = strip_prime(p, &params.s);
        (Some(a), rest)
    };
    let (b, t_prime) = strip_prime(p, &params.t);
    let regime = match (b, a) {
        (0, _) if p != 2 => Regime::PNotDivTOddP,
        (0, Some(0)) => Regime::P2NotDivS,
        (0, _) => Regime::P2DivS,
        (_, Some(0)) => Regime::PDivTOnly,
        (b, Some(a)) if b > 2 * a => Regime::BGt2A,
        (b, Some(a)) if b == 2 * a => Regime::BEq2A,
        (b, Some(a)) if b + 1 == 2 * a && p == 2 => Regime::BEq2AMinus1P2,
        (b, Some(a)) if b + 1 == 2 * a && p == 3 => Regime::BEq2AMinus1P3,
        _ => Regime::BLt2AGeneric,
    };
    let lambda = match regime {
        Regime::BEq2AMinus1P2 | Regime::BEq2AMinus1P3 => {
            let sum = &s_prime * &s_prime + &t_prime;
            (!sum.is_zero()).then(|| strip_prime(p, &sum).0)
        }
        _ => None,
    };
    Ok(ValuationCase {
        p,
        params: params.clone(),
        regime,
        a,
        b: Some(b),
        s_prime,
        t_prime,
        delta: params.discriminant(),
        k: rank_of_appearance(p, params)?.rho,
        lambda,
    })
}

fn degenerate(params: &LucasParams, what: impl fmt::Display) -> Error {
    Error::ValuationOfZero(format!("{what} vanishes at degenerate parameters {params}"))
}

/// With `s = 0` and `p | t` only `P_2` and the even-indexed `U_n` vanish;
/// every other degenerate pair is rejected outright.
fn s_zero_exception(p: u64, params: &LucasParams) -> bool {
    params.s.is_zero() && !params.t.is_zero() && divides(p, &params.t)
}

fn guard_lucas(p: u64, params: &LucasParams, n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::ValuationOfZero("U_0 = 0".into()));
    }
    if params.is_degenerate() && !(s_zero_exception(p, params) && n % 2 == 1) {
        return Err(degenerate(params, format!("some U_m with m | {n}")));
    }
    Ok(())
}

fn guard_atom(p: u64, params: &LucasParams, n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!("atom index must be at least 2, got {n}")));
    }
    if params.is_degenerate() && !(s_zero_exception(p, params) && n != 2) {
        return Err(degenerate(params, format!("an atom (index {n} requested)")));
    }
    Ok(())
}

fn vp_lucas_at(p: u64, params: &LucasParams, k: u64) -> Result<u64> {
    Ok(vp_int(p, &lucas_int(k, params))? as u64)
}

fn rank(case: &ValuationCase) -> Result<u64> {
    case.k
        .ok_or_else(|| Error::internal(format!("rank of {} undefined at {}", case.p, case.params)))
}

fn finite(x: Option<u32>, name: &str) -> Result<u64> {
    x.map(u64::from)
        .ok_or_else(|| Error::internal(format!("{name} is infinite here")))
}

/// `h` with `x = p^h`, if any.
fn log_exact(x: u64, p: u64) -> Option<u32> {
    let h = vp_u64(p, x);
    (p.checked_pow(h) == Some(x)).then_some(h)
}

/// `v_p(U_n(s, t))` from the closed formulas.
pub fn vp_lucas_closed(p: u64, params: &LucasParams, n: u64) -> Result<u64> {
    require_prime(p)?;
    guard_lucas(p, params, n)?;
    let case = classify(p, params)?;
    vp_lucas_case(&case, n)
}

fn vp_lucas_case(case: &ValuationCase, n: u64) -> Result<u64> {
    let p = case.p;
    let params = &case.params;
    let vn = vp_u64(p, n) as u64;
    Ok(match case.regime {
        Regime::PNotDivTOddP => {
            let k = rank(case)?;
            if divides(p, &case.delta) {
                if n % p == 0 {
                    vn + vp_lucas_at(p, params, p)? - 1
                } else {
                    0
                }
            } else if n % k == 0 {
                vn + vp_lucas_at(p, params, k)?
            } else {
                0
            }
        }
        Regime::P2DivS => {
            if n % 2 == 0 {
                vn + vp_lucas_at(2, params, 2)? - 1
            } else {
                0
            }
        }
        Regime::P2NotDivS => {
            if n % 6 == 0 {
                vn + vp_lucas_at(2, params, 6)? - 1
            } else if n % 3 == 0 {
                vp_lucas_at(2, params, 3)?
            } else {
                0
            }
        }
        Regime::PDivTOnly => 0,
        Regime::BGt2A => (n - 1) * finite(case.a, "v_p(s)")?,
        Regime::BEq2A => {
            let reduced = classify(p, &case.reduced_params())?;
            (n - 1) * finite(case.a, "v_p(s)")? + vp_lucas_case(&reduced, n)?
        }
        r if r.is_b_below_2a() => {
            let b = finite(case.b, "v_p(t)")?;
            let m = n / 2;
            if n % 2 == 1 {
                b * m
            } else {
                let a = finite(case.a, "v_p(s)")?;
                let lambda = if m % p == 0 { special_lambda(case)? } else { 0 };
                b * m + (a - b) + vp_u64(p, m) as u64 + lambda
            }
        }
        _ => unreachable!(),
    })
}

/// `λ` contribution, nonzero only for `p in {2, 3}` with `2a = b + 1`.
fn special_lambda(case: &ValuationCase) -> Result<u64> {
    match case.regime {
        Regime::BEq2AMinus1P2 | Regime::BEq2AMinus1P3 => case
            .lambda
            .map(u64::from)
            .ok_or_else(|| degenerate(&case.params, "s'^2 + t'")),
        _ => Ok(0),
    }
}

fn ind(r: u64, n: u64) -> i64 {
    i64::from(n % r == 0)
}

/// Twice `v_p(U_n)`, written as a combination of `n`, `v_p(n)` and
/// divisibility indicators so that its Möbius transform is mechanical.
fn vp_lucas_indicator_twice(case: &ValuationCase, n: u64) -> Result<i64> {
    let p = case.p;
    let params = &case.params;
    let vn = vp_u64(p, n) as i64;
    let at = |k| vp_lucas_at(p, params, k).map(|v| v as i64);
    Ok(2 * match case.regime {
        Regime::PNotDivTOddP => {
            if divides(p, &case.delta) {
                vn + (at(p)? - 1) * ind(p, n)
            } else {
                let k = rank(case)?;
                ind(k, n) * vn + at(k)? * ind(k, n)
            }
        }
        Regime::P2DivS => vn + (at(2)? - 1) * ind(2, n),
        Regime::P2NotDivS => {
            let (v3, v6) = (at(3)?, at(6)?);
            vn * ind(3, n) + v3 * ind(3, n) + (v6 - v3 - 1) * ind(6, n)
        }
        Regime::PDivTOnly => 0,
        Regime::BGt2A => (n as i64 - 1) * finite(case.a, "v_p(s)")? as i64,
        Regime::BEq2A => {
            let reduced = classify(p, &case.reduced_params())?;
            let a = finite(case.a, "v_p(s)")? as i64;
            return Ok(2 * (n as i64 - 1) * a + vp_lucas_indicator_twice(&reduced, n)?);
        }
        r if r.is_b_below_2a() => {
            let b = finite(case.b, "v_p(t)")? as i64;
            let n = n as i64;
            let even = ind(2, n as u64);
            let two_a = match case.a {
                Some(a) => 2 * a as i64,
                None if even == 0 => 0,
                None => return Err(degenerate(params, format!("U_{n}"))),
            };
            let delta2 = i64::from(p == 2);
            let lambda = special_lambda(case)? as i64;
            return Ok(b * n - b
                + (two_a - b) * even
                + 2 * vn * even
                - 2 * delta2 * even
                + 2 * lambda * ind(2 * p, n as u64));
        }
        _ => unreachable!(),
    })
}

/// `v_p(U_n)` through the indicator form used by the Möbius route.
pub fn vp_lucas_reformulated(p: u64, params: &LucasParams, n: u64) -> Result<u64> {
    require_prime(p)?;
    guard_lucas(p, params, n)?;
    let case = classify(p, params)?;
    halve(vp_lucas_indicator_twice(&case, n)?, "v_p(U_n)")
}

fn halve(twice: i64, what: &str) -> Result<u64> {
    if twice < 0 || twice % 2 != 0 {
        return Err(Error::internal(format!("{what} came out as {twice}/2")));
    }
    Ok((twice / 2) as u64)
}

/// `sum_{d | n} mu(d) f(n / d)`.
pub fn mobius_transform(n: u64, mut f: impl FnMut(u64) -> Result<i64>) -> Result<i64> {
    let mut acc = 0i64;
    for d in divisors(n)? {
        let mu = mobius(d)?;
        if mu != 0 {
            acc += mu as i64 * f(n / d)?;
        }
    }
    Ok(acc)
}

/// `1` if `r | n`, else `0`.
pub fn indicator(r: u64, n: u64) -> i64 {
    ind(r, n)
}

/// `v_p(P_n)` as the Möbius transform of `v_p(U_m)` over `m | n`.
pub fn vp_atom_mobius(p: u64, params: &LucasParams, n: u64) -> Result<u64> {
    require_prime(p)?;
    guard_atom(p, params, n)?;
    if params.is_degenerate() && n % 2 == 0 {
        return Err(degenerate(params, format!("U_{n}")));
    }
    let case = classify(p, params)?;
    let twice = mobius_transform(n, |m| vp_lucas_indicator_twice(&case, m))?;
    halve(twice, "Möbius sum for v_p(P_n)")
}

/// `v_p(P_n)` from the closed formulas.
pub fn vp_atom_closed(p: u64, params: &LucasParams, n: u64) -> Result<u64> {
    require_prime(p)?;
    guard_atom(p, params, n)?;
    let case = classify(p, params)?;
    vp_atom_case(&case, n)
}

fn vp_atom_case(case: &ValuationCase, n: u64) -> Result<u64> {
    let p = case.p;
    let params = &case.params;
    let phi = euler_phi(n)?;
    Ok(match case.regime {
        Regime::PNotDivTOddP => {
            let k = rank(case)?;
            if n == k {
                vp_lucas_at(p, params, k)?
            } else if n % k == 0 && log_exact(n / k, p).is_some() {
                1
            } else {
                0
            }
        }
        Regime::P2DivS => match log_exact(n, 2) {
            Some(1) => vp_lucas_at(2, params, 2)?,
            Some(_) => 1,
            None => 0,
        },
        Regime::P2NotDivS => {
            if n % 3 != 0 {
                0
            } else {
                match log_exact(n / 3, 2) {
                    Some(0) => vp_lucas_at(2, params, 3)?,
                    Some(1) => vp_lucas_at(2, params, 6)? - vp_lucas_at(2, params, 3)?,
                    Some(_) => 1,
                    None => 0,
                }
            }
        }
        Regime::PDivTOnly => 0,
        Regime::BGt2A => phi * finite(case.a, "v_p(s)")?,
        Regime::BEq2A => {
            let reduced = classify(p, &case.reduced_params())?;
            phi * finite(case.a, "v_p(s)")? + vp_atom_case(&reduced, n)?
        }
        r if r.is_b_below_2a() => {
            let b = finite(case.b, "v_p(t)")?;
            let generic = b * phi / 2;
            if n == 2 {
                return finite(case.a, "v_p(s)");
            }
            let h = if n % 2 == 0 { log_exact(n / 2, p) } else { None };
            match (r, h) {
                (Regime::BEq2AMinus1P3, Some(1)) | (Regime::BEq2AMinus1P2, Some(1)) => {
                    b + 1 + special_lambda(case)?
                }
                (_, Some(h)) if h >= 1 => generic + 1,
                _ => generic,
            }
        }
        _ => unreachable!(),
    })
}

/// `v_p(P_n)` by evaluating the atom.
pub fn vp_atom_oracle(p: u64, params: &LucasParams, n: u64) -> Result<u64> {
    require_prime(p)?;
    if n < 2 {
        return Err(Error::domain(format!("atom index must be at least 2, got {n}")));
    }
    let value = atom_eval(n, params)?;
    if value.is_zero() {
        return Err(Error::ValuationOfZero(format!("P_{n}{params} = 0")));
    }
    Ok(vp_int(p, &value)? as u64)
}

/// Whether `v_p(U_p) = 1`, the side condition for odd `p >= 5` dividing `Delta`.
pub fn lucas_p_valuation_is_one(p: u64, params: &LucasParams) -> Result<bool> {
    Ok(vp_lucas_at(p, params, p)? == 1)
}
