//! Lucas atoms `P_n(s, t)`.
//!
//! Three independent constructions are provided:
//!
//! * [`AtomRoute::Symmetric`]: expand `beta^phi(n) Psi_n(alpha / beta)` by
//!   pairing the palindromic coefficients of `Psi_n`, which turns each pair
//!   into `c_j (-t)^j W_{phi(n) - 2j}` with `W_k = alpha^k + beta^k`.
//! * [`AtomRoute::Division`]: peel atoms off `U_n = prod_{d | n} P_d` by exact
//!   division, smallest divisor first.
//! * [`AtomRoute::Reduction`]: recurse on the largest prime power of `n`
//!   using the substitutions `(s, t) -> (s^2 + 2t, -t^2)` for `p = 2` and
//!   `(s, t) -> (s P_{2p}, t^p)` for odd `p`.
//!
//! The checked route computes all applicable constructions, insists they
//! agree, and memoizes the result.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactpoly::BiPoly;
use crate::lucasfam::{companion_int_table, cyclotomic, for_each_companion, lucas_poly, LucasParams};
use crate::numtheory::{divisors, euler_phi, factorize, is_prime_u64, primality, Primality};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomRoute {
    Symmetric,
    Division,
    Reduction,
}

/// Which construction [`atom`] should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RouteChoice {
    Only(AtomRoute),
    /// Every applicable route, cross-checked and memoized.
    Checked,
}

impl FromStr for RouteChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sym" | "symmetric" => RouteChoice::Only(AtomRoute::Symmetric),
            "div" | "division" => RouteChoice::Only(AtomRoute::Division),
            "red" | "reduction" => RouteChoice::Only(AtomRoute::Reduction),
            "checked" => RouteChoice::Checked,
            other => return Err(Error::domain(format!("unknown route `{other}`"))),
        })
    }
}

impl fmt::Display for RouteChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RouteChoice::Only(AtomRoute::Symmetric) => "sym",
            RouteChoice::Only(AtomRoute::Division) => "div",
            RouteChoice::Only(AtomRoute::Reduction) => "red",
            RouteChoice::Checked => "checked",
        })
    }
}

fn require_positive(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("atom index must be positive"));
    }
    Ok(())
}

/// Coefficients `c_j` of `Psi_n` paired with the weight `phi(n)`.
fn palindromic_data(n: u64) -> Result<(u64, Arc<crate::exactpoly::UniPoly>)> {
    Ok((euler_phi(n)?, cyclotomic(n)?))
}

/// `P_n` by the palindromic expansion over companion polynomials.
pub fn atom_symmetric(n: u64) -> Result<BiPoly> {
    Ok(atom_symmetric_many(&[n])?.pop().expect("one index in, one atom out"))
}

/// Several atoms by the palindromic expansion, sharing one pass over the
/// companion polynomials.
pub fn atom_symmetric_many(ns: &[u64]) -> Result<Vec<BiPoly>> {
    struct Target {
        m: u64,
        c: Arc<crate::exactpoly::UniPoly>,
        acc: Vec<BigInt>,
    }
    let mut targets = Vec::with_capacity(ns.len());
    for &n in ns {
        require_positive(n)?;
        targets.push(if n == 1 {
            None
        } else {
            let (m, c) = palindromic_data(n)?;
            let acc = vec![BigInt::zero(); (m / 2 + 1) as usize];
            Some(Target { m, c, acc })
        });
    }
    let upto = targets.iter().flatten().map(|t| t.m).max().unwrap_or(0);
    for_each_companion(upto, |k, w| {
        if k == 0 {
            return;
        }
        for target in targets.iter_mut().flatten() {
            if k > target.m || (target.m - k) % 2 != 0 {
                continue;
            }
            let j = ((target.m - k) / 2) as usize;
            let cj = &target.c.coeffs()[j];
            if cj.is_zero() {
                continue;
            }
            let cj = if j % 2 == 0 { cj.clone() } else { -cj };
            for (i, x) in w.coeffs.iter().enumerate() {
                target.acc[i + j] += &cj * x;
            }
        }
    });
    Ok(targets
        .into_iter()
        .map(|target| match target {
            None => BiPoly::one(),
            Some(Target { m, c, mut acc }) => {
                if m % 2 == 0 {
                    let h = (m / 2) as usize;
                    if h % 2 == 0 {
                        acc[h] += &c.coeffs()[h];
                    } else {
                        acc[h] -= &c.coeffs()[h];
                    }
                }
                BiPoly::from_terms(
                    acc.into_iter()
                        .enumerate()
                        .map(|(j, x)| ((m - 2 * j as u64) as u32, j as u32, x)),
                )
            }
        })
        .collect())
}

/// Atoms `P_d` for every divisor `d` of `n`, each obtained by dividing `U_d`
/// by the atoms of its proper divisors.
pub fn atom_division_table(n: u64) -> Result<BTreeMap<u64, BiPoly>> {
    require_positive(n)?;
    let divs = divisors(n)?;
    let mut table = BTreeMap::new();
    for &d in &divs {
        let mut u = lucas_poly(d);
        for &e in divs.iter().take_while(|&&e| e < d) {
            if e > 1 && d % e == 0 {
                u = u.exact_div_in_s(&table[&e]).map_err(|err| {
                    Error::internal(format!("peeling P_{e} off U_{d}: {err}"))
                })?;
            }
        }
        table.insert(d, u);
    }
    Ok(table)
}

/// `P_n = U_n / prod_{d | n, d < n} P_d`.
pub fn atom_division(n: u64) -> Result<BiPoly> {
    Ok(atom_division_table(n)?.remove(&n).expect("n divides itself"))
}

/// Whether the reduction recursion does real work for `n`, as opposed to
/// falling straight through to a base case (`1`, a prime, or `2p`).
pub fn reduction_applies(n: u64) -> bool {
    if n < 4 || is_prime_u64(n) {
        return false;
    }
    !(n % 2 == 0 && n / 2 > 2 && is_prime_u64(n / 2))
}

/// The substitution `(s, t) -> (S, T)` realizing `alpha -> alpha^p`.
fn frobenius_substitution(p: u64) -> Result<(BiPoly, BiPoly)> {
    if p == 2 {
        let s2_2t = BiPoly::from_terms([(2, 0, 1), (0, 1, 2)]);
        return Ok((s2_2t, BiPoly::monomial(-1, 0, 2)));
    }
    let p2p = atom_division(2 * p)?;
    Ok((&BiPoly::s() * &p2p, BiPoly::monomial(1, 0, p as u32)))
}

/// `P_n` by recursion on the largest prime power dividing `n`.
///
/// With `n = p^m n'` and `p` the largest prime factor: for `m >= 2`,
/// `P_n = P_{p^(m-1) n'}(S, T)`; for `m = 1`, `P_n = P_{n'}(S, T) / P_{n'}`.
/// Primes are their own Lucas polynomial, and `P_{2p}` (which the odd-prime
/// substitution itself needs) comes from the division route.
pub fn atom_reduction(n: u64) -> Result<BiPoly> {
    require_positive(n)?;
    if n == 1 {
        return Ok(BiPoly::one());
    }
    let (p, m) = factorize(n)?.largest_prime().expect("n > 1");
    let rest = n / p.pow(m);
    if m == 1 && rest == 1 {
        return Ok(lucas_poly(p));
    }
    if m == 1 && rest == 2 {
        return atom_division(n);
    }
    let (big_s, big_t) = frobenius_substitution(p)?;
    if m >= 2 {
        let inner = atom_reduction(n / p)?;
        return Ok(inner.substitute(&big_s, &big_t));
    }
    let inner = atom_reduction(rest)?;
    inner
        .substitute(&big_s, &big_t)
        .exact_div_in_s(&inner)
        .map_err(|e| Error::internal(format!("reduction step for P_{n}: {e}")))
}

fn atom_memo() -> &'static Mutex<HashMap<u64, Arc<BiPoly>>> {
    static MEMO: OnceLock<Mutex<HashMap<u64, Arc<BiPoly>>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

pub fn atom_by_route(n: u64, route: AtomRoute) -> Result<BiPoly> {
    match route {
        AtomRoute::Symmetric => atom_symmetric(n),
        AtomRoute::Division => atom_division(n),
        AtomRoute::Reduction => atom_reduction(n),
    }
}

/// `P_n` by the requested route; the checked route is memoized.
pub fn atom(n: u64, choice: RouteChoice) -> Result<Arc<BiPoly>> {
    require_positive(n)?;
    if let RouteChoice::Only(route) = choice {
        return atom_by_route(n, route).map(Arc::new);
    }
    if let Some(hit) = atom_memo().lock().expect("memo poisoned").get(&n) {
        return Ok(Arc::clone(hit));
    }
    let sym = atom_symmetric(n)?;
    let div = atom_division(n)?;
    if sym != div {
        return Err(Error::internal(format!(
            "P_{n}: symmetric route gives {sym}, division route gives {div}"
        )));
    }
    if reduction_applies(n) {
        let red = atom_reduction(n)?;
        if red != sym {
            return Err(Error::internal(format!(
                "P_{n}: reduction route gives {red}, other routes give {sym}"
            )));
        }
    }
    let sym = Arc::new(sym);
    let mut memo = atom_memo().lock().expect("memo poisoned");
    Ok(Arc::clone(memo.entry(n).or_insert(sym)))
}

/// `P_n(s, t)` at integer parameters, from the palindromic expansion over
/// integer companion values.
pub fn atom_eval(n: u64, params: &LucasParams) -> Result<BigInt> {
    require_positive(n)?;
    if n == 1 {
        return Ok(BigInt::one());
    }
    let (m, psi) = palindromic_data(n)?;
    let c = psi.coeffs();
    let w = companion_int_table(m, params);
    let minus_t = -&params.t;
    let mut t_pow = BigInt::one();
    let mut acc = BigInt::zero();
    for j in 0..=(m / 2) as usize {
        let k = m as usize - 2 * j;
        if k == 0 {
            acc += &c[j] * &t_pow;
        } else if !c[j].is_zero() {
            acc += &c[j] * &t_pow * &w[k];
        }
        t_pow *= &minus_t;
    }
    Ok(acc)
}

/// Atomic exponents of `prod U_{n_i} / prod U_{k_j}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomDecomposition {
    /// `d -> (a_d, b_d)`: how many numerator / denominator indices `d` divides.
    pub exponents: BTreeMap<u64, (u32, u32)>,
    /// Whether the ratio is a polynomial, i.e. `a_d >= b_d` for all `d`.
    pub is_polynomial: bool,
    /// `d -> a_d - b_d` for the atoms left over, when the ratio is a polynomial.
    pub quotient: BTreeMap<u64, u32>,
}

impl AtomDecomposition {
    /// The quotient polynomial, when the ratio is one.
    pub fn expand_quotient(&self) -> Result<Option<BiPoly>> {
        if !self.is_polynomial {
            return Ok(None);
        }
        expand_atom_product(&self.quotient).map(Some)
    }
}

fn expand_atom_product(exponents: &BTreeMap<u64, u32>) -> Result<BiPoly> {
    let mut acc = BiPoly::one();
    for (&d, &e) in exponents {
        acc = &acc * &atom(d, RouteChoice::Checked)?.pow(e);
    }
    Ok(acc)
}

/// Decides whether `prod U_{n_i} / prod U_{k_j}` is a polynomial by counting
/// atoms: `P_d` occurs in `U_n` exactly when `d | n`, and atoms are
/// irreducible, so the ratio is a polynomial iff no atom is over-represented
/// in the denominator.
pub fn decompose_ratio(nums: &[u64], dens: &[u64]) -> Result<AtomDecomposition> {
    if let Some(bad) = nums.iter().chain(dens).find(|&&i| i < 2) {
        return Err(Error::domain(format!(
            "ratio indices must be at least 2, got {bad}"
        )));
    }
    let mut candidates = BTreeSet::new();
    for &i in nums.iter().chain(dens) {
        candidates.extend(divisors(i)?.into_iter().filter(|&d| d >= 2));
    }
    let count = |list: &[u64], d: u64| list.iter().filter(|&&i| i % d == 0).count() as u32;
    let exponents: BTreeMap<u64, (u32, u32)> = candidates
        .into_iter()
        .map(|d| (d, (count(nums, d), count(dens, d))))
        .collect();
    let is_polynomial = exponents.values().all(|&(a, b)| a >= b);
    let quotient = if is_polynomial {
        exponents
            .iter()
            .filter(|(_, &(a, b))| a > b)
            .map(|(&d, &(a, b))| (d, a - b))
            .collect()
    } else {
        BTreeMap::new()
    };
    Ok(AtomDecomposition {
        exponents,
        is_polynomial,
        quotient,
    })
}

/// Lucas analogue of a binomial coefficient,
/// `U_1 ... U_n / (U_1 ... U_k U_1 ... U_{n-k})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lucanomial {
    /// `d -> e_d`, the exponent of `P_d` (only nonzero exponents).
    pub exponents: BTreeMap<u64, u32>,
    pub poly: BiPoly,
}

pub fn lucanomial(n: u64, k: u64) -> Result<Lucanomial> {
    if k > n {
        return Err(Error::domain(format!("lucanomial needs k <= n, got n={n}, k={k}")));
    }
    let nums: Vec<u64> = (2..=n).collect();
    let dens: Vec<u64> = (2..=k).chain(2..=n - k).collect();
    let decomposition = decompose_ratio(&nums, &dens)?;
    if !decomposition.is_polynomial {
        return Err(Error::internal(format!("lucanomial ({n}, {k}) is not a polynomial")));
    }
    for d in 2..=n {
        let floor = n / d - k / d - (n - k) / d;
        let got = decomposition.quotient.get(&d).copied().unwrap_or(0) as u64;
        if got != floor {
            return Err(Error::internal(format!(
                "lucanomial ({n}, {k}): exponent of P_{d} is {got}, floor count gives {floor}"
            )));
        }
    }
    let poly = expand_atom_product(&decomposition.quotient)?;
    Ok(Lucanomial {
        exponents: decomposition.quotient,
        poly,
    })
}

/// A parameter pair at which an atom takes a prime value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeHit {
    pub s: i64,
    pub t: i64,
    pub value: BigInt,
    pub primality: Primality,
}

/// All `|s|, |t| <= bound` with `P_n(s, t)` prime, ordered by `(s, t)`.
pub fn prime_search(n: u64, bound: u64) -> Result<Vec<PrimeHit>> {
    if n < 2 {
        return Err(Error::domain("prime search needs n >= 2"));
    }
    let bound = i64::try_from(bound).map_err(|_| Error::domain("bound too large"))?;
    let mut hits = Vec::new();
    for s in -bound..=bound {
        for t in -bound..=bound {
            let value = atom_eval(n, &LucasParams::new(s, t))?;
            let verdict = primality(&value);
            if verdict.is_prime() {
                hits.push(PrimeHit {
                    s,
                    t,
                    value,
                    primality: verdict,
                });
            }
        }
    }
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::is_prime;

    fn bp(terms: &[(u32, u32, i64)]) -> BiPoly {
        BiPoly::from_terms(terms.iter().copied())
    }

    #[test]
    fn small_atoms_by_every_route() {
        let expected = [
            (1, "1"),
            (2, "s"),
            (3, "s^2 + t"),
            (4, "s^2 + 2*t"),
            (5, "s^4 + 3*s^2*t + t^2"),
            (6, "s^2 + 3*t"),
            (8, "s^4 + 4*s^2*t + 2*t^2"),
            (12, "s^4 + 4*s^2*t + t^2"),
        ];
        for (n, text) in expected {
            for route in [AtomRoute::Symmetric, AtomRoute::Division, AtomRoute::Reduction] {
                assert_eq!(atom_by_route(n, route).unwrap().to_string(), text, "P_{n} via {route:?}");
            }
            assert_eq!(atom(n, RouteChoice::Checked).unwrap().to_string(), text);
        }
    }

    #[test]
    fn derived_atoms_match_lucas_quotients() {
        // U_8 = P_1 P_2 P_4 P_8 and U_4 = P_1 P_2 P_4
        assert_eq!(lucas_poly(8).exact_div_in_s(&lucas_poly(4)).unwrap(), atom_symmetric(8).unwrap());
        // U_12 / (P_2 P_3 P_4 P_6)
        let denom = [2, 3, 4, 6]
            .iter()
            .fold(BiPoly::one(), |acc, &d| &acc * &atom_symmetric(d).unwrap());
        assert_eq!(lucas_poly(12).exact_div_in_s(&denom).unwrap(), atom_division(12).unwrap());
        assert_eq!(atom_division(5).unwrap(), lucas_poly(5));
    }

    #[test]
    fn reduction_branches() {
        // p = 3, m = 2, n' = 1: P_9 = P_3(s P_6, t^3)
        let p6 = atom_division(6).unwrap();
        let p9 = atom_symmetric(3)
            .unwrap()
            .substitute(&(&BiPoly::s() * &p6), &BiPoly::monomial(1, 0, 3));
        assert_eq!(atom_reduction(9).unwrap(), p9);
        assert_eq!(p9, atom_division(9).unwrap());
        // p = 2 twice removed: P_12 from P_3 via (s^2 + 2t, -t^2)
        assert_eq!(atom_reduction(12).unwrap(), atom_division(12).unwrap());
        assert_eq!(atom_reduction(30).unwrap(), atom_division(30).unwrap());
        assert!(reduction_applies(9) && reduction_applies(12) && reduction_applies(4));
        assert!(!reduction_applies(6) && !reduction_applies(7) && !reduction_applies(14));
        assert!(reduction_applies(30));
    }

    #[test]
    fn routes_agree_for_small_n() {
        for n in 1..=80 {
            let sym = atom_symmetric(n).unwrap();
            assert_eq!(sym, atom_division(n).unwrap(), "n = {n}");
            assert_eq!(sym, atom_reduction(n).unwrap(), "n = {n}");
        }
        assert!(atom(30, RouteChoice::Checked).is_ok());
    }

    #[test]
    fn batched_symmetric_matches_single() {
        let ns = [1, 12, 2, 30, 7, 1, 64];
        let batch = atom_symmetric_many(&ns).unwrap();
        for (n, poly) in ns.iter().zip(&batch) {
            assert_eq!(*poly, atom_division(*n).unwrap(), "P_{n}");
        }
        assert!(atom_symmetric_many(&[]).unwrap().is_empty());
        assert!(matches!(atom_symmetric_many(&[3, 0]), Err(Error::Domain(_))));
    }

    #[test]
    fn atom_index_zero_rejected() {
        assert!(matches!(atom_symmetric(0), Err(Error::Domain(_))));
        assert!(matches!(atom_division(0), Err(Error::Domain(_))));
        assert!(matches!(atom_reduction(0), Err(Error::Domain(_))));
        assert!(matches!(atom(0, RouteChoice::Checked), Err(Error::Domain(_))));
        assert!(matches!(atom_eval(0, &LucasParams::new(1, 1)), Err(Error::Domain(_))));
    }

    #[test]
    fn atom_eval_examples() {
        assert_eq!(atom_eval(6, &LucasParams::new(1, 1)).unwrap(), BigInt::from(4));
        assert_eq!(atom_eval(3, &LucasParams::new(1, -1)).unwrap(), BigInt::zero());
        assert_eq!(atom_eval(8, &LucasParams::new(2, 2)).unwrap(), BigInt::from(56));
        for n in 1..=40 {
            let poly = atom_symmetric(n).unwrap();
            for (s, t) in [(1, 1), (2, -3), (-4, 5), (0, 7)] {
                let params = LucasParams::new(s, t);
                assert_eq!(
                    atom_eval(n, &params).unwrap(),
                    poly.eval(&params.s, &params.t),
                    "P_{n}{params}"
                );
            }
        }
    }

    #[test]
    fn ratio_examples() {
        let dec = decompose_ratio(&[6], &[2, 3]).unwrap();
        assert_eq!(dec.exponents[&2], (1, 1));
        assert_eq!(dec.exponents[&3], (1, 1));
        assert_eq!(dec.exponents[&6], (1, 0));
        assert!(dec.is_polynomial);
        assert_eq!(dec.quotient, BTreeMap::from([(6, 1)]));
        let expanded = dec.expand_quotient().unwrap().unwrap();
        let oracle = lucas_poly(6)
            .exact_div_in_s(&lucas_poly(2))
            .and_then(|q| q.exact_div_in_s(&lucas_poly(3)))
            .unwrap();
        assert_eq!(expanded, oracle);

        let dec = decompose_ratio(&[4], &[3]).unwrap();
        assert!(!dec.is_polynomial);
        assert_eq!(dec.exponents[&3], (0, 1));
        assert_eq!(dec.expand_quotient().unwrap(), None);

        assert!(matches!(decompose_ratio(&[4, 5, 6], &[1]), Err(Error::Domain(_))));
    }

    #[test]
    fn lucanomial_examples() {
        let l = lucanomial(5, 0).unwrap();
        assert!(l.exponents.is_empty());
        assert_eq!(l.poly, BiPoly::one());
        let l = lucanomial(6, 3).unwrap();
        assert_eq!(l.poly.eval(&BigInt::one(), &BigInt::one()), BigInt::from(3 * 5 * 8 / 2));
        let l = lucanomial(4, 2).unwrap();
        assert_eq!(l.poly, &bp(&[(2, 0, 1), (0, 1, 1)]) * &bp(&[(2, 0, 1), (0, 1, 2)]));
        assert!(matches!(lucanomial(3, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn prime_search_examples() {
        let hits = prime_search(2, 3).unwrap();
        assert!(hits.iter().all(|h| is_prime(&BigInt::from(h.s)) && BigInt::from(h.s) == h.value));
        assert_eq!(hits.len(), 2 * 7);
        let hits = prime_search(6, 2).unwrap();
        let oracle: Vec<(i64, i64)> = (-2i64..=2)
            .flat_map(|s| (-2i64..=2).map(move |t| (s, t)))
            .filter(|&(s, t)| is_prime(&BigInt::from(s * s + 3 * t)))
            .collect();
        assert_eq!(hits.iter().map(|h| (h.s, h.t)).collect::<Vec<_>>(), oracle);
        assert!(hits.iter().any(|h| (h.s, h.t) == (1, 2) && h.value == BigInt::from(7)));
        assert!(prime_search(4, 0).unwrap().is_empty());
        assert!(prime_search(1, 3).is_err());
    }
}
