//! Finite-horizon evidence that `(P_n(s, t))_n` is not polynomially
//! recurrent: divisibility patterns that are not eventually periodic, and
//! exact refutation of candidate recurrences.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::atoms::{atom, atom_eval, RouteChoice};
use crate::error::{Error, Result};
use crate::exactpoly::{solve_rational, LinearSolution, RatMatrix};
use crate::lucasfam::LucasParams;
use crate::numtheory::{divisors, euler_phi, factorize, is_prime_u64, mobius, residue};
use crate::valuations::vp_atom_closed;

/// `Psi_n` reduced mod `p`, lowest degree first.
///
/// Built as `prod_{d | rad(n)} (q^d - 1)^{mu(rad(n) / d)}` with the
/// multiplications done first so every division is exact, then inflated by
/// `n / rad(n)`.
pub fn cyclotomic_mod(n: u64, p: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::domain("cyclotomic index must be positive"));
    }
    let rad = factorize(n)?.radical();
    let divs = divisors(rad)?;
    let mut num = Vec::new();
    let mut den = Vec::new();
    for d in divs {
        match mobius(rad / d)? {
            1 => num.push(d as usize),
            -1 => den.push(d as usize),
            _ => {}
        }
    }
    let mut poly = vec![1u64];
    for d in num {
        let mut next = vec![0u64; poly.len() + d];
        for (i, &c) in poly.iter().enumerate() {
            next[i + d] = (next[i + d] + c) % p;
            next[i] = (next[i] + p - c) % p;
        }
        poly = next;
    }
    for d in den {
        let deg = poly.len() - 1;
        let mut quot = vec![0u64; deg - d + 1];
        for k in (0..quot.len()).rev() {
            let above = quot.get(k + d).copied().unwrap_or(0);
            quot[k] = (poly[k + d] + above) % p;
        }
        poly = quot;
    }
    let stretch = (n / rad) as usize;
    if stretch == 1 {
        return Ok(poly);
    }
    let mut inflated = vec![0u64; (poly.len() - 1) * stretch + 1];
    for (i, c) in poly.into_iter().enumerate() {
        inflated[i * stretch] = c;
    }
    Ok(inflated)
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// `P_n(s, t) mod p` for `2 <= n`, given `W_k mod p` and `(-t)^j mod p`
/// tables long enough for `phi(n)`.
fn atom_mod(n: u64, p: u64, w: &[u64], minus_t_pow: &[u64]) -> Result<u64> {
    let m = euler_phi(n)? as usize;
    let c = cyclotomic_mod(n, p)?;
    let mut acc = 0u64;
    for j in 0..=m / 2 {
        if c[j] == 0 {
            continue;
        }
        let k = m - 2 * j;
        let wk = if k == 0 { 1 } else { w[k] };
        acc = (acc + mul_mod(mul_mod(c[j], minus_t_pow[j], p), wk, p)) % p;
    }
    Ok(acc)
}

/// Where the hit indicator becomes periodic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventualPeriod {
    pub period: u64,
    /// First index of the periodic tail.
    pub start: u64,
}

/// Looks for a period `Q <= max_period` under which the indicator of `hits`
/// on `first..=horizon` is periodic from some point on.
///
/// A period only counts when the periodic tail spans at least two full
/// periods and still contains a hit, so a sparse set whose hits have simply
/// run out is not mistaken for an arithmetic progression.
pub fn eventual_period(hits: &[u64], first: u64, horizon: u64, max_period: u64) -> Option<EventualPeriod> {
    if horizon < first {
        return None;
    }
    let len = (horizon - first + 1) as usize;
    let mut ind = vec![false; len];
    for &h in hits {
        if (first..=horizon).contains(&h) {
            ind[(h - first) as usize] = true;
        }
    }
    let last_hit = ind.iter().rposition(|&x| x)?;
    for q in 1..=max_period as usize {
        if 2 * q > len {
            break;
        }
        let last_break = (0..len - q).rev().find(|&i| ind[i] != ind[i + q]);
        let start = last_break.map_or(0, |i| i + 1);
        if start + 2 * q <= len - 1 && start <= last_hit {
            return Some(EventualPeriod {
                period: q as u64,
                start: first + start as u64,
            });
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisibilityPattern {
    pub p: u64,
    pub params: LucasParams,
    pub horizon: u64,
    /// `{2 <= n <= horizon : p | P_n(s, t)}`.
    pub hits: Vec<u64>,
    /// `{2 <= n <= horizon : v_p(P_n) > 0}` by the closed formulas.
    pub expected: Vec<u64>,
    pub matches: bool,
    /// Largest period tested.
    pub max_period: u64,
    /// Some period making the hit indicator eventually periodic, if any.
    pub eventual_period: Option<EventualPeriod>,
}

impl DivisibilityPattern {
    /// Whether the hits look like finitely many progressions plus a finite set.
    pub fn is_progression_like(&self) -> bool {
        self.eventual_period.is_some()
    }
}

/// Indices `n <= horizon` with `p | P_n(s, t)`, computed mod `p`.
pub fn divisibility_scan(p: u64, params: &LucasParams, horizon: u64) -> Result<DivisibilityPattern> {
    if !is_prime_u64(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if params.t.is_zero() {
        return Err(Error::Unsupported(
            "t = 0 makes every atom a power of s; use the t = 0 profile".into(),
        ));
    }
    if params.is_degenerate() {
        return Err(Error::ValuationOfZero(format!(
            "some atom vanishes at degenerate parameters {params}"
        )));
    }
    let len = horizon as usize + 1;
    let (s, t) = (residue(&params.s, p), residue(&params.t, p));
    let mut w = vec![2 % p, s];
    while w.len() < len {
        let k = w.len();
        w.push((mul_mod(s, w[k - 1], p) + mul_mod(t, w[k - 2], p)) % p);
    }
    let minus_t = (p - t) % p;
    let mut minus_t_pow = vec![1 % p];
    while minus_t_pow.len() < len {
        let last = *minus_t_pow.last().expect("nonempty");
        minus_t_pow.push(mul_mod(last, minus_t, p));
    }
    let mut hits = Vec::new();
    let mut expected = Vec::new();
    for n in 2..=horizon {
        if atom_mod(n, p, &w, &minus_t_pow)? == 0 {
            hits.push(n);
        }
        if vp_atom_closed(p, params, n)? > 0 {
            expected.push(n);
        }
    }
    let max_period = horizon / 3;
    let eventual_period = eventual_period(&hits, 2, horizon, max_period);
    Ok(DivisibilityPattern {
        p,
        params: params.clone(),
        horizon,
        matches: hits == expected,
        hits,
        expected,
        max_period,
        eventual_period,
    })
}

/// Where an overdetermined recurrence system first became inconsistent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefutationWitness {
    pub start: u64,
    /// Smallest `end` for which the equations at `start..=end` are inconsistent.
    pub end: u64,
    /// `y` with `y A = 0` and `y b != 0` for that prefix.
    pub certificate: Vec<BigRational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecurrenceOutcome {
    /// `coefficients[j]` lists `G_j`'s coefficients, lowest degree first.
    Fit {
        coefficients: Vec<Vec<BigRational>>,
        /// Dimension of the solution space (0 when the fit is unique).
        freedom: usize,
    },
    Refuted(RefutationWitness),
}

/// Result of fitting `P_n = G_0(n) + sum_{j=1..l} G_j(n) P_{n-j}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceFit {
    pub params: LucasParams,
    pub order: u64,
    pub degree: u64,
    pub window: (u64, u64),
    pub outcome: RecurrenceOutcome,
}

impl RecurrenceFit {
    pub fn is_refuted(&self) -> bool {
        matches!(self.outcome, RecurrenceOutcome::Refuted(_))
    }
}

/// Window used when none is given: `10 ..= 10 + 3 (l + 1)(D + 1)`.
pub fn default_window(order: u64, degree: u64) -> (u64, u64) {
    (10, 10 + 3 * (order + 1) * (degree + 1))
}

struct RecurrenceSystem {
    order: usize,
    degree: usize,
    start: u64,
    /// `P_{start - order}, ..., P_end`.
    values: Vec<BigInt>,
}

impl RecurrenceSystem {
    fn value(&self, n: u64) -> &BigInt {
        &self.values[(n + self.order as u64 - self.start) as usize]
    }

    fn unknowns(&self) -> usize {
        (self.order + 1) * (self.degree + 1)
    }

    /// Unknowns are ordered `G_1, ..., G_l, G_0`, so free variables set to
    /// zero prefer the homogeneous part.
    fn column(&self, j: usize, e: usize) -> usize {
        let block = if j == 0 { self.order } else { j - 1 };
        block * (self.degree + 1) + e
    }

    fn row(&self, n: u64) -> Vec<BigRational> {
        let mut row = vec![BigRational::zero(); self.unknowns()];
        let nn = BigInt::from(n);
        for j in 0..=self.order {
            let base = if j == 0 { BigInt::one() } else { self.value(n - j as u64).clone() };
            let mut pow = base;
            for e in 0..=self.degree {
                row[self.column(j, e)] = BigRational::from_integer(pow.clone());
                pow *= &nn;
            }
        }
        row
    }

    fn solve(&self, end: u64) -> Result<LinearSolution> {
        let rows: Vec<Vec<BigRational>> = (self.start..=end).map(|n| self.row(n)).collect();
        let rhs: Vec<BigRational> = (self.start..=end)
            .map(|n| BigRational::from_integer(self.value(n).clone()))
            .collect();
        solve_rational(&RatMatrix::from_rows(rows)?, &rhs)
    }

    fn coefficients(&self, solution: &[BigRational]) -> Vec<Vec<BigRational>> {
        (0..=self.order)
            .map(|j| (0..=self.degree).map(|e| solution[self.column(j, e)].clone()).collect())
            .collect()
    }

    fn holds(&self, coefficients: &[Vec<BigRational>], n: u64) -> bool {
        let x = BigRational::from_integer(BigInt::from(n));
        let eval = |g: &[BigRational]| {
            g.iter()
                .rev()
                .fold(BigRational::zero(), |acc, c| acc * &x + c)
        };
        let mut rhs = eval(&coefficients[0]);
        for (j, g) in coefficients.iter().enumerate().skip(1) {
            rhs += eval(g) * BigRational::from_integer(self.value(n - j as u64).clone());
        }
        rhs == BigRational::from_integer(self.value(n).clone())
    }

    fn certificate_is_valid(&self, end: u64, y: &[BigRational]) -> bool {
        let rows: Vec<Vec<BigRational>> = (self.start..=end).map(|n| self.row(n)).collect();
        let combo_zero = (0..self.unknowns()).all(|c| {
            rows.iter()
                .zip(y)
                .fold(BigRational::zero(), |acc, (r, yi)| acc + &r[c] * yi)
                .is_zero()
        });
        let rhs = (self.start..=end)
            .zip(y)
            .fold(BigRational::zero(), |acc, (n, yi)| {
                acc + BigRational::from_integer(self.value(n).clone()) * yi
            });
        combo_zero && !rhs.is_zero()
    }
}

/// Tries to fit a recurrence of order `l` with polynomial coefficients of
/// degree at most `D` to `P_n(s, t)` over `n_start..=n_end`.
pub fn fit_recurrence(
    params: &LucasParams,
    order: u64,
    degree: u64,
    n_start: u64,
    n_end: u64,
) -> Result<RecurrenceFit> {
    if order == 0 {
        return Err(Error::precondition("recurrence order must be positive"));
    }
    if n_start <= order {
        return Err(Error::precondition(format!(
            "window must start after the order: start {n_start}, order {order}"
        )));
    }
    let needed = 2 * (order + 1) * (degree + 1);
    if n_end < n_start || n_end - n_start + 1 < needed {
        return Err(Error::precondition(format!(
            "window {n_start}..={n_end} is shorter than {needed} equations"
        )));
    }
    let values = (n_start - order..=n_end)
        .map(|n| atom_eval(n, params))
        .collect::<Result<Vec<_>>>()?;
    let system = RecurrenceSystem {
        order: order as usize,
        degree: degree as usize,
        start: n_start,
        values,
    };
    let outcome = match system.solve(n_end)? {
        LinearSolution::Inconsistent { .. } => {
            let (mut lo, mut hi) = (n_start, n_end);
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if system.solve(mid)?.is_consistent() {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            let LinearSolution::Inconsistent { certificate } = system.solve(lo)? else {
                return Err(Error::internal("inconsistency vanished on the minimal prefix"));
            };
            if !system.certificate_is_valid(lo, &certificate) {
                return Err(Error::internal("refutation certificate does not check out"));
            }
            RecurrenceOutcome::Refuted(RefutationWitness {
                start: n_start,
                end: lo,
                certificate,
            })
        }
        solved => {
            let freedom = solved.dimension().unwrap_or(0);
            let coefficients = system.coefficients(solved.solution().expect("consistent"));
            if let Some(n) = (n_start..=n_end).find(|&n| !system.holds(&coefficients, n)) {
                return Err(Error::internal(format!("fitted recurrence fails at n = {n}")));
            }
            RecurrenceOutcome::Fit { coefficients, freedom }
        }
    };
    Ok(RecurrenceFit {
        params: params.clone(),
        order,
        degree,
        window: (n_start, n_end),
        outcome,
    })
}

/// `P_n(s, 0)` for `1 <= n <= horizon`: `1`, then `s^phi(n)`.
///
/// The formula is checked against the symbolic atom at `t = 0` for
/// `n <= 200`.
pub fn t_zero_profile(s: &BigInt, horizon: u64) -> Result<Vec<(u64, BigInt)>> {
    let mut out = Vec::with_capacity(horizon as usize);
    let zero = BigInt::zero();
    for n in 1..=horizon {
        let value = if n == 1 {
            BigInt::one()
        } else {
            Pow::pow(s, euler_phi(n)?)
        };
        if n <= 200 {
            let symbolic = atom(n, RouteChoice::Checked)?.eval(s, &zero);
            if symbolic != value {
                return Err(Error::internal(format!(
                    "P_{n}(s, 0) = {symbolic} but s^phi(n) = {value} at s = {s}"
                )));
            }
        }
        out.push((n, value));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lucasfam::cyclotomic;
    use crate::valuations::vp_atom_oracle;

    fn pp(s: i64, t: i64) -> LucasParams {
        LucasParams::new(s, t)
    }

    #[test]
    fn cyclotomic_mod_matches_exact() {
        for p in [2u64, 3, 7, 1_000_003] {
            for n in 1..=150 {
                let exact: Vec<u64> = cyclotomic(n).unwrap().coeffs().iter().map(|c| residue(c, p)).collect();
                assert_eq!(cyclotomic_mod(n, p).unwrap(), exact, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn scan_examples() {
        let scan = divisibility_scan(2, &pp(1, 1), 200).unwrap();
        assert_eq!(scan.hits, vec![3, 6, 12, 24, 48, 96, 192]);
        assert!(scan.matches);
        let scan = divisibility_scan(5, &pp(1, 1), 130).unwrap();
        assert_eq!(scan.hits, vec![5, 25, 125]);
        assert!(scan.matches);
        assert!(divisibility_scan(7, &pp(1, 0), 50).is_err());
        assert!(divisibility_scan(3, &pp(1, -1), 50).is_err());
    }

    #[test]
    fn scan_agrees_with_oracle() {
        for p in [2u64, 3, 5, 7] {
            for (s, t) in [(1, 1), (3, 1), (2, 2), (3, 3), (4, 2), (1, 2), (2, 16)] {
                let params = pp(s, t);
                let scan = divisibility_scan(p, &params, 120).unwrap();
                let oracle: Vec<u64> = (2..=120)
                    .filter(|&n| vp_atom_oracle(p, &params, n).unwrap() > 0)
                    .collect();
                assert_eq!(scan.hits, oracle, "p={p} {params}");
                assert!(scan.matches);
            }
        }
    }

    #[test]
    fn periodicity_detection() {
        let evens: Vec<u64> = (2..=90).filter(|n| n % 2 == 0).collect();
        let found = eventual_period(&evens, 2, 90, 30).unwrap();
        assert_eq!(found.period, 2);
        let mixed: Vec<u64> = [3, 7].into_iter().chain((10..=90).filter(|n| n % 5 == 0)).collect();
        let found = eventual_period(&mixed, 2, 90, 30).unwrap();
        assert_eq!((found.period, found.start), (5, 8));
        let geometric = [3, 6, 12, 24, 48, 96];
        assert_eq!(eventual_period(&geometric, 2, 150, 50), None);
        assert_eq!(eventual_period(&[], 2, 150, 50), None);
    }

    #[test]
    fn fit_examples() {
        let (a, b) = default_window(2, 2);
        assert_eq!((a, b), (10, 37));
        assert!(fit_recurrence(&pp(1, 1), 2, 2, 10, 60).unwrap().is_refuted());
        assert!(fit_recurrence(&pp(2, 2), 1, 0, 10, 40).unwrap().is_refuted());

        let (a, b) = default_window(1, 1);
        let fit = fit_recurrence(&pp(1, 0), 1, 1, a, b).unwrap();
        let RecurrenceOutcome::Fit { coefficients, .. } = fit.outcome else {
            panic!("expected a fit");
        };
        let r = |x: i64| BigRational::from_integer(BigInt::from(x));
        assert_eq!(coefficients, vec![vec![r(0), r(0)], vec![r(1), r(0)]]);
    }

    #[test]
    fn fit_refutation_is_minimal() {
        let params = pp(1, 1);
        let fit = fit_recurrence(&params, 1, 1, 10, 30).unwrap();
        let RecurrenceOutcome::Refuted(w) = fit.outcome else {
            panic!("expected a refutation");
        };
        let system = RecurrenceSystem {
            order: 1,
            degree: 1,
            start: 10,
            values: (9..=30).map(|n| atom_eval(n, &params).unwrap()).collect(),
        };
        assert!(!system.solve(w.end).unwrap().is_consistent());
        assert!(system.solve(w.end - 1).unwrap().is_consistent());
        assert!(system.certificate_is_valid(w.end, &w.certificate));
    }

    #[test]
    fn fit_preconditions() {
        assert!(matches!(fit_recurrence(&pp(1, 1), 2, 2, 2, 60), Err(Error::Precondition(_))));
        assert!(matches!(fit_recurrence(&pp(1, 1), 2, 2, 10, 20), Err(Error::Precondition(_))));
        assert!(matches!(fit_recurrence(&pp(1, 1), 0, 2, 10, 60), Err(Error::Precondition(_))));
    }

    #[test]
    fn t_zero_examples() {
        let ones = t_zero_profile(&BigInt::one(), 10).unwrap();
        assert!(ones.iter().all(|(_, v)| v.is_one()));
        let zeros = t_zero_profile(&BigInt::zero(), 10).unwrap();
        assert!(zeros[0].1.is_one() && zeros[1..].iter().all(|(_, v)| v.is_zero()));
        let twos: Vec<BigInt> = t_zero_profile(&BigInt::from(2), 8).unwrap().into_iter().map(|(_, v)| v).collect();
        let expected: Vec<BigInt> = [1, 2, 4, 4, 16, 4, 64, 16].into_iter().map(BigInt::from).collect();
        assert_eq!(twos, expected);
    }
}
