use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::UniPoly;
use crate::error::{Error, Result};

/// Exponents of a monomial `s^i t^j` as `(i, j)`.
pub type Exponents = (u32, u32);

/// Sparse polynomial in `s` and `t` with integer coefficients.
///
/// No stored coefficient is zero, so structural equality is polynomial
/// equality. Terms are kept in a `BTreeMap` keyed by `(s-degree, t-degree)`;
/// the canonical order (s-degree descending, then t-degree descending) is the
/// reverse of the map order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BiPoly {
    terms: BTreeMap<Exponents, BigInt>,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly::default()
    }

    pub fn one() -> Self {
        BiPoly::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        BiPoly::monomial(c, 0, 0)
    }

    pub fn s() -> Self {
        BiPoly::monomial(1, 1, 0)
    }

    pub fn t() -> Self {
        BiPoly::monomial(1, 0, 1)
    }

    pub fn monomial(c: impl Into<BigInt>, s_deg: u32, t_deg: u32) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((s_deg, t_deg), c);
        }
        BiPoly { terms }
    }

    /// Builds a polynomial from `(s-degree, t-degree, coefficient)` triples,
    /// merging repeated monomials.
    pub fn from_terms<C: Into<BigInt>>(terms: impl IntoIterator<Item = (u32, u32, C)>) -> Self {
        let mut p = BiPoly::zero();
        for (i, j, c) in terms {
            p.add_term((i, j), c.into());
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&(0, 0)).is_some_and(One::is_one)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (Exponents, &BigInt)> + '_ {
        self.terms.iter().rev().map(|(&e, c)| (e, c))
    }

    pub fn coeff(&self, s_deg: u32, t_deg: u32) -> BigInt {
        self.terms.get(&(s_deg, t_deg)).cloned().unwrap_or_default()
    }

    pub fn degree_in_s(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|&(i, _)| i)
    }

    pub fn all_coefficients_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// True iff every monomial `s^i t^j` has `i + 2j = weight`.
    pub fn is_weighted_homogeneous(&self, weight: u64) -> bool {
        self.terms
            .keys()
            .all(|&(i, j)| i as u64 + 2 * j as u64 == weight)
    }

    /// True iff the highest power of `s` occurs in a single term `1 * s^m`.
    pub fn is_monic_in_s(&self) -> bool {
        let Some(m) = self.degree_in_s() else {
            return false;
        };
        let top: Vec<_> = self.terms.range((m, 0)..).collect();
        top.len() == 1 && *top[0].0 == (m, 0) && top[0].1.is_one()
    }

    pub(crate) fn add_term(&mut self, e: Exponents, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `c * s^i * t^j * self`.
    pub fn scale_shift(&self, c: &BigInt, s_shift: u32, t_shift: u32) -> BiPoly {
        if c.is_zero() {
            return BiPoly::zero();
        }
        BiPoly {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), v)| ((i + s_shift, j + t_shift), v * c))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> BiPoly {
        let mut base = self.clone();
        let mut acc = BiPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Views the polynomial as one in `s` whose coefficients are polynomials
    /// in `t`; entry `i` is the coefficient of `s^i`.
    fn coefficients_in_s(&self) -> Vec<UniPoly> {
        let Some(deg) = self.degree_in_s() else {
            return Vec::new();
        };
        let mut rows: Vec<Vec<BigInt>> = vec![Vec::new(); deg as usize + 1];
        for (&(i, j), c) in &self.terms {
            let row = &mut rows[i as usize];
            if row.len() <= j as usize {
                row.resize(j as usize + 1, BigInt::zero());
            }
            row[j as usize] = c.clone();
        }
        rows.into_iter().map(UniPoly::from_coeffs).collect()
    }

    fn from_coefficients_in_s(rows: &[UniPoly]) -> BiPoly {
        let mut terms = BTreeMap::new();
        for (i, row) in rows.iter().enumerate() {
            for (j, c) in row.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    terms.insert((i as u32, j as u32), c.clone());
                }
            }
        }
        BiPoly { terms }
    }

    /// Exact quotient `self / divisor`, treating both as polynomials in `s`
    /// over `Z[t]`. The divisor must be monic in `s`.
    pub fn exact_div_in_s(&self, divisor: &BiPoly) -> Result<BiPoly> {
        if !divisor.is_monic_in_s() {
            return Err(Error::precondition("divisor must be monic in s"));
        }
        let g = divisor.coefficients_in_s();
        let m = g.len() - 1;
        let mut rem = self.coefficients_in_s();
        if rem.len() <= m {
            return if rem.iter().all(UniPoly::is_zero) {
                Ok(BiPoly::zero())
            } else {
                Err(Error::InexactDivision)
            };
        }
        let mut quot = vec![UniPoly::zero(); rem.len() - m];
        for i in (0..quot.len()).rev() {
            let c = std::mem::take(&mut rem[i + m]);
            if c.is_zero() {
                continue;
            }
            for (j, gj) in g[..m].iter().enumerate() {
                if !gj.is_zero() {
                    rem[i + j] = &rem[i + j] - &(&c * gj);
                }
            }
            quot[i] = c;
        }
        if rem[..m].iter().any(|r| !r.is_zero()) {
            return Err(Error::InexactDivision);
        }
        Ok(BiPoly::from_coefficients_in_s(&quot))
    }

    /// Composition `self(s_val, t_val)`, expanded.
    pub fn substitute(&self, s_val: &BiPoly, t_val: &BiPoly) -> BiPoly {
        let rows = self.coefficients_in_s();
        let mut t_powers: Vec<BiPoly> = vec![BiPoly::one()];
        let mut s_powers: HashMap<u32, BiPoly> = HashMap::new();
        let mut acc = BiPoly::zero();
        let mut pending_gap = 0u32;
        for row in rows.iter().rev() {
            if row.is_zero() {
                pending_gap += 1;
                continue;
            }
            if !acc.is_zero() && pending_gap > 0 {
                let power = s_powers
                    .entry(pending_gap)
                    .or_insert_with(|| s_val.pow(pending_gap));
                acc = &acc * power;
            }
            let needed = row.coeffs().len();
            while t_powers.len() < needed {
                let next = t_powers.last().expect("nonempty") * t_val;
                t_powers.push(next);
            }
            for (j, c) in row.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    acc += &t_powers[j].scale_shift(c, 0, 0);
                }
            }
            pending_gap = 1;
        }
        if !acc.is_zero() && pending_gap > 1 {
            acc = &acc * &s_val.pow(pending_gap - 1);
        }
        acc
    }

    pub fn eval(&self, s0: &BigInt, t0: &BigInt) -> BigInt {
        let rows = self.coefficients_in_s();
        rows.iter()
            .rev()
            .fold(BigInt::zero(), |acc, row| acc * s0 + row.eval(t0))
    }
}

impl fmt::Display for BiPoly {
    /// Canonical text: `s^4 + 4*s^2*t + 2*t^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (n, ((i, j), c)) in self.terms().enumerate() {
            let mag = c.abs();
            match (n == 0, c.is_negative()) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            let mut parts = Vec::with_capacity(3);
            if !mag.is_one() || (i == 0 && j == 0) {
                parts.push(mag.to_string());
            }
            for (var, e) in [("s", i), ("t", j)] {
                match e {
                    0 => {}
                    1 => parts.push(var.to_string()),
                    _ => parts.push(format!("{var}^{e}")),
                }
            }
            f.write_str(&parts.join("*"))?;
        }
        Ok(())
    }
}

impl AddAssign<&BiPoly> for BiPoly {
    fn add_assign(&mut self, rhs: &BiPoly) {
        for (&e, c) in &rhs.terms {
            self.add_term(e, c.clone());
        }
    }
}

impl SubAssign<&BiPoly> for BiPoly {
    fn sub_assign(&mut self, rhs: &BiPoly) {
        for (&e, c) in &rhs.terms {
            self.add_term(e, -c);
        }
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        BiPoly {
            terms: self.terms.iter().map(|(&e, c)| (e, -c)).collect(),
        }
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        let (small, large) = if self.len() <= rhs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = BiPoly::zero();
        for (&(i, j), a) in &small.terms {
            for (&(k, l), b) in &large.terms {
                out.add_term((i + k, j + l), a * b);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for BiPoly {
            type Output = BiPoly;
            fn $m(self, rhs: BiPoly) -> BiPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp(terms: &[(u32, u32, i64)]) -> BiPoly {
        BiPoly::from_terms(terms.iter().copied())
    }

    #[test]
    fn ring_examples() {
        let s = BiPoly::s();
        assert_eq!(&s * &s, bp(&[(2, 0, 1)]));
        let f = bp(&[(2, 0, 1), (0, 1, 1)]);
        assert_eq!(&f * &BiPoly::one(), f);
        let g = bp(&[(2, 0, 1), (0, 1, 2)]);
        // schoolbook: (s^2 + t)(s^2 + 2t) = s^4 + 2s^2 t + s^2 t + 2t^2
        assert_eq!(&f * &g, bp(&[(4, 0, 1), (2, 1, 3), (0, 2, 2)]));
        assert_eq!(&f - &f, BiPoly::zero());
        assert_eq!(-&f + f.clone(), BiPoly::zero());
    }

    #[test]
    fn exact_division_examples() {
        let f = bp(&[(3, 0, 1), (1, 1, 2)]);
        assert_eq!(f.exact_div_in_s(&BiPoly::s()).unwrap(), bp(&[(2, 0, 1), (0, 1, 2)]));
        let f = bp(&[(4, 0, 1), (2, 1, 3), (0, 2, 2)]);
        let g = bp(&[(2, 0, 1), (0, 1, 1)]);
        let q = f.exact_div_in_s(&g).unwrap();
        assert_eq!(q, bp(&[(2, 0, 1), (0, 1, 2)]));
        assert_eq!(&q * &g, f);
        assert_eq!(g.exact_div_in_s(&BiPoly::s()), Err(Error::InexactDivision));
        assert!(matches!(
            f.exact_div_in_s(&bp(&[(2, 0, 2)])),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            f.exact_div_in_s(&bp(&[(2, 1, 1), (0, 0, 1)])),
            Err(Error::Precondition(_))
        ));
        assert_eq!(BiPoly::t().exact_div_in_s(&BiPoly::one()).unwrap(), BiPoly::t());
        assert_eq!(
            BiPoly::t().exact_div_in_s(&bp(&[(1, 0, 1), (0, 0, 5)])),
            Err(Error::InexactDivision)
        );
    }

    #[test]
    fn substitution_examples() {
        let s2_2t = bp(&[(2, 0, 1), (0, 1, 2)]);
        let minus_t2 = bp(&[(0, 2, -1)]);
        assert_eq!(BiPoly::s().substitute(&s2_2t, &BiPoly::t()), s2_2t);
        let p3 = bp(&[(2, 0, 1), (0, 1, 1)]);
        assert_eq!(p3.substitute(&BiPoly::s(), &BiPoly::zero()), bp(&[(2, 0, 1)]));
        // (s^2+2t)^2 - t^2 = s^4 + 4 s^2 t + 3 t^2 = (s^2+t)(s^2+3t)
        let expanded = &(&s2_2t * &s2_2t) + &minus_t2;
        assert_eq!(p3.substitute(&s2_2t, &minus_t2), expanded);
        assert_eq!(expanded, &p3 * &bp(&[(2, 0, 1), (0, 1, 3)]));
        assert_eq!(BiPoly::constant(7).substitute(&s2_2t, &minus_t2), BiPoly::constant(7));
        let s3 = bp(&[(3, 0, 2), (0, 0, 1)]);
        assert_eq!(s3.substitute(&BiPoly::t(), &BiPoly::s()), bp(&[(0, 3, 2), (0, 0, 1)]));
    }

    #[test]
    fn evaluation_examples() {
        let one = BigInt::one();
        assert_eq!(bp(&[(2, 0, 1), (0, 1, 1)]).eval(&one, &one), BigInt::from(2));
        assert_eq!(BiPoly::zero().eval(&BigInt::from(9), &one), BigInt::zero());
        assert_eq!(bp(&[(2, 0, 1), (0, 1, 3)]).eval(&one, &one), BigInt::from(4));
        assert_eq!(
            bp(&[(3, 2, 1), (0, 0, -4)]).eval(&BigInt::from(2), &BigInt::from(-3)),
            BigInt::from(68)
        );
    }

    #[test]
    fn weighted_degree_examples() {
        assert!(bp(&[(2, 0, 1), (0, 1, 3)]).is_weighted_homogeneous(2));
        assert!(!bp(&[(2, 0, 1), (0, 1, 3)]).is_weighted_homogeneous(3));
        assert!(bp(&[(4, 0, 1), (2, 1, 4), (0, 2, 2)]).is_weighted_homogeneous(4));
        assert!(!bp(&[(4, 0, 1), (1, 1, 4)]).is_weighted_homogeneous(4));
    }

    #[test]
    fn canonical_text() {
        assert_eq!(bp(&[(4, 0, 1), (2, 1, 4), (0, 2, 2)]).to_string(), "s^4 + 4*s^2*t + 2*t^2");
        assert_eq!(bp(&[(2, 0, 1), (0, 1, 3)]).to_string(), "s^2 + 3*t");
        assert_eq!(BiPoly::one().to_string(), "1");
        assert_eq!(BiPoly::zero().to_string(), "0");
        assert_eq!(bp(&[(1, 0, -1), (0, 0, -1)]).to_string(), "-s - 1");
        assert_eq!(bp(&[(1, 1, 1), (0, 3, -2), (0, 0, 5)]).to_string(), "s*t - 2*t^3 + 5");
    }
}
