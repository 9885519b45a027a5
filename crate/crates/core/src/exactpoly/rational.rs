use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Dense matrix of exact rationals, row-major.
///
/// `BigRational` normalizes after every operation, so entries are always in
/// lowest terms with a positive denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigRational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::precondition(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(RatMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::precondition("ragged rows"));
        }
        let n = rows.len();
        RatMatrix::new(n, cols, rows.into_iter().flatten().collect())
    }

    pub fn from_integer_rows(rows: &[Vec<i64>]) -> Result<Self> {
        RatMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[BigRational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[BigRational]) -> Vec<BigRational> {
        (0..self.rows)
            .map(|r| dot(self.row(r), x))
            .collect()
    }
}

pub(crate) fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

/// Verdict of exact Gaussian elimination on `A x = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearSolution {
    Unique(Vec<BigRational>),
    /// One particular solution (free variables set to zero), the dimension of
    /// the solution space, and a basis of the kernel of `A`.
    Underdetermined {
        solution: Vec<BigRational>,
        dimension: usize,
        kernel: Vec<Vec<BigRational>>,
    },
    /// `certificate` is a row vector `y` with `y A = 0` and `y b != 0`.
    Inconsistent { certificate: Vec<BigRational> },
}

impl LinearSolution {
    pub fn is_consistent(&self) -> bool {
        !matches!(self, LinearSolution::Inconsistent { .. })
    }

    pub fn solution(&self) -> Option<&[BigRational]> {
        match self {
            LinearSolution::Unique(x) => Some(x),
            LinearSolution::Underdetermined { solution, .. } => Some(solution),
            LinearSolution::Inconsistent { .. } => None,
        }
    }

    pub fn dimension(&self) -> Option<usize> {
        match self {
            LinearSolution::Unique(_) => Some(0),
            LinearSolution::Underdetermined { dimension, .. } => Some(*dimension),
            LinearSolution::Inconsistent { .. } => None,
        }
    }
}

/// Solves `a x = b` exactly by Gauss-Jordan elimination.
///
/// Each row is augmented with `b` and an identity block that records which
/// combination of original rows produced it, so an inconsistent row yields
/// its certificate directly.
pub fn solve_rational(a: &RatMatrix, b: &[BigRational]) -> Result<LinearSolution> {
    if a.rows == 0 {
        return Err(Error::precondition("system has no equations"));
    }
    if b.len() != a.rows {
        return Err(Error::precondition(format!(
            "right-hand side has {} entries for {} equations",
            b.len(),
            a.rows
        )));
    }
    let (m, n) = (a.rows, a.cols);
    let width = n + 1 + m;
    let mut rows: Vec<Vec<BigRational>> = (0..m)
        .map(|r| {
            let mut row = Vec::with_capacity(width);
            row.extend_from_slice(a.row(r));
            row.push(b[r].clone());
            row.extend((0..m).map(|k| if k == r { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();

    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(pr) = (rank..m).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pr);
        let inv = rows[rank][col].recip();
        for x in rows[rank].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }

    if let Some(bad) = rows[rank..].iter().find(|r| !r[n].is_zero()) {
        return Ok(LinearSolution::Inconsistent {
            certificate: bad[n + 1..].to_vec(),
        });
    }

    let mut solution = vec![BigRational::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        solution[c] = rows[r][n].clone();
    }
    if rank == n {
        return Ok(LinearSolution::Unique(solution));
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let kernel = free
        .iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); n];
            v[f] = BigRational::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -rows[r][f].clone();
            }
            v
        })
        .collect();
    Ok(LinearSolution::Underdetermined {
        solution,
        dimension: free.len(),
        kernel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn unique_solution() {
        let a = RatMatrix::from_integer_rows(&[vec![1]]).unwrap();
        assert_eq!(solve_rational(&a, &ints(&[2])).unwrap(), LinearSolution::Unique(ints(&[2])));
        let a = RatMatrix::from_integer_rows(&[vec![2, 1], vec![1, 3]]).unwrap();
        let sol = solve_rational(&a, &ints(&[3, 5])).unwrap();
        let x = sol.solution().unwrap();
        assert_eq!(a.mul_vec(x), ints(&[3, 5]));
        assert_eq!(x[0], BigRational::new(4.into(), 5.into()));
    }

    #[test]
    fn inconsistent_with_certificate() {
        let a = RatMatrix::from_integer_rows(&[vec![1], vec![1]]).unwrap();
        let b = ints(&[1, 2]);
        let LinearSolution::Inconsistent { certificate } = solve_rational(&a, &b).unwrap() else {
            panic!("expected inconsistency");
        };
        assert!(dot(&certificate, &[int(1), int(1)]).is_zero());
        assert!(!dot(&certificate, &b).is_zero());
    }

    #[test]
    fn underdetermined_dimension() {
        let a = RatMatrix::from_integer_rows(&[vec![1, 1], vec![2, 2]]).unwrap();
        let sol = solve_rational(&a, &ints(&[3, 6])).unwrap();
        assert_eq!(sol.dimension(), Some(1));
        let LinearSolution::Underdetermined { solution, kernel, .. } = sol else {
            panic!("expected underdetermined");
        };
        assert_eq!(a.mul_vec(&solution), ints(&[3, 6]));
        assert_eq!(a.mul_vec(&kernel[0]), ints(&[0, 0]));
    }

    #[test]
    fn dimension_mismatch() {
        let a = RatMatrix::from_integer_rows(&[vec![1, 2]]).unwrap();
        assert!(matches!(solve_rational(&a, &ints(&[1, 2])), Err(Error::Precondition(_))));
        assert!(RatMatrix::new(2, 2, ints(&[1, 2, 3])).is_err());
        assert!(RatMatrix::from_integer_rows(&[vec![1, 2], vec![1]]).is_err());
        let empty = RatMatrix::new(0, 2, Vec::new()).unwrap();
        assert!(solve_rational(&empty, &[]).is_err());
    }
}
