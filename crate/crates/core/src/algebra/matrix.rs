//! Dense matrices over arbitrary-precision rationals.

use std::fmt;
use std::ops::Mul;

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigRational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RationalMatrix { rows, cols, data }
    }

    /// Integer entries, row-major.
    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Self::from_fn(rows, cols, |i, j| BigRational::from_integer(entries[i * cols + j].into()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let (int_rows, _) = self.integer_rows();
        bareiss(int_rows, self.cols).rank
    }

    pub fn determinant(&self) -> Result<BigRational> {
        if self.rows != self.cols {
            return Err(Error::BadQuery(format!(
                "determinant of a non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigRational::one());
        }
        let (int_rows, scale) = self.integer_rows();
        let e = bareiss(int_rows, n);
        if e.rank < n {
            return Ok(BigRational::zero());
        }
        let mut det = BigRational::new(e.last_pivot, scale);
        if e.negate {
            det = -det;
        }
        Ok(det)
    }

    /// Determinants of the leading principal submatrices, `1x1` first.
    pub fn leading_principal_minors(&self) -> Vec<BigRational> {
        (1..=self.rows.min(self.cols))
            .map(|k| {
                let idx: Vec<usize> = (0..k).collect();
                self.submatrix(&idx, &idx).determinant().expect("square")
            })
            .collect()
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Singular);
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&r| !a[(r, c)].is_zero()).ok_or(Error::Singular)?;
            if p != c {
                a.swap_rows(p, c);
                inv.swap_rows(p, c);
            }
            let piv = a[(c, c)].clone();
            for j in 0..n {
                a[(c, j)] = &a[(c, j)] / &piv;
                inv[(c, j)] = &inv[(c, j)] / &piv;
            }
            for r in 0..n {
                if r == c || a[(r, c)].is_zero() {
                    continue;
                }
                let f = a[(r, c)].clone();
                for j in 0..n {
                    let t = &f * &a[(c, j)];
                    a[(r, j)] -= t;
                    let t = &f * &inv[(c, j)];
                    inv[(r, j)] -= t;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Each row multiplied by the lcm of its denominators; returns the rows
    /// and the product of the multipliers.
    fn integer_rows(&self) -> (Vec<Vec<BigInt>>, BigInt) {
        let mut scale = BigInt::one();
        let rows = (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                scale *= &l;
                row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
            })
            .collect();
        (rows, scale)
    }
}

struct Echelon {
    rank: usize,
    negate: bool,
    last_pivot: BigInt,
}

/// Fraction-free (Bareiss) forward elimination with row pivoting and
/// column skipping. Every intermediate entry is a minor of the input, so
/// the divisions are exact.
fn bareiss(mut a: Vec<Vec<BigInt>>, cols: usize) -> Echelon {
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut negate = false;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            negate = !negate;
        }
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest.iter_mut() {
            for j in c + 1..cols {
                let num = &row[j] * &pivot_row[c] - &row[c] * &pivot_row[j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                row[j] = q;
            }
            row[c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    Echelon { rank: r, negate, last_pivot: prev }
}

impl std::ops::Index<(usize, usize)> for RationalMatrix {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &RationalMatrix {
    type Output = RationalMatrix;
    fn mul(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = RationalMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = &self[(i, k)];
                if x.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let t = x * &rhs[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// True iff every leading principal minor is positive.
pub fn is_positive_definite(m: &RationalMatrix) -> bool {
    m.is_symmetric() && m.leading_principal_minors().iter().all(|d| d.is_positive())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Plain rational row reduction, kept independent of the Bareiss path.
    fn naive_rank(m: &RationalMatrix) -> usize {
        let mut a: Vec<Vec<BigRational>> =
            (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)].clone()).collect()).collect();
        let mut r = 0;
        for c in 0..m.cols() {
            let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(p, r);
            for i in r + 1..a.len() {
                let f = &a[i][c] / &a[r][c];
                for j in c..m.cols() {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
            r += 1;
        }
        r
    }

    /// Leibniz expansion.
    fn naive_det(m: &RationalMatrix) -> BigRational {
        fn perms(n: usize) -> Vec<(Vec<usize>, bool)> {
            if n == 0 {
                return vec![(vec![], false)];
            }
            let mut out = Vec::new();
            for (p, s) in perms(n - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    let flips = (p.len() - pos) % 2 == 1;
                    out.push((q, s ^ flips));
                }
            }
            out
        }
        let n = m.rows();
        let mut sum = BigRational::zero();
        for (p, neg) in perms(n) {
            let mut t = BigRational::one();
            for i in 0..n {
                t *= &m[(i, p[i])];
            }
            if neg {
                sum -= t;
            } else {
                sum += t;
            }
        }
        sum
    }

    #[test]
    fn rank_examples() {
        assert_eq!(RationalMatrix::from_i64(2, 2, &[1, 2, 2, 4]).rank(), 1);
        assert_eq!(RationalMatrix::zeros(3, 4).rank(), 0);
        assert_eq!(RationalMatrix::identity(4).rank(), 4);
        assert_eq!(RationalMatrix::zeros(0, 0).rank(), 0);
        // first column zero forces a skipped pivot column
        let m = RationalMatrix::from_i64(3, 3, &[0, 1, 2, 0, 2, 4, 0, 3, 7]);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn determinant_with_fractions() {
        let m = RationalMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => q(1, 2),
            (0, 1) => q(1, 3),
            (1, 0) => q(1, 4),
            _ => q(1, 5),
        });
        assert_eq!(m.determinant().unwrap(), q(1, 10) - q(1, 12));
        let swap = RationalMatrix::from_i64(2, 2, &[0, 1, 1, 0]);
        assert_eq!(swap.determinant().unwrap(), q(-1, 1));
        assert!(RationalMatrix::zeros(2, 3).determinant().is_err());
    }

    #[test]
    fn inverse_two_by_two() {
        let m = RationalMatrix::from_i64(2, 2, &[3, 1, 1, 2]);
        let inv = m.inverse().unwrap();
        assert_eq!(inv[(0, 0)], q(2, 5));
        assert_eq!(inv[(0, 1)], q(-1, 5));
        assert_eq!(inv[(1, 1)], q(3, 5));
        assert_eq!(&m * &inv, RationalMatrix::identity(2));
        assert_eq!(RationalMatrix::from_i64(2, 2, &[1, 2, 2, 4]).inverse(), Err(Error::Singular));
    }

    fn small_matrix() -> impl Strategy<Value = RationalMatrix> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec((-4i64..5, 1i64..4), r * c).prop_map(move |v| {
                let mut it = v.into_iter();
                RationalMatrix::from_fn(r, c, |_, _| {
                    let (n, d) = it.next().unwrap();
                    // sparsify to hit rank-deficient cases
                    if n.abs() == 4 { q(0, 1) } else { q(n, d) }
                })
            })
        })
    }

    proptest! {
        #[test]
        fn bareiss_rank_matches_naive(m in small_matrix()) {
            prop_assert_eq!(m.rank(), naive_rank(&m));
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn bareiss_det_matches_leibniz(m in small_matrix()) {
            if m.rows() == m.cols() {
                prop_assert_eq!(m.determinant().unwrap(), naive_det(&m));
            }
        }
    }
}
