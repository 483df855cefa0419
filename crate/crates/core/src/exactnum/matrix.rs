use std::fmt::Debug;
use std::ops::{Index, IndexMut};

use num_traits::{One, Zero};

use super::{Poly, RationalFunc, Rational};
use crate::error::{Error, Result};

/// Exact field operations shared by rationals and rational functions.
pub trait Field: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// `rhs` must be nonzero.
    fn div(&self, rhs: &Self) -> Self;
}

impl Field for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
}

impl Field for RationalFunc {
    fn zero() -> Self {
        RationalFunc::zero()
    }
    fn one() -> Self {
        RationalFunc::one()
    }
    fn is_zero(&self) -> bool {
        RationalFunc::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RatMatrix = Matrix<RationalFunc>;
pub type QMatrix = Matrix<Rational>;

impl<T: Field> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(T::zero(), |acc, (a, b)| acc.add(&a.mul(b)))
            })
            .collect()
    }

    pub fn mul(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Matrix::<T>::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].add(&a.mul(b));
                    }
                }
            }
        }
        out
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Gaussian elimination over any exact field, several right-hand sides.
pub fn solve_field<T: Field>(a: &Matrix<T>, rhs: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let n = a.rows;
    assert_eq!(n, a.cols, "square system expected");
    let k = rhs.len();
    let mut m: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.extend(rhs.iter().map(|b| b[i].clone()));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero()).ok_or(Error::SingularMatrix)?;
        m.swap(col, piv);
        let inv = T::one().div(&m[col][col]);
        for j in col..n + k {
            m[col][j] = m[col][j].mul(&inv);
        }
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for j in col..n + k {
                if !pivot_row[j].is_zero() {
                    row[j] = row[j].sub(&f.mul(&pivot_row[j]));
                }
            }
        }
    }
    Ok((0..k).map(|c| (0..n).map(|i| m[i][n + c].clone()).collect()).collect())
}

/// Exact rational solve of `A x = b`.
pub fn solve_rational(a: &QMatrix, b: &[Rational]) -> Result<Vec<Rational>> {
    Ok(solve_field(a, &[b.to_vec()])?.pop().unwrap())
}

/// Solves `A x = b` over Q(n) with fraction-free elimination on the
/// polynomial matrix obtained by clearing row denominators.
pub fn solve_linear(a: &RatMatrix, b: &[RationalFunc]) -> Result<Vec<RationalFunc>> {
    let n = a.rows;
    assert_eq!(n, a.cols, "square system expected");
    assert_eq!(b.len(), n);
    let mut m: Vec<Vec<Poly>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut l = Poly::one();
        for f in a.row(i).iter().chain(std::iter::once(&b[i])) {
            if f.den().degree() > 0 {
                l = Poly::lcm(&l, f.den());
            }
        }
        let row = a
            .row(i)
            .iter()
            .chain(std::iter::once(&b[i]))
            .map(|f| {
                if f.is_zero() {
                    Poly::zero()
                } else {
                    f.num() * &l.exact_div(f.den()).expect("lcm divisible")
                }
            })
            .collect();
        m.push(row);
    }
    let mut prev = Poly::one();
    for k in 0..n {
        let piv = (k..n)
            .filter(|&r| !m[r][k].is_zero())
            .min_by_key(|&r| (m[r][k].degree(), m[r][k].term_count()))
            .ok_or(Error::SingularMatrix)?;
        m.swap(k, piv);
        for i in k + 1..n {
            for j in k + 1..=n {
                let t = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = t.exact_div(&prev).expect("Bareiss division is exact");
            }
            m[i][k] = Poly::zero();
        }
        prev = m[k][k].clone();
    }
    // Fraction-free back substitution: y = det * x stays polynomial.
    let det = m[n - 1][n - 1].clone();
    let mut y = vec![Poly::zero(); n];
    for i in (0..n).rev() {
        let mut acc = &det * &m[i][n];
        for j in i + 1..n {
            if !m[i][j].is_zero() && !y[j].is_zero() {
                acc = &acc - &(&m[i][j] * &y[j]);
            }
        }
        y[i] = acc.exact_div(&m[i][i]).expect("fraction-free back substitution is exact");
    }
    Ok(y.into_iter().map(|v| RationalFunc::new(v, det.clone())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, rat_int};

    #[test]
    fn identity_solve() {
        let a = RatMatrix::identity(1);
        let x = solve_linear(&a, &[RationalFunc::n()]).unwrap();
        assert_eq!(x, vec![RationalFunc::n()]);
    }

    #[test]
    fn complete_graph_system() {
        let p = RationalFunc::new(Poly::linear_root(2), Poly::linear_root(1));
        let a = RatMatrix::from_rows(vec![vec![&RationalFunc::one() - &p]]);
        let x = solve_linear(&a, &[RationalFunc::one()]).unwrap();
        assert_eq!(x[0], RationalFunc::from(Poly::linear_root(1)));
    }

    #[test]
    fn singular_detected() {
        let a = RatMatrix::from_rows(vec![
            vec![RationalFunc::n(), RationalFunc::one()],
            vec![&RationalFunc::n() * &RationalFunc::n(), RationalFunc::n()],
        ]);
        assert!(matches!(solve_linear(&a, &[RationalFunc::one(), RationalFunc::zero()]), Err(Error::SingularMatrix)));
    }

    #[test]
    fn rational_solve() {
        let a = QMatrix::from_rows(vec![vec![rat_int(2), rat_int(1)], vec![rat_int(1), rat_int(3)]]);
        let x = solve_rational(&a, &[rat_int(1), rat_int(2)]).unwrap();
        assert_eq!(x, vec![rat(1, 5), rat(3, 5)]);
    }
}
