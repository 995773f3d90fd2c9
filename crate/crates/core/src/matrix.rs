//! Dense matrices over exact rationals.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{format_q, Q};

/// Row-major dense matrix of rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Q::one();
        }
        m
    }

    /// Builds a matrix from row vectors. Panics if rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Q>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        Self { rows, cols, data }
    }

    pub fn column(values: Vec<Q>) -> Self {
        let n = values.len();
        Self::from_vec(n, 1, values)
    }

    pub fn row(values: Vec<Q>) -> Self {
        let n = values.len();
        Self::from_vec(1, n, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &Q {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Q) {
        self.data[r * self.cols + c] = value;
    }

    pub fn entry_mut(&mut self, r: usize, c: usize) -> &mut Q {
        &mut self.data[r * self.cols + c]
    }

    pub fn data(&self) -> &[Q] {
        &self.data
    }

    pub fn row_slice(&self, r: usize) -> &[Q] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column_vec(&self, c: usize) -> Vec<Q> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn column_sums(&self) -> Vec<Q> {
        let mut sums = vec![Q::zero(); self.cols];
        for r in 0..self.rows {
            for (c, s) in sums.iter_mut().enumerate() {
                let v = self.get(r, c);
                if !v.is_zero() {
                    *s += v;
                }
            }
        }
        sums
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Matrix product `self * rhs`. Zero entries of `self` are skipped.
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    *out.entry_mut(i, j) += a * b;
                }
            }
        }
        out
    }

    /// Kronecker product, leftmost factor most significant.
    pub fn kron(&self, rhs: &Matrix) -> Matrix {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut out = Matrix::zeros(rows, cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.get(i1, j1);
                if a.is_zero() {
                    continue;
                }
                for i2 in 0..rhs.rows {
                    for j2 in 0..rhs.cols {
                        let b = rhs.get(i2, j2);
                        if b.is_zero() {
                            continue;
                        }
                        out.set(i1 * rhs.rows + i2, j1 * rhs.cols + j2, a * b);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in add");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in sub");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn add_assign(&mut self, rhs: &Matrix) {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in add");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            if !b.is_zero() {
                *a += b;
            }
        }
    }

    pub fn scale(&self, factor: &Q) -> Matrix {
        let data = self.data.iter().map(|a| a * factor).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    /// Largest column ℓ1 norm.
    pub fn max_column_l1(&self) -> Q {
        (0..self.cols)
            .map(|c| (0..self.rows).fold(Q::zero(), |acc, r| acc + self.get(r, c).abs()))
            .max()
            .unwrap_or_else(Q::zero)
    }

    /// If `self == factor * other` for a scalar, returns that scalar.
    pub fn proportionality_to(&self, other: &Matrix) -> Option<Q> {
        if self.shape() != other.shape() {
            return None;
        }
        let mut factor: Option<Q> = None;
        for (a, b) in self.data.iter().zip(&other.data) {
            if b.is_zero() {
                if !a.is_zero() {
                    return None;
                }
                continue;
            }
            let ratio = a / b;
            match &factor {
                None => factor = Some(ratio),
                Some(f) if *f == ratio => {}
                Some(_) => return None,
            }
        }
        Some(factor.unwrap_or_else(Q::zero))
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}", self.rows, self.cols)?;
        write!(f, "{}", self)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", format_q(self.get(r, c)))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| qi(v)).collect()).collect())
    }

    #[test]
    fn product_and_kron() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let b = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.mul(&b), m(&[&[2, 1], &[4, 3]]));
        let k = Matrix::identity(2).kron(&b);
        assert_eq!(k.get(1, 0), &qi(1));
        assert_eq!(k.get(3, 2), &qi(1));
        assert_eq!(k.get(0, 0), &qi(0));
    }

    #[test]
    fn proportionality() {
        let a = m(&[&[2, 0], &[0, 2]]);
        assert_eq!(a.proportionality_to(&Matrix::identity(2)), Some(qi(2)));
        let b = m(&[&[1, 0], &[0, 0]]);
        assert_eq!(b.proportionality_to(&Matrix::identity(2)), None);
        assert_eq!(Matrix::zeros(2, 2).proportionality_to(&Matrix::identity(2)), Some(qi(0)));
    }

    #[test]
    fn column_norm() {
        let d = Matrix::from_rows(vec![vec![q(1, 2), q(-1, 3)], vec![q(-1, 2), qi(1)]]);
        assert_eq!(d.max_column_l1(), q(4, 3));
    }
}
