use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::rounding::{add_up, backend};
use super::{Interval, IntervalError, IntervalVector};

/// Rectangular grid of intervals, stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Interval>,
}

impl IntervalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntervalMatrix {
            rows,
            cols,
            data: vec![Interval::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Interval::ONE;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Interval>>) -> Result<Self, IntervalError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(IntervalError::DimensionMismatch(row.len(), c));
            }
            data.extend(row);
        }
        Ok(IntervalMatrix {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_point(m: &DMatrix<f64>) -> Self {
        let mut out = Self::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out[(i, j)] = Interval::point(m[(i, j)]);
            }
        }
        out
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[IntervalVector]) -> Self {
        let rows = cols.first().map_or(0, |c| c.len());
        let mut out = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for i in 0..rows {
                out[(i, j)] = col[i];
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Interval] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> IntervalVector {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(Interval::is_finite)
    }

    pub fn mid(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].mid())
    }

    pub fn max_diam(&self) -> f64 {
        self.data.iter().map(Interval::diam).fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn mul(&self, rhs: &IntervalMatrix) -> IntervalMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Interval::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs[(k, j)];
                    if b != Interval::ZERO {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_point(&self, rhs: &DMatrix<f64>) -> IntervalMatrix {
        self.mul(&IntervalMatrix::from_point(rhs))
    }

    pub fn mul_vec(&self, v: &[Interval]) -> IntervalVector {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Interval::ZERO, |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    pub fn add(&self, rhs: &IntervalMatrix) -> IntervalMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        IntervalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &IntervalMatrix) -> IntervalMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        IntervalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }

    pub fn scale(&self, c: Interval) -> IntervalMatrix {
        IntervalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| *a * c).collect(),
        }
    }

    pub fn hull(&self, rhs: &IntervalMatrix) -> IntervalMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        IntervalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.hull(b))
                .collect(),
        }
    }

    pub fn subset(&self, rhs: &IntervalMatrix) -> bool {
        (self.rows, self.cols) == (rhs.rows, rhs.cols)
            && self.data.iter().zip(&rhs.data).all(|(a, b)| a.subset(b))
    }

    pub fn overlaps(&self, rhs: &IntervalMatrix) -> bool {
        (self.rows, self.cols) == (rhs.rows, rhs.cols)
            && self.data.iter().zip(&rhs.data).all(|(a, b)| a.overlaps(b))
    }

    pub fn contains_point(&self, m: &DMatrix<f64>) -> bool {
        (self.rows, self.cols) == (m.nrows(), m.ncols())
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self[(i, j)].contains(m[(i, j)])))
    }

    /// Upper bound of the max-row-sum norm.
    pub fn norm_inf(&self) -> f64 {
        let mode = backend();
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .fold(0.0, |acc, a| add_up(acc, a.mag(), mode))
            })
            .fold(0.0, f64::max)
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.data
    }
}

impl std::ops::Index<(usize, usize)> for IntervalMatrix {
    type Output = Interval;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Interval {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntervalMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Interval {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntervalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntervalMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Encloses `{A0^-1 b0 : A0 in a, b0 in b}`.
///
/// The system is preconditioned with an approximate inverse of `mid(a)` and
/// solved by interval Gaussian elimination with partial pivoting on midpoint
/// magnitudes. Success certifies that every matrix in `a` is regular.
pub fn solve_linear(
    a: &IntervalMatrix,
    b: &IntervalVector,
) -> Result<IntervalVector, IntervalError> {
    let n = a.rows();
    if !a.is_square() {
        return Err(IntervalError::DimensionMismatch(a.rows(), a.cols()));
    }
    if b.len() != n {
        return Err(IntervalError::DimensionMismatch(n, b.len()));
    }
    let precond = a
        .mid()
        .try_inverse()
        .ok_or(IntervalError::SingularEnclosure)?;
    let pc = IntervalMatrix::from_point(&precond);
    let mut m = pc.mul(a);
    let mut rhs = pc.mul_vec(b);

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| {
                m[(i, col)]
                    .mid()
                    .abs()
                    .partial_cmp(&m[(j, col)].mid().abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if m[(pivot_row, col)].contains_zero() {
            return Err(IntervalError::SingularEnclosure);
        }
        if pivot_row != col {
            for j in 0..n {
                let t = m[(col, j)];
                m[(col, j)] = m[(pivot_row, j)];
                m[(pivot_row, j)] = t;
            }
            rhs.swap(col, pivot_row);
        }
        let pivot = m[(col, col)];
        for i in col + 1..n {
            let factor = m[(i, col)].checked_div(&pivot)?;
            m[(i, col)] = Interval::ZERO;
            for j in col + 1..n {
                let t = m[(i, j)] - factor * m[(col, j)];
                m[(i, j)] = t;
            }
            let t = rhs[i] - factor * rhs[col];
            rhs[i] = t;
        }
    }

    let mut x = IntervalVector::zeros(n);
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for j in i + 1..n {
            acc -= m[(i, j)] * x[j];
        }
        x[i] = acc.checked_div(&m[(i, i)])?;
    }
    if !x.is_finite() {
        return Err(IntervalError::SingularEnclosure);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn identity_system() {
        let a = IntervalMatrix::identity(2);
        let b = IntervalVector::from_points(&[1.0, 2.0]);
        let x = solve_linear(&a, &b).unwrap();
        assert!(x[0].contains(1.0) && x[1].contains(2.0));
        assert!(x.max_diam() < 1e-14);
    }

    #[test]
    fn diagonal_system() {
        let a = IntervalMatrix::from_rows(vec![
            vec![iv(2.0, 2.0), Interval::ZERO],
            vec![Interval::ZERO, iv(4.0, 4.0)],
        ])
        .unwrap();
        let b = IntervalVector::from_points(&[1.0, 2.0]);
        let x = solve_linear(&a, &b).unwrap();
        assert!(x[0].contains(0.5) && x[1].contains(0.5));
        assert!(x.max_diam() < 1e-14);
    }

    #[test]
    fn singular_enclosure_is_reported() {
        let a = IntervalMatrix::from_rows(vec![
            vec![iv(1.0, 1.0), iv(1.0, 1.0)],
            vec![iv(1.0, 1.0), iv(0.9, 1.1)],
        ])
        .unwrap();
        let b = IntervalVector::from_points(&[1.0, 2.0]);
        assert_eq!(solve_linear(&a, &b), Err(IntervalError::SingularEnclosure));
    }

    #[test]
    fn product_and_norm() {
        let a = IntervalMatrix::from_rows(vec![vec![iv(1.0, 2.0), iv(-1.0, 0.0)]]).unwrap();
        let b = IntervalMatrix::from_rows(vec![vec![iv(1.0, 1.0)], vec![iv(2.0, 2.0)]]).unwrap();
        let p = a.mul(&b);
        assert!(
            p[(0, 0)].subset(&iv(-1.0 - 1e-14, 2.0 + 1e-14)),
            "{:?}",
            p[(0, 0)]
        );
        assert!(p[(0, 0)].contains(-1.0) && p[(0, 0)].contains(2.0));
        assert!(a.norm_inf() >= 3.0);
    }
}
