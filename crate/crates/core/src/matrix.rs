//! Dense complex matrices and measurement matrices with unit-norm columns.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Column norm below which a column is treated as zero.
pub const ZERO_COLUMN_TOL: f64 = 1e-14;
/// Allowed deviation of a measurement-matrix column norm from one.
pub const UNIT_NORM_TOL: f64 = 1e-10;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape(format!("{rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidShape(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a function of `(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_row_major(rows, cols, data)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |i, j| if i == j { Complex::new(T::one(), T::zero()) } else { Complex::new(T::zero(), T::zero()) })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.cols + col]
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn row(&self, row: usize) -> &[Complex<T>] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self.get(i, col)).collect()
    }

    /// Columns as contiguous vectors; convenient for inner-product heavy code.
    pub fn columns(&self) -> Vec<Vec<Complex<T>>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    /// Matrix keeping only the listed columns, in the listed order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.cols) {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: bad + 1,
            });
        }
        Self::from_fn(self.rows, cols.len(), |i, j| self.get(i, cols[j]))
    }

    /// Left multiplication `U * self`.
    pub fn left_mul(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        if u.cols != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: u.cols,
            });
        }
        Self::from_fn(u.rows, self.cols, |i, j| {
            (0..self.rows).map(|t| u.get(i, t) * self.get(t, j)).fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
        })
    }

    /// `self * x` for a vector of length `cols`.
    pub fn apply(&self, x: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }
}

/// Euclidean norm of every column.
pub fn column_norms<T: Real>(m: &ComplexMatrix<T>) -> Vec<T> {
    let mut acc = vec![T::zero(); m.cols];
    for i in 0..m.rows {
        for (a, z) in acc.iter_mut().zip(m.row(i)) {
            *a += z.norm_sqr();
        }
    }
    acc.into_iter().map(|s| s.sqrt()).collect()
}

/// Scales every column to unit Euclidean norm.
pub fn normalize_columns<T: Real>(m: &ComplexMatrix<T>) -> Result<MeasurementMatrix<T>> {
    let norms = column_norms(m);
    if let Some(j) = norms.iter().position(|n| n.as_f64() < ZERO_COLUMN_TOL) {
        return Err(Error::ZeroColumn(j));
    }
    let data = m
        .data
        .iter()
        .enumerate()
        .map(|(idx, z)| z.unscale(norms[idx % m.cols]))
        .collect();
    MeasurementMatrix::new(ComplexMatrix::from_row_major(m.rows, m.cols, data)?)
}

/// Partition of the columns into `q` contiguous blocks of `r` columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupPartition {
    q: usize,
    r: usize,
}

impl GroupPartition {
    pub fn new(p: usize, r: usize) -> Result<Self> {
        if r == 0 || p % r != 0 {
            return Err(Error::IndivisibleGroupSize { r, p });
        }
        Ok(Self { q: p / r, r })
    }

    pub fn group_count(&self) -> usize {
        self.q
    }

    pub fn group_size(&self) -> usize {
        self.r
    }

    /// Zero-based group of a zero-based column.
    pub fn group_of(&self, col: usize) -> usize {
        col / self.r
    }

    /// Zero-based column range of a zero-based group.
    pub fn columns_of(&self, group: usize) -> std::ops::Range<usize> {
        group * self.r..(group + 1) * self.r
    }
}

/// Measurement matrix: unit-norm columns plus an optional group partition.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix<T: Real> {
    matrix: ComplexMatrix<T>,
    groups: Option<GroupPartition>,
}

impl<T: Real> MeasurementMatrix<T> {
    /// Wraps a matrix whose columns are already unit norm.
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        // f32 matrices cannot reach 1e-10; scale the tolerance to the precision.
        let tol = UNIT_NORM_TOL.max(64.0 * T::epsilon().as_f64());
        for (j, norm) in column_norms(&matrix).into_iter().enumerate() {
            if (norm.as_f64() - 1.0).abs() > tol {
                return Err(Error::InvalidShape(format!(
                    "column {j} has norm {norm}, expected 1"
                )));
            }
        }
        Ok(Self { matrix, groups: None })
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn groups(&self) -> Option<&GroupPartition> {
        self.groups.as_ref()
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols
    }

    /// Attaches contiguous groups of `r` columns; entries are untouched.
    pub fn with_groups(mut self, r: usize) -> Result<Self> {
        self.groups = Some(GroupPartition::new(self.cols(), r)?);
        Ok(self)
    }

    pub fn without_groups(mut self) -> Self {
        self.groups = None;
        self
    }

    /// Same matrix with columns reordered so that new column `j` is old column `perm[j]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.cols()];
        for &c in perm {
            if c >= self.cols() || std::mem::replace(&mut seen[c], true) {
                return Err(Error::InvalidSpec("column order is not a permutation".into()));
            }
        }
        if perm.len() != self.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.cols(),
                got: perm.len(),
            });
        }
        Ok(Self {
            matrix: self.matrix.select_columns(perm)?,
            groups: self.groups,
        })
    }

    /// `A * x`.
    pub fn apply(&self, x: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.matrix.apply(x)
    }
}

/// `s = Aᴴ y`, so `s_j = Σ_t conj(A[t, j]) · y[t]`.
pub fn hermitian_apply<T: Real>(m: &MeasurementMatrix<T>, y: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let a = m.matrix();
    if y.len() != a.rows {
        return Err(Error::DimensionMismatch {
            expected: a.rows,
            got: y.len(),
        });
    }
    let mut s = vec![Complex::new(T::zero(), T::zero()); a.cols];
    for (t, yt) in y.iter().enumerate() {
        for (sj, atj) in s.iter_mut().zip(a.row(t)) {
            *sj += atj.conj() * yt;
        }
    }
    Ok(s)
}

/// Euclidean norm of a complex vector.
pub fn norm2<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn identity_and_zero_column_norms() {
        let i2 = ComplexMatrix::<f64>::identity(2).unwrap();
        assert_eq!(column_norms(&i2), vec![1.0, 1.0]);
        let z = ComplexMatrix::from_row_major(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(column_norms(&z), vec![1.0, 0.0]);
    }

    #[test]
    fn normalize_diag_and_345() {
        let d = ComplexMatrix::from_row_major(2, 2, vec![c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)]).unwrap();
        let n = normalize_columns(&d).unwrap();
        assert_eq!(n.matrix(), &ComplexMatrix::identity(2).unwrap());

        let v = ComplexMatrix::from_row_major(2, 1, vec![c(3.0, 0.0), c(4.0, 0.0)]).unwrap();
        let n = normalize_columns(&v).unwrap();
        assert!((n.matrix().get(0, 0) - c(0.6, 0.0)).norm() < 1e-15);
        assert!((n.matrix().get(1, 0) - c(0.8, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn normalize_rejects_zero_column() {
        let z = ComplexMatrix::from_row_major(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(normalize_columns(&z), Err(Error::ZeroColumn(1))));
    }

    #[test]
    fn hermitian_apply_identity_and_single_column() {
        let i3 = MeasurementMatrix::new(ComplexMatrix::<f64>::identity(3).unwrap()).unwrap();
        let y = [c(1.0, 0.0), c(0.0, 2.0), c(0.0, 0.0)];
        assert_eq!(hermitian_apply(&i3, &y).unwrap(), y.to_vec());

        let col = MeasurementMatrix::new(ComplexMatrix::from_row_major(2, 1, vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap()).unwrap();
        assert_eq!(hermitian_apply(&col, &[c(5.0, 0.0), c(7.0, 0.0)]).unwrap(), vec![c(7.0, 0.0)]);
        assert!(matches!(
            hermitian_apply(&col, &[c(1.0, 0.0)]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn hermitian_apply_conjugates_the_column() {
        let a = MeasurementMatrix::new(ComplexMatrix::from_row_major(1, 1, vec![c(0.0, 1.0)]).unwrap()).unwrap();
        assert_eq!(hermitian_apply(&a, &[c(1.0, 0.0)]).unwrap(), vec![c(0.0, -1.0)]);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(ComplexMatrix::<f64>::from_row_major(0, 1, vec![]).is_err());
        assert!(ComplexMatrix::<f64>::from_row_major(1, 2, vec![c(1.0, 0.0)]).is_err());
        assert!(ComplexMatrix::<f64>::from_row_major(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
        let not_unit = ComplexMatrix::from_row_major(1, 1, vec![c(2.0, 0.0)]).unwrap();
        assert!(MeasurementMatrix::new(not_unit).is_err());
    }

    #[test]
    fn partition_layout() {
        let g = GroupPartition::new(256, 8).unwrap();
        assert_eq!(g.group_count(), 32);
        assert_eq!(g.group_of(17), 2);
        assert_eq!(g.columns_of(2), 16..24);
        assert!(matches!(GroupPartition::new(256, 3), Err(Error::IndivisibleGroupSize { r: 3, p: 256 })));
    }

    #[test]
    fn works_in_single_precision() {
        let d = ComplexMatrix::<f32>::from_row_major(2, 1, vec![Complex::new(3.0, 0.0), Complex::new(0.0, 4.0)]).unwrap();
        let n = normalize_columns(&d).unwrap();
        let s = hermitian_apply(&n, &[Complex::new(3.0, 0.0), Complex::new(0.0, 4.0)]).unwrap();
        assert!((s[0].re - 5.0).abs() < 1e-6 && s[0].im.abs() < 1e-6);
    }
}
