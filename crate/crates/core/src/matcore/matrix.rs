use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::UNITARY_TOL;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn identity(dim: usize) -> Self {
        ComplexMatrix(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix(DMatrix::from_element(dim, dim, ZERO))
    }

    /// Wraps an nalgebra matrix, rejecting non-square or non-finite input.
    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::invalid("matrix dimension must be positive"));
        }
        let out = ComplexMatrix(m);
        out.check_finite()?;
        Ok(out)
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
        }
        Self::from_dmatrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        ComplexMatrix(DMatrix::from_fn(dim, dim, f))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Entry at zero-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.0[(row, col)] = value;
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn mul(&self, rhs: &ComplexMatrix) -> Result<Self> {
        self.same_dim(rhs)?;
        Ok(ComplexMatrix(&self.0 * &rhs.0))
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        let n = self.dim();
        Ok((0..n)
            .map(|i| (0..n).fold(ZERO, |acc, j| acc + self.0[(i, j)] * v[j]))
            .collect())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }

    /// max |(M^dag M - I)_jk|
    pub fn unitarity_residual(&self) -> f64 {
        let prod = self.0.adjoint() * &self.0;
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((prod[(i, j)] - target).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_residual() < UNITARY_TOL
    }

    pub fn ensure_unitary(&self) -> Result<()> {
        self.check_finite()?;
        let residual = self.unitarity_residual();
        if residual < UNITARY_TOL {
            Ok(())
        } else {
            Err(Error::NotUnitary { residual })
        }
    }

    /// Largest imaginary magnitude over all entries.
    pub fn max_imag(&self) -> f64 {
        self.0.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> Result<f64> {
        self.same_dim(other)?;
        Ok(self
            .0
            .iter()
            .zip(other.0.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm())))
    }

    pub(crate) fn same_dim(&self, other: &ComplexMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// Right-multiplies in place by the two-level matrix `u` acting on
    /// zero-based coordinates `p`, `q`.
    pub fn mul_two_level_right(&mut self, u: &[[Complex64; 2]; 2], p: usize, q: usize) {
        for i in 0..self.dim() {
            let a = self.0[(i, p)];
            let b = self.0[(i, q)];
            self.0[(i, p)] = a * u[0][0] + b * u[1][0];
            self.0[(i, q)] = a * u[0][1] + b * u[1][1];
        }
    }

    /// Block-diagonal embedding `diag(self, I)` of dimension `dim`.
    pub fn embed(&self, dim: usize) -> Result<Self> {
        if dim < self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: dim,
            });
        }
        let n = self.dim();
        Ok(Self::from_fn(dim, |i, j| {
            if i < n && j < n {
                self.0[(i, j)]
            } else if i == j {
                ONE
            } else {
                ZERO
            }
        }))
    }
}

impl From<ComplexMatrix> for DMatrix<Complex64> {
    fn from(m: ComplexMatrix) -> Self {
        m.0
    }
}
