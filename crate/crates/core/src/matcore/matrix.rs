use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense real symmetric matrix.
///
/// Entries are symmetrized as `(M + Mᵀ)/2` on construction, so
/// `get(i, j) == get(j, i)` holds bit-for-bit. All entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Symmetrizes and validates a square matrix.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidDimension(format!(
                "matrix is {}x{}, expected square",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidDimension("dimension must be at least 1".into()));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self::symmetrized(m))
    }

    /// Builds from `dim * dim` row-major entries.
    pub fn from_row_major(dim: usize, data: &[f64]) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::InvalidDimension(format!(
                "expected {} entries for dim {dim}, got {}",
                dim * dim,
                data.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, data))
    }

    /// Builds from row vectors.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidDimension("rows must all have length dim".into()));
        }
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::from_row_major(dim, &flat)
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self(DMatrix::zeros(dim, dim))
    }

    /// Matrix with every entry equal to `value`.
    pub fn filled(dim: usize, value: f64) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        assert!(value.is_finite());
        Self(DMatrix::from_element(dim, dim, value))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidDimension("dimension must be at least 1".into()));
        }
        if diag.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = diag.len();
        Ok(Self(DMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 })))
    }

    /// Symmetrizes without validation. Callers guarantee a square, non-empty input.
    pub(crate) fn symmetrized(m: DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut out = m;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (out[(i, j)] + out[(j, i)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        Self(out)
    }

    /// Symmetrizes a product chain result, failing if it overflowed.
    pub(crate) fn from_product(m: DMatrix<f64>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self::symmetrized(m))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    #[inline]
    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)]).collect()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(&self.0 * factor)
    }

    /// `self · inner · self`, symmetrized.
    pub fn sandwich(&self, inner: &SymMatrix) -> Result<Self> {
        self.check_dim(inner)?;
        Self::from_product(&self.0 * &inner.0 * &self.0)
    }

    /// `Qᵀ · self · Q` for an arbitrary square `Q` of matching size.
    pub fn congruence(&self, q: &DMatrix<f64>) -> Result<Self> {
        if q.nrows() != self.dim() || q.ncols() != self.dim() {
            return Err(Error::DimMismatch {
                left: self.dim(),
                right: q.nrows(),
            });
        }
        Self::from_product(q.transpose() * &self.0 * q)
    }

    pub(crate) fn check_dim(&self, other: &SymMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    /// Largest `|M[i][j] - M[j][i]|` of an unsymmetrized square matrix.
    pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
        let n = m.nrows().min(m.ncols());
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        worst
    }
}

impl Add for &SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in add");
        SymMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in sub");
        SymMatrix(&self.0 - &rhs.0)
    }
}

/// Plain product; the result is generally not symmetric.
impl Mul for &SymMatrix {
    type Output = DMatrix<f64>;
    fn mul(self, rhs: &SymMatrix) -> DMatrix<f64> {
        &self.0 * &rhs.0
    }
}

/// `‖actual − reference‖_F / ‖reference‖_F`, falling back to the absolute
/// error when the reference is zero.
pub fn relative_frobenius_error(actual: &SymMatrix, reference: &SymMatrix) -> f64 {
    let diff = (actual.as_matrix() - reference.as_matrix()).norm();
    let base = reference.frobenius_norm();
    if base > 0.0 {
        diff / base
    } else {
        diff
    }
}

/// Largest entrywise difference divided by the largest entry magnitude of
/// the reference.
pub fn relative_max_entry_error(actual: &SymMatrix, reference: &SymMatrix) -> f64 {
    let diff = (actual.as_matrix() - reference.as_matrix()).amax();
    let base = reference.max_abs();
    if base > 0.0 {
        diff / base
    } else {
        diff
    }
}

#[derive(Serialize, Deserialize)]
struct RowMajor {
    dim: usize,
    data: Vec<f64>,
}

impl Serialize for SymMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RowMajor {
            dim: self.dim(),
            data: self.to_row_major(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RowMajor::deserialize(d)?;
        SymMatrix::from_row_major(raw.dim, &raw.data).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_symmetrizes() {
        let m = SymMatrix::from_row_major(2, &[1.0, 2.0, 4.0, 3.0]).unwrap();
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 0), 3.0);
        assert_eq!(m.diagonal(), vec![1.0, 3.0]);
    }

    #[test]
    fn rejects_bad_shapes_and_values() {
        assert!(matches!(
            SymMatrix::from_row_major(2, &[1.0, 2.0, 3.0]),
            Err(Error::InvalidDimension(_))
        ));
        assert!(matches!(
            SymMatrix::from_row_major(0, &[]),
            Err(Error::InvalidDimension(_))
        ));
        assert_eq!(SymMatrix::from_row_major(1, &[f64::NAN]), Err(Error::NonFinite));
        assert_eq!(SymMatrix::from_diagonal(&[1.0, f64::INFINITY]), Err(Error::NonFinite));
        assert!(SymMatrix::new(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn sandwich_is_symmetric() {
        let a = SymMatrix::from_row_major(2, &[2.0, 1.0, 1.0, 3.0]).unwrap();
        let x = SymMatrix::from_row_major(2, &[1.0, 0.5, 0.5, -1.0]).unwrap();
        let s = a.sandwich(&x).unwrap();
        assert_eq!(s.get(0, 1), s.get(1, 0));
        let direct = a.as_matrix() * x.as_matrix() * a.as_matrix();
        assert!((s.as_matrix() - direct).amax() < 1e-14);
    }
}
