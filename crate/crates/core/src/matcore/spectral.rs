//! Symmetric eigendecomposition and the spectral functional calculus built on it.

use nalgebra::{DMatrix, SymmetricEigen};

use super::matrix::SymMatrix;
use crate::error::{Error, Result};
use crate::tolerance::{absolute_tolerance, default_tol_scale};

/// Eigenvalues in nondecreasing order together with an orthogonal matrix
/// whose columns are the matching unit eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

/// Decomposes `m = V · diag(λ) · Vᵀ`.
pub fn spectral_decompose(m: &SymMatrix) -> Result<SpectralDecomposition> {
    let dim = m.dim();
    if m.as_matrix().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let eig =
        SymmetricEigen::try_new(m.as_matrix().clone(), f64::EPSILON, 0).ok_or(Error::ConvergenceFailure { dim })?;
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::ConvergenceFailure { dim });
    }

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = DMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);

    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

impl SpectralDecomposition {
    #[inline]
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    #[inline]
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    #[inline]
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// Spectral norm, i.e. the largest eigenvalue magnitude.
    pub fn spectral_norm(&self) -> f64 {
        self.min_eigenvalue().abs().max(self.max_eigenvalue().abs())
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.map(|l| l)
    }

    /// Applies a scalar function to the spectrum: `V · diag(f(λ)) · Vᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let values: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.with_eigenvalues(&values)
    }

    /// `V · diag(values) · Vᵀ` for an arbitrary replacement spectrum.
    pub fn with_eigenvalues(&self, values: &[f64]) -> SymMatrix {
        assert_eq!(values.len(), self.dim());
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (c, &val) in values.iter().enumerate() {
            scaled.column_mut(c).scale_mut(val);
        }
        SymMatrix::symmetrized(scaled * v.transpose())
    }

    /// Expresses `m` in this eigenbasis: `Vᵀ · m · V`.
    pub fn to_eigenbasis(&self, m: &SymMatrix) -> Result<DMatrix<f64>> {
        if m.dim() != self.dim() {
            return Err(Error::DimMismatch {
                left: self.dim(),
                right: m.dim(),
            });
        }
        Ok(self.eigenvectors.transpose() * m.as_matrix() * &self.eigenvectors)
    }

    /// Maps an eigenbasis matrix back: `V · m̃ · Vᵀ`, symmetrized.
    pub fn from_eigenbasis(&self, m: &DMatrix<f64>) -> Result<SymMatrix> {
        SymMatrix::from_product(&self.eigenvectors * m * self.eigenvectors.transpose())
    }

    /// Scalar powers of the eigenvalues under the same rules as [`Self::power`].
    pub fn eigenvalue_powers(&self, alpha: f64, tol_scale: f64) -> Result<Vec<f64>> {
        let tolerance = absolute_tolerance(tol_scale, self.spectral_norm());
        let min = self.min_eigenvalue();
        if alpha == 0.0 {
            return Ok(vec![1.0; self.dim()]);
        }
        if alpha < 0.0 && min <= tolerance {
            return Err(Error::NegativePowerOfSingular {
                alpha,
                min_eigenvalue: min,
                tolerance,
            });
        }
        let integral = alpha.fract() == 0.0 && alpha.abs() <= i32::MAX as f64;
        if integral {
            let k = alpha as i32;
            return Ok(self.eigenvalues.iter().map(|l| l.powi(k)).collect());
        }
        if min < -tolerance {
            return Err(Error::FractionalPowerOfIndefinite {
                alpha,
                min_eigenvalue: min,
                tolerance,
            });
        }
        Ok(self.eigenvalues.iter().map(|&l| l.max(0.0).powf(alpha)).collect())
    }

    /// `M^alpha` via the spectrum.
    ///
    /// Integer exponents apply to any symmetric matrix. Non-integer exponents
    /// need `λ_min ≥ −tol`, with eigenvalues in `[−tol, 0]` clamped to zero.
    /// Negative exponents need `λ_min > tol`. Here `tol = tol_scale · max(1, ‖M‖₂)`.
    pub fn power(&self, alpha: f64, tol_scale: f64) -> Result<SymMatrix> {
        let values = self.eigenvalue_powers(alpha, tol_scale)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if alpha == 0.0 {
            return Ok(SymMatrix::identity(self.dim()));
        }
        Ok(self.with_eigenvalues(&values))
    }
}

/// `m^alpha` with the process default tolerance scale.
pub fn matrix_power(m: &SymMatrix, alpha: f64) -> Result<SymMatrix> {
    matrix_power_with_tol(m, alpha, default_tol_scale())
}

pub fn matrix_power_with_tol(m: &SymMatrix, alpha: f64, tol_scale: f64) -> Result<SymMatrix> {
    if alpha == 1.0 {
        return Ok(m.clone());
    }
    spectral_decompose(m)?.power(alpha, tol_scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::generate::{random_pd, random_symmetric, rng_for};

    fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).amax()
    }

    #[test]
    fn identity_spectrum() {
        let d = spectral_decompose(&SymMatrix::identity(3)).unwrap();
        assert_eq!(d.eigenvalues(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_spectrum_sorted_with_unit_vectors() {
        let d = spectral_decompose(&SymMatrix::from_diagonal(&[2.0, 1.0]).unwrap()).unwrap();
        assert_eq!(d.eigenvalues(), &[1.0, 2.0]);
        let v = d.eigenvectors();
        assert!((v[(1, 0)].abs() - 1.0).abs() < 1e-15);
        assert!((v[(0, 1)].abs() - 1.0).abs() < 1e-15);
        assert!(v[(0, 0)].abs() < 1e-15);
    }

    #[test]
    fn random_reconstruction_and_orthogonality() {
        for seed in 0..20 {
            let mut rng = rng_for(seed, 0);
            let m = random_symmetric(&mut rng, 6);
            let d = spectral_decompose(&m).unwrap();
            let err = (d.reconstruct().as_matrix() - m.as_matrix()).norm();
            assert!(err <= 1e-12 * m.frobenius_norm().max(1.0), "seed {seed}: {err:e}");
            let v = d.eigenvectors();
            let gram = v.transpose() * v;
            assert!(max_abs_diff(&gram, &DMatrix::identity(6, 6)) <= 1e-12);
            assert!(d.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn rejects_non_finite() {
        let mut raw = DMatrix::identity(2, 2);
        raw[(0, 0)] = f64::NAN;
        let m = SymMatrix::symmetrized(raw);
        assert_eq!(spectral_decompose(&m).unwrap_err(), Error::NonFinite);
    }

    #[test]
    fn power_examples() {
        let id = SymMatrix::identity(2);
        assert_eq!(matrix_power(&id, 0.5).unwrap(), id);

        let m = SymMatrix::from_diagonal(&[1.0, 4.0]).unwrap();
        let root = matrix_power(&m, 0.5).unwrap();
        assert!(
            max_abs_diff(
                root.as_matrix(),
                SymMatrix::from_diagonal(&[1.0, 2.0]).unwrap().as_matrix()
            ) < 1e-15
        );

        let m = SymMatrix::from_diagonal(&[1.0, 2.0]).unwrap();
        let p = matrix_power(&m, 2.5).unwrap();
        assert!((p.get(1, 1) - 2f64.powf(2.5)).abs() < 1e-14);
        assert!((p.get(1, 1) - 5.656854249492381).abs() < 1e-14);
        assert!((p.get(0, 0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn power_zero_and_one() {
        let mut rng = rng_for(3, 0);
        let m = random_pd(&mut rng, 4, 0.5, 3.0);
        assert_eq!(matrix_power(&m, 1.0).unwrap(), m);
        assert_eq!(matrix_power(&m, 0.0).unwrap(), SymMatrix::identity(4));
    }

    #[test]
    fn power_error_paths() {
        let singular = SymMatrix::from_diagonal(&[0.0, 1.0]).unwrap();
        assert!(matches!(
            matrix_power(&singular, -1.0),
            Err(Error::NegativePowerOfSingular { .. })
        ));
        assert!(matches!(
            matrix_power(&singular, -0.5),
            Err(Error::NegativePowerOfSingular { .. })
        ));
        let indefinite = SymMatrix::from_diagonal(&[-1.0, 1.0]).unwrap();
        assert!(matches!(
            matrix_power(&indefinite, 0.5),
            Err(Error::FractionalPowerOfIndefinite { .. })
        ));
        // integer powers of indefinite matrices are fine
        let sq = matrix_power(&indefinite, 2.0).unwrap();
        assert!(max_abs_diff(sq.as_matrix(), &DMatrix::identity(2, 2)) < 1e-15);
    }

    #[test]
    fn tiny_negative_eigenvalues_are_clamped() {
        let m = SymMatrix::from_diagonal(&[-1e-13, 4.0]).unwrap();
        let root = matrix_power(&m, 0.5).unwrap();
        assert_eq!(root.get(0, 0), 0.0);
        assert!((root.get(1, 1) - 2.0).abs() < 1e-15);
        assert!(matches!(
            matrix_power(&m, -0.5),
            Err(Error::NegativePowerOfSingular { .. })
        ));
    }

    #[test]
    fn power_overflow_is_reported() {
        let m = SymMatrix::from_diagonal(&[1e200, 1.0]).unwrap();
        assert_eq!(matrix_power(&m, 2.0).unwrap_err(), Error::NonFinite);
    }
}
