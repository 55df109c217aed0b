use serde::{Deserialize, Serialize};

use super::matrix::SymMatrix;
use super::spectral::{spectral_decompose, SpectralDecomposition};
use crate::error::Result;
use crate::tolerance::absolute_tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PsdVerdict {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
}

/// Outcome of a positive-semidefiniteness test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub verdict: PsdVerdict,
    pub min_eigenvalue: f64,
    pub tolerance_used: f64,
    /// `max(1, ‖M‖₂)` of the tested matrix; `tolerance_used = tol_scale · scale`.
    pub scale: f64,
}

impl PsdReport {
    pub fn from_min_eigenvalue(min_eigenvalue: f64, tol_scale: f64, spectral_norm: f64) -> Self {
        let tolerance_used = absolute_tolerance(tol_scale, spectral_norm);
        let verdict = if min_eigenvalue > tolerance_used {
            PsdVerdict::PositiveDefinite
        } else if min_eigenvalue >= -tolerance_used {
            PsdVerdict::PositiveSemidefinite
        } else {
            PsdVerdict::Indefinite
        };
        Self {
            verdict,
            min_eigenvalue,
            tolerance_used,
            scale: spectral_norm.max(1.0),
        }
    }

    /// True for both `PositiveDefinite` and `PositiveSemidefinite`.
    pub fn is_psd(&self) -> bool {
        self.verdict != PsdVerdict::Indefinite
    }

    pub fn is_pd(&self) -> bool {
        self.verdict == PsdVerdict::PositiveDefinite
    }

    /// `min_eigenvalue ≥ −rel_tol · scale`, for callers that need a looser
    /// acceptance threshold than the one baked into the verdict.
    pub fn within(&self, rel_tol: f64) -> bool {
        self.min_eigenvalue >= -rel_tol * self.scale
    }

    /// Minimum eigenvalue divided by `scale`.
    pub fn normalized_min(&self) -> f64 {
        self.min_eigenvalue / self.scale
    }
}

pub fn check_psd(m: &SymMatrix, tol_scale: f64) -> Result<PsdReport> {
    let d = spectral_decompose(m)?;
    Ok(check_psd_decomposed(&d, tol_scale))
}

pub fn check_psd_decomposed(d: &SpectralDecomposition, tol_scale: f64) -> PsdReport {
    PsdReport::from_min_eigenvalue(d.min_eigenvalue(), tol_scale, d.spectral_norm())
}

/// Löwner order test `a ⩾ b`, i.e. `check_psd(a − b)`.
pub fn loewner_ge(a: &SymMatrix, b: &SymMatrix, tol_scale: f64) -> Result<PsdReport> {
    a.check_dim(b)?;
    check_psd(&(a - b), tol_scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::matcore::generate::{random_orthogonal, random_symmetric, rng_for};
    use crate::tolerance::DEFAULT_TOL_SCALE;

    #[test]
    fn rank_one_gram_is_semidefinite() {
        let r = check_psd(&SymMatrix::filled(2, 1.0), DEFAULT_TOL_SCALE).unwrap();
        assert_eq!(r.verdict, PsdVerdict::PositiveSemidefinite);
        assert!(r.min_eigenvalue.abs() <= r.tolerance_used);
        assert_eq!(r.tolerance_used, DEFAULT_TOL_SCALE * 2.0);
    }

    #[test]
    fn verdict_thresholds() {
        let pd = PsdReport::from_min_eigenvalue(1e-9, 1e-10, 0.5);
        assert_eq!(pd.verdict, PsdVerdict::PositiveDefinite);
        assert_eq!(pd.scale, 1.0);
        let psd = PsdReport::from_min_eigenvalue(-1e-10, 1e-10, 0.5);
        assert_eq!(psd.verdict, PsdVerdict::PositiveSemidefinite);
        let ind = PsdReport::from_min_eigenvalue(-2e-10, 1e-10, 0.5);
        assert_eq!(ind.verdict, PsdVerdict::Indefinite);
        let scaled = PsdReport::from_min_eigenvalue(-2e-10, 1e-10, 10.0);
        assert_eq!(scaled.verdict, PsdVerdict::PositiveSemidefinite);
    }

    #[test]
    fn loewner_examples() {
        let a = SymMatrix::from_row_major(2, &[3.0, 1.0, 1.0, 2.0]).unwrap();
        let r = loewner_ge(&a, &a, DEFAULT_TOL_SCALE).unwrap();
        assert_eq!(r.verdict, PsdVerdict::PositiveSemidefinite);
        assert_eq!(r.min_eigenvalue, 0.0);

        let two = SymMatrix::from_diagonal(&[2.0, 2.0]).unwrap();
        let ones = SymMatrix::filled(2, 1.0);
        let r = loewner_ge(&two, &ones, DEFAULT_TOL_SCALE).unwrap();
        assert!(r.is_psd());
        let d = spectral_decompose(&(&two - &ones)).unwrap();
        assert!(d.eigenvalues()[0].abs() < 1e-15);
        assert!((d.eigenvalues()[1] - 2.0).abs() < 1e-15);

        let r = loewner_ge(&two, &SymMatrix::identity(3), DEFAULT_TOL_SCALE);
        assert!(matches!(r, Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn adding_gram_matrix_preserves_order() {
        for seed in 0..10 {
            let mut rng = rng_for(seed, 1);
            let b = random_symmetric(&mut rng, 4);
            let c = random_symmetric(&mut rng, 4);
            let gram = SymMatrix::new(c.as_matrix().transpose() * c.as_matrix()).unwrap();
            let a = &b + &gram;
            assert!(loewner_ge(&a, &b, DEFAULT_TOL_SCALE).unwrap().is_psd());
        }
    }

    #[test]
    fn verdict_invariant_under_orthogonal_conjugation() {
        for seed in 0..10 {
            let mut rng = rng_for(seed, 2);
            let m = random_symmetric(&mut rng, 5);
            let q = random_orthogonal(&mut rng, 5);
            let conj = m.congruence(&q).unwrap();
            let r1 = check_psd(&m, DEFAULT_TOL_SCALE).unwrap();
            let r2 = check_psd(&conj, DEFAULT_TOL_SCALE).unwrap();
            assert_eq!(r1.verdict, r2.verdict);
            assert!((r1.min_eigenvalue - r2.min_eigenvalue).abs() < 1e-12);
        }
    }
}
