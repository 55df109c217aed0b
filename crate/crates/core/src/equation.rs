//! The linear equation `Σ_{j=1}^{n} A^{n−j} X A^{j−1} = B`.
//!
//! For symmetric positive definite `A = V diag(a) Vᵀ` the equation decouples in
//! the eigenbasis: `X̃[p][q] · d(a_p, a_q) = B̃[p][q]` with
//! `d(x, y) = Σ_{j=1}^{n} x^{n−j} y^{j−1}`. [`solve_spectral`] uses that;
//! [`solve_kronecker`] solves the vectorized `dim² × dim²` system directly
//! and serves as an independent oracle.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{check_psd_decomposed, spectral_decompose, SpectralDecomposition, SymMatrix};

/// Largest `dim` accepted by [`solve_kronecker`].
pub const KRONECKER_MAX_DIM: usize = 32;

/// Condition estimate above which the stacked system is rejected.
pub const KRONECKER_MAX_CONDITION: f64 = 1e14;

const MIN_DENOMINATOR: f64 = 1e-300;

/// A validated equation: `A` positive definite, `n ≥ 1`, matching dims.
#[derive(Debug, Clone)]
pub struct EquationInstance {
    a: SymMatrix,
    n: u32,
    b: SymMatrix,
    spectrum: SpectralDecomposition,
}

impl EquationInstance {
    pub fn new(a: SymMatrix, n: u32, b: SymMatrix, tol_scale: f64) -> Result<Self> {
        let spectrum = spectral_decompose(&a)?;
        Self::with_spectrum(a, spectrum, n, b, tol_scale)
    }

    /// As [`Self::new`], reusing an existing decomposition of `a`.
    pub fn with_spectrum(
        a: SymMatrix,
        spectrum: SpectralDecomposition,
        n: u32,
        b: SymMatrix,
        tol_scale: f64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        a.check_dim(&b)?;
        let report = check_psd_decomposed(&spectrum, tol_scale);
        if !report.is_pd() {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: report.min_eigenvalue,
            });
        }
        Ok(Self { a, n, b, spectrum })
    }

    pub fn a(&self) -> &SymMatrix {
        &self.a
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn b(&self) -> &SymMatrix {
        &self.b
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveMethod {
    Spectral,
    KroneckerOracle,
}

#[derive(Debug, Clone, Serialize)]
pub struct Solution {
    pub x: SymMatrix,
    /// `‖LHS(X) − B‖_F`.
    pub residual_fro: f64,
    pub method: SolveMethod,
}

impl Solution {
    /// Residual divided by `max(1, ‖B‖_F)`.
    pub fn relative_residual(&self, b: &SymMatrix) -> f64 {
        self.residual_fro / b.frobenius_norm().max(1.0)
    }
}

/// `d(x, y) = Σ_{j=1}^{n} x^{n−j} y^{j−1}` by direct summation.
///
/// The closed form `(xⁿ − yⁿ)/(x − y)` cancels catastrophically for `x ≈ y`.
pub fn denominator(x: f64, y: f64, n: u32) -> f64 {
    let n = n as i32;
    (1..=n).map(|j| x.powi(n - j) * y.powi(j - 1)).sum()
}

/// `A⁰, A¹, …, A^{count−1}` by repeated multiplication.
fn integer_powers(a: &DMatrix<f64>, count: usize) -> Vec<DMatrix<f64>> {
    let dim = a.nrows();
    let mut out = Vec::with_capacity(count);
    let mut cur = DMatrix::identity(dim, dim);
    for _ in 0..count {
        let next = &cur * a;
        out.push(cur);
        cur = next;
    }
    out
}

/// `Σ_{j=1}^{n} A^{n−j} X A^{j−1}`, symmetrized. Powers by repeated multiplication.
pub fn apply_lhs(a: &SymMatrix, n: u32, x: &SymMatrix) -> Result<SymMatrix> {
    a.check_dim(x)?;
    if n == 0 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    let n = n as usize;
    let powers = integer_powers(a.as_matrix(), n);
    let dim = a.dim();
    let mut acc = DMatrix::<f64>::zeros(dim, dim);
    for j in 1..=n {
        acc += &powers[n - j] * x.as_matrix() * &powers[j - 1];
    }
    SymMatrix::from_product(acc)
}

fn residual(inst: &EquationInstance, x: &SymMatrix) -> Result<f64> {
    let lhs = apply_lhs(&inst.a, inst.n, x)?;
    Ok((lhs.as_matrix() - inst.b.as_matrix()).norm())
}

/// Exact solve in the eigenbasis of `A`.
pub fn solve_spectral(inst: &EquationInstance) -> Result<Solution> {
    let spec = &inst.spectrum;
    let eigs = spec.eigenvalues();
    let mut bt = spec.to_eigenbasis(&inst.b)?;
    let dim = inst.dim();
    for q in 0..dim {
        for p in 0..dim {
            let d = denominator(eigs[p], eigs[q], inst.n);
            if !(d > MIN_DENOMINATOR) {
                return Err(Error::SingularDenominator { value: d });
            }
            bt[(p, q)] /= d;
        }
    }
    let x = spec.from_eigenbasis(&bt)?;
    let residual_fro = residual(inst, &x)?;
    Ok(Solution {
        x,
        residual_fro,
        method: SolveMethod::Spectral,
    })
}

/// Stacked operator `Σ_j (A^{j−1})ᵀ ⊗ A^{n−j}` acting on column-major `vec(X)`.
pub fn stacked_operator(a: &SymMatrix, n: u32) -> DMatrix<f64> {
    let n = n as usize;
    let powers = integer_powers(a.as_matrix(), n);
    let dim = a.dim();
    let mut m = DMatrix::<f64>::zeros(dim * dim, dim * dim);
    for j in 1..=n {
        m += powers[j - 1].transpose().kronecker(&powers[n - j]);
    }
    m
}

/// Estimate of `‖M⁻¹‖₁` (Hager's method) from an LU factorization of a
/// symmetric `M`, so the transposed solves reuse the same factors.
fn inverse_norm1_estimate(lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>, size: usize) -> Option<f64> {
    let mut x = DVector::from_element(size, 1.0 / size as f64);
    let mut estimate = 0.0;
    for _ in 0..5 {
        let y = lu.solve(&x)?;
        estimate = y.lp_norm(1);
        let xi = y.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
        let z = lu.solve(&xi)?;
        let (jmax, zmax) = z.iter().enumerate().fold(
            (0, 0.0_f64),
            |(bj, bv), (j, v)| if v.abs() > bv { (j, v.abs()) } else { (bj, bv) },
        );
        if zmax <= z.dot(&x) {
            break;
        }
        x = DVector::zeros(size);
        x[jmax] = 1.0;
    }
    Some(estimate)
}

/// Brute-force solve of the `dim² × dim²` vectorized system by LU.
pub fn solve_kronecker(inst: &EquationInstance) -> Result<Solution> {
    let dim = inst.dim();
    if dim > KRONECKER_MAX_DIM {
        return Err(Error::DimTooLarge {
            dim,
            max: KRONECKER_MAX_DIM,
        });
    }
    let m = stacked_operator(&inst.a, inst.n);
    let size = dim * dim;
    let norm1 = (0..size).map(|c| m.column(c).lp_norm(1)).fold(0.0_f64, f64::max);
    let lu = m.lu();
    let singular = Error::NumericallySingular {
        condition: f64::INFINITY,
    };
    let inv_norm = inverse_norm1_estimate(&lu, size).ok_or(singular.clone())?;
    let condition = norm1 * inv_norm;
    if !(condition <= KRONECKER_MAX_CONDITION) {
        return Err(Error::NumericallySingular { condition });
    }
    // nalgebra storage is column-major, which is exactly vec(·)
    let rhs = DVector::from_column_slice(inst.b.as_matrix().as_slice());
    let sol = lu.solve(&rhs).ok_or(singular)?;
    let x = SymMatrix::from_product(DMatrix::from_column_slice(dim, dim, sol.as_slice()))?;
    let residual_fro = residual(inst, &x)?;
    Ok(Solution {
        x,
        residual_fro,
        method: SolveMethod::KroneckerOracle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::generate::{random_pd, random_symmetric, rng_for};
    use crate::matcore::relative_frobenius_error;
    use crate::tolerance::DEFAULT_TOL_SCALE;

    fn inst(a: SymMatrix, n: u32, b: SymMatrix) -> EquationInstance {
        EquationInstance::new(a, n, b, DEFAULT_TOL_SCALE).unwrap()
    }

    #[test]
    fn denominator_examples() {
        assert_eq!(denominator(1.0, 2.0, 2), 3.0);
        assert_eq!(denominator(1.0, 2.0, 3), 7.0);
        let x = 1.7_f64;
        for n in 1..6 {
            let expected = n as f64 * x.powi(n as i32 - 1);
            assert!((denominator(x, x, n) - expected).abs() <= 1e-14 * expected);
        }
        // near-equal arguments stay accurate where the closed form does not
        let (x, y) = (1.0, 1.0 + 1e-13);
        assert!((denominator(x, y, 4) - 4.0).abs() < 1e-11);
    }

    #[test]
    fn lhs_trivial_cases() {
        let mut rng = rng_for(0, 0);
        let a = random_pd(&mut rng, 3, 0.5, 2.0);
        let x = random_symmetric(&mut rng, 3);
        let out = apply_lhs(&a, 1, &x).unwrap();
        assert!((out.as_matrix() - x.as_matrix()).amax() < 1e-15);
        let out = apply_lhs(&SymMatrix::identity(3), 3, &x).unwrap();
        assert!((out.as_matrix() - x.as_matrix() * 3.0).amax() < 1e-15);
        assert!(matches!(
            apply_lhs(&a, 2, &SymMatrix::identity(2)),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn identity_coefficient() {
        let mut rng = rng_for(1, 0);
        let b = random_symmetric(&mut rng, 4);
        let s = solve_spectral(&inst(SymMatrix::identity(4), 2, b.clone())).unwrap();
        assert!((s.x.as_matrix() - b.as_matrix() * 0.5).amax() < 1e-15);
        let k = solve_kronecker(&inst(SymMatrix::identity(4), 5, b.clone())).unwrap();
        assert!((k.x.as_matrix() - b.as_matrix() * 0.2).amax() < 1e-15);
        assert_eq!(k.method, SolveMethod::KroneckerOracle);
    }

    #[test]
    fn two_by_two_hand_solution() {
        // n = 2: X[p][q] = 1 / (a_p + a_q)
        let a = SymMatrix::from_diagonal(&[1.0, 2.0]).unwrap();
        let expected = SymMatrix::from_row_major(2, &[0.5, 1.0 / 3.0, 1.0 / 3.0, 0.25]).unwrap();
        let i = inst(a, 2, SymMatrix::filled(2, 1.0));
        for sol in [solve_kronecker(&i).unwrap(), solve_spectral(&i).unwrap()] {
            assert!((sol.x.as_matrix() - expected.as_matrix()).amax() < 1e-15);
            assert!(sol.residual_fro < 1e-14);
        }
    }

    #[test]
    fn instance_validation() {
        let b = SymMatrix::identity(2);
        let indefinite = SymMatrix::from_diagonal(&[1.0, -1.0]).unwrap();
        assert!(matches!(
            EquationInstance::new(indefinite, 2, b.clone(), DEFAULT_TOL_SCALE),
            Err(Error::NotPositiveDefinite { .. })
        ));
        let singular = SymMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        assert!(matches!(
            EquationInstance::new(singular, 2, b.clone(), DEFAULT_TOL_SCALE),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(matches!(
            EquationInstance::new(SymMatrix::identity(2), 0, b.clone(), DEFAULT_TOL_SCALE),
            Err(Error::InvalidParams(_))
        ));
        assert!(matches!(
            EquationInstance::new(SymMatrix::identity(3), 1, b, DEFAULT_TOL_SCALE),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn kronecker_rejects_large_and_ill_conditioned() {
        let big = inst(SymMatrix::identity(33), 1, SymMatrix::identity(33));
        assert!(matches!(
            solve_kronecker(&big),
            Err(Error::DimTooLarge { dim: 33, max: 32 })
        ));

        let a = SymMatrix::from_diagonal(&[1e-4, 1.0]).unwrap();
        let bad = inst(a, 5, SymMatrix::identity(2));
        assert!(matches!(solve_kronecker(&bad), Err(Error::NumericallySingular { .. })));
        // the spectral route still resolves it exactly
        assert!(solve_spectral(&bad).is_ok());
    }

    #[test]
    fn spectral_matches_kronecker_random() {
        for seed in 0..20 {
            let mut rng = rng_for(seed, 10);
            let a = random_pd(&mut rng, 5, 0.3, 3.0);
            let b = random_symmetric(&mut rng, 5);
            let i = inst(a, 4, b.clone());
            let s = solve_spectral(&i).unwrap();
            let k = solve_kronecker(&i).unwrap();
            assert!(relative_frobenius_error(&s.x, &k.x) <= 1e-9);
            assert!(s.relative_residual(&b) <= 1e-9);
        }
    }
}
