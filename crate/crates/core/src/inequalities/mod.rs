//! Numerical checks of the operator inequalities behind the construction:
//! Löwner–Heinz, Furuta, grand Furuta, the derivative identity
//! `d/dx (A + xB)^m |₀ = Σ_j A^{m−j} B A^{j−1}` and the intermediate
//! inequality used to derive the PSD guarantee.
//!
//! Checkers accept parameters outside their validity regions; the regions
//! only gate whether a PSD verdict is guaranteed.

mod search;
mod suite;

pub use search::{
    counterexample_search, search_with_stats, DimRange, InequalityWitness, Interval, Probe, SamplerSpec, SearchOutcome,
    WitnessParams, WITNESS_REL_THRESHOLD,
};
pub use suite::{run_suite, SuiteConfig, SuiteKind, SuiteReport, TrialFailure, LEMMA_REL_TOL, SUITE_REL_TOL};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::construction::{check_r_condition, ConstructionParams};
use crate::equation::apply_lhs;
use crate::error::{Error, Result};
use crate::matcore::{check_psd, matrix_power_with_tol, spectral_decompose, PsdReport, SymMatrix};

/// Finite-difference step used by the derivative checks.
pub const FINITE_DIFFERENCE_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InequalityId {
    LoewnerHeinz,
    Furuta,
    GrandFuruta,
    ProofStep,
    Theorem21,
}

impl InequalityId {
    pub fn name(&self) -> &'static str {
        match self {
            InequalityId::LoewnerHeinz => "loewner-heinz",
            InequalityId::Furuta => "furuta",
            InequalityId::GrandFuruta => "grand-furuta",
            InequalityId::ProofStep => "proof-step",
            InequalityId::Theorem21 => "theorem21",
        }
    }
}

/// `A^α − B^α`.
pub fn loewner_heinz_difference(a: &SymMatrix, b: &SymMatrix, alpha: f64, tol_scale: f64) -> Result<SymMatrix> {
    a.check_dim(b)?;
    let pa = matrix_power_with_tol(a, alpha, tol_scale)?;
    let pb = matrix_power_with_tol(b, alpha, tol_scale)?;
    Ok(&pa - &pb)
}

/// `A^α ⩾ B^α`, guaranteed for `A ⩾ B ⩾ 0` and `α ∈ [0, 1]`.
pub fn check_loewner_heinz(a: &SymMatrix, b: &SymMatrix, alpha: f64, tol_scale: f64) -> Result<PsdReport> {
    check_psd(&loewner_heinz_difference(a, b, alpha, tol_scale)?, tol_scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FurutaSide {
    /// `(B^{r/2} A^p B^{r/2})^{1/q} ⩾ B^{(p+r)/q}`
    BSide,
    /// `A^{(p+r)/q} ⩾ (A^{r/2} B^p A^{r/2})^{1/q}`
    ASide,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FurutaParams {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl FurutaParams {
    /// `p ≥ 0`, `q ≥ 1`, `r ≥ 0` and `(1 + r)q ≥ p + r`.
    pub fn is_valid(&self) -> bool {
        self.p >= 0.0 && self.q >= 1.0 && self.r >= 0.0 && (1.0 + self.r) * self.q >= self.p + self.r
    }
}

fn check_exponent(value: f64, tol_scale: f64) -> Result<()> {
    if !(value > tol_scale) {
        return Err(Error::DegenerateExponent { value });
    }
    Ok(())
}

/// Left side minus right side of the chosen Furuta inequality.
pub fn furuta_difference(
    a: &SymMatrix,
    b: &SymMatrix,
    fp: &FurutaParams,
    side: FurutaSide,
    tol_scale: f64,
) -> Result<SymMatrix> {
    a.check_dim(b)?;
    check_exponent(fp.q, tol_scale)?;
    let (frame_of, middle_of) = match side {
        FurutaSide::BSide => (b, a),
        FurutaSide::ASide => (a, b),
    };
    let frame_spec = spectral_decompose(frame_of)?;
    let frame = frame_spec.power(fp.r / 2.0, tol_scale)?;
    let middle = matrix_power_with_tol(middle_of, fp.p, tol_scale)?;
    let sandwiched = frame.sandwich(&middle)?;
    let mixed = matrix_power_with_tol(&sandwiched, 1.0 / fp.q, tol_scale)?;
    let pure = frame_spec.power((fp.p + fp.r) / fp.q, tol_scale)?;
    Ok(match side {
        FurutaSide::BSide => &mixed - &pure,
        FurutaSide::ASide => &pure - &mixed,
    })
}

pub fn check_furuta(
    a: &SymMatrix,
    b: &SymMatrix,
    fp: &FurutaParams,
    side: FurutaSide,
    tol_scale: f64,
) -> Result<PsdReport> {
    check_psd(&furuta_difference(a, b, fp, side, tol_scale)?, tol_scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrandFurutaParams {
    pub t: f64,
    pub p: f64,
    pub s: f64,
    pub r: f64,
}

impl GrandFurutaParams {
    /// `t ∈ [0, 1]`, `p ≥ 1`, `s ≥ 1` and `r ≥ t`.
    pub fn is_valid(&self) -> bool {
        (0.0..=1.0).contains(&self.t) && self.p >= 1.0 && self.s >= 1.0 && self.r >= self.t
    }

    /// `(1 − t + r) / ((p − t)s + r)`.
    pub fn outer_exponent(&self) -> f64 {
        (1.0 - self.t + self.r) / ((self.p - self.t) * self.s + self.r)
    }
}

/// `A^{1−t+r} − {A^{r/2} (A^{−t/2} B^p A^{−t/2})^s A^{r/2}}^{(1−t+r)/((p−t)s+r)}`.
pub fn grand_furuta_difference(
    a: &SymMatrix,
    b: &SymMatrix,
    gp: &GrandFurutaParams,
    tol_scale: f64,
) -> Result<SymMatrix> {
    a.check_dim(b)?;
    check_exponent((gp.p - gp.t) * gp.s + gp.r, tol_scale)?;
    let a_spec = spectral_decompose(a)?;
    let damp = a_spec.power(-gp.t / 2.0, tol_scale)?;
    let bp = matrix_power_with_tol(b, gp.p, tol_scale)?;
    let inner = damp.sandwich(&bp)?;
    let inner_s = matrix_power_with_tol(&inner, gp.s, tol_scale)?;
    let frame = a_spec.power(gp.r / 2.0, tol_scale)?;
    let framed = frame.sandwich(&inner_s)?;
    let rhs = matrix_power_with_tol(&framed, gp.outer_exponent(), tol_scale)?;
    let lhs = a_spec.power(1.0 - gp.t + gp.r, tol_scale)?;
    Ok(&lhs - &rhs)
}

pub fn check_grand_furuta(a: &SymMatrix, b: &SymMatrix, gp: &GrandFurutaParams, tol_scale: f64) -> Result<PsdReport> {
    check_psd(&grand_furuta_difference(a, b, gp, tol_scale)?, tol_scale)
}

/// `Σ_{j=1}^{m} A^{m−j} B A^{j−1}`, the derivative of `x ↦ (A + xB)^m` at 0.
///
/// This is the equation's left-hand operator with `n = m` applied to `B`.
pub fn lemma_derivative(a: &SymMatrix, b: &SymMatrix, m: u32) -> Result<SymMatrix> {
    apply_lhs(a, m, b)
}

fn integer_power(m: &DMatrix<f64>, k: u32) -> DMatrix<f64> {
    let mut out = DMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

/// Central difference `((A + hB)^m − (A − hB)^m) / 2h`, powers by repeated multiplication.
pub fn finite_difference_derivative(a: &SymMatrix, b: &SymMatrix, m: u32, h: f64) -> Result<SymMatrix> {
    a.check_dim(b)?;
    if !(h > 0.0) {
        return Err(Error::InvalidParams(format!("step must be positive, got {h}")));
    }
    let plus = a.as_matrix() + b.as_matrix() * h;
    let minus = a.as_matrix() - b.as_matrix() * h;
    let diff = (integer_power(&plus, m) - integer_power(&minus, m)) / (2.0 * h);
    SymMatrix::new(diff)
}

/// `(A^{r/2} (A^{−t/2} (A+xB)^m A^{−t/2})^k A^{r/2})^{1/n} − A^{((m−t)k+r)/n}`.
pub fn proof_step_difference(
    a: &SymMatrix,
    b: &SymMatrix,
    x: f64,
    p: &ConstructionParams,
    tol_scale: f64,
) -> Result<SymMatrix> {
    p.validate()?;
    a.check_dim(b)?;
    if !(x >= 0.0) {
        return Err(Error::InvalidParams(format!("x must be non-negative, got {x}")));
    }
    let base = p.exponent_base();
    if !(base > 0.0) {
        return Err(Error::DegenerateExponent { value: base });
    }
    let a_spec = spectral_decompose(a)?;
    let shifted = &(a.clone()) + &b.scale(x);
    let shifted_m = matrix_power_with_tol(&shifted, p.m as f64, tol_scale)?;
    let damp = a_spec.power(-p.t / 2.0, tol_scale)?;
    let inner = damp.sandwich(&shifted_m)?;
    let inner_k = matrix_power_with_tol(&inner, p.k as f64, tol_scale)?;
    let frame = a_spec.power(p.r / 2.0, tol_scale)?;
    let framed = frame.sandwich(&inner_k)?;
    let lhs = matrix_power_with_tol(&framed, 1.0 / p.n as f64, tol_scale)?;
    let rhs = a_spec.power(base / p.n as f64, tol_scale)?;
    Ok(&lhs - &rhs)
}

/// Checks the intermediate inequality; only defined where the r-condition holds.
pub fn verify_proof_step(
    a: &SymMatrix,
    b: &SymMatrix,
    x: f64,
    p: &ConstructionParams,
    tol_scale: f64,
) -> Result<PsdReport> {
    let cond = check_r_condition(p);
    if !cond.valid {
        return Err(Error::RConditionInvalid {
            r: p.r,
            required_r: cond.required_r.unwrap_or(f64::NAN),
        });
    }
    check_psd(&proof_step_difference(a, b, x, p, tol_scale)?, tol_scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::generate::{gen_loewner_pair, random_pd, random_psd, rng_for};
    use crate::matcore::{loewner_ge, relative_frobenius_error};
    use crate::tolerance::DEFAULT_TOL_SCALE;

    const TOL: f64 = DEFAULT_TOL_SCALE;

    #[test]
    fn loewner_heinz_trivial_exponents() {
        let (a, b) = gen_loewner_pair(1, 3);
        let r1 = check_loewner_heinz(&a, &b, 1.0, TOL).unwrap();
        let direct = loewner_ge(&a, &b, TOL).unwrap();
        assert_eq!(r1.verdict, direct.verdict);
        assert!((r1.min_eigenvalue - direct.min_eigenvalue).abs() < 1e-14);

        let r0 = check_loewner_heinz(&a, &b, 0.0, TOL).unwrap();
        assert_eq!(r0.min_eigenvalue, 0.0);
        assert!(r0.is_psd());
    }

    #[test]
    fn loewner_heinz_random_pairs() {
        for seed in 0..100 {
            let (a, b) = gen_loewner_pair(seed, 3);
            for alpha in [0.25, 0.5, 0.75] {
                assert!(
                    check_loewner_heinz(&a, &b, alpha, TOL).unwrap().is_psd(),
                    "seed {seed} alpha {alpha}"
                );
            }
        }
    }

    #[test]
    fn furuta_trivial_cases() {
        let (a, b) = gen_loewner_pair(2, 3);
        let fp = FurutaParams { p: 1.3, q: 1.0, r: 0.7 };
        for side in [FurutaSide::ASide, FurutaSide::BSide] {
            let d = furuta_difference(&a, &a, &fp, side, TOL).unwrap();
            assert!(d.max_abs() < 1e-12, "{side:?}");
        }
        let hyp = FurutaParams { p: 1.0, q: 1.0, r: 0.0 };
        for side in [FurutaSide::ASide, FurutaSide::BSide] {
            let d = furuta_difference(&a, &b, &hyp, side, TOL).unwrap();
            assert!((d.as_matrix() - (&a - &b).as_matrix()).amax() < 1e-12);
        }
    }

    #[test]
    fn furuta_validity_flag() {
        assert!(FurutaParams { p: 2.0, q: 1.5, r: 1.0 }.is_valid());
        assert!(!FurutaParams { p: 4.0, q: 1.2, r: 1.0 }.is_valid());
        assert!(!FurutaParams { p: 1.0, q: 0.5, r: 3.0 }.is_valid());
    }

    #[test]
    fn grand_furuta_identity_and_reduction() {
        let id = SymMatrix::identity(3);
        let gp = GrandFurutaParams {
            t: 0.4,
            p: 2.0,
            s: 1.5,
            r: 1.0,
        };
        assert!(grand_furuta_difference(&id, &id, &gp, TOL).unwrap().max_abs() < 1e-14);

        for seed in 0..20 {
            let (a, b) = gen_loewner_pair(seed, 4);
            let (p, r) = (1.0 + (seed as f64) * 0.1, 0.5 + (seed as f64) * 0.05);
            let gf = grand_furuta_difference(&a, &b, &GrandFurutaParams { t: 0.0, p, s: 1.0, r }, TOL).unwrap();
            let q = (p + r) / (1.0 + r);
            let f = furuta_difference(&a, &b, &FurutaParams { p, q, r }, FurutaSide::ASide, TOL).unwrap();
            let base = gf.frobenius_norm().max(f.frobenius_norm()).max(1.0);
            assert!((gf.as_matrix() - f.as_matrix()).norm() <= 1e-10 * base, "seed {seed}");
        }
    }

    #[test]
    fn grand_furuta_degenerate_exponent() {
        let id = SymMatrix::identity(2);
        let gp = GrandFurutaParams {
            t: 1.0,
            p: 1.0,
            s: 1.0,
            r: 0.0,
        };
        assert!(matches!(
            grand_furuta_difference(&id, &id, &gp, TOL),
            Err(Error::DegenerateExponent { .. })
        ));
    }

    #[test]
    fn derivative_small_cases() {
        let mut rng = rng_for(5, 0);
        let a = random_pd(&mut rng, 3, 0.5, 2.0);
        let b = random_psd(&mut rng, 3, 3);
        let d1 = lemma_derivative(&a, &b, 1).unwrap();
        assert!((d1.as_matrix() - b.as_matrix()).amax() < 1e-15);
        let d2 = lemma_derivative(&a, &b, 2).unwrap();
        let ab = a.as_matrix() * b.as_matrix();
        assert!((d2.as_matrix() - (&ab + ab.transpose())).amax() < 1e-14);
    }

    #[test]
    fn lemma_matches_finite_difference() {
        for seed in 0..10 {
            let mut rng = rng_for(seed, 7);
            let a = random_pd(&mut rng, 4, 0.5, 2.0);
            let b = random_psd(&mut rng, 4, 4);
            let exact = lemma_derivative(&a, &b, 5).unwrap();
            let fd = finite_difference_derivative(&a, &b, 5, FINITE_DIFFERENCE_STEP).unwrap();
            assert!(relative_frobenius_error(&fd, &exact) <= 1e-6);
        }
    }

    #[test]
    fn proof_step_at_zero_is_equality() {
        let (a, b) = gen_loewner_pair(3, 3);
        let p = ConstructionParams::new(2, 3, 2, 0.5, 1.0).unwrap();
        let r = verify_proof_step(&a, &b, 0.0, &p, TOL).unwrap();
        assert!(r.min_eigenvalue.abs() <= 1e-9 * r.scale);
    }

    #[test]
    fn proof_step_remark_instance() {
        let a = SymMatrix::from_diagonal(&[1.0, 2.0 * 2f64.cbrt()]).unwrap();
        let b = SymMatrix::filled(2, 1.0);
        let p = ConstructionParams::new(2, 3, 2, 0.5, 1.0).unwrap();
        for x in [0.1, 1.0, 10.0] {
            assert!(verify_proof_step(&a, &b, x, &p, TOL).unwrap().is_psd(), "x = {x}");
        }
    }

    #[test]
    fn proof_step_requires_r_condition() {
        let a = SymMatrix::identity(2);
        let p = ConstructionParams::new(2, 2, 2, 0.5, 0.5).unwrap();
        assert!(matches!(
            verify_proof_step(&a, &a, 1.0, &p, TOL),
            Err(Error::RConditionInvalid { .. })
        ));
    }
}
