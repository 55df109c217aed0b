//! Right-hand sides with guaranteed positive semidefinite solutions.
//!
//! For `A > 0`, `B ⩾ 0`, integers `m, n, k ≥ 1`, `t ∈ [0, 1]` and
//! `s = n / ((m−t)k + r)`, the right-hand side
//!
//! ```text
//! A^{rs/2} { Σ_{i=1}^{k} A^{(m−t)s(k−i)} [ A^{−ts/2} (Σ_{j=1}^{m} A^{s(m−j)} B A^{s(j−1)}) A^{−ts/2} ] A^{(m−t)s(i−1)} } A^{rs/2}
//! ```
//!
//! yields a PSD solution `X` of `Σ_{j=1}^{n} A^{n−j} X A^{j−1} = rhs` whenever
//! `r` satisfies the [`check_r_condition`] bound. With `t = 0, k = 1` this is
//! the single-sum form `A^{nr/(2(m+r))} (Σ_i A^{n(m−i)/(m+r)} B A^{n(i−1)/(m+r)}) A^{nr/(2(m+r))}`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::equation::{denominator, solve_spectral, EquationInstance, Solution};
use crate::error::{Error, Result};
use crate::matcore::{
    check_psd, check_psd_decomposed, spectral_decompose, PsdReport, SpectralDecomposition, SymMatrix,
};

/// `(m, n, k, t, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub m: u32,
    pub n: u32,
    pub k: u32,
    pub t: f64,
    pub r: f64,
}

impl ConstructionParams {
    pub fn new(m: u32, n: u32, k: u32, t: f64, r: f64) -> Result<Self> {
        let p = Self { m, n, k, t, r };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 || self.k == 0 {
            return Err(Error::InvalidParams(format!(
                "m, n, k must be positive (got m={}, n={}, k={})",
                self.m, self.n, self.k
            )));
        }
        if !(0.0..=1.0).contains(&self.t) {
            return Err(Error::InvalidParams(format!("t must lie in [0, 1], got {}", self.t)));
        }
        if !self.r.is_finite() {
            return Err(Error::InvalidParams(format!("r must be finite, got {}", self.r)));
        }
        Ok(())
    }

    /// `(m − t)k + r`.
    pub fn exponent_base(&self) -> f64 {
        (self.m as f64 - self.t) * self.k as f64 + self.r
    }

    /// Same parameters with a different `r`.
    pub fn with_r(&self, r: f64) -> Self {
        Self { r, ..*self }
    }

    fn checked_base(&self) -> Result<f64> {
        self.validate()?;
        let base = self.exponent_base();
        if !(base > 0.0) {
            return Err(Error::DegenerateExponent { value: base });
        }
        Ok(base)
    }
}

/// Which case of the r-condition applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RBranch {
    /// `(1−t)n > (m−t)k`: bound is `t`.
    NGeq,
    /// `(m−t)k > (1−t)n` with `n ≥ 2`: bound is `max(((m−t)k − (1−t)n)/(n−1), t)`.
    MGeq,
    /// `(1−t)n = (m−t)k`: both cases agree on `t`.
    Boundary,
    /// `(m−t)k > (1−t)` with `n = 1`: no bound is available.
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RCondition {
    pub branch: RBranch,
    /// `None` on the `Undefined` branch.
    pub required_r: Option<f64>,
    pub valid: bool,
}

pub fn check_r_condition(p: &ConstructionParams) -> RCondition {
    let t = p.t;
    let lhs = (1.0 - t) * p.n as f64;
    let rhs = (p.m as f64 - t) * p.k as f64;
    let gap = rhs - lhs;
    let (branch, required) = if gap.abs() <= 1e-12 * rhs.abs().max(1.0) {
        (RBranch::Boundary, Some(t))
    } else if gap < 0.0 {
        (RBranch::NGeq, Some(t))
    } else if p.n >= 2 {
        (RBranch::MGeq, Some((gap / (p.n as f64 - 1.0)).max(t)))
    } else {
        (RBranch::Undefined, None)
    };
    RCondition {
        branch,
        required_r: required,
        valid: required.is_some_and(|req| p.r >= req),
    }
}

/// `Σ_{j=1}^{L} P[L−j] · middle · P[j−1]` for `powers = [P⁰, …, P^{L−1}]`.
fn twisted_sum(powers: &[SymMatrix], middle: &DMatrix<f64>) -> DMatrix<f64> {
    let len = powers.len();
    let dim = middle.nrows();
    let mut acc = DMatrix::zeros(dim, dim);
    for j in 1..=len {
        acc += powers[len - j].as_matrix() * middle * powers[j - 1].as_matrix();
    }
    acc
}

/// `[A^{0}, A^{step}, …, A^{(count−1)·step}]`.
fn power_ladder(spec: &SpectralDecomposition, step: f64, count: u32, tol_scale: f64) -> Result<Vec<SymMatrix>> {
    (0..count).map(|i| spec.power(step * i as f64, tol_scale)).collect()
}

/// The braced construction with every exponent of `A` multiplied by `unit`.
/// `unit = s` gives the substituted form, `unit = 1` the pre-substitution form.
fn scaled_rhs(
    spec: &SpectralDecomposition,
    b: &SymMatrix,
    p: &ConstructionParams,
    unit: f64,
    tol_scale: f64,
) -> Result<SymMatrix> {
    if spec.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: spec.dim(),
            right: b.dim(),
        });
    }
    let mt = p.m as f64 - p.t;

    let inner_powers = power_ladder(spec, unit, p.m, tol_scale)?;
    let inner = twisted_sum(&inner_powers, b.as_matrix());

    let damp = spec.power(-p.t * unit / 2.0, tol_scale)?;
    let core = damp.as_matrix() * inner * damp.as_matrix();

    let outer_powers = power_ladder(spec, mt * unit, p.k, tol_scale)?;
    let outer = twisted_sum(&outer_powers, &core);

    let frame = spec.power(p.r * unit / 2.0, tol_scale)?;
    SymMatrix::from_product(frame.as_matrix() * outer * frame.as_matrix())
}

fn positive_definite_spectrum(a: &SymMatrix, tol_scale: f64) -> Result<SpectralDecomposition> {
    let spec = spectral_decompose(a)?;
    let report = check_psd_decomposed(&spec, tol_scale);
    if !report.is_pd() {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: report.min_eigenvalue,
        });
    }
    Ok(spec)
}

fn rhs_from_spectrum(
    spec: &SpectralDecomposition,
    b: &SymMatrix,
    p: &ConstructionParams,
    tol_scale: f64,
) -> Result<SymMatrix> {
    let base = p.checked_base()?;
    scaled_rhs(spec, b, p, p.n as f64 / base, tol_scale)
}

/// Right-hand side for the equation with coefficient `A` and `n` summands.
///
/// Does not require the r-condition; callers inspect [`check_r_condition`]
/// separately.
pub fn build_rhs(a: &SymMatrix, b: &SymMatrix, p: &ConstructionParams, tol_scale: f64) -> Result<SymMatrix> {
    let spec = positive_definite_spectrum(a, tol_scale)?;
    rhs_from_spectrum(&spec, b, p, tol_scale)
}

/// Pre-substitution pair `(G, rhs)` with `G = A^{((m−t)k+r)/n}` and
///
/// ```text
/// rhs = A^{r/2} { Σ_i A^{(m−t)(k−i)} [A^{−t/2} (Σ_j A^{m−j} B A^{j−1}) A^{−t/2}] A^{(m−t)(i−1)} } A^{r/2}
/// ```
///
/// so that `rhs == build_rhs(G, B, p)`, and solving with coefficient `G`
/// gives the same `X` either way.
pub fn build_rhs_raw(
    a: &SymMatrix,
    b: &SymMatrix,
    p: &ConstructionParams,
    tol_scale: f64,
) -> Result<(SymMatrix, SymMatrix)> {
    let base = p.checked_base()?;
    let spec = positive_definite_spectrum(a, tol_scale)?;
    let g = spec.power(base / p.n as f64, tol_scale)?;
    let rhs = scaled_rhs(&spec, b, p, 1.0, tol_scale)?;
    Ok((g, rhs))
}

/// Entrywise solution for `A = diag(eigs)` and `B` all ones, i.e. the
/// solution of `Σ_j G^{n−j} X G^{j−1} = rhs` for the pair from [`build_rhs_raw`]:
///
/// ```text
/// X[p][q] = (a_p a_q)^{(r−t)/2} (Σ_i a_p^{(m−t)(k−i)} a_q^{(m−t)(i−1)}) (Σ_j a_p^{m−j} a_q^{j−1})
///           / Σ_j a_p^{((m−t)k+r)(n−j)/n} a_q^{((m−t)k+r)(j−1)/n}
/// ```
pub fn closed_form_diagonal(eigs: &[f64], p: &ConstructionParams) -> Result<SymMatrix> {
    if eigs.is_empty() {
        return Err(Error::InvalidDimension("dimension must be at least 1".into()));
    }
    if let Some((index, &value)) = eigs.iter().enumerate().find(|(_, v)| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::NonPositiveEigenvalue { index, value });
    }
    let base = p.checked_base()?;
    let mt = p.m as f64 - p.t;
    let g = base / p.n as f64;
    let l = eigs.len();
    let x = DMatrix::from_fn(l, l, |pi, qi| {
        let (ap, aq) = (eigs[pi], eigs[qi]);
        let frame = (ap * aq).powf((p.r - p.t) / 2.0);
        let outer = denominator(ap.powf(mt), aq.powf(mt), p.k);
        let inner = denominator(ap, aq, p.m);
        let denom = denominator(ap.powf(g), aq.powf(g), p.n);
        frame * outer * inner / denom
    });
    SymMatrix::from_product(x)
}

/// Everything [`solve_construction`] computes.
#[derive(Debug, Clone, Serialize)]
pub struct ConstructionOutcome {
    pub rhs: SymMatrix,
    pub solution: Solution,
    pub report: PsdReport,
    pub condition: RCondition,
}

/// Builds the right-hand side, solves with coefficient `A`, certifies `X`.
///
/// When `condition.valid`, `report` is PSD up to round-off. Otherwise no
/// verdict is implied.
pub fn solve_construction(
    a: &SymMatrix,
    b: &SymMatrix,
    p: &ConstructionParams,
    tol_scale: f64,
) -> Result<ConstructionOutcome> {
    p.validate()?;
    a.check_dim(b)?;
    let b_report = check_psd(b, tol_scale)?;
    if !b_report.is_psd() {
        return Err(Error::BNotPsd {
            min_eigenvalue: b_report.min_eigenvalue,
        });
    }
    let spec = positive_definite_spectrum(a, tol_scale)?;
    let rhs = rhs_from_spectrum(&spec, b, p, tol_scale)?;
    let inst = EquationInstance::with_spectrum(a.clone(), spec, p.n, rhs.clone(), tol_scale)?;
    let solution = solve_spectral(&inst)?;
    let report = check_psd(&solution.x, tol_scale)?;
    Ok(ConstructionOutcome {
        rhs,
        solution,
        report,
        condition: check_r_condition(p),
    })
}
