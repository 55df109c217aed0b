//! Solver, constructor and certifier for the linear matrix equation
//!
//! ```text
//! Σ_{j=1}^{n} A^{n−j} X A^{j−1} = B
//! ```
//!
//! for real symmetric `A > 0`, together with the family of right-hand sides
//! for which the solution is guaranteed positive semidefinite, and numerical
//! checks of the Löwner–Heinz, Furuta and grand Furuta inequalities that
//! underpin that guarantee.
//!
//! * [`matcore`]: symmetric matrices, spectra, `A^α`, Löwner order.
//! * [`equation`]: spectral solver and a stacked-system oracle.
//! * [`construction`]: special right-hand sides and the r-condition.
//! * [`inequalities`]: inequality checks, randomized suites, counterexample search.

// `!(x > 0.0)` is used on purpose so that NaN falls into the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod construction;
pub mod equation;
pub mod error;
pub mod inequalities;
pub mod matcore;
pub mod tolerance;

pub use construction::{
    build_rhs, build_rhs_raw, check_r_condition, closed_form_diagonal, solve_construction, ConstructionParams, RBranch,
    RCondition,
};
pub use equation::{apply_lhs, denominator, solve_kronecker, solve_spectral, EquationInstance, Solution, SolveMethod};
pub use error::{Error, Result};
pub use inequalities::{
    check_furuta, check_grand_furuta, check_loewner_heinz, counterexample_search, lemma_derivative, verify_proof_step,
    FurutaParams, FurutaSide, GrandFurutaParams, InequalityId, InequalityWitness, SamplerSpec,
};
pub use matcore::{
    check_psd, loewner_ge, matrix_power, spectral_decompose, PsdReport, PsdVerdict, SpectralDecomposition, SymMatrix,
};
