use std::path::Path;

use psdeq_core::inequalities::SUITE_REL_TOL;
use psdeq_core::matcore::relative_frobenius_error;
use psdeq_core::{
    build_rhs, build_rhs_raw, check_psd, check_r_condition, solve_kronecker, solve_spectral, spectral_decompose,
    ConstructionParams, EquationInstance, RCondition, Solution, SymMatrix,
};

use crate::failure::Failure;
use crate::matrix_io::load_matrix;
use crate::report::{sig6, Record, RunReport};
use crate::Ctx;

/// Spectral and stacked-system solutions must agree to this relative Frobenius error.
pub const ORACLE_REL_TOL: f64 = 1e-9;

pub fn load(report: &mut RunReport, role: &str, path: &Path) -> Result<SymMatrix, Failure> {
    let loaded = load_matrix(role, path)?;
    report.inputs.push(loaded.digest);
    if let Some(w) = loaded.warning {
        report.warn(w);
    }
    Ok(loaded.matrix)
}

pub fn require_pd(ctx: &Ctx, role: &str, m: &SymMatrix) -> Result<(), Failure> {
    let r = check_psd(m, ctx.tol_scale)?;
    if r.is_pd() {
        Ok(())
    } else {
        Err(Failure::precondition(format!(
            "{role} is not positive definite (min eigenvalue {})",
            sig6(r.min_eigenvalue)
        )))
    }
}

fn eigenvalues(m: &SymMatrix) -> Result<Vec<f64>, Failure> {
    Ok(spectral_decompose(m)?.eigenvalues().to_vec())
}

/// X, its spectrum, the residual and the PSD verdict.
pub fn report_solution(ctx: &Ctx, report: &mut RunReport, sol: &Solution, b: &SymMatrix) -> Result<(), Failure> {
    report.matrix("X", &sol.x);
    report.eigenvalues("X", &eigenvalues(&sol.x)?);
    report.scalar("relative residual", sol.relative_residual(b));
    report.verdict("X", &check_psd(&sol.x, ctx.tol_scale)?);
    Ok(())
}

pub fn cmd_solve(ctx: &Ctx, report: &mut RunReport, a: &Path, b: &Path, n: u32, oracle: bool) -> Result<(), Failure> {
    let a = load(report, "A", a)?;
    let b = load(report, "B", b)?;
    if a.dim() != b.dim() {
        return Err(dim_mismatch(&a, &b));
    }
    require_pd(ctx, "A", &a)?;
    let inst = EquationInstance::new(a, n, b, ctx.tol_scale)?;
    let sol = solve_spectral(&inst)?;
    report_solution(ctx, report, &sol, inst.b())?;
    if oracle {
        let reference = solve_kronecker(&inst)?;
        report.matrix("X (stacked system)", &reference.x);
        let rel = relative_frobenius_error(&sol.x, &reference.x);
        report.check("spectral vs stacked system", rel, 0.0, rel, ORACLE_REL_TOL);
    }
    Ok(())
}

fn dim_mismatch(a: &SymMatrix, b: &SymMatrix) -> Failure {
    Failure::input(format!("A is {0}x{0} but B is {1}x{1}", a.dim(), b.dim()))
}

pub struct BuildOptions {
    pub raw: bool,
    pub solve: bool,
    pub allow_indefinite_b: bool,
}

pub fn r_condition_warning(p: &ConstructionParams, cond: &RCondition) -> Option<String> {
    if cond.valid {
        return None;
    }
    let why = match cond.required_r {
        Some(req) => format!("r = {} is below the required {req} ({:?} branch)", p.r, cond.branch),
        None => "no admissible r exists for n = 1 with (m-t)k > 1-t".to_owned(),
    };
    Some(format!(
        "*** r-condition VIOLATED: {why}; the solution X is not guaranteed to be positive semidefinite ***"
    ))
}

pub fn cmd_build_rhs(
    ctx: &Ctx,
    report: &mut RunReport,
    a: &Path,
    b: &Path,
    params: ConstructionParams,
    opts: &BuildOptions,
) -> Result<(), Failure> {
    params.validate()?;
    let a = load(report, "A", a)?;
    let b = load(report, "B", b)?;
    if a.dim() != b.dim() {
        return Err(dim_mismatch(&a, &b));
    }
    require_pd(ctx, "A", &a)?;
    let b_report = check_psd(&b, ctx.tol_scale)?;
    if !b_report.is_psd() {
        let msg = format!(
            "B is not positive semidefinite (min eigenvalue {})",
            sig6(b_report.min_eigenvalue)
        );
        if !opts.allow_indefinite_b {
            return Err(Failure::precondition(msg));
        }
        report.warn(format!("{msg}; continuing because indefinite B was allowed"));
    }

    let cond = check_r_condition(&params);
    report.push(Record::Params { params });
    report.push(Record::RCondition { condition: cond });
    if let Some(w) = r_condition_warning(&params, &cond) {
        report.warn(w);
    }

    let (coefficient, rhs) = if opts.raw {
        let (g, rhs) = build_rhs_raw(&a, &b, &params, ctx.tol_scale)?;
        report.matrix("G", &g);
        (g, rhs)
    } else {
        let rhs = build_rhs(&a, &b, &params, ctx.tol_scale)?;
        (a, rhs)
    };
    report.matrix("rhs", &rhs);
    report.eigenvalues("rhs", &eigenvalues(&rhs)?);

    if opts.solve {
        let inst = EquationInstance::new(coefficient, params.n, rhs, ctx.tol_scale)?;
        let sol = solve_spectral(&inst)?;
        report_solution(ctx, report, &sol, inst.b())?;
        let x_report = check_psd(&sol.x, ctx.tol_scale)?;
        if cond.valid && b_report.is_psd() && !x_report.within(SUITE_REL_TOL) {
            report.warn(format!(
                "X has min eigenvalue {} although the r-condition holds; this indicates a numerical problem",
                sig6(x_report.min_eigenvalue)
            ));
        }
    }
    Ok(())
}
