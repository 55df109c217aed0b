//! Built-in worked examples with their known reference values.

use psdeq_core::matcore::relative_max_entry_error;
use psdeq_core::{
    build_rhs, build_rhs_raw, check_psd, check_r_condition, closed_form_diagonal, solve_spectral, spectral_decompose,
    ConstructionParams, EquationInstance, SymMatrix,
};

use crate::failure::Failure;
use crate::report::{Record, RunReport};
use crate::solve::{r_condition_warning, report_solution};
use crate::Ctx;

/// Reference eigenvalues carry four decimals.
pub const EIGENVALUE_TOL: f64 = 5e-5;
const EXACT_REL_TOL: f64 = 1e-12;
const REBUILD_REL_TOL: f64 = 1e-10;

fn rel_err(actual: f64, expected: f64) -> f64 {
    (actual - expected).abs() / expected.abs().max(f64::MIN_POSITIVE)
}

/// Largest per-entry relative error; the reference has no zero entries.
fn entrywise_rel(actual: &SymMatrix, reference: &SymMatrix) -> f64 {
    let n = reference.dim();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| rel_err(actual.get(i, j), reference.get(i, j)))
        .fold(0.0, f64::max)
}

fn sorted_eigenvalues(m: &SymMatrix) -> Result<Vec<f64>, Failure> {
    Ok(spectral_decompose(m)?.eigenvalues().to_vec())
}

/// Compares ascending eigenvalues against the reference ones (also ascending).
fn check_eigenvalues(report: &mut RunReport, label: &str, got: &[f64], reference: &[f64]) {
    for (i, (&g, &e)) in got.iter().zip(reference).enumerate() {
        report.check_abs(&format!("{label} eigenvalue {}", i + 1), g, e, EIGENVALUE_TOL);
    }
}

fn solve(ctx: &Ctx, a: SymMatrix, n: u32, rhs: SymMatrix) -> Result<(psdeq_core::Solution, SymMatrix), Failure> {
    let inst = EquationInstance::new(a, n, rhs, ctx.tol_scale)?;
    let sol = solve_spectral(&inst)?;
    Ok((sol, inst.b().clone()))
}

pub fn remark22(ctx: &Ctx, report: &mut RunReport) -> Result<(), Failure> {
    let a = SymMatrix::from_diagonal(&[1.0, 2.0])?;
    let b = SymMatrix::filled(2, 1.0);
    let p = ConstructionParams::new(2, 2, 2, 0.5, 0.5)?;
    let cond = check_r_condition(&p);
    report.push(Record::Params { params: p });
    report.push(Record::RCondition { condition: cond });
    report.check_flag("r-condition fails for these parameters", !cond.valid);

    let (g, rhs) = build_rhs_raw(&a, &b, &p, ctx.tol_scale)?;
    report.matrix("A", &a);
    report.matrix("G", &g);
    report.matrix("rhs", &rhs);
    let sqrt2 = 2f64.sqrt();
    let off = 3.0 + 6.0 * sqrt2;
    let corner = 16.0 * sqrt2;
    for (label, i, j, expected) in [
        ("rhs[1,1]", 0, 0, 4.0),
        ("rhs[1,2]", 0, 1, off),
        ("rhs[2,2]", 1, 1, corner),
    ] {
        let v = rhs.get(i, j);
        report.check(label, v, expected, rel_err(v, expected), EXACT_REL_TOL);
    }
    let det = rhs.get(0, 0) * rhs.get(1, 1) - rhs.get(0, 1) * rhs.get(1, 0);
    report.check(
        "rhs trace",
        rhs.trace(),
        4.0 + corner,
        rel_err(rhs.trace(), 4.0 + corner),
        EXACT_REL_TOL,
    );
    let det_expected = 4.0 * corner - off * off;
    report.check(
        "rhs determinant",
        det,
        det_expected,
        rel_err(det, det_expected),
        EXACT_REL_TOL,
    );

    let (sol, rhs) = solve(ctx, g, p.n, rhs)?;
    report_solution(ctx, report, &sol, &rhs)?;
    check_eigenvalues(report, "X", &sorted_eigenvalues(&sol.x)?, &[-0.0372, 5.4007]);
    let verdict = check_psd(&sol.x, ctx.tol_scale)?;
    report.check_flag("X is not positive semidefinite", !verdict.is_psd());
    Ok(())
}

pub fn remark23(ctx: &Ctx, report: &mut RunReport) -> Result<(), Failure> {
    let cbrt2 = 2f64.cbrt();
    let a = SymMatrix::from_diagonal(&[1.0, 2.0 * cbrt2])?;
    let off = 3.0 * 2f64.powf(0.25) + 6.0 * 2f64.powf(0.75);
    let y = SymMatrix::from_row_major(2, &[4.0, off, off, 32.0])?;
    report.matrix("A", &a);
    report.matrix("Y", &y);
    let y_eig = sorted_eigenvalues(&y)?;
    report.eigenvalues("Y", &y_eig);
    check_eigenvalues(report, "Y", &y_eig, &[-1.5589, 37.5589]);

    let (sol, y) = solve(ctx, a.clone(), 3, y)?;
    report_solution(ctx, report, &sol, &y)?;
    check_eigenvalues(report, "X", &sorted_eigenvalues(&sol.x)?, &[0.1119, 2.9013]);
    report.check_flag("X is positive semidefinite", check_psd(&sol.x, ctx.tol_scale)?.is_psd());

    // Y is what the construction produces from the all-ones B
    let p = ConstructionParams::new(2, 3, 2, 0.5, 1.0)?;
    let cond = check_r_condition(&p);
    report.push(Record::Params { params: p });
    report.push(Record::RCondition { condition: cond });
    report.check_flag("r-condition holds", cond.valid);
    let rebuilt = build_rhs(&a, &SymMatrix::filled(2, 1.0), &p, ctx.tol_scale)?;
    report.matrix("rebuilt Y", &rebuilt);
    let err = entrywise_rel(&rebuilt, &y);
    report.check(
        "rebuilt Y vs Y (max entry relative error)",
        err,
        0.0,
        err,
        REBUILD_REL_TOL,
    );
    Ok(())
}

pub fn example21(ctx: &Ctx, report: &mut RunReport, eigs: &[f64], p: ConstructionParams) -> Result<(), Failure> {
    p.validate()?;
    if let Some(&bad) = eigs.iter().find(|&&e| !(e > 0.0 && e.is_finite())) {
        return Err(Failure::precondition(format!(
            "eigenvalues of A must be positive and finite, got {bad}"
        )));
    }
    let a = SymMatrix::from_diagonal(eigs)?;
    let b = SymMatrix::filled(eigs.len(), 1.0);
    let cond = check_r_condition(&p);
    report.push(Record::Params { params: p });
    report.push(Record::RCondition { condition: cond });
    if let Some(w) = r_condition_warning(&p, &cond) {
        report.warn(w);
    }

    let (g, rhs) = build_rhs_raw(&a, &b, &p, ctx.tol_scale)?;
    report.matrix("A", &a);
    report.matrix("G", &g);
    report.matrix("rhs", &rhs);
    let (sol, rhs) = solve(ctx, g, p.n, rhs)?;
    report_solution(ctx, report, &sol, &rhs)?;

    let closed = closed_form_diagonal(eigs, &p)?;
    report.matrix("X (closed form)", &closed);
    let err = relative_max_entry_error(&closed, &sol.x);
    report.check(
        "closed form vs pipeline (relative entry error)",
        err,
        0.0,
        err,
        REBUILD_REL_TOL,
    );

    if p.m == 1 && p.n == 1 && p.k == 1 && p.t == 0.0 && p.r == 0.0 {
        let err = (sol.x.as_matrix() - b.as_matrix()).amax();
        report.check("X equals B", err, 0.0, err, EXACT_REL_TOL);
    }
    Ok(())
}
