use std::fmt::Write as _;

use psdeq_core::inequalities::{InequalityWitness, SuiteReport, WitnessParams};
use psdeq_core::{ConstructionParams, PsdReport, PsdVerdict, RCondition, SymMatrix};
use serde::Serialize;

use crate::failure::EXIT_OK;
use crate::matrix_io::{InputDigest, MatrixDocument};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed,
    Error,
}

/// One output item. Reports are a list of these, in the order produced.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Record {
    Matrix {
        label: String,
        matrix: MatrixDocument,
    },
    Eigenvalues {
        label: String,
        values: Vec<f64>,
    },
    Verdict {
        label: String,
        verdict: PsdVerdict,
        min_eigenvalue: f64,
        tolerance: f64,
        scale: f64,
    },
    Scalar {
        label: String,
        value: f64,
    },
    Params {
        params: ConstructionParams,
    },
    RCondition {
        #[serde(flatten)]
        condition: RCondition,
    },
    Check {
        label: String,
        actual: f64,
        expected: f64,
        error: f64,
        tolerance: f64,
        pass: bool,
    },
    Suite {
        suite: SuiteReport,
    },
    Search {
        inequality: String,
        trials_requested: u64,
        trials_run: u64,
        errors: u64,
        worst_normalized_min: f64,
        found: bool,
    },
    Witness {
        #[serde(flatten)]
        witness: InequalityWitness,
    },
    Note {
        text: String,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub seed: u64,
    pub tol_scale: f64,
    pub inputs: Vec<InputDigest>,
    pub records: Vec<Record>,
    pub warnings: Vec<String>,
    pub status: Status,
    pub exit_code: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub timing_ms: f64,
}

impl RunReport {
    pub fn new(command: Vec<String>, seed: u64, tol_scale: f64) -> Self {
        RunReport {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            tol_scale,
            inputs: Vec::new(),
            records: Vec::new(),
            warnings: Vec::new(),
            status: Status::Ok,
            exit_code: EXIT_OK,
            error: None,
            timing_ms: 0.0,
        }
    }

    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn warn(&mut self, w: impl Into<String>) {
        self.warnings.push(w.into());
    }

    pub fn matrix(&mut self, label: &str, m: &SymMatrix) {
        self.push(Record::Matrix {
            label: label.to_owned(),
            matrix: MatrixDocument::from_matrix(m, Some(label)),
        });
    }

    pub fn eigenvalues(&mut self, label: &str, values: &[f64]) {
        self.push(Record::Eigenvalues {
            label: label.to_owned(),
            values: values.to_vec(),
        });
    }

    pub fn verdict(&mut self, label: &str, r: &PsdReport) {
        self.push(Record::Verdict {
            label: label.to_owned(),
            verdict: r.verdict,
            min_eigenvalue: r.min_eigenvalue,
            tolerance: r.tolerance_used,
            scale: r.scale,
        });
    }

    pub fn scalar(&mut self, label: &str, value: f64) {
        self.push(Record::Scalar {
            label: label.to_owned(),
            value,
        });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.push(Record::Note { text: text.into() });
    }

    /// Records `|actual - expected| ≤ tolerance` and returns whether it held.
    pub fn check_abs(&mut self, label: &str, actual: f64, expected: f64, tolerance: f64) -> bool {
        self.check(label, actual, expected, (actual - expected).abs(), tolerance)
    }

    /// Records an already-computed error measure against its tolerance.
    pub fn check(&mut self, label: &str, actual: f64, expected: f64, error: f64, tolerance: f64) -> bool {
        let pass = error <= tolerance;
        self.push(Record::Check {
            label: label.to_owned(),
            actual,
            expected,
            error,
            tolerance,
            pass,
        });
        pass
    }

    /// Boolean checks are recorded as 1/0 against an expected 1.
    pub fn check_flag(&mut self, label: &str, holds: bool) -> bool {
        let v = if holds { 1.0 } else { 0.0 };
        self.check(label, v, 1.0, 1.0 - v, 0.0)
    }

    pub fn failed_checks(&self) -> usize {
        self.records
            .iter()
            .filter(|r| matches!(r, Record::Check { pass: false, .. }))
            .count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Line-oriented human rendering; numbers at 6 significant digits.
    pub fn to_human(&self) -> String {
        let mut out = String::new();
        for input in &self.inputs {
            let _ = writeln!(
                out,
                "input {}: {} (dim {}, sha256 {})",
                input.role, input.path, input.dim, input.sha256
            );
        }
        for r in &self.records {
            out.push_str(&render_record(r));
            out.push('\n');
        }
        let status = match self.status {
            Status::Ok => "ok",
            Status::Failed => "FAILED",
            Status::Error => "ERROR",
        };
        match &self.error {
            Some(e) => {
                let _ = writeln!(out, "status: {status} (exit {}): {e}", self.exit_code);
            }
            None => {
                let _ = writeln!(out, "status: {status} (exit {})", self.exit_code);
            }
        }
        out
    }
}

/// `%.6g`-style formatting.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_owned()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{e}")
    }
}

fn list(values: &[f64]) -> String {
    let inner: Vec<String> = values.iter().map(|&v| sig6(v)).collect();
    format!("[{}]", inner.join(", "))
}

fn matrix_rows(doc: &MatrixDocument) -> String {
    let rows: Vec<String> = doc.data.chunks(doc.dim.max(1)).map(list).collect();
    format!("[{}]", rows.join(", "))
}

fn verdict_name(v: PsdVerdict) -> &'static str {
    match v {
        PsdVerdict::PositiveDefinite => "positive definite",
        PsdVerdict::PositiveSemidefinite => "positive semidefinite",
        PsdVerdict::Indefinite => "NOT positive semidefinite",
    }
}

fn params_text(p: &ConstructionParams) -> String {
    format!("m={} n={} k={} t={} r={}", p.m, p.n, p.k, sig6(p.t), sig6(p.r))
}

fn witness_params_text(w: &WitnessParams) -> String {
    match w {
        WitnessParams::LoewnerHeinz { alpha } => format!("alpha={}", sig6(*alpha)),
        WitnessParams::Furuta { params, side } => format!(
            "p={} q={} r={} side={side:?}",
            sig6(params.p),
            sig6(params.q),
            sig6(params.r)
        ),
        WitnessParams::GrandFuruta { params } => format!(
            "t={} p={} s={} r={}",
            sig6(params.t),
            sig6(params.p),
            sig6(params.s),
            sig6(params.r)
        ),
        WitnessParams::Theorem21 { params } => params_text(params),
    }
}

fn render_record(r: &Record) -> String {
    match r {
        Record::Matrix { label, matrix } => format!("matrix {label} = {}", matrix_rows(matrix)),
        Record::Eigenvalues { label, values } => format!("eigenvalues {label} = {}", list(values)),
        Record::Verdict {
            label,
            verdict,
            min_eigenvalue,
            tolerance,
            ..
        } => format!(
            "verdict {label}: {} (min eigenvalue {}, tolerance {})",
            verdict_name(*verdict),
            sig6(*min_eigenvalue),
            sig6(*tolerance)
        ),
        Record::Scalar { label, value } => format!("{label} = {}", sig6(*value)),
        Record::Params { params } => format!("params {}", params_text(params)),
        Record::RCondition { condition } => {
            let required = condition.required_r.map_or("none".to_owned(), sig6);
            format!(
                "r-condition: branch {:?}, required r >= {required}, {}",
                condition.branch,
                if condition.valid { "valid" } else { "INVALID" }
            )
        }
        Record::Check {
            label,
            actual,
            expected,
            error,
            tolerance,
            pass,
        } => format!(
            "check {label}: {} (got {}, expected {}, error {:.2e} <= {:.1e})",
            if *pass { "pass" } else { "FAIL" },
            sig6(*actual),
            sig6(*expected),
            error,
            tolerance
        ),
        Record::Suite { suite: report } => format!(
            "suite {}: {}/{} passed, worst {} (trial {}), threshold {}",
            report.kind.name(),
            report.passed,
            report.trials,
            sig6(report.worst_metric),
            report.worst_trial,
            sig6(report.threshold)
        ),
        Record::Search {
            inequality,
            trials_requested,
            trials_run,
            errors,
            worst_normalized_min,
            found,
        } => format!(
            "search {inequality}: {} after {trials_run}/{trials_requested} trials ({errors} errors), worst normalized min eigenvalue {}",
            if *found { "witness found" } else { "no witness" },
            sig6(*worst_normalized_min)
        ),
        Record::Witness { witness } => format!(
            "witness {}: {} seed={} trial={} dim={} min eigenvalue {} (scale {}){}\n  A = {}\n  B = {}",
            witness.inequality_id.name(),
            witness_params_text(&witness.parameters),
            witness.seed,
            witness.trial,
            witness.a.dim(),
            sig6(witness.min_eigenvalue),
            sig6(witness.scale),
            if witness.in_validity_region {
                " [inside validity region]"
            } else {
                ""
            },
            matrix_rows(&MatrixDocument::from_matrix(&witness.a, None)),
            matrix_rows(&MatrixDocument::from_matrix(&witness.b, None)),
        ),
        Record::Note { text } => format!("note: {text}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(5.400737), "5.40074");
        assert_eq!(sig6(-0.0371510), "-0.037151");
        assert_eq!(sig6(1.0), "1");
        assert_eq!(sig6(22.627417), "22.6274");
        assert_eq!(sig6(1.5e-10), "1.5e-10");
        assert_eq!(sig6(123456789.0), "1.23457e8");
        assert_eq!(sig6(-1e-20), "-1e-20");
        assert_eq!(sig6(0.5), "0.5");
    }
}
