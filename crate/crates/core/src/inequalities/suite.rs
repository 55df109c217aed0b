//! Randomized in-region verification suites.
//!
//! Every trial draws its instance from stream `trial` of the suite seed, so a
//! suite run is reproducible and any failing trial can be replayed alone.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::search::DimRange;
use super::{
    check_furuta, check_grand_furuta, check_loewner_heinz, finite_difference_derivative, lemma_derivative,
    verify_proof_step, FurutaParams, FurutaSide, GrandFurutaParams, FINITE_DIFFERENCE_STEP,
};
use crate::construction::{check_r_condition, solve_construction, ConstructionParams};
use crate::error::Result;
use crate::matcore::generate::{gen_loewner_pair_from, random_pd, random_psd, rng_for};
use crate::matcore::{relative_frobenius_error, PsdReport};

/// In-region trials pass when `min_eigenvalue ≥ −SUITE_REL_TOL · scale`.
pub const SUITE_REL_TOL: f64 = 1e-8;

/// Derivative trials pass when the finite difference is within this relative error.
pub const LEMMA_REL_TOL: f64 = 1e-6;

const T_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
const MAX_RECORDED_FAILURES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SuiteKind {
    LoewnerHeinz,
    Furuta,
    GrandFuruta,
    ProofStep,
    Lemma,
    Theorem21,
}

impl SuiteKind {
    pub fn name(&self) -> &'static str {
        match self {
            SuiteKind::LoewnerHeinz => "lh",
            SuiteKind::Furuta => "furuta",
            SuiteKind::GrandFuruta => "grand-furuta",
            SuiteKind::ProofStep => "proofstep",
            SuiteKind::Lemma => "lemma",
            SuiteKind::Theorem21 => "theorem21",
        }
    }

    /// Lemma trials measure an error (lower is better); the rest a normalized
    /// minimum eigenvalue (higher is better).
    pub fn is_error_metric(&self) -> bool {
        matches!(self, SuiteKind::Lemma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub trials: u64,
    pub seed: u64,
    pub dims: DimRange,
    pub tol_scale: f64,
    /// Fixes `m` for the lemma suite; otherwise drawn from `1..=8`.
    pub lemma_m: Option<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialFailure {
    pub trial: u64,
    pub dim: usize,
    pub metric: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub kind: SuiteKind,
    pub trials: u64,
    pub passed: u64,
    pub failed: u64,
    /// Most negative normalized min eigenvalue, or largest relative error for the lemma suite.
    pub worst_metric: f64,
    pub worst_trial: u64,
    pub threshold: f64,
    /// The first few failures, in trial order.
    pub failures: Vec<TrialFailure>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

struct TrialOutcome {
    dim: usize,
    metric: f64,
    passed: bool,
    detail: String,
}

/// Valid construction parameters: `m, n, k ∈ 1..=max`, `t` on a grid and
/// `r = required_r + U[0, 2)`. Draws with no available bound are redrawn.
pub(crate) fn sample_valid_construction<R: Rng + ?Sized>(rng: &mut R, max_mnk: u32) -> ConstructionParams {
    loop {
        let m = rng.random_range(1..=max_mnk);
        let n = rng.random_range(1..=max_mnk);
        let k = rng.random_range(1..=max_mnk);
        let t = T_GRID[rng.random_range(0..T_GRID.len())];
        let noise = 2.0 * rng.random::<f64>();
        let probe = ConstructionParams { m, n, k, t, r: 0.0 };
        if let Some(req) = check_r_condition(&probe).required_r {
            return probe.with_r(req + noise);
        }
    }
}

fn psd_outcome(dim: usize, report: Result<PsdReport>, detail: impl FnOnce() -> String) -> TrialOutcome {
    match report {
        Ok(r) => TrialOutcome {
            dim,
            metric: r.normalized_min(),
            passed: r.within(SUITE_REL_TOL),
            detail: if r.within(SUITE_REL_TOL) {
                String::new()
            } else {
                detail()
            },
        },
        Err(e) => TrialOutcome {
            dim,
            metric: f64::NEG_INFINITY,
            passed: false,
            detail: format!("{}: {e}", detail()),
        },
    }
}

fn run_trial(kind: SuiteKind, cfg: &SuiteConfig, trial: u64) -> TrialOutcome {
    let mut rng = rng_for(cfg.seed, trial);
    let rng = &mut rng;
    let dim = cfg.dims.sample(rng);
    let tol = cfg.tol_scale;
    match kind {
        SuiteKind::LoewnerHeinz => {
            let (a, b) = gen_loewner_pair_from(rng, dim);
            let alpha = rng.random::<f64>();
            psd_outcome(dim, check_loewner_heinz(&a, &b, alpha, tol), || {
                format!("alpha={alpha}")
            })
        }
        SuiteKind::Furuta => {
            let (a, b) = gen_loewner_pair_from(rng, dim);
            let side = if rng.random::<bool>() {
                FurutaSide::ASide
            } else {
                FurutaSide::BSide
            };
            let p = 3.0 * rng.random::<f64>();
            let r = 3.0 * rng.random::<f64>();
            let q_min = ((p + r) / (1.0 + r)).max(1.0);
            let q = q_min + 2.0 * rng.random::<f64>();
            let fp = FurutaParams { p, q, r };
            psd_outcome(dim, check_furuta(&a, &b, &fp, side, tol), || format!("{side:?} {fp:?}"))
        }
        SuiteKind::GrandFuruta => {
            let (a, b) = gen_loewner_pair_from(rng, dim);
            let t = rng.random::<f64>();
            let p = 1.0 + 2.0 * rng.random::<f64>();
            let s = 1.0 + 2.0 * rng.random::<f64>();
            let r = t + 2.0 * rng.random::<f64>();
            let gp = GrandFurutaParams { t, p, s, r };
            psd_outcome(dim, check_grand_furuta(&a, &b, &gp, tol), || format!("{gp:?}"))
        }
        SuiteKind::ProofStep => {
            let params = sample_valid_construction(rng, 3);
            let a = random_pd(rng, dim, 0.5, 2.0);
            let rank = rng.random_range(1..=dim);
            let b = random_psd(rng, dim, rank);
            let x = 5.0 * rng.random::<f64>();
            psd_outcome(dim, verify_proof_step(&a, &b, x, &params, tol), || {
                format!("x={x} {params:?}")
            })
        }
        SuiteKind::Theorem21 => {
            let params = sample_valid_construction(rng, 4);
            let a = random_pd(rng, dim, 0.25, 4.0);
            let rank = rng.random_range(1..=dim);
            let b = random_psd(rng, dim, rank);
            let report = solve_construction(&a, &b, &params, tol).map(|o| o.report);
            psd_outcome(dim, report, || format!("{params:?}"))
        }
        SuiteKind::Lemma => {
            let m = cfg.lemma_m.unwrap_or_else(|| rng.random_range(1..=8));
            let (a, b) = gen_loewner_pair_from(rng, dim);
            let result = lemma_derivative(&a, &b, m).and_then(|exact| {
                let fd = finite_difference_derivative(&a, &b, m, FINITE_DIFFERENCE_STEP)?;
                Ok(relative_frobenius_error(&fd, &exact))
            });
            match result {
                Ok(err) => TrialOutcome {
                    dim,
                    metric: err,
                    passed: err <= LEMMA_REL_TOL,
                    detail: format!("m={m}"),
                },
                Err(e) => TrialOutcome {
                    dim,
                    metric: f64::INFINITY,
                    passed: false,
                    detail: format!("m={m}: {e}"),
                },
            }
        }
    }
}

/// Runs `cfg.trials` independent in-region trials of `kind`.
pub fn run_suite(kind: SuiteKind, cfg: &SuiteConfig) -> SuiteReport {
    let outcomes: Vec<TrialOutcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_trial(kind, cfg, trial))
        .collect();

    let error_metric = kind.is_error_metric();
    let mut report = SuiteReport {
        kind,
        trials: cfg.trials,
        passed: 0,
        failed: 0,
        worst_metric: if error_metric { 0.0 } else { f64::INFINITY },
        worst_trial: 0,
        threshold: if error_metric { LEMMA_REL_TOL } else { -SUITE_REL_TOL },
        failures: Vec::new(),
    };
    for (trial, o) in outcomes.into_iter().enumerate() {
        let trial = trial as u64;
        let worse = if error_metric {
            o.metric > report.worst_metric
        } else {
            o.metric < report.worst_metric
        };
        if worse {
            report.worst_metric = o.metric;
            report.worst_trial = trial;
        }
        if o.passed {
            report.passed += 1;
        } else {
            report.failed += 1;
            if report.failures.len() < MAX_RECORDED_FAILURES {
                report.failures.push(TrialFailure {
                    trial,
                    dim: o.dim,
                    metric: o.metric,
                    detail: o.detail,
                });
            }
        }
    }
    report
}
