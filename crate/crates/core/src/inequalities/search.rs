//! Randomized search for violations outside validity regions.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    check_furuta, check_grand_furuta, check_loewner_heinz, FurutaParams, FurutaSide, GrandFurutaParams, InequalityId,
};
use crate::construction::{check_r_condition, solve_construction, ConstructionParams};
use crate::error::Result;
use crate::matcore::generate::{gen_loewner_pair_from, random_pd, random_psd, rng_for};
use crate::matcore::{PsdReport, SymMatrix};

/// A witness needs `min_eigenvalue < −WITNESS_REL_THRESHOLD · scale`.
pub const WITNESS_REL_THRESHOLD: f64 = 1e-6;

const CHUNK: usize = 64;

/// Closed interval sampled uniformly; `lo == hi` pins the value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * rng.random::<f64>()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimRange {
    pub min: usize,
    pub max: usize,
}

impl DimRange {
    pub fn new(min: usize, max: usize) -> Self {
        assert!(min >= 1 && min <= max, "bad dimension range {min}..{max}");
        Self { min, max }
    }

    pub fn fixed(dim: usize) -> Self {
        Self::new(dim, dim)
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.random_range(self.min..=self.max)
    }
}

/// Fixed instances evaluated verbatim on every trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Probe {
    /// `A = diag(1, 2)^{7/4}`, `B` all ones, `(m, n, k, t, r) = (2, 2, 2, 1/2, 1/2)`.
    Remark22,
}

/// Where and how to sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SamplerSpec {
    LoewnerHeinz {
        alpha: Interval,
        dims: DimRange,
    },
    Furuta {
        /// `None` picks a side at random per trial.
        side: Option<FurutaSide>,
        p: Interval,
        q: Interval,
        r: Interval,
        dims: DimRange,
    },
    GrandFuruta {
        t: Interval,
        p: Interval,
        s: Interval,
        r: Interval,
        dims: DimRange,
    },
    /// Construction with `r = fraction · required_r` (or `fraction · (m−t)k`
    /// where no bound exists).
    Theorem21 {
        max_m: u32,
        max_n: u32,
        max_k: u32,
        t: Interval,
        r_fraction: Interval,
        dims: DimRange,
    },
    Probe(Probe),
}

impl SamplerSpec {
    pub fn id(&self) -> InequalityId {
        match self {
            SamplerSpec::LoewnerHeinz { .. } => InequalityId::LoewnerHeinz,
            SamplerSpec::Furuta { .. } => InequalityId::Furuta,
            SamplerSpec::GrandFuruta { .. } => InequalityId::GrandFuruta,
            SamplerSpec::Theorem21 { .. } | SamplerSpec::Probe(_) => InequalityId::Theorem21,
        }
    }

    /// Whether the sampling box contains any point outside the validity region.
    pub fn reaches_outside_validity(&self) -> bool {
        match *self {
            SamplerSpec::LoewnerHeinz { alpha, .. } => alpha.lo < 0.0 || alpha.hi > 1.0,
            SamplerSpec::Furuta { p, q, r, .. } => {
                // (1+r)q − p − r is smallest at q = q.lo, p = p.hi, r = r.lo when q ≥ 1
                p.lo < 0.0 || q.lo < 1.0 || r.lo < 0.0 || (1.0 + r.lo) * q.lo < p.hi + r.lo
            }
            SamplerSpec::GrandFuruta { t, p, s, r, .. } => {
                t.lo < 0.0 || t.hi > 1.0 || p.lo < 1.0 || s.lo < 1.0 || r.lo < t.hi
            }
            SamplerSpec::Theorem21 { r_fraction, .. } => r_fraction.lo < 1.0,
            SamplerSpec::Probe(_) => true,
        }
    }

    fn sample_trial(&self, seed: u64, trial: u64) -> Option<(WitnessParams, SymMatrix, SymMatrix)> {
        let mut rng = rng_for(seed, trial);
        let rng = &mut rng;
        match *self {
            SamplerSpec::LoewnerHeinz { alpha, dims } => {
                let dim = dims.sample(rng);
                let (a, b) = gen_loewner_pair_from(rng, dim);
                Some((
                    WitnessParams::LoewnerHeinz {
                        alpha: alpha.sample(rng),
                    },
                    a,
                    b,
                ))
            }
            SamplerSpec::Furuta { side, p, q, r, dims } => {
                let dim = dims.sample(rng);
                let (a, b) = gen_loewner_pair_from(rng, dim);
                let side = side.unwrap_or(if rng.random::<bool>() {
                    FurutaSide::ASide
                } else {
                    FurutaSide::BSide
                });
                let params = FurutaParams {
                    p: p.sample(rng),
                    q: q.sample(rng),
                    r: r.sample(rng),
                };
                Some((WitnessParams::Furuta { params, side }, a, b))
            }
            SamplerSpec::GrandFuruta { t, p, s, r, dims } => {
                let dim = dims.sample(rng);
                let (a, b) = gen_loewner_pair_from(rng, dim);
                let params = GrandFurutaParams {
                    t: t.sample(rng),
                    p: p.sample(rng),
                    s: s.sample(rng),
                    r: r.sample(rng),
                };
                Some((WitnessParams::GrandFuruta { params }, a, b))
            }
            SamplerSpec::Theorem21 {
                max_m,
                max_n,
                max_k,
                t,
                r_fraction,
                dims,
            } => {
                let dim = dims.sample(rng);
                let m = rng.random_range(1..=max_m.max(1));
                let n = rng.random_range(1..=max_n.max(1));
                let k = rng.random_range(1..=max_k.max(1));
                let t = t.sample(rng).clamp(0.0, 1.0);
                let fraction = r_fraction.sample(rng);
                let probe = ConstructionParams { m, n, k, t, r: 0.0 };
                let r = match check_r_condition(&probe).required_r {
                    Some(req) => fraction * req,
                    None => fraction * (m as f64 - t) * k as f64,
                };
                let a = random_pd(rng, dim, 0.05, 20.0);
                let rank = rng.random_range(1..=dim);
                let b = random_psd(rng, dim, rank);
                Some((
                    WitnessParams::Theorem21 {
                        params: probe.with_r(r),
                    },
                    a,
                    b,
                ))
            }
            SamplerSpec::Probe(Probe::Remark22) => {
                let a = SymMatrix::from_diagonal(&[1.0, 2f64.powf(1.75)]).ok()?;
                let b = SymMatrix::filled(2, 1.0);
                let params = ConstructionParams {
                    m: 2,
                    n: 2,
                    k: 2,
                    t: 0.5,
                    r: 0.5,
                };
                Some((WitnessParams::Theorem21 { params }, a, b))
            }
        }
    }
}

/// Parameters of an evaluated instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WitnessParams {
    LoewnerHeinz { alpha: f64 },
    Furuta { params: FurutaParams, side: FurutaSide },
    GrandFuruta { params: GrandFurutaParams },
    Theorem21 { params: ConstructionParams },
}

impl WitnessParams {
    pub fn id(&self) -> InequalityId {
        match self {
            WitnessParams::LoewnerHeinz { .. } => InequalityId::LoewnerHeinz,
            WitnessParams::Furuta { .. } => InequalityId::Furuta,
            WitnessParams::GrandFuruta { .. } => InequalityId::GrandFuruta,
            WitnessParams::Theorem21 { .. } => InequalityId::Theorem21,
        }
    }

    /// Whether the parameters lie where the inequality is guaranteed.
    pub fn in_validity_region(&self) -> bool {
        match self {
            WitnessParams::LoewnerHeinz { alpha } => (0.0..=1.0).contains(alpha),
            WitnessParams::Furuta { params, .. } => params.is_valid(),
            WitnessParams::GrandFuruta { params } => params.is_valid(),
            WitnessParams::Theorem21 { params } => check_r_condition(params).valid,
        }
    }

    /// Runs the corresponding check on `(a, b)`.
    pub fn evaluate(&self, a: &SymMatrix, b: &SymMatrix, tol_scale: f64) -> Result<PsdReport> {
        match self {
            WitnessParams::LoewnerHeinz { alpha } => check_loewner_heinz(a, b, *alpha, tol_scale),
            WitnessParams::Furuta { params, side } => check_furuta(a, b, params, *side, tol_scale),
            WitnessParams::GrandFuruta { params } => check_grand_furuta(a, b, params, tol_scale),
            WitnessParams::Theorem21 { params } => Ok(solve_construction(a, b, params, tol_scale)?.report),
        }
    }
}

/// A concrete instance certifying a violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityWitness {
    pub inequality_id: InequalityId,
    pub parameters: WitnessParams,
    pub a: SymMatrix,
    pub b: SymMatrix,
    pub min_eigenvalue: f64,
    pub scale: f64,
    /// Search seed; the instance was drawn from stream `trial` of it.
    pub seed: u64,
    pub trial: u64,
    /// Set if the parameters were inside the validity region, which would
    /// indicate a numerical or implementation problem.
    pub in_validity_region: bool,
}

impl InequalityWitness {
    /// Re-evaluates the stored instance.
    pub fn replay(&self, tol_scale: f64) -> Result<PsdReport> {
        self.parameters.evaluate(&self.a, &self.b, tol_scale)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchOutcome {
    pub witness: Option<InequalityWitness>,
    /// Trials evaluated, up to and including the witness trial.
    pub trials_run: u64,
    /// Trials whose evaluation returned an error (e.g. a degenerate exponent).
    pub errors: u64,
    /// Most negative `min_eigenvalue / scale` seen.
    pub worst_normalized_min: f64,
}

enum TrialResult {
    Report(PsdReport),
    Failed,
}

fn run_trial(spec: &SamplerSpec, seed: u64, trial: u64, tol_scale: f64) -> (TrialResult, Option<InequalityWitness>) {
    let Some((params, a, b)) = spec.sample_trial(seed, trial) else {
        return (TrialResult::Failed, None);
    };
    match params.evaluate(&a, &b, tol_scale) {
        Ok(report) => {
            let witness = (report.min_eigenvalue < -WITNESS_REL_THRESHOLD * report.scale).then(|| InequalityWitness {
                inequality_id: params.id(),
                parameters: params,
                a,
                b,
                min_eigenvalue: report.min_eigenvalue,
                scale: report.scale,
                seed,
                trial,
                in_validity_region: params.in_validity_region(),
            });
            (TrialResult::Report(report), witness)
        }
        Err(_) => (TrialResult::Failed, None),
    }
}

/// Searches up to `trials` instances and returns the lowest-index violation.
/// Deterministic for fixed `(spec, trials, seed)`, independent of thread count.
pub fn search_with_stats(spec: &SamplerSpec, trials: u64, seed: u64, tol_scale: f64) -> SearchOutcome {
    let mut outcome = SearchOutcome {
        witness: None,
        trials_run: 0,
        errors: 0,
        worst_normalized_min: f64::INFINITY,
    };
    let mut start = 0u64;
    while start < trials {
        let end = (start + CHUNK as u64).min(trials);
        let results: Vec<_> = (start..end)
            .into_par_iter()
            .map(|trial| run_trial(spec, seed, trial, tol_scale))
            .collect();
        for (result, witness) in results {
            outcome.trials_run += 1;
            match result {
                TrialResult::Report(r) => {
                    outcome.worst_normalized_min = outcome.worst_normalized_min.min(r.normalized_min());
                }
                TrialResult::Failed => outcome.errors += 1,
            }
            if witness.is_some() {
                outcome.witness = witness;
                return outcome;
            }
        }
        start = end;
    }
    outcome
}

pub fn counterexample_search(spec: &SamplerSpec, trials: u64, seed: u64, tol_scale: f64) -> Option<InequalityWitness> {
    search_with_stats(spec, trials, seed, tol_scale).witness
}
