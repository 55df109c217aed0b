use std::fs;
use std::path::Path;

use psdeq_core::inequalities::{
    run_suite, search_with_stats, DimRange, InequalityWitness, Interval, Probe, SamplerSpec, SuiteConfig, SuiteKind,
};
use psdeq_core::FurutaSide;
use serde_json::Value;

use crate::failure::Failure;
use crate::matrix_io::{sha256_hex, InputDigest};
use crate::report::{Record, RunReport};
use crate::Ctx;

/// Largest dimension the randomized commands accept.
pub const MAX_SAMPLED_DIM: usize = 64;

fn check_dims(dims: DimRange) -> Result<(), Failure> {
    if dims.max > MAX_SAMPLED_DIM {
        return Err(Failure::input(format!(
            "dimension {} exceeds the supported maximum {MAX_SAMPLED_DIM}",
            dims.max
        )));
    }
    Ok(())
}

pub fn cmd_verify(
    ctx: &Ctx,
    report: &mut RunReport,
    kind: SuiteKind,
    trials: u64,
    dims: DimRange,
    lemma_m: Option<u32>,
) -> Result<(), Failure> {
    check_dims(dims)?;
    if lemma_m.is_some() && kind != SuiteKind::Lemma {
        return Err(Failure::input("--m only applies to the lemma suite"));
    }
    let cfg = SuiteConfig {
        trials,
        seed: ctx.seed,
        dims,
        tol_scale: ctx.tol_scale,
        lemma_m,
    };
    let suite = run_suite(kind, &cfg);
    let failed = suite.failed as f64;
    for f in &suite.failures {
        report.warn(format!("trial {} (dim {}): {}", f.trial, f.dim, f.detail));
    }
    report.push(Record::Suite { suite });
    report.check("failed trials", failed, 0.0, failed, 0.0);
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FuzzTarget {
    LhAlpha2,
    Lh,
    Furuta,
    GrandFuruta,
    Theorem21R,
}

impl FuzzTarget {
    pub fn name(self) -> &'static str {
        match self {
            FuzzTarget::LhAlpha2 => "lh-alpha2",
            FuzzTarget::Lh => "lh",
            FuzzTarget::Furuta => "furuta",
            FuzzTarget::GrandFuruta => "grand-furuta",
            FuzzTarget::Theorem21R => "theorem21-r",
        }
    }
}

/// Sampling-box overrides; unset fields take per-target defaults.
#[derive(Debug, Clone, Default)]
pub struct FuzzBox {
    pub dims: Option<DimRange>,
    pub probe: Option<Probe>,
    pub side: Option<FurutaSide>,
    pub alpha: Option<Interval>,
    pub p: Option<Interval>,
    pub q: Option<Interval>,
    pub r: Option<Interval>,
    pub s: Option<Interval>,
    pub t: Option<Interval>,
    pub r_fraction: Option<Interval>,
    pub max_m: Option<u32>,
    pub max_n: Option<u32>,
    pub max_k: Option<u32>,
}

impl FuzzBox {
    fn set_flags(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        let mut on = |set: bool, name| {
            if set {
                v.push(name)
            }
        };
        on(self.dims.is_some(), "--dims");
        on(self.probe.is_some(), "--probe");
        on(self.side.is_some(), "--side");
        on(self.alpha.is_some(), "--alpha");
        on(self.p.is_some(), "--p");
        on(self.q.is_some(), "--q");
        on(self.r.is_some(), "--r");
        on(self.s.is_some(), "--s");
        on(self.t.is_some(), "--t");
        on(self.r_fraction.is_some(), "--r-fraction");
        on(self.max_m.is_some(), "--max-m");
        on(self.max_n.is_some(), "--max-n");
        on(self.max_k.is_some(), "--max-k");
        v
    }
}

fn only_flags(target: FuzzTarget, b: &FuzzBox, allowed: &[&str]) -> Result<(), Failure> {
    match b.set_flags().into_iter().find(|f| !allowed.contains(f)) {
        Some(f) => Err(Failure::input(format!(
            "{f} does not apply to fuzz target {}",
            target.name()
        ))),
        None => Ok(()),
    }
}

pub fn build_spec(target: FuzzTarget, b: &FuzzBox) -> Result<SamplerSpec, Failure> {
    let dims = b.dims.unwrap_or(DimRange::new(2, 4));
    let spec = match target {
        FuzzTarget::LhAlpha2 | FuzzTarget::Lh => {
            only_flags(target, b, &["--dims", "--alpha"])?;
            let (alpha, dims) = if target == FuzzTarget::LhAlpha2 {
                (Interval::point(2.0), b.dims.unwrap_or(DimRange::fixed(2)))
            } else {
                (Interval::new(0.0, 3.0), dims)
            };
            SamplerSpec::LoewnerHeinz {
                alpha: b.alpha.unwrap_or(alpha),
                dims,
            }
        }
        FuzzTarget::Furuta => {
            only_flags(target, b, &["--dims", "--side", "--p", "--q", "--r"])?;
            SamplerSpec::Furuta {
                side: b.side,
                p: b.p.unwrap_or(Interval::new(1.0, 4.0)),
                q: b.q.unwrap_or(Interval::new(0.5, 2.0)),
                r: b.r.unwrap_or(Interval::new(0.0, 2.0)),
                dims,
            }
        }
        FuzzTarget::GrandFuruta => {
            only_flags(target, b, &["--dims", "--t", "--p", "--s", "--r"])?;
            SamplerSpec::GrandFuruta {
                t: b.t.unwrap_or(Interval::new(0.0, 1.0)),
                p: b.p.unwrap_or(Interval::new(1.0, 4.0)),
                s: b.s.unwrap_or(Interval::new(0.25, 2.0)),
                r: b.r.unwrap_or(Interval::new(0.0, 1.0)),
                dims,
            }
        }
        FuzzTarget::Theorem21R => {
            if let Some(probe) = b.probe {
                only_flags(target, b, &["--probe"])?;
                SamplerSpec::Probe(probe)
            } else {
                only_flags(
                    target,
                    b,
                    &["--dims", "--t", "--r-fraction", "--max-m", "--max-n", "--max-k"],
                )?;
                let t = b.t.unwrap_or(Interval::new(0.0, 1.0));
                if t.lo < 0.0 || t.hi > 1.0 {
                    return Err(Failure::input("--t must lie in [0, 1]"));
                }
                SamplerSpec::Theorem21 {
                    max_m: b.max_m.unwrap_or(4),
                    max_n: b.max_n.unwrap_or(4),
                    max_k: b.max_k.unwrap_or(4),
                    t,
                    r_fraction: b.r_fraction.unwrap_or(Interval::new(0.0, 0.9)),
                    dims,
                }
            }
        }
    };
    if let SamplerSpec::LoewnerHeinz { dims, .. }
    | SamplerSpec::Furuta { dims, .. }
    | SamplerSpec::GrandFuruta { dims, .. }
    | SamplerSpec::Theorem21 { dims, .. } = spec
    {
        check_dims(dims)?;
    }
    if !spec.reaches_outside_validity() {
        return Err(Failure::input(format!(
            "the sampling region for {} lies entirely inside the validity region; \
             fuzzing searches outside it (use `verify` for in-region checks)",
            target.name()
        )));
    }
    Ok(spec)
}

fn record_replay(ctx: &Ctx, report: &mut RunReport, witness: InequalityWitness) -> Result<(), Failure> {
    let replay = witness.replay(ctx.tol_scale)?;
    let err = (replay.min_eigenvalue - witness.min_eigenvalue).abs();
    let tolerance = 1e-12 * witness.scale;
    if witness.in_validity_region {
        report.warn(format!(
            "witness parameters lie INSIDE the validity region (trial {}); this points to a numerical problem",
            witness.trial
        ));
    }
    let (actual, expected) = (replay.min_eigenvalue, witness.min_eigenvalue);
    report.push(Record::Witness { witness });
    report.check("replay reproduces min eigenvalue", actual, expected, err, tolerance);
    report.check_flag("replayed instance violates the inequality", !replay.within(0.0));
    Ok(())
}

pub fn cmd_fuzz(
    ctx: &Ctx,
    report: &mut RunReport,
    target: FuzzTarget,
    trials: u64,
    b: &FuzzBox,
) -> Result<(), Failure> {
    let spec = build_spec(target, b)?;
    let outcome = search_with_stats(&spec, trials, ctx.seed, ctx.tol_scale);
    report.push(Record::Search {
        inequality: target.name().to_owned(),
        trials_requested: trials,
        trials_run: outcome.trials_run,
        errors: outcome.errors,
        worst_normalized_min: outcome.worst_normalized_min,
        found: outcome.witness.is_some(),
    });
    match outcome.witness {
        Some(w) => {
            report.note(format!(
                "replay with `psdeq fuzz --replay <report.json>`, or rerun with --seed {} (trial {} of the stream)",
                w.seed, w.trial
            ));
            record_replay(ctx, report, w)
        }
        None => Ok(()),
    }
}

/// Accepts a bare witness object or a report containing a witness record.
pub fn parse_witness(text: &str) -> Result<InequalityWitness, Failure> {
    let bad = |e: String| Failure::input(format!("malformed witness: {e}"));
    let value: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let mut obj = match value.get("records").and_then(Value::as_array) {
        Some(records) => records
            .iter()
            .find(|r| r.get("kind").and_then(Value::as_str) == Some("witness"))
            .cloned()
            .ok_or_else(|| Failure::input("report contains no witness record"))?,
        None => value,
    };
    if let Some(map) = obj.as_object_mut() {
        map.remove("kind");
    }
    serde_json::from_value(obj).map_err(|e| bad(e.to_string()))
}

pub fn cmd_replay(ctx: &Ctx, report: &mut RunReport, path: &Path) -> Result<(), Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8_lossy(&bytes);
    let witness = parse_witness(&text).map_err(|f| f.context(&path.display().to_string()))?;
    report.inputs.push(InputDigest {
        role: "witness".into(),
        path: path.display().to_string(),
        sha256: sha256_hex(&bytes),
        dim: witness.a.dim(),
    });
    record_replay(ctx, report, witness)
}
