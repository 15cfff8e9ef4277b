//! The three commands. Each returns the JSON report and a human summary.

use std::time::Instant;

use clap::ValueEnum;
use serde_json::{json, Map, Value};
use tcna_core::cones::{check_ef, check_naw, check_nar, check_nas_direct, find_cps, superhedge_membership, Budget, ConeError, CpsVerdict, EfVerdict, Guard, HedgeVerdict, NasVerdict, NawVerdict};
use tcna_core::rational::fmt_rat;
use tcna_core::report::{report_market, ReportError};
use tcna_core::trade::{MarketData, check_hn0_sampled, check_hn0_structural, validate_axioms, Hn0Sample, Hn0Verdict};
use thiserror::Error;

use crate::model::Model;
use crate::render;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("unknown claim {0:?}")]
    UnknownClaim(String),
    #[error("no consistent price system: the market admits no pricing kernel")]
    NoKernel,
    #[error("projection reports need a named market model, not generic generators")]
    GenericReport,
    #[error("{0}")]
    Report(#[from] ReportError),
    #[error("{0}")]
    Internal(#[from] ConeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Check {
    Axioms,
    Hn0,
    Naw,
    Cps,
    Ef,
    Nas,
    Nar,
}

impl Check {
    pub const ALL: [Check; 7] = [Check::Axioms, Check::Hn0, Check::Naw, Check::Cps, Check::Ef, Check::Nas, Check::Nar];

    pub fn name(self) -> &'static str {
        match self {
            Check::Axioms => "axioms",
            Check::Hn0 => "hn0",
            Check::Naw => "naw",
            Check::Cps => "cps",
            Check::Ef => "ef",
            Check::Nas => "nas",
            Check::Nar => "nar",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Options {
    pub seed: u64,
    pub guard: usize,
    pub samples: usize,
    pub skip: Vec<Check>,
    pub timing: bool,
}

impl Options {
    fn guard(&self) -> Guard {
        Guard { max_lp_calls: self.guard, max_rays: self.guard }
    }
}

pub struct Output {
    pub report: Value,
    pub summary: Vec<String>,
}

fn guard_note(e: &ConeError) -> Option<Value> {
    match e {
        ConeError::SizeGuardExceeded { what, limit } => Some(json!({ "verdict": "guard_exceeded", "what": what, "limit": limit })),
        _ => None,
    }
}

/// Runs one guarded check: a guard overrun becomes a note, anything else is fatal.
fn guarded<T>(result: Result<T, ConeError>, render: impl Fn(&T) -> Value) -> Result<(Option<T>, Value), CommandError> {
    match result {
        Ok(v) => {
            let r = render(&v);
            Ok((Some(v), r))
        }
        Err(e) => match guard_note(&e) {
            Some(note) => Ok((None, note)),
            None => Err(e.into()),
        },
    }
}

fn verdict_word(v: &Value) -> String {
    v.get("verdict").and_then(Value::as_str).unwrap_or("?").replace('_', " ")
}

pub fn check(model: &Model, opts: &Options) -> Result<Output, CommandError> {
    let map = &model.map;
    let mut checks = Map::new();
    let mut timings = Map::new();
    let mut summary = vec![format!(
        "market {} with d = {}, T = {}, |Omega| = {}",
        model.kind.name(),
        map.dim(),
        map.horizon(),
        map.space().len()
    )];
    let mut naw = None;
    let mut cps = None;
    let mut ef = None;
    let mut nas = None;
    for check in Check::ALL {
        if opts.skip.contains(&check) {
            checks.insert(check.name().into(), json!({ "verdict": "skipped" }));
            summary.push(format!("{:<7} skipped", check.name()));
            continue;
        }
        let start = Instant::now();
        let mut budget = Budget::new(opts.guard());
        let value = match check {
            Check::Axioms => {
                let r = validate_axioms(map, opts.samples, opts.seed);
                render::axioms(&r)
            }
            Check::Hn0 => match check_hn0_structural(model.kind, model.data.as_ref(), &model.filtration) {
                Ok(v) => {
                    let mut r = render::hn0_structural(&v);
                    r["method"] = json!("structural");
                    if let Hn0Verdict::Unknown(_) = v {
                        let (_, sampled) = guarded(check_hn0_sampled(map, opts.samples, opts.seed, &mut budget), render::hn0_sampled)?;
                        r["sampled"] = sampled;
                    }
                    r
                }
                Err(e) => {
                    let (s, mut r) = guarded(check_hn0_sampled(map, opts.samples, opts.seed, &mut budget), render::hn0_sampled)?;
                    r["method"] = json!("sampled");
                    r["structural"] = json!(e.to_string());
                    if let Some(Hn0Sample::NoCounterexample { .. }) = s {
                        r["note"] = json!("sampling cannot prove the hypothesis");
                    }
                    r
                }
            },
            Check::Naw => {
                let v = check_naw(map)?;
                let r = render::naw(&v);
                naw = Some(v);
                r
            }
            Check::Cps => {
                let v = find_cps(map)?;
                let r = render::cps(&v);
                cps = Some(v);
                r
            }
            Check::Ef => {
                let (v, r) = guarded(check_ef(map, &mut budget), render::ef)?;
                ef = v;
                r
            }
            Check::Nas => {
                let (v, r) = guarded(check_nas_direct(map, &mut budget), render::nas)?;
                nas = v;
                r
            }
            Check::Nar => render::nar(&check_nar(map)?),
        };
        summary.push(format!("{:<7} {}", check.name(), verdict_word(&value)));
        checks.insert(check.name().into(), value);
        timings.insert(check.name().into(), json!(start.elapsed().as_secs_f64()));
    }
    if let Some(NawVerdict::Arbitrage(c)) = &naw {
        summary.push("arbitrage terminal wealth per outcome:".into());
        for (label, v) in map.space().labels().iter().zip(&c.terminal) {
            summary.push(format!("  {label}: ({})", v.iter().map(fmt_rat).collect::<Vec<_>>().join(", ")));
        }
    }
    if let Some(CpsVerdict::Found(k)) = &cps {
        summary.push(format!("kernel gap {}", fmt_rat(&k.gap)));
    }
    if let (Some(EfVerdict::Holds), Some(CpsVerdict::NotFound(_)), Some(NasVerdict::Holds { .. })) = (&ef, &cps, &nas) {
        summary.push("warning: EF holds without a kernel but NA^s holds".into());
    }
    let mut report = json!({
        "command": "check",
        "market": model.kind.name(),
        "seed": opts.seed,
        "guard": opts.guard,
        "checks": Value::Object(checks),
    });
    if opts.timing {
        report["timing_seconds"] = Value::Object(timings);
    }
    Ok(Output { report, summary })
}

pub fn hedge(model: &Model, claim: &str) -> Result<Output, CommandError> {
    let g = model.claims.get(claim).ok_or_else(|| CommandError::UnknownClaim(claim.into()))?;
    let v = superhedge_membership(&model.map, g)?;
    let summary = vec![match &v {
        HedgeVerdict::Attainable { .. } => format!("claim {claim}: attainable from zero endowment"),
        HedgeVerdict::NotAttainable(_) => format!("claim {claim}: not attainable (Farkas certificate in report)"),
    }];
    let report = json!({ "command": "hedge", "claim": claim, "g": render::random_vector(g), "result": render::hedge(&v) });
    Ok(Output { report, summary })
}

pub fn report(model: &Model, opts: &Options) -> Result<Output, CommandError> {
    let data = model.data.as_ref().ok_or(CommandError::GenericReport)?;
    let kernel = match find_cps(&model.map)? {
        CpsVerdict::Found(k) => k,
        CpsVerdict::NotFound(_) => return Err(CommandError::NoKernel),
    };
    // Only the second currency model needs EF; it is guarded there.
    let (ef, ef_json) = match data {
        MarketData::Currency2 { .. } => {
            let mut budget = Budget::new(opts.guard());
            let (v, r) = guarded(check_ef(&model.map, &mut budget), render::ef)?;
            (v.ok_or(ReportError::EfNotEstablished)?, r)
        }
        _ => (EfVerdict::Holds, json!({ "verdict": "not_needed" })),
    };
    let r = report_market(data, &model.filtration, &kernel.z, &ef)?;
    let q = r.q.labels().iter().zip(r.q.probs()).map(|(l, p)| format!("{l}={}", fmt_rat(p))).collect::<Vec<_>>().join(", ");
    let mut summary = vec![format!("kernel gap {}", fmt_rat(&kernel.gap)), format!("Q: {q}"), format!("rows {} checked, {} failed", r.rows.len(), r.failed_rows())];
    for m in &r.martingales {
        summary.push(format!("martingale {}: {}", m.name, m.holds));
    }
    let report = json!({ "command": "report", "ef": ef_json, "kernel": render::kernel(&kernel), "report": render::projection(&r) });
    Ok(Output { report, summary })
}
