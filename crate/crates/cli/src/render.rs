//! JSON rendering of verdicts and certificates. Rationals become strings.

use serde_json::{json, Value};
use tcna_core::cones::{
    ArbitrageCertificate, CpsVerdict, EfVerdict, HedgeVerdict, NarVerdict, NasVerdict, NasWitness, NawVerdict, PricingKernel, RobustPerturbation,
};
use tcna_core::lp::{FarkasCertificate, LpOutcome, StrictCertificate};
use tcna_core::rational::fmt_rat;
use tcna_core::report::{InequalityRow, MartingaleCheck, ProjectionReport};
use tcna_core::space::{AdaptedProcess, FiniteSpace, RandomVector};
use tcna_core::trade::{AxiomReport, Hn0Sample, Hn0Verdict, OrderMatrix, Strategy};
use tcna_core::Rat;

pub fn rat(x: &Rat) -> Value {
    Value::String(fmt_rat(x))
}

pub fn vector(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat).collect())
}

pub fn matrix(m: &[Vec<Rat>]) -> Value {
    Value::Array(m.iter().map(|r| vector(r)).collect())
}

pub fn random_vector(v: &RandomVector) -> Value {
    matrix(v.values())
}

fn orders(m: &[OrderMatrix]) -> Value {
    Value::Array(m.iter().map(|o| matrix(o)).collect())
}

/// `[t][atom]` order matrices.
pub fn strategy(s: &Strategy) -> Value {
    Value::Array(s.values().iter().map(|t| orders(t)).collect())
}

fn process(p: &AdaptedProcess) -> Value {
    Value::Array((0..=p.horizon()).map(|t| matrix(p.slice(t))).collect())
}

fn measure(q: &FiniteSpace) -> Value {
    Value::Object(q.labels().iter().zip(q.probs()).map(|(l, p)| (l.clone(), rat(p))).collect())
}

fn farkas(c: &FarkasCertificate) -> Value {
    json!({ "multipliers": vector(&c.multipliers), "bound_conflict": c.bound_conflict })
}

pub fn lp_outcome(o: &LpOutcome) -> Value {
    match o {
        LpOutcome::Optimal { x, duals, value } => json!({ "status": "optimal", "value": rat(value), "x": vector(x), "duals": vector(duals) }),
        LpOutcome::Unbounded { x, ray } => json!({ "status": "unbounded", "x": vector(x), "ray": vector(ray) }),
        LpOutcome::Infeasible(c) => json!({ "status": "infeasible", "farkas": farkas(c) }),
    }
}

fn strict_certificate(c: &StrictCertificate) -> Value {
    json!({ "gap_program": lp_outcome(&c.outcome) })
}

pub fn axioms(r: &AxiomReport) -> Value {
    let violations: Vec<Value> = r
        .violations
        .iter()
        .map(|v| json!({ "axiom": v.axiom, "t": v.t, "outcome": v.outcome, "a": matrix(&v.a), "b": matrix(&v.b), "detail": v.detail }))
        .collect();
    json!({ "verdict": if r.holds() { "holds" } else { "violated" }, "samples": r.samples, "violations": violations })
}

pub fn hn0_structural(v: &Hn0Verdict) -> Value {
    match v {
        Hn0Verdict::Holds(why) => json!({ "verdict": "holds", "reason": why }),
        Hn0Verdict::Unknown(why) => json!({ "verdict": "unknown", "reason": why }),
    }
}

pub fn hn0_sampled(s: &Hn0Sample) -> Value {
    match s {
        Hn0Sample::NoCounterexample { samples, in_n0 } => json!({ "verdict": "no_counterexample", "samples": samples, "in_n0": in_n0 }),
        Hn0Sample::Counterexample { t, eta, reason } => json!({ "verdict": "counterexample", "t": t, "eta": orders(eta), "reason": reason }),
    }
}

pub fn arbitrage(c: &ArbitrageCertificate) -> Value {
    json!({ "strategy": strategy(&c.strategy), "terminal": matrix(&c.terminal) })
}

pub fn naw(v: &NawVerdict) -> Value {
    match v {
        NawVerdict::NoArbitrage { proof } => json!({ "verdict": "no_arbitrage", "proof": lp_outcome(proof) }),
        NawVerdict::Arbitrage(c) => json!({ "verdict": "arbitrage", "certificate": arbitrage(c) }),
    }
}

pub fn kernel(k: &PricingKernel) -> Value {
    json!({ "z": random_vector(&k.z), "zbar": process(&k.zbar), "gap": rat(&k.gap) })
}

pub fn cps(v: &CpsVerdict) -> Value {
    match v {
        CpsVerdict::Found(k) => json!({ "verdict": "found", "kernel": kernel(k) }),
        CpsVerdict::NotFound(c) => json!({ "verdict": "not_found", "certificate": strict_certificate(c) }),
    }
}

pub fn ef(v: &EfVerdict) -> Value {
    match v {
        EfVerdict::Holds => json!({ "verdict": "holds" }),
        EfVerdict::Fails { t, witness, eta, eta_rev } => {
            json!({ "verdict": "fails", "t": t, "witness": random_vector(witness), "eta": orders(eta), "eta_rev": orders(eta_rev) })
        }
    }
}

fn nas_witness(w: &NasWitness) -> Value {
    json!({
        "t": w.t,
        "v": random_vector(&w.v),
        "strategy": strategy(&w.strategy),
        "reversal": orders(&w.reversal),
        "ray": vector(&w.ray),
        "constraint": matrix(&w.constraint),
    })
}

pub fn nas(v: &NasVerdict) -> Value {
    match v {
        NasVerdict::Holds { rays_checked } => json!({ "verdict": "holds", "rays_checked": rays_checked, "conditional_on_hn0": true }),
        NasVerdict::Fails(w) => json!({ "verdict": "fails", "witness": nas_witness(w) }),
    }
}

fn perturbation(p: &RobustPerturbation) -> Value {
    let deltas = |d: &[Vec<Vec<Rat>>]| Value::Array(d.iter().map(|t| matrix(t)).collect());
    let f = p.g.filtration();
    let table = |sign| {
        Value::Array(
            f.dates()
                .map(|t| Value::Array((0..f.space().len()).map(|w| matrix(&(0..p.g.num_pairs()).map(|k| p.g.generator(t, w, k, sign).to_vec()).collect::<Vec<_>>())).collect()))
                .collect(),
        )
    };
    json!({
        "delta_plus": deltas(&p.delta_plus),
        "delta_minus": deltas(&p.delta_minus),
        "gen_plus": table(tcna_core::trade::Sign::Plus),
        "gen_minus": table(tcna_core::trade::Sign::Minus),
    })
}

pub fn nar(v: &NarVerdict) -> Value {
    match v {
        NarVerdict::Holds { kernel: k, perturbation: p, naw_proof } => {
            json!({ "verdict": "holds", "kernel": kernel(k), "perturbation": perturbation(p), "naw_proof": lp_outcome(naw_proof) })
        }
        NarVerdict::Fails { certificate } => json!({ "verdict": "fails", "conditional_on_hn0": true, "certificate": strict_certificate(certificate) }),
    }
}

pub fn hedge(v: &HedgeVerdict) -> Value {
    match v {
        HedgeVerdict::Attainable { strategy: s, disposal } => json!({ "verdict": "attainable", "strategy": strategy(s), "disposal": matrix(disposal) }),
        HedgeVerdict::NotAttainable(c) => json!({ "verdict": "not_attainable", "farkas": farkas(c) }),
    }
}

fn row(r: &InequalityRow) -> Value {
    json!({
        "t": r.t,
        "atom": r.atom,
        "i": r.i,
        "j": r.j,
        "lower": r.lower.as_ref().map(rat),
        "value": rat(&r.value),
        "upper": rat(&r.upper),
        "strict": r.strict,
        "passes": r.passes,
        "alt_lower": r.alt_lower.as_ref().map(rat),
    })
}

fn martingale(m: &MartingaleCheck) -> Value {
    json!({ "name": m.name, "holds": m.holds, "first_failure": m.first_failure })
}

pub fn projection(r: &ProjectionReport) -> Value {
    let projected: serde_json::Map<String, Value> =
        r.projected.iter().map(|s| (s.name.clone(), Value::Array(s.values.iter().map(|t| orders(t)).collect()))).collect();
    json!({
        "kind": r.kind.name(),
        "q": measure(&r.q),
        "zbar": process(&r.zbar),
        "projected": projected,
        "rows": r.rows.iter().map(row).collect::<Vec<_>>(),
        "failed_rows": r.failed_rows(),
        "martingales": r.martingales.iter().map(martingale).collect::<Vec<_>>(),
        "kernel_discrepancies": r.kernel_discrepancies,
        "measure_paths_agree": r.measure_paths_agree,
        "engine_agreement": r.engine_agreement,
    })
}
