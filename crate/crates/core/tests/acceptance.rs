//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.

mod common;

use std::process::ExitCode;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tcna_core::cones::cps::cps_system;
use tcna_core::cones::dd::verify_extreme_ray;
use tcna_core::cones::naw::{naw_program, superhedge_program};
use tcna_core::cones::{
    build_robust_perturbation, check_ef, check_nar, check_nas_direct, check_naw, dominance_report, find_cps, frictionality_classify, n0_membership,
    superhedge_membership, verify_cps, Budget, ConeError, CpsVerdict, EfVerdict, FrictionClass, Guard, HedgeVerdict, NasVerdict,
    NawVerdict,
};
use tcna_core::lp::verify::check_farkas;
use tcna_core::lp::verify_outcome;
use tcna_core::rational::{int, rat};
use tcna_core::report::{report_currency2, report_market, report_security};
use tcna_core::space::{cond_expect, Filtration, FiniteSpace, RandomVector};
use tcna_core::trade::sample::random_strategy;
use tcna_core::trade::{wealth, MarketData, TradeMap};
use tcna_core::Rat;

use common::*;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// `Q(A)` for a set of outcomes.
fn q_of(q: &FiniteSpace, outcomes: &[usize]) -> Rat {
    outcomes.iter().map(|&w| q.prob(w).clone()).sum()
}

fn expect_under(q: &FiniteSpace, x: &[Rat]) -> Rat {
    x.iter().enumerate().map(|(w, v)| q.prob(w) * v).sum()
}

fn criterion_1() -> Outcome {
    let map = bin1();
    ensure(check_naw(&map).map_err(err)?.is_no_arbitrage(), "check_naw reports an arbitrage")?;
    let CpsVerdict::Found(kernel) = find_cps(&map).map_err(err)? else {
        return Err("no consistent price system".into());
    };
    let MarketData::Security { pi } = bin1_data() else { unreachable!() };
    let report = report_security(&pi, map.filtration(), &kernel.z).map_err(err)?;
    // 2q + (1 - q)/2 = 1.
    let (up, down, s0) = (int(2), rat(1, 2), int(1));
    let q_hand = (&s0 - &down) / (&up - &down);
    ensure(q_hand == rat(1, 3), "hand oracle")?;
    ensure(report.q.prob(0) == &q_hand, format!("Q(u) = {}", report.q.prob(0)))?;
    let mart = report.martingales.iter().find(|m| m.name.starts_with("projected price 1")).ok_or("no projected martingale check")?;
    ensure(mart.holds, "projected price is not a (Q,H)-martingale")?;
    ensure(report.failed_rows() == 0 && report.kernel_discrepancies == 0, "report rows fail")?;
    Ok(format!("Q(u) = {q_hand}"))
}

fn criterion_2() -> Outcome {
    let map = bin1_arb();
    let NawVerdict::Arbitrage(cert) = check_naw(&map).map_err(err)? else {
        return Err("check_naw found no arbitrage".into());
    };
    cert.verify(&map)?;
    // Buy one unit at 1, sell it at 2 on u and at 1 on d.
    let hand = vec![vec![int(2) - int(1), int(1) - int(1)], vec![int(1) - int(1), int(1) - int(1)]];
    ensure(cert.terminal == hand, format!("V_T = {:?}", cert.terminal))?;
    ensure(find_cps(&map).map_err(err)?.kernel().is_none(), "find_cps found a kernel")?;
    let nas = check_nas_direct(&map, &mut Budget::new(Guard::default())).map_err(err)?;
    let NasVerdict::Fails(w) = nas else {
        return Err("check_nas_direct holds".into());
    };
    w.verify(&map, &mut Budget::unlimited())?;
    ensure(!check_nar(&map).map_err(err)?.holds(), "check_nar holds")?;
    Ok(format!("V_T(u) = (1,0), V_T(d) = (0,0), NA^s witness at t = {}", w.t))
}

fn criterion_3() -> Outcome {
    let map = bin1_tc();
    let CpsVerdict::Found(kernel) = find_cps(&map).map_err(err)? else {
        return Err("no consistent price system".into());
    };
    ensure(kernel.gap.is_positive(), "gap is not positive")?;
    let classes = frictionality_classify(&map);
    let report = verify_cps(&map, &kernel.z).map_err(err)?;
    let mut frictional = 0;
    for row in &report.rows {
        if classes.get(row.t, row.atom, row.pair) == FrictionClass::Frictional {
            frictional += 1;
            ensure(row.value.is_negative(), format!("dual row at date {} atom {} is not strictly negative", row.t, row.atom))?;
        }
    }
    ensure(frictional == 6, format!("{frictional} frictional rows"))?;
    // M = Zbar^1/Zbar^0 must sit strictly inside every spread and be a martingale.
    let f = map.filtration();
    let spreads = [vec![(int(1), int(2))], vec![(rat(3, 2), rat(5, 2)), (rat(1, 2), rat(3, 2))]];
    let mut m = Vec::new();
    for t in f.dates() {
        let mut mt = Vec::new();
        for a in 0..f.atoms(t).len() {
            let zb = kernel.zbar.value(t, a);
            let x = &zb[1] / &zb[0];
            let (bid, ask) = &spreads[t][a];
            ensure(bid < &x && &x < ask, format!("M_{t} = {x} outside ({bid}, {ask})"))?;
            mt.push(x);
        }
        m.push(mt);
    }
    let MarketData::Security { pi } = bin1_tc_data() else { unreachable!() };
    let r = report_security(&pi, f, &kernel.z).map_err(err)?;
    let q = &r.q;
    ensure(expect_under(q, &[m[1][0].clone(), m[1][1].clone()]) == m[0][0], "M is not a Q-martingale")?;
    ensure(r.rows.iter().all(|row| row.strict && row.passes), "report rows are not strict")?;
    // The hand martingale (3/2; 2, 1) under q(u) = 1/2 is interior too.
    let hand = [rat(3, 2), int(2), int(1)];
    ensure(hand[0] == rat(1, 2) * &hand[1] + rat(1, 2) * &hand[2], "hand martingale")?;
    ensure(q_of(q, &[0, 1]).is_one(), "Q is not a probability")?;
    Ok(format!("gap = {}, M_0 = {}, M_1 = ({}, {})", kernel.gap, m[0][0], m[1][0], m[1][1]))
}

fn criterion_4() -> Outcome {
    let data = delay1_data();
    let full = build(&data, &delay1_full());
    let NawVerdict::Arbitrage(cert) = check_naw(&full).map_err(err)? else {
        return Err("full information: no arbitrage found".into());
    };
    cert.verify(&full)?;
    // The arbitrage needs the node-u information: it trades at date 1 on {uu, ud}.
    ensure(cert.strategy.values()[1][0].iter().flatten().any(|x| !x.is_zero()), "arbitrage does not use node u")?;

    let delayed_f = delay1_delayed();
    let delayed = build(&data, &delayed_f);
    let CpsVerdict::Found(kernel) = find_cps(&delayed).map_err(err)? else {
        return Err("delayed information: no consistent price system".into());
    };
    let s = delay1_prices();
    // Brute-force oracle: the admissible measures form {q > 0, Σq = 1, E S_1 = E S_2 = 1}.
    let q_hand = [rat(1, 12), rat(1, 4), rat(1, 21), rat(13, 21)];
    let sum: Rat = q_hand.iter().sum();
    let e1: Rat = q_hand.iter().zip(&s[1]).map(|(q, x)| q * x).sum();
    let e2: Rat = q_hand.iter().zip(&s[2]).map(|(q, x)| q * x).sum();
    ensure(sum.is_one() && e1.is_one() && e2.is_one() && q_hand.iter().all(Signed::is_positive), "hand measure is not admissible")?;
    // The kernel of that measure: Z⁰ = dQ/dP and Z¹ = Z⁰ S_2.
    let hand_z = (0..4)
        .map(|w| {
            let z0 = &q_hand[w] / delayed_f.space().prob(w);
            vec![z0.clone(), z0 * &s[2][w]]
        })
        .collect();
    let hand_report = verify_cps(&delayed, &RandomVector::new(hand_z).map_err(err)?).map_err(err)?;
    ensure(hand_report.is_valid(), "hand measure is rejected as a kernel")?;
    let report = report_market(&data, &delayed_f, &kernel.z, &EfVerdict::Holds).map_err(err)?;
    ensure(expect_under(&report.q, &s[1]).is_one() && expect_under(&report.q, &s[2]).is_one(), "kernel measure does not price S at 1")?;
    let proj = report.martingales.iter().find(|m| m.name.starts_with("projected price 1")).ok_or("missing check")?;
    let own = report.martingales.iter().find(|m| m.name.contains("own filtration")).ok_or("missing check")?;
    ensure(proj.holds, "projected price is not a (Q,H)-martingale")?;
    ensure(!own.holds, "price is a Q-martingale in the full filtration")?;
    // Under the hand measure node u fails too.
    let node_u = (&q_hand[0] * &s[2][0] + &q_hand[1] * &s[2][1]) / (&q_hand[0] + &q_hand[1]);
    ensure(node_u != s[1][0], "hand measure is a martingale at node u")?;
    Ok(format!("Q = ({})", (0..4).map(|w| report.q.prob(w).to_string()).collect::<Vec<_>>().join(", ")))
}

fn criterion_5() -> Outcome {
    let map = cur2();
    let ef = check_ef(&map, &mut Budget::new(Guard::default())).map_err(err)?;
    ensure(ef.holds(), "check_ef fails")?;
    let (one_cost, two_costs) = (int(1) + rat(1, 10), (int(1) + rat(1, 10)) * (int(1) + rat(1, 10)));
    ensure(one_cost <= two_costs && rat(1, 10) + rat(1, 10) > Rat::zero(), "triangle oracle")?;
    match find_cps(&map).map_err(err)? {
        CpsVerdict::Found(kernel) => {
            let MarketData::Currency2 { tau, lambda } = cur2_data() else { unreachable!() };
            let r = report_currency2(&tau, &lambda, map.filtration(), &kernel.z, &ef).map_err(err)?;
            ensure(!r.rows.is_empty() && r.rows.iter().all(|row| row.strict && row.passes), "a strict inequality fails")?;
            Ok(format!("EF holds, {} strict rows pass", r.rows.len()))
        }
        CpsVerdict::NotFound(_) => Ok("EF holds, no kernel".into()),
    }
}

#[derive(Default)]
struct Suite {
    evaluated: usize,
    skipped: usize,
    found: usize,
    ef_no_kernel: usize,
    implication_failures: Vec<String>,
    certificates: usize,
    certificate_failures: Vec<String>,
    identities: usize,
    identity_failures: Vec<String>,
}

impl Suite {
    fn cert(&mut self, label: &str, r: Result<(), String>) {
        self.certificates += 1;
        if let Err(e) = r {
            self.certificate_failures.push(format!("{label}: {e}"));
        }
    }

    fn identity(&mut self, label: &str, ok: bool) {
        self.identities += 1;
        if !ok {
            self.identity_failures.push(label.to_string());
        }
    }
}

fn guarded<T>(r: Result<T, ConeError>) -> Result<Option<T>, String> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(ConeError::SizeGuardExceeded { .. }) => Ok(None),
        Err(e) => Err(e.to_string()),
    }
}

fn verify_ef_witness(map: &TradeMap, ef: &EfVerdict) -> Result<(), String> {
    let EfVerdict::Fails { t, witness, eta, eta_rev } = ef else { return Ok(()) };
    let f = map.filtration();
    ensure(witness.values().iter().flatten().any(|x| !x.is_zero()), "zero witness")?;
    for w in 0..f.space().len() {
        let a = f.atom_of(*t, w);
        let fwd = map.evaluate(*t, w, &eta[a]).map_err(err)?;
        let back = map.evaluate(*t, w, &eta_rev[a]).map_err(err)?;
        ensure(fwd == witness.get(w), "F(eta) differs from the witness")?;
        ensure(fwd.iter().zip(&back).all(|(x, y)| (x + y).is_zero()), "reversal does not cancel")?;
    }
    ensure(n0_membership(map, *t, witness, &mut Budget::unlimited()).map_err(err)?.is_yes(), "witness is not in N0")
}

fn run_instance(suite: &mut Suite, map: &TradeMap, rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let mut budget = Budget::new(Guard::default());
    let cps = find_cps(map).map_err(err)?;
    let naw = check_naw(map).map_err(err)?;
    let Some(ef) = guarded(check_ef(map, &mut budget))? else { return Ok(false) };
    let Some(nas) = guarded(check_nas_direct(map, &mut Budget::new(Guard::default())))? else { return Ok(false) };

    let mut fail = |s: String| suite.implication_failures.push(s);
    if let CpsVerdict::Found(kernel) = &cps {
        if !naw.is_no_arbitrage() {
            fail("(a) kernel found but check_naw reports an arbitrage".into());
        }
        if !nas.holds() {
            fail("(b) kernel found but check_nas_direct fails".into());
        }
        let pert = build_robust_perturbation(map, kernel).map_err(err)?;
        let dom = dominance_report(map, &pert.g).map_err(err)?;
        if !dom.is_valid() {
            fail(format!("(c) dominance fails: {:?}", dom.violations));
        }
        if !check_naw(&pert.g).map_err(err)?.is_no_arbitrage() {
            fail("(c) perturbed map admits an arbitrage".into());
        }
        let nonneg = pert.delta_plus.iter().chain(&pert.delta_minus).flatten().flatten().all(|x| !x.is_negative());
        suite.identity("delta nonnegative", nonneg);
    }
    if ef.holds() && cps.kernel().is_none() {
        suite.ef_no_kernel += 1;
        if nas.holds() {
            suite.implication_failures.push("(d) EF holds, no kernel, but check_nas_direct holds".into());
        }
    }
    suite.found += usize::from(cps.kernel().is_some());

    // Certificates.
    match &cps {
        CpsVerdict::Found(k) => {
            let r = verify_cps(map, &k.z).map_err(err)?;
            suite.cert("kernel", ensure(r.is_valid(), "kernel rows fail"));
        }
        CpsVerdict::NotFound(c) => {
            let sys = cps_system(map, &frictionality_classify(map));
            suite.cert("strict Farkas", c.verify(&sys).map_err(err));
        }
    }
    match &naw {
        NawVerdict::Arbitrage(c) => suite.cert("arbitrage", c.verify(map)),
        NawVerdict::NoArbitrage { proof } => suite.cert("naw dual", verify_outcome(&naw_program(map).0, proof).map_err(err)),
    }
    if let NasVerdict::Fails(w) = &nas {
        suite.cert("NA^s witness", w.verify(map, &mut Budget::unlimited()));
        suite.cert("extreme ray", verify_extreme_ray(&w.constraint, &w.ray));
    }
    suite.cert("EF witness", verify_ef_witness(map, &ef));
    let claim = random_claim(rng, map);
    match superhedge_membership(map, &claim).map_err(err)? {
        HedgeVerdict::Attainable { strategy, disposal } => {
            let path = wealth(map, &strategy).map_err(err)?;
            let ok = path.terminal().iter().zip(&disposal).zip(claim.values()).all(|((v, r), g)| {
                v.iter().zip(r).zip(g).all(|((v, r), g)| !r.is_negative() && &(v - r) == g)
            });
            suite.cert("hedge", ensure(ok, "V_T - disposal differs from the claim"));
        }
        HedgeVerdict::NotAttainable(c) => {
            let lp = superhedge_program(map, &claim).map_err(err)?.0;
            suite.cert("hedge Farkas", check_farkas(&lp, &c).map_err(err));
        }
    }

    // Identities.
    let z = random_positive(rng, map.space().len(), map.dim());
    let report = verify_cps(map, &z).map_err(err)?;
    suite.identity("Zbar . Fhat = Fbar", report.rows.iter().all(|r| r.projected_pairing == r.value));
    let f = map.filtration();
    for _ in 0..4 {
        let t = rng.gen_range(0..=f.horizon());
        let w = rng.gen_range(0..f.space().len());
        let a = f.atom_of(t, w);
        let e1 = random_strategy(rng, map);
        let e2 = random_strategy(rng, map);
        let (x, y) = (&e1.values()[t][a], &e2.values()[t][a]);
        let sum: Vec<Vec<Rat>> = x.iter().zip(y).map(|(r, s)| r.iter().zip(s).map(|(p, q)| p + q).collect()).collect();
        let lhs = map.evaluate(t, w, &sum).map_err(err)?;
        let (fx, fy) = (map.evaluate(t, w, x).map_err(err)?, map.evaluate(t, w, y).map_err(err)?);
        suite.identity("HF2 superadditivity", lhs.iter().zip(fx.iter().zip(&fy)).all(|(l, (p, q))| l >= &(p + q)));
    }
    probability_identities(suite, rng, f)?;
    Ok(true)
}

fn random_claim(rng: &mut ChaCha8Rng, map: &TradeMap) -> RandomVector {
    let vals = (0..map.space().len()).map(|_| (0..map.dim()).map(|_| rat(rng.gen_range(-2..=2), rng.gen_range(1..=2))).collect()).collect();
    RandomVector::new(vals).expect("uniform dimension")
}

fn random_positive(rng: &mut ChaCha8Rng, n: usize, d: usize) -> RandomVector {
    RandomVector::new((0..n).map(|_| (0..d).map(|_| rat(rng.gen_range(1..=5), rng.gen_range(1..=3))).collect()).collect()).expect("uniform dimension")
}

/// Tower property and Bayes consistency against a hand-rolled expectation.
fn probability_identities(suite: &mut Suite, rng: &mut ChaCha8Rng, f: &Filtration) -> Result<(), String> {
    let n = f.space().len();
    let x = RandomVector::scalar((0..n).map(|_| rat(rng.gen_range(-6..=6), rng.gen_range(1..=4))).collect());
    let z = random_positive(rng, n, 1);
    let q = f.space().change_measure(&z).map_err(err)?;
    for t in f.dates() {
        for s in 0..=t {
            let inner = cond_expect(&x, f, t, &q).map_err(err)?;
            let lifted = RandomVector::scalar((0..n).map(|w| inner[f.atom_of(t, w)][0].clone()).collect());
            let outer = cond_expect(&lifted, f, s, &q).map_err(err)?;
            suite.identity("tower", outer == cond_expect(&x, f, s, &q).map_err(err)?);
        }
        for (a, atom) in f.atoms(t).iter().enumerate() {
            let p = f.space();
            let zx: Rat = atom.iter().map(|&w| p.prob(w) * &z.get(w)[0] * &x.get(w)[0]).sum();
            let zz: Rat = atom.iter().map(|&w| p.prob(w) * &z.get(w)[0]).sum();
            let under_q = cond_expect(&x, f, t, &q).map_err(err)?;
            suite.identity("Bayes", under_q[a][0] == zx / zz);
        }
    }
    Ok(())
}

fn random_suite() -> Suite {
    let mut suite = Suite::default();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let hand = [bin1(), bin1_arb(), bin1_tc(), build(&delay1_data(), &delay1_full()), build(&delay1_data(), &delay1_delayed()), cur2()];
    for map in &hand {
        if let Err(e) = run_instance(&mut suite, map, &mut rng) {
            suite.implication_failures.push(format!("hand instance: {e}"));
        }
    }
    let mut attempts = 0;
    while suite.evaluated < 220 && attempts < 400 {
        attempts += 1;
        let (data, f) = random_instance(&mut rng);
        let map = build(&data, &f);
        match run_instance(&mut suite, &map, &mut rng) {
            Ok(true) => suite.evaluated += 1,
            Ok(false) => suite.skipped += 1,
            Err(e) => suite.implication_failures.push(format!("instance {attempts}: {e}")),
        }
    }
    suite
}

fn criterion_6(s: &Suite) -> Outcome {
    ensure(s.evaluated >= 200, format!("only {} instances evaluated", s.evaluated))?;
    ensure(s.implication_failures.is_empty(), format!("{} violations, first: {}", s.implication_failures.len(), s.implication_failures.first().cloned().unwrap_or_default()))?;
    Ok(format!("{} instances ({} skipped by guard), {} with a kernel, {} with EF and no kernel", s.evaluated, s.skipped, s.found, s.ef_no_kernel))
}

fn criterion_7(s: &Suite) -> Outcome {
    ensure(s.certificate_failures.is_empty(), format!("{} of {} fail, first: {}", s.certificate_failures.len(), s.certificates, s.certificate_failures.first().cloned().unwrap_or_default()))?;
    Ok(format!("{} certificates re-verified", s.certificates))
}

fn criterion_8(s: &Suite) -> Outcome {
    ensure(s.identity_failures.is_empty(), format!("{} of {} fail, first: {}", s.identity_failures.len(), s.identities, s.identity_failures.first().cloned().unwrap_or_default()))?;
    Ok(format!("{} identities checked", s.identities))
}

fn main() -> ExitCode {
    let suite = random_suite();
    let results: [(usize, &str, Outcome); 8] = [
        (1, "BIN1", criterion_1()),
        (2, "BIN1-ARB", criterion_2()),
        (3, "BIN1-TC", criterion_3()),
        (4, "DELAY1", criterion_4()),
        (5, "CUR2", criterion_5()),
        (6, "implications", criterion_6(&suite)),
        (7, "certificate round-trip", criterion_7(&suite)),
        (8, "numerical identities", criterion_8(&suite)),
    ];
    let mut ok = true;
    for (n, name, r) in &results {
        match r {
            Ok(detail) => println!("criterion {n} ({name}): PASS  {detail}"),
            Err(e) => {
                ok = false;
                println!("criterion {n} ({name}): FAIL  {e}");
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
