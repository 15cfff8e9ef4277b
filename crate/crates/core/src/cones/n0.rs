//! Reversible one-date increments `N⁰_t = N_t ∩ (-N_t)`.
//!
//! `N_t` is a union of polyhedral cones, one per choice of branch in each
//! frictional cell. Frictionless cells are linear in their order and one-sided
//! cells have a single branch, so only frictional cells are enumerated. Atoms are
//! independent because an `H_t`-measurable order is a free choice per atom.

use num_traits::{One, Signed, Zero};

use super::classify::{frictionality_classify, Classification, FrictionClass};
use super::{Budget, ConeError};
use crate::lp::linalg::solve_combination;
use crate::lp::{solve_lp, LinearProgram, LpOutcome, Relation, Sense};
use crate::rational::Rat;
use crate::space::RandomVector;
use crate::trade::{zero_matrix, OrderMatrix, Sign, TradeMap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum N0Membership {
    /// Orders per atom of `H_t` with `F_t(eta) = v` and `F_t(eta_rev) = -v`.
    Yes { eta: Vec<OrderMatrix>, eta_rev: Vec<OrderMatrix> },
    No,
}

impl N0Membership {
    pub fn is_yes(&self) -> bool {
        matches!(self, N0Membership::Yes { .. })
    }
}

/// One LP column of an atom-local problem.
#[derive(Debug, Clone, Copy)]
enum Var {
    /// Frictionless pair: signed amount times the buy generator.
    Free(usize),
    /// Nonnegative amount of one signed order.
    NonNeg(usize, Sign),
}

struct AtomView<'a> {
    map: &'a TradeMap,
    t: usize,
    atom: &'a [usize],
    classes: &'a [FrictionClass],
}

impl AtomView<'_> {
    fn stacked(&self, pair: usize, sign: Sign) -> Vec<Rat> {
        self.atom.iter().flat_map(|&w| self.map.generator(self.t, w, pair, sign).iter().cloned()).collect()
    }

    fn is_active(&self, pair: usize, sign: Sign) -> bool {
        self.map.cone().allowed(pair, sign) && self.stacked(pair, sign).iter().any(|x| !x.is_zero())
    }

    fn frictionless_active(&self) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&p| self.classes[p] == FrictionClass::Frictionless && self.is_active(p, Sign::Plus))
            .collect()
    }

    fn frictional(&self) -> Vec<usize> {
        (0..self.classes.len()).filter(|&p| self.classes[p] == FrictionClass::Frictional).collect()
    }

    fn one_sided(&self) -> Vec<Var> {
        let mut vars = Vec::new();
        for p in 0..self.classes.len() {
            if self.classes[p] == FrictionClass::OneSidedActive {
                let sign = if self.map.cone().allowed(p, Sign::Plus) { Sign::Plus } else { Sign::Minus };
                vars.push(Var::NonNeg(p, sign));
            }
        }
        vars
    }

    /// Variables for a node of the branch tree: each frictional cell keeps the
    /// signs its choice still allows.
    fn branch_vars(&self, frictional: &[usize], choices: &[Choice], with_free: bool) -> Vec<Var> {
        let mut vars: Vec<Var> = if with_free { self.frictionless_active().into_iter().map(Var::Free).collect() } else { Vec::new() };
        vars.extend(self.one_sided());
        for (&p, &choice) in frictional.iter().zip(choices) {
            for sign in Sign::BOTH {
                if choice.allows(sign) && self.is_active(p, sign) {
                    vars.push(Var::NonNeg(p, sign));
                }
            }
        }
        vars
    }

    fn column(&self, var: Var) -> Vec<Rat> {
        match var {
            Var::Free(p) => self.stacked(p, Sign::Plus),
            Var::NonNeg(p, s) => self.stacked(p, s),
        }
    }

    fn order(&self, vars: &[Var], x: &[Rat]) -> OrderMatrix {
        let d = self.map.dim();
        let pairs = self.map.pairs();
        let mut m = zero_matrix(d);
        for (var, v) in vars.iter().zip(x) {
            let (p, signed) = match *var {
                Var::Free(p) => (p, v.clone()),
                Var::NonNeg(p, Sign::Plus) => (p, v.clone()),
                Var::NonNeg(p, Sign::Minus) => (p, -v.clone()),
            };
            let (i, j) = pairs[p];
            m[i][j] += signed;
        }
        m
    }

    fn evaluate(&self, eta: &OrderMatrix) -> Result<Vec<Rat>, ConeError> {
        let mut out = Vec::with_capacity(self.atom.len() * self.map.dim());
        for &w in self.atom {
            out.extend(self.map.evaluate(self.t, w, eta)?);
        }
        Ok(out)
    }
}

/// Sign restriction of one frictional cell in the branch tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Choice {
    Both,
    Only(Sign),
}

impl Choice {
    fn allows(self, sign: Sign) -> bool {
        match self {
            Choice::Both => true,
            Choice::Only(s) => s == sign,
        }
    }
}

/// Index into `frictional` of a cell whose buy and sell amounts are both positive.
fn conflict(frictional: &[usize], vars: &[Var], x: &[Rat]) -> Option<usize> {
    let positive = |p: usize, sign: Sign| vars.iter().zip(x).any(|(v, x)| matches!(*v, Var::NonNeg(q, s) if q == p && s == sign) && x.is_positive());
    frictional.iter().position(|&p| positive(p, Sign::Plus) && positive(p, Sign::Minus))
}

fn split(choices: &[Choice], b: usize) -> [Vec<Choice>; 2] {
    Sign::BOTH.map(|sign| {
        let mut c = choices.to_vec();
        c[b] = Choice::Only(sign);
        c
    })
}

/// Finds an order on the atom with `F_t(η) = target` exactly, if any.
///
/// Each frictional cell evaluates one generator depending on its sign, so the
/// exact set is a union of cones. The LP that lets both signs of a cell be
/// positive at once contains every member of the union; a relaxed solution with
/// no such cell is exact, and otherwise the tree branches on that cell.
fn represent(view: &AtomView<'_>, target: &[Rat], budget: &mut Budget) -> Result<Option<OrderMatrix>, ConeError> {
    let frictional = view.frictional();
    let mut stack = vec![vec![Choice::Both; frictional.len()]];
    while let Some(choices) = stack.pop() {
        let vars = view.branch_vars(&frictional, &choices, true);
        let cols: Vec<Vec<Rat>> = vars.iter().map(|&v| view.column(v)).collect();
        let mut lp = LinearProgram::feasibility(vars.len());
        for (j, v) in vars.iter().enumerate() {
            if matches!(v, Var::Free(_)) {
                lp.set_free(j);
            }
        }
        for (r, rhs) in target.iter().enumerate() {
            let row: Vec<Rat> = cols.iter().map(|c| c[r].clone()).collect();
            lp.add_row(row, Relation::Eq, rhs.clone());
        }
        budget.charge_lp()?;
        let LpOutcome::Optimal { x, .. } = solve_lp(&lp)? else { continue };
        if let Some(b) = conflict(&frictional, &vars, &x) {
            stack.extend(split(&choices, b));
            continue;
        }
        let eta = view.order(&vars, &x);
        if view.evaluate(&eta)? != target {
            return Err(ConeError::InvariantViolation("branch representation does not reproduce the target".into()));
        }
        return Ok(Some(eta));
    }
    Ok(None)
}

fn atom_membership(view: &AtomView<'_>, target: &[Rat], budget: &mut Budget) -> Result<Option<(OrderMatrix, OrderMatrix)>, ConeError> {
    let d = view.map.dim();
    if target.iter().all(Zero::is_zero) {
        return Ok(Some((zero_matrix(d), zero_matrix(d))));
    }
    let free = view.frictionless_active();
    let cols: Vec<Vec<Rat>> = free.iter().map(|&p| view.stacked(p, Sign::Plus)).collect();
    if let Some(c) = solve_combination(&cols, target) {
        let vars: Vec<Var> = free.iter().map(|&p| Var::Free(p)).collect();
        let eta = view.order(&vars, &c);
        let rev = eta.iter().map(|r| r.iter().map(|v| -v.clone()).collect()).collect();
        return Ok(Some((eta, rev)));
    }
    let Some(eta) = represent(view, target, budget)? else { return Ok(None) };
    let neg: Vec<Rat> = target.iter().map(|v| -v.clone()).collect();
    let Some(rev) = represent(view, &neg, budget)? else { return Ok(None) };
    Ok(Some((eta, rev)))
}

fn check_target(map: &TradeMap, t: usize, v: &RandomVector) -> Result<(), ConeError> {
    map.filtration().check_date(t).map_err(|e| ConeError::KernelMismatch(e.to_string()))?;
    if v.len() != map.space().len() || v.dim() != map.dim() {
        return Err(ConeError::DimensionMismatch { expected: map.space().len() * map.dim(), found: v.len() * v.dim() });
    }
    Ok(())
}

pub fn n0_membership(map: &TradeMap, t: usize, v: &RandomVector, budget: &mut Budget) -> Result<N0Membership, ConeError> {
    check_target(map, t, v)?;
    n0_membership_with(map, &frictionality_classify(map), t, v, budget)
}

pub(crate) fn n0_membership_with(
    map: &TradeMap,
    classes: &Classification,
    t: usize,
    v: &RandomVector,
    budget: &mut Budget,
) -> Result<N0Membership, ConeError> {
    let f = map.filtration();
    let mut eta = Vec::new();
    let mut eta_rev = Vec::new();
    for (a, atom) in f.atoms(t).iter().enumerate() {
        let view = AtomView { map, t, atom, classes: &classes.date(t)[a] };
        let target: Vec<Rat> = atom.iter().flat_map(|&w| v.get(w).iter().cloned()).collect();
        match atom_membership(&view, &target, budget)? {
            Some((e, r)) => {
                eta.push(e);
                eta_rev.push(r);
            }
            None => return Ok(N0Membership::No),
        }
    }
    Ok(N0Membership::Yes { eta, eta_rev })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EfVerdict {
    Holds,
    /// `witness ∈ N⁰_t`, nonzero, with `F_t(eta) = witness = -F_t(eta_rev)`.
    Fails { t: usize, witness: RandomVector, eta: Vec<OrderMatrix>, eta_rev: Vec<OrderMatrix> },
}

impl EfVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, EfVerdict::Holds)
    }
}

fn spread(map: &TradeMap, t: usize, atom_index: usize, stacked: &[Rat], order: OrderMatrix, rev: OrderMatrix) -> EfVerdict {
    let f = map.filtration();
    let d = map.dim();
    let n = f.space().len();
    let mut values = vec![vec![Rat::zero(); d]; n];
    for (slot, &w) in f.atoms(t)[atom_index].iter().enumerate() {
        values[w] = stacked[slot * d..(slot + 1) * d].to_vec();
    }
    let atoms = f.atoms(t).len();
    let mut eta = vec![zero_matrix(d); atoms];
    let mut eta_rev = vec![zero_matrix(d); atoms];
    eta[atom_index] = order;
    eta_rev[atom_index] = rev;
    EfVerdict::Fails { t, witness: RandomVector::new(values).expect("uniform dimension"), eta, eta_rev }
}

/// Decides `N⁰_t = {0}` for every date.
pub fn check_ef(map: &TradeMap, budget: &mut Budget) -> Result<EfVerdict, ConeError> {
    let classes = frictionality_classify(map);
    let f = map.filtration();
    let d = map.dim();
    for t in f.dates() {
        for (a, atom) in f.atoms(t).iter().enumerate() {
            let view = AtomView { map, t, atom, classes: &classes.date(t)[a] };
            if let Some(&p) = view.frictionless_active().first() {
                let (i, j) = map.pairs()[p];
                let mut e = zero_matrix(d);
                e[i][j] = Rat::one();
                let mut r = zero_matrix(d);
                r[i][j] = -Rat::one();
                let v = view.stacked(p, Sign::Plus);
                return Ok(spread(map, t, a, &v, e, r));
            }
            if let Some((e, r, v)) = cancelling_pair(&view, budget)? {
                return Ok(spread(map, t, a, &v, e, r));
            }
        }
    }
    Ok(EfVerdict::Holds)
}

/// Looks for `F(η) = -F(η') ≠ 0` on the atom by branching on the frictional
/// cells of both orders, as in [`represent`].
fn cancelling_pair(view: &AtomView<'_>, budget: &mut Budget) -> Result<Option<(OrderMatrix, OrderMatrix, Vec<Rat>)>, ConeError> {
    let frictional = view.frictional();
    let f = frictional.len();
    let rows = view.atom.len() * view.map.dim();
    let program = |choices: &[Choice], objective: &dyn Fn(&[Vec<Rat>], usize) -> Vec<Rat>| {
        let vars = view.branch_vars(&frictional, &choices[..f], false);
        let vars_rev = view.branch_vars(&frictional, &choices[f..], false);
        let cols: Vec<Vec<Rat>> = vars.iter().chain(&vars_rev).map(|&v| view.column(v)).collect();
        let mut lp = LinearProgram::new(Sense::Max, objective(&cols, vars.len()));
        for r in 0..rows {
            let row: Vec<Rat> = cols.iter().map(|c| c[r].clone()).collect();
            lp.add_row(row, Relation::Eq, Rat::zero());
        }
        lp.add_row(vec![Rat::one(); cols.len()], Relation::Le, Rat::one());
        (lp, vars, vars_rev)
    };
    let root = vec![Choice::Both; 2 * f];
    // Cheap screen: if the only cancelling combination is zero, no coordinate can be nonzero.
    let (lp, ..) = program(&root, &|cols, _| vec![Rat::one(); cols.len()]);
    if lp.num_vars() == 0 {
        return Ok(None);
    }
    budget.charge_lp()?;
    if !solve_lp(&lp)?.value().is_some_and(Signed::is_positive) {
        return Ok(None);
    }
    for r in 0..rows {
        // Scanning only for positive coordinates suffices: a negative one shows up
        // as a positive coordinate of the swapped pair.
        let objective = |cols: &[Vec<Rat>], n: usize| cols.iter().enumerate().map(|(j, c)| if j < n { c[r].clone() } else { Rat::zero() }).collect();
        let mut stack = vec![root.clone()];
        while let Some(choices) = stack.pop() {
            let (lp, vars, vars_rev) = program(&choices, &objective);
            if vars.is_empty() || vars_rev.is_empty() {
                continue;
            }
            budget.charge_lp()?;
            let LpOutcome::Optimal { x, value, .. } = solve_lp(&lp)? else { continue };
            if !value.is_positive() {
                continue;
            }
            let (x, x_rev) = x.split_at(vars.len());
            if let Some(b) = conflict(&frictional, &vars, x) {
                stack.extend(split(&choices, b));
                continue;
            }
            if let Some(b) = conflict(&frictional, &vars_rev, x_rev) {
                stack.extend(split(&choices, f + b));
                continue;
            }
            let eta = view.order(&vars, x);
            let rev = view.order(&vars_rev, x_rev);
            let v = view.evaluate(&eta)?;
            let back = view.evaluate(&rev)?;
            if v.iter().zip(&back).any(|(a, b)| !(a + b).is_zero()) || v.iter().all(Zero::is_zero) {
                return Err(ConeError::InvariantViolation("cancelling pair does not cancel".into()));
            }
            return Ok(Some((eta, rev, v)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::fixtures::{bin1, bin1_tc, binomial, pi};
    use crate::rational::{int, rat};
    use crate::space::{Filtration, FiniteSpace};
    use crate::trade::{currency_market_v1_rates, security_market};

    fn order(x: Rat) -> OrderMatrix {
        vec![vec![Rat::zero(), x], vec![Rat::zero(), Rat::zero()]]
    }

    fn date0_increment(map: &TradeMap, eta: &OrderMatrix) -> RandomVector {
        RandomVector::new((0..2).map(|w| map.evaluate(0, w, eta).unwrap()).collect()).unwrap()
    }

    #[test]
    fn frictionless_trade_is_reversible() {
        let map = bin1();
        let v = date0_increment(&map, &order(int(3)));
        match n0_membership(&map, 0, &v, &mut Budget::unlimited()).unwrap() {
            N0Membership::Yes { eta, eta_rev } => {
                assert_eq!(map.evaluate(0, 0, &eta[0]).unwrap(), v.get(0));
                let back = map.evaluate(0, 0, &eta_rev[0]).unwrap();
                assert!(back.iter().zip(v.get(0)).all(|(a, b)| (a + b).is_zero()));
            }
            N0Membership::No => panic!("frictionless trade must be reversible"),
        }
        assert!(!check_ef(&map, &mut Budget::unlimited()).unwrap().holds());
    }

    #[test]
    fn spread_trade_is_not_reversible() {
        let map = bin1_tc();
        let v = date0_increment(&map, &order(int(1)));
        assert!(!n0_membership(&map, 0, &v, &mut Budget::unlimited()).unwrap().is_yes());
        let zero = RandomVector::new(vec![vec![Rat::zero(); 2]; 2]).unwrap();
        assert!(n0_membership(&map, 0, &zero, &mut Budget::unlimited()).unwrap().is_yes());
        assert!(check_ef(&map, &mut Budget::unlimited()).unwrap().holds());
    }

    #[test]
    fn spread_on_one_outcome_blocks_reversal() {
        let f = binomial();
        let map = security_market(&f, &[vec![pi(int(1), int(1)), pi(int(1), int(2))], vec![pi(int(1), int(1)); 2]]).unwrap();
        let v = date0_increment(&map, &order(int(1)));
        assert!(!n0_membership(&map, 0, &v, &mut Budget::unlimited()).unwrap().is_yes());
        // Date 1 is frictionless on its own atoms.
        let EfVerdict::Fails { t, .. } = check_ef(&map, &mut Budget::unlimited()).unwrap() else { panic!("expected a witness") };
        assert_eq!(t, 1);
    }

    #[test]
    fn costless_cycle_is_reversible() {
        // Three currencies at par, free along 0 → 1 → 2 → 0 and costly the other way.
        // Every pair is frictional, yet 0 → 1 → 2 is undone by 2 → 0.
        let s = FiniteSpace::new(vec!["w".into()], vec![int(1)]).unwrap();
        let f = Filtration::new(s, vec![vec![vec![0]]]).unwrap();
        let tau = vec![vec![vec![vec![int(1); 3]; 3]]];
        let c = rat(1, 10);
        let z = Rat::zero();
        let lambda = vec![vec![vec![vec![z.clone(), z.clone(), c.clone()], vec![c.clone(), z.clone(), z.clone()], vec![z.clone(), c, z]]]];
        let map = currency_market_v1_rates(&f, &tau, &lambda).unwrap();
        let classes = frictionality_classify(&map);
        assert!((0..6).all(|p| classes.get(0, 0, p) == FrictionClass::Frictional));
        let mut budget = Budget::unlimited();
        let EfVerdict::Fails { witness, .. } = check_ef(&map, &mut budget).unwrap() else { panic!("expected a witness") };
        assert!(n0_membership(&map, 0, &witness, &mut budget).unwrap().is_yes());
        let v = RandomVector::new(vec![vec![int(-1), int(0), int(1)]]).unwrap();
        assert!(n0_membership(&map, 0, &v, &mut budget).unwrap().is_yes());
        let v = RandomVector::new(vec![vec![int(-1), int(1), int(0)]]).unwrap();
        assert!(n0_membership(&map, 0, &v, &mut budget).unwrap().is_yes());
        let v = RandomVector::new(vec![vec![int(-2), int(1), int(0)]]).unwrap();
        assert!(!n0_membership(&map, 0, &v, &mut budget).unwrap().is_yes());
    }

    #[test]
    fn guard_stops_search() {
        let map = bin1_tc();
        let v = date0_increment(&map, &order(int(1)));
        let mut budget = Budget::new(crate::cones::Guard { max_lp_calls: 0, max_rays: 1 });
        assert!(matches!(n0_membership(&map, 0, &v, &mut budget), Err(ConeError::SizeGuardExceeded { .. })));
    }
}
