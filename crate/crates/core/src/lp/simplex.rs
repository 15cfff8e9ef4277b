//! Two-phase primal simplex on a dense tableau over exact rationals.
//!
//! Pivoting uses the largest reduced cost and falls back to Bland's rule for the
//! rest of a phase once a run of degenerate pivots is seen, so every solve
//! terminates and the pivot sequence depends only on the input.

use log::{log_enabled, trace, Level};
use num_traits::{One, Signed, Zero};

use super::program::{FarkasCertificate, LinearProgram, LpError, LpOutcome, Relation, Sense};
use crate::rational::{fmt_rat, Rat};

const DEGENERATE_STREAK: usize = 32;

/// How a user variable is expressed through nonnegative internal columns.
#[derive(Debug, Clone)]
enum VarMap {
    /// `x = lower + x'`
    Shift { col: usize, lower: Rat },
    /// `x = upper - x'`
    Reflect { col: usize, upper: Rat },
    /// `x = x'₊ - x'₋`
    Split { pos: usize, neg: usize },
}

struct Standard {
    maps: Vec<VarMap>,
    n_struct: usize,
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    rel: Vec<Relation>,
    /// Set when the internal row is the negated user row.
    flip: Vec<bool>,
    user_row: Vec<Option<usize>>,
    cost: Vec<Rat>,
}

fn standardize(lp: &LinearProgram) -> Standard {
    let n = lp.num_vars();
    let mut maps = Vec::with_capacity(n);
    let mut n_struct = 0;
    let mut bound_rows: Vec<(usize, Rat)> = Vec::new();
    for j in 0..n {
        let map = match (&lp.lower[j], &lp.upper[j]) {
            (Some(l), u) => {
                let col = n_struct;
                n_struct += 1;
                if let Some(u) = u {
                    bound_rows.push((col, u - l));
                }
                VarMap::Shift { col, lower: l.clone() }
            }
            (None, Some(u)) => {
                let col = n_struct;
                n_struct += 1;
                VarMap::Reflect { col, upper: u.clone() }
            }
            (None, None) => {
                let pos = n_struct;
                n_struct += 2;
                VarMap::Split { pos, neg: pos + 1 }
            }
        };
        maps.push(map);
    }

    let translate = |coeffs: &[Rat]| -> (Vec<Rat>, Rat) {
        let mut row = vec![Rat::zero(); n_struct];
        let mut offset = Rat::zero();
        for (j, a) in coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            match &maps[j] {
                VarMap::Shift { col, lower } => {
                    row[*col] += a;
                    offset += a * lower;
                }
                VarMap::Reflect { col, upper } => {
                    row[*col] -= a;
                    offset += a * upper;
                }
                VarMap::Split { pos, neg } => {
                    row[*pos] += a;
                    row[*neg] -= a;
                }
            }
        }
        (row, offset)
    };

    let mut std = Standard {
        maps: Vec::new(),
        n_struct,
        rows: Vec::new(),
        rhs: Vec::new(),
        rel: Vec::new(),
        flip: Vec::new(),
        user_row: Vec::new(),
        cost: Vec::new(),
    };
    let mut push = |row: Vec<Rat>, rel: Relation, rhs: Rat, user: Option<usize>| {
        let flip = rhs.is_negative() || (rhs.is_zero() && rel == Relation::Ge);
        if flip {
            std.rows.push(row.into_iter().map(|a| -a).collect());
            std.rhs.push(-rhs);
            std.rel.push(match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            });
        } else {
            std.rows.push(row);
            std.rhs.push(rhs);
            std.rel.push(rel);
        }
        std.flip.push(flip);
        std.user_row.push(user);
    };
    for (r, c) in lp.constraints.iter().enumerate() {
        let (row, offset) = translate(&c.coeffs);
        push(row, c.rel, &c.rhs - offset, Some(r));
    }
    for (col, width) in bound_rows {
        let mut row = vec![Rat::zero(); n_struct];
        row[col] = Rat::one();
        push(row, Relation::Le, width, None);
    }
    let (mut cost, _) = translate(&lp.objective);
    if lp.sense == Sense::Min {
        cost.iter_mut().for_each(|c| *c = -c.clone());
    }
    std.cost = cost;
    std.maps = maps;
    std
}

struct Tableau {
    /// `m` rows of `ncols + 1` entries; the last entry is the right-hand side.
    t: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    ncols: usize,
    /// Reduced costs `c_j - c_B B⁻¹ A_j`; the last entry is minus the objective value.
    z: Vec<Rat>,
    cost: Vec<Rat>,
    barred: Vec<bool>,
    pivots: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rat {
        &self.t[i][self.ncols]
    }

    fn reset_costs(&mut self, cost: Vec<Rat>) {
        let mut z = cost.clone();
        z.push(Rat::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            if cost[b].is_zero() {
                continue;
            }
            for (k, v) in self.t[i].iter().enumerate() {
                if !v.is_zero() {
                    z[k] -= &cost[b] * v;
                }
            }
        }
        self.z = z;
        self.cost = cost;
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let piv = self.t[r][q].clone();
        if !piv.is_one() {
            for v in self.t[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &piv;
                }
            }
        }
        let support: Vec<usize> = (0..=self.ncols).filter(|&k| !self.t[r][k].is_zero()).collect();
        let prow: Vec<Rat> = support.iter().map(|&k| self.t[r][k].clone()).collect();
        for i in 0..self.t.len() {
            if i == r || self.t[i][q].is_zero() {
                continue;
            }
            let f = self.t[i][q].clone();
            let row = &mut self.t[i];
            for (&k, pv) in support.iter().zip(&prow) {
                row[k] -= &f * pv;
            }
        }
        if !self.z[q].is_zero() {
            let f = self.z[q].clone();
            for (&k, pv) in support.iter().zip(&prow) {
                self.z[k] -= &f * pv;
            }
        }
        self.basis[r] = q;
        self.pivots += 1;
    }

    fn run(&mut self) -> PhaseEnd {
        let mut bland = false;
        let mut streak = 0;
        loop {
            let entering = if bland {
                (0..self.ncols).find(|&j| !self.barred[j] && self.z[j].is_positive())
            } else {
                let mut best: Option<usize> = None;
                for j in 0..self.ncols {
                    if self.barred[j] || !self.z[j].is_positive() {
                        continue;
                    }
                    if best.map_or(true, |b| self.z[j] > self.z[b]) {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(q) = entering else { return PhaseEnd::Optimal };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][q];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = leave else { return PhaseEnd::Unbounded(q) };
            if ratio.is_zero() {
                streak += 1;
                if streak >= DEGENERATE_STREAK {
                    bland = true;
                }
            } else {
                streak = 0;
            }
            self.pivot(r, q);
        }
    }

    fn row_duals(&self, idcol: &[usize]) -> Vec<Rat> {
        idcol
            .iter()
            .map(|&c| {
                self.basis.iter().enumerate().fold(Rat::zero(), |acc, (i, &b)| {
                    if self.cost[b].is_zero() || self.t[i][c].is_zero() {
                        acc
                    } else {
                        acc + &self.cost[b] * &self.t[i][c]
                    }
                })
            })
            .collect()
    }

    fn internal_point(&self) -> Vec<Rat> {
        let mut x = vec![Rat::zero(); self.ncols];
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = self.rhs(i).clone();
        }
        x
    }

    fn dump(&self, label: &str) {
        if !log_enabled!(target: "tcna::lp", Level::Trace) {
            return;
        }
        let mut s = format!("{label}: basis {:?}, pivots {}\n", self.basis, self.pivots);
        for row in &self.t {
            let cells: Vec<String> = row.iter().map(fmt_rat).collect();
            s.push_str(&format!("  {}\n", cells.join(" ")));
        }
        let z: Vec<String> = self.z.iter().map(fmt_rat).collect();
        s.push_str(&format!("  z: {}\n", z.join(" ")));
        trace!(target: "tcna::lp", "{s}");
    }
}

fn user_point(maps: &[VarMap], internal: &[Rat], homogeneous: bool) -> Vec<Rat> {
    maps.iter()
        .map(|m| match m {
            VarMap::Shift { col, lower } => {
                if homogeneous {
                    internal[*col].clone()
                } else {
                    lower + &internal[*col]
                }
            }
            VarMap::Reflect { col, upper } => {
                if homogeneous {
                    -internal[*col].clone()
                } else {
                    upper - &internal[*col]
                }
            }
            VarMap::Split { pos, neg } => &internal[*pos] - &internal[*neg],
        })
        .collect()
}

fn user_multipliers(std: &Standard, y: &[Rat], num_user: usize, negate: bool) -> Vec<Rat> {
    let mut m = vec![Rat::zero(); num_user];
    for (r, yr) in y.iter().enumerate() {
        if let Some(u) = std.user_row[r] {
            let mut v = if std.flip[r] { -yr.clone() } else { yr.clone() };
            if negate {
                v = -v;
            }
            m[u] = v;
        }
    }
    m
}

/// Solves `lp` exactly. The outcome carries a certificate that
/// [`super::verify::verify_outcome`] checks independently.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    if log_enabled!(target: "tcna::lp", Level::Trace) {
        trace!(target: "tcna::lp", "solve\n{}", lp.render());
    }
    for j in 0..lp.num_vars() {
        if let (Some(l), Some(u)) = (&lp.lower[j], &lp.upper[j]) {
            if l > u {
                return Ok(LpOutcome::Infeasible(FarkasCertificate {
                    multipliers: vec![Rat::zero(); lp.num_rows()],
                    bound_conflict: Some(j),
                }));
            }
        }
    }

    let std = standardize(lp);
    let m = std.rows.len();
    let n_struct = std.n_struct;

    // Column layout: structural, then one slack/surplus per inequality row, then
    // one artificial per `≥`/`=` row.
    let mut slack_of = vec![None; m];
    let mut ncols = n_struct;
    for r in 0..m {
        if std.rel[r] != Relation::Eq {
            slack_of[r] = Some(ncols);
            ncols += 1;
        }
    }
    let first_artificial = ncols;
    let mut art_of = vec![None; m];
    for r in 0..m {
        if std.rel[r] != Relation::Le {
            art_of[r] = Some(ncols);
            ncols += 1;
        }
    }
    let mut t = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut idcol = Vec::with_capacity(m);
    for r in 0..m {
        let mut row = vec![Rat::zero(); ncols + 1];
        row[..n_struct].clone_from_slice(&std.rows[r]);
        if let Some(s) = slack_of[r] {
            row[s] = if std.rel[r] == Relation::Le { Rat::one() } else { -Rat::one() };
        }
        if let Some(a) = art_of[r] {
            row[a] = Rat::one();
        }
        row[ncols] = std.rhs[r].clone();
        let id = art_of[r].or(slack_of[r]).expect("every row has an identity column");
        basis.push(id);
        idcol.push(id);
        t.push(row);
    }
    let mut tab = Tableau {
        t,
        basis,
        ncols,
        z: Vec::new(),
        cost: Vec::new(),
        barred: vec![false; ncols],
        pivots: 0,
    };

    if first_artificial < ncols {
        let mut cost1 = vec![Rat::zero(); ncols];
        cost1[first_artificial..].iter_mut().for_each(|c| *c = -Rat::one());
        tab.reset_costs(cost1);
        tab.dump("phase 1 start");
        match tab.run() {
            PhaseEnd::Optimal => {}
            PhaseEnd::Unbounded(_) => unreachable!("phase 1 objective is bounded above by zero"),
        }
        tab.dump("phase 1 end");
        if tab.z[ncols].is_positive() {
            let y = tab.row_duals(&idcol);
            return Ok(LpOutcome::Infeasible(FarkasCertificate {
                multipliers: user_multipliers(&std, &y, lp.num_rows(), false),
                bound_conflict: None,
            }));
        }
        for i in 0..m {
            if tab.basis[i] < first_artificial {
                continue;
            }
            if let Some(j) = (0..first_artificial).find(|&j| !tab.t[i][j].is_zero()) {
                tab.pivot(i, j);
            }
        }
        tab.barred[first_artificial..].iter_mut().for_each(|b| *b = true);
    }

    let mut cost2 = vec![Rat::zero(); ncols];
    cost2[..n_struct].clone_from_slice(&std.cost);
    tab.reset_costs(cost2);
    tab.dump("phase 2 start");
    let end = tab.run();
    tab.dump("phase 2 end");
    let internal = tab.internal_point();
    let x = user_point(&std.maps, &internal, false);
    match end {
        PhaseEnd::Optimal => {
            let y = tab.row_duals(&idcol);
            let duals = user_multipliers(&std, &y, lp.num_rows(), lp.sense == Sense::Min);
            let value = lp.objective_value(&x);
            Ok(LpOutcome::Optimal { x, duals, value })
        }
        PhaseEnd::Unbounded(q) => {
            let mut dir = vec![Rat::zero(); ncols];
            dir[q] = Rat::one();
            for (i, &b) in tab.basis.iter().enumerate() {
                if !tab.t[i][q].is_zero() {
                    dir[b] = -tab.t[i][q].clone();
                }
            }
            let ray = user_point(&std.maps, &dir, true);
            Ok(LpOutcome::Unbounded { x, ray })
        }
    }
}
