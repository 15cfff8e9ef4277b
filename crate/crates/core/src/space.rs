//! Finite probability spaces, partition filtrations and the conditional-expectation
//! machinery built on them.
//!
//! Outcomes are identified by their index in a fixed ordering. A σ-algebra on a
//! finite set is a partition, so a filtration is a refining chain of partitions and
//! "adapted" means "constant on every atom of the current partition".

use std::collections::{BTreeMap, HashSet};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{fmt_rat, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("a probability space needs at least one outcome")]
    Empty,
    #[error("{labels} labels but {probs} probabilities")]
    LengthMismatch { labels: usize, probs: usize },
    #[error("outcome {index} has non-positive probability {prob}")]
    ZeroProbability { index: usize, prob: String },
    #[error("probabilities sum to {sum}, not 1")]
    NotNormalized { sum: String },
    #[error("duplicate outcome label {0:?}")]
    DuplicateLabel(String),
    #[error("date {date}: not a partition of the outcomes ({reason})")]
    NotAPartition { date: usize, reason: String },
    #[error("date {date}: atom {atom:?} is not contained in a single atom of date {prev}", prev = date - 1)]
    NotRefining { date: usize, atom: Vec<usize> },
    #[error("density is not strictly positive at outcome {index}")]
    ZeroDensity { index: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("date {date} is beyond the horizon {horizon}")]
    DateOutOfRange { date: usize, horizon: usize },
    #[error("measure is defined on different outcomes than the filtration")]
    MeasureMismatch,
}

/// Outcome set with strictly positive probabilities summing to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSpace {
    labels: Vec<String>,
    probs: Vec<Rat>,
}

impl FiniteSpace {
    pub fn new(labels: Vec<String>, probs: Vec<Rat>) -> Result<Self, SpaceError> {
        if labels.is_empty() {
            return Err(SpaceError::Empty);
        }
        if labels.len() != probs.len() {
            return Err(SpaceError::LengthMismatch { labels: labels.len(), probs: probs.len() });
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(SpaceError::DuplicateLabel(l.clone()));
            }
        }
        if let Some((index, p)) = probs.iter().enumerate().find(|(_, p)| !p.is_positive()) {
            return Err(SpaceError::ZeroProbability { index, prob: fmt_rat(p) });
        }
        let sum: Rat = probs.iter().sum();
        if !sum.is_one() {
            return Err(SpaceError::NotNormalized { sum: fmt_rat(&sum) });
        }
        Ok(FiniteSpace { labels, probs })
    }

    /// Equiprobable space on the given labels.
    pub fn uniform<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self, SpaceError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(SpaceError::Empty);
        }
        let p = Rat::new(1.into(), (labels.len() as i64).into());
        let probs = vec![p; labels.len()];
        Self::new(labels, probs)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[Rat] {
        &self.probs
    }

    pub fn prob(&self, outcome: usize) -> &Rat {
        &self.probs[outcome]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    fn same_outcomes(&self, other: &FiniteSpace) -> bool {
        self.labels == other.labels
    }

    /// Equivalent measure with `dQ/dP = h / E[h]` for a scalar density `h`.
    pub fn change_measure(&self, density: &RandomVector) -> Result<FiniteSpace, SpaceError> {
        if density.dim() != 1 {
            return Err(SpaceError::DimensionMismatch { expected: 1, found: density.dim() });
        }
        if density.len() != self.len() {
            return Err(SpaceError::DimensionMismatch { expected: self.len(), found: density.len() });
        }
        if let Some(index) = (0..self.len()).find(|&w| !density.get(w)[0].is_positive()) {
            return Err(SpaceError::ZeroDensity { index });
        }
        let weighted: Vec<Rat> =
            (0..self.len()).map(|w| &self.probs[w] * &density.get(w)[0]).collect();
        let total: Rat = weighted.iter().sum();
        let probs = weighted.into_iter().map(|x| x / &total).collect();
        FiniteSpace::new(self.labels.clone(), probs)
    }
}

/// A set of outcome indices, sorted ascending.
pub type Atom = Vec<usize>;

/// Refining chain of partitions `H_0 ⊆ H_1 ⊆ … ⊆ H_T`.
///
/// Partitions are canonicalized: outcomes inside an atom are sorted and atoms are
/// ordered by their smallest outcome, so two filtrations describing the same
/// information compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration {
    space: FiniteSpace,
    partitions: Vec<Vec<Atom>>,
    atom_of: Vec<Vec<usize>>,
}

impl Filtration {
    pub fn new(space: FiniteSpace, partitions: Vec<Vec<Atom>>) -> Result<Self, SpaceError> {
        if partitions.is_empty() {
            return Err(SpaceError::NotAPartition { date: 0, reason: "no dates given".into() });
        }
        let n = space.len();
        let mut canonical = Vec::with_capacity(partitions.len());
        let mut atom_of = Vec::with_capacity(partitions.len());
        for (date, partition) in partitions.into_iter().enumerate() {
            let mut owner = vec![usize::MAX; n];
            let mut atoms: Vec<Atom> = Vec::with_capacity(partition.len());
            for mut atom in partition {
                if atom.is_empty() {
                    return Err(SpaceError::NotAPartition { date, reason: "empty atom".into() });
                }
                atom.sort_unstable();
                atoms.push(atom);
            }
            atoms.sort();
            for (a, atom) in atoms.iter().enumerate() {
                for &w in atom {
                    if w >= n {
                        return Err(SpaceError::NotAPartition {
                            date,
                            reason: format!("outcome index {w} out of range"),
                        });
                    }
                    if owner[w] != usize::MAX {
                        return Err(SpaceError::NotAPartition {
                            date,
                            reason: format!("outcome {w} appears in two atoms"),
                        });
                    }
                    owner[w] = a;
                }
            }
            if let Some(w) = owner.iter().position(|&a| a == usize::MAX) {
                return Err(SpaceError::NotAPartition { date, reason: format!("outcome {w} is not covered") });
            }
            if date > 0 {
                let prev: &Vec<usize> = &atom_of[date - 1];
                for atom in &atoms {
                    let parent = prev[atom[0]];
                    if atom.iter().any(|&w| prev[w] != parent) {
                        return Err(SpaceError::NotRefining { date, atom: atom.clone() });
                    }
                }
            }
            canonical.push(atoms);
            atom_of.push(owner);
        }
        Ok(Filtration { space, partitions: canonical, atom_of })
    }

    /// `H_t` trivial for `t < reveal_from` and discrete afterwards.
    pub fn delayed(space: FiniteSpace, horizon: usize, reveal_from: usize) -> Result<Self, SpaceError> {
        let n = space.len();
        let partitions = (0..=horizon)
            .map(|t| if t < reveal_from { vec![(0..n).collect()] } else { (0..n).map(|w| vec![w]).collect() })
            .collect();
        Filtration::new(space, partitions)
    }

    /// The filtration generated by observing `data[0..=t]` at each date `t`.
    ///
    /// `data[t][w]` is any vector of observations for outcome `w` at date `t`.
    pub fn generated_by(space: FiniteSpace, data: &[Vec<Vec<Rat>>]) -> Result<Self, SpaceError> {
        let n = space.len();
        let mut partitions = Vec::with_capacity(data.len());
        let mut keys: Vec<Vec<Rat>> = vec![Vec::new(); n];
        for slice in data {
            if slice.len() != n {
                return Err(SpaceError::DimensionMismatch { expected: n, found: slice.len() });
            }
            for (w, obs) in slice.iter().enumerate() {
                keys[w].extend(obs.iter().cloned());
            }
            let mut groups: BTreeMap<&Vec<Rat>, Atom> = BTreeMap::new();
            for (w, k) in keys.iter().enumerate() {
                groups.entry(k).or_default().push(w);
            }
            partitions.push(groups.into_values().collect());
        }
        Filtration::new(space, partitions)
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn horizon(&self) -> usize {
        self.partitions.len() - 1
    }

    pub fn dates(&self) -> std::ops::RangeInclusive<usize> {
        0..=self.horizon()
    }

    pub fn atoms(&self, t: usize) -> &[Atom] {
        &self.partitions[t]
    }

    pub fn partitions(&self) -> &[Vec<Atom>] {
        &self.partitions
    }

    pub fn atom_of(&self, t: usize, outcome: usize) -> usize {
        self.atom_of[t][outcome]
    }

    pub fn check_date(&self, t: usize) -> Result<(), SpaceError> {
        if t > self.horizon() {
            Err(SpaceError::DateOutOfRange { date: t, horizon: self.horizon() })
        } else {
            Ok(())
        }
    }

    /// Indices of the date-`t+1` atoms contained in atom `atom` of date `t`.
    pub fn children(&self, t: usize, atom: usize) -> Vec<usize> {
        let mut out: Vec<usize> =
            self.partitions[t][atom].iter().map(|&w| self.atom_of[t + 1][w]).collect();
        out.dedup();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn check_measure(&self, measure: &FiniteSpace) -> Result<(), SpaceError> {
        if self.space.same_outcomes(measure) {
            Ok(())
        } else {
            Err(SpaceError::MeasureMismatch)
        }
    }
}

/// One vector of fixed dimension per outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomVector {
    dim: usize,
    values: Vec<Vec<Rat>>,
}

impl RandomVector {
    pub fn new(values: Vec<Vec<Rat>>) -> Result<Self, SpaceError> {
        let dim = values.first().map(Vec::len).unwrap_or(0);
        if let Some(v) = values.iter().find(|v| v.len() != dim) {
            return Err(SpaceError::DimensionMismatch { expected: dim, found: v.len() });
        }
        Ok(RandomVector { dim, values })
    }

    pub fn scalar(values: Vec<Rat>) -> Self {
        RandomVector { dim: 1, values: values.into_iter().map(|x| vec![x]).collect() }
    }

    pub fn constant(outcomes: usize, value: Vec<Rat>) -> Self {
        RandomVector { dim: value.len(), values: vec![value; outcomes] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, outcome: usize) -> &[Rat] {
        &self.values[outcome]
    }

    pub fn values(&self) -> &[Vec<Rat>] {
        &self.values
    }

    /// Component `k` as a scalar random variable.
    pub fn component(&self, k: usize) -> RandomVector {
        RandomVector::scalar(self.values.iter().map(|v| v[k].clone()).collect())
    }

    pub fn map(&self, f: impl Fn(usize, &[Rat]) -> Vec<Rat>) -> Result<RandomVector, SpaceError> {
        RandomVector::new(self.values.iter().enumerate().map(|(w, v)| f(w, v)).collect())
    }
}

/// Vector-valued process constant on the atoms of the filtration: `values[t][atom]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptedProcess {
    dim: usize,
    values: Vec<Vec<Vec<Rat>>>,
}

impl AdaptedProcess {
    pub fn new(filtration: &Filtration, dim: usize, values: Vec<Vec<Vec<Rat>>>) -> Result<Self, SpaceError> {
        if values.len() != filtration.horizon() + 1 {
            return Err(SpaceError::DimensionMismatch { expected: filtration.horizon() + 1, found: values.len() });
        }
        for (t, slice) in values.iter().enumerate() {
            if slice.len() != filtration.atoms(t).len() {
                return Err(SpaceError::DimensionMismatch { expected: filtration.atoms(t).len(), found: slice.len() });
            }
            if let Some(v) = slice.iter().find(|v| v.len() != dim) {
                return Err(SpaceError::DimensionMismatch { expected: dim, found: v.len() });
            }
        }
        Ok(AdaptedProcess { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> usize {
        self.values.len() - 1
    }

    pub fn value(&self, t: usize, atom: usize) -> &[Rat] {
        &self.values[t][atom]
    }

    pub fn slice(&self, t: usize) -> &[Vec<Rat>] {
        &self.values[t]
    }

    pub fn at(&self, filtration: &Filtration, t: usize, outcome: usize) -> &[Rat] {
        &self.values[t][filtration.atom_of(t, outcome)]
    }

    /// The date-`t` value seen as a random vector.
    pub fn as_random(&self, filtration: &Filtration, t: usize) -> RandomVector {
        let n = filtration.space().len();
        RandomVector { dim: self.dim, values: (0..n).map(|w| self.at(filtration, t, w).to_vec()).collect() }
    }

    pub fn component(&self, k: usize) -> AdaptedProcess {
        AdaptedProcess {
            dim: 1,
            values: self.values.iter().map(|s| s.iter().map(|v| vec![v[k].clone()]).collect()).collect(),
        }
    }
}

/// `E_measure[X | H_t]`, one vector per atom of `H_t`.
pub fn cond_expect(
    x: &RandomVector,
    filtration: &Filtration,
    t: usize,
    measure: &FiniteSpace,
) -> Result<Vec<Vec<Rat>>, SpaceError> {
    filtration.check_date(t)?;
    filtration.check_measure(measure)?;
    if x.len() != measure.len() {
        return Err(SpaceError::DimensionMismatch { expected: measure.len(), found: x.len() });
    }
    Ok(filtration
        .atoms(t)
        .iter()
        .map(|atom| atom_average(x, atom, measure))
        .collect())
}

/// Average of `x` over `atom` under `measure`.
pub fn atom_average(x: &RandomVector, atom: &[usize], measure: &FiniteSpace) -> Vec<Rat> {
    let mut mass = Rat::zero();
    let mut acc = vec![Rat::zero(); x.dim()];
    for &w in atom {
        let q = measure.prob(w);
        mass += q;
        for (a, v) in acc.iter_mut().zip(x.get(w)) {
            *a += q * v;
        }
    }
    acc.into_iter().map(|a| a / &mass).collect()
}

/// `(E_measure[X_t | H_t])_t` for a sequence `xs[t]` of random vectors.
pub fn optional_projection(
    xs: &[RandomVector],
    filtration: &Filtration,
    measure: &FiniteSpace,
) -> Result<AdaptedProcess, SpaceError> {
    if xs.len() != filtration.horizon() + 1 {
        return Err(SpaceError::DimensionMismatch { expected: filtration.horizon() + 1, found: xs.len() });
    }
    let dim = xs.first().map(RandomVector::dim).unwrap_or(0);
    let values = xs
        .iter()
        .enumerate()
        .map(|(t, x)| {
            if x.dim() != dim {
                return Err(SpaceError::DimensionMismatch { expected: dim, found: x.dim() });
            }
            cond_expect(x, filtration, t, measure)
        })
        .collect::<Result<Vec<_>, _>>()?;
    AdaptedProcess::new(filtration, dim, values)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MartingaleVerdict {
    pub holds: bool,
    /// First `(t, atom)` at which the one-step condition fails.
    pub first_failure: Option<(usize, usize)>,
}

/// Checks `E_measure[M_{t+1} | H_t] = M_t` on every atom, exactly.
pub fn is_martingale(
    process: &AdaptedProcess,
    filtration: &Filtration,
    measure: &FiniteSpace,
) -> Result<MartingaleVerdict, SpaceError> {
    filtration.check_measure(measure)?;
    if process.horizon() != filtration.horizon() {
        return Err(SpaceError::DimensionMismatch { expected: filtration.horizon(), found: process.horizon() });
    }
    for t in 0..filtration.horizon() {
        let next = process.as_random(filtration, t + 1);
        for (a, atom) in filtration.atoms(t).iter().enumerate() {
            if atom_average(&next, atom, measure) != process.value(t, a) {
                return Ok(MartingaleVerdict { holds: false, first_failure: Some((t, a)) });
            }
        }
    }
    Ok(MartingaleVerdict { holds: true, first_failure: None })
}
