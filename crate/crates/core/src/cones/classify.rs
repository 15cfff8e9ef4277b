use num_traits::Zero;

use crate::trade::{ConeSpec, Sign, TradeMap};

/// How an exchange pair behaves on one atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrictionClass {
    /// Both directions admissible and exact negatives at every outcome of the atom.
    Frictionless,
    /// Both directions admissible, not reversible somewhere on the atom.
    Frictional,
    /// One direction admissible with a generator that is nonzero somewhere.
    OneSidedActive,
    /// One direction admissible, generator zero on the whole atom.
    OneSidedZero,
    Inactive,
}

impl FrictionClass {
    /// Whether the dual row of this cell must hold strictly.
    pub fn is_strict(self) -> bool {
        matches!(self, FrictionClass::Frictional | FrictionClass::OneSidedActive)
    }

    pub fn name(self) -> &'static str {
        match self {
            FrictionClass::Frictionless => "frictionless",
            FrictionClass::Frictional => "frictional",
            FrictionClass::OneSidedActive => "one-sided-active",
            FrictionClass::OneSidedZero => "one-sided-zero",
            FrictionClass::Inactive => "inactive",
        }
    }
}

/// Classes indexed `[t][atom][pair]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    classes: Vec<Vec<Vec<FrictionClass>>>,
}

impl Classification {
    pub fn get(&self, t: usize, atom: usize, pair: usize) -> FrictionClass {
        self.classes[t][atom][pair]
    }

    pub fn date(&self, t: usize) -> &[Vec<FrictionClass>] {
        &self.classes[t]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, usize, FrictionClass)> + '_ {
        self.classes.iter().enumerate().flat_map(|(t, s)| {
            s.iter().enumerate().flat_map(move |(a, ps)| ps.iter().enumerate().map(move |(p, &c)| (t, a, p, c)))
        })
    }
}

fn classify_cell(map: &TradeMap, cone: &ConeSpec, t: usize, atom: &[usize], pair: usize) -> FrictionClass {
    let plus = cone.allowed(pair, Sign::Plus);
    let minus = cone.allowed(pair, Sign::Minus);
    match (plus, minus) {
        (false, false) => FrictionClass::Inactive,
        (true, true) => {
            let reversible = atom.iter().all(|&w| {
                map.generator(t, w, pair, Sign::Plus)
                    .iter()
                    .zip(map.generator(t, w, pair, Sign::Minus))
                    .all(|(a, b)| (a + b).is_zero())
            });
            if reversible {
                FrictionClass::Frictionless
            } else {
                FrictionClass::Frictional
            }
        }
        _ => {
            let sign = if plus { Sign::Plus } else { Sign::Minus };
            if atom.iter().all(|&w| map.generator(t, w, pair, sign).iter().all(Zero::is_zero)) {
                FrictionClass::OneSidedZero
            } else {
                FrictionClass::OneSidedActive
            }
        }
    }
}

pub fn frictionality_classify(map: &TradeMap) -> Classification {
    let f = map.filtration();
    let classes = f
        .dates()
        .map(|t| {
            f.atoms(t)
                .iter()
                .map(|atom| (0..map.num_pairs()).map(|p| classify_cell(map, map.cone(), t, atom, p)).collect())
                .collect()
        })
        .collect();
    Classification { classes }
}
