//! Model files: JSON with every number written as an exact rational string.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use tcna_core::rational::{fmt_rat, parse_rat};
use tcna_core::space::{Filtration, FiniteSpace, RandomVector};
use tcna_core::trade::{ConeSpec, MarketData, MarketKind, TradeMap};
use tcna_core::Rat;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid model: {0}")]
    Invalid(String),
}

/// A rational read from and written to a JSON string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatStr(pub Rat);

impl Serialize for RatStr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(&self.0))
    }
}

impl<'de> Deserialize<'de> for RatStr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = RatStr;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational written as a string, \"p/q\" or \"p\"")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<RatStr, E> {
                parse_rat(v).map(RatStr).map_err(E::custom)
            }
        }
        d.deserialize_str(V)
    }
}

type Matrix = Vec<Vec<RatStr>>;
/// `[t][outcome][i][j]`.
type Series = Vec<Vec<Matrix>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub labels: Vec<String>,
    pub probs: Vec<RatStr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeFlags {
    /// One flag per ordered pair `(i, j)`, `i ≠ j`, in lexicographic order.
    pub plus: Vec<bool>,
    pub minus: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MarketSpec {
    Security {
        pi: Series,
    },
    Currency1 {
        tau: Series,
        lambda: Series,
    },
    Currency2 {
        tau: Series,
        lambda: Series,
    },
    /// Raw generators `[t][outcome][pair][k]`.
    Generic {
        dim: usize,
        cone: ConeFlags,
        gen_plus: Vec<Vec<Matrix>>,
        gen_minus: Vec<Vec<Matrix>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub space: SpaceSpec,
    /// Atoms per date, as lists of outcome labels.
    pub filtration: Vec<Vec<Vec<String>>>,
    pub market: MarketSpec,
    /// Named claims, one vector per outcome in label order.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub claims: BTreeMap<String, Matrix>,
}

/// A validated model.
#[derive(Debug, Clone)]
pub struct Model {
    pub filtration: Filtration,
    pub kind: MarketKind,
    /// Absent for generic markets.
    pub data: Option<MarketData>,
    pub map: TradeMap,
    pub claims: BTreeMap<String, RandomVector>,
}

fn unwrap_matrix(m: &Matrix) -> Vec<Vec<Rat>> {
    m.iter().map(|r| r.iter().map(|x| x.0.clone()).collect()).collect()
}

fn unwrap_series(s: &Series) -> Vec<Vec<Vec<Vec<Rat>>>> {
    s.iter().map(|t| t.iter().map(unwrap_matrix).collect()).collect()
}

fn wrap_matrix(m: &[Vec<Rat>]) -> Matrix {
    m.iter().map(|r| r.iter().cloned().map(RatStr).collect()).collect()
}

fn wrap_series(s: &[Vec<Vec<Vec<Rat>>>]) -> Series {
    s.iter().map(|t| t.iter().map(|m| wrap_matrix(m)).collect()).collect()
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<ModelFile, ModelError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model files serialize")
    }

    pub fn validate(&self) -> Result<Model, ModelError> {
        let invalid = |e: &dyn fmt::Display| ModelError::Invalid(e.to_string());
        let probs = self.space.probs.iter().map(|p| p.0.clone()).collect();
        let space = FiniteSpace::new(self.space.labels.clone(), probs).map_err(|e| invalid(&e))?;
        let partitions = self
            .filtration
            .iter()
            .map(|atoms| {
                atoms
                    .iter()
                    .map(|atom| {
                        atom.iter()
                            .map(|l| space.index_of(l).ok_or_else(|| ModelError::Invalid(format!("unknown outcome label {l:?} in filtration"))))
                            .collect::<Result<Vec<usize>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let filtration = Filtration::new(space, partitions).map_err(|e| invalid(&e))?;
        let (data, map) = match &self.market {
            MarketSpec::Security { pi } => {
                let data = MarketData::Security { pi: unwrap_series(pi) };
                let map = data.build(&filtration).map_err(|e| invalid(&e))?;
                (Some(data), map)
            }
            MarketSpec::Currency1 { tau, lambda } => {
                let data = MarketData::Currency1 { tau: unwrap_series(tau), lambda: unwrap_series(lambda) };
                let map = data.build(&filtration).map_err(|e| invalid(&e))?;
                (Some(data), map)
            }
            MarketSpec::Currency2 { tau, lambda } => {
                let data = MarketData::Currency2 { tau: unwrap_series(tau), lambda: unwrap_series(lambda) };
                let map = data.build(&filtration).map_err(|e| invalid(&e))?;
                (Some(data), map)
            }
            MarketSpec::Generic { dim, cone, gen_plus, gen_minus } => {
                let cone = ConeSpec::from_flags(*dim, cone.plus.clone(), cone.minus.clone())
                    .ok_or_else(|| ModelError::Invalid(format!("cone flags must list {} pairs for dimension {dim}", dim * dim.saturating_sub(1))))?;
                let plus = gen_plus.iter().map(|t| t.iter().map(unwrap_matrix).collect()).collect();
                let minus = gen_minus.iter().map(|t| t.iter().map(unwrap_matrix).collect()).collect();
                (None, TradeMap::new(filtration.clone(), cone, plus, minus).map_err(|e| invalid(&e))?)
            }
        };
        let n = filtration.space().len();
        let mut claims = BTreeMap::new();
        for (name, values) in &self.claims {
            let v = RandomVector::new(unwrap_matrix(values)).map_err(|e| invalid(&e))?;
            if v.len() != n || v.dim() != map.dim() {
                return Err(ModelError::Invalid(format!("claim {name:?} must give {n} vectors of dimension {}", map.dim())));
            }
            claims.insert(name.clone(), v);
        }
        let kind = data.as_ref().map_or(MarketKind::Generic, MarketData::kind);
        Ok(Model { filtration, kind, data, map, claims })
    }

    /// The file describing a validated model. Generic markets keep their generators.
    pub fn from_model(model: &Model) -> ModelFile {
        let f = &model.filtration;
        let space = f.space();
        let label = |w: usize| space.labels()[w].clone();
        let market = match &model.data {
            Some(MarketData::Security { pi }) => MarketSpec::Security { pi: wrap_series(pi) },
            Some(MarketData::Currency1 { tau, lambda }) => MarketSpec::Currency1 { tau: wrap_series(tau), lambda: wrap_series(lambda) },
            Some(MarketData::Currency2 { tau, lambda }) => MarketSpec::Currency2 { tau: wrap_series(tau), lambda: wrap_series(lambda) },
            None => {
                let cone = model.map.cone();
                let table = |sign| model.map.table(sign).iter().map(|t| t.iter().map(|m| wrap_matrix(m)).collect()).collect();
                MarketSpec::Generic {
                    dim: model.map.dim(),
                    cone: ConeFlags { plus: cone.plus_flags().to_vec(), minus: cone.minus_flags().to_vec() },
                    gen_plus: table(tcna_core::trade::Sign::Plus),
                    gen_minus: table(tcna_core::trade::Sign::Minus),
                }
            }
        };
        ModelFile {
            space: SpaceSpec { labels: space.labels().to_vec(), probs: space.probs().iter().cloned().map(RatStr).collect() },
            filtration: f.partitions().iter().map(|atoms| atoms.iter().map(|a| a.iter().map(|&w| label(w)).collect()).collect()).collect(),
            market,
            claims: model.claims.iter().map(|(k, v)| (k.clone(), wrap_matrix(v.values()))).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BIN1: &str = r#"{
        "space": {"labels": ["u", "d"], "probs": ["1/2", "1/2"]},
        "filtration": [[["u", "d"]], [["u"], ["d"]]],
        "market": {"kind": "security", "pi": [
            [[["1", "1"], ["1", "1"]], [["1", "1"], ["1", "1"]]],
            [[["1", "2"], ["2", "1"]], [["1", "1/2"], ["1/2", "1"]]]
        ]},
        "claims": {"zero": [["0", "0"], ["0", "0"]]}
    }"#;

    #[test]
    fn parses_and_validates() {
        let file = ModelFile::parse(BIN1).unwrap();
        let model = file.validate().unwrap();
        assert_eq!(model.kind, MarketKind::Security);
        assert_eq!(model.map.dim(), 2);
        assert_eq!(model.claims.len(), 1);
    }

    #[test]
    fn round_trip_is_exact() {
        let file = ModelFile::parse(BIN1).unwrap();
        let again = ModelFile::parse(&file.to_json()).unwrap();
        assert_eq!(file, again);
        let rebuilt = ModelFile::from_model(&file.validate().unwrap());
        assert_eq!(rebuilt, file);
    }

    #[test]
    fn generic_round_trip() {
        let file = ModelFile::parse(BIN1).unwrap();
        let mut model = file.validate().unwrap();
        model.data = None;
        let generic = ModelFile::from_model(&model);
        assert!(matches!(generic.market, MarketSpec::Generic { .. }));
        let back = ModelFile::parse(&generic.to_json()).unwrap();
        assert_eq!(back, generic);
        assert_eq!(back.validate().unwrap().map, model.map);
    }

    #[test]
    fn rejects_inexact_numbers() {
        for bad in [r#""0.5""#, "0.5", r#""1e3""#, r#""1/0""#] {
            let text = BIN1.replacen(r#""1/2", "1/2""#, &format!("{bad}, \"1/2\""), 1);
            assert!(ModelFile::parse(&text).is_err(), "{bad} accepted");
        }
    }

    #[test]
    fn rejects_unknown_labels_and_fields() {
        let text = BIN1.replacen(r#"[["u"], ["d"]]"#, r#"[["u"], ["x"]]"#, 1);
        assert!(matches!(ModelFile::parse(&text).unwrap().validate(), Err(ModelError::Invalid(_))));
        let text = BIN1.replacen(r#""claims""#, r#""extra": 1, "claims""#, 1);
        assert!(ModelFile::parse(&text).is_err());
    }
}
