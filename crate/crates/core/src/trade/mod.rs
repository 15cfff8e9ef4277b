//! Random trade maps given by their generators, the named market models, and
//! checks of the structural axioms.

pub mod axioms;
pub mod cone;
pub mod map;
pub mod markets;
pub mod sample;

pub use axioms::{check_hn0_sampled, check_hn0_structural, validate_axioms, AxiomReport, AxiomViolation, Hn0Error, Hn0Sample, Hn0Verdict};
pub use cone::{pair_index, pairs, ConeSpec, Sign};
pub use map::{wealth, zero_matrix, GeneratorTable, OrderMatrix, Strategy, TradeError, TradeMap, WealthPath};
pub use markets::{
    currency_market_v1, currency_market_v1_rates, currency_market_v2, rates_from_prices, security_market, MarketData, MarketKind,
};
