//! No-arbitrage analysis for finite discrete-time markets with proportional
//! transaction costs and partial information, in exact rational arithmetic.

pub mod cones;
pub mod lp;
pub mod rational;
pub mod report;
pub mod space;
pub mod trade;

pub use rational::Rat;
