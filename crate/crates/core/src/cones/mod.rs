//! Attainable-claim cones, the four no-arbitrage conditions and their certificates.

pub mod cells;
pub mod classify;
pub mod cps;
pub mod dd;
pub mod kp;
pub mod n0;
pub mod nas;
pub mod naw;
pub mod robust;

use thiserror::Error;

use crate::lp::LpError;
use crate::trade::TradeError;

pub use cells::{Cell, CellLayout};
pub use classify::{frictionality_classify, Classification, FrictionClass};
pub use cps::{find_cps, verify_cps, CpsReport, CpsRow, CpsVerdict, PricingKernel};
pub use kp::{kp_check_pair, kp_sample_test, KpVerdict, KpViolation};
pub use n0::{check_ef, n0_membership, EfVerdict, N0Membership};
pub use nas::{check_nas_direct, NasVerdict, NasWitness};
pub use naw::{check_naw, superhedge_membership, ArbitrageCertificate, HedgeVerdict, NawVerdict};
pub use robust::{build_robust_perturbation, check_nar, dominance_report, DominanceReport, NarVerdict, RobustPerturbation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConeError {
    #[error("size guard exceeded: {what} (limit {limit})")]
    SizeGuardExceeded { what: &'static str, limit: usize },
    #[error("kernel does not match the trade map: {0}")]
    KernelMismatch(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Trade(#[from] TradeError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Limits for the checks whose cost grows exponentially with the instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guard {
    pub max_lp_calls: usize,
    pub max_rays: usize,
}

impl Default for Guard {
    fn default() -> Self {
        Guard { max_lp_calls: 4096, max_rays: 4096 }
    }
}

/// Running LP-call count charged against a [`Guard`].
#[derive(Debug, Clone)]
pub struct Budget {
    pub guard: Guard,
    lp_calls: usize,
}

impl Budget {
    pub fn new(guard: Guard) -> Self {
        Budget { guard, lp_calls: 0 }
    }

    pub fn unlimited() -> Self {
        Budget::new(Guard { max_lp_calls: usize::MAX, max_rays: usize::MAX })
    }

    pub fn charge_lp(&mut self) -> Result<(), ConeError> {
        if self.lp_calls >= self.guard.max_lp_calls {
            return Err(ConeError::SizeGuardExceeded { what: "LP calls", limit: self.guard.max_lp_calls });
        }
        self.lp_calls += 1;
        Ok(())
    }

    pub fn lp_calls(&self) -> usize {
        self.lp_calls
    }
}
