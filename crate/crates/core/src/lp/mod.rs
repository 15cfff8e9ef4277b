//! Exact linear programming with self-verifying certificates.

pub mod linalg;
pub mod program;
pub mod simplex;
pub mod strict;
pub mod verify;

pub use program::{Constraint, FarkasCertificate, LinearProgram, LpError, LpOutcome, Relation, Sense};
pub use simplex::solve_lp;
pub use strict::{strict_feasibility, StrictCertificate, StrictOutcome, StrictRelation, StrictSystem};
pub use verify::{verify_outcome, VerifyError};
