//! Numerical laboratory for anti-eavesdropping channel estimation (ANECE).
//!
//! The crate covers the three protocol variants (all-user, pair-wise and the
//! modified two-user scheme):
//!
//! - [`model`]: network configurations and small shared value types.
//! - [`pilots`]: collaborative pilot construction, rank audits and the QR split
//!   that defines Eve's ambiguity subspace.
//! - [`numkernel`]: channel sampling, signal synthesis and the linear-algebra
//!   primitives (log-determinant, numerical rank, eigenvalue-growth counting).
//! - [`capacity`]: Gaussian secret-key-capacity terms, exact or Monte Carlo.
//! - [`dofcalc`]: closed-form degree-of-freedom formulas and an independent
//!   block-freedom counting oracle.
//! - [`verify`]: slope fitting and the check suites tying the numbers to the
//!   closed forms.

pub mod capacity;
pub mod dofcalc;
pub mod error;
pub mod model;
pub mod numkernel;
pub mod pilots;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    CheckResult, ComplexMatrix, DofReport, NetworkConfig, SnrGrid, TwoUserModifiedConfig, Violation,
};
