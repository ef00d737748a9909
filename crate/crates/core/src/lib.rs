//! Fault-tolerant compilation of coined discrete-time quantum walks.
//!
//! The pipeline runs graph → walk operator ([`walkgen`]) → two-level
//! factorization ([`csd`]) → Clifford+T sequence substitution ([`synth`]),
//! with exact ring arithmetic and approximation metrics in [`matcore`].
//! [`steane`] simulates the Steane-code protocols that make each gate of
//! the alphabet fault-tolerant.

pub mod csd;
pub mod error;
pub mod matcore;
pub mod steane;
pub mod synth;
pub mod walkgen;

pub use error::{Error, Result};
pub use matcore::ComplexMatrix;
