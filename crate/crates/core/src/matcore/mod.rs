//! Dense complex matrices, exact ring scalars for the gate group, and the
//! approximation metrics shared by the rest of the toolchain.

mod io;
mod matrix;
mod metrics;
mod ring;

pub use io::{matrix_from_json, matrix_to_json, read_matrix, write_matrix};
pub use matrix::ComplexMatrix;
pub use metrics::{distance, error_stats, ErrorStats};
pub use ring::{ring_mul, Ring2x2, RingScalar};

pub(crate) use ring::divisible_by_sqrt2;

/// Global unitarity tolerance on max |M^dag M - I|.
pub const UNITARY_TOL: f64 = 1e-10;
