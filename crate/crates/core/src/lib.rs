//! Kronecker-algebra toolkit and executable checks for linear maps that
//! preserve the trace of Kronecker sums `tr(A ⊕ B)` and, through the matrix
//! exponential, the determinant of Kronecker products.
//!
//! Every characterization is paired with a brute-force oracle so the two can
//! be compared on random instances.

pub mod cli;
pub mod detkron;
pub mod error;
pub mod instances;
pub mod io;
pub mod kron;
pub mod linalg;
pub mod matrix;
pub mod preserver;
pub mod sample;
pub mod suite;
pub mod superop;

pub use error::{Error, Result};
pub use kron::BlockDims;
pub use matrix::{ComplexMatrix, ComplexScalar};
pub use sample::{MatrixKind, MatrixSampler, Seed};
pub use superop::{KroneckerTerm, SuperOperator};
