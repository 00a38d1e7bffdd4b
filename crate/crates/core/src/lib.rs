//! Polar decompositions F = W S (and F = S' W') in scalar product
//! spaces, where W has orthonormal columns with respect to a twisted
//! pair of products and S is a square root of a generalized sign of the
//! Gram matrix.
//!
//! The library provides the scalar-product machinery (adjoints for
//! bilinear and sesquilinear products, one matrix per side), a complex
//! Schur engine with eigenvalue reordering, generalized matrix sign
//! functions evaluated by the Schur-Parlett recurrence, the principal
//! matrix square root, the decomposition drivers themselves, a
//! certification layer that re-checks every defining property of a
//! computed factorization, JSON problem/report formats, and seeded
//! instance generators with independent oracles for testing.

pub mod eigen;
pub mod error;
pub mod harness;
pub mod io;
pub mod matfunc;
pub mod matrix;
pub mod polar;
pub mod space;

pub use error::{Error, Result};
pub use matfunc::{ClusterOrder, SignFunctionSpec, SignKind, SignResult};
pub use matrix::ComplexMatrix;
pub use polar::{CertCheck, CertificationReport, PolarFactors, Side};
pub use space::{FormKind, ProductPair, ScalarProductSpace, Tolerances};
