//! Exact finite-dimensional computations for quantum principal bundles over
//! finite quantum groups: Hopf algebras, corepresentations, differential
//! calculi, associated quantum vector bundles and the reconstruction of the
//! bundle from its associated-bundle functor.

pub mod algebra;
pub mod assoc;
pub mod bundle;
pub mod calculus;
pub mod check;
pub mod comodule;
pub mod corep;
pub mod error;
pub mod expr;
pub mod hopf;
pub mod input;
pub mod linalg;
pub mod reconstruct;
pub mod report;
pub mod runner;
pub mod scalar;

pub use error::{Error, Result};
pub use linalg::{LinearMap, Matrix, Parity};
pub use scalar::CycScalar;
