//! Semi-Hilbertian operator toolkit.
//!
//! A positive semidefinite weight `A` induces the semi-inner product
//! `<x, y>_A = <Ax, y>`. This crate computes the associated operator
//! seminorm, numerical radius, Crawford number and related functionals for
//! dense complex matrices, builds operator matrices over the inflated weight
//! `diag(A, ..., A)`, and checks a catalog of equalities and inequalities
//! between these quantities on reproducible random instances.

pub mod block;
pub mod catalog;
pub mod error;
pub mod generate;
pub mod instance;
pub mod kernel;
pub mod radius;
pub mod space;
mod sweep;

pub use error::{Error, Result};
pub use generate::{gen_instance, Profile};
pub use instance::{Instance, InstanceFile};
pub use kernel::{CMat, CVec};
pub use radius::{RadiusResult, ThetaSweepConfig};
pub use space::{AOperator, SemiSpace};
