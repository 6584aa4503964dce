//! Symmetry analysis of the class `u_t = f(t)u_yy − g(t)k(u)u_x`.
//!
//! The crate provides the jet space and total derivatives, vector fields with
//! their prolongations and brackets, the class of equations together with its
//! certified point transformations and equivalence groups, and the group
//! classification data with its verifier.

pub mod classify;
pub mod classpde;
pub mod error;
pub mod fields;
pub mod jetspace;
pub mod linalg;

pub use classpde::{apply_equivalence, ClassEquation, PointTransformation};
pub use error::{Error, Result};
pub use fields::{lie_bracket, prolong2, structure_constants, VectorField};
