//! Numerical models of the pseudo-Kähler moduli space of convex projective
//! structures on the torus, and of the hyperbolic affine spheres over it.
//!
//! Points of `H^2 x C` are pairs `(z, w)` with `w dz^3` a cubic differential
//! on the torus of modulus `z`. The crate evaluates the weighted metric,
//! symplectic form and complex structure on this space, the circle and
//! `SL(2,R)` actions with their Hamiltonian and moment map, and constructs
//! the affine sphere attached to a cubic differential.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod actions;
pub mod error;
pub mod geometry;
pub mod kahler;
pub mod pick;
pub mod sampling;
pub mod sphere;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{HyperbolicPoint, LinearComplexStructure, SL2Element, TangentJ};
pub use kahler::{TangentVector4, WeightFunction};
pub use pick::{ModuliPoint, PickForm, PickTensor, PickVariation};
pub use sphere::CubicCoefficient;
pub use verify::{run_suite, Suite, VerificationReport};
