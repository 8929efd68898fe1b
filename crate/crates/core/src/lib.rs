//! Numerical toolkit for quantum mechanics constrained to hypersurfaces
//! embedded in flat Euclidean space.
//!
//! The crate has four layers:
//!
//! * [`geometry`] — extrinsic differential geometry of implicit hypersurfaces
//!   `f(x) = 0` in `R^N`: normals, principal curvatures, the curvature-induced
//!   potential, and finite-difference verification of the classical surface
//!   identities.
//! * [`sphere_ops`] — truncated spectral bases on the circle (`N = 2`) and the
//!   sphere (`N = 3`) together with dense matrix representations of position,
//!   geometric momentum, Laplace–Beltrami and Hamiltonian operators.
//! * [`algebra`] — a commutator engine that verifies the fundamental
//!   commutation relations, the constraint `p·n + n·p = 0`, the hermitization
//!   identity, the so(N,1) closure, and extracts the geometric-potential
//!   coefficient `alpha(N)`.
//! * [`spectra`] — eigenvalue tables of the constrained Hamiltonian with
//!   degeneracy bookkeeping against the closed-form sphere spectrum.
//!
//! All operator matrices are dense complex matrices in a truncated basis;
//! every check reports a residual in the entrywise max-norm after projection
//! onto the truncation-safe interior modes.

pub mod algebra;
pub mod error;
pub mod geometry;
pub mod params;
pub mod sphere_ops;
pub mod spectra;

pub use error::{Error, Result};
pub use params::PhysicalParams;
