//! Extrinsic differential geometry of implicit hypersurfaces in `R^N`.

mod curvature;
mod identities;
mod surface;

pub use curvature::{
    curvature_at, geometric_potential, sphere_potential_reference, CurvatureData,
    NORMAL_EIGENVALUE_TOL,
};
pub use identities::{
    convergence_order, default_step, divergence_residual, evaluate_point, lb_position_residual,
    GeometryRecord, GeometryResiduals, IdentityKind,
};
pub use surface::{ImplicitSurface, SurfaceTag, PROJECTION_TOL};
