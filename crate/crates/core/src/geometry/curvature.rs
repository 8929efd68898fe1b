//! Principal curvatures, mean curvature and the curvature-induced potential.
//!
//! The principal curvatures are the tangent-space eigenvalues of the negated
//! projected normalized Hessian, `-P (Hess f / |grad f|) P` with
//! `P = I - n n^T`. The sign convention is fixed so that a sphere with
//! outward normal has every `k_i = -1/r` and mean curvature
//! `M = sum k_i = -(N-1)/r`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::surface::ImplicitSurface;
use crate::params::PhysicalParams;

/// Magnitude allowed for the discarded shape-operator eigenvalue along `n`.
pub const NORMAL_EIGENVALUE_TOL: f64 = 1e-8;

/// Curvature quantities at one surface point.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureData {
    /// The evaluated surface point.
    pub point: Vec<f64>,
    /// Unit normal (orientation follows `grad f`).
    pub normal: Vec<f64>,
    /// The `N - 1` principal curvatures, ascending.
    pub principal: Vec<f64>,
    /// Mean curvature `M = sum k_i` (the trace, not the average).
    pub mean: f64,
    /// Mean-curvature vector `M n`.
    pub mean_vector: Vec<f64>,
    /// Potential density `v_g = (2 sum k_i^2 - M^2) / 4`.
    pub v_g: f64,
}

impl CurvatureData {
    pub fn normal_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.normal)
    }

    /// `1 / max |k_i|`, the smallest curvature radius at this point; falls
    /// back to 1 on flat points.
    pub fn curvature_radius(&self) -> f64 {
        let kmax = self.principal.iter().fold(0.0f64, |a, k| a.max(k.abs()));
        if kmax > 0.0 {
            1.0 / kmax
        } else {
            1.0
        }
    }
}

/// Full curvature data at an on-surface point.
pub fn curvature_at(surface: &ImplicitSurface, x: &DVector<f64>) -> Result<CurvatureData> {
    if !surface.is_on_surface(x, 1e-9) {
        return Err(Error::OffSurface(surface.value(x).abs()));
    }
    let n_dim = surface.dim();
    let g = surface.gradient(x);
    let g_norm = g.norm();
    if g_norm < 1e-10 {
        return Err(Error::ZeroGradient(x.iter().copied().collect()));
    }
    let n = g / g_norm;
    let p = DMatrix::identity(n_dim, n_dim) - &n * n.transpose();
    let shape = -(&p * surface.hessian(x) * &p) / g_norm;

    let eigen = SymmetricEigen::try_new(shape, 1e-14, 10_000)
        .ok_or_else(|| Error::EigenFailure("shape operator".into()))?;

    // one eigenvector lies along n with eigenvalue ~ 0; drop it
    let mut overlap_best = (0usize, -1.0f64);
    for (idx, col) in eigen.eigenvectors.column_iter().enumerate() {
        let overlap = col.dot(&n).abs();
        if overlap > overlap_best.1 {
            overlap_best = (idx, overlap);
        }
    }
    let trivial_idx = overlap_best.0;
    let trivial = eigen.eigenvalues[trivial_idx];
    if trivial.abs() > NORMAL_EIGENVALUE_TOL {
        return Err(Error::NormalEigenvalueLeak(
            trivial.abs(),
            NORMAL_EIGENVALUE_TOL,
        ));
    }

    let mut principal: Vec<f64> = eigen
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != trivial_idx)
        .map(|(_, &k)| k)
        .collect();
    principal.sort_by(|a, b| a.total_cmp(b));

    let mean: f64 = principal.iter().sum();
    let sum_sq: f64 = principal.iter().map(|k| k * k).sum();
    let v_g = 0.25 * (2.0 * sum_sq - mean * mean);

    Ok(CurvatureData {
        point: x.iter().copied().collect(),
        normal: n.iter().copied().collect(),
        principal,
        mean,
        mean_vector: n.iter().map(|ni| mean * ni).collect(),
        v_g,
    })
}

/// Curvature-induced potential `V_g = -hbar^2/(2m) v_g`.
///
/// On `sphere(N, r)` this equals `(N-1)(N-3) hbar^2 / (8 m r^2)`.
pub fn geometric_potential(
    surface: &ImplicitSurface,
    x: &DVector<f64>,
    params: &PhysicalParams,
) -> Result<f64> {
    let data = curvature_at(surface, x)?;
    Ok(-params.hbar * params.hbar / (2.0 * params.mass) * data.v_g)
}

/// Closed-form sphere value `(N-1)(N-3) hbar^2 / (8 m r^2)`.
pub fn sphere_potential_reference(n: usize, params: &PhysicalParams) -> f64 {
    let nf = n as f64;
    (nf - 1.0) * (nf - 3.0) * params.hbar * params.hbar
        / (8.0 * params.mass * params.radius * params.radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v3(x: f64, y: f64, z: f64) -> DVector<f64> {
        DVector::from_vec(vec![x, y, z])
    }

    #[test]
    fn sphere_curvatures_follow_the_sign_convention() {
        let s = ImplicitSurface::sphere(3, 2.0).unwrap();
        for p in s.sample_points(20, 3).unwrap() {
            let c = curvature_at(&s, &p).unwrap();
            assert_abs_diff_eq!(c.principal[0], -0.5, epsilon = 1e-10);
            assert_abs_diff_eq!(c.principal[1], -0.5, epsilon = 1e-10);
            assert_abs_diff_eq!(c.mean, -1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn cylinder_curvatures() {
        let s = ImplicitSurface::cylinder(1.0).unwrap();
        let c = curvature_at(&s, &v3(1.0, 0.0, 0.3)).unwrap();
        assert_abs_diff_eq!(c.principal[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.principal[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.mean, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.v_g, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn circle_in_the_plane() {
        let s = ImplicitSurface::sphere(2, 1.0).unwrap();
        let p = DVector::from_vec(vec![
            std::f64::consts::FRAC_1_SQRT_2,
            std::f64::consts::FRAC_1_SQRT_2,
        ]);
        let c = curvature_at(&s, &p).unwrap();
        assert_eq!(c.principal.len(), 1);
        assert_abs_diff_eq!(c.principal[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.mean, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.v_g, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn torus_curvatures_at_the_outer_equator() {
        // k = (-1/rho, -1/(R+rho)) at the outer equator
        let s = ImplicitSurface::torus(2.0, 0.5).unwrap();
        let c = curvature_at(&s, &v3(2.5, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(c.principal[0], -2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(c.principal[1], -0.4, epsilon = 1e-10);
        assert_abs_diff_eq!(c.mean, -2.4, epsilon = 1e-10);
    }

    #[test]
    fn mean_curvature_matches_the_trace_route() {
        // independent route: M = -Tr(P H P) / |grad f|
        let surfaces = [
            ImplicitSurface::torus(2.0, 0.5).unwrap(),
            ImplicitSurface::ellipsoid(2.0, 1.0, 1.0).unwrap(),
            ImplicitSurface::sphere(4, 1.5).unwrap(),
        ];
        for s in &surfaces {
            for p in s.sample_points(25, 5).unwrap() {
                let c = curvature_at(&s, &p).unwrap();
                let g = s.gradient(&p);
                let n = &g / g.norm();
                let proj = DMatrix::identity(s.dim(), s.dim()) - &n * n.transpose();
                let trace_m = -(&proj * s.hessian(&p) * &proj).trace() / g.norm();
                assert_abs_diff_eq!(c.mean, trace_m, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn geometric_potential_examples() {
        let params = PhysicalParams::default();
        let sphere3 = ImplicitSurface::sphere(3, 1.7).unwrap();
        let p = sphere3.project(&v3(1.0, 0.4, -0.2)).unwrap();
        assert_abs_diff_eq!(
            geometric_potential(&sphere3, &p, &params).unwrap(),
            0.0,
            epsilon = 1e-13
        );

        let circle = ImplicitSurface::sphere(2, 1.0).unwrap();
        let p = circle.project(&DVector::from_vec(vec![0.3, 1.2])).unwrap();
        assert_abs_diff_eq!(
            geometric_potential(&circle, &p, &params).unwrap(),
            -0.125,
            epsilon = 1e-13
        );

        let cyl = ImplicitSurface::cylinder(1.0).unwrap();
        assert_abs_diff_eq!(
            geometric_potential(&cyl, &v3(1.0, 0.0, 0.0), &params).unwrap(),
            -0.125,
            epsilon = 1e-13
        );
    }

    #[test]
    fn sphere_potential_matches_closed_form_for_many_dimensions() {
        for n in 2..=8 {
            for r in [0.5, 1.0, 2.0] {
                let params = PhysicalParams::new(1.0, 1.0, r).unwrap();
                let s = ImplicitSurface::sphere(n, r).unwrap();
                let p = s.sample_points(5, 17).unwrap();
                for x in p {
                    let vg = geometric_potential(&s, &x, &params).unwrap();
                    let reference = sphere_potential_reference(n, &params);
                    assert!(
                        (vg - reference).abs() < 1e-12,
                        "N={n}, r={r}: {vg} vs {reference}"
                    );
                }
            }
        }
    }

    #[test]
    fn off_surface_points_are_rejected() {
        let s = ImplicitSurface::sphere(3, 1.0).unwrap();
        assert!(matches!(
            curvature_at(&s, &v3(0.0, 0.0, 1.5)),
            Err(Error::OffSurface(_))
        ));
    }

    #[test]
    fn v_g_is_rotation_invariant() {
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let raw = DMatrix::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0));
        let q = raw.qr().q();

        let torus = ImplicitSurface::torus(2.0, 0.5).unwrap();
        let pts = torus.sample_points(15, 23).unwrap();
        let rotated = ImplicitSurface::torus(2.0, 0.5)
            .unwrap()
            .rotated(q.clone())
            .unwrap();
        for p in pts {
            let base = curvature_at(&torus, &p).unwrap();
            let moved = curvature_at(&rotated, &(&q * &p)).unwrap();
            assert!(
                (base.v_g - moved.v_g).abs() < 1e-10,
                "v_g changed under rotation: {} vs {}",
                base.v_g,
                moved.v_g
            );
        }
    }
}
