//! Implicit hypersurfaces `f(x) = 0` in `R^N` with analytic evaluators.
//!
//! The catalog covers the surfaces used by the verification suite: spheres in
//! any ambient dimension, and cylinder / torus / ellipsoid in `R^3`. Custom
//! surfaces plug in through closures; an analytic Hessian is optional and is
//! replaced by central differences of the gradient when absent.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Convergence target for Newton projection onto `f = 0`.
pub const PROJECTION_TOL: f64 = 1e-12;
const PROJECTION_MAX_ITER: usize = 100;
const GRADIENT_FLOOR: f64 = 1e-10;

type ValueFn = dyn Fn(&DVector<f64>) -> f64 + Send + Sync;
type GradientFn = dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync;
type HessianFn = dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync;

/// Identifies which catalog entry (if any) a surface came from.
#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceTag {
    Sphere { dim: usize, radius: f64 },
    Cylinder { radius: f64 },
    Torus { major: f64, minor: f64 },
    Ellipsoid { a: f64, b: f64, c: f64 },
    Custom(String),
}

impl fmt::Display for SurfaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceTag::Sphere { dim, radius } => write!(f, "sphere:N={dim},r={radius}"),
            SurfaceTag::Cylinder { radius } => write!(f, "cylinder:a={radius}"),
            SurfaceTag::Torus { major, minor } => write!(f, "torus:R={major},rho={minor}"),
            SurfaceTag::Ellipsoid { a, b, c } => write!(f, "ellipsoid:a={a},b={b},c={c}"),
            SurfaceTag::Custom(name) => write!(f, "custom:{name}"),
        }
    }
}

/// An embedded hypersurface given as a regular level set `f(x) = 0`.
///
/// `f` need not satisfy `|grad f| = 1`; the normal is always `grad f`
/// normalized, so any regular defining function is accepted.
pub struct ImplicitSurface {
    dim: usize,
    tag: SurfaceTag,
    f: Box<ValueFn>,
    grad: Box<GradientFn>,
    hess: Option<Box<HessianFn>>,
}

impl fmt::Debug for ImplicitSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ImplicitSurface")
            .field("dim", &self.dim)
            .field("tag", &self.tag)
            .field("analytic_hessian", &self.hess.is_some())
            .finish()
    }
}

impl ImplicitSurface {
    /// Sphere of radius `r` in `R^dim`, `f = (|x|^2 - r^2) / (2r)`.
    ///
    /// With this defining function `|grad f| = 1` on the surface and the
    /// normal points outward.
    pub fn sphere(dim: usize, r: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "sphere ambient dimension must be >= 2, got {dim}"
            )));
        }
        check_positive("r", r)?;
        Ok(Self {
            dim,
            tag: SurfaceTag::Sphere { dim, radius: r },
            f: Box::new(move |x| (x.norm_squared() - r * r) / (2.0 * r)),
            grad: Box::new(move |x| x / r),
            hess: Some(Box::new(move |x| {
                DMatrix::identity(x.len(), x.len()) / r
            })),
        })
    }

    /// Circular cylinder of radius `a` about the z axis in `R^3`.
    pub fn cylinder(a: f64) -> Result<Self> {
        check_positive("a", a)?;
        Ok(Self {
            dim: 3,
            tag: SurfaceTag::Cylinder { radius: a },
            f: Box::new(move |x| (x[0] * x[0] + x[1] * x[1] - a * a) / (2.0 * a)),
            grad: Box::new(move |x| DVector::from_vec(vec![x[0] / a, x[1] / a, 0.0])),
            hess: Some(Box::new(move |_| {
                DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 / a, 1.0 / a, 0.0]))
            })),
        })
    }

    /// Torus in `R^3` with major radius `R` and tube radius `rho`,
    /// `f = (s - R)^2 + z^2 - rho^2` where `s = sqrt(x^2 + y^2)`.
    pub fn torus(big_r: f64, rho: f64) -> Result<Self> {
        check_positive("R", big_r)?;
        check_positive("rho", rho)?;
        if rho >= big_r {
            return Err(Error::InvalidParameter(format!(
                "torus requires rho < R, got R={big_r}, rho={rho}"
            )));
        }
        Ok(Self {
            dim: 3,
            tag: SurfaceTag::Torus {
                major: big_r,
                minor: rho,
            },
            f: Box::new(move |x| {
                let s = (x[0] * x[0] + x[1] * x[1]).sqrt();
                (s - big_r) * (s - big_r) + x[2] * x[2] - rho * rho
            }),
            grad: Box::new(move |x| {
                let s = (x[0] * x[0] + x[1] * x[1]).sqrt();
                DVector::from_vec(vec![
                    2.0 * (s - big_r) * x[0] / s,
                    2.0 * (s - big_r) * x[1] / s,
                    2.0 * x[2],
                ])
            }),
            hess: Some(Box::new(move |x| {
                let (px, py) = (x[0], x[1]);
                let s2 = px * px + py * py;
                let s = s2.sqrt();
                let s3 = s2 * s;
                let mut h = DMatrix::zeros(3, 3);
                h[(0, 0)] = 2.0 * (px * px / s2 + (s - big_r) * py * py / s3);
                h[(1, 1)] = 2.0 * (py * py / s2 + (s - big_r) * px * px / s3);
                h[(0, 1)] = 2.0 * px * py * big_r / s3;
                h[(1, 0)] = h[(0, 1)];
                h[(2, 2)] = 2.0;
                h
            })),
        })
    }

    /// Axis-aligned ellipsoid in `R^3`, `f = (x/a)^2 + (y/b)^2 + (z/c)^2 - 1`.
    pub fn ellipsoid(a: f64, b: f64, c: f64) -> Result<Self> {
        check_positive("a", a)?;
        check_positive("b", b)?;
        check_positive("c", c)?;
        let inv2 = [1.0 / (a * a), 1.0 / (b * b), 1.0 / (c * c)];
        Ok(Self {
            dim: 3,
            tag: SurfaceTag::Ellipsoid { a, b, c },
            f: Box::new(move |x| {
                x[0] * x[0] * inv2[0] + x[1] * x[1] * inv2[1] + x[2] * x[2] * inv2[2] - 1.0
            }),
            grad: Box::new(move |x| {
                DVector::from_vec(vec![
                    2.0 * x[0] * inv2[0],
                    2.0 * x[1] * inv2[1],
                    2.0 * x[2] * inv2[2],
                ])
            }),
            hess: Some(Box::new(move |_| {
                DMatrix::from_diagonal(&DVector::from_vec(vec![
                    2.0 * inv2[0],
                    2.0 * inv2[1],
                    2.0 * inv2[2],
                ]))
            })),
        })
    }

    /// Custom surface from closures. Pass `None` for the Hessian to fall back
    /// to central differences of the gradient.
    pub fn custom(
        name: impl Into<String>,
        dim: usize,
        f: impl Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
        hess: Option<Box<HessianFn>>,
    ) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "ambient dimension must be >= 2, got {dim}"
            )));
        }
        Ok(Self {
            dim,
            tag: SurfaceTag::Custom(name.into()),
            f: Box::new(f),
            grad: Box::new(grad),
            hess,
        })
    }

    /// The surface rigidly rotated by an orthogonal map `q`: the level set of
    /// `x -> f(q^T x)`.
    pub fn rotated(self, q: DMatrix<f64>) -> Result<Self> {
        if q.nrows() != self.dim || q.ncols() != self.dim {
            return Err(Error::InvalidParameter(format!(
                "rotation must be {n}x{n}, got {r}x{c}",
                n = self.dim,
                r = q.nrows(),
                c = q.ncols()
            )));
        }
        let dim = self.dim;
        let name = format!("rotated({})", self.tag);
        let inner = Arc::new(self);
        let qt = q.transpose();

        let (s1, s2, s3) = (inner.clone(), inner.clone(), inner);
        let (qt1, qt2, qt3) = (qt.clone(), qt.clone(), qt);
        let (q2, q3a, q3b) = (q.clone(), q.clone(), q);
        Self::custom(
            name,
            dim,
            move |x| s1.value(&(&qt1 * x)),
            move |x| &q2 * s2.gradient(&(&qt2 * x)),
            Some(Box::new(move |x| {
                &q3a * s3.hessian(&(&qt3 * x)) * &q3b.transpose()
            })),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tag(&self) -> &SurfaceTag {
        &self.tag
    }

    /// Canonical string id, e.g. `sphere:N=3,r=2`.
    pub fn id(&self) -> String {
        self.tag.to_string()
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        (self.f)(x)
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.grad)(x)
    }

    /// Analytic Hessian when available, otherwise central differences of the
    /// gradient (symmetrized), step `1e-5 * (1 + |x|)`.
    pub fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        match &self.hess {
            Some(h) => h(x),
            None => self.finite_difference_hessian(x),
        }
    }

    /// Central-difference Hessian of `f` via its gradient.
    pub fn finite_difference_hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim;
        let h = 1e-5 * (1.0 + x.norm());
        let mut out = DMatrix::zeros(n, n);
        for i in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let col = (self.gradient(&xp) - self.gradient(&xm)) / (2.0 * h);
            out.set_column(i, &col);
        }
        // symmetrize: the exact Hessian is symmetric, FD noise is not
        0.5 * (&out + out.transpose())
    }

    /// Unit normal `grad f / |grad f|` at an on-surface point.
    pub fn unit_normal(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let g = self.gradient(x);
        let norm = g.norm();
        if norm < GRADIENT_FLOOR {
            return Err(Error::ZeroGradient(x.iter().copied().collect()));
        }
        Ok(g / norm)
    }

    /// True when `|f(x)|` is within `tol`.
    pub fn is_on_surface(&self, x: &DVector<f64>, tol: f64) -> bool {
        self.value(x).abs() <= tol
    }

    /// Newton projection onto `f = 0` along the gradient flow:
    /// `x <- x - f(x) grad f(x) / |grad f(x)|^2`.
    pub fn project(&self, x0: &DVector<f64>) -> Result<DVector<f64>> {
        let mut x = x0.clone();
        for _ in 0..PROJECTION_MAX_ITER {
            let fx = self.value(&x);
            if fx.abs() < PROJECTION_TOL {
                return Ok(x);
            }
            let g = self.gradient(&x);
            let g2 = g.norm_squared();
            if g2 < GRADIENT_FLOOR * GRADIENT_FLOOR {
                return Err(Error::ZeroGradient(x.iter().copied().collect()));
            }
            x -= g * (fx / g2);
        }
        Err(Error::ProjectionDiverged {
            iterations: PROJECTION_MAX_ITER,
            residual: self.value(&x).abs(),
        })
    }

    /// Axis-aligned sampling box enclosing the catalog surface.
    fn sampling_box(&self) -> Result<Vec<(f64, f64)>> {
        match self.tag {
            SurfaceTag::Sphere { dim, radius } => Ok(vec![(-1.3 * radius, 1.3 * radius); dim]),
            SurfaceTag::Cylinder { radius } => Ok(vec![
                (-1.3 * radius, 1.3 * radius),
                (-1.3 * radius, 1.3 * radius),
                (-radius, radius),
            ]),
            SurfaceTag::Torus { major, minor } => {
                let s = major + 1.3 * minor;
                Ok(vec![(-s, s), (-s, s), (-1.3 * minor, 1.3 * minor)])
            }
            SurfaceTag::Ellipsoid { a, b, c } => {
                Ok(vec![(-1.3 * a, 1.3 * a), (-1.3 * b, 1.3 * b), (-1.3 * c, 1.3 * c)])
            }
            SurfaceTag::Custom(_) => Err(Error::SamplingFailed(
                "custom surfaces need sample_points_in_box".into(),
            )),
        }
    }

    /// Deterministic quasi-random on-surface points: seeded draws from the
    /// catalog box, projected onto the surface. Draws whose projection stalls
    /// (degenerate gradient region) are rejected and redrawn.
    pub fn sample_points(&self, count: usize, seed: u64) -> Result<Vec<DVector<f64>>> {
        let bounds = self.sampling_box()?;
        self.sample_points_in_box(&bounds, count, seed)
    }

    pub fn sample_points_in_box(
        &self,
        bounds: &[(f64, f64)],
        count: usize,
        seed: u64,
    ) -> Result<Vec<DVector<f64>>> {
        if bounds.len() != self.dim {
            return Err(Error::SamplingFailed(format!(
                "box has {} bounds for ambient dimension {}",
                bounds.len(),
                self.dim
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::with_capacity(count);
        let max_tries = 200 * count.max(1);
        for _ in 0..max_tries {
            if points.len() == count {
                break;
            }
            let draw = DVector::from_iterator(
                self.dim,
                bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)),
            );
            if self.gradient(&draw).norm() < 1e-6 {
                continue;
            }
            if let Ok(p) = self.project(&draw) {
                if self.gradient(&p).norm() >= 1e-6 {
                    points.push(p);
                }
            }
        }
        if points.len() < count {
            return Err(Error::SamplingFailed(format!(
                "only {} of {} draws projected onto {}",
                points.len(),
                count,
                self.id()
            )));
        }
        Ok(points)
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be finite and > 0, got {v}"
        )))
    }
}

impl FromStr for ImplicitSurface {
    type Err = Error;

    /// Parses catalog ids like `sphere:N=3,r=2`, `cylinder:a=1`,
    /// `torus:R=2,rho=0.5`, `ellipsoid:a=2,b=1,c=1`.
    fn from_str(s: &str) -> Result<Self> {
        let err = |msg: &str| Error::SurfaceParse(s.to_string(), msg.to_string());
        let (kind, rest) = s.split_once(':').ok_or_else(|| err("expected `kind:params`"))?;

        let mut pairs = std::collections::BTreeMap::new();
        for item in rest.split(',') {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| err("parameters must be `key=value`"))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| err(&format!("cannot parse value for `{k}`")))?;
            pairs.insert(k.trim().to_string(), v);
        }
        let get = |key: &str| {
            pairs
                .get(key)
                .copied()
                .ok_or_else(|| err(&format!("missing parameter `{key}`")))
        };

        match kind.trim() {
            "sphere" => {
                let n = get("N")?;
                if n.fract() != 0.0 || n < 2.0 {
                    return Err(err("N must be an integer >= 2"));
                }
                ImplicitSurface::sphere(n as usize, get("r")?)
            }
            "cylinder" => ImplicitSurface::cylinder(get("a")?),
            "torus" => ImplicitSurface::torus(get("R")?, get("rho")?),
            "ellipsoid" => ImplicitSurface::ellipsoid(get("a")?, get("b")?, get("c")?),
            other => Err(err(&format!("unknown surface kind `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v3(x: f64, y: f64, z: f64) -> DVector<f64> {
        DVector::from_vec(vec![x, y, z])
    }

    #[test]
    fn projects_radially_onto_spheres() {
        let s = ImplicitSurface::sphere(3, 1.0).unwrap();
        let p = s.project(&v3(0.0, 0.0, 2.0)).unwrap();
        assert_abs_diff_eq!(p, v3(0.0, 0.0, 1.0), epsilon = 1e-9);

        let s = ImplicitSurface::sphere(3, 2.0).unwrap();
        let p = s.project(&v3(3.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(p, v3(2.0, 0.0, 0.0), epsilon = 1e-9);
    }

    #[test]
    fn projects_onto_torus_along_gradient() {
        let s = ImplicitSurface::torus(2.0, 0.5).unwrap();
        let x0 = v3(2.0, 0.0, 0.9);
        let p = s.project(&x0).unwrap();
        assert!(s.value(&p).abs() < 1e-12, "f residual {}", s.value(&p));

        // displacement must be parallel to the gradient at the landing point
        let d = &p - &x0;
        let n = s.unit_normal(&p).unwrap();
        let tangential = (&d - &n * d.dot(&n)).norm();
        assert!(
            tangential < 1e-9 * d.norm().max(1e-30),
            "displacement not along the normal: {tangential}"
        );
    }

    #[test]
    fn projection_from_zero_gradient_point_fails() {
        let s = ImplicitSurface::sphere(3, 1.0).unwrap();
        let origin = v3(0.0, 0.0, 0.0);
        assert!(matches!(s.project(&origin), Err(Error::ZeroGradient(_))));
    }

    #[test]
    fn unit_normals_match_symmetry_axes() {
        let s = ImplicitSurface::sphere(3, 1.0).unwrap();
        let n = s.unit_normal(&v3(0.0, 0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(n, v3(0.0, 0.0, 1.0), epsilon = 1e-14);

        let c = ImplicitSurface::cylinder(1.0).unwrap();
        let n = c.unit_normal(&v3(1.0, 0.0, 5.0)).unwrap();
        assert_abs_diff_eq!(n, v3(1.0, 0.0, 0.0), epsilon = 1e-14);

        let e = ImplicitSurface::ellipsoid(2.0, 1.0, 1.0).unwrap();
        let n = e.unit_normal(&v3(2.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(n, v3(1.0, 0.0, 0.0), epsilon = 1e-14);
    }

    #[test]
    fn analytic_hessians_match_finite_differences() {
        let surfaces = [
            ImplicitSurface::sphere(3, 1.5).unwrap(),
            ImplicitSurface::cylinder(0.8).unwrap(),
            ImplicitSurface::torus(2.0, 0.5).unwrap(),
            ImplicitSurface::ellipsoid(2.0, 1.0, 0.7).unwrap(),
        ];
        for s in &surfaces {
            for p in s.sample_points(20, 11).unwrap() {
                let analytic = s.hessian(&p);
                let fd = s.finite_difference_hessian(&p);
                let dev = (analytic - fd).abs().max();
                assert!(dev < 1e-7, "{}: Hessian deviation {dev}", s.id());
            }
        }
    }

    #[test]
    fn parses_catalog_ids() {
        let s: ImplicitSurface = "sphere:N=5,r=1".parse().unwrap();
        assert_eq!(s.dim(), 5);
        let t: ImplicitSurface = "torus:R=2,rho=0.5".parse().unwrap();
        assert_eq!(t.id(), "torus:R=2,rho=0.5");
        assert!("sphere:N=1,r=1".parse::<ImplicitSurface>().is_err());
        assert!("sphere:r=1".parse::<ImplicitSurface>().is_err());
        assert!("blob:a=1".parse::<ImplicitSurface>().is_err());
        assert!("torus:R=1,rho=2".parse::<ImplicitSurface>().is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_on_surface() {
        let s = ImplicitSurface::torus(2.0, 0.5).unwrap();
        let a = s.sample_points(50, 7).unwrap();
        let b = s.sample_points(50, 7).unwrap();
        assert_eq!(a.len(), 50);
        for (pa, pb) in a.iter().zip(&b) {
            assert_eq!(pa, pb, "same seed must give identical samples");
            assert!(s.value(pa).abs() < 1e-11);
        }
    }
}
