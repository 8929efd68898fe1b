//! Truncated spectral bases with quadrature grids and transforms.
//!
//! * `N = 2`: Fourier modes `e^{i l theta} / sqrt(2 pi)`, `l = -l_max..l_max`,
//!   on a uniform periodic grid (trapezoid weights, spectrally exact).
//! * `N = 3`: complex spherical harmonics `Y_lm`, `0 <= l <= l_max`,
//!   Condon–Shortley phase, on a Gauss–Legendre (in `cos theta`) times
//!   uniform-`phi` grid. The nodes exclude the poles by construction, so the
//!   frame singularities of `theta-hat`, `phi-hat` never appear on the grid.
//!
//! Grid sizes are chosen so every quadrature used by the operator builders is
//! exact to machine precision for the working polynomial degree.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sphere_ops::quadrature::{
    dq_dtheta, gauss_legendre, normalized_assoc_legendre, q_signed,
};

/// One basis mode: a Fourier index (`N = 2`, `level = |m|`) or a spherical
/// harmonic `(l, m)` (`N = 3`, `level = l`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mode {
    pub level: usize,
    pub m: i64,
}

impl Mode {
    pub fn label(&self, ambient_dim: usize) -> String {
        if ambient_dim == 2 {
            format!("l={}", self.m)
        } else {
            format!("(l={},m={})", self.level, self.m)
        }
    }
}

/// Quadrature grid; points are flattened with `phi` fastest.
#[derive(Debug, Clone)]
pub struct Grid {
    pub n_theta: usize,
    pub n_phi: usize,
    theta: Vec<f64>,
    phi: Vec<f64>,
    weight: Vec<f64>,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn theta(&self, g: usize) -> f64 {
        self.theta[g]
    }

    pub fn phi(&self, g: usize) -> f64 {
        self.phi[g]
    }

    pub fn weight(&self, g: usize) -> f64 {
        self.weight[g]
    }
}

/// A truncated spectral basis on `S^1` or `S^2` with its quadrature grid and
/// precomputed basis-function tables.
#[derive(Debug, Clone)]
pub struct BasisSpec {
    ambient_dim: usize,
    l_max: usize,
    modes: Vec<Mode>,
    grid: Grid,
    /// Basis values on the grid, `grid.len() x dim`.
    values: DMatrix<Complex64>,
    /// `d/d theta` of each basis function on the grid.
    dtheta: DMatrix<Complex64>,
    /// `(i m / sin theta) *` basis values (zero for `N = 2`).
    dphi_over_sin: DMatrix<Complex64>,
}

impl BasisSpec {
    /// Basis with the default grid sizes: `4 l_max + 8` circle points for
    /// `N = 2`; `(2 l_max + 4) x (4 l_max + 8)` for `N = 3`.
    pub fn new(ambient_dim: usize, l_max: usize) -> Result<Arc<Self>> {
        match ambient_dim {
            2 => Self::with_grid(2, l_max, 4 * l_max + 8, 1),
            3 => Self::with_grid(3, l_max, 2 * l_max + 4, 4 * l_max + 8),
            other => Err(Error::InvalidParameter(format!(
                "operator bases exist for N in {{2, 3}}, got N = {other}"
            ))),
        }
    }

    /// Basis with explicit grid sizes (must meet the exactness minimums).
    pub fn with_grid(
        ambient_dim: usize,
        l_max: usize,
        n_theta: usize,
        n_phi: usize,
    ) -> Result<Arc<Self>> {
        if l_max < 4 {
            return Err(Error::InvalidParameter(format!(
                "l_max must be >= 4, got {l_max}"
            )));
        }
        match ambient_dim {
            2 => {
                if n_theta < 4 * l_max + 8 || n_phi != 1 {
                    return Err(Error::InvalidParameter(format!(
                        "N=2 grid needs n_theta >= {} and n_phi = 1",
                        4 * l_max + 8
                    )));
                }
                Ok(Arc::new(Self::build_circle(l_max, n_theta)))
            }
            3 => {
                if n_theta < 2 * l_max + 4 || n_phi < 4 * l_max + 8 {
                    return Err(Error::InvalidParameter(format!(
                        "N=3 grid needs n_theta >= {} and n_phi >= {}",
                        2 * l_max + 4,
                        4 * l_max + 8
                    )));
                }
                Ok(Arc::new(Self::build_sphere(l_max, n_theta, n_phi)))
            }
            other => Err(Error::InvalidParameter(format!(
                "operator bases exist for N in {{2, 3}}, got N = {other}"
            ))),
        }
    }

    fn build_circle(l_max: usize, n_theta: usize) -> Self {
        let modes: Vec<Mode> = (-(l_max as i64)..=l_max as i64)
            .map(|l| Mode {
                level: l.unsigned_abs() as usize,
                m: l,
            })
            .collect();
        let dim = modes.len();
        let w = 2.0 * PI / n_theta as f64;
        let theta: Vec<f64> = (0..n_theta).map(|k| w * k as f64).collect();
        let grid = Grid {
            n_theta,
            n_phi: 1,
            phi: vec![0.0; n_theta],
            weight: vec![w; n_theta],
            theta,
        };

        let norm = 1.0 / (2.0 * PI).sqrt();
        let mut values = DMatrix::zeros(grid.len(), dim);
        let mut dtheta = DMatrix::zeros(grid.len(), dim);
        for (col, mode) in modes.iter().enumerate() {
            let l = mode.m as f64;
            for g in 0..grid.len() {
                let v = Complex64::from_polar(norm, l * grid.theta(g));
                values[(g, col)] = v;
                dtheta[(g, col)] = Complex64::new(0.0, l) * v;
            }
        }
        Self {
            ambient_dim: 2,
            l_max,
            modes,
            dphi_over_sin: DMatrix::zeros(grid.len(), dim),
            grid,
            values,
            dtheta,
        }
    }

    fn build_sphere(l_max: usize, n_theta: usize, n_phi: usize) -> Self {
        let mut modes = Vec::with_capacity((l_max + 1) * (l_max + 1));
        for l in 0..=l_max {
            for m in -(l as i64)..=l as i64 {
                modes.push(Mode { level: l, m });
            }
        }
        let dim = modes.len();

        let (u_nodes, u_weights) = gauss_legendre(n_theta);
        let w_phi = 2.0 * PI / n_phi as f64;
        let mut theta = Vec::with_capacity(n_theta * n_phi);
        let mut phi = Vec::with_capacity(n_theta * n_phi);
        let mut weight = Vec::with_capacity(n_theta * n_phi);
        for (j, &u) in u_nodes.iter().enumerate() {
            let th = u.acos();
            for k in 0..n_phi {
                theta.push(th);
                phi.push(w_phi * k as f64);
                weight.push(u_weights[j] * w_phi);
            }
        }
        let grid = Grid {
            n_theta,
            n_phi,
            theta,
            phi,
            weight,
        };

        let norm = 1.0 / (2.0 * PI).sqrt();
        let mut values = DMatrix::zeros(grid.len(), dim);
        let mut dtheta = DMatrix::zeros(grid.len(), dim);
        let mut dphi_over_sin = DMatrix::zeros(grid.len(), dim);
        for (j, &u) in u_nodes.iter().enumerate() {
            let table = normalized_assoc_legendre(l_max, u);
            let sin_theta = (1.0 - u * u).max(f64::MIN_POSITIVE).sqrt();
            for k in 0..n_phi {
                let g = j * n_phi + k;
                for (col, mode) in modes.iter().enumerate() {
                    let q = q_signed(&table, mode.level, mode.m);
                    let dq = dq_dtheta(&table, mode.level, mode.m);
                    let phase = Complex64::from_polar(norm, mode.m as f64 * grid.phi(g));
                    values[(g, col)] = q * phase;
                    dtheta[(g, col)] = dq * phase;
                    dphi_over_sin[(g, col)] =
                        Complex64::new(0.0, mode.m as f64 / sin_theta) * q * phase;
                }
            }
        }
        Self {
            ambient_dim: 3,
            l_max,
            modes,
            grid,
            values,
            dtheta,
            dphi_over_sin,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn dim(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn level(&self, idx: usize) -> usize {
        self.modes[idx].level
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub(crate) fn values(&self) -> &DMatrix<Complex64> {
        &self.values
    }

    pub(crate) fn dtheta(&self) -> &DMatrix<Complex64> {
        &self.dtheta
    }

    pub(crate) fn dphi_over_sin(&self) -> &DMatrix<Complex64> {
        &self.dphi_over_sin
    }

    /// Index of the Fourier mode `l` (`N = 2`) or harmonic `(l, m)` (`N = 3`).
    pub fn mode_index(&self, level: usize, m: i64) -> Option<usize> {
        match self.ambient_dim {
            2 => {
                let l = m;
                if l.unsigned_abs() as usize != level || level > self.l_max {
                    return None;
                }
                Some((l + self.l_max as i64) as usize)
            }
            _ => {
                if level > self.l_max || m.unsigned_abs() as usize > level {
                    return None;
                }
                Some(level * level + (level as i64 + m) as usize)
            }
        }
    }

    /// Number of modes with `level <= cutoff`.
    pub fn count_levels_up_to(&self, cutoff: usize) -> usize {
        self.modes.iter().filter(|m| m.level <= cutoff).count()
    }

    /// Cartesian component of the outward unit normal at a grid point.
    pub fn normal_component(&self, axis: usize, g: usize) -> f64 {
        let th = self.grid.theta(g);
        if self.ambient_dim == 2 {
            match axis {
                0 => th.cos(),
                _ => th.sin(),
            }
        } else {
            let ph = self.grid.phi(g);
            match axis {
                0 => th.sin() * ph.cos(),
                1 => th.sin() * ph.sin(),
                _ => th.cos(),
            }
        }
    }

    /// Cartesian component of the `theta` frame vector (the counterclockwise
    /// tangent for `N = 2`).
    pub fn frame_theta_component(&self, axis: usize, g: usize) -> f64 {
        let th = self.grid.theta(g);
        if self.ambient_dim == 2 {
            match axis {
                0 => -th.sin(),
                _ => th.cos(),
            }
        } else {
            let ph = self.grid.phi(g);
            match axis {
                0 => th.cos() * ph.cos(),
                1 => th.cos() * ph.sin(),
                _ => -th.sin(),
            }
        }
    }

    /// Cartesian component of the `phi` frame vector (zero for `N = 2`).
    pub fn frame_phi_component(&self, axis: usize, g: usize) -> f64 {
        if self.ambient_dim == 2 {
            return 0.0;
        }
        let ph = self.grid.phi(g);
        match axis {
            0 => -ph.sin(),
            1 => ph.cos(),
            _ => 0.0,
        }
    }

    /// Coefficients of a grid function: `c = B^H (w . psi)`.
    pub fn analyze(&self, grid_values: &DVector<Complex64>) -> DVector<Complex64> {
        let weighted = DVector::from_iterator(
            grid_values.len(),
            grid_values
                .iter()
                .enumerate()
                .map(|(g, v)| v * self.grid.weight(g)),
        );
        self.values.ad_mul(&weighted)
    }

    /// Grid values of a coefficient vector: `psi = B c`.
    pub fn synthesize(&self, coeffs: &DVector<Complex64>) -> DVector<Complex64> {
        &self.values * coeffs
    }

    /// Galerkin projection of grid-sampled operator columns:
    /// `A = B^H diag(w) F` for `F` of shape `grid.len() x dim`.
    pub fn project_columns(&self, f: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut weighted = f.clone();
        for (g, mut row) in weighted.row_iter_mut().enumerate() {
            row *= Complex64::from(self.grid.weight(g));
        }
        self.values.ad_mul(&weighted)
    }

    /// Gram matrix of the basis under the quadrature (identity when exact).
    pub fn gram(&self) -> DMatrix<Complex64> {
        self.project_columns(&self.values)
    }

    /// Structural identity: same manifold, cutoff and grid.
    pub fn same_basis(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.l_max == other.l_max
            && self.grid.n_theta == other.grid.n_theta
            && self.grid.n_phi == other.grid.n_phi
    }

    pub fn describe(&self) -> String {
        format!(
            "N={}, l_max={}, grid={}x{}",
            self.ambient_dim, self.l_max, self.grid.n_theta, self.grid.n_phi
        )
    }
}
