//! Dense matrix representations of the constrained-particle operators.
//!
//! Position acts as multiplication by `r n_i` on the grid; the geometric
//! momentum is `p = -i hbar (grad_S + M n / 2)` with `M = -(N-1)/r`, applied
//! spectrally (`d/d theta` through the basis table, `d/d phi` through the mode
//! index) and then Galerkin-projected by quadrature. The Laplace–Beltrami and
//! Hamiltonian matrices are exact diagonals.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::sphere_ops::basis::BasisSpec;

/// Hermiticity tolerance enforced on flagged operators.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// A dense complex operator matrix in a truncated basis.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    label: String,
    basis: Arc<BasisSpec>,
    data: DMatrix<Complex64>,
    hermitian: bool,
}

impl OperatorMatrix {
    /// Wraps raw data; a `hermitian` flag is verified against
    /// [`HERMITICITY_TOL`] before acceptance.
    pub fn from_data(
        label: impl Into<String>,
        basis: Arc<BasisSpec>,
        data: DMatrix<Complex64>,
        hermitian: bool,
    ) -> Result<Self> {
        let label = label.into();
        if data.nrows() != basis.dim() || data.ncols() != basis.dim() {
            return Err(Error::InvalidParameter(format!(
                "operator `{label}` is {}x{} but the basis has dimension {}",
                data.nrows(),
                data.ncols(),
                basis.dim()
            )));
        }
        let op = Self {
            label,
            basis,
            data,
            hermitian,
        };
        if hermitian {
            let dev = op.hermiticity_deviation();
            if dev >= HERMITICITY_TOL {
                return Err(Error::HermiticityViolation {
                    label: op.label,
                    deviation: dev,
                });
            }
        }
        Ok(op)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn basis(&self) -> &Arc<BasisSpec> {
        &self.basis
    }

    pub fn data(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// Entrywise max-norm, `max |A_ij|`.
    pub fn max_norm(&self) -> f64 {
        max_abs(&self.data)
    }

    /// `max |A - A^H|` entrywise.
    pub fn hermiticity_deviation(&self) -> f64 {
        max_abs(&(&self.data - self.data.adjoint()))
    }

    /// Matrix entry by bra/ket mode indices.
    pub fn entry(&self, bra: usize, ket: usize) -> Complex64 {
        self.data[(bra, ket)]
    }

    /// Serializable row-major dump of the matrix with basis metadata.
    pub fn dump(&self) -> MatrixDump {
        MatrixDump {
            label: self.label.clone(),
            ambient_dim: self.basis.ambient_dim(),
            l_max: self.basis.l_max(),
            dim: self.dim(),
            hermitian: self.hermitian,
            entries: self
                .data
                .row_iter()
                .flat_map(|row| row.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
                .collect(),
        }
    }
}

/// Row-major JSON dump schema for external inspection of an operator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDump {
    pub label: String,
    #[serde(rename = "N")]
    pub ambient_dim: usize,
    pub l_max: usize,
    pub dim: usize,
    pub hermitian: bool,
    /// `dim * dim` complex entries as `[re, im]`, row-major.
    pub entries: Vec<[f64; 2]>,
}

pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Position operator `x_i = r n_i` (axis is 1-based to match `x_1..x_N`).
pub fn build_position(
    basis: &Arc<BasisSpec>,
    params: &PhysicalParams,
    axis: usize,
) -> Result<OperatorMatrix> {
    check_axis(basis, axis)?;
    let a = axis - 1;
    let grid_len = basis.grid().len();
    let mut f = basis.values().clone();
    for g in 0..grid_len {
        let scale = Complex64::from(params.radius * basis.normal_component(a, g));
        for v in f.row_mut(g).iter_mut() {
            *v *= scale;
        }
    }
    let data = basis.project_columns(&f);
    OperatorMatrix::from_data(format!("x_{axis}"), basis.clone(), data, true)
}

/// Geometric momentum `p_i = -i hbar (grad_S + M n / 2)_i`, hermitian by
/// construction of the mean-curvature term.
pub fn build_momentum(
    basis: &Arc<BasisSpec>,
    params: &PhysicalParams,
    axis: usize,
) -> Result<OperatorMatrix> {
    let data = assemble_momentum(basis, params, axis, true)?;
    let op = OperatorMatrix::from_data(format!("p_{axis}"), basis.clone(), data, true)?;
    momentum_sanity_check(&op, params)?;
    Ok(op)
}

/// The naive (non-hermitian) momentum `-i hbar grad_S`, without the
/// `M n / 2` term. Used as a negative control; never flagged hermitian.
pub fn build_momentum_naive(
    basis: &Arc<BasisSpec>,
    params: &PhysicalParams,
    axis: usize,
) -> Result<OperatorMatrix> {
    let data = assemble_momentum(basis, params, axis, false)?;
    let op = OperatorMatrix::from_data(format!("p_naive_{axis}"), basis.clone(), data, false)?;
    momentum_sanity_check(&op, params)?;
    Ok(op)
}

fn assemble_momentum(
    basis: &Arc<BasisSpec>,
    params: &PhysicalParams,
    axis: usize,
    with_curvature_term: bool,
) -> Result<DMatrix<Complex64>> {
    check_axis(basis, axis)?;
    let a = axis - 1;
    let n_dim = basis.ambient_dim();
    let r = params.radius;
    let mean_curvature = -((n_dim - 1) as f64) / r;
    let half_m = if with_curvature_term {
        0.5 * mean_curvature
    } else {
        0.0
    };
    let minus_i_hbar = Complex64::new(0.0, -params.hbar);

    let grid_len = basis.grid().len();
    let dim = basis.dim();
    let mut f = DMatrix::zeros(grid_len, dim);
    let values = basis.values();
    let dtheta = basis.dtheta();
    let dphi = basis.dphi_over_sin();
    for g in 0..grid_len {
        let e_th = Complex64::from(basis.frame_theta_component(a, g) / r);
        let e_ph = Complex64::from(basis.frame_phi_component(a, g) / r);
        let n_term = Complex64::from(half_m * basis.normal_component(a, g));
        for b in 0..dim {
            let mut v = e_th * dtheta[(g, b)] + n_term * values[(g, b)];
            if n_dim == 3 {
                v += e_ph * dphi[(g, b)];
            }
            f[(g, b)] = minus_i_hbar * v;
        }
    }
    Ok(basis.project_columns(&f))
}

fn momentum_sanity_check(op: &OperatorMatrix, params: &PhysicalParams) -> Result<()> {
    let bound = 10.0 * params.hbar * (op.basis().l_max() as f64 + 2.0) / params.radius;
    let max_entry = op.max_norm();
    if !max_entry.is_finite() || max_entry > bound {
        return Err(Error::SanityBoundExceeded {
            label: op.label().to_string(),
            max_entry,
            bound,
        });
    }
    Ok(())
}

/// Laplace–Beltrami operator: exact diagonal `-l (l + N - 2) / r^2`.
pub fn build_laplace_beltrami(
    basis: &Arc<BasisSpec>,
    params: &PhysicalParams,
) -> Result<OperatorMatrix> {
    let n_dim = basis.ambient_dim() as f64;
    let r2 = params.radius * params.radius;
    let mut data = DMatrix::zeros(basis.dim(), basis.dim());
    for idx in 0..basis.dim() {
        let l = basis.level(idx) as f64;
        data[(idx, idx)] = Complex64::from(-l * (l + n_dim - 2.0) / r2);
    }
    OperatorMatrix::from_data("lb", basis.clone(), data, true)
}

/// Constrained Hamiltonian `H(alpha)`: exact diagonal
/// `hbar^2/(2 m r^2) (l (l + N - 2) + alpha)`.
pub fn build_hamiltonian(
    basis: &Arc<BasisSpec>,
    params: &PhysicalParams,
    alpha: f64,
) -> Result<OperatorMatrix> {
    let n_dim = basis.ambient_dim() as f64;
    let unit = params.energy_unit();
    let mut data = DMatrix::zeros(basis.dim(), basis.dim());
    for idx in 0..basis.dim() {
        let l = basis.level(idx) as f64;
        data[(idx, idx)] = Complex64::from(unit * (l * (l + n_dim - 2.0) + alpha));
    }
    OperatorMatrix::from_data(format!("H(alpha={alpha})"), basis.clone(), data, true)
}

fn check_axis(basis: &BasisSpec, axis: usize) -> Result<()> {
    if axis == 0 || axis > basis.ambient_dim() {
        return Err(Error::InvalidParameter(format!(
            "axis must be in 1..={}, got {axis}",
            basis.ambient_dim()
        )));
    }
    Ok(())
}

/// The full operator family at one basis and parameter set.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    basis: Arc<BasisSpec>,
    params: PhysicalParams,
    position: Vec<OperatorMatrix>,
    momentum: Vec<OperatorMatrix>,
    laplace: OperatorMatrix,
}

impl OperatorSet {
    pub fn build(basis: Arc<BasisSpec>, params: PhysicalParams) -> Result<Self> {
        params.validate()?;
        let n = basis.ambient_dim();
        let position = (1..=n)
            .map(|axis| build_position(&basis, &params, axis))
            .collect::<Result<Vec<_>>>()?;
        let momentum = (1..=n)
            .map(|axis| build_momentum(&basis, &params, axis))
            .collect::<Result<Vec<_>>>()?;
        let laplace = build_laplace_beltrami(&basis, &params)?;
        Ok(Self {
            basis,
            params,
            position,
            momentum,
            laplace,
        })
    }

    pub fn basis(&self) -> &Arc<BasisSpec> {
        &self.basis
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.ambient_dim()
    }

    /// `x_axis`, 1-based.
    pub fn position(&self, axis: usize) -> &OperatorMatrix {
        &self.position[axis - 1]
    }

    /// `p_axis`, 1-based.
    pub fn momentum(&self, axis: usize) -> &OperatorMatrix {
        &self.momentum[axis - 1]
    }

    pub fn positions(&self) -> &[OperatorMatrix] {
        &self.position
    }

    pub fn momenta(&self) -> &[OperatorMatrix] {
        &self.momentum
    }

    pub fn laplace_beltrami(&self) -> &OperatorMatrix {
        &self.laplace
    }

    pub fn hamiltonian(&self, alpha: f64) -> Result<OperatorMatrix> {
        build_hamiltonian(&self.basis, &self.params, alpha)
    }

    /// Naive momenta without the mean-curvature term (negative control).
    pub fn naive_momenta(&self) -> Result<Vec<OperatorMatrix>> {
        (1..=self.ambient_dim())
            .map(|axis| build_momentum_naive(&self.basis, &self.params, axis))
            .collect()
    }
}
