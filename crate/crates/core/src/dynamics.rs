//! Linearized fluctuation dynamics: the 6x6 quadrature drift matrix, its
//! complex-basis counterpart, the diffusion matrix and the stability verdict.
//!
//! Quadrature basis order is `(δX₁, δX₂, δY₁, δY₂, δx, δp)`: photon, magnon,
//! then mechanical position and momentum.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{SMatrix, Schur};
use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Occupations, SystemParams};
use crate::steady_state::WorkingPoint;

pub type Matrix6 = SMatrix<f64, 6, 6>;
pub type ComplexMatrix6 = SMatrix<Complex<f64>, 6, 6>;

/// Relative stability threshold: stable iff max Re λ < -1e-9 ω_b.
pub const STABILITY_REL_TOL: f64 = 1e-9;

/// Everything the drift matrix depends on, in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftParams {
    pub delta_a: f64,
    pub delta_m_eff: f64,
    pub kappa_a: f64,
    pub kappa_m: f64,
    pub gamma_b: f64,
    pub omega_b: f64,
    pub g_ma: f64,
    #[serde(rename = "G")]
    pub coupling: f64,
}

impl DriftParams {
    pub fn new(params: &SystemParams, wp: &WorkingPoint) -> Self {
        DriftParams {
            delta_a: params.delta_a(),
            delta_m_eff: wp.delta_m_eff,
            kappa_a: params.kappa_a(),
            kappa_m: params.kappa_m(),
            gamma_b: params.gamma_b(),
            omega_b: params.omega_b(),
            g_ma: params.g_ma(),
            coupling: wp.coupling,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureDrift(pub Matrix6);

impl QuadratureDrift {
    pub fn matrix(&self) -> &Matrix6 {
        &self.0
    }
}

/// Diagonal diffusion matrix of the quadrature noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionMatrix(pub Matrix6);

impl DiffusionMatrix {
    pub fn matrix(&self) -> &Matrix6 {
        &self.0
    }
}

/// Drift matrix of the quadrature fluctuations. A positive `kappa_a` is gain.
pub fn quadrature_drift(p: &DriftParams) -> QuadratureDrift {
    let mut a = Matrix6::zeros();
    a[(0, 0)] = p.kappa_a;
    a[(1, 1)] = p.kappa_a;
    a[(0, 1)] = p.delta_a;
    a[(1, 0)] = -p.delta_a;
    a[(0, 3)] = p.g_ma;
    a[(1, 2)] = -p.g_ma;
    a[(2, 1)] = p.g_ma;
    a[(3, 0)] = -p.g_ma;
    a[(2, 2)] = -p.kappa_m;
    a[(3, 3)] = -p.kappa_m;
    a[(2, 3)] = p.delta_m_eff;
    a[(3, 2)] = -p.delta_m_eff;
    a[(2, 4)] = -p.coupling;
    a[(4, 5)] = p.omega_b;
    a[(5, 3)] = p.coupling;
    a[(5, 4)] = -p.omega_b;
    a[(5, 5)] = -p.gamma_b;
    QuadratureDrift(a)
}

/// Map from quadratures to `(δa, δa†, δm, δm†, δx, δp)`.
pub fn ladder_transform() -> ComplexMatrix6 {
    let s = Complex::new(FRAC_1_SQRT_2, 0.0);
    let is = Complex::new(0.0, FRAC_1_SQRT_2);
    let mut t = ComplexMatrix6::zeros();
    for block in [0, 2] {
        t[(block, block)] = s;
        t[(block, block + 1)] = is;
        t[(block + 1, block)] = s;
        t[(block + 1, block + 1)] = -is;
    }
    t[(4, 4)] = Complex::new(1.0, 0.0);
    t[(5, 5)] = Complex::new(1.0, 0.0);
    t
}

/// Drift in the ladder-operator basis, `M = T A T⁻¹`.
///
/// Built by similarity from the quadrature drift so both share a spectrum.
pub fn complex_drift(p: &DriftParams) -> ComplexMatrix6 {
    let t = ladder_transform();
    // T is unitary on each mode block, so T⁻¹ = T†.
    let t_inv = t.adjoint();
    let a = quadrature_drift(p).0.map(|v| Complex::new(v, 0.0));
    t * a * t_inv
}

/// `diag[|κ_a|(2n_a+1), |κ_a|(2n_a+1), κ_m(2n_m+1), κ_m(2n_m+1), 0, γ_b(2n_b+1)]`.
///
/// A gain cavity injects noise at `|κ_a|`, so flipping the sign of `κ_a`
/// leaves the matrix unchanged.
pub fn diffusion_matrix(p: &DriftParams, n: &Occupations) -> DiffusionMatrix {
    let photon = p.kappa_a.abs() * (2.0 * n.photon + 1.0);
    let magnon = p.kappa_m * (2.0 * n.magnon + 1.0);
    let phonon = p.gamma_b * (2.0 * n.phonon + 1.0);
    let diag = nalgebra::Vector6::new(photon, photon, magnon, magnon, 0.0, phonon);
    DiffusionMatrix(Matrix6::from_diagonal(&diag))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub eigenvalues: Vec<Complex<f64>>,
    /// Largest real part of the drift spectrum, rad/s.
    pub max_lyapunov: f64,
    pub stable: bool,
}

/// Default absolute stability tolerance for a mechanical frequency `omega_b`.
pub fn default_tolerance(omega_b: f64) -> f64 {
    STABILITY_REL_TOL * omega_b
}

/// Eigenvalues of a real 6x6 matrix via real Schur decomposition.
pub fn eigenvalues(m: &Matrix6) -> Result<Vec<Complex<f64>>> {
    let schur = Schur::try_new(*m, f64::EPSILON, 10_000).ok_or(Error::EigenSolver)?;
    let values: Vec<_> = schur.complex_eigenvalues().iter().copied().collect();
    if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::EigenSolver);
    }
    Ok(values)
}

/// Eigenvalues of a complex 6x6 matrix via complex Schur decomposition.
pub fn complex_eigenvalues(m: &ComplexMatrix6) -> Result<Vec<Complex<f64>>> {
    let schur = Schur::try_new(*m, f64::EPSILON, 10_000).ok_or(Error::EigenSolver)?;
    let (_, triangular) = schur.unpack();
    let values: Vec<_> = triangular.diagonal().iter().copied().collect();
    if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::EigenSolver);
    }
    Ok(values)
}

/// Stable iff every eigenvalue of `a` has real part below `-tol_abs`.
pub fn stability(a: &QuadratureDrift, tol_abs: f64) -> Result<StabilityReport> {
    let eigenvalues = eigenvalues(&a.0)?;
    let max_lyapunov = eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(StabilityReport { eigenvalues, max_lyapunov, stable: max_lyapunov < -tol_abs })
}
