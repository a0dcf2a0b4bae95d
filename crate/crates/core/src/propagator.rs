//! Exact time evolution: spectral propagators for Hermitian generators,
//! a general matrix exponential, the counting-field-shifted evolution and
//! density-operator propagation.

use alloc::vec::Vec;

use crate::eigen::jacobi_eigh;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::numerics::Numerics;
use crate::C64;

/// Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Matrix,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Matrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Largest eigenvalue magnitude, i.e. the spectral norm.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, e| m.max(e.abs()))
    }

    /// `V f(Λ) V†` for a scalar function of the eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> Matrix {
        let d: Vec<C64> = self.eigenvalues.iter().map(|&e| f(e)).collect();
        self.eigenvectors.scale_columns(&d).matmul(&self.eigenvectors.adjoint())
    }

    /// `e^{-iHt}`; exactly the identity at `t = 0`.
    pub fn evolution(&self, t: f64) -> Matrix {
        if t == 0.0 {
            return Matrix::identity(self.dim());
        }
        self.apply(|e| C64::from_polar(1.0, -e * t))
    }

    /// `e^{+iθH}`.
    pub fn phase(&self, theta: f64) -> Matrix {
        if theta == 0.0 {
            return Matrix::identity(self.dim());
        }
        self.apply(|e| C64::from_polar(1.0, e * theta))
    }

    pub fn reconstruct(&self) -> Matrix {
        self.apply(|e| C64::new(e, 0.0))
    }
}

/// Full spectrum and eigenbasis of a Hermitian matrix.
pub fn hermitian_eig(h: &Matrix) -> Result<SpectralDecomposition> {
    let deviation = h.hermitian_deviation();
    if deviation > Numerics::DEFAULT.construction * h.max_abs().max(1.0) {
        return Err(Error::NotHermitian { what: "generator".into(), deviation });
    }
    let (eigenvalues, eigenvectors) = jacobi_eigh(h)?;
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

/// `U(t) = e^{-iHt}`.
pub fn evolution(h: &Matrix, t: f64) -> Result<Matrix> {
    Ok(hermitian_eig(h)?.evolution(t))
}

/// `e^A` for an arbitrary square matrix.
pub fn expm(a: &Matrix) -> Result<Matrix> {
    crate::expm::expm(a)
}

/// `U_η(t) = e^{+iηH_E} U(t) e^{-iηH_E}`.
pub fn eta_shifted_evolution(h: &Matrix, h_e: &Matrix, eta: f64, t: f64) -> Result<Matrix> {
    if h.dim() != h_e.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: h_e.dim() });
    }
    let u = evolution(h, t)?;
    if eta == 0.0 {
        return Ok(u);
    }
    let w = hermitian_eig(h_e)?.phase(eta);
    Ok(w.matmul(&u).matmul(&w.adjoint()))
}

/// `ρ(t) = U ρ(0) U†`.
pub fn propagate_density(rho0: &Matrix, u: &Matrix) -> Result<Matrix> {
    if rho0.dim() != u.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), found: rho0.dim() });
    }
    Ok(u.matmul(rho0).matmul(&u.adjoint()))
}
