//! Validated wrappers for the three roles a matrix plays here: observable,
//! state and effect.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::jacobi_eigen;
use super::matrix::{normalized, CMatrix};
use crate::error::{invalid, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const PROJECTOR_TOL: f64 = 1e-10;

fn check_hermitian(m: &CMatrix) -> Result<()> {
    let defect = m.hermiticity_defect();
    // relative to the entry scale so large observables are not rejected on rounding
    let tol = HERMITIAN_TOL * m.max_abs().max(1.0);
    if defect > tol {
        return Err(invalid(format!("matrix is not Hermitian (defect {defect:.3e})")));
    }
    Ok(())
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + &m.adjoint()).scale_real(0.5)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermitianOperator(CMatrix);

impl HermitianOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_hermitian(&m)?;
        Ok(Self(hermitian_part(&m)))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// A density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityState(CMatrix);

impl DensityState {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_hermitian(&m)?;
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(invalid(format!("state trace is {tr}, expected 1")));
        }
        let h = hermitian_part(&m);
        let min = jacobi_eigen(&h).values[0];
        if min < -PSD_TOL {
            return Err(invalid(format!("state has negative eigenvalue {min:.3e}")));
        }
        Ok(Self(h))
    }

    /// `|ψ><ψ|` for a ket, normalized first.
    pub fn pure(ket: &[Complex64]) -> Result<Self> {
        let v = normalized(ket)?;
        Ok(Self(CMatrix::outer(&v, &v)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(CMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// A POVM element: Hermitian with spectrum in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Effect(CMatrix);

impl Effect {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_hermitian(&m)?;
        let h = hermitian_part(&m);
        let values = jacobi_eigen(&h).values;
        let (lo, hi) = (values[0], values[values.len() - 1]);
        if lo < -PSD_TOL || hi > 1.0 + PSD_TOL {
            return Err(invalid(format!(
                "effect spectrum [{lo:.3e}, {hi:.3e}] leaves [0, 1]"
            )));
        }
        Ok(Self(h))
    }

    /// Rank-one projector onto the normalized ket.
    pub fn projector_onto(ket: &[Complex64]) -> Result<Self> {
        let v = normalized(ket)?;
        Ok(Self(CMatrix::outer(&v, &v)))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `1 - self`
    pub fn complement(&self) -> Self {
        Self(&CMatrix::identity(self.dim()) - &self.0)
    }

    pub fn is_projector(&self) -> bool {
        (&self.0 * &self.0).max_abs_diff(&self.0) <= PROJECTOR_TOL
    }

    pub fn expectation(&self, rho: &DensityState) -> Result<f64> {
        self.0.check_dim(rho.matrix())?;
        Ok(self.0.trace_product(rho.matrix()).re)
    }
}
