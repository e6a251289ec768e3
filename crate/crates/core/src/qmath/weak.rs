//! Kirkwood–Dirac numerators and weak values.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::{herm_eigendecomp, DEFAULT_DEGENERACY_TOL};
use super::operators::{DensityState, Effect, HermitianOperator};
use crate::error::{domain, Result};

/// Postselection probabilities at or below this are treated as orthogonal.
pub const MIN_POSTSELECTION_PROB: f64 = 1e-12;

/// `Tr(F E ρ)`.
pub fn kd_quasiprob(rho: &DensityState, e: &Effect, f: &Effect) -> Result<Complex64> {
    rho.matrix().check_dim(e.matrix())?;
    rho.matrix().check_dim(f.matrix())?;
    Ok((f.matrix() * e.matrix()).trace_product(rho.matrix()))
}

/// `Tr(F E ρ) / Tr(F ρ)`.
pub fn weak_value(rho: &DensityState, e: &Effect, f: &Effect) -> Result<Complex64> {
    let num = kd_quasiprob(rho, e, f)?;
    let p_f = f.expectation(rho)?;
    if p_f <= MIN_POSTSELECTION_PROB {
        return Err(domain(format!(
            "pre- and postselection are orthogonal (Tr(F rho) = {p_f:.3e})"
        )));
    }
    Ok(num / p_f)
}

/// Thresholds deciding when a weak value counts as anomalous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnomalyTolerance {
    /// Allowed excursion of the real part outside the eigenvalue range.
    pub real: f64,
    /// Largest imaginary part still treated as zero.
    pub imag: f64,
}

impl Default for AnomalyTolerance {
    fn default() -> Self {
        Self {
            real: 1e-10,
            imag: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableWeakValue {
    pub total: Complex64,
    pub eigenvalues: Vec<f64>,
    /// Weak value of each eigenprojector, aligned with `eigenvalues`.
    pub per_projector: Vec<Complex64>,
    pub anomalous: bool,
}

pub fn weak_value_observable(
    rho: &DensityState,
    o: &HermitianOperator,
    f: &Effect,
    tol: AnomalyTolerance,
) -> Result<ObservableWeakValue> {
    let spec = herm_eigendecomp(o, DEFAULT_DEGENERACY_TOL)?;
    let mut per_projector = Vec::with_capacity(spec.projectors.len());
    let mut total = Complex64::new(0.0, 0.0);
    for (&oi, ei) in spec.eigenvalues.iter().zip(&spec.projectors) {
        let wv = weak_value(rho, ei, f)?;
        total += wv * oi;
        per_projector.push(wv);
    }
    let lo = spec.eigenvalues[0];
    let hi = spec.eigenvalues[spec.eigenvalues.len() - 1];
    let anomalous =
        total.re < lo - tol.real || total.re > hi + tol.real || total.im.abs() > tol.imag;
    Ok(ObservableWeakValue {
        total,
        eigenvalues: spec.eigenvalues,
        per_projector,
        anomalous,
    })
}
