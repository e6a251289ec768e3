//! Error functions and closed-form Gaussian overlap integrals.
//!
//! `erf` and `erfc` are the fdlibm ports from `libm`; `erfi` has no library
//! implementation there and is summed from its Taylor series.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErfFamily {
    pub erf: f64,
    pub erfc: f64,
    pub erfi: f64,
}

pub fn erf_family(t: f64) -> ErfFamily {
    ErfFamily {
        erf: erf(t),
        erfc: erfc(t),
        erfi: erfi(t),
    }
}

pub fn erf(t: f64) -> f64 {
    libm::erf(t)
}

pub fn erfc(t: f64) -> f64 {
    libm::erfc(t)
}

/// Imaginary error function `erfi(t) = -i erf(i t)`, real for real `t`.
pub fn erfi(t: f64) -> f64 {
    // Σ t^{2k+1} / (k! (2k+1))
    let t2 = t * t;
    let mut sum = t;
    let mut power = t;
    let mut k = 0u32;
    loop {
        k += 1;
        power *= t2 / k as f64;
        let term = power / (2 * k + 1) as f64;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || k > 2000 {
            break;
        }
    }
    FRAC_2_SQRT_PI * sum
}

/// `∫_{-∞}^{upper} G_s(x-a) G_s(x-b) dx` with the unit-normalized pointer
/// amplitude `G_s(x) = (πs²)^{-1/4} exp(-x²/2s²)`.
///
/// Completing the square gives
/// `e^{-(a-b)²/4s²} · ½ erfc((a + b - 2·upper) / 2s)`; `upper = +∞` gives the
/// plain overlap `e^{-(a-b)²/4s²}`.
pub fn gaussian_overlap(a: f64, b: f64, s: f64, upper: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(invalid(format!("pointer spread must be positive, got {s}")));
    }
    let envelope = (-(a - b).powi(2) / (4.0 * s * s)).exp();
    if upper == f64::INFINITY {
        return Ok(envelope);
    }
    if upper == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    Ok(envelope * 0.5 * erfc((a + b - 2.0 * upper) / (2.0 * s)))
}

/// Same integrand over `[lo, hi]`.
pub fn gaussian_overlap_interval(a: f64, b: f64, s: f64, lo: f64, hi: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(invalid(format!("pointer spread must be positive, got {s}")));
    }
    if hi <= lo {
        return Ok(0.0);
    }
    let envelope = (-(a - b).powi(2) / (4.0 * s * s)).exp();
    let m = 0.5 * (a + b);
    // ½[erfc((m-hi)/s) - erfc((m-lo)/s)], written with whichever tail is small
    let u = (m - hi) / s;
    let l = (m - lo) / s;
    let half_mass = if u >= 0.0 {
        0.5 * (erfc(u) - erfc(l))
    } else if l <= 0.0 {
        0.5 * (erfc(-l) - erfc(-u))
    } else {
        0.5 * (erf(l) - erf(u))
    };
    Ok(envelope * half_mass)
}
