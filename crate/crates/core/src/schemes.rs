//! Closed-form statistics of weak measurements followed by postselection.
//!
//! Every scheme here measures a projector `E` with a pointer and records one
//! binary coarse-graining of the pointer outcome (negative or not). The
//! unnormalized post-measurement state for either outcome has the form
//!
//! ```text
//! c_ee·EρE + c_pp·E⊥ρE⊥ + c_ep·EρE⊥ + conj(c_ep)·E⊥ρE
//! ```
//!
//! so `p_−` is a linear combination of `Tr(EFEρ)`, `Tr(E⊥FE⊥ρ)` and
//! `Tr(E⊥FEρ)`, where `F` is the (possibly noisy) postselection effect.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};
use crate::qmath::matrix::CMatrix;
use crate::qmath::special::{erf, erfc, erfi, gaussian_overlap};
use crate::qmath::weak::{kd_quasiprob, MIN_POSTSELECTION_PROB};
use crate::qmath::{DensityState, Effect};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    GaussianPosition,
    GaussianMomentum,
    QubitPointer,
    CoarseGrained,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::GaussianPosition => "gaussian_position",
            Self::GaussianMomentum => "gaussian_momentum",
            Self::QubitPointer => "qubit_pointer",
            Self::CoarseGrained => "coarse_grained",
        }
    }

    pub fn uses_spread(self) -> bool {
        !matches!(self, Self::QubitPointer)
    }
}

/// A scheme together with its strength parameter and postselection noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    /// Pointer spread; Gaussian and coarse-grained schemes only.
    pub s: Option<f64>,
    /// Qubit-pointer coupling angle.
    pub epsilon_pointer: Option<f64>,
    pub noise_eps: f64,
}

impl SchemeSpec {
    pub fn with_spread(kind: SchemeKind, s: f64, noise_eps: f64) -> Result<Self> {
        let spec = Self {
            kind,
            s: Some(s),
            epsilon_pointer: None,
            noise_eps,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn qubit_pointer(eps: f64, noise_eps: f64) -> Result<Self> {
        let spec = Self {
            kind: SchemeKind::QubitPointer,
            s: None,
            epsilon_pointer: Some(eps),
            noise_eps,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_noise(self.noise_eps)?;
        match (self.kind.uses_spread(), self.s, self.epsilon_pointer) {
            (true, Some(s), None) => check_spread(s),
            (false, None, Some(eps)) => check_pointer_angle(eps),
            _ => Err(invalid(format!(
                "scheme {} needs exactly {}",
                self.kind.name(),
                if self.kind.uses_spread() { "s" } else { "epsilon_pointer" }
            ))),
        }
    }

    /// Strength parameter: `s` or the pointer angle.
    pub fn strength(&self) -> f64 {
        self.s.or(self.epsilon_pointer).unwrap_or(f64::NAN)
    }

    pub fn run(&self, rho: &DensityState, e: &Effect, pi: &Effect) -> Result<ExperimentStats> {
        self.validate()?;
        let post = noisy_postselection(pi, self.noise_eps)?;
        match self.kind {
            SchemeKind::GaussianPosition => gaussian_position_stats(rho, e, &post, self.strength()),
            SchemeKind::GaussianMomentum => gaussian_momentum_stats(rho, e, &post, self.strength()),
            SchemeKind::QubitPointer => qubit_pointer_stats(rho, e, &post, self.strength()),
            SchemeKind::CoarseGrained => coarse_grained_stats(rho, e, &post, self.strength()),
        }
    }

    /// `Σ_outcomes K ρ K†` for this scheme's instrument.
    pub fn marginal_channel(&self, e: &Effect, rho: &CMatrix) -> Result<CMatrix> {
        self.validate()?;
        e.matrix().check_dim(rho)?;
        if self.kind == SchemeKind::QubitPointer {
            let (plus, minus) = qubit_kraus(e, self.strength());
            return Ok(&plus.sandwich(rho) + &minus.sandwich(rho));
        }
        let inst = self.binary_instrument()?;
        Ok(&inst.minus.apply(e, rho) + &inst.plus.apply(e, rho))
    }

    /// Coefficients of the two recorded outcomes.
    pub fn binary_instrument(&self) -> Result<BinaryInstrument> {
        self.validate()?;
        let v = self.strength();
        match self.kind {
            SchemeKind::GaussianPosition => position_instrument(v, 0.0),
            SchemeKind::CoarseGrained => position_instrument(v, 0.5),
            SchemeKind::GaussianMomentum => Ok(momentum_instrument(v)),
            SchemeKind::QubitPointer => Ok(qubit_instrument(v)),
        }
    }
}

fn check_spread(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("pointer spread must be positive and finite, got {s}")))
    }
}

fn check_pointer_angle(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= PI / 4.0 {
        Ok(())
    } else {
        Err(invalid(format!("pointer angle must lie in (0, pi/4], got {eps}")))
    }
}

fn check_noise(eps: f64) -> Result<()> {
    if (0.0..0.5).contains(&eps) {
        Ok(())
    } else {
        Err(invalid(format!("postselection noise must lie in [0, 1/2), got {eps}")))
    }
}

/// Operational statistics of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentStats {
    pub p_minus: f64,
    pub p_f: f64,
    pub p_d: f64,
    pub p_tilde: f64,
    pub p_m: Option<f64>,
    /// `Tr(F E ρ)` with the postselection effect actually used.
    pub kd_numerator: Complex64,
    pub leading_order_p_minus: f64,
}

/// Postselection effects `[1|M_F] = (1-2ε)Π + ε·1` and its complement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostselectionModel {
    pub effect_pass: Effect,
    pub effect_fail: Effect,
    pub ideal_projector: Effect,
    pub noise_eps: f64,
}

pub fn noisy_postselection(pi: &Effect, eps: f64) -> Result<PostselectionModel> {
    check_noise(eps)?;
    if !pi.is_projector() {
        return Err(invalid("postselection must be a projector"));
    }
    let one = CMatrix::identity(pi.dim());
    let pass = &pi.matrix().scale_real(1.0 - 2.0 * eps) + &one.scale_real(eps);
    let effect_pass = Effect::new(pass)?;
    let effect_fail = effect_pass.complement();
    Ok(PostselectionModel {
        effect_pass,
        effect_fail,
        ideal_projector: pi.clone(),
        noise_eps: eps,
    })
}

/// `(1 - e^{-1/4s²}) / 2`
pub fn disturbance_pd(s: f64) -> Result<f64> {
    check_spread(s)?;
    Ok(-0.5 * (-1.0 / (4.0 * s * s)).exp_m1())
}

/// Spread giving a prescribed disturbance `p_d ∈ (0, 1/2)`.
pub fn spread_for_pd(p_d: f64) -> Result<f64> {
    if !(p_d > 0.0 && p_d < 0.5) {
        return Err(invalid(format!("p_d must lie in (0, 1/2), got {p_d}")));
    }
    Ok(1.0 / (2.0 * (-(1.0 - 2.0 * p_d).ln()).sqrt()))
}

/// The three traces every scheme needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceTerms {
    /// `Tr(E F E ρ)`
    pub ee: f64,
    /// `Tr(E⊥ F E⊥ ρ)`
    pub pp: f64,
    /// `Tr(E⊥ F E ρ)`
    pub ep: Complex64,
}

impl InterferenceTerms {
    pub fn new(rho: &DensityState, e: &Effect, f: &Effect) -> Result<Self> {
        rho.matrix().check_dim(e.matrix())?;
        rho.matrix().check_dim(f.matrix())?;
        let em = e.matrix();
        let ep = e.complement();
        let pm = ep.matrix();
        let fm = f.matrix();
        let r = rho.matrix();
        Ok(Self {
            ee: (&(em * fm) * em).trace_product(r).re,
            pp: (&(pm * fm) * pm).trace_product(r).re,
            ep: (&(pm * fm) * em).trace_product(r),
        })
    }

    /// `Tr(F ρ) = ee + pp + 2 Re ep`
    pub fn total(&self) -> f64 {
        self.ee + self.pp + 2.0 * self.ep.re
    }
}

/// Unnormalized post-measurement map of one outcome:
/// `ρ ↦ ee·EρE + pp·E⊥ρE⊥ + ep·EρE⊥ + conj(ep)·E⊥ρE`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeCoefficients {
    pub ee: f64,
    pub pp: f64,
    pub ep: Complex64,
}

impl OutcomeCoefficients {
    pub fn apply(&self, e: &Effect, rho: &CMatrix) -> CMatrix {
        let em = e.matrix();
        let ec = e.complement();
        let pm = ec.matrix();
        let a = (&(em * rho) * em).scale_real(self.ee);
        let b = (&(pm * rho) * pm).scale_real(self.pp);
        let c = (&(em * rho) * pm).scale(self.ep);
        let d = (&(pm * rho) * em).scale(self.ep.conj());
        &(&a + &b) + &(&c + &d)
    }

    /// `Tr(F · apply(ρ))`
    pub fn probability(&self, t: &InterferenceTerms) -> f64 {
        // Tr(F EρE⊥) = Tr(E⊥FEρ)
        self.ee * t.ee + self.pp * t.pp + 2.0 * (self.ep * t.ep).re
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryInstrument {
    pub minus: OutcomeCoefficients,
    pub plus: OutcomeCoefficients,
}

/// Pointer position split at `cut`; `E` shifts the pointer by one.
fn position_instrument(s: f64, cut: f64) -> Result<BinaryInstrument> {
    let minus = OutcomeCoefficients {
        ee: gaussian_overlap(1.0, 1.0, s, cut)?,
        pp: gaussian_overlap(0.0, 0.0, s, cut)?,
        ep: Complex64::new(gaussian_overlap(1.0, 0.0, s, cut)?, 0.0),
    };
    // the upper piece uses the mirror-image tails so nothing is lost to 1 - x
    let overlap = (-1.0 / (4.0 * s * s)).exp();
    let plus = OutcomeCoefficients {
        ee: 0.5 * erfc((cut - 1.0) / s),
        pp: 0.5 * erfc(cut / s),
        ep: Complex64::new(overlap * 0.5 * erfc((2.0 * cut - 1.0) / (2.0 * s)), 0.0),
    };
    Ok(BinaryInstrument { minus, plus })
}

/// `α = e^{-1/4s²}(1 + i·erfi(1/2s))`, the half-line momentum overlap times two.
pub fn momentum_alpha(s: f64) -> Complex64 {
    let t = 1.0 / (2.0 * s);
    Complex64::new(1.0, erfi(t)) * (-t * t).exp()
}

/// Pointer momentum split at zero.
fn momentum_instrument(s: f64) -> BinaryInstrument {
    let alpha = momentum_alpha(s);
    BinaryInstrument {
        minus: OutcomeCoefficients {
            ee: 0.5,
            pp: 0.5,
            ep: alpha * 0.5,
        },
        plus: OutcomeCoefficients {
            ee: 0.5,
            pp: 0.5,
            ep: alpha.conj() * 0.5,
        },
    }
}

/// `N_± = (cos ε·1 ± sin ε·(E - E⊥)) / √2` expanded in the `E`, `E⊥` blocks.
fn qubit_instrument(eps: f64) -> BinaryInstrument {
    let (s2, c2) = (2.0 * eps).sin_cos();
    BinaryInstrument {
        minus: OutcomeCoefficients {
            ee: 0.5 * (1.0 - s2),
            pp: 0.5 * (1.0 + s2),
            ep: Complex64::new(0.5 * c2, 0.0),
        },
        plus: OutcomeCoefficients {
            ee: 0.5 * (1.0 + s2),
            pp: 0.5 * (1.0 - s2),
            ep: Complex64::new(0.5 * c2, 0.0),
        },
    }
}

/// Kraus operators `(N_{+1}, N_{-1})` of the qubit pointer.
pub fn qubit_kraus(e: &Effect, eps: f64) -> (CMatrix, CMatrix) {
    let one = CMatrix::identity(e.dim());
    let z = &e.matrix().scale_real(2.0) - &one;
    let (s, c) = eps.sin_cos();
    let k = std::f64::consts::FRAC_1_SQRT_2;
    let plus = (&one.scale_real(c) + &z.scale_real(s)).scale_real(k);
    let minus = (&one.scale_real(c) - &z.scale_real(s)).scale_real(k);
    (plus, minus)
}

struct Prepared {
    terms: InterferenceTerms,
    p_f: f64,
    kd: Complex64,
}

fn prepare(rho: &DensityState, e: &Effect, post: &PostselectionModel) -> Result<Prepared> {
    if !e.is_projector() {
        return Err(invalid("measured effect must be a projector"));
    }
    rho.matrix().check_dim(e.matrix())?;
    rho.matrix().check_dim(post.effect_pass.matrix())?;
    let f = &post.effect_pass;
    let p_f = f.expectation(rho)?;
    if p_f <= MIN_POSTSELECTION_PROB {
        return Err(domain(format!("postselection probability is {p_f:.3e}")));
    }
    Ok(Prepared {
        terms: InterferenceTerms::new(rho, e, f)?,
        p_f,
        kd: kd_quasiprob(rho, e, f)?,
    })
}

fn clamp_probability(p: f64) -> Result<f64> {
    if !(-1e-9..=1.0 + 1e-9).contains(&p) {
        return Err(Error::Invariant(format!("probability {p} left [0, 1]")));
    }
    Ok(p.clamp(0.0, 1.0))
}

pub fn gaussian_position_stats(
    rho: &DensityState,
    e: &Effect,
    post: &PostselectionModel,
    s: f64,
) -> Result<ExperimentStats> {
    check_spread(s)?;
    let pr = prepare(rho, e, post)?;
    let inst = position_instrument(s, 0.0)?;
    Ok(ExperimentStats {
        p_minus: clamp_probability(inst.minus.probability(&pr.terms))?,
        p_f: pr.p_f,
        p_d: disturbance_pd(s)?,
        p_tilde: 0.5,
        p_m: None,
        kd_numerator: pr.kd,
        leading_order_p_minus: pr.p_f / 2.0 - pr.kd.re / (PI.sqrt() * s),
    })
}

/// Momentum readout. With noisy postselection the same formula is applied to
/// the noisy effect, which is exact because `p_−` is linear in the effect.
pub fn gaussian_momentum_stats(
    rho: &DensityState,
    e: &Effect,
    post: &PostselectionModel,
    s: f64,
) -> Result<ExperimentStats> {
    check_spread(s)?;
    let pr = prepare(rho, e, post)?;
    let inst = momentum_instrument(s);
    Ok(ExperimentStats {
        p_minus: clamp_probability(inst.minus.probability(&pr.terms))?,
        p_f: pr.p_f,
        p_d: disturbance_pd(s)?,
        p_tilde: 0.5,
        p_m: None,
        kd_numerator: pr.kd,
        leading_order_p_minus: pr.p_f / 2.0 - pr.kd.im / (PI.sqrt() * s),
    })
}

pub fn qubit_pointer_stats(
    rho: &DensityState,
    e: &Effect,
    post: &PostselectionModel,
    eps: f64,
) -> Result<ExperimentStats> {
    check_pointer_angle(eps)?;
    let pr = prepare(rho, e, post)?;
    let (_, minus) = qubit_kraus(e, eps);
    let p_minus = minus
        .adjoint()
        .matmul(post.effect_pass.matrix())
        .matmul(&minus)
        .trace_product(rho.matrix())
        .re;
    let p_m = (2.0 * eps).sin();
    Ok(ExperimentStats {
        p_minus: clamp_probability(p_minus)?,
        p_f: pr.p_f,
        p_d: eps.sin().powi(2),
        p_tilde: (1.0 + p_m) / 2.0,
        p_m: Some(p_m),
        kd_numerator: pr.kd,
        leading_order_p_minus: pr.p_f * (1.0 + p_m) / 2.0 - 2.0 * eps * pr.kd.re,
    })
}

/// Position pointer coarse-grained to the nearer eigenvalue, i.e. split at
/// `x = 1/2`. The `X = -1` effect is `a·E + (1-a)·E⊥` with
/// `a = erfc(1/2s)/2`, which is `p_m·E⊥ + (1-p_m)/2·1` for
/// `p_m = erf(1/2s)`.
pub fn coarse_grained_stats(
    rho: &DensityState,
    e: &Effect,
    post: &PostselectionModel,
    s: f64,
) -> Result<ExperimentStats> {
    check_spread(s)?;
    let pr = prepare(rho, e, post)?;
    let inst = position_instrument(s, 0.5)?;
    let p_m = erf(1.0 / (2.0 * s));
    Ok(ExperimentStats {
        p_minus: clamp_probability(inst.minus.probability(&pr.terms))?,
        p_f: pr.p_f,
        p_d: disturbance_pd(s)?,
        p_tilde: (1.0 + p_m) / 2.0,
        p_m: Some(p_m),
        kd_numerator: pr.kd,
        leading_order_p_minus: pr.p_f * (1.0 + p_m) / 2.0 - pr.kd.re / (PI.sqrt() * s),
    })
}

/// Two ensembles with the same average state: `q_*ρ_* + (1-q_*)ρ_⊥` and
/// `q0·σ0 + q1·σ1`, both equal to `1/d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreparationEnsemble {
    pub sigma0: DensityState,
    pub sigma1: DensityState,
    pub q0: f64,
    pub q1: f64,
    pub rho_star: DensityState,
    pub rho_perp: DensityState,
    pub q_star: f64,
}

impl PreparationEnsemble {
    /// Largest entrywise difference between the two mixtures.
    pub fn equivalence_residual(&self) -> f64 {
        let lhs = &self.rho_star.matrix().scale_real(self.q_star)
            + &self.rho_perp.matrix().scale_real(1.0 - self.q_star);
        let rhs = &self.sigma0.matrix().scale_real(self.q0) + &self.sigma1.matrix().scale_real(self.q1);
        lhs.max_abs_diff(&rhs)
    }
}

/// `σ0 = (1-Π)/(d - TrΠ)`, `σ1 = Π/TrΠ`, `q1 = TrΠ/d`, `q_* = 1/d`,
/// `ρ_⊥ = (1-ρ_*)/(d-1)`. Requires `ρ_*` pure so that `ρ_⊥` is a state.
pub fn sigma_preparations(pi: &Effect, rho_star: &DensityState) -> Result<PreparationEnsemble> {
    pi.matrix().check_dim(rho_star.matrix())?;
    if !pi.is_projector() {
        return Err(invalid("postselection must be a projector"));
    }
    let d = pi.dim();
    if d < 2 {
        return Err(invalid("dimension must be at least 2"));
    }
    let df = d as f64;
    let rank = pi.matrix().trace().re;
    if rank < 0.5 {
        return Err(invalid("postselection projector is zero"));
    }
    if rank > df - 0.5 {
        return Err(invalid("postselection projector is the identity, sigma0 is undefined"));
    }
    let one = CMatrix::identity(d);
    let sigma0 = DensityState::new((&one - pi.matrix()).scale_real(1.0 / (df - rank)))?;
    let sigma1 = DensityState::new(pi.matrix().scale_real(1.0 / rank))?;
    let rho_perp = DensityState::new((&one - rho_star.matrix()).scale_real(1.0 / (df - 1.0)))
        .map_err(|_| invalid("(1 - rho_*)/(d - 1) is not a state; rho_* must be pure"))?;
    let q1 = rank / df;
    Ok(PreparationEnsemble {
        sigma0,
        sigma1,
        q0: 1.0 - q1,
        q1,
        rho_star: rho_star.clone(),
        rho_perp,
        q_star: 1.0 / df,
    })
}

/// `q0·Tr([0|M_F]σ0) + q1·Tr([1|M_F]σ1)`, clamped to `[0, 1]` against
/// rounding.
pub fn c_s_value(ens: &PreparationEnsemble, post: &PostselectionModel) -> Result<f64> {
    let fail = post.effect_fail.expectation(&ens.sigma0)?;
    let pass = post.effect_pass.expectation(&ens.sigma1)?;
    Ok((ens.q0 * fail + ens.q1 * pass).clamp(0.0, 1.0))
}
