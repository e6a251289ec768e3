//! Noncontextual upper bounds on `p_−` and the certificates built from them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::schemes::ExperimentStats;

/// Operational equivalences a bound relies on. A violation only witnesses
/// contextuality if every listed equivalence has been checked in the
/// experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Assumption {
    /// Each pointer effect equals `q(x-1)[1|M_E] + q(x)[0|M_E]` for a
    /// distribution `q` with median 0.
    PointerResponseMixture,
    /// The unrecorded weak measurement equals `(1-p_d)·identity + p_d·(other)`.
    TransformationDisturbanceDecomposition,
    /// The momentum readout equals a trivial measurement that ignores the
    /// system and is negative with probability 1/2.
    MomentumTrivialSampling,
    /// The pointer measurement equals `p_m·M_E + (1-p_m)·M_triv`.
    StrengthMixtureWithTrivial,
    /// The postselection after an unrecorded weak measurement equals
    /// `(1-p_d)·M_F + p_d·M_D`.
    PostselectionDisturbanceDecomposition,
    /// `q0·σ0 + q1·σ1` and `q_*·ρ_* + q_⊥·ρ_⊥` are the same preparation.
    PreparationEnsembleEquivalence,
    /// Every ontic state sends the pointer negative with probability at most `p̃`.
    NegativeOutcomeBound,
}

impl Assumption {
    pub fn id(self) -> &'static str {
        match self {
            Self::PointerResponseMixture => "pointer-response-mixture",
            Self::TransformationDisturbanceDecomposition => "transformation-disturbance-decomposition",
            Self::MomentumTrivialSampling => "momentum-trivial-sampling",
            Self::StrengthMixtureWithTrivial => "strength-mixture-with-trivial",
            Self::PostselectionDisturbanceDecomposition => "postselection-disturbance-decomposition",
            Self::PreparationEnsembleEquivalence => "preparation-ensemble-equivalence",
            Self::NegativeOutcomeBound => "negative-outcome-bound",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Self::PointerResponseMixture => {
                "pointer effects are q(x-1)[1|M_E] + q(x)[0|M_E] with median(q) = 0"
            }
            Self::TransformationDisturbanceDecomposition => {
                "unrecorded weak measurement = (1-p_d) identity + p_d other transformation"
            }
            Self::MomentumTrivialSampling => {
                "momentum readout = trivial measurement, negative with probability 1/2"
            }
            Self::StrengthMixtureWithTrivial => "pointer measurement = p_m M_E + (1-p_m) M_triv",
            Self::PostselectionDisturbanceDecomposition => {
                "postselection after unrecorded weak measurement = (1-p_d) M_F + p_d M_D"
            }
            Self::PreparationEnsembleEquivalence => {
                "q0 sigma0 + q1 sigma1 = q_* rho_* + q_perp rho_perp as preparations"
            }
            Self::NegativeOutcomeBound => "p(x < 0 | lambda) <= p_tilde for every ontic state",
        }
    }
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremTag {
    Thm1,
    Thm2,
    Thm3,
    Thm4,
    Lemma1,
    Lemma2,
}

impl TheoremTag {
    pub const ALL: [TheoremTag; 6] = [
        Self::Thm1,
        Self::Thm2,
        Self::Thm3,
        Self::Thm4,
        Self::Lemma1,
        Self::Lemma2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Thm1 => "thm1",
            Self::Thm2 => "thm2",
            Self::Thm3 => "thm3",
            Self::Thm4 => "thm4",
            Self::Lemma1 => "lemma1",
            Self::Lemma2 => "lemma2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| invalid(format!("unknown theorem tag {s:?}")))
    }

    pub fn template(self) -> Template {
        match self {
            Self::Thm4 | Self::Lemma2 => Template::Template2,
            _ => Template::Template1,
        }
    }

    pub fn assumptions(self) -> Vec<Assumption> {
        use Assumption::*;
        match self {
            Self::Thm1 => vec![PointerResponseMixture, TransformationDisturbanceDecomposition],
            Self::Thm2 => vec![MomentumTrivialSampling, TransformationDisturbanceDecomposition],
            Self::Thm3 => vec![StrengthMixtureWithTrivial, TransformationDisturbanceDecomposition],
            Self::Thm4 => vec![
                PointerResponseMixture,
                PostselectionDisturbanceDecomposition,
                PreparationEnsembleEquivalence,
            ],
            Self::Lemma1 => vec![NegativeOutcomeBound, TransformationDisturbanceDecomposition],
            Self::Lemma2 => vec![
                NegativeOutcomeBound,
                PostselectionDisturbanceDecomposition,
                PreparationEnsembleEquivalence,
            ],
        }
    }
}

impl fmt::Display for TheoremTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Template {
    Template1,
    Template2,
}

/// How close the postselection is to projective, with the weight of `ρ_*`
/// in the test ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sharpness {
    pub c_s: f64,
    pub q_star: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSpec {
    pub template: Template,
    pub p_tilde: f64,
    pub p_d: f64,
    pub c_s: Option<f64>,
    pub q_star: Option<f64>,
    pub theorem_tag: TheoremTag,
}

impl BoundSpec {
    pub fn from_stats(stats: &ExperimentStats, tag: TheoremTag, sharpness: Option<Sharpness>) -> Result<Self> {
        let p_tilde = match tag {
            TheoremTag::Thm1 | TheoremTag::Thm2 | TheoremTag::Thm4 => 0.5,
            TheoremTag::Thm3 => {
                let p_m = stats
                    .p_m
                    .ok_or_else(|| invalid("thm3 needs p_m, which this scheme does not provide"))?;
                (1.0 + p_m) / 2.0
            }
            TheoremTag::Lemma1 | TheoremTag::Lemma2 => stats.p_tilde,
        };
        let (c_s, q_star) = match tag.template() {
            Template::Template1 => (None, None),
            Template::Template2 => {
                let sh = sharpness
                    .ok_or_else(|| invalid(format!("{tag} needs C_S and q_star")))?;
                (Some(sh.c_s), Some(sh.q_star))
            }
        };
        Ok(Self {
            template: tag.template(),
            p_tilde,
            p_d: stats.p_d,
            c_s,
            q_star,
            theorem_tag: tag,
        })
    }

    pub fn evaluate(&self, p_f: f64) -> Result<f64> {
        match self.template {
            Template::Template1 => bound_template1(p_f, self.p_d, self.p_tilde),
            Template::Template2 => bound_template2(
                p_f,
                self.p_d,
                self.p_tilde,
                self.c_s.ok_or_else(|| invalid("template2 needs C_S"))?,
                self.q_star.ok_or_else(|| invalid("template2 needs q_star"))?,
            ),
        }
    }

    /// When `p_d ≥ p̃` the only noncontextual constraint left is `p_− ≤ p̃`.
    pub fn trivial_regime(&self) -> bool {
        self.p_d >= self.p_tilde
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub theorem_tag: TheoremTag,
    pub bound_value: f64,
    pub observed_p_minus: f64,
    /// `observed - bound`
    pub margin: f64,
    pub violated: bool,
    pub trivial_regime: bool,
    pub assumptions: Vec<Assumption>,
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in [0, 1], got {v}")))
    }
}

/// `p_F·p̃ + (1-p_F)·p_d`, or `p̃` once `p_d ≥ p̃`.
pub fn bound_template1(p_f: f64, p_d: f64, p_tilde: f64) -> Result<f64> {
    check_unit("p_F", p_f)?;
    check_unit("p_d", p_d)?;
    check_unit("p_tilde", p_tilde)?;
    Ok(p_f * p_tilde + (1.0 - p_f) * p_d.min(p_tilde))
}

/// Template 1 plus `(1-C_S)/q_* · max{p̃-p_d, 1-p̃}`, capped at `p̃`.
pub fn bound_template2(p_f: f64, p_d: f64, p_tilde: f64, c_s: f64, q_star: f64) -> Result<f64> {
    check_unit("C_S", c_s)?;
    if !(q_star > 0.0 && q_star <= 1.0) {
        return Err(invalid(format!("q_star must lie in (0, 1], got {q_star}")));
    }
    let base = bound_template1(p_f, p_d, p_tilde)?;
    let penalty = (1.0 - c_s) / q_star * (p_tilde - p_d).max(1.0 - p_tilde);
    Ok((base + penalty).min(p_tilde))
}

pub fn bound_theorem(
    stats: &ExperimentStats,
    tag: TheoremTag,
    sharpness: Option<Sharpness>,
) -> Result<Certificate> {
    let spec = BoundSpec::from_stats(stats, tag, sharpness)?;
    let bound = spec.evaluate(stats.p_f)?;
    let margin = stats.p_minus - bound;
    Ok(Certificate {
        theorem_tag: tag,
        bound_value: bound,
        observed_p_minus: stats.p_minus,
        margin,
        violated: margin > 0.0,
        trivial_regime: spec.trivial_regime(),
        assumptions: tag.assumptions(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RequiredCs {
    /// Sharpness above which the observed `p_−` violates template 2.
    pub value: f64,
    /// False when `value > 1`, i.e. no postselection is sharp enough.
    pub feasible: bool,
}

/// Solves template 2 at `p̃ = 1/2` for `C_S`:
/// `C_S = 1 - 2q_*(p_− - p_F/2 - (1-p_F)p_d)`.
pub fn required_cs(p_minus: f64, p_f: f64, p_d: f64, q_star: f64) -> Result<RequiredCs> {
    required_cs_general(p_minus, p_f, p_d, 0.5, q_star)
}

/// Same for arbitrary `p̃ > p_d`:
/// `C_S = 1 - q_*(p_− - T1) / max{p̃-p_d, 1-p̃}` with `T1` the template-1 bound.
pub fn required_cs_general(p_minus: f64, p_f: f64, p_d: f64, p_tilde: f64, q_star: f64) -> Result<RequiredCs> {
    check_unit("p_minus", p_minus)?;
    if !(q_star > 0.0 && q_star <= 1.0) {
        return Err(invalid(format!("q_star must lie in (0, 1], got {q_star}")));
    }
    if p_d >= p_tilde {
        return Err(invalid("template 2 needs p_d < p_tilde"));
    }
    let t1 = bound_template1(p_f, p_d, p_tilde)?;
    let weight = (p_tilde - p_d).max(1.0 - p_tilde);
    let value = 1.0 - q_star * (p_minus - t1) / weight;
    Ok(RequiredCs {
        value,
        feasible: value <= 1.0,
    })
}

/// Largest postselection noise for which `p_noisy` still exceeds the
/// template-1 bound at leading order: `1/(2 + 8 p_E)`.
pub fn noise_threshold_eps(p_e: f64) -> Result<f64> {
    check_unit("p_E", p_e)?;
    Ok(1.0 / (2.0 + 8.0 * p_e))
}

/// Smallest `p_d` compatible with complete positivity of the disturbance
/// decomposition when measuring an observable with these eigenvalues:
/// `(1 - e^{-Δ²/4s²})/2` for the spread `Δ` of the spectrum.
pub fn min_pd_for_cp(eigenvalues: &[f64], s: f64) -> Result<f64> {
    if eigenvalues.is_empty() {
        return Err(invalid("no eigenvalues given"));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(invalid(format!("pointer spread must be positive, got {s}")));
    }
    let lo = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let delta = hi - lo;
    Ok(-0.5 * (-delta * delta / (4.0 * s * s)).exp_m1())
}
