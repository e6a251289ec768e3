//! The two exact tightness pipelines: the transformation-only one over
//! `(p_F, p_−)` and the full one over `(p_F, C_S, p_−)`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::dd::{hrep_to_vrep, vrep_to_hrep};
use super::rational::{int, serde_rational, Rational};
use super::repr::{facet_contains, Constraint, HRep, VRep};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    #[serde(with = "serde_rational")]
    pub p_d: Rational,
    #[serde(with = "serde_rational")]
    pub p_tilde: Rational,
    #[serde(with = "serde_rational")]
    pub q_0: Rational,
    #[serde(with = "serde_rational")]
    pub q_star: Rational,
}

impl ScenarioParams {
    pub fn new(p_d: Rational, p_tilde: Rational, q_0: Rational, q_star: Rational) -> Result<Self> {
        let p = Self {
            p_d,
            p_tilde,
            q_0,
            q_star,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, x: &Rational| {
            if x.is_negative() || *x > Rational::one() {
                Err(invalid(format!("{name} = {x} is outside [0, 1]")))
            } else {
                Ok(())
            }
        };
        unit("p_d", &self.p_d)?;
        unit("p_tilde", &self.p_tilde)?;
        unit("q_0", &self.q_0)?;
        unit("q_star", &self.q_star)?;
        if !self.q_star.is_positive() {
            return Err(invalid("q_star must be positive"));
        }
        Ok(())
    }

    /// `min(p_d, p̃)`
    pub fn effective_pd(&self) -> Rational {
        self.p_d.clone().min(self.p_tilde.clone())
    }
}

fn row(coeffs: Vec<Rational>, constant: Rational) -> Constraint {
    Constraint::new(coeffs, constant)
}

/// Response-function polytope over
/// `(p_{M1}(1), p_{M1}(2), p_{M2}(1), p_{M2}(2), p_{M3}(1..4))`.
pub fn assignment_polytope(params: &ScenarioParams) -> Result<(HRep, VRep)> {
    params.validate()?;
    let z = Rational::zero;
    let o = Rational::one;
    let unit = |i: usize| -> Vec<Rational> { (0..8).map(|j| if i == j { o() } else { z() }).collect() };

    let mut ineqs: Vec<Constraint> = (0..8).map(|i| row(unit(i), z())).collect();
    let mut cap = vec![z(); 8];
    cap[4] = -o();
    cap[5] = -o();
    ineqs.push(row(cap, params.p_tilde.clone()));

    let sum = |idx: &[usize]| -> Constraint {
        let mut c = vec![z(); 8];
        for &i in idx {
            c[i] = o();
        }
        row(c, -o())
    };
    let keep = o() - &params.p_d;
    let mut e1 = vec![z(); 8];
    e1[0] = keep.clone();
    e1[2] = params.p_d.clone();
    e1[4] = -o();
    e1[6] = -o();
    let mut e2 = vec![z(); 8];
    e2[1] = keep;
    e2[3] = params.p_d.clone();
    e2[5] = -o();
    e2[7] = -o();
    let eqs = vec![sum(&[0, 1]), sum(&[2, 3]), sum(&[4, 5, 6, 7]), row(e1, z()), row(e2, z())];

    let h = HRep::new(8, ineqs, eqs)?;
    let v = hrep_to_vrep(&h)?;
    Ok((h, v))
}

/// Vertices of the hull of `points` (drops interior and repeated points).
fn hull_vertices(points: &VRep) -> Result<(HRep, VRep)> {
    let h = vrep_to_hrep(points)?;
    let v = hrep_to_vrep(&h)?;
    Ok((h, v))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lemma1Result {
    pub params: ScenarioParams,
    pub assignment_vertex_count: usize,
    pub deterministic_vertices: VRep,
    /// Hull vertices over `(p_F, p_−)`.
    pub reduced: VRep,
    pub hrep: HRep,
    pub target: Constraint,
    pub facet_present: bool,
}

/// `(p̃ − p′_d)·p_F − p_− + p′_d ≥ 0` with `p′_d = min(p_d, p̃)`.
pub fn lemma1_target(params: &ScenarioParams) -> Constraint {
    let pd = params.effective_pd();
    row(vec![&params.p_tilde - &pd, -Rational::one()], pd)
}

pub fn lemma1_pipeline(params: &ScenarioParams) -> Result<Lemma1Result> {
    let (_, v) = assignment_polytope(params)?;
    let det: Vec<Vec<Rational>> = v
        .vertices
        .iter()
        .filter(|x| x[0].is_zero() || x[0].is_one())
        .cloned()
        .collect();
    let deterministic_vertices = VRep::new(8, det)?;
    let projected = deterministic_vertices.project(&[0, 4])?;
    let (hrep, reduced) = hull_vertices(&projected)?;
    let target = lemma1_target(params);
    let facet_present = facet_contains(&hrep, &target)?;
    Ok(Lemma1Result {
        params: params.clone(),
        assignment_vertex_count: v.len(),
        deterministic_vertices,
        reduced,
        hrep,
        target,
        facet_present,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lemma2Result {
    pub params: ScenarioParams,
    pub assignment_vertex_count: usize,
    /// Hull vertices `κ′` of all assignment vertices over `(x₁, x₅)`.
    pub kappa: VRep,
    pub intermediate_vertex_count: usize,
    pub intermediate_dimension: usize,
    /// Hull vertices over `(p_F, C_S, p_−)`.
    pub projected: VRep,
    pub hrep: HRep,
    pub target: Constraint,
    pub facet_present: bool,
}

/// `p_F(p̃ − p_d) − p_− − (M/q_*)·C_S + p_d + M/q_* ≥ 0` with
/// `M = max(p̃ − p_d, 1 − p̃)`, over `(p_F, C_S, p_−)`.
pub fn lemma2_target(params: &ScenarioParams) -> Constraint {
    let gap = &params.p_tilde - &params.p_d;
    let m = gap.clone().max(Rational::one() - &params.p_tilde);
    let w = m / &params.q_star;
    row(vec![gap, -w.clone(), -Rational::one()], &params.p_d + w)
}

/// Builds the ℝ^(3k+3) polytope over `(p₂(κ′), p₃(κ′), p₄(κ′), p_F, C_S, p_−)`.
pub fn lemma2_intermediate(params: &ScenarioParams, kappa: &VRep) -> Result<HRep> {
    if params.q_star >= Rational::one() {
        return Err(invalid("q_star must be below 1 for the preparation pipeline"));
    }
    let k = kappa.len();
    let dim = 3 * k + 3;
    let (pf, cs, pm) = (3 * k, 3 * k + 1, 3 * k + 2);
    let z = || vec![Rational::zero(); dim];
    let q0 = &params.q_0;
    let q1 = Rational::one() - q0;

    let mut ineqs = Vec::new();
    for j in 0..3 * k {
        let mut c = z();
        c[j] = Rational::one();
        ineqs.push(row(c, Rational::zero()));
    }
    for i in 0..k {
        let mut c = z();
        c[i] = -params.q_star.clone();
        c[k + i] = q0.clone();
        c[2 * k + i] = q1.clone();
        ineqs.push(row(c, Rational::zero()));
    }

    let mut eqs = Vec::new();
    for block in 0..3 {
        let mut c = z();
        for i in 0..k {
            c[block * k + i] = Rational::one();
        }
        eqs.push(row(c, -Rational::one()));
    }
    let mut f = z();
    let mut minus = z();
    let mut sharp = z();
    for (i, kv) in kappa.vertices.iter().enumerate() {
        f[i] = kv[0].clone();
        minus[i] = kv[1].clone();
        sharp[k + i] = q0 * (Rational::one() - &kv[0]);
        sharp[2 * k + i] = &q1 * &kv[0];
    }
    f[pf] = -Rational::one();
    minus[pm] = -Rational::one();
    sharp[cs] = -Rational::one();
    eqs.extend([row(f, Rational::zero()), row(minus, Rational::zero()), row(sharp, Rational::zero())]);
    HRep::new(dim, ineqs, eqs)
}

pub fn lemma2_pipeline(params: &ScenarioParams) -> Result<Lemma2Result> {
    let (_, v) = assignment_polytope(params)?;
    let (_, kappa) = hull_vertices(&v.project(&[0, 4])?)?;
    let inter = lemma2_intermediate(params, &kappa)?;
    let iv = hrep_to_vrep(&inter)?;
    let k = kappa.len();
    let intermediate_dimension = iv.affine_dimension().unwrap_or(0);
    let (hrep, projected) = hull_vertices(&iv.project(&[3 * k, 3 * k + 1, 3 * k + 2])?)?;
    let target = lemma2_target(params);
    let facet_present = facet_contains(&hrep, &target)?;
    Ok(Lemma2Result {
        params: params.clone(),
        assignment_vertex_count: v.len(),
        kappa,
        intermediate_vertex_count: iv.len(),
        intermediate_dimension,
        projected,
        hrep,
        target,
        facet_present,
    })
}

/// Largest `p_−` with `(p_F, C_S, p_−)` inside a polytope over those three
/// coordinates, or `None` when no `p_−` fits.
pub fn max_p_minus(h: &HRep, p_f: &Rational, c_s: &Rational) -> Result<Option<Rational>> {
    if h.dim != 3 {
        return Err(crate::error::Error::DimensionMismatch(h.dim, 3));
    }
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    let mut tighten = |c: &Constraint, equality: bool| -> bool {
        let rest = &c.coeffs[0] * p_f + &c.coeffs[1] * c_s + &c.constant;
        let a = &c.coeffs[2];
        if a.is_zero() {
            return if equality { rest.is_zero() } else { !rest.is_negative() };
        }
        let x = -rest / a;
        if equality || a.is_negative() {
            hi = Some(hi.take().map_or(x.clone(), |h| h.min(x.clone())));
        }
        if equality || a.is_positive() {
            lo = Some(lo.take().map_or(x.clone(), |l| l.max(x)));
        }
        true
    };
    for c in &h.inequalities {
        if !tighten(c, false) {
            return Ok(None);
        }
    }
    for c in &h.equalities {
        if !tighten(c, true) {
            return Ok(None);
        }
    }
    match (lo, hi) {
        (_, None) => Err(crate::error::Error::Unbounded),
        (Some(l), Some(h)) if l > h => Ok(None),
        (_, Some(h)) => Ok(Some(h)),
    }
}

/// `(p_d, p̃, q_0, q_*)` from integers over a shared denominator; handy in
/// tests and examples.
pub fn params_from_fractions(p: [(i64, i64); 4]) -> Result<ScenarioParams> {
    let r = |(n, d): (i64, i64)| int(n) / int(d);
    ScenarioParams::new(r(p[0]), r(p[1]), r(p[2]), r(p[3]))
}
