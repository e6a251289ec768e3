//! Exact rational polyhedral computation and the tightness pipelines.

mod dd;
pub mod linalg;
mod pipelines;
pub mod rational;
mod repr;

pub use dd::{hrep_to_vrep, vrep_to_hrep};
pub use pipelines::{
    assignment_polytope, lemma1_pipeline, lemma1_target, lemma2_intermediate, lemma2_pipeline, lemma2_target,
    max_p_minus, params_from_fractions, Lemma1Result, Lemma2Result, ScenarioParams,
};
pub use rational::{format_rational, parse_rational, Rational};
pub use repr::{facet_contains, Constraint, HRep, VRep};
