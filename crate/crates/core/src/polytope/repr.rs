//! H- and V-representations over the rationals.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::linalg::{affine_dimension, dot, reduce_modulo, rref};
use super::rational::{format_rational, primitive_integer, serde_rational, serde_rational_matrix, serde_rational_vec, Rational};
use crate::error::{invalid, Error, Result};

/// `coeffs·x + constant ≥ 0` (or `= 0` when used as an equality).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Constraint {
    #[serde(with = "serde_rational_vec")]
    pub coeffs: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub constant: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, constant: Rational) -> Self {
        Self { coeffs, constant }
    }

    pub fn from_ints(coeffs: &[i64], constant: i64) -> Self {
        Self {
            coeffs: coeffs.iter().map(|&c| Rational::from_integer(BigInt::from(c))).collect(),
            constant: Rational::from_integer(BigInt::from(constant)),
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn value(&self, x: &[Rational]) -> Rational {
        dot(&self.coeffs, x) + &self.constant
    }

    /// `(constant, coeffs...)`
    pub(crate) fn homogeneous(&self) -> Vec<Rational> {
        std::iter::once(self.constant.clone()).chain(self.coeffs.iter().cloned()).collect()
    }

    pub(crate) fn from_homogeneous(v: &[Rational]) -> Self {
        Self {
            constant: v[0].clone(),
            coeffs: v[1..].to_vec(),
        }
    }

    fn scaled_primitive(&self) -> Self {
        let ints = primitive_integer(&self.homogeneous());
        let v: Vec<Rational> = ints.into_iter().map(Rational::from_integer).collect();
        Self::from_homogeneous(&v)
    }

    /// Coprime integer coefficients, positive scaling only.
    pub fn canonical_inequality(&self) -> Self {
        self.scaled_primitive()
    }

    /// Coprime integers with the first nonzero entry of `(coeffs, constant)`
    /// positive.
    pub fn canonical_equality(&self) -> Self {
        let c = self.scaled_primitive();
        let first = c.coeffs.iter().chain(std::iter::once(&c.constant)).find(|x| !x.is_zero());
        match first {
            Some(x) if x.is_negative() => Self {
                coeffs: c.coeffs.iter().map(|v| -v).collect(),
                constant: -c.constant,
            },
            _ => c,
        }
    }

    pub fn is_zero_vector(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl Constraint {
    /// Human-readable left-hand side, e.g. `x1 - 4*x2 + 5`.
    pub fn render(&self, names: &[String]) -> String {
        fn magnitude(m: &Rational) -> String {
            if m.is_integer() {
                m.numer().to_string()
            } else {
                format!("({})", format_rational(m))
            }
        }
        let mut out = String::new();
        let one = Rational::from_integer(BigInt::from(1));
        let push = |out: &mut String, neg: bool, body: String| {
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        };
        for (c, name) in self.coeffs.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            let m = c.abs();
            let body = if m == one { name.clone() } else { format!("{}*{name}", magnitude(&m)) };
            push(&mut out, c.is_negative(), body);
        }
        if !self.constant.is_zero() {
            push(&mut out, self.constant.is_negative(), magnitude(&self.constant.abs()));
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.dim()).map(|i| format!("x{i}")).collect();
        f.write_str(&self.render(&names))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HRep {
    pub dim: usize,
    pub inequalities: Vec<Constraint>,
    pub equalities: Vec<Constraint>,
}

impl HRep {
    pub fn new(dim: usize, inequalities: Vec<Constraint>, equalities: Vec<Constraint>) -> Result<Self> {
        for c in inequalities.iter().chain(&equalities) {
            if c.dim() != dim {
                return Err(Error::DimensionMismatch(c.dim(), dim));
            }
        }
        Ok(Self {
            dim,
            inequalities,
            equalities,
        })
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.inequalities.iter().all(|c| !c.value(x).is_negative())
            && self.equalities.iter().all(|c| c.value(x).is_zero())
    }

    /// Indices of the inequalities tight at `x`.
    pub fn tight_set(&self, x: &[Rational]) -> Vec<usize> {
        self.inequalities
            .iter()
            .enumerate()
            .filter(|(_, c)| c.value(x).is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    /// Sorted canonical forms, for order-independent comparison.
    pub fn canonical(&self) -> Self {
        let mut ineq: Vec<Constraint> = self.inequalities.iter().map(Constraint::canonical_inequality).collect();
        ineq.sort();
        ineq.dedup();
        let mut eq: Vec<Constraint> = self.equalities.iter().map(Constraint::canonical_equality).collect();
        eq.sort();
        eq.dedup();
        Self {
            dim: self.dim,
            inequalities: ineq,
            equalities: eq,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VRep {
    pub dim: usize,
    #[serde(with = "serde_rational_matrix")]
    pub vertices: Vec<Vec<Rational>>,
}

impl VRep {
    /// Sorts and removes duplicate points.
    pub fn new(dim: usize, mut vertices: Vec<Vec<Rational>>) -> Result<Self> {
        for v in &vertices {
            if v.len() != dim {
                return Err(Error::DimensionMismatch(v.len(), dim));
            }
        }
        vertices.sort();
        vertices.dedup();
        Ok(Self { dim, vertices })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Affine dimension of the hull; `None` when empty.
    pub fn affine_dimension(&self) -> Option<usize> {
        affine_dimension(&self.vertices)
    }

    /// Keeps only the given coordinates, then deduplicates.
    pub fn project(&self, coords: &[usize]) -> Result<Self> {
        if let Some(&bad) = coords.iter().find(|&&c| c >= self.dim) {
            return Err(invalid(format!("coordinate {bad} out of range for dimension {}", self.dim)));
        }
        let pts = self
            .vertices
            .iter()
            .map(|v| coords.iter().map(|&c| v[c].clone()).collect())
            .collect();
        Self::new(coords.len(), pts)
    }
}

/// True iff some inequality of `h` equals `target` up to positive scaling,
/// after reducing both modulo the span of the equalities.
pub fn facet_contains(h: &HRep, target: &Constraint) -> Result<bool> {
    if target.dim() != h.dim {
        return Err(Error::DimensionMismatch(target.dim(), h.dim));
    }
    if target.is_zero_vector() {
        return Err(invalid("target facet has an all-zero coefficient vector"));
    }
    let eqs: Vec<Vec<Rational>> = h.equalities.iter().map(Constraint::homogeneous).collect();
    let (r, p) = rref(&eqs, h.dim + 1);
    let norm = |c: &Constraint| {
        let reduced = reduce_modulo(&c.homogeneous(), &r, &p);
        primitive_integer(&reduced)
    };
    let t = norm(target);
    if t.iter().all(|x| x.is_zero()) {
        return Ok(false);
    }
    Ok(h.inequalities.iter().any(|f| norm(f) == t))
}
