//! Double description method over the integers, plus the two
//! representation conversions built on it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::linalg::{dot, null_space, rank, rref, row_space};
use super::rational::{primitive_integer, Rational};
use super::repr::{Constraint, HRep, VRep};
use crate::error::{Error, Result};

#[derive(Clone)]
struct Ray {
    v: Vec<BigInt>,
    zeros: Vec<u64>,
}

fn bit_set(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn bit_and(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn bit_count(a: &[u64]) -> usize {
    a.iter().map(|x| x.count_ones() as usize).sum()
}

fn bit_members(a: &[u64]) -> impl Iterator<Item = usize> + '_ {
    a.iter()
        .enumerate()
        .flat_map(|(w, &x)| (0..64).filter(move |b| x >> b & 1 == 1).map(move |b| w * 64 + b))
}

fn int_dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn make_primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        v
    } else {
        v.into_iter().map(|x| x / &g).collect()
    }
}

fn to_rational(v: &[BigInt]) -> Vec<Rational> {
    v.iter().cloned().map(Rational::from_integer).collect()
}

/// Extreme rays of the pointed cone `{u ∈ ℝⁿ : rows·u ≥ 0}`. The rows must
/// have rank `n`. Rays come back as primitive integer vectors.
pub(crate) fn extreme_rays(rows: &[Vec<Rational>], n: usize) -> Result<Vec<Vec<Rational>>> {
    let rows: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| primitive_integer(r))
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let rat_rows: Vec<Vec<Rational>> = rows.iter().map(|r| to_rational(r)).collect();
    if n == 0 {
        return Ok(Vec::new());
    }
    if rank(&rat_rows, n) != n {
        return Err(Error::Invariant("cone is not pointed".into()));
    }

    // initial simplicial cone from a greedily chosen basis, in row order
    let mut basis: Vec<usize> = Vec::new();
    for i in 0..rows.len() {
        let mut trial: Vec<Vec<Rational>> = basis.iter().map(|&j| rat_rows[j].clone()).collect();
        trial.push(rat_rows[i].clone());
        if rank(&trial, n) == trial.len() {
            basis.push(i);
            if basis.len() == n {
                break;
            }
        }
    }
    let aug: Vec<Vec<Rational>> = basis
        .iter()
        .enumerate()
        .map(|(k, &j)| {
            let mut r = rat_rows[j].clone();
            r.extend((0..n).map(|c| Rational::from_integer(BigInt::from((c == k) as i64))));
            r
        })
        .collect();
    let (inv, _) = rref(&aug, n);
    let words = rows.len().div_ceil(64);
    let mut rays: Vec<Ray> = (0..n)
        .map(|k| {
            let col: Vec<Rational> = inv.iter().map(|r| r[n + k].clone()).collect();
            let mut zeros = vec![0u64; words];
            for (kk, &j) in basis.iter().enumerate() {
                if kk != k {
                    bit_set(&mut zeros, j);
                }
            }
            Ray {
                v: primitive_integer(&col),
                zeros,
            }
        })
        .collect();

    let mut processed: Vec<usize> = basis.clone();
    for i in 0..rows.len() {
        if basis.contains(&i) {
            continue;
        }
        let row = &rows[i];
        let vals: Vec<BigInt> = rays.iter().map(|r| int_dot(row, &r.v)).collect();
        let plus: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_positive()).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_negative()).collect();
        if minus.is_empty() {
            for (k, r) in rays.iter_mut().enumerate() {
                if vals[k].is_zero() {
                    bit_set(&mut r.zeros, i);
                }
            }
            processed.push(i);
            continue;
        }
        let mut fresh: Vec<Ray> = Vec::new();
        for &p in &plus {
            for &q in &minus {
                let common = bit_and(&rays[p].zeros, &rays[q].zeros);
                if bit_count(&common) + 2 < n {
                    continue;
                }
                let tight: Vec<Vec<Rational>> = bit_members(&common).map(|j| rat_rows[j].clone()).collect();
                if rank(&tight, n) != n - 2 {
                    continue;
                }
                let v: Vec<BigInt> = rays[q]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(a, b)| &vals[p] * a - &vals[q] * b)
                    .collect();
                let mut zeros = common;
                bit_set(&mut zeros, i);
                fresh.push(Ray {
                    v: make_primitive(v),
                    zeros,
                });
            }
        }
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + fresh.len());
        for (k, mut r) in rays.into_iter().enumerate() {
            if vals[k].is_zero() {
                bit_set(&mut r.zeros, i);
                next.push(r);
            } else if vals[k].is_positive() {
                next.push(r);
            }
        }
        next.extend(fresh);
        rays = next;
        processed.push(i);
    }
    debug_assert_eq!(processed.len(), rows.len());
    Ok(rays.iter().map(|r| to_rational(&r.v)).collect())
}

/// Vertices of a bounded polyhedron. An infeasible system gives an empty
/// V-representation; any recession direction is an error.
pub fn hrep_to_vrep(h: &HRep) -> Result<VRep> {
    let d = h.dim;
    let n = d + 1;
    let eqs: Vec<Vec<Rational>> = h.equalities.iter().map(Constraint::homogeneous).collect();
    let mut ineqs: Vec<Vec<Rational>> = h.inequalities.iter().map(Constraint::homogeneous).collect();
    let mut t_row = vec![Rational::zero(); n];
    t_row[0] = Rational::from_integer(BigInt::from(1));
    ineqs.push(t_row);

    let basis = null_space(&eqs, n);
    if basis.is_empty() {
        return VRep::new(d, Vec::new());
    }
    let k = basis.len();
    let b: Vec<Vec<Rational>> = ineqs
        .iter()
        .map(|a| basis.iter().map(|col| dot(a, col)).collect())
        .collect();
    let lineality = null_space(&b, k);
    let span = row_space(&b, k);
    if span.is_empty() {
        return VRep::new(d, Vec::new());
    }
    let c: Vec<Vec<Rational>> = b
        .iter()
        .map(|row| span.iter().map(|s| dot(row, s)).collect())
        .collect();
    let rays = extreme_rays(&c, span.len())?;

    let lift = |u: &[Rational]| -> Vec<Rational> {
        let z = super::linalg::combine(u, &span, k);
        super::linalg::combine(&z, &basis, n)
    };
    let ys: Vec<Vec<Rational>> = rays.iter().map(|u| lift(u)).collect();
    let feasible = ys.iter().any(|y| y[0].is_positive());
    if !feasible {
        return VRep::new(d, Vec::new());
    }
    if !lineality.is_empty() || ys.iter().any(|y| y[0].is_zero()) {
        return Err(Error::Unbounded);
    }
    let verts = ys
        .iter()
        .map(|y| y[1..].iter().map(|x| x / &y[0]).collect())
        .collect();
    VRep::new(d, verts)
}

/// Facets and affine-hull equalities of the convex hull of the vertices.
pub fn vrep_to_hrep(v: &VRep) -> Result<HRep> {
    let d = v.dim;
    let n = d + 1;
    if v.is_empty() {
        let c = Constraint::from_ints(&vec![0; d], -1);
        return HRep::new(d, vec![c], Vec::new());
    }
    let one = Rational::from_integer(BigInt::from(1));
    let pts: Vec<Vec<Rational>> = v
        .vertices
        .iter()
        .map(|p| std::iter::once(one.clone()).chain(p.iter().cloned()).collect())
        .collect();
    let equalities: Vec<Constraint> = null_space(&pts, n)
        .iter()
        .map(|w| Constraint::from_homogeneous(w).canonical_equality())
        .collect();
    let span = row_space(&pts, n);
    let c: Vec<Vec<Rational>> = pts
        .iter()
        .map(|p| span.iter().map(|s| dot(p, s)).collect())
        .collect();
    let rays = extreme_rays(&c, span.len())?;
    let mut inequalities = Vec::new();
    for u in &rays {
        let w = super::linalg::combine(u, &span, n);
        if pts.iter().any(|p| dot(p, &w).is_zero()) {
            inequalities.push(Constraint::from_homogeneous(&w));
        }
    }
    Ok(HRep::new(d, inequalities, equalities)?.canonical())
}
