//! Random instances shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use wvctx::qmath::{CMatrix, DensityState, Effect, HermitianOperator};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `cos t|0> + sin t|1>`
pub fn qubit_ket(t: f64) -> Vec<Complex64> {
    vec![c(t.cos()), c(t.sin())]
}

/// Gaussian entries via Box-Muller, then normalized.
pub fn random_ket(r: &mut ChaCha8Rng, d: usize, complex: bool) -> Vec<Complex64> {
    let mut normal = || {
        let u: f64 = r.gen_range(1e-12..1.0);
        let v: f64 = r.gen();
        (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
    };
    let v: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(normal(), if complex { normal() } else { 0.0 }))
        .collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Projector onto the span of `rank` random vectors.
pub fn random_projector(r: &mut ChaCha8Rng, d: usize, rank: usize, complex: bool) -> Effect {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    while basis.len() < rank {
        let mut v = random_ket(r, d, complex);
        for b in &basis {
            let k = dot(b, &v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= k * y;
            }
        }
        let n = dot(&v, &v).re.sqrt();
        if n > 1e-6 {
            basis.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    let mut m = CMatrix::zeros(d);
    for b in &basis {
        m = &m + &CMatrix::outer(b, b);
    }
    Effect::new(m).unwrap()
}

/// Mixture of up to `d` random pure states.
pub fn random_state(r: &mut ChaCha8Rng, d: usize, complex: bool) -> DensityState {
    let k = r.gen_range(1..=d);
    let w: Vec<f64> = (0..k).map(|_| r.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    let mut m = CMatrix::zeros(d);
    for wi in w {
        let v = random_ket(r, d, complex);
        m = &m + &CMatrix::outer(&v, &v).scale_real(wi / total);
    }
    DensityState::new(m).unwrap()
}

pub fn random_pure(r: &mut ChaCha8Rng, d: usize, complex: bool) -> DensityState {
    DensityState::pure(&random_ket(r, d, complex)).unwrap()
}

pub fn random_hermitian(r: &mut ChaCha8Rng, d: usize) -> HermitianOperator {
    let mut m = CMatrix::zeros(d);
    for i in 0..d {
        m[(i, i)] = c(r.gen_range(-3.0..3.0));
        for j in i + 1..d {
            let z = Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianOperator::new(m).unwrap()
}

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// States with `p_F = 1/5` and weak value `-1/2` for `E = |1><1|`.
pub struct Reference {
    pub rho: DensityState,
    pub e: Effect,
    pub pi: Effect,
}

pub fn reference() -> Reference {
    let d = (1.0 / 5f64.sqrt()).acos();
    let s = (2.0 / 5f64.sqrt()).acos();
    let (a, b) = ((s + d) / 2.0, (s - d) / 2.0);
    Reference {
        rho: DensityState::pure(&qubit_ket(a)).unwrap(),
        e: Effect::projector_onto(&[c(0.0), c(1.0)]).unwrap(),
        pi: Effect::projector_onto(&qubit_ket(b)).unwrap(),
    }
}
