//! Cyclic Jacobi diagonalization of Hermitian matrices and spectral
//! decompositions into eigenprojectors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{CMatrix, ZERO};
use super::operators::{Effect, HermitianOperator};
use crate::error::Result;

/// Default merge threshold for nearly equal eigenvalues.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 100;

/// Raw eigenpairs of a Hermitian matrix, eigenvalues ascending. Column `k` of
/// `vectors` belongs to `values[k]`.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigenpairs {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.vectors.dim()).map(|i| self.vectors[(i, k)]).collect()
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Diagonalizes a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Only the Hermitian part of `m` is used; callers validate hermiticity.
pub fn jacobi_eigen(m: &CMatrix) -> Eigenpairs {
    let n = m.dim();
    let mut a = m.clone();
    // symmetrize so rounding in the input does not leak into the iteration
    for i in 0..n {
        for j in 0..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            a[(i, j)] = avg;
        }
    }
    let mut v = CMatrix::identity(n);
    let scale = a.max_abs().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // Rotation acting on columns p and q:
                //   [ c            s          ]
                //   [ -s e^{-iφ}   c e^{-iφ}  ]
                let ph = phase.conj();
                let r_pp = Complex64::new(c, 0.0);
                let r_pq = Complex64::new(s, 0.0);
                let r_qp = ph * (-s);
                let r_qq = ph * c;

                // a <- a R
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * r_pp + aiq * r_qp;
                    a[(i, q)] = aip * r_pq + aiq * r_qq;
                }
                // a <- R^dagger a
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = r_pp.conj() * apj + r_qp.conj() * aqj;
                    a[(q, j)] = r_pq.conj() * apj + r_qq.conj() * aqj;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                // v <- v R
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * r_pp + viq * r_qp;
                    v[(i, q)] = vip * r_pq + viq * r_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, new_col)] = v[(row, old_col)];
        }
    }
    Eigenpairs { values, vectors }
}

/// Distinct eigenvalues with their eigenprojectors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub projectors: Vec<Effect>,
}

impl SpectralDecomposition {
    /// `Σ o_i E_i`
    pub fn reconstruct(&self) -> CMatrix {
        let dim = self.projectors[0].matrix().dim();
        self.eigenvalues
            .iter()
            .zip(&self.projectors)
            .fold(CMatrix::zeros(dim), |acc, (&o, p)| {
                &acc + &p.matrix().scale_real(o)
            })
    }
}

/// Spectral decomposition of `h`; eigenvalues closer than `degeneracy_tol`
/// (consecutive, after sorting) share one projector.
pub fn herm_eigendecomp(h: &HermitianOperator, degeneracy_tol: f64) -> Result<SpectralDecomposition> {
    let pairs = jacobi_eigen(h.matrix());
    let n = pairs.values.len();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in 0..n {
        match groups.last_mut() {
            Some(g) if (pairs.values[k] - pairs.values[*g.last().unwrap()]).abs() <= degeneracy_tol => {
                g.push(k)
            }
            _ => groups.push(vec![k]),
        }
    }
    let mut eigenvalues = Vec::with_capacity(groups.len());
    let mut projectors = Vec::with_capacity(groups.len());
    for g in groups {
        let mean = g.iter().map(|&k| pairs.values[k]).sum::<f64>() / g.len() as f64;
        let mut proj = CMatrix::zeros(n);
        for &k in &g {
            let v = pairs.vector(k);
            proj = &proj + &CMatrix::outer(&v, &v);
        }
        eigenvalues.push(mean);
        projectors.push(Effect::new(proj)?);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        projectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn herm(rows: Vec<Vec<Complex64>>) -> HermitianOperator {
        HermitianOperator::new(CMatrix::from_rows(rows).unwrap()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_has_single_projector() {
        let d = herm_eigendecomp(&HermitianOperator::identity(2), DEFAULT_DEGENERACY_TOL).unwrap();
        assert_eq!(d.eigenvalues.len(), 1);
        assert!((d.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!(d.projectors[0].matrix().max_abs_diff(&CMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn diagonal_matrix_is_already_decomposed() {
        let h = HermitianOperator::new(CMatrix::diag(&[0.0, 1.0])).unwrap();
        let d = herm_eigendecomp(&h, DEFAULT_DEGENERACY_TOL).unwrap();
        assert_eq!(d.eigenvalues, vec![0.0, 1.0]);
        assert!(d.projectors[0].matrix().max_abs_diff(&CMatrix::diag(&[1.0, 0.0])) < 1e-15);
        assert!(d.projectors[1].matrix().max_abs_diff(&CMatrix::diag(&[0.0, 1.0])) < 1e-15);
    }

    #[test]
    fn pauli_x_projectors_are_half_one_minus_plus_x() {
        let x = herm(vec![vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]]);
        let d = herm_eigendecomp(&x, DEFAULT_DEGENERACY_TOL).unwrap();
        assert!((d.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((d.eigenvalues[1] - 1.0).abs() < 1e-14);
        let one = CMatrix::identity(2);
        let minus = (&one - x.matrix()).scale_real(0.5);
        let plus = (&one + x.matrix()).scale_real(0.5);
        assert!(d.projectors[0].matrix().max_abs_diff(&minus) < 1e-14);
        assert!(d.projectors[1].matrix().max_abs_diff(&plus) < 1e-14);
        // oracle: X P_± = ±P_±
        let xp = x.matrix() * d.projectors[1].matrix();
        assert!(xp.max_abs_diff(d.projectors[1].matrix()) < 1e-14);
        let xm = x.matrix() * d.projectors[0].matrix();
        assert!(xm.max_abs_diff(&d.projectors[0].matrix().scale_real(-1.0)) < 1e-14);
    }

    #[test]
    fn complex_qutrit_reconstructs_with_orthogonal_projectors() {
        let h = herm(vec![
            vec![c(1.0, 0.0), c(0.3, -0.7), c(0.0, 0.2)],
            vec![c(0.3, 0.7), c(-0.5, 0.0), c(1.1, 0.4)],
            vec![c(0.0, -0.2), c(1.1, -0.4), c(2.0, 0.0)],
        ]);
        let d = herm_eigendecomp(&h, DEFAULT_DEGENERACY_TOL).unwrap();
        assert_eq!(d.eigenvalues.len(), 3);
        assert!(d.reconstruct().max_abs_diff(h.matrix()) < 1e-12);
        let total = d
            .projectors
            .iter()
            .fold(CMatrix::zeros(3), |acc, p| &acc + p.matrix());
        assert!(total.max_abs_diff(&CMatrix::identity(3)) < 1e-12);
        for (i, pi) in d.projectors.iter().enumerate() {
            for (j, pj) in d.projectors.iter().enumerate() {
                let prod = pi.matrix() * pj.matrix();
                let expected = if i == j { pi.matrix().clone() } else { CMatrix::zeros(3) };
                assert!(prod.max_abs_diff(&expected) < 1e-10);
            }
        }
    }

    #[test]
    fn degenerate_eigenvalues_are_merged() {
        let h = HermitianOperator::new(CMatrix::diag(&[2.0, 2.0 + 1e-12, -1.0])).unwrap();
        let d = herm_eigendecomp(&h, DEFAULT_DEGENERACY_TOL).unwrap();
        assert_eq!(d.eigenvalues.len(), 2);
        assert!((d.projectors[1].matrix().trace().re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = CMatrix::from_rows(vec![vec![c(0., 0.), c(1., 0.)], vec![c(0., 0.), c(0., 0.)]]).unwrap();
        assert!(matches!(HermitianOperator::new(m), Err(Error::InvalidInput(_))));
    }
}
