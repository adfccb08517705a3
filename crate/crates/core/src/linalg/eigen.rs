//! Cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies an ordinary real Jacobi rotation. Spectra come out real
//! by construction.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Product of eigenvalues.
    pub fn determinant(&self) -> f64 {
        self.values.iter().product()
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Diagonalizes the Hermitian part of `a`.
///
/// Panics if `a` is not square.
pub fn eigh(a: &ComplexMatrix) -> HermitianEigen {
    assert!(a.is_square(), "eigh needs a square matrix");
    let n = a.rows();
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.max_abs().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&m) <= 1e-16 * scale {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let b = m[(p, q)];
                let g = b.norm();
                if g <= 1e-300 || g <= 1e-18 * scale {
                    continue;
                }
                rotated = true;
                let phase = b / g;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // W = diag(1, conj(phase)) * [[c, s], [-s, c]]
                let w00 = Complex64::new(c, 0.0);
                let w01 = Complex64::new(s, 0.0);
                let w10 = -phase.conj() * s;
                let w11 = phase.conj() * c;
                // M <- M W
                for i in 0..n {
                    let mp = m[(i, p)];
                    let mq = m[(i, q)];
                    m[(i, p)] = mp * w00 + mq * w10;
                    m[(i, q)] = mp * w01 + mq * w11;
                }
                // M <- W^dagger M
                for j in 0..n {
                    let mp = m[(p, j)];
                    let mq = m[(q, j)];
                    m[(p, j)] = w00.conj() * mp + w10.conj() * mq;
                    m[(q, j)] = w01.conj() * mp + w11.conj() * mq;
                }
                m[(p, q)] = Complex64::new(0.0, 0.0);
                m[(q, p)] = Complex64::new(0.0, 0.0);
                m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp * w00 + vq * w10;
                    v[(i, q)] = vp * w01 + vq * w11;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    HermitianEigen { values, vectors }
}

/// Determinant of a Hermitian matrix as the product of its eigenvalues.
pub fn hermitian_determinant(a: &ComplexMatrix) -> f64 {
    eigh(a).determinant()
}
