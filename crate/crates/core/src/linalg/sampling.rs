//! Random states and unitaries for tests and Monte-Carlo suites.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::{inner, ComplexMatrix};
use super::states::{DensityMatrix, UnitVector};
use crate::error::{Error, Result};

/// Standard complex Gaussian with `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed unit vector in `C^d`, drawn by normalizing i.i.d. complex Gaussians.
pub fn haar_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<UnitVector> {
    if d == 0 {
        return Err(Error::InvalidDimension("d must be at least 1".into()));
    }
    loop {
        let v: Vec<Complex64> = (0..d).map(|_| complex_gaussian(rng)).collect();
        // a zero draw has probability zero, but would make normalization fail
        if let Ok(u) = UnitVector::normalized(v) {
            return Ok(u);
        }
    }
}

/// `W W^dagger / Tr(W W^dagger)` for a `d x rank` complex Gaussian `W`.
pub fn random_density<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if d == 0 {
        return Err(Error::InvalidDimension("d must be at least 1".into()));
    }
    if rank == 0 || rank > d {
        return Err(Error::InvalidRank { rank, dim: d });
    }
    let w = ComplexMatrix::from_fn(d, rank, |_, _| complex_gaussian(rng));
    let ww = w.matmul(&w.adjoint()).hermitian_part();
    let tr = ww.trace().re;
    Ok(DensityMatrix::from_trusted(ww.scale(Complex64::new(1.0 / tr, 0.0))))
}

/// Haar-random unitary: Gram-Schmidt on the columns of a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::InvalidDimension("d must be at least 1".into()));
    }
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<Complex64> = (0..d).map(|_| complex_gaussian(rng)).collect();
        for _ in 0..2 {
            for q in &cols {
                let p = inner(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= p * qi;
                }
            }
        }
        let nrm = super::matrix::norm(&v);
        if nrm > 1e-8 {
            cols.push(v.into_iter().map(|z| z / nrm).collect());
        }
    }
    Ok(ComplexMatrix::from_fn(d, d, |i, j| cols[j][i]))
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    g.hermitian_part()
}
