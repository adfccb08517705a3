//! Circulant matrices, their Fourier diagonalization, the cyclic-averaging
//! channel, and circulantization of pure tuples.
//!
//! Conventions: `P` is the cyclic shift with `P[i][(i+1) mod n] = 1`, so that
//! `C(z) = sum_k z_k P^k` has entries `C[i][j] = z_{(j-i) mod n}` and the Fourier
//! vector `f_j[m] = omega^{jm}/sqrt(n)` satisfies `C(z) f_j = lambda_j f_j` with
//! `lambda_j = sum_k z_k omega^{jk}`. A Gram-compatible spec has its
//! superdiagonal equal to `z_1`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::invariants::bargmann;
use crate::linalg::{factor_gram, gram_matrix, ComplexMatrix, GramMatrix, StateTuple, UnitVector};
use crate::tolerance::PSD_FLOOR;

const CHANNEL_ROUTE_TOL: f64 = 1e-12;
const DEGENERATE_OVERLAP: f64 = 1e-12;

/// `omega_n^k = e^{2 pi i k / n}`.
pub fn root_of_unity(n: usize, k: i64) -> Complex64 {
    let k = k.rem_euclid(n as i64);
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
}

/// Coefficient vector `z` of `C(z) = sum_k z_k P^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantSpec {
    coefficients: Vec<Complex64>,
}

impl CirculantSpec {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidDimension("circulant order must be at least 1".into()));
        }
        Ok(Self { coefficients })
    }

    /// First row of a circulant matrix.
    pub fn from_matrix(m: &ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidInput("circulant matrix must be square".into()));
        }
        Self::new(m.row(0).to_vec())
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }
}

/// Orthonormal Fourier basis `f_0, ..., f_{n-1}`.
#[derive(Debug, Clone)]
pub struct FourierBasis {
    vectors: Vec<UnitVector>,
}

impl FourierBasis {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension("Fourier basis order must be at least 1".into()));
        }
        let s = 1.0 / (n as f64).sqrt();
        let vectors = (0..n)
            .map(|k| {
                let amps = (0..n).map(|j| root_of_unity(n, (j * k) as i64) * s).collect();
                UnitVector::normalized(amps)
            })
            .collect::<Result<_>>()?;
        Ok(Self { vectors })
    }

    pub fn order(&self) -> usize {
        self.vectors.len()
    }

    pub fn vector(&self, k: usize) -> &UnitVector {
        &self.vectors[k]
    }

    pub fn projector(&self, k: usize) -> ComplexMatrix {
        self.vectors[k].projector()
    }
}

/// The cyclic shift `P` with `P[i][(i+1) mod n] = 1`.
pub fn cyclic_shift(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        if j == (i + 1) % n {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `C(z)`.
pub fn circulant_matrix(spec: &CirculantSpec) -> ComplexMatrix {
    let n = spec.order();
    ComplexMatrix::from_fn(n, n, |i, j| spec.coefficients[(j + n - i) % n])
}

/// `lambda_j = sum_k z_k omega^{jk}`, by direct summation, for `j = 0..n`.
pub fn circulant_eigenvalues(spec: &CirculantSpec) -> Vec<Complex64> {
    let n = spec.order();
    (0..n)
        .map(|j| {
            spec.coefficients
                .iter()
                .enumerate()
                .map(|(k, z)| z * root_of_unity(n, (j * k) as i64))
                .sum()
        })
        .collect()
}

/// Why a spec fails to describe a Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum GramRejection {
    /// `z_0` differs from 1.
    DiagonalNotOne(Complex64),
    /// `conj(z_k) != z_{n-k}` for this `k`.
    NotConjugateSymmetric(usize),
    /// `lambda_j` is below `-tol`.
    NegativeEigenvalue { j: usize, value: f64 },
}

/// Outcome of [`is_circulant_gram`].
#[derive(Debug, Clone, PartialEq)]
pub struct GramCheck {
    pub is_gram: bool,
    pub reason: Option<GramRejection>,
}

/// Whether `C(z)` is the Gram matrix of some unit vectors: `z_0 = 1`,
/// `conj(z_k) = z_{n-k}`, and every eigenvalue at least `-tol`.
pub fn is_circulant_gram(spec: &CirculantSpec, tol: f64) -> GramCheck {
    let z = &spec.coefficients;
    let n = z.len();
    let reject = |r| GramCheck {
        is_gram: false,
        reason: Some(r),
    };
    if (z[0] - Complex64::new(1.0, 0.0)).norm() > tol {
        return reject(GramRejection::DiagonalNotOne(z[0]));
    }
    for k in 1..n {
        if (z[k].conj() - z[n - k]).norm() > tol {
            return reject(GramRejection::NotConjugateSymmetric(k));
        }
    }
    for (j, lambda) in circulant_eigenvalues(spec).into_iter().enumerate() {
        if lambda.re < -tol {
            return reject(GramRejection::NegativeEigenvalue { j, value: lambda.re });
        }
    }
    GramCheck {
        is_gram: true,
        reason: None,
    }
}

/// Cyclic average `(1/n) sum_k P^k X P^{-k}`.
fn shift_average(x: &ComplexMatrix) -> ComplexMatrix {
    let n = x.rows();
    ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|k| x[((i + k) % n, (j + k) % n)]).sum::<Complex64>() / n as f64
    })
}

/// Fourier pinching `sum_k |f_k><f_k| X |f_k><f_k|`.
fn fourier_pinching(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = x.rows();
    let basis = FourierBasis::new(n)?;
    let mut out = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let f = basis.vector(k).amplitudes();
        let weight = crate::linalg::inner(f, &x.apply(f));
        out = out.add(&basis.projector(k).scale(weight));
    }
    Ok(out)
}

/// The circulant channel applied to a square matrix.
///
/// Both the shift-average and the Fourier-pinching forms are evaluated; they
/// must agree to 1e-12 and the shift-average result is returned.
pub fn circulant_channel_apply(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !x.is_square() {
        return Err(Error::InvalidInput(format!(
            "channel input must be square, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    let averaged = shift_average(x);
    let pinched = fourier_pinching(x)?;
    let gap = averaged.max_abs_diff(&pinched);
    if gap > CHANNEL_ROUTE_TOL * x.max_abs().max(1.0) {
        return Err(Error::CrossCheck(format!(
            "shift average and Fourier pinching differ by {gap:e}"
        )));
    }
    Ok(averaged)
}

/// Choi matrix `(1/n) sum_k |f_k><f_k| (x) conj(|f_k><f_k|)` of the channel.
pub fn channel_choi(n: usize) -> Result<ComplexMatrix> {
    let basis = FourierBasis::new(n)?;
    let mut j = ComplexMatrix::zeros(n * n, n * n);
    for k in 0..n {
        let p = basis.projector(k);
        j = j.add(&p.kron(&p.conj()));
    }
    Ok(j.scale(Complex64::new(1.0 / n as f64, 0.0)))
}

/// Result of [`circulantize`].
#[derive(Debug, Clone)]
pub struct Circulantization {
    /// Circulant Gram matrix of the new tuple.
    pub gram: GramMatrix,
    /// Gauge phases `alpha_k` (with `alpha_1 = 0`) equalizing the overlap phases.
    pub phases: Vec<f64>,
    /// Unit vectors realizing `gram`, living in `C^rank`.
    pub tuple: StateTuple,
    pub rank: usize,
    /// Common superdiagonal value `(mean r_k) e^{i theta / n}`.
    pub overlap: Complex64,
    pub invariant_before: Complex64,
    pub invariant_after: Complex64,
}

/// Replaces a pure tuple by one whose Gram matrix is circulant, with equal
/// consecutive overlaps, the same invariant phase and no smaller modulus.
///
/// The tuple is first gauge-fixed so all consecutive overlaps share the phase
/// `theta / n` (`theta = arg Delta` in `[0, 2 pi)`), then the Gram matrix is
/// averaged over cyclic shifts.
pub fn circulantize(tuple: &StateTuple) -> Result<Circulantization> {
    let gram = gram_matrix(tuple)?;
    let n = gram.order();
    let overlaps: Vec<Complex64> = (0..n).map(|k| gram.get(k, (k + 1) % n)).collect();
    if let Some(k) = overlaps.iter().position(|z| z.norm() <= DEGENERATE_OVERLAP) {
        return Err(Error::DegenerateCycle(k, (k + 1) % n));
    }
    let delta: Complex64 = overlaps.iter().product();
    if delta.norm() <= DEGENERATE_OVERLAP {
        return Err(Error::ZeroInvariant);
    }
    let theta = delta.arg().rem_euclid(2.0 * PI);
    let step = theta / n as f64;

    let mut phases = vec![0.0; n];
    let mut acc = 0.0;
    for j in 1..n {
        acc += overlaps[j - 1].arg();
        phases[j] = j as f64 * step - acc;
    }
    let gauged = gram.gauge_transformed(&phases);
    let averaged = circulant_channel_apply(gauged.matrix())?;
    let circ = GramMatrix::new(averaged.hermitian_part())?;
    let realized = factor_gram(&circ, PSD_FLOOR)?;
    let overlap = circ.get(0, 1 % n);
    let invariant_after = bargmann(&realized)?.value;
    Ok(Circulantization {
        rank: realized.dim(),
        gram: circ,
        phases,
        tuple: realized,
        overlap,
        invariant_before: delta,
        invariant_after,
    })
}
