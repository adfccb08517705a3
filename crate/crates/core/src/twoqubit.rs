//! Qubit tuples in the Bloch picture, and two-qubit local-unitary invariants.
//!
//! With `rho = (1 + r.sigma)/2`, a product of `n` qubit states is
//! `2^{-n}(p0 + p.sigma)`, and `p0`, `p` obey a short recurrence. Two-qubit
//! states `rho_AB` are studied through traces of words in
//! `X0 = rho_AB`, `X1 = rho_A (x) 1`, `X2 = 1 (x) rho_B`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::invariants::{bargmann, trace_of_product};
use crate::linalg::{eigh, partial_trace, partial_transpose, ComplexMatrix, DensityMatrix, StateTuple, Subsystem};
use crate::tolerance::BOUNDARY_TOL;

const BLOCH_NORM_TOL: f64 = 1e-12;
const RECURRENCE_AGREEMENT: f64 = 1e-10;
const LU_REAL_RESIDUE: f64 = 1e-10;
/// Componentwise agreement for [`lu_similar`].
pub const LU_TOL: f64 = 1e-8;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pauli matrices `sigma_x, sigma_y, sigma_z`.
pub fn pauli() -> [ComplexMatrix; 3] {
    let z = c(0., 0.);
    let m = |a, b, cc, d| ComplexMatrix::from_row_major(2, 2, vec![a, b, cc, d]).expect("2x2");
    [
        m(z, c(1., 0.), c(1., 0.), z),
        m(z, c(0., -1.), c(0., 1.), z),
        m(c(1., 0.), z, z, c(-1., 0.)),
    ]
}

/// Real Bloch vector of a qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    r: [f64; 3],
}

impl BlochVector {
    pub fn new(r: [f64; 3]) -> Result<Self> {
        let len = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !len.is_finite() || len > 1.0 + BLOCH_NORM_TOL {
            return Err(Error::InvalidParameter(format!("Bloch vector length {len} exceeds 1")));
        }
        Ok(Self { r })
    }

    pub fn components(&self) -> [f64; 3] {
        self.r
    }

    pub fn norm(&self) -> f64 {
        self.r.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `(1 + r.sigma)/2`.
    pub fn density(&self) -> DensityMatrix {
        let s = pauli();
        let mut m = ComplexMatrix::identity(2);
        for k in 0..3 {
            m = m.add(&s[k].scale(c(self.r[k], 0.)));
        }
        DensityMatrix::new(m.scale(c(0.5, 0.))).expect("|r| <= 1 gives a state")
    }
}

/// `r_k = Tr(rho sigma_k)`.
pub fn bloch_decompose(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::NotAQubit(rho.dim()));
    }
    let s = pauli();
    let r = [0, 1, 2].map(|k| trace_of_product(&[rho.matrix(), &s[k]]).re);
    BlochVector::new(r)
}

fn tuple_bloch(tuple: &StateTuple) -> Result<Vec<BlochVector>> {
    if tuple.dim() != 2 {
        return Err(Error::NotAQubit(tuple.dim()));
    }
    tuple
        .densities()
        .into_iter()
        .map(|m| bloch_decompose(&DensityMatrix::new(m)?))
        .collect()
}

/// `rho_1 ... rho_n = 2^{-n}(p0 + p.sigma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductRep {
    pub n: usize,
    pub p0: Complex64,
    pub p: [Complex64; 3],
}

impl ProductRep {
    /// `2^{1-n} p0`.
    pub fn invariant(&self) -> Complex64 {
        self.p0 * 2f64.powi(1 - self.n as i32)
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let s = pauli();
        let mut m = ComplexMatrix::identity(2).scale(self.p0);
        for k in 0..3 {
            m = m.add(&s[k].scale(self.p[k]));
        }
        m.scale(c(2f64.powi(-(self.n as i32)), 0.))
    }
}

fn cross(a: [Complex64; 3], b: [f64; 3]) -> [Complex64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn recurrence(vectors: &[[f64; 3]]) -> ProductRep {
    let (first, rest) = vectors.split_first().expect("non-empty tuple");
    let mut p0 = c(1., 0.);
    let mut p = first.map(|x| c(x, 0.));
    for r in rest {
        let dot: Complex64 = (0..3).map(|k| p[k] * r[k]).sum();
        let x = cross(p, *r);
        let next = [0, 1, 2].map(|k| p0 * r[k] + p[k] + Complex64::i() * x[k]);
        p0 += dot;
        p = next;
    }
    ProductRep {
        n: vectors.len(),
        p0,
        p,
    }
}

/// Runs the Bloch recurrence and checks `2^{1-n} p0` against the dense invariant.
pub fn product_rep(tuple: &StateTuple) -> Result<ProductRep> {
    let vectors: Vec<[f64; 3]> = tuple_bloch(tuple)?.iter().map(|b| b.components()).collect();
    let rep = recurrence(&vectors);
    let dense = bargmann(tuple)?.value;
    let gap = (rep.invariant() - dense).norm();
    if gap > RECURRENCE_AGREEMENT {
        return Err(Error::CrossCheck(format!("Bloch recurrence differs from dense product by {gap:e}")));
    }
    Ok(rep)
}

/// `Delta_ij = Tr(rho_i rho_j)` for all pairs, diagonal included.
pub fn pair_invariants(tuple: &StateTuple) -> Vec<Vec<f64>> {
    let d = tuple.densities();
    let n = d.len();
    (0..n)
        .map(|i| (0..n).map(|j| trace_of_product(&[&d[i], &d[j]]).re).collect())
        .collect()
}

/// Bloch vectors, up to an orthogonal transformation, with Gram matrix `2 Delta_ij - 1`.
fn bloch_from_pairs(pairs: &[Vec<f64>]) -> Vec<[f64; 3]> {
    let n = pairs.len();
    let m = ComplexMatrix::from_fn(n, n, |i, j| c(2.0 * pairs[i][j] - 1.0, 0.));
    let e = eigh(&m);
    let mut out = vec![[0.0; 3]; n];
    for (slot, k) in (0..n).rev().take(3).enumerate() {
        let lam = e.values[k].max(0.0);
        // eigenvectors of a real symmetric matrix are real up to one phase
        let pivot = (0..n)
            .max_by(|&a, &b| e.vectors[(a, k)].norm().total_cmp(&e.vectors[(b, k)].norm()))
            .expect("n >= 1");
        let z = e.vectors[(pivot, k)];
        let unphase = if z.norm() > 0.0 { z.conj() / z.norm() } else { c(1., 0.) };
        for (i, row) in out.iter_mut().enumerate() {
            row[slot] = (e.vectors[(i, k)] * unphase).re * lam.sqrt();
        }
    }
    out
}

/// Coefficients of `z^2 - 2 p z + q = 0`, solved by the invariant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImaginarityQuadratic {
    pub n: usize,
    /// `Re Delta_n` from the Bloch recurrence.
    pub p: f64,
    /// `|Delta_n|^2` from the Bloch recurrence.
    pub q: f64,
    /// Same coefficients, from the second-order invariants alone.
    pub p_from_pairs: f64,
    pub q_from_pairs: f64,
    /// Largest `|Delta_n^2 - 2 p Delta_n + q|` over both coefficient sets.
    pub residual: f64,
    /// `|Im Delta_n| = sqrt(q - p^2)`; the sign is not determined.
    pub imag_abs: f64,
}

pub fn imaginarity_quadratic(tuple: &StateTuple) -> Result<ImaginarityQuadratic> {
    let rep = product_rep(tuple)?;
    let n = rep.n;
    let scale = 2f64.powi(1 - n as i32);
    let (p, q) = (scale * rep.p0.re, scale * scale * rep.p0.norm_sqr());
    let from_pairs = recurrence(&bloch_from_pairs(&pair_invariants(tuple)));
    let (pb, qb) = (scale * from_pairs.p0.re, scale * scale * from_pairs.p0.norm_sqr());
    let z = bargmann(tuple)?.value;
    let residual = (z * z - z * (2.0 * p) + q)
        .norm()
        .max((z * z - z * (2.0 * pb) + qb).norm());
    Ok(ImaginarityQuadratic {
        n,
        p,
        q,
        p_from_pairs: pb,
        q_from_pairs: qb,
        residual,
        imag_abs: (q - p * p).max(0.0).sqrt(),
    })
}

/// `(a0, b0^2)` for `n = 3, 4` written in second-order invariants.
pub fn closed_form_coefficients(tuple: &StateTuple) -> Result<(f64, f64)> {
    if tuple.dim() != 2 {
        return Err(Error::NotAQubit(tuple.dim()));
    }
    let d = pair_invariants(tuple);
    match tuple.len() {
        3 => {
            let a0 = 2.0 * (d[0][1] + d[0][2] + d[1][2] - 1.0);
            let m = ComplexMatrix::from_fn(3, 3, |i, j| c(2.0 * d[i][j] - 1.0, 0.));
            Ok((a0, det3(&m)))
        }
        4 => {
            let a0 = 4.0 * (d[0][1] * d[2][3] + d[0][3] * d[1][2] - d[0][2] * d[1][3] + d[0][2] + d[1][3] - 1.0);
            // Gram matrix of r1 + r2, r2 + r3, r3 + r4, halved
            let s = |i: usize, j: usize, k: usize, l: usize| d[i][k] + d[i][l] + d[j][k] + d[j][l] - 2.0;
            let pairs = [(0, 1), (1, 2), (2, 3)];
            let m = ComplexMatrix::from_fn(3, 3, |a, b| {
                let ((i, j), (k, l)) = (pairs[a], pairs[b]);
                c(s(i, j, k, l), 0.)
            });
            Ok((a0, 8.0 * det3(&m)))
        }
        n => Err(Error::UnsupportedOrder(n)),
    }
}

fn det3(m: &ComplexMatrix) -> f64 {
    let a = |i, j| m[(i, j)].re;
    a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
        + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
}

/// Complex conjugate of every member: reflects all Bloch vectors through the
/// x-z plane, keeping every `Delta_ij` and conjugating `Delta_n`.
pub fn reflected_tuple(tuple: &StateTuple) -> Result<StateTuple> {
    let mats = tuple
        .densities()
        .into_iter()
        .map(|m| DensityMatrix::new(m.conj()))
        .collect::<Result<Vec<_>>>()?;
    StateTuple::from_mixed(mats)
}

/// Words over `X0, X1, X2` defining `B_1 ... B_18`.
pub const LU_WORDS: [&[usize]; 18] = [
    &[0, 1],
    &[0, 2],
    &[0, 1, 2],
    &[0, 0],
    &[0, 0, 1, 2],
    &[0, 0, 0],
    &[0, 0, 0, 1],
    &[0, 0, 0, 2],
    &[0, 0, 0, 1, 2],
    &[0, 0, 0, 0],
    &[0, 0, 1, 0, 0, 1],
    &[0, 0, 2, 0, 0, 2],
    &[0, 1, 2, 0, 0, 1],
    &[0, 1, 2, 0, 0, 2],
    &[0, 1, 2, 0, 0, 0, 1],
    &[0, 1, 2, 0, 0, 0, 2],
    &[0, 1, 0, 0, 1, 0, 0, 0, 1],
    &[0, 2, 0, 0, 2, 0, 0, 0, 2],
];

/// Number of leading invariants that are real for every state.
pub const LU_REAL_COUNT: usize = 12;

/// The 18 local-unitary invariants `B_1 ... B_18` (stored zero-based).
///
/// `B_1 ... B_12` are real. `B_13 ... B_18` are traces of words that are not
/// their own reversals and are kept complex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LuInvariantVector {
    pub values: [Complex64; 18],
}

impl LuInvariantVector {
    /// `B_k` for `k` in `1..=18`, real part.
    pub fn b(&self, k: usize) -> f64 {
        self.values[k - 1].re
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::NotTwoQubit(rho.dim()));
    }
    Ok(())
}

pub fn lu_invariants(rho: &DensityMatrix) -> Result<LuInvariantVector> {
    check_two_qubit(rho)?;
    let id = ComplexMatrix::identity(2);
    let x1 = partial_trace(rho, Subsystem::A, 2, 2)?.matrix().kron(&id);
    let x2 = id.kron(partial_trace(rho, Subsystem::B, 2, 2)?.matrix());
    let xs = [rho.matrix(), &x1, &x2];
    let mut values = [c(0., 0.); 18];
    for (k, word) in LU_WORDS.iter().enumerate() {
        let factors: Vec<&ComplexMatrix> = word.iter().map(|&w| xs[w]).collect();
        values[k] = trace_of_product(&factors);
        if k < LU_REAL_COUNT && values[k].im.abs() > LU_REAL_RESIDUE {
            return Err(Error::CrossCheck(format!(
                "B_{} has imaginary part {:e}",
                k + 1,
                values[k].im
            )));
        }
    }
    Ok(LuInvariantVector { values })
}

/// Classification against the open boundary `lhs < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntanglementStatus {
    Entangled,
    Separable,
    BoundaryIndeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementVerdict {
    pub lhs: f64,
    /// `lhs < 1 - tol`.
    pub entangled: bool,
    pub status: EntanglementStatus,
}

/// `6(B1 + B2 - B1 B2 - B4 - B10) + 12(B5 - B3) + 3 B4^2 + 4 B6`.
pub fn entanglement_lhs(b: &LuInvariantVector) -> f64 {
    let (b1, b2, b3, b4, b5, b6, b10) = (b.b(1), b.b(2), b.b(3), b.b(4), b.b(5), b.b(6), b.b(10));
    6.0 * (b1 + b2 - b1 * b2 - b4 - b10) + 12.0 * (b5 - b3) + 3.0 * b4 * b4 + 4.0 * b6
}

pub fn entangled_by_invariants(rho: &DensityMatrix, tol: f64) -> Result<EntanglementVerdict> {
    let lhs = entanglement_lhs(&lu_invariants(rho)?);
    let status = if lhs < 1.0 - tol {
        EntanglementStatus::Entangled
    } else if lhs > 1.0 + tol {
        EntanglementStatus::Separable
    } else {
        EntanglementStatus::BoundaryIndeterminate
    };
    Ok(EntanglementVerdict {
        lhs,
        entangled: status == EntanglementStatus::Entangled,
        status,
    })
}

pub fn entangled_by_invariants_default(rho: &DensityMatrix) -> Result<EntanglementVerdict> {
    entangled_by_invariants(rho, BOUNDARY_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptVerdict {
    pub det_gamma: f64,
    pub min_eigenvalue: f64,
    /// `det(rho^Gamma) < -tol`.
    pub entangled: bool,
}

/// Determinant of the partial transpose, from its eigenvalues.
pub fn ppt_oracle(rho: &DensityMatrix, tol: f64) -> Result<PptVerdict> {
    check_two_qubit(rho)?;
    let gamma = partial_transpose(rho.matrix(), Subsystem::B, 2, 2)?;
    let e = eigh(&gamma);
    let det_gamma = e.determinant();
    Ok(PptVerdict {
        det_gamma,
        min_eigenvalue: e.min_value(),
        entangled: det_gamma < -tol,
    })
}

/// Equality of all 18 invariants within [`LU_TOL`].
pub fn lu_similar(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<bool> {
    Ok(lu_invariants(rho)?.max_diff(&lu_invariants(sigma)?) <= LU_TOL)
}
