use num_complex::Complex64;

use super::eigen::eigh;
use super::matrix::{inner, norm, ComplexMatrix};
use crate::error::{Error, Result};
use crate::tolerance::{DENSITY_EIGEN_FLOOR, HERMITICITY_TOL, NORMALIZATION_TOL};

/// Unit vector in `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector {
    amplitudes: Vec<Complex64>,
}

impl UnitVector {
    /// Accepts amplitudes whose squared norm is 1 within [`NORMALIZATION_TOL`].
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidDimension("d = 0".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite amplitude".into()));
        }
        let n2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (n2 - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotUnitNorm((n2 - 1.0).abs()));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidDimension("d = 0".into()));
        }
        let nrm = norm(&amplitudes);
        if !(nrm.is_finite() && nrm > 0.0) {
            return Err(Error::InvalidInput("cannot normalize a zero vector".into()));
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / nrm).collect(),
        })
    }

    /// Computational basis vector `|k>` in `C^d`.
    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if d == 0 || k >= d {
            return Err(Error::InvalidDimension(format!("basis vector {k} in C^{d}")));
        }
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        v[k] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &UnitVector) -> Complex64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    /// `e^{i phase} |self>`.
    pub fn with_phase(&self, phase: f64) -> Self {
        let p = Complex64::from_polar(1.0, phase);
        Self {
            amplitudes: self.amplitudes.iter().map(|z| z * p).collect(),
        }
    }

    /// `U |self>`; `u` must be unitary of matching size.
    pub fn transformed(&self, u: &ComplexMatrix) -> Self {
        Self {
            amplitudes: u.apply(&self.amplitudes),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|z| z.conj()).collect(),
        }
    }
}

/// Density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidInput(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let herm = matrix.hermiticity_defect();
        if herm > HERMITICITY_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidTrace((tr - 1.0).abs()));
        }
        let min = eigh(&matrix).min_value();
        if min < -DENSITY_EIGEN_FLOOR {
            return Err(Error::NotPsd(min));
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
        })
    }

    pub fn from_pure(psi: &UnitVector) -> Self {
        Self {
            matrix: psi.projector(),
        }
    }

    /// `I/d`.
    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(d).scale(Complex64::new(1.0 / d as f64, 0.0)),
        }
    }

    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }

    /// `U rho U^dagger`.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Self {
        Self {
            matrix: self.matrix.conjugate_by(u).hermitian_part(),
        }
    }

    /// `(1-p) rho + p I/d`.
    pub fn depolarized(&self, p: f64) -> Self {
        let d = self.dim();
        let mixed = ComplexMatrix::identity(d).scale(Complex64::new(p / d as f64, 0.0));
        Self {
            matrix: self.matrix.scale(Complex64::new(1.0 - p, 0.0)).add(&mixed),
        }
    }

    /// Entrywise complex conjugate (equivalently the transpose).
    pub fn conj(&self) -> Self {
        Self {
            matrix: self.matrix.conj(),
        }
    }
}

/// A tuple member; pure states keep their vector form.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(UnitVector),
    Mixed(DensityMatrix),
}

impl State {
    pub fn dim(&self) -> usize {
        match self {
            State::Pure(v) => v.dim(),
            State::Mixed(m) => m.dim(),
        }
    }

    /// Density-matrix view (projector for pure members).
    pub fn density(&self) -> ComplexMatrix {
        match self {
            State::Pure(v) => v.projector(),
            State::Mixed(m) => m.matrix().clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&UnitVector> {
        match self {
            State::Pure(v) => Some(v),
            State::Mixed(_) => None,
        }
    }

    fn transformed(&self, u: &ComplexMatrix) -> Self {
        match self {
            State::Pure(v) => State::Pure(v.transformed(u)),
            State::Mixed(m) => State::Mixed(m.conjugated(u)),
        }
    }
}

/// Ordered, non-empty list of states on a common space `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTuple {
    dim: usize,
    states: Vec<State>,
}

impl StateTuple {
    pub fn new(states: Vec<State>) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::InvalidTuple("tuple must contain at least one state".into()))?;
        let dim = first.dim();
        if let Some((k, s)) = states.iter().enumerate().find(|(_, s)| s.dim() != dim) {
            return Err(Error::InvalidTuple(format!(
                "member {k} has dimension {}, expected {dim}",
                s.dim()
            )));
        }
        Ok(Self { dim, states })
    }

    pub fn from_pure(vectors: Vec<UnitVector>) -> Result<Self> {
        Self::new(vectors.into_iter().map(State::Pure).collect())
    }

    pub fn from_mixed(matrices: Vec<DensityMatrix>) -> Result<Self> {
        Self::new(matrices.into_iter().map(State::Mixed).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn is_pure(&self) -> bool {
        self.states.iter().all(|s| matches!(s, State::Pure(_)))
    }

    /// Member vectors, or the index of the first mixed member.
    pub fn pure_vectors(&self) -> std::result::Result<Vec<&UnitVector>, usize> {
        self.states
            .iter()
            .enumerate()
            .map(|(k, s)| s.as_pure().ok_or(k))
            .collect()
    }

    pub fn densities(&self) -> Vec<ComplexMatrix> {
        self.states.iter().map(State::density).collect()
    }

    /// Same tuple with every member moved by the unitary `u`.
    pub fn transformed(&self, u: &ComplexMatrix) -> Self {
        Self {
            dim: self.dim,
            states: self.states.iter().map(|s| s.transformed(u)).collect(),
        }
    }

    /// Sub-tuple `(s_{i_1}, ..., s_{i_k})` with zero-based indices; repetition allowed.
    pub fn reindexed(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidInput("empty index sequence".into()));
        }
        let states = indices
            .iter()
            .map(|&i| {
                self.states.get(i).cloned().ok_or(Error::InvalidIndex {
                    index: i,
                    len: self.states.len(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dim: self.dim,
            states,
        })
    }
}

/// Hermitian matrix of pairwise inner products.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    matrix: ComplexMatrix,
}

impl GramMatrix {
    /// Accepts a square matrix that is Hermitian within [`HERMITICITY_TOL`] and
    /// stores its Hermitian part.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidInput("Gram matrix must be square".into()));
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITICITY_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
        })
    }

    pub fn order(&self) -> usize {
        self.matrix.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eigh(&self.matrix).min_value()
    }

    pub fn is_psd(&self, floor: f64) -> bool {
        self.min_eigenvalue() >= -floor
    }

    /// `T^dagger G T` for `T = diag(e^{i alpha_k})`.
    pub fn gauge_transformed(&self, alphas: &[f64]) -> Self {
        let n = self.order();
        assert_eq!(alphas.len(), n);
        let m = ComplexMatrix::from_fn(n, n, |i, j| {
            Complex64::from_polar(1.0, alphas[j] - alphas[i]) * self.matrix[(i, j)]
        });
        Self { matrix: m }
    }
}

/// `G[i][j] = <psi_i|psi_j>` for a pure tuple.
pub fn gram_matrix(tuple: &StateTuple) -> Result<GramMatrix> {
    let vectors = tuple.pure_vectors().map_err(Error::NotPureTuple)?;
    let n = vectors.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(1.0, 0.0);
        for j in (i + 1)..n {
            let z = vectors[i].inner(vectors[j]);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    Ok(GramMatrix { matrix: m })
}

/// Realizes a PSD, unit-diagonal Gram matrix by unit vectors in `C^r`, where
/// `r` is the number of eigenvalues above `tol`.
///
/// With `G = V diag(lambda) V^dagger`, vector `i` has coordinates
/// `sqrt(lambda_k) conj(V[i][k])` over the retained eigenpairs.
pub fn factor_gram(gram: &GramMatrix, tol: f64) -> Result<StateTuple> {
    let n = gram.order();
    for i in 0..n {
        let dev = (gram.get(i, i) - Complex64::new(1.0, 0.0)).norm();
        if dev > tol {
            return Err(Error::NotNormalized {
                index: i,
                deviation: dev,
            });
        }
    }
    let e = eigh(gram.matrix());
    if e.min_value() < -tol {
        return Err(Error::NotPsd(e.min_value()));
    }
    let kept: Vec<usize> = (0..n).rev().filter(|&k| e.values[k] > tol).collect();
    let kept = if kept.is_empty() { vec![n - 1] } else { kept };
    let vectors = (0..n)
        .map(|i| {
            let coords = kept
                .iter()
                .map(|&k| e.vectors[(i, k)].conj() * e.values[k].max(0.0).sqrt())
                .collect();
            UnitVector::normalized(coords)
        })
        .collect::<Result<Vec<_>>>()?;
    StateTuple::from_pure(vectors)
}

/// Tensor factor of a bipartite space `C^{dA} (x) C^{dB}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

fn check_factorization(dim: usize, da: usize, db: usize) -> Result<()> {
    if da == 0 || db == 0 || da * db != dim {
        return Err(Error::InvalidFactorization { dim, da, db });
    }
    Ok(())
}

/// Marginal on `keep`; the other factor is traced out.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem, da: usize, db: usize) -> Result<DensityMatrix> {
    check_factorization(rho.dim(), da, db)?;
    let m = rho.matrix();
    let out = match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |a, a2| {
            (0..db).map(|b| m[(a * db + b, a2 * db + b)]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |b, b2| {
            (0..da).map(|a| m[(a * db + b, a * db + b2)]).sum()
        }),
    };
    Ok(DensityMatrix::from_trusted(out))
}

/// Transposes the `which` factor of a bipartite operator.
pub fn partial_transpose(m: &ComplexMatrix, which: Subsystem, da: usize, db: usize) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::InvalidInput("partial transpose needs a square matrix".into()));
    }
    check_factorization(m.rows(), da, db)?;
    let dim = m.rows();
    Ok(ComplexMatrix::from_fn(dim, dim, |r, c| {
        let (a, b) = (r / db, r % db);
        let (a2, b2) = (c / db, c % db);
        match which {
            Subsystem::A => m[(a2 * db + b, a * db + b2)],
            Subsystem::B => m[(a * db + b2, a2 * db + b)],
        }
    }))
}
