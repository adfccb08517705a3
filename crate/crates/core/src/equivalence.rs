//! Unitary and projective-unitary equivalence of tuples, and reconstruction of
//! a pure tuple (up to gauge and unitary) from its Bargmann invariants.

use std::cell::Cell;
use std::collections::{BTreeSet, HashMap, VecDeque};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::invariants::trace_of_product;
use crate::linalg::{eigh, factor_gram, gram_matrix, inner, norm, ComplexMatrix, GramMatrix, StateTuple};
use crate::tolerance::{EDGE_TOL, PSD_FLOOR};

const REALIZABILITY_FLOOR: f64 = 1e-8;
/// Default ceiling on the number of index words `mixed_orbit_equal` may enumerate.
pub const DEFAULT_WORD_CAP: usize = 1_000_000;

/// Undirected graph on `0..n` with an edge wherever two members overlap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl FrameGraph {
    /// Builds from overlap moduli `moduli(i, j)` for `i < j`.
    pub fn from_moduli(n: usize, tol: f64, mut moduli: impl FnMut(usize, usize) -> f64) -> Self {
        let mut edges = BTreeSet::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if moduli(i, j) > tol {
                    edges.insert((i, j));
                }
            }
        }
        Self { n, edges }
    }

    pub fn from_gram(gram: &GramMatrix, tol: f64) -> Self {
        Self::from_moduli(gram.order(), tol, |i, j| gram.get(i, j).norm())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let key = if i < j { (i, j) } else { (j, i) };
        i != j && self.edges.contains(&key)
    }

    /// Neighbours in increasing index order.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&w| self.has_edge(v, w)).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.n * self.n.saturating_sub(1) / 2
    }

    /// One BFS tree per connected component, lowest index first.
    pub fn spanning_forest(&self) -> Vec<SpanningTree> {
        let mut seen = vec![false; self.n];
        let mut forest = Vec::new();
        for root in 0..self.n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut parent = vec![None; self.n];
            let mut depth = vec![0; self.n];
            let mut order = vec![root];
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        parent[w] = Some(v);
                        depth[w] = depth[v] + 1;
                        order.push(w);
                        queue.push_back(w);
                    }
                }
            }
            forest.push(SpanningTree {
                root,
                parent,
                depth,
                members: order,
            });
        }
        forest
    }

    pub fn is_connected(&self) -> bool {
        self.spanning_forest().len() <= 1
    }
}

/// BFS tree over one component of a [`FrameGraph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    pub root: usize,
    /// `parent[v]` for members other than the root; `None` elsewhere.
    pub parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    /// Members in BFS order, root first.
    pub members: Vec<usize>,
}

impl SpanningTree {
    pub fn contains(&self, v: usize) -> bool {
        self.members.contains(&v)
    }

    pub fn is_tree_edge(&self, i: usize, j: usize) -> bool {
        self.parent[i] == Some(j) || self.parent[j] == Some(i)
    }

    /// Vertices on the tree path from `a` to `b`, both included.
    pub fn path(&self, a: usize, b: usize) -> Vec<usize> {
        let (mut x, mut y) = (a, b);
        let mut head = vec![x];
        let mut tail = vec![y];
        while self.depth[x] > self.depth[y] {
            x = self.parent[x].expect("non-root has a parent");
            head.push(x);
        }
        while self.depth[y] > self.depth[x] {
            y = self.parent[y].expect("non-root has a parent");
            tail.push(y);
        }
        while x != y {
            x = self.parent[x].expect("non-root has a parent");
            y = self.parent[y].expect("non-root has a parent");
            head.push(x);
            tail.push(y);
        }
        tail.pop();
        head.extend(tail.into_iter().rev());
        head
    }
}

/// Source of invariants `Delta_{i_1 ... i_k}` for zero-based index words.
pub trait InvariantOracle {
    /// Number of members of the underlying tuple.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn invariant(&self, word: &[usize]) -> Result<Complex64>;

    /// Number of `invariant` calls answered so far.
    fn calls(&self) -> usize;
}

/// Oracle answering from a hidden tuple.
#[derive(Debug)]
pub struct TupleOracle {
    densities: Vec<ComplexMatrix>,
    calls: Cell<usize>,
}

impl TupleOracle {
    pub fn new(tuple: &StateTuple) -> Self {
        Self {
            densities: tuple.densities(),
            calls: Cell::new(0),
        }
    }
}

impl InvariantOracle for TupleOracle {
    fn len(&self) -> usize {
        self.densities.len()
    }

    fn invariant(&self, word: &[usize]) -> Result<Complex64> {
        check_word(word, self.densities.len())?;
        self.calls.set(self.calls.get() + 1);
        let factors: Vec<&ComplexMatrix> = word.iter().map(|&i| &self.densities[i]).collect();
        Ok(trace_of_product(&factors))
    }

    fn calls(&self) -> usize {
        self.calls.get()
    }
}

/// Oracle answering from stored values. A word is found if it or any
/// rotation is stored, or if a rotation of its reversal is (giving the conjugate).
#[derive(Debug, Clone, Default)]
pub struct TableOracle {
    n: usize,
    table: HashMap<Vec<usize>, Complex64>,
    calls: Cell<usize>,
}

impl TableOracle {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }

    pub fn insert(&mut self, word: Vec<usize>, value: Complex64) -> Result<()> {
        check_word(&word, self.n)?;
        self.table.insert(word, value);
        Ok(())
    }

    fn lookup(&self, word: &[usize]) -> Option<Complex64> {
        let k = word.len();
        let reversed: Vec<usize> = word.iter().rev().copied().collect();
        for s in 0..k {
            let rot: Vec<usize> = (0..k).map(|m| word[(m + s) % k]).collect();
            if let Some(v) = self.table.get(&rot) {
                return Some(*v);
            }
            let rot: Vec<usize> = (0..k).map(|m| reversed[(m + s) % k]).collect();
            if let Some(v) = self.table.get(&rot) {
                return Some(v.conj());
            }
        }
        None
    }
}

impl InvariantOracle for TableOracle {
    fn len(&self) -> usize {
        self.n
    }

    fn invariant(&self, word: &[usize]) -> Result<Complex64> {
        check_word(word, self.n)?;
        self.calls.set(self.calls.get() + 1);
        if word.iter().all(|&i| i == word[0]) {
            return Ok(Complex64::new(1.0, 0.0));
        }
        self.lookup(word)
            .ok_or_else(|| Error::InvalidInput(format!("no stored invariant for word {word:?}")))
    }

    fn calls(&self) -> usize {
        self.calls.get()
    }
}

fn check_word(word: &[usize], n: usize) -> Result<()> {
    if word.is_empty() {
        return Err(Error::InvalidInput("index word must be non-empty".into()));
    }
    match word.iter().find(|&&i| i >= n) {
        Some(&index) => Err(Error::InvalidIndex { index, len: n }),
        None => Ok(()),
    }
}

fn check_pair(psi: &StateTuple, phi: &StateTuple) -> Result<()> {
    if psi.len() != phi.len() {
        return Err(Error::InvalidPair(format!(
            "tuple lengths differ: {} vs {}",
            psi.len(),
            phi.len()
        )));
    }
    Ok(())
}

/// Outcome of [`joint_unitary_equivalent`].
#[derive(Debug, Clone)]
pub struct UnitaryDecision {
    pub equivalent: bool,
    /// `max |G(Psi) - G(Phi)|`.
    pub gram_gap: f64,
    /// Unitary with `U psi_k ~ phi_k`, when equivalent and dimensions match.
    pub witness: Option<ComplexMatrix>,
    /// `max_k |U psi_k - phi_k|` for the witness.
    pub witness_residual: Option<f64>,
}

/// Pure tuples are related by one unitary iff their Gram matrices agree.
pub fn joint_unitary_equivalent(psi: &StateTuple, phi: &StateTuple, tol: f64) -> Result<UnitaryDecision> {
    check_pair(psi, phi)?;
    let gp = gram_matrix(psi)?;
    let gf = gram_matrix(phi)?;
    let gram_gap = gp.matrix().max_abs_diff(gf.matrix());
    let equivalent = gram_gap <= tol;
    let (witness, witness_residual) = if equivalent && psi.dim() == phi.dim() {
        let u = witness_unitary(psi, phi, &gp);
        let residual = columns(psi)
            .iter()
            .zip(columns(phi))
            .map(|(p, f)| {
                let up = u.apply(p);
                norm(&up.iter().zip(&f).map(|(a, b)| a - b).collect::<Vec<_>>())
            })
            .fold(0.0, f64::max);
        (Some(u), Some(residual))
    } else {
        (None, None)
    };
    Ok(UnitaryDecision {
        equivalent,
        gram_gap,
        witness,
        witness_residual,
    })
}

fn columns(tuple: &StateTuple) -> Vec<Vec<Complex64>> {
    tuple
        .pure_vectors()
        .expect("checked pure")
        .into_iter()
        .map(|v| v.amplitudes().to_vec())
        .collect()
}

/// Maps the range of `Psi` onto the range of `Phi` through the common
/// eigenbasis of the Gram matrix, then completes both sides to unitaries.
fn witness_unitary(psi: &StateTuple, phi: &StateTuple, gram: &GramMatrix) -> ComplexMatrix {
    let d = psi.dim();
    let e = eigh(gram.matrix());
    let n = gram.order();
    let kept: Vec<usize> = (0..n).rev().filter(|&k| e.values[k] > PSD_FLOOR).take(d).collect();
    let frame = |cols: &[Vec<Complex64>]| -> Vec<Vec<Complex64>> {
        let q: Vec<Vec<Complex64>> = kept
            .iter()
            .map(|&k| {
                let s = 1.0 / e.values[k].sqrt();
                (0..d)
                    .map(|a| (0..n).map(|i| cols[i][a] * e.vectors[(i, k)]).sum::<Complex64>() * s)
                    .collect()
            })
            .collect();
        complete_basis(q, d)
    };
    let qp = frame(&columns(psi));
    let qf = frame(&columns(phi));
    ComplexMatrix::from_fn(d, d, |a, b| (0..d).map(|k| qf[k][a] * qp[k][b].conj()).sum())
}

/// Gram-Schmidt on `seed`, then extension by standard basis vectors to `d` columns.
fn complete_basis(seed: Vec<Vec<Complex64>>, d: usize) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    let candidates = seed.into_iter().chain((0..d).map(|k| {
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        v[k] = Complex64::new(1.0, 0.0);
        v
    }));
    for mut v in candidates {
        if basis.len() == d {
            break;
        }
        for _ in 0..2 {
            for q in &basis {
                let p = inner(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= p * qi;
                }
            }
        }
        let nv = norm(&v);
        if nv > 1e-6 {
            basis.push(v.into_iter().map(|z| z / nv).collect());
        }
    }
    basis
}

/// Projective-unitary equivalence: equal up to one unitary and a phase per member.
pub fn joint_projective_equivalent(psi: &StateTuple, phi: &StateTuple, tol: f64) -> Result<bool> {
    check_pair(psi, phi)?;
    let gp = gram_matrix(psi)?;
    let gf = gram_matrix(phi)?;
    let fp = FrameGraph::from_gram(&gp, EDGE_TOL);
    let ff = FrameGraph::from_gram(&gf, EDGE_TOL);
    if fp != ff {
        return Ok(false);
    }
    let n = gp.order();
    if fp.is_complete() {
        for i in 0..n {
            for j in (i + 1)..n {
                let a = gp.get(i, j).norm_sqr();
                let b = gf.get(i, j).norm_sqr();
                if (a - b).abs() > tol {
                    return Ok(false);
                }
                for k in (j + 1)..n {
                    let a = gp.get(i, j) * gp.get(j, k) * gp.get(k, i);
                    let b = gf.get(i, j) * gf.get(j, k) * gf.get(k, i);
                    if (a - b).norm() > tol {
                        return Ok(false);
                    }
                }
            }
        }
        return Ok(true);
    }
    let cp = canonical_gram_from_invariants(&TupleOracle::new(psi), tol)?;
    let cf = canonical_gram_from_invariants(&TupleOracle::new(phi), tol)?;
    Ok(cp.matrix().max_abs_diff(cf.matrix()) <= tol)
}

/// Gauge-fixed Gram matrix determined by the oracle's invariants.
///
/// Moduli come from `Delta_ij = |<psi_i|psi_j>|^2`. Tree edges of a BFS forest
/// on the frame graph are made positive; each remaining edge takes the phase
/// of the invariant around the cycle it closes with the tree.
pub fn canonical_gram_from_invariants(oracle: &dyn InvariantOracle, tol: f64) -> Result<GramMatrix> {
    let n = oracle.len();
    if n == 0 {
        return Err(Error::InvalidInput("oracle has no members".into()));
    }
    let mut moduli = vec![vec![0.0; n]; n];
    for i in 0..n {
        moduli[i][i] = 1.0;
        for j in (i + 1)..n {
            let m = oracle.invariant(&[i, j])?.re.max(0.0).sqrt();
            moduli[i][j] = m;
            moduli[j][i] = m;
        }
    }
    let graph = FrameGraph::from_moduli(n, EDGE_TOL, |i, j| moduli[i][j]);
    let mut g = ComplexMatrix::identity(n);
    for tree in graph.spanning_forest() {
        for &v in &tree.members {
            if let Some(p) = tree.parent[v] {
                g[(p, v)] = Complex64::new(moduli[p][v], 0.0);
                g[(v, p)] = g[(p, v)];
            }
        }
        for (i, j) in graph.edges() {
            if !tree.contains(i) || tree.is_tree_edge(i, j) {
                continue;
            }
            // cycle j -> ... -> i -> j: tree entries along the path, then G_ij
            let path = tree.path(j, i);
            let delta = oracle.invariant(&path)?;
            let tree_product: f64 = path.windows(2).map(|w| moduli[w[0]][w[1]]).product();
            let ratio = delta.norm() / (tree_product * moduli[i][j]);
            if (ratio - 1.0).abs() > tol {
                return Err(Error::InconsistentOracle {
                    i,
                    j,
                    modulus: ratio,
                });
            }
            g[(i, j)] = Complex64::from_polar(moduli[i][j], delta.arg());
            g[(j, i)] = g[(i, j)].conj();
        }
    }
    let gram = GramMatrix::new(g)?;
    let min = gram.min_eigenvalue();
    if min < -REALIZABILITY_FLOOR {
        return Err(Error::NotRealizable(min));
    }
    Ok(gram)
}

/// A tuple rebuilt from invariants.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub gram: GramMatrix,
    pub tuple: StateTuple,
    pub graph: FrameGraph,
    /// Oracle evaluations used by this reconstruction.
    pub invariant_calls: usize,
}

impl Reconstruction {
    /// `(N - 1)^2`, the evaluation count never exceeded on connected frame graphs.
    pub fn call_bound(&self) -> usize {
        let n = self.gram.order();
        (n - 1) * (n - 1)
    }
}

pub fn reconstruct_tuple(oracle: &dyn InvariantOracle, tol: f64) -> Result<Reconstruction> {
    let before = oracle.calls();
    let gram = canonical_gram_from_invariants(oracle, tol)?;
    let invariant_calls = oracle.calls() - before;
    let tuple = factor_gram(&gram, PSD_FLOOR)?;
    let graph = FrameGraph::from_gram(&gram, EDGE_TOL);
    Ok(Reconstruction {
        gram,
        tuple,
        graph,
        invariant_calls,
    })
}

/// Whether `word` is the lexicographically least among its rotations and
/// the rotations of its reversal.
pub fn is_bracelet_representative(word: &[usize]) -> bool {
    let k = word.len();
    let reversed: Vec<usize> = word.iter().rev().copied().collect();
    (0..k).all(|s| {
        let rot = (0..k).map(|m| word[(m + s) % k]);
        let rrot = (0..k).map(|m| reversed[(m + s) % k]);
        word.iter().copied().le(rot) && word.iter().copied().le(rrot)
    })
}

/// Bracelet representatives over `0..n` of every length `1..=max_len`, in
/// lexicographic order within each length.
pub fn bracelet_words(n: usize, max_len: usize, cap: usize) -> Result<Vec<Vec<usize>>> {
    let mut total: usize = 0;
    let mut layer: usize = 1;
    for _ in 0..max_len {
        layer = layer.saturating_mul(n);
        total = total.saturating_add(layer);
    }
    if total > cap {
        return Err(Error::BudgetExceeded { count: total, cap });
    }
    let mut out = Vec::new();
    for len in 1..=max_len {
        let mut word = vec![0; len];
        loop {
            if is_bracelet_representative(&word) {
                out.push(word.clone());
            }
            let mut pos = len;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                word[pos] += 1;
                if word[pos] < n {
                    break;
                }
                word[pos] = 0;
            }
            if word.iter().all(|&x| x == 0) {
                break;
            }
        }
    }
    Ok(out)
}

/// Outcome of [`mixed_orbit_equal`].
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitComparison {
    pub equal: bool,
    pub words_compared: usize,
    pub max_degree: usize,
    /// First word whose invariants differ beyond tolerance.
    pub witness_word: Option<Vec<usize>>,
    pub max_gap: f64,
}

/// Compares all invariants of degree up to `max_degree` (default `d^2`).
///
/// Unequal invariants certify inequivalence; agreement up to degree `d^2`
/// certifies simultaneous unitary equivalence.
pub fn mixed_orbit_equal(
    psi: &StateTuple,
    phi: &StateTuple,
    max_degree: Option<usize>,
    tol: f64,
    cap: usize,
) -> Result<OrbitComparison> {
    check_pair(psi, phi)?;
    if psi.dim() != phi.dim() {
        return Err(Error::InvalidPair(format!(
            "dimensions differ: {} vs {}",
            psi.dim(),
            phi.dim()
        )));
    }
    let d = psi.dim();
    let max_degree = max_degree.unwrap_or(d * d);
    let words = bracelet_words(psi.len(), max_degree, cap)?;
    let a = TupleOracle::new(psi);
    let b = TupleOracle::new(phi);
    let mut max_gap: f64 = 0.0;
    let mut witness_word = None;
    for w in &words {
        let gap = (a.invariant(w)? - b.invariant(w)?).norm();
        max_gap = max_gap.max(gap);
        if gap > tol && witness_word.is_none() {
            witness_word = Some(w.clone());
        }
    }
    Ok(OrbitComparison {
        equal: witness_word.is_none(),
        words_compared: words.len(),
        max_degree,
        witness_word,
        max_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unit_vector, haar_unitary, random_density, DensityMatrix, UnitVector};
    use crate::rng::SplitRng;
    use rand::Rng;

    fn random_tuple(n: usize, d: usize, rng: &mut SplitRng) -> StateTuple {
        StateTuple::from_pure((0..n).map(|_| haar_unit_vector(d, rng).unwrap()).collect()).unwrap()
    }

    fn rephased(t: &StateTuple, rng: &mut SplitRng) -> StateTuple {
        let vs = t
            .pure_vectors()
            .unwrap()
            .into_iter()
            .map(|v| v.with_phase(rng.random_range(0.0..6.28)))
            .collect();
        StateTuple::from_pure(vs).unwrap()
    }

    fn vec_of(c: &[(f64, f64)]) -> UnitVector {
        UnitVector::normalized(c.iter().map(|&(a, b)| Complex64::new(a, b)).collect()).unwrap()
    }

    /// Qubit triple with a non-real triple product.
    fn chiral_triple() -> StateTuple {
        StateTuple::from_pure(vec![
            vec_of(&[(1., 0.), (0., 0.)]),
            vec_of(&[(1., 0.), (1., 0.)]),
            vec_of(&[(1., 0.), (0., 1.)]),
        ])
        .unwrap()
    }

    fn conjugated(t: &StateTuple) -> StateTuple {
        StateTuple::from_pure(t.pure_vectors().unwrap().into_iter().map(|v| v.conj()).collect()).unwrap()
    }

    #[test]
    fn unitary_image_is_equivalent_with_witness() {
        let mut rng = SplitRng::new(1);
        for (n, d) in [(3, 2), (4, 3), (2, 4), (5, 3)] {
            let psi = random_tuple(n, d, &mut rng);
            let u = haar_unitary(d, &mut rng).unwrap();
            let phi = psi.transformed(&u);
            let dec = joint_unitary_equivalent(&psi, &phi, 1e-10).unwrap();
            assert!(dec.equivalent);
            assert!(dec.witness_residual.unwrap() <= 1e-9, "{dec:?}");
            let w = dec.witness.unwrap();
            assert!(w.adjoint().matmul(&w).max_abs_diff(&ComplexMatrix::identity(d)) < 1e-10);
        }
    }

    #[test]
    fn phase_shift_breaks_unitary_equivalence() {
        let mut rng = SplitRng::new(2);
        let psi = random_tuple(3, 2, &mut rng);
        let mut vs: Vec<UnitVector> = psi.pure_vectors().unwrap().into_iter().cloned().collect();
        vs[0] = vs[0].with_phase(0.7);
        let phi = StateTuple::from_pure(vs).unwrap();
        assert!(!joint_unitary_equivalent(&psi, &phi, 1e-10).unwrap().equivalent);
        assert!(joint_projective_equivalent(&psi, &phi, 1e-10).unwrap());
    }

    #[test]
    fn independent_tuples_are_inequivalent() {
        let mut rng = SplitRng::new(3);
        for _ in 0..50 {
            let psi = random_tuple(4, 3, &mut rng);
            let phi = random_tuple(4, 3, &mut rng);
            assert!(!joint_unitary_equivalent(&psi, &phi, 1e-8).unwrap().equivalent);
            assert!(!joint_projective_equivalent(&psi, &phi, 1e-8).unwrap());
        }
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let mut rng = SplitRng::new(4);
        let psi = random_tuple(3, 2, &mut rng);
        let phi = random_tuple(4, 2, &mut rng);
        assert!(matches!(joint_unitary_equivalent(&psi, &phi, 1e-8), Err(Error::InvalidPair(_))));
        assert!(matches!(joint_projective_equivalent(&psi, &phi, 1e-8), Err(Error::InvalidPair(_))));
    }

    #[test]
    fn projective_equivalence_with_gauge_and_unitary() {
        let mut rng = SplitRng::new(5);
        for _ in 0..20 {
            let psi = random_tuple(4, 3, &mut rng);
            let u = haar_unitary(3, &mut rng).unwrap();
            let phi = rephased(&psi.transformed(&u), &mut rng);
            assert!(joint_projective_equivalent(&psi, &phi, 1e-9).unwrap());
            assert!(joint_projective_equivalent(&phi, &psi, 1e-9).unwrap());
        }
    }

    #[test]
    fn conjugated_chiral_triple_is_not_projectively_equivalent() {
        let psi = chiral_triple();
        let phi = conjugated(&psi);
        assert!(!joint_projective_equivalent(&psi, &phi, 1e-9).unwrap());
    }

    #[test]
    fn reordering_breaks_equivalence() {
        let mut rng = SplitRng::new(6);
        let psi = random_tuple(4, 2, &mut rng);
        let phi = psi.reindexed(&[1, 0, 3, 2]).unwrap();
        assert!(!joint_projective_equivalent(&psi, &phi, 1e-8).unwrap());
    }

    #[test]
    fn tree_paths() {
        // path graph 0-1-2-3 plus chord 0-3
        let g = FrameGraph::from_moduli(4, 0.5, |i, j| if j == i + 1 || (i, j) == (0, 3) { 1.0 } else { 0.0 });
        let forest = g.spanning_forest();
        assert_eq!(forest.len(), 1);
        let t = &forest[0];
        assert_eq!(t.members, vec![0, 1, 3, 2]);
        assert_eq!(t.path(2, 0), vec![2, 1, 0]);
        assert_eq!(t.path(2, 3), vec![2, 1, 0, 3]);
        assert!(!t.is_tree_edge(2, 3));
    }

    #[test]
    fn orthonormal_oracle_gives_identity() {
        let t = StateTuple::from_pure((0..3).map(|k| UnitVector::basis(3, k).unwrap()).collect()).unwrap();
        let g = canonical_gram_from_invariants(&TupleOracle::new(&t), 1e-8).unwrap();
        assert!(g.matrix().max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
        let r = reconstruct_tuple(&TupleOracle::new(&t), 1e-8).unwrap();
        assert_eq!(r.graph.edge_count(), 0);
    }

    #[test]
    fn repeated_state_gives_all_ones() {
        let mut rng = SplitRng::new(7);
        let v = haar_unit_vector(3, &mut rng).unwrap();
        let t = StateTuple::from_pure(vec![v.clone(), v.clone(), v]).unwrap();
        let g = canonical_gram_from_invariants(&TupleOracle::new(&t), 1e-8).unwrap();
        let ones = ComplexMatrix::from_fn(3, 3, |_, _| Complex64::new(1.0, 0.0));
        assert!(g.matrix().max_abs_diff(&ones) < 1e-12);
    }

    #[test]
    fn canonical_gram_matches_oracle_words() {
        let mut rng = SplitRng::new(8);
        let psi = random_tuple(5, 3, &mut rng);
        let oracle = TupleOracle::new(&psi);
        let r = reconstruct_tuple(&oracle, 1e-8).unwrap();
        let back = TupleOracle::new(&r.tuple);
        for w in bracelet_words(5, 4, 10_000).unwrap() {
            let gap = (back.invariant(&w).unwrap() - oracle.invariant(&w).unwrap()).norm();
            assert!(gap < 1e-8, "{w:?}: {gap}");
        }
        assert!(r.invariant_calls <= 16);
        assert_eq!(r.invariant_calls, 16);
    }

    #[test]
    fn pair_reconstruction_keeps_modulus() {
        let mut rng = SplitRng::new(9);
        let psi = random_tuple(2, 2, &mut rng);
        let oracle = TupleOracle::new(&psi);
        let r = reconstruct_tuple(&oracle, 1e-8).unwrap();
        let d12 = oracle.invariant(&[0, 1]).unwrap().re;
        assert!((r.gram.get(0, 1).norm() - d12.sqrt()).abs() < 1e-12);
        assert!(r.invariant_calls <= 1);
    }

    #[test]
    fn canonical_gram_is_gauge_canonical() {
        let mut rng = SplitRng::new(10);
        for _ in 0..20 {
            let psi = random_tuple(4, 3, &mut rng);
            let phi = rephased(&psi, &mut rng);
            let a = canonical_gram_from_invariants(&TupleOracle::new(&psi), 1e-8).unwrap();
            let b = canonical_gram_from_invariants(&TupleOracle::new(&phi), 1e-8).unwrap();
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-10);
        }
    }

    #[test]
    fn disconnected_graph_reconstructs_per_component() {
        let mut rng = SplitRng::new(11);
        // members 0, 1 live in span{e0, e1}; members 2, 3 in span{e2, e3}
        let mut block = |lo: usize| {
            let v = haar_unit_vector(2, &mut rng).unwrap();
            let mut amps = vec![Complex64::new(0.0, 0.0); 4];
            amps[lo] = v.amplitudes()[0];
            amps[lo + 1] = v.amplitudes()[1];
            UnitVector::new(amps).unwrap()
        };
        let vs = vec![block(0), block(0), block(2), block(2)];
        let psi = StateTuple::from_pure(vs).unwrap();
        let r = reconstruct_tuple(&TupleOracle::new(&psi), 1e-8).unwrap();
        assert!(!r.graph.is_connected());
        assert_eq!(r.graph.spanning_forest().len(), 2);
        assert!(r.gram.is_psd(1e-8));
        assert!(joint_projective_equivalent(&psi, &r.tuple, 1e-8).unwrap());
        // swapping the components changes the partition
        let swapped = psi.reindexed(&[0, 2, 1, 3]).unwrap();
        assert!(!joint_projective_equivalent(&psi, &swapped, 1e-8).unwrap());
    }

    #[test]
    fn table_oracle_uses_cyclic_and_reversal_symmetry() {
        let psi = chiral_triple();
        let src = TupleOracle::new(&psi);
        let mut table = TableOracle::new(3);
        for w in [vec![0, 1], vec![0, 2], vec![1, 2], vec![1, 2, 0]] {
            table.insert(w.clone(), src.invariant(&w).unwrap()).unwrap();
        }
        let z = table.invariant(&[2, 1, 0]).unwrap();
        assert!((z - src.invariant(&[0, 1, 2]).unwrap().conj()).norm() < 1e-15);
        let g = canonical_gram_from_invariants(&table, 1e-8).unwrap();
        let r = factor_gram(&g, PSD_FLOOR).unwrap();
        assert!(joint_projective_equivalent(&psi, &r, 1e-9).unwrap());
        assert!(table.invariant(&[0, 5]).is_err());
    }

    #[test]
    fn inconsistent_oracle_is_detected() {
        let mut table = TableOracle::new(3);
        table.insert(vec![0, 1], Complex64::new(0.5, 0.0)).unwrap();
        table.insert(vec![0, 2], Complex64::new(0.5, 0.0)).unwrap();
        table.insert(vec![1, 2], Complex64::new(0.5, 0.0)).unwrap();
        // modulus of the cycle should be 0.5^{3/2}
        table.insert(vec![2, 0, 1], Complex64::new(0.9, 0.0)).unwrap();
        assert!(matches!(
            canonical_gram_from_invariants(&table, 1e-6),
            Err(Error::InconsistentOracle { .. })
        ));
    }

    #[test]
    fn unrealizable_table_is_rejected() {
        // three pairwise-equal overlaps of modulus 0.9 with cycle phase pi
        let mut table = TableOracle::new(3);
        for w in [vec![0, 1], vec![0, 2], vec![1, 2]] {
            table.insert(w, Complex64::new(0.81, 0.0)).unwrap();
        }
        table.insert(vec![2, 0, 1], Complex64::new(-0.729, 0.0)).unwrap();
        assert!(matches!(
            canonical_gram_from_invariants(&table, 1e-6),
            Err(Error::NotRealizable(_))
        ));
    }

    #[test]
    fn bracelets() {
        assert!(is_bracelet_representative(&[0, 1, 2]));
        assert!(!is_bracelet_representative(&[0, 2, 1]));
        assert!(!is_bracelet_representative(&[1, 0]));
        // binary bracelets of length 1..=4: 2 + 3 + 4 + 6
        assert_eq!(bracelet_words(2, 4, 100).unwrap().len(), 15);
        assert!(matches!(bracelet_words(3, 4, 100), Err(Error::BudgetExceeded { count: 120, cap: 100 })));
    }

    #[test]
    fn mixed_orbit_examples() {
        let mut rng = SplitRng::new(12);
        let mixed: Vec<DensityMatrix> = (0..3).map(|_| random_density(2, 2, &mut rng).unwrap()).collect();
        let psi = StateTuple::from_mixed(mixed.clone()).unwrap();
        let u = haar_unitary(2, &mut rng).unwrap();
        let phi = psi.transformed(&u);
        let same = mixed_orbit_equal(&psi, &phi, None, 1e-10, DEFAULT_WORD_CAP).unwrap();
        assert!(same.equal);
        assert_eq!(same.max_degree, 4);
        assert_eq!(mixed_orbit_equal(&phi, &psi, None, 1e-10, DEFAULT_WORD_CAP).unwrap().equal, true);

        let mut noisy = mixed.clone();
        noisy[1] = noisy[1].depolarized(0.01);
        let phi = StateTuple::from_mixed(noisy).unwrap();
        let res = mixed_orbit_equal(&psi, &phi, None, 1e-8, DEFAULT_WORD_CAP).unwrap();
        assert!(!res.equal);
        assert!(res.max_gap > 1e-4);

        let chiral = chiral_triple();
        let res = mixed_orbit_equal(&chiral, &conjugated(&chiral), None, 1e-9, DEFAULT_WORD_CAP).unwrap();
        assert!(!res.equal);
        assert_eq!(res.witness_word, Some(vec![0, 1, 2]));
    }

    #[test]
    fn mixed_orbit_cap() {
        let mut rng = SplitRng::new(13);
        let psi = random_tuple(3, 2, &mut rng);
        assert!(matches!(
            mixed_orbit_equal(&psi, &psi, Some(6), 1e-9, 500),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
