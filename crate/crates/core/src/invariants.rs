//! Bargmann invariants of arbitrary order and the Haar overlap distribution.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{haar_unit_vector, ComplexMatrix, StateTuple};
use crate::rng::SplitRng;

/// Agreement required between the Gram route and the dense-product route.
const CROSS_CHECK_TOL: f64 = 1e-10;

/// A computed invariant `Tr(rho_{i_1} ... rho_{i_n})`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantValue {
    pub order: usize,
    pub value: Complex64,
    /// Zero-based member indices, in product order.
    pub indices: Vec<usize>,
}

/// Product of consecutive overlaps `<psi_k|psi_{k+1}>` around the cycle.
fn cycle_overlap_product(tuple: &StateTuple) -> Option<Complex64> {
    let vectors = tuple.pure_vectors().ok()?;
    let n = vectors.len();
    let mut acc = Complex64::new(1.0, 0.0);
    for k in 0..n {
        acc *= vectors[k].inner(vectors[(k + 1) % n]);
    }
    Some(acc)
}

/// `Tr(rho_1 rho_2 ... rho_n)` by multiplying density matrices left to right.
pub fn bargmann_dense(tuple: &StateTuple) -> Complex64 {
    let mut densities = tuple.densities().into_iter();
    let first = densities.next().expect("tuples are non-empty");
    densities
        .fold(first, |acc, rho| acc.matmul(&rho))
        .trace()
}

/// The Bargmann invariant of the whole tuple in its stored order.
///
/// Pure tuples use the overlap product and are cross-checked against the
/// dense trace; mixed tuples use the dense trace.
pub fn bargmann(tuple: &StateTuple) -> Result<InvariantValue> {
    let n = tuple.len();
    let value = match cycle_overlap_product(tuple) {
        Some(primary) => {
            let dense = bargmann_dense(tuple);
            let gap = (primary - dense).norm();
            if gap > CROSS_CHECK_TOL {
                return Err(Error::CrossCheck(format!(
                    "overlap product and dense trace differ by {gap:e}"
                )));
            }
            primary
        }
        None => bargmann_dense(tuple),
    };
    Ok(InvariantValue {
        order: n,
        value,
        indices: (0..n).collect(),
    })
}

/// `Delta_{i_1 ... i_k}`: the invariant of the re-indexed tuple (zero-based, repeats allowed).
pub fn n_product(tuple: &StateTuple, indices: &[usize]) -> Result<InvariantValue> {
    if indices.is_empty() {
        return Err(Error::InvalidInput("index sequence must be non-empty".into()));
    }
    let sub = tuple.reindexed(indices)?;
    let mut v = bargmann(&sub)?;
    v.indices = indices.to_vec();
    Ok(v)
}

/// Trace of a product of plain matrices, left to right.
pub fn trace_of_product(factors: &[&ComplexMatrix]) -> Complex64 {
    let (first, rest) = factors.split_first().expect("at least one factor");
    rest.iter()
        .fold((*first).clone(), |acc, m| acc.matmul(m))
        .trace()
}

/// Density of `<u|v>` for independent Haar vectors in `C^d`:
/// `(d-1)/pi (1-|z|^2)^(d-2)` on the closed unit disk, 0 outside.
pub fn inner_product_density(d: usize, z: Complex64) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("overlap density needs d >= 2, got {d}")));
    }
    let r2 = z.norm_sqr();
    if r2 > 1.0 {
        return Ok(0.0);
    }
    Ok((d - 1) as f64 / PI * (1.0 - r2).powi(d as i32 - 2))
}

/// `Gamma(d) / Gamma(d - 1/2)` for integer `d >= 2`.
fn gamma_ratio(d: usize) -> f64 {
    // Gamma(2)/Gamma(3/2) = 2/sqrt(pi); each step multiplies by (k)/(k - 1/2)
    let mut r = 2.0 / PI.sqrt();
    for k in 2..d {
        r *= k as f64 / (k as f64 - 0.5);
    }
    r
}

/// Marginal density of `Re <u|v>` (and of `Im <u|v>`):
/// `Gamma(d)/(sqrt(pi) Gamma(d-1/2)) (1-t^2)^(d-3/2)` on `[-1, 1]`.
pub fn marginal_density(d: usize, t: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("marginal density needs d >= 2, got {d}")));
    }
    if t.abs() > 1.0 {
        return Ok(0.0);
    }
    Ok(gamma_ratio(d) / PI.sqrt() * (1.0 - t * t).powf(d as f64 - 1.5))
}

/// Counts on an equal-area polar grid over the unit disk.
///
/// Radial edges sit at `sqrt(k / radial)`, angular edges at `2 pi k / angular`,
/// so a uniform distribution on the disk fills every cell equally.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarHistogram {
    pub radial: usize,
    pub angular: usize,
    /// Row-major `[radial][angular]` counts.
    pub counts: Vec<u64>,
}

impl PolarHistogram {
    pub fn new(radial: usize, angular: usize) -> Self {
        Self {
            radial,
            angular,
            counts: vec![0; radial * angular],
        }
    }

    pub fn insert(&mut self, z: Complex64) {
        let r2 = z.norm_sqr().min(1.0);
        let ri = ((r2 * self.radial as f64) as usize).min(self.radial - 1);
        let mut phi = z.arg();
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        let ai = ((phi / (2.0 * PI) * self.angular as f64) as usize).min(self.angular - 1);
        self.counts[ri * self.angular + ai] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn merge(&mut self, other: &PolarHistogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    /// Pearson statistic against equal expected counts.
    pub fn chi_square_uniform(&self) -> f64 {
        let expected = self.total() as f64 / self.counts.len() as f64;
        self.counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum()
    }
}

/// Empirical statistics of Haar overlaps.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapSummary {
    pub d: usize,
    pub pairs: usize,
    pub mean_abs_sq: f64,
    pub max_abs: f64,
    pub histogram: PolarHistogram,
}

/// Pairs handled by one RNG stream; fixed so results do not depend on thread count.
const PAIRS_PER_CHUNK: usize = 4096;

struct ChunkStats {
    sum_abs_sq: f64,
    max_abs: f64,
    histogram: PolarHistogram,
}

fn overlap_chunk(d: usize, count: usize, mut rng: SplitRng, bins: (usize, usize)) -> ChunkStats {
    let mut stats = ChunkStats {
        sum_abs_sq: 0.0,
        max_abs: 0.0,
        histogram: PolarHistogram::new(bins.0, bins.1),
    };
    for _ in 0..count {
        let u = haar_unit_vector(d, &mut rng).expect("d >= 2");
        let v = haar_unit_vector(d, &mut rng).expect("d >= 2");
        let z = u.inner(&v);
        stats.sum_abs_sq += z.norm_sqr();
        stats.max_abs = stats.max_abs.max(z.norm());
        stats.histogram.insert(z);
    }
    stats
}

/// Draws `pairs` independent Haar pairs in `C^d` and summarizes their overlaps
/// on a 10 x 10 equal-area polar grid.
///
/// Work is split into fixed chunks, each with its own child stream of `rng`;
/// `threads` only decides how many chunks run concurrently, and partial sums are
/// merged in chunk order.
pub fn sample_overlap_statistics(d: usize, pairs: usize, rng: &SplitRng, threads: usize) -> Result<OverlapSummary> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("overlap sampling needs d >= 2, got {d}")));
    }
    if pairs == 0 {
        return Err(Error::InvalidParameter("pairs must be at least 1".into()));
    }
    let bins = (10, 10);
    let chunks: Vec<(usize, usize)> = (0..pairs.div_ceil(PAIRS_PER_CHUNK))
        .map(|c| (c, PAIRS_PER_CHUNK.min(pairs - c * PAIRS_PER_CHUNK)))
        .collect();
    let threads = threads.max(1).min(chunks.len());
    let mut results: Vec<Option<ChunkStats>> = (0..chunks.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let per = chunks.len().div_ceil(threads);
        let handles: Vec<_> = chunks
            .chunks(per)
            .map(|group| {
                scope.spawn(move || {
                    group
                        .iter()
                        .map(|&(c, count)| (c, overlap_chunk(d, count, rng.split(c as u64), bins)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (c, s) in h.join().expect("sampling worker panicked") {
                results[c] = Some(s);
            }
        }
    });
    let mut sum = 0.0;
    let mut max_abs = 0.0_f64;
    let mut histogram = PolarHistogram::new(bins.0, bins.1);
    for s in results.into_iter().map(|s| s.expect("every chunk ran")) {
        sum += s.sum_abs_sq;
        max_abs = max_abs.max(s.max_abs);
        histogram.merge(&s.histogram);
    }
    Ok(OverlapSummary {
        d,
        pairs,
        mean_abs_sq: sum / pairs as f64,
        max_abs,
        histogram,
    })
}
