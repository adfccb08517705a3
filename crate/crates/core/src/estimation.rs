//! The cycle test: a control qubit, a controlled cyclic shift of the tuple's
//! registers, and a measurement whose ±1 outcome has mean `Re` or `Im` of the
//! invariant.
//!
//! Shots are drawn from the exact outcome probability. The statevector
//! simulation here is only a cross-check for small systems.

use num_complex::Complex64;
use rand::distr::{Bernoulli, Distribution};
use rand::Rng;

use crate::error::{Error, Result};
use crate::invariants::bargmann;
use crate::linalg::{ComplexMatrix, StateTuple};
use crate::rng::SplitRng;

/// Default limit on `2 d^n` for explicit circuit construction.
pub const DEFAULT_CIRCUIT_CAP: usize = 1 << 13;
/// Shots handled by one child stream; fixed so results do not depend on thread count.
const SHOTS_PER_CHUNK: usize = 1 << 16;

/// Which part of the invariant a run estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Part {
    Real,
    Imag,
}

/// Hoeffding-sized shot budget for outcomes in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotPlan {
    pub epsilon: f64,
    pub delta: f64,
    pub shots: usize,
}

impl ShotPlan {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        Ok(Self {
            epsilon,
            delta,
            shots: hoeffding_shots(epsilon, delta)?,
        })
    }
}

/// Result of estimating both parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateResult {
    pub estimate: Complex64,
    pub real_mean: f64,
    pub imag_mean: f64,
    pub shots_per_part: usize,
    pub seed: u64,
}

/// `P(+1) = (1 + Re Delta)/2` or `(1 + Im Delta)/2`.
pub fn cycle_probability(tuple: &StateTuple, part: Part) -> Result<f64> {
    let delta = bargmann(tuple)?.value;
    Ok(probability_from_invariant(delta, part))
}

fn probability_from_invariant(delta: Complex64, part: Part) -> f64 {
    let x = match part {
        Part::Real => delta.re,
        Part::Imag => delta.im,
    };
    (0.5 * (1.0 + x)).clamp(0.0, 1.0)
}

fn register_size(d: usize, n: usize, cap: usize) -> Result<usize> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidDimension(format!("d = {d}, n = {n}")));
    }
    let size = u32::try_from(n)
        .ok()
        .and_then(|n| d.checked_pow(n))
        .and_then(|s| s.checked_mul(2))
        .filter(|&s| s <= cap)
        .ok_or(Error::TooLarge { dim: d.saturating_pow(n as u32).saturating_mul(2), cap })?;
    Ok(size / 2)
}

/// Image of basis index `|i_1 ... i_n>` under `|i_1 ... i_n> -> |i_n i_1 ... i_{n-1}>`
/// (`i_1` most significant).
fn cycled_index(index: usize, d: usize, n: usize) -> usize {
    let last = index % d;
    index / d + last * d.pow(n as u32 - 1)
}

/// `|0><0| (x) 1 + |1><1| (x) P` on `C^2 (x) (C^d)^{(x) n}`, control most significant.
pub fn controlled_cycle_unitary(d: usize, n: usize, cap: usize) -> Result<ComplexMatrix> {
    let dim = register_size(d, n, cap)?;
    let mut u = ComplexMatrix::zeros(2 * dim, 2 * dim);
    for k in 0..dim {
        u[(k, k)] = Complex64::new(1.0, 0.0);
        u[(dim + cycled_index(k, d, n), dim + k)] = Complex64::new(1.0, 0.0);
    }
    Ok(u)
}

/// `P(+1)` by simulating the circuit on the product state of a pure tuple:
/// H, controlled cycle, optionally `diag(1, i)` for the imaginary part, H.
pub fn circuit_probability(tuple: &StateTuple, part: Part, cap: usize) -> Result<f64> {
    let vectors = tuple.pure_vectors().map_err(Error::NotPureTuple)?;
    let (d, n) = (tuple.dim(), tuple.len());
    let dim = register_size(d, n, cap)?;
    let mut psi = vec![Complex64::new(1.0, 0.0)];
    for v in &vectors {
        psi = psi
            .iter()
            .flat_map(|a| v.amplitudes().iter().map(move |b| a * b))
            .collect();
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // after the first Hadamard both control branches carry psi / sqrt 2
    let upper: Vec<Complex64> = psi.iter().map(|a| a * h).collect();
    let mut lower = vec![Complex64::new(0.0, 0.0); dim];
    for (k, a) in psi.iter().enumerate() {
        lower[cycled_index(k, d, n)] = a * h;
    }
    if part == Part::Imag {
        for a in lower.iter_mut() {
            *a *= Complex64::i();
        }
    }
    let p0: f64 = upper
        .iter()
        .zip(&lower)
        .map(|(a, b)| ((a + b) * h).norm_sqr())
        .sum();
    Ok(p0)
}

/// `ceil((2/eps^2) ln(2/delta))`, at least 1.
pub fn hoeffding_shots(epsilon: f64, delta: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be positive")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must lie in (0, 1)")));
    }
    let n = (2.0 / (epsilon * epsilon) * (2.0 / delta).ln()).ceil();
    if n > usize::MAX as f64 {
        return Err(Error::InvalidParameter("shot count overflows".into()));
    }
    Ok((n as usize).max(1))
}

fn sum_outcomes<R: Rng + ?Sized>(p: f64, shots: usize, rng: &mut R) -> i64 {
    let coin = Bernoulli::new(p).expect("probability clamped to [0, 1]");
    (0..shots).map(|_| if coin.sample(rng) { 1 } else { -1 }).sum()
}

/// Mean of `shots` independent ±1 outcomes with `P(+1) = cycle_probability`.
pub fn simulate_cycle_test<R: Rng + ?Sized>(tuple: &StateTuple, part: Part, shots: usize, rng: &mut R) -> Result<f64> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    let p = cycle_probability(tuple, part)?;
    Ok(sum_outcomes(p, shots, rng) as f64 / shots as f64)
}

/// Chunked version of [`simulate_cycle_test`]: chunk `c` uses `rng.split(c)`
/// and sums are reduced in chunk order.
fn parallel_mean(p: f64, shots: usize, rng: &SplitRng, threads: usize) -> f64 {
    let chunks: Vec<(u64, usize)> = (0..shots.div_ceil(SHOTS_PER_CHUNK))
        .map(|c| (c as u64, SHOTS_PER_CHUNK.min(shots - c * SHOTS_PER_CHUNK)))
        .collect();
    let threads = threads.max(1).min(chunks.len().max(1));
    let per = chunks.len().div_ceil(threads).max(1);
    let partial: Vec<i64> = std::thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .chunks(per)
            .map(|group| {
                scope.spawn(move || {
                    group
                        .iter()
                        .map(|&(c, count)| sum_outcomes(p, count, &mut rng.split(c)))
                        .sum::<i64>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("shot worker panicked"))
            .collect()
    });
    partial.iter().sum::<i64>() as f64 / shots as f64
}

/// Estimates both parts with `hoeffding_shots(epsilon, delta)` shots each,
/// the real part on `rng.split(0)` and the imaginary part on `rng.split(1)`.
pub fn estimate_bargmann(
    tuple: &StateTuple,
    epsilon: f64,
    delta: f64,
    rng: &SplitRng,
    threads: usize,
) -> Result<EstimateResult> {
    let plan = ShotPlan::new(epsilon, delta)?;
    let value = bargmann(tuple)?.value;
    let real_mean = parallel_mean(probability_from_invariant(value, Part::Real), plan.shots, &rng.split(0), threads);
    let imag_mean = parallel_mean(probability_from_invariant(value, Part::Imag), plan.shots, &rng.split(1), threads);
    Ok(EstimateResult {
        estimate: Complex64::new(real_mean, imag_mean),
        real_mean,
        imag_mean,
        shots_per_part: plan.shots,
        seed: rng.key(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::obg_tuple;
    use crate::linalg::{haar_unit_vector, UnitVector};

    fn identical(n: usize) -> StateTuple {
        let v = UnitVector::basis(2, 0).unwrap();
        StateTuple::from_pure(vec![v; n]).unwrap()
    }

    #[test]
    fn probability_examples() {
        assert_eq!(cycle_probability(&identical(3), Part::Real).unwrap(), 1.0);
        let orth = StateTuple::from_pure(vec![UnitVector::basis(2, 0).unwrap(), UnitVector::basis(2, 1).unwrap()]).unwrap();
        assert_eq!(cycle_probability(&orth, Part::Real).unwrap(), 0.5);
        assert_eq!(cycle_probability(&orth, Part::Imag).unwrap(), 0.5);
        let obg = obg_tuple(3, 0.5).unwrap();
        assert!((cycle_probability(&obg, Part::Real).unwrap() - 0.4375).abs() < 1e-12);
    }

    #[test]
    fn fredkin_and_cycle_order() {
        let f = controlled_cycle_unitary(2, 2, DEFAULT_CIRCUIT_CAP).unwrap();
        let mut expect = ComplexMatrix::identity(8);
        // controlled swap of |101> and |110>
        expect[(5, 5)] = Complex64::new(0.0, 0.0);
        expect[(6, 6)] = Complex64::new(0.0, 0.0);
        expect[(5, 6)] = Complex64::new(1.0, 0.0);
        expect[(6, 5)] = Complex64::new(1.0, 0.0);
        assert_eq!(f, expect);
        assert!(f.adjoint().matmul(&f).max_abs_diff(&ComplexMatrix::identity(8)) < 1e-15);
        for (d, n) in [(2, 3), (3, 3), (2, 5)] {
            let u = controlled_cycle_unitary(d, n, DEFAULT_CIRCUIT_CAP).unwrap();
            let mut acc = ComplexMatrix::identity(u.rows());
            for _ in 0..n {
                acc = acc.matmul(&u);
            }
            assert!(acc.max_abs_diff(&ComplexMatrix::identity(u.rows())) < 1e-15);
        }
        assert!(matches!(controlled_cycle_unitary(2, 13, DEFAULT_CIRCUIT_CAP), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn cycle_sends_last_register_first() {
        // |0 1 2> in (C^3)^3 goes to |2 0 1>
        assert_eq!(cycled_index(5, 3, 3), 2 * 9 + 1);
    }

    #[test]
    fn circuit_matches_analytic_probability() {
        let mut rng = SplitRng::new(31);
        for n in [2, 3] {
            for _ in 0..20 {
                let t = StateTuple::from_pure((0..n).map(|_| haar_unit_vector(2, &mut rng).unwrap()).collect()).unwrap();
                for part in [Part::Real, Part::Imag] {
                    let a = cycle_probability(&t, part).unwrap();
                    let b = circuit_probability(&t, part, DEFAULT_CIRCUIT_CAP).unwrap();
                    assert!((a - b).abs() < 1e-10, "{part:?}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn dense_circuit_agrees_with_permutation_path() {
        let mut rng = SplitRng::new(32);
        let t = StateTuple::from_pure((0..3).map(|_| haar_unit_vector(2, &mut rng).unwrap()).collect()).unwrap();
        let u = controlled_cycle_unitary(2, 3, DEFAULT_CIRCUIT_CAP).unwrap();
        let h = ComplexMatrix::from_row_major(2, 2, vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)])
            .unwrap()
            .scale(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
        let hh = h.kron(&ComplexMatrix::identity(8));
        let mut psi = vec![Complex64::new(1.0, 0.0)];
        for v in t.pure_vectors().unwrap() {
            psi = psi.iter().flat_map(|a| v.amplitudes().iter().map(move |b| a * b)).collect();
        }
        let mut state = vec![Complex64::new(0.0, 0.0); 16];
        state[..8].copy_from_slice(&psi);
        let out = hh.apply(&u.apply(&hh.apply(&state)));
        let p0: f64 = out[..8].iter().map(|z| z.norm_sqr()).sum();
        assert!((p0 - circuit_probability(&t, Part::Real, DEFAULT_CIRCUIT_CAP).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn hoeffding_examples() {
        assert_eq!(hoeffding_shots(0.1, 0.05).unwrap(), 738);
        assert_eq!(hoeffding_shots(0.01, 0.05).unwrap(), 73778);
        assert_eq!(hoeffding_shots(1.9, 0.999_999).unwrap(), 1);
        assert!(hoeffding_shots(0.0, 0.5).is_err());
        assert!(hoeffding_shots(0.1, 1.0).is_err());
        assert!(hoeffding_shots(0.1, 0.0).is_err());
    }

    #[test]
    fn simulation_examples() {
        let mut rng = SplitRng::new(33);
        assert_eq!(simulate_cycle_test(&identical(3), Part::Real, 1000, &mut rng).unwrap(), 1.0);
        let orth = StateTuple::from_pure(vec![UnitVector::basis(2, 0).unwrap(), UnitVector::basis(2, 1).unwrap()]).unwrap();
        let m = simulate_cycle_test(&orth, Part::Real, 100_000, &mut rng).unwrap();
        assert!(m.abs() <= 0.02);
        let a = simulate_cycle_test(&orth, Part::Imag, 500, &mut SplitRng::new(1)).unwrap();
        let b = simulate_cycle_test(&orth, Part::Imag, 500, &mut SplitRng::new(1)).unwrap();
        assert_eq!(a, b);
        assert!(simulate_cycle_test(&orth, Part::Real, 0, &mut rng).is_err());
    }

    #[test]
    fn single_shot_is_unbiased() {
        let t = obg_tuple(3, 0.5).unwrap();
        let seeds = 10_000;
        let total: f64 = (0..seeds)
            .map(|s| simulate_cycle_test(&t, Part::Real, 1, &mut SplitRng::new(s)).unwrap())
            .sum();
        let mean = total / seeds as f64;
        let sigma = (1.0 - 0.125f64 * 0.125).sqrt() / (seeds as f64).sqrt();
        assert!((mean + 0.125).abs() <= 3.0 * sigma, "mean = {mean}");
    }

    #[test]
    fn identical_states_give_exact_real_part() {
        // the imaginary-part outcome is a fair coin here, so only its mean is pinned down
        let r = estimate_bargmann(&identical(4), 0.1, 0.1, &SplitRng::new(3), 1).unwrap();
        assert_eq!(r.real_mean, 1.0);
        assert!(r.imag_mean.abs() <= 0.1);
        assert_eq!(r.shots_per_part, hoeffding_shots(0.1, 0.1).unwrap());
    }

    #[test]
    fn estimate_independent_of_threads() {
        let t = obg_tuple(5, 0.3).unwrap();
        let a = estimate_bargmann(&t, 0.005, 0.05, &SplitRng::new(9), 1).unwrap();
        let b = estimate_bargmann(&t, 0.005, 0.05, &SplitRng::new(9), 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn obg_estimates_land_near_the_invariant() {
        let t = obg_tuple(3, 0.5).unwrap();
        let master = SplitRng::new(2024);
        let hits = (0..200)
            .filter(|&k| {
                let r = estimate_bargmann(&t, 0.05, 0.05, &master.split(k), 1).unwrap();
                (r.estimate - Complex64::new(-0.125, 0.0)).norm() <= 0.05 * std::f64::consts::SQRT_2
            })
            .count();
        assert!(hits >= 176, "{hits} of 200");
    }

    #[test]
    fn coverage_is_calibrated() {
        let mut rng = SplitRng::new(77);
        let t = StateTuple::from_pure((0..3).map(|_| haar_unit_vector(2, &mut rng).unwrap()).collect()).unwrap();
        let delta = bargmann(&t).unwrap().value;
        let master = SplitRng::new(78);
        let covered = (0..500)
            .filter(|&k| {
                let r = estimate_bargmann(&t, 0.1, 0.1, &master.split(k), 1).unwrap();
                (r.real_mean - delta.re).abs() <= 0.1
            })
            .count();
        assert!(covered as f64 / 500.0 >= 0.9);
    }
}
