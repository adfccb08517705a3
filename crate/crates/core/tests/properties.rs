use approx::assert_abs_diff_eq;
use bargmann_core::circulant::{circulantize, is_circulant_gram, CirculantSpec};
use bargmann_core::equivalence::{joint_projective_equivalent, joint_unitary_equivalent, reconstruct_tuple, TupleOracle};
use bargmann_core::geometry::{boundary_radius, region_bounds, region_contains, RegionQuery};
use bargmann_core::invariants::{bargmann, n_product};
use bargmann_core::linalg::{factor_gram, gram_matrix, haar_unit_vector, haar_unitary, random_density, StateTuple};
use bargmann_core::twoqubit::{entangled_by_invariants, imaginarity_quadratic, ppt_oracle};
use bargmann_core::SplitRng;
use proptest::prelude::*;

fn pure_tuple(n: usize, d: usize, seed: u64) -> StateTuple {
    let mut rng = SplitRng::new(seed);
    StateTuple::from_pure((0..n).map(|_| haar_unit_vector(d, &mut rng).unwrap()).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn invariant_is_unitarily_invariant(n in 2usize..7, d in 2usize..5, seed in any::<u64>()) {
        let t = pure_tuple(n, d, seed);
        let u = haar_unitary(d, &mut SplitRng::new(seed ^ 1)).unwrap();
        let a = bargmann(&t).unwrap().value;
        let b = bargmann(&t.transformed(&u)).unwrap().value;
        prop_assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn invariant_is_cyclic_and_reverses_to_conjugate(n in 2usize..7, d in 2usize..5, seed in any::<u64>()) {
        let t = pure_tuple(n, d, seed);
        let z = bargmann(&t).unwrap().value;
        let rotated: Vec<usize> = (0..n).map(|k| (k + 1) % n).collect();
        let reversed: Vec<usize> = (0..n).rev().collect();
        prop_assert!((n_product(&t, &rotated).unwrap().value - z).norm() < 1e-12);
        prop_assert!((n_product(&t, &reversed).unwrap().value - z.conj()).norm() < 1e-12);
    }

    #[test]
    fn invariants_lie_in_region(n in 3usize..8, d in 2usize..6, seed in any::<u64>()) {
        let z = bargmann(&pure_tuple(n, d, seed)).unwrap().value;
        prop_assert!(region_contains(&RegionQuery::new(n, z).unwrap(), 1e-9).unwrap());
        let b = region_bounds(n).unwrap();
        prop_assert!(z.re >= b.min_real - 1e-9);
        prop_assert!(z.im.abs() <= b.tau + 1e-9);
    }

    #[test]
    fn boundary_is_symmetric(n in 3usize..12, theta in 0.0..std::f64::consts::TAU) {
        let a = boundary_radius(n, theta).unwrap();
        let b = boundary_radius(n, std::f64::consts::TAU - theta).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!(a <= 1.0 + 1e-15);
    }

    #[test]
    fn gram_round_trip(n in 1usize..7, d in 1usize..5, seed in any::<u64>()) {
        let t = pure_tuple(n, d, seed);
        let g = gram_matrix(&t).unwrap();
        let back = factor_gram(&g, 1e-9).unwrap();
        prop_assert!(gram_matrix(&back).unwrap().matrix().max_abs_diff(g.matrix()) < 1e-9);
        prop_assert!(joint_unitary_equivalent(&t, &back, 1e-9).unwrap().equivalent);
    }

    #[test]
    fn circulantization_keeps_phase_and_raises_modulus(n in 3usize..8, d in 2usize..4, seed in any::<u64>()) {
        let t = pure_tuple(n, d, seed);
        let c = circulantize(&t).unwrap();
        prop_assert!((c.invariant_after.arg() - c.invariant_before.arg()).abs() < 1e-9
            || ((c.invariant_after.arg() - c.invariant_before.arg()).abs() - std::f64::consts::TAU).abs() < 1e-9);
        prop_assert!(c.invariant_after.norm() >= c.invariant_before.norm() - 1e-12);
        let spec = CirculantSpec::from_matrix(c.gram.matrix()).unwrap();
        prop_assert!(is_circulant_gram(&spec, 1e-9).is_gram);
    }

    #[test]
    fn reconstruction_is_projectively_equivalent(n in 2usize..6, d in 2usize..4, seed in any::<u64>()) {
        let t = pure_tuple(n, d, seed);
        let r = reconstruct_tuple(&TupleOracle::new(&t), 1e-6).unwrap();
        prop_assert!(joint_projective_equivalent(&t, &r.tuple, 1e-8).unwrap());
        prop_assert!(r.invariant_calls <= (n - 1) * (n - 1));
    }

    #[test]
    fn criterion_tracks_partial_transpose(rank in 1usize..5, seed in any::<u64>()) {
        let rho = random_density(4, rank, &mut SplitRng::new(seed)).unwrap();
        let det = ppt_oracle(&rho, 0.0).unwrap().det_gamma;
        let lhs = entangled_by_invariants(&rho, 0.0).unwrap().lhs;
        assert_abs_diff_eq!(lhs, 1.0 + 24.0 * det, epsilon = 1e-10);
    }

    #[test]
    fn quadratic_holds(n in 2usize..9, seed in any::<u64>()) {
        let q = imaginarity_quadratic(&pure_tuple(n, 2, seed)).unwrap();
        prop_assert!(q.residual <= 1e-9);
    }
}

#[test]
fn two_hundred_gram_round_trips() {
    let master = SplitRng::new(2);
    for k in 0..200u64 {
        let mut rng = master.split(k);
        let n = 2 + (k % 5) as usize;
        let d = 2 + (k % 3) as usize;
        let t = StateTuple::from_pure((0..n).map(|_| haar_unit_vector(d, &mut rng).unwrap()).collect()).unwrap();
        let g = gram_matrix(&t).unwrap();
        let back = gram_matrix(&factor_gram(&g, 1e-9).unwrap()).unwrap();
        assert!(back.matrix().max_abs_diff(g.matrix()) < 1e-9);
    }
}

#[test]
fn region_is_dimension_independent() {
    // the qubit extremal point at theta = pi is reached, and no higher-dimensional draw exceeds it
    let min_real = (0..2000u64)
        .map(|s| bargmann(&pure_tuple(3, 5, s)).unwrap().value.re)
        .fold(f64::INFINITY, f64::min);
    assert!(min_real >= -0.125 - 1e-9);
    let z = bargmann_core::geometry::obg_invariant(3, 0.5).unwrap();
    assert_abs_diff_eq!(z.re, -0.125, epsilon = 1e-15);
    assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
}
