use entroof::linalg::{eigvalsh, lift_local, partial_trace, reshape_to_coefficient_matrix};
use entroof::measures::{column_overlap_sum, fourth_power_deficit, trace_abs_fourth};
use entroof::{random, BipartiteDims, Complex, Density, Matrix, Side, State, State32};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dims() -> impl Strategy<Value = BipartiteDims> {
    (1usize..=4, 1usize..=4).prop_map(|(a, b)| BipartiteDims::new(a, b).unwrap())
}

fn spectral_norm(c: &Matrix) -> f64 {
    eigvalsh(&(&c.adjoint() * c)).unwrap()[0].max(0.0).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coefficient_matrix_round_trips(d in dims(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi: State = random::pure_state(d, &mut rng);
        let c = reshape_to_coefficient_matrix(&psi);
        prop_assert_eq!((c.rows(), c.cols()), (d.dim_a(), d.dim_b()));
        prop_assert_eq!(c.as_slice(), psi.amplitudes());
        let back = State::from_coefficients(&c).unwrap();
        let err: f64 = back.amplitudes().iter().zip(psi.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-15);
    }

    #[test]
    fn fourth_power_trace_equals_column_overlaps(r in 1usize..=8, c in 1usize..=8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m: Matrix = random::ginibre(r, c, &mut rng);
        let scale = spectral_norm(&m).powi(4);
        let diff = (trace_abs_fourth(&m) - column_overlap_sum(&m)).abs();
        prop_assert!(diff <= 1e-12 * scale, "diff {diff:e} scale {scale:e}");
        let frob4 = m.frobenius_norm().powi(4);
        prop_assert!((frob4 - trace_abs_fourth(&m) - fourth_power_deficit(&m)).abs() <= 1e-12 * frob4);
    }

    #[test]
    fn local_operator_moves_through_partial_trace(d in dims(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Matrix = random::ginibre(d.dim_a(), d.dim_a(), &mut rng);
        let rho: Density = random::density(d, d.total(), &mut rng);
        let big = lift_local(&a, d, Side::A).unwrap();
        let lhs = partial_trace(&(&(&big * rho.matrix()) * &big.adjoint()), d, Side::A).unwrap();
        let ata = lift_local(&(&a.adjoint() * &a), d, Side::A).unwrap();
        let rhs = partial_trace(&(&ata * rho.matrix()), d, Side::A).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn reduced_spectra_match_schmidt_weights(d in dims(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi: State = random::pure_state(d, &mut rng);
        let lambdas = psi.schmidt_weights();
        for side in [Side::A, Side::B] {
            let spec = eigvalsh(&psi.reduced(side)).unwrap();
            for (i, l) in lambdas.iter().enumerate() {
                prop_assert!((spec[i] - l).abs() <= 1e-10);
            }
            for extra in &spec[lambdas.len()..] {
                prop_assert!(extra.abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn partial_trace_is_linear(d in dims(), seed in any::<u64>(), t in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Matrix = random::ginibre(d.total(), d.total(), &mut rng);
        let y: Matrix = random::ginibre(d.total(), d.total(), &mut rng);
        let s = Complex::new(t, 1.0 - t);
        for side in [Side::A, Side::B] {
            let lhs = partial_trace(&(&x.scale_complex(s) + &y), d, side).unwrap();
            let rhs = &partial_trace(&x, d, side).unwrap().scale_complex(s) + &partial_trace(&y, d, side).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
        }
    }

    #[test]
    fn schmidt_decomposition_reconstructs(d in dims(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi: State = random::pure_state(d, &mut rng);
        let s = psi.schmidt();
        let rebuilt = s.reconstruct();
        let err: f64 = rebuilt.iter().zip(psi.amplitudes()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(err <= 1e-10);
        let total: f64 = s.lambdas.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn local_unitaries_preserve_schmidt_weights(d in dims(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi: State = random::pure_state(d, &mut rng);
        let u: Matrix = random::unitary(d.dim_a(), &mut rng);
        let v: Matrix = random::unitary(d.dim_b(), &mut rng);
        let moved = psi.apply_local(&u, &v).unwrap();
        let (a, b) = (psi.schmidt_weights(), moved.schmidt_weights());
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }
}

#[test]
fn single_precision_bell_state() {
    let bell = State32::maximally_entangled(2).unwrap();
    assert_eq!(bell.schmidt_weights().len(), 2);
    let e = entroof::measures::entanglement_number_pure(&bell);
    assert!((e - std::f32::consts::FRAC_1_SQRT_2).abs() < 1e-6);
}

#[test]
fn density_constructor_rejects_each_invariant() {
    let d = BipartiteDims::qubits();
    let mut m = Matrix::identity(4).scale(0.25);
    m[(0, 1)] = Complex::new(0.1, 0.0);
    assert!(Density::new(m, d).is_err());
    assert!(Density::new(Matrix::identity(4).scale(0.5), d).is_err());
    let neg = Matrix::from_real_diagonal(&[0.6, 0.6, -0.1, -0.1]);
    assert!(Density::new(neg, d).is_err());
}
