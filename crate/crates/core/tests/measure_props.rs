mod support;

use entroof::measures::{
    entanglement_entropy_pure, entanglement_number_pure, entanglement_number_reduced, entanglement_number_schmidt,
    geometric_measure_pure, geometric_measure_schmidt, negativity_pure, negativity_pure_via_transpose, p_number_pure,
    power_deficit,
};
use entroof::{random, BipartiteDims, LogBase, Matrix, MeasureSpec, State};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dims() -> impl Strategy<Value = BipartiteDims> {
    (2usize..=4, 2usize..=4).prop_map(|(a, b)| BipartiteDims::new(a, b).unwrap())
}

fn all_measures(d: BipartiteDims) -> Vec<MeasureSpec> {
    let mut v = vec![
        MeasureSpec::EntanglementNumber,
        MeasureSpec::PNumber { p: 1.5 },
        MeasureSpec::PNumber { p: 3.0 },
        MeasureSpec::EntanglementEntropy { base: LogBase::Two },
        MeasureSpec::EntanglementEntropy { base: LogBase::E },
        MeasureSpec::Negativity,
        MeasureSpec::GeometricMeasure { ranks: vec![1, 1] },
    ];
    v.extend((1..=d.min_dim()).map(|k| MeasureSpec::Concurrence { k }));
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn entanglement_number_routes_agree(d in dims(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi: State = random::pure_state(d, &mut rng);
        let a = entanglement_number_pure(&psi);
        let b = entanglement_number_schmidt(&psi);
        let c = entanglement_number_reduced(&psi);
        prop_assert!((a - b).abs() <= 1e-10 && (a - c).abs() <= 1e-10 && (b - c).abs() <= 1e-10);
    }

    #[test]
    fn measures_are_local_unitary_invariant(d in dims(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi: State = random::pure_state(d, &mut rng);
        let u: Matrix = random::unitary(d.dim_a(), &mut rng);
        let v: Matrix = random::unitary(d.dim_b(), &mut rng);
        let moved = psi.apply_local(&u, &v).unwrap();
        for m in all_measures(d) {
            let (x, y) = (m.evaluate(&psi).unwrap(), m.evaluate(&moved).unwrap());
            prop_assert!((x - y).abs() <= 1e-9, "{} {x} {y}", m.name());
        }
    }

    #[test]
    fn measures_lie_between_zero_and_supremum(d in dims(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi: State = random::pure_state(d, &mut rng);
        for m in all_measures(d) {
            let x = m.evaluate(&psi).unwrap();
            let sup: f64 = m.supremum(d);
            prop_assert!(x >= 0.0 && x <= sup + 1e-12, "{} {x} > {sup}", m.name());
        }
    }

    #[test]
    fn product_states_score_zero(d in dims(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi: State = random::product_state(d, &mut rng);
        for m in all_measures(d) {
            let x = m.evaluate(&psi).unwrap();
            match m {
                // C_1 is the constant 1; the geometric overlap is maximal on products.
                MeasureSpec::Concurrence { k: 1 } | MeasureSpec::GeometricMeasure { .. } => {
                    prop_assert!((x - 1.0).abs() <= 1e-7, "{}", m.name())
                }
                _ => prop_assert!(x.abs() <= 1e-7, "{} = {x}", m.name()),
            }
        }
    }

    #[test]
    fn larger_p_gives_larger_p_number(seed in any::<u64>(), p in 1.01f64..4.0, dq in 0.01f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi: State = random::pure_state(BipartiteDims::new(3, 3).unwrap(), &mut rng);
        let lo: f64 = p_number_pure(&psi, p).unwrap();
        let hi: f64 = p_number_pure(&psi, p + dq).unwrap();
        prop_assert!(0.0 < lo && lo < hi && hi < 1.0);
    }

    #[test]
    fn power_deficit_slope_at_one_is_natural_entropy(d in dims(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi: State = random::pure_state(d, &mut rng);
        let h = 1e-4;
        let slope = (power_deficit(&psi, 1.0 + h) - power_deficit(&psi, 1.0 - h)) / (2.0 * h);
        prop_assert!((slope - entanglement_entropy_pure(&psi, LogBase::E)).abs() <= 1e-4);
    }

    #[test]
    fn negativity_routes_agree(d in dims(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi: State = random::pure_state(d, &mut rng);
        let a: f64 = negativity_pure(&psi).unwrap();
        let b: f64 = negativity_pure_via_transpose(&psi).unwrap();
        prop_assert!((a - b).abs() <= 1e-9);
    }
}

#[test]
fn alternating_geometric_measure_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let d = BipartiteDims::new(3, 4).unwrap();
    for _ in 0..20 {
        let psi: State = random::pure_state(d, &mut rng);
        for ranks in [[1, 1], [2, 2], [1, 3], [2, 1]] {
            let alt: f64 = geometric_measure_pure(&psi, &ranks).unwrap();
            let exact: f64 = geometric_measure_schmidt(&psi, &ranks).unwrap();
            assert!((alt - exact).abs() <= 1e-8, "{ranks:?}: {alt} vs {exact}");
        }
    }
}

#[test]
fn entropy_agrees_with_independent_two_qubit_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let psi: State = random::pure_state(BipartiteDims::qubits(), &mut rng);
        let ours = entanglement_entropy_pure(&psi, LogBase::Two);
        assert!((ours - support::pure_entropy_via_oracle(&psi)).abs() <= 1e-10);
    }
}

#[test]
fn bell_state_values() {
    let bell = State::maximally_entangled(2).unwrap();
    let eval = |m: MeasureSpec| m.evaluate(&bell).unwrap();
    assert!((eval(MeasureSpec::EntanglementNumber) - 0.7071067811865475).abs() <= 1e-12);
    assert!((eval(MeasureSpec::PNumber { p: 3.0 }) - 0.75f64.powf(1.0 / 3.0)).abs() <= 1e-12);
    assert!((eval(MeasureSpec::Negativity) - 1.0).abs() <= 1e-10);
    assert!((eval(MeasureSpec::Concurrence { k: 2 }) - 1.0).abs() <= 1e-10);
    assert!((eval(MeasureSpec::GeometricMeasure { ranks: vec![1, 1] }) - 0.5).abs() <= 1e-8);
    assert!((eval(MeasureSpec::EntanglementEntropy { base: LogBase::Two }) - 1.0).abs() <= 1e-12);
}

#[test]
fn invalid_parameters_are_rejected() {
    let d = BipartiteDims::qubits();
    assert!(MeasureSpec::PNumber { p: 1.0 }.validate(d).is_err());
    assert!(MeasureSpec::Concurrence { k: 3 }.validate(d).is_err());
    assert!(MeasureSpec::GeometricMeasure { ranks: vec![3, 1] }.validate(d).is_err());
    assert!(MeasureSpec::Negativity.validate(BipartiteDims::new(1, 4).unwrap()).is_err());
}
