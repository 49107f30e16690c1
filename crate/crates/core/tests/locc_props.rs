use entroof::locc::{
    audit_monotonicity, audit_nodes, final_nodes, precedes, run_tree, validate_tree, IssueKind, LoccNode, Party,
};
use entroof::{random, BipartiteDims, Density, LogBase, Matrix, MeasureSpec, RoofOptions, State};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn measures() -> Vec<MeasureSpec> {
    vec![
        MeasureSpec::EntanglementNumber,
        MeasureSpec::PNumber { p: 2.5 },
        MeasureSpec::EntanglementEntropy { base: LogBase::Two },
        MeasureSpec::Concurrence { k: 2 },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_trees_preserve_trace_and_probability(seed in any::<u64>(), rounds in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = BipartiteDims::new(2, 3).unwrap();
        let tree: LoccNode<f64> = random::locc_tree(d, rounds, 3, &mut rng);
        prop_assert!(validate_tree(&tree, d).is_valid());
        let rho: Density = random::density(d, 6, &mut rng);
        let run = run_tree(&tree, &rho).unwrap();
        prop_assert!((run.output.matrix().trace().re - 1.0).abs() <= 1e-9);
        for s in run.level_sums() {
            prop_assert!((s - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn pure_inputs_satisfy_every_node_inequality(seed in any::<u64>(), rounds in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = BipartiteDims::qubits();
        let tree: LoccNode<f64> = random::locc_tree(d, rounds, 3, &mut rng);
        let psi: State = random::pure_state(d, &mut rng);
        let rho = psi.to_density();
        for m in measures() {
            let audit = audit_nodes(&tree, &rho, &m, &RoofOptions::default()).unwrap();
            for row in audit.rows.iter().filter(|r| r.exact) {
                prop_assert!(row.slack >= -1e-9, "{} node {:?} slack {}", m.name(), row.node, row.slack);
            }
        }
    }

    #[test]
    fn final_nodes_are_the_structural_leaves(seed in any::<u64>(), rounds in 0usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tree: LoccNode<f64> = random::locc_tree(BipartiteDims::qubits(), rounds, 3, &mut rng);
        let ids = tree.node_ids();
        prop_assert_eq!(final_nodes(&ids), tree.structural_leaves());
        for x in &ids {
            prop_assert!(!precedes(x, x));
            for y in &ids {
                prop_assert!(!(precedes(x, y) && precedes(y, x)));
            }
        }
    }
}

#[test]
fn local_unitary_tree_keeps_every_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let d = BipartiteDims::qubits();
    let u: Matrix = random::unitary(2, &mut rng);
    let v: Matrix = random::unitary(2, &mut rng);
    let tree = LoccNode::with_children(Party::Alice, vec![u], vec![LoccNode::instrument(Party::Bob, vec![v])]);
    let psi: State = random::pure_state(d, &mut rng);
    for m in measures() {
        let audit = audit_monotonicity(&tree, &psi.to_density(), &m, &RoofOptions::default()).unwrap();
        for row in &audit.rows {
            assert!(row.slack.abs() <= 1e-10, "{} {:?}", m.name(), row.node);
        }
        assert!(audit.end_to_end.as_ref().unwrap().slack.abs() <= 1e-10);
    }
}

#[test]
fn identity_tree_returns_its_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let d = BipartiteDims::new(2, 3).unwrap();
    let rho: Density = random::density(d, 6, &mut rng);
    let run = run_tree(&LoccNode::identity(Party::Bob, 3), &rho).unwrap();
    assert!(run.output.matrix().max_abs_diff(rho.matrix()) <= 1e-14);
}

#[test]
fn bell_measured_by_alice_loses_all_entanglement() {
    let proj = |i: usize| {
        let mut k = Matrix::zeros(2, 2);
        k[(i, i)] = entroof::C64::new(1.0, 0.0);
        k
    };
    let tree = LoccNode::instrument(Party::Alice, vec![proj(0), proj(1)]);
    let bell = State::maximally_entangled(2).unwrap();
    let audit =
        audit_monotonicity(&tree, &bell.to_density(), &MeasureSpec::EntanglementNumber, &RoofOptions::default())
            .unwrap();
    assert_eq!(audit.rows.len(), 1);
    assert!((audit.rows[0].slack - 0.7071067811865475).abs() <= 1e-12);
    assert!(!audit.has_violation());
}

#[test]
fn incomplete_instrument_reports_its_residual() {
    let half = Matrix::identity(2).scale(0.5);
    let tree = LoccNode::instrument(Party::Alice, vec![half]);
    let report = validate_tree(&tree, BipartiteDims::qubits());
    assert_eq!(report.issues.len(), 1);
    match report.issues[0].kind {
        IssueKind::Incomplete { residual } => assert!((residual - 0.75).abs() <= 1e-12),
        ref other => panic!("unexpected issue {other:?}"),
    }
}

#[test]
fn dimension_changing_rounds_are_supported() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let d = BipartiteDims::qubits();
    let widen: Vec<Matrix> = random::instrument(2, 3, 2, &mut rng);
    let next: Vec<Matrix> = random::instrument(3, 3, 2, &mut rng);
    let children = vec![LoccNode::instrument(Party::Alice, next.clone()), LoccNode::instrument(Party::Alice, next)];
    let tree = LoccNode::with_children(Party::Alice, widen, children);
    assert!(validate_tree(&tree, d).is_valid());
    let run = run_tree(&tree, &random::density(d, 4, &mut rng)).unwrap();
    assert_eq!(run.output.dims(), BipartiteDims::new(3, 2).unwrap());
    assert!((run.output.matrix().trace().re - 1.0).abs() <= 1e-12);
}
