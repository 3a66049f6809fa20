use num_complex::Complex64;
use qrc::bounds::{bipartite_entanglement, check_lower_bounds, check_upper_bound};
use qrc::linalg::{CVector, PureState};
use qrc::ops::{haar_state_with, haar_unitary_with, pauli, pauli_decompose, u_psi_for, PauliIndex, UnitaryGate};
use qrc::protocols::{
    bidirectional_setup, bidirectional_u_teleport, control_state_teleport, fidelity_on, ControlEncoding, BETA,
};
use qrc::runtime::{LoccRuntime, Party, ResourceLedger};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn haar_sweep_is_exact_in_every_branch() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..100 {
        let u = haar_unitary_with(&mut rng, 2);
        let psi = haar_state_with(&mut rng, 2);
        let run = bidirectional_u_teleport(&bidirectional_setup(&psi).unwrap(), &u, BETA).unwrap();
        assert_eq!(run.report.ledger, ResourceLedger::new(2, 2, 2));
        // Direct product as oracle, independent of the protocol's ideal state.
        let target = PureState::new(vec![BETA.into()], u.apply(&psi).unwrap()).unwrap();
        for b in &run.enumeration.branches {
            assert!(fidelity_on(&b.state, &target).unwrap() >= 1.0 - 1e-9);
        }
    }
}

#[test]
fn final_state_is_the_pauli_expansion_applied_to_psi() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let u = haar_unitary_with(&mut rng, 2);
        let psi = haar_state_with(&mut rng, 2);
        let alpha = pauli_decompose(u.matrix()).unwrap();
        let mut direct = CVector::zeros(2);
        for mu in PauliIndex::ALL {
            let term = pauli(mu).apply(&psi).unwrap().scale(alpha.get(mu));
            direct = &direct + &term;
        }

        let run = bidirectional_u_teleport(&bidirectional_setup(&psi).unwrap(), &u, BETA).unwrap();
        for b in &run.enumeration.branches {
            let (beta, _, residual) = b.state.split_with_residual(&[BETA]).unwrap();
            assert!(residual <= 1e-10);
            let beta = beta.amplitudes();
            let phase = direct.overlap(beta).unwrap();
            let phase = phase / phase.norm();
            let aligned = direct.scale(phase);
            assert!(beta.max_abs_diff(&aligned) <= 1e-10);
        }
    }
}

#[test]
fn every_run_meets_the_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let u = haar_unitary_with(&mut rng, 2);
    let psi = haar_state_with(&mut rng, 2);
    let run = bidirectional_u_teleport(&bidirectional_setup(&psi).unwrap(), &u, BETA).unwrap();
    assert!(check_lower_bounds(&run.report.ledger).iter().all(|c| c.passed));
    assert!(check_upper_bound(&run.report.ledger).iter().all(|c| c.passed));
    assert_eq!(run.report.branches, 16);
}

#[test]
fn u_psi_routes_psi_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let psi = haar_state_with(&mut rng, 2);
    let u = u_psi_for(&psi).unwrap();
    let run = bidirectional_u_teleport(&bidirectional_setup(&psi).unwrap(), &u, BETA).unwrap();
    let zero = PureState::basis([BETA], 0).unwrap();
    for b in &run.enumeration.branches {
        assert!(fidelity_on(&b.state, &zero).unwrap() >= 1.0 - 1e-10);
    }
}

#[test]
fn bob_entangled_target_keeps_its_entanglement() {
    // β is half of a Bell pair with Bob's reference; U acts through the scheme
    // and the reference correlations must follow.
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let u = haar_unitary_with(&mut rng, 2);
    let mut rt = LoccRuntime::enumerating();
    let pair = PureState::new(
        vec![BETA.into(), "ref".into()],
        CVector::new(vec![
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.8),
        ]),
    )
    .unwrap();
    rt.add_qubits(Party::Bob, pair.clone()).unwrap();
    rt.distribute_bell_pair("alpha", "b_in").unwrap();
    rt.distribute_bell_pair("a_out", "b_out").unwrap();
    let run = bidirectional_u_teleport(&rt, &u, BETA).unwrap();

    let mut expected = pair;
    expected.apply(u.matrix(), &[BETA]).unwrap();
    for b in &run.enumeration.branches {
        assert!(fidelity_on(&b.state, &expected).unwrap() >= 1.0 - 1e-10);
        assert!(bipartite_entanglement(&b.state, &b.runtime().owned_by(Party::Alice)).unwrap() <= 1e-9);
    }
}

#[test]
fn control_teleport_for_every_pauli() {
    let enc = ControlEncoding::pauli_set();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let psi = haar_state_with(&mut rng, 2);
    for k in 0..4 {
        let mut rt = LoccRuntime::enumerating();
        rt.add_qubit(Party::Bob, BETA, psi[0], psi[1]).unwrap();
        rt.distribute_bell_pair("a0", "b0").unwrap();
        rt.distribute_bell_pair("a1", "b1").unwrap();
        let run = control_state_teleport(&rt, &enc, k, BETA).unwrap();
        assert_eq!(run.report.ledger, ResourceLedger::new(2, 4, 0));
        let target = PureState::new(vec![BETA.into()], enc.unitaries()[k].apply(&psi).unwrap()).unwrap();
        for b in &run.enumeration.branches {
            assert!(fidelity_on(&b.state, &target).unwrap() >= 1.0 - 1e-9);
        }
    }
}

#[test]
fn control_teleport_rejects_wrong_owner_and_missing_pairs() {
    let enc = ControlEncoding::pauli_set();
    let mut rt = LoccRuntime::enumerating();
    rt.add_qubit(Party::Alice, BETA, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
        .unwrap();
    assert!(control_state_teleport(&rt, &enc, 0, BETA).is_err());

    let mut rt = LoccRuntime::enumerating();
    rt.add_qubit(Party::Bob, BETA, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
        .unwrap();
    rt.distribute_bell_pair("a0", "b0").unwrap();
    assert!(control_state_teleport(&rt, &enc, 0, BETA).is_err());
    assert!(bidirectional_u_teleport(&rt, &UnitaryGate::identity(1), BETA).is_err());
}
