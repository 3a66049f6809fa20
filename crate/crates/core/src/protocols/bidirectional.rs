//! Bidirectional state teleportation: Bob teleports his qubit to Alice, she
//! applies `U` locally and teleports the result back.
//!
//! The first stage (Bob→Alice) plays the role of the fixed operation before
//! `U`, the second stage (Alice→Bob) the fixed operation after it. Bob ends
//! with a local SWAP so that the result sits on his original qubit.

use std::collections::BTreeMap;

use crate::bounds::{check_lower_bounds, check_upper_bound, BoundCheck, Direction};
use crate::error::{Error, Result};
use crate::linalg::{CVector, Label, PureState, TOL_HERMITIAN};
use crate::ops::{swap, UnitaryGate};
use crate::runtime::{Enumeration, LoccRuntime, Party};

use super::{fidelity_on, teleport_state, ProtocolReport, FIDELITY_TOLERANCE};

/// Bob's target qubit.
pub const BETA: &str = "beta";
/// Alice's end of the inbound pair; `U` acts here.
pub const ALPHA: &str = "alpha";
/// Bob's end of the inbound pair.
pub const BOB_INBOUND: &str = "b_in";
/// Alice's end of the return pair.
pub const ALICE_RETURN: &str = "a_out";
/// Bob's end of the return pair.
pub const BOB_RETURN: &str = "b_out";

/// Enumerating runtime with Bob's `β` in `psi` and the two pairs the
/// protocol consumes.
pub fn bidirectional_setup(psi: &CVector) -> Result<LoccRuntime> {
    if psi.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: psi.dim(),
        });
    }
    let mut rt = LoccRuntime::enumerating();
    rt.add_qubit(Party::Bob, BETA, psi[0], psi[1])?;
    rt.distribute_bell_pair(ALPHA, BOB_INBOUND)?;
    rt.distribute_bell_pair(ALICE_RETURN, BOB_RETURN)?;
    Ok(rt)
}

/// Protocol steps. Uses the first two unused pairs in distribution order;
/// `apply_u` receives the label of Alice's qubit holding Bob's state.
pub fn bidirectional_script<F>(rt: &mut LoccRuntime, beta: &str, apply_u: F) -> Result<()>
where
    F: FnOnce(&mut LoccRuntime, &str) -> Result<()>,
{
    let pairs = rt.unused_bell_pairs();
    if pairs.len() < 2 {
        return Err(Error::MissingBellPair(beta.to_owned()));
    }
    let (alpha, _) = &pairs[0];
    let (_, bob_return) = &pairs[1];

    teleport_state(rt, beta, alpha.as_str())?;
    apply_u(rt, alpha.as_str())?;
    teleport_state(rt, alpha.as_str(), bob_return.as_str())?;
    rt.apply_local(Party::Bob, &swap(), &[bob_return.as_str(), beta])
}

#[derive(Debug, Clone)]
pub struct UnitaryTeleportation {
    pub enumeration: Enumeration,
    pub report: ProtocolReport,
    /// Expected final state of every qubit that is not a distributed pair.
    pub ideal: PureState,
}

/// Qubits of `rt` that do not belong to unused distributed pairs, together
/// with their (product) state.
pub(crate) fn payload_state(rt: &LoccRuntime) -> Result<PureState> {
    let pair_labels: Vec<Label> = rt
        .unused_bell_pairs()
        .into_iter()
        .flat_map(|(a, b)| [a, b])
        .collect();
    let payload: Vec<Label> = rt
        .state()
        .labels()
        .iter()
        .filter(|l| !pair_labels.contains(l))
        .cloned()
        .collect();
    if payload.len() == rt.state().num_qubits() {
        return Ok(rt.state().clone());
    }
    let (kept, _) = rt.state().split(&payload, TOL_HERMITIAN)?;
    Ok(kept)
}

pub(crate) fn exact_ledger_checks(ledger: &crate::runtime::ResourceLedger, expected: (u64, u64, u64)) -> Vec<BoundCheck> {
    vec![
        BoundCheck::count("ledger_ebits", ledger.ebits(), Direction::Equal, expected.0),
        BoundCheck::count("ledger_cbits_a_to_b", ledger.cbits_a_to_b(), Direction::Equal, expected.1),
        BoundCheck::count("ledger_cbits_b_to_a", ledger.cbits_b_to_a(), Direction::Equal, expected.2),
    ]
}

pub(crate) fn completeness_check(enumeration: &Enumeration) -> BoundCheck {
    BoundCheck::new(
        "branch_probability_total",
        enumeration.total_probability(),
        Direction::Equal,
        1.0,
        1e-10,
    )
}

/// Runs the bidirectional protocol for `u` on Bob's qubit `beta`, over all
/// 16 measurement records.
pub fn bidirectional_u_teleport(rt: &LoccRuntime, u: &UnitaryGate, beta: &str) -> Result<UnitaryTeleportation> {
    if u.arity() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: u.dim(),
        });
    }
    if rt.owner(beta)? != Party::Bob {
        return Err(Error::Ownership {
            party: Party::Bob,
            label: beta.to_owned(),
        });
    }
    let mut ideal = payload_state(rt)?;
    ideal.apply(u.matrix(), &[beta])?;

    let enumeration = rt.run_enumerated(|rt| {
        bidirectional_script(rt, beta, |rt, alpha| rt.apply_local(Party::Alice, u, &[alpha]))
    })?;

    let mut fidelity = f64::INFINITY;
    let mut final_cut = 0.0f64;
    for b in &enumeration.branches {
        fidelity = fidelity.min(fidelity_on(&b.state, &ideal)?);
        final_cut = final_cut.max(b.runtime().cut_entropy()?);
    }

    let mut entropies = BTreeMap::new();
    entropies.insert("cut_entropy_initial".to_owned(), rt.cut_entropy()?);
    entropies.insert("cut_entropy_final_max".to_owned(), final_cut);

    let ledger = enumeration.ledger;
    let mut bound_checks = check_lower_bounds(&ledger);
    bound_checks.extend(check_upper_bound(&ledger));
    bound_checks.extend(exact_ledger_checks(&ledger, (2, 2, 2)));
    bound_checks.push(completeness_check(&enumeration));
    bound_checks.push(BoundCheck::new(
        "min_branch_fidelity",
        fidelity,
        Direction::AtLeast,
        1.0,
        FIDELITY_TOLERANCE,
    ));

    let report = ProtocolReport {
        name: "teleport-unitary".to_owned(),
        ledger,
        fidelity,
        entropies,
        bound_checks,
        branches: enumeration.branches.len(),
    };
    Ok(UnitaryTeleportation {
        enumeration,
        report,
        ideal,
    })
}
