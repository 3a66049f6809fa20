//! Unidirectional remote control: Alice encodes the choice of unitary in a
//! control register, teleports it to Bob, and Bob applies the controlled
//! operation locally.

use std::collections::BTreeMap;

use crate::bounds::{check_lower_bounds, BoundCheck, Direction};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, Label, PureState, Tensor};
use crate::ops::{pauli, PauliIndex, UnitaryGate};
use crate::runtime::{Enumeration, LoccRuntime, Party};

use super::bidirectional::{completeness_check, exact_ledger_checks, payload_state};
use super::{fidelity_on, teleport_state, ProtocolReport, FIDELITY_TOLERANCE};

const ORTHONORMAL_TOLERANCE: f64 = 1e-12;

/// A finite set of single-qubit unitaries and the control states that
/// select them.
#[derive(Debug, Clone)]
pub struct ControlEncoding {
    unitaries: Vec<UnitaryGate>,
    control_states: Vec<CVector>,
    control_qubits: usize,
}

impl ControlEncoding {
    /// Computational-basis control states `|k⟩`.
    pub fn new(unitaries: Vec<UnitaryGate>) -> Result<Self> {
        let qubits = Self::qubits_for(unitaries.len())?;
        let states = (0..unitaries.len()).map(|k| CVector::basis(1 << qubits, k)).collect();
        Self::with_control_states(unitaries, states)
    }

    /// Explicit control states; they must be orthonormal and live in the
    /// padded register.
    pub fn with_control_states(unitaries: Vec<UnitaryGate>, control_states: Vec<CVector>) -> Result<Self> {
        let qubits = Self::qubits_for(unitaries.len())?;
        let dim = 1usize << qubits;
        if control_states.len() != unitaries.len() {
            return Err(Error::DimensionMismatch {
                expected: unitaries.len(),
                found: control_states.len(),
            });
        }
        for u in &unitaries {
            if u.arity() != 1 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    found: u.dim(),
                });
            }
        }
        for (i, a) in control_states.iter().enumerate() {
            if a.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: a.dim(),
                });
            }
            if (a.norm() - 1.0).abs() > ORTHONORMAL_TOLERANCE {
                return Err(Error::NotNormalized { norm: a.norm() });
            }
            for b in &control_states[..i] {
                let overlap = b.overlap(a)?.norm();
                if overlap > ORTHONORMAL_TOLERANCE {
                    return Err(Error::NotOrthogonal { overlap });
                }
            }
        }
        Ok(ControlEncoding {
            unitaries,
            control_states,
            control_qubits: qubits,
        })
    }

    /// `𝟙, σ_x, σ_y, σ_z` on a two-qubit control register.
    pub fn pauli_set() -> Self {
        let set = PauliIndex::ALL.iter().map(|&m| pauli(m)).collect();
        ControlEncoding::new(set).expect("Pauli set is a valid encoding")
    }

    fn qubits_for(len: usize) -> Result<usize> {
        if len == 0 {
            return Err(Error::Precondition("control encoding needs at least one unitary".into()));
        }
        Ok((len.next_power_of_two().trailing_zeros() as usize).max(1))
    }

    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }

    pub fn unitaries(&self) -> &[UnitaryGate] {
        &self.unitaries
    }

    pub fn control_qubits(&self) -> usize {
        self.control_qubits
    }

    /// Dimension of the padded control register.
    pub fn control_dim(&self) -> usize {
        1 << self.control_qubits
    }

    /// Control state selecting `U_k`. Padding slots are not selectable.
    pub fn control_state(&self, k: usize) -> Result<&CVector> {
        self.control_states.get(k).ok_or(Error::IndexOutOfRange {
            what: "control index",
            index: k,
            limit: self.len(),
        })
    }

    /// `Σ_k |c_k⟩⟨c_k| ⊗ U_k + (𝟙 − Σ_k |c_k⟩⟨c_k|) ⊗ 𝟙`, control first.
    pub fn controlled_unitary(&self) -> UnitaryGate {
        let d = self.control_dim();
        let mut projector_sum = CMatrix::zeros(d, d);
        let mut total = CMatrix::zeros(2 * d, 2 * d);
        for (c, u) in self.control_states.iter().zip(&self.unitaries) {
            let p = c.outer(c);
            total = &total + &p.tensor(u.matrix());
            projector_sum = &projector_sum + &p;
        }
        let rest = &CMatrix::identity(d) - &projector_sum;
        total = &total + &rest.tensor(&CMatrix::identity(2));
        UnitaryGate::new(total).expect("controlled unitary of an orthonormal encoding")
    }
}

#[derive(Debug, Clone)]
pub struct ControlTeleportation {
    pub enumeration: Enumeration,
    pub report: ProtocolReport,
    /// Expected final state of the non-pair qubits, with the control
    /// register renamed to Bob's pair ends.
    pub ideal: PureState,
}

/// Teleports `|c_k⟩` to Bob, who then applies `U_k` to `beta`.
pub fn control_state_teleport(
    rt: &LoccRuntime,
    enc: &ControlEncoding,
    k: usize,
    beta: &str,
) -> Result<ControlTeleportation> {
    let control = enc.control_state(k)?.clone();
    control_state_teleport_input(rt, enc, &control, beta)
}

/// Same protocol for an arbitrary (normalized) control vector.
pub fn control_state_teleport_input(
    rt: &LoccRuntime,
    enc: &ControlEncoding,
    control: &CVector,
    beta: &str,
) -> Result<ControlTeleportation> {
    if rt.owner(beta)? != Party::Bob {
        return Err(Error::Ownership {
            party: Party::Bob,
            label: beta.to_owned(),
        });
    }
    let n = enc.control_qubits();
    let pairs = rt.unused_bell_pairs();
    if pairs.len() < n {
        return Err(Error::MissingBellPair(beta.to_owned()));
    }
    let pairs = pairs[..n].to_vec();

    let mut ctl_labels = Vec::with_capacity(n);
    let mut j = 0;
    while ctl_labels.len() < n {
        let label = format!("ctl{j}");
        if !rt.state().contains(&label) {
            ctl_labels.push(Label::new(label));
        }
        j += 1;
    }
    let control_state = PureState::new(ctl_labels.clone(), control.normalized()?)?;
    let mut start = rt.clone();
    start.add_qubits(Party::Alice, control_state)?;

    let controlled = enc.controlled_unitary();
    let mut ideal = payload_state(&start)?;
    let mut targets: Vec<Label> = ctl_labels.clone();
    targets.push(Label::new(beta));
    ideal.apply(controlled.matrix(), &targets)?;
    let renamed = ideal
        .labels()
        .iter()
        .map(|l| match ctl_labels.iter().position(|c| c == l) {
            Some(i) => pairs[i].1.clone(),
            None => l.clone(),
        })
        .collect();
    let ideal = ideal.relabeled(renamed)?;

    let enumeration = start.run_enumerated(|rt| {
        for (ctl, (_, bob_end)) in ctl_labels.iter().zip(&pairs) {
            teleport_state(rt, ctl.as_str(), bob_end.as_str())?;
        }
        let mut targets: Vec<&str> = pairs.iter().map(|(_, b)| b.as_str()).collect();
        targets.push(beta);
        rt.apply_local(Party::Bob, &controlled, &targets)
    })?;

    let mut fidelity = f64::INFINITY;
    for b in &enumeration.branches {
        fidelity = fidelity.min(fidelity_on(&b.state, &ideal)?);
    }

    let mut entropies = BTreeMap::new();
    entropies.insert("cut_entropy_initial".to_owned(), start.cut_entropy()?);

    let ledger = enumeration.ledger;
    let n64 = n as u64;
    let mut bound_checks = Vec::new();
    if enc.control_dim() >= 4 {
        bound_checks.extend(check_lower_bounds(&ledger));
    }
    bound_checks.extend(exact_ledger_checks(&ledger, (n64, 2 * n64, 0)));
    bound_checks.push(completeness_check(&enumeration));
    bound_checks.push(BoundCheck::new(
        "min_branch_fidelity",
        fidelity,
        Direction::AtLeast,
        1.0,
        FIDELITY_TOLERANCE,
    ));

    let report = ProtocolReport {
        name: "control-teleport".to_owned(),
        ledger,
        fidelity,
        entropies,
        bound_checks,
        branches: enumeration.branches.len(),
    };
    Ok(ControlTeleportation {
        enumeration,
        report,
        ideal,
    })
}
