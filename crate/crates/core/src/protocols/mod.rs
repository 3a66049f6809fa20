//! Constructive remote-control protocols and the numerical checks of their
//! lower bounds and no-go arguments.

mod bidirectional;
mod control;
mod demos;
mod teleport;
mod verifiers;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use bidirectional::{
    bidirectional_script, bidirectional_setup, bidirectional_u_teleport, UnitaryTeleportation, ALPHA,
    ALICE_RETURN, BETA, BOB_INBOUND, BOB_RETURN,
};
pub use control::{control_state_teleport, control_state_teleport_input, ControlEncoding, ControlTeleportation};
pub use demos::{
    dense_coding_bound_demo, entanglement_bound_demo, DenseCodingOutcome, EntanglementBound, EntanglementBranch,
};
pub use teleport::teleport_state;
pub use verifiers::{
    ancilla_independence_check, control_orthogonality_witness, g1_state_transfer_check, trivial_g1_nogo_check,
    IndependenceCheck, NoGoWitness, OrthogonalityWitness, StateTransferCheck,
};

use crate::bounds::BoundCheck;
use crate::error::Result;
use crate::linalg::PureState;
use crate::runtime::ResourceLedger;

/// Branch-wise fidelities below `1 - FIDELITY_TOLERANCE` count as failures.
pub const FIDELITY_TOLERANCE: f64 = 1e-9;

/// Summary of one protocol execution over all of its branches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub name: String,
    pub ledger: ResourceLedger,
    /// Minimum fidelity over branches.
    pub fidelity: f64,
    pub entropies: BTreeMap<String, f64>,
    pub bound_checks: Vec<BoundCheck>,
    pub branches: usize,
}

impl ProtocolReport {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.bound_checks.iter().all(|c| c.passed) && self.fidelity >= 1.0 - tolerance
    }
}

/// `⟨Ω|ρ|Ω⟩` where `ρ` is `state` reduced to the qubits of `ideal`.
pub fn fidelity_on(state: &PureState, ideal: &PureState) -> Result<f64> {
    let rho = state.reduced_density(ideal.labels())?;
    Ok(rho.fidelity_with_pure(ideal.amplitudes())?.clamp(0.0, 1.0))
}
