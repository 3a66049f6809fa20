//! Demonstrations that the bidirectional scheme sits exactly on the
//! classical-bit and ebit lower bounds.

use crate::bounds::bipartite_entanglement;
use crate::error::Result;
use crate::linalg::matrix::ONE;
use crate::linalg::{CVector, Label, PureState};
use crate::ops::{bell_state, pauli, BellIndex, PauliIndex};
use crate::runtime::{Basis, LoccRuntime, Party, ResourceLedger};

use super::bidirectional::{bidirectional_script, ALICE_RETURN, ALPHA, BETA, BOB_INBOUND, BOB_RETURN};
use super::control::ControlEncoding;

/// Bob's second qubit, entangled with `β` before the protocol starts.
const BETA_PRIME: &str = "beta_p";
const REFERENCE: [&str; 2] = ["r0", "r1"];
const CONTROL: [&str; 2] = ["c0", "c1"];

fn runtime_with_bob_pair() -> Result<LoccRuntime> {
    let mut rt = LoccRuntime::enumerating();
    let b0 = PureState::new(vec![BETA.into(), BETA_PRIME.into()], bell_state(BellIndex::ALL[0]))?;
    rt.add_qubits(Party::Bob, b0)?;
    Ok(rt)
}

fn distribute_pairs(rt: &mut LoccRuntime) -> Result<()> {
    rt.distribute_bell_pair(ALPHA, BOB_INBOUND)?;
    rt.distribute_bell_pair(ALICE_RETURN, BOB_RETURN)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseCodingOutcome {
    pub sent: PauliIndex,
    /// `(decoded value, probability)` for every branch.
    pub decoded: Vec<(usize, f64)>,
    pub ledger: ResourceLedger,
    pub correct: usize,
}

impl DenseCodingOutcome {
    pub fn branches(&self) -> usize {
        self.decoded.len()
    }

    /// The value Bob reads, if every branch agrees on it.
    pub fn decoded_value(&self) -> Option<usize> {
        let first = self.decoded.first()?.0;
        self.decoded.iter().all(|&(v, _)| v == first).then_some(first)
    }

    pub fn deterministic(&self) -> bool {
        self.correct == self.decoded.len() && !self.decoded.is_empty()
    }
}

/// Alice remotely applies `σ^μ` to Bob's `β`, where `ββ'` starts in `|B^0⟩`;
/// Bob's Bell measurement of `ββ'` then reveals `μ`.
pub fn dense_coding_bound_demo(mu: PauliIndex) -> Result<DenseCodingOutcome> {
    let mut rt = runtime_with_bob_pair()?;
    distribute_pairs(&mut rt)?;
    let gate = pauli(mu);
    let run = rt.run_enumerated(|rt| {
        bidirectional_script(rt, BETA, |rt, alpha| rt.apply_local(Party::Alice, &gate, &[alpha]))?;
        rt.measure_local(Party::Bob, &[BETA, BETA_PRIME], Basis::Bell)?;
        Ok(())
    })?;
    let decoded: Vec<(usize, f64)> = run
        .branches
        .iter()
        .map(|b| {
            let last = b.outcomes.last().expect("decoding measurement");
            (last.value, b.probability)
        })
        .collect();
    let correct = decoded.iter().filter(|&&(v, _)| v == mu.value()).count();
    Ok(DenseCodingOutcome {
        sent: mu,
        decoded,
        ledger: run.ledger,
        correct,
    })
}

/// Entropies of one measurement record of the coherent-control run.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementBranch {
    pub outcomes: Vec<usize>,
    pub probability: f64,
    /// Entropy of everything Bob holds.
    pub entropy: f64,
    /// Entropy of Bob's qubits other than `ββ'`, given reference value `μ`.
    pub conditional_entropies: [f64; 4],
    /// `|E − (2 + ¼ Σ_μ S_μ)|`.
    pub identity_gap: f64,
    /// Largest failure of `ββ'` to factor out given `μ`.
    pub block_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementBound {
    pub ledger: ResourceLedger,
    pub branches: Vec<EntanglementBranch>,
}

impl EntanglementBound {
    pub fn min_entropy(&self) -> f64 {
        self.branches.iter().map(|b| b.entropy).fold(f64::INFINITY, f64::min)
    }

    pub fn max_entropy(&self) -> f64 {
        self.branches.iter().map(|b| b.entropy).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_identity_gap(&self) -> f64 {
        self.branches.iter().map(|b| b.identity_gap).fold(0.0, f64::max)
    }

    pub fn max_block_residual(&self) -> f64 {
        self.branches.iter().map(|b| b.block_residual).fold(0.0, f64::max)
    }
}

/// Runs the bidirectional scheme with `U` chosen coherently by a control
/// register `C` maximally entangled with a reference `R`, and measures how
/// much entanglement Bob ends up sharing with Alice.
///
/// The control acts only on Alice's side, so the whole run stays LOCC.
pub fn entanglement_bound_demo() -> Result<EntanglementBound> {
    let mut rt = runtime_with_bob_pair()?;
    let mut rc = CVector::zeros(16);
    for mu in 0..4 {
        rc[(mu << 2) | mu] = ONE * 0.5;
    }
    let labels: Vec<Label> = REFERENCE.iter().chain(&CONTROL).map(|&l| Label::new(l)).collect();
    rt.add_qubits(Party::Alice, PureState::new(labels, rc)?)?;
    distribute_pairs(&mut rt)?;

    let controlled = ControlEncoding::pauli_set().controlled_unitary();
    let run = rt.run_enumerated(|rt| {
        bidirectional_script(rt, BETA, |rt, alpha| {
            rt.apply_local(Party::Alice, &controlled, &[CONTROL[0], CONTROL[1], alpha])
        })
    })?;

    let mut branches = Vec::with_capacity(run.branches.len());
    for b in &run.branches {
        let bob = b.runtime().owned_by(Party::Bob);
        let entropy = bipartite_entanglement(&b.state, &bob)?;
        let ancilla: Vec<&Label> = bob
            .iter()
            .filter(|l| l.as_str() != BETA && l.as_str() != BETA_PRIME)
            .collect();

        let mut conditional_entropies = [0.0; 4];
        let mut block_residual = 0.0f64;
        for mu in 0..4 {
            let (rest, amps) = b.state.contract(&REFERENCE, &CVector::basis(4, mu))?;
            let conditioned = PureState::new(rest, amps.normalized()?)?;
            conditional_entropies[mu] = conditioned.reduced_density(&ancilla)?.entropy()?;
            let (_, _, residual) = conditioned.split_with_residual(&[BETA, BETA_PRIME])?;
            block_residual = block_residual.max(residual);
        }
        let expected = 2.0 + 0.25 * conditional_entropies.iter().sum::<f64>();
        branches.push(EntanglementBranch {
            outcomes: b.outcome_values(),
            probability: b.probability,
            entropy,
            conditional_entropies,
            identity_gap: (entropy - expected).abs(),
            block_residual,
        });
    }
    Ok(EntanglementBound {
        ledger: run.ledger,
        branches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_coding_decodes_mu() {
        for mu in PauliIndex::ALL {
            let out = dense_coding_bound_demo(mu).unwrap();
            assert_eq!(out.branches(), 16);
            assert!(out.deterministic());
            assert_eq!(out.decoded_value(), Some(mu.value()));
            assert_eq!(out.ledger, ResourceLedger::new(2, 2, 2));
            let total: f64 = out.decoded.iter().map(|d| d.1).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn entanglement_is_exactly_two() {
        let bound = entanglement_bound_demo().unwrap();
        assert_eq!(bound.branches.len(), 16);
        assert!((bound.min_entropy() - 2.0).abs() < 1e-9);
        assert!((bound.max_entropy() - 2.0).abs() < 1e-9);
        assert!(bound.max_identity_gap() < 1e-9);
        assert!(bound.max_block_residual() < 1e-9);
        for b in &bound.branches {
            for s in b.conditional_entropies {
                assert!(s.abs() < 1e-9);
            }
        }
    }
}
