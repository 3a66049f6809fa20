//! Two-party LOCC execution environment.
//!
//! A [`LoccRuntime`] holds one global pure state whose qubits are each owned
//! by Alice or Bob. Unitaries and measurements are only accepted on qubits
//! owned by the acting party, so no joint operation across the cut can be
//! expressed. Shared entanglement enters only through
//! [`LoccRuntime::distribute_bell_pair`] and classical data only through
//! [`LoccRuntime::send_classical`], both of which are counted in the
//! [`ResourceLedger`].
//!
//! Branch enumeration replays a protocol script once per measurement record.
//! In [`Mode::Enumerate`] every measurement either follows a forced outcome
//! supplied by the driver or takes the first outcome with nonzero probability
//! and reports its siblings, which the driver then explores.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::io::{self, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CVector, Label, PureState, TOL_NORM};
use crate::ops::{bell_state, BellIndex, UnitaryGate};

/// Outcomes with smaller probability are treated as impossible.
pub const MIN_BRANCH_PROBABILITY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }

    fn slot(self) -> usize {
        match self {
            Party::Alice => 0,
            Party::Bob => 1,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::Alice => f.write_str("Alice"),
            Party::Bob => f.write_str("Bob"),
        }
    }
}

/// Nonlocal resources consumed so far. Counters only grow.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResourceLedger {
    ebits: u64,
    cbits_a_to_b: u64,
    cbits_b_to_a: u64,
}

impl ResourceLedger {
    pub fn new(ebits: u64, cbits_a_to_b: u64, cbits_b_to_a: u64) -> Self {
        ResourceLedger {
            ebits,
            cbits_a_to_b,
            cbits_b_to_a,
        }
    }

    pub fn ebits(&self) -> u64 {
        self.ebits
    }

    pub fn cbits_a_to_b(&self) -> u64 {
        self.cbits_a_to_b
    }

    pub fn cbits_b_to_a(&self) -> u64 {
        self.cbits_b_to_a
    }

    pub fn cbits_total(&self) -> u64 {
        self.cbits_a_to_b + self.cbits_b_to_a
    }

    fn add_cbits(&mut self, from: Party, bits: u32) {
        match from {
            Party::Alice => self.cbits_a_to_b += u64::from(bits),
            Party::Bob => self.cbits_b_to_a += u64::from(bits),
        }
    }
}

impl fmt::Display for ResourceLedger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} ebits, {} cbits A→B, {} cbits B→A)",
            self.ebits, self.cbits_a_to_b, self.cbits_b_to_a
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Computational,
    Bell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MeasurementId(pub usize);

/// A recorded measurement result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: MeasurementId,
    pub party: Party,
    pub basis: Basis,
    pub value: usize,
    /// Classical size of the result: 2 for a Bell outcome, one per qubit otherwise.
    pub bits: u32,
    pub probability: f64,
}

impl Outcome {
    pub fn bell_index(&self) -> Option<BellIndex> {
        match self.basis {
            Basis::Bell => BellIndex::new(self.value).ok(),
            Basis::Computational => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub from: Party,
    pub bits: u32,
    pub value: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Sample { seed: u64 },
    Enumerate,
}

/// One line of the optional step trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: usize,
    pub op: String,
    pub party: Option<Party>,
    pub labels: Vec<Label>,
    pub ledger: ResourceLedger,
}

#[derive(Debug, Clone)]
struct BellPairRecord {
    alice: Label,
    bob: Label,
    used: bool,
}

#[derive(Debug, Clone)]
struct BranchPoint {
    depth: usize,
    alternatives: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct LoccRuntime {
    state: PureState,
    owners: BTreeMap<Label, Party>,
    pairs: Vec<BellPairRecord>,
    ledger: ResourceLedger,
    mode: Mode,
    rng: ChaCha8Rng,
    inbox: [VecDeque<Message>; 2],
    outcomes: Vec<Outcome>,
    probability: f64,
    forced: VecDeque<usize>,
    taken: Vec<usize>,
    branch_points: Vec<BranchPoint>,
    trace: Option<Vec<TraceRecord>>,
    used_analysis_dilation: bool,
}

/// One complete measurement record of an enumerated script.
#[derive(Debug, Clone)]
pub struct Branch {
    pub outcomes: Vec<Outcome>,
    pub probability: f64,
    pub state: PureState,
    pub ledger: ResourceLedger,
    pub trace: Vec<TraceRecord>,
    runtime: LoccRuntime,
}

impl Branch {
    /// Runtime as it stood when the script finished on this branch.
    pub fn runtime(&self) -> &LoccRuntime {
        &self.runtime
    }

    pub fn outcome_values(&self) -> Vec<usize> {
        self.outcomes.iter().map(|o| o.value).collect()
    }
}

/// All branches of a script; the ledger is shared by every branch.
#[derive(Debug, Clone)]
pub struct Enumeration {
    pub ledger: ResourceLedger,
    pub branches: Vec<Branch>,
}

impl Enumeration {
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }
}

impl LoccRuntime {
    pub fn new(mode: Mode) -> Self {
        let seed = match mode {
            Mode::Sample { seed } => seed,
            Mode::Enumerate => 0,
        };
        LoccRuntime {
            state: PureState::empty(),
            owners: BTreeMap::new(),
            pairs: Vec::new(),
            ledger: ResourceLedger::default(),
            mode,
            rng: ChaCha8Rng::seed_from_u64(seed),
            inbox: [VecDeque::new(), VecDeque::new()],
            outcomes: Vec::new(),
            probability: 1.0,
            forced: VecDeque::new(),
            taken: Vec::new(),
            branch_points: Vec::new(),
            trace: None,
            used_analysis_dilation: false,
        }
    }

    pub fn enumerating() -> Self {
        LoccRuntime::new(Mode::Enumerate)
    }

    pub fn sampling(seed: u64) -> Self {
        LoccRuntime::new(Mode::Sample { seed })
    }

    /// Enables the per-operation step trace.
    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn ledger(&self) -> ResourceLedger {
        self.ledger
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn last_outcome(&self) -> Option<&Outcome> {
        self.outcomes.last()
    }

    /// Probability of the measurement record so far.
    pub fn probability(&self) -> f64 {
        self.probability
    }

    pub fn trace(&self) -> &[TraceRecord] {
        self.trace.as_deref().unwrap_or(&[])
    }

    /// Whether [`LoccRuntime::apply_analysis_dilation`] was ever used.
    pub fn used_analysis_dilation(&self) -> bool {
        self.used_analysis_dilation
    }

    pub fn owner(&self, label: &str) -> Result<Party> {
        self.owners
            .get(&Label::from(label))
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_owned()))
    }

    /// Qubits owned by `party`, in global state order.
    pub fn owned_by(&self, party: Party) -> Vec<Label> {
        self.state
            .labels()
            .iter()
            .filter(|l| self.owners.get(*l) == Some(&party))
            .cloned()
            .collect()
    }

    fn record(&mut self, op: &str, party: Option<Party>, labels: Vec<Label>) {
        let ledger = self.ledger;
        if let Some(trace) = self.trace.as_mut() {
            let step = trace.len();
            trace.push(TraceRecord {
                step,
                op: op.to_owned(),
                party,
                labels,
                ledger,
            });
        }
    }

    fn check_fresh(&self, label: &str) -> Result<()> {
        if self.state.contains(label) {
            return Err(Error::DuplicateLabel(label.to_owned()));
        }
        Ok(())
    }

    fn check_owned<L: AsRef<str>>(&self, party: Party, targets: &[L]) -> Result<()> {
        for t in targets {
            let owner = self.owner(t.as_ref())?;
            if owner != party {
                return Err(Error::Ownership {
                    party,
                    label: t.as_ref().to_owned(),
                });
            }
        }
        Ok(())
    }

    pub fn add_qubit(&mut self, party: Party, label: &str, a0: Complex64, a1: Complex64) -> Result<()> {
        self.check_fresh(label)?;
        let q = PureState::qubit(label, a0, a1)?;
        self.attach(party, q, "add_qubit")
    }

    /// Adds a locally prepared multi-qubit state, all owned by `party`.
    pub fn add_qubits(&mut self, party: Party, state: PureState) -> Result<()> {
        for l in state.labels() {
            self.check_fresh(l.as_str())?;
        }
        self.attach(party, state, "add_qubits")
    }

    fn attach(&mut self, party: Party, part: PureState, op: &str) -> Result<()> {
        self.state = self.state.tensor(&part)?;
        for l in part.labels() {
            self.owners.insert(l.clone(), party);
        }
        self.record(op, Some(party), part.labels().to_vec());
        Ok(())
    }

    /// Shares a fresh `|B⁰⟩` with Alice's half first. Costs one ebit.
    pub fn distribute_bell_pair(&mut self, label_at_alice: &str, label_at_bob: &str) -> Result<()> {
        self.check_fresh(label_at_alice)?;
        self.check_fresh(label_at_bob)?;
        if label_at_alice == label_at_bob {
            return Err(Error::DuplicateLabel(label_at_alice.to_owned()));
        }
        let pair = PureState::new(
            vec![label_at_alice.into(), label_at_bob.into()],
            bell_state(BellIndex::ALL[0]),
        )?;
        self.state = self.state.tensor(&pair)?;
        self.owners.insert(label_at_alice.into(), Party::Alice);
        self.owners.insert(label_at_bob.into(), Party::Bob);
        self.pairs.push(BellPairRecord {
            alice: label_at_alice.into(),
            bob: label_at_bob.into(),
            used: false,
        });
        self.ledger.ebits += 1;
        self.record(
            "distribute_bell_pair",
            None,
            vec![label_at_alice.into(), label_at_bob.into()],
        );
        Ok(())
    }

    /// Distributed pairs not yet claimed, as `(Alice's end, Bob's end)`.
    pub fn unused_bell_pairs(&self) -> Vec<(Label, Label)> {
        self.pairs
            .iter()
            .filter(|p| !p.used)
            .map(|p| (p.alice.clone(), p.bob.clone()))
            .collect()
    }

    /// The other end of an unused distributed pair that has one end at
    /// `label`, marking the pair as used.
    pub fn claim_bell_pair(&mut self, label: &str) -> Result<Label> {
        let record = self
            .pairs
            .iter_mut()
            .find(|p| !p.used && (p.alice.as_str() == label || p.bob.as_str() == label))
            .ok_or_else(|| Error::MissingBellPair(label.to_owned()))?;
        record.used = true;
        Ok(if record.alice.as_str() == label {
            record.bob.clone()
        } else {
            record.alice.clone()
        })
    }

    pub fn apply_local<L: AsRef<str>>(&mut self, party: Party, gate: &UnitaryGate, targets: &[L]) -> Result<()> {
        self.check_owned(party, targets)?;
        if gate.arity() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << targets.len(),
                found: gate.dim(),
            });
        }
        self.state.apply(gate.matrix(), targets)?;
        self.record(
            "apply_local",
            Some(party),
            targets.iter().map(|t| Label::new(t.as_ref())).collect(),
        );
        Ok(())
    }

    /// Applies `gate` without ownership checks and without touching the
    /// ledger. Only for analysis constructions that are not themselves
    /// protocol steps; every use is flagged in the trace.
    pub fn apply_analysis_dilation<L: AsRef<str>>(&mut self, gate: &UnitaryGate, targets: &[L]) -> Result<()> {
        if gate.arity() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << targets.len(),
                found: gate.dim(),
            });
        }
        self.state.apply(gate.matrix(), targets)?;
        self.used_analysis_dilation = true;
        self.record(
            "analysis_dilation",
            None,
            targets.iter().map(|t| Label::new(t.as_ref())).collect(),
        );
        Ok(())
    }

    pub fn measure_local<L: AsRef<str>>(&mut self, party: Party, targets: &[L], basis: Basis) -> Result<Outcome> {
        self.check_owned(party, targets)?;
        let projectors: Vec<CVector> = match basis {
            Basis::Bell => {
                if targets.len() != 2 {
                    return Err(Error::Precondition(format!(
                        "a Bell measurement needs 2 qubits, got {}",
                        targets.len()
                    )));
                }
                BellIndex::ALL.iter().map(|&mu| bell_state(mu)).collect()
            }
            Basis::Computational => {
                let d = 1usize << targets.len();
                (0..d).map(|k| CVector::basis(d, k)).collect()
            }
        };
        let mut feasible = Vec::with_capacity(projectors.len());
        for (value, v) in projectors.iter().enumerate() {
            let (p, post) = self.state.project(targets, v)?;
            if let Some(post) = post {
                if p >= MIN_BRANCH_PROBABILITY {
                    feasible.push((value, p, post));
                }
            }
        }
        if feasible.is_empty() {
            return Err(Error::NotNormalized {
                norm: self.state.norm(),
            });
        }

        let depth = self.taken.len();
        let chosen = match self.mode {
            Mode::Enumerate => match self.forced.pop_front() {
                Some(forced) => feasible
                    .iter()
                    .position(|(v, _, _)| *v == forced)
                    .ok_or_else(|| Error::Precondition(format!("forced outcome {forced} is impossible")))?,
                None => {
                    let alternatives = feasible[1..].iter().map(|(v, _, _)| *v).collect::<Vec<_>>();
                    if !alternatives.is_empty() {
                        self.branch_points.push(BranchPoint { depth, alternatives });
                    }
                    0
                }
            },
            Mode::Sample { .. } => {
                let total: f64 = feasible.iter().map(|(_, p, _)| p).sum();
                let mut r = self.rng.random::<f64>() * total;
                let mut pick = feasible.len() - 1;
                for (i, (_, p, _)) in feasible.iter().enumerate() {
                    if r < *p {
                        pick = i;
                        break;
                    }
                    r -= p;
                }
                pick
            }
        };
        let (value, p, post) = feasible.swap_remove(chosen);
        self.state = post;
        self.probability *= p;
        self.taken.push(value);

        let outcome = Outcome {
            id: MeasurementId(self.outcomes.len()),
            party,
            basis,
            value,
            bits: match basis {
                Basis::Bell => 2,
                Basis::Computational => targets.len() as u32,
            },
            probability: p,
        };
        self.outcomes.push(outcome.clone());
        self.record(
            "measure_local",
            Some(party),
            targets.iter().map(|t| Label::new(t.as_ref())).collect(),
        );
        Ok(outcome)
    }

    /// Sends `bits` classical bits carrying `payload` from one party to the other.
    pub fn send_classical(&mut self, from: Party, to: Party, bits: u32, payload: u64) -> Result<()> {
        if from == to {
            return Err(Error::Precondition(format!("{from} cannot message itself")));
        }
        if bits < 64 && payload >> bits != 0 {
            return Err(Error::PayloadTooWide { bits, value: payload });
        }
        self.ledger.add_cbits(from, bits);
        self.inbox[to.slot()].push_back(Message {
            from,
            bits,
            value: payload,
        });
        self.record("send_classical", Some(from), Vec::new());
        Ok(())
    }

    /// Sends a measurement result at its natural size (2 bits for a Bell outcome).
    pub fn send_outcome(&mut self, from: Party, to: Party, outcome: &Outcome) -> Result<()> {
        self.send_classical(from, to, outcome.bits, outcome.value as u64)
    }

    /// Next message waiting for `party`, in send order.
    pub fn receive(&mut self, party: Party) -> Option<Message> {
        self.inbox[party.slot()].pop_front()
    }

    /// Entropy of entanglement across the Alice/Bob cut, in ebits.
    pub fn cut_entropy(&self) -> Result<f64> {
        let alice = self.owned_by(Party::Alice);
        if alice.is_empty() || alice.len() == self.state.num_qubits() {
            return Ok(0.0);
        }
        self.state.reduced_density(&alice)?.entropy()
    }

    /// Runs `script` once per measurement record and returns every branch.
    ///
    /// Branches are ordered by their outcome values. Fails with
    /// [`Error::LedgerMismatch`] if the resources used differ between branches.
    pub fn run_enumerated<F>(&self, script: F) -> Result<Enumeration>
    where
        F: Fn(&mut LoccRuntime) -> Result<()>,
    {
        if self.mode != Mode::Enumerate {
            return Err(Error::Precondition("run_enumerated needs Mode::Enumerate".into()));
        }
        let mut pending: Vec<Vec<usize>> = vec![Vec::new()];
        let mut branches = Vec::new();
        while let Some(path) = pending.pop() {
            let mut rt = self.clone();
            rt.forced = path.iter().copied().collect();
            rt.taken.clear();
            rt.branch_points.clear();
            script(&mut rt)?;
            rt.check_normalized()?;
            if !rt.forced.is_empty() {
                return Err(Error::Precondition(
                    "script measured fewer times on replay than recorded".into(),
                ));
            }
            for bp in &rt.branch_points {
                for &alt in &bp.alternatives {
                    let mut next = rt.taken[..bp.depth].to_vec();
                    next.push(alt);
                    pending.push(next);
                }
            }
            let new_outcomes = rt.outcomes[self.outcomes.len()..].to_vec();
            let new_trace = rt.trace()[self.trace().len()..].to_vec();
            branches.push(Branch {
                outcomes: new_outcomes,
                probability: rt.probability / self.probability,
                state: rt.state.clone(),
                ledger: rt.ledger,
                trace: new_trace,
                runtime: rt,
            });
        }
        branches.sort_by(|a, b| a.outcome_values().cmp(&b.outcome_values()));
        let ledger = branches[0].ledger;
        if branches.iter().any(|b| b.ledger != ledger) {
            return Err(Error::LedgerMismatch);
        }
        Ok(Enumeration { ledger, branches })
    }

    /// Writes the step trace as JSON lines.
    pub fn write_trace(&self, out: &mut impl Write) -> io::Result<()> {
        write_trace(self.trace(), out)
    }

    pub(crate) fn check_normalized(&self) -> Result<()> {
        let norm = self.state.norm();
        if (norm - 1.0).abs() > TOL_NORM {
            return Err(Error::NotNormalized { norm });
        }
        Ok(())
    }
}

/// Writes trace records as JSON lines.
pub fn write_trace(records: &[TraceRecord], out: &mut impl Write) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut *out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{ONE, ZERO};
    use crate::ops::{hadamard, pauli, PauliIndex};

    fn x() -> UnitaryGate {
        pauli(PauliIndex::ALL[1])
    }

    #[test]
    fn add_qubit_builds_product_in_order() {
        let mut rt = LoccRuntime::enumerating();
        rt.add_qubit(Party::Alice, "a", ONE, ZERO).unwrap();
        assert_eq!(rt.state().amplitudes(), &CVector::basis(2, 0));
        let mut rt = LoccRuntime::enumerating();
        rt.add_qubit(Party::Alice, "a", ZERO, ONE).unwrap();
        rt.add_qubit(Party::Bob, "b", ONE, ZERO).unwrap();
        assert_eq!(rt.state().amplitudes(), &CVector::basis(4, 0b10));
    }

    #[test]
    fn add_qubit_validation() {
        let mut rt = LoccRuntime::enumerating();
        assert!(matches!(
            rt.add_qubit(Party::Alice, "a", ONE, ONE),
            Err(Error::NotNormalized { .. })
        ));
        rt.add_qubit(Party::Alice, "a", ONE, ZERO).unwrap();
        assert_eq!(
            rt.add_qubit(Party::Bob, "a", ONE, ZERO).unwrap_err(),
            Error::DuplicateLabel("a".into())
        );
    }

    #[test]
    fn bell_pairs_cost_one_ebit_each() {
        let mut rt = LoccRuntime::enumerating();
        rt.distribute_bell_pair("a0", "b0").unwrap();
        assert_eq!(rt.ledger().ebits(), 1);
        let half = rt.state().reduced_density(&["b0"]).unwrap();
        assert!((half.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((rt.cut_entropy().unwrap() - 1.0).abs() < 1e-12);
        rt.distribute_bell_pair("a1", "b1").unwrap();
        assert_eq!(rt.ledger().ebits(), 2);
        assert!((rt.cut_entropy().unwrap() - 2.0).abs() < 1e-12);
        assert!(rt.distribute_bell_pair("a1", "b9").is_err());
    }

    #[test]
    fn local_pauli_on_bell_half() {
        let mut rt = LoccRuntime::enumerating();
        rt.distribute_bell_pair("a", "b").unwrap();
        rt.apply_local(Party::Alice, &x(), &["a"]).unwrap();
        let b1 = bell_state(BellIndex::ALL[1]);
        assert!(rt.state().amplitudes().max_abs_diff(&b1) < 1e-15);
    }

    #[test]
    fn ownership_is_enforced() {
        let mut rt = LoccRuntime::enumerating();
        rt.distribute_bell_pair("a", "b").unwrap();
        assert_eq!(
            rt.apply_local(Party::Bob, &x(), &["a"]).unwrap_err(),
            Error::Ownership {
                party: Party::Bob,
                label: "a".into()
            }
        );
        assert!(rt
            .measure_local(Party::Alice, &["a", "b"], Basis::Bell)
            .is_err());
    }

    #[test]
    fn identity_leaves_state() {
        let mut rt = LoccRuntime::enumerating();
        rt.distribute_bell_pair("a", "b").unwrap();
        let before = rt.state().clone();
        rt.apply_local(Party::Bob, &UnitaryGate::identity(1), &["b"]).unwrap();
        assert_eq!(&before, rt.state());
    }

    #[test]
    fn computational_measurement_of_zero() {
        let mut rt = LoccRuntime::sampling(3);
        rt.add_qubit(Party::Alice, "a", ONE, ZERO).unwrap();
        let o = rt.measure_local(Party::Alice, &["a"], Basis::Computational).unwrap();
        assert_eq!(o.value, 0);
        assert!((o.probability - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bell_measure_of_b3_is_certain() {
        let mut rt = LoccRuntime::enumerating();
        let b3 = PureState::new(vec!["p".into(), "q".into()], bell_state(BellIndex::ALL[3])).unwrap();
        rt.add_qubits(Party::Bob, b3).unwrap();
        let run = rt
            .run_enumerated(|rt| rt.measure_local(Party::Bob, &["p", "q"], Basis::Bell).map(|_| ()))
            .unwrap();
        assert_eq!(run.branches.len(), 1);
        assert_eq!(run.branches[0].outcomes[0].value, 3);
        assert!((run.branches[0].probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn enumerate_bell_measurement_on_entangled_input() {
        // Alice's |+⟩ together with her half of a Bell pair: four equiprobable outcomes.
        let mut rt = LoccRuntime::enumerating();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        rt.add_qubit(Party::Alice, "s", Complex64::new(h, 0.0), Complex64::new(h, 0.0))
            .unwrap();
        rt.distribute_bell_pair("a", "b").unwrap();
        let run = rt
            .run_enumerated(|rt| rt.measure_local(Party::Alice, &["s", "a"], Basis::Bell).map(|_| ()))
            .unwrap();
        assert_eq!(run.branches.len(), 4);
        for (k, b) in run.branches.iter().enumerate() {
            assert_eq!(b.outcomes[0].value, k);
            assert!((b.probability - 0.25).abs() < 1e-12);
            assert!((b.state.norm() - 1.0).abs() < 1e-12);
        }
        assert!((run.total_probability() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn script_without_measurement_has_one_branch() {
        let mut rt = LoccRuntime::enumerating();
        rt.add_qubit(Party::Alice, "a", ONE, ZERO).unwrap();
        let run = rt
            .run_enumerated(|rt| rt.apply_local(Party::Alice, &hadamard(), &["a"]))
            .unwrap();
        assert_eq!(run.branches.len(), 1);
        assert_eq!(run.branches[0].probability, 1.0);
    }

    #[test]
    fn nested_measurements_enumerate_all_records() {
        let mut rt = LoccRuntime::enumerating();
        rt.add_qubit(Party::Alice, "a", ONE, ZERO).unwrap();
        rt.add_qubit(Party::Bob, "b", ONE, ZERO).unwrap();
        let run = rt
            .run_enumerated(|rt| {
                rt.apply_local(Party::Alice, &hadamard(), &["a"])?;
                let o = rt.measure_local(Party::Alice, &["a"], Basis::Computational)?;
                rt.send_outcome(Party::Alice, Party::Bob, &o)?;
                rt.apply_local(Party::Bob, &hadamard(), &["b"])?;
                rt.measure_local(Party::Bob, &["b"], Basis::Computational)?;
                Ok(())
            })
            .unwrap();
        let records: Vec<Vec<usize>> = run.branches.iter().map(|b| b.outcome_values()).collect();
        assert_eq!(records, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(run.ledger, ResourceLedger::new(0, 1, 0));
    }

    #[test]
    fn outcome_dependent_resources_are_rejected() {
        let mut rt = LoccRuntime::enumerating();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        rt.add_qubit(Party::Alice, "a", Complex64::new(h, 0.0), Complex64::new(h, 0.0))
            .unwrap();
        let err = rt
            .run_enumerated(|rt| {
                let o = rt.measure_local(Party::Alice, &["a"], Basis::Computational)?;
                if o.value == 1 {
                    rt.send_classical(Party::Alice, Party::Bob, 1, 1)?;
                }
                Ok(())
            })
            .unwrap_err();
        assert_eq!(err, Error::LedgerMismatch);
    }

    #[test]
    fn classical_channel_counts_by_direction() {
        let mut rt = LoccRuntime::enumerating();
        rt.send_classical(Party::Alice, Party::Bob, 2, 3).unwrap();
        assert_eq!(rt.ledger().cbits_a_to_b(), 2);
        rt.send_classical(Party::Bob, Party::Alice, 2, 1).unwrap();
        assert_eq!(rt.ledger().cbits_b_to_a(), 2);
        assert_eq!(
            rt.receive(Party::Bob),
            Some(Message {
                from: Party::Alice,
                bits: 2,
                value: 3
            })
        );
        assert_eq!(rt.receive(Party::Bob), None);
        assert_eq!(rt.receive(Party::Alice).unwrap().value, 1);
        assert_eq!(
            rt.send_classical(Party::Alice, Party::Bob, 1, 2).unwrap_err(),
            Error::PayloadTooWide { bits: 1, value: 2 }
        );
        assert!(rt.send_classical(Party::Bob, Party::Bob, 1, 0).is_err());
    }

    #[test]
    fn analysis_dilation_skips_ownership_and_ledger() {
        let mut rt = LoccRuntime::enumerating().with_trace();
        rt.add_qubit(Party::Alice, "a", ONE, ZERO).unwrap();
        rt.add_qubit(Party::Bob, "b", ONE, ZERO).unwrap();
        let before = rt.ledger();
        rt.apply_analysis_dilation(&crate::ops::swap(), &["a", "b"]).unwrap();
        assert_eq!(rt.ledger(), before);
        assert!(rt.used_analysis_dilation());
        assert_eq!(rt.trace().last().unwrap().op, "analysis_dilation");
    }

    #[test]
    fn trace_is_json_lines() {
        let mut rt = LoccRuntime::enumerating().with_trace();
        rt.distribute_bell_pair("a", "b").unwrap();
        rt.send_classical(Party::Alice, Party::Bob, 2, 0).unwrap();
        let mut buf = Vec::new();
        rt.write_trace(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let rec: TraceRecord = serde_json::from_str(lines[1]).unwrap();
        assert_eq!(rec.op, "send_classical");
        assert_eq!(rec.ledger, ResourceLedger::new(1, 2, 0));
    }

    #[test]
    fn run_enumerated_requires_enumerate_mode() {
        let rt = LoccRuntime::sampling(0);
        assert!(matches!(rt.run_enumerated(|_| Ok(())), Err(Error::Precondition(_))));
    }

    #[test]
    fn missing_bell_pair() {
        let mut rt = LoccRuntime::enumerating();
        rt.distribute_bell_pair("a", "b").unwrap();
        assert_eq!(rt.claim_bell_pair("b").unwrap(), Label::from("a"));
        assert_eq!(rt.claim_bell_pair("b").unwrap_err(), Error::MissingBellPair("b".into()));
    }
}
