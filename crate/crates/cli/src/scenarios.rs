use std::io::{self, Write};

use qrc::bounds::{check_lower_bounds, BoundCheck, Direction, ENTROPY_TOLERANCE};
use qrc::linalg::{CVector, Complex64, PureState};
use qrc::ops::{hadamard, haar_state_with, haar_unitary_with, pauli_decompose, pauli_matrix, PauliIndex};
use qrc::protocols::{
    ancilla_independence_check, bidirectional_setup, bidirectional_u_teleport, control_orthogonality_witness,
    control_state_teleport, dense_coding_bound_demo, entanglement_bound_demo, fidelity_on, g1_state_transfer_check,
    teleport_state, trivial_g1_nogo_check, ControlEncoding, ProtocolReport, BETA, FIDELITY_TOLERANCE,
};
use qrc::runtime::{write_trace, LoccRuntime, Party, ResourceLedger, TraceRecord};
use qrc::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{RunConfig, Scenario};
use crate::report::Aggregate;

/// Two Bell measurements in the bidirectional scheme.
const DENSE_CODING_BRANCHES: u64 = 16;
const NOGO_TOLERANCE: f64 = 1e-12;
const WITNESS_SAMPLES: usize = 64;
const WITNESS_MIN_RANGE: f64 = 1e-3;
const WITNESS_PHASE_RANGE: f64 = 1e-10;
const ROUNDTRIP_TOLERANCE: f64 = 1e-11;

/// JSON-lines progress on stderr, enabled by `--verbose`.
pub struct Log {
    enabled: bool,
}

impl Log {
    pub fn new(enabled: bool) -> Self {
        Log { enabled }
    }

    pub fn enabled(&self) -> bool {
        self.enabled
    }

    fn event(&self, value: serde_json::Value) {
        if self.enabled {
            let mut err = io::stderr().lock();
            let _ = writeln!(err, "{value}");
        }
    }

    fn trace(&self, records: &[TraceRecord]) {
        if self.enabled {
            let _ = write_trace(records, &mut io::stderr().lock());
        }
    }
}

pub fn run(cfg: &RunConfig, log: &Log) -> Result<Aggregate> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut agg = Aggregate::default();
    log.event(json!({"event": "start", "scenario": cfg.scenario.name(), "seed": cfg.seed, "trials": cfg.trials}));
    match cfg.scenario {
        Scenario::TeleportState => teleport_states(cfg, log, &mut rng, &mut agg)?,
        Scenario::TeleportUnitary => teleport_unitaries(cfg, log, &mut rng, &mut agg)?,
        Scenario::ControlTeleport => control_teleport(cfg, log, &mut rng, &mut agg)?,
        Scenario::DenseCoding => dense_coding(log, &mut agg)?,
        Scenario::EbitBound => ebit_bound(log, &mut agg)?,
        Scenario::NogoTrivialG1 => nogo(cfg, log, &mut rng, &mut agg)?,
        Scenario::G1Transfer => g1_transfer(cfg, log, &mut rng, &mut agg)?,
        Scenario::Independence => independence(cfg, log, &mut rng, &mut agg)?,
        Scenario::OrthogonalityWitness => witness(cfg, log, &mut rng, &mut agg)?,
        Scenario::Decompose => decompose(cfg, log, &mut rng, &mut agg)?,
    }
    Ok(agg)
}

fn exact_ledger(ledger: ResourceLedger, expected: (u64, u64, u64)) -> [BoundCheck; 3] {
    [
        BoundCheck::count("ledger_ebits", ledger.ebits(), Direction::Equal, expected.0),
        BoundCheck::count("ledger_cbits_a_to_b", ledger.cbits_a_to_b(), Direction::Equal, expected.1),
        BoundCheck::count("ledger_cbits_b_to_a", ledger.cbits_b_to_a(), Direction::Equal, expected.2),
    ]
}

fn absorb(agg: &mut Aggregate, report: ProtocolReport) {
    agg.ledger(report.ledger);
    agg.fidelity(report.fidelity);
    for (k, v) in report.entropies {
        agg.entropy(k, v);
    }
    agg.checks(report.bound_checks);
}

fn runtime(traced: bool) -> LoccRuntime {
    if traced {
        LoccRuntime::enumerating().with_trace()
    } else {
        LoccRuntime::enumerating()
    }
}

fn teleport_states(cfg: &RunConfig, log: &Log, rng: &mut ChaCha8Rng, agg: &mut Aggregate) -> Result<()> {
    for t in 0..cfg.trials {
        let psi = haar_state_with(rng, 2);
        let mut rt = runtime(log.enabled() && t == 0);
        rt.add_qubit(Party::Alice, "src", psi[0], psi[1])?;
        rt.distribute_bell_pair("pair_a", "dst")?;
        let run = rt.run_enumerated(|rt| teleport_state(rt, "src", "dst").map(|_| ()))?;
        let ideal = PureState::new(vec!["dst".into()], psi)?;
        let mut fidelity = f64::INFINITY;
        for b in &run.branches {
            fidelity = fidelity.min(fidelity_on(&b.state, &ideal)?);
        }
        if t == 0 {
            log.trace(&run.branches[0].trace);
        }
        log.event(json!({"event": "trial", "index": t, "fidelity": fidelity, "branches": run.branches.len()}));
        agg.ledger(run.ledger);
        agg.fidelity(fidelity);
        agg.checks(exact_ledger(run.ledger, (1, 2, 0)));
        agg.check(BoundCheck::new(
            "branch_probability_total",
            run.total_probability(),
            Direction::Equal,
            1.0,
            1e-10,
        ));
        agg.check(BoundCheck::new(
            "min_branch_fidelity",
            fidelity,
            Direction::AtLeast,
            1.0,
            FIDELITY_TOLERANCE,
        ));
    }
    Ok(())
}

fn teleport_unitaries(cfg: &RunConfig, log: &Log, rng: &mut ChaCha8Rng, agg: &mut Aggregate) -> Result<()> {
    for t in 0..cfg.trials {
        let u = haar_unitary_with(rng, 2);
        let psi = haar_state_with(rng, 2);
        let mut rt = bidirectional_setup(&psi)?;
        if log.enabled() && t == 0 {
            rt = rt.with_trace();
        }
        let run = bidirectional_u_teleport(&rt, &u, BETA)?;
        if t == 0 {
            log.trace(&run.enumeration.branches[0].trace);
        }
        log.event(json!({"event": "trial", "index": t, "fidelity": run.report.fidelity, "branches": run.report.branches}));
        absorb(agg, run.report);
    }
    Ok(())
}

fn control_teleport(cfg: &RunConfig, log: &Log, rng: &mut ChaCha8Rng, agg: &mut Aggregate) -> Result<()> {
    let enc = ControlEncoding::pauli_set();
    for t in 0..cfg.trials {
        let psi = haar_state_with(rng, 2);
        for k in 0..enc.len() {
            let traced = log.enabled() && t == 0 && k == 0;
            let mut rt = runtime(traced);
            rt.add_qubit(Party::Bob, BETA, psi[0], psi[1])?;
            rt.distribute_bell_pair("a0", "b0")?;
            rt.distribute_bell_pair("a1", "b1")?;
            let run = control_state_teleport(&rt, &enc, k, BETA)?;
            if traced {
                log.trace(&run.enumeration.branches[0].trace);
            }
            log.event(json!({"event": "trial", "index": t, "k": k, "fidelity": run.report.fidelity}));
            absorb(agg, run.report);
        }
    }
    Ok(())
}

fn dense_coding(log: &Log, agg: &mut Aggregate) -> Result<()> {
    for mu in PauliIndex::ALL {
        let out = dense_coding_bound_demo(mu)?;
        let m = mu.value();
        let decoded = out.decoded_value().map_or(f64::NAN, |v| v as f64);
        log.event(json!({"event": "decoded", "sent": m, "decoded": out.decoded_value(), "correct": out.correct, "branches": out.branches()}));
        agg.ledger(out.ledger);
        agg.check(BoundCheck::new(format!("decoded_mu_{m}"), decoded, Direction::Equal, m as f64, 0.0));
        agg.check(BoundCheck::count(
            format!("correct_branches_mu_{m}"),
            out.correct as u64,
            Direction::Equal,
            DENSE_CODING_BRANCHES,
        ));
        agg.checks(check_lower_bounds(&out.ledger));
    }
    Ok(())
}

fn ebit_bound(log: &Log, agg: &mut Aggregate) -> Result<()> {
    let bound = entanglement_bound_demo()?;
    for b in &bound.branches {
        let record: Vec<String> = b.outcomes.iter().map(|v| v.to_string()).collect();
        agg.entropy(format!("E[{}]", record.join(",")), b.entropy);
        log.event(json!({
            "event": "branch",
            "outcomes": b.outcomes,
            "probability": b.probability,
            "entropy": b.entropy,
            "conditional_entropies": b.conditional_entropies,
        }));
    }
    agg.ledger(bound.ledger);
    agg.checks(check_lower_bounds(&bound.ledger));
    agg.check(BoundCheck::new(
        "min_branch_entropy",
        bound.min_entropy(),
        Direction::AtLeast,
        2.0,
        ENTROPY_TOLERANCE,
    ));
    agg.check(BoundCheck::new(
        "max_branch_entropy",
        bound.max_entropy(),
        Direction::Equal,
        2.0,
        ENTROPY_TOLERANCE,
    ));
    agg.check(BoundCheck::new(
        "entropy_identity_gap",
        bound.max_identity_gap(),
        Direction::AtMost,
        0.0,
        ENTROPY_TOLERANCE,
    ));
    agg.check(BoundCheck::new(
        "bell_block_residual",
        bound.max_block_residual(),
        Direction::AtMost,
        0.0,
        ENTROPY_TOLERANCE,
    ));
    Ok(())
}

fn nogo(cfg: &RunConfig, log: &Log, rng: &mut ChaCha8Rng, agg: &mut Aggregate) -> Result<()> {
    for t in 0..cfg.trials {
        let psi = haar_state_with(rng, 2);
        let phase = Complex64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU);
        let psi_perp = CVector::new(vec![-psi[1].conj() * phase, psi[0].conj() * phase]);
        let chi = haar_state_with(rng, 8);
        let u = haar_unitary_with(rng, 2);
        let w = trivial_g1_nogo_check(&chi, &psi, &psi_perp, &u)?;
        log.event(json!({"event": "trial", "index": t, "deficit": w.deficit}));
        agg.check(BoundCheck::new("deficit", w.deficit, Direction::Equal, 1.0, NOGO_TOLERANCE));
    }
    Ok(())
}

fn g1_transfer(cfg: &RunConfig, log: &Log, rng: &mut ChaCha8Rng, agg: &mut Aggregate) -> Result<()> {
    for t in 0..cfg.trials {
        let psi = haar_state_with(rng, 2);
        let check = g1_state_transfer_check(&psi)?;
        log.event(json!({"event": "trial", "index": t, "purity": check.min_purity, "fidelity": check.min_fidelity}));
        agg.ledger(check.ledger);
        agg.fidelity(check.min_fidelity);
        // Both pairs of the bidirectional setup are distributed up front.
        agg.checks(exact_ledger(check.ledger, (2, 0, 2)));
        agg.check(BoundCheck::new(
            "min_alpha_purity",
            check.min_purity,
            Direction::AtLeast,
            1.0,
            FIDELITY_TOLERANCE,
        ));
        agg.check(BoundCheck::new(
            "min_transfer_fidelity",
            check.min_fidelity,
            Direction::AtLeast,
            1.0,
            FIDELITY_TOLERANCE,
        ));
        agg.check(BoundCheck::new(
            "factor_residual",
            check.max_factor_residual,
            Direction::AtMost,
            0.0,
            FIDELITY_TOLERANCE,
        ));
    }
    Ok(())
}

fn independence(cfg: &RunConfig, log: &Log, rng: &mut ChaCha8Rng, agg: &mut Aggregate) -> Result<()> {
    let side = (cfg.trials as f64).sqrt().ceil() as usize;
    let us: Vec<_> = (0..side).map(|_| haar_unitary_with(rng, 2)).collect();
    let psis: Vec<_> = (0..side).map(|_| haar_state_with(rng, 2)).collect();
    let check = ancilla_independence_check(&us, &psis)?;
    log.event(json!({"event": "grid", "side": side, "runs": check.runs, "comparisons": check.comparisons}));
    agg.ledger(check.ledger);
    agg.check(BoundCheck::new(
        "ancilla_deviation",
        check.max_deviation,
        Direction::AtMost,
        0.0,
        FIDELITY_TOLERANCE,
    ));
    agg.check(BoundCheck::new(
        "ancilla_product_residual",
        check.max_product_residual,
        Direction::AtMost,
        0.0,
        FIDELITY_TOLERANCE,
    ));
    Ok(())
}

fn witness(cfg: &RunConfig, log: &Log, rng: &mut ChaCha8Rng, agg: &mut Aggregate) -> Result<()> {
    let mut generic_proportional = 0u64;
    let mut phase_not_proportional = 0u64;
    for t in 0..cfg.trials {
        let u = haar_unitary_with(rng, 2);
        let u_prime = haar_unitary_with(rng, 2);
        let generic = control_orthogonality_witness(&u, &u_prime, WITNESS_SAMPLES, rng)?;
        let theta = rng.random::<f64>() * std::f64::consts::TAU;
        let phased = control_orthogonality_witness(&u, &u.with_phase(theta), WITNESS_SAMPLES, rng)?;
        log.event(json!({"event": "trial", "index": t, "generic_range": generic.range, "phase_range": phased.range}));
        generic_proportional += u64::from(generic.proportional);
        phase_not_proportional += u64::from(!phased.proportional);
        agg.check(BoundCheck::new(
            "generic_range",
            generic.range,
            Direction::AtLeast,
            WITNESS_MIN_RANGE,
            0.0,
        ));
        agg.check(BoundCheck::new(
            "phase_range",
            phased.range,
            Direction::AtMost,
            WITNESS_PHASE_RANGE,
            0.0,
        ));
    }
    agg.check(BoundCheck::count(
        "generic_pairs_proportional",
        generic_proportional,
        Direction::Equal,
        0,
    ));
    agg.check(BoundCheck::count(
        "phase_pairs_not_proportional",
        phase_not_proportional,
        Direction::Equal,
        0,
    ));
    Ok(())
}

fn decompose(cfg: &RunConfig, log: &Log, rng: &mut ChaCha8Rng, agg: &mut Aggregate) -> Result<()> {
    for t in 0..cfg.trials {
        let u = haar_unitary_with(rng, 2);
        let coeffs = pauli_decompose(u.matrix())?;
        let error = (&coeffs.reconstruct() - u.matrix()).frobenius_norm();
        log.event(json!({"event": "trial", "index": t, "roundtrip_error": error}));
        agg.check(BoundCheck::new(
            "roundtrip_error",
            error,
            Direction::AtMost,
            ROUNDTRIP_TOLERANCE,
            0.0,
        ));
    }
    let h = hadamard();
    let coeffs = pauli_decompose(h.matrix())?;
    let mut error = 0.0f64;
    for mu in PauliIndex::ALL {
        let oracle = (&pauli_matrix(mu) * h.matrix()).trace() * 0.5;
        error = error.max((coeffs.get(mu) - oracle).norm());
    }
    agg.check(BoundCheck::new(
        "hadamard_coefficient_error",
        error,
        Direction::AtMost,
        ROUNDTRIP_TOLERANCE,
        0.0,
    ));
    Ok(())
}
