//! Numerical checks of the structural facts behind the lower bounds.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, PureState, Tensor};
use crate::ops::{haar_state_with, UnitaryGate};
use crate::runtime::{LoccRuntime, Party, ResourceLedger};

use super::bidirectional::{bidirectional_script, bidirectional_setup, ALPHA, BETA};
use super::teleport_state;

const ORTHOGONALITY_TOLERANCE: f64 = 1e-9;
const PROPORTIONAL_TOLERANCE: f64 = 1e-9;

fn check_single_qubit(u: &UnitaryGate) -> Result<()> {
    if u.arity() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: u.dim(),
        });
    }
    Ok(())
}

fn check_qubit_state(psi: &CVector) -> Result<()> {
    if psi.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: psi.dim(),
        });
    }
    if (psi.norm() - 1.0).abs() > crate::linalg::TOL_NORM {
        return Err(Error::NotNormalized { norm: psi.norm() });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceCheck {
    /// Largest `1 − |⟨a|b⟩|²` between ancilla states with the same
    /// measurement record.
    pub max_deviation: f64,
    /// Largest distance of a final state from `ancilla ⊗ β`.
    pub max_product_residual: f64,
    pub runs: usize,
    pub comparisons: usize,
    /// Resources of one run; every run uses the same.
    pub ledger: ResourceLedger,
}

/// Runs the bidirectional scheme for every `(U, ψ)` in `us × psis` and
/// compares what is left outside `β` across runs, record by record.
pub fn ancilla_independence_check(us: &[UnitaryGate], psis: &[CVector]) -> Result<IndependenceCheck> {
    let mut by_record: BTreeMap<Vec<usize>, Vec<PureState>> = BTreeMap::new();
    let mut max_product_residual = 0.0f64;
    let mut runs = 0;
    let mut ledger: Option<ResourceLedger> = None;
    for u in us {
        check_single_qubit(u)?;
        for psi in psis {
            check_qubit_state(psi)?;
            let rt = bidirectional_setup(psi)?;
            let run = rt.run_enumerated(|rt| {
                bidirectional_script(rt, BETA, |rt, alpha| {
                    rt.apply_local(Party::Alice, u, &[alpha])
                })
            })?;
            if *ledger.get_or_insert(run.ledger) != run.ledger {
                return Err(Error::LedgerMismatch);
            }
            for b in &run.branches {
                let (_, ancilla, residual) = b.state.split_with_residual(&[BETA])?;
                max_product_residual = max_product_residual.max(residual);
                by_record.entry(b.outcome_values()).or_default().push(ancilla);
            }
            runs += 1;
        }
    }

    let mut max_deviation = 0.0f64;
    let mut comparisons = 0;
    for states in by_record.values() {
        for (i, a) in states.iter().enumerate() {
            for b in &states[i + 1..] {
                let deviation = 1.0 - a.overlap(b)?.norm_sqr();
                max_deviation = max_deviation.max(deviation);
                comparisons += 1;
            }
        }
    }
    Ok(IndependenceCheck {
        max_deviation,
        max_product_residual,
        runs,
        comparisons,
        ledger: ledger.unwrap_or_default(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoGoWitness {
    /// `|o_out − o_in|`; any unitary `G2` would need it to be zero.
    pub deficit: f64,
    pub input_overlap: Complex64,
    pub output_overlap: Complex64,
    /// `U·S`, where `S` exchanges `ψ` and `ψ'`, so that `U'ψ' = Uψ`.
    pub u_prime: UnitaryGate,
}

/// Shows that with `G1` trivial, `G2` would have to map orthogonal inputs
/// `Uχ⊗ψ` and `U'χ⊗ψ'` to the same output, which no unitary can do.
///
/// `U` acts on the first qubit of `chi`.
pub fn trivial_g1_nogo_check(chi: &CVector, psi: &CVector, psi_prime: &CVector, u: &UnitaryGate) -> Result<NoGoWitness> {
    check_single_qubit(u)?;
    check_qubit_state(psi)?;
    check_qubit_state(psi_prime)?;
    if chi.dim() < 2 || !chi.dim().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(chi.dim()));
    }
    if (chi.norm() - 1.0).abs() > crate::linalg::TOL_NORM {
        return Err(Error::NotNormalized { norm: chi.norm() });
    }
    let psi_overlap = psi_prime.overlap(psi)?;
    if psi_overlap.norm() > ORTHOGONALITY_TOLERANCE {
        return Err(Error::NotOrthogonal {
            overlap: psi_overlap.norm(),
        });
    }

    let exchange = &psi.outer(psi_prime) + &psi_prime.outer(psi);
    let u_prime = UnitaryGate::new(u.matrix() * &exchange)?;

    let w = &u_prime.matrix().adjoint() * u.matrix();
    let w_full = w.tensor(&CMatrix::identity(chi.dim() / 2));
    let input_overlap = chi.overlap(&(&w_full * chi))? * psi_overlap;
    let output_overlap = u_prime.apply(psi_prime)?.overlap(&u.apply(psi)?)?;
    Ok(NoGoWitness {
        deficit: (output_overlap - input_overlap).norm(),
        input_overlap,
        output_overlap,
        u_prime,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateTransferCheck {
    pub min_purity: f64,
    pub min_fidelity: f64,
    /// Largest distance of a branch state from `ρ_α ⊗ rest` as a product.
    pub max_factor_residual: f64,
    pub branches: usize,
    pub ledger: ResourceLedger,
}

/// Runs only the first teleportation stage and checks that `α` ends up
/// holding exactly `ψ`, unentangled with everything else.
pub fn g1_state_transfer_check(psi: &CVector) -> Result<StateTransferCheck> {
    check_qubit_state(psi)?;
    let rt: LoccRuntime = bidirectional_setup(psi)?;
    let run = rt.run_enumerated(|rt| teleport_state(rt, BETA, ALPHA).map(|_| ()))?;
    let mut check = StateTransferCheck {
        min_purity: f64::INFINITY,
        min_fidelity: f64::INFINITY,
        max_factor_residual: 0.0,
        branches: run.branches.len(),
        ledger: run.ledger,
    };
    for b in &run.branches {
        let rho = b.state.reduced_density(&[ALPHA])?;
        check.min_purity = check.min_purity.min(rho.purity());
        check.min_fidelity = check.min_fidelity.min(rho.fidelity_with_pure(psi)?);
        let (_, _, residual) = b.state.split_with_residual(&[ALPHA])?;
        check.max_factor_residual = check.max_factor_residual.max(residual);
    }
    Ok(check)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalityWitness {
    /// Largest `|z_s − z_t|` over sampled `z = ⟨ψ|U'†U|ψ⟩`.
    pub range: f64,
    /// `U'†U` is a multiple of the identity.
    pub proportional: bool,
    pub samples: usize,
}

/// Samples Haar `ψ` and measures how much `⟨ψ|U'†U|ψ⟩` varies. A nonzero
/// spread means the control states for `U` and `U'` must be orthogonal.
pub fn control_orthogonality_witness(
    u: &UnitaryGate,
    u_prime: &UnitaryGate,
    n_samples: usize,
    rng: &mut impl Rng,
) -> Result<OrthogonalityWitness> {
    check_single_qubit(u)?;
    check_single_qubit(u_prime)?;
    let w = &u_prime.matrix().adjoint() * u.matrix();
    let mut values = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let psi = haar_state_with(rng, 2);
        values.push(psi.overlap(&(&w * &psi))?);
    }
    let mut range = 0.0f64;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            range = range.max((a - b).norm());
        }
    }
    Ok(OrthogonalityWitness {
        range,
        proportional: (w.trace().norm() - 2.0).abs() <= PROPORTIONAL_TOLERANCE,
        samples: n_samples,
    })
}
