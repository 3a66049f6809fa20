//! Pauli operators, the Bell basis, Haar sampling, Pauli decomposition and
//! Bell measurement.
//!
//! The Bell basis is generated from `|B⁰⟩ = (|00⟩ + |11⟩)/√2` by
//! `|B^μ⟩ = (σ^μ ⊗ 𝟙)|B⁰⟩`. With this ordering `|B²⟩` carries the phases of
//! `σ_y`, i.e. `(i|10⟩ - i|01⟩)/√2`, rather than the textbook real singlet.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::matrix::{I, ONE, ZERO};
use crate::linalg::{CMatrix, CVector, PureState, Tensor};

/// Deviation from `U†U = 𝟙` accepted when wrapping a matrix as a gate.
pub const TOL_UNITARY: f64 = 1e-9;

/// Index `μ ∈ {0,1,2,3}` of `𝟙, σ_x, σ_y, σ_z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliIndex(u8);

impl PauliIndex {
    pub const ALL: [PauliIndex; 4] = [PauliIndex(0), PauliIndex(1), PauliIndex(2), PauliIndex(3)];

    pub fn new(mu: usize) -> Result<Self> {
        if mu > 3 {
            return Err(Error::IndexOutOfRange {
                what: "Pauli",
                index: mu,
                limit: 4,
            });
        }
        Ok(PauliIndex(mu as u8))
    }

    pub fn value(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PauliIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "σ{}", self.0)
    }
}

/// Index `μ` of `|B^μ⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BellIndex(u8);

impl BellIndex {
    pub const ALL: [BellIndex; 4] = [BellIndex(0), BellIndex(1), BellIndex(2), BellIndex(3)];

    pub fn new(mu: usize) -> Result<Self> {
        if mu > 3 {
            return Err(Error::IndexOutOfRange {
                what: "Bell",
                index: mu,
                limit: 4,
            });
        }
        Ok(BellIndex(mu as u8))
    }

    pub fn value(self) -> usize {
        self.0 as usize
    }

    /// The Pauli that maps `|B⁰⟩` to this Bell state.
    pub fn pauli(self) -> PauliIndex {
        PauliIndex(self.0)
    }
}

/// A unitary matrix acting on `arity` qubits.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryGate {
    matrix: CMatrix,
    arity: usize,
}

impl fmt::Debug for UnitaryGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UnitaryGate(arity {}) {:?}", self.arity, self.matrix)
    }
}

impl UnitaryGate {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                found: matrix.cols(),
            });
        }
        let dim = matrix.rows();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        let deviation = matrix.unitary_deviation();
        if deviation > TOL_UNITARY || !matrix.is_finite() {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(UnitaryGate {
            arity: dim.trailing_zeros() as usize,
            matrix,
        })
    }

    pub fn identity(arity: usize) -> Self {
        UnitaryGate {
            matrix: CMatrix::identity(1 << arity),
            arity,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn adjoint(&self) -> UnitaryGate {
        UnitaryGate {
            matrix: self.matrix.adjoint(),
            arity: self.arity,
        }
    }

    /// `self · other` (apply `other` first).
    pub fn then_after(&self, other: &UnitaryGate) -> Result<UnitaryGate> {
        if self.arity != other.arity {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(UnitaryGate {
            matrix: &self.matrix * &other.matrix,
            arity: self.arity,
        })
    }

    pub fn tensor(&self, other: &UnitaryGate) -> UnitaryGate {
        UnitaryGate {
            matrix: self.matrix.tensor(&other.matrix),
            arity: self.arity + other.arity,
        }
    }

    pub fn with_phase(&self, theta: f64) -> UnitaryGate {
        UnitaryGate {
            matrix: self.matrix.scale(Complex64::from_polar(1.0, theta)),
            arity: self.arity,
        }
    }

    pub fn apply(&self, v: &CVector) -> Result<CVector> {
        self.matrix.apply(v)
    }
}

pub fn pauli_matrix(mu: PauliIndex) -> CMatrix {
    match mu.0 {
        0 => CMatrix::identity(2),
        1 => CMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]),
        2 => CMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]]),
        _ => CMatrix::from_rows(&[&[ONE, ZERO], &[ZERO, -ONE]]),
    }
}

pub fn pauli(mu: PauliIndex) -> UnitaryGate {
    UnitaryGate {
        matrix: pauli_matrix(mu),
        arity: 1,
    }
}

pub fn hadamard() -> UnitaryGate {
    let h = FRAC_1_SQRT_2;
    UnitaryGate {
        matrix: CMatrix::from_real_rows(&[&[h, h], &[h, -h]]),
        arity: 1,
    }
}

pub fn swap() -> UnitaryGate {
    UnitaryGate {
        matrix: CMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]),
        arity: 2,
    }
}

/// `|B^μ⟩ = (σ^μ ⊗ 𝟙)|B⁰⟩`.
pub fn bell_state(mu: BellIndex) -> CVector {
    let b0 = CVector::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]);
    let op = pauli_matrix(mu.pauli()).tensor(&CMatrix::identity(2));
    &op * &b0
}

/// Coefficients `α_μ` with `Σ_μ α_μ σ^μ = U`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliCoefficients(pub [Complex64; 4]);

impl PauliCoefficients {
    pub fn get(&self, mu: PauliIndex) -> Complex64 {
        self.0[mu.value()]
    }

    pub fn reconstruct(&self) -> CMatrix {
        PauliIndex::ALL.iter().fold(CMatrix::zeros(2, 2), |acc, &mu| {
            &acc + &pauli_matrix(mu).scale(self.get(mu))
        })
    }
}

/// `α_μ = Tr(σ^μ U) / 2` for a 2×2 operator.
pub fn pauli_decompose(op: &CMatrix) -> Result<PauliCoefficients> {
    if op.rows() != 2 || op.cols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: op.rows().max(op.cols()),
        });
    }
    let mut alpha = [ZERO; 4];
    for mu in PauliIndex::ALL {
        alpha[mu.value()] = (&pauli_matrix(mu) * op).trace() * 0.5;
    }
    Ok(PauliCoefficients(alpha))
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

/// Haar-random unitary from an explicit generator.
///
/// Gram–Schmidt on a complex Ginibre matrix yields `Q` with a positive real
/// `R` diagonal, which is the phase fixing that makes `Q` Haar distributed.
pub fn haar_unitary_with(rng: &mut impl Rng, dim: usize) -> UnitaryGate {
    assert!(dim >= 2 && dim.is_power_of_two(), "Haar dimension must be a power of two ≥ 2");
    loop {
        let columns: Vec<CVector> = (0..dim)
            .map(|_| CVector::new((0..dim).map(|_| gaussian(rng)).collect()))
            .collect();
        if let Some(q) = orthonormalize(columns) {
            let matrix = CMatrix::from_columns(&q);
            return UnitaryGate {
                arity: dim.trailing_zeros() as usize,
                matrix,
            };
        }
    }
}

/// Haar-random unitary, deterministic in `seed`.
pub fn haar_unitary(seed: u64, dim: usize) -> UnitaryGate {
    haar_unitary_with(&mut ChaCha8Rng::seed_from_u64(seed), dim)
}

/// Uniformly random pure state of dimension `dim`.
pub fn haar_state_with(rng: &mut impl Rng, dim: usize) -> CVector {
    loop {
        let v = CVector::new((0..dim).map(|_| gaussian(rng)).collect());
        if let Ok(n) = v.normalized() {
            return n;
        }
    }
}

/// Modified Gram–Schmidt with one re-orthogonalization pass. Returns `None`
/// for a numerically rank-deficient input.
fn orthonormalize(mut columns: Vec<CVector>) -> Option<Vec<CVector>> {
    for j in 0..columns.len() {
        for _ in 0..2 {
            for i in 0..j {
                let proj = columns[i].overlap(&columns[j]).ok()?;
                let scaled = columns[i].scale(proj);
                columns[j] = &columns[j] - &scaled;
            }
        }
        let norm = columns[j].norm();
        if norm < 1e-8 {
            return None;
        }
        columns[j] = columns[j].scale(Complex64::new(1.0 / norm, 0.0));
    }
    Some(columns)
}

/// A unitary whose first row is `ψ†`, so that `U_ψ ψ = |0⟩`.
///
/// Built from the Householder reflection taking `ψ` to `e^{iθ}|0⟩`, with the
/// phase removed afterwards. The input is normalized first.
pub fn u_psi_for(psi: &CVector) -> Result<UnitaryGate> {
    let psi = psi.normalized()?;
    let dim = psi.dim();
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    let phase = if psi[0].norm() > 0.0 { psi[0] / psi[0].norm() } else { ONE };
    let mut v = psi.clone();
    v[0] -= phase;
    let vn = v.norm_sqr();
    let householder = if vn < 1e-30 {
        CMatrix::identity(dim)
    } else {
        &CMatrix::identity(dim) - &v.outer(&v).scale(Complex64::new(2.0 / vn, 0.0))
    };
    UnitaryGate::new(householder.scale(phase.conj()))
}

/// One outcome of a Bell measurement.
#[derive(Debug, Clone)]
pub struct BellBranch {
    pub outcome: BellIndex,
    pub probability: f64,
    pub post_state: PureState,
}

/// All nonzero-probability outcomes of a Bell measurement on `pair`, in
/// outcome order. The measured pair is left in `|B^μ⟩`.
pub fn bell_measure(state: &PureState, pair: [&str; 2]) -> Result<Vec<BellBranch>> {
    let mut branches = Vec::with_capacity(4);
    for mu in BellIndex::ALL {
        let (probability, post) = state.project(&pair, &bell_state(mu))?;
        if let Some(post_state) = post {
            branches.push(BellBranch {
                outcome: mu,
                probability,
                post_state,
            });
        }
    }
    Ok(branches)
}

/// Samples a single Bell measurement outcome.
pub fn bell_measure_sample(state: &PureState, pair: [&str; 2], rng: &mut impl Rng) -> Result<BellBranch> {
    let mut branches = bell_measure(state, pair)?;
    let total: f64 = branches.iter().map(|b| b.probability).sum();
    let mut r = rng.random::<f64>() * total;
    let last = branches.len() - 1;
    for (i, b) in branches.iter().enumerate() {
        if r < b.probability || i == last {
            return Ok(branches.swap_remove(i));
        }
        r -= b.probability;
    }
    unreachable!("a normalized state has at least one outcome")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pauli_products() {
        let x = pauli_matrix(PauliIndex(1));
        let y = pauli_matrix(PauliIndex(2));
        let z = pauli_matrix(PauliIndex(3));
        // direct 2×2 multiply written out
        let mut xy = CMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                xy[(i, j)] = x[(i, 0)] * y[(0, j)] + x[(i, 1)] * y[(1, j)];
            }
        }
        assert_eq!(xy, z.scale(I));
        assert_eq!(pauli(PauliIndex(0)).matrix(), &CMatrix::identity(2));
        assert_eq!(
            pauli(PauliIndex(3)).matrix(),
            &CMatrix::diagonal(&[ONE, -ONE])
        );
    }

    #[test]
    fn out_of_range_indices() {
        assert!(matches!(PauliIndex::new(4), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(BellIndex::new(7), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn bell_states_follow_generating_identity() {
        let h = FRAC_1_SQRT_2;
        assert!(bell_state(BellIndex(0)).max_abs_diff(&CVector::from_real(&[h, 0.0, 0.0, h])) < 1e-15);
        assert!(bell_state(BellIndex(3)).max_abs_diff(&CVector::from_real(&[h, 0.0, 0.0, -h])) < 1e-15);
        assert!(bell_state(BellIndex(1)).max_abs_diff(&CVector::from_real(&[0.0, h, h, 0.0])) < 1e-15);
        // σ_y ⊗ 𝟙: |00⟩ → i|10⟩, |11⟩ → -i|01⟩
        let b2 = CVector::new(vec![ZERO, c(0.0, -h), c(0.0, h), ZERO]);
        assert!(bell_state(BellIndex(2)).max_abs_diff(&b2) < 1e-15);
    }

    #[test]
    fn bell_orthonormal() {
        for a in BellIndex::ALL {
            for b in BellIndex::ALL {
                let o = bell_state(a).overlap(&bell_state(b)).unwrap();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((o - c(expected, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn bell_zero_three_overlap_is_explicit_sum() {
        let b0 = bell_state(BellIndex(0));
        let b3 = bell_state(BellIndex(3));
        let sum: Complex64 = (0..4).map(|k| b0[k].conj() * b3[k]).sum();
        assert!(sum.norm() < 1e-15);
    }

    #[test]
    fn decompose_simple_operators() {
        let a = pauli_decompose(pauli(PauliIndex(1)).matrix()).unwrap();
        assert_eq!(a.0, [ZERO, ONE, ZERO, ZERO]);
        let a = pauli_decompose(&CMatrix::identity(2)).unwrap();
        assert_eq!(a.0, [ONE, ZERO, ZERO, ZERO]);
        assert!(matches!(
            pauli_decompose(&CMatrix::identity(4)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn decompose_hadamard_matches_trace_formula() {
        let h = hadamard();
        let a = pauli_decompose(h.matrix()).unwrap();
        // Tr(σ^μ H)/2 computed entrywise: Tr(AB) = Σ_ij A_ij B_ji
        for mu in PauliIndex::ALL {
            let s = pauli_matrix(mu);
            let mut tr = ZERO;
            for i in 0..2 {
                for j in 0..2 {
                    tr += s[(i, j)] * h.matrix()[(j, i)];
                }
            }
            assert!((a.get(mu) - tr * 0.5).norm() < 1e-15);
        }
        let expected = [0.0, FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2];
        for (got, want) in a.0.iter().zip(expected) {
            assert!((got - c(want, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn haar_is_unitary_and_deterministic() {
        for seed in 0..20 {
            let u = haar_unitary(seed, 2);
            assert!(u.matrix().unitary_deviation() <= 1e-12);
            for j in 0..2 {
                assert!((u.matrix().column(j).norm() - 1.0).abs() <= 1e-12);
            }
            assert_eq!(u, haar_unitary(seed, 2));
        }
        let u8 = haar_unitary(3, 8);
        assert!(u8.matrix().unitary_deviation() <= 1e-12);
        assert_ne!(haar_unitary(1, 2), haar_unitary(2, 2));
    }

    #[test]
    fn haar_first_entry_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|_| haar_unitary_with(&mut rng, 2).matrix()[(0, 0)].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((0.45..=0.55).contains(&mean), "mean {mean}");
    }

    #[test]
    fn u_psi_examples() {
        let zero = CVector::basis(2, 0);
        let one = CVector::basis(2, 1);
        assert_eq!(u_psi_for(&zero).unwrap().matrix(), &CMatrix::identity(2));
        assert!(u_psi_for(&one)
            .unwrap()
            .matrix()
            .max_abs_diff(pauli(PauliIndex(1)).matrix())
            < 1e-15);
        assert_eq!(u_psi_for(&CVector::zeros(2)).unwrap_err(), Error::ZeroVector);
    }

    #[test]
    fn u_psi_maps_random_states_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let psi = haar_state_with(&mut rng, 2);
            let u = u_psi_for(&psi).unwrap();
            let out = u.apply(&psi).unwrap();
            assert!((&out - &CVector::basis(2, 0)).norm() <= 1e-12);
            // first row is ψ†
            for k in 0..2 {
                assert!((u.matrix()[(0, k)] - psi[k].conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn bell_measure_examples() {
        let labels = vec!["a".into(), "b".into()];
        let b2 = PureState::new(labels.clone(), bell_state(BellIndex(2))).unwrap();
        let out = bell_measure(&b2, ["a", "b"]).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].outcome, BellIndex(2));
        assert!((out[0].probability - 1.0).abs() < 1e-12);

        let zz = PureState::basis(["a", "b"], 0).unwrap();
        let out = bell_measure(&zz, ["a", "b"]).unwrap();
        let outcomes: Vec<usize> = out.iter().map(|b| b.outcome.value()).collect();
        assert_eq!(outcomes, vec![0, 3]);
        for b in &out {
            assert!((b.probability - 0.5).abs() < 1e-12);
            assert!((b.post_state.norm() - 1.0).abs() < 1e-12);
        }

        assert_eq!(
            bell_measure(&zz, ["a", "x"]).unwrap_err(),
            Error::UnknownLabel("x".into())
        );
    }

    #[test]
    fn bell_measure_sample_draws_a_valid_outcome() {
        let zz = PureState::basis(["a", "b"], 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let b = bell_measure_sample(&zz, ["a", "b"], &mut rng).unwrap();
            assert!(b.outcome.value() == 0 || b.outcome.value() == 3);
        }
    }

    #[test]
    fn unitary_gate_validation() {
        let m = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(matches!(UnitaryGate::new(m), Err(Error::NotUnitary { .. })));
        assert!(matches!(
            UnitaryGate::new(CMatrix::identity(3)),
            Err(Error::NotPowerOfTwo(3))
        ));
        assert_eq!(UnitaryGate::new(CMatrix::identity(4)).unwrap().arity(), 2);
    }
}
