use num_complex::Complex64;

use super::eigen::hermitian_eigenvalues;
use super::matrix::{CMatrix, CVector, Tensor};
use super::state::{check_power_of_two, check_unique, Label, Split};
use super::TOL_HERMITIAN;
use crate::error::{Error, Result};

/// Density operator over labeled qubits.
///
/// Construction checks Hermiticity and unit trace within [`TOL_HERMITIAN`].
/// Positivity needs an eigendecomposition and is checked where the spectrum
/// is computed anyway ([`von_neumann_entropy`], [`DensityOp::check_positive`]).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOp {
    matrix: CMatrix,
    labels: Vec<Label>,
}

impl DensityOp {
    pub fn new(matrix: CMatrix, labels: Vec<Label>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                found: matrix.cols(),
            });
        }
        let n = check_power_of_two(matrix.rows())?;
        if n != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << labels.len(),
                found: matrix.rows(),
            });
        }
        check_unique(&labels)?;
        let deviation = matrix.hermitian_deviation();
        if deviation > TOL_HERMITIAN || !matrix.is_finite() {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TOL_HERMITIAN || trace.im.abs() > TOL_HERMITIAN {
            return Err(Error::TraceNotOne { trace: trace.re });
        }
        Ok(DensityOp { matrix, labels })
    }

    /// Maximally mixed state `𝟙/d` on the given qubits.
    pub fn maximally_mixed<L: Into<Label>>(labels: impl IntoIterator<Item = L>) -> Result<Self> {
        let labels: Vec<Label> = labels.into_iter().map(Into::into).collect();
        let d = 1usize << labels.len();
        DensityOp::new(
            CMatrix::identity(d).scale(Complex64::new(1.0 / d as f64, 0.0)),
            labels,
        )
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn tensor(&self, other: &DensityOp) -> Result<DensityOp> {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        DensityOp::new(self.matrix.tensor(&other.matrix), labels)
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// `⟨ψ|ρ|ψ⟩`, the fidelity against a pure reference.
    pub fn fidelity_with_pure(&self, psi: &CVector) -> Result<f64> {
        let rho_psi = self.matrix.apply(psi)?;
        Ok(psi.overlap(&rho_psi)?.re)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn check_positive(&self) -> Result<()> {
        let values = self.eigenvalues()?;
        match values.last() {
            Some(&min) if min < -TOL_HERMITIAN => Err(Error::NotPositive { eigenvalue: min }),
            _ => Ok(()),
        }
    }

    pub fn partial_trace<L: AsRef<str>>(&self, keep: &[L]) -> Result<DensityOp> {
        partial_trace(self, keep)
    }

    pub fn entropy(&self) -> Result<f64> {
        von_neumann_entropy(self)
    }
}

/// Traces out every qubit not in `keep`; the result follows `keep`'s order.
pub fn partial_trace<L: AsRef<str>>(rho: &DensityOp, keep: &[L]) -> Result<DensityOp> {
    let mut positions = Vec::with_capacity(keep.len());
    for l in keep {
        let p = rho
            .labels
            .iter()
            .position(|x| x.as_str() == l.as_ref())
            .ok_or_else(|| Error::UnknownLabel(l.as_ref().to_owned()))?;
        if positions.contains(&p) {
            return Err(Error::DuplicateLabel(l.as_ref().to_owned()));
        }
        positions.push(p);
    }
    let split = Split::new(rho.labels.len(), positions.clone());
    let dk = split.selected_dim();
    let mut out = CMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..split.rest_dim() {
                acc += rho.matrix[(split.compose(i, t), split.compose(j, t))];
            }
            out[(i, j)] = acc;
        }
    }
    let labels = positions.iter().map(|&p| rho.labels[p].clone()).collect();
    DensityOp::new(out, labels)
}

/// Base-2 von Neumann entropy `-Σ λ log₂ λ`.
///
/// Eigenvalues in `[-τ_h, 0]` count as zero; anything more negative is a
/// positivity error.
pub fn von_neumann_entropy(rho: &DensityOp) -> Result<f64> {
    let values = rho.eigenvalues()?;
    let mut s = 0.0;
    for &lambda in &values {
        if lambda < -TOL_HERMITIAN {
            return Err(Error::NotPositive { eigenvalue: lambda });
        }
        if lambda > 0.0 {
            s -= lambda * lambda.log2();
        }
    }
    Ok(s.max(0.0))
}
