use std::collections::HashSet;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::density::DensityOp;
use super::matrix::{CMatrix, CVector, Tensor, ONE, ZERO};
use super::TOL_NORM;
use crate::error::{Error, Result};

/// Name of a qubit. Label order in a state fixes the tensor ordering, with
/// the first label as the most significant factor.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(String);

impl Label {
    pub fn new(name: impl Into<String>) -> Self {
        Label(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_owned())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label(s)
    }
}

impl AsRef<str> for Label {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

pub(crate) fn check_power_of_two(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

pub(crate) fn check_unique(labels: &[Label]) -> Result<()> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(Error::DuplicateLabel(l.to_string()));
        }
    }
    Ok(())
}

/// Maps a (selected, rest) index pair onto a full basis index.
///
/// `selected` positions are taken in the caller's order; the remaining
/// positions keep their original relative order.
pub(crate) struct Split {
    n: usize,
    selected: Vec<usize>,
    rest: Vec<usize>,
}

impl Split {
    pub(crate) fn new(n: usize, selected: Vec<usize>) -> Self {
        let rest = (0..n).filter(|p| !selected.contains(p)).collect();
        Split { n, selected, rest }
    }

    pub(crate) fn selected_dim(&self) -> usize {
        1 << self.selected.len()
    }

    pub(crate) fn rest_dim(&self) -> usize {
        1 << self.rest.len()
    }

    pub(crate) fn rest_positions(&self) -> &[usize] {
        &self.rest
    }

    fn scatter(&self, positions: &[usize], index: usize, acc: &mut usize) {
        let k = positions.len();
        for (i, &pos) in positions.iter().enumerate() {
            if (index >> (k - 1 - i)) & 1 == 1 {
                *acc |= 1 << (self.n - 1 - pos);
            }
        }
    }

    pub(crate) fn compose(&self, selected_index: usize, rest_index: usize) -> usize {
        let mut full = 0;
        self.scatter(&self.selected, selected_index, &mut full);
        self.scatter(&self.rest, rest_index, &mut full);
        full
    }
}

/// Normalized pure state over an ordered list of labeled qubits.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    labels: Vec<Label>,
    amplitudes: CVector,
}

impl fmt::Debug for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PureState")
            .field("labels", &self.labels)
            .field("amplitudes", &self.amplitudes)
            .finish()
    }
}

impl PureState {
    pub fn new(labels: Vec<Label>, amplitudes: CVector) -> Result<Self> {
        let n = check_power_of_two(amplitudes.dim())?;
        if n != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << labels.len(),
                found: amplitudes.dim(),
            });
        }
        check_unique(&labels)?;
        let norm = amplitudes.norm();
        if !amplitudes.is_finite() || (norm - 1.0).abs() > TOL_NORM {
            return Err(Error::NotNormalized { norm });
        }
        Ok(PureState { labels, amplitudes })
    }

    /// State over zero qubits; the unit of [`PureState::tensor`].
    pub fn empty() -> Self {
        PureState {
            labels: Vec::new(),
            amplitudes: CVector::new(vec![ONE]),
        }
    }

    pub fn qubit(label: impl Into<Label>, a0: Complex64, a1: Complex64) -> Result<Self> {
        PureState::new(vec![label.into()], CVector::new(vec![a0, a1]))
    }

    /// Computational basis state; `bits` is read most significant first.
    pub fn basis<L: Into<Label>>(labels: impl IntoIterator<Item = L>, bits: usize) -> Result<Self> {
        let labels: Vec<Label> = labels.into_iter().map(Into::into).collect();
        let dim = 1usize << labels.len();
        if bits >= dim {
            return Err(Error::IndexOutOfRange {
                what: "basis state",
                index: bits,
                limit: dim,
            });
        }
        PureState::new(labels, CVector::basis(dim, bits))
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.dim()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l.as_str() == label)
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l.as_str() == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_owned()))
    }

    fn positions<L: AsRef<str>>(&self, labels: &[L]) -> Result<Vec<usize>> {
        let positions = labels
            .iter()
            .map(|l| self.position(l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        for (i, p) in positions.iter().enumerate() {
            if positions[..i].contains(p) {
                return Err(Error::DuplicateLabel(self.labels[*p].to_string()));
            }
        }
        Ok(positions)
    }

    /// Appends `other`'s qubits after this state's qubits.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        check_unique(&labels)?;
        Ok(PureState {
            labels,
            amplitudes: self.amplitudes.tensor(&other.amplitudes),
        })
    }

    /// Applies `gate` to `targets` (first target = most significant gate
    /// index) and the identity elsewhere.
    pub fn apply<L: AsRef<str>>(&mut self, gate: &CMatrix, targets: &[L]) -> Result<()> {
        let positions = self.positions(targets)?;
        let local_dim = 1usize << positions.len();
        if gate.rows() != local_dim || gate.cols() != local_dim {
            return Err(Error::DimensionMismatch {
                expected: local_dim,
                found: gate.rows().max(gate.cols()),
            });
        }
        let split = Split::new(self.labels.len(), positions);
        let amps = self.amplitudes.as_mut_slice();
        let mut indices = vec![0usize; local_dim];
        let mut local = vec![ZERO; local_dim];
        for r in 0..split.rest_dim() {
            for (k, idx) in indices.iter_mut().enumerate() {
                *idx = split.compose(k, r);
            }
            for (k, &idx) in indices.iter().enumerate() {
                local[k] = amps[idx];
            }
            for (row, &idx) in indices.iter().enumerate() {
                let mut acc = ZERO;
                for (col, a) in local.iter().enumerate() {
                    acc += gate[(row, col)] * a;
                }
                amps[idx] = acc;
            }
        }
        Ok(())
    }

    /// `(⟨v|_targets ⊗ 𝟙) |ψ⟩` as an unnormalized vector over the remaining
    /// qubits, in their original order.
    pub fn contract<L: AsRef<str>>(&self, targets: &[L], v: &CVector) -> Result<(Vec<Label>, CVector)> {
        let positions = self.positions(targets)?;
        let split = Split::new(self.labels.len(), positions);
        if v.dim() != split.selected_dim() {
            return Err(Error::DimensionMismatch {
                expected: split.selected_dim(),
                found: v.dim(),
            });
        }
        let mut rest = CVector::zeros(split.rest_dim());
        for r in 0..split.rest_dim() {
            let mut acc = ZERO;
            for k in 0..split.selected_dim() {
                acc += v[k].conj() * self.amplitudes[split.compose(k, r)];
            }
            rest[r] = acc;
        }
        let rest_labels = split
            .rest_positions()
            .iter()
            .map(|&p| self.labels[p].clone())
            .collect();
        Ok((rest_labels, rest))
    }

    /// Projects `targets` onto the normalized vector `v`.
    ///
    /// Returns the outcome probability and, when it is nonzero, the
    /// renormalized post-measurement state with unchanged label order.
    pub fn project<L: AsRef<str>>(&self, targets: &[L], v: &CVector) -> Result<(f64, Option<PureState>)> {
        let (_, rest) = self.contract(targets, v)?;
        let probability = rest.norm_sqr();
        if probability <= f64::EPSILON * f64::EPSILON {
            return Ok((probability, None));
        }
        let positions = self.positions(targets)?;
        let split = Split::new(self.labels.len(), positions);
        let inv = 1.0 / probability.sqrt();
        let mut amps = CVector::zeros(self.dim());
        for r in 0..split.rest_dim() {
            for k in 0..split.selected_dim() {
                amps[split.compose(k, r)] = v[k] * rest[r] * inv;
            }
        }
        let post = PureState {
            labels: self.labels.clone(),
            amplitudes: amps,
        };
        Ok((probability, Some(post)))
    }

    /// Same state with qubits listed in `order` (a permutation of the labels).
    pub fn reordered<L: AsRef<str>>(&self, order: &[L]) -> Result<PureState> {
        if order.len() != self.labels.len() {
            return Err(Error::DimensionMismatch {
                expected: self.labels.len(),
                found: order.len(),
            });
        }
        let positions = self.positions(order)?;
        let split = Split::new(self.labels.len(), positions.clone());
        let mut amps = CVector::zeros(self.dim());
        for k in 0..self.dim() {
            amps[k] = self.amplitudes[split.compose(k, 0)];
        }
        Ok(PureState {
            labels: positions.iter().map(|&p| self.labels[p].clone()).collect(),
            amplitudes: amps,
        })
    }

    /// `⟨self|other⟩` after aligning `other` to this state's label order.
    pub fn overlap(&self, other: &PureState) -> Result<Complex64> {
        let aligned = other.reordered(&self.labels)?;
        self.amplitudes.overlap(&aligned.amplitudes)
    }

    /// Reduced density operator on `keep`, in `keep`'s order.
    pub fn reduced_density<L: AsRef<str>>(&self, keep: &[L]) -> Result<DensityOp> {
        let positions = self.positions(keep)?;
        let split = Split::new(self.labels.len(), positions);
        let dk = split.selected_dim();
        let mut rho = CMatrix::zeros(dk, dk);
        for r in 0..split.rest_dim() {
            let column: Vec<Complex64> = (0..dk).map(|k| self.amplitudes[split.compose(k, r)]).collect();
            for i in 0..dk {
                if column[i] == ZERO {
                    continue;
                }
                for j in 0..dk {
                    rho[(i, j)] += column[i] * column[j].conj();
                }
            }
        }
        let labels = keep.iter().map(|l| Label::new(l.as_ref())).collect();
        DensityOp::new(rho, labels)
    }

    pub fn density(&self) -> DensityOp {
        let rho = self.amplitudes.outer(&self.amplitudes);
        DensityOp::new(rho, self.labels.clone()).expect("pure state density is valid")
    }

    /// Same amplitudes under new names, position by position.
    pub fn relabeled(&self, labels: Vec<Label>) -> Result<PureState> {
        if labels.len() != self.labels.len() {
            return Err(Error::DimensionMismatch {
                expected: self.labels.len(),
                found: labels.len(),
            });
        }
        check_unique(&labels)?;
        Ok(PureState {
            labels,
            amplitudes: self.amplitudes.clone(),
        })
    }

    /// Factors the state as `|a⟩_keep ⊗ |b⟩_rest`.
    ///
    /// Fails with [`Error::NotProduct`] when the best rank-one approximation
    /// leaves a residual above `tol`. Global phase is assigned to `rest`.
    pub fn split<L: AsRef<str>>(&self, keep: &[L], tol: f64) -> Result<(PureState, PureState)> {
        let (a, b, residual) = self.split_with_residual(keep)?;
        if residual > tol {
            return Err(Error::NotProduct { residual });
        }
        Ok((a, b))
    }

    /// Best product approximation `|a⟩_keep ⊗ |b⟩_rest` and the Frobenius
    /// norm of what it misses.
    pub fn split_with_residual<L: AsRef<str>>(&self, keep: &[L]) -> Result<(PureState, PureState, f64)> {
        let positions = self.positions(keep)?;
        let split = Split::new(self.labels.len(), positions.clone());
        let (dk, dr) = (split.selected_dim(), split.rest_dim());
        let m = CMatrix::from_fn(dk, dr, |k, r| self.amplitudes[split.compose(k, r)]);

        let pivot = (0..dr)
            .max_by(|&x, &y| m.column(x).norm_sqr().total_cmp(&m.column(y).norm_sqr()))
            .unwrap_or(0);
        let a = m.column(pivot).normalized()?;
        // b_r = Σ_k conj(a_k) m_kr
        let b = CVector::new(
            (0..dr)
                .map(|r| (0..dk).map(|k| a[k].conj() * m[(k, r)]).sum())
                .collect(),
        );
        let residual = (&m - &a.outer(&CVector::new(b.iter().map(|z| z.conj()).collect())))
            .frobenius_norm();
        let b = b.normalized()?;
        let keep_labels = positions.iter().map(|&p| self.labels[p].clone()).collect();
        let rest_labels = split
            .rest_positions()
            .iter()
            .map(|&p| self.labels[p].clone())
            .collect();
        Ok((
            PureState {
                labels: keep_labels,
                amplitudes: a,
            },
            PureState {
                labels: rest_labels,
                amplitudes: b,
            },
            residual,
        ))
    }
}
