//! Resource bounds for universal remote implementation of a qubit unitary.
//!
//! Any universal scheme needs at least 2 ebits and 2 classical bits from
//! Alice to Bob. Bidirectional state teleportation meets both and adds
//! 2 bits from Bob to Alice, giving an overall budget of 4 classical bits
//! and 2 ebits.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Label, PureState, TOL_NORM};
use crate::runtime::ResourceLedger;

pub const MIN_EBITS: u64 = 2;
pub const MIN_CBITS_A_TO_B: u64 = 2;
pub const MAX_EBITS: u64 = 2;
pub const MAX_CBITS_TOTAL: u64 = 4;

/// Tolerance for comparisons of computed entropies against integer bounds.
pub const ENTROPY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "=")]
    Equal,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::AtLeast => ">=",
            Direction::AtMost => "<=",
            Direction::Equal => "=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub direction: Direction,
    pub tolerance: f64,
    pub passed: bool,
}

impl BoundCheck {
    pub fn new(name: impl Into<String>, measured: f64, direction: Direction, bound: f64, tolerance: f64) -> Self {
        let passed = match direction {
            Direction::AtLeast => measured >= bound - tolerance,
            Direction::AtMost => measured <= bound + tolerance,
            Direction::Equal => (measured - bound).abs() <= tolerance,
        };
        BoundCheck {
            name: name.into(),
            measured,
            bound,
            direction,
            tolerance,
            passed: passed && measured.is_finite(),
        }
    }

    /// Exact comparison of a ledger counter.
    pub fn count(name: impl Into<String>, measured: u64, direction: Direction, bound: u64) -> Self {
        BoundCheck::new(name, measured as f64, direction, bound as f64, 0.0)
    }
}

impl fmt::Display for BoundCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: {} {} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.direction,
            self.bound
        )
    }
}

pub fn all_passed(checks: &[BoundCheck]) -> bool {
    checks.iter().all(|c| c.passed)
}

/// `ebits ≥ 2` and `cbits A→B ≥ 2`.
pub fn check_lower_bounds(ledger: &ResourceLedger) -> Vec<BoundCheck> {
    vec![
        BoundCheck::count("ebits_lower_bound", ledger.ebits(), Direction::AtLeast, MIN_EBITS),
        BoundCheck::count(
            "cbits_a_to_b_lower_bound",
            ledger.cbits_a_to_b(),
            Direction::AtLeast,
            MIN_CBITS_A_TO_B,
        ),
    ]
}

/// `cbits total ≤ 4` and `ebits ≤ 2`. Both must pass for the ledger to be
/// within the bidirectional budget.
pub fn check_upper_bound(ledger: &ResourceLedger) -> [BoundCheck; 2] {
    [
        BoundCheck::count(
            "cbits_total_upper_bound",
            ledger.cbits_total(),
            Direction::AtMost,
            MAX_CBITS_TOTAL,
        ),
        BoundCheck::count("ebits_upper_bound", ledger.ebits(), Direction::AtMost, MAX_EBITS),
    ]
}

/// Entropy of entanglement between `side` and the rest of a pure state.
///
/// The reduced state of whichever side has fewer qubits is diagonalized;
/// both sides have the same spectrum for a pure state.
pub fn bipartite_entanglement<L: AsRef<str>>(state: &PureState, side: &[L]) -> Result<f64> {
    let norm = state.norm();
    if (norm - 1.0).abs() > TOL_NORM {
        return Err(Error::NotNormalized { norm });
    }
    for l in side {
        state.position(l.as_ref())?;
    }
    let other: Vec<Label> = state
        .labels()
        .iter()
        .filter(|l| !side.iter().any(|s| s.as_ref() == l.as_str()))
        .cloned()
        .collect();
    if side.is_empty() || other.is_empty() {
        return Ok(0.0);
    }
    if side.len() <= other.len() {
        state.reduced_density(side)?.entropy()
    } else {
        state.reduced_density(&other)?.entropy()
    }
}
