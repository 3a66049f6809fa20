//! Exact simulation of two-party protocols that let Alice apply a unitary to
//! a qubit held by Bob, using shared Bell pairs and classical messages only.
//!
//! [`runtime::LoccRuntime`] enforces locality and keeps a resource ledger.
//! [`protocols`] builds the teleportation-based schemes on top of it and the
//! numerical checks of their lower bounds. [`bounds`] turns ledgers into
//! named pass/fail checks.
//!
//! ```
//! use qrc::ops::hadamard;
//! use qrc::linalg::CVector;
//! use qrc::protocols::{bidirectional_setup, bidirectional_u_teleport, BETA};
//!
//! let rt = bidirectional_setup(&CVector::from_real(&[1.0, 0.0]))?;
//! let run = bidirectional_u_teleport(&rt, &hadamard(), BETA)?;
//! assert!(run.report.passed(1e-9));
//! # Ok::<(), qrc::Error>(())
//! ```

pub mod bounds;
pub mod error;
pub mod linalg;
pub mod ops;
pub mod protocols;
pub mod runtime;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/linear-algebra.md")]
    mod linear_algebra {}
    #[doc = include_str!("../../../book/src/gates.md")]
    mod gates {}
    #[doc = include_str!("../../../book/src/runtime.md")]
    mod runtime {}
    #[doc = include_str!("../../../book/src/protocols.md")]
    mod protocols {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
