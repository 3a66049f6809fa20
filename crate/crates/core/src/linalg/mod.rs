//! Dense complex linear algebra for small multi-qubit systems.

pub mod density;
pub mod eigen;
pub mod matrix;
pub mod state;

pub use density::{partial_trace, von_neumann_entropy, DensityOp};
pub use eigen::{hermitian_eigen, hermitian_eigenvalues, HermitianEigen};
pub use matrix::{overlap, tensor, CMatrix, CVector, Tensor};
pub use num_complex::Complex64;
pub use state::{Label, PureState};

/// Validation tolerance for Hermiticity, unit trace and positivity.
pub const TOL_HERMITIAN: f64 = 1e-9;
/// Eigendecomposition reconstruction tolerance.
pub const TOL_RECONSTRUCT: f64 = 1e-10;
/// Allowed deviation of a pure state's norm from one.
pub const TOL_NORM: f64 = 1e-10;
