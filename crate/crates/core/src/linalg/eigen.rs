//! Cyclic Jacobi diagonalization of complex Hermitian matrices.
//!
//! Each pivot `(p, q)` is eliminated with a unitary `G = diag(1, e^{-iφ})·R(θ)`
//! acting on rows and columns `p, q`, where `φ = arg(a_pq)` turns the pivot
//! real and `R(θ)` is the usual real Jacobi rotation. Sweeps continue until the
//! off-diagonal Frobenius norm drops below [`OFF_DIAGONAL_THRESHOLD`] (scaled
//! by the matrix norm when that exceeds one).

use num_complex::Complex64;

use super::matrix::{CMatrix, ZERO};
use super::TOL_HERMITIAN;
use crate::error::{Error, Result};

pub const OFF_DIAGONAL_THRESHOLD: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues in descending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// `V Λ V†`.
    pub fn reconstruct(&self) -> CMatrix {
        let lambda: Vec<Complex64> = self.values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let scaled = &self.vectors * &CMatrix::diagonal(&lambda);
        &scaled * &self.vectors.adjoint()
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

pub fn hermitian_eigen(h: &CMatrix) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            expected: h.rows(),
            found: h.cols(),
        });
    }
    let deviation = h.hermitian_deviation();
    if deviation > TOL_HERMITIAN || !h.is_finite() {
        return Err(Error::NotHermitian { deviation });
    }

    let n = h.rows();
    // Symmetrize so the iteration starts exactly Hermitian.
    let mut a = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(h[(i, i)].re, 0.0)
        } else {
            0.5 * (h[(i, j)] + h[(j, i)].conj())
        }
    });
    let mut v = CMatrix::identity(n);
    let threshold = OFF_DIAGONAL_THRESHOLD * a.frobenius_norm().max(1.0);

    let mut converged = off_diagonal_norm(&a) <= threshold;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&a) <= threshold;
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Real eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Result<Vec<f64>> {
    hermitian_eigen(h).map(|e| e.values)
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // w = e^{-iφ} makes the pivot real and positive.
    let w = apq.conj() / r;

    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // G restricted to (p, q): [[c, s], [-s w, c w]].
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -s * w;
    let g_qq = c * w;

    let n = a.rows();
    // A <- A G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    // A <- G† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    // V <- V G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}
