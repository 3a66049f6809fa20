#![allow(dead_code)]

use num_complex::Complex64;
use qrc::linalg::CMatrix;

/// Reduced matrix by explicit index summation. Qubit 0 is the most
/// significant bit; the kept qubits appear in the order given.
pub fn partial_trace_oracle(rho: &CMatrix, n: usize, keep: &[usize]) -> CMatrix {
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let bit = |index: usize, q: usize| (index >> (n - 1 - q)) & 1;
    let dk = 1 << keep.len();
    let mut out = vec![Complex64::new(0.0, 0.0); dk * dk];
    for row in 0..rho.rows() {
        for col in 0..rho.cols() {
            if traced.iter().any(|&q| bit(row, q) != bit(col, q)) {
                continue;
            }
            let r = keep.iter().fold(0, |acc, &q| (acc << 1) | bit(row, q));
            let c = keep.iter().fold(0, |acc, &q| (acc << 1) | bit(col, q));
            out[r * dk + c] += rho[(row, col)];
        }
    }
    CMatrix::from_fn(dk, dk, |i, j| out[i * dk + j])
}

/// Every subset of `0..n`, in every order for subsets of size two.
pub fn keep_sets(n: usize) -> Vec<Vec<usize>> {
    let mut sets = Vec::new();
    for mask in 0..(1usize << n) {
        let set: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
        if set.len() == 2 {
            sets.push(vec![set[1], set[0]]);
        }
        sets.push(set);
    }
    sets
}
