// SPDX-License-Identifier: Apache-2.0

//! Small dense complex linear algebra shared by the operator, channel and
//! oracle modules. Dense indices put qubit 0 in the least-significant bit.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::pauli::local_dim;

pub type CMatrix = DMatrix<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// X and Z masks of a local Pauli index on `k` qubits.
#[inline]
pub(crate) fn local_masks(index: usize, k: usize) -> (usize, usize, u32) {
    let (mut x, mut z, mut ys) = (0usize, 0usize, 0u32);
    for t in 0..k {
        match (index >> (2 * t)) & 3 {
            1 => x |= 1 << t,
            2 => {
                x |= 1 << t;
                z |= 1 << t;
                ys += 1;
            }
            3 => z |= 1 << t,
            _ => {}
        }
    }
    (x, z, ys)
}

#[inline]
fn i_pow(e: u32) -> Complex64 {
    match e % 4 {
        0 => ONE,
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Matrix element `<row|σ|col>` is nonzero only for `row = col ^ x`; returns
/// that element for column `col`.
#[inline]
pub(crate) fn pauli_element(col: usize, z: usize, ys: u32) -> Complex64 {
    let sign = if (col & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
    i_pow(ys) * sign
}

/// Dense `2^k × 2^k` matrix of the local Pauli with base-4 index `index`.
pub fn pauli_matrix(k: usize, index: usize) -> CMatrix {
    let dim = 1usize << k;
    let (x, z, ys) = local_masks(index, k);
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        m[(col ^ x, col)] = pauli_element(col, z, ys);
    }
    m
}

/// `Tr(σ_index · a)` without forming the Pauli densely.
pub fn pauli_trace(k: usize, index: usize, a: &CMatrix) -> Complex64 {
    let dim = 1usize << k;
    let (x, z, ys) = local_masks(index, k);
    // Tr(σA) = Σ_r σ[r, r^x] A[r^x, r]
    let mut acc = ZERO;
    for r in 0..dim {
        acc +=pauli_element(r ^ x, z, ys) * a[(r ^ x, r)];
    }
    acc
}

/// Real Pauli coefficients `Tr(σ_i A) / 2^k` of a Hermitian matrix.
pub fn pauli_coefficients(k: usize, a: &CMatrix) -> Vec<f64> {
    let norm = (1usize << k) as f64;
    (0..local_dim(k))
        .map(|i| pauli_trace(k, i, a).re / norm)
        .collect()
}

/// `Σ_i coeffs[i] σ_i`.
pub fn from_pauli_coefficients(k: usize, coeffs: &[f64]) -> CMatrix {
    let dim = 1usize << k;
    let mut m = CMatrix::zeros(dim, dim);
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let (x, z, ys) = local_masks(i, k);
        for col in 0..dim {
            m[(col ^ x, col)] += pauli_element(col, z, ys) * c;
        }
    }
    m
}

pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let mut acc = ZERO;
    for r in 0..a.nrows() {
        for c in 0..a.ncols() {
            acc += a[(r, c)] * b[(c, r)];
        }
    }
    acc
}

/// Largest entry of `|A - A^dag|`.
pub fn hermiticity_defect(a: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..a.nrows() {
        for c in 0..a.ncols() {
            worst = worst.max((a[(r, c)] - a[(c, r)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let n = a.nrows();
    // symmetrize so round-off asymmetry never leaks into the solver
    let m = faer::Mat::<Complex64>::from_fn(n, n, |r, c| (a[(r, c)] + a[(c, r)].conj()) * 0.5);
    let mut ev = m
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .expect("Hermitian eigensolver failed to converge");
    ev.sort_by(f64::total_cmp);
    ev
}

/// Tensor product with `low` on the lower-indexed qubits.
pub fn tensor_low_high(low: &CMatrix, high: &CMatrix) -> CMatrix {
    high.kronecker(low)
}
