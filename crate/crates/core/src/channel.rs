// SPDX-License-Identifier: Apache-2.0

//! Quantum channels as Pauli transfer matrices.
//!
//! `R_ij = 2^{-k_out} Tr(σ_i Λ(σ_j))`, so column `j` holds the Pauli
//! coefficients of `Λ(σ_j)` and `Λ(σ_j) = Σ_i R_ij σ_i`. Index 0 is the
//! identity. Local indices follow [`crate::pauli`]: the first qubit of a
//! channel's qubit list is the least-significant base-4 digit.
//!
//! The channel stabilizer norm `𝒟(Λ)` is the largest column L1 norm and
//! `𝒟(Λ†)` the largest row L1 norm, since the adjoint's PTM is the
//! transpose.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{from_pauli_coefficients, hermitian_eigenvalues, CMatrix};
use crate::operator::{DenseOperator, PauliCoeffs, MAX_DENSE_QUBITS};
use crate::pauli::{check_subset, local_dim, local_y_count, PauliString};

/// Smallest admissible Choi eigenvalue.
pub const CP_TOLERANCE: f64 = 1e-8;

/// Largest channel acted on by a single PTM (adaptive on a 2-qubit inner
/// channel, or a 3-local rotation).
pub const MAX_PTM_QUBITS: usize = 3;

/// Pauli transfer matrix of a channel taking `k_in` qubits to `k_out`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ptm {
    k_in: usize,
    k_out: usize,
    /// Row-major, `4^k_out` rows by `4^k_in` columns.
    data: Vec<f64>,
}

impl Ptm {
    pub fn new(k_in: usize, k_out: usize, data: Vec<f64>) -> Result<Self> {
        if k_in > MAX_PTM_QUBITS || k_out > MAX_PTM_QUBITS {
            return Err(Error::TooManyQubits {
                k: k_in.max(k_out),
                max: MAX_PTM_QUBITS,
            });
        }
        let expect = local_dim(k_in) * local_dim(k_out);
        if data.len() != expect {
            return Err(Error::ShapeMismatch(format!(
                "PTM for {k_in}->{k_out} qubits needs {expect} entries, got {}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite PTM entry".into()));
        }
        Ok(Self { k_in, k_out, data })
    }

    /// Square PTM from explicit rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let k = match dim {
            4 => 1,
            16 => 2,
            64 => 3,
            _ => {
                return Err(Error::ShapeMismatch(format!(
                    "{dim} rows is not 4, 16 or 64"
                )))
            }
        };
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::ShapeMismatch("PTM rows must be square".into()));
        }
        Self::new(k, k, rows.concat())
    }

    pub fn identity(k: usize) -> Self {
        let dim = local_dim(k);
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Self {
            k_in: k,
            k_out: k,
            data,
        }
    }

    fn diagonal(k: usize, diag: &[f64]) -> Self {
        let mut p = Self::identity(k);
        let dim = local_dim(k);
        for (i, &v) in diag.iter().enumerate() {
            p.data[i * dim + i] = v;
        }
        p
    }

    #[inline]
    pub fn k_in(&self) -> usize {
        self.k_in
    }

    #[inline]
    pub fn k_out(&self) -> usize {
        self.k_out
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        local_dim(self.k_out)
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        local_dim(self.k_in)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.ncols() + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let c = self.ncols();
        self.data[i * c + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.nrows()).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        let c = self.ncols();
        self.data[i * c..(i + 1) * c].to_vec()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.nrows()).map(|i| self.row(i)).collect()
    }

    /// `𝒟(Λ)`: largest column L1 norm.
    pub fn channel_norm(&self) -> f64 {
        (0..self.ncols())
            .map(|j| (0..self.nrows()).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `𝒟(Λ†)`: largest row L1 norm.
    pub fn adjoint_norm(&self) -> f64 {
        (0..self.nrows())
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// PTM of the adjoint channel (the transpose).
    pub fn adjoint(&self) -> Ptm {
        let (r, c) = (self.nrows(), self.ncols());
        let mut data = vec![0.0; r * c];
        for i in 0..r {
            for j in 0..c {
                data[j * r + i] = self.get(i, j);
            }
        }
        Ptm {
            k_in: self.k_out,
            k_out: self.k_in,
            data,
        }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &Ptm) -> Result<Ptm> {
        if self.k_in != first.k_out {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose a {}-qubit-input channel after a {}-qubit-output channel",
                self.k_in, first.k_out
            )));
        }
        let (r, m, c) = (self.nrows(), self.ncols(), first.ncols());
        let mut data = vec![0.0; r * c];
        for i in 0..r {
            for t in 0..m {
                let a = self.get(i, t);
                if a == 0.0 {
                    continue;
                }
                for j in 0..c {
                    data[i * c + j] += a * first.get(t, j);
                }
            }
        }
        Ptm::new(first.k_in, self.k_out, data)
    }

    /// First row equals `(1, 0, …, 0)`.
    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.row(0)
            .iter()
            .enumerate()
            .all(|(j, &v)| (v - if j == 0 { 1.0 } else { 0.0 }).abs() <= tol)
    }

    /// First column equals `(1, 0, …, 0)ᵀ`.
    pub fn is_unital(&self, tol: f64) -> bool {
        self.column(0)
            .iter()
            .enumerate()
            .all(|(i, &v)| (v - if i == 0 { 1.0 } else { 0.0 }).abs() <= tol)
    }

    /// Copy with the first column forced to `(1, 0, …, 0)ᵀ`.
    pub fn project_unital(&self) -> Ptm {
        let mut p = self.clone();
        for i in 0..p.nrows() {
            p.set(i, 0, if i == 0 { 1.0 } else { 0.0 });
        }
        p
    }

    /// Copy with the first row forced to `(1, 0, …, 0)`.
    pub fn project_trace_preserving(&self) -> Ptm {
        let mut p = self.clone();
        for j in 0..p.ncols() {
            p.set(0, j, if j == 0 { 1.0 } else { 0.0 });
        }
        p
    }

    /// Whether the PTM is diagonal within `tol`.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..self.nrows()).all(|i| (0..self.ncols()).all(|j| i == j || self.get(i, j).abs() <= tol))
    }

    /// Pauli coefficients of the un-normalized Choi state
    /// `φ_Λ = (Λ ⊗ I)(|Bell⟩⟨Bell|)` on `H^B ⊗ H^A`, with the output (B)
    /// qubits lowest. Uses `|Bell⟩⟨Bell| = d^{-2} Σ_j σ_j ⊗ σ_jᵀ`.
    pub fn choi_coefficients(&self) -> Vec<f64> {
        let (rows, cols) = (self.nrows(), self.ncols());
        let d_in = (1u64 << self.k_in) as f64;
        let scale = 1.0 / (d_in * d_in);
        let mut out = vec![0.0; rows * cols];
        for j in 0..cols {
            let sign = if local_y_count(j, self.k_in) % 2 == 1 { -1.0 } else { 1.0 };
            for i in 0..rows {
                out[i + rows * j] = scale * sign * self.get(i, j);
            }
        }
        out
    }

    /// Dense un-normalized Choi matrix.
    pub fn choi_matrix(&self) -> CMatrix {
        from_pauli_coefficients(self.k_in + self.k_out, &self.choi_coefficients())
    }

    /// Smallest eigenvalue of the un-normalized Choi matrix.
    pub fn min_choi_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.choi_matrix())[0]
    }

    pub fn is_completely_positive(&self) -> bool {
        self.min_choi_eigenvalue() >= -CP_TOLERANCE
    }

    pub fn validate_cp(&self) -> Result<()> {
        let min = self.min_choi_eigenvalue();
        if min < -CP_TOLERANCE {
            Err(Error::NotCompletelyPositive(min))
        } else {
            Ok(())
        }
    }
}

/// `𝒟(Λ)`, the largest column L1 norm.
pub fn channel_norm(ptm: &Ptm) -> f64 {
    ptm.channel_norm()
}

/// The adjoint channel's PTM.
pub fn adjoint(ptm: &Ptm) -> Ptm {
    ptm.adjoint()
}

/// `a ∘ b`, i.e. the matrix product with `b` applied first.
pub fn compose(a: &Ptm, b: &Ptm) -> Result<Ptm> {
    a.compose(b)
}

/// A channel placed on an ordered subset of the register.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelApplication {
    pub ptm: Ptm,
    pub qubits: Vec<usize>,
}

impl ChannelApplication {
    pub fn new(ptm: Ptm, qubits: Vec<usize>, n: usize) -> Result<Self> {
        if ptm.k_in != ptm.k_out {
            return Err(Error::Validation(format!(
                "in-circuit channels must keep their qubit count ({} -> {})",
                ptm.k_in, ptm.k_out
            )));
        }
        if qubits.len() != ptm.k_in {
            return Err(Error::ShapeMismatch(format!(
                "{}-qubit channel placed on {} qubit(s)",
                ptm.k_in,
                qubits.len()
            )));
        }
        check_subset(&qubits, n)?;
        Ok(Self { ptm, qubits })
    }
}

/// Pauli coefficients of `Λ(σ_j)` where `j` is the local word of `p` on the
/// channel's qubits. Qubits outside the application are untouched by the
/// channel and are not part of the returned vector.
pub fn apply_to_pauli(app: &ChannelApplication, p: &PauliString) -> Result<PauliCoeffs> {
    let j = crate::pauli::pauli_index_on_subset(p, &app.qubits)?;
    Ok(PauliCoeffs {
        k: app.ptm.k_out,
        coeffs: app.ptm.column(j),
    })
}

// --- library channels -----------------------------------------------------

/// `e^{-iθσ_Z/2}`.
pub fn make_rotation(theta: f64) -> Ptm {
    let (s, c) = theta.sin_cos();
    let p = Ptm::from_rows(&[
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, c, -s, 0.0],
        vec![0.0, s, c, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
    ])
    .unwrap();
    debug_assert!(p.is_completely_positive());
    p
}

/// Single-qubit depolarizing channel with fidelity `f`: `diag(1, f, f, f)`.
pub fn make_depolarizing(f: f64) -> Result<Ptm> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::FidelityOutOfRange(f));
    }
    let p = Ptm::diagonal(1, &[1.0, f, f, f]);
    p.validate_cp()?;
    Ok(p)
}

/// `e^{-iθσ_Z/2}` followed by depolarizing noise of fidelity `f`.
pub fn make_depolarized_rotation(f: f64, theta: f64) -> Result<Ptm> {
    make_depolarizing(f)?.compose(&make_rotation(theta))
}

/// Non-selective `σ_Z` measurement (dephasing): `diag(1, 0, 0, 1)`.
pub fn make_measure_z() -> Ptm {
    Ptm::diagonal(1, &[1.0, 0.0, 0.0, 1.0])
}

/// Signed permutation PTM from a map over local indices.
fn signed_permutation(k: usize, image: impl Fn(usize) -> (usize, f64)) -> Ptm {
    let dim = local_dim(k);
    let mut data = vec![0.0; dim * dim];
    for j in 0..dim {
        let (i, s) = image(j);
        data[i * dim + j] = s;
    }
    Ptm {
        k_in: k,
        k_out: k,
        data,
    }
}

fn xz(digit: usize) -> (usize, usize) {
    match digit & 3 {
        0 => (0, 0),
        1 => (1, 0),
        2 => (1, 1),
        _ => (0, 1),
    }
}

fn digit(x: usize, z: usize) -> usize {
    match (x, z) {
        (0, 0) => 0,
        (1, 0) => 1,
        (1, 1) => 2,
        _ => 3,
    }
}

/// Clifford gates by name: `h`, `s`, `x`, `y`, `z` (one qubit) and `cnot`
/// (control first), `cz` (two qubits).
pub fn make_clifford(name: &str) -> Result<Ptm> {
    let p = match name.to_ascii_lowercase().as_str() {
        // I, X, Y, Z columns
        "h" => signed_permutation(1, |j| [(0, 1.0), (3, 1.0), (2, -1.0), (1, 1.0)][j]),
        "s" => signed_permutation(1, |j| [(0, 1.0), (2, 1.0), (1, -1.0), (3, 1.0)][j]),
        "x" => Ptm::diagonal(1, &[1.0, 1.0, -1.0, -1.0]),
        "y" => Ptm::diagonal(1, &[1.0, -1.0, 1.0, -1.0]),
        "z" => Ptm::diagonal(1, &[1.0, -1.0, -1.0, 1.0]),
        "cnot" | "cx" => signed_permutation(2, |j| {
            let (xc, zc) = xz(j);
            let (xt, zt) = xz(j >> 2);
            let sign = if xc & zt & (xt ^ zc ^ 1) == 1 { -1.0 } else { 1.0 };
            (digit(xc, zc ^ zt) | digit(xt ^ xc, zt) << 2, sign)
        }),
        "cz" => signed_permutation(2, |j| {
            let (xa, za) = xz(j);
            let (xb, zb) = xz(j >> 2);
            let sign = if xa & xb & (za ^ zb) == 1 { -1.0 } else { 1.0 };
            (digit(xa, za ^ xb) | digit(xb, zb ^ xa) << 2, sign)
        }),
        other => return Err(Error::UnknownName(other.to_string())),
    };
    Ok(p)
}

/// The `T = e^{-iπσ_Z/8}` gate.
pub fn make_t() -> Ptm {
    make_rotation(std::f64::consts::FRAC_PI_4)
}

/// Library gates by circuit-file name (`h`, `s`, `cnot`, `cz`, `x`, `y`,
/// `z`, `t`).
pub fn make_gate(name: &str) -> Result<Ptm> {
    match name.to_ascii_lowercase().as_str() {
        "t" => Ok(make_t()),
        other => make_clifford(other),
    }
}

/// Phase (power of `i`) and result digit of a single-qubit Pauli product.
fn mul_digits(a: usize, b: usize) -> (usize, u32) {
    if a == 0 {
        return (b, 0);
    }
    if b == 0 {
        return (a, 0);
    }
    if a == b {
        return (0, 0);
    }
    // X=1, Y=2, Z=3: XY = iZ, YZ = iX, ZX = iY
    let c = 6 - a - b;
    let cyclic = matches!((a, b), (1, 2) | (2, 3) | (3, 1));
    (c, if cyclic { 1 } else { 3 })
}

/// `e^{-iφP}` for a Pauli word `P` on up to three qubits.
pub fn make_pauli_rotation(pauli: &PauliString, angle: f64) -> Result<Ptm> {
    let k = pauli.num_qubits();
    if k > MAX_PTM_QUBITS {
        return Err(Error::TooManyQubits {
            k,
            max: MAX_PTM_QUBITS,
        });
    }
    let p_digits = pauli.digits();
    let dim = local_dim(k);
    let (s2, c2) = (2.0 * angle).sin_cos();
    let mut data = vec![0.0; dim * dim];
    for j in 0..dim {
        let mut phase = 0u32;
        let mut prod = 0usize;
        let mut anti = 0u32;
        for (t, &pd) in p_digits.iter().enumerate() {
            let sd = (j >> (2 * t)) & 3;
            let (d, ph) = mul_digits(pd as usize, sd);
            phase += ph;
            prod |= d << (2 * t);
            if pd != 0 && sd != 0 && pd as usize != sd {
                anti += 1;
            }
        }
        if anti % 2 == 0 {
            data[j * dim + j] = 1.0;
            continue;
        }
        // U σ U† = cos2φ σ - i sin2φ Pσ, and Pσ = i^phase σ_prod with
        // phase odd for anticommuting pairs, so -i·i^phase = ±1.
        let sign = match (phase + 3) % 4 {
            0 => 1.0,
            2 => -1.0,
            _ => unreachable!("anticommuting product must be anti-Hermitian"),
        };
        data[j * dim + j] = c2;
        data[prod * dim + j] = sign * s2;
    }
    let p = Ptm::new(k, k, data)?;
    debug_assert!(p.is_completely_positive());
    Ok(p)
}

/// Reset channel `Λ_ρ(σ) = Tr(σ) ρ`; only the identity column is nonzero
/// and it holds `Tr(σ_i ρ)`.
pub fn make_reset(rho: &DenseOperator) -> Result<Ptm> {
    rho.validate_state()?;
    let k = rho.num_qubits();
    if k > MAX_PTM_QUBITS {
        return Err(Error::TooManyQubits {
            k,
            max: MAX_PTM_QUBITS,
        });
    }
    let dim = local_dim(k);
    let scale = (1u64 << k) as f64;
    let mut data = vec![0.0; dim * dim];
    for (i, c) in rho.pauli_coeffs().coeffs.iter().enumerate() {
        data[i * dim] = c * scale;
    }
    let p = Ptm::new(k, k, data)?;
    p.validate_cp()?;
    Ok(p)
}

/// Adaptive channel: measure a control qubit in the Z basis (keeping it)
/// and apply `inner` when the outcome is 1. The control is the first
/// (lowest-index) qubit of the returned `(k+1)`-qubit block.
///
/// Nonzero entries sit on `{I, Z}` control rows/columns and equal
/// `½(δ_ij ± R_ij)`, `+` when the control words agree.
pub fn make_adaptive(inner: &Ptm) -> Result<Ptm> {
    if inner.k_in != inner.k_out {
        return Err(Error::Validation(
            "adaptive channels need an inner channel with equal input and output size".into(),
        ));
    }
    let k = inner.k_in + 1;
    if k > MAX_PTM_QUBITS {
        return Err(Error::TooManyQubits {
            k,
            max: MAX_PTM_QUBITS,
        });
    }
    let dim = local_dim(k);
    let inner_dim = inner.nrows();
    let mut data = vec![0.0; dim * dim];
    const CONTROL: [usize; 2] = [0, 3];
    for i in 0..inner_dim {
        for j in 0..inner_dim {
            let delta = if i == j { 1.0 } else { 0.0 };
            let r = inner.get(i, j);
            for &a_out in &CONTROL {
                for &a_in in &CONTROL {
                    let v = if a_out == a_in {
                        0.5 * (delta + r)
                    } else {
                        0.5 * (delta - r)
                    };
                    data[(a_out + 4 * i) * dim + (a_in + 4 * j)] = v;
                }
            }
        }
    }
    let p = Ptm::new(k, k, data)?;
    p.validate_cp()?;
    Ok(p)
}

/// Closed forms for the adaptive channel norms: `1 + max_j Σ_{i≠j}|R_ij|`
/// for `𝒟(A(Λ))` (off-diagonal column sums) and `1 + max_i Σ_{j≠i}|R_ij|`
/// for `𝒟(A(Λ)†)` (off-diagonal row sums).
pub fn adaptive_norms(inner: &Ptm) -> (f64, f64) {
    let n = inner.nrows();
    let col = (0..n)
        .map(|j| (0..n).filter(|&i| i != j).map(|i| inner.get(i, j).abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let row = (0..n)
        .map(|i| (0..n).filter(|&j| j != i).map(|j| inner.get(i, j).abs()).sum::<f64>())
        .fold(0.0, f64::max);
    (1.0 + col, 1.0 + row)
}

// --- Choi states ----------------------------------------------------------

/// Normalized Choi state `φ̄_Λ` on `H^B ⊗ H^A` (output qubits lowest) and
/// the postselection probability `p_Λ` with `φ_Λ = p_Λ φ̄_Λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiState {
    pub k_in: usize,
    pub k_out: usize,
    pub normalized: DenseOperator,
    pub p_lambda: f64,
}

/// `1/p_Λ = d_A · max_ψ Tr(φ̄ (I ⊗ (|ψ⟩⟨ψ|)ᵀ))`, the top eigenvalue of
/// `d_A · Tr_B φ̄` (transposition does not move eigenvalues).
fn postselection_probability(coeffs: &[f64], k_in: usize, k_out: usize) -> f64 {
    let rows = local_dim(k_out);
    let d_out = (1u64 << k_out) as f64;
    let d_in = (1u64 << k_in) as f64;
    // Tr_B(σ_i ⊗ σ_j) = d_out δ_{i0} σ_j
    let reduced: Vec<f64> = (0..local_dim(k_in))
        .map(|j| coeffs[rows * j] * d_out)
        .collect();
    let m = from_pauli_coefficients(k_in, &reduced);
    let top = *hermitian_eigenvalues(&m).last().unwrap();
    1.0 / (d_in * top)
}

pub fn choi_from_ptm(ptm: &Ptm) -> Result<ChoiState> {
    let k = ptm.k_in + ptm.k_out;
    if k > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits {
            k,
            max: MAX_DENSE_QUBITS,
        });
    }
    let coeffs = ptm.choi_coefficients();
    let trace = coeffs[0] * (1u64 << k) as f64;
    if !(trace > 0.0) {
        return Err(Error::InvalidState(format!(
            "Choi state has non-positive trace {trace}"
        )));
    }
    let normalized_coeffs: Vec<f64> = coeffs.iter().map(|c| c / trace).collect();
    let normalized = DenseOperator::from_pauli_coeffs(k, &normalized_coeffs)?;
    let min = normalized.eigenvalues()[0];
    if min < -CP_TOLERANCE {
        return Err(Error::NotCompletelyPositive(min));
    }
    Ok(ChoiState {
        k_in: ptm.k_in,
        k_out: ptm.k_out,
        p_lambda: postselection_probability(&normalized_coeffs, ptm.k_in, ptm.k_out),
        normalized,
    })
}

/// Postselective channel of a normalized Choi state on `H^B ⊗ H^A`.
pub fn ptm_from_choi_with_dims(normalized: &DenseOperator, k_in: usize, k_out: usize) -> Result<Ptm> {
    if normalized.num_qubits() != k_in + k_out {
        return Err(Error::ShapeMismatch(format!(
            "{}-qubit Choi state for a {k_in}->{k_out} channel",
            normalized.num_qubits()
        )));
    }
    let tr = normalized.trace();
    if (tr - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidState(format!("Choi state trace {tr} != 1")));
    }
    let min = normalized.eigenvalues()[0];
    if min < -CP_TOLERANCE {
        return Err(Error::NotCompletelyPositive(min));
    }
    let coeffs = normalized.pauli_coeffs().coeffs;
    let p = postselection_probability(&coeffs, k_in, k_out);
    let rows = local_dim(k_out);
    let d_in = (1u64 << k_in) as f64;
    let mut data = vec![0.0; rows * local_dim(k_in)];
    for j in 0..local_dim(k_in) {
        let sign = if local_y_count(j, k_in) % 2 == 1 { -1.0 } else { 1.0 };
        for i in 0..rows {
            data[i * local_dim(k_in) + j] = d_in * d_in * p * sign * coeffs[i + rows * j];
        }
    }
    Ptm::new(k_in, k_out, data)
}

/// [`ptm_from_choi_with_dims`] for channels that keep their qubit count.
pub fn ptm_from_choi(normalized: &DenseOperator) -> Result<Ptm> {
    let k = normalized.num_qubits();
    if k % 2 != 0 {
        return Err(Error::ShapeMismatch(format!(
            "odd qubit count {k} for a square channel's Choi state"
        )));
    }
    ptm_from_choi_with_dims(normalized, k / 2, k / 2)
}
