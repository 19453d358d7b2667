// SPDX-License-Identifier: Apache-2.0

//! Dense density-matrix reference simulator for small registers, plus
//! Kraus-operator helpers used to validate the PTM library.

use num_complex::Complex64;

use crate::channel::{ChannelApplication, Ptm};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, local_masks, pauli_element, pauli_trace, CMatrix, ONE, ZERO};
use crate::operator::FactoredState;
use crate::pauli::{check_subset, local_dim};
use crate::propagation::Circuit;

/// Largest register the oracle simulates.
pub const MAX_ORACLE_QUBITS: usize = 8;

const KRAUS_TOLERANCE: f64 = 1e-8;

/// Dense `2^n × 2^n` operator on the full register.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    matrix: CMatrix,
}

/// Splits full-register indices into (local bits on `qubits`, remaining
/// bits compressed in increasing qubit order).
struct SubsystemIndex {
    local: Vec<usize>,
    rest: Vec<usize>,
    /// `join[l * rest_dim + r]` is the full index.
    join: Vec<usize>,
    rest_dim: usize,
}

impl SubsystemIndex {
    fn new(n: usize, qubits: &[usize]) -> Self {
        let dim = 1usize << n;
        let others: Vec<usize> = (0..n).filter(|q| !qubits.contains(q)).collect();
        let rest_dim = 1usize << others.len();
        let mut local = vec![0; dim];
        let mut rest = vec![0; dim];
        let mut join = vec![0; dim];
        for idx in 0..dim {
            let l = qubits
                .iter()
                .enumerate()
                .fold(0, |acc, (t, &q)| acc | (((idx >> q) & 1) << t));
            let r = others
                .iter()
                .enumerate()
                .fold(0, |acc, (t, &q)| acc | (((idx >> q) & 1) << t));
            local[idx] = l;
            rest[idx] = r;
            join[l * rest_dim + r] = idx;
        }
        Self {
            local,
            rest,
            join,
            rest_dim,
        }
    }
}

impl DensityMatrix {
    pub fn new(n: usize, matrix: CMatrix) -> Result<Self> {
        if n > MAX_ORACLE_QUBITS {
            return Err(Error::OracleTooLarge {
                n,
                max: MAX_ORACLE_QUBITS,
            });
        }
        let dim = 1usize << n;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix for {n} qubits",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { n, matrix })
    }

    /// Dense form of a product operator: `ρ[r, c] = Π_f A_f[r|_f, c|_f]`.
    pub fn from_factored(s: &FactoredState) -> Result<Self> {
        let n = s.num_qubits();
        if n > MAX_ORACLE_QUBITS {
            return Err(Error::OracleTooLarge {
                n,
                max: MAX_ORACLE_QUBITS,
            });
        }
        let dim = 1usize << n;
        let restrict = |idx: usize, qubits: &[usize]| {
            qubits
                .iter()
                .enumerate()
                .fold(0, |acc, (t, &q)| acc | (((idx >> q) & 1) << t))
        };
        let m = CMatrix::from_fn(dim, dim, |r, c| {
            s.factors().iter().fold(ONE, |acc, f| {
                acc * f.op.matrix()[(restrict(r, &f.qubits), restrict(c, &f.qubits))]
            })
        });
        Ok(Self { n, matrix: m })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr(E ρ)`.
    pub fn expectation(&self, e: &DensityMatrix) -> f64 {
        let mut acc = ZERO;
        for r in 0..self.matrix.nrows() {
            for c in 0..self.matrix.ncols() {
                acc += e.matrix[(r, c)] * self.matrix[(c, r)];
            }
        }
        acc.re
    }

    /// Applies a PTM to `qubits`: with `M_j = Tr_Q((σ_j ⊗ I) ρ)` we have
    /// `ρ = 2^{-k} Σ_j σ_j ⊗ M_j`, so `Λ(ρ) = 2^{-k} Σ_i σ_i ⊗ Σ_j R_ij M_j`.
    pub fn apply_ptm(&mut self, ptm: &Ptm, qubits: &[usize]) -> Result<()> {
        check_subset(qubits, self.n)?;
        if ptm.k_in() != qubits.len() || ptm.k_out() != qubits.len() {
            return Err(Error::ShapeMismatch(format!(
                "{}->{} qubit PTM on {} qubit(s)",
                ptm.k_in(),
                ptm.k_out(),
                qubits.len()
            )));
        }
        let k = qubits.len();
        let idx = SubsystemIndex::new(self.n, qubits);
        let (ld, rd) = (1usize << k, idx.rest_dim);
        let at = |l: usize, r: usize| idx.join[l * rd + r];

        let ms: Vec<CMatrix> = (0..local_dim(k))
            .map(|j| {
                let (x, z, ys) = local_masks(j, k);
                CMatrix::from_fn(rd, rd, |a, b| {
                    // Σ_l σ[l^x, l] ρ[(l, a), (l^x, b)]
                    let mut acc = ZERO;
                    for l in 0..ld {
                        acc += pauli_element(l, z, ys) * self.matrix[(at(l, a), at(l ^ x, b))];
                    }
                    acc
                })
            })
            .collect();

        let scale = 1.0 / ld as f64;
        let mut out = CMatrix::zeros(self.matrix.nrows(), self.matrix.ncols());
        for i in 0..local_dim(k) {
            let mut ni = CMatrix::zeros(rd, rd);
            for (j, m) in ms.iter().enumerate() {
                let rij = ptm.get(i, j);
                if rij != 0.0 {
                    ni += m * Complex64::new(rij * scale, 0.0);
                }
            }
            let (x, z, ys) = local_masks(i, k);
            for l2 in 0..ld {
                let e = pauli_element(l2, z, ys);
                let l = l2 ^ x;
                for a in 0..rd {
                    for b in 0..rd {
                        out[(at(l, a), at(l2, b))] += e * ni[(a, b)];
                    }
                }
            }
        }
        self.matrix = out;
        Ok(())
    }

    /// `Σ K ρ K†` with each `K` acting on `qubits`.
    pub fn apply_kraus(&mut self, ops: &[CMatrix], qubits: &[usize]) -> Result<()> {
        check_subset(qubits, self.n)?;
        check_kraus(ops, qubits.len())?;
        let embedded: Vec<CMatrix> = ops.iter().map(|k| embed(k, qubits, self.n)).collect();
        let mut out = CMatrix::zeros(self.matrix.nrows(), self.matrix.ncols());
        for k in &embedded {
            out += k * &self.matrix * k.adjoint();
        }
        self.matrix = out;
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.matrix)[0]
    }
}

/// Checks the shapes and `Σ K†K ≤ I` within tolerance.
fn check_kraus(ops: &[CMatrix], k: usize) -> Result<()> {
    let dim = 1usize << k;
    if ops.is_empty() {
        return Err(Error::InvalidArgument("empty Kraus set".into()));
    }
    let mut sum = CMatrix::zeros(dim, dim);
    for op in ops {
        if op.nrows() != dim || op.ncols() != dim {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} Kraus operator on {k} qubit(s)",
                op.nrows(),
                op.ncols()
            )));
        }
        sum += op.adjoint() * op;
    }
    let top = *hermitian_eigenvalues(&sum).last().unwrap();
    if top > 1.0 + KRAUS_TOLERANCE {
        return Err(Error::KrausCompleteness(top));
    }
    Ok(())
}

/// `op` on `qubits` tensored with the identity elsewhere.
fn embed(op: &CMatrix, qubits: &[usize], n: usize) -> CMatrix {
    let idx = SubsystemIndex::new(n, qubits);
    let dim = 1usize << n;
    CMatrix::from_fn(dim, dim, |r, c| {
        if idx.rest[r] == idx.rest[c] {
            op[(idx.local[r], idx.local[c])]
        } else {
            ZERO
        }
    })
}

/// `Σ K ρ K†` on a small operator.
pub fn apply_kraus(ops: &[CMatrix], rho: &CMatrix) -> Result<CMatrix> {
    let dim = rho.nrows();
    let k = dim.trailing_zeros() as usize;
    if dim != 1 << k || rho.ncols() != dim {
        return Err(Error::ShapeMismatch(format!("{}x{} operator", rho.nrows(), rho.ncols())));
    }
    check_kraus(ops, k)?;
    let mut out = CMatrix::zeros(dim, dim);
    for op in ops {
        out += op * rho * op.adjoint();
    }
    Ok(out)
}

/// `R_ij = 2^{-k} Tr(σ_i Σ K σ_j K†)`.
pub fn ptm_from_kraus(ops: &[CMatrix]) -> Result<Ptm> {
    let dim = ops.first().map_or(0, |o| o.nrows());
    let k = dim.trailing_zeros() as usize;
    check_kraus(ops, k)?;
    let d = local_dim(k);
    let mut data = vec![0.0; d * d];
    for j in 0..d {
        let image = apply_kraus(ops, &crate::linalg::pauli_matrix(k, j))?;
        for i in 0..d {
            data[i * d + j] = pauli_trace(k, i, &image).re / dim as f64;
        }
    }
    Ptm::new(k, k, data)
}

/// `Tr(E Λ_k(⋯Λ_1(ρ_0)))` computed densely.
pub fn run_exact(c: &Circuit) -> Result<f64> {
    let mut rho = DensityMatrix::from_factored(&c.input)?;
    for ChannelApplication { ptm, qubits } in &c.channels {
        rho.apply_ptm(ptm, qubits)?;
    }
    let e = DensityMatrix::from_factored(&c.observable)?;
    Ok(rho.expectation(&e))
}

/// Dense unitaries and Kraus sets mirroring the channel library.
pub mod kraus {
    use super::*;
    use crate::linalg::{pauli_matrix, tensor_low_high};
    use crate::operator::DenseOperator;
    use crate::pauli::PauliString;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub fn identity(k: usize) -> CMatrix {
        CMatrix::identity(1 << k, 1 << k)
    }

    /// `e^{-iθσ_Z/2}`.
    pub fn rz(theta: f64) -> CMatrix {
        let h = theta / 2.0;
        CMatrix::from_row_slice(2, 2, &[c(h.cos(), -h.sin()), ZERO, ZERO, c(h.cos(), h.sin())])
    }

    /// `e^{-iφP} = cos φ I - i sin φ P`.
    pub fn pauli_exponential(p: &PauliString, phi: f64) -> CMatrix {
        let k = p.num_qubits();
        let idx = crate::pauli::encode_local(&p.digits());
        identity(k) * c(phi.cos(), 0.0) + pauli_matrix(k, idx) * c(0.0, -phi.sin())
    }

    /// Unitaries of the named gates; two-qubit gates act on (qubit 0,
    /// qubit 1) with qubit 0 the control of `cnot`.
    pub fn gate(name: &str) -> Result<CMatrix> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Ok(match name.to_ascii_lowercase().as_str() {
            "h" => CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]),
            "s" => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(0.0, 1.0)]),
            "x" => pauli_matrix(1, 1),
            "y" => pauli_matrix(1, 2),
            "z" => pauli_matrix(1, 3),
            "t" => rz(std::f64::consts::FRAC_PI_4),
            "cnot" | "cx" => {
                // index = q0 + 2 q1; flip q1 when q0 = 1
                let mut m = CMatrix::zeros(4, 4);
                for col in 0..4usize {
                    let row = if col & 1 == 1 { col ^ 2 } else { col };
                    m[(row, col)] = ONE;
                }
                m
            }
            "cz" => {
                let mut m = CMatrix::identity(4, 4);
                m[(3, 3)] = -ONE;
                m
            }
            other => return Err(Error::UnknownName(other.to_string())),
        })
    }

    pub fn depolarizing(f: f64) -> Vec<CMatrix> {
        let a = ((1.0 + 3.0 * f) / 4.0).sqrt();
        let b = ((1.0 - f) / 4.0).sqrt();
        let mut ops = vec![identity(1) * c(a, 0.0)];
        for i in 1..4 {
            ops.push(pauli_matrix(1, i) * c(b, 0.0));
        }
        ops
    }

    pub fn measure_z() -> Vec<CMatrix> {
        vec![projector(0), projector(1)]
    }

    /// `|b⟩⟨b|` on one qubit.
    pub fn projector(b: usize) -> CMatrix {
        let mut m = CMatrix::zeros(2, 2);
        m[(b, b)] = ONE;
        m
    }

    /// `K_{a,m} = √p_a |ψ_a⟩⟨m|` from the eigendecomposition of `ρ`.
    pub fn reset(rho: &DenseOperator) -> Vec<CMatrix> {
        let dim = rho.matrix().nrows();
        let eig = nalgebra::SymmetricEigen::new(rho.matrix().clone());
        let mut ops = Vec::new();
        for (a, &p) in eig.eigenvalues.iter().enumerate() {
            if p <= 1e-14 {
                continue;
            }
            let v = eig.eigenvectors.column(a);
            for m in 0..dim {
                let mut op = CMatrix::zeros(dim, dim);
                for r in 0..dim {
                    op[(r, m)] = v[r] * p.sqrt();
                }
                ops.push(op);
            }
        }
        ops
    }

    /// Measure the control (lowest qubit) and apply `inner` on outcome 1.
    pub fn adaptive(inner: &[CMatrix]) -> Vec<CMatrix> {
        let k = inner[0].nrows().trailing_zeros() as usize;
        let mut ops = vec![tensor_low_high(&projector(0), &identity(k))];
        for op in inner {
            ops.push(tensor_low_high(&projector(1), op));
        }
        ops
    }

    pub fn compose(second: &[CMatrix], first: &[CMatrix]) -> Vec<CMatrix> {
        let mut out = Vec::new();
        for b in second {
            for a in first {
                out.push(b * a);
            }
        }
        out
    }
}
