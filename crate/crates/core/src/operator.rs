// SPDX-License-Identifier: Apache-2.0

//! Dense Hermitian operators on a few qubits, their Pauli coefficients, the
//! stabilizer norm `𝒟(A) = 2^{-k} Σ_σ |Tr(σA)|`, and the signed Pauli
//! sampler that both propagation directions are built on.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    from_pauli_coefficients, hermiticity_defect, hermitian_eigenvalues, pauli_coefficients,
    tensor_low_high, CMatrix,
};
use crate::pauli::{check_subset, local_dim, LocalSlots, PauliString, SignedPauli};
use crate::table::SignedDistribution;

/// Largest factor of a [`FactoredState`].
pub const MAX_FACTOR_QUBITS: usize = 3;

/// Largest dense operator; Choi states of 3-qubit channels need 6.
pub const MAX_DENSE_QUBITS: usize = 6;

const HERMITIAN_TOLERANCE: f64 = 1e-10;
const STATE_TRACE_TOLERANCE: f64 = 1e-9;
const STATE_PSD_TOLERANCE: f64 = 1e-10;

/// An explicit Hermitian matrix on `k` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    k: usize,
    matrix: CMatrix,
}

impl DenseOperator {
    pub fn new(k: usize, matrix: CMatrix) -> Result<Self> {
        if k > MAX_DENSE_QUBITS {
            return Err(Error::TooManyQubits {
                k,
                max: MAX_DENSE_QUBITS,
            });
        }
        let dim = 1usize << k;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix for {k} qubit(s)",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = hermiticity_defect(&matrix);
        if !(defect <= HERMITIAN_TOLERANCE) {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { k, matrix })
    }

    /// `A = Σ_i coeffs[i] σ_i`.
    pub fn from_pauli_coeffs(k: usize, coeffs: &[f64]) -> Result<Self> {
        if k > MAX_DENSE_QUBITS {
            return Err(Error::TooManyQubits {
                k,
                max: MAX_DENSE_QUBITS,
            });
        }
        if coeffs.len() != local_dim(k) {
            return Err(Error::ShapeMismatch(format!(
                "{} Pauli coefficients for {k} qubit(s)",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite Pauli coefficient".into()));
        }
        Ok(Self {
            k,
            matrix: from_pauli_coefficients(k, coeffs),
        })
    }

    pub fn pauli(k: usize, index: usize) -> Self {
        let mut coeffs = vec![0.0; local_dim(k)];
        coeffs[index] = 1.0;
        Self::from_pauli_coeffs(k, &coeffs).expect("valid Pauli")
    }

    /// Single-qubit state with Bloch vector `(x, y, z)`.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let op = Self::from_pauli_coeffs(1, &[0.5, x / 2.0, y / 2.0, z / 2.0])?;
        op.validate_state()?;
        Ok(op)
    }

    pub fn zero_state() -> Self {
        Self::from_pauli_coeffs(1, &[0.5, 0.0, 0.0, 0.5]).unwrap()
    }

    pub fn one_state() -> Self {
        Self::from_pauli_coeffs(1, &[0.5, 0.0, 0.0, -0.5]).unwrap()
    }

    pub fn plus_state() -> Self {
        Self::from_pauli_coeffs(1, &[0.5, 0.5, 0.0, 0.0]).unwrap()
    }

    pub fn minus_state() -> Self {
        Self::from_pauli_coeffs(1, &[0.5, -0.5, 0.0, 0.0]).unwrap()
    }

    pub fn maximally_mixed(k: usize) -> Self {
        let mut coeffs = vec![0.0; local_dim(k)];
        coeffs[0] = 1.0 / (1u64 << k) as f64;
        Self::from_pauli_coeffs(k, &coeffs).unwrap()
    }

    /// Hadamard eigenstate, Bloch vector `(1/√2, 0, 1/√2)`.
    pub fn h_state() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2 / 2.0;
        Self::from_pauli_coeffs(1, &[0.5, h, 0.0, h]).unwrap()
    }

    /// `T|+⟩`, Bloch vector `(1/√2, 1/√2, 0)`.
    pub fn t_state() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2 / 2.0;
        Self::from_pauli_coeffs(1, &[0.5, h, h, 0.0]).unwrap()
    }

    /// Library operators by name: the single-qubit states `zero`, `one`,
    /// `plus`, `minus`, `maximally_mixed`, `H_state`, `T_state`, and the
    /// Paulis `I`, `X`, `Y`, `Z`.
    pub fn by_name(name: &str) -> Result<Self> {
        Ok(match name {
            "zero" => Self::zero_state(),
            "one" => Self::one_state(),
            "plus" => Self::plus_state(),
            "minus" => Self::minus_state(),
            "maximally_mixed" => Self::maximally_mixed(1),
            "H_state" => Self::h_state(),
            "T_state" => Self::t_state(),
            "I" => Self::pauli(1, 0),
            "X" => Self::pauli(1, 1),
            "Y" => Self::pauli(1, 2),
            "Z" => Self::pauli(1, 3),
            other => return Err(Error::UnknownName(other.to_string())),
        })
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.k
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn pauli_coeffs(&self) -> PauliCoeffs {
        PauliCoeffs {
            k: self.k,
            coeffs: pauli_coefficients(self.k, &self.matrix),
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Checks unit trace and positive semidefiniteness.
    pub fn validate_state(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > STATE_TRACE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min = self.eigenvalues()[0];
        if min < -STATE_PSD_TOLERANCE {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn is_state(&self) -> bool {
        self.validate_state().is_ok()
    }

    pub fn stabilizer_norm(&self) -> f64 {
        self.pauli_coeffs().stabilizer_norm()
    }

    /// `self ⊗ high`, with `self` on the lower-indexed qubits.
    pub fn tensor(&self, high: &DenseOperator) -> Result<DenseOperator> {
        Self::new(self.k + high.k, tensor_low_high(&self.matrix, &high.matrix))
    }

    pub fn scaled(&self, factor: f64) -> DenseOperator {
        Self {
            k: self.k,
            matrix: &self.matrix * Complex64::new(factor, 0.0),
        }
    }
}

/// Pauli coefficient vector `coeffs[i] = Tr(σ_i A) / 2^k`, so that
/// `A = Σ_i coeffs[i] σ_i` exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliCoeffs {
    pub k: usize,
    pub coeffs: Vec<f64>,
}

impl PauliCoeffs {
    pub fn stabilizer_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    /// `max_σ |Tr(σA)|`.
    pub fn max_pauli_trace(&self) -> f64 {
        let scale = (1u64 << self.k) as f64;
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())) * scale
    }

    pub fn to_dense(&self) -> Result<DenseOperator> {
        DenseOperator::from_pauli_coeffs(self.k, &self.coeffs)
    }
}

/// `𝒟(A) = 2^{-k} Σ_σ |Tr(σA)|`.
pub fn stabilizer_norm(a: &DenseOperator) -> f64 {
    a.stabilizer_norm()
}

/// One tensor factor of a [`FactoredState`].
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub qubits: Vec<usize>,
    pub op: DenseOperator,
}

impl Factor {
    pub fn new(qubits: Vec<usize>, op: DenseOperator) -> Result<Self> {
        if qubits.len() != op.num_qubits() {
            return Err(Error::ShapeMismatch(format!(
                "factor lists {} qubit(s) for a {}-qubit operator",
                qubits.len(),
                op.num_qubits()
            )));
        }
        if qubits.len() > MAX_FACTOR_QUBITS {
            return Err(Error::TooManyQubits {
                k: qubits.len(),
                max: MAX_FACTOR_QUBITS,
            });
        }
        Ok(Self { qubits, op })
    }
}

/// A tensor-product operator `A_1 ⊗ A_2 ⊗ ⋯` whose factors partition the
/// register. Used for input states and observables alike.
#[derive(Clone, Debug, PartialEq)]
pub struct FactoredState {
    n: usize,
    factors: Vec<Factor>,
}

impl FactoredState {
    pub fn new(n: usize, factors: Vec<Factor>) -> Result<Self> {
        let mut covered = vec![false; n];
        for f in &factors {
            check_subset(&f.qubits, n)?;
            for &q in &f.qubits {
                if covered[q] {
                    return Err(Error::DuplicateQubit(q));
                }
                covered[q] = true;
            }
        }
        if let Some(q) = covered.iter().position(|c| !c) {
            return Err(Error::Validation(format!("qubit {q} not covered by any factor")));
        }
        Ok(Self { n, factors })
    }

    /// `op^{⊗n}` for a single-qubit `op`.
    pub fn product(n: usize, op: &DenseOperator) -> Result<Self> {
        let factors = (0..n)
            .map(|q| Factor::new(vec![q], op.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, factors)
    }

    /// The Pauli string as a product of single-qubit factors.
    pub fn from_pauli(p: &PauliString) -> Self {
        let factors = p
            .digits()
            .into_iter()
            .enumerate()
            .map(|(q, d)| Factor {
                qubits: vec![q],
                op: DenseOperator::pauli(1, d as usize),
            })
            .collect();
        Self {
            n: p.num_qubits(),
            factors,
        }
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Checks every factor is a density matrix.
    pub fn validate_state(&self) -> Result<()> {
        for f in &self.factors {
            f.op.validate_state().map_err(|e| {
                Error::InvalidState(format!("factor on qubits {:?}: {e}", f.qubits))
            })?;
        }
        Ok(())
    }

    /// Replaces the factor list while keeping `n`; used by builders.
    pub fn with_factor(mut self, factor: Factor) -> Result<Self> {
        self.factors
            .retain(|f| !f.qubits.iter().any(|q| factor.qubits.contains(q)));
        self.factors.push(factor);
        Self::new(self.n, self.factors)
    }
}

/// `Π_f 𝒟(A_f)`.
pub fn stabilizer_norm_factored(s: &FactoredState) -> f64 {
    s.factors.iter().map(|f| f.op.stabilizer_norm()).product()
}

/// Draws `(σ, c)` with `σ` distributed as `|Tr(σA)| / (2^k 𝒟(A))` and
/// `c = sign(Tr(σA)) 𝒟(A)`.
pub fn sample_pauli<R: Rng + ?Sized>(a: &DenseOperator, rng: &mut R) -> Result<SignedPauli> {
    let dist = SignedDistribution::new(&a.pauli_coeffs().coeffs).ok_or(Error::ZeroOperator)?;
    let (idx, coeff) = dist.sample(rng);
    let mut pauli = PauliString::identity(a.k);
    pauli.set_local_unchecked(&(0..a.k).collect::<Vec<_>>(), idx);
    Ok(SignedPauli { pauli, coeff })
}

/// Samples every factor independently; the global weight is the product.
pub fn sample_pauli_factored<R: Rng + ?Sized>(
    s: &FactoredState,
    rng: &mut R,
) -> Result<SignedPauli> {
    let prepared = PreparedFactored::new(s);
    let mut pauli = PauliString::identity(s.n);
    let coeff = prepared.sample_into(rng, &mut pauli)?;
    Ok(SignedPauli { pauli, coeff })
}

/// `Π_f Tr(σ|_f · A_f)` with unnormalized traces.
pub fn trace_with_factored(p: &PauliString, s: &FactoredState) -> Result<f64> {
    if p.num_qubits() != s.n {
        return Err(Error::QubitCountMismatch {
            left: p.num_qubits(),
            right: s.n,
        });
    }
    Ok(PreparedFactored::new(s).trace(p))
}

/// Per-factor lookup tables, built once per operator and shared read-only
/// across sampling workers.
#[derive(Clone, Debug)]
pub struct PreparedFactored {
    n: usize,
    qubits: Vec<Vec<usize>>,
    /// Unnormalized `Tr(σ_i A_f)` per factor.
    traces: Vec<Vec<f64>>,
    dists: Vec<Option<SignedDistribution>>,
    /// Product of the deterministic factors' weights, applied once.
    fixed_coeff: f64,
    fixed_word: PauliString,
    random: Vec<usize>,
    /// Per-factor slots and offset into `flat_traces`.
    lookup: Vec<(LocalSlots, usize)>,
    flat_traces: Vec<f64>,
}

impl PreparedFactored {
    pub fn new(s: &FactoredState) -> Self {
        let mut qubits = Vec::new();
        let mut traces = Vec::new();
        let mut dists = Vec::new();
        for f in &s.factors {
            let pc = f.op.pauli_coeffs();
            let scale = (1u64 << pc.k) as f64;
            traces.push(pc.coeffs.iter().map(|c| c * scale).collect::<Vec<f64>>());
            dists.push(SignedDistribution::new(&pc.coeffs));
            qubits.push(f.qubits.clone());
        }
        let mut fixed_coeff = 1.0;
        let mut fixed_word = PauliString::identity(s.n);
        let mut random = Vec::new();
        for (i, d) in dists.iter().enumerate() {
            match d.as_ref().map(SignedDistribution::point_mass) {
                Some(Some((idx, m))) => {
                    fixed_coeff *= m;
                    fixed_word.set_local_unchecked(&qubits[i], idx);
                }
                Some(None) => random.push(i),
                None => {}
            }
        }
        let mut lookup = Vec::with_capacity(traces.len());
        let mut flat_traces = Vec::new();
        for (q, t) in qubits.iter().zip(&traces) {
            lookup.push((LocalSlots::new(q), flat_traces.len()));
            flat_traces.extend_from_slice(t);
        }
        Self {
            n: s.n,
            lookup,
            flat_traces,
            qubits,
            traces,
            dists,
            fixed_coeff,
            fixed_word,
            random,
        }
    }

    pub fn can_sample(&self) -> bool {
        self.dists.iter().all(Option::is_some)
    }

    /// `Π_f 𝒟(A_f)`.
    pub fn stabilizer_norm(&self) -> f64 {
        self.dists
            .iter()
            .map(|d| d.as_ref().map_or(0.0, SignedDistribution::norm))
            .product()
    }

    /// `Π_f max_σ |Tr(σ A_f)|`.
    pub fn max_pauli_trace(&self) -> f64 {
        self.traces
            .iter()
            .map(|t| t.iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .product()
    }

    /// Overwrites `out` with a sampled string and returns its weight.
    #[inline]
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut PauliString) -> Result<f64> {
        if !self.can_sample() {
            return Err(Error::ZeroOperator);
        }
        Ok(self.sample_into_unchecked(rng, out))
    }

    #[inline]
    pub(crate) fn sample_into_unchecked<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        out: &mut PauliString,
    ) -> f64 {
        out.clone_from(&self.fixed_word);
        let mut coeff = self.fixed_coeff;
        for &i in &self.random {
            let d = self.dists[i].as_ref().unwrap();
            let (idx, m) = d.sample(rng);
            out.set_local_unchecked(&self.qubits[i], idx);
            coeff *= m;
        }
        coeff
    }

    /// `Tr(p · A)` as a product of per-factor table lookups.
    #[inline]
    pub fn trace(&self, p: &PauliString) -> f64 {
        debug_assert_eq!(p.num_qubits(), self.n);
        let mut acc = 1.0;
        if self.n <= 64 {
            let (x, z) = p.low_words();
            for (slots, offset) in &self.lookup {
                acc *= self.flat_traces[offset + slots.word_index(x, z)];
            }
        } else {
            for (slots, offset) in &self.lookup {
                acc *= self.flat_traces[offset + slots.index(p)];
            }
        }
        acc
    }
}
