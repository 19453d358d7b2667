// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {qubit} out of range for a {n}-qubit register")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("qubit {0} listed more than once")]
    DuplicateQubit(usize),

    #[error("local Pauli index {index} out of range for {k} qubit(s)")]
    LocalIndexOutOfRange { index: usize, k: usize },

    #[error("qubit count mismatch: {left} vs {right}")]
    QubitCountMismatch { left: usize, right: usize },

    #[error("invalid Pauli string: {0}")]
    InvalidPauli(String),

    #[error("operator is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("zero operator cannot be sampled")]
    ZeroOperator,

    #[error("operator on {k} qubits exceeds the supported maximum of {max}")]
    TooManyQubits { k: usize, max: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("fidelity {0} outside [0, 1]")]
    FidelityOutOfRange(f64),

    #[error("not completely positive (smallest Choi eigenvalue {0:e})")]
    NotCompletelyPositive(f64),

    #[error("Kraus operators violate sum K^dag K <= I (largest eigenvalue {0})")]
    KrausCompleteness(f64),

    #[error("unknown channel or operator name: {0}")]
    UnknownName(String),

    #[error("cost bound overflow ({0:e} exceeds 1e300)")]
    BoundOverflow(f64),

    #[error("oracle too large: {n} qubits (maximum {max})")]
    OracleTooLarge { n: usize, max: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("instance generation failed: {0}")]
    InstanceGeneration(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
