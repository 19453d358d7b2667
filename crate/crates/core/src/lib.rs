// SPDX-License-Identifier: Apache-2.0

//! Monte Carlo Pauli propagation of quantum circuits.

// `!(x <= y)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod circuit_file;
pub mod error;
pub mod linalg;
pub mod magic;
pub mod operator;
pub mod oracle;
pub mod pauli;
pub mod propagation;
pub mod qaoa;
pub mod stats;
pub mod table;

pub use channel::{ChannelApplication, ChoiState, Ptm};
pub use error::{Error, Result};
pub use operator::{DenseOperator, Factor, FactoredState, PauliCoeffs};
pub use pauli::{PauliString, SignedPauli};
pub use propagation::{Circuit, CostReport, Direction, EstimateReport};
pub use qaoa::{E3Lin2Instance, QaoaParams};
