// SPDX-License-Identifier: Apache-2.0

//! JSON circuit files.
//!
//! ```json
//! {
//!   "n": 2,
//!   "input": "zero",
//!   "channels": [
//!     {"type": "gate", "name": "h", "qubits": [0]},
//!     {"type": "gate", "name": "cnot", "qubits": [0, 1]},
//!     {"type": "depolarized_rotation", "f": 0.9, "theta": 0.785, "qubits": [1]}
//!   ],
//!   "observable": "ZZ"
//! }
//! ```
//!
//! `input` is a state name applied to every qubit or a list of factor
//! specs covering the register. `observable` is a Pauli string or a list of
//! factor specs; qubits no factor lists get the identity. A factor spec is
//! `{"qubits": [...]}` plus exactly one of `state` (library name),
//! `pauli` (string), `coeffs` (Pauli coefficients `A = Σ c_i σ_i`) or
//! `bloch` (`[x, y, z]`, single qubit).
//!
//! Channel types: `gate` (`name`), `rotation` (`theta`), `depolarizing`
//! (`f`), `depolarized_rotation` (`f`, `theta`), `measure_z`, `reset`
//! (`state`: a factor spec without `qubits`), `pauli_rotation` (`pauli`,
//! `angle`), `adaptive` (`inner`: a channel spec without `qubits`; the
//! control is the first listed qubit), `ptm` (`rows`).

use serde::{Deserialize, Serialize};

use crate::channel::{
    make_adaptive, make_depolarized_rotation, make_depolarizing, make_gate, make_measure_z,
    make_pauli_rotation, make_reset, make_rotation, ChannelApplication, Ptm,
};
use crate::error::{Error, Result};
use crate::operator::{DenseOperator, Factor, FactoredState};
use crate::pauli::PauliString;
use crate::propagation::Circuit;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSpec {
    pub n: usize,
    pub input: StateSpec,
    #[serde(default)]
    pub channels: Vec<ChannelSpec>,
    pub observable: ObservableSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Named(String),
    Factors(Vec<FactorSpec>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObservableSpec {
    Pauli(String),
    Factors(Vec<FactorSpec>),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pauli: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bloch: Option<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    Gate {
        name: String,
        #[serde(default)]
        qubits: Vec<usize>,
    },
    Rotation {
        theta: f64,
        #[serde(default)]
        qubits: Vec<usize>,
    },
    Depolarizing {
        f: f64,
        #[serde(default)]
        qubits: Vec<usize>,
    },
    DepolarizedRotation {
        f: f64,
        theta: f64,
        #[serde(default)]
        qubits: Vec<usize>,
    },
    MeasureZ {
        #[serde(default)]
        qubits: Vec<usize>,
    },
    Reset {
        state: FactorSpec,
        #[serde(default)]
        qubits: Vec<usize>,
    },
    PauliRotation {
        pauli: String,
        angle: f64,
        #[serde(default)]
        qubits: Vec<usize>,
    },
    Adaptive {
        inner: Box<ChannelSpec>,
        #[serde(default)]
        qubits: Vec<usize>,
    },
    Ptm {
        rows: Vec<Vec<f64>>,
        #[serde(default)]
        qubits: Vec<usize>,
    },
}

impl ChannelSpec {
    pub fn qubits(&self) -> &[usize] {
        match self {
            Self::Gate { qubits, .. }
            | Self::Rotation { qubits, .. }
            | Self::Depolarizing { qubits, .. }
            | Self::DepolarizedRotation { qubits, .. }
            | Self::MeasureZ { qubits }
            | Self::Reset { qubits, .. }
            | Self::PauliRotation { qubits, .. }
            | Self::Adaptive { qubits, .. }
            | Self::Ptm { qubits, .. } => qubits,
        }
    }

    /// The channel's PTM, independent of placement.
    pub fn to_ptm(&self) -> Result<Ptm> {
        match self {
            Self::Gate { name, .. } => make_gate(name),
            Self::Rotation { theta, .. } => Ok(make_rotation(*theta)),
            Self::Depolarizing { f, .. } => make_depolarizing(*f),
            Self::DepolarizedRotation { f, theta, .. } => make_depolarized_rotation(*f, *theta),
            Self::MeasureZ { .. } => Ok(make_measure_z()),
            Self::Reset { state, .. } => {
                let rho = state.operator(None)?;
                rho.validate_state()?;
                make_reset(&rho)
            }
            Self::PauliRotation { pauli, angle, .. } => make_pauli_rotation(&pauli.parse()?, *angle),
            Self::Adaptive { inner, .. } => make_adaptive(&inner.to_ptm()?),
            Self::Ptm { rows, .. } => Ptm::from_rows(rows),
        }
    }
}

impl FactorSpec {
    /// The operator, checking its size against `k` when given.
    pub fn operator(&self, k: Option<usize>) -> Result<DenseOperator> {
        let given = [
            self.state.is_some(),
            self.pauli.is_some(),
            self.coeffs.is_some(),
            self.bloch.is_some(),
        ]
        .iter()
        .filter(|b| **b)
        .count();
        if given != 1 {
            return Err(Error::Validation(
                "exactly one of state, pauli, coeffs, bloch is required".into(),
            ));
        }
        let op = if let Some(name) = &self.state {
            DenseOperator::by_name(name)?
        } else if let Some(p) = &self.pauli {
            let p: PauliString = p.parse()?;
            DenseOperator::pauli(p.num_qubits(), p.local_index_unchecked(&(0..p.num_qubits()).collect::<Vec<_>>()))
        } else if let Some(c) = &self.coeffs {
            let k = (c.len().trailing_zeros() / 2) as usize;
            if 1usize << (2 * k) != c.len() {
                return Err(Error::ShapeMismatch(format!(
                    "{} coefficients is not a power of 4",
                    c.len()
                )));
            }
            DenseOperator::from_pauli_coeffs(k, c)?
        } else {
            let [x, y, z] = self.bloch.unwrap();
            DenseOperator::from_bloch(x, y, z)?
        };
        if let Some(k) = k {
            if op.num_qubits() != k {
                return Err(Error::ShapeMismatch(format!(
                    "{}-qubit operator for {k} listed qubit(s)",
                    op.num_qubits()
                )));
            }
        }
        Ok(op)
    }
}

fn at(path: String) -> impl FnOnce(Error) -> Error {
    move |e| match e {
        Error::Parse(m) => Error::Parse(format!("{path}: {m}")),
        other => Error::Validation(format!("{path}: {other}")),
    }
}

fn factors(n: usize, specs: &[FactorSpec], what: &str, fill_identity: bool) -> Result<FactoredState> {
    let mut list = Vec::with_capacity(specs.len());
    let mut covered = vec![false; n];
    for (i, f) in specs.iter().enumerate() {
        let path = format!("{what}[{i}]");
        if f.qubits.is_empty() {
            return Err(Error::Validation(format!("{path}.qubits: missing or empty")));
        }
        if let Some(&q) = f.qubits.iter().find(|&&q| q >= n) {
            return Err(Error::Validation(format!(
                "{path}.qubits: qubit {q} out of range for {n} qubits"
            )));
        }
        let op = f.operator(Some(f.qubits.len())).map_err(at(path.clone()))?;
        for &q in &f.qubits {
            if std::mem::replace(&mut covered[q], true) {
                return Err(Error::Validation(format!("{path}.qubits: qubit {q} already covered")));
            }
        }
        list.push(Factor::new(f.qubits.clone(), op).map_err(at(path))?);
    }
    if fill_identity {
        for q in (0..n).filter(|&q| !covered[q]) {
            list.push(Factor::new(vec![q], DenseOperator::pauli(1, 0))?);
        }
    }
    FactoredState::new(n, list).map_err(at(what.to_string()))
}

impl CircuitSpec {
    pub fn build(&self) -> Result<Circuit> {
        let n = self.n;
        if n == 0 {
            return Err(Error::Validation("n: must be at least 1".into()));
        }
        let input = match &self.input {
            StateSpec::Named(name) => {
                let op = DenseOperator::by_name(name).map_err(at("input".into()))?;
                if op.num_qubits() != 1 {
                    return Err(Error::Validation(format!("input: {name} is not single-qubit")));
                }
                FactoredState::product(n, &op)?
            }
            StateSpec::Factors(specs) => factors(n, specs, "input", false)?,
        };
        input.validate_state().map_err(at("input".into()))?;
        let observable = match &self.observable {
            ObservableSpec::Pauli(s) => {
                let p: PauliString = s.parse().map_err(at("observable".into()))?;
                if p.num_qubits() != n {
                    return Err(Error::Validation(format!(
                        "observable: {} letters for {n} qubits",
                        p.num_qubits()
                    )));
                }
                FactoredState::from_pauli(&p)
            }
            ObservableSpec::Factors(specs) => factors(n, specs, "observable", true)?,
        };
        let channels = self
            .channels
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let path = format!("channels[{i}]");
                if c.qubits().is_empty() {
                    return Err(Error::Validation(format!("{path}.qubits: missing or empty")));
                }
                let ptm = c.to_ptm().map_err(at(path.clone()))?;
                ChannelApplication::new(ptm, c.qubits().to_vec(), n).map_err(at(path))
            })
            .collect::<Result<Vec<_>>>()?;
        Circuit::new(n, input, channels, observable)
    }
}

/// Parses a circuit file's text. Syntax and type errors carry the JSON
/// path plus line and column; semantic errors carry the field path.
pub fn parse_spec(text: &str) -> Result<CircuitSpec> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse(format!("{path}: {inner}"))
    })
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    parse_spec(text)?.build()
}

pub fn load_circuit(path: &std::path::Path) -> Result<Circuit> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_circuit(&text)
}
