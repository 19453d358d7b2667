// SPDX-License-Identifier: Apache-2.0

//! Random workloads shared by the integration suites.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use pauliprop::channel::{
    make_adaptive, make_clifford, make_depolarized_rotation, make_depolarizing, make_gate,
    make_measure_z, make_pauli_rotation, make_reset, ptm_from_choi,
};
use pauliprop::magic::sample_hilbert_schmidt;
use pauliprop::{
    ChannelApplication, Circuit, DenseOperator, Factor, FactoredState, PauliString, Ptm,
};
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMatrix = DMatrix<Complex64>;

/// Random H/S/CNOT circuit on `n` qubits from `|0…0⟩` with a random
/// non-identity Pauli observable.
pub fn random_clifford_circuit<R: Rng>(n: usize, gates: usize, rng: &mut R) -> Circuit {
    let h = make_clifford("h").unwrap();
    let s = make_clifford("s").unwrap();
    let cx = make_clifford("cnot").unwrap();
    let channels = (0..gates)
        .map(|_| {
            let a = rng.random_range(0..n);
            match rng.random_range(0..3) {
                0 => ChannelApplication::new(h.clone(), vec![a], n).unwrap(),
                1 => ChannelApplication::new(s.clone(), vec![a], n).unwrap(),
                _ => {
                    let b = (a + rng.random_range(1..n)) % n;
                    ChannelApplication::new(cx.clone(), vec![a, b], n).unwrap()
                }
            }
        })
        .collect();
    Circuit::new(
        n,
        FactoredState::product(n, &DenseOperator::zero_state()).unwrap(),
        channels,
        FactoredState::from_pauli(&random_pauli(n, rng)),
    )
    .unwrap()
}

pub fn random_pauli<R: Rng>(n: usize, rng: &mut R) -> PauliString {
    loop {
        let digits: Vec<u8> = (0..n).map(|_| rng.random_range(0..4u8)).collect();
        let p = PauliString::from_digits(&digits);
        if !p.is_identity() {
            return p;
        }
    }
}

const STATES: [&str; 6] = ["zero", "one", "plus", "minus", "H_state", "T_state"];

fn random_single_state<R: Rng>(rng: &mut R) -> DenseOperator {
    if rng.random_bool(0.25) {
        sample_hilbert_schmidt(1, rng)
    } else {
        DenseOperator::by_name(STATES.choose(rng).unwrap()).unwrap()
    }
}

/// Product input with an occasional Hilbert–Schmidt two-qubit factor.
pub fn random_input<R: Rng>(n: usize, rng: &mut R) -> FactoredState {
    let mut factors = Vec::new();
    let mut q = 0;
    while q < n {
        if q + 1 < n && rng.random_bool(0.2) {
            factors.push(Factor::new(vec![q, q + 1], sample_hilbert_schmidt(2, rng)).unwrap());
            q += 2;
        } else {
            factors.push(Factor::new(vec![q], random_single_state(rng)).unwrap());
            q += 1;
        }
    }
    FactoredState::new(n, factors).unwrap()
}

fn two_distinct<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let a = rng.random_range(0..n);
    let b = (a + rng.random_range(1..n)) % n;
    vec![a, b]
}

/// One random library channel placed on random qubits.
pub fn random_channel<R: Rng>(n: usize, rng: &mut R) -> ChannelApplication {
    let one = |rng: &mut R| vec![rng.random_range(0..n)];
    let kinds = if n >= 2 { 10 } else { 7 };
    let (ptm, qubits): (Ptm, Vec<usize>) = match rng.random_range(0..kinds) {
        0 => (make_gate(["h", "s", "x", "y", "z"].choose(rng).unwrap()).unwrap(), one(rng)),
        1 => (make_gate("t").unwrap(), one(rng)),
        2 => (make_depolarizing(rng.random_range(0.5..1.0)).unwrap(), one(rng)),
        3 => (
            make_depolarized_rotation(rng.random_range(0.5..1.0), rng.random_range(0.0..std::f64::consts::TAU))
                .unwrap(),
            one(rng),
        ),
        4 => (make_measure_z(), one(rng)),
        5 => (make_reset(&random_single_state(rng)).unwrap(), one(rng)),
        6 => (make_gate("h").unwrap(), one(rng)),
        7 => (make_gate(["cnot", "cz"].choose(rng).unwrap()).unwrap(), two_distinct(n, rng)),
        8 => (
            make_adaptive(&make_gate(["h", "x", "s"].choose(rng).unwrap()).unwrap()).unwrap(),
            two_distinct(n, rng),
        ),
        _ => (
            make_pauli_rotation(&random_pauli(2, rng), rng.random_range(0.0..std::f64::consts::PI)).unwrap(),
            two_distinct(n, rng),
        ),
    };
    ChannelApplication::new(ptm, qubits, n).unwrap()
}

/// `n ≤ 5` qubits, `≤ 12` mixed channels, Pauli or product-projector
/// observable.
pub fn random_mixed_circuit<R: Rng>(rng: &mut R) -> Circuit {
    let n = rng.random_range(1..=5);
    let k = rng.random_range(1..=12);
    let channels = (0..k).map(|_| random_channel(n, rng)).collect();
    let observable = if rng.random_bool(0.75) {
        FactoredState::from_pauli(&random_pauli(n, rng))
    } else {
        let factors = (0..n)
            .map(|q| {
                let name = ["zero", "plus", "Z", "I", "X"].choose(rng).unwrap();
                Factor::new(vec![q], DenseOperator::by_name(name).unwrap()).unwrap()
            })
            .collect();
        FactoredState::new(n, factors).unwrap()
    };
    Circuit::new(n, random_input(n, rng), channels, observable).unwrap()
}

pub fn gaussian_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Kraus operators of a random trace-preserving channel on `k` qubits:
/// the blocks of a random isometry `C^d → C^{rank·d}`.
pub fn random_tp_kraus<R: Rng>(k: usize, rank: usize, rng: &mut R) -> Vec<CMatrix> {
    let d = 1usize << k;
    let g = gaussian_matrix(rank * d, d, rng);
    let svd = g.svd(true, true);
    let v = svd.u.unwrap() * svd.v_t.unwrap();
    (0..rank).map(|r| v.rows(r * d, d).into_owned()).collect()
}

/// Random Hermitian operator with i.i.d. Gaussian Pauli coefficients.
pub fn random_hermitian<R: Rng>(k: usize, rng: &mut R) -> DenseOperator {
    let coeffs: Vec<f64> = (0..1usize << (2 * k)).map(|_| rng.sample(StandardNormal)).collect();
    DenseOperator::from_pauli_coeffs(k, &coeffs).unwrap()
}

/// PTM of the postselective channel of a Hilbert–Schmidt random Choi state.
pub fn random_qubit_ptm<R: Rng>(rng: &mut R) -> Ptm {
    ptm_from_choi(&sample_hilbert_schmidt(2, rng)).unwrap()
}
