// SPDX-License-Identifier: Apache-2.0

//! Workload builders shared by the benchmarks.

use pauliprop::channel::{make_clifford, make_depolarized_rotation};
use pauliprop::{ChannelApplication, Circuit, DenseOperator, FactoredState, PauliString};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `gates` random H/S/CNOT gates on `n` qubits from `|0…0⟩`, measuring a
/// weight-two Z string.
pub fn random_clifford_circuit(n: usize, gates: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
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
    let mut obs = PauliString::identity(n);
    obs.set(0, pauliprop::pauli::Z).unwrap();
    obs.set(n - 1, pauliprop::pauli::Z).unwrap();
    Circuit::new(
        n,
        FactoredState::product(n, &DenseOperator::zero_state()).unwrap(),
        channels,
        FactoredState::from_pauli(&obs),
    )
    .unwrap()
}

/// Alternating depolarized T and Hadamard on one qubit.
pub fn depolarized_t_chain(depth: usize, f: f64) -> Circuit {
    let t = make_depolarized_rotation(f, std::f64::consts::FRAC_PI_4).unwrap();
    let h = make_clifford("h").unwrap();
    let channels = (0..depth)
        .flat_map(|_| {
            [
                ChannelApplication::new(t.clone(), vec![0], 1).unwrap(),
                ChannelApplication::new(h.clone(), vec![0], 1).unwrap(),
            ]
        })
        .collect();
    Circuit::new(
        1,
        FactoredState::product(1, &DenseOperator::plus_state()).unwrap(),
        channels,
        FactoredState::from_pauli(&"X".parse().unwrap()),
    )
    .unwrap()
}
