// SPDX-License-Identifier: Apache-2.0

//! Property tests for the invariants of the core modules.

mod common;

use nalgebra::DMatrix;
use num_complex::Complex64;
use pauliprop::channel::{
    choi_from_ptm, make_depolarized_rotation, make_pauli_rotation, make_reset,
};
use pauliprop::linalg::{pauli_matrix, trace_product};
use pauliprop::magic::sample_hilbert_schmidt;
use pauliprop::operator::sample_pauli;
use pauliprop::oracle::{ptm_from_kraus, run_exact};
use pauliprop::pauli::{
    decode_local, encode_local, pauli_index_on_subset, replace_on_subset,
    trace_inner_product_paulis,
};
use pauliprop::propagation::{cost_report, estimate, Propagator};
use pauliprop::qaoa::{build_circuit, generate_instance_with_max_degree, QaoaParams};
use pauliprop::{Circuit, DenseOperator, Direction, PauliString};
use proptest::prelude::*;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Choi state on `H^B ⊗ H^A` (output low) built directly from Kraus
/// operators: `(1/d) Σ_K K_{ba} conj(K_{b'a'})`.
fn dense_choi(ops: &[CMatrix]) -> CMatrix {
    let d = ops[0].nrows();
    DMatrix::from_fn(d * d, d * d, |r, c| {
        let (b, a, b2, a2) = (r % d, r / d, c % d, c / d);
        ops.iter().map(|k| k[(b, a)] * k[(b2, a2)].conj()).sum::<Complex64>() / d as f64
    })
}

fn with_input(c: &Circuit, input: pauliprop::FactoredState) -> Circuit {
    Circuit::new(c.n, input, c.channels.clone(), c.observable.clone()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn local_encoding_is_a_bijection(k in 1usize..=5, raw in any::<usize>()) {
        let index = raw % (1 << (2 * k));
        let digits = decode_local(index, k);
        prop_assert_eq!(digits.len(), k);
        prop_assert!(digits.iter().all(|&d| d < 4));
        prop_assert_eq!(encode_local(&digits), index);
    }

    #[test]
    fn subset_replace_round_trips(n in 1usize..=140, seed in any::<u64>()) {
        let mut g = rng(seed);
        let p = PauliString::from_digits(&(0..n).map(|_| g.random_range(0..4u8)).collect::<Vec<_>>());
        let k = g.random_range(1..=n.min(3));
        let qubits = sample(&mut g, n, k).into_vec();
        let local = g.random_range(0..1usize << (2 * k));
        let q = replace_on_subset(&p, &qubits, local).unwrap();
        prop_assert_eq!(pauli_index_on_subset(&q, &qubits).unwrap(), local);
        for i in (0..n).filter(|i| !qubits.contains(i)) {
            prop_assert_eq!(q.get(i).unwrap(), p.get(i).unwrap());
        }
        let back = replace_on_subset(&q, &qubits, pauli_index_on_subset(&p, &qubits).unwrap()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn pauli_inner_product_matches_dense(n in 1usize..=3, a in any::<usize>(), b in any::<usize>()) {
        let dim = 1 << (2 * n);
        let (a, b) = (a % dim, b % dim);
        let all: Vec<usize> = (0..n).collect();
        let pa = replace_on_subset(&PauliString::identity(n), &all, a).unwrap();
        let pb = replace_on_subset(&PauliString::identity(n), &all, b).unwrap();
        let dense = trace_product(&pauli_matrix(n, a), &pauli_matrix(n, b)) / (1 << n) as f64;
        prop_assert!(dense.im.abs() < 1e-12);
        prop_assert_eq!(trace_inner_product_paulis(&pa, &pb).unwrap(), dense.re);
    }

    #[test]
    fn sampled_weight_is_the_stabilizer_norm(k in 1usize..=3, seed in any::<u64>()) {
        let mut g = rng(seed);
        let a = if seed % 2 == 0 { sample_hilbert_schmidt(k, &mut g) } else { random_hermitian(k, &mut g) };
        let norm = a.stabilizer_norm();
        for _ in 0..50 {
            let s = sample_pauli(&a, &mut g).unwrap();
            prop_assert!((s.coeff.abs() - norm).abs() <= 1e-15 * norm);
        }
    }

    #[test]
    fn stabilizer_norm_lower_bound(k in 1usize..=3, seed in any::<u64>()) {
        let rho = sample_hilbert_schmidt(k, &mut rng(seed));
        prop_assert!(rho.stabilizer_norm() >= 1.0 / (1 << k) as f64 - 1e-15);
    }

    #[test]
    fn depolarized_rotation_norms_agree(f in 0.0f64..=1.0, theta in 0.0f64..std::f64::consts::TAU) {
        let p = make_depolarized_rotation(f, theta).unwrap();
        prop_assert!((p.channel_norm() - p.adjoint_norm()).abs() <= 1e-12);
    }

    #[test]
    fn depolarizing_noise_is_monotone(f1 in 0.0f64..=1.0, f2 in 0.0f64..=1.0, theta in 0.0f64..std::f64::consts::TAU) {
        let (lo, hi) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
        let a = make_depolarized_rotation(lo, theta).unwrap();
        let b = make_depolarized_rotation(hi, theta).unwrap();
        prop_assert!(a.channel_norm() <= b.channel_norm() + 1e-15);
        prop_assert!(a.adjoint_norm() <= b.adjoint_norm() + 1e-15);
    }

    #[test]
    fn reset_choi_is_product(k in 1usize..=2, seed in any::<u64>()) {
        let rho = sample_hilbert_schmidt(k, &mut rng(seed));
        let choi = choi_from_ptm(&make_reset(&rho).unwrap()).unwrap();
        let expect = rho.tensor(&DenseOperator::maximally_mixed(k)).unwrap();
        prop_assert!(max_abs(&(choi.normalized.matrix() - expect.matrix())) <= 1e-12);
        prop_assert!((choi.p_lambda - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn trace_preservation_and_unitality_from_kraus(k in 1usize..=2, rank in 1usize..=4, seed in any::<u64>()) {
        let mut g = rng(seed);
        let d = 1 << k;
        let ops = random_tp_kraus(k, rank, &mut g);
        let r = ptm_from_kraus(&ops).unwrap();
        prop_assert!(r.is_trace_preserving(1e-10));
        prop_assert!((r.get(0, 0) - 1.0).abs() <= 1e-10);
        prop_assert!((1..r.ncols()).all(|j| r.get(0, j).abs() <= 1e-10));
        let unital_defect = max_abs(&(ops.iter().map(|m| m * m.adjoint()).sum::<CMatrix>() - identity(d)));
        prop_assert_eq!(r.is_unital(1e-9), unital_defect <= 1e-9);

        // a mixture of unitaries is unital
        let unitaries: Vec<CMatrix> = (0..rank)
            .map(|_| {
                let q = gaussian_matrix(d, d, &mut g).qr().q();
                q * Complex64::from((1.0 / rank as f64).sqrt())
            })
            .collect();
        let u = ptm_from_kraus(&unitaries).unwrap();
        prop_assert!(u.is_unital(1e-10) && u.is_trace_preserving(1e-10));
        prop_assert!((1..u.nrows()).all(|i| u.get(i, 0).abs() <= 1e-10));
    }

    #[test]
    fn ptm_kraus_choi_triangle(k in 1usize..=2, rank in 1usize..=4, seed in any::<u64>()) {
        let ops = random_tp_kraus(k, rank, &mut rng(seed));
        let choi = choi_from_ptm(&ptm_from_kraus(&ops).unwrap()).unwrap();
        prop_assert!(max_abs(&(choi.normalized.matrix() - dense_choi(&ops))) <= 1e-12);
    }

    #[test]
    fn pauli_rotations_are_trace_preserving_and_unital(seed in any::<u64>(), angle in 0.0f64..6.3) {
        let mut g = rng(seed);
        let p = random_pauli(g.random_range(1..=3), &mut g);
        let r = make_pauli_rotation(&p, angle).unwrap();
        prop_assert!(r.is_trace_preserving(1e-12) && r.is_unital(1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn heisenberg_bound_ignores_the_input(seed in any::<u64>()) {
        let mut g = rng(seed);
        let c = random_mixed_circuit(&mut g);
        let other = with_input(&c, random_input(c.n, &mut g));
        let a = cost_report(&c, Direction::Heisenberg).unwrap().total_bound;
        let b = cost_report(&other, Direction::Heisenberg).unwrap().total_bound;
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn trajectories_respect_the_bound(seed in any::<u64>()) {
        let mut g = rng(seed);
        let c = random_mixed_circuit(&mut g);
        for d in [Direction::Schrodinger, Direction::Heisenberg] {
            let p = Propagator::new(&c, d).unwrap();
            let bound = p.cost().total_bound;
            for _ in 0..200 {
                let t = p.trace_trajectory(&mut g);
                prop_assert!(t.value.abs() <= bound * (1.0 + 1e-9), "{} > {}", t.value, bound);
            }
        }
    }

    #[test]
    fn clifford_multipliers_are_signs(seed in any::<u64>(), n in 2usize..=8) {
        let mut g = rng(seed);
        let c = random_clifford_circuit(n, 40, &mut g);
        let p = Propagator::new(&c, Direction::Heisenberg).unwrap();
        for _ in 0..20 {
            let t = p.trace_trajectory(&mut g);
            prop_assert!(t.multipliers.iter().all(|m| m.abs() == 1.0));
        }
    }

    #[test]
    fn estimates_are_reproducible(seed in any::<u64>(), workers in 1usize..=3) {
        let c = random_mixed_circuit(&mut rng(seed));
        for d in [Direction::Schrodinger, Direction::Heisenberg] {
            let a = estimate(&c, d, 3001, 0.05, seed, workers).unwrap();
            let b = estimate(&c, d, 3001, 0.05, seed, workers).unwrap();
            prop_assert_eq!(a.mean.to_bits(), b.mean.to_bits());
            prop_assert_eq!(a.sample_std.to_bits(), b.sample_std.to_bits());
        }
    }

    #[test]
    fn sampling_reconstructs_the_operator(k in 1usize..=2, seed in any::<u64>()) {
        let mut g = rng(seed);
        let a = sample_hilbert_schmidt(k, &mut g);
        let coeffs = a.pauli_coeffs().coeffs;
        let norm = a.stabilizer_norm();
        let n = 40_000;
        let all: Vec<usize> = (0..k).collect();
        let mut acc = vec![0.0; coeffs.len()];
        for _ in 0..n {
            let s = sample_pauli(&a, &mut g).unwrap();
            acc[pauli_index_on_subset(&s.pauli, &all).unwrap()] += s.coeff;
        }
        // each estimate is a mean of values in [-D, D]; 6 sigma of a worst-case spread
        let tol = 6.0 * norm / (n as f64).sqrt();
        for (i, c) in coeffs.iter().enumerate() {
            prop_assert!((acc[i] / n as f64 - c).abs() <= tol, "coefficient {}", i);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn lightcone_does_not_change_term_values(seed in any::<u64>(), gamma in -1.0f64..1.0) {
        let mut g = rng(seed);
        let n = g.random_range(6..=8);
        let inst = generate_instance_with_max_degree(n, 4, 3, &mut g).unwrap();
        let circ = build_circuit(&inst, &QaoaParams::new(gamma)).unwrap();
        for j in 0..circ.terms.len() {
            let cone = run_exact(&circ.term_circuit(j, true).unwrap()).unwrap();
            let full = run_exact(&circ.term_circuit(j, false).unwrap()).unwrap();
            prop_assert!((cone - full).abs() <= 1e-10, "term {}: {} vs {}", j, cone, full);
        }
    }
}
