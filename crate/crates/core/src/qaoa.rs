// SPDX-License-Identifier: Apache-2.0

//! Depth-one QAOA on random E3LIN2 instances: the Heisenberg-propagation
//! estimate of `⟨C⟩`, its Hoeffding bound, and an independent
//! computational-basis Monte Carlo estimator used as a cross-check.
//!
//! `C = ½ Σ_j (−1)^{d_j} Z_a Z_b Z_c` and the state is
//! `e^{−iβB} e^{−iγC} |+⟩^{⊗n}` with `B = Σ_q X_q`.

use std::collections::HashSet;
use std::time::Instant;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{make_pauli_rotation, ChannelApplication, Ptm};
use crate::error::{Error, Result};
use crate::operator::{DenseOperator, FactoredState};
use crate::pauli::PauliString;
use crate::propagation::{hoeffding_epsilon, Circuit, Direction, Propagator};
use crate::stats::SampleStats;
use crate::table::ZERO_TOLERANCE;

/// Register cap of the bitmask estimator.
pub const MAX_VDN_QUBITS: usize = 64;

const ATTEMPTS_PER_EQUATION: usize = 100_000;
const RESTARTS: usize = 200;

/// One equation `x_a ⊕ x_b ⊕ x_c = d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Equation {
    pub qubits: [usize; 3],
    pub d: u8,
}

/// An E3LIN2 instance. Serializes as `{n, m, equations: [[a, b, c, d], …]}`
/// plus an optional `max_degree` when generated under a relaxed cap.
#[derive(Clone, Debug, PartialEq)]
pub struct E3Lin2Instance {
    pub n: usize,
    pub equations: Vec<Equation>,
    /// Degree cap the instance was generated under; `None` means `⌊m/10⌋`.
    pub max_degree: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    m: usize,
    equations: Vec<[usize; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_degree: Option<usize>,
}

impl Serialize for E3Lin2Instance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        InstanceFile {
            n: self.n,
            m: self.m(),
            equations: self
                .equations
                .iter()
                .map(|e| [e.qubits[0], e.qubits[1], e.qubits[2], e.d as usize])
                .collect(),
            max_degree: self.max_degree,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for E3Lin2Instance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Self::from_file(InstanceFile::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl E3Lin2Instance {
    fn from_file(f: InstanceFile) -> Result<Self> {
        if f.m != f.equations.len() {
            return Err(Error::Validation(format!(
                "m = {} but {} equations listed",
                f.m,
                f.equations.len()
            )));
        }
        let equations = f
            .equations
            .iter()
            .enumerate()
            .map(|(j, e)| {
                if e[3] > 1 {
                    Err(Error::Validation(format!("equation {j}: parity bit {} is not 0 or 1", e[3])))
                } else {
                    Ok(Equation {
                        qubits: [e[0], e[1], e[2]],
                        d: e[3] as u8,
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let inst = E3Lin2Instance {
            n: f.n,
            equations,
            max_degree: f.max_degree,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Parses instance JSON, separating syntax errors from invalid
    /// instances.
    pub fn from_json(text: &str) -> Result<Self> {
        let f: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(f)
    }

    pub fn m(&self) -> usize {
        self.equations.len()
    }

    /// The degree cap in force: the recorded one, else `⌊m/10⌋`.
    pub fn degree_cap(&self) -> usize {
        self.max_degree.unwrap_or(self.m() / 10)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.equations {
            for &q in &e.qubits {
                deg[q] += 1;
            }
        }
        deg
    }

    pub fn validate(&self) -> Result<()> {
        if self.equations.is_empty() {
            return Err(Error::Validation("instance has no equations".into()));
        }
        let mut seen = HashSet::new();
        for (j, e) in self.equations.iter().enumerate() {
            let [a, b, c] = e.qubits;
            if a == b || b == c || a == c {
                return Err(Error::Validation(format!("equation {j}: repeated qubit")));
            }
            if let Some(&q) = e.qubits.iter().find(|&&q| q >= self.n) {
                return Err(Error::Validation(format!(
                    "equation {j}: qubit {q} out of range for {} qubits",
                    self.n
                )));
            }
            if e.d > 1 {
                return Err(Error::Validation(format!("equation {j}: parity bit {}", e.d)));
            }
            let mut key = e.qubits;
            key.sort_unstable();
            if !seen.insert(key) {
                return Err(Error::Validation(format!("equation {j}: duplicate triple {key:?}")));
            }
        }
        let cap = self.degree_cap();
        if let Some((q, d)) = self.degrees().into_iter().enumerate().find(|(_, d)| *d > cap) {
            return Err(Error::Validation(format!(
                "qubit {q} appears in {d} equations, cap is {cap}"
            )));
        }
        Ok(())
    }

    /// `C(x) = ½ Σ_j (−1)^{d_j ⊕ x_a ⊕ x_b ⊕ x_c}` for a bitstring `x`.
    pub fn cost(&self, x: u64) -> f64 {
        self.equations
            .iter()
            .map(|e| {
                let parity = e.qubits.iter().fold(e.d as u64, |p, &q| p ^ (x >> q));
                if parity & 1 == 0 {
                    0.5
                } else {
                    -0.5
                }
            })
            .sum()
    }
}

/// Random instance with each qubit in at most `⌊m/10⌋` equations.
pub fn generate_instance<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<E3Lin2Instance> {
    let mut inst = generate_instance_with_max_degree(n, m, m / 10, rng)?;
    inst.max_degree = None;
    Ok(inst)
}

/// Random instance with an explicit degree cap. Triples are drawn
/// uniformly and rejected when they repeat or exceed the cap; a stuck
/// partial instance is discarded and restarted.
pub fn generate_instance_with_max_degree<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    max_degree: usize,
    rng: &mut R,
) -> Result<E3Lin2Instance> {
    if m == 0 {
        return Err(Error::InstanceGeneration("m must be at least 1".into()));
    }
    if n < 3 || 3 * m > n * max_degree {
        return Err(Error::InstanceGeneration(format!(
            "degree cap {max_degree} cannot fit {m} equations on {n} qubits (needs 3m <= n * cap)"
        )));
    }
    let max_triples = n * (n - 1) * (n - 2) / 6;
    if m > max_triples {
        return Err(Error::InstanceGeneration(format!(
            "{m} distinct triples do not exist on {n} qubits"
        )));
    }
    'restart: for _ in 0..RESTARTS {
        let mut deg = vec![0usize; n];
        let mut seen = HashSet::new();
        let mut equations = Vec::with_capacity(m);
        while equations.len() < m {
            let mut placed = false;
            for _ in 0..ATTEMPTS_PER_EQUATION {
                let idx = sample_indices(rng, n, 3);
                let qubits = [idx.index(0), idx.index(1), idx.index(2)];
                if qubits.iter().any(|&q| deg[q] >= max_degree) {
                    continue;
                }
                let mut key = qubits;
                key.sort_unstable();
                if !seen.insert(key) {
                    continue;
                }
                for &q in &qubits {
                    deg[q] += 1;
                }
                equations.push(Equation {
                    qubits,
                    d: rng.random_range(0..2u8),
                });
                placed = true;
                break;
            }
            if !placed {
                continue 'restart;
            }
        }
        return Ok(E3Lin2Instance {
            n,
            equations,
            max_degree: Some(max_degree),
        });
    }
    Err(Error::InstanceGeneration(format!(
        "no instance found after {RESTARTS} restarts"
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub gamma: f64,
    pub beta: f64,
}

impl QaoaParams {
    /// `β = π/4`.
    pub fn new(gamma: f64) -> Self {
        Self {
            gamma,
            beta: std::f64::consts::FRAC_PI_4,
        }
    }
}

/// One observable term `coef · Z_a Z_b Z_c`.
#[derive(Clone, Debug, PartialEq)]
pub struct QaoaTerm {
    pub coef: f64,
    pub qubits: [usize; 3],
}

/// The state-preparation channels and the decomposed observable.
#[derive(Clone, Debug)]
pub struct QaoaCircuit {
    pub n: usize,
    /// `e^{−i(γ/2)(−1)^{d_j} ZZZ}` per equation, in equation order.
    pub phase_gates: Vec<ChannelApplication>,
    /// `e^{−iβX}` per qubit, in qubit order.
    pub mixers: Vec<ChannelApplication>,
    pub terms: Vec<QaoaTerm>,
    input: FactoredState,
}

impl QaoaCircuit {
    /// Heisenberg circuit for term `j`. With `lightcone`, only phase gates
    /// sharing a qubit with the term and mixers on its qubits are kept; the
    /// rest act trivially on the propagated Pauli.
    pub fn term_circuit(&self, j: usize, lightcone: bool) -> Result<Circuit> {
        let term = &self.terms[j];
        let channels: Vec<ChannelApplication> = if lightcone {
            self.phase_gates
                .iter()
                .filter(|g| g.qubits.iter().any(|q| term.qubits.contains(q)))
                .chain(term.qubits.iter().map(|&q| &self.mixers[q]))
                .cloned()
                .collect()
        } else {
            self.phase_gates.iter().chain(&self.mixers).cloned().collect()
        };
        let mut word = PauliString::identity(self.n);
        for &q in &term.qubits {
            word.set_unchecked(q, crate::pauli::Z);
        }
        Circuit::new(self.n, self.input.clone(), channels, FactoredState::from_pauli(&word))
    }
}

pub fn build_circuit(inst: &E3Lin2Instance, params: &QaoaParams) -> Result<QaoaCircuit> {
    inst.validate()?;
    let zzz: PauliString = "ZZZ".parse().unwrap();
    let x: PauliString = "X".parse().unwrap();
    let plus_gate = make_pauli_rotation(&zzz, params.gamma / 2.0)?;
    let minus_gate = make_pauli_rotation(&zzz, -params.gamma / 2.0)?;
    let mixer: Ptm = make_pauli_rotation(&x, params.beta)?;
    let phase_gates = inst
        .equations
        .iter()
        .map(|e| {
            let g = if e.d == 0 { plus_gate.clone() } else { minus_gate.clone() };
            ChannelApplication::new(g, e.qubits.to_vec(), inst.n)
        })
        .collect::<Result<Vec<_>>>()?;
    let mixers = (0..inst.n)
        .map(|q| ChannelApplication::new(mixer.clone(), vec![q], inst.n))
        .collect::<Result<Vec<_>>>()?;
    let terms = inst
        .equations
        .iter()
        .map(|e| QaoaTerm {
            coef: if e.d == 0 { 0.5 } else { -0.5 },
            qubits: e.qubits,
        })
        .collect();
    Ok(QaoaCircuit {
        n: inst.n,
        phase_gates,
        mixers,
        terms,
        input: FactoredState::product(inst.n, &DenseOperator::plus_state())?,
    })
}

/// `m/√(2N) · √(ln(2/δ)) · (|sin γ| + |cos γ|)^{3(m/10 − 1) + 1}`.
pub fn epsilon_heis(m: usize, n_samples: u64, delta: f64, gamma: f64) -> f64 {
    let exponent = 3.0 * (m as f64 / 10.0 - 1.0) + 1.0;
    epsilon_heis_exponent(m, n_samples, delta, gamma, exponent)
}

/// The same bound for instances whose qubits appear in at most
/// `max_degree` equations: at most `3(max_degree − 1) + 1` phase gates
/// reach any term.
pub fn epsilon_heis_for_degree(m: usize, n_samples: u64, delta: f64, gamma: f64, max_degree: usize) -> f64 {
    let exponent = 3.0 * (max_degree as f64 - 1.0) + 1.0;
    epsilon_heis_exponent(m, n_samples, delta, gamma, exponent)
}

fn epsilon_heis_exponent(m: usize, n_samples: u64, delta: f64, gamma: f64, exponent: f64) -> f64 {
    let base = gamma.sin().abs() + gamma.cos().abs();
    m as f64 / (2.0 * n_samples as f64).sqrt() * (2.0 / delta).ln().sqrt() * base.powf(exponent)
}

/// `m/√N · √(ln(2/δ))`.
pub fn epsilon_nest(m: usize, n_samples: u64, delta: f64) -> f64 {
    m as f64 / (n_samples as f64).sqrt() * (2.0 / delta).ln().sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergQaoaReport {
    pub mean: f64,
    /// `Σ_j |coef_j| ε_j` from each term's realized cost bound.
    pub epsilon: f64,
    pub n_samples_per_term: u64,
    pub term_means: Vec<f64>,
    pub term_bounds: Vec<f64>,
    pub max_lightcone_gates: usize,
}

/// Seed of term `j`, decorrelated from the other terms.
fn term_seed(seed: u64, j: usize) -> u64 {
    seed.wrapping_add((j as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Term-by-term Heisenberg estimate of `⟨C⟩` with `n_samples` per term.
pub fn heisenberg_estimate(
    inst: &E3Lin2Instance,
    params: &QaoaParams,
    n_samples: u64,
    delta: f64,
    seed: u64,
    workers: usize,
    lightcone: bool,
) -> Result<HeisenbergQaoaReport> {
    let circ = build_circuit(inst, params)?;
    let mut mean = 0.0;
    let mut epsilon = 0.0;
    let mut term_means = Vec::with_capacity(circ.terms.len());
    let mut term_bounds = Vec::with_capacity(circ.terms.len());
    let mut max_gates = 0;
    for (j, term) in circ.terms.iter().enumerate() {
        let c = circ.term_circuit(j, lightcone)?;
        let phase = c.channels.len() - if lightcone { 3 } else { inst.n };
        max_gates = max_gates.max(phase);
        let prop = Propagator::new(&c, Direction::Heisenberg)?;
        let moments = prop.run(n_samples, term_seed(seed, j), workers);
        let bound = prop.cost().total_bound;
        mean += term.coef * moments.mean;
        epsilon += term.coef.abs() * hoeffding_epsilon(bound, n_samples, delta);
        term_means.push(moments.mean);
        term_bounds.push(bound);
    }
    Ok(HeisenbergQaoaReport {
        mean,
        epsilon,
        n_samples_per_term: n_samples,
        term_means,
        term_bounds,
        max_lightcone_gates: max_gates,
    })
}

/// A Pauli `coef · P` in the expansion of a conjugated term, with the
/// equations whose parity flips under `P`'s X part.
struct VdnPauli {
    coef: f64,
    x_mask: u64,
    z_mask: u64,
    /// `i^{#Y}`, as an exponent mod 4.
    y_phase: u32,
    flips: Vec<usize>,
}

/// Bitmask Monte Carlo over computational basis strings: for each Pauli
/// `P` with X part `a`,
/// `⟨+|e^{iγC} P e^{−iγC}|+⟩ = E_x[e^{iγ(C(x⊕a) − C(x))} ⟨x⊕a|P|x⟩]`.
pub struct VdnEstimator {
    m: usize,
    gamma: f64,
    eq_masks: Vec<u64>,
    eq_signs: Vec<f64>,
    paulis: Vec<VdnPauli>,
    sample_bound: f64,
}

impl VdnEstimator {
    pub fn new(inst: &E3Lin2Instance, params: &QaoaParams) -> Result<Self> {
        inst.validate()?;
        if inst.n > MAX_VDN_QUBITS {
            return Err(Error::Unsupported(format!(
                "bitmask estimator supports at most {MAX_VDN_QUBITS} qubits"
            )));
        }
        let eq_masks: Vec<u64> = inst
            .equations
            .iter()
            .map(|e| e.qubits.iter().fold(0u64, |m, &q| m | 1 << q))
            .collect();
        let eq_signs: Vec<f64> = inst
            .equations
            .iter()
            .map(|e| if e.d == 0 { 1.0 } else { -1.0 })
            .collect();
        // e^{iβX} Z e^{−iβX} = cos 2β Z + sin 2β Y
        let (s2, c2) = (2.0 * params.beta).sin_cos();
        let mut paulis = Vec::new();
        for e in &inst.equations {
            let term_coef = if e.d == 0 { 0.5 } else { -0.5 };
            for choice in 0..8u32 {
                let mut coef = term_coef;
                let (mut xm, mut zm, mut ys) = (0u64, 0u64, 0u32);
                for (t, &q) in e.qubits.iter().enumerate() {
                    zm |= 1 << q;
                    if choice >> t & 1 == 1 {
                        coef *= s2;
                        xm |= 1 << q;
                        ys += 1;
                    } else {
                        coef *= c2;
                    }
                }
                if coef.abs() <= ZERO_TOLERANCE {
                    continue;
                }
                let flips: Vec<usize> = eq_masks
                    .iter()
                    .enumerate()
                    .filter(|(_, &m)| (m & xm).count_ones() % 2 == 1)
                    .map(|(t, _)| t)
                    .collect();
                // a Z-type qubit no flipped equation touches pairs x with
                // x ⊕ e_q at equal phase and opposite sign: exactly zero
                let touched = if params.gamma == 0.0 {
                    0
                } else {
                    flips.iter().fold(0u64, |acc, &t| acc | eq_masks[t])
                };
                if zm & !touched != 0 {
                    continue;
                }
                paulis.push(VdnPauli {
                    coef,
                    x_mask: xm,
                    z_mask: zm,
                    y_phase: ys % 4,
                    flips,
                });
            }
        }
        let per_term = (c2.abs() + s2.abs()).powi(3);
        Ok(Self {
            m: inst.m(),
            gamma: params.gamma,
            sample_bound: 0.5 * inst.m() as f64 * per_term,
            eq_masks,
            eq_signs,
            paulis,
        })
    }

    /// Largest possible magnitude of one sample.
    pub fn sample_bound(&self) -> f64 {
        self.sample_bound
    }

    /// Value at one basis string.
    pub fn value(&self, x: u64) -> f64 {
        let mut total = 0.0;
        for p in &self.paulis {
            // Δ = C(x ⊕ a) − C(x): each flipped equation's sign reverses
            let mut delta = 0.0;
            for &t in &p.flips {
                let odd = (x & self.eq_masks[t]).count_ones() & 1 == 1;
                let s = if odd { -self.eq_signs[t] } else { self.eq_signs[t] };
                delta -= s;
            }
            let sign = if (x & p.z_mask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            let (sin, cos) = (self.gamma * delta).sin_cos();
            // Re(e^{iγΔ} i^{y})
            let re = match p.y_phase {
                0 => cos,
                1 => -sin,
                2 => -cos,
                _ => sin,
            };
            debug_assert!(p.x_mask & !self.eq_masks.iter().fold(0, |a, m| a | m) == 0);
            total += p.coef * sign * re;
        }
        debug_assert!(total.abs() <= self.sample_bound * (1.0 + 1e-12));
        total
    }

    /// Mean of `n_samples` uniform basis strings, split across workers as
    /// in the propagation engine.
    pub fn estimate(&self, n: usize, n_samples: u64, seed: u64, workers: usize) -> VdnReport {
        let workers = workers.max(1);
        let base = n_samples / workers as u64;
        let extra = n_samples % workers as u64;
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let work = |w: usize| {
            let count = base + u64::from((w as u64) < extra);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ w as u64);
            let mut stats = SampleStats::default();
            for _ in 0..count {
                let x = rng.random::<u64>() & mask;
                let v = self.value(x);
                assert!(v.abs() <= self.sample_bound * (1.0 + 1e-12), "sample {v} out of range");
                stats.add(v);
            }
            stats
        };
        let parts: Vec<SampleStats> = if workers == 1 {
            vec![work(0)]
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = (0..workers).map(|w| scope.spawn(move || work(w))).collect();
                handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
            })
        };
        let mut moments = crate::stats::Moments::default();
        let mut sum = 0.0;
        for p in &parts {
            moments.merge(&p.moments);
            sum += p.sum.total();
        }
        VdnReport {
            mean: if n_samples == 0 { 0.0 } else { sum / n_samples as f64 },
            n_samples,
            sample_std: moments.std_dev(),
            m: self.m,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VdnReport {
    pub mean: f64,
    pub n_samples: u64,
    pub sample_std: f64,
    pub m: usize,
}

pub fn vdn_estimate(
    inst: &E3Lin2Instance,
    params: &QaoaParams,
    n_samples: u64,
    seed: u64,
    workers: usize,
) -> Result<VdnReport> {
    Ok(VdnEstimator::new(inst, params)?.estimate(inst.n, n_samples, seed, workers))
}

/// One row of the comparison experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub gamma: f64,
    pub beta: f64,
    pub n: usize,
    pub m: usize,
    pub n_samples: u64,
    pub c_heis: f64,
    pub c_vdn: f64,
    /// Bound from the realized per-term costs.
    pub eps_heis: f64,
    /// The closed-form bound with exponent `3(m/10 − 1) + 1`.
    pub eps_heis_formula: f64,
    pub eps_nest: f64,
    pub abs_err: f64,
    pub seconds: f64,
}

pub struct ExperimentConfig {
    pub n_samples: u64,
    pub delta: f64,
    pub seed: u64,
    pub workers: usize,
    pub lightcone: bool,
}

pub fn run_experiment(inst: &E3Lin2Instance, params: &QaoaParams, cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    let started = Instant::now();
    let heis = heisenberg_estimate(inst, params, cfg.n_samples, cfg.delta, cfg.seed, cfg.workers, cfg.lightcone)?;
    // distinct stream family from the per-term seeds
    let vdn = vdn_estimate(inst, params, cfg.n_samples, !cfg.seed, cfg.workers)?;
    Ok(ExperimentRecord {
        gamma: params.gamma,
        beta: params.beta,
        n: inst.n,
        m: inst.m(),
        n_samples: cfg.n_samples,
        c_heis: heis.mean,
        c_vdn: vdn.mean,
        eps_heis: heis.epsilon,
        eps_heis_formula: epsilon_heis(inst.m(), cfg.n_samples, cfg.delta, params.gamma),
        eps_nest: epsilon_nest(inst.m(), cfg.n_samples, cfg.delta),
        abs_err: (heis.mean - vdn.mean).abs(),
        seconds: started.elapsed().as_secs_f64(),
    })
}

/// Exact `⟨C⟩` by summing every basis string of the state vector
/// `e^{−iβB} e^{−iγC}|+⟩`; feasible for small `n`.
pub fn exact_expectation_statevector(inst: &E3Lin2Instance, params: &QaoaParams) -> Result<f64> {
    if inst.n > 20 {
        return Err(Error::OracleTooLarge { n: inst.n, max: 20 });
    }
    use num_complex::Complex64;
    let dim = 1usize << inst.n;
    let amp = 1.0 / (dim as f64).sqrt();
    let mut psi: Vec<Complex64> = (0..dim)
        .map(|x| Complex64::from_polar(amp, -params.gamma * inst.cost(x as u64)))
        .collect();
    // e^{−iβX} on each qubit
    let (s, c) = params.beta.sin_cos();
    for q in 0..inst.n {
        let bit = 1usize << q;
        for x in 0..dim {
            if x & bit == 0 {
                let (a, b) = (psi[x], psi[x | bit]);
                psi[x] = a * c - Complex64::new(0.0, s) * b;
                psi[x | bit] = b * c - Complex64::new(0.0, s) * a;
            }
        }
    }
    Ok((0..dim).map(|x| psi[x].norm_sqr() * inst.cost(x as u64)).sum())
}
