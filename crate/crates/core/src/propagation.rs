// SPDX-License-Identifier: Apache-2.0

//! Schrödinger and Heisenberg Pauli propagation.
//!
//! A Schrödinger trajectory samples `(σ̂_0, ĉ_0)` from the input state and
//! pushes the Pauli forward through each channel's PTM column; its value is
//! `ĉ_k Tr(σ̂_k E)` with the unnormalized trace. A Heisenberg trajectory
//! samples from the observable, walks the channels in reverse through the
//! adjoint (the PTM rows) and finishes with `ĉ_1 Tr(σ̂_1 ρ_0)`.

use std::collections::HashMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelApplication;
use crate::error::{Error, Result};
use crate::operator::{FactoredState, PreparedFactored};
use crate::pauli::{LocalSlots, PauliString};
use crate::stats::{Moments, SampleStats};
use crate::table::SignedDistribution;

/// Bounds above this are rejected rather than run.
pub const MAX_BOUND: f64 = 1e300;

/// A channel sequence on an `n`-qubit register with a product input state
/// and a product observable.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n: usize,
    pub input: FactoredState,
    pub channels: Vec<ChannelApplication>,
    pub observable: FactoredState,
}

impl Circuit {
    pub fn new(
        n: usize,
        input: FactoredState,
        channels: Vec<ChannelApplication>,
        observable: FactoredState,
    ) -> Result<Self> {
        for (what, s) in [("input", &input), ("observable", &observable)] {
            if s.num_qubits() != n {
                return Err(Error::Validation(format!(
                    "{what} covers {} qubits, circuit has {n}",
                    s.num_qubits()
                )));
            }
        }
        input.validate_state()?;
        for (i, ch) in channels.iter().enumerate() {
            if let Some(&q) = ch.qubits.iter().find(|&&q| q >= n) {
                return Err(Error::Validation(format!(
                    "channel {i}: qubit {q} out of range for {n} qubits"
                )));
            }
        }
        Ok(Self {
            n,
            input,
            channels,
            observable,
        })
    }

    /// Whether every channel is a signed permutation (a Clifford unitary).
    pub fn is_clifford(&self) -> bool {
        self.channels.iter().all(|c| {
            let p = &c.ptm;
            (0..p.ncols()).all(|j| {
                let col = p.column(j);
                col.iter().filter(|v| **v != 0.0).count() == 1
                    && col.iter().all(|v| *v == 0.0 || v.abs() == 1.0)
            })
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Schrodinger,
    Heisenberg,
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "schrodinger" | "schroedinger" | "forward" => Ok(Direction::Schrodinger),
            "heisenberg" | "backward" => Ok(Direction::Heisenberg),
            other => Err(Error::Parse(format!("unknown direction {other:?}"))),
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::Schrodinger => "schrodinger",
            Direction::Heisenberg => "heisenberg",
        })
    }
}

/// The per-direction cost decomposition `state × Π channels × observable`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub direction: Direction,
    /// Schrödinger: `𝒟(ρ_0)`. Heisenberg: `Π_f max_σ |Tr(σ ρ_f)|`.
    pub state_cost: f64,
    /// `𝒟(Λ_i)` (Schrödinger) or `𝒟(Λ_i†)` (Heisenberg), in circuit order.
    pub channel_costs: Vec<f64>,
    /// Schrödinger: `Π_f max_σ |Tr(σ E_f)|`. Heisenberg: `𝒟(E)`.
    pub observable_cost: f64,
    pub total_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub direction: Direction,
    pub mean: f64,
    pub n_samples: u64,
    /// Hoeffding radius at confidence `1 - delta`.
    pub epsilon: f64,
    pub delta: f64,
    pub cost: CostReport,
    pub seed: u64,
    pub workers: usize,
    pub sample_std: f64,
    pub sample_min: f64,
    pub sample_max: f64,
    pub wall_time: f64,
}

/// Hoeffding radius `2B √(ln(2/δ) / 2N)` for values in `[-B, B]`.
pub fn hoeffding_epsilon(total_bound: f64, n_samples: u64, delta: f64) -> f64 {
    2.0 * total_bound * ((2.0 / delta).ln() / (2.0 * n_samples as f64)).sqrt()
}

/// Smallest `N ≥ 1` with `hoeffding_epsilon(B, N, δ) ≤ ε`.
pub fn hoeffding_samples(total_bound: f64, epsilon: f64, delta: f64) -> Result<u64> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {delta}")));
    }
    let range = 2.0 * total_bound;
    let n = ((2.0 / delta).ln() * range * range / (2.0 * epsilon * epsilon)).ceil();
    if !(n < u64::MAX as f64) {
        return Err(Error::BoundOverflow(total_bound));
    }
    Ok((n as u64).max(1))
}

#[derive(Clone, Copy)]
struct Outcome {
    index: u32,
    cumulative: f64,
    multiplier: f64,
}

/// Outcomes for one incoming local Pauli. A point mass is stored inline;
/// otherwise `start..start + len` indexes `Propagator::outcomes`. `len` is
/// 0 for an all-zero column.
#[derive(Clone, Copy)]
struct Column {
    multiplier: f64,
    index: u32,
    start: u32,
    len: u32,
}

struct Step {
    slots: LocalSlots,
    /// Offset of this step's columns in `Propagator::columns`.
    columns: usize,
    norm: f64,
}

/// Sampling tables for one direction of one circuit, shareable across
/// worker threads. All steps share two flat arrays.
pub struct Propagator {
    n: usize,
    direction: Direction,
    start: PreparedFactored,
    finish: PreparedFactored,
    steps: Vec<Step>,
    columns: Vec<Column>,
    outcomes: Vec<Outcome>,
    cost: CostReport,
}

impl Propagator {
    pub fn new(c: &Circuit, direction: Direction) -> Result<Self> {
        let input = PreparedFactored::new(&c.input);
        let observable = PreparedFactored::new(&c.observable);
        let mut columns = Vec::new();
        let mut outcomes = Vec::new();
        // steps with the same PTM share one table
        let mut tables: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut build = |ch: &ChannelApplication, adjoint: bool| {
            let ptm = if adjoint { ch.ptm.adjoint() } else { ch.ptm.clone() };
            let key: Vec<u64> = std::iter::once(ptm.ncols() as u64)
                .chain(ptm.rows().iter().flatten().map(|v| v.to_bits()))
                .collect();
            let offset = *tables.entry(key).or_insert_with(|| {
                let offset = columns.len();
                for j in 0..ptm.ncols() {
                    let start = outcomes.len() as u32;
                    let mut column = Column {
                        multiplier: 0.0,
                        index: 0,
                        start,
                        len: 0,
                    };
                    if let Some(d) = SignedDistribution::new(&ptm.column(j)) {
                        column.len = d.support_len() as u32;
                        if let Some((index, multiplier)) = d.point_mass() {
                            column.index = index as u32;
                            column.multiplier = multiplier;
                        } else {
                            outcomes.extend(d.outcomes().map(|(index, cumulative, multiplier)| Outcome {
                                index: index as u32,
                                cumulative,
                                multiplier,
                            }));
                        }
                    }
                    columns.push(column);
                }
                offset
            });
            Step {
                slots: LocalSlots::new(&ch.qubits),
                columns: offset,
                norm: ptm.channel_norm(),
            }
        };
        let (start, finish, steps, cost) = match direction {
            Direction::Schrodinger => {
                let steps: Vec<Step> = c.channels.iter().map(|ch| build(ch, false)).collect();
                let cost = CostReport {
                    direction,
                    state_cost: input.stabilizer_norm(),
                    channel_costs: steps.iter().map(|s| s.norm).collect(),
                    observable_cost: observable.max_pauli_trace(),
                    total_bound: 0.0,
                };
                (input, observable, steps, cost)
            }
            Direction::Heisenberg => {
                let mut steps: Vec<Step> = c.channels.iter().rev().map(|ch| build(ch, true)).collect();
                steps.reverse();
                let channel_costs = steps.iter().map(|s| s.norm).collect();
                steps.reverse();
                let cost = CostReport {
                    direction,
                    state_cost: input.max_pauli_trace(),
                    channel_costs,
                    observable_cost: observable.stabilizer_norm(),
                    total_bound: 0.0,
                };
                (observable, input, steps, cost)
            }
        };
        let mut cost = cost;
        cost.total_bound =
            cost.state_cost * cost.channel_costs.iter().product::<f64>() * cost.observable_cost;
        if !(cost.total_bound <= MAX_BOUND) {
            return Err(Error::BoundOverflow(cost.total_bound));
        }
        if !start.can_sample() {
            return Err(Error::ZeroOperator);
        }
        Ok(Self {
            n: c.n,
            direction,
            start,
            finish,
            steps,
            columns,
            outcomes,
            cost,
        })
    }

    /// Next local Pauli and weight multiplier from incoming local Pauli `j`;
    /// `None` on a zero column.
    #[inline]
    fn draw<R: Rng + ?Sized>(&self, s: &Step, j: usize, rng: &mut R) -> Option<Outcome> {
        let col = self.columns[s.columns + j];
        let start = col.start as usize;
        match col.len {
            0 => None,
            1 => Some(Outcome {
                index: col.index,
                cumulative: 1.0,
                multiplier: col.multiplier,
            }),
            len => {
                let opts = &self.outcomes[start..start + len as usize];
                let u: f64 = rng.random();
                let pos = opts.partition_point(|o| o.cumulative <= u).min(opts.len() - 1);
                Some(opts[pos])
            }
        }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn cost(&self) -> &CostReport {
        &self.cost
    }

    /// One trajectory value; `scratch` is overwritten.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, scratch: &mut PauliString) -> f64 {
        let mut c = self.start.sample_into_unchecked(rng, scratch);
        if self.n <= 64 {
            // keep the string in registers
            let (mut x, mut z) = scratch.low_words();
            for s in &self.steps {
                match self.draw(s, s.slots.word_index(x, z), rng) {
                    None => return 0.0,
                    Some(o) => {
                        c *= o.multiplier;
                        (x, z) = s.slots.set_word(x, z, o.index as usize);
                    }
                }
            }
            scratch.set_low_words(x, z);
        } else {
            for s in &self.steps {
                match self.draw(s, s.slots.index(scratch), rng) {
                    None => return 0.0,
                    Some(o) => {
                        c *= o.multiplier;
                        s.slots.set(scratch, o.index as usize);
                    }
                }
            }
        }
        let v = c * self.finish.trace(scratch);
        debug_assert!(v.abs() <= self.cost.total_bound * (1.0 + 1e-9));
        v
    }

    /// A trajectory with its realized per-step weight multipliers.
    pub fn trace_trajectory<R: Rng + ?Sized>(&self, rng: &mut R) -> Trajectory {
        let mut p = PauliString::identity(self.n);
        let start_coeff = self.start.sample_into_unchecked(rng, &mut p);
        let mut paulis = vec![p.clone()];
        let mut multipliers = Vec::with_capacity(self.steps.len());
        let mut c = start_coeff;
        for s in &self.steps {
            let j = s.slots.index(&p);
            match self.draw(s, j, rng) {
                None => {
                    return Trajectory {
                        start_coeff,
                        multipliers,
                        paulis,
                        final_coeff: 0.0,
                        value: 0.0,
                    }
                }
                Some(o) => {
                    c *= o.multiplier;
                    multipliers.push(o.multiplier);
                    s.slots.set(&mut p, o.index as usize);
                    paulis.push(p.clone());
                }
            }
        }
        Trajectory {
            start_coeff,
            multipliers,
            final_coeff: c,
            value: c * self.finish.trace(&p),
            paulis,
        }
    }

    /// Runs `n_samples` trajectories split over `workers` threads. Worker
    /// `w` draws from `ChaCha8Rng::seed_from_u64(seed ^ w)`; the first
    /// `n_samples % workers` workers take one extra sample.
    pub fn run(&self, n_samples: u64, seed: u64, workers: usize) -> Moments {
        let (moments, _) = self.run_with_sum(n_samples, seed, workers);
        moments
    }

    fn run_with_sum(&self, n_samples: u64, seed: u64, workers: usize) -> (Moments, f64) {
        let workers = workers.max(1);
        let base = n_samples / workers as u64;
        let extra = n_samples % workers as u64;
        let work = |w: usize| {
            let count = base + u64::from((w as u64) < extra);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ w as u64);
            let mut scratch = PauliString::identity(self.n);
            let mut stats = SampleStats::default();
            for _ in 0..count {
                stats.add(self.sample(&mut rng, &mut scratch));
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
        let mut moments = Moments::default();
        let mut sums: Vec<f64> = Vec::with_capacity(parts.len());
        for p in &parts {
            moments.merge(&p.moments);
            sums.push(p.sum.total());
        }
        (moments, pairwise(&sums))
    }
}

fn pairwise(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => pairwise(&xs[..n / 2]) + pairwise(&xs[n / 2..]),
    }
}

/// One recorded trajectory; see [`Propagator::trace_trajectory`].
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub start_coeff: f64,
    pub multipliers: Vec<f64>,
    pub paulis: Vec<PauliString>,
    pub final_coeff: f64,
    pub value: f64,
}

pub fn schrodinger_sample<R: Rng + ?Sized>(c: &Circuit, rng: &mut R) -> Result<f64> {
    let p = Propagator::new(c, Direction::Schrodinger)?;
    Ok(p.sample(rng, &mut PauliString::identity(c.n)))
}

pub fn heisenberg_sample<R: Rng + ?Sized>(c: &Circuit, rng: &mut R) -> Result<f64> {
    let p = Propagator::new(c, Direction::Heisenberg)?;
    Ok(p.sample(rng, &mut PauliString::identity(c.n)))
}

pub fn cost_report(c: &Circuit, direction: Direction) -> Result<CostReport> {
    Ok(Propagator::new(c, direction)?.cost)
}

/// Mean of `n_samples` trajectories with its Hoeffding radius.
pub fn estimate(
    c: &Circuit,
    direction: Direction,
    n_samples: u64,
    delta: f64,
    seed: u64,
    workers: usize,
) -> Result<EstimateReport> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {delta}")));
    }
    let started = Instant::now();
    let prop = Propagator::new(c, direction)?;
    let (moments, sum) = prop.run_with_sum(n_samples, seed, workers);
    Ok(EstimateReport {
        direction,
        mean: sum / n_samples as f64,
        n_samples,
        epsilon: hoeffding_epsilon(prop.cost.total_bound, n_samples, delta),
        delta,
        cost: prop.cost.clone(),
        seed,
        workers: workers.max(1),
        sample_std: moments.std_dev(),
        sample_min: moments.min,
        sample_max: moments.max,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

/// Samples needed for radius `epsilon_target` at confidence `1 - delta`.
pub fn plan_samples(c: &Circuit, direction: Direction, epsilon_target: f64, delta: f64) -> Result<u64> {
    let cost = cost_report(c, direction)?;
    hoeffding_samples(cost.total_bound, epsilon_target, delta)
}
