// SPDX-License-Identifier: Apache-2.0

//! Stabilizer states, robustness of magic, and the state and channel
//! classifications built on them.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{choi_from_ptm, make_clifford, ptm_from_choi, Ptm};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::operator::DenseOperator;
use crate::pauli::local_dim;

/// Tolerance for category thresholds and the LP optimum.
pub const CLASSIFY_TOLERANCE: f64 = 1e-6;

/// All pure stabilizer states on `n ≤ 2` qubits.
#[derive(Clone, Debug)]
pub struct StabilizerSet {
    pub n: usize,
    /// Pauli coefficients `Tr(σ_i ψ)/2^n` per state.
    pub coeffs: Vec<Vec<f64>>,
}

impl StabilizerSet {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn states(&self) -> Vec<DenseOperator> {
        self.coeffs
            .iter()
            .map(|c| DenseOperator::from_pauli_coeffs(self.n, c).unwrap())
            .collect()
    }
}

/// `R c` for a PTM acting on `qubits` of an `n`-qubit coefficient vector.
fn apply_local(coeffs: &[f64], n: usize, ptm: &Ptm, qubits: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; coeffs.len()];
    let local = |idx: usize| {
        qubits
            .iter()
            .enumerate()
            .fold(0, |acc, (t, &q)| acc | (((idx >> (2 * q)) & 3) << (2 * t)))
    };
    let with_local = |idx: usize, l: usize| {
        qubits.iter().enumerate().fold(idx, |acc, (t, &q)| {
            (acc & !(3 << (2 * q))) | (((l >> (2 * t)) & 3) << (2 * q))
        })
    };
    debug_assert_eq!(coeffs.len(), local_dim(n));
    for (idx, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let j = local(idx);
        for i in 0..ptm.nrows() {
            let r = ptm.get(i, j);
            if r != 0.0 {
                out[with_local(idx, i)] += r * c;
            }
        }
    }
    out
}

/// Orbit of `|0…0⟩` under H, S and CNOT, deduplicated by Pauli coefficients.
pub fn enumerate_stabilizer_states(n: usize) -> Result<StabilizerSet> {
    if !(1..=2).contains(&n) {
        return Err(Error::Unsupported(format!(
            "stabilizer enumeration for {n} qubits (only 1 and 2)"
        )));
    }
    let (h, s, cx) = (
        make_clifford("h")?,
        make_clifford("s")?,
        make_clifford("cnot")?,
    );
    let mut gens: Vec<(Ptm, Vec<usize>)> = Vec::new();
    for q in 0..n {
        gens.push((h.clone(), vec![q]));
        gens.push((s.clone(), vec![q]));
    }
    if n == 2 {
        gens.push((cx.clone(), vec![0, 1]));
        gens.push((cx, vec![1, 0]));
    }
    let scale = (1u64 << n) as f64;
    let key = |c: &[f64]| -> Vec<i8> { c.iter().map(|v| (v * scale).round() as i8).collect() };

    // |0…0⟩ has coefficient 2^{-n} on every {I, Z} word
    let mut zero = vec![0.0; local_dim(n)];
    for (idx, c) in zero.iter_mut().enumerate() {
        if (0..n).all(|q| matches!((idx >> (2 * q)) & 3, 0 | 3)) {
            *c = 1.0 / scale;
        }
    }
    let mut seen = HashSet::from([key(&zero)]);
    let mut queue = VecDeque::from([zero.clone()]);
    let mut coeffs = vec![zero];
    while let Some(c) = queue.pop_front() {
        for (g, qs) in &gens {
            let next = apply_local(&c, n, g, qs);
            if seen.insert(key(&next)) {
                coeffs.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(StabilizerSet { n, coeffs })
}

fn check_set(rho: &DenseOperator, set: &StabilizerSet) -> Result<Vec<f64>> {
    if rho.num_qubits() != set.n {
        return Err(Error::QubitCountMismatch {
            left: rho.num_qubits(),
            right: set.n,
        });
    }
    Ok(rho.pauli_coeffs().coeffs)
}

/// Robustness of magic `min Σ|q_s|` subject to `ρ = Σ q_s |φ_s⟩⟨φ_s|`.
pub fn robustness(rho: &DenseOperator, set: &StabilizerSet) -> Result<f64> {
    let target = check_set(rho, set)?;
    primal(&target, set)
}

/// LP optimum together with the dual objective
/// `max ρ·y  s.t.  -1 ≤ a_s·y ≤ 1`, which certifies it.
pub fn robustness_certified(rho: &DenseOperator, set: &StabilizerSet) -> Result<(f64, f64)> {
    let target = check_set(rho, set)?;
    Ok((primal(&target, set)?, dual(&target, set)?))
}

fn primal(target: &[f64], set: &StabilizerSet) -> Result<f64> {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = set
        .coeffs
        .iter()
        .map(|_| {
            (
                lp.add_var(1.0, (0.0, f64::INFINITY)),
                lp.add_var(1.0, (0.0, f64::INFINITY)),
            )
        })
        .collect();
    let scale = (1u64 << set.n) as f64;
    for (i, &t) in target.iter().enumerate() {
        // the identity row reads Σ q = Tr ρ; scale every row to unit entries
        let mut row = Vec::new();
        for (s, (p, m)) in set.coeffs.iter().zip(&vars) {
            let a = s[i] * scale;
            if a != 0.0 {
                row.push((*p, a));
                row.push((*m, -a));
            }
        }
        lp.add_constraint(row, ComparisonOp::Eq, t * scale);
    }
    solve(&lp)
}

fn solve(lp: &Problem) -> Result<f64> {
    match lp.solve().map_err(|e| Error::Lp(e.to_string()))? {
        SolveOutcome::Solution(sol) => Ok(sol.objective()),
        SolveOutcome::Interrupted(_) => Err(Error::Lp("solver interrupted".into())),
    }
}

fn dual(target: &[f64], set: &StabilizerSet) -> Result<f64> {
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let scale = (1u64 << set.n) as f64;
    let ys: Vec<_> = target
        .iter()
        .map(|&t| lp.add_var(t * scale, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    for s in &set.coeffs {
        let row: Vec<_> = s
            .iter()
            .zip(&ys)
            .filter(|(a, _)| **a != 0.0)
            .map(|(a, y)| (*y, a * scale))
            .collect();
        lp.add_constraint(row.clone(), ComparisonOp::Le, 1.0);
        lp.add_constraint(row, ComparisonOp::Ge, -1.0);
    }
    solve(&lp)
}

/// Single-qubit robustness from octahedron geometry: `max(1, ‖r‖₁)`.
pub fn robustness_single_qubit_closed_form(rho: &DenseOperator) -> f64 {
    let c = rho.pauli_coeffs().coeffs;
    let l1 = 2.0 * (c[1].abs() + c[2].abs() + c[3].abs());
    l1.max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateCategory {
    StabilizerMixture,
    HyperOctahedral,
    Magic,
}

impl StateCategory {
    pub const ALL: [StateCategory; 3] = [
        StateCategory::StabilizerMixture,
        StateCategory::HyperOctahedral,
        StateCategory::Magic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StateCategory::StabilizerMixture => "stabilizer_mixture",
            StateCategory::HyperOctahedral => "hyper_octahedral",
            StateCategory::Magic => "magic",
        }
    }
}

impl fmt::Display for StateCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Category with the data that decided it. `robustness` is `None` when
/// `𝒟 > 1` already rules out a stabilizer mixture (`𝒟 ≤ R`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub stabilizer_norm: f64,
    pub robustness: Option<f64>,
    pub category: StateCategory,
}

pub fn classify_state_record(rho: &DenseOperator, set: &StabilizerSet) -> Result<StateRecord> {
    let d = rho.stabilizer_norm();
    if d > 1.0 + CLASSIFY_TOLERANCE {
        return Ok(StateRecord {
            stabilizer_norm: d,
            robustness: None,
            category: StateCategory::Magic,
        });
    }
    let r = robustness(rho, set)?;
    let category = if r <= 1.0 + CLASSIFY_TOLERANCE {
        StateCategory::StabilizerMixture
    } else {
        StateCategory::HyperOctahedral
    };
    Ok(StateRecord {
        stabilizer_norm: d,
        robustness: Some(r),
        category,
    })
}

pub fn classify_state(rho: &DenseOperator, set: &StabilizerSet) -> Result<StateCategory> {
    Ok(classify_state_record(rho, set)?.category)
}

/// `GG†/Tr(GG†)` with `G` a matrix of independent standard complex
/// Gaussians.
pub fn sample_hilbert_schmidt<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseOperator {
    let dim = 1usize << n;
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let mut m = &g * g.adjoint();
    let tr = m.trace().re;
    m /= Complex64::new(tr, 0.0);
    // exact Hermitian symmetry for downstream checks
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    DenseOperator::new(n, m).expect("Ginibre state is Hermitian")
}

/// The fixed-basis cross-section
/// `ρ(x, y) = I/4 + x(XX + ZZ − YY) + y(ZI + IZ)`.
pub fn cross_section_state(x: f64, y: f64) -> Result<DenseOperator> {
    let mut c = vec![0.0; 16];
    c[0] = 0.25;
    c[1 + 4] = x;
    c[3 + 12] = x;
    c[2 + 8] = -x;
    c[3] = y;
    c[12] = y;
    DenseOperator::from_pauli_coeffs(2, &c)
}

/// Venn category of a channel by membership in C (stabilizer-preserving
/// Choi state), S (Schrödinger-free) and H (Heisenberg-free).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChannelCategory {
    M,
    C,
    S,
    H,
    CS,
    CH,
    SH,
    CSH,
}

impl ChannelCategory {
    pub const ALL: [ChannelCategory; 8] = [
        ChannelCategory::M,
        ChannelCategory::C,
        ChannelCategory::S,
        ChannelCategory::H,
        ChannelCategory::CS,
        ChannelCategory::CH,
        ChannelCategory::SH,
        ChannelCategory::CSH,
    ];

    pub fn from_flags(c: bool, s: bool, h: bool) -> Self {
        use ChannelCategory::*;
        match (c, s, h) {
            (false, false, false) => M,
            (true, false, false) => C,
            (false, true, false) => S,
            (false, false, true) => H,
            (true, true, false) => CS,
            (true, false, true) => CH,
            (false, true, true) => SH,
            (true, true, true) => CSH,
        }
    }

    pub fn has_c(self) -> bool {
        matches!(self, Self::C | Self::CS | Self::CH | Self::CSH)
    }

    pub fn has_s(self) -> bool {
        matches!(self, Self::S | Self::CS | Self::SH | Self::CSH)
    }

    pub fn has_h(self) -> bool {
        matches!(self, Self::H | Self::CH | Self::SH | Self::CSH)
    }

    pub fn as_str(self) -> &'static str {
        use ChannelCategory::*;
        match self {
            M => "M",
            C => "C",
            S => "S",
            H => "H",
            CS => "CS",
            CH => "CH",
            SH => "SH",
            CSH => "CSH",
        }
    }
}

impl fmt::Display for ChannelCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionMode {
    General,
    Unital,
    TracePreserving,
    Both,
}

impl ProjectionMode {
    pub const ALL: [ProjectionMode; 4] = [
        ProjectionMode::General,
        ProjectionMode::Unital,
        ProjectionMode::TracePreserving,
        ProjectionMode::Both,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProjectionMode::General => "general",
            ProjectionMode::Unital => "unital",
            ProjectionMode::TracePreserving => "trace_preserving",
            ProjectionMode::Both => "both",
        }
    }

    pub fn apply(self, ptm: &Ptm) -> Ptm {
        match self {
            ProjectionMode::General => ptm.clone(),
            ProjectionMode::Unital => ptm.project_unital(),
            ProjectionMode::TracePreserving => ptm.project_trace_preserving(),
            ProjectionMode::Both => ptm.project_unital().project_trace_preserving(),
        }
    }
}

impl FromStr for ProjectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "general" => Ok(ProjectionMode::General),
            "unital" => Ok(ProjectionMode::Unital),
            "trace_preserving" | "tp" => Ok(ProjectionMode::TracePreserving),
            "both" => Ok(ProjectionMode::Both),
            other => Err(Error::Parse(format!("unknown projection mode {other:?}"))),
        }
    }
}

impl fmt::Display for ProjectionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub d_forward: f64,
    pub d_adjoint: f64,
    pub robustness: f64,
    pub category: ChannelCategory,
}

/// Classifies a qubit-to-qubit channel given by its PTM.
pub fn classify_ptm(ptm: &Ptm, set: &StabilizerSet) -> Result<ClassificationRecord> {
    if ptm.k_in() != 1 || ptm.k_out() != 1 || set.n != 2 {
        return Err(Error::Unsupported(
            "channel classification is implemented for qubit-to-qubit channels".into(),
        ));
    }
    let choi = choi_from_ptm(ptm)?;
    let robustness = robustness(&choi.normalized, set)?;
    let d_forward = ptm.channel_norm();
    let d_adjoint = ptm.adjoint_norm();
    let tol = 1.0 + CLASSIFY_TOLERANCE;
    Ok(ClassificationRecord {
        d_forward,
        d_adjoint,
        robustness,
        category: ChannelCategory::from_flags(robustness <= tol, d_forward <= tol, d_adjoint <= tol),
    })
}

/// Interprets a two-qubit state as the normalized Choi state of a
/// postselective channel, projects it per `mode`, and classifies the
/// result. `Ok(None)` when the projection breaks complete positivity.
pub fn classify_channel(
    rho_2q: &DenseOperator,
    mode: ProjectionMode,
    set: &StabilizerSet,
) -> Result<Option<ClassificationRecord>> {
    let ptm = mode.apply(&ptm_from_choi(rho_2q)?);
    match classify_ptm(&ptm, set) {
        Ok(r) => Ok(Some(r)),
        Err(Error::NotCompletelyPositive(_)) | Err(Error::InvalidState(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Independent RNG for census sample `index`, the same under any worker
/// count.
pub fn census_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSample {
    pub index: u64,
    pub mode: ProjectionMode,
    /// `None` when the projection left a non-CP map.
    pub record: Option<ClassificationRecord>,
    /// Classification of the transposed (adjoint) PTM.
    pub adjoint_record: Option<ClassificationRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelCensus {
    pub mode: ProjectionMode,
    pub n_samples: u64,
    pub counts: BTreeMap<ChannelCategory, u64>,
    pub invalid: u64,
    pub samples: Vec<ChannelSample>,
}

impl ChannelCensus {
    pub fn count(&self, c: ChannelCategory) -> u64 {
        self.counts.get(&c).copied().unwrap_or(0)
    }

    /// Samples whose channel is in S, and whose transposed channel is in H.
    pub fn mirror_counts(&self) -> (u64, u64) {
        let s = self
            .samples
            .iter()
            .filter(|x| x.record.as_ref().is_some_and(|r| r.category.has_s()))
            .count() as u64;
        let h = self
            .samples
            .iter()
            .filter(|x| x.adjoint_record.as_ref().is_some_and(|r| r.category.has_h()))
            .count() as u64;
        (s, h)
    }
}

/// Classifies `n_samples` Hilbert–Schmidt random channels. With
/// `with_adjoint` the transposed PTM of every valid sample is classified
/// too.
pub fn classification_census(
    n_samples: u64,
    mode: ProjectionMode,
    seed: u64,
    workers: usize,
    with_adjoint: bool,
) -> Result<ChannelCensus> {
    let set = enumerate_stabilizer_states(2)?;
    let samples: Vec<ChannelSample> = with_pool(workers, || {
        (0..n_samples)
            .into_par_iter()
            .map(|index| -> Result<ChannelSample> {
                let mut rng = census_rng(seed, index);
                let rho = sample_hilbert_schmidt(2, &mut rng);
                let ptm = mode.apply(&ptm_from_choi(&rho)?);
                let classify = |p: &Ptm| match classify_ptm(p, &set) {
                    Ok(r) => Ok(Some(r)),
                    Err(Error::NotCompletelyPositive(_)) | Err(Error::InvalidState(_)) => Ok(None),
                    Err(e) => Err(e),
                };
                let record = classify(&ptm)?;
                let adjoint_record = match (&record, with_adjoint) {
                    (Some(_), true) => classify(&ptm.adjoint())?,
                    _ => None,
                };
                Ok(ChannelSample {
                    index,
                    mode,
                    record,
                    adjoint_record,
                })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let mut counts = BTreeMap::new();
    let mut invalid = 0;
    for s in &samples {
        match &s.record {
            Some(r) => *counts.entry(r.category).or_insert(0) += 1,
            None => invalid += 1,
        }
    }
    Ok(ChannelCensus {
        mode,
        n_samples,
        counts,
        invalid,
        samples,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateCensus {
    pub n: usize,
    pub n_samples: u64,
    pub counts: BTreeMap<StateCategory, u64>,
    pub records: Vec<StateRecord>,
}

impl StateCensus {
    pub fn fraction(&self, c: StateCategory) -> f64 {
        self.counts.get(&c).copied().unwrap_or(0) as f64 / self.n_samples as f64
    }
}

/// Classifies `n_samples` Hilbert–Schmidt random `n`-qubit states.
pub fn state_census(n: usize, n_samples: u64, seed: u64, workers: usize) -> Result<StateCensus> {
    let set = enumerate_stabilizer_states(n)?;
    let records: Vec<StateRecord> = with_pool(workers, || {
        (0..n_samples)
            .into_par_iter()
            .map(|index| {
                let mut rng = census_rng(seed, index);
                classify_state_record(&sample_hilbert_schmidt(n, &mut rng), &set)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let mut counts = BTreeMap::new();
    for r in &records {
        *counts.entry(r.category).or_insert(0) += 1;
    }
    Ok(StateCensus {
        n,
        n_samples,
        counts,
        records,
    })
}
