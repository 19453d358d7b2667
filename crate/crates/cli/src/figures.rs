// SPDX-License-Identifier: Apache-2.0

//! CSV datasets behind the figures. Sample counts default well below the
//! published ones so every dataset builds in minutes on a laptop.

use std::f64::consts::PI;

use anyhow::Result;
use pauliprop::channel::make_depolarized_rotation;
use pauliprop::magic::{
    classification_census, classify_ptm, classify_state_record, cross_section_state,
    enumerate_stabilizer_states, state_census, ChannelCategory, ProjectionMode, StateCategory,
};
use pauliprop::qaoa::{
    generate_instance, generate_instance_with_max_degree, run_experiment, E3Lin2Instance,
    ExperimentConfig, QaoaParams,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::output::{num, opt, Table};

fn linspace(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    let step = if points > 1 { (hi - lo) / (points - 1) as f64 } else { 0.0 };
    (0..points).map(move |i| lo + step * i as f64)
}

/// `(x, y, category)` over the two-qubit cross-section. Points outside
/// the state space are labelled `not_a_state`.
pub fn fig1(points: usize, extent: f64) -> Result<Table> {
    let set = enumerate_stabilizer_states(2)?;
    let mut t = Table::new(&["x", "y", "stabilizer_norm", "robustness", "category"])
        .meta("figure", "fig1")
        .meta("points", points)
        .meta("extent", extent);
    for y in linspace(-extent, extent, points) {
        for x in linspace(-extent, extent, points) {
            let rho = cross_section_state(x, y)?;
            if !rho.is_state() {
                t.push(vec![num(x), num(y), String::new(), String::new(), "not_a_state".into()]);
                continue;
            }
            let r = classify_state_record(&rho, &set)?;
            t.push(vec![
                num(x),
                num(y),
                num(r.stabilizer_norm),
                opt(r.robustness),
                r.category.as_str().into(),
            ]);
        }
    }
    Ok(t)
}

/// Category proportions of Hilbert–Schmidt random two-qubit states.
pub fn fig2(samples: u64, seed: u64, workers: usize) -> Result<Table> {
    let census = state_census(2, samples, seed, workers)?;
    let mut t = Table::new(&["category", "count", "fraction"])
        .meta("figure", "fig2")
        .meta("samples", samples)
        .meta("seed", seed)
        .meta("workers", workers);
    for c in StateCategory::ALL {
        t.push(vec![
            c.as_str().into(),
            census.counts.get(&c).copied().unwrap_or(0).to_string(),
            num(census.fraction(c)),
        ]);
    }
    Ok(t)
}

/// Classification of depolarized Z rotations over `(f, θ)`. `diamond_f`
/// is the fidelity `1/(|cos θ| + |sin θ|)` where `𝒟` reaches 1.
pub fn fig3(f_points: usize, theta_points: usize) -> Result<Table> {
    let set = enumerate_stabilizer_states(2)?;
    let mut t = Table::new(&["f", "theta", "d_forward", "d_adjoint", "robustness", "category", "diamond_f"])
        .meta("figure", "fig3")
        .meta("f_points", f_points)
        .meta("theta_points", theta_points);
    for theta in linspace(0.0, PI / 2.0, theta_points) {
        let diamond = 1.0 / (theta.cos().abs() + theta.sin().abs());
        for f in linspace(0.0, 1.0, f_points) {
            let r = classify_ptm(&make_depolarized_rotation(f, theta)?, &set)?;
            t.push(vec![
                num(f),
                num(theta),
                num(r.d_forward),
                num(r.d_adjoint),
                num(r.robustness),
                r.category.as_str().into(),
                num(diamond),
            ]);
        }
    }
    Ok(t)
}

/// Channel-category histograms per projection mode.
pub fn fig5(samples: u64, seed: u64, workers: usize) -> Result<Table> {
    let mut t = Table::new(&["mode", "category", "count", "fraction"])
        .meta("figure", "fig5")
        .meta("samples", samples)
        .meta("seed", seed)
        .meta("workers", workers);
    for mode in ProjectionMode::ALL {
        let census = classification_census(samples, mode, seed, workers, false)?;
        let valid = (samples - census.invalid).max(1) as f64;
        for c in ChannelCategory::ALL {
            let count = census.count(c);
            t.push(vec![
                mode.as_str().into(),
                c.as_str().into(),
                count.to_string(),
                num(count as f64 / valid),
            ]);
        }
        t.push(vec![
            mode.as_str().into(),
            "invalid".into(),
            census.invalid.to_string(),
            String::new(),
        ]);
    }
    Ok(t)
}

pub struct Fig6Params {
    pub n: usize,
    pub m: usize,
    pub max_degree: Option<usize>,
    pub gammas: Vec<f64>,
    pub beta: f64,
    pub n_samples: u64,
    pub delta: f64,
}

pub fn make_instance(n: usize, m: usize, max_degree: Option<usize>, seed: u64) -> Result<E3Lin2Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(match max_degree {
        Some(d) => generate_instance_with_max_degree(n, m, d, &mut rng)?,
        None => generate_instance(n, m, &mut rng)?,
    })
}

/// γ sweep at a fixed random instance. Wall times are left out so reruns
/// are byte-identical.
pub fn fig6(p: &Fig6Params, seed: u64, workers: usize) -> Result<Table> {
    let inst = make_instance(p.n, p.m, p.max_degree, seed)?;
    let mut t = Table::new(&[
        "gamma", "m", "N", "C_heis", "C_vdn", "eps_heis", "eps_heis_formula", "eps_nest", "abs_err",
    ])
    .meta("figure", "fig6")
    .meta("n", p.n)
    .meta("m", p.m)
    .meta("beta", p.beta)
    .meta("N", p.n_samples)
    .meta("delta", p.delta)
    .meta("seed", seed)
    .meta("workers", workers);
    let cfg = ExperimentConfig {
        n_samples: p.n_samples,
        delta: p.delta,
        seed,
        workers,
        lightcone: true,
    };
    for &gamma in &p.gammas {
        let r = run_experiment(&inst, &QaoaParams { gamma, beta: p.beta }, &cfg)?;
        t.push(vec![
            num(gamma),
            r.m.to_string(),
            r.n_samples.to_string(),
            num(r.c_heis),
            num(r.c_vdn),
            num(r.eps_heis),
            num(r.eps_heis_formula),
            num(r.eps_nest),
            num(r.abs_err),
        ]);
    }
    Ok(t)
}

/// `k π/32` for `k = 0..=8`.
pub fn default_gammas() -> Vec<f64> {
    (0..=8).map(|k| k as f64 * PI / 32.0).collect()
}
