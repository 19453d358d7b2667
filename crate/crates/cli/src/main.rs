// SPDX-License-Identifier: Apache-2.0

mod figures;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use pauliprop::circuit_file::{load_circuit, ChannelSpec};
use pauliprop::magic::{
    classification_census, classify_ptm, enumerate_stabilizer_states, robustness,
    state_census, ChannelCategory, ProjectionMode,
};
use pauliprop::oracle::run_exact;
use pauliprop::propagation::{estimate, plan_samples};
use pauliprop::qaoa::{run_experiment, E3Lin2Instance, ExperimentConfig, QaoaParams};
use pauliprop::{channel::choi_from_ptm, Circuit, Direction, Error, EstimateReport};

use output::{num, opt, write_json, Table};

#[derive(Parser)]
#[command(name = "pauliprop", version, about = "Monte Carlo Pauli propagation of noisy near-Clifford circuits")]
struct Cli {
    /// Worker threads for sampling and census runs.
    #[arg(long, global = true, env = "PAULIPROP_WORKERS", default_value_t = 1)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate Tr(E Λ(ρ)) for a circuit file.
    Estimate(EstimateArgs),
    /// Compare estimates with the dense density-matrix oracle (n <= 8).
    Verify(EstimateArgs),
    /// Write a figure dataset as CSV.
    Figures(FiguresArgs),
    /// QAOA E3LIN2 experiment: Heisenberg estimate vs bitmask Monte Carlo.
    Qaoa(QaoaArgs),
    /// Classify random states or channels, one CSV row per sample.
    Census(CensusArgs),
    /// Classify a single-qubit channel given as a JSON channel spec.
    ClassifyChannel(ChannelArgs),
    /// Print the forward and adjoint norms of a channel spec.
    Norms(ChannelArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Schrodinger,
    Heisenberg,
    Both,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("size").required(true).args(["n_samples", "epsilon"]))]
struct EstimateArgs {
    /// Circuit JSON file.
    circuit: PathBuf,
    #[arg(long, value_enum, default_value = "heisenberg")]
    direction: DirectionArg,
    #[arg(long)]
    n_samples: Option<u64>,
    /// Target Hoeffding radius; the sample count is planned from it.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    #[arg(long)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig5,
    Fig6,
}

#[derive(Args)]
struct FiguresArgs {
    #[arg(value_enum)]
    which: Figure,
    #[arg(long)]
    seed: u64,
    /// Random samples (fig2, fig5).
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    /// Grid points per axis (fig1, fig3).
    #[arg(long, default_value_t = 51)]
    points: usize,
    /// Half-width of the fig1 cross-section window.
    #[arg(long, default_value_t = 0.25)]
    extent: f64,
    #[command(flatten)]
    qaoa: QaoaShape,
    /// Samples per term (fig6).
    #[arg(long, default_value_t = 10_000)]
    n_samples: u64,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct QaoaShape {
    /// Qubits of a generated instance.
    #[arg(long, default_value_t = 32)]
    n: usize,
    /// Equations of a generated instance.
    #[arg(long, default_value_t = 40)]
    m: usize,
    /// Degree cap overriding floor(m/10).
    #[arg(long)]
    max_degree: Option<usize>,
    /// Phase angles; defaults to k*pi/32 for k = 0..=8.
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<f64>,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    beta: f64,
}

#[derive(Args)]
struct QaoaArgs {
    /// Instance JSON file; a random instance is generated when absent.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Write the instance used to this path.
    #[arg(long)]
    save_instance: Option<PathBuf>,
    #[command(flatten)]
    shape: QaoaShape,
    /// Samples per term for the Heisenberg estimate, and total for the
    /// bitmask estimator.
    #[arg(long, default_value_t = 100_000)]
    n_samples: u64,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    #[arg(long)]
    seed: u64,
    /// Walk every channel instead of each term's lightcone.
    #[arg(long)]
    no_lightcone: bool,
    /// Drop the seconds column so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CensusKind {
    States,
    Channels,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    General,
    Unital,
    TracePreserving,
    Both,
    All,
}

#[derive(Args)]
struct CensusArgs {
    #[arg(value_enum)]
    kind: CensusKind,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long)]
    seed: u64,
    /// Qubits per random state (states census).
    #[arg(long, default_value_t = 2)]
    qubits: usize,
    #[arg(long, value_enum, default_value = "general")]
    mode: ModeArg,
    /// Print the category histogram instead of per-sample records.
    #[arg(long)]
    summary: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ChannelArgs {
    /// Channel spec as JSON text, or @path to a file holding it.
    spec: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return report_error("usage", &e.to_string(), 2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (kind, code) = classify_error(&e);
            report_error(kind, &format!("{e:#}"), code)
        }
    }
}

fn report_error(kind: &str, message: &str, code: u8) -> ExitCode {
    let body = json!({"error": kind, "message": message.trim_end(), "exit_code": code});
    println!("{body}");
    ExitCode::from(code)
}

fn classify_error(e: &anyhow::Error) -> (&'static str, u8) {
    match e.downcast_ref::<Error>() {
        Some(Error::Parse(_)) => ("parse", 2),
        Some(Error::BoundOverflow(_)) => ("bound_overflow", 4),
        Some(Error::OracleTooLarge { .. }) => ("oracle_too_large", 5),
        Some(Error::Lp(_)) | Some(Error::Unsupported(_)) => ("runtime", 1),
        Some(_) => ("validation", 3),
        None if e.downcast_ref::<serde_json::Error>().is_some() => ("parse", 2),
        None => ("io", 1),
    }
}

fn run(cli: Cli) -> Result<()> {
    let workers = cli.workers.max(1);
    match cli.command {
        Command::Estimate(a) => cmd_estimate(&a, workers),
        Command::Verify(a) => cmd_verify(&a, workers),
        Command::Figures(a) => cmd_figures(&a, workers),
        Command::Qaoa(a) => cmd_qaoa(&a, workers),
        Command::Census(a) => cmd_census(&a, workers),
        Command::ClassifyChannel(a) => cmd_classify(&a),
        Command::Norms(a) => cmd_norms(&a),
    }
}

fn directions(d: DirectionArg) -> Vec<Direction> {
    match d {
        DirectionArg::Schrodinger => vec![Direction::Schrodinger],
        DirectionArg::Heisenberg => vec![Direction::Heisenberg],
        DirectionArg::Both => vec![Direction::Schrodinger, Direction::Heisenberg],
    }
}

fn run_estimates(a: &EstimateArgs, c: &Circuit, workers: usize) -> Result<Vec<EstimateReport>> {
    directions(a.direction)
        .into_iter()
        .map(|d| {
            let n = match (a.n_samples, a.epsilon) {
                (Some(n), _) => n,
                (None, Some(eps)) => plan_samples(c, d, eps, a.delta)?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            Ok(estimate(c, d, n, a.delta, a.seed, workers)?)
        })
        .collect()
}

#[derive(Serialize)]
struct BothReport {
    schrodinger: EstimateReport,
    heisenberg: EstimateReport,
    discrepancy: f64,
    combined_epsilon: f64,
}

fn cmd_estimate(a: &EstimateArgs, workers: usize) -> Result<()> {
    let c = load_circuit(&a.circuit)?;
    let reports = run_estimates(a, &c, workers)?;
    if a.format == Format::Csv {
        let mut t = Table::new(&[
            "direction", "mean", "n_samples", "epsilon", "delta", "total_bound", "sample_std", "sample_min",
            "sample_max",
        ])
        .meta("command", "estimate")
        .meta("circuit", a.circuit.display())
        .meta("seed", a.seed)
        .meta("workers", workers);
        for r in &reports {
            t.push(vec![
                r.direction.to_string(),
                num(r.mean),
                r.n_samples.to_string(),
                num(r.epsilon),
                num(r.delta),
                num(r.cost.total_bound),
                num(r.sample_std),
                num(r.sample_min),
                num(r.sample_max),
            ]);
        }
        return t.write(a.output.as_deref());
    }
    match <[EstimateReport; 2]>::try_from(reports) {
        Ok([s, h]) => write_json(
            a.output.as_deref(),
            &BothReport {
                discrepancy: (s.mean - h.mean).abs(),
                combined_epsilon: s.epsilon + h.epsilon,
                schrodinger: s,
                heisenberg: h,
            },
        ),
        Err(single) => write_json(a.output.as_deref(), &single[0]),
    }
}

#[derive(Serialize)]
struct VerifyRecord {
    direction: Direction,
    estimate: f64,
    exact: f64,
    diff: f64,
    epsilon: f64,
    delta: f64,
    n_samples: u64,
    pass: bool,
}

fn cmd_verify(a: &EstimateArgs, workers: usize) -> Result<()> {
    let c = load_circuit(&a.circuit)?;
    let exact = run_exact(&c)?;
    let records: Vec<VerifyRecord> = run_estimates(a, &c, workers)?
        .into_iter()
        .map(|r| {
            let diff = (r.mean - exact).abs();
            VerifyRecord {
                direction: r.direction,
                estimate: r.mean,
                exact,
                diff,
                epsilon: r.epsilon,
                delta: r.delta,
                n_samples: r.n_samples,
                pass: diff <= r.epsilon + 1e-9,
            }
        })
        .collect();
    if a.format == Format::Csv {
        let mut t = Table::new(&["direction", "estimate", "exact", "diff", "epsilon", "n_samples", "pass"])
            .meta("command", "verify")
            .meta("circuit", a.circuit.display())
            .meta("seed", a.seed)
            .meta("workers", workers)
            .meta("delta", a.delta);
        for r in &records {
            t.push(vec![
                r.direction.to_string(),
                num(r.estimate),
                num(r.exact),
                num(r.diff),
                num(r.epsilon),
                r.n_samples.to_string(),
                r.pass.to_string(),
            ]);
        }
        return t.write(a.output.as_deref());
    }
    write_json(a.output.as_deref(), &records)
}

fn gammas(shape: &QaoaShape) -> Vec<f64> {
    if shape.gamma.is_empty() {
        figures::default_gammas()
    } else {
        shape.gamma.clone()
    }
}

fn cmd_figures(a: &FiguresArgs, workers: usize) -> Result<()> {
    let table = match a.which {
        Figure::Fig1 => figures::fig1(a.points, a.extent)?,
        Figure::Fig2 => figures::fig2(a.samples, a.seed, workers)?,
        Figure::Fig3 => figures::fig3(a.points, a.points)?,
        Figure::Fig5 => figures::fig5(a.samples, a.seed, workers)?,
        Figure::Fig6 => figures::fig6(
            &figures::Fig6Params {
                n: a.qaoa.n,
                m: a.qaoa.m,
                max_degree: a.qaoa.max_degree,
                gammas: gammas(&a.qaoa),
                beta: a.qaoa.beta,
                n_samples: a.n_samples,
                delta: a.delta,
            },
            a.seed,
            workers,
        )?,
    };
    table.write(a.output.as_deref())
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())).into())
}

fn cmd_qaoa(a: &QaoaArgs, workers: usize) -> Result<()> {
    let inst = match &a.instance {
        Some(p) => E3Lin2Instance::from_json(&read_text(p)?)
            .with_context(|| format!("instance {}", p.display()))?,
        None => figures::make_instance(a.shape.n, a.shape.m, a.shape.max_degree, a.seed)?,
    };
    if let Some(p) = &a.save_instance {
        write_json(Some(p), &inst)?;
    }
    let mut header = vec!["gamma", "m", "N", "C_heis", "C_vdn", "eps_heis", "eps_nest", "abs_err", "eps_heis_formula"];
    if !a.no_timing {
        header.push("seconds");
    }
    let mut t = Table::new(&header)
        .meta("command", "qaoa")
        .meta("n", inst.n)
        .meta("m", inst.m())
        .meta("beta", a.shape.beta)
        .meta("delta", a.delta)
        .meta("seed", a.seed)
        .meta("workers", workers)
        .meta("lightcone", !a.no_lightcone);
    let cfg = ExperimentConfig {
        n_samples: a.n_samples,
        delta: a.delta,
        seed: a.seed,
        workers,
        lightcone: !a.no_lightcone,
    };
    for gamma in gammas(&a.shape) {
        let r = run_experiment(&inst, &QaoaParams { gamma, beta: a.shape.beta }, &cfg)?;
        let mut row = vec![
            num(gamma),
            r.m.to_string(),
            r.n_samples.to_string(),
            num(r.c_heis),
            num(r.c_vdn),
            num(r.eps_heis),
            num(r.eps_nest),
            num(r.abs_err),
            num(r.eps_heis_formula),
        ];
        if !a.no_timing {
            row.push(format!("{:.3}", r.seconds));
        }
        t.push(row);
    }
    t.write(a.output.as_deref())
}

fn modes(m: ModeArg) -> Vec<ProjectionMode> {
    match m {
        ModeArg::General => vec![ProjectionMode::General],
        ModeArg::Unital => vec![ProjectionMode::Unital],
        ModeArg::TracePreserving => vec![ProjectionMode::TracePreserving],
        ModeArg::Both => vec![ProjectionMode::Both],
        ModeArg::All => ProjectionMode::ALL.to_vec(),
    }
}

fn cmd_census(a: &CensusArgs, workers: usize) -> Result<()> {
    match a.kind {
        CensusKind::States => {
            let census = state_census(a.qubits, a.samples, a.seed, workers)?;
            let base = |t: Table| {
                t.meta("command", "census-states")
                    .meta("qubits", a.qubits)
                    .meta("samples", a.samples)
                    .meta("seed", a.seed)
                    .meta("workers", workers)
            };
            if a.summary {
                let mut t = base(Table::new(&["category", "count", "fraction"]));
                for (c, n) in &census.counts {
                    t.push(vec![c.as_str().into(), n.to_string(), num(census.fraction(*c))]);
                }
                return t.write(a.output.as_deref());
            }
            let mut t = base(Table::new(&["seed_index", "stabilizer_norm", "robustness", "category"]));
            for (i, r) in census.records.iter().enumerate() {
                t.push(vec![
                    i.to_string(),
                    num(r.stabilizer_norm),
                    opt(r.robustness),
                    r.category.as_str().into(),
                ]);
            }
            t.write(a.output.as_deref())
        }
        CensusKind::Channels => {
            let header: &[&str] = if a.summary {
                &["mode", "category", "count"]
            } else {
                &["seed_index", "d_forward", "d_adjoint", "robustness", "category", "mode"]
            };
            let mut t = Table::new(header)
                .meta("command", "census-channels")
                .meta("samples", a.samples)
                .meta("seed", a.seed)
                .meta("workers", workers);
            for mode in modes(a.mode) {
                let census = classification_census(a.samples, mode, a.seed, workers, false)?;
                if a.summary {
                    for c in ChannelCategory::ALL {
                        t.push(vec![mode.as_str().into(), c.as_str().into(), census.count(c).to_string()]);
                    }
                    t.push(vec![mode.as_str().into(), "invalid".into(), census.invalid.to_string()]);
                    continue;
                }
                for s in &census.samples {
                    t.push(match &s.record {
                        Some(r) => vec![
                            s.index.to_string(),
                            num(r.d_forward),
                            num(r.d_adjoint),
                            num(r.robustness),
                            r.category.as_str().into(),
                            mode.as_str().into(),
                        ],
                        None => vec![
                            s.index.to_string(),
                            String::new(),
                            String::new(),
                            String::new(),
                            "invalid".into(),
                            mode.as_str().into(),
                        ],
                    });
                }
            }
            t.write(a.output.as_deref())
        }
    }
}

fn channel_spec(arg: &str) -> Result<ChannelSpec> {
    let text = match arg.strip_prefix('@') {
        Some(path) => read_text(Path::new(path))?,
        None => arg.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("channel spec: {e}")).into())
}

fn cmd_classify(a: &ChannelArgs) -> Result<()> {
    let ptm = channel_spec(&a.spec)?.to_ptm()?;
    if ptm.k_in() != 1 || ptm.k_out() != 1 {
        bail!(Error::Unsupported("classify-channel takes single-qubit channels".into()));
    }
    let set = enumerate_stabilizer_states(2)?;
    let record = classify_ptm(&ptm, &set)?;
    let p_lambda = choi_from_ptm(&ptm)?.p_lambda;
    write_json(
        a.output.as_deref(),
        &json!({
            "d_forward": record.d_forward,
            "d_adjoint": record.d_adjoint,
            "robustness": record.robustness,
            "category": record.category,
            "p_lambda": p_lambda,
        }),
    )
}

fn cmd_norms(a: &ChannelArgs) -> Result<()> {
    let ptm = channel_spec(&a.spec)?.to_ptm()?;
    let choi = choi_from_ptm(&ptm)?;
    let r = if choi.normalized.num_qubits() <= 2 {
        Some(robustness(&choi.normalized, &enumerate_stabilizer_states(2)?)?)
    } else {
        None
    };
    write_json(
        a.output.as_deref(),
        &json!({
            "k_in": ptm.k_in(),
            "k_out": ptm.k_out(),
            "d_forward": ptm.channel_norm(),
            "d_adjoint": ptm.adjoint_norm(),
            "choi_robustness": r,
            "p_lambda": choi.p_lambda,
            "ptm": ptm.rows(),
        }),
    )
}
