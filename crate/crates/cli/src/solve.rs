//! `vqge solve|scan` and `oracle eig`.

use anyhow::Result;
use serde::Serialize;
use vqge_core::oracle::generalized_eig;
use vqge_core::simulator::worst_case_std_error;
use vqge_core::vqge::{CostFamily, Method, ScanCost, Solution};
use vqge_core::{measurement_error_bound, AnsatzSpec, MatrixPencil, RotationKind, Vqge, VqgeConfig};

use crate::args::{Cli, Format, MethodArg, OptimizerArgs, PencilArgs, Rotation, ScanCostArg, VqgeArgs};
use crate::output::{Envelope, Sink};
use crate::pencil::{self, Source};

#[derive(Debug, Serialize)]
struct VqgeRunConfig<'a> {
    pencil: &'a Source,
    ansatz: &'a AnsatzSpec,
    solver: &'a VqgeConfig,
}

#[derive(Debug, Serialize)]
struct PencilReport {
    n_qubits: usize,
    g_terms: usize,
    s_terms: usize,
    commuting: bool,
    /// Family used to read eigenvalues off states.
    cost: CostFamily,
    /// Family minimized along the τ grid.
    scan_cost: CostFamily,
    lambda_min_s: Option<f64>,
}

#[derive(Debug, Serialize)]
struct PairReport {
    eigenvalue: f64,
    residual: Option<f64>,
    theta: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct NoiseReport {
    shots: u64,
    /// Worst-case standard error of one expectation value.
    delta: f64,
    /// `δ / λ_min(S)`.
    error_bound: Option<f64>,
}

#[derive(Debug, Serialize)]
struct SolveReport {
    pencil: PencilReport,
    interval: [f64; 2],
    grid_points: usize,
    threshold: f64,
    detected_tau: Vec<f64>,
    eigenpairs: Vec<PairReport>,
    noise: Option<NoiseReport>,
}

#[derive(Debug, Serialize)]
struct ScanReport {
    pencil: PencilReport,
    interval: [f64; 2],
    threshold: f64,
    detected_tau: Vec<f64>,
    detected_eigenvalues: Vec<f64>,
    tau: Vec<f64>,
    min_cost: Vec<f64>,
}

pub fn vqge_config(opt: &OptimizerArgs, seed: u64, shots: u64) -> VqgeConfig {
    let mut cfg = VqgeConfig::default();
    cfg.optimizer.method = match opt.method {
        MethodArg::NelderMead => Method::NelderMead,
        MethodArg::Gradient => Method::ParameterShiftGradientDescent,
    };
    cfg.optimizer.restarts = opt.restarts;
    cfg.optimizer.max_iters = opt.max_iters;
    cfg.optimizer.f_tol = opt.f_tol;
    cfg.optimizer.initial_step = opt.step;
    cfg.optimizer.learning_rate = opt.learning_rate;
    cfg.optimizer.seed = seed;
    cfg.scan.grid_points = opt.grid;
    cfg.scan.warm_start = !opt.no_warm_start;
    cfg.scan.bidirectional = !opt.one_way;
    cfg.scan.detection_threshold = opt.threshold;
    cfg.scan.cost = match opt.scan_cost {
        ScanCostArg::Auto => ScanCost::Auto,
        ScanCostArg::ShiftSquare => ScanCost::Family(CostFamily::ShiftSquare),
        ScanCostArg::ShiftRatio => ScanCost::Family(CostFamily::ShiftRatio),
    };
    cfg.shots = shots;
    cfg
}

fn scan_family(cfg: &VqgeConfig) -> CostFamily {
    match cfg.scan.cost {
        ScanCost::Auto => CostFamily::ShiftSquare,
        ScanCost::Family(f) => f,
    }
}

fn pencil_report(p: &MatrixPencil, cfg: &VqgeConfig) -> PencilReport {
    PencilReport {
        n_qubits: p.n_qubits(),
        g_terms: p.g().len(),
        s_terms: p.s().len(),
        commuting: p.commuting(),
        cost: p.cost_family(),
        scan_cost: scan_family(cfg),
        lambda_min_s: p.lambda_min_s(),
    }
}

pub fn vqge(cli: &Cli, args: &VqgeArgs, scan_only: bool) -> Result<()> {
    let loaded = pencil::load(&args.pencil)?;
    let (g, s) = loaded.pauli()?;
    let pencil = MatrixPencil::new(g.clone(), s.clone())?;
    let n = pencil.n_qubits();
    let builtin = loaded.is_builtin();
    let rotation = match args.ansatz.rotation {
        Some(Rotation::Ry) => RotationKind::RyOnly,
        Some(Rotation::Rzry) => RotationKind::RzRy,
        None if builtin => RotationKind::RyOnly,
        None => RotationKind::RzRy,
    };
    let layers = args.ansatz.layers.unwrap_or(if builtin { 1 } else { n });
    let spec = AnsatzSpec::chain(n, layers, rotation)?;
    let cfg = vqge_config(&args.optimizer, cli.seed, cli.shots);
    let solver = Vqge::new(&pencil, &spec, cfg)?;
    let run = VqgeRunConfig {
        pencil: &loaded.source,
        ansatz: &spec,
        solver: &cfg,
    };
    let sink = Sink::new(cli.out.clone())?;

    if scan_only {
        let interval = solver.estimate_interval()?;
        let scan = solver.tau_scan(&interval)?;
        let csv = scan.to_csv();
        let report = ScanReport {
            pencil: pencil_report(&pencil, &cfg),
            interval: [interval.lambda_min, interval.lambda_max],
            threshold: scan.threshold,
            detected_tau: scan.detected_indices.iter().map(|&i| scan.tau_grid[i]).collect(),
            detected_eigenvalues: scan.detected.iter().map(|p| p.eigenvalue).collect(),
            tau: scan.tau_grid.clone(),
            min_cost: scan.min_cost.clone(),
        };
        match cli.format {
            Format::Json => {
                sink.primary("scan.json", &Envelope::new("vqge scan", cli.seed, &run, &report).to_json()?)?;
                sink.secondary("scan.csv", &csv)?;
            }
            Format::Csv => sink.primary("scan.csv", &csv)?,
        }
        return Ok(());
    }

    let solution = solver.solve_all()?;
    let noise = (cli.shots > 0).then(|| {
        let delta = worst_case_std_error(pencil.g(), cli.shots).max(worst_case_std_error(pencil.s(), cli.shots));
        NoiseReport {
            shots: cli.shots,
            delta,
            error_bound: pencil.lambda_min_s().and_then(|l| measurement_error_bound(delta, l).ok()),
        }
    });
    let report = solve_report(&pencil, &cfg, &solution, noise);
    let scan_csv = solution.scan.to_csv();
    match cli.format {
        Format::Json => {
            sink.primary("eigenpairs.json", &Envelope::new("vqge solve", cli.seed, &run, &report).to_json()?)?;
        }
        Format::Csv => {
            let mut csv = String::from("eigenvalue,residual\n");
            for p in &report.eigenpairs {
                csv.push_str(&format!("{},{}\n", p.eigenvalue, p.residual.map_or(String::new(), |r| r.to_string())));
            }
            sink.primary("eigenvalues.csv", &csv)?;
        }
    }
    sink.secondary("scan.csv", &scan_csv)?;
    Ok(())
}

fn solve_report(pencil: &MatrixPencil, cfg: &VqgeConfig, sol: &Solution, noise: Option<NoiseReport>) -> SolveReport {
    SolveReport {
        pencil: pencil_report(pencil, cfg),
        interval: [sol.interval.lambda_min, sol.interval.lambda_max],
        grid_points: sol.scan.tau_grid.len(),
        threshold: sol.scan.threshold,
        detected_tau: sol.scan.detected_indices.iter().map(|&i| sol.scan.tau_grid[i]).collect(),
        eigenpairs: sol
            .eigenpairs
            .iter()
            .map(|p| PairReport {
                eigenvalue: p.eigenvalue,
                residual: p.residual,
                theta: p.theta.to_vec(),
            })
            .collect(),
        noise,
    }
}

#[derive(Debug, Serialize)]
struct OracleConfig<'a> {
    pencil: &'a Source,
    distinct_gap: f64,
}

#[derive(Debug, Serialize)]
struct OracleReport {
    dim: usize,
    eigenvalues: Vec<f64>,
    distinct: Vec<f64>,
    max_residual: f64,
    /// Columns as `[re, im]` pairs, `S`-orthonormal.
    eigenvectors: Vec<Vec<[f64; 2]>>,
}

pub fn oracle_eig(cli: &Cli, args: &PencilArgs) -> Result<()> {
    const GAP: f64 = 1e-6;
    let loaded = pencil::load(args)?;
    let (g, s) = loaded.dense()?;
    let eig = generalized_eig(&g, &s)?;
    let max_residual = (0..eig.values.len())
        .map(|k| vqge_core::oracle::pencil_residual(g.matrix(), s.matrix(), eig.values[k], &eig.vector(k)))
        .fold(0.0, f64::max);
    let report = OracleReport {
        dim: g.dim(),
        distinct: eig.distinct_values(GAP),
        eigenvalues: eig.values.clone(),
        max_residual,
        eigenvectors: (0..eig.values.len())
            .map(|k| eig.vector(k).iter().map(|z| [z.re, z.im]).collect())
            .collect(),
    };
    let sink = Sink::new(cli.out.clone())?;
    let config = OracleConfig {
        pencil: &loaded.source,
        distinct_gap: GAP,
    };
    match cli.format {
        Format::Json => sink.primary("oracle.json", &Envelope::new("oracle eig", cli.seed, &config, &report).to_json()?),
        Format::Csv => {
            let mut csv = String::from("index,eigenvalue\n");
            for (k, v) in report.eigenvalues.iter().enumerate() {
                csv.push_str(&format!("{k},{v}\n"));
            }
            sink.primary("eigenvalues.csv", &csv)
        }
    }
}
