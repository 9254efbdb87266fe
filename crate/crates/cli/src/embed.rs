//! `npe fit|transform` and `lde fit|classify`.

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use vqge_core::lde::{self, accuracy, Classifier};
use vqge_core::manifold::{self, matrix_to_csv};
use vqge_core::{datasets, Dataset, Distance, LdeParams, Metric, NpeParams, Projection, Solver, VqgeConfig};

use crate::args::{Cli, DataArgs, DistanceArg, FitArgs, Format, LdeClassifyArgs, LdeFitArgs, MetricArg, NpeFitArgs, SolverArg, TransformArgs};
use crate::output::{read, Envelope, Sink};

/// Fixed seeds of the bundled datasets.
const LINE_SEED: u64 = 1;
const TWO_BLOB_SEED: u64 = 7;

#[derive(Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
enum DataSource {
    Builtin { name: String },
    File { path: String },
}

fn load_data(builtin: Option<&str>, data: &DataArgs, want_labels: bool) -> Result<(Dataset, DataSource)> {
    match builtin {
        Some("line") => Ok((datasets::line(20, 4, LINE_SEED)?.0, DataSource::Builtin { name: "line".into() })),
        Some("two-blob") => Ok((
            datasets::two_blob_benchmark(TWO_BLOB_SEED)?.0,
            DataSource::Builtin { name: "two-blob".into() },
        )),
        Some(other) => bail!("unknown builtin dataset '{other}' (expected line or two-blob)"),
        None => {
            let path = data.data.as_ref().ok_or_else(|| anyhow!("no dataset given: use --data or --builtin"))?;
            let labels = data.labels || want_labels;
            let ds = Dataset::read_csv(&read(path)?, data.header, labels).with_context(|| format!("parsing {}", path.display()))?;
            Ok((ds, DataSource::File { path: path.display().to_string() }))
        }
    }
}

fn metric(arg: MetricArg, cli: &Cli) -> Result<Metric> {
    match arg {
        MetricArg::Euclidean => Ok(Metric::Euclidean),
        MetricArg::Overlap if cli.shots == 0 => bail!("the overlap metric needs --shots > 0"),
        MetricArg::Overlap => Ok(Metric::Overlap {
            shots: cli.shots,
            seed: cli.seed,
        }),
    }
}

fn solver(fit: &FitArgs, dim: usize, cli: &Cli) -> Result<Solver> {
    match fit.solver {
        SolverArg::Oracle => Ok(Solver::Oracle),
        SolverArg::Vqge => {
            let mut cfg = VqgeConfig::default();
            cfg.optimizer.seed = cli.seed;
            cfg.scan.grid_points = fit.grid;
            Ok(Solver::vqge_for_dim(dim, fit.layers, cfg)?)
        }
    }
}

/// The overlap metric compares amplitude-encoded points, so the data is
/// normalized first.
fn prepare(data: Dataset, metric: &Metric) -> Result<Dataset> {
    match metric {
        Metric::Overlap { .. } if !data.is_normalized() => Ok(data.normalize()?),
        _ => Ok(data),
    }
}

#[derive(Debug, Serialize)]
struct FitConfig<'a, P: Serialize> {
    data: &'a DataSource,
    normalized: bool,
    params: P,
    solver: &'a Solver,
}

#[derive(Debug, Serialize)]
struct FitReport {
    points: usize,
    dim: usize,
    eigenvalues: Vec<f64>,
    /// Row-major `D×d`.
    projection: Vec<Vec<f64>>,
}

fn fit_report(data: &Dataset, p: &Projection) -> FitReport {
    FitReport {
        points: data.len(),
        dim: data.dim(),
        eigenvalues: p.eigenvalues.clone(),
        projection: p.a.row_iter().map(|r| r.iter().copied().collect()).collect(),
    }
}

fn emit_fit<P: Serialize>(cli: &Cli, command: &str, name: &str, config: FitConfig<'_, P>, data: &Dataset, p: &Projection) -> Result<()> {
    let sink = Sink::new(cli.out.clone())?;
    let json = Envelope::new(command, cli.seed, &config, fit_report(data, p)).to_json()?;
    match cli.format {
        Format::Json => {
            sink.primary(&format!("{name}.json"), &json)?;
            sink.secondary("projection.csv", &p.to_csv())
        }
        Format::Csv => {
            sink.primary("projection.csv", &p.to_csv())?;
            sink.secondary(&format!("{name}.json"), &json)
        }
    }
}

pub fn npe_fit(cli: &Cli, args: &NpeFitArgs) -> Result<()> {
    let (data, source) = load_data(args.builtin.as_deref(), &args.data, false)?;
    let params = NpeParams {
        k: args.k,
        d: args.d,
        metric: metric(args.fit.metric, cli)?,
        reg: args.fit.reg,
        ridge: args.fit.ridge,
    };
    let data = prepare(data, &params.metric)?;
    let solver = solver(&args.fit, data.dim(), cli)?;
    let fit = manifold::npe_fit(&data, &params, &solver)?;
    let config = FitConfig {
        data: &source,
        normalized: data.is_normalized(),
        params,
        solver: &solver,
    };
    emit_fit(cli, "npe fit", "npe", config, &data, &fit.projection)
}

pub fn transform(cli: &Cli, args: &TransformArgs) -> Result<()> {
    let projection = Projection::from_csv(&read(&args.projection)?)?;
    let (data, _) = load_data(None, &args.data, false)?;
    let y = projection.embed_dataset(&data)?;
    let sink = Sink::new(cli.out.clone())?;
    match cli.format {
        Format::Csv => sink.primary("embedding.csv", &matrix_to_csv(&y.transpose())),
        Format::Json => {
            #[derive(Serialize)]
            struct Cfg<'a> {
                projection: String,
                data: &'a Option<std::path::PathBuf>,
            }
            let rows: Vec<Vec<f64>> = y.column_iter().map(|c| c.iter().copied().collect()).collect();
            let cfg = Cfg {
                projection: args.projection.display().to_string(),
                data: &args.data.data,
            };
            sink.primary("embedding.json", &Envelope::new("npe transform", cli.seed, cfg, rows).to_json()?)?;
            sink.secondary("embedding.csv", &matrix_to_csv(&y.transpose()))
        }
    }
}

fn lde_params(k: usize, k_prime: usize, d: usize, fit: &FitArgs, cli: &Cli) -> Result<LdeParams> {
    Ok(LdeParams {
        k,
        k_prime,
        d,
        metric: metric(fit.metric, cli)?,
        reg: fit.reg,
        ridge: fit.ridge,
    })
}

pub fn lde_fit(cli: &Cli, args: &LdeFitArgs) -> Result<()> {
    let (data, source) = load_data(args.builtin.as_deref(), &args.data, true)?;
    let params = lde_params(args.k, args.k_prime, args.d, &args.fit, cli)?;
    let data = prepare(data, &params.metric)?;
    let solver = solver(&args.fit, data.dim(), cli)?;
    let fit = lde::lde_fit(&data, &params, &solver)?;
    let config = FitConfig {
        data: &source,
        normalized: data.is_normalized(),
        params,
        solver: &solver,
    };
    emit_fit(cli, "lde fit", "lde", config, &data, &fit.projection)
}

#[derive(Debug, Serialize)]
struct ClassifyConfig<'a> {
    data: DataSource,
    projection: Option<String>,
    fit: Option<LdeParams>,
    solver: Option<&'a Solver>,
    distance: Distance,
}

#[derive(Debug, Serialize)]
struct ClassifyReport {
    train_points: usize,
    test_points: usize,
    accuracy: Option<f64>,
    eigenvalues: Vec<f64>,
    predictions: Vec<i64>,
}

pub fn lde_classify(cli: &Cli, args: &LdeClassifyArgs) -> Result<()> {
    let (train, test, source) = match args.builtin.as_deref() {
        Some("two-blob") => {
            let (tr, te) = datasets::two_blob_benchmark(TWO_BLOB_SEED)?;
            (tr, te, DataSource::Builtin { name: "two-blob".into() })
        }
        Some(other) => bail!("unknown builtin dataset '{other}' (expected two-blob)"),
        None => {
            let tp = args.train.as_ref().ok_or_else(|| anyhow!("--train is required without --builtin"))?;
            let sp = args.test.as_ref().ok_or_else(|| anyhow!("--test is required without --builtin"))?;
            let tr = Dataset::read_csv(&read(tp)?, args.header, true).with_context(|| format!("parsing {}", tp.display()))?;
            let te = Dataset::read_csv(&read(sp)?, args.header, args.test_labels).with_context(|| format!("parsing {}", sp.display()))?;
            (tr, te, DataSource::File { path: tp.display().to_string() })
        }
    };
    let distance = match args.distance {
        DistanceArg::Euclidean => Distance::Euclidean,
        DistanceArg::Trace => Distance::Trace,
    };
    let (projection, params, solver, train, test) = match &args.projection {
        Some(path) => (Projection::from_csv(&read(path)?)?, None, None, train, test),
        None => {
            let params = lde_params(args.k, args.k_prime, args.d, &args.fit, cli)?;
            let train = prepare(train, &params.metric)?;
            let test = prepare(test, &params.metric)?;
            let solver = solver(&args.fit, train.dim(), cli)?;
            let fit = lde::lde_fit(&train, &params, &solver)?;
            (fit.projection, Some(params), Some(solver), train, test)
        }
    };
    let classifier = Classifier::new(projection.clone(), &train, distance)?;
    let predictions = classifier.classify_all(&test)?;
    let acc = test.labels().map(|t| accuracy(&predictions, t)).transpose()?;
    let report = ClassifyReport {
        train_points: train.len(),
        test_points: test.len(),
        accuracy: acc,
        eigenvalues: projection.eigenvalues.iter().map(|v| if v.is_finite() { *v } else { 0.0 }).collect(),
        predictions: predictions.clone(),
    };
    let config = ClassifyConfig {
        data: source,
        projection: args.projection.as_ref().map(|p| p.display().to_string()),
        fit: params,
        solver: solver.as_ref(),
        distance,
    };
    let csv: String = std::iter::once("label\n".to_string())
        .chain(predictions.iter().map(|l| format!("{l}\n")))
        .collect();
    let sink = Sink::new(cli.out.clone())?;
    match cli.format {
        Format::Json => {
            sink.primary("classify.json", &Envelope::new("lde classify", cli.seed, &config, &report).to_json()?)?;
            sink.secondary("predictions.csv", &csv)
        }
        Format::Csv => sink.primary("predictions.csv", &csv),
    }
}
