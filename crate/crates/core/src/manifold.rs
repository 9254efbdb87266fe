//! Neighborhood preserving embedding: neighbor graphs, local reconstruction
//! weights, the `(XQXᵀ, XXᵀ)` pencil and the linear projection it yields.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{self, HermitianMatrix};
use crate::rng::SeedStream;
use crate::simulator::{swap_test_sample, AnsatzSpec, RotationKind, Statevector};
use crate::vqge::{MatrixPencil, Vqge, VqgeConfig};

/// Relative Tikhonov weight for local Gram matrices.
pub const DEFAULT_REG: f64 = 1e-3;

/// Relative ridge added to the `S` side of a pencil.
pub const DEFAULT_RIDGE_SCALE: f64 = 1e-8;

/// Gap below which two eigenvalues count as equal.
pub const DISTINCT_GAP: f64 = 1e-6;

/// Points stored as the columns of a `D×M` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: DMatrix<f64>,
    labels: Option<Vec<i64>>,
    normalized: bool,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, labels: Option<Vec<i64>>) -> Result<Self> {
        if x.ncols() < 2 {
            return Err(Error::Validity(format!("need at least 2 points, got {}", x.ncols())));
        }
        if x.nrows() == 0 {
            return Err(Error::Validity("points have dimension 0".into()));
        }
        if let Some(l) = &labels {
            if l.len() != x.ncols() {
                return Err(Error::Dimension(format!("{} labels for {} points", l.len(), x.ncols())));
            }
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validity("non-finite coordinate".into()));
        }
        let normalized = x
            .column_iter()
            .all(|c| (c.norm() - 1.0).abs() < 1e-10);
        Ok(Self { x, labels, normalized })
    }

    /// One point per row.
    pub fn from_rows(rows: &[Vec<f64>], labels: Option<Vec<i64>>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Dimension("rows have different lengths".into()));
        }
        let x = DMatrix::from_fn(d, rows.len(), |i, j| rows[j][i]);
        Self::new(x, labels)
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.x.nrows()
    }

    pub fn len(&self) -> usize {
        self.x.ncols()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn point(&self, i: usize) -> DVector<f64> {
        self.x.column(i).into_owned()
    }

    /// Scales every column to unit norm.
    pub fn normalize(&self) -> Result<Self> {
        let mut x = self.x.clone();
        for (j, mut c) in x.column_iter_mut().enumerate() {
            let n = c.norm();
            if n == 0.0 {
                return Err(Error::Validity(format!("point {j} is the zero vector")));
            }
            c /= n;
        }
        Self::new(x, self.labels.clone())
    }

    /// Parses CSV with one point per row. With `has_labels` the final column
    /// is an integer label.
    pub fn read_csv(text: &str, has_header: bool, has_labels: bool) -> Result<Self> {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || (has_header && idx == 0) {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let (coords, label) = if has_labels {
                let (last, rest) = fields.split_last().ok_or(Error::Parse {
                    line: idx + 1,
                    msg: "empty row".into(),
                })?;
                let label = last.parse::<i64>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("label '{last}' is not an integer"),
                })?;
                (rest, Some(label))
            } else {
                (&fields[..], None)
            };
            let mut row = Vec::with_capacity(coords.len());
            for f in coords {
                row.push(f.parse::<f64>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("'{f}' is not a number"),
                })?);
            }
            rows.push(row);
            if let Some(l) = label {
                labels.push(l);
            }
        }
        Self::from_rows(&rows, has_labels.then_some(labels))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for j in 0..self.len() {
            let mut fields: Vec<String> = self.x.column(j).iter().map(|v| v.to_string()).collect();
            if let Some(l) = &self.labels {
                fields.push(l[j].to_string());
            }
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Metric {
    Euclidean,
    /// Swap-test estimates of `|⟨x_i|x_j⟩|²`; needs unit columns and `D = 2ⁿ`.
    Overlap { shots: u64, seed: u64 },
}

/// `K` neighbors per point, nearest first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborGraph {
    pub k: usize,
    pub neighbors: Vec<Vec<usize>>,
}

/// Pairwise dissimilarities: Euclidean distance, or `1 − overlap` estimates
/// drawn once per unordered pair.
pub fn dissimilarity_matrix(data: &Dataset, metric: Metric) -> Result<DMatrix<f64>> {
    let m = data.len();
    match metric {
        Metric::Euclidean => {
            let mut out = DMatrix::zeros(m, m);
            for i in 0..m {
                for j in i + 1..m {
                    let d = (data.x.column(i) - data.x.column(j)).norm();
                    out[(i, j)] = d;
                    out[(j, i)] = d;
                }
            }
            Ok(out)
        }
        Metric::Overlap { shots, seed } => {
            if !data.normalized {
                return Err(Error::Validity("overlap metric needs unit-norm points".into()));
            }
            if !data.dim().is_power_of_two() {
                return Err(Error::Validity(format!(
                    "overlap metric needs a power-of-two dimension, got {}",
                    data.dim()
                )));
            }
            let states: Vec<Statevector> = (0..m)
                .map(|j| Statevector::from_real_normalized(data.x.column(j).as_slice()))
                .collect::<Result<_>>()?;
            let seeds = SeedStream::new(seed).derive("swap-test");
            let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
            let estimates: Vec<f64> = pairs
                .par_iter()
                .enumerate()
                .map(|(p, &(i, j))| swap_test_sample(&states[i], &states[j], shots, &seeds.fork(p as u64)))
                .collect::<Result<_>>()?;
            let mut out = DMatrix::zeros(m, m);
            for (&(i, j), e) in pairs.iter().zip(estimates) {
                out[(i, j)] = 1.0 - e;
                out[(j, i)] = 1.0 - e;
            }
            Ok(out)
        }
    }
}

/// The `k` candidates closest to `i`, ties to the lower index.
pub(crate) fn nearest(dis: &DMatrix<f64>, i: usize, candidates: &[usize], k: usize) -> Vec<usize> {
    let mut c: Vec<usize> = candidates.iter().copied().filter(|&j| j != i).collect();
    c.sort_by(|&a, &b| dis[(i, a)].total_cmp(&dis[(i, b)]).then(a.cmp(&b)));
    c.truncate(k);
    c
}

pub fn knn_graph(data: &Dataset, k: usize, metric: Metric) -> Result<NeighborGraph> {
    let m = data.len();
    if k == 0 || k >= m {
        return Err(Error::Validity(format!("K must satisfy 1 ≤ K < M = {m}, got {k}")));
    }
    let dis = dissimilarity_matrix(data, metric)?;
    let all: Vec<usize> = (0..m).collect();
    let neighbors = (0..m).map(|i| nearest(&dis, i, &all, k)).collect();
    Ok(NeighborGraph { k, neighbors })
}

/// `M×M` reconstruction weights with rows supported on the neighbor sets.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix(pub DMatrix<f64>);

impl WeightMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.0.row_iter().map(|r| r.sum()).collect()
    }
}

/// Solves `min ‖x_i − Σ_j w_j x_j‖²` subject to `Σ_j w_j = 1` per point.
pub fn local_weights(data: &Dataset, graph: &NeighborGraph, reg: f64) -> Result<WeightMatrix> {
    let m = data.len();
    if graph.neighbors.len() != m {
        return Err(Error::Dimension(format!(
            "graph has {} rows, dataset has {m} points",
            graph.neighbors.len()
        )));
    }
    if graph.neighbors.iter().flatten().any(|&j| j >= m) {
        return Err(Error::Validity("neighbor index out of range".into()));
    }
    let rows: Vec<Vec<(usize, f64)>> = graph
        .neighbors
        .par_iter()
        .enumerate()
        .map(|(i, nb)| point_weights(data, i, nb, reg).map(|w| nb.iter().copied().zip(w).collect()))
        .collect::<Result<_>>()?;
    let mut w = DMatrix::zeros(m, m);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row {
            w[(i, j)] += v;
        }
    }
    Ok(WeightMatrix(w))
}

fn point_weights(data: &Dataset, i: usize, nb: &[usize], reg: f64) -> Result<Vec<f64>> {
    let k = nb.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    let xi = data.x.column(i);
    let a = DMatrix::from_fn(data.dim(), k, |r, c| xi[r] - data.x[(r, nb[c])]);
    let gram = a.transpose() * &a;
    let trace = gram.trace();
    let tikhonov = reg * if trace > 0.0 { trace / k as f64 } else { 1.0 };
    let ones = DVector::from_element(k, 1.0);

    let attempt = |g: DMatrix<f64>| -> Option<DVector<f64>> {
        let w = g.cholesky()?.solve(&ones);
        let s = w.sum();
        (s.is_finite() && s.abs() > 1e-300).then(|| w / s)
    };
    let plain = if k > data.dim() {
        None
    } else {
        attempt(gram.clone())
    };
    plain
        .or_else(|| attempt(&gram + DMatrix::identity(k, k) * tikhonov))
        .or_else(|| constrained_solve(&gram))
        .map(|w| w.iter().copied().collect())
        .ok_or_else(|| Error::Numerical(format!("local Gram matrix of point {i} is singular after regularization")))
}

/// `min wᵀGw` subject to `Σw = 1` through the bordered system
/// `[G 1; 1ᵀ 0]`, which stays solvable when `G` itself is singular.
fn constrained_solve(gram: &DMatrix<f64>) -> Option<DVector<f64>> {
    let k = gram.nrows();
    let mut kkt = DMatrix::zeros(k + 1, k + 1);
    kkt.view_mut((0, 0), (k, k)).copy_from(gram);
    for i in 0..k {
        kkt[(i, k)] = 1.0;
        kkt[(k, i)] = 1.0;
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = kkt.full_piv_lu().solve(&rhs)?;
    let w = sol.rows(0, k).into_owned();
    w.iter().all(|v| v.is_finite()).then_some(w)
}

/// `Q = (I − W)ᵀ(I − W)`.
pub fn build_q(w: &WeightMatrix) -> HermitianMatrix {
    let m = w.0.nrows();
    let iw = DMatrix::identity(m, m) - &w.0;
    let q = iw.transpose() * iw;
    HermitianMatrix::from_real(&symmetrize(&q)).expect("symmetric by construction")
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Default ridge `1e-8 · tr(S)/D`.
pub fn default_ridge(s: &DMatrix<f64>) -> f64 {
    let d = s.nrows().max(1) as f64;
    let r = DEFAULT_RIDGE_SCALE * s.trace() / d;
    if r > 0.0 {
        r
    } else {
        DEFAULT_RIDGE_SCALE
    }
}

/// `(XQXᵀ, XXᵀ + ridge·I)`; `ridge = None` picks [`default_ridge`].
pub fn npe_pencil(data: &Dataset, q: &HermitianMatrix, ridge: Option<f64>) -> Result<(HermitianMatrix, HermitianMatrix)> {
    if q.dim() != data.len() {
        return Err(Error::Dimension(format!("Q is {}×{}, dataset has {} points", q.dim(), q.dim(), data.len())));
    }
    let x = &data.x;
    let g = symmetrize(&(x * q.real_part() * x.transpose()));
    let mut s = symmetrize(&(x * x.transpose()));
    let r = ridge.unwrap_or_else(|| default_ridge(&s));
    for i in 0..s.nrows() {
        s[(i, i)] += r;
    }
    Ok((HermitianMatrix::from_real(&g)?, HermitianMatrix::from_real(&s)?))
}

/// How a real symmetric pencil is diagonalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Solver {
    Oracle,
    Vqge { spec: AnsatzSpec, config: VqgeConfig },
}

impl Solver {
    /// VQGE on an `Ry`/`Rz` chain ansatz for a `D = 2ⁿ` pencil.
    pub fn vqge_for_dim(dim: usize, layers: usize, config: VqgeConfig) -> Result<Self> {
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::Dimension(format!("vqge solver needs a power-of-two dimension ≥ 2, got {dim}")));
        }
        Ok(Solver::Vqge {
            spec: AnsatzSpec::chain(dim.trailing_zeros() as usize, layers, RotationKind::RzRy)?,
            config,
        })
    }
}

/// Which end of the spectrum to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Pick {
    /// The `d` smallest eigenvalues, ascending, with multiplicity.
    Smallest(usize),
    /// The `d` largest distinct eigenvalues, descending.
    LargestDistinct(usize),
}

/// `d` eigenpairs of a real symmetric pencil, as `(values, D×d vectors)`,
/// each vector `S`-normalized with its largest entry positive.
pub(crate) fn solve_real_pencil(
    g: &HermitianMatrix,
    s: &HermitianMatrix,
    solver: &Solver,
    pick: Pick,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let dim = g.dim();
    let want = match pick {
        Pick::Smallest(d) | Pick::LargestDistinct(d) => d,
    };
    if want > dim {
        return Err(Error::Validity(format!("asked for {want} eigenvectors of a {dim}×{dim} pencil")));
    }
    let s_real = s.real_part();
    let (values, vectors): (Vec<f64>, Vec<DVector<f64>>) = match solver {
        Solver::Oracle => {
            let eig = oracle::generalized_eig(g, s)?;
            let vec_of = |k: usize| DVector::from_iterator(dim, eig.vector(k).iter().map(|z| z.re));
            let idx: Vec<usize> = match pick {
                Pick::Smallest(d) => (0..d).collect(),
                Pick::LargestDistinct(d) => {
                    let reps = distinct_representatives(&eig.values, DISTINCT_GAP);
                    if reps.len() < d {
                        return Err(Error::Validity(format!(
                            "pencil has {} distinct eigenvalues, {d} requested",
                            reps.len()
                        )));
                    }
                    reps.into_iter().rev().take(d).collect()
                }
            };
            idx.into_iter().map(|k| (eig.values[k], vec_of(k))).unzip()
        }
        Solver::Vqge { spec, config } => {
            if !dim.is_power_of_two() || dim < 2 {
                return Err(Error::Dimension(format!("vqge solver needs a power-of-two dimension ≥ 2, got {dim}")));
            }
            // a common positive scale leaves the eigenvalues unchanged
            let c = s.max_abs();
            let pencil = MatrixPencil::from_dense(&g.scaled(1.0 / c), &s.scaled(1.0 / c))?;
            let solution = Vqge::new(&pencil, spec, *config)?.solve_all()?;
            let pairs = solution.eigenpairs;
            let count = pairs.len();
            let chosen: Vec<_> = match pick {
                Pick::Smallest(d) => pairs.into_iter().take(d).collect(),
                Pick::LargestDistinct(d) => pairs.into_iter().rev().take(d).collect(),
            };
            if chosen.len() < want {
                return Err(Error::Validity(format!(
                    "vqge found {count} distinct eigenvalues, {want} requested; a repeated eigenvalue yields one vector"
                )));
            }
            chosen
                .into_iter()
                .map(|p| {
                    let amps = p.state.amplitudes();
                    let pivot = amps
                        .iter()
                        .copied()
                        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                        .unwrap_or_default();
                    let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { 1.0.into() };
                    (p.eigenvalue, DVector::from_iterator(dim, amps.iter().map(|z| (z * phase).re)))
                })
                .unzip()
        }
    };
    let mut a = DMatrix::zeros(dim, vectors.len());
    for (k, v) in vectors.into_iter().enumerate() {
        let norm = (v.transpose() * &s_real * &v)[(0, 0)].sqrt();
        let mut v = if norm > 0.0 { v / norm } else { v };
        let lead = v.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(0.0);
        if lead < 0.0 {
            v = -v;
        }
        a.set_column(k, &v);
    }
    Ok((values, a))
}

/// First index of each cluster of ascending values separated by more than `gap`.
fn distinct_representatives(sorted: &[f64], gap: f64) -> Vec<usize> {
    let mut reps = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for (k, &v) in sorted.iter().enumerate() {
        if v - last > gap {
            reps.push(k);
        }
        last = v;
    }
    reps
}

/// Linear map `y = Aᵀx` with the generalized eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub a: DMatrix<f64>,
    pub eigenvalues: Vec<f64>,
}

impl Projection {
    pub fn new(a: DMatrix<f64>, eigenvalues: Vec<f64>) -> Result<Self> {
        if a.ncols() != eigenvalues.len() {
            return Err(Error::Dimension(format!(
                "{} columns, {} eigenvalues",
                a.ncols(),
                eigenvalues.len()
            )));
        }
        if a.ncols() > a.nrows() {
            return Err(Error::Validity(format!("d = {} exceeds D = {}", a.ncols(), a.nrows())));
        }
        Ok(Self { a, eigenvalues })
    }

    pub fn input_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn output_dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn embed(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::Dimension(format!("point has length {}, projection expects {}", x.len(), self.input_dim())));
        }
        Ok(self
            .a
            .column_iter()
            .map(|c| c.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `AᵀX` as a `d×M` matrix.
    pub fn embed_dataset(&self, data: &Dataset) -> Result<DMatrix<f64>> {
        if data.dim() != self.input_dim() {
            return Err(Error::Dimension(format!("dataset has D = {}, projection expects {}", data.dim(), self.input_dim())));
        }
        Ok(self.a.transpose() * data.x())
    }

    /// `D×d` CSV.
    pub fn to_csv(&self) -> String {
        matrix_to_csv(&self.a)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = parse_real_rows(text)?;
        let d = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || rows.iter().any(|r| r.len() != d) {
            return Err(Error::Dimension("projection rows are empty or ragged".into()));
        }
        let a = DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
        Self::new(a, vec![f64::NAN; d])
    }
}

pub fn matrix_to_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for r in m.row_iter() {
        let fields: Vec<String> = r.iter().map(|v| v.to_string()).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn parse_real_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| {
                f.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("'{}' is not a number", f.trim()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NpeParams {
    pub k: usize,
    pub d: usize,
    pub metric: Metric,
    pub reg: f64,
    pub ridge: Option<f64>,
}

impl NpeParams {
    pub fn new(k: usize, d: usize) -> Self {
        Self {
            k,
            d,
            metric: Metric::Euclidean,
            reg: DEFAULT_REG,
            ridge: None,
        }
    }
}

/// Everything produced while fitting NPE.
#[derive(Debug, Clone)]
pub struct NpeFit {
    pub graph: NeighborGraph,
    pub weights: WeightMatrix,
    pub q: HermitianMatrix,
    pub pencil: (HermitianMatrix, HermitianMatrix),
    pub projection: Projection,
}

pub fn npe_fit(data: &Dataset, params: &NpeParams, solver: &Solver) -> Result<NpeFit> {
    if params.d == 0 || params.d > data.dim() {
        return Err(Error::Validity(format!("d must satisfy 1 ≤ d ≤ D = {}, got {}", data.dim(), params.d)));
    }
    let graph = knn_graph(data, params.k, params.metric)?;
    let weights = local_weights(data, &graph, params.reg)?;
    let q = build_q(&weights);
    let pencil = npe_pencil(data, &q, params.ridge)?;
    let (values, a) = solve_real_pencil(&pencil.0, &pencil.1, solver, Pick::Smallest(params.d))?;
    let projection = Projection::new(a, values)?;
    Ok(NpeFit {
        graph,
        weights,
        q,
        pencil,
        projection,
    })
}

/// `Σ_i ‖y_i − Σ_j W_ij y_j‖²` over the embedded points.
pub fn reconstruction_cost(projection: &Projection, data: &Dataset, w: &WeightMatrix) -> Result<f64> {
    let y = projection.embed_dataset(data)?;
    let r = &y - &y * w.0.transpose();
    Ok(r.norm_squared())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_1d(xs: &[f64]) -> Dataset {
        Dataset::from_rows(&xs.iter().map(|&v| vec![v]).collect::<Vec<_>>(), None).unwrap()
    }

    #[test]
    fn collinear_knn() {
        let g = knn_graph(&line_1d(&[0.0, 1.0, 3.0]), 1, Metric::Euclidean).unwrap();
        assert_eq!(g.neighbors, vec![vec![1], vec![0], vec![1]]);
    }

    #[test]
    fn full_graph_and_ties() {
        let data = line_1d(&[0.0, 1.0, -1.0, 5.0]);
        let g = knn_graph(&data, 3, Metric::Euclidean).unwrap();
        // 1 and 2 tie for point 0; lower index first
        assert_eq!(g.neighbors[0], vec![1, 2, 3]);
        for (i, nb) in g.neighbors.iter().enumerate() {
            assert!(!nb.contains(&i));
            assert_eq!(nb.len(), 3);
        }
        assert!(knn_graph(&data, 0, Metric::Euclidean).is_err());
        assert!(knn_graph(&data, 4, Metric::Euclidean).is_err());
    }

    #[test]
    fn overlap_requires_unit_columns() {
        let data = Dataset::from_rows(&[vec![1.0, 1.0], vec![0.0, 2.0]], None).unwrap();
        let m = Metric::Overlap { shots: 100, seed: 1 };
        assert!(matches!(knn_graph(&data, 1, m), Err(Error::Validity(_))));
        assert!(knn_graph(&data.normalize().unwrap(), 1, m).is_ok());
    }

    #[test]
    fn weight_cases() {
        // K = 1
        let data = line_1d(&[0.0, 1.0, 3.0]);
        let g = knn_graph(&data, 1, Metric::Euclidean).unwrap();
        let w = local_weights(&data, &g, DEFAULT_REG).unwrap();
        assert_eq!(w.0[(2, 1)], 1.0);
        // symmetric midpoint, K > D triggers the ridge but symmetry survives
        let data = line_1d(&[0.0, -1.0, 1.0]);
        let g = NeighborGraph { k: 2, neighbors: vec![vec![1, 2], vec![0, 2], vec![0, 1]] };
        let w = local_weights(&data, &g, DEFAULT_REG).unwrap();
        assert!((w.0[(0, 1)] - 0.5).abs() < 1e-12 && (w.0[(0, 2)] - 0.5).abs() < 1e-12);
        for s in w.row_sums() {
            assert!((s - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn affine_combination_reconstructs_exactly() {
        // x0 = 0.2 x1 + 0.3 x2 + 0.5 x3 in 3-D, K = 3 ≤ D
        let x1 = [1.0, 0.0, 2.0];
        let x2 = [0.0, 3.0, -1.0];
        let x3 = [2.0, 1.0, 1.0];
        let x0: Vec<f64> = (0..3).map(|r| 0.2 * x1[r] + 0.3 * x2[r] + 0.5 * x3[r]).collect();
        let data = Dataset::from_rows(&[x0.clone(), x1.to_vec(), x2.to_vec(), x3.to_vec()], None).unwrap();
        let g = NeighborGraph { k: 3, neighbors: vec![vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3], vec![0, 1, 2]] };
        let w = local_weights(&data, &g, 0.0).unwrap();
        let rec = data.x() * w.0.row(0).transpose();
        let res: f64 = (0..3).map(|r| (rec[r] - x0[r]).powi(2)).sum::<f64>().sqrt();
        assert!(res < 1e-8, "{res}");
    }

    #[test]
    fn q_cases() {
        let zero = WeightMatrix(DMatrix::zeros(3, 3));
        assert_eq!(build_q(&zero).real_part(), DMatrix::identity(3, 3));
        let w = WeightMatrix(DMatrix::from_row_slice(3, 3, &[0.0, 0.4, 0.6, 1.0, 0.0, 0.0, 0.3, 0.7, 0.0]));
        let q = build_q(&w).real_part();
        let ones = DVector::from_element(3, 1.0);
        assert!((&q * ones).amax() < 1e-12);
        let iw = DMatrix::identity(3, 3) - &w.0;
        assert!((q - iw.transpose() * iw).amax() < 1e-12);
    }

    #[test]
    fn identity_q_gives_unit_eigenvalues() {
        let data = Dataset::from_rows(&[vec![1.0, 0.0], vec![0.5, 2.0], vec![-1.0, 1.0]], None).unwrap();
        let q = HermitianMatrix::identity(3);
        let (g, s) = npe_pencil(&data, &q, Some(0.0)).unwrap();
        let eig = oracle::generalized_eig(&g, &s).unwrap();
        for v in eig.values {
            assert!((v - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn rank_deficient_pencil_is_factorizable() {
        let rows = vec![vec![1.0, 2.0, 0.0, 1.0], vec![0.0, 1.0, 1.0, 0.0], vec![2.0, 0.0, 1.0, 1.0]];
        let data = Dataset::from_rows(&rows, None).unwrap();
        let g = knn_graph(&data, 1, Metric::Euclidean).unwrap();
        let q = build_q(&local_weights(&data, &g, DEFAULT_REG).unwrap());
        let (_, s) = npe_pencil(&data, &q, None).unwrap();
        assert!(oracle::cholesky(&s).is_ok());
    }

    #[test]
    fn embed_cases() {
        let a = DMatrix::from_fn(4, 2, |i, j| if i == j { 1.0 } else { 0.0 });
        let p = Projection::new(a, vec![0.0, 0.0]).unwrap();
        assert_eq!(p.embed(&[3.0, 4.0, 5.0, 6.0]).unwrap(), vec![3.0, 4.0]);
        assert_eq!(p.embed(&[0.0; 4]).unwrap(), vec![0.0, 0.0]);
        assert!(matches!(p.embed(&[1.0]), Err(Error::Dimension(_))));
        let a = DMatrix::from_row_slice(2, 1, &[0.5, -2.0]);
        let p = Projection::new(a, vec![1.0]).unwrap();
        assert_eq!(p.embed(&[2.0, 1.0]).unwrap(), vec![-1.0]);
    }

    #[test]
    fn csv_round_trip() {
        let text = "x,y,label\n1.0,2.0,1\n3.5,-1,2\n";
        let d = Dataset::read_csv(text, true, true).unwrap();
        assert_eq!(d.dim(), 2);
        assert_eq!(d.labels(), Some(&[1, 2][..]));
        let back = Dataset::read_csv(&d.to_csv(), false, true).unwrap();
        assert_eq!(back, d);
        assert!(matches!(Dataset::read_csv("1,a\n2,3\n", false, false), Err(Error::Parse { line: 1, .. })));
    }
}
