//! Local discriminant embedding: within/between-class neighbor graphs, the
//! `(T_b, T_w)` pencil and nearest-neighbor classification in the embedding.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{
    default_ridge, dissimilarity_matrix, local_weights, nearest, solve_real_pencil, symmetrize, Dataset, Metric,
    NeighborGraph, Pick, Projection, Solver, WeightMatrix, DEFAULT_REG,
};
use crate::oracle::HermitianMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGraphs {
    pub within: NeighborGraph,
    pub between: NeighborGraph,
}

fn require_labels(data: &Dataset) -> Result<&[i64]> {
    data.labels()
        .ok_or_else(|| Error::Validity("dataset has no labels".into()))
}

pub fn class_graphs(data: &Dataset, k: usize, k_prime: usize, metric: Metric) -> Result<ClassGraphs> {
    let labels = require_labels(data)?;
    if k == 0 || k_prime == 0 {
        return Err(Error::Validity("K and K′ must be ≥ 1".into()));
    }
    let m = data.len();
    let mut classes: Vec<i64> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    for &c in &classes {
        let size = labels.iter().filter(|&&l| l == c).count();
        if size <= k {
            return Err(Error::Validity(format!("class {c} has {size} points, needs more than K = {k}")));
        }
        if m - size < k_prime {
            return Err(Error::Validity(format!(
                "class {c} has {} points outside it, needs at least K′ = {k_prime}",
                m - size
            )));
        }
    }
    let dis = dissimilarity_matrix(data, metric)?;
    let mut within = Vec::with_capacity(m);
    let mut between = Vec::with_capacity(m);
    for i in 0..m {
        let same: Vec<usize> = (0..m).filter(|&j| labels[j] == labels[i]).collect();
        let other: Vec<usize> = (0..m).filter(|&j| labels[j] != labels[i]).collect();
        within.push(nearest(&dis, i, &same, k));
        between.push(nearest(&dis, i, &other, k_prime));
    }
    Ok(ClassGraphs {
        within: NeighborGraph { k, neighbors: within },
        between: NeighborGraph { k: k_prime, neighbors: between },
    })
}

pub fn lde_weights(data: &Dataset, graphs: &ClassGraphs, reg: f64) -> Result<(WeightMatrix, WeightMatrix)> {
    Ok((
        local_weights(data, &graphs.within, reg)?,
        local_weights(data, &graphs.between, reg)?,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LdePencil {
    pub t_w: HermitianMatrix,
    pub t_b: HermitianMatrix,
}

/// `X(I − W̄)Xᵀ` with `W̄ = (W + Wᵀ)/2` and `I` the diagonal of its row sums.
pub fn scatter(data: &Dataset, w: &WeightMatrix) -> Result<DMatrix<f64>> {
    let m = data.len();
    if w.0.nrows() != m || w.0.ncols() != m {
        return Err(Error::Dimension(format!("weights are {}×{}, dataset has {m} points", w.0.nrows(), w.0.ncols())));
    }
    let ws = symmetrize(&w.0);
    let mut l = -ws.clone();
    for (i, r) in ws.row_iter().enumerate() {
        l[(i, i)] += r.sum();
    }
    let x = data.x();
    Ok(symmetrize(&(x * l * x.transpose())))
}

/// `(T_w + ridge·I, T_b)`; `ridge = None` picks the default relative ridge.
pub fn lde_pencil(data: &Dataset, w_w: &WeightMatrix, w_b: &WeightMatrix, ridge: Option<f64>) -> Result<LdePencil> {
    let mut t_w = scatter(data, w_w)?;
    let t_b = scatter(data, w_b)?;
    let r = ridge.unwrap_or_else(|| default_ridge(&t_w));
    for i in 0..t_w.nrows() {
        t_w[(i, i)] += r;
    }
    Ok(LdePencil {
        t_w: HermitianMatrix::from_real(&t_w)?,
        t_b: HermitianMatrix::from_real(&t_b)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdeParams {
    pub k: usize,
    pub k_prime: usize,
    pub d: usize,
    pub metric: Metric,
    pub reg: f64,
    pub ridge: Option<f64>,
}

impl LdeParams {
    pub fn new(k: usize, k_prime: usize, d: usize) -> Self {
        Self {
            k,
            k_prime,
            d,
            metric: Metric::Euclidean,
            reg: DEFAULT_REG,
            ridge: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LdeFit {
    pub graphs: ClassGraphs,
    pub w_w: WeightMatrix,
    pub w_b: WeightMatrix,
    pub pencil: LdePencil,
    pub projection: Projection,
}

/// Keeps the generalized eigenvectors of the `d` largest distinct
/// eigenvalues of `T_b a = λ T_w a`, descending.
pub fn lde_fit(data: &Dataset, params: &LdeParams, solver: &Solver) -> Result<LdeFit> {
    if params.d == 0 || params.d > data.dim() {
        return Err(Error::Validity(format!("d must satisfy 1 ≤ d ≤ D = {}, got {}", data.dim(), params.d)));
    }
    let graphs = class_graphs(data, params.k, params.k_prime, params.metric)?;
    let (w_w, w_b) = lde_weights(data, &graphs, params.reg)?;
    let pencil = lde_pencil(data, &w_w, &w_b, params.ridge)?;
    let (values, a) = solve_real_pencil(&pencil.t_b, &pencil.t_w, solver, Pick::LargestDistinct(params.d))?;
    Ok(LdeFit {
        graphs,
        w_w,
        w_b,
        pencil,
        projection: Projection::new(a, values)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distance {
    #[default]
    Euclidean,
    /// `√(1 − |⟨u|v⟩|²)` between the normalized embeddings; blind to the
    /// sign of an embedding.
    Trace,
}

impl Distance {
    pub fn between(self, u: &[f64], v: &[f64]) -> f64 {
        match self {
            Distance::Euclidean => u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(),
            Distance::Trace => {
                let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
                let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                let ov = if nu > 0.0 && nv > 0.0 {
                    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
                    (dot / (nu * nv)).powi(2).min(1.0)
                } else {
                    0.0
                };
                (1.0 - ov).sqrt()
            }
        }
    }
}

/// Nearest-neighbor classifier over a fitted projection.
#[derive(Debug, Clone)]
pub struct Classifier {
    projection: Projection,
    embedded: Vec<Vec<f64>>,
    labels: Vec<i64>,
    distance: Distance,
}

impl Classifier {
    pub fn new(projection: Projection, train: &Dataset, distance: Distance) -> Result<Self> {
        let labels = require_labels(train)?.to_vec();
        let y = projection.embed_dataset(train)?;
        let embedded = y.column_iter().map(|c| c.iter().copied().collect()).collect();
        Ok(Self {
            projection,
            embedded,
            labels,
            distance,
        })
    }

    /// Label of the nearest embedded training point, ties to the lower index.
    pub fn classify(&self, x: &[f64]) -> Result<i64> {
        let y = self.projection.embed(x)?;
        let mut best = (f64::INFINITY, 0usize);
        for (i, t) in self.embedded.iter().enumerate() {
            let d = self.distance.between(&y, t);
            if d < best.0 {
                best = (d, i);
            }
        }
        Ok(self.labels[best.1])
    }

    pub fn classify_all(&self, test: &Dataset) -> Result<Vec<i64>> {
        (0..test.len())
            .map(|j| self.classify(test.x().column(j).as_slice()))
            .collect()
    }
}

/// One-shot form of [`Classifier::classify`].
pub fn classify(projection: &Projection, train: &Dataset, test_point: &[f64], distance: Distance) -> Result<i64> {
    Classifier::new(projection.clone(), train, distance)?.classify(test_point)
}

/// Fraction of `predicted` equal to `truth`.
pub fn accuracy(predicted: &[i64], truth: &[i64]) -> Result<f64> {
    if predicted.len() != truth.len() || truth.is_empty() {
        return Err(Error::Dimension(format!("{} predictions for {} labels", predicted.len(), truth.len())));
    }
    let hits = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / truth.len() as f64)
}
