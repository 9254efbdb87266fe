//! Seeded synthetic datasets used by the CLI and the benchmarks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::manifold::Dataset;
use crate::oracle::{CMatrix, HermitianMatrix};
use crate::rng::SeedStream;

/// `m` points `c + t·u` on a line in `dim` dimensions, `t` evenly spaced in
/// `[−1, 1]`, no noise. Returns the data and the parameters `t`.
pub fn line(m: usize, dim: usize, seed: u64) -> Result<(Dataset, Vec<f64>)> {
    let mut rng = SeedStream::new(seed).rng("line", 0);
    let u: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
    let c: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let t: Vec<f64> = (0..m)
        .map(|i| if m == 1 { 0.0 } else { -1.0 + 2.0 * i as f64 / (m - 1) as f64 })
        .collect();
    let x = DMatrix::from_fn(dim, m, |r, j| c[r] + t[j] * u[r]);
    Ok((Dataset::new(x, None)?, t))
}

/// Two isotropic Gaussian blobs in `dim` dimensions, labels 1 and 2,
/// centers `±separation/2` along the first axis. Classes alternate so any
/// prefix is balanced.
pub fn two_blobs(per_class: usize, dim: usize, separation: f64, sigma: f64, seed: u64, split: &str) -> Result<Dataset> {
    let mut rng = SeedStream::new(seed).rng(split, 0);
    let m = 2 * per_class;
    let labels: Vec<i64> = (0..m).map(|j| 1 + (j % 2) as i64).collect();
    let mut x = DMatrix::zeros(dim, m);
    for j in 0..m {
        for r in 0..dim {
            let z: f64 = StandardNormal.sample(&mut rng);
            x[(r, j)] = sigma * z;
        }
        x[(0, j)] += if labels[j] == 1 { -0.5 * separation } else { 0.5 * separation };
    }
    Dataset::new(x, Some(labels))
}

/// The seeded train/test pair used for the LDE benchmark: `D = 8`,
/// 100 training and 100 test points.
pub fn two_blob_benchmark(seed: u64) -> Result<(Dataset, Dataset)> {
    Ok((
        two_blobs(50, 8, 4.0, 0.5, seed, "train")?,
        two_blobs(50, 8, 4.0, 0.5, seed, "test")?,
    ))
}

/// Random Hermitian pencil on `n_qubits`: `G` with Gaussian entries, and
/// `S = I + E` where `E` is Hermitian with Frobenius norm `perturbation`.
/// `perturbation < 1` keeps `S` positive definite.
pub fn random_pencil(n_qubits: usize, perturbation: f64, seed: u64) -> Result<(HermitianMatrix, HermitianMatrix)> {
    let dim = 1usize << n_qubits;
    let mut rng = SeedStream::new(seed).rng("pencil", 0);
    let draw = |rng: &mut rand_chacha::ChaCha20Rng| {
        let a = CMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(StandardNormal.sample(&mut *rng), StandardNormal.sample(&mut *rng))
        });
        (&a + a.adjoint()).scale(0.5)
    };
    let g = draw(&mut rng).scale(1.0 / (dim as f64).sqrt());
    let e = draw(&mut rng);
    let e = e.scale(perturbation / e.norm());
    Ok((HermitianMatrix::new(g)?, HermitianMatrix::new(CMatrix::identity(dim, dim) + e)?))
}
