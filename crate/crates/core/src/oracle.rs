//! Dense Hermitian linear algebra used as the reference solver.
//!
//! Everything here is deliberately plain: Cholesky without pivoting, cyclic
//! complex Jacobi for the standard problem, and the textbook reduction
//! `L⁻¹ G L⁻† u = λ u`, `v = L⁻† u` for the generalized one. The variational
//! solver is checked against these results, so nothing in this module calls
//! into the variational code path.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum off-diagonal Hermiticity residue accepted at construction.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Largest dimension the oracle will accept.
pub const MAX_DIM: usize = 4096;

/// Sweep cap for cyclic Jacobi.
pub const JACOBI_MAX_SWEEPS: usize = 100;

pub type CMatrix = DMatrix<Complex64>;

/// A square complex matrix validated to be Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    entries: CMatrix,
    residue: f64,
}

impl HermitianMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, expected square",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let residue = hermiticity_residue(&entries);
        if residue >= HERMITIAN_TOL {
            return Err(Error::Validity(format!(
                "matrix is not Hermitian (max |H - H^+| = {residue:e})"
            )));
        }
        Ok(Self { entries, residue })
    }

    pub fn from_real(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
            residue: 0.0,
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(*d, 0.0);
        }
        Self {
            entries: m,
            residue: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn residue(&self) -> f64 {
        self.residue
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.entries)
    }

    /// Real part, for matrices known to be real symmetric.
    pub fn real_part(&self) -> DMatrix<f64> {
        self.entries.map(|z| z.re)
    }

    pub fn scaled(&self, c: f64) -> HermitianMatrix {
        HermitianMatrix {
            entries: self.entries.map(|z| z * c),
            residue: self.residue * c.abs(),
        }
    }
}

pub fn hermiticity_residue(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Lower-triangular Cholesky factor `L` with `L L† = S`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangular(CMatrix);

impl LowerTriangular {
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Solves `L x = b` by forward substitution, column by column.
    pub fn solve_lower(&self, b: &CMatrix) -> CMatrix {
        let l = &self.0;
        let n = l.nrows();
        let mut x = b.clone();
        for col in 0..x.ncols() {
            for i in 0..n {
                let mut acc = x[(i, col)];
                for k in 0..i {
                    acc -= l[(i, k)] * x[(k, col)];
                }
                x[(i, col)] = acc / l[(i, i)];
            }
        }
        x
    }

    /// Solves `L† x = b` by back substitution.
    pub fn solve_upper_adjoint(&self, b: &CMatrix) -> CMatrix {
        let l = &self.0;
        let n = l.nrows();
        let mut x = b.clone();
        for col in 0..x.ncols() {
            for i in (0..n).rev() {
                let mut acc = x[(i, col)];
                for k in i + 1..n {
                    // (L†)[i][k] = conj(L[k][i])
                    acc -= l[(k, i)].conj() * x[(k, col)];
                }
                x[(i, col)] = acc / l[(i, i)].conj();
            }
        }
        x
    }
}

pub fn cholesky(s: &HermitianMatrix) -> Result<LowerTriangular> {
    let n = s.dim();
    check_dim(n)?;
    let a = s.matrix();
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let ljj = d.sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut acc = a[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc / ljj;
        }
    }
    Ok(LowerTriangular(l))
}

/// Eigenvalues (ascending) paired with eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k).iter().copied().collect()
    }

    /// Distinct eigenvalues, clustering values closer than `gap`.
    pub fn distinct_values(&self, gap: f64) -> Vec<f64> {
        distinct_values(&self.values, gap)
    }
}

/// Collapses a sorted list into cluster representatives (cluster mean),
/// chaining values whose consecutive gap is below `gap`.
pub fn distinct_values(sorted: &[f64], gap: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    let mut cluster: Vec<f64> = Vec::new();
    for &v in sorted {
        if let Some(&last) = cluster.last() {
            if v - last >= gap {
                out.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
                cluster.clear();
            }
        }
        cluster.push(v);
    }
    if !cluster.is_empty() {
        out.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
    }
    out
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
pub fn hermitian_eig(h: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = h.dim();
    check_dim(n)?;
    let mut a = h.matrix().clone();
    // symmetrize away the (sub-tolerance) residue so rotations stay exact
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let z = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    let mut v = CMatrix::identity(n, n);
    let scale = frobenius(&a).max(f64::MIN_POSITIVE);

    let mut converged = n <= 1;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > 1e-15 * scale {
        return Err(Error::Numerical(format!(
            "Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(EigenDecomposition { values, vectors })
}

/// Zeroes `a[p][q]` with the unitary `G = diag(1, e^{-iα}) · R(θ)` acting on
/// the `(p, q)` plane, accumulating `G` into `v`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if b < 1e-300 {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = (apq / b).conj(); // e^{-iα}
    // small-angle branch, |θ| ≤ π/4
    let theta = 0.5 * (2.0 * b / (aqq - app)).atan();
    let (s, c) = theta.sin_cos();
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = phase * (-s);
    let g_qq = phase * c;

    let n = a.nrows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn check_dim(n: usize) -> Result<()> {
    if n > MAX_DIM {
        return Err(Error::Capacity {
            what: "oracle matrix dimension",
            got: n,
            cap: MAX_DIM,
        });
    }
    Ok(())
}

/// Solves `G v = λ S v` for Hermitian `G` and positive definite `S`.
///
/// Eigenvectors are returned S-orthonormal: `v_i† S v_j = δ_ij`.
pub fn generalized_eig(g: &HermitianMatrix, s: &HermitianMatrix) -> Result<EigenDecomposition> {
    if g.dim() != s.dim() {
        return Err(Error::Dimension(format!(
            "pencil sides differ: {} vs {}",
            g.dim(),
            s.dim()
        )));
    }
    let l = cholesky(s)?;
    // C = L⁻¹ G L⁻†, computed as L⁻¹ (L⁻¹ G)†  since G is Hermitian
    let y = l.solve_lower(g.matrix());
    let c = l.solve_lower(&y.adjoint());
    let c = HermitianMatrix::new(symmetrize(&c))?;
    let std = hermitian_eig(&c)?;
    let vectors = l.solve_upper_adjoint(&std.vectors);
    Ok(EigenDecomposition {
        values: std.values,
        vectors,
    })
}

fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// `‖G v − λ S v‖₂`.
pub fn pencil_residual(g: &CMatrix, s: &CMatrix, lambda: f64, v: &[Complex64]) -> f64 {
    let v = nalgebra::DVector::from_column_slice(v);
    let r = g * &v - (s * &v) * Complex64::new(lambda, 0.0);
    r.norm()
}

/// Parses one complex token in the `a+bi` family: `1.5`, `-2i`, `0.5-0.25i`,
/// `1e-3+2E2i`, `i`, `-i`.
pub fn parse_complex(token: &str) -> Option<Complex64> {
    let t = token.trim();
    if t.is_empty() {
        return None;
    }
    if let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) {
        // find the split between real and imaginary parts
        let bytes = body.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            let ch = bytes[idx];
            if (ch == b'+' || ch == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
                split = Some(idx);
                break;
            }
        }
        let (re, im) = match split {
            Some(idx) => (&body[..idx], &body[idx..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            s => s.parse::<f64>().ok()?,
        };
        Some(Complex64::new(re.parse::<f64>().ok()?, im))
    } else {
        t.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0))
    }
}

pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Reads a dense matrix: one row per line, comma-separated `a+bi` tokens.
/// Blank lines and lines starting with `#` are skipped.
pub fn read_dense_csv(text: &str) -> Result<CMatrix> {
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|tok| {
                parse_complex(tok).ok_or_else(|| Error::Parse {
                    line: lineno + 1,
                    msg: format!("bad complex entry {:?}", tok.trim()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("row has {} entries, expected {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "empty matrix".into(),
        });
    }
    let ncols = rows[0].len();
    Ok(CMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

pub fn write_dense_csv(m: &CMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_complex(m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
