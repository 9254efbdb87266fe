//! Variational generalized eigensolver.
//!
//! The pipeline is: bracket the spectrum by minimizing and maximizing the
//! Rayleigh quotient `⟨G⟩/⟨S⟩`, sweep the shift `τ` across that bracket while
//! minimizing a shifted cost whose minimum touches zero exactly at a
//! generalized eigenvalue, then refine every detected dip into an eigenpair.
//!
//! Two cost families exist:
//!
//! * [`CostFamily::ShiftSquare`]: `⟨(G − τS)²⟩ / ⟨S²⟩`. For a generalized
//!   eigenstate with eigenvalue `λ` this equals `(λ − τ)²` for any pencil, and
//!   its minimum over states is zero iff `τ` is an eigenvalue.
//! * [`CostFamily::ShiftRatio`]: `(⟨G − τS⟩ / ⟨S⟩)²`, i.e. `(R − τ)²` with
//!   `R` the Rayleigh quotient. It also equals `(λ − τ)²` on eigenstates, but
//!   it vanishes on every state whose quotient equals `τ`, so its minimum is
//!   zero across the whole bracket. It is used to read an eigenvalue off a
//!   fixed state, never as a scan objective by default.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::{gradient_descent, nelder_mead, GradientDescentOptions, Minimum, NelderMeadOptions};
use crate::oracle::{self, CMatrix, HermitianMatrix};
use crate::pauli::{self, PauliSum, DENSE_QUBIT_CAP};
use crate::rng::SeedStream;
use crate::simulator::{
    guarded_ratio, prepare_state, AnsatzSpec, ExpectationMode, ParamVector, Statevector,
};

/// Coefficient tolerance for deciding whether `G` and `S` commute.
pub const COMMUTE_TOL: f64 = 1e-10;

/// Detection threshold for exact expectations.
pub const EXACT_DETECTION_THRESHOLD: f64 = 1e-4;

/// Largest register for which a dense copy of an observable is cached.
const DENSE_CACHE_QUBITS: usize = 8;

/// A Pauli sum plus, when it has more terms than basis states, its dense
/// matrix for fast exact expectations.
#[derive(Debug, Clone)]
pub struct Observable {
    sum: PauliSum,
    dense: Option<CMatrix>,
}

impl Observable {
    pub fn new(sum: PauliSum) -> Self {
        let n = sum.n_qubits();
        let dense = if n <= DENSE_CACHE_QUBITS && sum.len() > (1usize << n) && sum.is_hermitian() {
            sum.to_matrix().ok()
        } else {
            None
        };
        Self { sum, dense }
    }

    pub fn sum(&self) -> &PauliSum {
        &self.sum
    }

    pub fn expectation(&self, state: &Statevector, mode: ExpectationMode, label: &str) -> Result<f64> {
        match (&self.dense, mode) {
            (Some(m), ExpectationMode::Exact) if state.n_qubits() == self.sum.n_qubits() => {
                let psi = state.amplitudes();
                let dim = psi.len();
                let data = m.as_slice();
                let mut acc = 0.0;
                for (j, pj) in psi.iter().enumerate() {
                    let col = &data[j * dim..(j + 1) * dim];
                    let mut c = num_complex::Complex64::new(0.0, 0.0);
                    for (pi, mij) in psi.iter().zip(col) {
                        c += pi.conj() * mij;
                    }
                    acc += (c * pj).re;
                }
                Ok(acc)
            }
            _ => mode.expectation(state, &self.sum, label),
        }
    }
}

/// A Hermitian pencil `(G, S)` with `S` positive definite.
#[derive(Debug, Clone)]
pub struct MatrixPencil {
    g: PauliSum,
    s: PauliSum,
    g_obs: Observable,
    s_obs: Observable,
    commuting: bool,
    dense: Option<(HermitianMatrix, HermitianMatrix)>,
    lambda_min_s: Option<f64>,
}

impl MatrixPencil {
    /// Validates the pencil. For `n ≤` [`DENSE_QUBIT_CAP`] the dense `S` is
    /// checked to be positive definite and its smallest eigenvalue cached.
    pub fn new(g: PauliSum, s: PauliSum) -> Result<Self> {
        if g.n_qubits() != s.n_qubits() {
            return Err(Error::Dimension(format!(
                "G acts on {} qubits, S on {}",
                g.n_qubits(),
                s.n_qubits()
            )));
        }
        for (name, p) in [("G", &g), ("S", &s)] {
            if !p.is_hermitian() {
                return Err(Error::Validity(format!(
                    "{name} has complex coefficients (max imaginary part {:e})",
                    p.max_imag()
                )));
            }
        }
        let g = pauli::real_part(&g.simplify(pauli::DEFAULT_DROP_TOL));
        let s = pauli::real_part(&s.simplify(pauli::DEFAULT_DROP_TOL));
        let commuting = pauli::commutes(&g, &s, COMMUTE_TOL)?;
        let (dense, lambda_min_s) = if g.n_qubits() <= DENSE_QUBIT_CAP {
            let dg = pauli::dense_from_pauli(&g)?;
            let ds = pauli::dense_from_pauli(&s)?;
            oracle::cholesky(&ds)?;
            let lmin = oracle::hermitian_eig(&ds)?.values[0];
            if !(lmin > 0.0) {
                return Err(Error::NotPositiveDefinite { pivot: 0, value: lmin });
            }
            (Some((dg, ds)), Some(lmin))
        } else {
            (None, None)
        };
        Ok(Self {
            g_obs: Observable::new(g.clone()),
            s_obs: Observable::new(s.clone()),
            g,
            s,
            commuting,
            dense,
            lambda_min_s,
        })
    }

    /// Builds a pencil from dense Hermitian `2ⁿ×2ⁿ` matrices.
    pub fn from_dense(g: &HermitianMatrix, s: &HermitianMatrix) -> Result<Self> {
        Self::new(pauli::pauli_from_dense(g)?, pauli::pauli_from_dense(s)?)
    }

    pub fn g(&self) -> &PauliSum {
        &self.g
    }

    pub fn s(&self) -> &PauliSum {
        &self.s
    }

    pub fn n_qubits(&self) -> usize {
        self.g.n_qubits()
    }

    pub fn commuting(&self) -> bool {
        self.commuting
    }

    pub fn dense(&self) -> Option<&(HermitianMatrix, HermitianMatrix)> {
        self.dense.as_ref()
    }

    /// Smallest eigenvalue of `S`, when the dense form is available.
    pub fn lambda_min_s(&self) -> Option<f64> {
        self.lambda_min_s
    }

    /// Cost family for reading eigenvalues off states: `ShiftSquare` for
    /// commuting pencils, `ShiftRatio` otherwise.
    pub fn cost_family(&self) -> CostFamily {
        if self.commuting {
            CostFamily::ShiftSquare
        } else {
            CostFamily::ShiftRatio
        }
    }

    /// `‖G v − λ S v‖₂` for a state, if the dense form is available.
    pub fn residual(&self, lambda: f64, state: &Statevector) -> Option<f64> {
        self.dense
            .as_ref()
            .map(|(g, s)| oracle::pencil_residual(g.matrix(), s.matrix(), lambda, state.amplitudes()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostFamily {
    /// `⟨(G − τS)²⟩ / ⟨S²⟩`.
    ShiftSquare,
    /// `(⟨G − τS⟩ / ⟨S⟩)²`.
    ShiftRatio,
}

/// Objective minimized at each grid point of the scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanCost {
    /// `ShiftSquare` for every pencil.
    Auto,
    /// Force one family. `ShiftRatio` is degenerate as a scan objective and
    /// is offered for comparison.
    Family(CostFamily),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    NelderMead,
    ParameterShiftGradientDescent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub method: Method,
    pub restarts: usize,
    pub max_iters: usize,
    pub f_tol: f64,
    /// Initial simplex edge (Nelder–Mead) in radians.
    pub initial_step: f64,
    /// Initial step for gradient descent.
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            method: Method::NelderMead,
            restarts: 8,
            max_iters: 2000,
            f_tol: 1e-9,
            initial_step: 0.5,
            learning_rate: 0.2,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Validity("restarts must be ≥ 1".into()));
        }
        if !(self.f_tol > 0.0) || !(self.initial_step > 0.0) || !(self.learning_rate > 0.0) {
            return Err(Error::Validity("optimizer tolerances and step sizes must be > 0".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Validity("max_iters must be ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub grid_points: usize,
    pub warm_start: bool,
    /// With warm starts, sweep the grid in both directions and keep the
    /// lower cost per point.
    pub bidirectional: bool,
    /// Random starts per grid point in addition to the warm start.
    pub extra_starts: usize,
    /// Overrides the mode-dependent detection threshold.
    pub detection_threshold: Option<f64>,
    pub cost: ScanCost,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            grid_points: 1000,
            warm_start: true,
            bidirectional: true,
            extra_starts: 0,
            detection_threshold: None,
            cost: ScanCost::Auto,
        }
    }
}

/// Full solver configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VqgeConfig {
    pub optimizer: OptimizerConfig,
    pub scan: ScanConfig,
    /// Shots per Pauli term; 0 selects exact expectations.
    pub shots: u64,
}

impl Default for VqgeConfig {
    fn default() -> Self {
        Self {
            optimizer: OptimizerConfig::default(),
            scan: ScanConfig::default(),
            shots: 0,
        }
    }
}

impl VqgeConfig {
    pub fn seeds(&self) -> SeedStream {
        SeedStream::new(self.optimizer.seed)
    }

    pub fn mode(&self) -> ExpectationMode {
        if self.shots == 0 {
            ExpectationMode::Exact
        } else {
            ExpectationMode::Sampled {
                shots: self.shots,
                seeds: self.seeds().derive("qee"),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Min,
    Max,
}

/// Extremal Rayleigh quotient over the ansatz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub value: f64,
    pub theta: ParamVector,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub theta_min: ParamVector,
    pub theta_max: ParamVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenEigenpair {
    pub eigenvalue: f64,
    pub theta: ParamVector,
    pub state: Statevector,
    /// `‖G v − λ S v‖₂` against the dense pencil, when available.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub tau_grid: Vec<f64>,
    pub min_cost: Vec<f64>,
    pub theta_opt_per_tau: Vec<ParamVector>,
    /// Grid indices of detected dips.
    pub detected_indices: Vec<usize>,
    pub detected: Vec<GenEigenpair>,
    pub threshold: f64,
    pub cost: CostFamily,
}

impl ScanResult {
    /// `tau,min_cost` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau,min_cost\n");
        for (t, c) in self.tau_grid.iter().zip(&self.min_cost) {
            out.push_str(&format!("{t},{c}\n"));
        }
        out
    }

    pub fn grid_step(&self) -> f64 {
        if self.tau_grid.len() < 2 {
            0.0
        } else {
            self.tau_grid[1] - self.tau_grid[0]
        }
    }
}

/// Per-τ Hamiltonians for one cost family.
#[derive(Debug, Clone)]
pub struct ShiftedCost {
    pub family: CostFamily,
    pub tau: f64,
    numerator: Observable,
    denominator: Observable,
}

impl ShiftedCost {
    pub fn new(pencil: &MatrixPencil, family: CostFamily, tau: f64) -> Result<Self> {
        let (numerator, denominator) = match family {
            CostFamily::ShiftSquare => pauli::shift_square_pencil(&pencil.g, &pencil.s, tau)?,
            CostFamily::ShiftRatio => (
                pauli::real_part(&pauli::shift_pencil(&pencil.g, &pencil.s, tau)?),
                pencil.s.clone(),
            ),
        };
        Ok(Self {
            family,
            tau,
            numerator: Observable::new(numerator),
            denominator: Observable::new(denominator),
        })
    }

    pub fn numerator(&self) -> &PauliSum {
        self.numerator.sum()
    }

    pub fn denominator(&self) -> &PauliSum {
        self.denominator.sum()
    }

    /// Cost at a prepared state.
    pub fn eval(&self, state: &Statevector, mode: ExpectationMode) -> Result<f64> {
        let num = self.numerator.expectation(state, mode, "num")?;
        let den = self.denominator.expectation(state, mode, "den")?;
        let ratio = guarded_ratio(num, den)?;
        Ok(match self.family {
            // ⟨(G−τS)²⟩ is nonnegative; sampling noise can push it below zero
            CostFamily::ShiftSquare => ratio.max(0.0),
            CostFamily::ShiftRatio => ratio * ratio,
        })
    }
}

/// What a single local minimization optimizes.
#[derive(Debug, Clone)]
enum Objective<'p> {
    Rayleigh { pencil: &'p MatrixPencil, sign: f64 },
    Shifted(ShiftedCost),
}

impl Objective<'_> {
    fn value(&self, state: &Statevector, mode: ExpectationMode) -> Result<f64> {
        match self {
            Objective::Rayleigh { pencil, sign } => {
                let g = pencil.g_obs.expectation(state, mode, "G")?;
                let s = pencil.s_obs.expectation(state, mode, "S")?;
                Ok(sign * guarded_ratio(g, s)?)
            }
            Objective::Shifted(c) => c.eval(state, mode),
        }
    }

    /// `(numerator, denominator)` observables and how they combine, for
    /// parameter-shift gradients.
    fn parts(&self) -> (&Observable, &Observable) {
        match self {
            Objective::Rayleigh { pencil, .. } => (&pencil.g_obs, &pencil.s_obs),
            Objective::Shifted(c) => (&c.numerator, &c.denominator),
        }
    }

    fn combine_gradient(&self, n: f64, d: f64, dn: &[f64], dd: &[f64]) -> Vec<f64> {
        let q: Vec<f64> = dn.iter().zip(dd).map(|(a, b)| (a * d - n * b) / (d * d)).collect();
        match self {
            Objective::Rayleigh { sign, .. } => q.into_iter().map(|v| sign * v).collect(),
            Objective::Shifted(c) => match c.family {
                CostFamily::ShiftSquare => q,
                CostFamily::ShiftRatio => {
                    let r = n / d;
                    q.into_iter().map(|v| 2.0 * r * v).collect()
                }
            },
        }
    }
}

/// The solver bound to one pencil, ansatz and configuration.
#[derive(Debug, Clone)]
pub struct Vqge<'a> {
    pencil: &'a MatrixPencil,
    spec: &'a AnsatzSpec,
    cfg: VqgeConfig,
}

impl<'a> Vqge<'a> {
    pub fn new(pencil: &'a MatrixPencil, spec: &'a AnsatzSpec, cfg: VqgeConfig) -> Result<Self> {
        cfg.optimizer.validate()?;
        if spec.n_qubits() != pencil.n_qubits() {
            return Err(Error::Dimension(format!(
                "ansatz has {} qubits, pencil has {}",
                spec.n_qubits(),
                pencil.n_qubits()
            )));
        }
        if cfg.scan.grid_points < 2 {
            return Err(Error::Validity("scan needs at least 2 grid points".into()));
        }
        Ok(Self { pencil, spec, cfg })
    }

    pub fn config(&self) -> &VqgeConfig {
        &self.cfg
    }

    fn mode(&self) -> ExpectationMode {
        self.cfg.mode()
    }

    /// Mode for a particular optimizer run; sampled runs get their own stream.
    fn run_mode(&self, label: &str) -> ExpectationMode {
        match self.mode() {
            ExpectationMode::Exact => ExpectationMode::Exact,
            ExpectationMode::Sampled { shots, seeds } => ExpectationMode::Sampled {
                shots,
                seeds: seeds.derive(label),
            },
        }
    }

    fn random_theta(&self, label: &str, index: u64) -> Vec<f64> {
        use rand::Rng;
        let mut rng = self.cfg.seeds().rng(label, index);
        (0..self.spec.param_count())
            .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect()
    }

    /// One local minimization from `x0`.
    fn local_min(&self, objective: &Objective<'_>, x0: &[f64], run_label: &str) -> Minimum {
        let base = self.run_mode(run_label);
        let mut counter = 0u64;
        let mut f = |x: &[f64]| -> f64 {
            counter += 1;
            let mode = fork_mode(base, counter);
            prepare_state(self.spec, x)
                .and_then(|psi| objective.value(&psi, mode))
                .unwrap_or(f64::INFINITY)
        };
        let o = &self.cfg.optimizer;
        match o.method {
            Method::NelderMead => nelder_mead(
                &mut f,
                x0,
                &NelderMeadOptions {
                    max_iters: o.max_iters,
                    f_tol: o.f_tol,
                    initial_step: o.initial_step,
                    ..NelderMeadOptions::default()
                },
            ),
            Method::ParameterShiftGradientDescent => {
                let mut gcount = 0u64;
                let fg = |x: &[f64]| -> (f64, Vec<f64>) {
                    gcount += 1;
                    let mode = fork_mode(base, u64::MAX - gcount);
                    self.value_and_gradient(objective, x, mode)
                        .unwrap_or((f64::INFINITY, vec![0.0; x.len()]))
                };
                gradient_descent(
                    f,
                    fg,
                    x0,
                    &GradientDescentOptions {
                        max_iters: o.max_iters,
                        f_tol: o.f_tol,
                        learning_rate: o.learning_rate,
                    },
                )
            }
        }
    }

    fn value_and_gradient(&self, objective: &Objective<'_>, x: &[f64], mode: ExpectationMode) -> Result<(f64, Vec<f64>)> {
        let (num_obs, den_obs) = objective.parts();
        let psi = prepare_state(self.spec, x)?;
        let value = objective.value(&psi, mode)?;
        let n = num_obs.expectation(&psi, mode, "num")?;
        let d = den_obs.expectation(&psi, mode, "den")?;
        let shift = std::f64::consts::FRAC_PI_2;
        let mut work = x.to_vec();
        let mut dn = Vec::with_capacity(x.len());
        let mut dd = Vec::with_capacity(x.len());
        for k in 0..x.len() {
            work[k] = x[k] + shift;
            let plus = prepare_state(self.spec, &work)?;
            work[k] = x[k] - shift;
            let minus = prepare_state(self.spec, &work)?;
            work[k] = x[k];
            let m = fork_mode(mode, k as u64 + 1);
            dn.push(0.5 * (num_obs.expectation(&plus, m, "n+")? - num_obs.expectation(&minus, m, "n-")?));
            dd.push(0.5 * (den_obs.expectation(&plus, m, "d+")? - den_obs.expectation(&minus, m, "d-")?));
        }
        guarded_ratio(n, d)?;
        Ok((value, objective.combine_gradient(n, d, &dn, &dd)))
    }

    /// Runs every start, returning the best (ties to the lowest start index).
    fn best_of(&self, objective: &Objective<'_>, starts: &[Vec<f64>], label: &str) -> Minimum {
        let results: Vec<Minimum> = starts
            .par_iter()
            .enumerate()
            .map(|(k, x0)| self.local_min(objective, x0, &format!("{label}/{k}")))
            .collect();
        results
            .into_iter()
            .enumerate()
            .min_by(|(i, a), (j, b)| a.f.total_cmp(&b.f).then(i.cmp(j)))
            .map(|(_, m)| m)
            .expect("at least one start")
    }

    /// Extremal Rayleigh quotient over `restarts` random initializations.
    pub fn minimize_rayleigh(&self, direction: Direction) -> Result<Extremum> {
        let sign = match direction {
            Direction::Min => 1.0,
            Direction::Max => -1.0,
        };
        let label = match direction {
            Direction::Min => "rayleigh-min",
            Direction::Max => "rayleigh-max",
        };
        let starts: Vec<Vec<f64>> = (0..self.cfg.optimizer.restarts as u64)
            .map(|k| self.random_theta(label, k))
            .collect();
        let objective = Objective::Rayleigh {
            pencil: self.pencil,
            sign,
        };
        let best = self.best_of(&objective, &starts, label);
        if !best.f.is_finite() {
            return Err(Error::DegenerateDenominator {
                value: 0.0,
                guard: crate::simulator::DENOMINATOR_GUARD,
            });
        }
        Ok(Extremum {
            value: sign * best.f,
            theta: best.x.into(),
            converged: best.converged,
        })
    }

    /// `[λ_min, λ_max]` from the two extremal quotients.
    pub fn estimate_interval(&self) -> Result<Interval> {
        let lo = self.minimize_rayleigh(Direction::Min)?;
        let hi = self.minimize_rayleigh(Direction::Max)?;
        let (lo, hi) = if lo.value <= hi.value { (lo, hi) } else { (hi, lo) };
        Ok(Interval {
            lambda_min: lo.value,
            lambda_max: hi.value,
            theta_min: lo.theta,
            theta_max: hi.theta,
        })
    }

    /// Cost of the pencil's own family at `(θ, τ)`.
    pub fn cost_at(&self, theta: &[f64], tau: f64) -> Result<f64> {
        self.cost_with(self.pencil.cost_family(), theta, tau)
    }

    pub fn cost_with(&self, family: CostFamily, theta: &[f64], tau: f64) -> Result<f64> {
        let psi = prepare_state(self.spec, theta)?;
        ShiftedCost::new(self.pencil, family, tau)?.eval(&psi, self.mode())
    }

    fn scan_family(&self) -> CostFamily {
        match self.cfg.scan.cost {
            ScanCost::Auto => CostFamily::ShiftSquare,
            ScanCost::Family(f) => f,
        }
    }

    /// Detection threshold for the configured expectation mode, never below
    /// `step²` so that a dip falling between grid points is still caught.
    pub fn detection_threshold(&self, step: f64) -> f64 {
        if let Some(t) = self.cfg.scan.detection_threshold {
            return t;
        }
        let base = if self.cfg.shots == 0 {
            EXACT_DETECTION_THRESHOLD
        } else {
            let delta = crate::simulator::worst_case_std_error(&self.pencil.g, self.cfg.shots)
                .max(crate::simulator::worst_case_std_error(&self.pencil.s, self.cfg.shots));
            EXACT_DETECTION_THRESHOLD.max(9.0 * delta * delta)
        };
        base.max(step * step)
    }

    /// `δ/λ_min(S)` under sampling, `0` when exact or when `λ_min(S)` is
    /// unknown. Eigenvalues closer than this are not told apart.
    pub fn noise_resolution(&self) -> f64 {
        if self.cfg.shots == 0 {
            return 0.0;
        }
        let delta = crate::simulator::worst_case_std_error(&self.pencil.g, self.cfg.shots)
            .max(crate::simulator::worst_case_std_error(&self.pencil.s, self.cfg.shots));
        self.pencil
            .lambda_min_s
            .and_then(|l| measurement_error_bound(delta, l).ok())
            .unwrap_or(0.0)
    }

    /// Sweeps `τ` uniformly over the interval, minimizing the scan cost at
    /// each point, and refines every detected dip.
    pub fn tau_scan(&self, interval: &Interval) -> Result<ScanResult> {
        let points = self.cfg.scan.grid_points;
        let family = self.scan_family();
        let lo = interval.lambda_min;
        let hi = interval.lambda_max;
        let step = (hi - lo) / (points - 1) as f64;
        let tau_grid: Vec<f64> = (0..points).map(|i| lo + step * i as f64).collect();

        let solve_point = |i: usize, warm: Option<&[f64]>, pass: &str| -> Result<Minimum> {
            let objective = Objective::Shifted(ShiftedCost::new(self.pencil, family, tau_grid[i])?);
            let mut starts = Vec::new();
            let random = match warm {
                Some(w) => {
                    starts.push(w.to_vec());
                    if i == 0 || i == points - 1 {
                        starts.push(interval.theta_min.to_vec());
                        starts.push(interval.theta_max.to_vec());
                    }
                    self.cfg.scan.extra_starts
                }
                None => {
                    starts.push(interval.theta_min.to_vec());
                    starts.push(interval.theta_max.to_vec());
                    self.cfg.optimizer.restarts
                }
            };
            for k in 0..random as u64 {
                starts.push(self.random_theta(&format!("{pass}-start"), (i as u64) << 16 | k));
            }
            Ok(self.best_of(&objective, &starts, &format!("{pass}/{i}")))
        };

        let minima: Vec<Minimum> = if self.cfg.scan.warm_start {
            let mut forward: Vec<Minimum> = Vec::with_capacity(points);
            for i in 0..points {
                let warm = forward.last().map(|m| m.x.as_slice());
                forward.push(solve_point(i, warm, "scan")?);
            }
            if self.cfg.scan.bidirectional {
                // a forward sweep can stay on the branch it just left; the
                // reverse sweep approaches every eigenvalue from the other side
                let mut backward: Vec<Minimum> = Vec::with_capacity(points);
                for i in (0..points).rev() {
                    let warm = backward.last().map(|m| m.x.as_slice());
                    backward.push(solve_point(i, warm, "scan-back")?);
                }
                backward.reverse();
                forward
                    .into_iter()
                    .zip(backward)
                    .map(|(f, b)| if b.f < f.f { b } else { f })
                    .collect()
            } else {
                forward
            }
        } else {
            (0..points)
                .into_par_iter()
                .map(|i| solve_point(i, None, "scan"))
                .collect::<Result<Vec<_>>>()?
        };

        let min_cost: Vec<f64> = minima.iter().map(|m| m.f.max(0.0)).collect();
        let theta_opt_per_tau: Vec<ParamVector> = minima.into_iter().map(|m| m.x.into()).collect();
        let threshold = self.detection_threshold(step);
        let detected_indices = detect_minima(&min_cost, threshold, 2);

        let mut detected = Vec::with_capacity(detected_indices.len());
        for &i in &detected_indices {
            detected.push(self.refine_eigenvalue(tau_grid[i], &theta_opt_per_tau[i], step.max(1e-6))?);
        }
        Ok(ScanResult {
            tau_grid,
            min_cost,
            theta_opt_per_tau,
            detected_indices,
            detected,
            threshold,
            cost: family,
        })
    }

    /// Turns a scan dip `(τ*, θ*)` into an eigenpair.
    ///
    /// The pencil's cost family is `(λ − τ)²` on eigenstates, so
    /// `λ ≈ τ* ± √cost` with the sign taken toward the side where the cost at
    /// fixed `θ*` drops. The state is then re-minimized under the
    /// `ShiftSquare` cost at that `λ`, and the final eigenvalue is the
    /// Rayleigh quotient of the polished state.
    pub fn refine_eigenvalue(&self, tau_star: f64, theta_star: &[f64], delta_tau: f64) -> Result<GenEigenpair> {
        let family = self.pencil.cost_family();
        let c0 = self.cost_with(family, theta_star, tau_star)?;
        let cm = self.cost_with(family, theta_star, tau_star - delta_tau)?;
        let cp = self.cost_with(family, theta_star, tau_star + delta_tau)?;
        let guess = invert_quadratic_cost(tau_star, c0, cm, cp);

        let objective = Objective::Shifted(ShiftedCost::new(self.pencil, CostFamily::ShiftSquare, guess)?);
        let polished = self.local_min(&objective, theta_star, &format!("refine/{tau_star}"));
        let theta = if polished.f.is_finite() {
            polished.x
        } else {
            theta_star.to_vec()
        };
        let state = prepare_state(self.spec, &theta)?;
        let mode = fork_mode(self.run_mode("refine-readout"), tau_star.to_bits());
        let eigenvalue = crate::simulator::rayleigh_quotient(&state, &self.pencil.g, &self.pencil.s, mode)?;
        let residual = self.pencil.residual(eigenvalue, &state);
        Ok(GenEigenpair {
            eigenvalue,
            theta: theta.into(),
            state,
            residual,
        })
    }

    /// Interval, scan, refinement; one pair per distinct eigenvalue, ascending.
    pub fn solve_all(&self) -> Result<Solution> {
        let interval = self.estimate_interval()?;
        let scan = self.tau_scan(&interval)?;
        let mut pairs: Vec<GenEigenpair> = Vec::new();
        // the bracket endpoints are eigenstates in their own right
        for theta in [&interval.theta_min, &interval.theta_max] {
            let state = prepare_state(self.spec, theta)?;
            let mode = fork_mode(self.run_mode("endpoint-readout"), pairs.len() as u64);
            let eigenvalue = crate::simulator::rayleigh_quotient(&state, &self.pencil.g, &self.pencil.s, mode)?;
            let residual = self.pencil.residual(eigenvalue, &state);
            pairs.push(GenEigenpair {
                eigenvalue,
                theta: theta.clone(),
                state,
                residual,
            });
        }
        pairs.extend(scan.detected.iter().cloned());
        let merge_tol = (2.0 * scan.grid_step()).max(1e-6).max(self.noise_resolution());
        let eigenpairs = dedupe_pairs(pairs, merge_tol);
        Ok(Solution {
            interval,
            scan,
            eigenpairs,
        })
    }
}

/// Output of [`Vqge::solve_all`].
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub interval: Interval,
    pub scan: ScanResult,
    pub eigenpairs: Vec<GenEigenpair>,
}

impl Solution {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigenpairs.iter().map(|p| p.eigenvalue).collect()
    }
}

fn fork_mode(mode: ExpectationMode, index: u64) -> ExpectationMode {
    match mode {
        ExpectationMode::Exact => ExpectationMode::Exact,
        ExpectationMode::Sampled { shots, seeds } => ExpectationMode::Sampled {
            shots,
            seeds: seeds.fork(index),
        },
    }
}

/// Sorts by eigenvalue and keeps one pair per cluster, a cluster spanning
/// less than `tol` from its lowest value. The smallest residual wins (or the
/// first, without residuals).
fn dedupe_pairs(mut pairs: Vec<GenEigenpair>, tol: f64) -> Vec<GenEigenpair> {
    pairs.sort_by(|a, b| a.eigenvalue.total_cmp(&b.eigenvalue));
    let mut out: Vec<GenEigenpair> = Vec::new();
    let mut anchor = f64::NEG_INFINITY;
    for p in pairs {
        match out.last_mut() {
            Some(last) if p.eigenvalue - anchor < tol => {
                let better = match (p.residual, last.residual) {
                    (Some(a), Some(b)) => a < b,
                    _ => false,
                };
                if better {
                    *last = p;
                }
            }
            _ => {
                anchor = p.eigenvalue;
                out.push(p);
            }
        }
    }
    out
}

/// `τ* ± √cost`, taking `+` when the cost falls toward `τ* + δτ`.
pub fn invert_quadratic_cost(tau_star: f64, cost: f64, cost_minus: f64, cost_plus: f64) -> f64 {
    let root = cost.max(0.0).sqrt();
    if cost_plus < cost_minus {
        tau_star + root
    } else {
        tau_star - root
    }
}

/// Indices of local minima of `curve` lying below `threshold`. Endpoints
/// count when not above their single neighbour; on flat stretches the first
/// index wins. Minima within `merge_steps` grid steps collapse to the lower.
pub fn detect_minima(curve: &[f64], threshold: f64, merge_steps: usize) -> Vec<usize> {
    let n = curve.len();
    let mut found: Vec<usize> = Vec::new();
    for i in 0..n {
        let c = curve[i];
        if !(c < threshold) {
            continue;
        }
        let left_ok = i == 0 || c < curve[i - 1];
        let right_ok = i + 1 == n || c <= curve[i + 1];
        if left_ok && right_ok {
            found.push(i);
        }
    }
    let mut merged: Vec<usize> = Vec::new();
    for i in found {
        match merged.last_mut() {
            Some(last) if i - *last <= merge_steps => {
                if curve[i] < curve[*last] {
                    *last = i;
                }
            }
            _ => merged.push(i),
        }
    }
    merged
}

/// Upper bound `δ / λ_min(S)` on the eigenvalue error caused by an
/// expectation-value error `δ`.
pub fn measurement_error_bound(delta: f64, lambda_min_s: f64) -> Result<f64> {
    if !(lambda_min_s > 0.0) {
        return Err(Error::Domain(format!(
            "smallest eigenvalue of S must be positive, got {lambda_min_s}"
        )));
    }
    if !(delta >= 0.0) {
        return Err(Error::Domain(format!("delta must be nonnegative, got {delta}")));
    }
    Ok(delta / lambda_min_s)
}
