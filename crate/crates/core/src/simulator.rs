//! Statevector simulation of the hardware-efficient ansatz, with exact and
//! shot-sampled expectation values and a sampled swap test.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Deref;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::rng::SeedStream;

/// Statevector qubit cap (2³⁰ amplitudes is 16 GiB already).
pub const MAX_SIM_QUBITS: usize = 30;

/// Smallest `|⟨φ|S|φ⟩|` accepted as a Rayleigh-quotient denominator.
pub const DENOMINATOR_GUARD: f64 = 1e-8;

const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wraps amplitudes that are already normalized.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Dimension(format!("amplitude count {len} is not a power of two ≥ 2")));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_qubits(n_qubits)?;
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::Validity(format!("state has squared norm {norm2}, expected 1")));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Amplitude encoding of a real vector; the vector is normalized first.
    pub fn from_real_normalized(x: &[f64]) -> Result<Self> {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Validity("cannot encode the zero vector".into()));
        }
        Self::from_amplitudes(x.iter().map(|v| Complex64::new(v / norm, 0.0)).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Statevector) -> Result<Complex64> {
        self.check_same(other.n_qubits)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Multiplies every amplitude by `e^{iφ}`.
    pub fn with_global_phase(&self, phi: f64) -> Statevector {
        let ph = Complex64::from_polar(1.0, phi);
        Statevector {
            n_qubits: self.n_qubits,
            amps: self.amps.iter().map(|a| a * ph).collect(),
        }
    }

    fn check_same(&self, n: usize) -> Result<()> {
        if self.n_qubits != n {
            return Err(Error::Dimension(format!(
                "state has {} qubits, operand has {n}",
                self.n_qubits
            )));
        }
        Ok(())
    }

    #[inline]
    fn bit(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    /// Applies a 2×2 unitary `[[a, b], [c, d]]` to `qubit`.
    fn apply_1q(&mut self, qubit: usize, u: [[Complex64; 2]; 2]) {
        let bit = self.bit(qubit);
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | bit];
                self.amps[i] = u[0][0] * a0 + u[0][1] * a1;
                self.amps[i | bit] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
    }

    /// `Ry(θ) = exp(−iθY/2)`.
    pub fn apply_ry(&mut self, qubit: usize, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        let (c, s) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
        self.apply_1q(qubit, [[c, -s], [s, c]]);
    }

    /// `Rz(θ) = exp(−iθZ/2)`.
    pub fn apply_rz(&mut self, qubit: usize, theta: f64) {
        let bit = self.bit(qubit);
        let m = Complex64::from_polar(1.0, -theta / 2.0);
        let p = Complex64::from_polar(1.0, theta / 2.0);
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= if i & bit == 0 { m } else { p };
        }
    }

    pub fn apply_h(&mut self, qubit: usize) {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        self.apply_1q(qubit, [[h, h], [h, -h]]);
    }

    /// `S† = diag(1, −i)`.
    pub fn apply_sdg(&mut self, qubit: usize) {
        let bit = self.bit(qubit);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & bit != 0 {
                *a *= Complex64::new(0.0, -1.0);
            }
        }
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) {
        let mask = self.bit(a) | self.bit(b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
    }

    /// `⟨ψ|σ|ψ⟩` for a single Pauli string (real for any state).
    pub fn expectation_string(&self, s: &PauliString) -> f64 {
        let (x, z) = s.masks();
        let x = x as usize;
        let z = z as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, amp) in self.amps.iter().enumerate() {
            let sign = if (b & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc += self.amps[b ^ x].conj() * amp * sign;
        }
        let phase = match s.y_count() % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        (acc * phase).re
    }

    /// Born-rule probabilities over computational basis states.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// CSV dump: `index,re,im` per line with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,re,im\n");
        for (i, a) in self.amps.iter().enumerate() {
            out.push_str(&format!("{i},{},{}\n", a.re, a.im));
        }
        out
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Dimension("statevector needs at least one qubit".into()));
    }
    if n > MAX_SIM_QUBITS {
        return Err(Error::Capacity {
            what: "statevector qubits",
            got: n,
            cap: MAX_SIM_QUBITS,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RotationKind {
    /// One `Ry` per qubit per layer.
    RyOnly,
    /// `Rz · Ry` per qubit per layer.
    RzRy,
}

impl RotationKind {
    pub fn params_per_qubit(self) -> usize {
        match self {
            RotationKind::RyOnly => 1,
            RotationKind::RzRy => 2,
        }
    }
}

/// Hardware-efficient ansatz: a rotation layer, then `layers` repetitions of
/// (CZ entangler, rotation layer).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    n_qubits: usize,
    layers: usize,
    rotation: RotationKind,
    entangler: Vec<(usize, usize)>,
}

impl AnsatzSpec {
    pub fn new(
        n_qubits: usize,
        layers: usize,
        rotation: RotationKind,
        entangler: Vec<(usize, usize)>,
    ) -> Result<Self> {
        check_qubits(n_qubits)?;
        for (k, &(a, b)) in entangler.iter().enumerate() {
            if a == b || a >= n_qubits || b >= n_qubits {
                return Err(Error::Validity(format!(
                    "entangler pair ({a}, {b}) invalid for {n_qubits} qubits"
                )));
            }
            let norm = (a.min(b), a.max(b));
            if entangler[..k].iter().any(|&(c, d)| (c.min(d), c.max(d)) == norm) {
                return Err(Error::Validity(format!("entangler pair ({a}, {b}) repeated")));
            }
        }
        Ok(Self {
            n_qubits,
            layers,
            rotation,
            entangler,
        })
    }

    /// CZ on `(0,1), (1,2), …, (n−2,n−1)`.
    pub fn chain(n_qubits: usize, layers: usize, rotation: RotationKind) -> Result<Self> {
        let entangler = (0..n_qubits.saturating_sub(1)).map(|q| (q, q + 1)).collect();
        Self::new(n_qubits, layers, rotation, entangler)
    }

    /// The 5-qubit, single-repetition `Ry` circuit used for the benchmarks
    /// (10 parameters).
    pub fn benchmark() -> Self {
        Self::chain(5, 1, RotationKind::RyOnly).expect("static ansatz")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn rotation(&self) -> RotationKind {
        self.rotation
    }

    pub fn entangler(&self) -> &[(usize, usize)] {
        &self.entangler
    }

    pub fn param_count(&self) -> usize {
        self.rotation.params_per_qubit() * self.n_qubits * (self.layers + 1)
    }
}

/// Circuit parameters in radians. Layer `t` occupies a contiguous block;
/// for `RzRy` the block holds the `n` Ry angles followed by the `n` Rz angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamVector(Vec<f64>);

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ParamVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for ParamVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Runs the ansatz on `|0…0⟩`.
pub fn prepare_state(spec: &AnsatzSpec, theta: &[f64]) -> Result<Statevector> {
    if theta.len() != spec.param_count() {
        return Err(Error::Dimension(format!(
            "ansatz takes {} parameters, got {}",
            spec.param_count(),
            theta.len()
        )));
    }
    let n = spec.n_qubits;
    let per_layer = spec.rotation.params_per_qubit() * n;
    let mut psi = Statevector::zero(n)?;
    for (t, block) in theta.chunks(per_layer).enumerate() {
        if t > 0 {
            for &(a, b) in &spec.entangler {
                psi.apply_cz(a, b);
            }
        }
        for q in 0..n {
            psi.apply_ry(q, block[q]);
        }
        if spec.rotation == RotationKind::RzRy {
            for q in 0..n {
                psi.apply_rz(q, block[n + q]);
            }
        }
    }
    Ok(psi)
}

fn check_observable(state: &Statevector, h: &PauliSum) -> Result<()> {
    state.check_same(h.n_qubits())?;
    if !h.is_hermitian() {
        return Err(Error::Validity(format!(
            "observable has complex coefficients (max imaginary part {:e})",
            h.max_imag()
        )));
    }
    Ok(())
}

/// `⟨φ|H|φ⟩` summed term by term without sampling.
pub fn expectation_exact(state: &Statevector, h: &PauliSum) -> Result<f64> {
    check_observable(state, h)?;
    Ok(h.terms()
        .iter()
        .map(|t| t.coefficient.re * state.expectation_string(&t.string))
        .sum())
}

/// Shot-sampled `⟨φ|H|φ⟩`. Each non-identity term is measured
/// `shots_per_term` times in its eigenbasis (basis change to a Z-product,
/// then a binomial draw of the parity outcomes); term `m` draws from stream `("qee", m)`.
pub fn expectation_sampled(
    state: &Statevector,
    h: &PauliSum,
    shots_per_term: u64,
    seeds: &SeedStream,
) -> Result<f64> {
    check_observable(state, h)?;
    if shots_per_term == 0 {
        return Err(Error::Validity("shots_per_term must be ≥ 1".into()));
    }
    let mut total = 0.0;
    for (m, t) in h.terms().iter().enumerate() {
        let c = t.coefficient.re;
        if t.string.is_identity() {
            total += c;
            continue;
        }
        let mut rng = seeds.rng("qee", m as u64);
        total += c * sample_pauli_mean(state, &t.string, shots_per_term, &mut rng);
    }
    Ok(total)
}

/// Measures a single Pauli string `shots` times and returns the mean ±1
/// outcome.
pub fn sample_pauli_mean<R: Rng>(state: &Statevector, s: &PauliString, shots: u64, rng: &mut R) -> f64 {
    let mut rotated = state.clone();
    let mut support = 0usize;
    for (q, &p) in s.letters().iter().enumerate() {
        match p {
            Pauli::I => continue,
            Pauli::X => rotated.apply_h(q),
            Pauli::Y => {
                rotated.apply_sdg(q);
                rotated.apply_h(q);
            }
            Pauli::Z => {}
        }
        support |= rotated.bit(q);
    }
    // the parity outcome is Bernoulli in p(+1), so the count of +1 shots
    // is binomial
    let (mut even, mut total) = (0.0, 0.0);
    for (idx, p) in rotated.probabilities().into_iter().enumerate() {
        total += p;
        if (idx & support).count_ones() % 2 == 0 {
            even += p;
        }
    }
    let p_even = (even / total).clamp(0.0, 1.0);
    let plus = Binomial::new(shots, p_even).map_or(0, |b| b.sample(rng)) as f64;
    (2.0 * plus - shots as f64) / shots as f64
}

/// Standard error of [`expectation_sampled`] at this state:
/// `sqrt(Σ_m h_m² (1 − ⟨σ_m⟩²) / shots)` over non-identity terms.
pub fn sampled_std_error(state: &Statevector, h: &PauliSum, shots_per_term: u64) -> Result<f64> {
    check_observable(state, h)?;
    let var: f64 = h
        .terms()
        .iter()
        .filter(|t| !t.string.is_identity())
        .map(|t| {
            let e = state.expectation_string(&t.string);
            t.coefficient.re.powi(2) * (1.0 - e * e).max(0.0)
        })
        .sum();
    Ok((var / shots_per_term as f64).sqrt())
}

/// State-independent upper bound on the standard error:
/// `sqrt(Σ_m h_m² / shots)` over non-identity terms.
pub fn worst_case_std_error(h: &PauliSum, shots_per_term: u64) -> f64 {
    let var: f64 = h
        .terms()
        .iter()
        .filter(|t| !t.string.is_identity())
        .map(|t| t.coefficient.norm_sqr())
        .sum();
    (var / shots_per_term as f64).sqrt()
}

/// How expectations are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectationMode {
    Exact,
    Sampled { shots: u64, seeds: SeedStream },
}

impl ExpectationMode {
    pub fn is_exact(&self) -> bool {
        matches!(self, ExpectationMode::Exact)
    }

    /// Expectation of `h` under this mode; sampled draws use the
    /// sub-stream named `label`.
    pub fn expectation(&self, state: &Statevector, h: &PauliSum, label: &str) -> Result<f64> {
        match self {
            ExpectationMode::Exact => expectation_exact(state, h),
            ExpectationMode::Sampled { shots, seeds } => {
                expectation_sampled(state, h, *shots, &seeds.derive(label))
            }
        }
    }
}

/// `⟨φ|G|φ⟩ / ⟨φ|S|φ⟩`.
pub fn rayleigh_quotient(state: &Statevector, g: &PauliSum, s: &PauliSum, mode: ExpectationMode) -> Result<f64> {
    let num = mode.expectation(state, g, "G")?;
    let den = mode.expectation(state, s, "S")?;
    guarded_ratio(num, den)
}

pub(crate) fn guarded_ratio(num: f64, den: f64) -> Result<f64> {
    if !(den.abs() >= DENOMINATOR_GUARD) {
        return Err(Error::DegenerateDenominator {
            value: den,
            guard: DENOMINATOR_GUARD,
        });
    }
    Ok(num / den)
}

/// Estimates `|⟨x|y⟩|²` from `shots` simulated swap-test outcomes. The
/// ancilla reads 0 with probability `(1 + |⟨x|y⟩|²)/2`.
pub fn swap_test_sample(x: &Statevector, y: &Statevector, shots: u64, seeds: &SeedStream) -> Result<f64> {
    if shots == 0 {
        return Err(Error::Validity("swap test needs at least one shot".into()));
    }
    let overlap = x.inner(y)?.norm_sqr().min(1.0);
    let p = 0.5 * (1.0 + overlap);
    let mut rng = seeds.rng("swap", 0);
    let hits = (0..shots).filter(|_| rng.random::<f64>() < p).count();
    let p_hat = hits as f64 / shots as f64;
    Ok((2.0 * p_hat - 1.0).clamp(0.0, 1.0))
}

/// `∂⟨H⟩/∂θ_k` for every parameter via the two-term shift rule. Valid for
/// both rotation kinds since every gate is `exp(−iθP/2)` with a Pauli `P`.
pub fn parameter_shift_gradient(spec: &AnsatzSpec, theta: &[f64], h: &PauliSum) -> Result<Vec<f64>> {
    let shift = std::f64::consts::FRAC_PI_2;
    let mut work = theta.to_vec();
    let mut grad = Vec::with_capacity(theta.len());
    for k in 0..theta.len() {
        work[k] = theta[k] + shift;
        let plus = expectation_exact(&prepare_state(spec, &work)?, h)?;
        work[k] = theta[k] - shift;
        let minus = expectation_exact(&prepare_state(spec, &work)?, h)?;
        work[k] = theta[k];
        grad.push(0.5 * (plus - minus));
    }
    Ok(grad)
}
