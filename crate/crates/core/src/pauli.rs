//! Pauli-string algebra.
//!
//! Letter `k` of a string acts on qubit `k`, and qubit 0 is the most
//! significant bit of a computational-basis index, so `XZ` is the Kronecker
//! product `X ⊗ Z` in reading order.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oracle::{CMatrix, HermitianMatrix, HERMITIAN_TOL};

/// Default magnitude below which `simplify` drops a term.
pub const DEFAULT_DROP_TOL: f64 = 1e-12;

/// Qubit cap for conversions to and from dense matrices.
pub const DENSE_QUBIT_CAP: usize = 12;

/// Qubit cap for any Pauli string (bit masks are `u64`).
pub const MAX_QUBITS: usize = 62;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const IM: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn from_bits(b: u8) -> Pauli {
        Pauli::ALL[(b & 3) as usize]
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' | 'i' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// Single-qubit product `self · other = phase · letter`.
    pub fn mul(self, other: Pauli) -> (Complex64, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (ONE, p),
            (a, b) if a == b => (ONE, I),
            (X, Y) | (Y, Z) | (Z, X) => (IM, Pauli::from_bits(self as u8 ^ other as u8)),
            _ => (-IM, Pauli::from_bits(self as u8 ^ other as u8)),
        }
    }

    /// Dense 2×2 matrix.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -IM], [IM, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() || letters.len() > MAX_QUBITS {
            return Err(Error::Dimension(format!(
                "Pauli string length {} outside 1..={MAX_QUBITS}",
                letters.len()
            )));
        }
        Ok(Self { letters })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            letters: vec![Pauli::I; n_qubits],
        }
    }

    /// Identity everywhere except the listed `(qubit, letter)` placements.
    pub fn with_letters(n_qubits: usize, placed: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::new(vec![Pauli::I; n_qubits])?;
        for &(q, p) in placed {
            if q >= n_qubits {
                return Err(Error::Dimension(format!("qubit {q} out of range for {n_qubits} qubits")));
            }
            s.letters[q] = p;
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    /// Bit masks `(x, z)` over basis indices: `x` marks X/Y positions (bit
    /// flips), `z` marks Y/Z positions (sign flips).
    pub fn masks(&self) -> (u64, u64) {
        let n = self.letters.len();
        let mut x = 0u64;
        let mut z = 0u64;
        for (q, p) in self.letters.iter().enumerate() {
            let bit = 1u64 << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => x |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit
                }
                Pauli::Z => z |= bit,
            }
        }
        (x, z)
    }

    pub fn y_count(&self) -> usize {
        self.letters.iter().filter(|&&p| p == Pauli::Y).count()
    }

    /// Product of two strings, returned as `(phase, string)`.
    pub fn mul(&self, other: &PauliString) -> Result<(Complex64, PauliString)> {
        if self.n_qubits() != other.n_qubits() {
            return Err(Error::Dimension(format!(
                "Pauli strings of length {} and {}",
                self.n_qubits(),
                other.n_qubits()
            )));
        }
        let mut phase = ONE;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (ph, p) = a.mul(b);
                phase *= ph;
                p
            })
            .collect();
        Ok((phase, PauliString { letters }))
    }

    /// Whether the two strings commute (even number of anticommuting sites).
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| {
                Pauli::from_char(c).ok_or_else(|| Error::Validity(format!("bad Pauli letter {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::new(letters)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: Complex64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coefficient: impl Into<Complex64>, string: PauliString) -> Self {
        Self {
            coefficient: coefficient.into(),
            string,
        }
    }

    pub fn parse(coefficient: f64, letters: &str) -> Result<Self> {
        Ok(Self::new(coefficient, letters.parse()?))
    }
}

/// The operator product `a · b` as a single term.
pub fn multiply_terms(a: &PauliTerm, b: &PauliTerm) -> Result<PauliTerm> {
    let (phase, string) = a.string.mul(&b.string)?;
    Ok(PauliTerm {
        coefficient: a.coefficient * b.coefficient * phase,
        string,
    })
}

/// Weighted sum of Pauli strings on a fixed number of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: vec![PauliTerm::new(1.0, PauliString::identity(n_qubits))],
        }
    }

    pub fn new(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Dimension(format!("qubit count {n_qubits} outside 1..={MAX_QUBITS}")));
        }
        if let Some(t) = terms.iter().find(|t| t.string.n_qubits() != n_qubits) {
            return Err(Error::Dimension(format!(
                "term {} has {} qubits, sum has {n_qubits}",
                t.string,
                t.string.n_qubits()
            )));
        }
        Ok(Self { n_qubits, terms })
    }

    /// Builds a sum from `(coefficient, letters)` pairs, e.g. `(0.2, "XZIII")`.
    pub fn from_labels(labels: &[(f64, &str)]) -> Result<Self> {
        let terms = labels
            .iter()
            .map(|&(c, s)| PauliTerm::parse(c, s))
            .collect::<Result<Vec<_>>>()?;
        let n = terms.first().map(|t| t.string.n_qubits()).ok_or_else(|| {
            Error::Validity("cannot infer qubit count from an empty label list".into())
        })?;
        Self::new(n, terms)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_same(&self, other: &PauliSum) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Dimension(format!(
                "Pauli sums on {} and {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(())
    }

    /// Merges like strings and drops terms with `|c| < drop_tol`. Terms come
    /// out in canonical (lexicographic `IXYZ`) order.
    pub fn simplify(&self, drop_tol: f64) -> PauliSum {
        let mut acc: BTreeMap<&PauliString, Complex64> = BTreeMap::new();
        for t in &self.terms {
            *acc.entry(&t.string).or_insert(ZERO) += t.coefficient;
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| c.norm() >= drop_tol)
            .map(|(s, c)| PauliTerm::new(c, s.clone()))
            .collect();
        PauliSum {
            n_qubits: self.n_qubits,
            terms,
        }
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> PauliSum {
        let c = c.into();
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|t| PauliTerm::new(t.coefficient * c, t.string.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(PauliSum {
            n_qubits: self.n_qubits,
            terms,
        }
        .simplify(DEFAULT_DROP_TOL))
    }

    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.add(&other.scale(-1.0))
    }

    /// Operator product `self · other`, expanded and simplified.
    pub fn mul(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(multiply_terms(a, b)?);
            }
        }
        Ok(PauliSum {
            n_qubits: self.n_qubits,
            terms,
        }
        .simplify(DEFAULT_DROP_TOL))
    }

    /// Largest imaginary part among the coefficients.
    pub fn max_imag(&self) -> f64 {
        self.terms.iter().fold(0.0f64, |m, t| m.max(t.coefficient.im.abs()))
    }

    /// Whether every coefficient is real to within the Hermiticity tolerance.
    pub fn is_hermitian(&self) -> bool {
        self.max_imag() < HERMITIAN_TOL
    }

    /// Coefficient on the identity string.
    pub fn identity_coefficient(&self) -> Complex64 {
        self.terms
            .iter()
            .filter(|t| t.string.is_identity())
            .map(|t| t.coefficient)
            .sum()
    }

    /// Dense `2ⁿ×2ⁿ` matrix, without any Hermiticity requirement.
    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.n_qubits > DENSE_QUBIT_CAP {
            return Err(Error::Capacity {
                what: "dense conversion qubits",
                got: self.n_qubits,
                cap: DENSE_QUBIT_CAP,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        for t in &self.terms {
            let (x, z) = t.string.masks();
            let base = t.coefficient * i_pow(t.string.y_count());
            for b in 0..dim as u64 {
                let sign = if (b & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                m[((b ^ x) as usize, b as usize)] += base * sign;
            }
        }
        Ok(m)
    }

    /// Serializes in the one-term-per-line text format. Fails on complex
    /// coefficients since the format is real-only.
    pub fn to_text(&self) -> Result<String> {
        let mut out = String::new();
        for t in &self.terms {
            if t.coefficient.im.abs() >= HERMITIAN_TOL {
                return Err(Error::Validity(format!(
                    "term {} has complex coefficient {}",
                    t.string, t.coefficient
                )));
            }
            out.push_str(&format!("{} {}\n", t.coefficient.re, t.string));
        }
        Ok(out)
    }

    /// Parses the text format: `<real-coeff> <letters>` per line, `#` comments.
    pub fn from_text(text: &str) -> Result<PauliSum> {
        let mut terms = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |msg: String| Error::Parse { line: idx + 1, msg };
            let mut fields = line.split_whitespace();
            let (Some(c), Some(letters), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(parse_err(format!("expected `<coeff> <letters>`, got {line:?}")));
            };
            let c: f64 = c
                .parse()
                .map_err(|_| parse_err(format!("bad coefficient {c:?}")))?;
            let string: PauliString = letters.parse().map_err(|e: Error| parse_err(e.to_string()))?;
            if let Some(first) = terms.first().map(|t: &PauliTerm| t.string.n_qubits()) {
                if first != string.n_qubits() {
                    return Err(parse_err(format!(
                        "string {letters} has {} qubits, earlier terms have {first}",
                        string.n_qubits()
                    )));
                }
            }
            terms.push(PauliTerm::new(c, string));
        }
        let n = terms
            .first()
            .map(|t| t.string.n_qubits())
            .ok_or_else(|| Error::Parse {
                line: 0,
                msg: "no terms found".into(),
            })?;
        PauliSum::new(n, terms)
    }
}

fn i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => ONE,
        1 => IM,
        2 => -ONE,
        _ => -IM,
    }
}

/// Dense Hermitian matrix `Σ h_m σ_m`.
pub fn dense_from_pauli(p: &PauliSum) -> Result<HermitianMatrix> {
    HermitianMatrix::new(p.to_matrix()?)
}

/// Pauli decomposition `h_m = tr(σ_m H) / 2ⁿ` of a Hermitian `2ⁿ×2ⁿ` matrix.
pub fn pauli_from_dense(h: &HermitianMatrix) -> Result<PauliSum> {
    let dim = h.dim();
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::Dimension(format!("matrix dimension {dim} is not a power of two ≥ 2")));
    }
    let n = dim.trailing_zeros() as usize;
    if n > DENSE_QUBIT_CAP {
        return Err(Error::Capacity {
            what: "dense conversion qubits",
            got: n,
            cap: DENSE_QUBIT_CAP,
        });
    }
    let m = h.matrix();
    let norm = 1.0 / dim as f64;
    let mut terms = Vec::new();
    // enumerate all 4ⁿ strings by base-4 counter
    let mut letters = vec![Pauli::I; n];
    loop {
        let s = PauliString {
            letters: letters.clone(),
        };
        let (x, z) = s.masks();
        let phase = i_pow(s.y_count());
        // tr(σ H) = Σ_b σ[b^x, b] H[b, b^x]
        let mut tr = ZERO;
        for b in 0..dim as u64 {
            let sign = if (b & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            tr += m[(b as usize, (b ^ x) as usize)] * sign;
        }
        let c = tr * phase * norm;
        if c.norm() >= DEFAULT_DROP_TOL {
            terms.push(PauliTerm::new(Complex64::new(c.re, 0.0), s));
        }
        // increment
        let mut k = n;
        loop {
            if k == 0 {
                return PauliSum::new(n, terms);
            }
            k -= 1;
            let next = letters[k] as u8 + 1;
            if next < 4 {
                letters[k] = Pauli::from_bits(next);
                break;
            }
            letters[k] = Pauli::I;
        }
    }
}

/// True iff every coefficient of `g·s − s·g` is below `tol`.
pub fn commutes(g: &PauliSum, s: &PauliSum, tol: f64) -> Result<bool> {
    let gs = g.mul(s)?;
    let sg = s.mul(g)?;
    let comm = gs.sub(&sg)?;
    Ok(comm.terms().iter().all(|t| t.coefficient.norm() < tol))
}

/// `G − τS`, simplified.
pub fn shift_pencil(g: &PauliSum, s: &PauliSum, tau: f64) -> Result<PauliSum> {
    g.sub(&s.scale(tau))
}

/// `((G − τS)², S²)`, expanded and simplified, with coefficients made real.
pub fn shift_square_pencil(g: &PauliSum, s: &PauliSum, tau: f64) -> Result<(PauliSum, PauliSum)> {
    let shifted = shift_pencil(g, s, tau)?;
    let num = shifted.mul(&shifted)?;
    let den = s.mul(s)?;
    Ok((real_part(&num), real_part(&den)))
}

/// Strips imaginary residue from a sum that is Hermitian up to round-off.
pub fn real_part(p: &PauliSum) -> PauliSum {
    PauliSum {
        n_qubits: p.n_qubits,
        terms: p
            .terms
            .iter()
            .map(|t| PauliTerm::new(Complex64::new(t.coefficient.re, 0.0), t.string.clone()))
            .filter(|t| t.coefficient.norm() >= DEFAULT_DROP_TOL)
            .collect(),
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if t.coefficient.im == 0.0 {
                write!(f, "{}*{}", t.coefficient.re, t.string)?;
            } else {
                write!(f, "({})*{}", t.coefficient, t.string)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::oracle::max_abs;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
        a.kronecker(b)
    }

    fn dense_letter(p: Pauli) -> CMatrix {
        let m = p.matrix();
        CMatrix::from_fn(2, 2, |i, j| m[i][j])
    }

    #[test]
    fn identity_term_is_neutral() {
        let id = PauliTerm::parse(1.0, "II").unwrap();
        let t = PauliTerm::new(c(0.3, -0.2), "YZ".parse().unwrap());
        assert_eq!(multiply_terms(&id, &t).unwrap(), t);
        assert_eq!(multiply_terms(&t, &id).unwrap(), t);
    }

    #[test]
    fn product_matches_dense_oracle() {
        // (0.2, XZ)·(0.5, XI): dense oracle
        let a = PauliTerm::parse(0.2, "XZ").unwrap();
        let b = PauliTerm::parse(0.5, "XI").unwrap();
        let p = multiply_terms(&a, &b).unwrap();
        let x = dense_letter(Pauli::X);
        let z = dense_letter(Pauli::Z);
        let i2 = dense_letter(Pauli::I);
        let oracle = kron(&x, &z) * c(0.2, 0.0) * (kron(&x, &i2) * c(0.5, 0.0));
        let got = PauliSum::new(2, vec![p.clone()]).unwrap().to_matrix().unwrap();
        assert!(max_abs(&(got - oracle)) < 1e-15);
        assert_eq!(p.string.to_string(), "IZ");
        assert!((p.coefficient - c(0.1, 0.0)).norm() < 1e-15);

        let xy = multiply_terms(&PauliTerm::parse(1.0, "X").unwrap(), &PauliTerm::parse(1.0, "Y").unwrap()).unwrap();
        let oracle = dense_letter(Pauli::X) * dense_letter(Pauli::Y);
        let got = PauliSum::new(1, vec![xy.clone()]).unwrap().to_matrix().unwrap();
        assert!(max_abs(&(got - oracle)) < 1e-15);
        assert_eq!(xy.string.to_string(), "Z");
        assert_eq!(xy.coefficient, c(0.0, 1.0));
    }

    #[test]
    fn product_length_mismatch() {
        let a = PauliTerm::parse(1.0, "X").unwrap();
        let b = PauliTerm::parse(1.0, "XX").unwrap();
        assert!(matches!(multiply_terms(&a, &b), Err(Error::Dimension(_))));
    }

    #[test]
    fn simplify_cases() {
        let p = PauliSum::from_labels(&[(1.0, "X"), (1.0, "X")]).unwrap().simplify(1e-12);
        assert_eq!(p.terms(), &[PauliTerm::parse(2.0, "X").unwrap()]);
        let p = PauliSum::from_labels(&[(1e-15, "Z")]).unwrap().simplify(1e-12);
        assert!(p.is_empty());
        let p = PauliSum::from_labels(&[(1.0, "I"), (-1.0, "I")]).unwrap().simplify(1e-12);
        assert!(p.is_empty());
    }

    #[test]
    fn dense_identity_and_z() {
        let id = PauliSum::identity(5);
        let m = dense_from_pauli(&id).unwrap();
        assert_eq!(m.matrix(), &CMatrix::identity(32, 32));
        let z = PauliSum::from_labels(&[(0.5, "Z")]).unwrap();
        let m = dense_from_pauli(&z).unwrap();
        assert_eq!(m.matrix()[(0, 0)], c(0.5, 0.0));
        assert_eq!(m.matrix()[(1, 1)], c(-0.5, 0.0));
        assert_eq!(m.matrix()[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn dense_matches_kronecker_expansion() {
        let (g, _) = builtin::example1();
        let got = dense_from_pauli(&g).unwrap();
        let mut oracle = CMatrix::zeros(32, 32);
        for t in g.terms() {
            let mut m = CMatrix::identity(1, 1);
            for &p in t.string.letters() {
                m = kron(&m, &dense_letter(p));
            }
            oracle += m * t.coefficient;
        }
        assert!(max_abs(&(got.matrix() - &oracle)) < 1e-15);
        assert_eq!(got.matrix()[(0, 0)], c(1.0, 0.0));
    }

    #[test]
    fn dense_cap() {
        let p = PauliSum::identity(13);
        assert!(matches!(p.to_matrix(), Err(Error::Capacity { .. })));
    }

    #[test]
    fn decomposition_basic() {
        let p = pauli_from_dense(&HermitianMatrix::identity(8)).unwrap();
        assert_eq!(p.terms(), &[PauliTerm::parse(1.0, "III").unwrap()]);
        let p = pauli_from_dense(&HermitianMatrix::from_diagonal(&[1.0, -1.0])).unwrap();
        assert_eq!(p.terms(), &[PauliTerm::parse(1.0, "Z").unwrap()]);
        assert!(matches!(
            pauli_from_dense(&HermitianMatrix::identity(3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn decomposition_round_trip_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let mut m = CMatrix::zeros(4, 4);
        for i in 0..4 {
            m[(i, i)] = c(rng.random_range(-1.0..1.0), 0.0);
            for j in i + 1..4 {
                let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        let h = HermitianMatrix::new(m).unwrap();
        let p = pauli_from_dense(&h).unwrap();
        assert!(p.len() <= 16);
        assert!(p.is_hermitian());
        let back = dense_from_pauli(&p).unwrap();
        assert!(max_abs(&(back.matrix() - h.matrix())) < 1e-10);
    }

    #[test]
    fn commutation_of_builtins() {
        let (g1, s1) = builtin::example1();
        let (g2, s2) = builtin::example2();
        assert!(commutes(&g1, &s1, 1e-10).unwrap());
        assert!(!commutes(&g2, &s2, 1e-10).unwrap());
        assert!(commutes(&g2, &g2, 1e-10).unwrap());
    }

    #[test]
    fn shift_cases() {
        let (g, s) = builtin::example1();
        assert_eq!(shift_pencil(&g, &s, 0.0).unwrap(), g.simplify(DEFAULT_DROP_TOL));
        assert!(shift_pencil(&g, &g, 1.0).unwrap().is_empty());

        // singular at a generalized eigenvalue: smallest |eigenvalue| of the
        // Hermitian G − τS equals its smallest singular value
        let shifted = dense_from_pauli(&shift_pencil(&g, &s, 0.6685).unwrap()).unwrap();
        let e = crate::oracle::hermitian_eig(&shifted).unwrap();
        let smin = e.values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        assert!(smin < 1e-3, "{smin}");
    }

    #[test]
    fn shift_square_cases() {
        let id = PauliSum::identity(2);
        let (a, b) = shift_square_pencil(&id, &id, 0.0).unwrap();
        assert_eq!(a, id);
        assert_eq!(b, id);

        let z = PauliSum::from_labels(&[(1.0, "Z")]).unwrap();
        let one = PauliSum::identity(1);
        let (a, b) = shift_square_pencil(&z, &one, 1.0).unwrap();
        assert_eq!(a, PauliSum::from_labels(&[(2.0, "I"), (-2.0, "Z")]).unwrap());
        assert_eq!(b, one);

        let (g, s) = builtin::example1();
        let tau = 0.9;
        let (a, _) = shift_square_pencil(&g, &s, tau).unwrap();
        let dg = g.to_matrix().unwrap();
        let ds = s.to_matrix().unwrap();
        let d = dg - ds * c(tau, 0.0);
        let oracle = &d * &d;
        assert!(max_abs(&(a.to_matrix().unwrap() - oracle)) < 1e-10);
    }

    #[test]
    fn text_format() {
        let text = "# example\n1 IIIII\n0.2 XZIII\n\n0.5 XIIII\n";
        let p = PauliSum::from_text(text).unwrap();
        assert_eq!(p, builtin::example1().0);
        let back = PauliSum::from_text(&p.to_text().unwrap()).unwrap();
        assert_eq!(back, p);
        assert!(matches!(PauliSum::from_text("1 XX\n1 X\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(PauliSum::from_text("abc XX\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(PauliSum::from_text("1 XQ\n"), Err(Error::Parse { .. })));
        assert!(PauliSum::from_text("# nothing\n").is_err());
    }
}
