//! The two 5-qubit benchmark pencils.
//!
//! `example1` is a commuting pencil with distinct generalized eigenvalues
//! {0.6685, 0.9265, 1.3643, 1.8171}; `example2` does not commute and has
//! {−1.5872, 0.4480, 1.4396, 1.9370}. Each value is 8-fold degenerate.

use crate::pauli::PauliSum;

pub const EXAMPLE1_EIGENVALUES: [f64; 4] = [0.6685, 0.9265, 1.3643, 1.8171];
pub const EXAMPLE2_EIGENVALUES: [f64; 4] = [-1.5872, 0.4480, 1.4396, 1.9370];

/// `(G₁, S₁)`: `G₁ = 1 + 0.2 X⊗Z + 0.5 X⊗1`, `S₁ = 1 + 0.441 X⊗Z + 0.3939 X⊗1`.
pub fn example1() -> (PauliSum, PauliSum) {
    let g = PauliSum::from_labels(&[(1.0, "IIIII"), (0.2, "XZIII"), (0.5, "XIIII")]);
    let s = PauliSum::from_labels(&[(1.0, "IIIII"), (0.441, "XZIII"), (0.3939, "XIIII")]);
    (g.expect("static labels"), s.expect("static labels"))
}

/// `(G₂, S₂)`: `G₂ = 1 + 0.63 X⊗Z + 1.2 X⊗1 + 0.2 Z⊗1`, `S₂ = 1 + 0.1741 X⊗Z + 0.2981 X⊗1`.
pub fn example2() -> (PauliSum, PauliSum) {
    let g = PauliSum::from_labels(&[
        (1.0, "IIIII"),
        (0.63, "XZIII"),
        (1.2, "XIIII"),
        (0.2, "ZIIII"),
    ]);
    let s = PauliSum::from_labels(&[(1.0, "IIIII"), (0.1741, "XZIII"), (0.2981, "XIIII")]);
    (g.expect("static labels"), s.expect("static labels"))
}

/// Looks up a builtin by name (`example1` or `example2`).
pub fn by_name(name: &str) -> Option<(PauliSum, PauliSum)> {
    match name {
        "example1" => Some(example1()),
        "example2" => Some(example2()),
        _ => None,
    }
}

/// Reference eigenvalues for a builtin.
pub fn reference_eigenvalues(name: &str) -> Option<&'static [f64]> {
    match name {
        "example1" => Some(&EXAMPLE1_EIGENVALUES),
        "example2" => Some(&EXAMPLE2_EIGENVALUES),
        _ => None,
    }
}
