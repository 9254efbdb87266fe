//! Randomized identities of the Pauli algebra and the statevector simulator.

use num_complex::Complex64;
use proptest::prelude::*;
use vqge_core::pauli::{commutes, dense_from_pauli, pauli_from_dense};
use vqge_core::simulator::{expectation_exact, parameter_shift_gradient, prepare_state};
use vqge_core::{AnsatzSpec, Pauli, PauliString, PauliSum, PauliTerm, RotationKind};

fn letter() -> impl Strategy<Value = Pauli> {
    prop_oneof![Just(Pauli::I), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)]
}

fn string(n: usize) -> impl Strategy<Value = PauliString> {
    prop::collection::vec(letter(), n).prop_map(|l| PauliString::new(l).unwrap())
}

fn sum(n: usize, complex: bool) -> impl Strategy<Value = PauliSum> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64, string(n)), 1..6).prop_map(move |terms| {
        let terms = terms
            .into_iter()
            .map(|(re, im, s)| PauliTerm::new(Complex64::new(re, if complex { im } else { 0.0 }), s))
            .collect();
        PauliSum::new(n, terms).unwrap()
    })
}

fn hermitian(n: usize) -> impl Strategy<Value = PauliSum> {
    sum(n, false)
}

fn dist(a: &PauliSum, b: &PauliSum) -> f64 {
    (a.to_matrix().unwrap() - b.to_matrix().unwrap()).norm()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn product_is_a_ring_homomorphism(a in sum(3, true), b in sum(3, true)) {
        let lhs = a.mul(&b).unwrap().to_matrix().unwrap();
        let rhs = a.to_matrix().unwrap() * b.to_matrix().unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-10);
        let sum_dense = a.add(&b).unwrap().to_matrix().unwrap();
        prop_assert!((sum_dense - a.to_matrix().unwrap() - b.to_matrix().unwrap()).norm() < 1e-12);
    }

    #[test]
    fn product_is_associative(a in sum(2, true), b in sum(2, true), c in sum(2, true)) {
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(dist(&left, &right) < 1e-10);
    }

    #[test]
    fn dense_round_trip(h in hermitian(3)) {
        let back = pauli_from_dense(&dense_from_pauli(&h).unwrap()).unwrap();
        prop_assert!(dist(&back, &h) < 1e-10);
    }

    #[test]
    fn text_round_trip(h in hermitian(3)) {
        let back = PauliSum::from_text(&h.to_text().unwrap()).unwrap();
        prop_assert!(dist(&back, &h) < 1e-10);
    }

    #[test]
    fn commutation_matches_dense(a in hermitian(2), b in hermitian(2)) {
        let (ma, mb) = (a.to_matrix().unwrap(), b.to_matrix().unwrap());
        let dense = (&ma * &mb - &mb * &ma).norm() < 1e-9;
        prop_assert_eq!(commutes(&a, &b, 1e-9).unwrap(), dense);
    }

    #[test]
    fn string_commutation_matches_sign(a in string(4), b in string(4)) {
        let (pab, ab) = a.mul(&b).unwrap();
        let (pba, ba) = b.mul(&a).unwrap();
        prop_assert_eq!(&ab, &ba);
        prop_assert_eq!(a.commutes_with(&b), (pab - pba).norm() < 1e-12);
    }

    #[test]
    fn states_stay_normalized(layers in 1usize..4, angles in prop::collection::vec(-3.0..3.0f64, 64), rz in any::<bool>()) {
        let rotation = if rz { RotationKind::RzRy } else { RotationKind::RyOnly };
        let spec = AnsatzSpec::chain(4, layers, rotation).unwrap();
        let psi = prepare_state(&spec, &angles[..spec.param_count()]).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expectation_matches_dense(h in hermitian(3), theta in prop::collection::vec(-3.0..3.0f64, 12)) {
        let spec = AnsatzSpec::chain(3, 1, RotationKind::RzRy).unwrap();
        let psi = prepare_state(&spec, &theta).unwrap();
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        let dense = (v.adjoint() * h.to_matrix().unwrap() * &v)[(0, 0)].re;
        prop_assert!((expectation_exact(&psi, &h).unwrap() - dense).abs() < 1e-10);
    }

    #[test]
    fn parameter_shift_matches_finite_difference(h in hermitian(3), theta in prop::collection::vec(-3.0..3.0f64, 12)) {
        let spec = AnsatzSpec::chain(3, 1, RotationKind::RzRy).unwrap();
        let grad = parameter_shift_gradient(&spec, &theta, &h).unwrap();
        let f = |t: &[f64]| expectation_exact(&prepare_state(&spec, t).unwrap(), &h).unwrap();
        let eps = 1e-5;
        for k in 0..theta.len() {
            let mut p = theta.clone();
            let mut m = theta.clone();
            p[k] += eps;
            m[k] -= eps;
            let fd = (f(&p) - f(&m)) / (2.0 * eps);
            prop_assert!((grad[k] - fd).abs() < 1e-6, "k {}: {} vs {}", k, grad[k], fd);
        }
    }
}

#[test]
fn pauli_group_table() {
    let i = Complex64::i();
    assert_eq!(Pauli::X.mul(Pauli::Y), (i, Pauli::Z));
    assert_eq!(Pauli::Y.mul(Pauli::X), (-i, Pauli::Z));
    assert_eq!(Pauli::Z.mul(Pauli::Z), (Complex64::new(1.0, 0.0), Pauli::I));
}
