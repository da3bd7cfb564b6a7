mod common;

use gme_core::linalg::*;
use gme_core::scenario::circuit_qed_params;
use gme_core::models::rabi_hamiltonian;
use ndarray::Array2;
use proptest::prelude::*;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[test]
fn kron_identity_and_sigma_z() {
    assert_eq!(kron(&identity(2), &identity(2)), identity(4));
    let k = kron(&sigma_z(), &identity(2));
    let expect = Array2::from_diag(&ndarray::arr1(&[c(1.0), c(1.0), c(-1.0), c(-1.0)]));
    assert_eq!(k, expect);
}

#[test]
fn kron_matches_index_formula() {
    let a = destroy(2);
    let b = common::random_hermitian(3, 1);
    assert!(common::max_diff(&kron(&a, &b), &common::kron(&a, &b)) == 0.0);
}

#[test]
fn adjoint_examples() {
    assert_eq!(adjoint(&destroy(3)), create(3));
    let h = common::random_hermitian(4, 2);
    assert_eq!(adjoint(&h), h);
    let x = common::random_hermitian(4, 3).mapv(|z| z * C64::new(0.3, 1.1));
    let lhs = adjoint(&x.mapv(|z| z * I));
    let rhs = adjoint(&x).mapv(|z| -I * z);
    assert!(max_abs(&(&lhs - &rhs)) < 1e-15);
}

#[test]
fn commutator_examples() {
    let x = common::random_hermitian(5, 4);
    assert!(max_abs(&commutator(&x, &x).unwrap()) < 1e-14);
    let cr = commutator(&destroy(5), &create(5)).unwrap();
    for i in 0..4 {
        assert!((cr[[i, i]] - ONE).norm() < 1e-14);
    }
    assert!((cr[[4, 4]] - c(-4.0)).norm() < 1e-14);
    let xy = commutator(&sigma_x(), &sigma_y()).unwrap();
    assert!(max_abs(&(&xy - &sigma_z().mapv(|z| z * 2.0 * I))) < 1e-15);
    assert!(matches!(commutator(&identity(2), &identity(3)), Err(gme_core::Error::DimensionMismatch { .. })));
}

#[test]
fn eigh_sorts_and_permutes() {
    let d = Array2::from_diag(&ndarray::arr1(&[c(3.0), c(1.0), c(2.0)]));
    let e = eigh(&d).unwrap();
    assert_eq!(e.energies.to_vec(), vec![1.0, 2.0, 3.0]);
    assert!((e.vectors[[1, 0]] - ONE).norm() < 1e-14);
    assert!((e.vectors[[2, 1]] - ONE).norm() < 1e-14);
    assert!((e.vectors[[0, 2]] - ONE).norm() < 1e-14);
}

#[test]
fn eigh_rejects_non_hermitian() {
    assert!(matches!(eigh(&destroy(3)), Err(gme_core::Error::NotHermitian { .. })));
    assert!(matches!(eigh(&Array2::zeros((2, 3))), Err(gme_core::Error::NotSquare { .. })));
}

#[test]
fn eigh_degenerate_ties_keep_index_order() {
    let e = eigh(&identity(3)).unwrap();
    assert!(max_abs(&(&e.vectors - &identity(3))) < 1e-14);
}

#[test]
fn eigh_agrees_with_jacobi_oracle_on_rabi() {
    let p = circuit_qed_params(14);
    let h = rabi_hamiltonian(&p).unwrap();
    let ours = eigh(&h).unwrap();
    let (e, v) = common::jacobi_eigh(&common::rabi_h(p.omega_c, p.omega_q, p.g, p.theta, p.n_max));
    for k in 0..h.nrows() {
        assert!((ours.energies[k] - e[k]).abs() < 1e-11, "level {k}");
        let overlap: C64 = (0..h.nrows()).map(|b| ours.vectors[[b, k]].conj() * v[[b, k]]).sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-9, "level {k}");
    }
}

#[test]
fn rabi_splitting_frozen() {
    // E3 - E2 from the Jacobi oracle at n_max = 14
    const SPLITTING: f64 = 0.036063479868310;
    let p = circuit_qed_params(14);
    let (e, _) = common::jacobi_eigh(&common::rabi_h(p.omega_c, p.omega_q, p.g, p.theta, p.n_max));
    assert!((e[3] - e[2] - SPLITTING).abs() < 1e-12);
    let ours = eigh(&rabi_hamiltonian(&p).unwrap()).unwrap();
    assert!((ours.energies[3] - ours.energies[2] - SPLITTING).abs() < 1e-12);
}

#[test]
fn phase_convention_largest_component_real_positive() {
    let h = common::random_hermitian(6, 9);
    let e = eigh(&h).unwrap();
    for k in 0..6 {
        let (mut best, mut idx) = (0.0, 0);
        for b in 0..6 {
            if e.vectors[[b, k]].norm() > best + 1e-9 {
                best = e.vectors[[b, k]].norm();
                idx = b;
            }
        }
        assert!(e.vectors[[idx, k]].im.abs() < 1e-12 && e.vectors[[idx, k]].re > 0.0);
    }
}

#[test]
fn expectation_examples() {
    let rho = common::random_density(4, 5);
    assert!((expectation(&identity(4), &rho).unwrap() - ONE).norm() < 1e-14);
    let mut fock = Array2::zeros((4, 4));
    fock[[2, 2]] = ONE;
    assert!((expectation(&number(4), &fock).unwrap() - c(2.0)).norm() < 1e-14);
    let o = common::random_hermitian(4, 6);
    assert!(expectation(&o, &rho).unwrap().im.abs() < 1e-12);
}

#[test]
fn expm_of_hermitian_generator_is_unitary() {
    let h = common::random_hermitian(8, 11).mapv(|z| z * C64::new(0.0, -3.0));
    let u = expm(&h).unwrap();
    let uu = matmul_op(&u, Op::H, &u, Op::N);
    assert!(max_abs(&(&uu - &identity(8))) < 1e-12);
}

fn small_matrix(n: usize) -> impl Strategy<Value = Operator> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(move |v| Array2::from_shape_fn((n, n), |(i, j)| C64::new(v[i * n + j].0, v[i * n + j].1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kron_is_associative(a in small_matrix(2), b in small_matrix(3), c in small_matrix(2)) {
        let l = kron(&kron(&a, &b), &c);
        let r = kron(&a, &kron(&b, &c));
        prop_assert!(max_abs(&(&l - &r)) < 1e-14);
    }

    #[test]
    fn adjoint_is_an_involution_and_reverses_products(a in small_matrix(4), b in small_matrix(4)) {
        prop_assert_eq!(adjoint(&adjoint(&a)), a.clone());
        let l = adjoint(&matmul(&a, &b));
        let r = matmul(&adjoint(&b), &adjoint(&a));
        prop_assert!(max_abs(&(&l - &r)) < 1e-13);
    }

    #[test]
    fn gemm_agrees_with_naive_product(a in small_matrix(5), b in small_matrix(5)) {
        let naive = common::mm(&a, &b);
        prop_assert!(max_abs(&(&matmul(&a, &b) - &naive)) < 1e-13);
        let ah = matmul_op(&a, Op::H, &b, Op::T);
        prop_assert!(max_abs(&(&ah - &common::mm(&adjoint(&a), &b.t().to_owned()))) < 1e-13);
    }

    #[test]
    fn eigh_reconstructs(a in small_matrix(6)) {
        let h = hermitize(&a);
        let e = eigh(&h).unwrap();
        let d = Array2::from_diag(&e.energies.mapv(|x| C64::new(x, 0.0)));
        let back = from_basis(&d, &e.vectors);
        prop_assert!(max_abs(&(&back - &h)) < 1e-12);
        prop_assert!(e.energies.windows(2).into_iter().all(|w| w[0] <= w[1]));
    }
}
