mod common;

use gme_core::dressed::*;
use gme_core::linalg::*;
use gme_core::models::{rabi_hamiltonian, RabiOperators, RabiParams};
use gme_core::scenario::circuit_qed_params;

fn oscillator(n: usize) -> (Operator, EigenSystem) {
    let h = number(n);
    (destroy(n), eigh(&h).unwrap())
}

fn rabi(theta: f64) -> (RabiOperators, EigenSystem) {
    let p = RabiParams { theta, ..circuit_qed_params(8) };
    let e = eigh(&rabi_hamiltonian(&p).unwrap()).unwrap();
    (RabiOperators::new(8), e)
}

#[test]
fn oscillator_table_is_the_ladder() {
    let (a, eig) = oscillator(5);
    let t = build_transition_table(&a, &eig, default_zero_tol(&eig)).unwrap();
    assert_eq!(t.transitions.len(), 4);
    for tr in &t.transitions {
        assert_eq!(tr.k, tr.j + 1);
        assert!((tr.element.norm() - ((tr.j + 1) as f64).sqrt()).abs() < 1e-14);
        assert!((tr.delta - 1.0).abs() < 1e-14);
        assert!(tr.is_positive());
    }
    assert!(max_abs(&(&assemble_s_plus(&t, &eig).unwrap() - &a)) < 1e-14);
    assert!(max_abs(&assemble_s_zero(&t, &eig).unwrap()) == 0.0);
    assert!(max_abs(&(&dressed_number(&t, &eig).unwrap() - &number(5))) < 1e-13);
}

#[test]
fn parity_symmetric_rabi_has_no_zero_class() {
    let (ops, eig) = rabi(0.0);
    for s in [&ops.a, &ops.sigma_minus] {
        let t = build_transition_table(s, &eig, default_zero_tol(&eig)).unwrap();
        assert!(t.transitions.iter().all(|tr| tr.j != tr.k));
        assert!(max_abs(&assemble_s_zero(&t, &eig).unwrap()) < 1e-12);
    }
}

#[test]
fn flux_point_rabi_has_diagonal_elements() {
    let (ops, eig) = rabi(circuit_qed_params(8).theta);
    let t = build_transition_table(&ops.sigma_minus, &eig, default_zero_tol(&eig)).unwrap();
    let cjj = t.zero().filter(|tr| tr.j == tr.k).map(|tr| tr.element.norm()).fold(0.0, f64::max);
    assert!(cjj > 1e-6);
}

#[test]
fn longitudinal_rabi_exercises_zero_frequency_terms() {
    let p = RabiParams { theta: std::f64::consts::FRAC_PI_2, ..circuit_qed_params(6) };
    let h = rabi_hamiltonian(&p).unwrap();
    let ops = RabiOperators::new(6);
    // no sigma_x coupling: H commutes with sigma_z
    assert!(max_abs(&commutator(&h, &ops.sigma_z).unwrap()) < 1e-12);
    let eig = eigh(&h).unwrap();
    let t = build_transition_table(&ops.a, &eig, default_zero_tol(&eig)).unwrap();
    assert!(max_abs(&assemble_s_zero(&t, &eig).unwrap()) > 1e-3);
}

#[test]
fn s_plus_only_lowers_energy_and_kills_ground_state() {
    let (ops, eig) = rabi(circuit_qed_params(8).theta);
    for s in [&ops.a, &ops.sigma_minus] {
        let t = build_transition_table(s, &eig, default_zero_tol(&eig)).unwrap();
        let sp = t.s_plus_dressed();
        for j in 0..eig.dim() {
            for k in 0..eig.dim() {
                if sp[[j, k]].norm() > 0.0 {
                    assert!(eig.energies[k] > eig.energies[j]);
                }
            }
        }
        let p = assemble_s_plus(&t, &eig).unwrap();
        let g = eig.state(0);
        assert!(p.dot(&g).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
        let m = assemble_s_minus(&t, &eig).unwrap();
        assert_eq!(m, adjoint(&p));
        let n = dressed_number(&t, &eig).unwrap();
        assert!(expectation(&n, &eig.projector(0)).unwrap().norm() < 1e-12);
    }
}

#[test]
fn parts_sum_to_the_coupling_operator() {
    let (ops, eig) = rabi(0.7);
    let t = build_transition_table(&ops.sigma_minus, &eig, default_zero_tol(&eig)).unwrap();
    let x = &ops.sigma_minus + &adjoint(&ops.sigma_minus);
    let sum = assemble_s_plus(&t, &eig).unwrap() + assemble_s_minus(&t, &eig).unwrap() + assemble_s_zero(&t, &eig).unwrap();
    assert!(max_abs(&(&sum - &x)) < 1e-12);
}

#[test]
fn dressed_photon_number_of_second_level_frozen() {
    // <E2| A- A+ |E2> at the circuit-QED point, n_max = 14, from the Jacobi oracle
    const N_E2: f64 = 1.024575800899579;
    let p = circuit_qed_params(14);
    let (_, v) = common::jacobi_eigh(&common::rabi_h(p.omega_c, p.omega_q, p.g, p.theta, p.n_max));
    let (a, _) = common::rabi_ops(p.n_max);
    let x = &a + &common::dagger(&a);
    let xe = common::mm(&common::mm(&common::dagger(&v), &x), &v);
    let oracle: f64 = (0..2).map(|j| xe[[j, 2]].norm_sqr()).sum();
    assert!((oracle - N_E2).abs() < 1e-12);

    let eig = eigh(&rabi_hamiltonian(&p).unwrap()).unwrap();
    let t = build_transition_table(&RabiOperators::new(14).a, &eig, default_zero_tol(&eig)).unwrap();
    let n = dressed_number(&t, &eig).unwrap();
    assert!((expectation(&n, &eig.projector(2)).unwrap().re - N_E2).abs() < 1e-10);
}

#[test]
fn rejects_mismatched_dimensions() {
    let (_, eig) = oscillator(4);
    assert!(matches!(
        build_transition_table(&destroy(3), &eig, 1e-9),
        Err(gme_core::Error::DimensionMismatch { .. })
    ));
    assert!(build_transition_table(&destroy(4), &eig, -1.0).is_err());
}
