mod common;

use gme_core::baths::{thermal_n, BathSpec, FilterSpec};
use gme_core::dissipators::*;
use gme_core::dressed::{build_transition_table, default_zero_tol};
use gme_core::dynamics::{gibbs_from_eigen, steady_state};
use gme_core::linalg::*;
use gme_core::models::RabiParams;
use gme_core::scenario::*;
use ndarray::Array2;
use proptest::prelude::*;

fn cavity(n: usize, t: f64) -> (Operator, Operator, BathSpec) {
    (number(n), destroy(n), BathSpec::new(0.02, 1.0, t).unwrap())
}

fn rabi_system(p: RabiParams, t: f64) -> OpenSystem {
    let baths = vec![
        (Port::Qubit, BathSpec::new(0.01, p.omega_q, t).unwrap()),
        (Port::Cavity, BathSpec::new(0.01, p.omega_c, t).unwrap()),
    ];
    OpenSystem::new(Model::Rabi(p), &baths).unwrap()
}

fn diag_pop_rate(l: &gme_core::superop::Superoperator, d: usize, k: usize) -> C64 {
    let mut rho = Array2::zeros((d, d));
    rho[[k, k]] = ONE;
    l.apply(&rho).unwrap()[[k, k]]
}

#[test]
fn damped_cavity_decays_at_gamma() {
    let (_, a, bath) = cavity(6, 0.0);
    let l = standard_lindblad(&[(a, bath, 1.0)]).unwrap();
    assert!((diag_pop_rate(&l, 6, 1) - C64::new(-0.02, 0.0)).norm() < 1e-15);
    let ss = steady_state(&number(6), &l).unwrap();
    assert!((ss[[0, 0]] - ONE).norm() < 1e-10);
}

#[test]
fn thermal_cavity_steady_occupation() {
    let (h, a, bath) = cavity(40, 0.75);
    let l = standard_lindblad(&[(a, bath, 1.0)]).unwrap();
    let ss = steady_state(&h, &l).unwrap();
    let n = expectation(&number(40), &ss).unwrap().re;
    assert!((n - thermal_n(1.0, 0.75).unwrap()).abs() < 1e-8);
}

#[test]
fn bare_dissipator_excites_dressed_ground_state() {
    let sys = rabi_system(circuit_qed_params(10), 0.0);
    let l = sys.dissipator(Method::Standard, FilterSpec::Unbounded, false).unwrap();
    let out = l.apply(&sys.eig.projector(0)).unwrap();
    let n = sys.ladder_of(Port::Cavity).unwrap().number();
    let rate = expectation(&n, &out).unwrap().re;
    assert!(rate > 1e-6, "{rate}");
    for m in [Method::Dressed, Method::Gme, Method::GmeFull] {
        let l = sys.dissipator(m, FilterSpec::Unbounded, true).unwrap();
        assert!(max_abs(&l.apply(&sys.eig.projector(0)).unwrap()) < 1e-12, "{m:?}");
    }
}

#[test]
fn decoupled_cavity_dressed_generators_equal_standard() {
    for t in [0.0, 0.6] {
        let (h, a, bath) = cavity(6, t);
        let eig = eigh(&h).unwrap();
        let table = build_transition_table(&a, &eig, default_zero_tol(&eig)).unwrap();
        let std = standard_lindblad(&[(a.clone(), bath, 1.0)]).unwrap().to_matrix();
        let dressed = dressed_secular_lindblad(&[(&table, &bath)], &eig).unwrap().to_matrix();
        let gme = gme_liouvillian(&[(&table, &bath)], &eig, FilterSpec::Unbounded, true, GmeMode::Reduced)
            .unwrap()
            .to_matrix();
        // the secular form drops the coherence-coupling terms between equal-frequency transitions
        // that the standard form keeps, so only populations coincide for it
        assert!(max_abs(&(&gme - &std)) < 1e-12, "T = {t}");
        for k in 0..6 {
            let idx = k + 6 * k;
            for j in 0..6 {
                let jdx = j + 6 * j;
                assert!((dressed[[idx, jdx]] - std[[idx, jdx]]).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn rabi_gme_relaxes_to_gibbs() {
    let sys = rabi_system(RabiParams { n_max: 10, ..circuit_qed_params(10) }, 0.75);
    let l = sys.dissipator(Method::Gme, FilterSpec::Unbounded, true).unwrap();
    let ss = steady_state(&sys.h, &l).unwrap();
    let gibbs = gibbs_from_eigen(&sys.eig, 0.75);
    assert!(trace_distance(&ss, &gibbs).unwrap() < 1e-3);
}

#[test]
fn zero_coupling_gme_equals_standard() {
    for t in [0.0, 0.4] {
        let sys = rabi_system(RabiParams { g: 0.0, ..circuit_qed_params(5) }, t);
        let std = sys.dissipator(Method::Standard, FilterSpec::Unbounded, true).unwrap().to_matrix();
        for (m, f) in [(Method::Gme, FilterSpec::Unbounded), (Method::Gme, FilterSpec::Bandwidth(0.05)), (Method::GmeFull, FilterSpec::Bandwidth(0.05))] {
            let l = sys.dissipator(m, f, true).unwrap().to_matrix();
            assert!(max_abs(&(&l - &std)) < 1e-10, "{m:?} {f:?} T = {t}");
        }
        let om = OpenSystem::new(Model::Optomech(dce_params(3, 4, true)), &dce_baths(t)).unwrap();
        let om = OpenSystem::new(
            Model::Optomech(gme_core::models::OptomechParams { g: 0.0, ..dce_params(3, 4, true) }),
            &om.channels.iter().map(|c| (c.port, c.bath)).collect::<Vec<_>>(),
        )
        .unwrap();
        let std = om.dissipator(Method::Standard, FilterSpec::Unbounded, true).unwrap().to_matrix();
        let l = om.dissipator(Method::Gme, dce_filter(), true).unwrap().to_matrix();
        assert!(max_abs(&(&l - &std)) < 1e-10, "optomech T = {t}");
    }
}

#[test]
fn narrow_filter_without_dephasing_is_the_secular_generator() {
    let sys = rabi_system(circuit_qed_params(6), 0.5);
    let mut freqs: Vec<f64> = sys.channels.iter().flat_map(|c| c.table.positive().map(|t| t.delta)).collect();
    freqs.sort_by(f64::total_cmp);
    let gap = freqs.windows(2).map(|w| w[1] - w[0]).filter(|d| *d > 0.0).fold(f64::INFINITY, f64::min);
    assert!(gap > 1e-6);
    // distinct transitions of equal frequency would survive the filter; there are none here
    let mut per_channel_dups = 0;
    for c in &sys.channels {
        let f: Vec<f64> = c.table.positive().map(|t| t.delta).collect();
        for i in 0..f.len() {
            for j in 0..i {
                if (f[i] - f[j]).abs() < 0.5 * gap {
                    per_channel_dups += 1;
                }
            }
        }
    }
    assert_eq!(per_channel_dups, 0);
    let gme = sys.dissipator(Method::Gme, FilterSpec::Bandwidth(0.5 * gap), false).unwrap().to_matrix();
    let sec = sys.dissipator(Method::Dressed, FilterSpec::Unbounded, false).unwrap().to_matrix();
    assert!(max_abs(&(&gme - &sec)) < 1e-12 * max_abs(&sec).max(1.0));
}

#[test]
fn full_mode_matches_born_markov_generator() {
    // theta = 0 has no zero-frequency elements; at T = 0 the zero-frequency rates vanish anyway
    for (theta, t) in [(0.0, 0.3), (0.6, 0.0)] {
        let p = RabiParams { omega_c: 1.0, omega_q: 1.1, g: 0.08, theta, n_max: 3 };
        let sys = rabi_system(p, t);
        let l = sys.dissipator(Method::GmeFull, FilterSpec::Unbounded, true).unwrap();
        let (a, sm) = common::rabi_ops(3);
        let h = common::rabi_h(1.0, 1.1, 0.08, theta, 3);
        let oracle = common::BornMarkov::new(
            &h,
            &[
                common::OracleBath { s: sm, gamma: 0.01, ref_freq: 1.1, temperature: t },
                common::OracleBath { s: a, gamma: 0.01, ref_freq: 1.0, temperature: t },
            ],
        );
        for seed in 0..3 {
            let rho = common::random_density(8, seed);
            let coherent = common::mm(&h, &rho) - common::mm(&rho, &h);
            let want = oracle.rhs(&rho) + coherent.mapv(|z| I * z);
            let got = l.apply(&rho).unwrap();
            assert!(common::max_diff(&got, &want) < 1e-13, "theta {theta} T {t}");
        }
    }
}

#[test]
fn hu_dissipator_is_consistent_only_without_pair_creation() {
    let base = OpenSystem::new(Model::Optomech(dce_params(5, 5, false)), &dce_baths(0.0)).unwrap();
    let l = base.dissipator(Method::Hu, FilterSpec::Unbounded, true).unwrap();
    let mut total = l.clone();
    total.add_hamiltonian(&base.h).unwrap();
    assert!(max_abs(&total.apply(&base.eig.projector(0)).unwrap()) < 1e-12);

    let full = OpenSystem::new(Model::Optomech(dce_params(5, 5, true)), &dce_baths(0.0)).unwrap();
    let l = full.dissipator(Method::Hu, FilterSpec::Unbounded, true).unwrap();
    let mut total = l.clone();
    total.add_hamiltonian(&full.h).unwrap();
    assert!(max_abs(&total.apply(&full.eig.projector(0)).unwrap()) > 1e-6);
    assert!(matches!(
        rabi_system(circuit_qed_params(3), 0.0).dissipator(Method::Hu, FilterSpec::Unbounded, true),
        Err(gme_core::Error::InvalidParameter(_))
    ));
}

#[test]
fn hamiltonian_generators_stay_in_frame() {
    let sys = rabi_system(circuit_qed_params(4), 0.2);
    let l = sys.dissipator(Method::Gme, FilterSpec::Unbounded, true).unwrap();
    let rho = common::random_density(sys.dim(), 3);
    let bare = l.apply(&rho).unwrap();
    let back = l.from_native(&l.apply_native(&l.to_native(&rho)).unwrap());
    assert!(max_abs(&(&bare - &back)) < 1e-13);
    let m = l.to_matrix();
    let v = gme_core::superop::vec_col(&rho);
    let dense = gme_core::superop::unvec_col(&m.dot(&v), sys.dim());
    assert!(max_abs(&(&dense - &bare)) < 1e-13);
}

fn methods() -> impl Strategy<Value = (Method, FilterSpec, bool)> {
    (
        prop_oneof![Just(Method::Standard), Just(Method::Dressed), Just(Method::Gme), Just(Method::GmeFull)],
        prop_oneof![Just(FilterSpec::Unbounded), (0.0f64..0.3).prop_map(FilterSpec::Bandwidth)],
        any::<bool>(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generators_preserve_trace_and_hermiticity(
        (m, f, deph) in methods(),
        t in 0.0f64..1.0,
        theta in 0.0f64..3.0,
        seed in 0u64..1000,
    ) {
        let sys = rabi_system(RabiParams { theta, ..circuit_qed_params(4) }, t);
        let l = sys.dissipator(m, f, deph).unwrap();
        let x = common::random_hermitian(sys.dim(), seed);
        let out = l.apply(&x).unwrap();
        prop_assert!(trace(&out).norm() < 1e-12);
        prop_assert!(hermitian_deviation(&out) < 1e-12);
    }

    #[test]
    fn dressed_generator_obeys_detailed_balance(t in 0.05f64..1.5) {
        let sys = rabi_system(circuit_qed_params(4), t);
        let l = sys.dissipator(Method::Dressed, FilterSpec::Unbounded, false).unwrap();
        let out = l.apply(&gibbs_from_eigen(&sys.eig, t)).unwrap();
        prop_assert!(max_abs(&out) < 1e-13);
    }
}
