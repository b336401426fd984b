mod common;

use std::f64::consts::{PI, SQRT_2};

use nepswalk::exactnum::{QuadRat, Rational};
use nepswalk::neps::{adjacency_matrix, parity_profile, BasisSet, Factor, NepsSpec, Vertex};
use nepswalk::spectral::TensorEigenbasis;
use nepswalk::transfer::kronecker::{brute_force_solve, continued_fraction_solve};
use nepswalk::transfer::{
    analyze_product, check_no_pst_mixed_parity, check_periodicity, check_pgst_mixed,
    check_pst_sufficient, kronecker_solve, CertificateKind, Evidence, TransferOptions, WitnessKind,
};
use nepswalk_oracle::{expm_unitary, ComplexMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tau(k: u32) -> f64 {
    PI / SQRT_2.powi(k as i32)
}

fn oracle_h(spec: &NepsSpec, t: f64) -> ComplexMatrix {
    expm_unitary(&adjacency_matrix(spec).unwrap().to_dense(), t).unwrap()
}

fn all_p3_corpus() -> Vec<NepsSpec> {
    common::small_corpus()
        .into_iter()
        .filter(|s| s.all(Factor::P3))
        .collect()
}

#[test]
fn pst_witnesses_hold_under_the_oracle_and_return_home() {
    for spec in common::small_corpus().iter().chain(&common::named_specs()) {
        let Some((_, w)) = check_pst_sufficient(spec).unwrap() else {
            continue;
        };
        let t = w.time.value();
        let (u, v) = (
            spec.vertex_index(&w.source).unwrap(),
            spec.vertex_index(&w.target).unwrap(),
        );
        if spec.vertex_count() <= 256 {
            let h = oracle_h(spec, t);
            assert!(
                h[(u, v)].norm() >= 1.0 - 1e-9,
                "{spec}: {}",
                h[(u, v)].norm()
            );
            assert!((h[(u, v)] - w.phase).norm() <= 1e-8);
        }
        let basis = TensorEigenbasis::new(spec).unwrap();
        assert!(
            basis.transfer_amplitude(u, u, 2.0 * t).norm() >= 1.0 - 1e-8,
            "{spec}"
        );
        assert!(
            basis.transfer_amplitude(v, u, t).norm() >= 1.0 - 1e-9,
            "{spec}: PST is symmetric"
        );
    }
}

#[test]
fn pst_and_no_pst_certificates_exclude_each_other() {
    for spec in common::small_corpus().iter().chain(&common::named_specs()) {
        let pst = check_pst_sufficient(spec).unwrap();
        let no_pst = check_no_pst_mixed_parity(spec).unwrap();
        assert!(!(pst.is_some() && no_pst.is_some()), "{spec}");
        if spec.all(Factor::P3) && parity_profile(spec.omega()).is_mixed() {
            assert!(
                no_pst.is_some(),
                "{spec}: mixed parity lacks a no-PST certificate"
            );
        }
    }
}

#[test]
fn no_pst_certificate_survives_a_sweep() {
    let spec = NepsSpec::p3(&[[1, 0], [1, 1]]).unwrap();
    let basis = TensorEigenbasis::new(&spec).unwrap();
    let n = spec.vertex_count();
    for u in 0..n {
        let kernels: Vec<_> = (0..n)
            .filter(|&v| v != u)
            .map(|v| basis.kernel(u, v).unwrap())
            .collect();
        for i in 0..4000 {
            let t = 50.0 * i as f64 / 3999.0;
            for k in &kernels {
                assert!(k.fidelity(t) < 1.0 - 1e-6);
            }
        }
    }
}

/// Only the minimum-weight vectors matter at `τ_k` for uniform parity.
#[test]
fn uniform_parity_reduces_to_minimum_weight() {
    let mut specs = all_p3_corpus();
    specs.extend(
        common::named_specs()
            .into_iter()
            .filter(|s| s.all(Factor::P3)),
    );
    let mut checked = 0;
    for spec in specs {
        let profile = parity_profile(spec.omega());
        let Some((k, star, _)) = profile.uniform_star() else {
            continue;
        };
        if star.len() == spec.omega().len() || spec.vertex_count() > 256 {
            continue;
        }
        let reduced = spec.with_omega(star.clone()).unwrap();
        let t = tau(k);
        let ours = TensorEigenbasis::new(&spec).unwrap().transition_matrix(t);
        let gap = ours.max_abs_diff(&oracle_h(&reduced, t));
        assert!(gap <= 1e-9, "{spec}: {gap:e}");
        checked += 1;
    }
    assert!(checked >= 3);
}

/// A single product walk `H_β` has period `2τ_k`, so it is even about `τ_k`
/// and every odd multiple of it.
#[test]
fn singleton_walks_are_time_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for spec in all_p3_corpus().into_iter().filter(|s| s.omega().len() == 1) {
        let k = spec.omega().vectors()[0].tuple().weight();
        let basis = TensorEigenbasis::new(&spec).unwrap();
        for _ in 0..10 {
            let m: i32 = rng.gen_range(0..1000);
            let t = f64::from(2 * m + 1) * tau(k);
            let gap = basis
                .transition_matrix(t)
                .max_abs_diff(&basis.transition_matrix(-t));
            assert!(gap <= 1e-8, "{spec} at {t}: {gap:e}");
        }
    }
}

/// The product walks of distinct basis vectors commute and multiply.
#[test]
fn walk_factors_over_basis_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for spec in common::small_corpus()
        .into_iter()
        .filter(|s| s.omega().len() == 2)
    {
        let basis = TensorEigenbasis::new(&spec).unwrap();
        let parts: Vec<NepsSpec> = spec
            .omega()
            .iter()
            .map(|b| common::singleton(&spec, b))
            .collect();
        for _ in 0..10 {
            let t = rng.gen_range(-40.0..40.0);
            let whole = basis.transition_matrix(t);
            let (a, b) = (oracle_h(&parts[0], t), oracle_h(&parts[1], t));
            assert!(whole.max_abs_diff(&a.matmul(&b)) <= 1e-8, "{spec} at {t}");
            assert!(a.matmul(&b).max_abs_diff(&b.matmul(&a)) <= 1e-8);
        }
    }
}

#[test]
fn periodicity_certificates_hold() {
    for spec in common::small_corpus().iter().chain(&common::named_specs()) {
        let cert = check_periodicity(spec, &TransferOptions::default()).unwrap();
        match cert.evidence {
            Evidence::Periodic { time, gamma, .. } => {
                let basis = TensorEigenbasis::new(spec).unwrap();
                for u in 0..spec.vertex_count().min(32) {
                    let back = basis.transfer_amplitude(u, u, time.value());
                    assert!((back - gamma).norm() <= 1e-9, "{spec} at {time}");
                }
            }
            Evidence::RatioViolation { eigenvalues, .. } => {
                assert_eq!(cert.kind, CertificateKind::NoPstRatio);
                let num = eigenvalues.lambda_k - eigenvalues.lambda_l;
                let den = eigenvalues.lambda_r - eigenvalues.lambda_s;
                assert!(!nepswalk::exactnum::ratio_is_rational(num, den).unwrap());
            }
            Evidence::Unknown { .. } => {}
            other => panic!("{spec}: unexpected periodicity evidence {other:?}"),
        }
    }
}

#[test]
fn mixed_witnesses_get_better_with_smaller_epsilon() {
    let spec = NepsSpec::p3(&[[1, 0], [1, 1]]).unwrap();
    let basis = TensorEigenbasis::new(&spec).unwrap();
    let mut last = 0.0;
    for epsilon in [1e-2, 1e-3, 1e-4, 1e-5] {
        let found = check_pgst_mixed(&spec, &TransferOptions::with_epsilon(epsilon)).unwrap();
        let (_, w) = found
            .iter()
            .find(|(c, _)| c.kind == CertificateKind::PgstCaseI)
            .unwrap();
        let (u, v) = (
            spec.vertex_index(&w.source).unwrap(),
            spec.vertex_index(&w.target).unwrap(),
        );
        let fidelity = basis.transfer_amplitude(u, v, w.time.value()).norm();
        assert!(fidelity >= 1.0 - epsilon, "ε={epsilon}: {fidelity}");
        assert!(w.time.value() >= last);
        last = w.time.value();
    }
}

#[test]
fn pgst_witnesses_are_confirmed_by_the_oracle() {
    let opts = TransferOptions::default();
    for spec in all_p3_corpus() {
        let Ok(found) = check_pgst_mixed(&spec, &opts) else {
            continue;
        };
        for (cert, w) in found {
            let h = oracle_h(&spec, w.time.value());
            let (u, v) = (
                spec.vertex_index(&w.source).unwrap(),
                spec.vertex_index(&w.target).unwrap(),
            );
            assert!(
                h[(u, v)].norm() >= 1.0 - opts.epsilon,
                "{spec} {:?}",
                cert.kind
            );
            let d = w.derivation.as_ref().unwrap();
            assert!(common::kronecker_holds(
                &d.theta, &d.alpha, d.delta, d.p, d.q
            ));
        }
    }
}

/// In `A □ B` with `A` periodic, one witness time serves every first
/// coordinate at once.
#[test]
fn product_witness_serves_every_left_vertex() {
    let edge = NepsSpec::p2(&[[1]]).unwrap();
    let path = NepsSpec::p3(&[[1]]).unwrap();
    let opts = TransferOptions::default();
    let report = analyze_product(&edge, &path, &opts).unwrap();
    let product = edge.cartesian_product(&path).unwrap();
    let basis = TensorEigenbasis::new(&product).unwrap();
    let w = report
        .witnesses_of(WitnessKind::Pgst)
        .find(|w| w.target.coords()[1] == 2)
        .unwrap();
    for x in 0..2u8 {
        let u = product.vertex_index(&Vertex(vec![x, 0])).unwrap();
        let v = product.vertex_index(&Vertex(vec![x, 2])).unwrap();
        assert!(basis.transfer_amplitude(u, v, w.time.value()).norm() >= 1.0 - opts.epsilon);
    }
}

fn theta_strategy() -> impl Strategy<Value = QuadRat> {
    (0u32..8, 1i128..20, 0i128..20)
        .prop_map(|(j, b, a)| QuadRat::new(Rational::new(a, 1 << j), Rational::new(b, 1 << j)))
}

fn alpha_strategy() -> impl Strategy<Value = QuadRat> {
    (0i128..1000, 1i128..1000, -3i128..=3, 1i128..16)
        .prop_map(|(a, d, b, e)| QuadRat::new(Rational::new(a, d), Rational::new(b, e)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn kronecker_solutions_verify_exactly(theta in theta_strategy(), alpha in alpha_strategy(), e in 1i32..=7) {
        let delta = 10f64.powi(-e);
        let sol = kronecker_solve(&theta, &alpha, delta, 100_000_000).unwrap();
        prop_assert!(sol.p != 0);
        prop_assert!(common::kronecker_holds(&theta, &alpha, delta, sol.p, sol.q));
        prop_assert!(sol.residual.abs() < delta);
    }

    #[test]
    fn continued_fractions_agree_with_scanning(theta in theta_strategy(), alpha in alpha_strategy(), e in 1i32..=4) {
        let delta = 10f64.powi(-e);
        let cf = continued_fraction_solve(&theta, &alpha, delta, 100_000_000).unwrap();
        let scan = brute_force_solve(&theta, &alpha, delta, 10_000_000).unwrap();
        prop_assert_eq!(cf.is_some(), scan.is_some());
        if let (Some(a), Some(b)) = (cf, scan) {
            prop_assert!(common::kronecker_holds(&theta, &alpha, delta, a.0, a.1));
            prop_assert!(common::kronecker_holds(&theta, &alpha, delta, b.0, b.1));
        }
    }
}

#[test]
fn rational_theta_is_rejected() {
    let theta = QuadRat::rational(1, 2);
    let alpha = QuadRat::rational(1, 3);
    assert!(kronecker_solve(&theta, &alpha, 1e-3, 1000).is_err());
}

#[test]
fn basis_set_order_does_not_change_reports() {
    let a = NepsSpec::p3(&[[1, 0, 0], [0, 1, 1]]).unwrap();
    let b = a
        .with_omega(BasisSet::from_rows(&[[0, 1, 1], [1, 0, 0]]).unwrap())
        .unwrap();
    let opts = TransferOptions::default();
    let ra = nepswalk::transfer::classify(&a, &opts).unwrap();
    let rb = nepswalk::transfer::classify(&b, &opts).unwrap();
    let kinds = |r: &nepswalk::transfer::TransferReport| -> Vec<CertificateKind> {
        r.certificates.iter().map(|c| c.kind).collect()
    };
    assert_eq!(kinds(&ra), kinds(&rb));
    let times = |r: &nepswalk::transfer::TransferReport| -> Vec<String> {
        r.witnesses
            .iter()
            .map(|w| format!("{} {} {}", w.source, w.target, w.time))
            .collect()
    };
    assert_eq!(times(&ra), times(&rb));
}
