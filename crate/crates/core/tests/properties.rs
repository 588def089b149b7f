mod common;

use cliffpert::analysis::{abs_series, min_order_for_bound};
use cliffpert::compile::{angle_transform, compile, InteractionPictureProgram, Rotation};
use cliffpert::models::generate_e3lin2;
use cliffpert::oracle::dense;
use cliffpert::propagate::{propagate, PropagationConfig};
use cliffpert::{Phase, PauliString};
use proptest::prelude::*;

use common::{random_circuit, random_pauli, rng};

fn pauli(n: usize) -> impl Strategy<Value = PauliString> {
    proptest::collection::vec(0u8..4, n).prop_map(|v| {
        let s: String = v.iter().map(|&c| ['I', 'X', 'Y', 'Z'][c as usize]).collect();
        s.parse().unwrap()
    })
}

fn dense_product(a: &PauliString, b: &PauliString) -> dense::Matrix {
    dense::matmul(&dense::pauli_matrix(a), &dense::pauli_matrix(b))
}

proptest! {
    #[test]
    fn product_matches_matrices((a, b) in (1usize..=4).prop_flat_map(|n| (pauli(n), pauli(n)))) {
        let (p, phase) = a.multiply(&b).unwrap();
        let want = dense_product(&a, &b);
        let got = dense::scale(&dense::pauli_matrix(&p), phase.as_complex());
        prop_assert!(dense::max_abs_diff(&want, &got) < 1e-12);
    }

    #[test]
    fn commutation_matches_matrices((a, b) in (1usize..=4).prop_flat_map(|n| (pauli(n), pauli(n)))) {
        let ab = dense_product(&a, &b);
        let ba = dense_product(&b, &a);
        let commute = dense::max_abs_diff(&ab, &ba) < 1e-12;
        prop_assert_eq!(a.commutes(&b).unwrap(), commute);
        prop_assert_eq!(b.commutes(&a).unwrap(), commute);
    }

    #[test]
    fn product_is_associative((a, b, c) in (1usize..=70).prop_flat_map(|n| (pauli(n), pauli(n), pauli(n)))) {
        let (ab, p1) = a.multiply(&b).unwrap();
        let (abc, p2) = ab.multiply(&c).unwrap();
        let (bc, q1) = b.multiply(&c).unwrap();
        let (abc2, q2) = a.multiply(&bc).unwrap();
        prop_assert_eq!(&abc, &abc2);
        prop_assert_eq!(p1 * p2, q1 * q2);
    }

    #[test]
    fn self_product_is_identity(a in (1usize..=130).prop_flat_map(pauli)) {
        let (p, ph) = a.multiply(&a).unwrap();
        prop_assert!(p.is_identity());
        prop_assert_eq!(ph, Phase::ONE);
    }

    #[test]
    fn text_round_trip(a in (1usize..=200).prop_flat_map(pauli)) {
        let s = a.to_string();
        prop_assert_eq!(s.parse::<PauliString>().unwrap(), a);
    }

    #[test]
    fn angle_transform_range(theta in -50.0f64..50.0) {
        let (t, k) = angle_transform(theta).unwrap();
        prop_assert!(t > -std::f64::consts::FRAC_PI_4 - 1e-12 && t <= std::f64::consts::FRAC_PI_4 + 1e-12);
        prop_assert!(k < 4);
        let wrapped = (theta - t - f64::from(k) * std::f64::consts::FRAC_PI_2) / (2.0 * std::f64::consts::PI);
        prop_assert!((wrapped - wrapped.round()).abs() < 1e-9);
    }

    #[test]
    fn truncated_reports_are_prefixes(seed in any::<u64>(), k in 0usize..6) {
        let mut r = rng(seed);
        let n = 6;
        let obs = random_pauli(&mut r, n);
        let rotations = (0..10)
            .map(|i| Rotation { axis: random_pauli(&mut r, n), theta: 0.1 + 0.05 * i as f64, source_index: i })
            .collect();
        let prog = InteractionPictureProgram { n, rotations, observable: obs, sign: 1, angle_transformed: true };
        let full = propagate(&prog, &PropagationConfig::default()).unwrap().report();
        let cut = propagate(&prog, &PropagationConfig::with_order(k)).unwrap().report();
        prop_assert_eq!(cut.per_order_value.len(), k + 1);
        for j in 0..=k {
            prop_assert!((cut.per_order_value[j] - full.per_order_value[j]).abs() < 1e-12);
            prop_assert_eq!(cut.per_order_term_count[j], full.per_order_term_count[j]);
        }
        let total: f64 = full.per_order_value.iter().sum();
        prop_assert!((full.expval() - total).abs() < 1e-12);
    }

    #[test]
    fn min_order_is_monotone(n in 1usize..150, theta in 0.0f64..0.78, d in 0.001f64..0.5) {
        let k = min_order_for_bound(n, theta, d);
        prop_assert!(min_order_for_bound(n + 1, theta, d) >= k);
        prop_assert!(min_order_for_bound(n, theta, d * 0.5) >= k);
        prop_assert!(k <= n);
        let full = abs_series(n, theta, n);
        prop_assert!((full / (1.0 + (theta.sin() / 2.0).abs()).powi(n as i32) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn e3lin2_invariants_over_many_seeds() {
    for seed in 0..1000u64 {
        let d = 1 + (seed % 5) as usize;
        let n = 20 + (seed % 31) as usize;
        let inst = generate_e3lin2(n, d, seed).unwrap();
        assert_eq!(inst.clauses.len(), n * d / 3);
        assert!(inst.degrees().iter().all(|&g| g <= d));
        inst.validate().unwrap();
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let mut r = rng(99);
    let n = 10;
    let c = random_circuit(&mut r, n, 60);
    let obs = random_pauli(&mut r, n);
    let prog = compile(&c, &obs).unwrap();
    let run = |threads| {
        let cfg = PropagationConfig {
            threads: Some(threads),
            ..PropagationConfig::default()
        };
        let p = propagate(&prog, &cfg).unwrap();
        (p.sum.terms(), p.report())
    };
    let (t1, r1) = run(1);
    assert!(t1.len() > 16384, "needs enough terms to exercise the parallel path, got {}", t1.len());
    for threads in [2, 3, 8] {
        let (t, rep) = run(threads);
        assert_eq!(t, t1);
        assert_eq!(rep.per_order_value, r1.per_order_value);
        assert_eq!(rep.per_order_term_count, r1.per_order_term_count);
    }
}
