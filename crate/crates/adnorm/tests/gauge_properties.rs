//! Property tests for the gauge axioms: permutation symmetry, subadditivity,
//! positive homogeneity and subgradient feasibility over generated inputs.

use adnorm::gauge::{Gauge, OrbitGaugeSpec};
use proptest::prelude::*;

fn finite_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, n)
}

fn gauges(n: usize) -> Vec<Gauge> {
    let mut out = vec![
        Gauge::p_gauge(n, 1.5).unwrap(),
        Gauge::spectral(n),
        Gauge::trace(n),
        Gauge::ky_fan(n, 2).unwrap(),
    ];
    if n == 3 {
        out.push(Gauge::orbit(OrbitGaugeSpec::normalized(&[1.0, 1.0, -2.0]).unwrap()).unwrap());
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn permutation_symmetry(x in finite_vec(3), i in 0usize..3, j in 0usize..3) {
        for g in gauges(3) {
            let v0 = g.eval(&x).unwrap();
            let mut y = x.clone();
            y.swap(i, j);
            let v1 = g.eval(&y).unwrap();
            prop_assert!((v0 - v1).abs() <= 1e-10 * (1.0 + v0.abs()));
        }
    }

    #[test]
    fn subadditivity(x in finite_vec(3), y in finite_vec(3)) {
        for g in gauges(3) {
            let s: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            let lhs = g.eval(&s).unwrap();
            let rhs = g.eval(&x).unwrap() + g.eval(&y).unwrap();
            prop_assert!(lhs <= rhs + 1e-10 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn positive_homogeneity(x in finite_vec(3), lambda in 0.0f64..5.0) {
        for g in gauges(3) {
            let lx: Vec<f64> = x.iter().map(|t| lambda * t).collect();
            let a = g.eval(&lx).unwrap();
            let b = lambda * g.eval(&x).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn subgradient_supports_the_gauge(x in finite_vec(3), z in finite_vec(3)) {
        prop_assume!(x.iter().any(|t| t.abs() > 1e-6));
        for g in gauges(3) {
            let u = g.subgradient(&x).unwrap();
            let pair: f64 = u.iter().zip(&x).map(|(a, b)| a * b).sum();
            let ex = g.eval(&x).unwrap();
            prop_assert!((pair - ex).abs() <= 1e-9 * (1.0 + ex));
            let feas: f64 = u.iter().zip(&z).map(|(a, b)| a * b).sum();
            prop_assert!(feas <= g.eval(&z).unwrap() + 1e-9);
        }
    }
}
