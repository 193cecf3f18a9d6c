use latshell::phase::{max_exponent, PhaseKind};
use latshell::{check_quasi_homogeneity, AnisotropicDilation, ConvexBody, PhaseFunction};
use num_rational::Rational64;
use proptest::prelude::*;

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn alpha_strategy() -> impl Strategy<Value = Vec<Rational64>> {
    prop::sample::select(vec![
        vec![r(1, 1), r(1, 1)],
        vec![r(2, 3), r(4, 3)],
        vec![r(1, 2), r(3, 2)],
        vec![r(3, 4), r(3, 4), r(3, 2)],
        vec![r(1, 1), r(1, 1), r(1, 1)],
    ])
}

proptest! {
    #[test]
    fn dilations_compose(alpha in alpha_strategy(), q in 0.1f64..20.0, q2 in 0.1f64..20.0,
                         seed in prop::collection::vec(-5.0f64..5.0, 3)) {
        let x = &seed[..alpha.len()];
        let a = AnisotropicDilation::new(alpha.clone(), q).unwrap();
        let b = AnisotropicDilation::new(alpha.clone(), q2).unwrap();
        let ab = AnisotropicDilation::new(alpha, q * q2).unwrap();
        let lhs = a.dilate(&b.dilate(x).unwrap()).unwrap();
        let rhs = ab.dilate(x).unwrap();
        for (u, v) in lhs.iter().zip(&rhs) {
            prop_assert!((u - v).abs() <= 1e-12 * v.abs().max(f64::MIN_POSITIVE), "{u} vs {v}");
        }
    }

    #[test]
    fn parabolic_is_translation_invariant(d in 2usize..5,
                                          pts in prop::collection::vec(-1000i32..1000, 12)) {
        let phi = PhaseFunction::parabolic(d).unwrap();
        let x: Vec<f64> = pts[..d].iter().map(|&v| v as f64).collect();
        let y: Vec<f64> = pts[4..4 + d].iter().map(|&v| v as f64).collect();
        let c: Vec<f64> = pts[8..8 + d].iter().map(|&v| v as f64).collect();
        let xc: Vec<f64> = x.iter().zip(&c).map(|(a, b)| a + b).collect();
        let yc: Vec<f64> = y.iter().zip(&c).map(|(a, b)| a + b).collect();
        prop_assert_eq!(phi.evaluate(&xc, &yc).unwrap(), phi.evaluate(&x, &y).unwrap());
    }

    #[test]
    fn constructor_enforces_exponent_rules(n1 in 1i64..12, n2 in 1i64..12, den in 1i64..7) {
        let alpha = vec![r(n1, den), r(n2, den)];
        let ok = alpha.iter().sum::<Rational64>() == r(2, 1) && alpha.iter().all(|a| *a <= max_exponent(2));
        let built = PhaseFunction::with_exponents(PhaseKind::Parabolic { dim: 2 }, alpha, r(4, 3));
        prop_assert_eq!(built.is_ok(), ok);
    }
}

#[test]
fn catalog_phases_are_quasi_homogeneous() {
    let phases = [
        PhaseFunction::parabolic(2).unwrap(),
        PhaseFunction::parabolic(3).unwrap(),
        PhaseFunction::difference_gauge(ConvexBody::ball(2).unwrap()).unwrap(),
        PhaseFunction::difference_gauge(ConvexBody::pball(4, 3).unwrap()).unwrap(),
    ];
    for phi in &phases {
        let rep = check_quasi_homogeneity(phi, 500, &[2.0, 8.0, 27.0, 0.5], 1e-10, 3).unwrap();
        assert!(rep.pass, "{:?}: {}", phi.kind(), rep.max_relative_error);
    }
    let wrong =
        PhaseFunction::declared(PhaseKind::Parabolic { dim: 2 }, vec![r(1, 2), r(3, 2)], r(3, 2)).unwrap();
    let rep = check_quasi_homogeneity(&wrong, 200, &[2.0, 8.0], 1e-10, 3).unwrap();
    assert!(!rep.pass);
}
