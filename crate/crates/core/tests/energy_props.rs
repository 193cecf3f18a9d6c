use latshell::energy::discrete_energy_direct;
use latshell::{discrete_energy, EnergyParams};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use proptest::prelude::*;

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn c(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fast_path_matches_double_loop(q in 2u64..10, s in 1.5f64..1.99, cn in 1i64..4,
                                     alpha in prop::sample::select(vec![(1i64, 1i64), (2, 3), (1, 2)])) {
        let a = vec![r(alpha.0, alpha.1), r(2, 1) - r(alpha.0, alpha.1)];
        let p = EnergyParams::new(2, q, a, c(cn, 2), s).unwrap();
        let fast = discrete_energy(&p).unwrap();
        let direct = discrete_energy_direct(&p).unwrap();
        prop_assert!((fast - direct).abs() <= 1e-10 * direct.abs().max(f64::MIN_POSITIVE), "{fast} vs {direct}");
    }

    #[test]
    fn relabeling_axes_with_alpha_is_invisible(q in 2u64..40, s in 1.5f64..1.99) {
        let a = EnergyParams::new(2, q, vec![r(2, 3), r(4, 3)], c(1, 1), s).unwrap();
        let b = EnergyParams::new(2, q, vec![r(4, 3), r(2, 3)], c(1, 1), s).unwrap();
        let (ea, eb) = (discrete_energy(&a).unwrap(), discrete_energy(&b).unwrap());
        prop_assert!((ea - eb).abs() <= 1e-12 * ea, "{ea} vs {eb}");
    }
}

#[test]
fn energy_increases_with_s_on_the_test_grid() {
    for q in [4u64, 8, 16, 32] {
        let e: Vec<f64> = [1.5, 1.7, 1.9]
            .iter()
            .map(|&s| discrete_energy(&EnergyParams::new(2, q, vec![r(1, 1), r(1, 1)], c(1, 1), s).unwrap()).unwrap())
            .collect();
        assert!(e[0] < e[1] && e[1] < e[2], "q={q} {e:?}");
    }
}

#[test]
fn single_point_box_has_zero_energy() {
    let p = EnergyParams::new(2, 3, vec![r(1, 1), r(1, 1)], c(1, 10), 1.5).unwrap();
    assert_eq!(discrete_energy(&p).unwrap(), 0.0);
    assert_eq!(discrete_energy_direct(&p).unwrap(), 0.0);
}
