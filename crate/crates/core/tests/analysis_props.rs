use latshell::fit_exponent;
use proptest::prelude::*;

fn grid() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::btree_set(1u32..2000, 3..12).prop_map(|s| s.into_iter().map(|v| v as f64 / 10.0).collect())
}

proptest! {
    #[test]
    fn slope_is_scale_equivariant(xs in grid(), noise in prop::collection::vec(0.5f64..2.0, 12), c in 1e-3f64..1e3) {
        let rows: Vec<(f64, f64)> = xs.iter().zip(&noise).map(|(&x, &n)| (x, x.powf(1.7) * n)).collect();
        let scaled: Vec<(f64, f64)> = rows.iter().map(|&(x, y)| (x, c * y)).collect();
        let (a, b) = (fit_exponent(&rows).unwrap(), fit_exponent(&scaled).unwrap());
        prop_assert!((a.slope - b.slope).abs() <= 1e-12 * a.slope.abs().max(1.0));
        prop_assert!((b.intercept - a.intercept - c.ln()).abs() <= 1e-9);
    }

    #[test]
    fn exact_power_law_is_recovered(xs in grid(), p in -3.0f64..4.0, c in 0.1f64..10.0) {
        let rows: Vec<(f64, f64)> = xs.iter().map(|&x| (x, c * x.powf(p))).collect();
        let f = fit_exponent(&rows).unwrap();
        prop_assert!((f.slope - p).abs() <= 1e-10);
        prop_assert!((f.r_squared - 1.0).abs() <= 1e-10 || p.abs() < 1e-6);
    }
}
