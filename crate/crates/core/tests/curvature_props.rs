use latshell::curvature::DEFAULT_FLOOR;
use latshell::{certify_level_set, monge_ampere_det, ConvexBody, FdOrder, FdScheme, LevelSetScan, PhaseFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ball() -> PhaseFunction {
    PhaseFunction::difference_gauge(ConvexBody::ball(2).unwrap()).unwrap()
}

/// Pairs in `[-2, 2]^2` with `1/2 <= |x - y| <= 2`.
fn sample_pairs(n: usize, seed: u64) -> Vec<([f64; 2], [f64; 2])> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let x: [f64; 2] = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let y: [f64; 2] = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let r = ((x[0] - y[0]) * (x[0] - y[0]) + (x[1] - y[1]) * (x[1] - y[1])).sqrt();
        if (0.5..=2.0).contains(&r) {
            out.push((x, y));
        }
    }
    out
}

fn dist(x: &[f64; 2], y: &[f64; 2]) -> f64 {
    ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt()
}

#[test]
fn parabolic_determinant_is_minus_two() {
    let phi = PhaseFunction::parabolic(2).unwrap();
    let scheme = FdScheme::default();
    for (x, y) in sample_pairs(100, 1) {
        let det = monge_ampere_det(&phi, &x, &y, &scheme).unwrap();
        assert!((det + 2.0).abs() < 1e-3, "{det}");
    }
}

#[test]
fn halving_the_step_shrinks_the_error_on_the_ball() {
    let phi = ball();
    let coarse = FdScheme::new(2e-2, FdOrder::Second).unwrap();
    let fine = FdScheme::new(1e-2, FdOrder::Second).unwrap();
    let (mut e_coarse, mut e_fine) = (0.0, 0.0);
    for (x, y) in sample_pairs(100, 2) {
        let exact = 1.0 / dist(&x, &y);
        e_coarse += (monge_ampere_det(&phi, &x, &y, &coarse).unwrap().abs() - exact).abs();
        e_fine += (monge_ampere_det(&phi, &x, &y, &fine).unwrap().abs() - exact).abs();
    }
    assert!(e_coarse / e_fine >= 3.0, "coarse {e_coarse} fine {e_fine}");
}

#[test]
fn ball_determinant_scales_like_one_over_t() {
    let phi = ball();
    let scheme = FdScheme::default();
    for (x, y) in sample_pairs(100, 3) {
        let base = monge_ampere_det(&phi, &x, &y, &scheme).unwrap().abs() * dist(&x, &y);
        for t in [0.5, 1.0, 2.0] {
            let dir = [(x[0] - y[0]) / dist(&x, &y), (x[1] - y[1]) / dist(&x, &y)];
            let xt = [y[0] + t * dir[0], y[1] + t * dir[1]];
            let det = monge_ampere_det(&phi, &xt, &y, &scheme).unwrap().abs();
            assert!((det - base / t).abs() <= 0.01 * base / t, "t={t} det={det} base={base}");
        }
    }
}

#[test]
fn certification_is_deterministic() {
    let scan = LevelSetScan::new(ball(), 1.0, 300, 42, 1e-2);
    let scheme = FdScheme::default();
    let a = certify_level_set(&scan, &scheme).unwrap();
    let b = certify_level_set(&scan, &scheme).unwrap();
    assert_eq!(a, b);
    assert!(a.hypothesis_pass);
    assert_eq!(a.floor, DEFAULT_FLOOR);
}
