//! Browser bindings: shell points, sharpness counts, Monge-Ampere determinants.

use latshell::{
    fit_exponent, monge_ampere_det, sharpness_count, shell_count_fiber, ConvexBody, Convention, FdScheme, IntVec,
    PhaseFunction, ShellQuery,
};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use wasm_bindgen::prelude::*;

fn js(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn rational(s: &str) -> Result<BigRational, JsError> {
    let s = s.trim();
    if let Ok(r) = s.parse::<BigRational>() {
        return Ok(r);
    }
    let x: f64 = s.parse().map_err(|_| js(format!("not a number: {s}")))?;
    BigRational::from_float(x).ok_or_else(|| js(format!("not finite: {s}")))
}

/// `p = 2` is the Euclidean disc.
fn body(p: u32) -> Result<ConvexBody, JsError> {
    if p == 2 { ConvexBody::ball(2) } else { ConvexBody::pball(p, 2) }.map_err(js)
}

/// Lattice points of the planar shell `R <= ||k||_p <= R + delta`, flattened as x0,y0,x1,y1,...
#[wasm_bindgen]
pub fn shell_points(p: u32, r: &str, delta: &str) -> Result<Vec<i32>, JsError> {
    let b = body(p)?;
    let (r, delta) = (rational(r)?, rational(delta)?);
    let outer = (&r + &delta).to_f64().unwrap_or(0.0);
    if outer > 400.0 {
        return Err(js("R + delta must be at most 400"));
    }
    let m = (outer * b.extent(0)).ceil() as i32 + 1;
    let mut pts = Vec::new();
    for x in -m..=m {
        for y in -m..=m {
            let k = IntVec(vec![x as i64, y as i64]);
            if b.shell_predicate_exact(&k, &r, &delta, Convention::Closed).map_err(js)? {
                pts.push(x);
                pts.push(y);
            }
        }
    }
    Ok(pts)
}

/// Shell count from the fiber counter, as a decimal string.
#[wasm_bindgen]
pub fn shell_count(p: u32, r: &str, delta: &str) -> Result<String, JsError> {
    let q = ShellQuery::new(body(p)?, rational(r)?, rational(delta)?, Convention::Closed).map_err(js)?;
    Ok(shell_count_fiber(&q).map_err(js)?.count.to_string())
}

/// Closed-form sharpness counts for `t = 2..=t_max`, as floats.
#[wasm_bindgen]
pub fn sharpness_counts(d: usize, t_max: u64) -> Result<Vec<f64>, JsError> {
    let c = BigRational::from_integer(1.into());
    (2..=t_max.max(2))
        .map(|t| Ok(sharpness_count(d, t, &c).map_err(js)?.count.to_f64().unwrap_or(f64::INFINITY)))
        .collect()
}

/// Log-log slope of the sharpness counts against `q = t^(d+1)`.
#[wasm_bindgen]
pub fn sharpness_slope(d: usize, t_max: u64) -> Result<f64, JsError> {
    let counts = sharpness_counts(d, t_max)?;
    let pts: Vec<(f64, f64)> =
        counts.iter().enumerate().map(|(i, &n)| (((i + 2) as f64).powi(d as i32 + 1), n)).collect();
    Ok(fit_exponent(&pts).map_err(js)?.slope)
}

/// Bordered Monge-Ampere determinant at `(x, y)`; `p = 0` selects the parabolic phase,
/// otherwise the difference gauge of the planar `p`-ball.
#[wasm_bindgen]
pub fn ma_determinant(p: u32, x0: f64, x1: f64, y0: f64, y1: f64) -> Result<f64, JsError> {
    let phi = if p == 0 { PhaseFunction::parabolic(2) } else { PhaseFunction::difference_gauge(body(p)?) }.map_err(js)?;
    monge_ampere_det(&phi, &[x0, x1], &[y0, y1], &FdScheme::default()).map_err(js)
}
