//! Finite-difference derivatives of a phase, the bordered Monge-Ampere
//! determinant
//!
//! ```text
//!     | 0            grad_x phi       |
//! det |                               |
//!     | -(grad_y phi)^T   d2phi/dx_i dy_j |
//! ```
//!
//! and sampling scans that certify it stays away from zero on a level set
//! `{(x, y) in B x B : phi(x, y) = t}`, `B` the Euclidean unit ball.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::phase::PhaseFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FdOrder {
    /// Central differences.
    Second,
    /// Richardson extrapolation of central differences at `h` and `h/2`.
    Fourth,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdScheme {
    pub h: f64,
    pub order: FdOrder,
}

impl Default for FdScheme {
    fn default() -> Self {
        FdScheme { h: 1e-4, order: FdOrder::Second }
    }
}

impl FdScheme {
    pub fn new(h: f64, order: FdOrder) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(invalid(format!("step must be positive, got {h}")));
        }
        Ok(FdScheme { h, order })
    }

    /// Pairs closer than this are treated as lying on the diagonal.
    pub fn diagonal_exclusion(&self) -> f64 {
        10.0 * self.h
    }

    fn extrapolate<F: Fn(f64) -> Result<f64>>(&self, estimate: F) -> Result<f64> {
        match self.order {
            FdOrder::Second => estimate(self.h),
            FdOrder::Fourth => {
                let coarse = estimate(self.h)?;
                let fine = estimate(self.h / 2.0)?;
                Ok((4.0 * fine - coarse) / 3.0)
            }
        }
    }
}

fn precheck(phi: &PhaseFunction, x: &[f64], y: &[f64], scheme: &FdScheme) -> Result<()> {
    check_dim(phi.dim(), x.len())?;
    check_dim(phi.dim(), y.len())?;
    let dist = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    if dist < scheme.diagonal_exclusion() {
        return Err(Error::NumericalDomain(format!(
            "|x - y| = {dist:e} is inside the diagonal exclusion zone {:e}",
            scheme.diagonal_exclusion()
        )));
    }
    Ok(())
}

fn eval(phi: &PhaseFunction, x: &[f64], y: &[f64]) -> Result<f64> {
    let v = phi.evaluate_unchecked(x, y);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NumericalDomain(format!("phi is not finite at x={x:?}, y={y:?}")))
    }
}

fn shifted(v: &[f64], i: usize, by: f64) -> Vec<f64> {
    let mut out = v.to_vec();
    out[i] += by;
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    X,
    Y,
}

fn gradient(phi: &PhaseFunction, x: &[f64], y: &[f64], scheme: &FdScheme, side: Side) -> Result<Vec<f64>> {
    precheck(phi, x, y, scheme)?;
    (0..phi.dim())
        .map(|i| {
            scheme.extrapolate(|h| {
                let (plus, minus) = match side {
                    Side::X => (eval(phi, &shifted(x, i, h), y)?, eval(phi, &shifted(x, i, -h), y)?),
                    Side::Y => (eval(phi, x, &shifted(y, i, h))?, eval(phi, x, &shifted(y, i, -h))?),
                };
                Ok((plus - minus) / (2.0 * h))
            })
        })
        .collect()
}

pub fn grad_x(phi: &PhaseFunction, x: &[f64], y: &[f64], scheme: &FdScheme) -> Result<Vec<f64>> {
    gradient(phi, x, y, scheme, Side::X)
}

pub fn grad_y(phi: &PhaseFunction, x: &[f64], y: &[f64], scheme: &FdScheme) -> Result<Vec<f64>> {
    gradient(phi, x, y, scheme, Side::Y)
}

/// `M[i][j] ~ d^2 phi / dx_i dy_j` by nested central differences.
pub fn mixed_hessian(phi: &PhaseFunction, x: &[f64], y: &[f64], scheme: &FdScheme) -> Result<Vec<Vec<f64>>> {
    precheck(phi, x, y, scheme)?;
    let d = phi.dim();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    scheme.extrapolate(|h| {
                        let (xp, xm) = (shifted(x, i, h), shifted(x, i, -h));
                        let (yp, ym) = (shifted(y, j, h), shifted(y, j, -h));
                        let v = eval(phi, &xp, &yp)? - eval(phi, &xp, &ym)? - eval(phi, &xm, &yp)?
                            + eval(phi, &xm, &ym)?;
                        Ok(v / (4.0 * h * h))
                    })
                })
                .collect()
        })
        .collect()
}

/// Row-major `(d+1) x (d+1)` bordered matrix: top row `(0, grad_x)`,
/// left column `-(grad_y)^T`, mixed Hessian in the lower-right block.
pub fn bordered_matrix(gx: &[f64], gy: &[f64], hessian: &[Vec<f64>]) -> Vec<f64> {
    let d = gx.len();
    let n = d + 1;
    let mut m = vec![0.0; n * n];
    m[1..n].copy_from_slice(gx);
    for i in 0..d {
        m[(i + 1) * n] = -gy[i];
        m[(i + 1) * n + 1..(i + 2) * n].copy_from_slice(&hessian[i]);
    }
    m
}

/// Determinant by LU factorization with partial pivoting.
pub fn lu_determinant(n: usize, row_major: &[f64]) -> f64 {
    nalgebra::DMatrix::from_row_slice(n, n, row_major).lu().determinant()
}

pub fn monge_ampere_det(phi: &PhaseFunction, x: &[f64], y: &[f64], scheme: &FdScheme) -> Result<f64> {
    Ok(monge_ampere_parts(phi, x, y, scheme)?.det)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MongeAmpereParts {
    pub grad_x: Vec<f64>,
    pub grad_y: Vec<f64>,
    pub hessian: Vec<Vec<f64>>,
    pub det: f64,
}

pub fn monge_ampere_parts(phi: &PhaseFunction, x: &[f64], y: &[f64], scheme: &FdScheme) -> Result<MongeAmpereParts> {
    let gx = grad_x(phi, x, y, scheme)?;
    let gy = grad_y(phi, x, y, scheme)?;
    let hessian = mixed_hessian(phi, x, y, scheme)?;
    let det = lu_determinant(gx.len() + 1, &bordered_matrix(&gx, &gy, &hessian));
    Ok(MongeAmpereParts { grad_x: gx, grad_y: gy, hessian, det })
}

/// Default floor below which a minimum is reported as a hypothesis failure.
pub const DEFAULT_FLOOR: f64 = 1e-3;
pub const DEFAULT_MAX_DRAWS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct LevelSetScan {
    pub phi: PhaseFunction,
    pub t: f64,
    pub n_samples: usize,
    pub seed: u64,
    /// Accept pairs with `|phi(x, y) - t| <= thickness`.
    pub thickness: f64,
    pub floor: f64,
    /// Also place pairs on the level set along each coordinate axis.
    pub axis_probes: bool,
    pub max_draws: usize,
}

impl LevelSetScan {
    pub fn new(phi: PhaseFunction, t: f64, n_samples: usize, seed: u64, thickness: f64) -> Self {
        LevelSetScan {
            phi,
            t,
            n_samples,
            seed,
            thickness,
            floor: DEFAULT_FLOOR,
            axis_probes: false,
            max_draws: DEFAULT_MAX_DRAWS,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(invalid(format!("level t must be positive, got {}", self.t)));
        }
        if self.n_samples == 0 {
            return Err(invalid("n_samples must be at least 1"));
        }
        if !(self.thickness >= 0.0) {
            return Err(invalid("thickness must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSetReport {
    pub min_abs_det: f64,
    pub min_grad_x_norm: f64,
    pub min_grad_y_norm: f64,
    pub n_accepted: usize,
    pub hypothesis_pass: bool,
    pub floor: f64,
    pub draws: usize,
    pub rejected_near_diagonal: usize,
    /// Samples obtained by projecting onto the level set along `x_d`.
    pub projected: usize,
    pub probes: usize,
    /// The pair attaining `min_abs_det`.
    pub worst_x: Vec<f64>,
    pub worst_y: Vec<f64>,
    pub scheme: FdScheme,
}

fn uniform_in_ball<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if v.iter().map(|a| a * a).sum::<f64>() <= 1.0 {
            return v;
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Bisection for a sign change of `f` on a uniform grid over `[lo, hi]`.
fn find_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, grid: usize) -> Option<f64> {
    let step = (hi - lo) / grid as f64;
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=grid {
        let b = lo + step * i as f64;
        let fb = f(b);
        if fa == 0.0 {
            return Some(a);
        }
        if fa.is_finite() && fb.is_finite() && (fa < 0.0) != (fb < 0.0) {
            let (mut l, mut r, mut fl) = (a, b, fa);
            for _ in 0..80 {
                let m = 0.5 * (l + r);
                let fm = f(m);
                if (fm < 0.0) == (fl < 0.0) {
                    l = m;
                    fl = fm;
                } else {
                    r = m;
                }
            }
            return Some(0.5 * (l + r));
        }
        a = b;
        fa = fb;
    }
    None
}

/// Samples the level set and reports the minima of `|det|`, `|grad_x phi|` and `|grad_y phi|`.
pub fn certify_level_set(scan: &LevelSetScan, scheme: &FdScheme) -> Result<LevelSetReport> {
    scan.validate()?;
    let phi = &scan.phi;
    let dim = phi.dim();
    let exclusion = scheme.diagonal_exclusion();
    let mut rng = ChaCha8Rng::seed_from_u64(scan.seed);
    let mut pairs: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(scan.n_samples);
    let mut draws = 0usize;
    let mut near_diagonal = 0usize;

    while pairs.len() < scan.n_samples && draws < scan.max_draws {
        draws += 1;
        let x = uniform_in_ball(&mut rng, dim);
        let y = uniform_in_ball(&mut rng, dim);
        if norm(&diff(&x, &y)) < exclusion {
            near_diagonal += 1;
            continue;
        }
        if (phi.evaluate_unchecked(&x, &y) - scan.t).abs() <= scan.thickness {
            pairs.push((x, y));
        }
    }

    let mut projected = 0usize;
    if pairs.len() * 100 < scan.n_samples {
        let mut attempts = 0usize;
        while pairs.len() < scan.n_samples && attempts < scan.max_draws {
            attempts += 1;
            let x = uniform_in_ball(&mut rng, dim);
            let y = uniform_in_ball(&mut rng, dim);
            let last = dim - 1;
            let g = |s: f64| {
                let mut xs = x.clone();
                xs[last] = s;
                phi.evaluate_unchecked(&xs, &y) - scan.t
            };
            if let Some(s) = find_root(g, -1.0, 1.0, 64) {
                let mut xs = x.clone();
                xs[last] = s;
                if norm(&xs) <= 1.0 && norm(&diff(&xs, &y)) >= exclusion {
                    pairs.push((xs, y));
                    projected += 1;
                }
            }
        }
    }

    let mut probes = 0usize;
    if scan.axis_probes {
        for j in 0..dim {
            let mut e = vec![0.0; dim];
            e[j] = 1.0;
            let g = |c: f64| {
                let x: Vec<f64> = e.iter().map(|v| 0.5 * c * v).collect();
                let y: Vec<f64> = e.iter().map(|v| -0.5 * c * v).collect();
                phi.evaluate_unchecked(&x, &y) - scan.t
            };
            if let Some(c) = find_root(g, exclusion, 2.0, 256) {
                let x: Vec<f64> = e.iter().map(|v| 0.5 * c * v).collect();
                let y: Vec<f64> = x.iter().map(|v| -v).collect();
                pairs.push((x, y));
                probes += 1;
            }
        }
    }

    if pairs.is_empty() {
        return Err(Error::LevelSetEmpty(format!(
            "no pairs within {} of t = {} after {draws} draws ({near_diagonal} rejected near the diagonal)",
            scan.thickness, scan.t
        )));
    }

    let evaluated = crate::par::map_slice(&pairs, |(x, y)| {
        monge_ampere_parts(phi, x, y, scheme).map(|p| (p.det.abs(), norm(&p.grad_x), norm(&p.grad_y)))
    });
    let mut min_det = f64::INFINITY;
    let mut min_gx = f64::INFINITY;
    let mut min_gy = f64::INFINITY;
    let mut worst = 0usize;
    for (i, e) in evaluated.into_iter().enumerate() {
        let (det, gx, gy) = e?;
        if det < min_det {
            min_det = det;
            worst = i;
        }
        min_gx = min_gx.min(gx);
        min_gy = min_gy.min(gy);
    }

    Ok(LevelSetReport {
        min_abs_det: min_det,
        min_grad_x_norm: min_gx,
        min_grad_y_norm: min_gy,
        n_accepted: pairs.len(),
        hypothesis_pass: min_det > scan.floor && min_gx > scan.floor && min_gy > scan.floor,
        floor: scan.floor,
        draws,
        rejected_near_diagonal: near_diagonal,
        projected,
        probes,
        worst_x: pairs[worst].0.clone(),
        worst_y: pairs[worst].1.clone(),
        scheme: *scheme,
    })
}

fn diff(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}
