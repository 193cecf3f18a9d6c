//! Symmetric convex bodies given by their gauge (Minkowski functional).
//!
//! Only bodies whose gauge is a root of an integer polynomial are supported:
//! the Euclidean ball, integer ellipsoids `x^T A x <= 1` and even-`p` balls.
//! For these, `||k||_B <= T` at a lattice point `k` reduces to comparing an
//! integer form against `T^e`, which is decided exactly.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::exact::{bareiss_determinant, leading_minors, Form, Threshold};

/// A lattice point of `Z^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntVec(pub Vec<i64>);

impl IntVec {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&v| v as f64).collect()
    }
}

impl From<Vec<i64>> for IntVec {
    fn from(v: Vec<i64>) -> Self {
        IntVec(v)
    }
}

/// How the lower end of a shell `R <= ||k|| <= R + delta` is treated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `R <= ||k|| <= R + delta`
    #[default]
    Closed,
    /// `R < ||k|| <= R + delta`; shell counts telescope exactly.
    HalfOpen,
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(Convention::Closed),
            "half_open" | "half-open" => Ok(Convention::HalfOpen),
            other => Err(invalid(format!("unknown convention {other:?} (closed|half_open)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BodyKind {
    EuclideanBall,
    /// `{x : x^T A x <= 1}` for a symmetric positive-definite integer matrix.
    Ellipsoid(Vec<Vec<i64>>),
    /// `{x : sum |x_j|^p <= 1}` with `p` even.
    PBall(u32),
}

/// Serialized form of a body, e.g. `{"kind":"pball","p":4,"dim":3}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BodyDescriptor {
    Ball {
        dim: usize,
    },
    Ellipsoid {
        matrix: Vec<Vec<i64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    Pball {
        p: u32,
        dim: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BodyDescriptor", into = "BodyDescriptor")]
pub struct ConvexBody {
    kind: BodyKind,
    dim: usize,
    extents: Vec<f64>,
}

impl TryFrom<BodyDescriptor> for ConvexBody {
    type Error = Error;

    fn try_from(d: BodyDescriptor) -> Result<Self> {
        match d {
            BodyDescriptor::Ball { dim } => ConvexBody::ball(dim),
            BodyDescriptor::Pball { p, dim } => ConvexBody::pball(p, dim),
            BodyDescriptor::Ellipsoid { matrix, dim } => {
                if let Some(dim) = dim {
                    check_dim(dim, matrix.len())?;
                }
                ConvexBody::ellipsoid(matrix)
            }
        }
    }
}

impl From<ConvexBody> for BodyDescriptor {
    fn from(b: ConvexBody) -> Self {
        match b.kind {
            BodyKind::EuclideanBall => BodyDescriptor::Ball { dim: b.dim },
            BodyKind::PBall(p) => BodyDescriptor::Pball { p, dim: b.dim },
            BodyKind::Ellipsoid(matrix) => BodyDescriptor::Ellipsoid { matrix, dim: Some(b.dim) },
        }
    }
}

fn check_lattice_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(invalid(format!("dimension must be at least 2, got {dim}")));
    }
    Ok(())
}

impl ConvexBody {
    pub fn ball(dim: usize) -> Result<Self> {
        check_lattice_dim(dim)?;
        Ok(ConvexBody { kind: BodyKind::EuclideanBall, dim, extents: vec![1.0; dim] })
    }

    pub fn pball(p: u32, dim: usize) -> Result<Self> {
        check_lattice_dim(dim)?;
        if p < 2 || p % 2 != 0 {
            return Err(invalid(format!("p must be an even integer >= 2, got {p}")));
        }
        Ok(ConvexBody { kind: BodyKind::PBall(p), dim, extents: vec![1.0; dim] })
    }

    pub fn ellipsoid(matrix: Vec<Vec<i64>>) -> Result<Self> {
        let dim = matrix.len();
        check_lattice_dim(dim)?;
        for row in &matrix {
            check_dim(dim, row.len())?;
        }
        for i in 0..dim {
            for j in 0..i {
                if matrix[i][j] != matrix[j][i] {
                    return Err(invalid("ellipsoid matrix must be symmetric"));
                }
            }
        }
        if leading_minors(&matrix).iter().any(|m| !m.is_positive()) {
            return Err(invalid("ellipsoid matrix must be positive definite"));
        }
        let extents = inverse_diagonal(&matrix).into_iter().map(f64::sqrt).collect();
        Ok(ConvexBody { kind: BodyKind::Ellipsoid(matrix), dim, extents })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn descriptor(&self) -> BodyDescriptor {
        self.clone().into()
    }

    /// Degree `e` of the integer form with `||k||^e = form(k)`.
    pub fn form_degree(&self) -> u32 {
        match self.kind {
            BodyKind::EuclideanBall | BodyKind::Ellipsoid(_) => 2,
            BodyKind::PBall(p) => p,
        }
    }

    /// `max |x_j|` over the unit body.
    pub fn extent(&self, j: usize) -> f64 {
        self.extents[j]
    }

    /// False for `p > 2` balls, whose boundary is flat to high order on the axes.
    pub fn has_nonvanishing_curvature(&self) -> bool {
        !matches!(self.kind, BodyKind::PBall(p) if p > 2)
    }

    pub fn gauge(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.gauge_unchecked(x))
    }

    pub(crate) fn gauge_unchecked(&self, x: &[f64]) -> f64 {
        match &self.kind {
            BodyKind::EuclideanBall => x.iter().fold(0.0f64, |acc, &v| acc.hypot(v)),
            BodyKind::Ellipsoid(a) => {
                let mut q = 0.0;
                for (i, row) in a.iter().enumerate() {
                    for (j, &aij) in row.iter().enumerate() {
                        q += aij as f64 * x[i] * x[j];
                    }
                }
                q.max(0.0).sqrt()
            }
            BodyKind::PBall(p) => {
                let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if scale == 0.0 {
                    return 0.0;
                }
                let s: f64 = x.iter().map(|v| (v.abs() / scale).powi(*p as i32)).sum();
                scale * s.powf(1.0 / *p as f64)
            }
        }
    }

    /// `||k||^e` as an exact integer.
    pub fn exact_form(&self, k: &[i64]) -> Form {
        small_form(&self.kind, k).map(Form::Small).unwrap_or_else(|| Form::Big(big_form(&self.kind, k)))
    }

    /// Minimizer (over the reals) of the form along the last coordinate, other coordinates fixed.
    pub(crate) fn fiber_center(&self, prefix: &[i64]) -> f64 {
        match &self.kind {
            BodyKind::EuclideanBall | BodyKind::PBall(_) => 0.0,
            BodyKind::Ellipsoid(a) => {
                let last = self.dim - 1;
                let b: f64 = prefix.iter().zip(&a[last]).map(|(&k, &v)| k as f64 * v as f64).sum();
                -b / a[last][last] as f64
            }
        }
    }

    pub fn volume(&self) -> f64 {
        let d = self.dim as f64;
        let ball = PI.powf(d / 2.0) / libm::tgamma(d / 2.0 + 1.0);
        match &self.kind {
            BodyKind::EuclideanBall => ball,
            BodyKind::Ellipsoid(a) => {
                let det = bareiss_determinant(a);
                ball / crate::exact::rational_to_f64(&BigRational::from_integer(det)).sqrt()
            }
            BodyKind::PBall(p) => {
                let p = *p as f64;
                (2.0 * libm::tgamma(1.0 + 1.0 / p)).powf(d) / libm::tgamma(1.0 + d / p)
            }
        }
    }

    /// Level set `||k|| = t` prepared for exact comparisons.
    pub(crate) fn level(&self, t: &BigRational) -> Threshold {
        Threshold::power(t, self.form_degree())
    }

    /// Orders `||k||` against the level `t` for which `level` was built.
    pub(crate) fn cmp_level(&self, k: &[i64], level: &Threshold) -> Ordering {
        level.cmp_form(&self.exact_form(k))
    }

    /// Decides `R <= ||k|| <= R + delta` (or `R < ...` for half-open) without rounding.
    pub fn shell_predicate_exact(
        &self,
        k: &IntVec,
        r: &BigRational,
        delta: &BigRational,
        convention: Convention,
    ) -> Result<bool> {
        check_dim(self.dim, k.dim())?;
        if r.is_negative() || delta.is_negative() {
            return Err(invalid("R and delta must be nonnegative"));
        }
        let outer = self.level(&(r + delta));
        let inner = self.level(r);
        Ok(ShellLevels { inner, outer, convention }.contains(self, k.as_slice()))
    }
}

/// The two thresholds of a shell, built once per query.
#[derive(Clone, Debug)]
pub(crate) struct ShellLevels {
    pub inner: Threshold,
    pub outer: Threshold,
    pub convention: Convention,
}

impl ShellLevels {
    pub fn new(body: &ConvexBody, r: &BigRational, delta: &BigRational, convention: Convention) -> Self {
        ShellLevels { inner: body.level(r), outer: body.level(&(r + delta)), convention }
    }

    pub fn contains(&self, body: &ConvexBody, k: &[i64]) -> bool {
        let form = body.exact_form(k);
        if self.outer.cmp_form(&form) == Ordering::Greater {
            return false;
        }
        match (self.inner.cmp_form(&form), self.convention) {
            (Ordering::Less, _) => false,
            (Ordering::Equal, Convention::HalfOpen) => false,
            _ => true,
        }
    }
}

fn small_form(kind: &BodyKind, k: &[i64]) -> Option<i128> {
    match kind {
        BodyKind::EuclideanBall => k.iter().try_fold(0i128, |acc, &v| acc.checked_add((v as i128).checked_mul(v as i128)?)),
        BodyKind::PBall(p) => k.iter().try_fold(0i128, |acc, &v| acc.checked_add((v as i128).checked_pow(*p)?)),
        BodyKind::Ellipsoid(a) => {
            let mut acc = 0i128;
            for (i, row) in a.iter().enumerate() {
                for (j, &aij) in row.iter().enumerate() {
                    let t = (aij as i128).checked_mul(k[i] as i128)?.checked_mul(k[j] as i128)?;
                    acc = acc.checked_add(t)?;
                }
            }
            Some(acc)
        }
    }
}

fn big_form(kind: &BodyKind, k: &[i64]) -> BigInt {
    match kind {
        BodyKind::EuclideanBall => k.iter().map(|&v| BigInt::from(v) * BigInt::from(v)).sum(),
        BodyKind::PBall(p) => k.iter().map(|&v| num_traits::Pow::pow(BigInt::from(v), *p)).sum(),
        BodyKind::Ellipsoid(a) => {
            let mut acc = BigInt::zero();
            for (i, row) in a.iter().enumerate() {
                for (j, &aij) in row.iter().enumerate() {
                    acc += BigInt::from(aij) * k[i] * k[j];
                }
            }
            acc
        }
    }
}

fn inverse_diagonal(a: &[Vec<i64>]) -> Vec<f64> {
    let n = a.len();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| a[i][j] as f64);
    let inv = m.try_inverse().expect("positive definite matrix is invertible");
    (0..n).map(|i| inv[(i, i)]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn diag14() -> ConvexBody {
        ConvexBody::ellipsoid(vec![vec![1, 0], vec![0, 4]]).unwrap()
    }

    #[test]
    fn gauge_examples() {
        assert_eq!(ConvexBody::ball(2).unwrap().gauge(&[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(diag14().gauge(&[0.0, 1.0]).unwrap(), 2.0);
        assert_relative_eq!(
            ConvexBody::pball(4, 2).unwrap().gauge(&[1.0, 1.0]).unwrap(),
            1.189207115002721,
            epsilon = 1e-12
        );
        assert_eq!(ConvexBody::pball(4, 3).unwrap().gauge(&[0.0; 3]).unwrap(), 0.0);
    }

    #[test]
    fn gauge_rejects_wrong_dimension() {
        let err = ConvexBody::ball(3).unwrap().gauge(&[1.0, 2.0]).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 3, got: 2 });
    }

    #[test]
    fn constructors_validate() {
        assert!(ConvexBody::ball(1).is_err());
        assert!(ConvexBody::pball(3, 2).is_err());
        assert!(ConvexBody::pball(0, 2).is_err());
        assert!(ConvexBody::ellipsoid(vec![vec![1, 2], vec![2, 1]]).is_err());
        assert!(ConvexBody::ellipsoid(vec![vec![1, 1], vec![0, 1]]).is_err());
        assert!(ConvexBody::ellipsoid(vec![vec![2, 1], vec![1, 2]]).is_ok());
    }

    #[test]
    fn shell_predicate_examples() {
        let ball = ConvexBody::ball(2).unwrap();
        let k = IntVec(vec![3, 4]);
        assert!(ball.shell_predicate_exact(&k, &rat(5, 1), &rat(0, 1), Convention::Closed).unwrap());
        assert!(!ball.shell_predicate_exact(&k, &rat(5, 1), &rat(0, 1), Convention::HalfOpen).unwrap());
        // 16 <= 17 and 17 * 10^4 <= 21^4
        let p4 = ConvexBody::pball(4, 2).unwrap();
        assert!(p4
            .shell_predicate_exact(&IntVec(vec![2, 1]), &rat(2, 1), &rat(1, 10), Convention::Closed)
            .unwrap());
        assert!(!p4
            .shell_predicate_exact(&IntVec(vec![2, 1]), &rat(21, 10), &rat(1, 10), Convention::Closed)
            .unwrap());
    }

    #[test]
    fn volume_examples() {
        assert_relative_eq!(ConvexBody::ball(2).unwrap().volume(), PI, epsilon = 1e-12);
        assert_relative_eq!(ConvexBody::ball(3).unwrap().volume(), 4.0 * PI / 3.0, epsilon = 1e-12);
        assert_relative_eq!(diag14().volume(), PI / 2.0, epsilon = 1e-12);
        assert_relative_eq!(ConvexBody::pball(4, 2).unwrap().volume(), 3.708149354602744, epsilon = 1e-9);
        assert_relative_eq!(ConvexBody::pball(2, 3).unwrap().volume(), 4.0 * PI / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn pball_volume_matches_quadrature() {
        // area of |x|^4 + |y|^4 <= 1 as 4 * int_0^1 (1 - x^4)^(1/4) dx, composite Simpson
        let n = 200_000;
        let h = 1.0 / n as f64;
        let f = |x: f64| (1.0 - x.powi(4)).max(0.0).powf(0.25);
        let mut s = f(0.0) + f(1.0);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let area = 4.0 * s * h / 3.0;
        assert_relative_eq!(ConvexBody::pball(4, 2).unwrap().volume(), area, epsilon = 1e-5);
    }

    #[test]
    fn ellipsoid_extents_and_center() {
        let e = ConvexBody::ellipsoid(vec![vec![2, 1], vec![1, 2]]).unwrap();
        // inverse is [[2,-1],[-1,2]]/3
        assert_relative_eq!(e.extent(0), (2.0f64 / 3.0).sqrt(), epsilon = 1e-12);
        assert_relative_eq!(e.fiber_center(&[3]), -1.5, epsilon = 1e-12);
    }

    #[test]
    fn descriptor_round_trip() {
        let json = r#"{"kind":"pball","p":4,"dim":3}"#;
        let body: ConvexBody = serde_json::from_str(json).unwrap();
        assert_eq!(body, ConvexBody::pball(4, 3).unwrap());
        assert_eq!(serde_json::to_string(&body).unwrap(), json);
        let bad = serde_json::from_str::<ConvexBody>(r#"{"kind":"pball","p":3,"dim":3}"#);
        assert!(bad.is_err());
        let e: ConvexBody = serde_json::from_str(r#"{"kind":"ellipsoid","matrix":[[1,0],[0,4]]}"#).unwrap();
        assert_eq!(e, diag14());
    }

    #[test]
    fn big_forms_agree_with_small() {
        let p8 = ConvexBody::pball(8, 2).unwrap();
        let k = [10_000_000i64, -3];
        let big = big_form(p8.kind(), &k);
        assert!(small_form(p8.kind(), &k).is_none());
        assert_eq!(p8.exact_form(&k), Form::Big(big));
        let e = ConvexBody::ellipsoid(vec![vec![2, 1], vec![1, 2]]).unwrap();
        assert_eq!(e.exact_form(&[3, -5]).to_big(), big_form(e.kind(), &[3, -5]));
    }
}
