//! Phase functions `phi(x, y)` with quasi-homogeneity exponents, and the
//! anisotropic dilation `x -> (q^a_1 x_1, ..., q^a_d x_d)`.

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::geometry::ConvexBody;

#[derive(Clone, Debug, PartialEq)]
pub enum PhaseKind {
    /// `phi(x, y) = ||x - y||_B`
    DifferenceGauge(ConvexBody),
    /// `phi(x, y) = (x_d - y_d) - sum_{j<d} (x_j - y_j)^2`
    Parabolic { dim: usize },
}

/// Serialized form: `{"kind":"parabolic","dim":2}` or `{"kind":"diff_gauge","body":{...}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseDescriptor {
    Parabolic { dim: usize },
    DiffGauge { body: ConvexBody },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PhaseDescriptor", into = "PhaseDescriptor")]
pub struct PhaseFunction {
    kind: PhaseKind,
    alpha: Vec<Rational64>,
    beta: Rational64,
}

impl TryFrom<PhaseDescriptor> for PhaseFunction {
    type Error = Error;

    fn try_from(d: PhaseDescriptor) -> Result<Self> {
        match d {
            PhaseDescriptor::Parabolic { dim } => PhaseFunction::parabolic(dim),
            PhaseDescriptor::DiffGauge { body } => PhaseFunction::difference_gauge(body),
        }
    }
}

impl From<PhaseFunction> for PhaseDescriptor {
    fn from(p: PhaseFunction) -> Self {
        match p.kind {
            PhaseKind::Parabolic { dim } => PhaseDescriptor::Parabolic { dim },
            PhaseKind::DifferenceGauge(body) => PhaseDescriptor::DiffGauge { body },
        }
    }
}

/// Largest admissible exponent, `2d / (d + 1)`.
pub fn max_exponent(dim: usize) -> Rational64 {
    Rational64::new(2 * dim as i64, dim as i64 + 1)
}

/// The exponents of the sharpness example: `d/(d+1)` on the first `d-1` axes, `2d/(d+1)` on the last.
pub fn parabolic_exponents(dim: usize) -> (Vec<Rational64>, Rational64) {
    let d = dim as i64;
    let mut alpha = vec![Rational64::new(d, d + 1); dim - 1];
    alpha.push(Rational64::new(2 * d, d + 1));
    (alpha, Rational64::new(2 * d, d + 1))
}

/// Rejects exponents with `sum != d`, any `alpha_j > 2d/(d+1)`, or nonpositive entries.
pub fn validate_exponents(alpha: &[Rational64], beta: Rational64) -> Result<()> {
    let d = alpha.len();
    if d < 2 {
        return Err(invalid("need at least two exponents"));
    }
    if alpha.iter().any(|a| *a <= Rational64::from_integer(0)) || beta <= Rational64::from_integer(0) {
        return Err(invalid("exponents must be positive"));
    }
    let sum: Rational64 = alpha.iter().copied().sum();
    if sum != Rational64::from_integer(d as i64) {
        return Err(invalid(format!("exponents must sum to {d}, got {sum}")));
    }
    let cap = max_exponent(d);
    if let Some(a) = alpha.iter().find(|a| **a > cap) {
        return Err(invalid(format!("exponent {a} exceeds 2d/(d+1) = {cap}")));
    }
    Ok(())
}

impl PhaseFunction {
    pub fn difference_gauge(body: ConvexBody) -> Result<Self> {
        let alpha = vec![Rational64::from_integer(1); body.dim()];
        Self::with_exponents(PhaseKind::DifferenceGauge(body), alpha, Rational64::from_integer(1))
    }

    pub fn parabolic(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(invalid(format!("dimension must be at least 2, got {dim}")));
        }
        let (alpha, beta) = parabolic_exponents(dim);
        Self::with_exponents(PhaseKind::Parabolic { dim }, alpha, beta)
    }

    /// Builds a phase with declared exponents, checking that they are admissible.
    pub fn with_exponents(kind: PhaseKind, alpha: Vec<Rational64>, beta: Rational64) -> Result<Self> {
        validate_exponents(&alpha, beta)?;
        Self::declared(kind, alpha, beta)
    }

    /// Builds a phase with arbitrary positive exponents. The declared scaling
    /// law is not checked; [`check_quasi_homogeneity`] can refute it.
    pub fn declared(kind: PhaseKind, alpha: Vec<Rational64>, beta: Rational64) -> Result<Self> {
        let dim = match &kind {
            PhaseKind::DifferenceGauge(b) => b.dim(),
            PhaseKind::Parabolic { dim } => *dim,
        };
        check_dim(dim, alpha.len())?;
        if alpha.iter().any(|a| *a <= Rational64::from_integer(0)) || beta <= Rational64::from_integer(0) {
            return Err(invalid("exponents must be positive"));
        }
        Ok(PhaseFunction { kind, alpha, beta })
    }

    pub fn kind(&self) -> &PhaseKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[Rational64] {
        &self.alpha
    }

    pub fn beta(&self) -> Rational64 {
        self.beta
    }

    /// Both catalog phases depend on `x - y` only.
    pub fn is_translation_invariant(&self) -> bool {
        true
    }

    pub fn descriptor(&self) -> PhaseDescriptor {
        self.clone().into()
    }

    pub fn evaluate(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), y.len())?;
        Ok(self.evaluate_unchecked(x, y))
    }

    pub(crate) fn evaluate_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match &self.kind {
            PhaseKind::DifferenceGauge(body) => {
                let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                body.gauge_unchecked(&diff)
            }
            PhaseKind::Parabolic { dim } => {
                let last = dim - 1;
                let quad: f64 = (0..last).map(|j| (x[j] - y[j]) * (x[j] - y[j])).sum();
                (x[last] - y[last]) - quad
            }
        }
    }

    /// `phi_0(k)` for the difference `k = x - y`.
    pub fn evaluate_difference(&self, k: &[f64]) -> Result<f64> {
        check_dim(self.dim(), k.len())?;
        let zero = vec![0.0; k.len()];
        Ok(self.evaluate_unchecked(k, &zero))
    }
}

/// `tau_q^alpha x = (q^alpha_1 x_1, ..., q^alpha_d x_d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnisotropicDilation {
    alpha: Vec<Rational64>,
    q: f64,
    factors: Vec<f64>,
}

impl AnisotropicDilation {
    pub fn new(alpha: Vec<Rational64>, q: f64) -> Result<Self> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(invalid(format!("dilation parameter must be positive, got {q}")));
        }
        let factors = alpha.iter().map(|a| rational_power(q, *a)).collect();
        Ok(AnisotropicDilation { alpha, q, factors })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn alpha(&self) -> &[Rational64] {
        &self.alpha
    }

    pub fn factors(&self) -> &[f64] {
        &self.factors
    }

    pub fn dilate(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.alpha.len(), x.len())?;
        Ok(x.iter().zip(&self.factors).map(|(v, f)| v * f).collect())
    }
}

/// `q^(a/b)` evaluated as the `b`-th root of `q^a` when that is more accurate.
pub(crate) fn rational_power(q: f64, e: Rational64) -> f64 {
    let (a, b) = (*e.numer(), *e.denom());
    if b == 1 {
        return q.powi(a as i32);
    }
    if b == 3 {
        return q.cbrt().powi(a as i32);
    }
    if b == 2 {
        return q.sqrt().powi(a as i32);
    }
    q.powf(a as f64 / b as f64)
}

pub(crate) fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiHomogeneityReport {
    pub max_relative_error: f64,
    pub pass: bool,
    pub tolerance: f64,
    pub epsilon_floor: f64,
    pub samples: usize,
}

/// Guard added to the denominator of the relative error.
pub const EPSILON_FLOOR: f64 = 1e-300;

/// Samples pairs with `1/2 <= |x - y| <= 2` and checks
/// `phi(tau x, tau y) = q^beta phi(x, y)` against the phase's declared exponents.
pub fn check_quasi_homogeneity(
    phi: &PhaseFunction,
    sample_count: usize,
    q_values: &[f64],
    tol: f64,
    seed: u64,
) -> Result<QuasiHomogeneityReport> {
    if q_values.is_empty() {
        return Err(invalid("q_values must not be empty"));
    }
    if sample_count == 0 {
        return Err(invalid("sample_count must be at least 1"));
    }
    let dilations = q_values
        .iter()
        .map(|&q| AnisotropicDilation::new(phi.alpha.clone(), q))
        .collect::<Result<Vec<_>>>()?;
    let beta = to_f64(phi.beta);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<(Vec<f64>, Vec<f64>)> = (0..sample_count).map(|_| annulus_pair(&mut rng, phi.dim())).collect();

    let errors = crate::par::map_slice(&samples, |(x, y)| {
        let base = phi.evaluate_unchecked(x, y);
        dilations
            .iter()
            .map(|tau| {
                let scaled = phi.evaluate_unchecked(&tau.dilate(x).unwrap(), &tau.dilate(y).unwrap());
                let expected = tau.q.powf(beta) * base;
                (scaled - expected).abs() / (expected.abs() + EPSILON_FLOOR)
            })
            .fold(0.0f64, f64::max)
    });
    let max_relative_error = errors.into_iter().fold(0.0f64, f64::max);
    Ok(QuasiHomogeneityReport {
        max_relative_error,
        pass: max_relative_error <= tol,
        tolerance: tol,
        epsilon_floor: EPSILON_FLOOR,
        samples: sample_count,
    })
}

/// `y` uniform in `[-1, 1]^d`, `x = y + r u` with `u` uniform on the sphere and `r` in `[1/2, 2]`.
pub(crate) fn annulus_pair<R: Rng>(rng: &mut R, dim: usize) -> (Vec<f64>, Vec<f64>) {
    let y: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let dir = unit_vector(rng, dim);
    let r = rng.gen_range(0.5..=2.0);
    let x = y.iter().zip(&dir).map(|(a, u)| a + r * u).collect();
    (x, y)
}

pub(crate) fn unit_vector<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n2: f64 = v.iter().map(|a| a * a).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            let n = n2.sqrt();
            return v.into_iter().map(|a| a / n).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn euclid(dim: usize) -> PhaseFunction {
        PhaseFunction::difference_gauge(ConvexBody::ball(dim).unwrap()).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(euclid(2).evaluate(&[3.0, 4.0], &[0.0, 0.0]).unwrap(), 5.0);
        let p2 = PhaseFunction::parabolic(2).unwrap();
        assert_eq!(p2.evaluate(&[1.0, 5.0], &[0.0, 1.0]).unwrap(), 3.0);
        let p3 = PhaseFunction::parabolic(3).unwrap();
        assert_eq!(p3.evaluate(&[0.3, -1.2, 7.0], &[0.3, -1.2, 7.0]).unwrap(), 0.0);
        assert!(p3.evaluate(&[0.0; 2], &[0.0; 3]).is_err());
    }

    #[test]
    fn parabolic_exponents_follow_the_sharpness_choice() {
        let p = PhaseFunction::parabolic(2).unwrap();
        assert_eq!(p.alpha(), &[r(2, 3), r(4, 3)]);
        assert_eq!(p.beta(), r(4, 3));
        let p = PhaseFunction::parabolic(3).unwrap();
        assert_eq!(p.alpha(), &[r(3, 4), r(3, 4), r(3, 2)]);
    }

    #[test]
    fn constructor_rejects_inadmissible_exponents() {
        let kind = PhaseKind::DifferenceGauge(ConvexBody::ball(2).unwrap());
        // sum 2 but 3/2 > 4/3
        assert!(PhaseFunction::with_exponents(kind.clone(), vec![r(1, 2), r(3, 2)], r(1, 1)).is_err());
        // sum != d
        assert!(PhaseFunction::with_exponents(kind.clone(), vec![r(1, 1), r(2, 3)], r(1, 1)).is_err());
        assert!(PhaseFunction::with_exponents(kind.clone(), vec![r(1, 1), r(1, 1)], r(1, 1)).is_ok());
        assert!(PhaseFunction::with_exponents(kind.clone(), vec![r(4, 3), r(2, 3)], r(1, 1)).is_ok());
        assert!(PhaseFunction::declared(kind, vec![r(1, 2), r(3, 2)], r(1, 1)).is_ok());
    }

    #[test]
    fn dilation_examples() {
        let tau = AnisotropicDilation::new(vec![r(1, 1), r(1, 1)], 3.0).unwrap();
        assert_eq!(tau.dilate(&[1.0, 2.0]).unwrap(), vec![3.0, 6.0]);
        let tau = AnisotropicDilation::new(vec![r(2, 3), r(4, 3)], 8.0).unwrap();
        let v = tau.dilate(&[1.0, 1.0]).unwrap();
        assert_relative_eq!(v[0], 4.0, epsilon = 1e-12);
        assert_relative_eq!(v[1], 16.0, epsilon = 1e-12);
        let tau = AnisotropicDilation::new(vec![r(2, 3), r(4, 3)], 1.0).unwrap();
        assert_eq!(tau.dilate(&[0.25, -7.5]).unwrap(), vec![0.25, -7.5]);
        assert!(AnisotropicDilation::new(vec![r(1, 1)], 0.0).is_err());
    }

    #[test]
    fn quasi_homogeneity_examples() {
        let rep = check_quasi_homogeneity(&euclid(2), 100, &[2.0, 5.0], 1e-10, 7).unwrap();
        assert!(rep.pass);
        assert!(rep.max_relative_error <= 1e-12, "{}", rep.max_relative_error);

        let rep = check_quasi_homogeneity(&PhaseFunction::parabolic(2).unwrap(), 100, &[2.0, 5.0], 1e-10, 7).unwrap();
        assert!(rep.pass, "{}", rep.max_relative_error);

        let corrupted = PhaseFunction::declared(
            PhaseKind::DifferenceGauge(ConvexBody::ball(2).unwrap()),
            vec![r(1, 2), r(3, 2)],
            r(1, 1),
        )
        .unwrap();
        let rep = check_quasi_homogeneity(&corrupted, 100, &[2.0, 5.0], 1e-10, 7).unwrap();
        assert!(!rep.pass);
        assert!(rep.max_relative_error > 1e-3);

        assert!(check_quasi_homogeneity(&euclid(2), 10, &[], 1e-10, 7).is_err());
    }

    #[test]
    fn descriptors() {
        let p: PhaseFunction = serde_json::from_str(r#"{"kind":"parabolic","dim":2}"#).unwrap();
        assert_eq!(p, PhaseFunction::parabolic(2).unwrap());
        let g: PhaseFunction =
            serde_json::from_str(r#"{"kind":"diff_gauge","body":{"kind":"ball","dim":3}}"#).unwrap();
        assert_eq!(g, euclid(3));
        assert_eq!(
            serde_json::to_string(&g).unwrap(),
            r#"{"kind":"diff_gauge","body":{"kind":"ball","dim":3}}"#
        );
    }
}
