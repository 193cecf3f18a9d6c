//! Discrete `s`-dimensional energies of the normalized lattice grid
//! `x_a = (a_1 / q^alpha_1, ..., a_d / q^alpha_d)`, `|a_j| <= C q^alpha_j`:
//!
//! ```text
//! E(q, s) = q^(-2d) * sum_{a != a'} |x_a - x_a'|^(-s)
//! ```
//!
//! The diagonal `a = a'` is left out; sharp box cutoffs replace smooth ones.

use num_rational::{BigRational, Rational64};
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::analysis::{ScanReport, ScanRow};
use crate::error::{invalid, Error, Result};
use crate::exact::floor_scaled_power;
use crate::phase::rational_power;
use crate::sum::{compensated, pairwise};

/// Pair evaluations allowed for the direct double loop.
pub const DIRECT_GUARD: u64 = 1_000_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyParams {
    pub d: usize,
    pub q: u64,
    pub alpha: Vec<Rational64>,
    pub c: BigRational,
    pub s: f64,
}

impl EnergyParams {
    pub fn new(d: usize, q: u64, alpha: Vec<Rational64>, c: BigRational, s: f64) -> Result<Self> {
        let p = EnergyParams { d, q, alpha, c, s };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.d;
        if d < 2 {
            return Err(invalid("dimension must be at least 2"));
        }
        if self.alpha.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: self.alpha.len() });
        }
        if self.alpha.iter().any(|a| *a <= Rational64::from_integer(0)) {
            return Err(invalid("exponents must be positive"));
        }
        let sum: Rational64 = self.alpha.iter().copied().sum();
        if sum != Rational64::from_integer(d as i64) {
            return Err(invalid(format!("exponents must sum to {d}, got {sum}")));
        }
        let lo = (d as f64 + 1.0) / 2.0;
        if !(self.s >= lo && self.s < d as f64) {
            return Err(invalid(format!("s must lie in [{lo}, {d}), got {}", self.s)));
        }
        if self.q < 2 {
            return Err(invalid("q must be at least 2"));
        }
        if self.c.is_negative() {
            return Err(invalid("box constant C must be nonnegative"));
        }
        Ok(())
    }

    /// `floor(C q^alpha_j)` per axis.
    pub fn half_widths(&self) -> Result<Vec<i64>> {
        let q = BigRational::from_integer(self.q.into());
        self.alpha
            .iter()
            .map(|&a| floor_scaled_power(&self.c, &q, a)?.to_i64().ok_or_else(|| invalid("grid too large")))
            .collect()
    }

    fn scales(&self) -> Vec<f64> {
        self.alpha.iter().map(|&a| rational_power(self.q as f64, a)).collect()
    }

    fn normalization(&self) -> f64 {
        (self.q as f64).powi(-2 * self.d as i32)
    }
}

fn odometer_next(digits: &mut [i64], lo: &[i64], hi: &[i64]) -> bool {
    for i in (0..digits.len()).rev() {
        if digits[i] < hi[i] {
            digits[i] += 1;
            return true;
        }
        digits[i] = lo[i];
    }
    false
}

fn for_each<F: FnMut(&[i64])>(lo: &[i64], hi: &[i64], mut f: F) {
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return;
    }
    let mut digits = lo.to_vec();
    loop {
        f(&digits);
        if !odometer_next(&mut digits, lo, hi) {
            break;
        }
    }
}

/// Fast path: groups ordered pairs by their difference `k = a - a'`,
/// each difference occurring `prod_j (L_j - |k_j|)` times.
pub fn discrete_energy(params: &EnergyParams) -> Result<f64> {
    params.validate()?;
    let half = params.half_widths()?;
    let sides: Vec<i64> = half.iter().map(|m| 2 * m + 1).collect();
    let reach: Vec<i64> = sides.iter().map(|l| l - 1).collect();
    let neg: Vec<i64> = reach.iter().map(|r| -r).collect();
    let scales = params.scales();
    let s = params.s;

    let slabs = crate::par::map_range(-reach[0]..reach[0] + 1, |k0| {
        let mut terms = Vec::new();
        let mut k = vec![0i64; sides.len()];
        k[0] = k0;
        for_each(&neg[1..], &reach[1..], |rest| {
            k[1..].copy_from_slice(rest);
            if k.iter().all(|&v| v == 0) {
                return;
            }
            let mut w = 1.0;
            let mut dist2 = 0.0;
            for j in 0..k.len() {
                w *= (sides[j] - k[j].abs()) as f64;
                let x = k[j] as f64 / scales[j];
                dist2 += x * x;
            }
            terms.push(w * dist2.powf(-s / 2.0));
        });
        compensated(terms)
    });
    Ok(pairwise(&slabs) * params.normalization())
}

/// Direct double loop over ordered pairs `a != a'`.
pub fn discrete_energy_direct(params: &EnergyParams) -> Result<f64> {
    params.validate()?;
    let half = params.half_widths()?;
    let n: u128 = half.iter().map(|&m| 2 * m as u128 + 1).product();
    if n.saturating_mul(n) > DIRECT_GUARD as u128 {
        return Err(Error::TooLarge {
            what: "direct energy sum",
            size: n.saturating_mul(n).to_string(),
            limit: DIRECT_GUARD,
            hint: "use the difference-weight fast path",
        });
    }
    let scales = params.scales();
    let lo: Vec<i64> = half.iter().map(|m| -m).collect();
    let mut points: Vec<Vec<f64>> = Vec::new();
    for_each(&lo, &half, |a| points.push(a.iter().zip(&scales).map(|(&v, sc)| v as f64 / sc).collect()));
    let s = params.s;
    let rows = crate::par::map_slice(&points, |x| {
        compensated(points.iter().filter(|y| *y != x).map(|y| {
            let dist2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
            dist2.powf(-s / 2.0)
        }))
    });
    Ok(pairwise(&rows) * params.normalization())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicShell {
    /// Differences `k` with `2^m <= k < 2^(m+1)`.
    pub m: u32,
    pub ordered_pairs: u64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicReport {
    pub value: f64,
    pub bound: f64,
    pub ratio: f64,
    pub shells: Vec<DyadicShell>,
}

/// One-dimensional sum `sum_{a != a'} (|a - a'| / q^alpha)^(-s/i)` over `|a|, |a'| <= C q^alpha`,
/// with the bound `q^(alpha (1 + s/i))` for `s >= i` and `q^(2 alpha)` for `s < i`.
pub fn dyadic_inner_sum(q: u64, alpha: Rational64, s: f64, i: u32, c: &BigRational) -> Result<DyadicReport> {
    if i < 1 {
        return Err(invalid("Hamming index i must be at least 1"));
    }
    if !(s > 0.0) {
        return Err(invalid("s must be positive"));
    }
    if q < 1 || alpha <= Rational64::from_integer(0) {
        return Err(invalid("q and alpha must be positive"));
    }
    let m = floor_scaled_power(c, &BigRational::from_integer(q.into()), alpha)?
        .to_i64()
        .ok_or_else(|| invalid("grid too large"))?;
    let side = 2 * m + 1;
    let scale = rational_power(q as f64, alpha);
    let exponent = s / i as f64;

    let mut shells: Vec<DyadicShell> = Vec::new();
    let mut shell_terms: Vec<Vec<f64>> = Vec::new();
    for k in 1..side {
        let pairs = 2 * (side - k) as u64;
        let term = pairs as f64 * (k as f64 / scale).powf(-exponent);
        let shell = 63 - (k as u64).leading_zeros();
        if shells.last().map(|sh| sh.m) != Some(shell) {
            shells.push(DyadicShell { m: shell, ordered_pairs: 0, value: 0.0 });
            shell_terms.push(Vec::new());
        }
        shells.last_mut().unwrap().ordered_pairs += pairs;
        shell_terms.last_mut().unwrap().push(term);
    }
    for (sh, terms) in shells.iter_mut().zip(shell_terms) {
        sh.value = compensated(terms);
    }
    let value = compensated(shells.iter().map(|sh| sh.value));
    let a = alpha.to_f64().unwrap_or(f64::NAN);
    let bound = if s >= i as f64 {
        (q as f64).powf(a * (1.0 + exponent))
    } else {
        (q as f64).powf(2.0 * a)
    };
    Ok(DyadicReport { value, bound, ratio: value / bound, shells })
}

/// `E(q, s)` over an ascending grid of at least four `q`, with its log-log slope.
/// `max_ratio` is `max E / min E` over the grid.
pub fn energy_scan(d: usize, alpha: &[Rational64], c: &BigRational, s: f64, q_list: &[u64]) -> Result<ScanReport> {
    if q_list.len() < 4 {
        return Err(Error::DegenerateRegression(format!(
            "energy scan needs at least 4 values of q, got {}",
            q_list.len()
        )));
    }
    if q_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("q values must be strictly ascending"));
    }
    let rows = q_list
        .iter()
        .map(|&q| {
            let e = discrete_energy(&EnergyParams::new(d, q, alpha.to_vec(), c.clone(), s)?)?;
            Ok(ScanRow { parameter: q as f64, value: e, bound: None })
        })
        .collect::<Result<Vec<_>>>()?;
    let max = rows.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
    let mut report = ScanReport::from_rows(rows)?;
    report.max_ratio = Some(max / min);
    Ok(report)
}
