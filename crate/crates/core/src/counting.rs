//! Exact lattice point counters.
//!
//! Every fast path has a brute-force twin that enumerates the same set
//! point by point:
//!
//! | count                                   | oracle              | fast path                    |
//! |-----------------------------------------|---------------------|------------------------------|
//! | `R <= ||k||_B <= R + delta`             | [`shell_count_brute`] | [`shell_count_fiber`]      |
//! | pairs with `|phi(n, m) - q^beta| <= delta` | [`pair_count_brute`]  | [`pair_count_diff_weight`] |
//! | sharpness example at `q = t^(d+1)`      | [`pair_count_diff_weight`] | [`sharpness_count`]   |
//!
//! Work is split over the outermost coordinate and per-slab integer
//! subtotals are added in slab order, so counts do not depend on the number
//! of worker threads.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::{
    biguint_to_f64, exact_power, floor_integer, floor_scaled_power, integer_lower_bound, rational_to_f64, Threshold,
};
use crate::geometry::{ConvexBody, Convention, ShellLevels};
use crate::phase::{to_f64, PhaseFunction, PhaseKind};

/// Default ceiling on the number of points (or pairs) a brute-force counter may examine.
pub const DEFAULT_GUARD: u64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Brute,
    Fiber,
    DiffWeight,
    ClosedForm,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Fiber => "fiber",
            Method::DiffWeight => "diff_weight",
            Method::ClosedForm => "closed_form",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountResult {
    #[serde(with = "decimal")]
    pub count: BigUint,
    pub method: Method,
    /// Seconds; always 0 on targets without a monotonic clock.
    pub wall_time: f64,
    pub points_examined: u64,
    /// False when the level `q^beta` is irrational and was compared in floating point.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShellQuery {
    pub body: ConvexBody,
    pub r: BigRational,
    pub delta: BigRational,
    pub convention: Convention,
}

impl ShellQuery {
    pub fn new(body: ConvexBody, r: BigRational, delta: BigRational, convention: Convention) -> Result<Self> {
        if r.is_negative() {
            return Err(invalid("R must be nonnegative"));
        }
        if delta.is_negative() {
            return Err(invalid("delta must be nonnegative"));
        }
        Ok(ShellQuery { body, r, delta, convention })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairQuery {
    pub phi: PhaseFunction,
    pub q: BigRational,
    pub delta: BigRational,
    /// Box constant: `|n_j|, |m_j| <= C q^alpha_j`.
    pub c: BigRational,
    pub convention: Convention,
}

impl PairQuery {
    pub fn new(
        phi: PhaseFunction,
        q: BigRational,
        delta: BigRational,
        c: BigRational,
        convention: Convention,
    ) -> Result<Self> {
        if !q.is_positive() {
            return Err(invalid("q must be positive"));
        }
        if delta.is_negative() {
            return Err(invalid("delta must be nonnegative"));
        }
        if c.is_negative() {
            return Err(invalid("box constant C must be nonnegative"));
        }
        Ok(PairQuery { phi, q, delta, c, convention })
    }

    /// `floor(C q^alpha_j)` for each axis, computed exactly.
    pub fn box_half_widths(&self) -> Result<Vec<i64>> {
        self.phi
            .alpha()
            .iter()
            .map(|&a| {
                floor_scaled_power(&self.c, &self.q, a)?
                    .to_i64()
                    .ok_or_else(|| invalid("box side does not fit in 64 bits"))
            })
            .collect()
    }

    /// Box side lengths `L_j = 2 floor(C q^alpha_j) + 1`.
    pub fn box_sides(&self) -> Result<Vec<i64>> {
        Ok(self.box_half_widths()?.into_iter().map(|m| 2 * m + 1).collect())
    }
}

/// Counts travel as decimal strings; they routinely exceed 2^53.
mod decimal {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(D::Error::custom)
    }
}

/// Exact sum of `u128` increments that spills into a `BigUint`.
#[derive(Default, Debug)]
pub(crate) struct Tally {
    small: u128,
    big: BigUint,
}

impl Tally {
    pub fn add(&mut self, v: u128) {
        match self.small.checked_add(v) {
            Some(s) => self.small = s,
            None => {
                self.big += self.small;
                self.small = v;
            }
        }
    }

    pub fn add_big(&mut self, v: &BigUint) {
        self.big += v;
    }

    pub fn finish(self) -> BigUint {
        self.big + self.small
    }
}

fn sum_slabs(slabs: Vec<(BigUint, u64)>) -> (BigUint, u64) {
    let mut tally = Tally::default();
    let mut examined = 0u64;
    for (c, e) in &slabs {
        tally.add_big(c);
        examined = examined.saturating_add(*e);
    }
    (tally.finish(), examined)
}

struct Stopwatch {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Stopwatch {
    fn start() -> Self {
        Stopwatch {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    fn seconds(&self) -> f64 {
        #[cfg(not(target_arch = "wasm32"))]
        {
            self.start.elapsed().as_secs_f64()
        }
        #[cfg(target_arch = "wasm32")]
        {
            0.0
        }
    }
}

/// Advances `digits` through the box `[-bounds_i, bounds_i]` in lexicographic order.
fn odometer_next(digits: &mut [i64], bounds: &[i64]) -> bool {
    for i in (0..digits.len()).rev() {
        if digits[i] < bounds[i] {
            digits[i] += 1;
            return true;
        }
        digits[i] = -bounds[i];
    }
    false
}

/// Calls `f` on every point of the box `prod [-bounds_i, bounds_i]`.
fn for_each_in_box<F: FnMut(&[i64])>(bounds: &[i64], mut f: F) {
    if bounds.iter().any(|&b| b < 0) {
        return;
    }
    let mut digits: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        f(&digits);
        if !odometer_next(&mut digits, bounds) {
            break;
        }
    }
}

fn box_volume(bounds: &[i64]) -> u128 {
    bounds.iter().map(|&b| (2 * b as u128) + 1).product()
}

/// Half widths of a box containing `(R + delta) B`.
fn enclosing_box(body: &ConvexBody, outer: &BigRational) -> Result<Vec<i64>> {
    let t = rational_to_f64(outer);
    (0..body.dim())
        .map(|j| {
            let b = (t * body.extent(j)).ceil() + 1.0;
            if b.is_finite() && b < 4.0e18 {
                Ok(b as i64)
            } else {
                Err(invalid("dilate is too large for 64-bit coordinates"))
            }
        })
        .collect()
}

fn guard(what: &'static str, size: u128, limit: u64, hint: &'static str) -> Result<()> {
    if size > limit as u128 {
        return Err(Error::TooLarge { what, size: size.to_string(), limit, hint });
    }
    Ok(())
}

pub fn shell_count_brute(query: &ShellQuery) -> Result<CountResult> {
    shell_count_brute_guarded(query, DEFAULT_GUARD)
}

/// Checks every lattice point of the enclosing box with the exact shell predicate.
pub fn shell_count_brute_guarded(query: &ShellQuery, limit: u64) -> Result<CountResult> {
    let clock = Stopwatch::start();
    let body = &query.body;
    let bounds = enclosing_box(body, &(&query.r + &query.delta))?;
    guard("brute-force shell count", box_volume(&bounds), limit, "use the fiber counter")?;
    let levels = ShellLevels::new(body, &query.r, &query.delta, query.convention);

    let slabs = crate::par::map_range(-bounds[0]..bounds[0] + 1, |k0| {
        let mut point = vec![0i64; body.dim()];
        point[0] = k0;
        let mut count = 0u64;
        let mut examined = 0u64;
        for_each_in_box(&bounds[1..], |rest| {
            point[1..].copy_from_slice(rest);
            examined += 1;
            if levels.contains(body, &point) {
                count += 1;
            }
        });
        (BigUint::from(count), examined)
    });
    let (count, examined) = sum_slabs(slabs);
    Ok(CountResult {
        count,
        method: Method::Brute,
        wall_time: clock.seconds(),
        points_examined: examined,
        exact: true,
    })
}

/// One column `{k_d : ||(prefix, k_d)|| <= T}` (or `< T`), which is an integer interval.
struct Fiber<'a> {
    body: &'a ConvexBody,
    point: Vec<i64>,
    evals: u64,
}

impl<'a> Fiber<'a> {
    fn new(body: &'a ConvexBody) -> Self {
        Fiber { body, point: vec![0; body.dim()], evals: 0 }
    }

    fn set_prefix(&mut self, prefix: &[i64]) {
        let d = self.point.len();
        self.point[..d - 1].copy_from_slice(prefix);
    }

    fn inside(&mut self, last: i64, level: &Threshold, strict: bool) -> bool {
        let d = self.point.len();
        self.point[d - 1] = last;
        self.evals += 1;
        match self.body.cmp_level(&self.point, level) {
            Ordering::Less => true,
            Ordering::Equal => !strict,
            Ordering::Greater => false,
        }
    }

    /// Last integer past `from` (stepping by `dir`) still inside, given `from` is inside.
    fn walk(&mut self, from: i64, dir: i64, level: &Threshold, strict: bool) -> i64 {
        let mut good = 0i64;
        let mut step = 1i64;
        while self.inside(from + dir * step, level, strict) {
            good = step;
            step *= 2;
        }
        let mut bad = step;
        while bad - good > 1 {
            let mid = good + (bad - good) / 2;
            if self.inside(from + dir * mid, level, strict) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        from + dir * good
    }

    fn count(&mut self, level: &Threshold, strict: bool) -> u64 {
        let d = self.point.len();
        let center = self.body.fiber_center(&self.point[..d - 1]);
        let (lo, hi) = (center.floor() as i64, center.ceil() as i64);
        let start = if lo == hi {
            lo
        } else {
            let mut a = self.point.clone();
            a[d - 1] = lo;
            let mut b = self.point.clone();
            b[d - 1] = hi;
            match self.body.exact_form(&a).to_big().cmp(&self.body.exact_form(&b).to_big()) {
                Ordering::Greater => hi,
                _ => lo,
            }
        };
        if !self.inside(start, level, strict) {
            return 0;
        }
        let top = self.walk(start, 1, level, strict);
        let bottom = self.walk(start, -1, level, strict);
        (top - bottom + 1) as u64
    }
}

/// Counts `{k : ||k|| <= outer}` minus `{k : ||k|| < inner}` (or `<= inner`) column by column.
fn fiber_difference(
    body: &ConvexBody,
    outer: &BigRational,
    inner: Option<(&BigRational, bool)>,
) -> Result<(BigUint, u64)> {
    let bounds = enclosing_box(body, outer)?;
    let outer_level = body.level(outer);
    let inner_level = inner.map(|(r, strict)| (body.level(r), strict));
    let prefix_bounds = &bounds[..body.dim() - 1];

    let slabs = crate::par::map_range(-prefix_bounds[0]..prefix_bounds[0] + 1, |k0| {
        let mut fiber = Fiber::new(body);
        let mut prefix = vec![0i64; body.dim() - 1];
        prefix[0] = k0;
        let mut tally = 0u128;
        for_each_in_box(&prefix_bounds[1..], |rest| {
            prefix[1..].copy_from_slice(rest);
            fiber.set_prefix(&prefix);
            let outer_count = fiber.count(&outer_level, false);
            if outer_count == 0 {
                return;
            }
            let inner_count = match &inner_level {
                Some((level, strict)) => fiber.count(level, *strict),
                None => 0,
            };
            tally += (outer_count - inner_count) as u128;
        });
        (BigUint::from(tally), fiber.evals)
    });
    Ok(sum_slabs(slabs))
}

/// Same count as [`shell_count_brute`] in `O(R^(d-1) log R)` predicate evaluations.
pub fn shell_count_fiber(query: &ShellQuery) -> Result<CountResult> {
    let clock = Stopwatch::start();
    let outer = &query.r + &query.delta;
    // closed shells drop ||k|| < R, half-open shells drop ||k|| <= R
    let strict_inner = query.convention == Convention::Closed;
    let (count, evals) = fiber_difference(&query.body, &outer, Some((&query.r, strict_inner)))?;
    Ok(CountResult { count, method: Method::Fiber, wall_time: clock.seconds(), points_examined: evals, exact: true })
}

/// `N_B(R) = #{k : ||k||_B <= R}`.
pub fn ball_count(body: &ConvexBody, r: &BigRational) -> Result<CountResult> {
    if r.is_negative() {
        return Err(invalid("R must be nonnegative"));
    }
    let clock = Stopwatch::start();
    let (count, evals) = fiber_difference(body, r, None)?;
    Ok(CountResult { count, method: Method::Fiber, wall_time: clock.seconds(), points_examined: evals, exact: true })
}

/// `D_B(R) = N_B(R) - |B| R^d`.
pub fn discrepancy(body: &ConvexBody, r: &BigRational) -> Result<f64> {
    let n = ball_count(body, r)?;
    Ok(discrepancy_from_count(body, r, &n.count))
}

pub fn discrepancy_from_count(body: &ConvexBody, r: &BigRational, count: &BigUint) -> f64 {
    biguint_to_f64(count) - body.volume() * rational_to_f64(r).powi(body.dim() as i32)
}

/// `|phi_0(k) - q^beta| <= delta` for a difference `k = n - m`.
enum PairPredicate {
    Gauge {
        body: ConvexBody,
        lower: Option<(Threshold, bool)>,
        upper: Threshold,
    },
    /// Integer-valued phase: `lo <= phi_0(k) <= hi`.
    Integer { lo: i128, hi: i128 },
    Float { phi: PhaseFunction, lo: f64, hi: f64, strict: bool },
}

fn parabolic_value(k: &[i64]) -> i128 {
    let last = k.len() - 1;
    k[last] as i128 - k[..last].iter().map(|&v| v as i128 * v as i128).sum::<i128>()
}

fn saturating_i128(v: &BigInt) -> i128 {
    v.to_i128().unwrap_or(if v.is_negative() { i128::MIN } else { i128::MAX })
}

impl PairPredicate {
    fn new(query: &PairQuery) -> Self {
        let strict = query.convention == Convention::HalfOpen;
        match exact_power(&query.q, query.phi.beta()) {
            Some(target) => {
                let lower = &target - &query.delta;
                let upper = &target + &query.delta;
                match query.phi.kind() {
                    PhaseKind::DifferenceGauge(body) => PairPredicate::Gauge {
                        body: body.clone(),
                        lower: (!lower.is_negative()).then(|| (body.level(&lower), strict)),
                        upper: body.level(&upper),
                    },
                    PhaseKind::Parabolic { .. } => PairPredicate::Integer {
                        lo: saturating_i128(&integer_lower_bound(&lower, strict)),
                        hi: saturating_i128(&floor_integer(&upper)),
                    },
                }
            }
            None => {
                let target = rational_to_f64(&query.q).powf(to_f64(query.phi.beta()));
                let delta = rational_to_f64(&query.delta);
                PairPredicate::Float { phi: query.phi.clone(), lo: target - delta, hi: target + delta, strict }
            }
        }
    }

    fn exact(&self) -> bool {
        !matches!(self, PairPredicate::Float { .. })
    }

    fn holds(&self, k: &[i64]) -> bool {
        match self {
            PairPredicate::Gauge { body, lower, upper } => {
                let form = body.exact_form(k);
                if upper.cmp_form(&form) == Ordering::Greater {
                    return false;
                }
                match lower {
                    None => true,
                    Some((level, strict)) => match level.cmp_form(&form) {
                        Ordering::Greater => true,
                        Ordering::Equal => !strict,
                        Ordering::Less => false,
                    },
                }
            }
            PairPredicate::Integer { lo, hi } => {
                let v = parabolic_value(k);
                *lo <= v && v <= *hi
            }
            PairPredicate::Float { phi, lo, hi, strict } => {
                let kf: Vec<f64> = k.iter().map(|&v| v as f64).collect();
                let v = phi.evaluate_difference(&kf).unwrap_or(f64::NAN);
                let above = if *strict { v > *lo } else { v >= *lo };
                above && v <= *hi
            }
        }
    }
}

pub fn pair_count_brute(query: &PairQuery) -> Result<CountResult> {
    pair_count_brute_guarded(query, DEFAULT_GUARD)
}

/// Enumerates every pair `(n, m)` of the anisotropic box.
pub fn pair_count_brute_guarded(query: &PairQuery, limit: u64) -> Result<CountResult> {
    let clock = Stopwatch::start();
    let half = query.box_half_widths()?;
    let n_points = box_volume(&half);
    guard("brute-force pair count", n_points.saturating_mul(n_points), limit, "use the difference-weight counter")?;
    let predicate = PairPredicate::new(query);
    let points: Vec<Vec<i64>> = {
        let mut all = Vec::with_capacity(n_points as usize);
        for_each_in_box(&half, |p| all.push(p.to_vec()));
        all
    };

    let rows = crate::par::map_slice(&points, |n| {
        let mut diff = vec![0i64; n.len()];
        let mut count = 0u64;
        for m in &points {
            for (j, d) in diff.iter_mut().enumerate() {
                *d = n[j] - m[j];
            }
            if predicate.holds(&diff) {
                count += 1;
            }
        }
        (BigUint::from(count), points.len() as u64)
    });
    let (count, examined) = sum_slabs(rows);
    Ok(CountResult {
        count,
        method: Method::Brute,
        wall_time: clock.seconds(),
        points_examined: examined,
        exact: predicate.exact(),
    })
}

/// Number of box pairs `(n, m)` with `n - m = k`: `prod_j max(0, L_j - |k_j|)`.
pub fn difference_weight(k: &[i64], sides: &[i64]) -> BigUint {
    let mut w = BigUint::from(1u32);
    for (&kj, &lj) in k.iter().zip(sides) {
        let f = lj - kj.abs();
        if f <= 0 {
            return BigUint::zero();
        }
        w *= f as u64;
    }
    w
}

fn weight_u128(k: &[i64], sides: &[i64]) -> Option<u128> {
    k.iter().zip(sides).try_fold(1u128, |acc, (&kj, &lj)| acc.checked_mul((lj - kj.abs()).max(0) as u128))
}

/// Groups pairs by their difference `k = n - m`; valid for translation-invariant phases.
pub fn pair_count_diff_weight(query: &PairQuery) -> Result<CountResult> {
    if !query.phi.is_translation_invariant() {
        return Err(Error::UnsupportedPhase);
    }
    let clock = Stopwatch::start();
    let sides = query.box_sides()?;
    let reach: Vec<i64> = sides.iter().map(|l| l - 1).collect();
    let predicate = PairPredicate::new(query);

    let slabs = crate::par::map_range(-reach[0]..reach[0] + 1, |k0| {
        let mut k = vec![0i64; sides.len()];
        k[0] = k0;
        let mut tally = Tally::default();
        let mut examined = 0u64;
        for_each_in_box(&reach[1..], |rest| {
            k[1..].copy_from_slice(rest);
            examined += 1;
            if predicate.holds(&k) {
                match weight_u128(&k, &sides) {
                    Some(w) => tally.add(w),
                    None => tally.add_big(&difference_weight(&k, &sides)),
                }
            }
        });
        (tally.finish(), examined)
    });
    let (count, examined) = sum_slabs(slabs);
    Ok(CountResult {
        count,
        method: Method::DiffWeight,
        wall_time: clock.seconds(),
        points_examined: examined,
        exact: predicate.exact(),
    })
}

/// Pairs with `|n_j|, |m_j| <= C q^alpha_j` and `phi(n, m) = q^beta` for the parabolic phase
/// at `q = t^(d+1)`, where `q^alpha_j = t^d` (`j < d`) and `q^alpha_d = q^beta = t^(2d)`.
pub fn sharpness_count(d: usize, t: u64, c: &BigRational) -> Result<CountResult> {
    if d < 2 {
        return Err(invalid("dimension must be at least 2"));
    }
    if t < 1 {
        return Err(invalid("t must be at least 1"));
    }
    if c.is_negative() {
        return Err(invalid("box constant C must be nonnegative"));
    }
    let clock = Stopwatch::start();
    let tb = BigRational::from_integer(BigInt::from(t));
    let side = |e: i64| -> Result<i64> {
        let m = floor_scaled_power(c, &tb, Rational64::from_integer(e))?;
        let half = m.to_i64().ok_or_else(|| invalid("box side does not fit in 64 bits"))?;
        Ok(2 * half + 1)
    };
    let l_first = side(d as i64)?;
    let l_last = side(2 * d as i64)?;
    let level = (t as i128)
        .checked_pow(2 * d as u32)
        .ok_or_else(|| invalid("t^(2d) does not fit in 128 bits"))?;
    let reach = vec![l_first - 1; d - 1];

    let slabs = crate::par::map_range(-reach[0]..reach[0] + 1, |u0| {
        let mut u = vec![0i64; d - 1];
        u[0] = u0;
        let mut tally = Tally::default();
        let mut examined = 0u64;
        for_each_in_box(&reach[1..], |rest| {
            u[1..].copy_from_slice(rest);
            examined += 1;
            let kd = level + u.iter().map(|&v| v as i128 * v as i128).sum::<i128>();
            let last = l_last as i128 - kd.abs();
            if last <= 0 {
                return;
            }
            let mut w = last as u128;
            for &uj in &u {
                w *= (l_first - uj.abs()) as u128;
            }
            tally.add(w);
        });
        (tally.finish(), examined)
    });
    let (count, examined) = sum_slabs(slabs);
    Ok(CountResult {
        count,
        method: Method::ClosedForm,
        wall_time: clock.seconds(),
        points_examined: examined,
        exact: true,
    })
}

/// `max(q^(d - 2 + 2/(d+1)), q^(d - beta) delta)`.
pub fn theorem_bound(q: f64, delta: f64, d: usize, beta: f64) -> f64 {
    let d = d as f64;
    q.powf(d - 2.0 + 2.0 / (d + 1.0)).max(q.powf(d - beta) * delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn int(n: i64) -> BigRational {
        rat(n, 1)
    }

    fn shell(body: ConvexBody, r: BigRational, delta: BigRational, conv: Convention) -> ShellQuery {
        ShellQuery::new(body, r, delta, conv).unwrap()
    }

    fn count(r: Result<CountResult>) -> u64 {
        r.unwrap().count.to_u64().unwrap()
    }

    #[test]
    fn shell_brute_examples() {
        let b2 = ConvexBody::ball(2).unwrap();
        assert_eq!(count(shell_count_brute(&shell(b2.clone(), int(5), int(0), Convention::Closed))), 12);
        assert_eq!(count(shell_count_brute(&shell(b2, int(0), int(0), Convention::Closed))), 1);
        let b3 = ConvexBody::ball(3).unwrap();
        assert_eq!(count(shell_count_brute(&shell(b3, int(1), int(0), Convention::Closed))), 6);
    }

    #[test]
    fn shell_fiber_matches_brute_on_examples() {
        let cases = [
            shell(ConvexBody::ball(2).unwrap(), int(5), int(0), Convention::Closed),
            shell(ConvexBody::pball(4, 2).unwrap(), int(10), rat(1, 2), Convention::Closed),
            shell(ConvexBody::ellipsoid(vec![vec![1, 0], vec![0, 4]]).unwrap(), int(3), int(0), Convention::Closed),
            shell(ConvexBody::ellipsoid(vec![vec![2, 1], vec![1, 3]]).unwrap(), rat(37, 4), rat(3, 2), Convention::HalfOpen),
            shell(ConvexBody::ball(3).unwrap(), rat(15, 2), int(2), Convention::HalfOpen),
        ];
        for q in &cases {
            let fiber = shell_count_fiber(q).unwrap();
            let brute = shell_count_brute(q).unwrap();
            assert_eq!(fiber.count, brute.count, "{q:?}");
            assert_eq!(fiber.method, Method::Fiber);
        }
        assert_eq!(count(shell_count_fiber(&cases[0])), 12);
    }

    #[test]
    fn brute_guard_suggests_fiber() {
        let q = shell(ConvexBody::ball(3).unwrap(), int(1000), int(0), Convention::Closed);
        match shell_count_brute(&q) {
            Err(Error::TooLarge { hint, .. }) => assert!(hint.contains("fiber")),
            other => panic!("expected guard, got {other:?}"),
        }
        assert!(shell_count_brute_guarded(&shell(ConvexBody::ball(2).unwrap(), int(5), int(0), Convention::Closed), 10).is_err());
    }

    #[test]
    fn ball_count_examples() {
        let b2 = ConvexBody::ball(2).unwrap();
        assert_eq!(count(ball_count(&b2, &int(1))), 5);
        assert_eq!(count(ball_count(&b2, &int(2))), 13);
        for body in [b2, ConvexBody::pball(6, 3).unwrap(), ConvexBody::ellipsoid(vec![vec![3, 1], vec![1, 2]]).unwrap()] {
            assert_eq!(count(ball_count(&body, &int(0))), 1);
        }
    }

    #[test]
    fn discrepancy_examples() {
        let b2 = ConvexBody::ball(2).unwrap();
        let pi = std::f64::consts::PI;
        assert!((discrepancy(&b2, &int(1)).unwrap() - (5.0 - pi)).abs() < 1e-12);
        assert!((discrepancy(&b2, &int(2)).unwrap() - (13.0 - 4.0 * pi)).abs() < 1e-12);
        assert_eq!(discrepancy(&b2, &int(0)).unwrap(), 1.0);
    }

    fn pair(phi: PhaseFunction, q: i64, delta: BigRational, c: i64, conv: Convention) -> PairQuery {
        PairQuery::new(phi, int(q), delta, int(c), conv).unwrap()
    }

    #[test]
    fn pair_examples() {
        let p2 = PhaseFunction::parabolic(2).unwrap();
        let q = pair(p2.clone(), 1, int(0), 1, Convention::Closed);
        assert_eq!(count(pair_count_brute(&q)), 10);
        assert_eq!(count(pair_count_diff_weight(&q)), 10);

        let half = pair(p2, 1, int(0), 1, Convention::HalfOpen);
        assert_eq!(count(pair_count_brute(&half)), count(pair_count_diff_weight(&half)));
        assert_eq!(count(pair_count_brute(&half)), 0);

        let euclid = PhaseFunction::difference_gauge(ConvexBody::ball(2).unwrap()).unwrap();
        let degenerate = pair(euclid.clone(), 5, int(0), 0, Convention::Closed);
        assert_eq!(count(pair_count_brute(&degenerate)), 0);
        assert_eq!(count(pair_count_diff_weight(&degenerate)), 0);

        let q = pair(euclid, 5, int(0), 2, Convention::Closed);
        let brute = pair_count_brute(&q).unwrap();
        assert_eq!(brute.count, pair_count_diff_weight(&q).unwrap().count);
        assert!(brute.count > BigUint::zero());
    }

    #[test]
    fn zero_difference_weight_is_box_size() {
        assert_eq!(difference_weight(&[0, 0], &[3, 3]), BigUint::from(9u32));
        assert_eq!(difference_weight(&[3, 0], &[3, 3]), BigUint::zero());
        assert_eq!(weight_u128(&[-1, 2], &[3, 5]), Some(6));
    }

    #[test]
    fn sharpness_examples() {
        let one = int(1);
        assert_eq!(count(sharpness_count(2, 1, &one)), 10);
        let closed = sharpness_count(2, 2, &one).unwrap();
        let q = pair(PhaseFunction::parabolic(2).unwrap(), 8, int(0), 1, Convention::Closed);
        assert_eq!(closed.count, pair_count_diff_weight(&q).unwrap().count);
        assert_eq!(closed.count, BigUint::from(697u32));
        assert_eq!(count(sharpness_count(2, 3, &int(0))), 0);
        assert_eq!(count(sharpness_count(2, 1, &int(0))), 0);
        let d3 = sharpness_count(3, 2, &one).unwrap();
        let q = pair(PhaseFunction::parabolic(3).unwrap(), 16, int(0), 1, Convention::Closed);
        assert_eq!(d3.count, pair_count_diff_weight(&q).unwrap().count);
    }

    #[test]
    fn theorem_bound_examples() {
        assert!((theorem_bound(100.0, 0.0, 2, 1.0) - 21.544346900318832).abs() < 1e-9);
        assert_eq!(theorem_bound(100.0, 1.0, 2, 1.0), 100.0);
        assert!((theorem_bound(64.0, 0.0, 3, 1.5) - 512.0).abs() < 1e-9);
    }

    #[test]
    fn irrational_levels_fall_back_to_floating_point() {
        let p2 = PhaseFunction::parabolic(2).unwrap();
        let q = PairQuery::new(p2, int(2), rat(1, 2), int(1), Convention::Closed).unwrap();
        let brute = pair_count_brute(&q).unwrap();
        let fast = pair_count_diff_weight(&q).unwrap();
        assert!(!brute.exact);
        assert_eq!(brute.count, fast.count);
    }

    #[test]
    fn box_sides_are_exact() {
        let q = PairQuery::new(PhaseFunction::parabolic(2).unwrap(), int(27), int(0), int(1), Convention::Closed).unwrap();
        assert_eq!(q.box_sides().unwrap(), vec![19, 163]);
        let q = PairQuery::new(PhaseFunction::parabolic(2).unwrap(), int(27), int(0), rat(1, 2), Convention::Closed).unwrap();
        assert_eq!(q.box_half_widths().unwrap(), vec![4, 40]);
    }
}
