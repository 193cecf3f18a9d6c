//! Exact rational and integer helpers shared by the predicates and counters.
//!
//! Every comparison that decides lattice membership goes through
//! [`Threshold`], which compares an integer form against a rational value
//! without rounding. The `i128` path covers the common sizes; anything that
//! overflows is redone with arbitrary-precision integers.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Result};

/// Parses `"7"`, `"-3/8"`, `"0.125"` or `"1e-3"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(invalid("empty number"));
    }
    if let Some((n, d)) = s.split_once('/') {
        let num: BigInt = n.trim().parse().map_err(|_| invalid(format!("bad numerator in {s:?}")))?;
        let den: BigInt = d.trim().parse().map_err(|_| invalid(format!("bad denominator in {s:?}")))?;
        if den.is_zero() {
            return Err(invalid(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..].parse().map_err(|_| invalid(format!("bad exponent in {s:?}")))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(invalid(format!("not a number: {s:?}")));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(invalid(format!("not a number: {s:?}")));
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = if all_digits.is_empty() { BigInt::zero() } else { all_digits.parse().unwrap() };
    if negative {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(num * Pow::pow(&ten, scale as u32))
    } else {
        BigRational::new(num, Pow::pow(&ten, (-scale) as u32))
    };
    Ok(value)
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn big_rational(r: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// `x^(num/den)` for `x >= 0` when the result is rational, `None` otherwise.
pub fn exact_power(x: &BigRational, exponent: Rational64) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let (a, b) = (*exponent.numer(), *exponent.denom());
    let raised = pow_signed(x, a)?;
    let num = exact_root(raised.numer(), b as u32)?;
    let den = exact_root(raised.denom(), b as u32)?;
    Some(BigRational::new(num, den))
}

/// `floor(c * x^(num/den))` for `c, x >= 0`, computed without rounding.
pub fn floor_scaled_power(c: &BigRational, x: &BigRational, exponent: Rational64) -> Result<BigInt> {
    if c.is_negative() || x.is_negative() {
        return Err(invalid("box constant and dilation must be nonnegative"));
    }
    let (a, b) = (*exponent.numer(), *exponent.denom());
    let raised = pow_signed(x, a).ok_or_else(|| invalid("zero raised to a negative power"))?;
    let inner = Pow::pow(c, b as u32) * raised;
    // floor(y^(1/b)) == floor(floor(y)^(1/b)) for y >= 0
    let floor = inner.floor().to_integer();
    Ok(floor.nth_root(b as u32))
}

fn pow_signed(x: &BigRational, a: i64) -> Option<BigRational> {
    if a >= 0 {
        Some(Pow::pow(x, a as u32))
    } else if x.is_zero() {
        None
    } else {
        Some(Pow::pow(&x.recip(), (-a) as u32))
    }
}

fn exact_root(n: &BigInt, b: u32) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.nth_root(b);
    (Pow::pow(&r, b) == *n).then_some(r)
}

/// An integer-valued quantity, kept in `i128` while it fits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Form {
    Small(i128),
    Big(BigInt),
}

impl Form {
    pub fn to_big(&self) -> BigInt {
        match self {
            Form::Small(v) => BigInt::from(*v),
            Form::Big(v) => v.clone(),
        }
    }
}

/// A rational constant `num / den` (den > 0) that integer forms are compared against.
#[derive(Clone, Debug)]
pub struct Threshold {
    num: BigInt,
    den: BigInt,
    small: Option<(i128, i128)>,
}

impl Threshold {
    pub fn new(value: &BigRational) -> Self {
        let num = value.numer().clone();
        let den = value.denom().clone();
        let small = num.to_i128().zip(den.to_i128());
        Threshold { num, den, small }
    }

    /// `value^exponent` for a nonnegative rational value.
    pub fn power(value: &BigRational, exponent: u32) -> Self {
        Self::new(&Pow::pow(value, exponent))
    }

    /// Orders `form` against the threshold value.
    pub fn cmp_form(&self, form: &Form) -> Ordering {
        if let (Form::Small(f), Some((n, d))) = (form, self.small) {
            if let Some(lhs) = f.checked_mul(d) {
                return lhs.cmp(&n);
            }
        }
        (form.to_big() * &self.den).cmp(&self.num)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

/// Smallest integer `v` with `v >= r` (or `v > r` when `strict`).
pub fn integer_lower_bound(r: &BigRational, strict: bool) -> BigInt {
    if strict {
        r.floor().to_integer() + 1
    } else {
        r.ceil().to_integer()
    }
}

pub fn floor_integer(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}

/// Exact determinant of an integer matrix by fraction-free (Bareiss) elimination.
pub fn bareiss_determinant(rows: &[Vec<i64>]) -> BigInt {
    let n = rows.len();
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v.div_floor(&prev);
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Leading principal minors, used to certify positive definiteness exactly.
pub fn leading_minors(rows: &[Vec<i64>]) -> Vec<BigInt> {
    (1..=rows.len())
        .map(|k| {
            let sub: Vec<Vec<i64>> = rows[..k].iter().map(|r| r[..k].to_vec()).collect();
            bareiss_determinant(&sub)
        })
        .collect()
}

pub fn biguint_to_f64(v: &BigUint) -> f64 {
    v.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_common_notations() {
        assert_eq!(parse_rational("5").unwrap(), r(5, 1));
        assert_eq!(parse_rational("-3/8").unwrap(), r(-3, 8));
        assert_eq!(parse_rational("0.125").unwrap(), r(1, 8));
        assert_eq!(parse_rational("1e-3").unwrap(), r(1, 1000));
        assert_eq!(parse_rational("2.5e2").unwrap(), r(250, 1));
        assert_eq!(parse_rational(".5").unwrap(), r(1, 2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn exact_powers() {
        assert_eq!(exact_power(&r(8, 1), Rational64::new(2, 3)), Some(r(4, 1)));
        assert_eq!(exact_power(&r(27, 8), Rational64::new(4, 3)), Some(r(81, 16)));
        assert_eq!(exact_power(&r(2, 1), Rational64::new(1, 2)), None);
        assert_eq!(exact_power(&r(4, 1), Rational64::new(-1, 2)), Some(r(1, 2)));
    }

    #[test]
    fn floor_of_scaled_power() {
        // 2^(1/2) = 1.414.., 3 * that = 4.24..
        assert_eq!(floor_scaled_power(&r(3, 1), &r(2, 1), Rational64::new(1, 2)).unwrap(), 4.into());
        // 8^(4/3) = 16 exactly
        assert_eq!(floor_scaled_power(&r(1, 1), &r(8, 1), Rational64::new(4, 3)).unwrap(), 16.into());
        assert_eq!(floor_scaled_power(&r(1, 2), &r(8, 1), Rational64::new(4, 3)).unwrap(), 8.into());
        assert_eq!(floor_scaled_power(&r(0, 1), &r(8, 1), Rational64::new(1, 1)).unwrap(), 0.into());
    }

    #[test]
    fn threshold_falls_back_to_big_integers() {
        let t = Threshold::new(&r(i64::MAX, 3));
        let huge = Form::Small(i128::MAX / 2);
        assert_eq!(t.cmp_form(&huge), Ordering::Greater);
        assert_eq!(t.cmp_form(&Form::Small(1)), Ordering::Less);
        let t = Threshold::power(&r(21, 10), 4);
        assert_eq!(t.cmp_form(&Form::Small(17)), Ordering::Less);
    }

    #[test]
    fn determinants() {
        assert_eq!(bareiss_determinant(&[vec![1, 0], vec![0, 4]]), 4.into());
        assert_eq!(bareiss_determinant(&[vec![0, 1], vec![1, 0]]), (-1).into());
        assert_eq!(bareiss_determinant(&[vec![2, 1, 0], vec![1, 2, 1], vec![0, 1, 2]]), 4.into());
        assert_eq!(leading_minors(&[vec![2, 1], vec![1, 2]]), vec![2.into(), 3.into()]);
    }
}
