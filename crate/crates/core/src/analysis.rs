//! Log-log exponent fits and bound-ratio statistics over experiment grids.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub r_squared: f64,
    pub n: usize,
}

/// Ordinary least squares of `log y` on `log x`.
pub fn fit_exponent(rows: &[(f64, f64)]) -> Result<PowerFit> {
    if rows.len() < 3 {
        return Err(Error::DegenerateRegression(format!("need at least 3 rows, got {}", rows.len())));
    }
    if let Some((x, y)) = rows.iter().find(|(x, y)| !(*x > 0.0) || !(*y > 0.0)) {
        return Err(invalid(format!("log-log fit needs positive values, got ({x}, {y})")));
    }
    let mut xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    xs.sort_by(f64::total_cmp);
    if xs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DegenerateRegression("x values must be distinct".into()));
    }

    let n = rows.len() as f64;
    let lx: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
    let ly: Vec<f64> = rows.iter().map(|r| r.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (sse / (n - 2.0) / sxx).sqrt();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(PowerFit { slope, intercept, stderr, r_squared, n: rows.len() })
}

/// Drops rows with `y <= 0` before fitting and reports how many were dropped.
pub fn fit_exponent_positive(rows: &[(f64, f64)]) -> Result<(PowerFit, usize)> {
    let kept: Vec<(f64, f64)> = rows.iter().copied().filter(|r| r.1 > 0.0).collect();
    let dropped = rows.len() - kept.len();
    Ok((fit_exponent(&kept)?, dropped))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub parameter: f64,
    pub value: f64,
    pub bound: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRatios {
    pub max_ratio: f64,
    /// Parameter at which `max_ratio` is attained.
    pub argmax: f64,
    pub first_half_max: f64,
    pub second_half_max: f64,
}

/// Ratios `value / bound`, maximized over the whole grid and over each half.
///
/// Rows are ordered by parameter; with `n` rows the lower half is the first
/// `ceil(n/2)` and the upper half the last `ceil(n/2)`, so an odd grid shares
/// its middle row.
pub fn bound_ratio_scan(rows: &[ScanRow]) -> Result<BoundRatios> {
    if rows.is_empty() {
        return Err(invalid("no rows to scan"));
    }
    let mut ratios: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| match r.bound {
            Some(b) if b > 0.0 => Ok((r.parameter, r.value / b)),
            _ => Err(invalid(format!("row at {} needs a positive bound", r.parameter))),
        })
        .collect::<Result<_>>()?;
    ratios.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = ratios.len();
    let max_of = |s: &[(f64, f64)]| s.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let (argmax, max_ratio) = ratios
        .iter()
        .copied()
        .fold((ratios[0].0, f64::NEG_INFINITY), |acc, r| if r.1 > acc.1 { r } else { acc });
    Ok(BoundRatios {
        max_ratio,
        argmax,
        first_half_max: max_of(&ratios[..n.div_ceil(2)]),
        second_half_max: max_of(&ratios[n / 2..]),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    pub fitted_slope: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
    pub max_ratio: Option<f64>,
    /// Rows with nonpositive values left out of the fit.
    pub dropped_rows: usize,
}

impl ScanReport {
    /// Fits `value` against `parameter`; `max_ratio` is `max value/bound` when every row has a bound.
    pub fn from_rows(rows: Vec<ScanRow>) -> Result<Self> {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.parameter, r.value)).collect();
        let (fit, dropped_rows) = fit_exponent_positive(&pts)?;
        let max_ratio = if rows.iter().all(|r| r.bound.is_some()) {
            Some(bound_ratio_scan(&rows)?.max_ratio)
        } else {
            None
        };
        Ok(ScanReport {
            rows,
            fitted_slope: fit.slope,
            slope_stderr: fit.stderr,
            r_squared: fit.r_squared,
            max_ratio,
            dropped_rows,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let f = fit_exponent(&[(2.0, 4.0), (4.0, 16.0), (8.0, 64.0)]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        let rows: Vec<(f64, f64)> = [8.0f64, 27.0, 64.0].iter().map(|&q| (q, q.powf(8.0 / 3.0))).collect();
        let f = fit_exponent(&rows).unwrap();
        assert!((f.slope - 8.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn noisy_fit_matches_hand_computation() {
        // log2 x = 1,2,3 ; slope = (ln 60 - ln 4) / (2 ln 2) since the middle x has zero weight
        let f = fit_exponent(&[(2.0, 4.0), (4.0, 17.0), (8.0, 60.0)]).unwrap();
        let expected = (60.0f64.ln() - 4.0f64.ln()) / (2.0 * 2.0f64.ln());
        assert!((f.slope - expected).abs() < 1e-12);
        assert!((f.slope - 2.0).abs() < 0.05);
        assert!(f.stderr > 0.0);
        assert!(f.r_squared < 1.0);
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(fit_exponent(&[(2.0, 4.0), (4.0, 16.0)]), Err(Error::DegenerateRegression(_))));
        assert!(matches!(fit_exponent(&[(2.0, 4.0), (2.0, 5.0), (3.0, 1.0)]), Err(Error::DegenerateRegression(_))));
        assert!(matches!(fit_exponent(&[(2.0, 0.0), (4.0, 16.0), (8.0, 1.0)]), Err(Error::InvalidArgument(_))));
        let (f, dropped) = fit_exponent_positive(&[(1.0, 0.0), (2.0, 4.0), (4.0, 16.0), (8.0, 64.0)]).unwrap();
        assert_eq!(dropped, 1);
        assert!((f.slope - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bound_ratios() {
        let rows: Vec<ScanRow> =
            (1..=5).map(|i| ScanRow { parameter: i as f64, value: 3.0 * i as f64, bound: Some(3.0 * i as f64) }).collect();
        let b = bound_ratio_scan(&rows).unwrap();
        assert_eq!(b.max_ratio, 1.0);
        let zeros: Vec<ScanRow> = rows.iter().map(|r| ScanRow { value: 0.0, ..*r }).collect();
        assert_eq!(bound_ratio_scan(&zeros).unwrap().max_ratio, 0.0);

        let rising: Vec<ScanRow> =
            [1.0, 2.0, 3.0, 4.0, 5.0].iter().map(|&p| ScanRow { parameter: p, value: p, bound: Some(1.0) }).collect();
        let b = bound_ratio_scan(&rising).unwrap();
        assert_eq!((b.max_ratio, b.argmax, b.first_half_max, b.second_half_max), (5.0, 5.0, 3.0, 5.0));
        assert!(bound_ratio_scan(&[ScanRow { parameter: 1.0, value: 1.0, bound: Some(0.0) }]).is_err());
    }

    #[test]
    fn scan_report_drops_zero_rows() {
        let rows = vec![
            ScanRow { parameter: 1.0, value: 0.0, bound: None },
            ScanRow { parameter: 2.0, value: 2.0, bound: None },
            ScanRow { parameter: 4.0, value: 4.0, bound: None },
            ScanRow { parameter: 8.0, value: 8.0, bound: None },
        ];
        let rep = ScanReport::from_rows(rows).unwrap();
        assert_eq!(rep.dropped_rows, 1);
        assert!((rep.fitted_slope - 1.0).abs() < 1e-12);
        assert_eq!(rep.max_ratio, None);
    }
}
