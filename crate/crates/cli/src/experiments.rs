use std::collections::BTreeMap;
use std::time::Instant;

use latshell::analysis::fit_exponent_positive;
use latshell::counting::{shell_count_brute, PairQuery};
use latshell::curvature::{certify_level_set, FdOrder, FdScheme, LevelSetScan, DEFAULT_FLOOR};
use latshell::energy::{dyadic_inner_sum, EnergyParams};
use latshell::exact::{biguint_to_f64, rational_to_f64};
use latshell::{
    ball_count, bound_ratio_scan, discrepancy_from_count, discrete_energy, pair_count_brute, pair_count_diff_weight,
    sharpness_count, shell_count_fiber, theorem_bound, Convention, ScanRow, ShellQuery,
};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, ToPrimitive};
use serde_json::{Map, Value};

use crate::args::{DiscrepancyArgs, EnergyArgs, FitArgs, MaArgs, PairArgs, SharpnessArgs, ShellArgs};
use crate::config::{self, field_err, opt_num, opt_rational, parse_num, rational_list, required, CliError, CliResult};
use crate::output::{float_value, Cell, Report};

/// Run-wide switches that do not affect the numbers.
#[derive(Clone, Copy, Debug, Default)]
pub struct Ctx {
    pub timing: bool,
}

impl Ctx {
    fn seconds(&self, s: f64) -> Value {
        if self.timing {
            float_value(s)
        } else {
            Value::Null
        }
    }
}

fn conv_name(c: Convention) -> &'static str {
    match c {
        Convention::Closed => "closed",
        Convention::HalfOpen => "half_open",
    }
}

fn rat_f64(r: &BigRational) -> f64 {
    rational_to_f64(r)
}

fn q_from_t(t: u64, d: usize) -> CliResult<u64> {
    t.checked_pow(d as u32 + 1).ok_or_else(|| field_err("t", format!("t^(d+1) overflows for t={t}")))
}

pub fn count_shell(a: &ShellArgs, params: Map<String, Value>) -> CliResult<Report> {
    let body = config::body(&a.body)?;
    let radii = rational_list("R", required("R", &a.r)?)?;
    let deltas = rational_list("delta", a.delta.as_deref().unwrap_or("0"))?;
    let conv = config::convention(&a.convention)?;
    let method = a.method.as_deref().unwrap_or("fiber");
    if !matches!(method, "fiber" | "brute") {
        return Err(field_err("method", format!("unknown method `{method}` (fiber or brute)")));
    }
    let mut rep = Report::new(
        "count-shell",
        params,
        &["body", "dim", "R", "delta", "convention", "count", "method", "wall_time"],
    );
    for r in &radii {
        for delta in &deltas {
            let q = ShellQuery::new(body.clone(), r.clone(), delta.clone(), conv).map_err(|e| field_err("R", e))?;
            let res = if method == "fiber" { shell_count_fiber(&q)? } else { shell_count_brute(&q)? };
            rep.push(vec![
                Cell::text(config::body_label(&body)),
                Cell::int(body.dim()),
                Cell::int(r),
                Cell::int(delta),
                Cell::text(conv_name(conv)),
                Cell::int(&res.count),
                Cell::text(res.method.as_str()),
                Cell::Time(res.wall_time),
            ]);
        }
    }
    rep.result("rows", rep.rows.len());
    Ok(rep)
}

pub fn count_pairs(a: &PairArgs, params: Map<String, Value>) -> CliResult<Report> {
    let phi = config::phase(&a.phase, &a.body)?;
    let d = phi.dim();
    let qs: Vec<BigRational> = match (&a.q, &a.t) {
        (Some(_), Some(_)) => return Err(field_err("t", "give either q or t, not both")),
        (Some(q), None) => rational_list("q", q)?,
        (None, Some(t)) => config::integer_list("t", t)?
            .into_iter()
            .map(|t| q_from_t(t, d).map(|q| BigRational::from_integer(q.into())))
            .collect::<CliResult<_>>()?,
        (None, None) => return Err(field_err("q", "is required (or give t)")),
    };
    let deltas = rational_list("delta", a.delta.as_deref().unwrap_or("0"))?;
    let c = opt_rational("C", &a.c, 1)?;
    let conv = config::convention(&a.convention)?;
    let method = a.method.as_deref().unwrap_or("diff_weight");
    if !matches!(method, "diff_weight" | "brute") {
        return Err(field_err("method", format!("unknown method `{method}` (diff_weight or brute)")));
    }
    let beta = phi.beta().to_f64().unwrap_or(f64::NAN);
    let mut rep = Report::new(
        "count-pairs",
        params,
        &[
            "phase", "dim", "q", "delta", "C", "convention", "count", "normalized", "theorem_bound", "ratio", "method",
            "exact", "wall_time",
        ],
    );
    let mut per_delta: BTreeMap<usize, Vec<ScanRow>> = BTreeMap::new();
    for (di, delta) in deltas.iter().enumerate() {
        for q in &qs {
            let query = PairQuery::new(phi.clone(), q.clone(), delta.clone(), c.clone(), conv)
                .map_err(|e| field_err("q", e))?;
            let res = if method == "diff_weight" { pair_count_diff_weight(&query)? } else { pair_count_brute(&query)? };
            let qf = rat_f64(q);
            let normalized = biguint_to_f64(&res.count) / qf.powi(d as i32);
            let bound = theorem_bound(qf, rat_f64(delta), d, beta);
            per_delta.entry(di).or_default().push(ScanRow { parameter: qf, value: normalized, bound: Some(bound) });
            rep.push(vec![
                Cell::text(config::phase_label(&phi)),
                Cell::int(d),
                Cell::int(q),
                Cell::int(delta),
                Cell::int(&c),
                Cell::text(conv_name(conv)),
                Cell::int(&res.count),
                Cell::Float(normalized),
                Cell::Float(bound),
                Cell::Float(normalized / bound),
                Cell::text(res.method.as_str()),
                Cell::Bool(res.exact),
                Cell::Time(res.wall_time),
            ]);
        }
    }

    let expect = a.expect_slope.as_deref().map(|s| parse_num::<f64>("expect_slope", s)).transpose()?;
    let tol: f64 = opt_num("slope_tol", &a.slope_tol, 0.15)?;
    let max_half = a.max_half_ratio.as_deref().map(|s| parse_num::<f64>("max_half_ratio", s)).transpose()?;
    for (di, rows) in per_delta {
        let key = format!("delta={}", deltas[di]);
        let mut entry = Map::new();
        let ratios = bound_ratio_scan(&rows)?;
        entry.insert("max_ratio".into(), float_value(ratios.max_ratio));
        entry.insert("first_half_max".into(), float_value(ratios.first_half_max));
        entry.insert("second_half_max".into(), float_value(ratios.second_half_max));
        let half = ratios.second_half_max / ratios.first_half_max;
        entry.insert("half_ratio".into(), float_value(half));
        let mut ok = true;
        if let Some(limit) = max_half {
            ok &= half <= limit;
        }
        if rows.len() >= 3 {
            let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.parameter, r.value)).collect();
            let (fit, dropped) = fit_exponent_positive(&pts)?;
            entry.insert("slope".into(), float_value(fit.slope));
            entry.insert("slope_stderr".into(), float_value(fit.stderr));
            entry.insert("r_squared".into(), float_value(fit.r_squared));
            entry.insert("dropped_rows".into(), dropped.into());
            if let Some(e) = expect {
                ok &= (fit.slope - e).abs() <= tol;
            }
        } else if expect.is_some() {
            return Err(CliError::Lib(latshell::Error::DegenerateRegression(format!(
                "slope check needs at least 3 values of q, got {}",
                rows.len()
            ))));
        }
        entry.insert("pass".into(), ok.into());
        rep.pass &= ok;
        rep.result(&key, Value::Object(entry));
    }
    Ok(rep)
}

pub fn discrepancy_scan(a: &DiscrepancyArgs, params: Map<String, Value>) -> CliResult<Report> {
    let body = config::body(&a.body)?;
    let d = body.dim();
    let radii = rational_list("R", a.r.as_deref().unwrap_or("2:100:2"))?;
    let exponent: f64 = opt_num("exponent", &a.exponent, d as f64 - 2.0 + 20.0 / 43.0)?;
    let mut rep = Report::new(
        "discrepancy-scan",
        params,
        &["body", "dim", "R", "count", "volume_term", "discrepancy", "normalized", "wall_time"],
    );
    let mut fit_rows = Vec::new();
    let mut worst = (f64::NEG_INFINITY, 0.0);
    for r in &radii {
        if r.is_negative() {
            return Err(field_err("R", "radii must be nonnegative"));
        }
        let res = ball_count(&body, r)?;
        let disc = discrepancy_from_count(&body, r, &res.count);
        let rf = rat_f64(r);
        let volume = body.volume() * rf.powi(d as i32);
        let normalized = disc.abs() / rf.powf(exponent);
        if normalized > worst.0 {
            worst = (normalized, rf);
        }
        fit_rows.push((rf, disc.abs()));
        rep.push(vec![
            Cell::text(config::body_label(&body)),
            Cell::int(d),
            Cell::int(r),
            Cell::int(&res.count),
            Cell::Float(volume),
            Cell::Float(disc),
            Cell::Float(normalized),
            Cell::Time(res.wall_time),
        ]);
    }
    rep.result_f("exponent", exponent);
    rep.result_f("max_normalized", worst.0);
    rep.result_f("argmax_R", worst.1);
    if fit_rows.len() >= 3 {
        let (fit, dropped) = fit_exponent_positive(&fit_rows)?;
        rep.result_f("slope", fit.slope);
        rep.result_f("slope_stderr", fit.stderr);
        rep.result("dropped_rows", dropped);
        if let Some(m) = &a.max_slope {
            rep.check("slope_ok", fit.slope <= parse_num::<f64>("max_slope", m)?);
        }
    }
    if let Some(m) = &a.max_ratio {
        rep.check("ratio_ok", worst.0 <= parse_num::<f64>("max_ratio", m)?);
    }
    Ok(rep)
}

pub fn ma_check(a: &MaArgs, params: Map<String, Value>) -> CliResult<Report> {
    let phi = config::phase(&a.phase, &a.body)?;
    let seed: u64 = parse_num("seed", required("seed", &a.seed)?)?;
    let levels = config::float_list("t", a.t.as_deref().unwrap_or("1"))?;
    let samples: usize = opt_num("samples", &a.samples, 1000)?;
    let thickness: f64 = opt_num("thickness", &a.thickness, 1e-2)?;
    let h: f64 = opt_num("h", &a.h, 1e-4)?;
    let order = match a.order.as_deref().unwrap_or("2") {
        "2" | "second" => FdOrder::Second,
        "4" | "fourth" => FdOrder::Fourth,
        other => return Err(field_err("order", format!("`{other}` (2 or 4)"))),
    };
    let scheme = FdScheme::new(h, order).map_err(|e| field_err("h", e))?;
    let floor: f64 = opt_num("floor", &a.floor, DEFAULT_FLOOR)?;
    let expect_pass = match a.expect.as_deref().unwrap_or("pass") {
        "pass" => true,
        "fail" => false,
        other => return Err(field_err("expect", format!("`{other}` (pass or fail)"))),
    };
    let mut rep = Report::new(
        "ma-check",
        params,
        &[
            "phase", "dim", "t", "seed", "n_accepted", "draws", "projected", "probes", "rejected_near_diagonal",
            "min_abs_det", "min_grad_x_norm", "min_grad_y_norm", "floor", "hypothesis_pass",
        ],
    );
    let mut all_match = true;
    for &t in &levels {
        let mut scan = LevelSetScan::new(phi.clone(), t, samples, seed, thickness);
        scan.floor = floor;
        scan.axis_probes = a.axis_probes.unwrap_or(false);
        let r = certify_level_set(&scan, &scheme)?;
        all_match &= r.hypothesis_pass == expect_pass;
        rep.push(vec![
            Cell::text(config::phase_label(&phi)),
            Cell::int(phi.dim()),
            Cell::Float(t),
            Cell::int(seed),
            Cell::int(r.n_accepted),
            Cell::int(r.draws),
            Cell::int(r.projected),
            Cell::int(r.probes),
            Cell::int(r.rejected_near_diagonal),
            Cell::Float(r.min_abs_det),
            Cell::Float(r.min_grad_x_norm),
            Cell::Float(r.min_grad_y_norm),
            Cell::Float(r.floor),
            Cell::Bool(r.hypothesis_pass),
        ]);
    }
    rep.result("expected", if expect_pass { "pass" } else { "fail" });
    rep.check("outcome_as_expected", all_match);
    Ok(rep)
}

pub fn energy_scan(a: &EnergyArgs, params: Map<String, Value>) -> CliResult<Report> {
    let d: usize = opt_num("dim", &a.dim, 2)?;
    let alpha: Vec<Rational64> = match &a.alpha {
        Some(t) => t.split(',').map(|p| config::small_rational("alpha", p)).collect::<CliResult<_>>()?,
        None => vec![Rational64::from_integer(1); d],
    };
    if alpha.len() != d {
        return Err(field_err("alpha", format!("expected {d} exponents, got {}", alpha.len())));
    }
    let c = opt_rational("C", &a.c, 1)?;
    let s_list = config::float_list("s", required("s", &a.s)?)?;
    let qs: Vec<u64> = match (&a.q, &a.t) {
        (Some(_), Some(_)) => return Err(field_err("t", "give either q or t, not both")),
        (Some(q), None) => config::integer_list("q", q)?,
        (None, Some(t)) => config::integer_list("t", t)?.into_iter().map(|t| q_from_t(t, d)).collect::<CliResult<_>>()?,
        (None, None) => return Err(field_err("q", "is required (or give t)")),
    };
    let slope_tol = a.slope_tol.as_deref().map(|s| parse_num::<f64>("slope_tol", s)).transpose()?;
    let max_ratio = a.max_ratio.as_deref().map(|s| parse_num::<f64>("max_ratio", s)).transpose()?;
    let mut rep = Report::new("energy-scan", params, &["q", "s", "E", "ratio_to_first", "wall_time"]);
    rep.notes.push("energy: off-diagonal pairs only, sharp box cutoff".into());
    for &s in &s_list {
        let mut rows = Vec::new();
        for &q in &qs {
            let p = EnergyParams::new(d, q, alpha.clone(), c.clone(), s).map_err(|e| field_err("s", e))?;
            let start = Instant::now();
            let e = discrete_energy(&p)?;
            let secs = start.elapsed().as_secs_f64();
            let first = rows.first().map(|r: &ScanRow| r.value).unwrap_or(e);
            rows.push(ScanRow { parameter: q as f64, value: e, bound: None });
            rep.push(vec![Cell::int(q), Cell::Float(s), Cell::Float(e), Cell::Float(e / first), Cell::Time(secs)]);
        }
        let mut entry = Map::new();
        let max = rows.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);
        let min = rows.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
        entry.insert("max_ratio".into(), float_value(max / min));
        let mut ok = true;
        if let Some(m) = max_ratio {
            ok &= max / min <= m;
        }
        if rows.len() >= 3 {
            let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.parameter, r.value)).collect();
            let (fit, _) = fit_exponent_positive(&pts)?;
            entry.insert("slope".into(), float_value(fit.slope));
            entry.insert("slope_stderr".into(), float_value(fit.stderr));
            if let Some(tol) = slope_tol {
                ok &= fit.slope.abs() <= tol;
            }
        } else if slope_tol.is_some() {
            return Err(CliError::Lib(latshell::Error::DegenerateRegression(format!(
                "slope check needs at least 3 values of q, got {}",
                rows.len()
            ))));
        }
        entry.insert("pass".into(), ok.into());
        rep.pass &= ok;
        rep.result(&format!("s={}", crate::output::fmt_g(s)), Value::Object(entry));
    }
    Ok(rep)
}

pub fn sharpness_demo(a: &SharpnessArgs, params: Map<String, Value>) -> CliResult<Report> {
    let d: usize = opt_num("dim", &a.dim, 2)?;
    let ts = config::integer_list("t", a.t.as_deref().unwrap_or("2:8"))?;
    let c = opt_rational("C", &a.c, 1)?;
    let mut rep =
        Report::new("sharpness-demo", params, &["t", "q", "count", "normalized", "method", "exact", "wall_time"]);
    let df = d as f64;
    let bound_exp = df - 2.0 + 2.0 / (df + 1.0);
    let mut rows = Vec::new();
    for &t in &ts {
        let q = q_from_t(t, d)?;
        let res = sharpness_count(d, t, &c).map_err(|e| field_err("t", e))?;
        let qf = q as f64;
        let normalized = biguint_to_f64(&res.count) / qf.powi(d as i32);
        rows.push(ScanRow { parameter: qf, value: normalized, bound: Some(qf.powf(bound_exp)) });
        rep.push(vec![
            Cell::int(t),
            Cell::int(q),
            Cell::int(&res.count),
            Cell::Float(normalized),
            Cell::text(res.method.as_str()),
            Cell::Bool(res.exact),
            Cell::Time(res.wall_time),
        ]);
    }
    let expected = 2.0 * df * df / (df + 1.0);
    rep.result_f("expected_slope", expected);
    rep.result_f("expected_normalized_slope", bound_exp);
    if rows.len() >= 3 {
        let raw: Vec<(f64, f64)> = rows.iter().map(|r| (r.parameter, r.value * r.parameter.powi(d as i32))).collect();
        let (fit, dropped) = fit_exponent_positive(&raw)?;
        let norm: Vec<(f64, f64)> = rows.iter().map(|r| (r.parameter, r.value)).collect();
        let (nfit, _) = fit_exponent_positive(&norm)?;
        rep.result_f("slope", fit.slope);
        rep.result_f("slope_stderr", fit.stderr);
        rep.result_f("normalized_slope", nfit.slope);
        rep.result("dropped_rows", dropped);
        if let Some(tol) = &a.slope_tol {
            rep.check("slope_ok", (fit.slope - expected).abs() <= parse_num::<f64>("slope_tol", tol)?);
        }
        let positive: Vec<ScanRow> = rows.iter().copied().filter(|r| r.value > 0.0).collect();
        if !positive.is_empty() {
            let ratios = bound_ratio_scan(&positive)?;
            rep.result_f("half_ratio", ratios.second_half_max / ratios.first_half_max);
        }
    } else if a.slope_tol.is_some() {
        return Err(CliError::Lib(latshell::Error::DegenerateRegression(format!(
            "slope check needs at least 3 values of t, got {}",
            rows.len()
        ))));
    }
    Ok(rep)
}

pub fn fit(a: &FitArgs, params: Map<String, Value>) -> CliResult<Report> {
    let path = required("input", &a.input)?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header: Vec<String> =
        reader.headers().map_err(|e| field_err("input", e))?.iter().map(|h| h.trim().to_string()).collect();
    if header.len() < 2 {
        return Err(field_err("input", "need at least two columns"));
    }
    let pick = |given: &Option<String>, preferred: &str, fallback: usize, field: &str| -> CliResult<usize> {
        match given {
            Some(name) => header.iter().position(|h| h == name).ok_or_else(|| field_err(field, format!("no column `{name}`"))),
            None => Ok(header.iter().position(|h| h == preferred).unwrap_or(fallback)),
        }
    };
    let xi = pick(&a.x, "q", 0, "x")?;
    let yi = pick(&a.y, "count", 1, "y")?;
    let mut pts = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| field_err("input", e))?;
        let get = |i: usize| -> CliResult<f64> {
            let cell = rec.get(i).unwrap_or("");
            if let Ok(v) = cell.trim().parse::<f64>() {
                return Ok(v);
            }
            config::rational(&format!("input row {}", line + 1), cell).map(|r| rat_f64(&r))
        };
        pts.push((get(xi)?, get(yi)?));
    }
    let (pf, dropped) = fit_exponent_positive(&pts)?;
    let mut rep = Report::new(
        "fit",
        params,
        &["x", "y", "slope", "intercept", "stderr", "r_squared", "n", "dropped_rows"],
    );
    rep.push(vec![
        Cell::text(&header[xi]),
        Cell::text(&header[yi]),
        Cell::Float(pf.slope),
        Cell::Float(pf.intercept),
        Cell::Float(pf.stderr),
        Cell::Float(pf.r_squared),
        Cell::int(pf.n),
        Cell::int(dropped),
    ]);
    rep.result_f("slope", pf.slope);
    rep.result_f("intercept", pf.intercept);
    rep.result_f("slope_stderr", pf.stderr);
    rep.result_f("r_squared", pf.r_squared);
    rep.result("dropped_rows", dropped);
    if let Some(e) = &a.expect_slope {
        let e: f64 = parse_num("expect_slope", e)?;
        let tol: f64 = opt_num("slope_tol", &a.slope_tol, 0.1)?;
        rep.check("slope_ok", (pf.slope - e).abs() <= tol);
    }
    Ok(rep)
}

/// Ratios of the one-dimensional inner sums to their bounds over `q = 8, 16, ..., 256`,
/// normalized by `log2 q + 1`.
pub fn dyadic(params: Map<String, Value>, kappa_max: f64) -> CliResult<Report> {
    let mut rep = Report::new("dyadic", params, &["q", "s", "i", "value", "bound", "ratio", "normalized"]);
    let one = BigRational::from_integer(BigInt::from(1));
    let mut kappa = 0.0f64;
    for (s, i) in [(2.0, 1u32), (1.5, 2), (2.0, 2)] {
        for q in (3..=8).map(|k| 1u64 << k) {
            let r = dyadic_inner_sum(q, Rational64::from_integer(1), s, i, &one)?;
            let normalized = r.ratio / ((q as f64).log2() + 1.0);
            kappa = kappa.max(normalized);
            rep.push(vec![
                Cell::int(q),
                Cell::Float(s),
                Cell::int(i),
                Cell::Float(r.value),
                Cell::Float(r.bound),
                Cell::Float(r.ratio),
                Cell::Float(normalized),
            ]);
        }
    }
    rep.result_f("kappa", kappa);
    rep.result_f("kappa_max", kappa_max);
    rep.check("kappa_ok", kappa <= kappa_max);
    Ok(rep)
}

/// Fiber count of a large three-dimensional shell against a time budget, plus a brute cross-check.
pub fn perf(params: Map<String, Value>, ctx: Ctx, budget: f64) -> CliResult<Report> {
    let body = latshell::ConvexBody::ball(3)?;
    let int = |v: i64| BigRational::from_integer(BigInt::from(v));
    let mut rep = Report::new("perf", params, &["R", "delta", "method", "count", "wall_time"]);
    let big = ShellQuery::new(body.clone(), int(300), int(1), Convention::Closed)?;
    let start = Instant::now();
    let res = shell_count_fiber(&big)?;
    let secs = start.elapsed().as_secs_f64();
    rep.push(vec![Cell::int(300), Cell::int(1), Cell::text("fiber"), Cell::int(&res.count), Cell::Time(secs)]);
    let small = ShellQuery::new(body, int(40), int(1), Convention::Closed)?;
    let fiber = shell_count_fiber(&small)?;
    let brute = shell_count_brute(&small)?;
    for r in [&fiber, &brute] {
        rep.push(vec![Cell::int(40), Cell::int(1), Cell::text(r.method.as_str()), Cell::int(&r.count), Cell::Time(r.wall_time)]);
    }
    rep.result("fiber_seconds", ctx.seconds(secs));
    rep.result_f("budget_seconds", budget);
    rep.check("within_budget", secs <= budget);
    rep.check("fiber_equals_brute", fiber.count == brute.count);
    Ok(rep)
}

pub fn to_params<T: serde::Serialize>(value: &T) -> Map<String, Value> {
    match serde_json::to_value(value) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    }
}
