use serde_json::{Map, Value};

use crate::args::{BodyArgs, DiscrepancyArgs, EnergyArgs, MaArgs, PairArgs, SharpnessArgs};
use crate::config::{CliError, CliResult};
use crate::experiments::{self, to_params, Ctx};
use crate::output::Report;

pub const PRESETS: &[(&str, &str)] = &[
    ("sharpness-d2", "closed-form sharpness counts, d=2, t=2..8; slope 8/3 +- 0.10"),
    ("theorem-envelope-d2", "Euclidean difference gauge, d=2, q=16..256, delta in {0, 1/8, 1}"),
    ("discrepancy-d3", "ball discrepancy in d=3 for R=2..100; |D|/R^(1+20/43) <= 10, slope <= 1.5"),
    ("energy-isotropic", "s-energy, alpha=(1,1), s in {1.5, 1.9}, q=8..128; slope 0 +- 0.10, max/min <= 2"),
    ("energy-anisotropic", "s-energy, alpha=(2/3,4/3), s=1.5, q=t^3 for t=2..5; slope 0 +- 0.15"),
    ("dyadic", "one-dimensional inner sums against their bounds, q=8..256; kappa <= 8"),
    ("ma-certify", "Monge-Ampere certification: parabolic and ball pass, 4-ball with axis probes fails"),
    ("perf-d3", "fiber count of the d=3 shell R=300, delta=1 within 10 s; brute cross-check at R=40"),
];

fn s(v: &str) -> Option<String> {
    Some(v.to_string())
}

fn ball(dim: &str) -> BodyArgs {
    BodyArgs { body: s("ball"), dim: s(dim), ..Default::default() }
}

/// Concatenates reports that share a header; results are keyed by run label.
fn combine(name: &str, parts: Vec<(String, Report)>) -> Report {
    let header: Vec<&str> = parts[0].1.header.iter().map(String::as_str).collect();
    let mut params = Map::new();
    params.insert("preset".into(), name.into());
    let mut runs = Map::new();
    let mut out = Report::new(name, Map::new(), &header);
    for (label, part) in parts {
        debug_assert_eq!(part.header, out.header);
        runs.insert(label.clone(), Value::Object(part.params));
        out.rows.extend(part.rows);
        out.notes.extend(part.notes.into_iter().filter(|n| !out.notes.contains(n)).collect::<Vec<_>>());
        let mut res = part.results;
        if res.len() == 1 {
            if let Some(Value::Object(inner)) = res.values().next() {
                res = inner.clone();
            }
        }
        res.insert("pass".into(), part.pass.into());
        out.results.insert(label, Value::Object(res));
        out.pass &= part.pass;
    }
    params.insert("runs".into(), Value::Object(runs));
    out.params = params;
    out
}

fn single(name: &str, mut rep: Report) -> Report {
    let mut params = Map::new();
    params.insert("preset".into(), name.into());
    params.insert("run".into(), Value::Object(std::mem::take(&mut rep.params)));
    rep.params = params;
    rep.experiment = name.to_string();
    rep
}

pub fn run_preset(name: &str, ctx: Ctx) -> CliResult<Report> {
    match name {
        "sharpness-d2" => {
            let a = SharpnessArgs { dim: s("2"), t: s("2:8"), c: s("1"), slope_tol: s("0.10") };
            let mut rep = experiments::sharpness_demo(&a, to_params(&a))?;
            let half = rep.results.get("half_ratio").and_then(Value::as_f64).unwrap_or(f64::NAN);
            rep.check("half_ratio_ok", (0.5..=2.0).contains(&half));
            Ok(single(name, rep))
        }
        "theorem-envelope-d2" => {
            let mut parts = Vec::new();
            for delta in ["0", "1/8", "1"] {
                let mut a = PairArgs {
                    phase: s("diff_gauge"),
                    body: ball("2"),
                    q: s("16,32,64,128,256"),
                    delta: s(delta),
                    c: s("1"),
                    max_half_ratio: s("2"),
                    ..Default::default()
                };
                if delta == "1" {
                    a.expect_slope = s("1");
                    a.slope_tol = s("0.15");
                }
                parts.push((format!("delta={delta}"), experiments::count_pairs(&a, to_params(&a))?));
            }
            Ok(combine(name, parts))
        }
        "discrepancy-d3" => {
            let a = DiscrepancyArgs {
                body: ball("3"),
                r: s("2:100:2"),
                exponent: s(&format!("{}", 1.0 + 20.0 / 43.0)),
                max_ratio: s("10"),
                max_slope: s("1.5"),
            };
            Ok(single(name, experiments::discrepancy_scan(&a, to_params(&a))?))
        }
        "energy-isotropic" => {
            let a = EnergyArgs {
                dim: s("2"),
                alpha: s("1,1"),
                c: s("1"),
                s: s("1.5,1.9"),
                q: s("8,16,32,64,128"),
                slope_tol: s("0.10"),
                max_ratio: s("2"),
                ..Default::default()
            };
            Ok(single(name, experiments::energy_scan(&a, to_params(&a))?))
        }
        "energy-anisotropic" => {
            let a = EnergyArgs {
                dim: s("2"),
                alpha: s("2/3,4/3"),
                c: s("1"),
                s: s("1.5"),
                t: s("2:5"),
                slope_tol: s("0.15"),
                ..Default::default()
            };
            Ok(single(name, experiments::energy_scan(&a, to_params(&a))?))
        }
        "dyadic" => {
            let mut params = Map::new();
            params.insert("preset".into(), name.into());
            let mut rep = experiments::dyadic(params, 8.0)?;
            rep.experiment = name.to_string();
            Ok(rep)
        }
        "ma-certify" => {
            let base = MaArgs { seed: s("1"), samples: s("1000"), ..Default::default() };
            let runs = [
                ("parabolic", MaArgs { phase: s("parabolic"), body: BodyArgs { dim: s("2"), ..Default::default() }, t: s("1"), ..base.clone() }),
                ("ball", MaArgs { phase: s("diff_gauge"), body: ball("2"), t: s("0.5,1,2"), ..base.clone() }),
                (
                    "pball4",
                    MaArgs {
                        phase: s("diff_gauge"),
                        body: BodyArgs { body: s("pball"), p: s("4"), dim: s("2"), ..Default::default() },
                        t: s("1"),
                        axis_probes: Some(true),
                        expect: s("fail"),
                        ..base.clone()
                    },
                ),
            ];
            let parts = runs
                .into_iter()
                .map(|(label, a)| Ok((label.to_string(), experiments::ma_check(&a, to_params(&a))?)))
                .collect::<CliResult<Vec<_>>>()?;
            Ok(combine(name, parts))
        }
        "perf-d3" => {
            let mut params = Map::new();
            params.insert("preset".into(), name.into());
            let mut rep = experiments::perf(params, ctx, 10.0)?;
            rep.experiment = name.to_string();
            Ok(rep)
        }
        other => Err(CliError::Usage(format!(
            "unknown preset `{other}`; available: {}",
            PRESETS.iter().map(|p| p.0).collect::<Vec<_>>().join(", ")
        ))),
    }
}
