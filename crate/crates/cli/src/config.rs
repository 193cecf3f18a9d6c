use std::fmt;
use std::path::Path;
use std::str::FromStr;

use latshell::exact::parse_rational;
use latshell::phase::PhaseKind;
use latshell::{ConvexBody, Convention, PhaseFunction};
use num_rational::{BigRational, Rational64};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::{BodyArgs, GlobalOpts};

/// Everything that ends a run with exit code 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Field { field: String, message: String },
    Lib(latshell::Error),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Field { field, message } => write!(f, "invalid value for `{field}`: {message}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<latshell::Error> for CliError {
    fn from(e: latshell::Error) -> Self {
        CliError::Lib(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn field_err(field: &str, message: impl fmt::Display) -> CliError {
    CliError::Field { field: field.to_string(), message: message.to_string() }
}

/// Reads a JSON object from `path`.
pub fn read_config(path: &Path) -> CliResult<Map<String, Value>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(CliError::Usage(format!("{}: config must be a JSON object", path.display()))),
        Err(e) => Err(CliError::Usage(format!("{}: malformed JSON: {e}", path.display()))),
    }
}

/// Config files may use JSON numbers, arrays and objects; flags are strings.
/// Scalars become their text, flat arrays comma lists, anything nested JSON text.
fn normalize(value: Value) -> Value {
    match value {
        Value::Number(n) => Value::String(n.to_string()),
        Value::Array(items) if items.iter().all(|v| !v.is_array() && !v.is_object()) => Value::String(
            items
                .into_iter()
                .map(|v| match v {
                    Value::String(s) => s,
                    other => other.to_string(),
                })
                .collect::<Vec<_>>()
                .join(","),
        ),
        v @ (Value::Array(_) | Value::Object(_)) => Value::String(v.to_string()),
        v => v,
    }
}

/// Splits global options out of a config file.
pub fn merge_globals(file: &mut Map<String, Value>, flags: GlobalOpts) -> CliResult<GlobalOpts> {
    let mut merged = Map::new();
    for key in ["workers", "out", "summary", "no_timing"] {
        if let Some(v) = file.remove(key) {
            merged.insert(key.to_string(), v);
        }
    }
    overlay(&mut merged, &flags)?;
    let mut out: GlobalOpts =
        serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Usage(format!("global options: {e}")))?;
    out.config = flags.config;
    Ok(out)
}

fn overlay<T: Serialize>(base: &mut Map<String, Value>, flags: &T) -> CliResult<()> {
    let Value::Object(map) = serde_json::to_value(flags).map_err(|e| CliError::Usage(e.to_string()))? else {
        return Ok(());
    };
    for (k, v) in map {
        if !v.is_null() {
            base.insert(k, v);
        }
    }
    Ok(())
}

/// Applies flags over config-file values and rejects keys the subcommand does not know.
pub fn merge_args<T: Serialize + DeserializeOwned>(
    file: Map<String, Value>,
    flags: &T,
) -> CliResult<(T, Map<String, Value>)> {
    let mut merged: Map<String, Value> = file.into_iter().map(|(k, v)| (k, normalize(v))).collect();
    overlay(&mut merged, flags)?;
    let parsed: T = serde_json::from_value(Value::Object(merged.clone()))
        .map_err(|e| CliError::Usage(format!("config: {e}")))?;
    let Value::Object(known) = serde_json::to_value(&parsed).map_err(|e| CliError::Usage(e.to_string()))? else {
        unreachable!("argument structs serialize to objects")
    };
    if let Some(k) = merged.keys().find(|k| !known.contains_key(*k)) {
        return Err(CliError::Usage(format!("config: unknown key `{k}`")));
    }
    Ok((parsed, known))
}

pub fn parse_num<T: FromStr>(field: &str, text: &str) -> CliResult<T>
where
    T::Err: fmt::Display,
{
    text.trim().parse::<T>().map_err(|e| field_err(field, format!("`{text}`: {e}")))
}

pub fn opt_num<T: FromStr>(field: &str, text: &Option<String>, default: T) -> CliResult<T>
where
    T::Err: fmt::Display,
{
    match text {
        Some(t) => parse_num(field, t),
        None => Ok(default),
    }
}

pub fn required<'a>(field: &str, text: &'a Option<String>) -> CliResult<&'a str> {
    text.as_deref().ok_or_else(|| field_err(field, "is required"))
}

pub fn rational(field: &str, text: &str) -> CliResult<BigRational> {
    parse_rational(text.trim()).map_err(|e| field_err(field, e))
}

pub fn opt_rational(field: &str, text: &Option<String>, default: i64) -> CliResult<BigRational> {
    match text {
        Some(t) => rational(field, t),
        None => Ok(BigRational::from_integer(default.into())),
    }
}

pub fn small_rational(field: &str, text: &str) -> CliResult<Rational64> {
    let r = rational(field, text)?;
    let (n, d) = (r.numer().try_into(), r.denom().try_into());
    match (n, d) {
        (Ok(n), Ok(d)) => Ok(Rational64::new(n, d)),
        _ => Err(field_err(field, format!("`{text}` does not fit in 64 bits"))),
    }
}

/// Expands `a,b,c` and inclusive ranges `start:end[:step]`.
pub fn rational_list(field: &str, text: &str) -> CliResult<Vec<BigRational>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let pieces: Vec<&str> = part.split(':').collect();
        match pieces.len() {
            1 => out.push(rational(field, part)?),
            2 | 3 => {
                let start = rational(field, pieces[0])?;
                let end = rational(field, pieces[1])?;
                let step = match pieces.get(2) {
                    Some(s) => rational(field, s)?,
                    None => BigRational::from_integer(1.into()),
                };
                if step <= BigRational::from_integer(0.into()) {
                    return Err(field_err(field, format!("range `{part}` needs a positive step")));
                }
                let mut v = start;
                while v <= end {
                    out.push(v.clone());
                    v += &step;
                    if out.len() > 1_000_000 {
                        return Err(field_err(field, format!("range `{part}` is too long")));
                    }
                }
            }
            _ => return Err(field_err(field, format!("cannot parse `{part}`"))),
        }
    }
    if out.is_empty() {
        return Err(field_err(field, "empty list"));
    }
    Ok(out)
}

pub fn integer_list(field: &str, text: &str) -> CliResult<Vec<u64>> {
    rational_list(field, text)?
        .into_iter()
        .map(|r| {
            if !r.is_integer() {
                return Err(field_err(field, format!("{r} is not an integer")));
            }
            u64::try_from(r.to_integer()).map_err(|_| field_err(field, format!("{r} is out of range")))
        })
        .collect()
}

pub fn float_list(field: &str, text: &str) -> CliResult<Vec<f64>> {
    text.split(',').map(str::trim).filter(|p| !p.is_empty()).map(|p| parse_num(field, p)).collect()
}

pub fn convention(text: &Option<String>) -> CliResult<Convention> {
    match text {
        Some(t) => t.parse().map_err(|e| field_err("convention", e)),
        None => Ok(Convention::Closed),
    }
}

fn parse_matrix(text: &str) -> CliResult<Vec<Vec<i64>>> {
    let t = text.trim();
    if t.starts_with('[') {
        return serde_json::from_str(t).map_err(|e| field_err("matrix", e));
    }
    t.split(';')
        .map(|row| row.split(',').map(|v| parse_num("matrix", v)).collect::<CliResult<Vec<i64>>>())
        .collect()
}

pub fn body(args: &BodyArgs) -> CliResult<ConvexBody> {
    let kind = args.body.as_deref().unwrap_or("ball").trim();
    if kind.starts_with('{') {
        return serde_json::from_str(kind).map_err(|e| field_err("body", e));
    }
    let dim = || -> CliResult<usize> { parse_num("dim", required("dim", &args.dim)?) };
    let built = match kind {
        "ball" | "euclidean" => ConvexBody::ball(dim()?),
        "pball" | "p-ball" => ConvexBody::pball(parse_num("p", required("p", &args.p)?)?, dim()?),
        "ellipsoid" => {
            let m = parse_matrix(required("matrix", &args.matrix)?)?;
            if args.dim.is_some() && dim()? != m.len() {
                return Err(field_err("dim", format!("matrix is {0}x{0}", m.len())));
            }
            ConvexBody::ellipsoid(m)
        }
        other => return Err(field_err("body", format!("unknown body `{other}` (ball, pball, ellipsoid or JSON)"))),
    };
    built.map_err(|e| field_err("body", e))
}

pub fn phase(kind: &Option<String>, body_args: &BodyArgs) -> CliResult<PhaseFunction> {
    let kind = kind.as_deref().unwrap_or("parabolic").trim();
    if kind.starts_with('{') {
        return serde_json::from_str(kind).map_err(|e| field_err("phase", e));
    }
    match kind {
        "parabolic" => {
            let d = parse_num("dim", body_args.dim.as_deref().unwrap_or("2"))?;
            PhaseFunction::parabolic(d).map_err(|e| field_err("dim", e))
        }
        "diff_gauge" | "diff-gauge" | "gauge" => {
            PhaseFunction::difference_gauge(body(body_args)?).map_err(|e| field_err("phase", e))
        }
        other => Err(field_err("phase", format!("unknown phase `{other}` (parabolic, diff_gauge or JSON)"))),
    }
}

pub fn phase_label(phi: &PhaseFunction) -> String {
    match phi.kind() {
        PhaseKind::Parabolic { .. } => "parabolic".into(),
        PhaseKind::DifferenceGauge(b) => format!("diff_gauge:{}", body_label(b)),
    }
}

pub fn body_label(b: &ConvexBody) -> String {
    use latshell::geometry::BodyKind;
    match b.kind() {
        BodyKind::EuclideanBall => "ball".into(),
        BodyKind::PBall(p) => format!("pball{p}"),
        BodyKind::Ellipsoid(m) => {
            let rows: Vec<String> =
                m.iter().map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")).collect();
            format!("ellipsoid[{}]", rows.join(";"))
        }
    }
}
