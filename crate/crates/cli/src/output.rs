use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::config::{CliError, CliResult};

/// `printf("%.12g", x)`.
pub fn fmt_g(x: f64) -> String {
    const P: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= P {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (P - 1 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(String),
    Float(f64),
    Text(String),
    /// Seconds; written as `NA` when timing is off.
    Time(f64),
    Bool(bool),
}

impl Cell {
    pub fn int(v: impl ToString) -> Cell {
        Cell::Int(v.to_string())
    }

    pub fn text(v: impl Into<String>) -> Cell {
        Cell::Text(v.into())
    }

    fn render(&self, timing: bool) -> String {
        match self {
            Cell::Int(s) | Cell::Text(s) => s.clone(),
            Cell::Float(x) => fmt_g(*x),
            Cell::Time(t) if timing => fmt_g(*t),
            Cell::Time(_) => "NA".into(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

/// The outcome of one experiment: data rows plus a summary.
#[derive(Clone, Debug)]
pub struct Report {
    pub experiment: String,
    pub params: Map<String, Value>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub results: Map<String, Value>,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl Report {
    pub fn new(experiment: &str, params: Map<String, Value>, header: &[&str]) -> Self {
        Report {
            experiment: experiment.to_string(),
            params,
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            results: Map::new(),
            notes: Vec::new(),
            pass: true,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn result(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.to_string(), value.into());
    }

    /// Records a float result, written with 12 significant digits.
    pub fn result_f(&mut self, key: &str, value: f64) {
        self.result(key, float_value(value));
    }

    /// Records a check and folds it into `pass`.
    pub fn check(&mut self, key: &str, ok: bool) {
        self.pass &= ok;
        self.result(key, ok);
    }

    pub fn config_hash(&self) -> String {
        let canonical = serde_json::json!({ "experiment": self.experiment, "params": self.params });
        format!("{:x}", Sha256::digest(canonical.to_string().as_bytes()))
    }

    pub fn to_csv(&self, timing: bool) -> CliResult<Vec<u8>> {
        let mut buf = Vec::new();
        buf.extend_from_slice(format!("# latshell {}\n", env!("CARGO_PKG_VERSION")).as_bytes());
        buf.extend_from_slice(format!("# experiment: {}\n", self.experiment).as_bytes());
        buf.extend_from_slice(format!("# config_sha256: {}\n", self.config_hash()).as_bytes());
        for note in &self.notes {
            buf.extend_from_slice(format!("# {note}\n").as_bytes());
        }
        let mut w = csv::Writer::from_writer(buf);
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.render(timing))).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let v = serde_json::json!({
            "experiment": self.experiment,
            "params": self.params,
            "results": self.results,
            "pass": self.pass,
        });
        let mut s = serde_json::to_string_pretty(&v).expect("summary serializes");
        s.push('\n');
        s
    }
}

/// Non-finite values have no JSON form and become strings.
pub fn float_value(x: f64) -> Value {
    if x.is_finite() {
        let rounded: f64 = fmt_g(x).parse().expect("formatted float parses");
        serde_json::Number::from_f64(rounded).map(Value::Number).unwrap_or(Value::Null)
    } else {
        Value::String(fmt_g(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf() {
        assert_eq!(fmt_g(1.0), "1");
        assert_eq!(fmt_g(0.1), "0.1");
        assert_eq!(fmt_g(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_g(123456789012.0), "123456789012");
        assert_eq!(fmt_g(1234567890123.0), "1.23456789012e+12");
        assert_eq!(fmt_g(1e-5), "1e-05");
        assert_eq!(fmt_g(0.0001234), "0.0001234");
        assert_eq!(fmt_g(-37.84008175591952), "-37.8400817559");
        assert_eq!(fmt_g(999999999999.5), "1e+12");
        assert_eq!(fmt_g(f64::NAN), "nan");
    }

    #[test]
    fn csv_has_metadata_and_na_times() {
        let mut r = Report::new("demo", Map::new(), &["x", "t"]);
        r.push(vec![Cell::int(3), Cell::Time(0.5)]);
        let text = String::from_utf8(r.to_csv(false).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# latshell "));
        assert!(lines[2].starts_with("# config_sha256: "));
        assert_eq!(&lines[3..], ["x,t", "3,NA"]);
        let timed = String::from_utf8(r.to_csv(true).unwrap()).unwrap();
        assert!(timed.ends_with("3,0.5\n"));
    }
}
