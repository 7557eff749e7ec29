//! Report rows and their text, JSON and CSV renderings.

use std::io::{self, Write};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    PreconditionFailed,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::PreconditionFailed => "precondition_failed",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::PreconditionFailed => 2,
        }
    }
}

/// `x` with 15 significant digits, shortest form, like C's `%.15g`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..15).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (14 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn parse_number(s: &str) -> Result<f64, String> {
    match s {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        "nan" => Ok(f64::NAN),
        _ => s.parse().map_err(|e| format!("bad number {s:?}: {e}")),
    }
}

fn ser<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_number(*x))
}

fn de<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    let s = String::deserialize(d)?;
    parse_number(&s).map_err(serde::de::Error::custom)
}

/// One checked inequality. One-sided inequalities `lhs <= rhs` use
/// `lower = value = lhs` and `upper = rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub inequality_id: String,
    pub function: String,
    #[serde(serialize_with = "ser", deserialize_with = "de")]
    pub a: f64,
    #[serde(serialize_with = "ser", deserialize_with = "de")]
    pub b: f64,
    #[serde(serialize_with = "ser", deserialize_with = "de")]
    pub lower: f64,
    #[serde(serialize_with = "ser", deserialize_with = "de")]
    pub value: f64,
    #[serde(serialize_with = "ser", deserialize_with = "de")]
    pub upper: f64,
    #[serde(serialize_with = "ser", deserialize_with = "de")]
    pub slack_lower: f64,
    #[serde(serialize_with = "ser", deserialize_with = "de")]
    pub slack_upper: f64,
    pub status: Status,
}

impl ReportRow {
    /// A row whose status follows from the slacks: pass iff both are at
    /// least `-tol`.
    pub fn checked(id: &str, function: &str, (a, b): (f64, f64), lower: f64, value: f64, upper: f64, tol: f64) -> Self {
        let slack_lower = value - lower;
        let slack_upper = upper - value;
        let status = if slack_lower >= -tol && slack_upper >= -tol { Status::Pass } else { Status::Fail };
        ReportRow {
            inequality_id: id.into(),
            function: function.into(),
            a,
            b,
            lower,
            value,
            upper,
            slack_lower,
            slack_upper,
            status,
        }
    }

    /// `lhs <= rhs`
    pub fn one_sided(id: &str, function: &str, interval: (f64, f64), lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::checked(id, function, interval, lhs, lhs, rhs, tol)
    }

    pub fn precondition_failed(id: &str, function: &str, (a, b): (f64, f64)) -> Self {
        let nan = f64::NAN;
        ReportRow {
            inequality_id: id.into(),
            function: function.into(),
            a,
            b,
            lower: nan,
            value: nan,
            upper: nan,
            slack_lower: nan,
            slack_upper: nan,
            status: Status::PreconditionFailed,
        }
    }

    /// Same row with numbers passed through their 15-digit rendering.
    pub fn rounded(&self) -> Self {
        let r = |x: f64| parse_number(&format_number(x)).expect("formatted numbers parse");
        ReportRow {
            a: r(self.a),
            b: r(self.b),
            lower: r(self.lower),
            value: r(self.value),
            upper: r(self.upper),
            slack_lower: r(self.slack_lower),
            slack_upper: r(self.slack_upper),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

pub const CSV_HEADER: [&str; 10] =
    ["inequality_id", "function", "a", "b", "lower", "value", "upper", "slack_lower", "slack_upper", "status"];

pub fn write_csv<W: Write>(rows: &[ReportRow], out: W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
}

pub fn write_text<W: Write + ?Sized>(rows: &[ReportRow], out: &mut W) -> io::Result<()> {
    for row in rows {
        writeln!(
            out,
            "{:<6} {}  on [{}, {}]\n       lower {}  value {}  upper {}  (slack {} / {})  {}",
            row.inequality_id,
            row.function,
            format_number(row.a),
            format_number(row.b),
            format_number(row.lower),
            format_number(row.value),
            format_number(row.upper),
            format_number(row.slack_lower),
            format_number(row.slack_upper),
            row.status.as_str(),
        )?;
    }
    Ok(())
}

pub fn write_rows<W: Write + ?Sized>(rows: &[ReportRow], format: Format, out: &mut W) -> io::Result<()> {
    match format {
        Format::Text => write_text(rows, out),
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, rows)?;
            writeln!(out)
        }
        Format::Csv => write_csv(rows, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_digits() {
        assert_eq!(format_number(0.25), "0.25");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333333");
        assert_eq!(format_number(2.0), "2");
        assert_eq!(format_number(-1.5e-7), "-1.5e-07");
        assert_eq!(format_number(123456789012345.0), "123456789012345");
        assert_eq!(format_number(1.0e15), "1e+15");
        assert_eq!(format_number(0.0001), "0.0001");
        assert_eq!(format_number(std::f64::consts::E.sqrt() / (std::f64::consts::E - 1.0)), "0.959517375667472");
        assert_eq!(format_number(f64::INFINITY), "inf");
        assert_eq!(format_number(1e-5 - 1e-22), "1e-05");
    }

    #[test]
    fn status_from_slacks() {
        let r = ReportRow::checked("HH", "x^2", (0.0, 1.0), 0.25, 1.0 / 3.0, 0.5, 1e-8);
        assert_eq!(r.status, Status::Pass);
        let r = ReportRow::one_sided("2.1", "f", (0.0, 1.0), 1.0, 1.0 - 2e-8, 1e-8);
        assert_eq!(r.status, Status::Fail);
    }

    #[test]
    fn csv_header() {
        let mut buf = Vec::new();
        write_csv(&[ReportRow::checked("HH", "x^2", (0.0, 1.0), 0.25, 0.5, 0.5, 0.0)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(lines.next().unwrap(), "HH,x^2,0,1,0.25,0.5,0.5,0.25,0,pass");
    }
}
