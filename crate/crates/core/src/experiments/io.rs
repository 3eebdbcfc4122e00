//! CSV and JSON persistence for result tables.
//!
//! Floats are written with 17 significant digits so they parse back to the
//! identical `f64`. Probability-valued fields are first rounded to 12
//! significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidParams(format!("unknown format '{other}'"))),
        }
    }
}

/// One cell of a result table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Field {
    Int(u64),
    Float(f64),
    /// A probability, rounded to 12 significant digits before writing.
    Prob(f64),
    Missing,
}

impl Field {
    pub fn opt_prob(v: Option<f64>) -> Field {
        v.map_or(Field::Missing, Field::Prob)
    }

    pub fn opt_float(v: Option<f64>) -> Field {
        v.map_or(Field::Missing, Field::Float)
    }
}

/// Rounds to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn cell(field: Field, json: bool) -> String {
    match field {
        Field::Int(v) => v.to_string(),
        Field::Float(v) | Field::Prob(v) => {
            let v = if matches!(field, Field::Prob(_)) { round_sig12(v) } else { v };
            if json && !v.is_finite() {
                "null".into()
            } else {
                format_float(v)
            }
        }
        Field::Missing => if json { "null".into() } else { String::new() },
    }
}

/// A row type with a fixed column layout.
pub trait Record {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<Field>;
}

pub fn to_csv<R: Record>(rows: &[R]) -> String {
    let mut out = R::header().join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.fields().into_iter().map(|f| cell(f, false)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json<R: Record>(rows: &[R]) -> String {
    let header = R::header();
    let mut out = String::from("[");
    for (i, row) in rows.iter().enumerate() {
        out.push_str(if i == 0 { "\n  {" } else { ",\n  {" });
        for (j, (name, field)) in header.iter().zip(row.fields()).enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "\"{name}\": {}", cell(field, true));
        }
        out.push('}');
    }
    out.push_str(if rows.is_empty() { "]\n" } else { "\n]\n" });
    out
}

pub fn render<R: Record>(rows: &[R], format: Format) -> String {
    match format {
        Format::Csv => to_csv(rows),
        Format::Json => to_json(rows),
    }
}

pub fn write_results<R: Record>(rows: &[R], format: Format, path: &Path) -> Result<()> {
    fs::write(path, render(rows, format))?;
    Ok(())
}

pub fn parse_csv<R: DeserializeOwned>(text: &str) -> Result<Vec<R>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

pub fn parse_json<R: DeserializeOwned>(text: &str) -> Result<Vec<R>> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_results<R: DeserializeOwned>(path: &Path, format: Format) -> Result<Vec<R>> {
    let text = fs::read_to_string(path)?;
    match format {
        Format::Csv => parse_csv(&text),
        Format::Json => parse_json(&text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_and_formatting() {
        assert_eq!(round_sig12(0.1 + 0.2), 0.3);
        assert_eq!(round_sig12(0.0), 0.0);
        let x = 1.0 / 3.0;
        assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        assert_eq!(cell(Field::Missing, true), "null");
        assert_eq!(cell(Field::Missing, false), "");
        assert_eq!(cell(Field::Float(f64::NAN), true), "null");
        assert_eq!(cell(Field::Int(7), false), "7");
    }

    #[test]
    fn format_names() {
        assert_eq!("CSV".parse::<Format>().unwrap(), Format::Csv);
        assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
        assert!("xml".parse::<Format>().is_err());
    }
}
