//! Series CSV format:
//!
//! ```text
//! # name=<label>, kind=<lgd|rd>, unit=<fraction|percent>
//! month,value[,weight]
//! 2008-01,0.2650,1234567.89
//! ```
//!
//! UTF-8, comma separated, LF line endings. Months are `YYYY-MM` and must be
//! contiguous. The weight column is all-or-nothing.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{MonthIndex, MonthlySeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    Lgd,
    Rd,
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeriesKind::Lgd => "lgd",
            SeriesKind::Rd => "rd",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    Fraction,
    Percent,
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Unit::Fraction => "fraction",
            Unit::Percent => "percent",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesFileHeader {
    pub name: String,
    pub kind: SeriesKind,
    pub unit: Unit,
    pub has_weights: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFile {
    pub header: SeriesFileHeader,
    /// Values already normalized to fractions.
    pub series: MonthlySeries,
}

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::ParseError {
        line,
        reason: reason.into(),
    }
}

fn parse_header(line: &str) -> Result<(String, SeriesKind, Unit)> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| parse_err(1, "first line must be `# name=..., kind=..., unit=...`"))?;
    let (mut name, mut kind, mut unit) = (None, None, None);
    for part in body.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| parse_err(1, format!("header entry `{}` is not key=value", part.trim())))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "name" => name = Some(value.to_string()),
            "kind" => {
                kind = Some(match value {
                    "lgd" => SeriesKind::Lgd,
                    "rd" => SeriesKind::Rd,
                    other => return Err(parse_err(1, format!("unknown kind `{other}` (lgd or rd)"))),
                })
            }
            "unit" => {
                unit = Some(match value {
                    "fraction" => Unit::Fraction,
                    "percent" => Unit::Percent,
                    other => {
                        return Err(parse_err(
                            1,
                            format!("unknown unit `{other}` (fraction or percent)"),
                        ))
                    }
                })
            }
            other => return Err(parse_err(1, format!("unknown header key `{other}`"))),
        }
    }
    Ok((
        name.ok_or_else(|| parse_err(1, "header is missing `name`"))?,
        kind.ok_or_else(|| parse_err(1, "header is missing `kind`"))?,
        unit.ok_or_else(|| parse_err(1, "header is missing `unit`"))?,
    ))
}

/// Reads a series file; percent values are divided by 100.
pub fn read_series<R: Read>(mut reader: R) -> Result<SeriesFile> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| parse_err(0, format!("input is not readable UTF-8 text: {e}")))?;

    let mut lines = text.splitn(3, '\n');
    let header_line = lines.next().unwrap_or("").trim_end_matches('\r');
    let (name, kind, unit) = parse_header(header_line)?;
    let columns = lines.next().map(|l| l.trim_end_matches('\r')).unwrap_or("");
    let has_weights = match columns {
        "month,value" => false,
        "month,value,weight" => true,
        other => {
            return Err(parse_err(
                2,
                format!("column header `{other}` must be `month,value` or `month,value,weight`"),
            ))
        }
    };
    let expected_fields = if has_weights { 3 } else { 2 };
    let body = lines.next().unwrap_or("");

    let mut rdr = ::csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(body.as_bytes());

    let mut months: Vec<MonthIndex> = Vec::new();
    let mut values = Vec::new();
    let mut weights = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize + 2);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize + 2);
        if record.len() != expected_fields {
            return Err(parse_err(
                line,
                format!("expected {expected_fields} fields, found {}", record.len()),
            ));
        }
        let month: MonthIndex = record[0]
            .parse()
            .map_err(|e: Error| parse_err(line, e.to_string()))?;
        if let Some(&prev) = months.last() {
            if month <= prev {
                return Err(parse_err(line, format!("month {month} does not come after {prev}")));
            }
            if month != prev.succ() {
                return Err(Error::GapInSeries {
                    series: name,
                    after: prev,
                    next: month,
                });
            }
        }
        let raw: f64 = record[1]
            .parse()
            .map_err(|_| parse_err(line, format!("value `{}` is not a decimal number", &record[1])))?;
        let value = match unit {
            Unit::Fraction => raw,
            Unit::Percent => raw / 100.0,
        };
        if !value.is_finite() || !(0.0..=1.0).contains(&value) {
            return Err(Error::DomainError {
                context: format!("line {line}"),
                reason: format!("{kind} value {} is outside the {unit} range", &record[1]),
            });
        }
        if has_weights {
            let w: f64 = record[2].parse().map_err(|_| {
                parse_err(line, format!("weight `{}` is not a decimal number", &record[2]))
            })?;
            if !w.is_finite() || w < 0.0 {
                return Err(Error::DomainError {
                    context: format!("line {line}"),
                    reason: format!("weight {} must be finite and nonnegative", &record[2]),
                });
            }
            weights.push(w);
        }
        months.push(month);
        values.push(value);
    }
    let Some(&start) = months.first() else {
        return Err(Error::EmptySeries { series: name });
    };
    let series = MonthlySeries::new(
        name.clone(),
        start,
        values,
        has_weights.then_some(weights),
        true,
    )?;
    Ok(SeriesFile {
        header: SeriesFileHeader {
            name,
            kind,
            unit,
            has_weights,
        },
        series,
    })
}

pub fn read_series_csv<R: Read>(reader: R) -> Result<MonthlySeries> {
    read_series(reader).map(|f| f.series)
}

/// Opens and reads `path`; parse errors keep their line numbers.
pub fn read_series_path(path: &Path) -> Result<SeriesFile> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display(), e))?;
    read_series(std::io::BufReader::new(file))
}

/// Writes `series` in fraction units. Values are printed at full round-trip
/// precision; output bytes depend only on the series and `kind`.
pub fn write_series_csv<W: Write>(series: &MonthlySeries, kind: SeriesKind, mut out: W) -> Result<()> {
    if let Some((i, v)) = series
        .values()
        .iter()
        .enumerate()
        .find(|(_, v)| !(0.0..=1.0).contains(*v))
    {
        return Err(Error::DomainError {
            context: format!("series `{}` at {}", series.name(), series.month_at(i)),
            reason: format!("value {v} is not a fraction in [0, 1]"),
        });
    }
    let mut buf = String::with_capacity(32 * (series.len() + 2));
    buf.push_str(&format!(
        "# name={}, kind={kind}, unit=fraction\n",
        series.name()
    ));
    match series.weights() {
        Some(w) => {
            buf.push_str("month,value,weight\n");
            for (i, (v, w)) in series.values().iter().zip(w).enumerate() {
                buf.push_str(&format!("{},{v},{w}\n", series.month_at(i)));
            }
        }
        None => {
            buf.push_str("month,value\n");
            for (i, v) in series.values().iter().enumerate() {
                buf.push_str(&format!("{},{v}\n", series.month_at(i)));
            }
        }
    }
    out.write_all(buf.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Error::io("output stream", e))
}

/// Writes to a temporary file beside `path` and renames it into place.
pub fn write_series_path(series: &MonthlySeries, kind: SeriesKind, path: &Path) -> Result<()> {
    let mut bytes = Vec::new();
    write_series_csv(series, kind, &mut bytes)?;
    crate::atomic_write(path, &bytes)
}
