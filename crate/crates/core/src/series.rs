//! Monthly time-series container, alignment, and descriptive statistics.
//!
//! A [`MonthlySeries`] always sits on a contiguous month grid: it stores the
//! first month and one value per month after it. Missing months are rejected
//! at construction, never interpolated.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Minimum length of an [`AlignedPair`]; a sample correlation needs three points.
pub const MIN_PAIR_LEN: usize = 3;

/// A calendar month. Ordered by `(year, month)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonthIndex {
    year: i32,
    month: u32,
}

impl MonthIndex {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::InvalidMonth(format!("{year:04}-{month:02}")));
        }
        Ok(Self { year, month })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u32 {
        self.month
    }

    /// Months since year 0, January.
    pub fn ordinal(self) -> i64 {
        i64::from(self.year) * 12 + i64::from(self.month) - 1
    }

    pub fn from_ordinal(ordinal: i64) -> Self {
        let year = ordinal.div_euclid(12) as i32;
        let month = ordinal.rem_euclid(12) as u32 + 1;
        Self { year, month }
    }

    pub fn succ(self) -> Self {
        self.offset(1)
    }

    pub fn offset(self, months: i64) -> Self {
        Self::from_ordinal(self.ordinal() + months)
    }

    /// Signed number of months from `self` to `other`.
    pub fn months_until(self, other: MonthIndex) -> i64 {
        other.ordinal() - self.ordinal()
    }
}

impl fmt::Display for MonthIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for MonthIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidMonth(s.to_string());
        let (y, m) = s.split_once('-').ok_or_else(bad)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(bad());
        }
        if !y.bytes().chain(m.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let year: i32 = y.parse().map_err(|_| bad())?;
        let month: u32 = m.parse().map_err(|_| bad())?;
        MonthIndex::new(year, month).map_err(|_| bad())
    }
}

impl Serialize for MonthIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MonthIndex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Ordered monthly observations of one variable on a contiguous grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthlySeries {
    name: String,
    start: MonthIndex,
    values: Vec<f64>,
    weights: Option<Vec<f64>>,
    is_rate: bool,
}

impl MonthlySeries {
    /// Builds a validated series starting at `start`.
    ///
    /// When `is_rate` is set every value must lie in `[0, 1]`. Weights, when
    /// given, must match the value count and be finite and nonnegative.
    pub fn new(
        name: impl Into<String>,
        start: MonthIndex,
        values: Vec<f64>,
        weights: Option<Vec<f64>>,
        is_rate: bool,
    ) -> Result<Self> {
        let name = name.into();
        validate_name(&name)?;
        if values.is_empty() {
            return Err(Error::EmptySeries { series: name });
        }
        for (i, v) in values.iter().enumerate() {
            let month = start.offset(i as i64);
            if !v.is_finite() {
                return Err(Error::DomainError {
                    context: format!("series `{name}` at {month}"),
                    reason: format!("value {v} is not finite"),
                });
            }
            if is_rate && !(0.0..=1.0).contains(v) {
                return Err(Error::DomainError {
                    context: format!("series `{name}` at {month}"),
                    reason: format!("rate {v} is outside [0, 1]"),
                });
            }
        }
        if let Some(w) = &weights {
            if w.len() != values.len() {
                return Err(Error::DimensionMismatch {
                    what: format!("weights of series `{name}`"),
                    expected: values.len(),
                    found: w.len(),
                });
            }
            for (i, x) in w.iter().enumerate() {
                if !x.is_finite() || *x < 0.0 {
                    return Err(Error::DomainError {
                        context: format!("series `{name}` at {}", start.offset(i as i64)),
                        reason: format!("weight {x} must be finite and nonnegative"),
                    });
                }
            }
        }
        Ok(Self {
            name,
            start,
            values,
            weights,
            is_rate,
        })
    }

    /// Convenience constructor for an unweighted rate series.
    pub fn rate(name: impl Into<String>, start: MonthIndex, values: Vec<f64>) -> Result<Self> {
        Self::new(name, start, values, None, true)
    }

    /// Builds a series from explicit `(month, value, weight)` points, which
    /// must be strictly increasing and contiguous.
    pub fn from_points(
        name: impl Into<String>,
        points: &[(MonthIndex, f64, Option<f64>)],
        is_rate: bool,
    ) -> Result<Self> {
        let name = name.into();
        let Some(&(start, _, first_weight)) = points.first() else {
            return Err(Error::EmptySeries { series: name });
        };
        let has_weights = first_weight.is_some();
        for pair in points.windows(2) {
            let (prev, next) = (pair[0].0, pair[1].0);
            if next <= prev {
                return Err(Error::OutOfOrder {
                    series: name,
                    previous: prev,
                    month: next,
                });
            }
            if next != prev.succ() {
                return Err(Error::GapInSeries {
                    series: name,
                    after: prev,
                    next,
                });
            }
        }
        if points.iter().any(|p| p.2.is_some() != has_weights) {
            return Err(Error::DomainError {
                context: format!("series `{name}`"),
                reason: "weights must be present for all points or none".into(),
            });
        }
        let values = points.iter().map(|p| p.1).collect();
        let weights = has_weights.then(|| points.iter().map(|p| p.2.unwrap_or(0.0)).collect());
        Self::new(name, start, values, weights, is_rate)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn start(&self) -> MonthIndex {
        self.start
    }

    /// Last month (inclusive).
    pub fn end(&self) -> MonthIndex {
        self.start.offset(self.values.len() as i64 - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn is_rate(&self) -> bool {
        self.is_rate
    }

    pub fn month_at(&self, i: usize) -> MonthIndex {
        self.start.offset(i as i64)
    }

    pub fn months(&self) -> impl Iterator<Item = MonthIndex> + '_ {
        (0..self.values.len()).map(move |i| self.month_at(i))
    }

    pub fn index_of(&self, month: MonthIndex) -> Option<usize> {
        let off = self.start.months_until(month);
        (off >= 0 && (off as usize) < self.values.len()).then_some(off as usize)
    }

    /// Same series under a different label.
    pub fn renamed(&self, name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        validate_name(&name)?;
        Ok(Self {
            name,
            ..self.clone()
        })
    }

    /// Restricts the series to `[from, to]`, both inclusive and inside the grid.
    pub fn window(&self, from: MonthIndex, to: MonthIndex) -> Result<Self> {
        let lo = self
            .index_of(from)
            .ok_or(Error::MonthNotInGrid { month: from })?;
        let hi = self.index_of(to).ok_or(Error::MonthNotInGrid { month: to })?;
        if hi < lo {
            return Err(Error::InvalidArgument(format!(
                "window end {to} precedes start {from}"
            )));
        }
        Ok(Self {
            name: self.name.clone(),
            start: from,
            values: self.values[lo..=hi].to_vec(),
            weights: self.weights.as_ref().map(|w| w[lo..=hi].to_vec()),
            is_rate: self.is_rate,
        })
    }
}

/// Labels end up in CSV comment headers, so they cannot carry separators.
fn validate_name(name: &str) -> Result<()> {
    let ok = !name.is_empty()
        && name.trim() == name
        && !name.contains([',', '=', '\n', '\r', '\t']);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "series label {name:?} must be non-empty, untrimmed-whitespace free, and contain no `,` `=` or control separators"
        )))
    }
}

/// RD and LGD restricted to one shared contiguous month grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPair {
    rd: MonthlySeries,
    lgd: MonthlySeries,
}

impl AlignedPair {
    /// Pairs two series that already share a grid of at least three months.
    pub fn new(rd: MonthlySeries, lgd: MonthlySeries) -> Result<Self> {
        if rd.start() != lgd.start() || rd.len() != lgd.len() {
            return Err(Error::InvalidArgument(format!(
                "series `{}` ({}..{}) and `{}` ({}..{}) do not share a grid",
                rd.name(),
                rd.start(),
                rd.end(),
                lgd.name(),
                lgd.start(),
                lgd.end()
            )));
        }
        if rd.len() < MIN_PAIR_LEN {
            return Err(Error::NoOverlap {
                overlap: rd.len(),
                required: MIN_PAIR_LEN,
            });
        }
        Ok(Self { rd, lgd })
    }

    pub fn rd(&self) -> &MonthlySeries {
        &self.rd
    }

    pub fn lgd(&self) -> &MonthlySeries {
        &self.lgd
    }

    pub fn len(&self) -> usize {
        self.rd.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn start(&self) -> MonthIndex {
        self.rd.start()
    }

    pub fn end(&self) -> MonthIndex {
        self.rd.end()
    }

    pub fn months(&self) -> impl Iterator<Item = MonthIndex> + '_ {
        self.rd.months()
    }

    pub fn into_parts(self) -> (MonthlySeries, MonthlySeries) {
        (self.rd, self.lgd)
    }
}

/// Truncates both series to the intersection of their month ranges.
pub fn align(rd: &MonthlySeries, lgd: &MonthlySeries) -> Result<AlignedPair> {
    let from = rd.start().max(lgd.start());
    let to = rd.end().min(lgd.end());
    let overlap = (from.months_until(to) + 1).max(0) as usize;
    if overlap < MIN_PAIR_LEN {
        return Err(Error::NoOverlap {
            overlap,
            required: MIN_PAIR_LEN,
        });
    }
    AlignedPair::new(rd.window(from, to)?, lgd.window(from, to)?)
}

/// Count, mean, sample standard deviation and (exposure-)weighted mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    /// Equals `mean` when the series carries no weights.
    pub weighted_mean: f64,
}

pub fn summary(series: &MonthlySeries) -> Result<SummaryStats> {
    let values = series.values();
    if values.len() < 2 {
        return Err(Error::DegenerateSeries {
            series: series.name().to_string(),
            reason: "standard deviation needs at least 2 observations".into(),
        });
    }
    let mean = mean(values);
    let std = sample_std(values);
    let weighted_mean = match series.weights() {
        Some(w) => weighted_mean(values, w).ok_or_else(|| Error::ZeroWeightSum {
            series: series.name().to_string(),
        })?,
        None => mean,
    };
    Ok(SummaryStats {
        n: values.len(),
        mean,
        std,
        weighted_mean,
    })
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Two-pass sample standard deviation (n - 1 denominator); exactly zero for
/// constant input.
pub(crate) fn sample_std(values: &[f64]) -> f64 {
    let m = mean(values);
    if values.iter().all(|&v| v == values[0]) {
        return 0.0;
    }
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

/// `None` when the weights sum to zero.
pub(crate) fn weighted_mean(values: &[f64], weights: &[f64]) -> Option<f64> {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return None;
    }
    Some(values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / total)
}

/// Pearson correlation of the pair's RD and LGD values.
pub fn pearson(pair: &AlignedPair) -> Result<f64> {
    correlation(pair.rd(), pair.lgd())
}

/// Pearson correlation of two equal-length series.
pub fn correlation(x: &MonthlySeries, y: &MonthlySeries) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            what: "correlation inputs".into(),
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < MIN_PAIR_LEN {
        return Err(Error::InsufficientData {
            what: "correlation".into(),
            needed: MIN_PAIR_LEN,
            available: x.len(),
        });
    }
    correlation_of(x.values(), y.values()).map_err(|which| Error::ConstantSeries {
        series: if which == 0 { x.name() } else { y.name() }.to_string(),
    })
}

/// Centered two-pass correlation; `Err(0)` or `Err(1)` names the constant input.
pub(crate) fn correlation_of(x: &[f64], y: &[f64]) -> std::result::Result<f64, usize> {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || x.iter().all(|&v| v == x[0]) {
        return Err(0);
    }
    if syy == 0.0 || y.iter().all(|&v| v == y[0]) {
        return Err(1);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// First differences `v[t] - v[t-1]`, starting at the second month.
///
/// The result is not a rate and carries no weights.
pub fn differenced(series: &MonthlySeries) -> Result<MonthlySeries> {
    if series.len() < 2 {
        return Err(Error::DegenerateSeries {
            series: series.name().to_string(),
            reason: "differencing needs at least 2 observations".into(),
        });
    }
    let values = series.values().windows(2).map(|w| w[1] - w[0]).collect();
    MonthlySeries::new(
        format!("diff_{}", series.name()),
        series.start().succ(),
        values,
        None,
        false,
    )
}
