//! Client for the SGS time-series service of the Central Bank of Brazil.
//!
//! The service answers `GET {base}/dados/serie/bcdata.sgs.{code}/dados` with
//! a JSON array of `{"data": "DD/MM/YYYY", "valor": "2.97"}` objects, values
//! in percent. Monthly series are dated on the first of the month.

use std::thread;
use std::time::Duration;

use chrono::{Datelike, NaiveDate};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::series::{MonthIndex, MonthlySeries};

pub const DEFAULT_ENDPOINT: &str = "https://api.bcb.gov.br";

/// Overrides the endpoint base when no explicit one is given.
pub const ENDPOINT_ENV: &str = "DLGD_BCB_ENDPOINT";

const DEFAULT_MAX_RETRIES: u32 = 3;
const DEFAULT_BACKOFF: Duration = Duration::from_millis(500);
const REQUEST_TIMEOUT: Duration = Duration::from_secs(30);

/// Explicit endpoint, else `$DLGD_BCB_ENDPOINT`, else the public service.
pub fn resolve_endpoint(explicit: Option<&str>) -> String {
    explicit
        .map(str::to_string)
        .or_else(|| std::env::var(ENDPOINT_ENV).ok().filter(|s| !s.is_empty()))
        .unwrap_or_else(|| DEFAULT_ENDPOINT.to_string())
}

fn first_day(m: MonthIndex) -> NaiveDate {
    NaiveDate::from_ymd_opt(m.year(), m.month(), 1).expect("MonthIndex is a valid month")
}

fn last_day(m: MonthIndex) -> NaiveDate {
    first_day(m.succ()).pred_opt().expect("date after the epoch")
}

/// Request URL covering the whole of months `start..=end`.
pub fn series_url(endpoint_base: &str, code: u32, start: MonthIndex, end: MonthIndex) -> String {
    format!(
        "{}/dados/serie/bcdata.sgs.{code}/dados?formato=json&dataInicial={}&dataFinal={}",
        endpoint_base.trim_end_matches('/'),
        first_day(start).format("%d/%m/%Y"),
        last_day(end).format("%d/%m/%Y"),
    )
}

/// Parses a response body into fraction-valued points covering exactly
/// `start..=end`.
pub fn parse_sgs_payload(
    body: &str,
    url: &str,
    start: MonthIndex,
    end: MonthIndex,
) -> Result<Vec<(MonthIndex, f64)>> {
    let wire = |reason: String| Error::WireFormatError {
        url: url.to_string(),
        reason,
    };
    let parsed: Value =
        serde_json::from_str(body).map_err(|e| wire(format!("body is not JSON: {e}")))?;
    let items = parsed
        .as_array()
        .ok_or_else(|| wire("expected a JSON array of observations".into()))?;

    let mut points: Vec<(MonthIndex, f64)> = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let date = item
            .get("data")
            .and_then(Value::as_str)
            .ok_or_else(|| wire(format!("element {i} has no string `data` field")))?;
        let date = NaiveDate::parse_from_str(date, "%d/%m/%Y")
            .map_err(|_| wire(format!("element {i} has unparseable date `{date}`")))?;
        if date.day() != 1 {
            return Err(Error::FrequencyMismatch {
                url: url.to_string(),
                reason: format!("observation dated {} is not a monthly observation", date.format("%d/%m/%Y")),
            });
        }
        let value = match item.get("valor") {
            Some(Value::String(s)) => s.trim().parse::<f64>().ok(),
            Some(Value::Number(n)) => n.as_f64(),
            _ => None,
        }
        .filter(|v| v.is_finite())
        .ok_or_else(|| wire(format!("element {i} has no numeric `valor` field")))?;
        if !(0.0..=100.0).contains(&value) {
            return Err(Error::DomainError {
                context: format!("{url} at {}", date.format("%d/%m/%Y")),
                reason: format!("rate {value}% is outside [0, 100]"),
            });
        }
        let month = MonthIndex::new(date.year(), date.month())?;
        if let Some(&(prev, _)) = points.last() {
            if month <= prev {
                return Err(wire(format!(
                    "observation for {month} follows {prev}; dates must be strictly increasing"
                )));
            }
        }
        points.push((month, value / 100.0));
    }

    if points.len() >= 2 {
        let step = points[0].0.months_until(points[1].0);
        let uniform = points
            .windows(2)
            .all(|w| w[0].0.months_until(w[1].0) == step);
        if step > 1 && uniform {
            return Err(Error::FrequencyMismatch {
                url: url.to_string(),
                reason: format!("observations are {step} months apart; expected a monthly series"),
            });
        }
    }

    let name = "response".to_string();
    let mut expected = start;
    for &(month, _) in &points {
        if month < start || month > end {
            return Err(wire(format!("observation for {month} is outside {start}..{end}")));
        }
        if month != expected {
            return Err(Error::GapInSeries {
                series: name,
                after: expected.offset(-1),
                next: month,
            });
        }
        expected = month.succ();
    }
    if expected != end.succ() {
        return Err(Error::GapInSeries {
            series: name,
            after: expected.offset(-1),
            next: end.succ(),
        });
    }
    Ok(points)
}

/// Blocking SGS client. Transport failures are retried with doubling backoff;
/// HTTP error statuses are reported immediately.
#[derive(Debug, Clone)]
pub struct BcbClient {
    http: reqwest::blocking::Client,
    endpoint_base: String,
    max_retries: u32,
    backoff: Duration,
}

impl BcbClient {
    pub fn new(endpoint_base: impl Into<String>) -> Result<Self> {
        let http = reqwest::blocking::Client::builder()
            .timeout(REQUEST_TIMEOUT)
            .build()
            .map_err(|e| Error::TransportError {
                url: String::new(),
                reason: e.to_string(),
            })?;
        Ok(Self {
            http,
            endpoint_base: endpoint_base.into(),
            max_retries: DEFAULT_MAX_RETRIES,
            backoff: DEFAULT_BACKOFF,
        })
    }

    pub fn with_retries(mut self, max_retries: u32, backoff: Duration) -> Self {
        self.max_retries = max_retries;
        self.backoff = backoff;
        self
    }

    pub fn endpoint_base(&self) -> &str {
        &self.endpoint_base
    }

    fn get(&self, url: &str) -> Result<String> {
        let mut delay = self.backoff;
        let mut attempt = 0;
        loop {
            let outcome = self
                .http
                .get(url)
                .header(reqwest::header::ACCEPT, "application/json")
                .send()
                .and_then(|resp| {
                    let status = resp.status();
                    resp.text().map(|body| (status, body))
                });
            match outcome {
                Ok((status, body)) => {
                    if !status.is_success() {
                        return Err(Error::HttpError {
                            status: status.as_u16(),
                            url: url.to_string(),
                        });
                    }
                    return Ok(body);
                }
                Err(_) if attempt < self.max_retries => {
                    thread::sleep(delay);
                    delay *= 2;
                    attempt += 1;
                }
                Err(e) => {
                    return Err(Error::TransportError {
                        url: url.to_string(),
                        reason: e.to_string(),
                    })
                }
            }
        }
    }

    /// Fetches series `code` for `start..=end` as a rate series named
    /// `sgs_{code}`.
    pub fn fetch(&self, code: u32, start: MonthIndex, end: MonthIndex) -> Result<MonthlySeries> {
        if start > end {
            return Err(Error::InvalidArgument(format!(
                "start month {start} is after end month {end}"
            )));
        }
        let url = series_url(&self.endpoint_base, code, start, end);
        let body = self.get(&url)?;
        let name = format!("sgs_{code}");
        let points = parse_sgs_payload(&body, &url, start, end).map_err(|e| match e {
            Error::GapInSeries { after, next, .. } => Error::GapInSeries {
                series: name.clone(),
                after,
                next,
            },
            other => other,
        })?;
        MonthlySeries::rate(name, start, points.into_iter().map(|(_, v)| v).collect())
    }
}

pub fn fetch_bcb_series(
    code: u32,
    start: MonthIndex,
    end: MonthIndex,
    endpoint_base: &str,
) -> Result<MonthlySeries> {
    BcbClient::new(endpoint_base)?.fetch(code, start, end)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> MonthIndex {
        s.parse().unwrap()
    }

    #[test]
    fn url_covers_whole_months() {
        let url = series_url("http://x/", 21082, m("2008-01"), m("2012-02"));
        assert_eq!(
            url,
            "http://x/dados/serie/bcdata.sgs.21082/dados?formato=json&dataInicial=01/01/2008&dataFinal=29/02/2012"
        );
    }

    #[test]
    fn percent_values_become_fractions() {
        let body = r#"[{"data":"01/01/2008","valor":"2.97"},{"data":"01/02/2008","valor":"3.01"}]"#;
        let pts = parse_sgs_payload(body, "u", m("2008-01"), m("2008-02")).unwrap();
        assert_eq!(pts, vec![(m("2008-01"), 0.0297), (m("2008-02"), 0.0301)]);
    }

    #[test]
    fn daily_dates_are_frequency_mismatch() {
        let body = r#"[{"data":"15/01/2008","valor":"2.97"}]"#;
        assert!(matches!(
            parse_sgs_payload(body, "u", m("2008-01"), m("2008-01")),
            Err(Error::FrequencyMismatch { .. })
        ));
    }

    #[test]
    fn quarterly_spacing_is_frequency_mismatch() {
        let body = r#"[{"data":"01/01/2008","valor":"2"},{"data":"01/04/2008","valor":"2"},{"data":"01/07/2008","valor":"2"}]"#;
        assert!(matches!(
            parse_sgs_payload(body, "u", m("2008-01"), m("2008-07")),
            Err(Error::FrequencyMismatch { .. })
        ));
    }

    #[test]
    fn missing_months_are_gaps() {
        let body = r#"[{"data":"01/01/2008","valor":"2"},{"data":"01/02/2008","valor":"2"},{"data":"01/04/2008","valor":"2"}]"#;
        assert!(matches!(
            parse_sgs_payload(body, "u", m("2008-01"), m("2008-04")),
            Err(Error::GapInSeries { .. })
        ));
        let body = r#"[{"data":"01/02/2008","valor":"2"}]"#;
        assert!(matches!(
            parse_sgs_payload(body, "u", m("2008-01"), m("2008-02")),
            Err(Error::GapInSeries { .. })
        ));
        assert!(matches!(
            parse_sgs_payload("[]", "u", m("2008-01"), m("2008-02")),
            Err(Error::GapInSeries { .. })
        ));
    }

    #[test]
    fn malformed_bodies() {
        for body in [
            "<html>",
            r#"{"error":"x"}"#,
            r#"[{"data":"01/01/2008"}]"#,
            r#"[{"data":"2008-01-01","valor":"2"}]"#,
            r#"[{"data":"01/01/2008","valor":"abc"}]"#,
        ] {
            assert!(
                matches!(
                    parse_sgs_payload(body, "u", m("2008-01"), m("2008-01")),
                    Err(Error::WireFormatError { .. })
                ),
                "{body}"
            );
        }
    }

    #[test]
    fn duplicates_and_reversals_are_rejected() {
        let dup = r#"[{"data":"01/01/2008","valor":"2"},{"data":"01/01/2008","valor":"2"}]"#;
        let rev = r#"[{"data":"01/02/2008","valor":"2"},{"data":"01/01/2008","valor":"2"}]"#;
        for body in [dup, rev] {
            assert!(matches!(
                parse_sgs_payload(body, "u", m("2008-01"), m("2008-02")),
                Err(Error::WireFormatError { .. })
            ));
        }
    }

    #[test]
    fn out_of_range_rate() {
        let body = r#"[{"data":"01/01/2008","valor":"120"}]"#;
        assert!(matches!(
            parse_sgs_payload(body, "u", m("2008-01"), m("2008-01")),
            Err(Error::DomainError { .. })
        ));
    }
}
