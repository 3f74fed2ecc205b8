//! Data acquisition: World Bank indicator series and Yahoo-Finance-style
//! OHLCV CSV exports.

use std::collections::BTreeMap;
use std::time::Duration;

use chrono::{Datelike, NaiveDate};
use serde_json::Value;
use thiserror::Error;

/// Headline consumer-price inflation, annual %.
pub const DEFAULT_INDICATOR: &str = "FP.CPI.TOTL.ZG";
pub const WORLDBANK_BASE_URL: &str = "https://api.worldbank.org";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("network error fetching {url}: {message}")]
    Network { url: String, message: String },
    #[error("HTTP status {status} from {url}")]
    HttpStatus { status: u16, url: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("no usable data points")]
    NoData,
    #[error("invalid series: {0}")]
    InvalidSeries(String),
}

/// Ordered `(date, value)` observations with strictly increasing dates and
/// finite values. Never empty.
#[derive(Debug, Clone, PartialEq)]
pub struct DatedSeries {
    points: Vec<(NaiveDate, f64)>,
}

impl DatedSeries {
    pub fn new(points: Vec<(NaiveDate, f64)>) -> Result<Self, IngestError> {
        if points.is_empty() {
            return Err(IngestError::NoData);
        }
        for (i, (date, value)) in points.iter().enumerate() {
            if !value.is_finite() {
                return Err(IngestError::InvalidSeries(format!(
                    "non-finite value at {date}"
                )));
            }
            if i > 0 && points[i - 1].0 >= *date {
                return Err(IngestError::InvalidSeries(format!(
                    "dates not strictly increasing at {date}"
                )));
            }
        }
        Ok(Self { points })
    }

    /// Sorts by date first. Duplicate dates are still rejected.
    pub fn from_unsorted(mut points: Vec<(NaiveDate, f64)>) -> Result<Self, IngestError> {
        points.sort_by_key(|(d, _)| *d);
        Self::new(points)
    }

    pub fn points(&self) -> &[(NaiveDate, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|(_, v)| *v).collect()
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.points.iter().map(|(d, _)| *d).collect()
    }

    pub fn first(&self) -> (NaiveDate, f64) {
        self.points[0]
    }

    pub fn last(&self) -> (NaiveDate, f64) {
        self.points[self.points.len() - 1]
    }

    pub fn value_at(&self, date: NaiveDate) -> Option<f64> {
        self.points
            .binary_search_by_key(&date, |(d, _)| *d)
            .ok()
            .map(|i| self.points[i].1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OhlcvRow {
    pub date: NaiveDate,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
    pub adj_close: Option<f64>,
    pub volume: u64,
}

/// Daily bars sorted by date. Prices are finite and positive, `high >= low`.
#[derive(Debug, Clone, PartialEq)]
pub struct OhlcvSeries {
    rows: Vec<OhlcvRow>,
}

impl OhlcvSeries {
    pub fn new(rows: Vec<OhlcvRow>) -> Result<Self, IngestError> {
        for (i, row) in rows.iter().enumerate() {
            for (name, v) in [
                ("open", row.open),
                ("high", row.high),
                ("low", row.low),
                ("close", row.close),
            ] {
                if !(v.is_finite() && v > 0.0) {
                    return Err(IngestError::InvalidSeries(format!(
                        "{name} must be finite and positive on {} (got {v})",
                        row.date
                    )));
                }
            }
            if row.high < row.low {
                return Err(IngestError::InvalidSeries(format!(
                    "high < low on {}",
                    row.date
                )));
            }
            if i > 0 && rows[i - 1].date >= row.date {
                return Err(IngestError::InvalidSeries(format!(
                    "dates not strictly increasing at {}",
                    row.date
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[OhlcvRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

pub fn worldbank_url(base: &str, country_code: &str, indicator: &str) -> String {
    format!(
        "{}/v2/country/{}/indicator/{}?format=json&per_page=20000",
        base.trim_end_matches('/'),
        country_code,
        indicator
    )
}

/// Fetches the raw JSON body for one country/indicator pair.
pub fn fetch_worldbank_series(
    country_code: &str,
    indicator: &str,
) -> Result<Vec<u8>, IngestError> {
    fetch_worldbank_series_from(WORLDBANK_BASE_URL, country_code, indicator, DEFAULT_TIMEOUT)
}

/// Same as [`fetch_worldbank_series`] against an arbitrary base URL.
pub fn fetch_worldbank_series_from(
    base_url: &str,
    country_code: &str,
    indicator: &str,
    timeout: Duration,
) -> Result<Vec<u8>, IngestError> {
    if country_code.trim().is_empty() {
        return Err(IngestError::Parse("country code must not be empty".into()));
    }
    let url = worldbank_url(base_url, country_code.trim(), indicator);
    http_get_bytes(&url, timeout)
}

pub(crate) fn http_get_bytes(url: &str, timeout: Duration) -> Result<Vec<u8>, IngestError> {
    let agent = ureq::AgentBuilder::new().timeout(timeout).build();
    match agent.get(url).call() {
        Ok(resp) => {
            let status = resp.status();
            if status != 200 {
                return Err(IngestError::HttpStatus {
                    status,
                    url: url.to_string(),
                });
            }
            let mut body = Vec::new();
            std::io::Read::read_to_end(&mut resp.into_reader(), &mut body).map_err(|e| {
                IngestError::Network {
                    url: url.to_string(),
                    message: e.to_string(),
                }
            })?;
            Ok(body)
        }
        Err(ureq::Error::Status(status, _)) => Err(IngestError::HttpStatus {
            status,
            url: url.to_string(),
        }),
        Err(ureq::Error::Transport(t)) => Err(IngestError::Network {
            url: url.to_string(),
            message: t.to_string(),
        }),
    }
}

/// Parses a World Bank v2 response: `[metadata, [{date, value, ..}, ..]]`.
///
/// Null values are dropped, `"YYYY"` becomes January 1 of that year, and the
/// result is sorted ascending. A one-element array (the API's error/message
/// form) or a null data element yields `NoData`.
pub fn parse_worldbank_json(body: &[u8]) -> Result<DatedSeries, IngestError> {
    let root: Value =
        serde_json::from_slice(body).map_err(|e| IngestError::Parse(format!("invalid JSON: {e}")))?;
    let top = root
        .as_array()
        .ok_or_else(|| IngestError::Parse("expected a top-level JSON array".into()))?;
    match top.len() {
        0 | 1 => return Err(IngestError::NoData),
        2 => {}
        n => {
            return Err(IngestError::Parse(format!(
                "expected [metadata, data], got {n} elements"
            )))
        }
    }
    let meta = top[0]
        .as_object()
        .ok_or_else(|| IngestError::Parse("metadata element is not an object".into()))?;
    if let Some(pages) = meta.get("pages").and_then(json_as_u64) {
        if pages > 1 {
            return Err(IngestError::Parse(format!(
                "response spans {pages} pages; only single-page responses are supported"
            )));
        }
    }
    let entries = match &top[1] {
        Value::Null => return Err(IngestError::NoData),
        Value::Array(a) => a,
        _ => return Err(IngestError::Parse("data element is not an array".into())),
    };

    let mut points = Vec::with_capacity(entries.len());
    for entry in entries {
        let obj = entry
            .as_object()
            .ok_or_else(|| IngestError::Parse("data entry is not an object".into()))?;
        let value = match obj.get("value") {
            None | Some(Value::Null) => continue,
            Some(Value::Number(n)) => n
                .as_f64()
                .ok_or_else(|| IngestError::Parse(format!("unrepresentable value {n}")))?,
            Some(other) => {
                return Err(IngestError::Parse(format!("unexpected value {other}")));
            }
        };
        let year_text = obj
            .get("date")
            .and_then(Value::as_str)
            .ok_or_else(|| IngestError::Parse("entry without a string date".into()))?;
        let year: i32 = year_text
            .trim()
            .parse()
            .map_err(|_| IngestError::Parse(format!("unparseable year {year_text:?}")))?;
        let date = NaiveDate::from_ymd_opt(year, 1, 1)
            .ok_or_else(|| IngestError::Parse(format!("year out of range: {year}")))?;
        points.push((date, value));
    }
    if points.is_empty() {
        return Err(IngestError::NoData);
    }
    DatedSeries::from_unsorted(points).map_err(|e| match e {
        IngestError::InvalidSeries(m) => IngestError::Parse(m),
        other => other,
    })
}

fn json_as_u64(v: &Value) -> Option<u64> {
    match v {
        Value::Number(n) => n.as_u64(),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy)]
struct CsvColumns {
    date: usize,
    open: Option<usize>,
    high: Option<usize>,
    low: Option<usize>,
    close: usize,
    adj_close: Option<usize>,
    volume: Option<usize>,
}

impl CsvColumns {
    fn from_header(header: &csv::StringRecord) -> Result<Self, IngestError> {
        let find = |name: &str| {
            header
                .iter()
                .position(|h| h.trim().eq_ignore_ascii_case(name))
        };
        let date = find("Date").ok_or_else(|| IngestError::Parse("header lacks a Date column".into()))?;
        let close =
            find("Close").ok_or_else(|| IngestError::Parse("header lacks a Close column".into()))?;
        Ok(Self {
            date,
            open: find("Open"),
            high: find("High"),
            low: find("Low"),
            close,
            adj_close: find("Adj Close"),
            volume: find("Volume"),
        })
    }
}

enum Field {
    Missing,
    Value(f64),
}

fn numeric_field(record: &csv::StringRecord, idx: usize, line: u64) -> Result<Field, IngestError> {
    let raw = record.get(idx).unwrap_or("").trim();
    if raw.is_empty() || raw.eq_ignore_ascii_case("null") {
        return Ok(Field::Missing);
    }
    raw.parse::<f64>()
        .map(Field::Value)
        .map_err(|_| IngestError::Parse(format!("line {line}: unparseable number {raw:?}")))
}

/// Parses a Yahoo-Finance-style CSV export.
///
/// Columns are located by header name; only `Date` and `Close` are required.
/// When Open/High/Low are absent they default to Close, Volume to 0. Rows
/// with an empty or `null` numeric field are dropped. Duplicate dates are a
/// parse error.
pub fn parse_yahoo_csv(text: &str) -> Result<OhlcvSeries, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| IngestError::Parse(format!("cannot read header: {e}")))?
        .clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(IngestError::Parse("missing header".into()));
    }
    let cols = CsvColumns::from_header(&header)?;

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| IngestError::Parse(e.to_string()))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let date_raw = record.get(cols.date).unwrap_or("").trim();
        let date = NaiveDate::parse_from_str(date_raw, "%Y-%m-%d")
            .map_err(|_| IngestError::Parse(format!("line {line}: unparseable date {date_raw:?}")))?;

        let close = match numeric_field(&record, cols.close, line)? {
            Field::Value(v) => v,
            Field::Missing => continue,
        };
        let optional = |idx: Option<usize>| -> Result<Option<Option<f64>>, IngestError> {
            match idx {
                None => Ok(Some(None)),
                Some(i) => match numeric_field(&record, i, line)? {
                    Field::Missing => Ok(None),
                    Field::Value(v) => Ok(Some(Some(v))),
                },
            }
        };
        let (Some(open), Some(high), Some(low), Some(adj_close), Some(volume)) = (
            optional(cols.open)?,
            optional(cols.high)?,
            optional(cols.low)?,
            optional(cols.adj_close)?,
            optional(cols.volume)?,
        ) else {
            continue;
        };
        let volume = match volume {
            None => 0,
            Some(v) if v >= 0.0 && v.fract() == 0.0 => v as u64,
            Some(v) => {
                return Err(IngestError::Parse(format!(
                    "line {line}: volume must be a non-negative integer, got {v}"
                )))
            }
        };
        rows.push(OhlcvRow {
            date,
            open: open.unwrap_or(close),
            high: high.unwrap_or(close),
            low: low.unwrap_or(close),
            close,
            adj_close,
            volume,
        });
    }
    if rows.is_empty() {
        return Err(IngestError::NoData);
    }
    rows.sort_by_key(|r| r.date);
    if let Some(w) = rows.windows(2).find(|w| w[0].date == w[1].date) {
        return Err(IngestError::Parse(format!("duplicate date {}", w[0].date)));
    }
    OhlcvSeries::new(rows).map_err(|e| match e {
        IngestError::InvalidSeries(m) => IngestError::Parse(m),
        other => other,
    })
}

/// Projects the closing prices, preserving order.
pub fn close_series(data: &OhlcvSeries) -> Result<DatedSeries, IngestError> {
    if data.is_empty() {
        return Err(IngestError::NoData);
    }
    DatedSeries::new(data.rows().iter().map(|r| (r.date, r.close)).collect())
}

/// One point per calendar year present, dated January 1, holding the mean of
/// that year's observations. Missing years stay missing.
pub fn resample_annual(series: &DatedSeries) -> DatedSeries {
    let mut years: BTreeMap<i32, (f64, usize)> = BTreeMap::new();
    for (date, value) in series.points() {
        let slot = years.entry(date.year()).or_insert((0.0, 0));
        slot.0 += value;
        slot.1 += 1;
    }
    let points = years
        .into_iter()
        .map(|(year, (sum, count))| {
            (
                NaiveDate::from_ymd_opt(year, 1, 1).expect("year taken from a valid date"),
                sum / count as f64,
            )
        })
        .collect();
    DatedSeries::new(points).expect("non-empty input yields a valid annual series")
}
