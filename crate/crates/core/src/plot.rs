//! Static SVG line charts.
//!
//! Layout: margins of 60 px (left, bottom) and 20 px (top, right). Both axes
//! use linear scales over the data range padded by 5% on each side (a zero
//! range is padded by 0.5 instead). For a `W x H` canvas and padded domain
//! `[x0, x1] x [y0, y1]`:
//!
//! ```text
//! px = 60 + (x - x0) / (x1 - x0) * (W - 80)
//! py = 20 + (y1 - y) / (y1 - y0) * (H - 80)
//! ```
//!
//! Coordinates are written with two decimals. Output depends only on the spec.

use std::fmt::Write as _;

use chrono::NaiveDate;
use thiserror::Error;

use crate::arima::ForecastResult;
use crate::ingest::DatedSeries;

pub const MARGIN_LEFT: f64 = 60.0;
pub const MARGIN_BOTTOM: f64 = 60.0;
pub const MARGIN_TOP: f64 = 20.0;
pub const MARGIN_RIGHT: f64 = 20.0;
pub const DASH_PATTERN: &str = "6,4";
pub const DEFAULT_WIDTH: u32 = 900;
pub const DEFAULT_HEIGHT: u32 = 500;

#[derive(Debug, Error, PartialEq)]
pub enum PlotError {
    #[error("series {0:?} needs at least two points")]
    EmptySeries(String),
    #[error("non-finite value in series {0:?}")]
    NonFiniteValue(String),
    #[error("canvas {0}x{1} too small for the fixed margins")]
    InvalidCanvas(u32, u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineStyle {
    Solid,
    Dashed,
}

/// How x values are labelled. Date axes hold days since 0001-01-01 (CE).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XAxis {
    Index,
    Date,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub color: String,
    pub style: LineStyle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_axis: XAxis,
    pub series: Vec<PlotSeries>,
    pub width: u32,
    pub height: u32,
}

impl PlotSpec {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            x_axis: XAxis::Index,
            series: Vec::new(),
            width: DEFAULT_WIDTH,
            height: DEFAULT_HEIGHT,
        }
    }
}

pub fn date_to_x(date: NaiveDate) -> f64 {
    f64::from(chrono::Datelike::num_days_from_ce(&date))
}

fn x_to_date(x: f64) -> Option<NaiveDate> {
    NaiveDate::from_num_days_from_ce_opt(x.round() as i32)
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn padded(min: f64, max: f64) -> (f64, f64) {
    let range = max - min;
    if range == 0.0 {
        (min - 0.5, max + 0.5)
    } else {
        (min - 0.05 * range, max + 0.05 * range)
    }
}

fn format_tick(value: f64, axis: XAxis) -> String {
    match axis {
        XAxis::Date => x_to_date(value).map_or_else(|| format!("{value:.0}"), |d| d.to_string()),
        XAxis::Index => format_number(value),
    }
}

fn format_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    plot_w: f64,
    plot_h: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.x0) / (self.x1 - self.x0) * self.plot_w
    }

    fn py(&self, y: f64) -> f64 {
        MARGIN_TOP + (self.y1 - y) / (self.y1 - self.y0) * self.plot_h
    }
}

pub fn render_line_chart(spec: &PlotSpec) -> Result<String, PlotError> {
    if spec.series.is_empty() {
        return Err(PlotError::EmptySeries(String::new()));
    }
    if f64::from(spec.width) <= MARGIN_LEFT + MARGIN_RIGHT || f64::from(spec.height) <= MARGIN_TOP + MARGIN_BOTTOM {
        return Err(PlotError::InvalidCanvas(spec.width, spec.height));
    }
    for s in &spec.series {
        if s.points.len() < 2 {
            return Err(PlotError::EmptySeries(s.name.clone()));
        }
        if s.points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(PlotError::NonFiniteValue(s.name.clone()));
        }
    }
    let all = spec.series.iter().flat_map(|s| s.points.iter());
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    let (x0, x1) = padded(xmin, xmax);
    let (y0, y1) = padded(ymin, ymax);
    let (w, h) = (f64::from(spec.width), f64::from(spec.height));
    let frame = Frame {
        x0,
        x1,
        y0,
        y1,
        plot_w: w - MARGIN_LEFT - MARGIN_RIGHT,
        plot_h: h - MARGIN_TOP - MARGIN_BOTTOM,
    };
    let axis_y = h - MARGIN_BOTTOM;
    let axis_right = w - MARGIN_RIGHT;

    let mut svg = String::new();
    // Writing into a String cannot fail.
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="12">"#,
        spec.width, spec.height, spec.width, spec.height
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, spec.width, spec.height);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="14" text-anchor="middle" font-size="14">{}</text>"#,
        w / 2.0,
        escape(&spec.title)
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN_LEFT:.2}" y1="{axis_y:.2}" x2="{axis_right:.2}" y2="{axis_y:.2}" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN_LEFT:.2}" y1="{MARGIN_TOP:.2}" x2="{MARGIN_LEFT:.2}" y2="{axis_y:.2}" stroke="black"/>"#
    );
    for x in [xmin, xmax] {
        let px = frame.px(x);
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{axis_y:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
            axis_y + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            axis_y + 18.0,
            escape(&format_tick(x, spec.x_axis))
        );
    }
    for y in [ymin, ymax] {
        let py = frame.py(y);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{MARGIN_LEFT:.2}" y2="{py:.2}" stroke="black"/>"#,
            MARGIN_LEFT - 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 7.0,
            py + 4.0,
            escape(&format_number(y))
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + frame.plot_w / 2.0,
        h - 12.0,
        escape(&spec.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
        MARGIN_TOP + frame.plot_h / 2.0,
        MARGIN_TOP + frame.plot_h / 2.0,
        escape(&spec.y_label)
    );

    for s in &spec.series {
        let points: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
            .collect();
        let dash = match s.style {
            LineStyle::Solid => String::new(),
            LineStyle::Dashed => format!(r#" stroke-dasharray="{DASH_PATTERN}""#),
        };
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5"{dash} points="{}"><title>{}</title></polyline>"#,
            escape(&s.color),
            points.join(" "),
            escape(&s.name)
        );
    }

    // Legend, top right.
    for (k, s) in spec.series.iter().enumerate() {
        let ly = MARGIN_TOP + 12.0 + 16.0 * k as f64;
        let lx = axis_right - 130.0;
        let dash = match s.style {
            LineStyle::Solid => String::new(),
            LineStyle::Dashed => format!(r#" stroke-dasharray="{DASH_PATTERN}""#),
        };
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="1.5"{dash}/>"#,
            lx + 24.0,
            escape(&s.color)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 30.0,
            ly + 4.0,
            escape(&s.name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Historical series in solid blue followed by the forecast in dashed red.
pub fn history_forecast_plot(history: &DatedSeries, forecast: &ForecastResult, title: &str) -> Result<String, PlotError> {
    let mut spec = PlotSpec::new(title, "Year", "Value");
    spec.x_axis = XAxis::Date;
    spec.series.push(PlotSeries {
        name: "history".into(),
        points: history.points().iter().map(|&(d, v)| (date_to_x(d), v)).collect(),
        color: "blue".into(),
        style: LineStyle::Solid,
    });
    spec.series.push(PlotSeries {
        name: "forecast".into(),
        points: forecast
            .horizon_dates
            .iter()
            .zip(&forecast.values)
            .map(|(&d, &v)| (date_to_x(d), v))
            .collect(),
        color: "red".into(),
        style: LineStyle::Dashed,
    });
    render_line_chart(&spec)
}

/// Actual prices in solid blue, predictions in dashed red, against sample index.
pub fn actual_vs_predicted_plot(actual: &[f64], predicted: &[f64], title: &str) -> Result<String, PlotError> {
    if actual.len() != predicted.len() {
        return Err(PlotError::EmptySeries(format!(
            "actual/predicted length mismatch ({} vs {})",
            actual.len(),
            predicted.len()
        )));
    }
    let indexed = |v: &[f64]| v.iter().enumerate().map(|(i, &y)| (i as f64, y)).collect();
    let mut spec = PlotSpec::new(title, "Test sample", "Price");
    spec.series.push(PlotSeries {
        name: "actual".into(),
        points: indexed(actual),
        color: "blue".into(),
        style: LineStyle::Solid,
    });
    spec.series.push(PlotSeries {
        name: "predicted".into(),
        points: indexed(predicted),
        color: "red".into(),
        style: LineStyle::Dashed,
    });
    render_line_chart(&spec)
}
