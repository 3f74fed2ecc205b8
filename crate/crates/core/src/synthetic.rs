//! Seeded synthetic series for benchmarks and tests.

use chrono::{Duration, NaiveDate};
use rand_distr::{Distribution, Normal};

use crate::ingest::{DatedSeries, OhlcvRow, OhlcvSeries};
use crate::rng;

/// Parameters of `level + slope*t + amplitude*sin(2*pi*t/period) + N(0, noise_sd)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineTrend {
    pub len: usize,
    pub level: f64,
    pub slope: f64,
    pub amplitude: f64,
    pub period: f64,
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for SineTrend {
    fn default() -> Self {
        Self {
            len: 2_000,
            level: 100.0,
            slope: 0.05,
            amplitude: 10.0,
            period: 50.0,
            noise_sd: 1.0,
            seed: 7,
        }
    }
}

impl SineTrend {
    pub fn generate(&self) -> Vec<f64> {
        let mut rng = rng::seeded(self.seed);
        let noise = Normal::new(0.0, self.noise_sd).expect("finite, non-negative noise sd");
        (0..self.len)
            .map(|t| {
                let t = t as f64;
                self.level
                    + self.slope * t
                    + self.amplitude * (std::f64::consts::TAU * t / self.period).sin()
                    + noise.sample(&mut rng)
            })
            .collect()
    }

    /// Consecutive calendar days starting 2000-01-03.
    pub fn dated(&self) -> DatedSeries {
        let start = NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date");
        DatedSeries::new(
            self.generate()
                .into_iter()
                .enumerate()
                .map(|(i, v)| (start + Duration::days(i as i64), v))
                .collect(),
        )
        .expect("finite synthetic values on distinct dates")
    }

    /// Daily bars whose close is the synthetic value (open/high/low bracket it).
    pub fn ohlcv(&self) -> OhlcvSeries {
        let rows = self
            .dated()
            .points()
            .iter()
            .map(|&(date, close)| OhlcvRow {
                date,
                open: close,
                high: close * 1.01,
                low: close * 0.99,
                close,
                adj_close: Some(close),
                volume: 1_000_000,
            })
            .collect();
        OhlcvSeries::new(rows).expect("positive synthetic prices")
    }
}

/// Writes bars in the canonical Yahoo CSV layout.
pub fn to_yahoo_csv(data: &OhlcvSeries) -> String {
    let mut out = String::from("Date,Open,High,Low,Close,Adj Close,Volume\n");
    for r in data.rows() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.date,
            r.open,
            r.high,
            r.low,
            r.close,
            r.adj_close.map_or_else(|| "null".to_string(), |v| v.to_string()),
            r.volume
        ));
    }
    out
}
