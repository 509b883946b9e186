//! Functional data sets: validated `(time, value)` sequences.
//!
//! A [`TimeSeries`] is immutable once built. Times are strictly increasing and
//! every entry is finite; the time and value ranges are computed once at
//! construction.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How [`TimeSeries::from_records`] treats repeated observation times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DedupePolicy {
    /// Reject the input with [`Error::DuplicateTime`].
    Error,
    /// Merge records sharing a time stamp into their mean value.
    #[default]
    Average,
}

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// `n` equally spaced points from `lo` to `hi` inclusive.
    pub fn uniform_grid(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![self.lo],
            _ => {
                let step = self.length() / (n - 1) as f64;
                (0..n)
                    .map(|k| if k == n - 1 { self.hi } else { self.lo + k as f64 * step })
                    .collect()
            }
        }
    }
}

/// One functional data set.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<f64>,
    time_range: Interval,
    value_range: Interval,
}

impl TimeSeries {
    /// Builds a series from parallel vectors that already satisfy the
    /// invariants (strictly increasing finite times, finite values, length >= 2).
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::LengthMismatch {
                times: times.len(),
                values: values.len(),
            });
        }
        if times.len() < 2 {
            return Err(Error::EmptyInput);
        }
        for (index, (t, y)) in times.iter().zip(&values).enumerate() {
            if !t.is_finite() || !y.is_finite() {
                return Err(Error::NonFiniteValue { index });
            }
        }
        if let Some(index) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NotIncreasing { index: index + 1 });
        }
        let time_range = Interval::new(times[0], times[times.len() - 1]);
        let (vmin, vmax) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        Ok(Self {
            times,
            values,
            time_range,
            value_range: Interval::new(vmin, vmax),
        })
    }

    /// Builds a series from unordered `(time, value)` records.
    pub fn from_records(points: &[(f64, f64)], dedupe: DedupePolicy) -> Result<Self> {
        for (index, (t, y)) in points.iter().enumerate() {
            if !t.is_finite() || !y.is_finite() {
                return Err(Error::NonFiniteValue { index });
            }
        }
        let mut sorted = points.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut times: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut i = 0;
        while i < sorted.len() {
            let t = sorted[i].0;
            let mut j = i + 1;
            while j < sorted.len() && sorted[j].0 == t {
                j += 1;
            }
            if j - i > 1 && dedupe == DedupePolicy::Error {
                return Err(Error::DuplicateTime { time: t });
            }
            let mean = sorted[i..j].iter().map(|p| p.1).sum::<f64>() / (j - i) as f64;
            times.push(t);
            values.push(mean);
            i = j;
        }
        if times.len() < 2 {
            return Err(Error::EmptyInput);
        }
        Self::new(times, values)
    }

    pub fn to_records(&self) -> Vec<(f64, f64)> {
        self.times.iter().copied().zip(self.values.iter().copied()).collect()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// Always false: a valid series holds at least two points.
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn time_range(&self) -> Interval {
        self.time_range
    }

    pub fn value_range(&self) -> Interval {
        self.value_range
    }

    /// Sample standard deviation of the values (n - 1 denominator).
    pub fn value_sd(&self) -> f64 {
        let n = self.values.len() as f64;
        let mean = self.values.iter().sum::<f64>() / n;
        let ss: f64 = self.values.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (n - 1.0)).sqrt()
    }

    /// Piecewise-linear interpolation of the samples at `t`.
    ///
    /// Returns [`Error::OutOfRange`] outside `[t_min, t_max]`; there is no
    /// extrapolation.
    pub fn interp_linear(&self, t: f64) -> Result<f64> {
        let r = self.time_range;
        if !(t >= r.lo && t <= r.hi) {
            return Err(Error::OutOfRange { t, lo: r.lo, hi: r.hi });
        }
        // index of the first sample time strictly greater than t
        let k = self.times.partition_point(|&x| x <= t);
        if k == 0 {
            return Ok(self.values[0]);
        }
        let left = k - 1;
        if self.times[left] == t || k == self.times.len() {
            return Ok(self.values[left]);
        }
        let (t0, t1) = (self.times[left], self.times[k]);
        let (y0, y1) = (self.values[left], self.values[k]);
        let frac = (t - t0) / (t1 - t0);
        Ok(y0 + frac * (y1 - y0))
    }

    /// The series with every time stamp replaced by `f(time)`.
    ///
    /// `f` must be strictly increasing over the observation times.
    pub fn map_times(&self, f: impl Fn(f64) -> Result<f64>) -> Result<Self> {
        let times = self.times.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
        Self::new(times, self.values.clone())
    }

    /// Parses the two-column `time,value` CSV format.
    ///
    /// A single leading header line is allowed. Blank lines are skipped.
    pub fn parse_csv(text: &str, dedupe: DedupePolicy) -> Result<Self> {
        let mut points = Vec::new();
        let mut failures: Vec<(usize, String)> = Vec::new();
        let mut seen_content = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim().trim_start_matches('\u{feff}');
            if line.is_empty() {
                continue;
            }
            let first_content = !seen_content;
            seen_content = true;
            match parse_pair(line) {
                Ok(p) => points.push(p),
                Err(msg) => {
                    if first_content && looks_like_header(line) {
                        continue;
                    }
                    failures.push((line_no, msg));
                }
            }
        }
        if let Some((line, message)) = failures.first() {
            let mut message = message.clone();
            if failures.len() > 1 {
                let others: Vec<String> = failures[1..].iter().map(|(l, _)| l.to_string()).collect();
                let _ = write!(message, " (also failed: lines {})", others.join(", "));
            }
            return Err(Error::Parse { line: *line, message });
        }
        Self::from_records(&points, dedupe)
    }

    pub fn read_csv(path: impl AsRef<Path>, dedupe: DedupePolicy) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse_csv(&text, dedupe)
    }

    /// Serializes to `time,value` CSV with a header line, full precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,value\n");
        for (t, y) in self.times.iter().zip(&self.values) {
            let _ = writeln!(out, "{t:?},{y:?}");
        }
        out
    }
}

fn parse_pair(line: &str) -> std::result::Result<(f64, f64), String> {
    let mut fields = line.split(',').map(str::trim);
    let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
        return Err(format!("expected two comma-separated columns, got `{line}`"));
    };
    let t: f64 = a.parse().map_err(|_| format!("cannot parse time `{a}`"))?;
    let y: f64 = b.parse().map_err(|_| format!("cannot parse value `{b}`"))?;
    Ok((t, y))
}

fn looks_like_header(line: &str) -> bool {
    line.split(',')
        .any(|f| f.trim().parse::<f64>().is_err() && f.chars().any(|c| c.is_alphabetic()))
}

/// Intersection of the two time ranges.
pub fn common_time_range(a: &TimeSeries, b: &TimeSeries) -> Result<Interval> {
    let (ra, rb) = (a.time_range(), b.time_range());
    let lo = ra.lo.max(rb.lo);
    let hi = ra.hi.min(rb.hi);
    if lo > hi {
        return Err(Error::NoOverlap {
            a_lo: ra.lo,
            a_hi: ra.hi,
            b_lo: rb.lo,
            b_hi: rb.hi,
        });
    }
    Ok(Interval::new(lo, hi))
}
