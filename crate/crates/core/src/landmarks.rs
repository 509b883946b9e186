//! Automatic peak/valley landmarks, used only to build an initial warp.
//!
//! Significance is topographic prominence relative to the value range. The
//! two landmark lists are paired by an order-preserving dynamic program that
//! only matches landmarks of the same kind.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Interval, TimeSeries};
use crate::warp::LinearSplineWarp;

pub const DEFAULT_PROMINENCE_FRAC: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LandmarkKind {
    Peak,
    Valley,
}

impl fmt::Display for LandmarkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LandmarkKind::Peak => "peak",
            LandmarkKind::Valley => "valley",
        })
    }
}

impl FromStr for LandmarkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "peak" => Ok(LandmarkKind::Peak),
            "valley" => Ok(LandmarkKind::Valley),
            _ => Err(Error::InvalidConfig(format!("unknown landmark kind `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Landmark {
    pub time: f64,
    pub value: f64,
    pub kind: LandmarkKind,
    pub prominence: f64,
}

/// Matched landmark times `(s, t)`: `s` in data set 2, `t` in data set 1.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LandmarkMatch {
    pub pairs: Vec<(f64, f64)>,
    pub score: f64,
}

impl LandmarkMatch {
    pub fn is_monotone(&self) -> bool {
        self.pairs.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1)
    }
}

/// Local extrema with prominence at least `prominence_frac` times the value
/// range, sorted by time. Plateaus report their middle sample.
pub fn detect(ts: &TimeSeries, prominence_frac: f64) -> Vec<Landmark> {
    let threshold = prominence_frac * ts.value_range().length();
    let y = ts.values();
    let negated: Vec<f64> = y.iter().map(|v| -v).collect();
    let mut out = Vec::new();
    for (kind, series) in [(LandmarkKind::Peak, y), (LandmarkKind::Valley, negated.as_slice())] {
        for idx in local_maxima(series) {
            let prominence = prominence(series, idx);
            if prominence > 0.0 && prominence >= threshold {
                out.push(Landmark {
                    time: ts.times()[idx],
                    value: y[idx],
                    kind,
                    prominence,
                });
            }
        }
    }
    out.sort_by(|a, b| a.time.total_cmp(&b.time));
    out
}

fn local_maxima(x: &[f64]) -> Vec<usize> {
    let n = x.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if x[i - 1] < x[i] {
            let mut j = i;
            while j + 1 < n && x[j + 1] == x[i] {
                j += 1;
            }
            if j + 1 < n && x[j + 1] < x[i] {
                out.push((i + j) / 2);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Height of `x[peak]` above the higher of the two lowest points reachable
/// on each side before meeting a strictly higher sample.
fn prominence(x: &[f64], peak: usize) -> f64 {
    let h = x[peak];
    let mut left_min = h;
    for &v in x[..peak].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &x[peak + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

/// Scales for the pair score `exp(-|dv|/sigma_v - |dr|/sigma_t)`, where `dr`
/// compares times relative to each series' own time range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchScale {
    pub range2: Interval,
    pub range1: Interval,
    pub sigma_value: f64,
    pub sigma_rel_time: f64,
}

impl MatchScale {
    /// `sigma_value` is a tenth of the pooled value range; `sigma_rel_time`
    /// a tenth of the (unit) relative time range.
    pub fn from_series(data2: &TimeSeries, data1: &TimeSeries) -> Self {
        let (a, b) = (data1.value_range(), data2.value_range());
        let pooled = a.hi.max(b.hi) - a.lo.min(b.lo);
        Self {
            range2: data2.time_range(),
            range1: data1.time_range(),
            sigma_value: if pooled > 0.0 { pooled / 10.0 } else { 1.0 },
            sigma_rel_time: 0.1,
        }
    }

    pub fn pair_score(&self, a: &Landmark, b: &Landmark) -> Option<f64> {
        if a.kind != b.kind {
            return None;
        }
        let rel = |t: f64, r: Interval| (t - r.lo) / r.length();
        let dv = (a.value - b.value).abs() / self.sigma_value;
        let dt = (rel(a.time, self.range2) - rel(b.time, self.range1)).abs() / self.sigma_rel_time;
        Some((-dv - dt).exp())
    }
}

/// Maximum-score order-preserving matching of `from2` (data set 2) against
/// `from1` (data set 1). Both lists must be sorted by time.
pub fn match_landmarks(from2: &[Landmark], from1: &[Landmark], scale: &MatchScale) -> LandmarkMatch {
    let (n2, n1) = (from2.len(), from1.len());
    if n2 == 0 || n1 == 0 {
        return LandmarkMatch::default();
    }
    let cols = n1 + 1;
    let mut best = vec![0.0f64; (n2 + 1) * cols];
    for a in 1..=n2 {
        for b in 1..=n1 {
            let mut v = best[(a - 1) * cols + b].max(best[a * cols + b - 1]);
            if let Some(s) = scale.pair_score(&from2[a - 1], &from1[b - 1]) {
                v = v.max(best[(a - 1) * cols + b - 1] + s);
            }
            best[a * cols + b] = v;
        }
    }
    let mut pairs = Vec::new();
    let (mut a, mut b) = (n2, n1);
    while a > 0 && b > 0 {
        let here = best[a * cols + b];
        if let Some(s) = scale.pair_score(&from2[a - 1], &from1[b - 1]) {
            if here == best[(a - 1) * cols + b - 1] + s && s > 0.0 {
                pairs.push((from2[a - 1].time, from1[b - 1].time));
                a -= 1;
                b -= 1;
                continue;
            }
        }
        if here == best[(a - 1) * cols + b] {
            a -= 1;
        } else {
            b -= 1;
        }
    }
    pairs.reverse();
    LandmarkMatch {
        pairs,
        score: best[n2 * cols + n1],
    }
}

/// Initial warp from matched landmarks.
///
/// The matched pairs, plus anchors mapping both domain endpoints by the
/// median shift `t - s`, define a piecewise-linear map that is sampled densely
/// and projected onto the spline class with [`LinearSplineWarp::fit_monotone`].
/// Anchors that would break monotonicity are dropped; beyond the outermost
/// point the map continues with that point's shift. No pairs gives the
/// identity.
pub fn initial_warp(
    m: &LandmarkMatch,
    domain: Interval,
    knot_count: usize,
    margin: f64,
) -> Result<LinearSplineWarp> {
    if m.pairs.is_empty() {
        return LinearSplineWarp::identity(domain, knot_count);
    }
    for &(s, _) in &m.pairs {
        if !domain.contains(s) {
            return Err(Error::OutOfDomain {
                s,
                lo: domain.lo,
                hi: domain.hi,
            });
        }
    }
    let mut shifts: Vec<f64> = m.pairs.iter().map(|(s, t)| t - s).collect();
    shifts.sort_by(f64::total_cmp);
    let n = shifts.len();
    let median = if n % 2 == 1 {
        shifts[n / 2]
    } else {
        0.5 * (shifts[n / 2 - 1] + shifts[n / 2])
    };

    let mut points: Vec<(f64, f64)> = Vec::with_capacity(n + 2);
    let first = m.pairs[0];
    if first.0 > domain.lo && domain.lo + median < first.1 {
        points.push((domain.lo, domain.lo + median));
    }
    points.extend_from_slice(&m.pairs);
    let last = m.pairs[n - 1];
    if last.0 < domain.hi && domain.hi + median > last.1 {
        points.push((domain.hi, domain.hi + median));
    }

    let piecewise = |s: f64| -> f64 {
        let k = points.partition_point(|p| p.0 <= s);
        if k == 0 {
            return s + (points[0].1 - points[0].0);
        }
        if k == points.len() {
            let p = points[k - 1];
            return s + (p.1 - p.0);
        }
        let (a, b) = (points[k - 1], points[k]);
        a.1 + (s - a.0) / (b.0 - a.0) * (b.1 - a.1)
    };
    let samples_count = (20 * (knot_count - 1)).max(200) + 1;
    let mut samples: Vec<(f64, f64)> = domain
        .uniform_grid(samples_count)
        .into_iter()
        .map(|s| (s, piecewise(s)))
        .collect();
    samples.extend(points.iter().copied());
    LinearSplineWarp::fit_monotone(domain, knot_count, &samples, margin)
}
