//! Candidate time transformations: strictly increasing continuous linear
//! splines on equidistant knots.
//!
//! A warp over `[c, d]` with `K` knots is stored as its knot values
//! `g(knot_0) < ... < g(knot_{K-1})`. Evaluation is linear interpolation
//! between knots, i.e. a combination of linear B-spline (hat) functions.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::series::Interval;

/// Default strict-monotonicity margin, as a fraction of the unit slope.
pub const DEFAULT_MARGIN: f64 = 1e-3;

/// Relative weight of the regularizing penalties in [`LinearSplineWarp::fit_monotone`].
/// They only pin down directions the samples leave undetermined.
const FIT_PENALTY: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSplineWarp {
    domain: Interval,
    values: Vec<f64>,
}

impl LinearSplineWarp {
    /// A warp with the given knot values, which must be finite and strictly
    /// increasing. The knots are `K = values.len()` equidistant points over
    /// `domain`.
    pub fn new(domain: Interval, values: Vec<f64>) -> Result<Self> {
        check_domain(domain, values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidWarp("non-finite knot value".into()));
        }
        if let Some(k) = values.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidWarp(format!(
                "knot values not strictly increasing at knot {}",
                k + 1
            )));
        }
        Ok(Self { domain, values })
    }

    pub fn identity(domain: Interval, knot_count: usize) -> Result<Self> {
        check_domain(domain, knot_count)?;
        let values = domain.uniform_grid(knot_count);
        Ok(Self { domain, values })
    }

    /// Least-squares fit of the knot values to `(s, target)` samples,
    /// followed by [`repair`](Self::repaired) with the given margin.
    ///
    /// Knot values the samples leave undetermined are fixed by tiny penalties
    /// on second differences and on deviations from unit slope, so that a
    /// single sample yields a pure shift and sparse samples interpolate
    /// linearly. Both penalties vanish on the identity map.
    pub fn fit_monotone(
        domain: Interval,
        knot_count: usize,
        samples: &[(f64, f64)],
        margin: f64,
    ) -> Result<Self> {
        check_domain(domain, knot_count)?;
        if samples.is_empty() {
            return Err(Error::InvalidConfig("fit_monotone needs at least one sample".into()));
        }
        let k = knot_count;
        let spacing = domain.length() / (k - 1) as f64;
        let n = samples.len();
        let rows = n + (k - 1) + k.saturating_sub(2);
        let mut a = DMatrix::<f64>::zeros(rows, k);
        let mut b = DVector::<f64>::zeros(rows);
        for (row, &(s, t)) in samples.iter().enumerate() {
            if !s.is_finite() || !t.is_finite() {
                return Err(Error::NonFiniteValue { index: row });
            }
            let (left, w_left) = locate(domain, k, s)?;
            a[(row, left)] += w_left;
            if left + 1 < k {
                a[(row, left + 1)] += 1.0 - w_left;
            }
            b[row] = t;
        }
        let mean_mass = (0..k).map(|j| a.column(j).norm_squared()).sum::<f64>() / k as f64;
        let w = FIT_PENALTY * mean_mass.max(1.0).sqrt();
        let mut row = n;
        for j in 0..k - 1 {
            a[(row, j)] = -w;
            a[(row, j + 1)] = w;
            b[row] = w * spacing;
            row += 1;
        }
        for j in 0..k.saturating_sub(2) {
            a[(row, j)] = w;
            a[(row, j + 1)] = -2.0 * w;
            a[(row, j + 2)] = w;
            row += 1;
        }
        let svd = a.svd(true, true);
        let solution = svd
            .solve(&b, 1e-14)
            .map_err(|e| Error::InvalidWarp(format!("least-squares fit failed: {e}")))?;
        let values: Vec<f64> = solution.iter().copied().collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidWarp("least-squares fit produced non-finite values".into()));
        }
        Ok(Self {
            domain,
            values: repair_values(values, spacing, margin),
        })
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn knot_count(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spacing(&self) -> f64 {
        self.domain.length() / (self.values.len() - 1) as f64
    }

    pub fn knots(&self) -> Vec<f64> {
        self.domain.uniform_grid(self.values.len())
    }

    /// Smallest increment between consecutive knot values.
    pub fn min_increment(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// The invariant of the class: every increment is at least
    /// `margin * spacing`.
    pub fn satisfies_margin(&self, margin: f64) -> bool {
        self.min_increment() >= margin * self.spacing()
    }

    /// `g(s)`.
    pub fn evaluate(&self, s: f64) -> Result<f64> {
        let (left, w_left) = locate(self.domain, self.values.len(), s)?;
        Ok(self.combine(left, w_left))
    }

    #[inline]
    fn combine(&self, left: usize, w_left: f64) -> f64 {
        if w_left == 1.0 || left + 1 == self.values.len() {
            self.values[left]
        } else {
            w_left * self.values[left] + (1.0 - w_left) * self.values[left + 1]
        }
    }

    /// Sparse hat-function coordinates of `s`: the left bracketing knot index
    /// and its weight. The right neighbour (if any) carries `1 - weight`.
    pub fn basis_pair(&self, s: f64) -> Result<(usize, f64)> {
        locate(self.domain, self.values.len(), s)
    }

    /// Dense hat-function coordinates of `s`, summing to one.
    pub fn basis_weights(&self, s: f64) -> Result<Vec<f64>> {
        let (left, w_left) = self.basis_pair(s)?;
        let mut w = vec![0.0; self.values.len()];
        w[left] = w_left;
        if left + 1 < w.len() {
            w[left + 1] = 1.0 - w_left;
        }
        Ok(w)
    }

    /// Same knots, new values, repaired to respect `margin`.
    pub fn with_values_repaired(&self, values: Vec<f64>, margin: f64) -> Result<Self> {
        self.check_values(&values)?;
        Ok(Self {
            domain: self.domain,
            values: repair_values(values, self.spacing(), margin),
        })
    }

    /// Same knots, new values, with every segment slope clamped into
    /// `[min_slope, max_slope]` (`0 < min_slope <= 1 <= max_slope`).
    pub fn with_values_slope_clamped(&self, values: Vec<f64>, min_slope: f64, max_slope: f64) -> Result<Self> {
        self.check_values(&values)?;
        Ok(Self {
            domain: self.domain,
            values: clamp_slopes(values, self.spacing(), min_slope, max_slope),
        })
    }

    /// Smallest and largest segment slope.
    pub fn slope_range(&self) -> (f64, f64) {
        let h = self.spacing();
        self.values.windows(2).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), w| {
            let s = (w[1] - w[0]) / h;
            (lo.min(s), hi.max(s))
        })
    }

    /// This warp repaired to respect `margin`.
    pub fn repaired(&self, margin: f64) -> Self {
        Self {
            domain: self.domain,
            values: repair_values(self.values.clone(), self.spacing(), margin),
        }
    }

    fn check_values(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.values.len() {
            return Err(Error::InvalidWarp(format!(
                "expected {} knot values, got {}",
                self.values.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidWarp("non-finite knot value".into()));
        }
        Ok(())
    }

    /// Supremum distance to `other` over `grid`.
    pub fn sup_distance(&self, other: impl Fn(f64) -> Result<f64>, grid: &[f64]) -> Result<f64> {
        grid.iter().try_fold(0.0f64, |acc, &s| {
            Ok(acc.max((self.evaluate(s)? - other(s)?).abs()))
        })
    }
}

/// Raises every increment below `margin * spacing` to that floor, then
/// shifts all values so their mean is unchanged. Values that already satisfy
/// the floor are returned untouched.
fn repair_values(values: Vec<f64>, spacing: f64, margin: f64) -> Vec<f64> {
    clamp_slopes(values, spacing, margin, f64::INFINITY)
}

/// Clamps every increment into `[min_slope, max_slope] * spacing`, then
/// restores the mean of the values.
fn clamp_slopes(mut values: Vec<f64>, spacing: f64, min_slope: f64, max_slope: f64) -> Vec<f64> {
    let (floor, ceil) = (min_slope * spacing, max_slope * spacing);
    if values.windows(2).all(|w| w[1] - w[0] >= floor && w[1] - w[0] <= ceil) {
        return values;
    }
    // bounds slightly tightened so the re-centering shift cannot round an
    // increment back across them
    let slack = f64::EPSILON * values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let lo = floor * (1.0 + 1e-9) + slack;
    let hi = (ceil * (1.0 - 1e-9) - slack).max(lo);
    let mean_before = values.iter().sum::<f64>() / values.len() as f64;
    let mut prev_raw = values[0];
    for k in 1..values.len() {
        let raw = values[k];
        values[k] = values[k - 1] + (raw - prev_raw).clamp(lo, hi);
        prev_raw = raw;
    }
    let shift = mean_before - values.iter().sum::<f64>() / values.len() as f64;
    for v in &mut values {
        *v += shift;
    }
    values
}

fn check_domain(domain: Interval, knot_count: usize) -> Result<()> {
    if knot_count < 2 {
        return Err(Error::InvalidWarp(format!("need at least 2 knots, got {knot_count}")));
    }
    if !(domain.lo.is_finite() && domain.hi.is_finite() && domain.lo < domain.hi) {
        return Err(Error::InvalidWarp(format!(
            "invalid domain [{}, {}]",
            domain.lo, domain.hi
        )));
    }
    Ok(())
}

#[inline]
fn locate(domain: Interval, knot_count: usize, s: f64) -> Result<(usize, f64)> {
    if !(s >= domain.lo && s <= domain.hi) {
        return Err(Error::OutOfDomain {
            s,
            lo: domain.lo,
            hi: domain.hi,
        });
    }
    let segments = (knot_count - 1) as f64;
    let x = (s - domain.lo) / domain.length() * segments;
    let left = (x.floor() as usize).min(knot_count - 2);
    let frac = x - left as f64;
    if frac <= 0.0 {
        return Ok((left, 1.0));
    }
    if frac >= 1.0 {
        return Ok((left + 1, 1.0));
    }
    Ok((left, 1.0 - frac))
}

#[derive(Serialize, Deserialize)]
struct WarpFile {
    domain: [f64; 2],
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl Serialize for LinearSplineWarp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        WarpFile {
            domain: [self.domain.lo, self.domain.hi],
            knots: self.knots(),
            values: self.values.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LinearSplineWarp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let file = WarpFile::deserialize(deserializer)?;
        let domain = Interval::new(file.domain[0], file.domain[1]);
        let warp = LinearSplineWarp::new(domain, file.values).map_err(D::Error::custom)?;
        if file.knots.len() != warp.knot_count() {
            return Err(D::Error::custom("knots and values differ in length"));
        }
        let tol = 1e-9 * domain.length().max(1.0);
        if warp.knots().iter().zip(&file.knots).any(|(a, b)| (a - b).abs() > tol) {
            return Err(D::Error::custom("knots are not equidistant over the domain"));
        }
        Ok(warp)
    }
}
