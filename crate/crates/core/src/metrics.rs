//! Quadrature and evaluation statistics for estimated warps.

use serde::{Deserialize, Serialize};

use crate::alignment::CompensatedSum;
use crate::error::{Error, Result};
use crate::series::{common_time_range, Interval, TimeSeries};

/// Grid size for integrated error summaries (odd, for Simpson's rule).
pub const IMSE_GRID_POINTS: usize = 1001;
/// Grid size for distances between interpolated curves.
pub const DISTANCE_GRID_POINTS: usize = 1000;

/// Composite Simpson's rule for samples on a uniform grid.
pub fn simpson(values: &[f64], spacing: f64) -> Result<f64> {
    let n = values.len();
    if n < 3 || n % 2 == 0 {
        return Err(Error::EvenPointCount(n));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::NonUniformGrid);
    }
    let mut acc = CompensatedSum::default();
    acc.add(values[0]);
    acc.add(values[n - 1]);
    for (i, &v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc.add(if i % 2 == 1 { 4.0 * v } else { 2.0 * v });
    }
    Ok(acc.value() * spacing / 3.0)
}

/// Simpson's rule on an explicit grid, which must be uniform.
pub fn simpson_on_grid(grid: &[f64], values: &[f64]) -> Result<f64> {
    if grid.len() != values.len() {
        return Err(Error::LengthMismatch {
            times: grid.len(),
            values: values.len(),
        });
    }
    if grid.len() < 3 || grid.len() % 2 == 0 {
        return Err(Error::EvenPointCount(grid.len()));
    }
    let spacing = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    let tol = 1e-9 * spacing.abs();
    if grid.windows(2).any(|w| ((w[1] - w[0]) - spacing).abs() > tol) {
        return Err(Error::NonUniformGrid);
    }
    simpson(values, spacing)
}

/// Average integrated squared error over runs, divided by `int g0^2`.
///
/// `estimates[j]` and `truth` are values on the uniform grid of `grid_len`
/// points spanning `interval`.
pub fn normalized_imse(estimates: &[Vec<f64>], truth: &[f64], interval: Interval) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::InvalidConfig("normalized IMSE needs at least one run".into()));
    }
    let n = truth.len();
    if n < 2 {
        return Err(Error::EvenPointCount(n));
    }
    let spacing = interval.length() / (n - 1) as f64;
    let norm = simpson(&truth.iter().map(|g| g * g).collect::<Vec<_>>(), spacing)?;
    if !(norm > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let mut total = CompensatedSum::default();
    for est in estimates {
        if est.len() != n {
            return Err(Error::LengthMismatch {
                times: n,
                values: est.len(),
            });
        }
        let sq: Vec<f64> = est.iter().zip(truth).map(|(e, g)| (e - g).powi(2)).collect();
        total.add(simpson(&sq, spacing)?);
    }
    Ok(total.value() / estimates.len() as f64 / norm)
}

/// Pointwise bias, standard deviation and mean squared error over runs.
///
/// The standard deviation uses the `S - 1` convention and the MSE the plain
/// mean of squared errors, so `mse = bias^2 + sd^2 (S - 1) / S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySummary {
    pub grid: Vec<f64>,
    pub truth: Vec<f64>,
    pub bias: Vec<f64>,
    pub sd: Vec<f64>,
    pub mse: Vec<f64>,
    pub normalized_imse: f64,
    pub runs: usize,
}

impl StudySummary {
    pub fn from_estimates(interval: Interval, truth: Vec<f64>, estimates: &[Vec<f64>]) -> Result<Self> {
        let imse = normalized_imse(estimates, &truth, interval)?;
        let runs = estimates.len();
        let s = runs as f64;
        let grid = interval.uniform_grid(truth.len());
        let mut bias = Vec::with_capacity(truth.len());
        let mut sd = Vec::with_capacity(truth.len());
        let mut mse = Vec::with_capacity(truth.len());
        for (k, g0) in truth.iter().enumerate() {
            let errs: Vec<f64> = estimates.iter().map(|e| e[k] - g0).collect();
            let mean = CompensatedSum::of(errs.iter().copied()) / s;
            let ss = CompensatedSum::of(errs.iter().map(|e| (e - mean).powi(2)));
            bias.push(mean);
            sd.push(if runs > 1 { (ss / (s - 1.0)).sqrt() } else { 0.0 });
            mse.push(CompensatedSum::of(errs.iter().map(|e| e * e)) / s);
        }
        Ok(Self {
            grid,
            truth,
            bias,
            sd,
            mse,
            normalized_imse: imse,
            runs,
        })
    }

    /// `grid,truth,bias,sd,mse` CSV.
    pub fn to_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::from("grid,truth,bias,sd,mse\n");
        for k in 0..self.grid.len() {
            let _ = writeln!(
                out,
                "{:?},{:?},{:?},{:?},{:?}",
                self.grid[k], self.truth[k], self.bias[k], self.sd[k], self.mse[k]
            );
        }
        out
    }
}

/// Mean of `(a(t) - b(t))^2` over a uniform grid of `grid_size` points on the
/// common time range, both curves linearly interpolated.
pub fn mean_squared_distance(a: &TimeSeries, b: &TimeSeries, grid_size: usize) -> Result<f64> {
    if grid_size == 0 {
        return Err(Error::InvalidConfig("grid size must be positive".into()));
    }
    let range = common_time_range(a, b)?;
    let mut acc = CompensatedSum::default();
    for t in range.uniform_grid(grid_size) {
        let d = a.interp_linear(t)? - b.interp_linear(t)?;
        acc.add(d * d);
    }
    Ok(acc.value() / grid_size as f64)
}
