//! The kernel measure of alignment between a reference data set and a warped
//! second data set, and its gradient with respect to the warp's knot values.
//!
//! For data `(t_i, Y_i)`, `i < n1`, and `(s_j, Y'_j)`, `j < n2`, and a warp `g`:
//!
//! ```text
//! N_n(g) = 1/(n1 n2) sum_ij (1/h1) K1((t_i - g(s_j))/h1) (1/h2) K2((Y_i - Y'_j)/h2)
//! D_n(g) = 1/(n1 n2) sum_ij (1/h1) K1((t_i - g(s_j))/h1)
//! L_n(g) = N_n(g) / D_n(g)
//! ```
//!
//! `L_n` is a weighted average of the value-similarity terms, with weights
//! that favour pairs brought close in time by `g`.
//!
//! The double sum is split into contiguous blocks of the data-set-2 index.
//! Each block is accumulated with Neumaier compensated summation and the block
//! results are combined in block order, so a fixed partition count gives
//! bitwise-reproducible results and different partition counts agree to
//! rounding level.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{Bandwidths, KernelSpec};
use crate::series::TimeSeries;
use crate::warp::LinearSplineWarp;

/// Default pruning radius for the gaussian, in units of `h1`.
pub const DEFAULT_PRUNE_RADIUS: f64 = 8.0;

/// Largest `n1 * n2` for which value-similarity terms are cached.
const DENSE_CACHE_LIMIT: usize = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignmentConfig {
    pub kernel1: KernelSpec,
    pub kernel2: KernelSpec,
    pub bandwidths: Bandwidths,
    /// Skip pairs with `|t_i - g(s_j)| > radius * h1`. `None` evaluates the
    /// exact double sum. Compact-support kernels are always restricted to
    /// their support, which is exact.
    #[serde(default)]
    pub prune_radius: Option<f64>,
    /// Number of contiguous blocks the outer sum is split into. Blocks are
    /// evaluated in parallel when greater than one.
    #[serde(default = "one")]
    pub partitions: usize,
}

fn one() -> usize {
    1
}

impl AlignmentConfig {
    /// Gaussian kernels for both factors with the given bandwidths.
    pub fn gaussian(bandwidths: Bandwidths) -> Self {
        Self {
            kernel1: KernelSpec::Gaussian,
            kernel2: KernelSpec::Gaussian,
            bandwidths,
            prune_radius: None,
            partitions: 1,
        }
    }

    /// Gaussian kernels with the default bandwidth rule.
    pub fn default_for(data1: &TimeSeries, data2: &TimeSeries) -> Result<Self> {
        Ok(Self::gaussian(Bandwidths::default_for(data1, data2)?))
    }

    pub fn with_pruning(mut self, radius: Option<f64>) -> Self {
        self.prune_radius = radius;
        self
    }

    pub fn with_partitions(mut self, partitions: usize) -> Self {
        self.partitions = partitions.max(1);
        self
    }

    /// Worst-case absolute error that pruning introduces in `(D_n, N_n)`.
    ///
    /// Every skipped `K1` term is at most `K1(radius) / h1`; `D_n` is an
    /// average of such terms and `N_n` multiplies each by at most
    /// `K2(0) / h2`.
    pub fn pruning_error_bound(&self) -> (f64, f64) {
        let Some(radius) = self.effective_radius() else {
            return (0.0, 0.0);
        };
        let h1 = self.bandwidths.h1();
        let tail = self.kernel1.density(radius) / h1;
        (tail, tail * self.kernel2.density(0.0) / self.bandwidths.h2())
    }

    fn effective_radius(&self) -> Option<f64> {
        self.prune_radius
            .filter(|&r| r < self.kernel1.support_radius())
    }

    fn window_radius(&self) -> Option<f64> {
        let support = self.kernel1.support_radius();
        match self.prune_radius {
            Some(r) => Some(r.min(support)),
            None if support.is_finite() => Some(support),
            None => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignmentValue {
    #[serde(rename = "L_n")]
    pub l_n: f64,
    #[serde(rename = "N_n")]
    pub numerator: f64,
    #[serde(rename = "D_n")]
    pub denominator: f64,
}

/// Running sum with Neumaier compensation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }

    pub fn of(iter: impl IntoIterator<Item = f64>) -> f64 {
        let mut acc = Self::default();
        for x in iter {
            acc.add(x);
        }
        acc.value()
    }
}

struct Partial {
    numerator: CompensatedSum,
    denominator: CompensatedSum,
    d_numerator: Vec<CompensatedSum>,
    d_denominator: Vec<CompensatedSum>,
}

/// Alignment measure for a fixed pair of data sets, reusable across warps.
///
/// Value-similarity terms do not depend on the warp and are cached when the
/// pair is small enough.
pub struct AlignmentProblem<'a> {
    data1: &'a TimeSeries,
    data2: &'a TimeSeries,
    cfg: AlignmentConfig,
    value_terms: Option<Vec<f64>>,
}

impl<'a> AlignmentProblem<'a> {
    pub fn new(data1: &'a TimeSeries, data2: &'a TimeSeries, cfg: AlignmentConfig) -> Result<Self> {
        // re-validate: the config may have been deserialized
        Bandwidths::new(cfg.bandwidths.h1(), cfg.bandwidths.h2())?;
        if let Some(r) = cfg.prune_radius {
            if !(r > 0.0) {
                return Err(Error::InvalidConfig(format!("prune radius must be positive, got {r}")));
            }
        }
        let (n1, n2) = (data1.len(), data2.len());
        let value_terms = (n1.saturating_mul(n2) <= DENSE_CACHE_LIMIT).then(|| {
            let h2 = cfg.bandwidths.h2();
            let mut terms = Vec::with_capacity(n1 * n2);
            for &y2 in data2.values() {
                terms.extend(data1.values().iter().map(|&y1| cfg.kernel2.density((y1 - y2) / h2) / h2));
            }
            terms
        });
        Ok(Self {
            data1,
            data2,
            cfg,
            value_terms,
        })
    }

    pub fn config(&self) -> &AlignmentConfig {
        &self.cfg
    }

    pub fn data1(&self) -> &TimeSeries {
        self.data1
    }

    pub fn data2(&self) -> &TimeSeries {
        self.data2
    }

    /// `L_n`, `N_n` and `D_n` at `warp`.
    pub fn measure(&self, warp: &LinearSplineWarp) -> Result<AlignmentValue> {
        let partial = self.accumulate(warp, false)?;
        self.finish_value(&partial)
    }

    /// Gradient of `L_n` with respect to the knot values of `warp`.
    pub fn gradient(&self, warp: &LinearSplineWarp) -> Result<Vec<f64>> {
        Ok(self.measure_and_gradient(warp)?.1)
    }

    pub fn measure_and_gradient(&self, warp: &LinearSplineWarp) -> Result<(AlignmentValue, Vec<f64>)> {
        if !self.cfg.kernel1.is_differentiable() {
            return Err(Error::NonDifferentiableKernel(self.cfg.kernel1.name()));
        }
        let partial = self.accumulate(warp, true)?;
        let value = self.finish_value(&partial)?;
        let scale = 1.0 / (self.data1.len() as f64 * self.data2.len() as f64);
        let (n, d) = (value.numerator, value.denominator);
        let grad = partial
            .d_numerator
            .iter()
            .zip(&partial.d_denominator)
            .map(|(dn, dd)| {
                let (dn, dd) = (dn.value() * scale, dd.value() * scale);
                (dn * d - n * dd) / (d * d)
            })
            .collect();
        Ok((value, grad))
    }

    fn finish_value(&self, partial: &Partial) -> Result<AlignmentValue> {
        let scale = 1.0 / (self.data1.len() as f64 * self.data2.len() as f64);
        let numerator = partial.numerator.value() * scale;
        let denominator = partial.denominator.value() * scale;
        if !(denominator > 0.0) || !denominator.is_finite() || !numerator.is_finite() {
            return Err(Error::ZeroDenominator { at_initial: false });
        }
        Ok(AlignmentValue {
            l_n: numerator / denominator,
            numerator,
            denominator,
        })
    }

    fn accumulate(&self, warp: &LinearSplineWarp, with_gradient: bool) -> Result<Partial> {
        let domain = warp.domain();
        let r2 = self.data2.time_range();
        if r2.lo < domain.lo || r2.hi > domain.hi {
            let s = if r2.lo < domain.lo { r2.lo } else { r2.hi };
            return Err(Error::OutOfDomain {
                s,
                lo: domain.lo,
                hi: domain.hi,
            });
        }
        let n2 = self.data2.len();
        let parts = self.cfg.partitions.clamp(1, n2);
        let bounds: Vec<(usize, usize)> = (0..parts)
            .map(|p| (p * n2 / parts, (p + 1) * n2 / parts))
            .collect();
        let knots = warp.knot_count();
        let run = |&(lo, hi): &(usize, usize)| self.accumulate_block(warp, lo, hi, with_gradient, knots);
        let blocks: Vec<Result<Partial>> = if parts > 1 {
            bounds.par_iter().map(run).collect()
        } else {
            bounds.iter().map(run).collect()
        };
        let mut total = Partial {
            numerator: CompensatedSum::default(),
            denominator: CompensatedSum::default(),
            d_numerator: vec![CompensatedSum::default(); if with_gradient { knots } else { 0 }],
            d_denominator: vec![CompensatedSum::default(); if with_gradient { knots } else { 0 }],
        };
        for block in blocks {
            let block = block?;
            total.numerator.add(block.numerator.value());
            total.denominator.add(block.denominator.value());
            for (acc, b) in total.d_numerator.iter_mut().zip(&block.d_numerator) {
                acc.add(b.value());
            }
            for (acc, b) in total.d_denominator.iter_mut().zip(&block.d_denominator) {
                acc.add(b.value());
            }
        }
        Ok(total)
    }

    fn accumulate_block(
        &self,
        warp: &LinearSplineWarp,
        lo: usize,
        hi: usize,
        with_gradient: bool,
        knots: usize,
    ) -> Result<Partial> {
        let cfg = &self.cfg;
        let (h1, h2) = (cfg.bandwidths.h1(), cfg.bandwidths.h2());
        let (k1, k2) = (cfg.kernel1, cfg.kernel2);
        let times1 = self.data1.times();
        let values1 = self.data1.values();
        let n1 = times1.len();
        let window = cfg.window_radius().map(|r| r * h1);
        let inv_h1 = 1.0 / h1;
        let inv_h1_sq = inv_h1 * inv_h1;

        let mut out = Partial {
            numerator: CompensatedSum::default(),
            denominator: CompensatedSum::default(),
            d_numerator: vec![CompensatedSum::default(); if with_gradient { knots } else { 0 }],
            d_denominator: vec![CompensatedSum::default(); if with_gradient { knots } else { 0 }],
        };
        for j in lo..hi {
            let s = self.data2.times()[j];
            let y2 = self.data2.values()[j];
            let (left, w_left) = warp.basis_pair(s)?;
            let warped = warp.evaluate(s)?;
            let (i_lo, i_hi) = match window {
                Some(w) => (
                    times1.partition_point(|&t| t < warped - w),
                    times1.partition_point(|&t| t <= warped + w),
                ),
                None => (0, n1),
            };
            let row = self.value_terms.as_ref().map(|v| &v[j * n1..(j + 1) * n1]);
            let mut num = CompensatedSum::default();
            let mut den = CompensatedSum::default();
            let mut d_num = CompensatedSum::default();
            let mut d_den = CompensatedSum::default();
            for i in i_lo..i_hi {
                let u = (times1[i] - warped) * inv_h1;
                let weight = k1.density(u) * inv_h1;
                let similarity = match row {
                    Some(r) => r[i],
                    None => k2.density((values1[i] - y2) / h2) / h2,
                };
                num.add(weight * similarity);
                den.add(weight);
                if with_gradient {
                    // d/dg (1/h1) K1((t - g)/h1) = -K1'(u) / h1^2
                    let dw = -k1.derivative(u).unwrap_or(0.0) * inv_h1_sq;
                    d_num.add(dw * similarity);
                    d_den.add(dw);
                }
            }
            out.numerator.add(num.value());
            out.denominator.add(den.value());
            if with_gradient {
                let (dn, dd) = (d_num.value(), d_den.value());
                out.d_numerator[left].add(w_left * dn);
                out.d_denominator[left].add(w_left * dd);
                if left + 1 < knots && w_left < 1.0 {
                    out.d_numerator[left + 1].add((1.0 - w_left) * dn);
                    out.d_denominator[left + 1].add((1.0 - w_left) * dd);
                }
            }
        }
        Ok(out)
    }
}

/// `L_n(g)` with its numerator and denominator.
pub fn measure(
    data1: &TimeSeries,
    data2: &TimeSeries,
    warp: &LinearSplineWarp,
    cfg: &AlignmentConfig,
) -> Result<AlignmentValue> {
    AlignmentProblem::new(data1, data2, *cfg)?.measure(warp)
}

/// `dL_n / d(knot value k)` for every knot.
pub fn gradient(
    data1: &TimeSeries,
    data2: &TimeSeries,
    warp: &LinearSplineWarp,
    cfg: &AlignmentConfig,
) -> Result<Vec<f64>> {
    AlignmentProblem::new(data1, data2, *cfg)?.gradient(warp)
}
