//! Smoothing kernels and bandwidths for the alignment measure.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Fraction of data set 1's time range used for `h1`.
pub const H1_TIME_FRACTION: f64 = 0.05;
/// Fraction of the combined value range used for `h2`.
pub const H2_VALUE_FRACTION: f64 = 0.10;

/// A symmetric probability density on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelSpec {
    #[default]
    Gaussian,
    Epanechnikov,
    Triangular,
    Uniform,
    Biweight,
}

impl KernelSpec {
    pub const ALL: [KernelSpec; 5] = [
        KernelSpec::Gaussian,
        KernelSpec::Epanechnikov,
        KernelSpec::Triangular,
        KernelSpec::Uniform,
        KernelSpec::Biweight,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelSpec::Gaussian => "gaussian",
            KernelSpec::Epanechnikov => "epanechnikov",
            KernelSpec::Triangular => "triangular",
            KernelSpec::Uniform => "uniform",
            KernelSpec::Biweight => "biweight",
        }
    }

    /// Unscaled density `K(u)`.
    #[inline]
    pub fn density(self, u: f64) -> f64 {
        match self {
            KernelSpec::Gaussian => INV_SQRT_2PI * (-0.5 * u * u).exp(),
            KernelSpec::Epanechnikov => {
                if u.abs() <= 1.0 {
                    0.75 * (1.0 - u * u)
                } else {
                    0.0
                }
            }
            KernelSpec::Triangular => (1.0 - u.abs()).max(0.0),
            KernelSpec::Uniform => {
                if u.abs() <= 1.0 {
                    0.5
                } else {
                    0.0
                }
            }
            KernelSpec::Biweight => {
                if u.abs() <= 1.0 {
                    let v = 1.0 - u * u;
                    15.0 / 16.0 * v * v
                } else {
                    0.0
                }
            }
        }
    }

    /// `K'(u)`, or `None` for kernels without a usable derivative.
    #[inline]
    pub fn derivative(self, u: f64) -> Option<f64> {
        match self {
            KernelSpec::Gaussian => Some(-u * self.density(u)),
            KernelSpec::Epanechnikov => Some(if u.abs() <= 1.0 { -1.5 * u } else { 0.0 }),
            KernelSpec::Biweight => Some(if u.abs() <= 1.0 {
                -3.75 * u * (1.0 - u * u)
            } else {
                0.0
            }),
            KernelSpec::Triangular | KernelSpec::Uniform => None,
        }
    }

    pub fn is_differentiable(self) -> bool {
        !matches!(self, KernelSpec::Triangular | KernelSpec::Uniform)
    }

    /// Half-width of the support, infinite for the gaussian.
    pub fn support_radius(self) -> f64 {
        match self {
            KernelSpec::Gaussian => f64::INFINITY,
            _ => 1.0,
        }
    }

    /// Whether the kernel is bounded away from zero on every closed interval
    /// and has a bounded derivative. Only the gaussian qualifies.
    pub fn is_everywhere_positive(self) -> bool {
        self == KernelSpec::Gaussian
    }

    /// `sup |K'(u)|`.
    pub fn derivative_bound(self) -> f64 {
        match self {
            // attained at u = 1
            KernelSpec::Gaussian => INV_SQRT_2PI * (-0.5f64).exp(),
            KernelSpec::Epanechnikov => 1.5,
            // max of 3.75 u (1 - u^2) at u = 1/sqrt(3)
            KernelSpec::Biweight => 3.75 * (1.0 / 3f64.sqrt()) * (2.0 / 3.0),
            KernelSpec::Triangular => 1.0,
            KernelSpec::Uniform => f64::INFINITY,
        }
    }

    /// `(1/h) K(u/h)`.
    pub fn scaled_eval(self, h: f64, u: f64) -> Result<f64> {
        check_bandwidth(h)?;
        Ok(self.density(u / h) / h)
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelSpec::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown kernel `{s}`")))
    }
}

fn check_bandwidth(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveBandwidth(h))
    }
}

/// Time bandwidth `h1` and value bandwidth `h2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bandwidths {
    h1: f64,
    h2: f64,
}

impl Bandwidths {
    pub fn new(h1: f64, h2: f64) -> Result<Self> {
        check_bandwidth(h1)?;
        check_bandwidth(h2)?;
        Ok(Self { h1, h2 })
    }

    pub fn h1(&self) -> f64 {
        self.h1
    }

    pub fn h2(&self) -> f64 {
        self.h2
    }

    /// Default rule: `h1` is 5% of the reference (data set 1) time range and
    /// `h2` is 10% of the range of both value sequences pooled.
    pub fn default_for(data1: &TimeSeries, data2: &TimeSeries) -> Result<Self> {
        let time_span = data1.time_range().length();
        if time_span <= 0.0 {
            return Err(Error::DegenerateRange("time range of data set 1 is zero"));
        }
        let (a, b) = (data1.value_range(), data2.value_range());
        let value_span = a.hi.max(b.hi) - a.lo.min(b.lo);
        if value_span <= 0.0 {
            return Err(Error::DegenerateRange("combined value range is zero"));
        }
        Self::new(H1_TIME_FRACTION * time_span, H2_VALUE_FRACTION * value_span)
    }
}

/// Free-function form of [`Bandwidths::default_for`].
pub fn default_bandwidths(data1: &TimeSeries, data2: &TimeSeries) -> Result<Bandwidths> {
    Bandwidths::default_for(data1, data2)
}

/// Free-function form of [`KernelSpec::scaled_eval`].
pub fn scaled_eval(k: KernelSpec, h: f64, u: f64) -> Result<f64> {
    k.scaled_eval(h, u)
}
