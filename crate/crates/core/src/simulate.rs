//! Monte Carlo evaluation of the estimator.
//!
//! Four designs share one base curve `m` (piecewise-linear through a base data
//! set) and differ in how observation times are drawn and in the true warp:
//!
//! | scenario | times                                         | true warp   |
//! |----------|-----------------------------------------------|-------------|
//! | 1        | fixed random subset `D` of the base, reused    | six-knot spline |
//! | 2        | i.i.d. uniform over the base range, per run    | six-knot spline |
//! | 3        | as 1                                           | identity + periodic |
//! | 4        | as 2                                           | identity + periodic |
//!
//! Randomness comes from ChaCha20 with one independent stream per run
//! (stream 0 draws `D`), so any run can be regenerated on its own and runs can
//! be executed in any order or in parallel.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alignment::AlignmentConfig;
use crate::error::{Error, Result};
use crate::kernel::{Bandwidths, KernelSpec};
use crate::metrics::{StudySummary, IMSE_GRID_POINTS};
use crate::optimizer::{register, OptimizerConfig, RegistrationResult, SlopeBounds};
use crate::series::{DedupePolicy, Interval, TimeSeries};
use crate::warp::LinearSplineWarp;

/// Domain of the six-knot spline warp.
pub const SPLINE_WARP_DOMAIN: Interval = Interval { lo: 3.6, hi: 414.1 };
/// Interior knots and slope changes of the six-knot spline warp.
const SPLINE_WARP_HINGES: [(f64, f64); 4] = [(85.7, -0.209), (167.8, 0.409), (249.9, -0.609), (332.0, 0.809)];
const SPLINE_WARP_INTERCEPT: f64 = -0.379;
const SPLINE_WARP_SLOPE: f64 = 1.05;
/// Relative amplitude of the periodic warp.
const PERIODIC_AMPLITUDE: f64 = 0.05;

/// Noise standard deviation as a fraction of the base values' SD.
pub const NOISE_FRACTION: f64 = 0.05;
pub const DEFAULT_SAMPLE_SIZE: usize = 250;
const MIN_SAMPLE_SIZE: usize = 10;
const MONOTONE_CHECK_POINTS: usize = 10_001;

/// A true time transformation `g0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrueWarp {
    /// `-0.379 + 1.05 t - 0.209 (t-85.7)+ + 0.409 (t-167.8)+ - 0.609 (t-249.9)+ + 0.809 (t-332)+`
    /// on `[3.6, 414.1]`.
    SplineEq4,
    /// `t + 0.05 t sin(3 pi t / b)` on `[a, b]`.
    PeriodicEq5 { a: f64, b: f64 },
    Custom(LinearSplineWarp),
}

impl TrueWarp {
    pub fn domain(&self) -> Interval {
        match self {
            TrueWarp::SplineEq4 => SPLINE_WARP_DOMAIN,
            TrueWarp::PeriodicEq5 { a, b } => Interval::new(*a, *b),
            TrueWarp::Custom(w) => w.domain(),
        }
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        let d = self.domain();
        if !(t >= d.lo && t <= d.hi) {
            return Err(Error::OutOfDomain { s: t, lo: d.lo, hi: d.hi });
        }
        Ok(match self {
            TrueWarp::SplineEq4 => SPLINE_WARP_HINGES
                .iter()
                .fold(SPLINE_WARP_INTERCEPT + SPLINE_WARP_SLOPE * t, |acc, &(knot, delta)| {
                    acc + delta * (t - knot).max(0.0)
                }),
            TrueWarp::PeriodicEq5 { b, .. } => {
                t + PERIODIC_AMPLITUDE * t * (3.0 * std::f64::consts::PI * t / b).sin()
            }
            TrueWarp::Custom(w) => w.evaluate(t)?,
        })
    }

    /// Strictly increasing on a dense uniform grid over the domain.
    pub fn is_increasing_on_grid(&self, points: usize) -> bool {
        let grid = self.domain().uniform_grid(points);
        let values: Vec<f64> = grid.iter().map(|&t| self.evaluate(t).unwrap_or(f64::NAN)).collect();
        values.windows(2).all(|w| w[1] > w[0])
    }
}

/// Free-function form of [`TrueWarp::evaluate`].
pub fn eval_true_warp(tw: &TrueWarp, t: f64) -> Result<f64> {
    tw.evaluate(t)
}

/// Which true warp a scenario uses; the periodic warp's interval is resolved
/// from the data when the scenario is prepared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarpChoice {
    Spline,
    Periodic,
    Custom(LinearSplineWarp),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    S1,
    S2,
    S3,
    S4,
}

impl Scenario {
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Scenario::S1),
            2 => Ok(Scenario::S2),
            3 => Ok(Scenario::S3),
            4 => Ok(Scenario::S4),
            _ => Err(Error::InvalidConfig(format!("scenario must be 1-4, got {n}"))),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Scenario::S1 => 1,
            Scenario::S2 => 2,
            Scenario::S3 => 3,
            Scenario::S4 => 4,
        }
    }

    /// Times fixed across runs (a subset of the base) rather than redrawn.
    pub fn fixed_times(self) -> bool {
        matches!(self, Scenario::S1 | Scenario::S3)
    }

    pub fn default_warp(self) -> WarpChoice {
        match self {
            Scenario::S1 | Scenario::S2 => WarpChoice::Spline,
            Scenario::S3 | Scenario::S4 => WarpChoice::Periodic,
        }
    }

    /// Knot count of the search class: 21 puts the six-knot truth inside the
    /// class, 20 elsewhere.
    pub fn default_knots(self) -> usize {
        match self {
            Scenario::S1 => 21,
            _ => 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    pub base: TimeSeries,
    pub n1: usize,
    pub n2: usize,
    pub noise_sd: f64,
    pub true_warp: WarpChoice,
    pub runs: usize,
    pub seed: u64,
}

impl ScenarioSpec {
    /// The standard design: 250 points per data set, noise SD 5% of the base
    /// values' SD, and the scenario's default true warp.
    pub fn standard(scenario: Scenario, base: TimeSeries, runs: usize, seed: u64) -> Self {
        let noise_sd = NOISE_FRACTION * base.value_sd();
        Self {
            scenario,
            base,
            n1: DEFAULT_SAMPLE_SIZE,
            n2: DEFAULT_SAMPLE_SIZE,
            noise_sd,
            true_warp: scenario.default_warp(),
            runs,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 < MIN_SAMPLE_SIZE || self.n2 < MIN_SAMPLE_SIZE {
            return Err(Error::InvalidConfig(format!("sample sizes must be >= {MIN_SAMPLE_SIZE}")));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::InvalidConfig("noise_sd must be finite and non-negative".into()));
        }
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be >= 1".into()));
        }
        if self.scenario.fixed_times() {
            if self.n1 != self.n2 {
                return Err(Error::InvalidConfig("fixed-time scenarios use n1 == n2".into()));
            }
            if self.n1 > self.base.len() {
                return Err(Error::InvalidConfig(format!(
                    "cannot draw {} points from a base of {}",
                    self.n1,
                    self.base.len()
                )));
            }
        }
        Ok(())
    }
}

/// A scenario with its run-independent parts drawn and resolved.
#[derive(Debug, Clone)]
pub struct PreparedScenario {
    spec: ScenarioSpec,
    /// Interpolation nodes of `m`.
    mean_curve: TimeSeries,
    true_warp: TrueWarp,
    warp_domain: Interval,
    evaluation_domain: Interval,
    fixed_times1: Option<Vec<f64>>,
    fixed_times2: Option<Vec<f64>>,
    dropped_fixed: usize,
}

impl PreparedScenario {
    pub fn new(spec: ScenarioSpec) -> Result<Self> {
        spec.validate()?;
        let mut rng = stream_rng(spec.seed, 0);
        let mean_curve = if spec.scenario.fixed_times() {
            let mut picked = index::sample(&mut rng, spec.base.len(), spec.n1).into_vec();
            picked.sort_unstable();
            let times = picked.iter().map(|&i| spec.base.times()[i]).collect();
            let values = picked.iter().map(|&i| spec.base.values()[i]).collect();
            TimeSeries::new(times, values)?
        } else {
            spec.base.clone()
        };
        let range = mean_curve.time_range();
        let true_warp = match &spec.true_warp {
            WarpChoice::Spline => TrueWarp::SplineEq4,
            WarpChoice::Periodic => TrueWarp::PeriodicEq5 { a: range.lo, b: range.hi },
            WarpChoice::Custom(w) => TrueWarp::Custom(w.clone()),
        };
        if !true_warp.is_increasing_on_grid(MONOTONE_CHECK_POINTS) {
            return Err(Error::InvalidConfig("true warp is not strictly increasing on its domain".into()));
        }
        let wd = true_warp.domain();
        let warp_domain = Interval::new(wd.lo.max(range.lo), wd.hi.min(range.hi));
        if !(warp_domain.lo < warp_domain.hi) {
            return Err(Error::DomainMismatch("true warp domain does not meet the base time range".into()));
        }

        let evaluation_domain = identifiable_region(&true_warp, warp_domain, range)?;
        let (fixed_times1, fixed_times2, dropped_fixed) = if spec.scenario.fixed_times() {
            let all = mean_curve.times().to_vec();
            let valid: Vec<f64> = all
                .iter()
                .copied()
                .filter(|&s| admissible(&true_warp, warp_domain, range, s))
                .collect();
            let dropped = all.len() - valid.len();
            if valid.len() < MIN_SAMPLE_SIZE {
                return Err(Error::DomainMismatch(format!(
                    "only {} of {} fixed times map inside the base range",
                    valid.len(),
                    all.len()
                )));
            }
            (Some(all), Some(valid), dropped)
        } else {
            (None, None, 0)
        };
        Ok(Self {
            spec,
            mean_curve,
            true_warp,
            warp_domain,
            evaluation_domain,
            fixed_times1,
            fixed_times2,
            dropped_fixed,
        })
    }

    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    pub fn true_warp(&self) -> &TrueWarp {
        &self.true_warp
    }

    /// Domain the estimated warp is defined on.
    pub fn warp_domain(&self) -> Interval {
        self.warp_domain
    }

    /// Part of the warp domain that the true warp maps into the range of
    /// `m`. Only there is the warp identifiable from the data, so summaries
    /// are computed over it.
    pub fn evaluation_domain(&self) -> Interval {
        self.evaluation_domain
    }

    pub fn mean_curve(&self) -> &TimeSeries {
        &self.mean_curve
    }

    /// Fixed data-set-2 times discarded because the true warp maps them
    /// outside the range of `m`.
    pub fn dropped_fixed_times(&self) -> usize {
        self.dropped_fixed
    }

    /// The pair of data sets of run `run_index`. Identical for identical
    /// `(seed, run_index)` regardless of which other runs were generated.
    pub fn generate_pair(&self, run_index: u64) -> Result<(TimeSeries, TimeSeries)> {
        let mut rng = stream_rng(self.spec.seed, run_index + 1);
        let range = self.mean_curve.time_range();
        let (times1, times2) = match (&self.fixed_times1, &self.fixed_times2) {
            (Some(a), Some(b)) => (a.clone(), b.clone()),
            _ => {
                let t1 = draw_sorted(&mut rng, self.spec.n1, |r| Some(r.random_range(range.lo..=range.hi)))?;
                let (tw, dom) = (&self.true_warp, self.warp_domain);
                let t2 = draw_sorted(&mut rng, self.spec.n2, |r| {
                    let s = r.random_range(range.lo..=range.hi);
                    admissible(tw, dom, range, s).then_some(s)
                })?;
                (t1, t2)
            }
        };
        let sd = self.spec.noise_sd;
        let mut noise = || sd * rng.sample::<f64, _>(StandardNormal);
        let values1 = times1
            .iter()
            .map(|&t| Ok(self.mean_curve.interp_linear(t)? + noise()))
            .collect::<Result<Vec<_>>>()?;
        let values2 = times2
            .iter()
            .map(|&s| {
                let warped = self.true_warp.evaluate(s)?;
                let m = self
                    .mean_curve
                    .interp_linear(warped)
                    .map_err(|_| Error::DomainMismatch(format!("g0({s}) = {warped} leaves the base range")))?;
                Ok(m + noise())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((TimeSeries::new(times1, values1)?, TimeSeries::new(times2, values2)?))
    }

    /// The uniform grid over [`evaluation_domain`](Self::evaluation_domain).
    pub fn evaluation_grid(&self, points: usize) -> Vec<f64> {
        self.evaluation_domain.uniform_grid(points)
    }
}

/// `{s in domain : g0(s) in range}`, an interval because `g0` is increasing.
/// Beyond it the data carry no information about the warp.
pub fn identifiable_region(tw: &TrueWarp, domain: Interval, range: Interval) -> Result<Interval> {
    let g = |s: f64| tw.evaluate(s);
    let (glo, ghi) = (g(domain.lo)?, g(domain.hi)?);
    if ghi < range.lo || glo > range.hi {
        return Err(Error::DomainMismatch("true warp maps its domain outside the base range".into()));
    }
    // brackets the crossing g(s) = target as (a, b) with g(a) < target <= g(b)
    let bracket = |target: f64| -> Result<(f64, f64)> {
        let (mut a, mut b) = (domain.lo, domain.hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if g(mid)? >= target {
                b = mid;
            } else {
                a = mid;
            }
        }
        Ok((a, b))
    };
    let lo = if glo >= range.lo { domain.lo } else { bracket(range.lo)?.1 };
    let hi = if ghi <= range.hi { domain.hi } else { bracket(range.hi)?.0 };
    Ok(Interval::new(lo, hi))
}

fn admissible(tw: &TrueWarp, domain: Interval, range: Interval, s: f64) -> bool {
    domain.contains(s) && tw.evaluate(s).is_ok_and(|g| range.contains(g))
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `n` distinct accepted draws, sorted. Gives up after a generous budget of
/// rejections.
fn draw_sorted(
    rng: &mut ChaCha20Rng,
    n: usize,
    mut draw: impl FnMut(&mut ChaCha20Rng) -> Option<f64>,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n);
    let budget = 1000 * n;
    let mut attempts = 0;
    while out.len() < n {
        attempts += 1;
        if attempts > budget {
            return Err(Error::DomainMismatch(
                "rejection sampling could not find admissible times".into(),
            ));
        }
        if let Some(s) = draw(rng) {
            out.push(s);
            if out.len() == n {
                out.sort_by(f64::total_cmp);
                out.dedup();
            }
        }
    }
    Ok(out)
}

/// Free-function form of [`PreparedScenario::generate_pair`].
pub fn generate_pair(spec: &ScenarioSpec, run_index: u64) -> Result<(TimeSeries, TimeSeries)> {
    PreparedScenario::new(spec.clone())?.generate_pair(run_index)
}

/// Slope range of the search class in studies. Both true warps have slopes
/// well inside it (roughly 0.53 to 1.52).
pub const STUDY_SLOPE_BOUNDS: SlopeBounds = SlopeBounds::new(0.5, 2.0);

/// How each run's pair is registered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub knots: usize,
    pub kernel1: KernelSpec,
    pub kernel2: KernelSpec,
    /// Fixed bandwidths; `None` applies the default rule to each pair.
    pub bandwidths: Option<Bandwidths>,
    pub optimizer: OptimizerConfig,
    pub grid_points: usize,
}

impl EstimatorConfig {
    pub fn for_scenario(scenario: Scenario) -> Self {
        Self {
            knots: scenario.default_knots(),
            kernel1: KernelSpec::Gaussian,
            kernel2: KernelSpec::Gaussian,
            bandwidths: None,
            // the designs keep g0 of every admissible data-set-2 time inside
            // the range of m, so the class may assume the same
            optimizer: OptimizerConfig {
                slope_bounds: Some(STUDY_SLOPE_BOUNDS),
                contain: true,
                ..OptimizerConfig::default()
            },
            grid_points: IMSE_GRID_POINTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_index: u64,
    pub result: Option<RegistrationResult>,
    /// Estimated warp on the evaluation grid.
    pub estimate: Option<Vec<f64>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub runs: Vec<RunRecord>,
    pub summary: StudySummary,
    pub failures: usize,
}

impl StudyResult {
    /// Supremum-norm error of each successful run on the evaluation grid.
    pub fn sup_errors(&self) -> Vec<f64> {
        self.runs
            .iter()
            .filter_map(|r| r.estimate.as_ref())
            .map(|e| {
                e.iter()
                    .zip(&self.summary.truth)
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            })
            .collect()
    }
}

/// Registers one generated pair and evaluates the estimate on the grid.
pub fn run_once(
    prepared: &PreparedScenario,
    estimator: &EstimatorConfig,
    run_index: u64,
) -> Result<(RegistrationResult, Vec<f64>)> {
    let (d1, d2) = prepared.generate_pair(run_index)?;
    let bandwidths = match estimator.bandwidths {
        Some(b) => b,
        None => Bandwidths::default_for(&d1, &d2)?,
    };
    let cfg = AlignmentConfig {
        kernel1: estimator.kernel1,
        kernel2: estimator.kernel2,
        ..AlignmentConfig::gaussian(bandwidths)
    };
    let opt = OptimizerConfig {
        domain: Some(prepared.warp_domain()),
        ..estimator.optimizer.clone()
    };
    let result = register(&d1, &d2, estimator.knots, &cfg, &opt)?;
    let estimate = prepared
        .evaluation_grid(estimator.grid_points)
        .iter()
        .map(|&t| result.warp.evaluate(t))
        .collect::<Result<Vec<_>>>()?;
    Ok((result, estimate))
}

/// Runs `spec.runs` independent replications and summarizes the estimates.
///
/// Runs execute on the current rayon pool; results are collected in run
/// order so the summary does not depend on the number of threads. Failed
/// runs are recorded and excluded from the summary.
pub fn run_study(spec: &ScenarioSpec, estimator: &EstimatorConfig) -> Result<StudyResult> {
    let prepared = PreparedScenario::new(spec.clone())?;
    let runs: Vec<RunRecord> = (0..spec.runs as u64)
        .into_par_iter()
        .map(|i| match run_once(&prepared, estimator, i) {
            Ok((result, estimate)) => RunRecord {
                run_index: i,
                result: Some(result),
                estimate: Some(estimate),
                error: None,
            },
            Err(e) => RunRecord {
                run_index: i,
                result: None,
                estimate: None,
                error: Some(format!("{}: {e}", e.code())),
            },
        })
        .collect();
    let estimates: Vec<Vec<f64>> = runs.iter().filter_map(|r| r.estimate.clone()).collect();
    let failures = runs.len() - estimates.len();
    if estimates.is_empty() {
        let first = runs.iter().find_map(|r| r.error.clone()).unwrap_or_default();
        return Err(Error::InvalidConfig(format!("every run failed; first error: {first}")));
    }
    let grid = prepared.evaluation_grid(estimator.grid_points);
    let truth = grid
        .iter()
        .map(|&t| prepared.true_warp().evaluate(t))
        .collect::<Result<Vec<_>>>()?;
    let summary = StudySummary::from_estimates(prepared.evaluation_domain(), truth, &estimates)?;
    Ok(StudyResult {
        runs,
        summary,
        failures,
    })
}

/// Number of points in the bundled base curve.
pub const SYNTHETIC_BASE_POINTS: usize = 283;
/// Time range of the bundled base curve.
pub const SYNTHETIC_RANGE: Interval = Interval { lo: 2.3, hi: 414.1 };
const SYNTHETIC_MEAN: f64 = 232.0;
const SYNTHETIC_SD: f64 = 28.7;

/// Bundled stand-in for an ice-core CO2 record: 283 irregularly spaced
/// points over `[2.3, 414.1]`, sawtooth glacial cycles (sharp rise, slow
/// decline) with secondary features, standardized to mean 232 and SD 28.7.
pub fn synthetic_base_curve() -> TimeSeries {
    synthetic_base_curve_sized(SYNTHETIC_BASE_POINTS)
}

/// The bundled base curve sampled at `points` (>= 2) irregular times.
pub fn synthetic_base_curve_sized(points: usize) -> TimeSeries {
    let points = points.max(2);
    let r = SYNTHETIC_RANGE;
    let spacing = r.length() / (points - 1) as f64;
    let times: Vec<f64> = (0..points)
        .map(|k| {
            let jitter = if k == 0 || k == points - 1 {
                0.0
            } else {
                0.35 * spacing * (1.7 * k as f64).sin()
            };
            r.lo + k as f64 * spacing + jitter
        })
        .collect();
    let raw: Vec<f64> = times.iter().map(|&t| synthetic_profile(t)).collect();
    let n = raw.len() as f64;
    let mean = raw.iter().sum::<f64>() / n;
    let sd = (raw.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let values = raw
        .iter()
        .map(|v| SYNTHETIC_MEAN + SYNTHETIC_SD * (v - mean) / sd)
        .collect();
    TimeSeries::new(times, values).expect("synthetic base curve is valid")
}

/// Interglacial maxima: (age, amplitude, younger-side width, older-side width).
/// Age increases into the past, so the sharp edge of each sawtooth is on the
/// older side.
const INTERGLACIALS: [(f64, f64, f64, f64); 5] = [
    (8.0, 85.0, 9.0, 5.0),
    (128.0, 105.0, 28.0, 5.5),
    (240.0, 90.0, 22.0, 6.0),
    (325.0, 110.0, 30.0, 5.0),
    (405.0, 95.0, 20.0, 6.5),
];
/// Secondary features: (age, amplitude, width).
const STADIALS: [(f64, f64, f64); 9] = [
    (45.0, 22.0, 6.0),
    (70.0, -14.0, 5.0),
    (102.0, 26.0, 5.0),
    (175.0, 18.0, 7.0),
    (200.0, 30.0, 6.0),
    (270.0, -12.0, 5.0),
    (290.0, 24.0, 8.0),
    (355.0, 20.0, 6.0),
    (380.0, -10.0, 4.0),
];

/// Persistent orbital-band variability: (period, amplitude, phase).
const ORBITAL: [(f64, f64, f64); 2] = [(23.0, 7.0, 0.4), (41.0, 6.0, 1.3)];

fn synthetic_profile(t: f64) -> f64 {
    let cycles: f64 = INTERGLACIALS
        .iter()
        .map(|&(age, amp, young, old)| {
            let w = if t < age { young } else { old };
            amp * (-0.5 * ((t - age) / w).powi(2)).exp()
        })
        .sum();
    let minor: f64 = STADIALS
        .iter()
        .map(|&(age, amp, w)| amp * (-0.5 * ((t - age) / w).powi(2)).exp())
        .sum();
    let orbital: f64 = ORBITAL
        .iter()
        .map(|&(period, amp, phase)| amp * (std::f64::consts::TAU * t / period + phase).sin())
        .sum();
    185.0 + cycles + minor + orbital
}

/// Reads a base curve from disk, falling back to the bundled synthetic one.
pub fn load_base_or_synthetic(path: Option<&std::path::Path>) -> Result<TimeSeries> {
    match path {
        Some(p) => TimeSeries::read_csv(p, DedupePolicy::Average),
        None => Ok(synthetic_base_curve()),
    }
}
