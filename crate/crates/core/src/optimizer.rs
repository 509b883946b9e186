//! Steepest-ascent maximization of the alignment measure over the warp class.
//!
//! Each iteration moves the knot values along the (optionally
//! preconditioned) gradient, repairs monotonicity, and accepts the step only
//! if it satisfies the Armijo sufficient-increase condition; otherwise the
//! step is shrunk geometrically. Accepted objective values are therefore
//! non-decreasing.

use serde::{Deserialize, Serialize};

use crate::alignment::{AlignmentConfig, AlignmentProblem, AlignmentValue};
use crate::error::{Error, Result};
use crate::landmarks::{self, MatchScale, DEFAULT_PROMINENCE_FRAC};
use crate::series::{common_time_range, Interval, TimeSeries};
use crate::warp::{LinearSplineWarp, DEFAULT_MARGIN};

/// Relative gradient norm below which the objective is treated as flat.
const PLATEAU_RATIO: f64 = 1e-14;
/// Smallest trial displacement, as a fraction of the knot spacing.
const MIN_DISPLACEMENT: f64 = 1e-10;

/// Starting point of the ascent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// Match peaks and valleys of the two data sets.
    Landmarks { prominence_frac: f64 },
    Identity,
    /// A caller-supplied warp with the requested knot count and domain.
    Provided(LinearSplineWarp),
}

impl Default for Init {
    fn default() -> Self {
        Init::Landmarks {
            prominence_frac: DEFAULT_PROMINENCE_FRAC,
        }
    }
}

/// Segment slopes allowed in the search class.
///
/// Bounding slopes away from zero and infinity keeps the class compact. It
/// also rules out collapsing a stretch of data set 2 onto a single time, or
/// stretching it over a sparse region, which can otherwise raise `L_n`
/// through reweighting rather than better matching.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeBounds {
    pub min: f64,
    pub max: f64,
}

impl SlopeBounds {
    pub const fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub max_iterations: usize,
    /// Stop once an accepted step changes `L_n` by less than this, relatively.
    pub rel_tolerance: f64,
    pub armijo_c: f64,
    pub backtrack_factor: f64,
    /// Largest knot displacement of a trial step, in units of `h1`.
    pub initial_step: f64,
    pub monotone_margin: f64,
    /// Restrict the class to warps whose segment slopes lie in this range.
    pub slope_bounds: Option<SlopeBounds>,
    /// Restrict the class to warps mapping the observed time span of data
    /// set 2 into the time range of data set 1.
    pub contain: bool,
    pub init: Init,
    /// Divide each gradient component by the knot's share of basis mass.
    pub precondition: bool,
    /// Warp domain; defaults to the time range of data set 2.
    pub domain: Option<Interval>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            rel_tolerance: 1e-8,
            armijo_c: 1e-4,
            backtrack_factor: 0.5,
            initial_step: 1.0,
            monotone_margin: DEFAULT_MARGIN,
            slope_bounds: None,
            contain: false,
            init: Init::default(),
            precondition: true,
            domain: None,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(what.to_string()));
        if !(self.rel_tolerance >= 0.0) {
            return bad("rel_tolerance must be non-negative");
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return bad("armijo_c must lie in (0, 1)");
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return bad("backtrack_factor must lie in (0, 1)");
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return bad("initial_step must be positive");
        }
        if !(self.monotone_margin > 0.0 && self.monotone_margin < 1.0) {
            return bad("monotone_margin must lie in (0, 1)");
        }
        if let Some(b) = self.slope_bounds {
            if !(b.min > 0.0 && b.min <= 1.0 && b.max >= 1.0 && b.max.is_finite()) {
                return bad("slope bounds must satisfy 0 < min <= 1 <= max < inf");
            }
        }
        if let Init::Landmarks { prominence_frac } = self.init {
            if !(prominence_frac > 0.0 && prominence_frac <= 1.0) {
                return bad("prominence_frac must lie in (0, 1]");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Relative change of an accepted step fell below the tolerance.
    Tolerance,
    /// Gradient numerically zero.
    Plateau,
    /// Line search could not find an acceptable step.
    LineSearch,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegistrationResult {
    pub warp: LinearSplineWarp,
    pub initial_warp: LinearSplineWarp,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub plateau: bool,
    pub stop_reason: StopReason,
    pub final_value: AlignmentValue,
    pub warnings: Vec<String>,
}

impl RegistrationResult {
    /// Data set 2 with its observation times mapped through the estimate.
    pub fn registered(&self, data2: &TimeSeries) -> Result<TimeSeries> {
        data2.map_times(|s| self.warp.evaluate(s))
    }
}

/// Estimates the warp aligning `data2` to `data1` with `knot_count` knots.
pub fn register(
    data1: &TimeSeries,
    data2: &TimeSeries,
    knot_count: usize,
    cfg: &AlignmentConfig,
    opt: &OptimizerConfig,
) -> Result<RegistrationResult> {
    opt.validate()?;
    common_time_range(data1, data2)?;
    let domain = opt.domain.unwrap_or_else(|| data2.time_range());
    let r2 = data2.time_range();
    if r2.lo < domain.lo || r2.hi > domain.hi {
        return Err(Error::InvalidConfig(format!(
            "warp domain [{}, {}] does not cover data set 2 times [{}, {}]",
            domain.lo, domain.hi, r2.lo, r2.hi
        )));
    }
    let mut warnings = Vec::new();
    if !cfg.kernel1.is_everywhere_positive() || !cfg.kernel2.is_everywhere_positive() {
        warnings.push(format!(
            "kernels {}/{} are not bounded away from zero; the gradient may vanish away from the data",
            cfg.kernel1, cfg.kernel2
        ));
    }
    let problem = AlignmentProblem::new(data1, data2, *cfg)?;
    let margin = opt.monotone_margin;
    let class = SearchClass {
        margin,
        slopes: opt.slope_bounds,
        contain: opt.contain.then(|| (r2, data1.time_range())),
    };

    let initial = match &opt.init {
        Init::Identity => LinearSplineWarp::identity(domain, knot_count)?,
        Init::Provided(w) => {
            if w.knot_count() != knot_count || w.domain() != domain {
                return Err(Error::InvalidConfig(format!(
                    "provided warp has {} knots on [{}, {}], expected {} on [{}, {}]",
                    w.knot_count(),
                    w.domain().lo,
                    w.domain().hi,
                    knot_count,
                    domain.lo,
                    domain.hi
                )));
            }
            w.repaired(margin)
        }
        Init::Landmarks { prominence_frac } => {
            let from1 = landmarks::detect(data1, *prominence_frac);
            let from2 = landmarks::detect(data2, *prominence_frac);
            let matched = landmarks::match_landmarks(&from2, &from1, &MatchScale::from_series(data2, data1));
            landmarks::initial_warp(&matched, domain, knot_count, margin)?
        }
    };
    let identity = || class.project(&LinearSplineWarp::identity(domain, knot_count)?, domain.uniform_grid(knot_count));
    let initial = match class.project(&initial, initial.values().to_vec()) {
        Ok(w) if problem.measure(&w).is_ok() || matches!(opt.init, Init::Identity) => w,
        Ok(_) => {
            warnings.push("initial warp gave a vanishing denominator; restarted from the identity".into());
            identity()?
        }
        Err(_) => {
            warnings.push("initial warp could not be brought into the search class; restarted from the identity".into());
            identity()?
        }
    };
    let start_value = problem.measure(&initial).map_err(|e| match e {
        Error::ZeroDenominator { .. } => Error::ZeroDenominator { at_initial: true },
        other => other,
    })?;

    let scaling = if opt.precondition {
        basis_mass_scaling(&initial, data2)?
    } else {
        vec![1.0; knot_count]
    };

    let max_disp = opt.initial_step * cfg.bandwidths.h1();
    let min_disp = MIN_DISPLACEMENT * initial.spacing();
    let mut current = initial.clone();
    let mut value = start_value;
    let mut trace = vec![value.l_n];
    let mut iterations = 0;
    let mut disp = max_disp;
    let mut stop = StopReason::MaxIterations;

    while iterations < opt.max_iterations {
        let (_, grad) = problem.measure_and_gradient(&current)?;
        let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if grad_norm < PLATEAU_RATIO * value.l_n.abs() || grad_norm == 0.0 {
            stop = StopReason::Plateau;
            break;
        }
        let direction: Vec<f64> = grad.iter().zip(&scaling).map(|(g, s)| g * s).collect();
        let slope: f64 = grad.iter().zip(&direction).map(|(g, d)| g * d).sum();
        let dir_max = direction.iter().fold(0.0f64, |m, d| m.max(d.abs()));

        let mut trial_disp = disp;
        let accepted = loop {
            if trial_disp < min_disp {
                break None;
            }
            let alpha = trial_disp / dir_max;
            let moved: Vec<f64> = current
                .values()
                .iter()
                .zip(&direction)
                .map(|(c, d)| c + alpha * d)
                .collect();
            let Ok(candidate) = class.project(&current, moved) else {
                trial_disp *= opt.backtrack_factor;
                continue;
            };
            if let Ok(v) = problem.measure(&candidate) {
                if v.l_n >= value.l_n + opt.armijo_c * alpha * slope {
                    break Some((candidate, v, trial_disp));
                }
            }
            trial_disp *= opt.backtrack_factor;
        };
        let Some((next, next_value, used_disp)) = accepted else {
            stop = StopReason::LineSearch;
            break;
        };
        let change = (next_value.l_n - value.l_n) / value.l_n.abs().max(f64::MIN_POSITIVE);
        current = next;
        value = next_value;
        trace.push(value.l_n);
        iterations += 1;
        disp = (2.0 * used_disp).min(max_disp);
        if change < opt.rel_tolerance {
            stop = StopReason::Tolerance;
            break;
        }
    }

    let converged = stop != StopReason::MaxIterations;
    Ok(RegistrationResult {
        warp: current,
        initial_warp: initial,
        objective_trace: trace,
        iterations,
        converged,
        plateau: stop == StopReason::Plateau,
        stop_reason: stop,
        final_value: value,
        warnings,
    })
}

/// Projection of raw knot values onto the search class.
struct SearchClass {
    margin: f64,
    slopes: Option<SlopeBounds>,
    /// (data set 2 span, data set 1 range)
    contain: Option<(Interval, Interval)>,
}

impl SearchClass {
    fn project(&self, w: &LinearSplineWarp, values: Vec<f64>) -> Result<LinearSplineWarp> {
        let w = match self.slopes {
            Some(b) => w.with_values_slope_clamped(values, b.min, b.max)?,
            None => w.with_values_repaired(values, self.margin)?,
        };
        let Some((span, target)) = self.contain else {
            return Ok(w);
        };
        let (lo, hi) = (w.evaluate(span.lo)?, w.evaluate(span.hi)?);
        if lo >= target.lo && hi <= target.hi {
            return Ok(w);
        }
        // shift into the target if the image fits, otherwise shrink it onto it
        let values: Vec<f64> = if hi - lo <= target.length() {
            let shift = if lo < target.lo { target.lo - lo } else { target.hi - hi };
            w.values().iter().map(|v| v + shift).collect()
        } else {
            let ratio = target.length() / (hi - lo);
            w.values().iter().map(|v| target.lo + (v - lo) * ratio).collect()
        };
        let w = LinearSplineWarp::new(w.domain(), values)?;
        let (min_slope, max_slope) = w.slope_range();
        let slopes_ok = match self.slopes {
            Some(b) => min_slope >= b.min * (1.0 - 1e-9) && max_slope <= b.max * (1.0 + 1e-9),
            None => w.satisfies_margin(self.margin),
        };
        let tol = 1e-9 * target.length();
        let (lo, hi) = (w.evaluate(span.lo)?, w.evaluate(span.hi)?);
        if !slopes_ok || lo < target.lo - tol || hi > target.hi + tol {
            return Err(Error::InvalidWarp("no warp in the search class satisfies the containment".into()));
        }
        Ok(w)
    }
}

/// `mean_mass / mass_k`, where `mass_k` sums knot `k`'s hat function over the
/// data-set-2 times. Knots without any mass keep unit scaling (their
/// gradient component is zero anyway).
fn basis_mass_scaling(warp: &LinearSplineWarp, data2: &TimeSeries) -> Result<Vec<f64>> {
    let k = warp.knot_count();
    let mut mass = vec![0.0; k];
    for &s in data2.times() {
        let (left, w) = warp.basis_pair(s)?;
        mass[left] += w;
        if left + 1 < k {
            mass[left + 1] += 1.0 - w;
        }
    }
    let positive: Vec<f64> = mass.iter().copied().filter(|&m| m > 0.0).collect();
    let mean = positive.iter().sum::<f64>() / positive.len().max(1) as f64;
    Ok(mass.iter().map(|&m| if m > 0.0 { mean / m } else { 1.0 }).collect())
}
