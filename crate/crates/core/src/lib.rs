//! Feature-sensitive registration of one functional data set against another.
//!
//! The estimated time transformation maximizes a kernel measure of alignment
//! ([`alignment`]) over strictly increasing linear splines on equidistant
//! knots ([`warp`]), by steepest ascent ([`optimizer`]) started from an
//! automatic peak/valley matching ([`landmarks`]). [`simulate`] and
//! [`metrics`] provide the Monte Carlo evaluation design and the summary
//! statistics used to assess the estimator.

pub mod alignment;
pub mod error;
pub mod kernel;
pub mod landmarks;
pub mod metrics;
pub mod optimizer;
pub mod series;
pub mod simulate;
pub mod warp;

pub use alignment::{AlignmentConfig, AlignmentProblem, AlignmentValue};
pub use error::{Error, Result};
pub use kernel::{Bandwidths, KernelSpec};
pub use landmarks::{Landmark, LandmarkKind, LandmarkMatch};
pub use optimizer::{Init, OptimizerConfig, RegistrationResult, SlopeBounds};
pub use series::{DedupePolicy, Interval, TimeSeries};
pub use warp::LinearSplineWarp;
