//! Exact construction and certified evaluation of a singular weighted
//! dyadic cascade measure on [-1, 1), together with the analyses that
//! exhibit its non-doubling, porosity and flat blow-up behavior.

pub mod dd;
pub mod dyadic;
pub mod error;
pub mod expint;
pub mod logpos;
pub mod oracle;
pub mod quad;
pub mod real;
pub mod analysis;
pub mod blowup;
pub mod checks;
pub mod cascade;
pub mod weight;

pub use dd::Dd;
pub use dyadic::{DyadicRational, IntervalD};
pub use error::{CoreError, Result};
pub use logpos::{log_sum, LogPos};
pub use real::Real;

/// The high-precision scalar backing every certified logarithm.
pub type LnScalar = Dd;

/// A positive quantity stored in log domain at full precision.
pub type LogPositive = LogPos<Dd>;
