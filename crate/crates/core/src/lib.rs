//! Quasi-Monte Carlo integration with `(M, mu)`-uniform point sets.
//!
//! The crate models a probability space (finite atomic, or the unit cube with
//! Lebesgue measure), a finite partition `M = {M_1, ..., M_k}` of it, and an
//! essentially bounded integrand represented as a base function plus a finite
//! set of spike overrides. On such instances it
//!
//! * builds point sets whose per-cell node counts are exactly `N * mu(M_j)`,
//! * computes the three worst-case error bounds for those point sets
//!   (twice the L-infinity distance to the piecewise constants, the maximum
//!   essential oscillation, and the measure-weighted oscillation), and
//! * checks them against ground truth, exhaustively on finite spaces.
//!
//! Essential extrema ignore spikes, so every bound is invariant under changes
//! of the integrand on a null set.

pub mod bounds;
pub mod error;
pub mod estimator;
pub mod instance;
pub mod measure;
pub mod oracle;
pub mod points;
pub mod sum;

pub use bounds::{bound_set, BoundSet, CellExtrema, SpanCoefficients};
pub use error::{Error, Result};
pub use estimator::{bound_report, qmc_estimate, BoundReport};
pub use measure::{
    Atom, Base, BoxCell, Cell, EssentialRange, FunctionModel, Partition, Point, RangeMode, Space, Spike, Split,
};
pub use oracle::{FiniteInstance, VerificationVerdict};
pub use points::{Configuration, ConfigurationStream, Placement, UniformPointSet};

/// Absolute tolerance for equality of reals throughout the crate.
pub const TOLERANCE: f64 = 1e-12;

/// Slack allowed when comparing a realized error against a bound.
pub const BOUND_SLACK: f64 = 1e-9;
