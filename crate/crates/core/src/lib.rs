//! Constructive solutions of one-dimensional initial-boundary value problems
//!
//! ```text
//! ∂t(ρθ) + ∂x(bρθ) = 0   on ]0,T[ × ]α,β[
//! ```
//!
//! where `b` is bounded and `ρ ≥ 0` solves the continuity equation with `b`.
//! Solutions are built from level sets of the potential `Q` (`∂xQ = ρ`,
//! `∂tQ = −bρ`), monotone envelopes of its boundary values, and weak
//! characteristic curves. A mollified smooth-transport solver is kept as an
//! independent reference.

// `!(a >= b)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod characteristics;
pub mod criteria;
pub mod envelope;
pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod oracle;
mod par;
pub mod potential;
pub mod profile;
pub mod solver;

pub use error::{Error, Result};
pub use field::{builtin, builtin_labels, builtin_scenarios, sample_scenario, FieldPair, Scenario};
pub use grid::SpaceTimeGrid;

pub use characteristics::{level_curve, CharCurve};
pub use potential::{build_potential, Potential, Side};
pub use profile::{BoundaryData, Profile};
pub use solver::{solve, Solution};
