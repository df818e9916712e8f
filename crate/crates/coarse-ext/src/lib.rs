//! Cover statistics, nerves, and verified Lipschitz extension algorithms on
//! finite metric spaces.
//!
//! The crate treats claimed bounds as runtime assertions: extension pipelines
//! and cover constructions re-verify their contracts exhaustively before
//! returning, and refuse to hand back unverified results.

#![allow(clippy::needless_range_loop)]

pub mod asdim;
pub mod cli;
pub mod cover;
pub mod extension;
pub mod function;
pub mod io;
pub mod metric;
pub mod nerve;
pub mod oscillation;
pub mod plot;
pub mod simplex;

pub use cover::{Cover, ColoredCover, LebValue};
pub use function::{PointFunction, TargetMetric};
pub use metric::{FiniteMetricSpace, PointId, TOL};
pub use simplex::SimplexPoint;
