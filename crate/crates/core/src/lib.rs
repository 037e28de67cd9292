//! Reference-governor navigation with a state-dependent directional metric.
//!
//! The robot is a PD-stabilized double integrator chasing a virtual governor.
//! The governor advances along a piecewise-linear path only as far as a local
//! safe zone allows; that zone is an ellipsoid measured in a metric which is
//! cheap along the direction of motion and expensive across it.

// `!(x > 0.0)` style checks are there to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod environment;
pub mod error;
pub mod governor;
pub mod metric;
pub mod planner;
pub mod simulator;

pub use error::{Error, Result};
