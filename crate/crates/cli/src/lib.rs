//! Scenario files, experiment commands and artifact writers for the `sddm` binary.

// `!(x > 0.0)` style checks are there to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundcheck;
pub mod commands;
pub mod report;
pub mod scenario_file;
pub mod svg;
