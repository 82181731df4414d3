//! Partial metric spaces and coupled fixed points.
//!
//! The crate provides validated partial metrics ([`space`]), sample-based
//! axiom checks ([`axioms`]), three contractive conditions for coupled maps
//! ([`contraction`]), and a coupled Picard solver that emits convergence
//! certificates ([`solver`]). Maps can be written as small arithmetic
//! expressions ([`expr`]) and whole problems described in flat config files
//! ([`config`]) driven from the command line ([`cli`]).

pub mod axioms;
pub mod cli;
pub mod config;
pub mod contraction;
pub mod error;
pub mod expr;
pub mod map;
pub mod sampling;
pub mod solver;
pub mod space;

pub use contraction::{ContractionSpec, Mode};
pub use error::{Error, Result};
pub use map::CoupledMap;
pub use solver::{solve, ConvergenceCertificate, IterationTrace, SolveConfig, Status};
pub use space::{make_space, BaseMetric, Carrier, PartialMetric, PartialMetricSpace, Point, Table};
