//! Representative-day aggregation and transmission/storage co-planning.
//!
//! The crate reduces a full 8760-hour planning year to a handful of weighted
//! representative days while keeping the extreme net-load day intact, links
//! the original calendar back to those days as sequential blocks so that
//! long-duration storage can carry energy across them, assembles the
//! co-planning MILP, drives an external solver, and quantifies the error of
//! the reduced model against the full-year benchmark.
//!
//! Start with the runnable programs under `examples/` — each one exercises a
//! single capability end to end on the bundled synthetic data set.

pub mod aggregate;
pub mod cli;
pub mod error;
pub mod evaluate;
pub mod ingest;
pub mod linking;
pub mod milp;
pub mod planner;
pub mod plot;
pub mod solver;
pub mod synthetic;
pub mod system;

pub use error::{Error, Result};
