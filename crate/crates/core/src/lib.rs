//! Correlation sums, local correlation entropies and topological-entropy
//! estimates for orbits of dynamical systems.
//!
//! Trajectories live in a [`space::MetricSpace`]; the [`correlation`] engine
//! counts close pairs along Bowen windows, with accelerated paths for shift
//! spaces and the real line.

pub mod cli;
pub mod correlation;
pub mod error;
pub mod graphs;
pub mod grillenberger;
pub mod interval;
pub mod invariants;
pub mod space;
pub mod symbolic;

pub use error::{Error, Result};
