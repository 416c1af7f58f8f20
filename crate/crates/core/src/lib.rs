//! Confidence intervals for the mean of heavy-tailed data.
//!
//! The main method is a semiparametric empirical likelihood that models both
//! extreme tails as Pareto-type and leaves the midrange nonparametric. Normal
//! and subsample-bootstrap intervals are provided for comparison, together
//! with a Monte Carlo harness for coverage studies.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod el;
pub mod error;
pub mod harness;
pub mod interval;
pub mod io;
pub mod rng;
pub mod root;
pub mod special;
pub mod tail_fit;
pub mod tail_model;

pub use error::{Error, Result, Side};
pub use interval::{ConfidenceInterval, Method};
pub use tail_fit::{SortedSample, TailMode, TailWindow};
pub use tail_model::HeavyTailLaw;
