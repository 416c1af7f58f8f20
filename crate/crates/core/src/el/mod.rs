//! Semiparametric empirical likelihood for the mean.
//!
//! Observations beyond the tail thresholds follow Pareto-type tails with
//! parametric scale and index; the midrange carries free point masses. The
//! mean constraint is profiled out to a scalar equation in each tail index.

mod interval;
mod profile;
mod solve;

pub use interval::{el_interval, ElOptions, IntervalOptions};
pub use profile::{
    log_lik_l0, tail_mass_g1, tail_mean_g2, ElProblem, TailParams, TailPiece, Thresholds,
};
pub use solve::{
    el_point_estimate, el_ratio, solve_constrained, ConstrainedFit, ElProfile, Residuals,
    SolverOptions, L_FLOOR,
};
