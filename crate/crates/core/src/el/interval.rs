//! Inverting `l(mu)` against a chi-square cutoff.

use super::profile::ElProblem;
use super::solve::{ElProfile, SolverOptions};
use crate::baselines::studentized_stats;
use crate::error::{Error, Result, Side};
use crate::interval::{check_level, ConfidenceInterval, Method};
use crate::root::{refine, Bracket};
use crate::special::{chi2_quantile, normal_two_sided};
use crate::tail_fit::{SortedSample, TailWindow};
use serde::{Deserialize, Serialize};

/// Search settings for the interval endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalOptions {
    /// Initial search distance, in normal-interval half-widths.
    pub initial_span: f64,
    /// Times the search distance may double before a side is unbounded.
    /// With `allow_unbounded` the search instead runs on until `l` crosses
    /// the cutoff, the mean turns infeasible, or the probe overflows.
    pub max_doublings: u32,
    /// Endpoint tolerance relative to its distance from the point estimate.
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Report a side on which `l` never reaches the cutoff as an infinite
    /// endpoint instead of an error.
    pub allow_unbounded: bool,
}

impl Default for IntervalOptions {
    fn default() -> Self {
        Self {
            initial_span: 4.0,
            max_doublings: 6,
            rel_tol: 1e-8,
            max_iter: 200,
            allow_unbounded: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ElOptions {
    pub solver: SolverOptions,
    pub interval: IntervalOptions,
}

struct Endpoint {
    x: f64,
    /// Profile at the endpoint, or at the farthest point searched when the
    /// side is unbounded.
    profile: ElProfile,
    /// `l` jumps from below the cutoff to infeasible here instead of
    /// crossing it.
    at_boundary: bool,
}

impl<'a> ElProblem<'a> {
    /// `{mu : l(mu) <= chi2_1(level)}` as `[lower, upper]`.
    pub fn interval(&self, level: f64, opts: &ElOptions) -> Result<ConfidenceInterval> {
        check_level(level)?;
        let cutoff = chi2_quantile(level, 1)?;
        let mu_hat = self.el_point_estimate()?;
        let at_hat = self.el_ratio(mu_hat, &opts.solver)?;
        if !at_hat.l_value.is_finite() {
            return Err(Error::InfeasibleMean {
                mu: mu_hat,
                reason: "point estimate is infeasible".into(),
            });
        }
        let (_, s) = studentized_stats(self.sample().values())?;
        let n = self.sample().len() as f64;
        let scale = normal_two_sided(level)? * s / n.sqrt();
        if !(scale > 0.0) {
            return Err(Error::Degenerate("zero sample standard deviation".into()));
        }
        let lower = self.endpoint(mu_hat, at_hat.l_value, -1.0, scale, cutoff, opts)?;
        let upper = self.endpoint(mu_hat, at_hat.l_value, 1.0, scale, cutoff, opts)?;

        let fit = self.unconstrained();
        let mut ci = ConfidenceInterval::new(lower.x, upper.x, level, Method::El)
            .with("alpha_bar_r", fit.alpha_r)
            .with("c_bar_r", fit.c_r)
            .with("mu_hat", mu_hat)
            .with("cutoff", cutoff)
            .with("l_lower", lower.profile.l_value)
            .with("l_upper", upper.profile.l_value)
            .with("lower_at_boundary", f64::from(u8::from(lower.at_boundary)))
            .with("upper_at_boundary", f64::from(u8::from(upper.at_boundary)));
        if let (Some(a), Some(c)) = (fit.alpha_l, fit.c_l) {
            ci = ci.with("alpha_bar_l", a).with("c_bar_l", c);
        }
        let mut worst = 0.0f64;
        for p in [&lower.profile, &upper.profile] {
            if let Some(f) = &p.fit {
                let r = f.residuals;
                worst = worst
                    .max(r.h.abs())
                    .max(r.h_bar.unwrap_or(0.0).abs())
                    .max(r.mass.abs())
                    .max(r.mean.abs());
            }
        }
        Ok(ci.with("max_residual", worst))
    }

    fn endpoint(
        &self,
        mu_hat: f64,
        l_hat: f64,
        direction: f64,
        scale: f64,
        cutoff: f64,
        opts: &ElOptions,
    ) -> Result<Endpoint> {
        let io = opts.interval;
        let mut g = |mu: f64| -> Result<Option<f64>> {
            let p = self.el_ratio(mu, &opts.solver)?;
            Ok(p.l_value.is_finite().then_some(p.l_value - cutoff))
        };
        let mut near = (mu_hat, l_hat - cutoff);
        let mut near_profile = None;
        let mut reach = io.initial_span * scale;
        let mut doublings = 0;
        loop {
            let x = mu_hat + direction * reach;
            if !x.is_finite() || (!io.allow_unbounded && doublings > io.max_doublings) {
                break;
            }
            doublings += 1;
            let probe = self.el_ratio(x, &opts.solver)?;
            let far = probe.l_value.is_finite().then_some(probe.l_value - cutoff);
            match far {
                Some(v) if v < 0.0 => {
                    near = (x, v);
                    near_profile = Some(probe);
                    reach *= 2.0;
                }
                far => {
                    let root = refine(
                        &mut g,
                        Bracket {
                            near: near.0,
                            f_near: near.1,
                            far: x,
                            f_far: far,
                        },
                        io.rel_tol * reach,
                        io.max_iter,
                    )?;
                    let x = if root.hit_boundary {
                        self.last_feasible(root.x, root.other, &opts.solver)?
                    } else {
                        root.x
                    };
                    let profile = self.el_ratio(x, &opts.solver)?;
                    return Ok(Endpoint {
                        x,
                        profile,
                        at_boundary: root.hit_boundary,
                    });
                }
            }
        }
        if io.allow_unbounded {
            if let Some(profile) = near_profile {
                return Ok(Endpoint {
                    x: direction * f64::INFINITY,
                    profile,
                    at_boundary: false,
                });
            }
        }
        let side = if direction < 0.0 { Side::Lower } else { Side::Upper };
        Err(Error::UnboundedSide {
            side,
            cutoff,
            reached: near.0,
        })
    }
}

impl ElProblem<'_> {
    /// Bisects between a feasible and an infeasible mean down to adjacent
    /// floats, so the result does not depend on the starting bracket.
    fn last_feasible(&self, mut inside: f64, mut outside: f64, opts: &SolverOptions) -> Result<f64> {
        loop {
            let mid = 0.5 * (inside + outside);
            if mid == inside || mid == outside {
                return Ok(inside);
            }
            if self.el_ratio(mid, opts)?.l_value.is_finite() {
                inside = mid;
            } else {
                outside = mid;
            }
        }
    }
}

/// Empirical likelihood interval for the mean with default options.
pub fn el_interval(sample: &SortedSample, window: TailWindow, level: f64) -> Result<ConfidenceInterval> {
    ElProblem::new(sample, window)?.interval(level, &ElOptions::default())
}
