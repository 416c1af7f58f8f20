//! Constrained maximisation at fixed mean and the likelihood ratio `l(mu)`.

use super::profile::{ElProblem, TailParams};
use crate::error::{Error, Result};
use crate::root::{refine, Bracket};
use crate::tail_fit::{SortedSample, TailWindow};
use serde::{Deserialize, Serialize};

/// Numerical settings for the profile solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Smallest tail index ever evaluated.
    pub alpha_floor: f64,
    /// Bracket doublings attempted before giving up.
    pub bracket_expansions: u32,
    /// Grid points scanned per bracket segment when locating the sign change
    /// closest to the Hill estimate.
    pub scan_points: usize,
    /// Relative bracket width at which the tail-index root is accepted.
    pub alpha_rel_tol: f64,
    /// Two-tail alternation: joint change in the indices that stops it.
    pub outer_tol: f64,
    pub max_outer: usize,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            alpha_floor: 1.0 + 1e-6,
            bracket_expansions: 4,
            scan_points: 16,
            alpha_rel_tol: 4.0 * f64::EPSILON,
            outer_tol: 1e-10,
            max_outer: 100,
            max_iter: 200,
        }
    }
}

/// Residuals of the first-order conditions at a constrained solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// Right profile equation.
    pub h: f64,
    /// Left profile equation (two-tail only).
    pub h_bar: Option<f64>,
    /// `sum p_i - g1`.
    pub mass: f64,
    /// `sum p_i w_i`.
    pub mean: f64,
}

/// Maximiser of the semiparametric likelihood subject to the mean `mu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedFit {
    pub mu: f64,
    pub alpha_r: f64,
    pub alpha_l: Option<f64>,
    pub c_r: f64,
    pub c_l: Option<f64>,
    pub lambda1: f64,
    pub lambda2_r: f64,
    pub lambda2_l: Option<f64>,
    pub g1: f64,
    /// `w_i` over the midrange, ascending in `X_i`.
    pub weights: Vec<f64>,
    pub p_hat: Vec<f64>,
    pub converged: bool,
    pub outer_iterations: usize,
    pub residuals: Residuals,
}

impl ConstrainedFit {
    pub fn params(&self) -> TailParams {
        use super::profile::TailPiece;
        TailParams {
            right: TailPiece {
                c: self.c_r,
                alpha: self.alpha_r,
            },
            left: self
                .alpha_l
                .zip(self.c_l)
                .map(|(alpha, c)| TailPiece { c, alpha }),
        }
    }
}

/// `l(mu)` with the fit that produced it; `fit` is `None` and `l_value` is
/// `+inf` when no positive midrange weights reach `mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElProfile {
    pub mu: f64,
    pub l_value: f64,
    pub fit: Option<ConstrainedFit>,
}

/// Lower limit for `l(mu)` accepted as a numerical zero.
pub const L_FLOOR: f64 = -1e-8;

fn is_infeasible(e: &Error) -> bool {
    matches!(e, Error::InfeasibleMean { .. } | Error::InfeasibleParameters(_))
}

/// Solves `f(alpha) = 0` starting from the Hill estimate `center`.
///
/// The mean multiplier vanishes at `center`, and `f` falls as the multiplier
/// grows. `orientation` is the sign of d(multiplier)/d(alpha) (+1 for the
/// right tail, -1 for the left), which fixes the side of `center` holding the
/// root. That side is scanned outward on a grid so the sign change closest to
/// `center` is refined; a feasibility boundary counts as a sign change.
fn solve_index<F>(mut f: F, center: f64, orientation: f64, mu: f64, opts: &SolverOptions) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let floor = opts.alpha_floor;
    if !(center > floor) {
        return Err(Error::ConstraintBoundary(format!(
            "Hill estimate {center} is not above {floor}; tail mean diverges"
        )));
    }
    let mut eval = |a: f64| -> Result<Option<f64>> {
        match f(a) {
            Ok(v) if v.is_finite() => Ok(Some(v)),
            Ok(_) => Ok(None),
            Err(e) if is_infeasible(&e) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let f0 = eval(center)?.ok_or_else(|| Error::InfeasibleMean {
        mu,
        reason: "infeasible at the Hill estimate".into(),
    })?;
    if f0 == 0.0 {
        return Ok(center);
    }
    let sign0 = f0.signum();
    let up = sign0 * orientation > 0.0;
    let x_tol = opts.alpha_rel_tol * center;

    let mut start = (center, f0);
    for expansion in 0..=opts.bracket_expansions {
        let reach = 2f64.powi(expansion as i32);
        let far = if up {
            center + center * reach
        } else {
            (center - 0.5 * center * reach).max(floor)
        };
        let mut near = start;
        let mut transition: Option<(f64, Option<f64>)> = None;
        let mut flips = 0usize;
        let mut last_sign = sign0;
        for i in 1..=opts.scan_points {
            let x = start.0 + (far - start.0) * i as f64 / opts.scan_points as f64;
            let v = eval(x)?;
            match v {
                Some(v) if v == 0.0 && transition.is_none() => return Ok(x),
                Some(v) if v.signum() == sign0 && transition.is_none() => near = (x, v),
                Some(v) => {
                    if v.signum() != last_sign {
                        flips += 1;
                        last_sign = v.signum();
                    }
                    if transition.is_none() {
                        transition = Some((x, Some(v)));
                    }
                }
                None => {
                    if transition.is_none() {
                        transition = Some((x, None));
                    }
                    break;
                }
            }
        }
        if let Some((far_x, far_v)) = transition {
            if flips > 1 {
                log::debug!(
                    "profile equation changes sign {flips} times near alpha = {center}; \
                     taking the root closest to the Hill estimate"
                );
            }
            let root = refine(
                &mut eval,
                Bracket {
                    near: near.0,
                    f_near: near.1,
                    far: far_x,
                    f_far: far_v,
                },
                x_tol,
                opts.max_iter,
            )?;
            if root.hit_boundary {
                return Err(Error::InfeasibleMean {
                    mu,
                    reason: format!(
                        "profile equation meets the feasibility boundary at alpha = {} without a root",
                        root.x
                    ),
                });
            }
            return Ok(root.x);
        }
        if !up && far <= floor {
            return Err(Error::ConstraintBoundary(format!(
                "no root of the profile equation above alpha = {floor} (mu = {mu})"
            )));
        }
        start = near;
    }
    Err(Error::NonConvergence(format!(
        "no sign change of the profile equation after {} bracket expansions (mu = {mu})",
        opts.bracket_expansions
    )))
}

impl<'a> ElProblem<'a> {
    /// Maximises the likelihood subject to the mean constraint at `mu`.
    pub fn solve_constrained(&self, mu: f64, opts: &SolverOptions) -> Result<ConstrainedFit> {
        if !mu.is_finite() {
            return Err(Error::Domain(format!("mean must be finite, got {mu}")));
        }
        let alpha_r_bar = self.fit.alpha_r;
        let (alpha_r, alpha_l, iterations, converged) = if let Some(alpha_l_bar) = self.fit.alpha_l
        {
            let mut alpha_l = alpha_l_bar;
            let mut alpha_r = alpha_r_bar;
            let mut converged = false;
            let mut iterations = 0;
            for it in 1..=opts.max_outer {
                iterations = it;
                let next_r = solve_index(
                    |a| self.h_hat(a, Some(alpha_l), mu),
                    alpha_r_bar,
                    1.0,
                    mu,
                    opts,
                )?;
                let next_l = solve_index(|a| self.h_bar(next_r, a, mu), alpha_l_bar, -1.0, mu, opts)?;
                let change = (next_r - alpha_r).abs() + (next_l - alpha_l).abs();
                alpha_r = next_r;
                alpha_l = next_l;
                if change <= opts.outer_tol {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::NonConvergence(format!(
                    "two-tail alternation did not settle within {} iterations (mu = {mu})",
                    opts.max_outer
                )));
            }
            (alpha_r, Some(alpha_l), iterations, converged)
        } else {
            let alpha_r = solve_index(|a| self.h_hat(a, None, mu), alpha_r_bar, 1.0, mu, opts)?;
            (alpha_r, None, 1, true)
        };
        self.assemble(mu, alpha_r, alpha_l, iterations, converged)
    }

    fn assemble(
        &self,
        mu: f64,
        alpha_r: f64,
        alpha_l: Option<f64>,
        outer_iterations: usize,
        converged: bool,
    ) -> Result<ConstrainedFit> {
        let point = self.point(alpha_r, alpha_l, mu)?;
        let weights: Vec<f64> = self.midrange().iter().map(|x| x - point.shift).collect();
        let mut p_hat = Vec::with_capacity(weights.len());
        for (&w, &x) in weights.iter().zip(self.midrange()) {
            let d = point.lambda1 + point.lambda2_r * w;
            if !(d > 0.0) {
                return Err(Error::InfeasibleMean {
                    mu,
                    reason: format!("non-positive weight denominator {d} at X = {x}"),
                });
            }
            p_hat.push(1.0 / d);
        }
        let h = self.h_with(mu, point.lambda1, point.lambda2_r, point.shift)?;
        let h_bar = match point.lambda2_l {
            Some(l2) => Some(self.h_with(mu, point.lambda1, l2, point.shift)?),
            None => None,
        };
        let mass = p_hat.iter().sum::<f64>() - point.g1;
        let mean = p_hat.iter().zip(&weights).map(|(p, w)| p * w).sum::<f64>();
        Ok(ConstrainedFit {
            mu,
            alpha_r,
            alpha_l,
            c_r: point.params.right.c,
            c_l: point.params.left.map(|l| l.c),
            lambda1: point.lambda1,
            lambda2_r: point.lambda2_r,
            lambda2_l: point.lambda2_l,
            g1: point.g1,
            weights,
            p_hat,
            converged,
            outer_iterations,
            residuals: Residuals {
                h,
                h_bar,
                mass,
                mean,
            },
        })
    }

    /// `-2 (l0(constrained) - l0(unconstrained))`, accumulated as differences
    /// of like terms so that it stays accurate near zero.
    pub(crate) fn ratio_of(&self, fit: &ConstrainedFit) -> f64 {
        let n = self.sample().len() as f64;
        let w = self.window();
        let k = w.k as f64;
        let bar = &self.fit;
        let th = self.thresholds;

        let sum_log_right = self.right_excess + k * th.right.ln();
        let mut delta = k * (fit.alpha_r / bar.alpha_r).ln() + k * (fit.c_r / bar.c_r).ln()
            - (fit.alpha_r - bar.alpha_r) * sum_log_right;
        if let (Some(a), Some(c), Some(a_bar), Some(c_bar), Some(tl)) =
            (fit.alpha_l, fit.c_l, bar.alpha_l, bar.c_l, th.left)
        {
            let m = w.m as f64;
            let sum_log_left = self.left_excess + m * tl.ln();
            delta += m * (a / a_bar).ln() + m * (c / c_bar).ln() - (a - a_bar) * sum_log_left;
        }
        let log_l1 = (fit.lambda1 / n).ln();
        for &wi in &fit.weights {
            delta -= log_l1 + (fit.lambda2_r * wi / fit.lambda1).ln_1p();
        }
        -2.0 * delta
    }

    /// Likelihood ratio statistic `l(mu)`.
    pub fn el_ratio(&self, mu: f64, opts: &SolverOptions) -> Result<ElProfile> {
        match self.solve_constrained(mu, opts) {
            Ok(fit) => {
                let l = self.ratio_of(&fit);
                if l < L_FLOOR || l.is_nan() {
                    return Err(Error::NonConvergence(format!(
                        "likelihood ratio {l} below zero at mu = {mu}: constrained fit is not a maximum"
                    )));
                }
                Ok(ElProfile {
                    mu,
                    l_value: l.max(0.0),
                    fit: Some(fit),
                })
            }
            Err(e) if is_infeasible(&e) => Ok(ElProfile {
                mu,
                l_value: f64::INFINITY,
                fit: None,
            }),
            Err(e) => Err(e),
        }
    }

    /// Minimiser of `l(mu)`: the mean at which the unconstrained fit already
    /// satisfies the mean constraint with `1/n` weights.
    pub fn el_point_estimate(&self) -> Result<f64> {
        let n = self.sample().len() as f64;
        let fit = &self.fit;
        let tail_term = |alpha: f64, c: f64, t: f64| -> Result<f64> {
            if !(alpha > 1.0) {
                return Err(Error::Domain(format!(
                    "Hill estimate {alpha} <= 1: tail mean diverges"
                )));
            }
            Ok(c * alpha / (alpha - 1.0) * t.powf(1.0 - alpha))
        };
        let mut mu = self.midrange().iter().sum::<f64>() / n
            + tail_term(fit.alpha_r, fit.c_r, self.thresholds.right)?;
        if let (Some(a), Some(c), Some(t)) = (fit.alpha_l, fit.c_l, self.thresholds.left) {
            mu -= tail_term(a, c, t)?;
        }
        Ok(mu)
    }
}

pub fn solve_constrained(
    sample: &SortedSample,
    window: TailWindow,
    mu: f64,
) -> Result<ConstrainedFit> {
    ElProblem::new(sample, window)?.solve_constrained(mu, &SolverOptions::default())
}

pub fn el_ratio(mu: f64, sample: &SortedSample, window: TailWindow) -> Result<ElProfile> {
    ElProblem::new(sample, window)?.el_ratio(mu, &SolverOptions::default())
}

pub fn el_point_estimate(sample: &SortedSample, window: TailWindow) -> Result<f64> {
    ElProblem::new(sample, window)?.el_point_estimate()
}
