//! Closed-form pieces of the constrained likelihood at fixed mean.
//!
//! With the tail scales and the multiplier `lambda2` eliminated through the
//! stationarity conditions, everything is a function of the tail indices and
//! `mu`. Left-tail quantities are the right-tail ones applied to `-X`, with
//! `mu -> -mu` and `lambda2 -> -lambda2`.

use crate::error::{Error, Result};
use crate::tail_fit::{
    left_log_excess, right_log_excess, unconstrained_fit, SortedSample, TailWindow,
    UnconstrainedFit,
};

/// Tail thresholds: `X_(n-k+1)` and, in two-tail mode, `-X_(m)`. Both positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub right: f64,
    pub left: Option<f64>,
}

/// Scale and index of one Pareto-type tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailPiece {
    pub c: f64,
    pub alpha: f64,
}

/// Tail parameters; `left` is absent in one-tail mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailParams {
    pub right: TailPiece,
    pub left: Option<TailPiece>,
}

impl TailParams {
    pub fn one_tail(c: f64, alpha: f64) -> Self {
        Self {
            right: TailPiece { c, alpha },
            left: None,
        }
    }
}

/// Midrange probability left over by the tails:
/// `1 - c_R T_R^(-a_R) - c_L T_L^(-a_L)`.
pub fn tail_mass_g1(params: &TailParams, th: &Thresholds) -> Result<f64> {
    let mut g1 = 1.0 - params.right.c * th.right.powf(-params.right.alpha);
    if let (Some(left), Some(tl)) = (params.left, th.left) {
        g1 -= left.c * tl.powf(-left.alpha);
    }
    if g1 > 0.0 {
        Ok(g1)
    } else {
        Err(Error::InfeasibleParameters(format!(
            "tails carry all probability mass (g1 = {g1})"
        )))
    }
}

fn tail_mean_term(piece: TailPiece, threshold: f64) -> Result<f64> {
    if !(piece.alpha > 1.0) {
        return Err(Error::Domain(format!(
            "tail index {} <= 1: tail mean diverges",
            piece.alpha
        )));
    }
    Ok(piece.c * piece.alpha / (piece.alpha - 1.0) * threshold.powf(1.0 - piece.alpha))
}

/// Required midrange first moment:
/// `mu - c_R a_R/(a_R-1) T_R^(1-a_R) + c_L a_L/(a_L-1) T_L^(1-a_L)`.
///
/// The left tail lies on negative values, so its contribution to the mean is
/// negative and enters with a plus sign here.
pub fn tail_mean_g2(mu: f64, params: &TailParams, th: &Thresholds) -> Result<f64> {
    let mut g2 = mu - tail_mean_term(params.right, th.right)?;
    if let (Some(left), Some(tl)) = (params.left, th.left) {
        g2 += tail_mean_term(left, tl)?;
    }
    Ok(g2)
}

/// Everything the profile equations need about a sample and window,
/// computed once.
#[derive(Debug, Clone)]
pub struct ElProblem<'a> {
    sample: &'a SortedSample,
    window: TailWindow,
    pub(crate) thresholds: Thresholds,
    pub(crate) right_excess: f64,
    pub(crate) left_excess: f64,
    pub(crate) fit: UnconstrainedFit,
}

impl<'a> ElProblem<'a> {
    pub fn new(sample: &'a SortedSample, window: TailWindow) -> Result<Self> {
        window.validate(sample)?;
        let n = sample.len();
        let fit = unconstrained_fit(sample, &window)?;
        let right_excess = right_log_excess(sample, window.k)?;
        let (left, left_excess) = if window.is_two_tail() {
            (
                Some(-sample.order_stat(window.m)),
                left_log_excess(sample, window.m)?,
            )
        } else {
            (None, 0.0)
        };
        Ok(Self {
            sample,
            window,
            thresholds: Thresholds {
                right: sample.order_stat(n - window.k + 1),
                left,
            },
            right_excess,
            left_excess,
            fit,
        })
    }

    pub fn sample(&self) -> &SortedSample {
        self.sample
    }

    pub fn window(&self) -> TailWindow {
        self.window
    }

    pub fn thresholds(&self) -> Thresholds {
        self.thresholds
    }

    pub fn unconstrained(&self) -> &UnconstrainedFit {
        &self.fit
    }

    pub fn two_tail(&self) -> bool {
        self.window.is_two_tail()
    }

    fn n(&self) -> f64 {
        self.sample.len() as f64
    }

    /// Midrange observations in ascending order.
    pub fn midrange(&self) -> &'a [f64] {
        let n = self.sample.len();
        &self.sample.values()[self.window.m..n - self.window.k]
    }

    pub(crate) fn midrange_count(&self) -> f64 {
        (self.sample.len() - self.window.k - self.window.m) as f64
    }

    fn left_threshold(&self) -> Result<f64> {
        self.thresholds
            .left
            .ok_or_else(|| Error::Validation("left-tail quantity requested in one-tail mode".into()))
    }

    /// Unconstrained tail parameters as a `TailParams`.
    pub fn unconstrained_params(&self) -> TailParams {
        TailParams {
            right: TailPiece {
                c: self.fit.c_r,
                alpha: self.fit.alpha_r,
            },
            left: self.fit.alpha_l.zip(self.fit.c_l).map(|(alpha, c)| TailPiece { c, alpha }),
        }
    }

    /// `w_i = X_i - g2/g1` over the midrange.
    pub fn weights_w(&self, mu: f64, params: &TailParams) -> Result<Vec<f64>> {
        let shift = self.weight_shift(mu, params)?;
        Ok(self.midrange().iter().map(|x| x - shift).collect())
    }

    pub(crate) fn weight_shift(&self, mu: f64, params: &TailParams) -> Result<f64> {
        let g1 = tail_mass_g1(params, &self.thresholds)?;
        let g2 = tail_mean_g2(mu, params, &self.thresholds)?;
        Ok(g2 / g1)
    }

    /// Right-tail log-excess bracket `sum log(X_i/T_R) - k/a`; zero at the
    /// Hill estimate.
    pub(crate) fn right_bracket(&self, alpha: f64) -> f64 {
        self.right_excess - self.window.k as f64 / alpha
    }

    pub(crate) fn left_bracket(&self, alpha: f64) -> f64 {
        self.left_excess - self.window.m as f64 / alpha
    }

    /// Right tail scale that is stationary for fixed `(a_R, mu)`:
    /// `(k/n) T^a - S {a(a-1) T^a - mu (a-1)^2 T^(a-1)} / n`.
    pub fn c_hat_r(&self, alpha: f64, mu: f64) -> Result<f64> {
        check_index(alpha)?;
        let t = self.thresholds.right;
        let s = self.right_bracket(alpha);
        let ta = t.powf(alpha);
        let n = self.n();
        Ok(self.window.k as f64 / n * ta
            - s * (alpha * (alpha - 1.0) * ta - mu * (alpha - 1.0).powi(2) * ta / t) / n)
    }

    /// Left tail scale stationary for fixed `(a_L, mu)`; mirror of
    /// [`Self::c_hat_r`].
    pub fn c_hat_l(&self, alpha: f64, mu: f64) -> Result<f64> {
        check_index(alpha)?;
        let t = self.left_threshold()?;
        let s = self.left_bracket(alpha);
        let ta = t.powf(alpha);
        let n = self.n();
        Ok(self.window.m as f64 / n * ta
            - s * (alpha * (alpha - 1.0) * ta + mu * (alpha - 1.0).powi(2) * ta / t) / n)
    }

    /// Mean-constraint multiplier implied by the right tail.
    ///
    /// Evaluated as `S (a-1)^2 T^(a-1) / c_hat_r`, algebraically equal to the
    /// reciprocal form `{k (a-1)^-2 T / (n S) - a T / (n (a-1)) + mu / n}^-1`
    /// but finite (zero) at the Hill estimate where `S = 0`.
    pub fn lambda2_r(&self, alpha: f64, mu: f64) -> Result<f64> {
        let s = self.right_bracket(alpha);
        if s == 0.0 {
            return Ok(0.0);
        }
        let c = self.c_hat_r(alpha, mu)?;
        if c == 0.0 {
            return Err(Error::InfeasibleParameters(
                "lambda2 pole: right tail scale vanishes".into(),
            ));
        }
        Ok(s * (alpha - 1.0).powi(2) * self.thresholds.right.powf(alpha - 1.0) / c)
    }

    /// Mean-constraint multiplier implied by the left tail.
    pub fn lambda2_l(&self, alpha: f64, mu: f64) -> Result<f64> {
        let t = self.left_threshold()?;
        let s = self.left_bracket(alpha);
        if s == 0.0 {
            return Ok(0.0);
        }
        let c = self.c_hat_l(alpha, mu)?;
        if c == 0.0 {
            return Err(Error::InfeasibleParameters(
                "lambda2 pole: left tail scale vanishes".into(),
            ));
        }
        Ok(-s * (alpha - 1.0).powi(2) * t.powf(alpha - 1.0) / c)
    }

    /// `(n - m - k) / g1` at the stationary tail scales.
    pub fn lambda1(&self, alpha_r: f64, alpha_l: Option<f64>, mu: f64) -> Result<f64> {
        let params = self.hat_params(alpha_r, alpha_l, mu)?;
        Ok(self.midrange_count() / tail_mass_g1(&params, &self.thresholds)?)
    }

    /// Tail parameters at the stationary scales; errors if a scale is not
    /// positive.
    pub fn hat_params(&self, alpha_r: f64, alpha_l: Option<f64>, mu: f64) -> Result<TailParams> {
        let c_r = self.c_hat_r(alpha_r, mu)?;
        if !(c_r > 0.0) {
            return Err(Error::InfeasibleParameters(format!(
                "right tail scale {c_r} not positive at alpha_R = {alpha_r}"
            )));
        }
        let left = if self.two_tail() {
            let alpha_l = alpha_l.ok_or_else(|| {
                Error::Validation("two-tail mode needs a left tail index".into())
            })?;
            let c_l = self.c_hat_l(alpha_l, mu)?;
            if !(c_l > 0.0) {
                return Err(Error::InfeasibleParameters(format!(
                    "left tail scale {c_l} not positive at alpha_L = {alpha_l}"
                )));
            }
            Some(TailPiece { c: c_l, alpha: alpha_l })
        } else {
            None
        };
        Ok(TailParams {
            right: TailPiece { c: c_r, alpha: alpha_r },
            left,
        })
    }

    /// All profile quantities at `(a_R, a_L, mu)`.
    pub(crate) fn point(&self, alpha_r: f64, alpha_l: Option<f64>, mu: f64) -> Result<ProfilePoint> {
        let params = self.hat_params(alpha_r, alpha_l, mu)?;
        let g1 = tail_mass_g1(&params, &self.thresholds)?;
        let g2 = tail_mean_g2(mu, &params, &self.thresholds)?;
        let lambda2_r = self.lambda2_r(alpha_r, mu)?;
        let lambda2_l = match params.left {
            Some(l) => Some(self.lambda2_l(l.alpha, mu)?),
            None => None,
        };
        Ok(ProfilePoint {
            params,
            g1,
            shift: g2 / g1,
            lambda1: self.midrange_count() / g1,
            lambda2_r,
            lambda2_l,
        })
    }

    /// `sum w_i / (lambda1 + lambda2 w_i)` over the midrange.
    pub(crate) fn h_with(&self, mu: f64, lambda1: f64, lambda2: f64, shift: f64) -> Result<f64> {
        let mut acc = 0.0;
        for &x in self.midrange() {
            let w = x - shift;
            let d = lambda1 + lambda2 * w;
            if !(d > 0.0) {
                return Err(Error::InfeasibleMean {
                    mu,
                    reason: format!("midrange weight denominator {d} at X = {x}"),
                });
            }
            acc += w / d;
        }
        Ok(acc)
    }

    /// Profile equation in the right tail index.
    pub fn h_hat(&self, alpha_r: f64, alpha_l: Option<f64>, mu: f64) -> Result<f64> {
        let p = self.point(alpha_r, alpha_l, mu)?;
        self.h_with(mu, p.lambda1, p.lambda2_r, p.shift)
    }

    /// Profile equation in the left tail index (two-tail mode only).
    pub fn h_bar(&self, alpha_r: f64, alpha_l: f64, mu: f64) -> Result<f64> {
        let p = self.point(alpha_r, Some(alpha_l), mu)?;
        let l2 = p
            .lambda2_l
            .ok_or_else(|| Error::Validation("h_bar requires two-tail mode".into()))?;
        self.h_with(mu, p.lambda1, l2, p.shift)
    }

    /// Semiparametric log-likelihood `l1(c, a) + sum log p_i`.
    pub fn log_lik_l0(&self, params: &TailParams, p: &[f64]) -> Result<f64> {
        log_lik_l0(params, p, self.sample, &self.window)
    }
}

fn check_index(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("tail index must exceed 1, got {alpha}")))
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ProfilePoint {
    pub params: TailParams,
    pub g1: f64,
    pub shift: f64,
    pub lambda1: f64,
    pub lambda2_r: f64,
    pub lambda2_l: Option<f64>,
}

/// Log-likelihood of the tail/midrange model:
///
/// `k log a_R + k log c_R - (a_R + 1) sum_right log X_i
///  + m log a_L + m log c_L - (a_L + 1) sum_left log(-X_i) + sum_mid log p_i`.
pub fn log_lik_l0(
    params: &TailParams,
    p: &[f64],
    sample: &SortedSample,
    window: &TailWindow,
) -> Result<f64> {
    let n = sample.len();
    let v = sample.values();
    let expected = window.midrange_len(n);
    if p.len() != expected {
        return Err(Error::Domain(format!(
            "expected {expected} midrange weights, got {}",
            p.len()
        )));
    }
    let positive = |x: f64, what: &str| {
        if x > 0.0 {
            Ok(x.ln())
        } else {
            Err(Error::Domain(format!("{what} must be positive, got {x}")))
        }
    };
    let k = window.k as f64;
    let r = params.right;
    let mut l1 = k * positive(r.alpha, "alpha_R")? + k * positive(r.c, "c_R")?;
    let mut log_sum = 0.0;
    for &x in &v[n - window.k..] {
        log_sum += positive(x, "right-tail observation")?;
    }
    l1 -= (r.alpha + 1.0) * log_sum;

    if window.is_two_tail() {
        let l = params
            .left
            .ok_or_else(|| Error::Validation("two-tail likelihood needs left parameters".into()))?;
        let m = window.m as f64;
        l1 += m * positive(l.alpha, "alpha_L")? + m * positive(l.c, "c_L")?;
        let mut log_sum = 0.0;
        for &x in &v[..window.m] {
            log_sum += positive(-x, "negated left-tail observation")?;
        }
        l1 -= (l.alpha + 1.0) * log_sum;
    }

    let mut l2 = 0.0;
    for &pi in p {
        l2 += positive(pi, "midrange weight")?;
    }
    Ok(l1 + l2)
}
