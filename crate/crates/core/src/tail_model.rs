//! Heavy-tailed test laws used by the simulation study.
//!
//! All laws are supported on the positive half-line and are sampled by
//! inverse CDF only.

use crate::error::{Error, Result};
use crate::rng::open_uniform;
use crate::special::{beta as beta_fn, gamma};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// A parametric heavy-tailed law.
///
/// `Burr { alpha, beta }` has `F(x) = 1 - (1 + x^beta)^(-alpha/beta)`; in the
/// literature's `Burr(a, b + a)` labelling, `Burr(2.0, 4.0)` is
/// `Burr { alpha: 2.0, beta: 2.0 }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum HeavyTailLaw {
    Frechet { alpha: f64 },
    Burr { alpha: f64, beta: f64 },
    Pareto { alpha: f64, scale: f64 },
}

/// Mean of a law, which need not exist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mean {
    Finite(f64),
    Infinite,
}

impl Mean {
    pub fn finite(self) -> Option<f64> {
        match self {
            Mean::Finite(m) => Some(m),
            Mean::Infinite => None,
        }
    }
}

/// Second-order tail expansion `1 - F(x) = c x^(-alpha) {1 + b x^(-beta) + o(x^(-beta))}`.
///
/// `exact` marks a pure power tail (Pareto), for which `b = 0` and `beta` is
/// infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderConstants {
    pub c: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub exact: bool,
}

impl HeavyTailLaw {
    pub fn frechet(alpha: f64) -> Result<Self> {
        Self::Frechet { alpha }.validated()
    }

    pub fn burr(alpha: f64, beta: f64) -> Result<Self> {
        Self::Burr { alpha, beta }.validated()
    }

    pub fn pareto(alpha: f64, scale: f64) -> Result<Self> {
        Self::Pareto { alpha, scale }.validated()
    }

    /// Checks parameter positivity. Laws with `alpha <= 1` are allowed; their
    /// mean is reported as infinite.
    pub fn validated(self) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        let valid = match self {
            HeavyTailLaw::Frechet { alpha } => ok(alpha),
            HeavyTailLaw::Burr { alpha, beta } => ok(alpha) && ok(beta),
            HeavyTailLaw::Pareto { alpha, scale } => ok(alpha) && ok(scale),
        };
        if valid {
            Ok(self)
        } else {
            Err(Error::Domain(format!("law parameters must be positive: {self:?}")))
        }
    }

    /// Right tail index.
    pub fn alpha(&self) -> f64 {
        match *self {
            HeavyTailLaw::Frechet { alpha }
            | HeavyTailLaw::Burr { alpha, .. }
            | HeavyTailLaw::Pareto { alpha, .. } => alpha,
        }
    }

    pub fn has_finite_mean(&self) -> bool {
        self.alpha() > 1.0
    }

    pub fn label(&self) -> String {
        match *self {
            HeavyTailLaw::Frechet { alpha } => format!("Frechet({alpha:.1})"),
            // printed in the (alpha, alpha + beta) convention of the coverage tables
            HeavyTailLaw::Burr { alpha, beta } => format!("Burr({alpha:.1}, {:.1})", alpha + beta),
            HeavyTailLaw::Pareto { alpha, scale } => format!("Pareto({alpha:.1}, {scale})"),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            HeavyTailLaw::Frechet { alpha } => {
                if x <= 0.0 {
                    0.0
                } else {
                    (-x.powf(-alpha)).exp()
                }
            }
            HeavyTailLaw::Burr { .. } => {
                if x <= 0.0 {
                    0.0
                } else {
                    1.0 - self.survival(x)
                }
            }
            HeavyTailLaw::Pareto { scale, .. } => {
                if x <= scale {
                    0.0
                } else {
                    1.0 - self.survival(x)
                }
            }
        }
    }

    /// `1 - F(x)`, computed without cancellation in the far tail.
    pub fn survival(&self, x: f64) -> f64 {
        match *self {
            HeavyTailLaw::Frechet { alpha } => {
                if x <= 0.0 {
                    1.0
                } else {
                    -(-x.powf(-alpha)).exp_m1()
                }
            }
            HeavyTailLaw::Burr { alpha, beta } => {
                if x <= 0.0 {
                    1.0
                } else {
                    // (1 + x^beta)^(-alpha/beta) = x^(-alpha) (1 + x^(-beta))^(-alpha/beta)
                    x.powf(-alpha) * (-(alpha / beta) * x.powf(-beta).ln_1p()).exp()
                }
            }
            HeavyTailLaw::Pareto { alpha, scale } => {
                if x <= scale {
                    1.0
                } else {
                    (x / scale).powf(-alpha)
                }
            }
        }
    }

    /// Inverse CDF `F^-(u)` for `u` in (0, 1).
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile needs u in (0,1), got {u}")));
        }
        Ok(match *self {
            HeavyTailLaw::Frechet { alpha } => (-u.ln()).powf(-1.0 / alpha),
            HeavyTailLaw::Burr { alpha, beta } => {
                // x^beta = (1-u)^(-beta/alpha) - 1
                (-(beta / alpha) * (-u).ln_1p()).exp_m1().powf(1.0 / beta)
            }
            HeavyTailLaw::Pareto { alpha, scale } => scale * (-(-u).ln_1p() / alpha).exp(),
        })
    }

    /// `n` i.i.d. draws by inverse CDF.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::Domain("sample size must be at least 1".into()));
        }
        (0..n).map(|_| self.quantile(open_uniform(rng))).collect()
    }

    pub fn true_mean(&self) -> Mean {
        if !self.has_finite_mean() {
            return Mean::Infinite;
        }
        Mean::Finite(match *self {
            HeavyTailLaw::Frechet { alpha } => gamma(1.0 - 1.0 / alpha),
            // E X = (alpha/beta) B((alpha - 1)/beta, 1 + 1/beta)
            HeavyTailLaw::Burr { alpha, beta } => {
                (alpha / beta) * beta_fn((alpha - 1.0) / beta, 1.0 + 1.0 / beta)
            }
            HeavyTailLaw::Pareto { alpha, scale } => alpha * scale / (alpha - 1.0),
        })
    }

    pub fn second_order_constants(&self) -> SecondOrderConstants {
        match *self {
            // 1 - exp(-x^-a) = x^-a (1 - x^-a / 2 + ...)
            HeavyTailLaw::Frechet { alpha } => SecondOrderConstants {
                c: 1.0,
                b: -0.5,
                alpha,
                beta: alpha,
                exact: false,
            },
            // x^-a (1 + x^-b)^(-a/b) = x^-a (1 - (a/b) x^-b + ...)
            HeavyTailLaw::Burr { alpha, beta } => SecondOrderConstants {
                c: 1.0,
                b: -alpha / beta,
                alpha,
                beta,
                exact: false,
            },
            HeavyTailLaw::Pareto { alpha, scale } => SecondOrderConstants {
                c: scale.powf(alpha),
                b: 0.0,
                alpha,
                beta: f64::INFINITY,
                exact: true,
            },
        }
    }
}

/// Sample fraction minimising the asymptotic mean squared error of the Hill
/// estimator:
///
/// `k* = (alpha beta^2 / (2 (beta - alpha)^3 b^2) c^(2 beta / alpha))^(alpha / (2 beta - alpha))
///       * n^((2 beta - 2 alpha) / (2 beta - alpha))`
///
/// The expression has no finite value for exact power tails (`b = 0`), for
/// `beta = alpha` or `2 beta = alpha`, and is not real for `beta < alpha`.
pub fn optimal_k_star(constants: &SecondOrderConstants, n: usize) -> Result<f64> {
    let SecondOrderConstants {
        c,
        b,
        alpha,
        beta,
        exact,
    } = *constants;
    let near = |x: f64, y: f64| (x - y).abs() <= 1e-12 * (x.abs() + y.abs());
    if exact || b == 0.0 || !beta.is_finite() {
        return Err(Error::FormulaSingular(
            "exact power tail (b = 0); supply k explicitly".into(),
        ));
    }
    if near(beta, alpha) {
        return Err(Error::FormulaSingular(
            "beta equals alpha; supply k explicitly".into(),
        ));
    }
    if near(2.0 * beta, alpha) {
        return Err(Error::FormulaSingular(
            "2 beta equals alpha; supply k explicitly".into(),
        ));
    }
    let base = 0.5 * alpha * beta * beta * (beta - alpha).powi(-3) * b.powi(-2)
        * c.powf(2.0 * beta / alpha);
    if base <= 0.0 {
        return Err(Error::FormulaSingular(format!(
            "non-positive base {base} (beta < alpha); supply k explicitly"
        )));
    }
    let denom = 2.0 * beta - alpha;
    Ok(base.powf(alpha / denom) * (n as f64).powf((2.0 * beta - 2.0 * alpha) / denom))
}

/// `floor(k* / ln k*)`, at least 2.
pub fn practical_k(k_star: f64) -> Result<usize> {
    if !(k_star > std::f64::consts::E) || !k_star.is_finite() {
        return Err(Error::Domain(format!("k* must exceed e, got {k_star}")));
    }
    Ok(((k_star / k_star.ln()).floor() as usize).max(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use std::f64::consts::{E, PI};

    /// Bisection on the CDF, independent of the closed-form quantiles.
    fn invert_cdf(law: &HeavyTailLaw, u: f64) -> f64 {
        let (mut lo, mut hi): (f64, f64) = (1e-12, 1e12);
        for _ in 0..400 {
            let mid = (lo * hi).sqrt();
            if law.cdf(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Midpoint rule for the integral of the quantile function over (0,1).
    fn midpoint_mean(law: &HeavyTailLaw, n: usize) -> f64 {
        (0..n)
            .map(|i| law.quantile((i as f64 + 0.5) / n as f64).unwrap())
            .sum::<f64>()
            / n as f64
    }

    #[test]
    fn frechet_quantile_examples() {
        for alpha in [0.5, 1.0, 2.0, 5.0] {
            let law = HeavyTailLaw::frechet(alpha).unwrap();
            assert!((law.quantile((-1.0f64).exp()).unwrap() - 1.0).abs() < 1e-14);
        }
        let law = HeavyTailLaw::frechet(2.0).unwrap();
        let oracle = invert_cdf(&law, 0.5);
        assert!((oracle - 1.201_122_408_786_449_8).abs() < 1e-9);
        assert!((law.quantile(0.5).unwrap() - oracle).abs() < 1e-9);
    }

    #[test]
    fn burr_quantile_example() {
        let law = HeavyTailLaw::burr(2.0, 2.0).unwrap();
        let oracle = invert_cdf(&law, 0.75);
        assert!((oracle - 3f64.sqrt()).abs() < 1e-9);
        assert!((law.quantile(0.75).unwrap() - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn quantile_domain() {
        let law = HeavyTailLaw::frechet(2.0).unwrap();
        assert!(law.quantile(0.0).is_err());
        assert!(law.quantile(1.0).is_err());
        assert!(law.quantile(f64::NAN).is_err());
        assert!(HeavyTailLaw::frechet(-1.0).is_err());
        assert!(HeavyTailLaw::burr(1.0, 0.0).is_err());
    }

    #[test]
    fn quantile_strictly_increasing() {
        let laws = [
            HeavyTailLaw::frechet(1.5).unwrap(),
            HeavyTailLaw::burr(2.0, 2.0).unwrap(),
            HeavyTailLaw::pareto(2.0, 1.0).unwrap(),
        ];
        for law in laws {
            let mut prev = f64::NEG_INFINITY;
            for i in 1..1000 {
                let q = law.quantile(i as f64 / 1000.0).unwrap();
                assert!(q > prev, "{law:?} at {i}");
                prev = q;
            }
        }
    }

    #[test]
    fn sample_single_draw_is_quantile_of_stream() {
        let law = HeavyTailLaw::frechet(2.0).unwrap();
        let mut a = stream(11);
        let u = open_uniform(&mut a);
        let mut b = stream(11);
        assert_eq!(law.sample(1, &mut b).unwrap(), vec![law.quantile(u).unwrap()]);
        assert!(law.sample(0, &mut b).is_err());
        assert_eq!(
            law.sample(50, &mut stream(3)).unwrap(),
            law.sample(50, &mut stream(3)).unwrap()
        );
    }

    #[test]
    fn sampler_matches_quantiles() {
        let n = 100_000;
        let laws = [
            HeavyTailLaw::frechet(2.0).unwrap(),
            HeavyTailLaw::burr(2.0, 2.0).unwrap(),
        ];
        for law in laws {
            let mut xs = law.sample(n, &mut stream(5)).unwrap();
            xs.sort_by(f64::total_cmp);
            for i in 1..10 {
                let q = i as f64 / 10.0;
                let frac = xs.partition_point(|&x| x <= law.quantile(q).unwrap()) as f64 / n as f64;
                let se = (q * (1.0 - q) / n as f64).sqrt();
                assert!((frac - q).abs() <= 3.0 * se, "{law:?} q={q} frac={frac}");
            }
        }
        let law = HeavyTailLaw::frechet(2.0).unwrap();
        let xs = law.sample(n, &mut stream(9)).unwrap();
        let frac = xs.iter().filter(|&&x| x <= 1.201_12).count() as f64 / n as f64;
        assert!((frac - 0.5).abs() <= 0.005);
    }

    #[test]
    fn true_means() {
        let f2 = HeavyTailLaw::frechet(2.0).unwrap().true_mean().finite().unwrap();
        assert!((f2 - PI.sqrt()).abs() < 1e-12);
        let p2 = HeavyTailLaw::pareto(2.0, 1.0).unwrap().true_mean();
        assert_eq!(p2, Mean::Finite(2.0));
        assert_eq!(HeavyTailLaw::frechet(1.0).unwrap().true_mean(), Mean::Infinite);
        let b = HeavyTailLaw::burr(2.0, 2.0).unwrap().true_mean().finite().unwrap();
        assert!((b - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn true_mean_matches_midpoint_rule() {
        let laws = [
            HeavyTailLaw::frechet(1.8).unwrap(),
            HeavyTailLaw::frechet(2.0).unwrap(),
            HeavyTailLaw::frechet(3.0).unwrap(),
            HeavyTailLaw::burr(1.5, 1.5).unwrap(),
            HeavyTailLaw::burr(2.0, 2.0).unwrap(),
            HeavyTailLaw::burr(5.0, 5.0).unwrap(),
            HeavyTailLaw::pareto(2.5, 2.0).unwrap(),
        ];
        for law in laws {
            let exact = law.true_mean().finite().unwrap();
            let approx = midpoint_mean(&law, 1_000_000);
            assert!((approx / exact - 1.0).abs() < 0.01, "{law:?}: {approx} vs {exact}");
        }
    }

    #[test]
    fn second_order_expansions_hold() {
        let laws = [
            HeavyTailLaw::frechet(1.5).unwrap(),
            HeavyTailLaw::frechet(2.0).unwrap(),
            HeavyTailLaw::burr(2.0, 2.0).unwrap(),
            HeavyTailLaw::burr(1.8, 1.8).unwrap(),
            HeavyTailLaw::pareto(2.0, 1.0).unwrap(),
        ];
        for law in laws {
            let k = law.second_order_constants();
            for x in [20.0, 50.0, 100.0] {
                let ratio = law.survival(x) * x.powf(k.alpha) / k.c;
                let resid = (ratio - 1.0 - k.b * x.powf(-k.beta)).abs();
                assert!(resid <= x.powf(-k.beta) / 10.0 + 1e-15, "{law:?} x={x}");
            }
        }
        let f = HeavyTailLaw::frechet(2.0).unwrap().second_order_constants();
        assert_eq!((f.c, f.b, f.beta), (1.0, -0.5, 2.0));
        let b = HeavyTailLaw::burr(2.0, 4.0).unwrap().second_order_constants();
        assert_eq!((b.c, b.b, b.beta), (1.0, -0.5, 4.0));
        let p = HeavyTailLaw::pareto(2.0, 1.0).unwrap().second_order_constants();
        assert!(p.exact && p.b == 0.0 && p.c == 1.0);
    }

    #[test]
    fn k_star_singular_cases() {
        let frechet = HeavyTailLaw::frechet(2.0).unwrap().second_order_constants();
        assert!(matches!(optimal_k_star(&frechet, 1000), Err(Error::FormulaSingular(_))));
        let pareto = HeavyTailLaw::pareto(2.0, 1.0).unwrap().second_order_constants();
        assert!(matches!(optimal_k_star(&pareto, 1000), Err(Error::FormulaSingular(_))));
        // the tables' Burr(a, 2a) laws have beta = alpha as well
        let burr = HeavyTailLaw::burr(2.0, 2.0).unwrap().second_order_constants();
        assert!(matches!(optimal_k_star(&burr, 1000), Err(Error::FormulaSingular(_))));
        let half = SecondOrderConstants { c: 1.0, b: 1.0, alpha: 2.0, beta: 1.0, exact: false };
        assert!(matches!(optimal_k_star(&half, 1000), Err(Error::FormulaSingular(_))));
    }

    #[test]
    fn k_star_direct_evaluation() {
        // base = 0.5 * 1 * 9 / 8 = 9/16, outer power 1/5; n power 4/5
        let consts = SecondOrderConstants { c: 1.0, b: 1.0, alpha: 1.0, beta: 3.0, exact: false };
        let oracle = (9.0f64 / 16.0).ln() / 5.0 + 0.8 * 1000f64.ln();
        let k = optimal_k_star(&consts, 1000).unwrap();
        assert!((k - oracle.exp()).abs() < 1e-9);
        assert!((k - 223.88).abs() < 0.01);
    }

    #[test]
    fn practical_k_examples() {
        assert_eq!(practical_k(E * E).unwrap(), 3);
        assert_eq!(practical_k(200.0).unwrap(), 37);
        assert_eq!(practical_k(100.0).unwrap(), 21);
        assert_eq!(practical_k(3.0).unwrap(), 2);
        assert!(practical_k(E).is_err());
        assert!(practical_k(1.0).is_err());
    }
}
