//! Order statistics, tail windows and the unconstrained tail fit.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::ops::Range;

/// Observations in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedSample {
    values: Vec<f64>,
}

impl SortedSample {
    /// Sorts `raw` ascending. Rejects empty input and non-finite values.
    pub fn new(mut raw: Vec<f64>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::Data("sample is empty".into()));
        }
        if let Some(pos) = raw.iter().position(|x| !x.is_finite()) {
            return Err(Error::Data(format!(
                "non-finite value {} at position {pos}",
                raw[pos]
            )));
        }
        raw.sort_by(f64::total_cmp);
        Ok(Self { values: raw })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Order statistic `X_{n,j}` with 1-based `j`.
    pub fn order_stat(&self, j: usize) -> f64 {
        self.values[j - 1]
    }

    /// The sample multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|x| x * c).collect(),
        }
    }

    /// `-X` in ascending order.
    pub fn negated(&self) -> Self {
        Self {
            values: self.values.iter().rev().map(|x| -x).collect(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }
}

/// Stable ascending sort of raw observations.
pub fn make_sorted(raw: Vec<f64>) -> Result<SortedSample> {
    SortedSample::new(raw)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailMode {
    /// Only the right tail is modelled; the left endpoint is taken as finite.
    OneTail,
    TwoTail,
}

impl std::str::FromStr for TailMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-tail" | "one_tail" => Ok(TailMode::OneTail),
            "two-tail" | "two_tail" => Ok(TailMode::TwoTail),
            other => Err(Error::Validation(format!(
                "unknown tail mode {other:?} (expected one-tail or two-tail)"
            ))),
        }
    }
}

/// Numbers of upper (`k`) and lower (`m`) order statistics modelled
/// parametrically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailWindow {
    pub k: usize,
    pub m: usize,
    pub mode: TailMode,
}

/// Minimum number of midrange observations a window must leave.
pub const MIN_MIDRANGE: usize = 3;

impl TailWindow {
    pub fn one_tail(k: usize) -> Self {
        Self {
            k,
            m: 0,
            mode: TailMode::OneTail,
        }
    }

    pub fn two_tail(k: usize, m: usize) -> Self {
        Self {
            k,
            m,
            mode: TailMode::TwoTail,
        }
    }

    pub fn is_two_tail(&self) -> bool {
        self.mode == TailMode::TwoTail
    }

    /// Midrange size `n - m - k`.
    pub fn midrange_len(&self, n: usize) -> usize {
        n - self.k - self.m
    }

    pub fn validate(&self, sample: &SortedSample) -> Result<()> {
        let n = sample.len();
        if self.k < 2 {
            return Err(Error::Validation(format!("k must be at least 2, got {}", self.k)));
        }
        match self.mode {
            TailMode::OneTail if self.m != 0 => {
                return Err(Error::Validation("one-tail mode requires m = 0".into()));
            }
            TailMode::TwoTail if self.m < 2 => {
                return Err(Error::Validation(format!(
                    "two-tail mode requires m >= 2, got {}",
                    self.m
                )));
            }
            _ => {}
        }
        if self.k + self.m + MIN_MIDRANGE > n {
            return Err(Error::Validation(format!(
                "k + m = {} leaves fewer than {MIN_MIDRANGE} midrange points (n = {n})",
                self.k + self.m
            )));
        }
        let right = sample.order_stat(n - self.k + 1);
        match self.mode {
            TailMode::OneTail if right <= 0.0 => Err(Error::Validation(format!(
                "one-tail requires X_(n-k+1) > 0, got {right}"
            ))),
            TailMode::TwoTail if right < 0.0 => Err(Error::Validation(format!(
                "two-tail requires X_(n-k+1) >= 0, got {right}"
            ))),
            TailMode::TwoTail if sample.order_stat(self.m) > 0.0 => {
                Err(Error::Validation(format!(
                    "two-tail requires X_(m) <= 0, got {}",
                    sample.order_stat(self.m)
                )))
            }
            _ => Ok(()),
        }
    }
}

/// Positional partition of `0..n` into left tail, midrange and right tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailSets {
    pub left: Range<usize>,
    pub mid: Range<usize>,
    pub right: Range<usize>,
    /// The value rule `X_i >= X_(n-k+1)` (or `X_i <= X_(m)`) would have
    /// selected more points than the positional rule.
    pub threshold_ties: bool,
}

/// Splits positions (0-based, ascending order) into the bottom `m`, the
/// middle, and the top `k`. Membership is positional so ties at a threshold
/// never change the tail sizes; a tie is flagged and logged.
pub fn tail_index_sets(sample: &SortedSample, window: &TailWindow) -> Result<TailSets> {
    window.validate(sample)?;
    let n = sample.len();
    let v = sample.values();
    let right = n - window.k..n;
    let left = 0..window.m;
    let mid = window.m..n - window.k;

    let right_tie = v[right.start - 1] >= v[right.start];
    let left_tie = window.m > 0 && v[window.m] <= v[window.m - 1];
    let threshold_ties = right_tie || left_tie;
    if threshold_ties {
        log::warn!(
            "ties at a tail threshold; tail membership resolved positionally (k = {}, m = {})",
            window.k,
            window.m
        );
    }
    Ok(TailSets {
        left,
        mid,
        right,
        threshold_ties,
    })
}

/// Sum of `ln(X_i / X_(n-k+1))` over the top `k` order statistics.
pub(crate) fn right_log_excess(sample: &SortedSample, k: usize) -> Result<f64> {
    let n = sample.len();
    if k < 1 || k > n {
        return Err(Error::Domain(format!("k = {k} outside 1..={n}")));
    }
    let threshold = sample.order_stat(n - k + 1);
    if threshold <= 0.0 {
        return Err(Error::Domain(format!(
            "right threshold X_(n-k+1) = {threshold} must be positive"
        )));
    }
    Ok(sample.values()[n - k..]
        .iter()
        .map(|x| (x / threshold).ln())
        .sum())
}

/// Sum of `ln(X_i / X_(m))` over the bottom `m` order statistics.
pub(crate) fn left_log_excess(sample: &SortedSample, m: usize) -> Result<f64> {
    let n = sample.len();
    if m < 1 || m > n {
        return Err(Error::Domain(format!("m = {m} outside 1..={n}")));
    }
    let threshold = sample.order_stat(m);
    if threshold >= 0.0 {
        return Err(Error::Domain(format!(
            "left threshold X_(m) = {threshold} must be negative"
        )));
    }
    Ok(sample.values()[..m]
        .iter()
        .map(|x| (x / threshold).ln())
        .sum())
}

/// Hill estimate of the right tail index from the top `k` order statistics.
pub fn hill_right(sample: &SortedSample, k: usize) -> Result<f64> {
    let s = right_log_excess(sample, k)?;
    if s <= 0.0 {
        return Err(Error::Degenerate(format!("top {k} order statistics are all equal")));
    }
    Ok(k as f64 / s)
}

/// Hill estimate of the left tail index from the bottom `m` order statistics.
pub fn hill_left(sample: &SortedSample, m: usize) -> Result<f64> {
    let s = left_log_excess(sample, m)?;
    if s <= 0.0 {
        return Err(Error::Degenerate(format!("bottom {m} order statistics are all equal")));
    }
    Ok(m as f64 / s)
}

/// Unconstrained maximiser of the semiparametric likelihood: Hill indices,
/// tail scales matching the empirical tail fractions, and `1/n` midrange
/// weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnconstrainedFit {
    pub alpha_r: f64,
    pub c_r: f64,
    pub alpha_l: Option<f64>,
    pub c_l: Option<f64>,
    pub p_bar: f64,
}

pub fn unconstrained_fit(sample: &SortedSample, window: &TailWindow) -> Result<UnconstrainedFit> {
    window.validate(sample)?;
    let n = sample.len();
    let nf = n as f64;
    let alpha_r = hill_right(sample, window.k)?;
    let c_r = window.k as f64 / nf * sample.order_stat(n - window.k + 1).powf(alpha_r);
    let (alpha_l, c_l) = if window.is_two_tail() {
        let alpha_l = hill_left(sample, window.m)?;
        let c_l = window.m as f64 / nf * (-sample.order_stat(window.m)).powf(alpha_l);
        (Some(alpha_l), Some(c_l))
    } else {
        (None, None)
    };
    Ok(UnconstrainedFit {
        alpha_r,
        c_r,
        alpha_l,
        c_l,
        p_bar: 1.0 / nf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::tail_model::HeavyTailLaw;
    use std::f64::consts::E;

    fn toy() -> SortedSample {
        SortedSample::new(vec![1.0, 0.1, E, 0.5, 0.2]).unwrap()
    }

    #[test]
    fn make_sorted_examples() {
        assert_eq!(make_sorted(vec![3.0, 1.0, 2.0]).unwrap().values(), &[1.0, 2.0, 3.0]);
        assert_eq!(make_sorted(vec![5.0]).unwrap().values(), &[5.0]);
        assert_eq!(make_sorted(vec![1.0, 1.0, 2.0]).unwrap().values(), &[1.0, 1.0, 2.0]);
        assert!(matches!(make_sorted(vec![]), Err(Error::Data(_))));
        assert!(matches!(make_sorted(vec![1.0, f64::NAN]), Err(Error::Data(_))));
        assert!(matches!(make_sorted(vec![f64::INFINITY]), Err(Error::Data(_))));
    }

    #[test]
    fn window_validation() {
        let s = SortedSample::new((1..=10).map(f64::from).collect()).unwrap();
        assert!(TailWindow::one_tail(2).validate(&s).is_ok());
        assert!(TailWindow::one_tail(1).validate(&s).is_err());
        assert!(TailWindow::one_tail(7).validate(&s).is_ok());
        assert!(TailWindow::one_tail(8).validate(&s).is_err());
        assert!(TailWindow::one_tail(10).validate(&s).is_err());
        // all-positive data cannot be two-tailed
        assert!(TailWindow::two_tail(2, 2).validate(&s).is_err());
        let mixed = SortedSample::new((-5..5).map(f64::from).collect()).unwrap();
        assert!(TailWindow::two_tail(2, 2).validate(&mixed).is_ok());
    }

    #[test]
    fn partition_examples() {
        let s = SortedSample::new((1..=10).map(f64::from).collect()).unwrap();
        let sets = tail_index_sets(&s, &TailWindow::one_tail(2)).unwrap();
        assert_eq!(sets.right, 8..10);
        assert_eq!(sets.mid, 0..8);
        assert!(sets.left.is_empty());

        let mixed = SortedSample::new(vec![-3.0, -2.0, -1.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let sets = tail_index_sets(&mixed, &TailWindow::two_tail(2, 2)).unwrap();
        assert_eq!((sets.left, sets.mid, sets.right), (0..2, 2..7, 7..9));
    }

    #[test]
    fn ties_resolved_positionally() {
        let s = SortedSample::new(vec![0.5, 0.7, 1.0, 2.0, 2.0, 2.0, 3.0]).unwrap();
        let sets = tail_index_sets(&s, &TailWindow::one_tail(2)).unwrap();
        assert_eq!(sets.right, 5..7);
        assert!(sets.threshold_ties);
        let clean = tail_index_sets(&toy(), &TailWindow::one_tail(2)).unwrap();
        assert_eq!((clean.mid, clean.right), (0..3, 3..5));
        assert!(!clean.threshold_ties);
        assert!(tail_index_sets(&toy(), &TailWindow::one_tail(3)).is_err());
    }

    #[test]
    fn hill_examples() {
        let s = toy();
        assert!((hill_right(&s, 2).unwrap() - 2.0).abs() < 1e-15);
        let scaled = s.scaled(7.3);
        assert!((hill_right(&scaled, 2).unwrap() - 2.0).abs() < 1e-14);

        let left = SortedSample::new(vec![-E, -1.0, 0.5, 1.0, 2.0]).unwrap();
        assert!((hill_left(&left, 2).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(hill_left(&s, 2), Err(Error::Domain(_))));

        let flat = SortedSample::new(vec![0.1, 1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(hill_right(&flat, 3), Err(Error::Degenerate(_))));
        let neg = SortedSample::new(vec![-3.0, -2.0, -1.0]).unwrap();
        assert!(matches!(hill_right(&neg, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn hill_on_pareto_draws() {
        let law = HeavyTailLaw::pareto(2.0, 1.0).unwrap();
        let s = SortedSample::new(law.sample(10_000, &mut stream(21)).unwrap()).unwrap();
        assert!((hill_right(&s, 200).unwrap() - 2.0).abs() < 0.45);
        let mirrored = s.negated();
        let a = hill_left(&mirrored, 200).unwrap();
        assert!((a - hill_right(&s, 200).unwrap()).abs() < 1e-12);
        assert!((a - 2.0).abs() < 0.45);
    }

    #[test]
    fn unconstrained_fit_toy() {
        let fit = unconstrained_fit(&toy(), &TailWindow::one_tail(2)).unwrap();
        assert!((fit.alpha_r - 2.0).abs() < 1e-15);
        assert!((fit.c_r - 0.4).abs() < 1e-15);
        assert_eq!(fit.p_bar, 0.2);
        // implied tail mass is exactly k/n
        assert!((fit.c_r * toy().order_stat(4).powf(-fit.alpha_r) - 0.4).abs() < 1e-15);

        let big = SortedSample::new(vec![0.01, 0.02, 0.03, 0.04, 0.05, 0.1, 0.2, 0.5, 1.0, E]).unwrap();
        let fit = unconstrained_fit(&big, &TailWindow::one_tail(2)).unwrap();
        assert!((fit.alpha_r - 2.0).abs() < 1e-15);
        assert!((fit.c_r - 0.2).abs() < 1e-15);
        assert_eq!(fit.p_bar, 0.1);
        assert!(fit.alpha_l.is_none() && fit.c_l.is_none());

        let scaled = unconstrained_fit(&big.scaled(10.0), &TailWindow::one_tail(2)).unwrap();
        assert!((scaled.alpha_r - fit.alpha_r).abs() < 1e-14);
        assert!((scaled.c_r / (fit.c_r * 10f64.powf(fit.alpha_r)) - 1.0).abs() < 1e-12);
    }
}
