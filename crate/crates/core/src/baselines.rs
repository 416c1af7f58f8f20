//! Comparison intervals: normal approximation and the subsample bootstrap.

use crate::error::{Error, Result};
use crate::interval::{check_level, ConfidenceInterval, Method};
use crate::special::normal_two_sided;
use rand::Rng;

/// Sample mean and the 1/n-divisor standard deviation.
pub fn studentized_stats(values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 observations, got {}",
            values.len()
        )));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}

/// `mean -/+ z S_n / sqrt(n)`.
pub fn normal_ci(values: &[f64], level: f64) -> Result<ConfidenceInterval> {
    check_level(level)?;
    let (mean, s) = studentized_stats(values)?;
    if s == 0.0 {
        return Err(Error::Degenerate("zero sample standard deviation".into()));
    }
    let z = normal_two_sided(level)?;
    let half = z * s / (values.len() as f64).sqrt();
    Ok(ConfidenceInterval::new(mean - half, mean + half, level, Method::Normal)
        .with("mean", mean)
        .with("s_n", s)
        .with("z", z))
}

/// The `ceil(level * B)`-th smallest of `abs_t`.
pub fn bootstrap_quantile(abs_t: &[f64], level: f64) -> Result<f64> {
    if abs_t.is_empty() {
        return Err(Error::Domain("no bootstrap statistics".into()));
    }
    if !(level > 0.0 && level <= 1.0) {
        return Err(Error::Domain(format!("level must lie in (0,1], got {level}")));
    }
    let mut sorted = abs_t.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(select_sorted(&sorted, level))
}

fn select_sorted(sorted: &[f64], level: f64) -> f64 {
    let b = sorted.len();
    // products such as 0.9 * 1000 land a hair above the integer
    let rank = (level * b as f64 - 1e-9).ceil().clamp(1.0, b as f64) as usize;
    sorted[rank - 1]
}

/// Studentized subsample-bootstrap statistics `|T*|` for one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapDraws {
    mean: f64,
    s_n: f64,
    n: usize,
    pub n1: usize,
    /// `|T*|` in ascending order.
    pub abs_t: Vec<f64>,
    /// Resamples drawn again because every value in them coincided.
    pub redraws: usize,
}

impl BootstrapDraws {
    /// Draws `b` resamples of size `n1` with replacement and records
    /// `|sqrt(n1) (mean* - mean) / S*|`.
    pub fn draw<R: Rng + ?Sized>(values: &[f64], n1: usize, b: usize, rng: &mut R) -> Result<Self> {
        let n = values.len();
        if n1 < 2 || n1 > n {
            return Err(Error::Domain(format!("subsample size must lie in 2..={n}, got {n1}")));
        }
        if b < 100 {
            return Err(Error::Domain(format!("need at least 100 resamples, got {b}")));
        }
        let (mean, s_n) = studentized_stats(values)?;
        if s_n == 0.0 {
            return Err(Error::Degenerate("zero sample standard deviation".into()));
        }
        let max_redraws = b / 10;
        let mut redraws = 0;
        let mut abs_t = Vec::with_capacity(b);
        let mut buf = vec![0.0; n1];
        let sqrt_n1 = (n1 as f64).sqrt();
        while abs_t.len() < b {
            for slot in buf.iter_mut() {
                *slot = values[rng.random_range(0..n)];
            }
            let (m, s) = studentized_stats(&buf)?;
            if s == 0.0 {
                redraws += 1;
                if redraws > max_redraws {
                    return Err(Error::Data(format!(
                        "more than {max_redraws} constant resamples of size {n1}"
                    )));
                }
                continue;
            }
            abs_t.push((sqrt_n1 * (m - mean) / s).abs());
        }
        if redraws > 0 {
            log::debug!("{redraws} constant bootstrap resamples redrawn");
        }
        abs_t.sort_by(f64::total_cmp);
        Ok(Self {
            mean,
            s_n,
            n,
            n1,
            abs_t,
            redraws,
        })
    }

    pub fn critical_value(&self, level: f64) -> f64 {
        select_sorted(&self.abs_t, level)
    }

    /// `mean -/+ x_hat S_n / sqrt(n)`.
    pub fn interval(&self, level: f64) -> Result<ConfidenceInterval> {
        check_level(level)?;
        let x = self.critical_value(level);
        let half = x * self.s_n / (self.n as f64).sqrt();
        Ok(
            ConfidenceInterval::new(self.mean - half, self.mean + half, level, Method::Bootstrap)
                .with("x_hat", x)
                .with("n1", self.n1 as f64)
                .with("resamples", self.abs_t.len() as f64)
                .with("redraws", self.redraws as f64),
        )
    }
}

pub fn subsample_bootstrap_ci<R: Rng + ?Sized>(
    values: &[f64],
    n1: usize,
    b: usize,
    level: f64,
    rng: &mut R,
) -> Result<ConfidenceInterval> {
    check_level(level)?;
    BootstrapDraws::draw(values, n1, b, rng)?.interval(level)
}
