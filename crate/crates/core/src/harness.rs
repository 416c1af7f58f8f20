//! Monte Carlo coverage experiments and single-sample diagnostics.

use crate::baselines::{normal_ci, BootstrapDraws};
use crate::el::{ElOptions, ElProblem, SolverOptions};
use crate::error::{Error, Result};
use crate::interval::{check_level, extended_real, Method};
use crate::rng::{substream, Purpose};
use crate::special::chi2_1_cdf;
use crate::special::chi2_quantile;
use crate::tail_fit::{hill_right, make_sorted, SortedSample, TailWindow, MIN_MIDRANGE};
use crate::tail_model::{optimal_k_star, practical_k, HeavyTailLaw};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest share of replications a method may fail on before the whole
/// experiment is rejected.
pub const MAX_FAILURE_SHARE: f64 = 0.05;

/// Tail sample size: fixed, or from the asymptotically optimal rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "KRaw", into = "KRaw")]
pub enum KChoice {
    Fixed(usize),
    Formula,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum KRaw {
    Number(usize),
    Word(String),
}

impl TryFrom<KRaw> for KChoice {
    type Error = String;

    fn try_from(raw: KRaw) -> std::result::Result<Self, String> {
        match raw {
            KRaw::Number(k) => Ok(KChoice::Fixed(k)),
            KRaw::Word(w) if w == "formula" => Ok(KChoice::Formula),
            KRaw::Word(w) => Err(format!("k must be an integer or \"formula\", got {w:?}")),
        }
    }
}

impl From<KChoice> for KRaw {
    fn from(k: KChoice) -> Self {
        match k {
            KChoice::Fixed(k) => KRaw::Number(k),
            KChoice::Formula => KRaw::Word("formula".into()),
        }
    }
}

/// A coverage experiment: `reps` samples of size `n` from `law`, one-tail
/// windows of size `k`, bootstrap subsamples of size `n1` (default `k`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub law: HeavyTailLaw,
    pub n: usize,
    pub reps: usize,
    pub k: KChoice,
    pub n1: Option<usize>,
    pub resamples: usize,
    pub levels: Vec<f64>,
    pub methods: Vec<Method>,
    pub seed: u64,
}

/// Checked experiment with `k` and `n1` resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedExperiment {
    pub law: HeavyTailLaw,
    pub true_mean: f64,
    pub n: usize,
    pub reps: usize,
    pub k: usize,
    pub n1: usize,
    pub resamples: usize,
    pub levels: Vec<f64>,
    pub methods: Vec<Method>,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn resolve(&self) -> Result<ResolvedExperiment> {
        let true_mean = self.law.validated()?.true_mean().finite().ok_or_else(|| {
            Error::Domain(format!("{} has no finite mean", self.law.label()))
        })?;
        if self.reps == 0 {
            return Err(Error::Validation("reps must be positive".into()));
        }
        if self.levels.is_empty() || self.methods.is_empty() {
            return Err(Error::Validation("need at least one level and one method".into()));
        }
        for &l in &self.levels {
            check_level(l).map_err(|e| Error::Validation(e.to_string()))?;
        }
        let k = match self.k {
            KChoice::Fixed(k) => k,
            KChoice::Formula => {
                let consts = self.law.second_order_constants();
                practical_k(optimal_k_star(&consts, self.n)?)?
            }
        };
        if k < 2 || k + MIN_MIDRANGE > self.n {
            return Err(Error::Validation(format!(
                "k = {k} outside 2..={} for n = {}",
                self.n.saturating_sub(MIN_MIDRANGE),
                self.n
            )));
        }
        let n1 = self.n1.unwrap_or(k);
        if self.methods.contains(&Method::Bootstrap) {
            if n1 < 2 || n1 > self.n {
                return Err(Error::Validation(format!("n1 = {n1} outside 2..={}", self.n)));
            }
            if self.resamples < 100 {
                return Err(Error::Validation(format!(
                    "need at least 100 bootstrap resamples, got {}",
                    self.resamples
                )));
            }
        }
        let mut methods = self.methods.clone();
        methods.sort();
        methods.dedup();
        Ok(ResolvedExperiment {
            law: self.law,
            true_mean,
            n: self.n,
            reps: self.reps,
            k,
            n1,
            resamples: self.resamples,
            levels: self.levels.clone(),
            methods,
            seed: self.seed,
        })
    }
}

/// Coverage of one method at one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub method: Method,
    pub level: f64,
    pub coverage: f64,
    pub hits: usize,
    /// Replications that produced an interval.
    pub trials: usize,
    pub failures: usize,
    /// Intervals with an infinite endpoint; they are scored like any other.
    pub unbounded: usize,
    #[serde(with = "extended_real")]
    pub median_lower: f64,
    #[serde(with = "extended_real")]
    pub median_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub law: HeavyTailLaw,
    pub label: String,
    pub true_mean: f64,
    pub n: usize,
    pub reps: usize,
    pub k: usize,
    pub n1: usize,
    pub resamples: usize,
    pub seed: u64,
    pub rows: Vec<CoverageRow>,
}

impl CoverageReport {
    pub fn row(&self, method: Method, level: f64) -> Option<&CoverageRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && (r.level - level).abs() < 1e-12)
    }
}

type Cell = std::result::Result<(f64, f64), String>;

fn draw_sample(law: &HeavyTailLaw, n: usize, seed: u64, rep: usize) -> Result<SortedSample> {
    let mut rng = substream(seed, rep as u64, Purpose::Sample);
    make_sorted(law.sample(n, &mut rng)?)
}

/// Intervals for one replication, ordered method-major then by level.
fn replicate(exp: &ResolvedExperiment, rep: usize, opts: &ElOptions) -> Result<Vec<Cell>> {
    let sample = draw_sample(&exp.law, exp.n, exp.seed, rep)?;
    let mut out = Vec::with_capacity(exp.methods.len() * exp.levels.len());
    for method in &exp.methods {
        match method {
            Method::El => match ElProblem::new(&sample, TailWindow::one_tail(exp.k)) {
                Ok(problem) => {
                    for &level in &exp.levels {
                        out.push(
                            problem
                                .interval(level, opts)
                                .map(|ci| (ci.lower, ci.upper))
                                .map_err(|e| e.to_string()),
                        );
                    }
                }
                Err(e) => out.extend(exp.levels.iter().map(|_| Err(e.to_string()))),
            },
            Method::Normal => {
                for &level in &exp.levels {
                    out.push(
                        normal_ci(sample.values(), level)
                            .map(|ci| (ci.lower, ci.upper))
                            .map_err(|e| e.to_string()),
                    );
                }
            }
            Method::Bootstrap => {
                let mut rng = substream(exp.seed, rep as u64, Purpose::Bootstrap);
                match BootstrapDraws::draw(sample.values(), exp.n1, exp.resamples, &mut rng) {
                    Ok(draws) => {
                        for &level in &exp.levels {
                            out.push(
                                draws
                                    .interval(level)
                                    .map(|ci| (ci.lower, ci.upper))
                                    .map_err(|e| e.to_string()),
                            );
                        }
                    }
                    Err(e) => out.extend(exp.levels.iter().map(|_| Err(e.to_string()))),
                }
            }
        }
    }
    Ok(out)
}

fn lower_median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    values[(values.len() - 1) / 2]
}

/// Runs the experiment with default solver settings.
/// EL sides on which the ratio never reaches the cutoff count as infinite
/// endpoints.
pub fn run_coverage(config: &ExperimentConfig) -> Result<CoverageReport> {
    run_coverage_with(config, &harness_el_options())
}

/// EL settings used by the experiments: default solver, half-line intervals
/// allowed.
pub fn harness_el_options() -> ElOptions {
    let mut opts = ElOptions::default();
    opts.interval.allow_unbounded = true;
    opts
}

/// Runs the experiment. Replications run in parallel but each draws from its
/// own substream, so the report does not depend on the thread count.
pub fn run_coverage_with(config: &ExperimentConfig, opts: &ElOptions) -> Result<CoverageReport> {
    let exp = config.resolve()?;
    let cells: Vec<Vec<Cell>> = (0..exp.reps)
        .into_par_iter()
        .map(|rep| replicate(&exp, rep, opts))
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut idx = 0;
    for &method in &exp.methods {
        for &level in &exp.levels {
            let mut lowers = Vec::with_capacity(exp.reps);
            let mut uppers = Vec::with_capacity(exp.reps);
            let mut hits = 0;
            let mut failures = 0;
            let mut unbounded = 0;
            let mut first_error = None;
            for rep in &cells {
                match &rep[idx] {
                    Ok((lo, hi)) => {
                        if *lo <= exp.true_mean && exp.true_mean <= *hi {
                            hits += 1;
                        }
                        if !(lo.is_finite() && hi.is_finite()) {
                            unbounded += 1;
                        }
                        lowers.push(*lo);
                        uppers.push(*hi);
                    }
                    Err(e) => {
                        failures += 1;
                        first_error.get_or_insert_with(|| e.clone());
                    }
                }
            }
            if failures > 0 {
                log::warn!(
                    "{method} at level {level}: {failures} of {} replications failed; first: {}",
                    exp.reps,
                    first_error.as_deref().unwrap_or("")
                );
            }
            if failures as f64 > MAX_FAILURE_SHARE * exp.reps as f64 {
                return Err(Error::Experiment(format!(
                    "{method} at level {level} failed in {failures} of {} replications (first: {})",
                    exp.reps,
                    first_error.unwrap_or_default()
                )));
            }
            let trials = lowers.len();
            rows.push(CoverageRow {
                method,
                level,
                coverage: hits as f64 / trials as f64,
                hits,
                trials,
                failures,
                unbounded,
                median_lower: lower_median(&mut lowers),
                median_upper: lower_median(&mut uppers),
            });
            idx += 1;
        }
    }
    Ok(CoverageReport {
        law: exp.law,
        label: exp.law.label(),
        true_mean: exp.true_mean,
        n: exp.n,
        reps: exp.reps,
        k: exp.k,
        n1: exp.n1,
        resamples: exp.resamples,
        seed: exp.seed,
        rows,
    })
}

/// Coverage for each `k`, reusing the same samples (paired by seed). With
/// `n1` unset the bootstrap subsample follows `k`.
pub fn sweep_k(config: &ExperimentConfig, ks: &[usize]) -> Result<Vec<CoverageReport>> {
    if ks.is_empty() {
        return Err(Error::Validation("empty k grid".into()));
    }
    ks.iter()
        .map(|&k| {
            let mut c = config.clone();
            c.k = KChoice::Fixed(k);
            run_coverage(&c)
        })
        .collect()
}

/// `l(mu0)` at the true mean for every replication (`+inf` when infeasible).
pub fn ratio_at_truth(config: &ExperimentConfig) -> Result<Vec<f64>> {
    let exp = config.resolve()?;
    let opts = SolverOptions::default();
    (0..exp.reps)
        .into_par_iter()
        .map(|rep| {
            let sample = draw_sample(&exp.law, exp.n, exp.seed, rep)?;
            let problem = ElProblem::new(&sample, TailWindow::one_tail(exp.k))?;
            Ok(problem.el_ratio(exp.true_mean, &opts)?.l_value)
        })
        .collect()
}

/// Agreement of a set of statistics with the chi-square(1) law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// Kolmogorov distance between the empirical CDF and chi-square(1).
    pub ks_distance: f64,
    /// `(level, share of values at or below the level quantile)`.
    pub below_quantile: Vec<(f64, f64)>,
}

pub fn chi2_calibration(values: &[f64], levels: &[f64]) -> Result<Calibration> {
    if values.is_empty() {
        return Err(Error::Domain("no statistics to calibrate".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut ks = 0.0f64;
    for (i, &x) in v.iter().enumerate() {
        let f = if x.is_finite() { chi2_1_cdf(x) } else { 1.0 };
        ks = ks.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    let below_quantile = levels
        .iter()
        .map(|&l| {
            let q = chi2_quantile(l, 1)?;
            Ok((l, v.iter().filter(|&&x| x <= q).count() as f64 / n))
        })
        .collect::<Result<_>>()?;
    Ok(Calibration {
        ks_distance: ks,
        below_quantile,
    })
}

/// `l(mu)` along a grid; infeasible means and solver failures give `+inf`.
pub fn profile_curve(sample: &SortedSample, window: TailWindow, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    let problem = ElProblem::new(sample, window)?;
    let opts = SolverOptions::default();
    Ok(grid
        .iter()
        .map(|&mu| {
            let l = match problem.el_ratio(mu, &opts) {
                Ok(p) => p.l_value,
                Err(e) => {
                    log::debug!("l({mu}) unavailable: {e}");
                    f64::INFINITY
                }
            };
            (mu, l)
        })
        .collect())
}

/// Bootstrap subsample size used alongside each `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum N1Rule {
    /// `n1 = k`.
    EqualK,
    Fixed(usize),
}

impl N1Rule {
    pub fn n1(&self, k: usize) -> usize {
        match *self {
            N1Rule::EqualK => k,
            N1Rule::Fixed(n1) => n1,
        }
    }
}

/// Interval endpoints of one method for one `k`; `error` is set instead when
/// the method failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointCell {
    pub method: Method,
    /// `None` when the method failed; may be infinite for a half-line.
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointRow {
    pub k: usize,
    pub n1: usize,
    pub cells: Vec<EndpointCell>,
}

/// Settings for [`endpoints_vs_k`].
#[derive(Debug, Clone, PartialEq)]
pub struct EndpointSweep {
    pub level: f64,
    pub methods: Vec<Method>,
    pub n1_rule: N1Rule,
    pub resamples: usize,
    pub seed: u64,
}

/// Interval endpoints on one sample across a grid of tail sizes. Every `k`
/// is validated up front; per-`k` failures are recorded in the row.
pub fn endpoints_vs_k(sample: &SortedSample, ks: &[usize], sweep: &EndpointSweep) -> Result<Vec<EndpointRow>> {
    check_level(sweep.level)?;
    if ks.is_empty() {
        return Err(Error::Validation("empty k grid".into()));
    }
    for &k in ks {
        TailWindow::one_tail(k).validate(sample)?;
    }
    let opts = harness_el_options();
    let cell = |method: Method, r: Result<(f64, f64)>| match r {
        Ok((lo, hi)) => EndpointCell {
            method,
            lower: Some(lo),
            upper: Some(hi),
            error: None,
        },
        Err(e) => EndpointCell {
            method,
            lower: None,
            upper: None,
            error: Some(e.to_string()),
        },
    };
    ks.par_iter()
        .map(|&k| {
            let n1 = sweep.n1_rule.n1(k);
            let cells = sweep
                .methods
                .iter()
                .map(|&method| {
                    let r = match method {
                        Method::El => ElProblem::new(sample, TailWindow::one_tail(k))
                            .and_then(|p| p.interval(sweep.level, &opts)),
                        Method::Normal => normal_ci(sample.values(), sweep.level),
                        Method::Bootstrap => {
                            let mut rng = substream(sweep.seed, k as u64, Purpose::Bootstrap);
                            BootstrapDraws::draw(sample.values(), n1, sweep.resamples, &mut rng)
                                .and_then(|d| d.interval(sweep.level))
                        }
                    };
                    cell(method, r.map(|ci| (ci.lower, ci.upper)))
                })
                .collect();
            Ok(EndpointRow { k, n1, cells })
        })
        .collect()
}

/// Hill estimates of the right tail index across `ks`.
pub fn hill_curve(sample: &SortedSample, ks: &[usize]) -> Result<Vec<(usize, f64)>> {
    ks.iter()
        .map(|&k| {
            TailWindow::one_tail(k).validate(sample)?;
            Ok((k, hill_right(sample, k)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(methods: Vec<Method>) -> ExperimentConfig {
        ExperimentConfig {
            law: HeavyTailLaw::frechet(2.0).unwrap(),
            n: 300,
            reps: 40,
            k: KChoice::Fixed(20),
            n1: None,
            resamples: 200,
            levels: vec![0.90, 0.95],
            methods,
            seed: 7,
        }
    }

    #[test]
    fn resolve_checks() {
        let mut c = small(vec![Method::Normal]);
        assert_eq!(c.resolve().unwrap().n1, 20);
        c.k = KChoice::Fixed(298);
        assert!(matches!(c.resolve(), Err(Error::Validation(_))));
        c.k = KChoice::Fixed(20);
        c.levels = vec![1.0];
        assert!(c.resolve().is_err());
        c.levels = vec![0.9];
        c.law = HeavyTailLaw::frechet(0.8).unwrap();
        assert!(matches!(c.resolve(), Err(Error::Domain(_))));
        c.law = HeavyTailLaw::frechet(2.0).unwrap();
        c.k = KChoice::Formula;
        assert!(matches!(c.resolve(), Err(Error::FormulaSingular(_))));
        c.law = HeavyTailLaw::burr(1.5, 3.0).unwrap();
        assert!(c.resolve().unwrap().k >= 2);
    }

    #[test]
    fn k_choice_serde() {
        let k: KChoice = serde_json::from_str("37").unwrap();
        assert_eq!(k, KChoice::Fixed(37));
        let f: KChoice = serde_json::from_str("\"formula\"").unwrap();
        assert_eq!(f, KChoice::Formula);
        assert!(serde_json::from_str::<KChoice>("\"auto\"").is_err());
        assert_eq!(serde_json::to_string(&KChoice::Fixed(5)).unwrap(), "5");
    }

    #[test]
    fn coverage_is_reproducible() {
        let c = small(Method::ALL.to_vec());
        let a = run_coverage(&c).unwrap();
        let b = run_coverage(&c).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 6);
        for r in &a.rows {
            assert_eq!(r.trials + r.failures, 40);
            assert!(r.coverage >= 0.0 && r.coverage <= 1.0);
            assert!(r.median_lower <= r.median_upper);
        }
    }

    #[test]
    fn normal_rows_do_not_depend_on_k() {
        let c = small(vec![Method::Normal]);
        let rows = sweep_k(&c, &[15, 25]).unwrap();
        assert_eq!(rows[0].rows, rows[1].rows);
    }

    #[test]
    fn method_order_does_not_change_draws() {
        let a = run_coverage(&small(vec![Method::Bootstrap, Method::Normal])).unwrap();
        let b = run_coverage(&small(vec![Method::Bootstrap])).unwrap();
        assert_eq!(a.row(Method::Bootstrap, 0.9), b.row(Method::Bootstrap, 0.9));
    }

    #[test]
    fn calibration_of_exact_quantiles() {
        // chi-square(1) quantiles at midpoints have Kolmogorov distance 1/(2N)
        let n = 200;
        let vals: Vec<f64> = (0..n)
            .map(|i| chi2_quantile((i as f64 + 0.5) / n as f64, 1).unwrap())
            .collect();
        let c = chi2_calibration(&vals, &[0.9]).unwrap();
        assert!((c.ks_distance - 0.5 / n as f64).abs() < 1e-9);
        assert!((c.below_quantile[0].1 - 0.9).abs() < 1e-12);
    }

    #[test]
    fn profile_curve_shape() {
        let s = draw_sample(&HeavyTailLaw::frechet(2.0).unwrap(), 500, 1, 0).unwrap();
        let w = TailWindow::one_tail(30);
        let mu_hat = ElProblem::new(&s, w).unwrap().el_point_estimate().unwrap();
        let grid: Vec<f64> = (0..21).map(|i| mu_hat - 0.5 + 0.05 * i as f64).collect();
        let curve = profile_curve(&s, w, &grid).unwrap();
        assert!(curve.iter().all(|&(_, l)| l >= 0.0));
        let (i_min, _) = curve
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .unwrap();
        assert_eq!(i_min, 10);
        assert!(profile_curve(&s, TailWindow::one_tail(500), &grid).is_err());
    }

    #[test]
    fn endpoint_rows() {
        let s = draw_sample(&HeavyTailLaw::frechet(1.8).unwrap(), 400, 2, 0).unwrap();
        let sweep = EndpointSweep {
            level: 0.95,
            methods: Method::ALL.to_vec(),
            n1_rule: N1Rule::EqualK,
            resamples: 200,
            seed: 3,
        };
        let rows = endpoints_vs_k(&s, &[20, 40], &sweep).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].n1, 40);
        let normal: Vec<_> = rows.iter().map(|r| r.cells[1].clone()).collect();
        assert_eq!(normal[0].lower, normal[1].lower);
        assert!(endpoints_vs_k(&s, &[20, 400], &sweep).is_err());
    }

    #[test]
    fn hill_curve_values() {
        let s = draw_sample(&HeavyTailLaw::pareto(3.0, 1.0).unwrap(), 2000, 5, 0).unwrap();
        let curve = hill_curve(&s, &[50, 100, 200]).unwrap();
        assert!(curve.iter().all(|&(_, a)| (a - 3.0).abs() < 0.8));
    }
}
