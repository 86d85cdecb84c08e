//! Simulation harness for the limit theorems and a deterministic quadrature
//! oracle for the limiting covariance factor.
//!
//! Replications run on a rayon pool of any size. Each replication reads only
//! its own uniform stream `(seed, replication)` and results are gathered in
//! replication order before aggregation, so a report is bit-identical for
//! every worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::Exact;
use crate::domains::{sample_stream_upper, tau_p, tau_p_at, TestDistribution};
use crate::error::{domain, Error, Result};
use crate::estimators::{gamma_from_statistic, t_ladder, TailWindow};
use crate::limit::{a_cov_closed, a_cov_recursive, reduced_cov, sigma_cov};
use crate::numeric::{simpson, CompensatedSum};

/// Relative tolerance on limit variances for orders 1 and 2.
pub const VARIANCE_TOL: f64 = 0.10;
/// Relative tolerance on limit variances for orders 3 and above.
pub const HIGH_ORDER_VARIANCE_TOL: f64 = 0.15;
/// Relative tolerance on limit covariances.
pub const COVARIANCE_TOL: f64 = 0.15;
/// Absolute tolerance on the mean of the normalized statistic.
pub const MEAN_TOL: f64 = 0.1;
/// Relative agreement required between recursion, closed form and
/// quadrature for a "consistent" verdict.
pub const ADJUDICATION_TOL: f64 = 1e-3;

/// Published values of `sigma(r, rho)` for `1 <= rho <= r <= 4` with unit
/// domain constants, as `(r, rho, value)`.
pub const PUBLISHED_COVARIANCES: [(usize, usize, i64); 10] = [
    (1, 1, 2),
    (2, 1, 3),
    (2, 2, 6),
    (3, 1, 4),
    (3, 2, 9),
    (3, 3, 20),
    (4, 1, 5),
    (4, 2, 11),
    (4, 3, 29),
    (4, 4, 70),
];

pub fn published_covariance(r: usize, rho: usize) -> Option<i64> {
    let (lo, hi) = (r.min(rho), r.max(rho));
    PUBLISHED_COVARIANCES
        .iter()
        .find(|&&(a, b, _)| a == hi && b == lo)
        .map(|&(_, _, v)| v)
}

/// What the statistic is centered at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Centering {
    /// `tau_p` at the random threshold `Y_{n-k,n}`; the limit is the
    /// extremal process.
    RandomThreshold,
    /// `tau_p` at `x_n = G^{-1}(1 - k/n)`; the limit is the reduced process.
    FixedThreshold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dist: TestDistribution,
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub pmax: usize,
    pub reps: usize,
    pub seed: u64,
    pub centering: Centering,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<TailWindow> {
        self.dist.validate()?;
        if self.reps < 2 {
            return domain(format!("need at least 2 replications, got {}", self.reps));
        }
        if self.pmax == 0 {
            return domain("pmax must be at least 1");
        }
        TailWindow::new(self.n, self.k, self.l)
    }
}

/// One replication's raw output.
#[derive(Debug, Clone, PartialEq)]
struct Replication {
    /// `sqrt(k) (T_n(p) - center_p) / tau_p(x_n)`
    normalized: Vec<f64>,
    statistic: Vec<f64>,
    /// `T_n(p)^{-1/p}`, NaN when undefined
    gamma_hat: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderSummary {
    pub p: usize,
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub variance_se: f64,
    /// Fourth standardized moment; 3 for a Gaussian.
    pub kurtosis: f64,
    pub predicted_variance: f64,
    pub statistic_mean: f64,
    pub gamma_hat_mean: f64,
    pub gamma_hat_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub quantity: String,
    pub empirical: f64,
    pub predicted: f64,
    pub standard_error: f64,
    /// Relative for variances and covariances, absolute for means.
    pub tolerance: f64,
    pub relative: bool,
    pub pass: bool,
}

impl Comparison {
    fn new(quantity: String, empirical: f64, predicted: f64, se: f64, tolerance: f64, relative: bool) -> Self {
        let gap = (empirical - predicted).abs();
        let pass = if relative {
            gap <= tolerance * predicted.abs()
        } else {
            gap <= tolerance
        };
        Self {
            quantity,
            empirical,
            predicted,
            standard_error: se,
            tolerance,
            relative,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub orders: Vec<OrderSummary>,
    /// Empirical covariance of the normalized statistics.
    pub covariance: Vec<Vec<f64>>,
    pub covariance_se: Vec<Vec<f64>>,
    /// Limit covariance matching the centering.
    pub predicted_covariance: Vec<Vec<f64>>,
    pub comparisons: Vec<Comparison>,
}

impl ExperimentReport {
    pub fn comparison(&self, quantity: &str) -> Option<&Comparison> {
        self.comparisons.iter().find(|c| c.quantity == quantity)
    }

    pub fn all_pass(&self) -> bool {
        self.comparisons.iter().all(|c| c.pass)
    }
}

/// Runs the experiment on the current rayon pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let window = config.validate()?;
    let reps = (0..config.reps as u64)
        .into_par_iter()
        .map(|rep| replicate(config, &window, rep))
        .collect::<Result<Vec<_>>>()?;
    summarize(config, &reps)
}

/// Runs the experiment on a dedicated pool with `threads` workers.
pub fn run_experiment_with_threads(config: &ExperimentConfig, threads: usize) -> Result<ExperimentReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Resource(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment(config))
}

fn replicate(config: &ExperimentConfig, window: &TailWindow, rep: u64) -> Result<Replication> {
    let sample = sample_stream_upper(&config.dist, config.seed, rep, config.n, config.k + 1)?;
    let ladder = t_ladder(&sample, window, config.pmax)?;
    let random_threshold = sample.upper(config.k);
    let root_k = (config.k as f64).sqrt();
    let mut normalized = Vec::with_capacity(config.pmax);
    let mut gamma_hat = Vec::with_capacity(config.pmax);
    for (idx, &t) in ladder.iter().enumerate() {
        let p = idx + 1;
        let scale = tau_p(&config.dist, p, window)?;
        let center = match config.centering {
            Centering::FixedThreshold => scale,
            Centering::RandomThreshold => tau_p_at(&config.dist, p, window, random_threshold)?,
        };
        normalized.push(root_k * (t - center) / scale);
        gamma_hat.push(gamma_from_statistic(t, p).unwrap_or(f64::NAN));
    }
    Ok(Replication {
        normalized,
        statistic: ladder,
        gamma_hat,
    })
}

fn mean(xs: impl Iterator<Item = f64>, count: usize) -> f64 {
    xs.collect::<CompensatedSum>().value() / count as f64
}

fn summarize(config: &ExperimentConfig, reps: &[Replication]) -> Result<ExperimentReport> {
    let pmax = config.pmax;
    let count = reps.len();
    let nf = count as f64;
    let dom = config.dist.domain_kind();

    let means: Vec<f64> = (0..pmax)
        .map(|p| mean(reps.iter().map(|r| r.normalized[p]), count))
        .collect();
    let centered = |r: &Replication, p: usize| r.normalized[p] - means[p];

    let mut covariance = vec![vec![0.0; pmax]; pmax];
    let mut covariance_se = vec![vec![0.0; pmax]; pmax];
    for a in 0..pmax {
        for b in a..pmax {
            let c = mean(reps.iter().map(|r| centered(r, a) * centered(r, b)), count) * nf / (nf - 1.0);
            // variance of the product estimates the sampling variance of c
            let m = mean(
                reps.iter().map(|r| (centered(r, a) * centered(r, b) - c).powi(2)),
                count,
            );
            let se = (m / nf).sqrt();
            covariance[a][b] = c;
            covariance[b][a] = c;
            covariance_se[a][b] = se;
            covariance_se[b][a] = se;
        }
    }

    let mut predicted = vec![vec![0.0; pmax]; pmax];
    for r in 1..=pmax {
        for rho in r..=pmax {
            let v = match config.centering {
                Centering::RandomThreshold => sigma_cov(r, rho, &dom)?,
                Centering::FixedThreshold => reduced_cov(r, rho, &dom)?,
            };
            predicted[r - 1][rho - 1] = v;
            predicted[rho - 1][r - 1] = v;
        }
    }

    let mut orders = Vec::with_capacity(pmax);
    for p in 0..pmax {
        let var = covariance[p][p];
        let m4 = mean(reps.iter().map(|r| centered(r, p).powi(4)), count);
        let m2 = var * (nf - 1.0) / nf;
        let finite: Vec<f64> = reps.iter().map(|r| r.gamma_hat[p]).filter(|g| g.is_finite()).collect();
        let (g_mean, g_se) = if finite.len() >= 2 {
            let gm = mean(finite.iter().copied(), finite.len());
            let gv = mean(finite.iter().map(|g| (g - gm).powi(2)), finite.len());
            (gm, (gv / finite.len() as f64).sqrt())
        } else {
            (f64::NAN, f64::NAN)
        };
        orders.push(OrderSummary {
            p: p + 1,
            mean: means[p],
            mean_se: (var / nf).sqrt(),
            variance: var,
            variance_se: covariance_se[p][p],
            kurtosis: if m2 > 0.0 { m4 / (m2 * m2) } else { f64::NAN },
            predicted_variance: predicted[p][p],
            statistic_mean: mean(reps.iter().map(|r| r.statistic[p]), count),
            gamma_hat_mean: g_mean,
            gamma_hat_se: g_se,
        });
    }

    let mut comparisons = Vec::new();
    for o in &orders {
        comparisons.push(Comparison::new(format!("mean({})", o.p), o.mean, 0.0, o.mean_se, MEAN_TOL, false));
    }
    for o in &orders {
        let tol = if o.p <= 2 { VARIANCE_TOL } else { HIGH_ORDER_VARIANCE_TOL };
        comparisons.push(Comparison::new(
            format!("var({})", o.p),
            o.variance,
            o.predicted_variance,
            o.variance_se,
            tol,
            true,
        ));
    }
    for a in 0..pmax {
        for b in a + 1..pmax {
            comparisons.push(Comparison::new(
                format!("cov({},{})", a + 1, b + 1),
                covariance[a][b],
                predicted[a][b],
                covariance_se[a][b],
                COVARIANCE_TOL,
                true,
            ));
        }
    }

    Ok(ExperimentReport {
        config: config.clone(),
        orders,
        covariance,
        covariance_se,
        predicted_covariance: predicted,
        comparisons,
    })
}

/// Grid and truncation of the two-dimensional quadrature oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOracleConfig {
    /// Simpson panels per axis; even and at least 64.
    pub grid: usize,
    /// Upper limit `S` replacing infinity; at least 40.
    pub truncation: f64,
}

impl Default for QuadratureOracleConfig {
    fn default() -> Self {
        Self {
            grid: 1024,
            truncation: 60.0,
        }
    }
}

impl QuadratureOracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid < 64 || !self.grid.is_multiple_of(2) {
            return domain(format!("grid must be even and >= 64, got {}", self.grid));
        }
        if !(self.truncation >= 40.0) || !self.truncation.is_finite() {
            return domain(format!("truncation must be >= 40, got {}", self.truncation));
        }
        Ok(())
    }
}

/// `a(r, rho) = int_0^S int_0^S e^{-max(s,t)} s^{r-1} t^{rho-1} / ((r-1)!(rho-1)!) ds dt`
/// by composite Simpson.
///
/// The kink of `e^{-max(s,t)}` on the diagonal is kept off the rule: for
/// each outer node `t` the inner integral is split at `s = t`, and both
/// halves get `grid` panels.
pub fn quadrature_oracle_a(r: usize, rho: usize, cfg: &QuadratureOracleConfig) -> Result<f64> {
    cfg.validate()?;
    if !(1..=8).contains(&r) || !(1..=8).contains(&rho) {
        return domain(format!("oracle supports orders 1..=8, got ({r}, {rho})"));
    }
    let fact = |m: usize| (1..m).map(|i| i as f64).product::<f64>();
    let (fr, frho) = (fact(r), fact(rho));
    let s_max = cfg.truncation;
    let inner = |t: f64| {
        let weight = |s: f64| s.powi(r as i32 - 1) / fr;
        let below = if t > 0.0 {
            (-t).exp() * simpson(weight, 0.0, t, cfg.grid)
        } else {
            0.0
        };
        let above = simpson(|s| (-s).exp() * weight(s), t, s_max, cfg.grid);
        below + above
    };
    Ok(simpson(
        |t| inner(t) * t.powi(rho as i32 - 1) / frho,
        0.0,
        s_max,
        cfg.grid,
    ))
}

/// Oracle value with a grid-halving convergence check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleEvaluation {
    pub r: usize,
    pub rho: usize,
    pub config: QuadratureOracleConfig,
    pub value: f64,
    /// Value on a grid of half the panels (never below 64).
    pub coarse_value: f64,
    pub coarse_grid: usize,
    pub closed_form: Exact,
}

pub fn evaluate_oracle(r: usize, rho: usize, cfg: &QuadratureOracleConfig) -> Result<OracleEvaluation> {
    let value = quadrature_oracle_a(r, rho, cfg)?;
    let coarse_grid = (cfg.grid / 2).max(64) & !1;
    let coarse_cfg = QuadratureOracleConfig {
        grid: coarse_grid,
        ..*cfg
    };
    Ok(OracleEvaluation {
        r,
        rho,
        config: *cfg,
        value,
        coarse_value: quadrature_oracle_a(r, rho, &coarse_cfg)?,
        coarse_grid,
        closed_form: a_cov_closed(r, rho)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Recursion, closed form and quadrature agree, and so does the
    /// published value when there is one.
    Consistent,
    /// The three computed routes agree but the published value differs.
    PublishedTableDiscrepancy,
    /// The computed routes disagree among themselves.
    OracleDisagreement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceVerdict {
    pub r: usize,
    pub rho: usize,
    pub recursion: Exact,
    pub closed_form: Exact,
    pub quadrature: f64,
    pub published: Option<i64>,
    pub verdict: Verdict,
}

/// Compares every `1 <= r <= rho <= pmax` across the three routes and the
/// published table.
pub fn adjudicate_covariance(pmax: usize, cfg: &QuadratureOracleConfig) -> Result<Vec<CovarianceVerdict>> {
    if !(1..=8).contains(&pmax) {
        return domain(format!("adjudication supports pmax in 1..=8, got {pmax}"));
    }
    let pairs: Vec<(usize, usize)> = (1..=pmax)
        .flat_map(|r| (r..=pmax).map(move |rho| (r, rho)))
        .collect();
    pairs
        .into_par_iter()
        .map(|(r, rho)| {
            let recursion = a_cov_recursive(r, rho)?;
            let closed_form = a_cov_closed(r, rho)?;
            let quadrature = quadrature_oracle_a(r, rho, cfg)?;
            let published = published_covariance(r, rho);
            let close = |a: f64, b: f64| (a - b).abs() <= ADJUDICATION_TOL * b.abs();
            let computed_agree = recursion == closed_form && close(quadrature, closed_form as f64);
            let verdict = if !computed_agree {
                Verdict::OracleDisagreement
            } else if published.is_some_and(|v| v as Exact != recursion) {
                Verdict::PublishedTableDiscrepancy
            } else {
                Verdict::Consistent
            };
            Ok(CovarianceVerdict {
                r,
                rho,
                recursion,
                closed_form,
                quadrature,
                published,
                verdict,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const PARETO1: TestDistribution = TestDistribution::Pareto { gamma: 1.0 };

    fn small_config(centering: Centering) -> ExperimentConfig {
        ExperimentConfig {
            dist: PARETO1,
            n: 2000,
            k: 50,
            l: 0,
            pmax: 3,
            reps: 40,
            seed: 99,
            centering,
        }
    }

    #[test]
    fn two_replications_produce_a_report() {
        let cfg = ExperimentConfig {
            reps: 2,
            ..small_config(Centering::FixedThreshold)
        };
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.orders.len(), 3);
        for o in &report.orders {
            assert!(o.variance_se > 0.0 && o.mean_se > 0.0);
        }
    }

    #[test]
    fn invalid_configs_rejected() {
        let cfg = ExperimentConfig {
            reps: 1,
            ..small_config(Centering::FixedThreshold)
        };
        assert!(run_experiment(&cfg).is_err());
        let cfg = ExperimentConfig {
            k: 2000,
            ..small_config(Centering::FixedThreshold)
        };
        assert!(run_experiment(&cfg).is_err());
    }

    #[test]
    fn report_is_symmetric_and_thread_independent() {
        let cfg = small_config(Centering::RandomThreshold);
        let one = run_experiment_with_threads(&cfg, 1).unwrap();
        let four = run_experiment_with_threads(&cfg, 4).unwrap();
        assert_eq!(one, four);
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(one.covariance[a][b], one.covariance[b][a]);
            }
        }
    }

    #[test]
    fn oracle_examples() {
        let cfg = QuadratureOracleConfig::default();
        assert!((quadrature_oracle_a(1, 1, &cfg).unwrap() - 2.0).abs() <= 1e-4);
        assert!((quadrature_oracle_a(2, 3, &cfg).unwrap() - 10.0).abs() <= 1e-3);
        assert!((quadrature_oracle_a(3, 4, &cfg).unwrap() - 35.0).abs() <= 5e-3);
    }

    #[test]
    fn oracle_config_limits() {
        let bad_grid = QuadratureOracleConfig { grid: 62, truncation: 60.0 };
        assert!(quadrature_oracle_a(1, 1, &bad_grid).is_err());
        let odd = QuadratureOracleConfig { grid: 101, truncation: 60.0 };
        assert!(quadrature_oracle_a(1, 1, &odd).is_err());
        let short = QuadratureOracleConfig { grid: 128, truncation: 30.0 };
        assert!(quadrature_oracle_a(1, 1, &short).is_err());
        assert!(quadrature_oracle_a(9, 1, &QuadratureOracleConfig::default()).is_err());
    }

    #[test]
    fn published_lookup_is_symmetric() {
        assert_eq!(published_covariance(1, 2), Some(3));
        assert_eq!(published_covariance(2, 1), Some(3));
        assert_eq!(published_covariance(2, 3), Some(9));
        assert_eq!(published_covariance(1, 5), None);
    }
}
