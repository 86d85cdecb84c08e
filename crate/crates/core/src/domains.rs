//! One reference distribution per extreme-value domain, with exact quantiles,
//! a reproducible sampler and the tail moments `m_p` used for centering.
//!
//! All distributions live on `X >= 1`, so `Y = log X >= 0`.
//!
//! | variant          | `1 - G(y)` on the log scale                   | domain      |
//! |------------------|-----------------------------------------------|-------------|
//! | `Pareto(g)`      | `exp(-g y)`                                   | Fréchet `g` |
//! | `PowerEndpoint`  | `((x0 - e^y) / (x0 - 1))^g`, `y < log x0`     | Weibull `g` |
//! | `StretchedTail`  | `exp(-y^2)`                                   | Gumbel      |

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::estimators::{SortedSample, TailWindow};
use crate::limit::DomainKind;
use crate::numeric::{adaptive_simpson, integrate_to_infinity, CompensatedSum};

/// Relative tolerance of every numerically integrated tail moment.
pub const QUADRATURE_REL_TOL: f64 = 1e-10;

/// Tail distance `y0 - x` beyond which the power-endpoint series is not used.
const SERIES_RADIUS: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestDistribution {
    Pareto { gamma: f64 },
    PowerEndpoint { gamma: f64, x0: f64 },
    StretchedTail,
}

impl TestDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TestDistribution::Pareto { gamma } => check_gamma(gamma),
            TestDistribution::PowerEndpoint { gamma, x0 } => {
                check_gamma(gamma)?;
                if !(x0 > 1.0 && x0.is_finite()) {
                    return domain(format!("endpoint x0 must exceed 1, got {x0}"));
                }
                Ok(())
            }
            TestDistribution::StretchedTail => Ok(()),
        }
    }

    pub fn domain_kind(&self) -> DomainKind {
        match *self {
            TestDistribution::Pareto { gamma } => DomainKind::Frechet { gamma },
            TestDistribution::PowerEndpoint { gamma, .. } => DomainKind::Weibull { gamma },
            TestDistribution::StretchedTail => DomainKind::Gumbel,
        }
    }

    /// Right endpoint `y0` of `Y`.
    pub fn log_endpoint(&self) -> f64 {
        match *self {
            TestDistribution::PowerEndpoint { x0, .. } => x0.ln(),
            _ => f64::INFINITY,
        }
    }

    /// `F(x)` on the original scale.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 1.0 {
            return 0.0;
        }
        1.0 - self.log_survival(x.ln())
    }

    /// `1 - G(y)`.
    pub fn log_survival(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 1.0;
        }
        match *self {
            TestDistribution::Pareto { gamma } => (-gamma * y).exp(),
            TestDistribution::PowerEndpoint { gamma, x0 } => {
                let y0 = x0.ln();
                if y >= y0 {
                    return 0.0;
                }
                // x0 - e^y = x0 (1 - e^{-(y0 - y)})
                (x0 * -(-(y0 - y)).exp_m1() / (x0 - 1.0)).powf(gamma)
            }
            TestDistribution::StretchedTail => (-y * y).exp(),
        }
    }

    /// `G^{-1}(1 - v)`: the log-scale quantile at upper-tail probability `v`.
    pub fn log_quantile_upper(&self, v: f64) -> f64 {
        match *self {
            TestDistribution::Pareto { gamma } => -v.ln() / gamma,
            TestDistribution::PowerEndpoint { gamma, x0 } => {
                (x0 - (x0 - 1.0) * v.powf(1.0 / gamma)).ln()
            }
            TestDistribution::StretchedTail => (-v.ln()).sqrt(),
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        domain(format!("gamma must be finite and positive, got {gamma}"))
    }
}

/// Exact inverse of `F` on the original scale.
pub fn quantile(dist: &TestDistribution, u: f64) -> Result<f64> {
    dist.validate()?;
    if !(u > 0.0 && u < 1.0) {
        return domain(format!("quantile level must lie in (0, 1), got {u}"));
    }
    Ok(match *dist {
        TestDistribution::Pareto { gamma } => (1.0 - u).powf(-1.0 / gamma),
        TestDistribution::PowerEndpoint { gamma, x0 } => {
            x0 - (x0 - 1.0) * (1.0 - u).powf(1.0 / gamma)
        }
        TestDistribution::StretchedTail => (-(-u).ln_1p()).sqrt().exp(),
    })
}

/// Reproducible stream of uniforms on the open interval `(0, 1)`.
///
/// A `(seed, stream)` pair selects an independent ChaCha8 keystream, so a
/// replication's draws depend only on its own index.
pub struct UniformStream {
    rng: ChaCha8Rng,
}

impl UniformStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(stream);
        Self { rng }
    }

    pub fn next_open01(&mut self) -> f64 {
        // 53 random bits centred in their cell: never 0, never 1
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

/// Upper-tail probabilities `v_1..v_n` of one stream.
fn tail_probabilities(seed: u64, stream: u64, n: usize) -> Vec<f64> {
    let mut u = UniformStream::new(seed, stream);
    (0..n).map(|_| u.next_open01()).collect()
}

/// `n` draws of `dist` from stream `stream`, log-transformed and sorted.
pub fn sample_stream(
    dist: &TestDistribution,
    seed: u64,
    stream: u64,
    n: usize,
) -> Result<SortedSample> {
    dist.validate()?;
    let ys = tail_probabilities(seed, stream, n)
        .into_iter()
        .map(|v| dist.log_quantile_upper(v))
        .collect();
    SortedSample::from_log_values(ys)
}

/// The largest `m` order statistics of the sample [`sample_stream`] would
/// draw; identical values, without transforming the lower part.
pub fn sample_stream_upper(
    dist: &TestDistribution,
    seed: u64,
    stream: u64,
    n: usize,
    m: usize,
) -> Result<SortedSample> {
    dist.validate()?;
    if m == 0 || m > n {
        return domain(format!("need 1 <= m <= n, got m={m}, n={n}"));
    }
    let mut v = tail_probabilities(seed, stream, n);
    // the largest Y correspond to the smallest upper-tail probabilities
    if m < n {
        v.select_nth_unstable_by(m - 1, f64::total_cmp);
        v.truncate(m);
    }
    let ys = v.into_iter().map(|v| dist.log_quantile_upper(v)).collect();
    SortedSample::from_upper(n, ys)
}

/// `n` iid draws keyed by `seed`.
pub fn sample_iid(dist: &TestDistribution, seed: u64, n: usize) -> Result<SortedSample> {
    sample_stream(dist, seed, 0, n)
}

/// `m_p(x) = int_x^{y0} (t - x)^{p-1} / (p-1)! (1 - G(t)) dt`, the `p`-fold
/// iterated integral of the survival function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailMoments {
    pub p: usize,
    pub x: f64,
    pub value: f64,
}

pub fn m_p_value(dist: &TestDistribution, p: usize, x: f64) -> Result<f64> {
    check_moment_args(dist, p, x)?;
    below_support_extension(p, x, |j| match *dist {
        TestDistribution::Pareto { gamma } => Ok(gamma.powi(-(j as i32)) * (-gamma * x.max(0.0)).exp()),
        TestDistribution::PowerEndpoint { gamma, x0 } => {
            let w = x0.ln() - x.max(0.0);
            if w <= SERIES_RADIUS {
                Ok(power_endpoint_series(gamma, x0, j, w))
            } else {
                Ok(cauchy_quadrature(dist, j, x.max(0.0)))
            }
        }
        TestDistribution::StretchedTail => Ok(cauchy_quadrature(dist, j, x.max(0.0))),
    })
}

/// [`m_p_value`] evaluated purely by quadrature of the single-integral form.
pub fn m_p_quadrature(dist: &TestDistribution, p: usize, x: f64) -> Result<f64> {
    check_moment_args(dist, p, x)?;
    below_support_extension(p, x, |j| Ok(cauchy_quadrature(dist, j, x.max(0.0))))
}

pub fn tail_moments(dist: &TestDistribution, p: usize, x: f64) -> Result<TailMoments> {
    Ok(TailMoments {
        p,
        x,
        value: m_p_value(dist, p, x)?,
    })
}

fn check_moment_args(dist: &TestDistribution, p: usize, x: f64) -> Result<()> {
    dist.validate()?;
    if p == 0 {
        return domain("m_p needs p >= 1");
    }
    if !x.is_finite() || x >= dist.log_endpoint() {
        return domain(format!(
            "m_p needs x below the endpoint {}, got {x}",
            dist.log_endpoint()
        ));
    }
    Ok(())
}

/// For `x < 0` the survival function is 1 on `[x, 0]`, so
/// `m_p(x) = sum_{q<p} m_{p-q}(0) (-x)^q / q! + (-x)^p / p!`.
/// For `x >= 0` this is just `at_zero_or_x(p)`.
fn below_support_extension<F>(p: usize, x: f64, at_zero_or_x: F) -> Result<f64>
where
    F: Fn(usize) -> Result<f64>,
{
    if x >= 0.0 {
        return at_zero_or_x(p);
    }
    let h = -x;
    let mut power = 1.0;
    let mut acc = CompensatedSum::new();
    for q in 0..p {
        if q > 0 {
            power *= h / q as f64;
        }
        acc.add(at_zero_or_x(p - q)? * power);
    }
    acc.add(power * h / p as f64);
    Ok(acc.value())
}

/// Power-endpoint moment from the expansion
/// `(1 - e^{-s})^g = s^g sum_m d_m s^m`, `s = y0 - t`; each term integrates
/// as a Beta integral:
/// `int_0^w (w-s)^{p-1}/(p-1)! s^{g+m} ds = w^{p+g+m} / prod_{j=1}^{p} (g+m+j)`.
fn power_endpoint_series(gamma: f64, x0: f64, p: usize, w: f64) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let scale = (x0 / (x0 - 1.0)).powf(gamma);
    // f_j: coefficients of (1 - e^{-s}) / s = sum (-1)^j s^j / (j+1)!
    const MAX_TERMS: usize = 400;
    let mut f = Vec::with_capacity(MAX_TERMS);
    let mut fact = 1.0;
    for j in 0..MAX_TERMS {
        fact *= (j + 1) as f64;
        f.push(if j % 2 == 0 { 1.0 } else { -1.0 } / fact);
        if fact.is_infinite() {
            break;
        }
    }
    // g = f^gamma by the J.C.P. Miller recurrence
    let mut g: Vec<f64> = vec![1.0];
    let mut total = CompensatedSum::new();
    let mut w_pow = w.powf(p as f64 + gamma);
    for m in 0..MAX_TERMS {
        if m > 0 {
            let mut acc = 0.0;
            for j in 1..=m.min(f.len() - 1) {
                acc += ((gamma + 1.0) * j as f64 - m as f64) * f[j] * g[m - j];
            }
            g.push(acc / m as f64);
            w_pow *= w;
        }
        let a = gamma + m as f64;
        let beta: f64 = (1..=p).map(|j| a + j as f64).product();
        let term = g[m] * w_pow / beta;
        total.add(term);
        if m > 4 && term.abs() <= 1e-18 * total.value().abs() {
            break;
        }
    }
    scale * total.value()
}

/// Single-integral form of `m_p` by adaptive quadrature, for `x >= 0`.
fn cauchy_quadrature(dist: &TestDistribution, p: usize, x: f64) -> f64 {
    let factorial: f64 = (1..p).map(|s| s as f64).product();
    let integrand = |t: f64| (t - x).powi(p as i32 - 1) / factorial * dist.log_survival(t);
    let y0 = dist.log_endpoint();
    if y0.is_finite() {
        adaptive_simpson(&integrand, x, y0, QUADRATURE_REL_TOL)
    } else {
        integrate_to_infinity(&integrand, x, 1.0, QUADRATURE_REL_TOL)
    }
}

/// Deterministic threshold `x_n = G^{-1}(1 - k/n)`.
pub fn threshold(dist: &TestDistribution, w: &TailWindow) -> f64 {
    dist.log_quantile_upper(w.k() as f64 / w.n() as f64)
}

/// `tau_p = (n/k) m_p(x_n)`.
pub fn tau_p(dist: &TestDistribution, p: usize, w: &TailWindow) -> Result<f64> {
    tau_p_at(dist, p, w, threshold(dist, w))
}

/// `(n/k) m_p(x)` at an arbitrary, possibly random, threshold `x`.
pub fn tau_p_at(dist: &TestDistribution, p: usize, w: &TailWindow, x: f64) -> Result<f64> {
    Ok(w.n() as f64 / w.k() as f64 * m_p_value(dist, p, x)?)
}
