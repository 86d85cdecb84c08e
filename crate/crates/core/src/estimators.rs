//! The sum-product tail statistics `T_n(p)` and their relatives.
//!
//! Everything works on the log scale `Y = log X`. With upper order statistics
//! `Y_{n,n} >= Y_{n-1,n} >= ...` the spacings are
//! `D_i = Y_{n-i+1,n} - Y_{n-i,n}` and a window `(n, k, l)` keeps
//! `i = l+1..=k`.
//!
//! `T_n(p)` has two implementations that must agree:
//!
//! * [`t_naive`] sums, over every ordered composition `(s_1..s_h)` of `p` and
//!   every strictly decreasing index chain `k >= i_1 > ... > i_h >= l+1`, the
//!   term `i_h * prod_m D_{i_m}^{s_m} / s_m!`, divided by `k`;
//! * [`t_fast`] evaluates the equivalent `p`-fold iterated integral of the
//!   empirical tail `(n/k)(1 - G_n)` from `Y_{n-k,n}` to `Y_{n-l,n}`, one
//!   spacing interval at a time.

use serde::{Deserialize, Serialize};

use crate::combinatorics::all_compositions;
use crate::error::{domain, Error, Result};
use crate::numeric::CompensatedSum;

/// Upper bound on the number of index chains [`t_naive`] will enumerate.
pub const NAIVE_CHAIN_BUDGET: f64 = 5.0e7;

/// Ascending log-scale observations.
///
/// A sample may hold only its upper part: `values` are then the largest
/// `values.len()` order statistics of a sample of size `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SortedSample {
    values: Vec<f64>,
    n: usize,
    below_support: bool,
}

impl SortedSample {
    /// Builds a full sample from log-scale values, sorting them.
    pub fn from_log_values(mut values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return domain("a sample needs at least two observations");
        }
        if values.iter().any(|y| !y.is_finite()) {
            return domain("sample values must be finite");
        }
        values.sort_by(f64::total_cmp);
        let below_support = values[0] < 0.0;
        let n = values.len();
        Ok(Self {
            values,
            n,
            below_support,
        })
    }

    /// Builds a sample of size `n` from its largest `upper.len()` order
    /// statistics.
    pub fn from_upper(n: usize, mut upper: Vec<f64>) -> Result<Self> {
        if upper.is_empty() || upper.len() > n || n < 2 {
            return domain(format!(
                "need 1 <= stored values ({}) <= n ({n}) and n >= 2",
                upper.len()
            ));
        }
        if upper.iter().any(|y| !y.is_finite()) {
            return domain("sample values must be finite");
        }
        upper.sort_by(f64::total_cmp);
        let below_support = upper[0] < 0.0;
        Ok(Self {
            values: upper,
            n,
            below_support,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Stored order statistics, ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of stored upper order statistics.
    pub fn stored(&self) -> usize {
        self.values.len()
    }

    /// `Y_{n-i,n}` for `i < stored()`.
    pub fn upper(&self, i: usize) -> f64 {
        self.values[self.values.len() - 1 - i]
    }

    /// True when some stored value is negative, i.e. some raw observation
    /// lay below 1.
    pub fn below_support(&self) -> bool {
        self.below_support
    }
}

/// Natural logs of positive observations, sorted ascending.
///
/// Values below 1 are accepted but set [`SortedSample::below_support`].
pub fn log_transform(raw: &[f64]) -> Result<SortedSample> {
    if let Some(bad) = raw.iter().find(|&&x| !(x > 0.0) || !x.is_finite()) {
        return domain(format!("observations must be positive and finite, got {bad}"));
    }
    SortedSample::from_log_values(raw.iter().map(|x| x.ln()).collect())
}

/// The index triple `0 <= l < k < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailWindow {
    n: usize,
    k: usize,
    l: usize,
}

impl TailWindow {
    pub fn new(n: usize, k: usize, l: usize) -> Result<Self> {
        if !(l < k && k < n) {
            return domain(format!("window needs 0 <= l < k < n, got n={n}, k={k}, l={l}"));
        }
        Ok(Self { n, k, l })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    fn check(&self, sample: &SortedSample) -> Result<()> {
        if self.n != sample.n() {
            return domain(format!(
                "window built for n={} applied to a sample of size {}",
                self.n,
                sample.n()
            ));
        }
        if self.k >= sample.stored() {
            return domain(format!(
                "window needs Y_(n-k) but only the top {} order statistics are stored",
                sample.stored()
            ));
        }
        Ok(())
    }
}

/// Spacings `D_i` for `i = l+1..=k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacingSet {
    l: usize,
    values: Vec<f64>,
}

impl SpacingSet {
    /// `D_i`, for `l < i <= k`.
    pub fn get(&self, i: usize) -> f64 {
        self.values[i - self.l - 1]
    }

    /// `(i, D_i)` pairs in increasing `i`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(j, &d)| (self.l + 1 + j, d))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// All spacings vanish, so every `T_n(p)` is zero.
    pub fn is_degenerate(&self) -> bool {
        self.values.iter().all(|&d| d == 0.0)
    }
}

pub fn spacings(sample: &SortedSample, w: &TailWindow) -> Result<SpacingSet> {
    w.check(sample)?;
    let values = (w.l + 1..=w.k)
        .map(|i| sample.upper(i - 1) - sample.upper(i))
        .collect();
    Ok(SpacingSet { l: w.l, values })
}

fn check_order(p: usize) -> Result<()> {
    if p == 0 {
        return domain("order p must be at least 1");
    }
    Ok(())
}

/// `D^s / s!` for `s = 0..=p`.
fn scaled_powers(d: f64, p: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(p + 1);
    out.push(1.0);
    for s in 1..=p {
        let prev = out[s - 1];
        out.push(prev * d / s as f64);
    }
    out
}

fn log_binomial(n: usize, h: usize) -> f64 {
    (0..h).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum()
}

/// `T_n(p)` by direct enumeration of compositions and strict index chains.
///
/// Intended as a reference; fails with [`Error::Resource`] when the number of
/// chains exceeds [`NAIVE_CHAIN_BUDGET`].
pub fn t_naive(sample: &SortedSample, w: &TailWindow, p: usize) -> Result<f64> {
    check_order(p)?;
    let d = spacings(sample, w)?;
    let width = d.len();

    let work: f64 = (1..=p.min(width))
        .map(|h| (log_binomial(p - 1, h - 1) + log_binomial(width, h)).exp())
        .sum();
    if work > NAIVE_CHAIN_BUDGET {
        return Err(Error::Resource(format!(
            "about {work:.3e} index chains for p={p}, k-l={width}; use t_fast"
        )));
    }

    // powers[j][s] = D_{l+1+j}^s / s!
    let powers: Vec<Vec<f64>> = d.values.iter().map(|&x| scaled_powers(x, p)).collect();
    let mut total = CompensatedSum::new();
    for comp in all_compositions(p)? {
        let parts = comp.parts();
        if parts.len() > width {
            continue;
        }
        chain_sum(&powers, parts, width, w.l, 1.0, &mut total);
    }
    Ok(total.value() / w.k as f64)
}

/// Adds every chain for the remaining `parts`, with the next index strictly
/// below `below` (0-based offsets into `powers`).
fn chain_sum(
    powers: &[Vec<f64>],
    parts: &[usize],
    below: usize,
    l: usize,
    product: f64,
    total: &mut CompensatedSum,
) {
    let (s, rest) = parts.split_first().expect("parts non-empty");
    // leave room for the remaining parts below this index
    for j in rest.len()..below {
        let term = product * powers[j][*s];
        if rest.is_empty() {
            total.add((l + 1 + j) as f64 * term);
        } else {
            chain_sum(powers, rest, j, l, term, total);
        }
    }
}

/// `[T_n(1), ..., T_n(pmax)]` from one right-to-left pass over the spacings.
///
/// `F_m` is the `m`-fold iterated integral of the empirical tail (scaled by
/// `n`) from the current point up to `Y_{n-l,n}`. Crossing the interval of
/// width `D_i` on which the scaled tail equals `i` maps
/// `F_m <- sum_{q<m} F_{m-q} D^q/q! + i D^m/m!`.
pub fn t_ladder(sample: &SortedSample, w: &TailWindow, pmax: usize) -> Result<Vec<f64>> {
    check_order(pmax)?;
    let d = spacings(sample, w)?;
    let mut f = vec![0.0f64; pmax + 1];
    for (i, width) in d.iter() {
        let pw = scaled_powers(width, pmax);
        let tail = i as f64;
        for m in (1..=pmax).rev() {
            let mut acc = tail * pw[m];
            for q in 0..m {
                acc += f[m - q] * pw[q];
            }
            f[m] = acc;
        }
    }
    let k = w.k as f64;
    Ok(f[1..].iter().map(|x| x / k).collect())
}

/// `T_n(p)` by iterated integration of the empirical tail.
pub fn t_fast(sample: &SortedSample, w: &TailWindow, p: usize) -> Result<f64> {
    Ok(t_ladder(sample, w, p)?[p - 1])
}

/// Hill's statistic `(1/k) sum_{j=l+1}^{k} j D_j`.
pub fn hill(sample: &SortedSample, w: &TailWindow) -> Result<f64> {
    let d = spacings(sample, w)?;
    let sum: CompensatedSum = d.iter().map(|(j, dj)| j as f64 * dj).collect();
    Ok(sum.value() / w.k as f64)
}

/// `(1/k) sum_{i=1}^{k} (Y_{n-i+1,n} - Y_{n-k,n})^p / p!`, defined for `l = 0`.
pub fn dedh_moment(sample: &SortedSample, w: &TailWindow, p: usize) -> Result<f64> {
    check_order(p)?;
    if w.l != 0 {
        return domain(format!("moment form requires l = 0, got l={}", w.l));
    }
    w.check(sample)?;
    let base = sample.upper(w.k);
    let factorial: f64 = (1..=p).map(|s| s as f64).product();
    let sum: CompensatedSum = (1..=w.k)
        .map(|i| (sample.upper(i - 1) - base).powi(p as i32) / factorial)
        .collect();
    Ok(sum.value() / w.k as f64)
}

/// `T^(-1/p)`, the index estimate carried by an order-`p` statistic.
pub fn gamma_from_statistic(t: f64, p: usize) -> Result<f64> {
    check_order(p)?;
    if !(t > 0.0) {
        return Err(Error::UndefinedEstimate(format!(
            "T_n({p}) = {t} is not positive"
        )));
    }
    Ok(t.powf(-1.0 / p as f64))
}

pub fn gamma_hat(sample: &SortedSample, w: &TailWindow, p: usize) -> Result<f64> {
    gamma_from_statistic(t_fast(sample, w, p)?, p)
}
