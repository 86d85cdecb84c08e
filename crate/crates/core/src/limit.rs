//! Moments of the limiting extremal Gaussian process and of its reduced form.
//!
//! For orders `1 <= r < rho` the limit has
//!
//! * `sigma^2(r) = C1(r) a(r)`,
//! * `sigma(r, rho) = C2(r, rho) sum_{j=0}^{r} mu_{rho-r}(1, 1, j) a(r - j)`,
//!
//! and the reduced process (deterministic centering) adds `e(p) Z` with
//! `E[I(p) Z] = -1`, giving `sigma(r, rho) - e(r) - e(rho) + e(r) e(rho)`.
//! The Fréchet and Gumbel domains correspond to `gamma = +inf`, where
//! `C1 = C2 = e = 1`.

use serde::{Deserialize, Serialize};

use crate::combinatorics::{a_sequence, binomial, Exact, Family, NumberTable};
use crate::error::{domain, Result};

/// Extreme-value domain of attraction of the underlying distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DomainKind {
    Frechet { gamma: f64 },
    Weibull { gamma: f64 },
    Gumbel,
}

impl DomainKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DomainKind::Frechet { gamma } | DomainKind::Weibull { gamma } => {
                if gamma.is_finite() && gamma > 0.0 {
                    Ok(())
                } else {
                    domain(format!("gamma must be finite and positive, got {gamma}"))
                }
            }
            DomainKind::Gumbel => Ok(()),
        }
    }

    /// The finite `gamma` that enters `C1`, `C2` and `e`; `None` means
    /// `gamma = +inf`.
    fn finite_gamma(&self) -> Option<f64> {
        match *self {
            DomainKind::Weibull { gamma } => Some(gamma),
            _ => None,
        }
    }
}

fn ratio_product(r: usize, shift: usize, domain: &DomainKind) -> Result<f64> {
    domain.validate()?;
    Ok(match domain.finite_gamma() {
        Some(g) => (1..=r)
            .map(|j| (g + j as f64) / (g + (shift + j) as f64))
            .product(),
        None => 1.0,
    })
}

/// `C1(r) = prod_{j=1}^{r} (gamma + j) / (gamma + r + j)`.
pub fn c1(r: usize, domain: &DomainKind) -> Result<f64> {
    if r == 0 {
        return crate::error::domain("C1 needs r >= 1");
    }
    ratio_product(r, r, domain)
}

/// `C2(r, rho) = prod_{j=1}^{r} (gamma + j) / (gamma + rho + j)` for `r < rho`.
pub fn c2(r: usize, rho: usize, domain: &DomainKind) -> Result<f64> {
    if r == 0 || r >= rho {
        return crate::error::domain(format!("C2 needs 1 <= r < rho, got r={r}, rho={rho}"));
    }
    ratio_product(r, rho, domain)
}

/// `e(p) = (gamma + p) / gamma`, or 1 when `gamma = +inf`.
pub fn e_fn(p: usize, domain: &DomainKind) -> f64 {
    match domain.finite_gamma() {
        Some(g) => (g + p as f64) / g,
        None => 1.0,
    }
}

/// Combinatorial factor `a(r, rho)` of the covariance, from the number
/// tables. Symmetric; `a(r, r) = a(r)`.
pub fn a_cov_recursive(r: usize, rho: usize) -> Result<Exact> {
    if r == 0 || rho == 0 {
        return domain("orders start at 1");
    }
    let (lo, hi) = (r.min(rho), r.max(rho));
    let a = a_sequence(lo)?;
    if lo == hi {
        return Ok(a[lo]);
    }
    let tau = hi - lo;
    let table = NumberTable::generate(Family::TypeIII { tau }, 1, lo)?;
    let mut sum = a[lo];
    for j in 1..=lo {
        let mu = table.get(1, j).expect("column inside generated block");
        sum = mu
            .checked_mul(a[lo - j])
            .and_then(|t| t.checked_add(sum))
            .ok_or(crate::error::Error::Overflow {
                family: "sigma",
                v: lo,
                col: hi,
            })?;
    }
    Ok(sum)
}

/// Closed form `binomial(r + rho, r)` of the same factor.
pub fn a_cov_closed(r: usize, rho: usize) -> Result<Exact> {
    if r == 0 || rho == 0 {
        return domain("orders start at 1");
    }
    binomial((r + rho) as u64, r as u64)
}

/// `sigma^2(r) = C1(r) a(r)`.
pub fn sigma2(r: usize, domain: &DomainKind) -> Result<f64> {
    let a = a_sequence(r)?[r];
    Ok(c1(r, domain)? * a as f64)
}

/// `sigma(r, rho)`, symmetric in its arguments.
pub fn sigma_cov(r: usize, rho: usize, domain: &DomainKind) -> Result<f64> {
    if r == rho {
        return sigma2(r, domain);
    }
    let (lo, hi) = (r.min(rho), r.max(rho));
    let factor = a_cov_recursive(lo, hi)?;
    Ok(c2(lo, hi, domain)? * factor as f64)
}

/// Variance of the reduced process, `sigma^2(r) - e(r)(2 - e(r))`.
pub fn reduced_var(r: usize, domain: &DomainKind) -> Result<f64> {
    let e = e_fn(r, domain);
    Ok(sigma2(r, domain)? - 2.0 * e + e * e)
}

/// Covariance of the reduced process, `sigma(r, rho) - e(r) - e(rho) + e(r) e(rho)`.
pub fn reduced_cov(r: usize, rho: usize, domain: &DomainKind) -> Result<f64> {
    if r == rho {
        return reduced_var(r, domain);
    }
    let (er, erho) = (e_fn(r, domain), e_fn(rho, domain));
    Ok(sigma_cov(r, rho, domain)? - er - erho + er * erho)
}

/// Law-of-the-iterated-logarithm envelope for the relative deviation of
/// `T_n(p)`: `sqrt(reduced_var(p)) * sqrt(2 log log n / k)`.
pub fn lil_envelope(p: usize, domain: &DomainKind, k: usize, n: usize) -> Result<f64> {
    if !(3 <= k && k < n) {
        return crate::error::domain(format!("envelope needs 3 <= k < n, got k={k}, n={n}"));
    }
    let loglog = (n as f64).ln().ln();
    if !(loglog > 0.0) {
        return crate::error::domain("log log n must be positive");
    }
    let var = reduced_var(p, domain)?.max(0.0);
    Ok(var.sqrt() * (2.0 * loglog / k as f64).sqrt())
}

/// All finite-dimensional moments of the limit up to order `pmax`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceModel {
    pub domain: DomainKind,
    pub pmax: usize,
    /// `sigma2[r - 1] = sigma^2(r)`
    pub sigma2: Vec<f64>,
    /// `sigma[r - 1][rho - 1] = sigma(r, rho)`
    pub sigma: Vec<Vec<f64>>,
    /// `e[p - 1] = e(p)`
    pub e: Vec<f64>,
}

impl CovarianceModel {
    pub fn build(domain: DomainKind, pmax: usize) -> Result<Self> {
        domain.validate()?;
        if pmax == 0 {
            return crate::error::domain("pmax must be at least 1");
        }
        let mut sigma = vec![vec![0.0; pmax]; pmax];
        for r in 1..=pmax {
            for rho in r..=pmax {
                let v = sigma_cov(r, rho, &domain)?;
                sigma[r - 1][rho - 1] = v;
                sigma[rho - 1][r - 1] = v;
            }
        }
        let sigma2 = (0..pmax).map(|i| sigma[i][i]).collect();
        let e = (1..=pmax).map(|p| e_fn(p, &domain)).collect();
        Ok(Self {
            domain,
            pmax,
            sigma2,
            sigma,
            e,
        })
    }

    /// Covariance matrix of the reduced process.
    pub fn reduced(&self) -> Vec<Vec<f64>> {
        (0..self.pmax)
            .map(|i| {
                (0..self.pmax)
                    .map(|j| self.sigma[i][j] - self.e[i] - self.e[j] + self.e[i] * self.e[j])
                    .collect()
            })
            .collect()
    }
}
