//! Ordered compositions and the three integer families that govern the
//! covariance of the limiting process.
//!
//! All table entries are exact integers. Arithmetic is checked: a value that
//! leaves the `i128` range is reported as [`Error::Overflow`] with the
//! coordinates of the first offending cell instead of wrapping.
//!
//! The families are filled by their local two-cell ("clog") rules:
//!
//! * type I, `beta(v, r)`: `beta(v, 1) = 1`, `beta(v, 2) = 1` for `v >= 1`,
//!   `beta(0, r) = beta(1, r - 1)`, `beta(1, r) = beta(2, r - 1) + beta(1, r - 1)`
//!   and `beta(v, r) = beta(v + 1, r - 1) + beta(v - 1, r)` for `v >= 2, r >= 3`;
//! * type II, `mu0(tau, v, delta)` for `1 <= delta <= tau`: ones on the last
//!   column and the first row, otherwise
//!   `mu0(v, delta) = mu0(v - 1, delta) + mu0(v, delta + 1)`;
//! * type III, `mu1(tau, v, delta)`: the type I rules with `delta` in the role
//!   of `r`, seeded at `delta = 2` by `mu1(v, 2) = sum_{k=1}^{v+1} mu0(k, 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Exact integer used for every table entry.
pub type Exact = i128;

/// An ordered tuple of positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return domain("composition parts must be positive and non-empty");
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// All ordered `h`-part compositions of `p`, in lexicographic order.
pub fn compositions(p: usize, h: usize) -> Result<Vec<Composition>> {
    if h == 0 || h > p {
        return domain(format!("compositions need 1 <= h <= p, got p={p}, h={h}"));
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(h);
    fill_compositions(p, h, &mut current, &mut out);
    Ok(out)
}

fn fill_compositions(
    remaining: usize,
    slots: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Composition>,
) {
    if slots == 1 {
        current.push(remaining);
        out.push(Composition {
            parts: current.clone(),
        });
        current.pop();
        return;
    }
    // leave at least one unit for each of the remaining slots
    for first in 1..=remaining - (slots - 1) {
        current.push(first);
        fill_compositions(remaining - first, slots - 1, current, out);
        current.pop();
    }
}

/// Every composition of `p`, grouped by increasing number of parts.
pub fn all_compositions(p: usize) -> Result<Vec<Composition>> {
    if p == 0 {
        return domain("p must be positive");
    }
    let mut out = Vec::new();
    for h in 1..=p {
        out.extend(compositions(p, h)?);
    }
    Ok(out)
}

/// `binomial(n, k)` with checked arithmetic.
pub fn binomial(n: u64, k: u64) -> Result<Exact> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: Exact = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc
            .checked_mul((n - i) as Exact)
            .ok_or(Error::Overflow {
                family: "binomial",
                v: n as usize,
                col: k as usize,
            })?
            / (i + 1) as Exact;
    }
    Ok(acc)
}

/// Which integer family a [`NumberTable`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// `beta(v, r)`, columns indexed by `r >= 1`.
    TypeI,
    /// `mu_tau(0, v, delta)`, columns `1 <= delta <= tau`.
    TypeII { tau: usize },
    /// `mu_tau(1, v, delta)`, columns `delta >= 1`.
    TypeIII { tau: usize },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::TypeI => "beta",
            Family::TypeII { .. } => "mu0",
            Family::TypeIII { .. } => "mu1",
        }
    }
}

/// A rectangular block of one integer family: rows `v = 0..=vmax`, columns
/// `1..=dmax` (type II columns stop at `tau`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumberTable {
    family: Family,
    vmax: usize,
    dmax: usize,
    /// `rows[v][col - 1]`
    rows: Vec<Vec<Exact>>,
}

impl NumberTable {
    pub fn generate(family: Family, vmax: usize, dmax: usize) -> Result<Self> {
        if dmax == 0 {
            return domain("table needs at least one column");
        }
        let rows = match family {
            Family::TypeI => {
                let cols = type_one_columns(vmax, dmax)?;
                transpose(&cols, vmax)
            }
            Family::TypeII { tau } => {
                if tau == 0 {
                    return domain("tau must be at least 1");
                }
                let cols = type_two_columns(tau, vmax)?;
                let keep = dmax.min(tau);
                transpose(&cols[..keep], vmax)
            }
            Family::TypeIII { tau } => {
                if tau == 0 {
                    return domain("tau must be at least 1");
                }
                let cols = type_three_columns(tau, vmax, dmax)?;
                transpose(&cols, vmax)
            }
        };
        let dmax = rows.first().map_or(0, |r| r.len());
        Ok(Self {
            family,
            vmax,
            dmax,
            rows,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn vmax(&self) -> usize {
        self.vmax
    }

    /// Number of columns actually held.
    pub fn dmax(&self) -> usize {
        self.dmax
    }

    /// Entry at row `v`, column `col` (1-based), if inside the block.
    pub fn get(&self, v: usize, col: usize) -> Option<Exact> {
        if col == 0 {
            return None;
        }
        self.rows.get(v)?.get(col - 1).copied()
    }

    pub fn rows(&self) -> &[Vec<Exact>] {
        &self.rows
    }
}

fn transpose(cols: &[Vec<Exact>], vmax: usize) -> Vec<Vec<Exact>> {
    (0..=vmax)
        .map(|v| cols.iter().map(|c| c[v]).collect())
        .collect()
}

fn add(a: Exact, b: Exact, family: &'static str, v: usize, col: usize) -> Result<Exact> {
    a.checked_add(b).ok_or(Error::Overflow { family, v, col })
}

/// Fills columns `first..=dmax` of a type-I-shaped family whose column
/// `first - 1` (index `first - 2` in `cols`) is already present and long
/// enough. Column `c` holds rows `0..=width + 1 - c`.
fn extend_type_one_shape(
    cols: &mut Vec<Vec<Exact>>,
    first: usize,
    dmax: usize,
    width: usize,
    family: &'static str,
) -> Result<()> {
    for c in first..=dmax {
        let prev = &cols[c - 2];
        let len = width + 1 - (c - 1);
        let mut col = Vec::with_capacity(len);
        col.push(prev[1]);
        if len > 1 {
            col.push(add(prev[2], prev[1], family, 1, c)?);
        }
        for v in 2..len {
            let value = add(prev[v + 1], col[v - 1], family, v, c)?;
            col.push(value);
        }
        cols.push(col);
    }
    Ok(())
}

fn type_one_columns(vmax: usize, dmax: usize) -> Result<Vec<Vec<Exact>>> {
    let width = vmax + dmax;
    let mut cols = vec![vec![1; width + 1]];
    if dmax >= 2 {
        // beta(0, 2) = beta(1, 1) = 1 and beta(v, 2) = 1 otherwise
        cols.push(vec![1; width]);
    }
    if dmax >= 3 {
        extend_type_one_shape(&mut cols, 3, dmax, width, "beta")?;
    }
    Ok(cols)
}

/// Columns `delta = 1..=tau`, each of length `vmax + 1`.
fn type_two_columns(tau: usize, vmax: usize) -> Result<Vec<Vec<Exact>>> {
    let mut cols: Vec<Vec<Exact>> = vec![Vec::new(); tau];
    cols[tau - 1] = vec![1; vmax + 1];
    for delta in (1..tau).rev() {
        let mut col = Vec::with_capacity(vmax + 1);
        col.push(1);
        for v in 1..=vmax {
            let value = add(col[v - 1], cols[delta][v], "mu0", v, delta)?;
            col.push(value);
        }
        cols[delta - 1] = col;
    }
    Ok(cols)
}

fn type_three_columns(tau: usize, vmax: usize, dmax: usize) -> Result<Vec<Vec<Exact>>> {
    let width = vmax + dmax;
    // mu0(k, 1) for k = 0..=width + 1
    let mu0_first = type_two_columns(tau, width + 1)?.swap_remove(0);
    let mut cols = vec![mu0_first[..=width].to_vec()];
    if dmax >= 2 {
        let mut seed = Vec::with_capacity(width);
        let mut running: Exact = 0;
        for v in 0..width {
            running = add(running, mu0_first[v + 1], "mu1", v, 2)?;
            seed.push(running);
        }
        cols.push(seed);
    }
    if dmax >= 3 {
        extend_type_one_shape(&mut cols, 3, dmax, width, "mu1")?;
    }
    Ok(cols)
}

/// Type I number `beta(v, r)`.
pub fn beta(v: usize, r: usize) -> Result<Exact> {
    if r == 0 {
        return domain("beta requires r >= 1");
    }
    let cols = type_one_columns(v, r)?;
    Ok(cols[r - 1][v])
}

/// Type II number `mu_tau(0, v, delta)`.
pub fn mu0(tau: usize, v: usize, delta: usize) -> Result<Exact> {
    if tau == 0 || delta == 0 || delta > tau {
        return domain(format!(
            "mu0 requires 1 <= delta <= tau, got tau={tau}, delta={delta}"
        ));
    }
    let cols = type_two_columns(tau, v)?;
    Ok(cols[delta - 1][v])
}

/// Type III number `mu_tau(1, v, delta)`, with `delta = 0` mapped to 1 and
/// `delta = 1` mapped to `mu_tau(0, v, 1)`.
pub fn mu1(tau: usize, v: usize, delta: usize) -> Result<Exact> {
    if tau == 0 {
        return domain("mu1 requires tau >= 1");
    }
    if delta == 0 {
        return Ok(1);
    }
    let cols = type_three_columns(tau, v, delta)?;
    Ok(cols[delta - 1][v])
}

/// `a(0..=rmax)` with `a(0) = 1` and `a(r) = 2 sum_{j=1}^{r} beta(1, j) a(r - j)`.
pub fn a_sequence(rmax: usize) -> Result<Vec<Exact>> {
    let mut a = vec![1 as Exact];
    if rmax == 0 {
        return Ok(a);
    }
    let beta_cols = type_one_columns(1, rmax)?;
    for r in 1..=rmax {
        let mut sum: Exact = 0;
        for j in 1..=r {
            let term = beta_cols[j - 1][1]
                .checked_mul(a[r - j])
                .ok_or(Error::Overflow {
                    family: "a",
                    v: r,
                    col: j,
                })?;
            sum = add(sum, term, "a", r, j)?;
        }
        a.push(sum.checked_mul(2).ok_or(Error::Overflow {
            family: "a",
            v: r,
            col: 0,
        })?);
    }
    Ok(a)
}

pub fn a_seq(r: usize) -> Result<Exact> {
    Ok(a_sequence(r)?[r])
}

/// A monotone boundary of a lattice region, one height per column
/// `x = 0..=width`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Staircase(Vec<usize>);

impl Staircase {
    pub fn new(heights: Vec<usize>) -> Result<Self> {
        if heights.windows(2).any(|w| w[1] < w[0]) {
            return domain("staircase heights must be non-decreasing");
        }
        Ok(Self(heights))
    }

    /// The floor `y = 0`.
    pub fn floor(width: usize) -> Self {
        Self(vec![0; width + 1])
    }

    /// The flat ceiling `y = height`.
    pub fn ceiling(width: usize, height: usize) -> Self {
        Self(vec![height; width + 1])
    }

    /// `y = x + offset` clipped to `[0, cap]`.
    pub fn diagonal(width: usize, offset: isize, cap: usize) -> Self {
        Self(
            (0..=width)
                .map(|x| (x as isize + offset).clamp(0, cap as isize) as usize)
                .collect(),
        )
    }

    pub fn heights(&self) -> &[usize] {
        &self.0
    }
}

/// Counts unit-step (right/up) paths from `(0, 0)` to `(width, height)` that
/// stay within `lower[x] <= y <= upper[x]` at every visited point.
pub fn lattice_path_count(
    width: usize,
    height: usize,
    lower: &Staircase,
    upper: &Staircase,
) -> Result<Exact> {
    let (lo, hi) = (lower.heights(), upper.heights());
    if lo.len() != width + 1 || hi.len() != width + 1 {
        return domain("staircases must have one height per column 0..=width");
    }
    if lo.iter().zip(hi).any(|(l, h)| l > h) {
        return domain("lower staircase crosses the upper one");
    }
    if lo[0] != 0 || lo[width] > height || hi[width] < height {
        return domain("region must contain (0, 0) and the target corner");
    }

    let top = |x: usize| hi[x].min(height);
    let mut prev = vec![0 as Exact; height + 1];
    for x in 0..=width {
        let mut cur = vec![0 as Exact; height + 1];
        for y in lo[x]..=top(x) {
            let mut ways = if x == 0 && y == 0 { 1 } else { 0 };
            if x > 0 && y >= lo[x - 1] && y <= top(x - 1) {
                ways = add(ways, prev[y], "lattice", x, y)?;
            }
            if y > lo[x] {
                ways = add(ways, cur[y - 1], "lattice", x, y)?;
            }
            cur[y] = ways;
        }
        prev = cur;
    }
    Ok(prev[height])
}

/// Paths from `(0, 0)` to `(v + r, r)` inside the parallelogram with corners
/// `(0,0), (v,0), (v+r,r), (r,r)`.
pub fn parallelogram_path_count(v: usize, r: usize) -> Result<Exact> {
    let width = v + r;
    let lower = Staircase::diagonal(width, -(v as isize), r);
    let upper = Staircase::diagonal(width, 0, r);
    lattice_path_count(width, r, &lower, &upper)
}
