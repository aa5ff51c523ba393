//! Measured quantities over enumerated balls: commuting-pair fractions,
//! subset densities, R-set partitions, centralizer fractions, and the
//! asymptotic utilities (binomial roots, the q/f function families,
//! closed forms for the free-times-cyclic counterexample).

use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::{BallIndex, GeneratingSet};
use crate::itinerary::Itinerary;
use crate::wreath::{GroupShape, WreathElement};
use crate::{Error, Result};

pub const DEFAULT_PAIR_BUDGET: u64 = 2_000_000_000;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DcRow {
    pub n: u32,
    pub ball: u64,
    pub pairs: u64,
    pub dc: f64,
}

/// Exact ordered commuting-pair counts per radius, restricted to the
/// largest radius whose pair count fits the multiplication budget.
/// Returns the rows and the last completed radius.
pub fn dc_series(
    ball: &BallIndex,
    shape: &GroupShape,
    pair_budget: u64,
) -> Result<(Vec<DcRow>, u32)> {
    let sizes = ball.ball_sizes();
    let mut completed = None;
    for n in (0..=ball.radius()).rev() {
        let b = sizes[n as usize] as u128;
        if 2 * b * b <= pair_budget as u128 {
            completed = Some(n);
            break;
        }
    }
    let completed = completed.ok_or_else(|| Error::Precondition("pair budget too small for radius 0".into()))?;
    let cutoff = sizes[completed as usize] as usize;

    // Histogram of commuting pairs by max(l(g), l(h)); summing prefixes
    // gives the per-radius counts.
    let hist = (0..cutoff)
        .into_par_iter()
        .map(|gi| {
            let mut local = vec![0u64; completed as usize + 1];
            let g = ball.element(gi as u32);
            let lg = ball.length_of_index(gi as u32);
            for hi in 0..cutoff {
                let h = ball.element(hi as u32);
                let gh = shape.multiply(g, h).expect("ball elements are valid");
                let hg = shape.multiply(h, g).expect("ball elements are valid");
                if gh == hg {
                    let m = lg.max(ball.length_of_index(hi as u32));
                    local[m as usize] += 1;
                }
            }
            local
        })
        .reduce(
            || vec![0u64; completed as usize + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );

    let mut rows = Vec::with_capacity(completed as usize + 1);
    let mut acc = 0u64;
    for n in 0..=completed {
        acc += hist[n as usize];
        let b = sizes[n as usize];
        rows.push(DcRow { n, ball: b, pairs: acc, dc: acc as f64 / (b as f64 * b as f64) });
    }
    Ok((rows, completed))
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DensityRow {
    pub n: u32,
    pub ball: u64,
    pub count: u64,
    pub density: f64,
}

/// `|{g ∈ B(n) : predicate(g)}| / |B(n)|` per radius.
pub fn density_series<P>(ball: &BallIndex, predicate: P) -> Vec<DensityRow>
where
    P: Fn(&WreathElement) -> bool + Sync,
{
    let sizes = ball.ball_sizes();
    let hist = (0..ball.len())
        .into_par_iter()
        .map(|i| {
            if predicate(ball.element(i as u32)) {
                (ball.length_of_index(i as u32), 1u64)
            } else {
                (0, 0)
            }
        })
        .fold(
            || vec![0u64; ball.radius() as usize + 1],
            |mut acc, (len, hit)| {
                acc[len as usize] += hit;
                acc
            },
        )
        .reduce(
            || vec![0u64; ball.radius() as usize + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let mut rows = Vec::new();
    let mut acc = 0u64;
    for n in 0..=ball.radius() {
        acc += hist[n as usize];
        let b = sizes[n as usize];
        rows.push(DensityRow { n, ball: b, count: acc, density: acc as f64 / b as f64 });
    }
    rows
}

/// The base-group membership predicate.
pub fn in_base_group(g: &WreathElement) -> bool {
    g.in_base_group()
}

/// Tabulated non-decreasing `q` values for radii `0..=n_max` (index by n;
/// entry 0 is unused and set to the n = 1 value).
#[derive(Debug, Clone, Serialize)]
pub struct QFunction {
    pub values: Vec<f64>,
    pub provenance: String,
}

impl QFunction {
    pub fn at(&self, n: u32) -> f64 {
        self.values[(n as usize).min(self.values.len() - 1)]
    }

    pub fn n_max(&self) -> u32 {
        self.values.len() as u32 - 1
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1] + 1e-12)
    }
}

/// `q(n) = ⌈√ln(n+1)⌉`, the default choice for the partition experiments.
pub fn q_sqrt_log(n_max: u32) -> QFunction {
    let mut values = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let n_eff = n.max(1) as f64;
        values.push((n_eff + 1.0).ln().sqrt().ceil());
    }
    QFunction { values, provenance: "ceil(sqrt(log(n+1)))".into() }
}

pub fn q_constant(v: f64, n_max: u32) -> QFunction {
    QFunction { values: vec![v; n_max as usize + 1], provenance: format!("const {v}") }
}

/// Greedy empirical `q` from ball sizes: the largest `k ≤ n/2` with
/// `|B(n)|/|B(n−k)| ≥ threshold(n)`, monotonized by running max. The flag
/// reports whether the growth ratio `|B(n)|/|B(n−q(n))|` increased over the
/// computed range.
pub fn empirical_q<T>(ball_sizes: &[u64], threshold: T) -> Result<(QFunction, bool)>
where
    T: Fn(u32) -> f64,
{
    if ball_sizes.len() < 4 {
        return Err(Error::Precondition("need at least radii 0..3 for an empirical q".into()));
    }
    if ball_sizes.iter().any(|&s| s == 0) {
        return Err(Error::Precondition("ball sizes must be strictly positive".into()));
    }
    let n_max = ball_sizes.len() - 1;
    let mut values = vec![0.0f64; n_max + 1];
    let mut running = 0.0f64;
    for n in 1..=n_max {
        let thr = threshold(n as u32);
        let mut q1 = 0u32;
        for k in (0..=(n / 2) as u32).rev() {
            let ratio = ball_sizes[n] as f64 / ball_sizes[n - k as usize] as f64;
            if ratio >= thr {
                q1 = k;
                break;
            }
        }
        running = running.max(q1 as f64);
        values[n] = running;
    }
    values[0] = values[1];
    let ratio_at = |n: usize| ball_sizes[n] as f64 / ball_sizes[n - values[n] as usize] as f64;
    let grows = ratio_at(n_max) > ratio_at(1);
    Ok((QFunction { values, provenance: "empirical".into() }, grows))
}

/// `f_α(n) = max{k^α / q(k) : 1 ≤ k ≤ n}`, tabulated for `0..=n_max`.
pub fn f_alpha(alpha: f64, q: &QFunction, n_max: u32) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Precondition(format!("alpha must lie in (0,1), got {alpha}")));
    }
    let mut out = Vec::with_capacity(n_max as usize + 1);
    let mut running = f64::NEG_INFINITY;
    for n in 0..=n_max {
        if n >= 1 {
            let qv = q.at(n);
            if qv <= 0.0 {
                return Err(Error::Precondition("q must be positive for f_alpha".into()));
            }
            running = running.max((n as f64).powf(alpha) / qv);
        }
        out.push(if running.is_finite() { running } else { 0.0 });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpreadMode {
    /// `maxit_𝒲(g) − minit_𝒲(g) ≤ q(n)`.
    Itinerary,
    /// `−q(n) ≤ σ⁻ ≤ σ⁺ ≤ q(n)` from the support window.
    SigmaWindow,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PartitionRow {
    pub n: u32,
    pub ball: u64,
    pub n_count: u64,
    pub r_q: u64,
    pub r_q_flat: u64,
    pub r_q_f: u64,
}

/// Partitions `N ∩ B(n)` into `R_q(n)` and its complement per radius, and
/// counts the sub-set of `R_q(n)` whose coordinates all lie in
/// `B_{H,S₀}(f(n))`.
pub fn r_partition(
    ball: &BallIndex,
    q: &QFunction,
    f: &[f64],
    mode: SpreadMode,
    s: &GeneratingSet,
    shape: &GroupShape,
) -> Result<Vec<PartitionRow>> {
    let coord = shape.coord();
    // Per base-group element: word length, the spread statistic, and the
    // largest coordinate length.
    let mut stats: Vec<(u32, f64, u32)> = Vec::new();
    for idx in 0..ball.len() as u32 {
        let g = ball.element(idx);
        if !g.in_base_group() {
            continue;
        }
        let spread = match mode {
            SpreadMode::Itinerary => {
                let itin = Itinerary::of_word(s, &ball.witness_by_index(idx))?;
                itin.spread() as f64
            }
            SpreadMode::SigmaWindow => {
                let support = g.support();
                let lo = support.iter().copied().min().unwrap_or(0).min(0);
                let hi = support.iter().copied().max().unwrap_or(0).max(0);
                (-lo).max(hi) as f64
            }
        };
        let coord_max = g
            .coords()
            .iter()
            .map(|(_, v)| coord.geodesic_length(v))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .max()
            .unwrap_or(0);
        stats.push((ball.length_of_index(idx), spread, coord_max));
    }
    let sizes = ball.ball_sizes();
    let mut rows = Vec::new();
    for n in 0..=ball.radius() {
        let qn = q.at(n);
        let fn_ = f[(n as usize).min(f.len() - 1)];
        let mut n_count = 0u64;
        let mut r_q = 0u64;
        let mut r_q_f = 0u64;
        for &(len, spread, coord_max) in &stats {
            if len > n {
                continue;
            }
            n_count += 1;
            if spread <= qn {
                r_q += 1;
                if (coord_max as f64) <= fn_ {
                    r_q_f += 1;
                }
            }
        }
        rows.push(PartitionRow {
            n,
            ball: sizes[n as usize],
            n_count,
            r_q,
            r_q_flat: n_count - r_q,
            r_q_f,
        });
    }
    Ok(rows)
}

/// Per-radius centralizer fraction `|C_G(g) ∩ B(n)| / |B(n)|`.
pub fn centralizer_series(ball: &BallIndex, g: &WreathElement, shape: &GroupShape) -> Vec<DensityRow> {
    density_series(ball, |h| {
        let gh = shape.multiply(g, h).expect("valid elements");
        let hg = shape.multiply(h, g).expect("valid elements");
        gh == hg
    })
}

/// `C(n + ⌈αn⌉, ⌈αn⌉)^{1/n}` through log-gamma, overflow-free.
pub fn binomial_root(alpha: f64, n: u64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Precondition(format!("alpha must lie in (0,1], got {alpha}")));
    }
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let k = (alpha * n as f64).ceil();
    let nn = n as f64;
    let ln_binom = statrs::function::gamma::ln_gamma(nn + k + 1.0)
        - statrs::function::gamma::ln_gamma(k + 1.0)
        - statrs::function::gamma::ln_gamma(nn + 1.0);
    Ok((ln_binom / nn).exp())
}

/// The companion closed-form limit `(1+α)^{1+α} / α^α`.
pub fn binomial_limit(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Precondition(format!("alpha must lie in (0,1], got {alpha}")));
    }
    Ok(((1.0 + alpha) * (1.0 + alpha).ln() - alpha * alpha.ln()).exp())
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ClosedForms {
    pub n: u32,
    /// `|B ∩ F| = 2·3ⁿ − 1`.
    pub base_count: u64,
    /// `|B| = 4·3ⁿ − 2n − 3`.
    pub ball: u64,
    pub ratio: f64,
}

/// Exact closed forms for the free-rank-2 direct product with the obvious
/// six-element generating set.
pub fn example15_closed_forms(n: u32) -> Result<ClosedForms> {
    if n == 0 || n > 38 {
        return Err(Error::Precondition("closed forms are tabulated for 1 ≤ n ≤ 38".into()));
    }
    let p = 3u64.pow(n);
    let base_count = 2 * p - 1;
    let ball = 4 * p - 2 * n as u64 - 3;
    Ok(ClosedForms { n, base_count, ball, ratio: base_count as f64 / ball as f64 })
}
