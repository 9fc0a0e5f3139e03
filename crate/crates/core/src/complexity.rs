//! Information complexity n(ε, H_d), the shape decay rate r(γ), empirical
//! convergence rates and tractability probes.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::shape::ShapeSequence;
use crate::spectrum::{max_eigs, top_n_tensor_eigenvalues, ShapeGroups, TensorEigenIter, UnivariateSpectrum};

/// Upper bound on q̂ for a strong-polynomial classification.
pub const STRONG_POLY_Q_TOL: f64 = 0.1;
/// Relative RMS residual of the ln n fit accepted as polynomial.
pub const POLY_RESIDUAL_TOL: f64 = 0.05;
/// Largest growth of the per-dimension quasi-polynomial ratio between the
/// largest dimension and half of it that still counts as bounded.
pub const QUASI_POLY_GROWTH_TOL: f64 = 1.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Absolute,
    Normalized,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Absolute => "abs",
            Criterion::Normalized => "nor",
        })
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "abs" | "absolute" => Ok(Criterion::Absolute),
            "nor" | "norm" | "normalized" => Ok(Criterion::Normalized),
            other => Err(invalid(format!("unknown error criterion '{other}'"))),
        }
    }
}

/// r(γ) = sup{β > 0 : Σ γ_ℓ^{1/β} < ∞}, with sup ∅ = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRate {
    pub value: f64,
    pub shape: ShapeSequence,
}

pub fn decay_rate_r(shape: &ShapeSequence) -> Result<DecayRate> {
    let value = match shape {
        ShapeSequence::Isotropic { .. } => 0.0,
        // Σ (cℓ^{-α})^{1/β} converges iff α/β > 1
        ShapeSequence::PowerLaw { exponent, .. } => *exponent,
        ShapeSequence::Geometric { .. } => f64::INFINITY,
        ShapeSequence::Explicit { .. } => {
            return Err(Error::NotApplicable(
                "a finite explicit shape list has no asymptotic decay rate".into(),
            ))
        }
    };
    Ok(DecayRate {
        value,
        shape: shape.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    AllExact,
    StdEmpirical,
}

/// e(0), e(1), …, e(N).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSequence {
    pub values: Vec<f64>,
    pub provenance: Provenance,
}

impl ErrorSequence {
    pub fn new(values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("error sequence is empty"));
        }
        Ok(Self { values, provenance })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Exact minimal errors e(n) = sqrt(λ^{(n+1)}) for n = 0..=N.
pub fn error_sequence_all(shape: &ShapeSequence, d: usize, big_n: usize) -> Result<ErrorSequence> {
    let list = top_n_tensor_eigenvalues(shape, d, big_n + 1)?;
    let values = list.entries.iter().map(|e| (0.5 * e.log_value).exp()).collect();
    ErrorSequence::new(values, Provenance::AllExact)
}

/// 2/ln(1/ω_γ).
pub fn quasipoly_exponent(gamma: f64) -> Result<f64> {
    Ok(-2.0 / UnivariateSpectrum::new(gamma)?.log_omega())
}

/// log of (ε·CRI_d)², the eigenvalue threshold for n(ε, d).
fn log_threshold(groups: &ShapeGroups, eps: f64, criterion: Criterion) -> f64 {
    let log_cri_sq = match criterion {
        Criterion::Absolute => 0.0,
        Criterion::Normalized => groups.log_base,
    };
    2.0 * eps.ln() + log_cri_sq
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("epsilon must lie in (0,1), got {eps}")));
    }
    Ok(())
}

/// Smallest n with e^{all}(n) ≤ ε·CRI_d, i.e. the number of eigenvalues of
/// W_d strictly above (ε·CRI_d)².
pub fn info_complexity(shape: &ShapeSequence, d: usize, eps: f64, criterion: Criterion) -> Result<u64> {
    info_complexity_with_guard(shape, d, eps, criterion, max_eigs())
}

/// As [`info_complexity`], with `guard` bounding the counting work.
///
/// Eigenvalues are counted group by group (coordinates sharing a shape
/// parameter), weighting each excess pattern by its binomial multiplicity,
/// so the work is far below n for isotropic or nearly isotropic shapes.
pub fn info_complexity_with_guard(
    shape: &ShapeSequence,
    d: usize,
    eps: f64,
    criterion: Criterion,
    guard: u64,
) -> Result<u64> {
    check_eps(eps)?;
    let groups = ShapeGroups::new(shape, d)?;
    let budget = groups.log_base - log_threshold(&groups, eps, criterion);
    if budget <= 0.0 {
        return Ok(0);
    }
    // (cost per unit excess, group size), most expensive first
    let mut costs: Vec<(f64, u64)> = groups
        .spectra
        .iter()
        .zip(&groups.sizes)
        .map(|(s, &n)| (-s.log_omega(), n))
        .collect();
    costs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut counter = Counter {
        costs: &costs,
        work: 0,
        guard,
        found: 0,
    };
    match counter.count(0, budget) {
        Ok(n) => u64::try_from(n).map_err(|_| Error::ResourceLimit {
            what: "information complexity exceeds 64-bit range".into(),
            limit: u64::MAX,
            partial: Some(u64::MAX),
        }),
        Err(CountStop::Work) => Err(Error::ResourceLimit {
            what: "eigenvalue counting work".into(),
            limit: guard,
            partial: Some(counter.found.min(u64::MAX as u128) as u64),
        }),
        Err(CountStop::Overflow) => Err(Error::ResourceLimit {
            what: "information complexity exceeds 128-bit range".into(),
            limit: u64::MAX,
            partial: Some(u64::MAX),
        }),
    }
}

enum CountStop {
    Work,
    Overflow,
}

struct Counter<'a> {
    costs: &'a [(f64, u64)],
    work: u64,
    guard: u64,
    /// Eigenvalues counted so far; a lower bound when the guard trips.
    found: u128,
}

/// C(s + g - 1, g - 1): ways to spread excess s over g coordinates.
fn multiplicity(s: u64, g: u64) -> Option<u128> {
    binomial(s + g - 1, s)
}

fn binomial(n: u64, k: u64) -> Option<u128> {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 1..=k as u128 {
        c = c.checked_mul(n as u128 - k as u128 + i)? / i;
    }
    Some(c)
}

impl Counter<'_> {
    fn tick(&mut self) -> std::result::Result<(), CountStop> {
        self.work += 1;
        if self.work > self.guard {
            Err(CountStop::Work)
        } else {
            Ok(())
        }
    }

    /// Number of excess patterns over groups `g..` with Σ s·cost < budget.
    fn count(&mut self, g: usize, budget: f64) -> std::result::Result<u128, CountStop> {
        self.tick()?;
        let (cost, size) = self.costs[g];
        if g + 1 == self.costs.len() {
            // largest s with s·cost < budget
            let mut s_max = (budget / cost).ceil() as u64;
            while s_max > 0 && s_max as f64 * cost >= budget {
                s_max -= 1;
            }
            while (s_max + 1) as f64 * cost < budget {
                s_max += 1;
            }
            // Σ_{s ≤ S} C(s+g-1, g-1) = C(S+g, g)
            let n = binomial(s_max + size, s_max).ok_or(CountStop::Overflow)?;
            self.found = self.found.saturating_add(n);
            return Ok(n);
        }
        let mut total: u128 = 0;
        let mut s = 0u64;
        while (s as f64) * cost < budget {
            let rest = self.count(g + 1, budget - s as f64 * cost)?;
            let m = multiplicity(s, size).ok_or(CountStop::Overflow)?;
            let term = m.checked_mul(rest).ok_or(CountStop::Overflow)?;
            total = total.checked_add(term).ok_or(CountStop::Overflow)?;
            if m > 1 {
                self.found = self.found.saturating_add(term - rest);
            }
            s += 1;
        }
        Ok(total)
    }
}

/// n(ε, d) by streaming the best-first enumeration until the threshold is
/// crossed. Independent of the counting route; bounded by `guard` eigenvalues.
pub fn info_complexity_streaming(
    shape: &ShapeSequence,
    d: usize,
    eps: f64,
    criterion: Criterion,
    guard: u64,
) -> Result<u64> {
    check_eps(eps)?;
    let groups = ShapeGroups::new(shape, d)?;
    let threshold = log_threshold(&groups, eps, criterion);
    let mut n = 0u64;
    for e in TensorEigenIter::new(shape, d)? {
        if e.log_value <= threshold {
            return Ok(n);
        }
        n += 1;
        if n >= guard {
            return Err(Error::ResourceLimit {
                what: "streamed eigenvalue enumeration".into(),
                limit: guard,
                partial: Some(n),
            });
        }
    }
    unreachable!("the eigenvalue stream is infinite")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub rate: f64,
    pub superpolynomial: bool,
    pub degenerate: bool,
}

fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Least-squares slope of -ln e(n) against ln n for n in `lo..=hi`.
///
/// The super-polynomial flag is raised when the slope over the upper half
/// of the window (split at the geometric midpoint) exceeds 1.5 times the
/// slope over the lower half.
pub fn estimate_rate(seq: &ErrorSequence, lo: usize, hi: usize) -> Result<RateEstimate> {
    estimate_rate_values(&seq.values, lo, hi)
}

pub fn estimate_rate_values(values: &[f64], lo: usize, hi: usize) -> Result<RateEstimate> {
    if lo == 0 || lo >= hi || hi >= values.len() {
        return Err(invalid(format!(
            "rate window [{lo}, {hi}] must satisfy 1 <= lo < hi < {}",
            values.len()
        )));
    }
    let window = &values[lo..=hi];
    if window.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(invalid("rate window contains non-positive errors"));
    }
    if window.iter().all(|&v| v == window[0]) {
        return Ok(RateEstimate {
            rate: 0.0,
            superpolynomial: false,
            degenerate: true,
        });
    }
    let xs: Vec<f64> = (lo..=hi).map(|n| (n as f64).ln()).collect();
    let ys: Vec<f64> = window.iter().map(|v| -v.ln()).collect();
    let rate = ols_slope(&xs, &ys);
    let mid = ((lo as f64) * (hi as f64)).sqrt().round() as usize;
    let superpolynomial = if mid > lo && mid < hi {
        let k = mid - lo;
        let lower = ols_slope(&xs[..=k], &ys[..=k]);
        let upper = ols_slope(&xs[k..], &ys[k..]);
        lower > 0.0 && upper > 1.5 * lower
    } else {
        false
    };
    Ok(RateEstimate {
        rate,
        superpolynomial,
        degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityCell {
    pub d: usize,
    pub eps: f64,
    pub n: u64,
    /// `n` is only a lower bound (the counting guard tripped).
    pub lower_bound: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    StrongPoly,
    Poly,
    QuasiPolyConsistent,
    Inconclusive,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::StrongPoly => "strong-poly",
            Classification::Poly => "poly",
            Classification::QuasiPolyConsistent => "quasi-poly-consistent",
            Classification::Inconclusive => "inconclusive",
        })
    }
}

/// Least-squares fit ln n ≈ ln C + p ln ε^{-1} + q ln d over cells with n ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyFit {
    pub log_c: f64,
    pub p: f64,
    pub q: f64,
    /// RMS residual divided by the RMS of ln n.
    pub rel_rms_residual: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub shape: String,
    pub criterion: Criterion,
    pub eps: Vec<f64>,
    pub dims: Vec<usize>,
    /// Row-major over (d, ε) in grid order.
    pub cells: Vec<ComplexityCell>,
    /// Slope of ln max_d n(ε,d) against ln ε^{-1}: the ε-exponent of a
    /// bound uniform in d.
    pub p_hat: Option<f64>,
    /// The same slope over the smaller half of the ε grid only.
    pub p_hat_small_eps: Option<f64>,
    /// Largest exponent of d between the largest grid dimension and the
    /// largest one at most half of it, over all ε (n = 0 read as 1).
    pub q_hat: Option<f64>,
    pub fit: Option<PolyFit>,
    /// max over the grid of ln n / ((1 + ln d)(1 + ln ε^{-1})).
    pub t_hat: Option<f64>,
    /// max over the grid of ln n / (ε^{-1} + d); reported, not classified.
    pub weak_ratio: Option<f64>,
    pub classification: Classification,
}

impl ComplexityReport {
    pub fn cell(&self, d: usize, eps: f64) -> Option<&ComplexityCell> {
        self.cells.iter().find(|c| c.d == d && c.eps == eps)
    }

    /// t̂ restricted to a single dimension.
    pub fn t_hat_at(&self, d: usize) -> Option<f64> {
        quasi_ratio_max(self.cells.iter().filter(|c| c.d == d))
    }
}

fn quasi_ratio_max<'a>(cells: impl Iterator<Item = &'a ComplexityCell>) -> Option<f64> {
    cells
        .filter(|c| c.n >= 1)
        .map(|c| (c.n as f64).ln() / ((1.0 + (c.d as f64).ln()) * (1.0 + (1.0 / c.eps).ln())))
        .reduce(f64::max)
}

fn joint_fit(cells: &[ComplexityCell]) -> Option<PolyFit> {
    let pts: Vec<&ComplexityCell> = cells.iter().filter(|c| c.n >= 1).collect();
    let mut ds: Vec<usize> = pts.iter().map(|c| c.d).collect();
    ds.sort_unstable();
    ds.dedup();
    let mut es: Vec<u64> = pts.iter().map(|c| c.eps.to_bits()).collect();
    es.sort_unstable();
    es.dedup();
    if pts.len() < 4 || ds.len() < 2 || es.len() < 2 {
        return None;
    }
    // normal equations for [1, ln 1/ε, ln d]
    let rows: Vec<[f64; 3]> = pts
        .iter()
        .map(|c| [1.0, (1.0 / c.eps).ln(), (c.d as f64).ln()])
        .collect();
    let ys: Vec<f64> = pts.iter().map(|c| (c.n as f64).ln()).collect();
    let mut ata = nalgebra::Matrix3::<f64>::zeros();
    let mut aty = nalgebra::Vector3::<f64>::zeros();
    for (r, y) in rows.iter().zip(&ys) {
        for i in 0..3 {
            aty[i] += r[i] * y;
            for j in 0..3 {
                ata[(i, j)] += r[i] * r[j];
            }
        }
    }
    let beta = ata.cholesky()?.solve(&aty);
    let mut ss_res = 0.0;
    let mut ss_y = 0.0;
    for (r, y) in rows.iter().zip(&ys) {
        let pred = beta[0] + beta[1] * r[1] + beta[2] * r[2];
        ss_res += (y - pred) * (y - pred);
        ss_y += y * y;
    }
    let rel = if ss_y > 0.0 { (ss_res / ss_y).sqrt() } else { 0.0 };
    Some(PolyFit {
        log_c: beta[0],
        p: beta[1],
        q: beta[2],
        rel_rms_residual: rel,
        points: pts.len(),
    })
}

fn envelope_exponent(eps: &[f64], cells: &[ComplexityCell]) -> Option<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &e in eps {
        let n = cells.iter().filter(|c| c.eps == e).map(|c| c.n).max()?;
        if n >= 1 {
            xs.push((1.0 / e).ln());
            ys.push((n as f64).ln());
        }
    }
    if xs.len() < 2 {
        return None;
    }
    Some(ols_slope(&xs, &ys))
}

fn top_and_half(dims: &[usize]) -> Option<(usize, usize)> {
    let d_max = *dims.iter().max()?;
    let d_half = dims.iter().copied().filter(|&d| 2 * d <= d_max).max()?;
    Some((d_max, d_half))
}

fn tail_exponent(eps: &[f64], dims: &[usize], cells: &[ComplexityCell]) -> Option<f64> {
    let (top, half) = top_and_half(dims)?;
    let n_at = |d: usize, e: f64| cells.iter().find(|c| c.d == d && c.eps == e).map(|c| c.n.max(1) as f64);
    eps.iter()
        .map(|&e| Some((n_at(top, e)? / n_at(half, e)?).ln() / (top as f64 / half as f64).ln()))
        .collect::<Option<Vec<f64>>>()?
        .into_iter()
        .reduce(f64::max)
}

/// Fills the n(ε, d) table for arbitrary-linear-functional information and
/// classifies the observed growth.
///
/// Cells are evaluated in parallel; the result does not depend on the
/// evaluation order.
pub fn tractability_probe(
    shape: &ShapeSequence,
    eps: &[f64],
    dims: &[usize],
    criterion: Criterion,
) -> Result<ComplexityReport> {
    tractability_probe_with_guard(shape, eps, dims, criterion, max_eigs())
}

pub fn tractability_probe_with_guard(
    shape: &ShapeSequence,
    eps: &[f64],
    dims: &[usize],
    criterion: Criterion,
    guard: u64,
) -> Result<ComplexityReport> {
    if eps.is_empty() || dims.is_empty() {
        return Err(invalid("tractability probe needs nonempty ε and d grids"));
    }
    for &e in eps {
        check_eps(e)?;
    }
    let grid: Vec<(usize, f64)> = dims
        .iter()
        .flat_map(|&d| eps.iter().map(move |&e| (d, e)))
        .collect();
    let cells = grid
        .par_iter()
        .map(|&(d, e)| match info_complexity_with_guard(shape, d, e, criterion, guard) {
            Ok(n) => Ok(ComplexityCell {
                d,
                eps: e,
                n,
                lower_bound: false,
            }),
            Err(Error::ResourceLimit { partial, .. }) => Ok(ComplexityCell {
                d,
                eps: e,
                n: partial.unwrap_or(0),
                lower_bound: true,
            }),
            Err(other) => Err(other),
        })
        .collect::<Result<Vec<_>>>()?;

    let p_hat = envelope_exponent(eps, &cells);
    let mut sorted_eps = eps.to_vec();
    sorted_eps.sort_by(|a, b| b.total_cmp(a));
    let p_hat_small_eps = envelope_exponent(&sorted_eps[sorted_eps.len() / 2..], &cells);
    let q_hat = tail_exponent(eps, dims, &cells);
    let fit = joint_fit(&cells);
    let t_hat = quasi_ratio_max(cells.iter());
    let weak_ratio = cells
        .iter()
        .filter(|c| c.n >= 1)
        .map(|c| (c.n as f64).ln() / (1.0 / c.eps + c.d as f64))
        .reduce(f64::max);

    let mut report = ComplexityReport {
        shape: shape.to_string(),
        criterion,
        eps: eps.to_vec(),
        dims: dims.to_vec(),
        cells,
        p_hat,
        p_hat_small_eps,
        q_hat,
        fit,
        t_hat,
        weak_ratio,
        classification: Classification::Inconclusive,
    };
    report.classification = classify(&report);
    Ok(report)
}

/// strong-poly: n does not grow between the two largest grid dimensions
/// (q̂ ≤ 0.1); poly: the joint ln n fit has a small residual;
/// quasi-poly-consistent: the per-dimension t̂ grows by at most
/// [`QUASI_POLY_GROWTH_TOL`] from half the largest dimension to the largest.
fn classify(report: &ComplexityReport) -> Classification {
    if report.cells.iter().any(|c| c.lower_bound) {
        return Classification::Inconclusive;
    }
    let (Some(fit), Some(q_hat)) = (report.fit, report.q_hat) else {
        return Classification::Inconclusive;
    };
    if q_hat <= STRONG_POLY_Q_TOL {
        return Classification::StrongPoly;
    }
    if fit.rel_rms_residual <= POLY_RESIDUAL_TOL {
        return Classification::Poly;
    }
    if let Some((top, half)) = top_and_half(&report.dims) {
        if let (Some(t_top), Some(t_half)) = (report.t_hat_at(top), report.t_hat_at(half)) {
            if t_half > 0.0 && t_top <= QUASI_POLY_GROWTH_TOL * t_half {
                return Classification::QuasiPolyConsistent;
            }
        }
    }
    Classification::Inconclusive
}
