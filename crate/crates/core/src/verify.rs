//! Self-checks that tie the closed forms to independent numerical routes.
//!
//! Every check is deterministic and its report contains no timings, so two
//! runs render byte-identical output.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algorithms::{minimal_error_all, spline_worst_case_error, Design};
use crate::complexity::{
    error_sequence_all, estimate_rate, info_complexity, quasipoly_exponent, tractability_probe, Classification,
    Criterion,
};
use crate::error::{invalid, Result};
use crate::kernel::{initial_error, kernel_eval};
use crate::quadrature::{gauss_hermite, nystrom_eigs};
use crate::shape::ShapeSequence;
use crate::spectrum::{mercer_check, top_n_tensor_eigenvalues, MultiIndex, UnivariateSpectrum};

pub const CHECK_COUNT: u32 = 12;

/// Base seed of the random designs used by the spline check.
pub const DESIGN_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:02} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

pub fn check_name(id: u32) -> Option<&'static str> {
    Some(match id {
        1 => "spectral-oracle",
        2 => "trace-identity",
        3 => "orthonormality",
        4 => "mercer-reconstruction",
        5 => "tensor-enumeration",
        6 => "half-rate-bound",
        7 => "decaying-shape-rate",
        8 => "isotropic-absolute-exponent",
        9 => "isotropic-normalized-quasi-poly",
        10 => "spline-vs-optimal",
        11 => "point-complexity",
        12 => "determinism",
        _ => return None,
    })
}

fn outcome(id: u32, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        id,
        name: check_name(id).unwrap_or("unknown").to_string(),
        passed,
        detail,
    }
}

fn shape(s: &str) -> ShapeSequence {
    s.parse().expect("built-in shape")
}

/// Runs one check. Errors from the library count as failures.
pub fn run_check(id: u32) -> CheckOutcome {
    let result = match id {
        1 => spectral_oracle(),
        2 => trace_identity(),
        3 => orthonormality(),
        4 => mercer_reconstruction(),
        5 => tensor_enumeration(),
        6 => half_rate_bound(),
        7 => decaying_shape_rate(),
        8 => isotropic_absolute_exponent(),
        9 => isotropic_normalized_quasi_poly(),
        10 => spline_vs_optimal(),
        11 => point_complexity(),
        12 => determinism(),
        _ => Err(invalid(format!("no check with id {id}"))),
    };
    match result {
        Ok((passed, detail)) => outcome(id, passed, detail),
        Err(e) => outcome(id, false, format!("error: {e}")),
    }
}

pub fn run_all() -> Vec<CheckOutcome> {
    (1..=CHECK_COUNT).map(run_check).collect()
}

type Check = Result<(bool, String)>;

const GAMMAS: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 10.0];

fn spectral_oracle() -> Check {
    let mut worst: f64 = 0.0;
    for g in GAMMAS {
        let s = UnivariateSpectrum::new(g)?;
        let ev = nystrom_eigs(g, 200, 10)?;
        for (j, v) in ev.iter().enumerate() {
            let want = s.lambda(j + 1);
            worst = worst.max((v - want).abs() / want);
        }
    }
    Ok((worst <= 1e-6, format!("max relative error {worst:.2e} (tol 1e-6)")))
}

fn trace_identity() -> Check {
    let mut worst: f64 = 0.0;
    for g in GAMMAS {
        let s = UnivariateSpectrum::new(g)?;
        let sum: f64 = (1..=2000).map(|j| s.lambda(j)).sum();
        let want = 1.0 - s.omega.powi(2000);
        worst = worst.max((sum - want).abs());
    }
    Ok((worst <= 1e-12, format!("max |partial trace - (1 - w^2000)| {worst:.2e} (tol 1e-12)")))
}

fn orthonormality() -> Check {
    let rule = gauss_hermite(200)?;
    let mut worst: f64 = 0.0;
    for g in [0.5, 1.0, 2.0] {
        let s = UnivariateSpectrum::new(g)?;
        let phis = rule
            .nodes
            .iter()
            .map(|&t| s.eigenfunctions(10, t))
            .collect::<Result<Vec<_>>>()?;
        for i in 0..10 {
            for j in 0..10 {
                let g_ij: f64 = phis.iter().zip(&rule.weights).map(|(p, w)| w * p[i] * p[j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g_ij - want).abs());
            }
        }
    }
    Ok((worst <= 1e-8, format!("max |G - I| {worst:.2e} (tol 1e-8)")))
}

fn mercer_reconstruction() -> Check {
    let s = UnivariateSpectrum::new(1.0)?;
    let iso = shape("iso:1");
    let probe = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let mut worst: f64 = 0.0;
    for &x in &probe {
        for &t in &probe {
            let k = kernel_eval(&iso, 1, &[x], &[t])?;
            worst = worst.max((mercer_check(&s, x, t, 50)? - k).abs());
        }
    }
    Ok((worst <= 1e-8, format!("max |mercer - kernel| {worst:.2e} (tol 1e-8)")))
}

/// All indices in {1..side}^d ranked by value, equal values (to rounding)
/// in decreasing lexicographic order.
fn brute_force_top(shape: &ShapeSequence, d: usize, side: usize, n: usize) -> Result<Vec<(f64, Vec<usize>)>> {
    let spectra = shape
        .gammas(d)?
        .into_iter()
        .map(UnivariateSpectrum::new)
        .collect::<Result<Vec<_>>>()?;
    let mut all = Vec::with_capacity(side.pow(d as u32));
    let mut idx = vec![1usize; d];
    loop {
        let v: f64 = idx.iter().zip(&spectra).map(|(&j, s)| s.lambda(j)).product();
        all.push((v, idx.clone()));
        let mut l = d;
        loop {
            if l == 0 {
                return Ok(rank(all, n));
            }
            l -= 1;
            if idx[l] < side {
                idx[l] += 1;
                break;
            }
            idx[l] = 1;
        }
    }
}

fn rank(mut all: Vec<(f64, Vec<usize>)>, n: usize) -> Vec<(f64, Vec<usize>)> {
    all.sort_by(|a, b| b.0.total_cmp(&a.0));
    // regroup values equal up to rounding and order each group by index
    let mut out = Vec::with_capacity(all.len());
    let mut i = 0;
    while i < all.len() && out.len() < n {
        let mut k = i + 1;
        while k < all.len() && (all[i].0 - all[k].0).abs() <= 1e-12 * all[i].0 {
            k += 1;
        }
        let mut group = all[i..k].to_vec();
        group.sort_by(|a, b| b.1.cmp(&a.1));
        out.extend(group);
        i = k;
    }
    out.truncate(n);
    out
}

fn tensor_enumeration() -> Check {
    let mut mismatches = 0;
    let mut worst: f64 = 0.0;
    for s in ["iso:1", "explicit:1,0.5,0.25"] {
        let sh = shape(s);
        for d in [2, 3] {
            let got = top_n_tensor_eigenvalues(&sh, d, 100)?;
            let want = brute_force_top(&sh, d, 40, 100)?;
            for (g, (v, idx)) in got.entries.iter().zip(&want) {
                worst = worst.max((g.value - v).abs() / v);
                if g.index != MultiIndex::from_dense(idx)? {
                    mismatches += 1;
                }
            }
        }
    }
    Ok((
        mismatches == 0 && worst <= 1e-12,
        format!("index mismatches {mismatches}, max relative value error {worst:.2e}"),
    ))
}

fn half_rate_bound() -> Check {
    let mut violations = 0;
    let mut worst_ratio: f64 = 0.0;
    for s in ["iso:1", "powerlaw:1:2"] {
        for d in [1, 2, 5, 10, 50] {
            let seq = error_sequence_all(&shape(s), d, 10_000)?;
            for (n, e) in seq.values.iter().enumerate() {
                let bound = ((n + 1) as f64).powf(-0.5);
                worst_ratio = worst_ratio.max(e / bound);
                if *e > bound {
                    violations += 1;
                }
            }
        }
    }
    Ok((
        violations == 0,
        format!("violations {violations}, max e(n)*sqrt(n+1) {worst_ratio:.6}"),
    ))
}

fn decaying_shape_rate() -> Check {
    let pl = estimate_rate(&error_sequence_all(&shape("powerlaw:1:2"), 16, 10_000)?, 100, 10_000)?;
    let iso = estimate_rate(&error_sequence_all(&shape("iso:1"), 16, 10_000)?, 100, 10_000)?;
    let passed = (1.3..=2.5).contains(&pl.rate) && pl.rate >= iso.rate + 0.5;
    Ok((
        passed,
        format!(
            "powerlaw:1:2 rate {:.4} (want [1.3, 2.5]), iso:1 rate {:.4}, gap {:.4} (want >= 0.5)",
            pl.rate,
            iso.rate,
            pl.rate - iso.rate
        ),
    ))
}

fn dyadic(k: i32) -> Vec<f64> {
    (1..=k).map(|i| 2f64.powi(-i)).collect()
}

fn isotropic_absolute_exponent() -> Check {
    let dims: Vec<usize> = (1..=16).collect();
    let r = tractability_probe(&shape("iso:1"), &dyadic(7), &dims, Criterion::Absolute)?;
    let (Some(p), Some(q), Some(fit)) = (r.p_hat, r.q_hat, r.fit) else {
        return Ok((false, "fit unavailable".into()));
    };
    let passed = (1.7..=2.3).contains(&p) && q <= 0.1;
    Ok((
        passed,
        format!(
            "p_hat {p:.4} (want [1.7, 2.3]), q_hat {q:.4} (want <= 0.1), joint fit q {:.4}, class {}",
            fit.q, r.classification
        ),
    ))
}

fn isotropic_normalized_quasi_poly() -> Check {
    let dims: Vec<usize> = (1..=32).collect();
    let r = tractability_probe(&shape("iso:1"), &dyadic(6), &dims, Criterion::Normalized)?;
    let bound = 1.15 * quasipoly_exponent(1.0)?;
    let t = r.t_hat.unwrap_or(f64::INFINITY);
    let halves: Vec<u64> = dims
        .iter()
        .map(|&d| r.cell(d, 0.5).map(|c| c.n).unwrap_or(0))
        .collect();
    let increasing = halves.windows(2).all(|w| w[0] < w[1]);
    let not_poly = !matches!(r.classification, Classification::Poly | Classification::StrongPoly);
    let residual = r.fit.map(|f| f.rel_rms_residual).unwrap_or(f64::NAN);
    Ok((
        t <= bound && increasing && not_poly,
        format!(
            "t_hat {t:.4} (bound {bound:.4}), n(1/2,d) strictly increasing {increasing}, \
             poly residual {residual:.4}, class {}",
            r.classification
        ),
    ))
}

/// Per-coordinate Nyström size used for the spline worst-case error.
pub fn spline_grid_size(d: usize) -> usize {
    if d == 1 {
        80
    } else {
        30
    }
}

fn spline_vs_optimal() -> Check {
    let iso = shape("iso:1");
    let mut violations = 0;
    let mut min_gap = f64::INFINITY;
    for k in 0..200u64 {
        let d = 1 + (k % 2) as usize;
        let n = 1 + (k / 2 % 20) as usize;
        let design = Design::random(d, n, DESIGN_SEED + k)?;
        let spline = spline_worst_case_error(&iso, d, &design, spline_grid_size(d))?;
        let optimal = minimal_error_all(&iso, d, n)?;
        min_gap = min_gap.min(spline - optimal);
        if spline < optimal - 1e-9 {
            violations += 1;
        }
    }
    let mut empty_err: f64 = 0.0;
    for d in [1, 2] {
        let e = spline_worst_case_error(&iso, d, &Design::empty(d)?, spline_grid_size(d))?;
        empty_err = empty_err.max((e - initial_error(&iso, d)?).abs());
    }
    Ok((
        violations == 0 && empty_err <= 1e-6,
        format!(
            "violations {violations} of 200, min(spline - optimal) {min_gap:.3e}, \
             empty-design error {empty_err:.2e} (tol 1e-6)"
        ),
    ))
}

fn point_complexity() -> Check {
    let n = info_complexity(&shape("iso:1"), 1, 0.1, Criterion::Absolute)?;
    Ok((n == 5, format!("n = {n} (want 5)")))
}

/// Reruns checks 1 to 11 and compares the rendered reports.
fn determinism() -> Check {
    let render = || {
        (1..CHECK_COUNT)
            .map(|id| run_check(id).to_string())
            .collect::<Vec<_>>()
            .join("\n")
    };
    let a = render();
    let b = render();
    Ok((a == b, format!("two in-process runs identical: {}", a == b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_orders_ties_by_descending_index() {
        let all = vec![(0.5, vec![1, 2]), (1.0, vec![1, 1]), (0.5, vec![2, 1]), (0.1, vec![3, 1])];
        let r = rank(all, 3);
        let idx: Vec<_> = r.into_iter().map(|x| x.1).collect();
        assert_eq!(idx, vec![vec![1, 1], vec![2, 1], vec![1, 2]]);
    }

    #[test]
    fn cheap_checks_pass() {
        for id in [2, 4, 11] {
            let o = run_check(id);
            assert!(o.passed, "{o}");
        }
        assert!(!run_check(99).passed);
    }
}
