//! Gauss–Hermite quadrature normalized to ρ_1(t) = π^{-1/2} e^{-t²}, tensor
//! grids over ρ_d, and the Nyström discretization of the univariate kernel
//! integral operator.
//!
//! Nodes come from the symmetric tridiagonal (Jacobi) matrix of the
//! three-term recurrence of the orthonormal Hermite polynomials, polished by
//! one Newton step; weights use the Christoffel formula accumulated in log
//! space so that far-out weights do not overflow the intermediate sums.

use nalgebra::DMatrix;

pub(crate) use crate::linalg::sorted_eigenvalues;

use crate::error::{invalid, Error, Result};
use crate::kernel::GaussianKernel;

mod precise;

pub const MAX_NODES: usize = 512;
/// Upper bound on m^d for tensor grids.
pub const MAX_GRID: u64 = 10_000_000;
pub const MAX_TENSOR_DIM: usize = 4;

/// Eigenvalues below this fraction of the largest are recomputed in
/// extended precision by [`nystrom_eigs`].
const PRECISE_BELOW: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Natural log of each weight; finite even where `weights` underflows.
    pub log_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * g(t))
            .sum()
    }

    /// The same ρ_1-rule after the substitution t → t/s.
    ///
    /// For s > 1 the nodes cluster near the origin, which is what a narrow
    /// kernel needs; the weights absorb the Jacobian and the density ratio.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(invalid(format!("rule scale must be positive, got {s}")));
        }
        let shift = 1.0 - 1.0 / (s * s);
        let nodes: Vec<f64> = self.nodes.iter().map(|t| t / s).collect();
        let log_weights: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.log_weights)
            .map(|(t, lw)| lw + t * t * shift - s.ln())
            .collect();
        let weights = log_weights.iter().map(|lw| lw.exp()).collect();
        Ok(Self {
            nodes,
            weights,
            log_weights,
        })
    }
}

/// Orthonormal Hermite recurrence under ρ_1 evaluated at `x`, in scaled form.
/// Returns `(p_{m-1}, p_m, ln Σ_{k<m} p_k²)` where the first two share an
/// unknown common positive factor.
fn recurrence(m: usize, x: f64) -> (f64, f64, f64) {
    const BIG: f64 = 1e100;
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut sum = 0.0;
    let mut log_scale = 0.0;
    for k in 0..m {
        sum += cur * cur;
        // t p_k = b_{k+1} p_{k+1} + b_k p_{k-1},  b_k = sqrt(k/2)
        let b_next = ((k + 1) as f64 / 2.0).sqrt();
        let b_k = (k as f64 / 2.0).sqrt();
        let next = (x * cur - b_k * prev) / b_next;
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            prev /= BIG;
            cur /= BIG;
            sum /= BIG * BIG;
            log_scale += BIG.ln();
        }
    }
    (prev, cur, sum.ln() + 2.0 * log_scale)
}

/// m-point Gauss–Hermite rule for ρ_1, exact for polynomials of degree ≤ 2m-1.
pub fn gauss_hermite(m: usize) -> Result<QuadratureRule> {
    if m == 0 || m > MAX_NODES {
        return Err(invalid(format!("quadrature size must be in 1..={MAX_NODES}, got {m}")));
    }
    let mut jacobi = DMatrix::<f64>::zeros(m, m);
    for k in 1..m {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k, k - 1)] = b;
        jacobi[(k - 1, k)] = b;
    }
    let mut nodes: Vec<f64> = crate::linalg::symmetric_eigen(jacobi).eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);

    for x in nodes.iter_mut() {
        // p_m' = sqrt(2m) p_{m-1}
        let (pm1, pm, _) = recurrence(m, *x);
        if pm1 != 0.0 {
            *x -= pm / ((2.0 * m as f64).sqrt() * pm1);
        }
    }
    // enforce exact symmetry about 0
    for i in 0..m / 2 {
        let a = 0.5 * (nodes[m - 1 - i] - nodes[i]);
        nodes[i] = -a;
        nodes[m - 1 - i] = a;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }

    let log_weights: Vec<f64> = nodes.iter().map(|&x| -recurrence(m, x).2).collect();
    let weights = log_weights.iter().map(|lw| lw.exp()).collect();
    Ok(QuadratureRule {
        nodes,
        weights,
        log_weights,
    })
}

/// Tensor product of one-dimensional rules, materialized point by point.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorGrid {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl TensorGrid {
    pub fn new(rules: &[QuadratureRule]) -> Result<Self> {
        let size = grid_size(rules.iter().map(QuadratureRule::len))?;
        let d = rules.len();
        let mut points = Vec::with_capacity(size);
        let mut weights = Vec::with_capacity(size);
        let mut idx = vec![0usize; d];
        for _ in 0..size {
            points.push((0..d).map(|l| rules[l].nodes[idx[l]]).collect());
            weights.push((0..d).map(|l| rules[l].weights[idx[l]]).product());
            for l in (0..d).rev() {
                idx[l] += 1;
                if idx[l] < rules[l].len() {
                    break;
                }
                idx[l] = 0;
            }
        }
        Ok(Self { points, weights })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn grid_size(sizes: impl Iterator<Item = usize>) -> Result<usize> {
    let mut total: u64 = 1;
    for s in sizes {
        total = total.saturating_mul(s as u64);
        if total > MAX_GRID {
            return Err(Error::ResourceLimit {
                what: "tensor quadrature grid size".into(),
                limit: MAX_GRID,
                partial: None,
            });
        }
    }
    Ok(total as usize)
}

/// Tensor-product Gauss–Hermite approximation of ∫ g(t) ρ_d(t) dt.
pub fn integrate(d: usize, m: usize, g: impl Fn(&[f64]) -> f64) -> Result<f64> {
    if d == 0 || d > MAX_TENSOR_DIM {
        return Err(invalid(format!("tensor integration supports 1..={MAX_TENSOR_DIM} dims, got {d}")));
    }
    grid_size(std::iter::repeat_n(m, d))?;
    let rule = gauss_hermite(m)?;
    let mut idx = vec![0usize; d];
    let mut point = vec![0.0; d];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for l in 0..d {
            point[l] = rule.nodes[idx[l]];
            w *= rule.weights[idx[l]];
        }
        total += w * g(&point);
        let mut l = d;
        loop {
            if l == 0 {
                return Ok(total);
            }
            l -= 1;
            idx[l] += 1;
            if idx[l] < m {
                break;
            }
            idx[l] = 0;
        }
    }
}

/// Scale used to adapt the ρ_1-rule to a kernel of shape γ.
pub(crate) fn nystrom_scale(gamma: f64) -> f64 {
    (1.0 + gamma).sqrt()
}

/// The ρ_1-rule used for Nyström discretizations at shape γ.
pub fn nystrom_rule(gamma: f64, m: usize) -> Result<QuadratureRule> {
    gauss_hermite(m)?.scaled(nystrom_scale(gamma))
}

/// The m×m matrix A_ab = sqrt(w_a w_b) K_1(t_a, t_b).
pub fn nystrom_matrix(gamma: f64, rule: &QuadratureRule) -> DMatrix<f64> {
    let kernel = GaussianKernel::from_gammas(vec![gamma]);
    let m = rule.len();
    let sw: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
    let mut a = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let v = sw[i] * sw[j] * kernel.eval_unchecked(&[rule.nodes[i]], &[rule.nodes[j]]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    a
}

/// Largest `k` eigenvalues (descending) of the m-point Nyström matrix of the
/// univariate kernel integral operator with shape γ.
///
/// Eigenvalues that are tiny relative to the largest one are recomputed in
/// extended precision, so each returned value carries relative accuracy
/// rather than only absolute accuracy ~1e-16.
pub fn nystrom_eigs(gamma: f64, m: usize, k: usize) -> Result<Vec<f64>> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(invalid(format!("gamma must be positive, got {gamma}")));
    }
    if k == 0 || k > m {
        return Err(invalid(format!("need 1 <= k <= m, got k={k}, m={m}")));
    }
    let rule = nystrom_rule(gamma, m)?;
    let mut ev = sorted_eigenvalues(nystrom_matrix(gamma, &rule));
    ev.truncate(k);
    let top = ev[0];
    if ev.iter().any(|&v| v < PRECISE_BELOW * top) {
        let refined = precise::nystrom_eigs(gamma, &rule, k);
        for (i, v) in ev.iter_mut().enumerate() {
            if *v < PRECISE_BELOW * top {
                if let Some(&r) = refined.values.get(i) {
                    if r > 1e6 * refined.residual {
                        *v = r;
                    }
                }
            }
        }
    }
    Ok(ev)
}

/// All m eigenvalues of the Nyström matrix in plain double precision.
pub fn nystrom_spectrum(gamma: f64, m: usize) -> Result<Vec<f64>> {
    let rule = nystrom_rule(gamma, m)?;
    Ok(sorted_eigenvalues(nystrom_matrix(gamma, &rule)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gaussian_moment(p: u32) -> f64 {
        if p % 2 == 1 {
            return 0.0;
        }
        // (p-1)!! / 2^{p/2}
        let mut df = 1.0;
        let mut k = p as i64 - 1;
        while k > 1 {
            df *= k as f64;
            k -= 2;
        }
        df / 2f64.powi(p as i32 / 2)
    }

    #[test]
    fn small_rules() {
        let r = gauss_hermite(1).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert_relative_eq!(r.weights[0], 1.0, max_relative = 1e-15);
        let r = gauss_hermite(2).unwrap();
        assert_relative_eq!(r.nodes[1], std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-15);
        assert_eq!(r.nodes[0], -r.nodes[1]);
        assert_relative_eq!(r.weights[0], 0.5, max_relative = 1e-14);
        assert_relative_eq!(r.weights[1], 0.5, max_relative = 1e-14);
        assert_relative_eq!(r.integrate(|t| t * t), 0.5, max_relative = 1e-14);
    }

    #[test]
    fn size_bounds() {
        assert!(gauss_hermite(0).is_err());
        assert!(gauss_hermite(513).is_err());
        assert!(gauss_hermite(512).is_ok());
    }

    #[test]
    fn weights_sum_to_one_and_nodes_symmetric() {
        for m in [1, 2, 3, 7, 20, 64, 200, 300] {
            let r = gauss_hermite(m).unwrap();
            let s: f64 = r.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-13, "m={m} sum={s}");
            for i in 0..m {
                assert_eq!(r.nodes[i], -r.nodes[m - 1 - i]);
                assert!(r.weights[i] > 0.0);
            }
        }
    }

    #[test]
    fn exact_on_monomials() {
        for m in [1, 2, 5, 10, 16] {
            let r = gauss_hermite(m).unwrap();
            for p in 0..(2 * m as u32) {
                let got = r.integrate(|t| t.powi(p as i32));
                let want = gaussian_moment(p);
                // odd moments cancel; scale by the matching absolute moment
                let scale = gaussian_moment(p + p % 2).max(1.0);
                assert!(
                    (got - want).abs() <= 1e-12 * scale,
                    "m={m} p={p} got={got} want={want}"
                );
            }
        }
    }

    #[test]
    fn scaled_rule_still_integrates_rho() {
        let r = gauss_hermite(100).unwrap().scaled(2.0).unwrap();
        assert_relative_eq!(r.weights.iter().sum::<f64>(), 1.0, max_relative = 1e-13);
        assert_relative_eq!(r.integrate(|t| t * t), 0.5, max_relative = 1e-13);
        assert_relative_eq!(r.integrate(|t| t.powi(4)), 0.75, max_relative = 1e-12);
    }

    #[test]
    fn tensor_integration_examples() {
        for d in 1..=3 {
            assert_relative_eq!(integrate(d, 5, |_| 1.0).unwrap(), 1.0, max_relative = 1e-13);
        }
        assert_relative_eq!(integrate(2, 4, |t| t[0] * t[0]).unwrap(), 0.5, max_relative = 1e-13);
        assert!(integrate(5, 2, |_| 1.0).is_err());
        assert!(matches!(
            integrate(4, 100, |_| 1.0),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn tensor_grid_matches_integrate() {
        let r = gauss_hermite(6).unwrap();
        let grid = TensorGrid::new(&[r.clone(), r]).unwrap();
        assert_eq!(grid.len(), 36);
        let g = |t: &[f64]| (t[0] - 0.3).cos() * (1.0 + t[1] * t[1]);
        let a: f64 = grid.points.iter().zip(&grid.weights).map(|(p, w)| w * g(p)).sum();
        let b = integrate(2, 6, g).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-14);
    }

    #[test]
    fn nystrom_trace_and_sign() {
        let all = nystrom_spectrum(1.0, 200).unwrap();
        let sum: f64 = all.iter().sum();
        assert!((sum - 1.0).abs() <= 1e-12, "trace {sum}");
        assert!(all.iter().all(|&v| v >= -1e-12));
        assert!(nystrom_eigs(1.0, 10, 11).is_err());
        assert!(nystrom_eigs(-1.0, 10, 1).is_err());
    }
}
