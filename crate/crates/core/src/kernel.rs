//! Gaussian kernel evaluation, the Gaussian weight ρ_d, Gram matrices and the
//! initial error ‖I_d‖.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{invalid, Result};
use crate::shape::ShapeSequence;
use crate::spectrum::UnivariateSpectrum;

/// Relative tolerance on the smallest Gram eigenvalue for the PSD check.
pub const TOL_PSD: f64 = 1e-12;

/// The kernel K_d(x,t) = exp(-Σ γ_ℓ²(x_ℓ - t_ℓ)²) for a fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianKernel {
    gammas: Vec<f64>,
    gamma_sq: Vec<f64>,
}

impl GaussianKernel {
    pub fn new(shape: &ShapeSequence, d: usize) -> Result<Self> {
        let gammas = shape.gammas(d)?;
        Ok(Self::from_gammas(gammas))
    }

    pub(crate) fn from_gammas(gammas: Vec<f64>) -> Self {
        let gamma_sq = gammas.iter().map(|g| g * g).collect();
        Self { gammas, gamma_sq }
    }

    pub fn dim(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(invalid(format!(
                "point has dimension {}, kernel has dimension {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64], t: &[f64]) -> Result<f64> {
        self.check(x)?;
        self.check(t)?;
        Ok(self.eval_unchecked(x, t))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64], t: &[f64]) -> f64 {
        let s: f64 = self
            .gamma_sq
            .iter()
            .zip(x.iter().zip(t))
            .map(|(g2, (a, b))| g2 * (a - b) * (a - b))
            .sum();
        (-s).exp()
    }

    /// The vector k(x) = (K(x, x_1), …, K(x, x_n)).
    pub fn column(&self, points: &[Vec<f64>], x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        points
            .iter()
            .map(|p| {
                self.check(p)?;
                Ok(self.eval_unchecked(p, x))
            })
            .collect()
    }
}

/// K_d(x,t) for the given shape rule at dimension `d`.
pub fn kernel_eval(shape: &ShapeSequence, d: usize, x: &[f64], t: &[f64]) -> Result<f64> {
    GaussianKernel::new(shape, d)?.eval(x, t)
}

/// The probability density ρ_d(t) = π^{-d/2} exp(-‖t‖²).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaussianWeight {
    pub dim: usize,
}

impl GaussianWeight {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        Ok(Self { dim })
    }

    pub fn density(&self, t: &[f64]) -> Result<f64> {
        if t.len() != self.dim {
            return Err(invalid(format!(
                "point has dimension {}, weight has dimension {}",
                t.len(),
                self.dim
            )));
        }
        let sq: f64 = t.iter().map(|v| v * v).sum();
        Ok(PI.powf(-(self.dim as f64) / 2.0) * (-sq).exp())
    }

    /// Per-coordinate variance.
    pub fn variance(&self) -> f64 {
        0.5
    }
}

/// Symmetric n×n kernel matrix over a point set.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    pub matrix: DMatrix<f64>,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let sym = (&self.matrix + self.matrix.transpose()) * 0.5;
        let mut ev: Vec<f64> = crate::linalg::symmetric_eigen(sym).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    /// PSD up to `TOL_PSD` relative to the largest eigenvalue.
    pub fn is_psd(&self) -> bool {
        let ev = self.eigenvalues();
        let max = ev.first().copied().unwrap_or(0.0).max(0.0);
        ev.last().copied().unwrap_or(0.0) >= -TOL_PSD * max.max(1.0)
    }
}

pub fn gram_matrix(kernel: &GaussianKernel, points: &[Vec<f64>]) -> Result<GramMatrix> {
    if points.is_empty() {
        return Err(invalid("gram matrix of an empty point set"));
    }
    for p in points {
        kernel.check(p)?;
    }
    let n = points.len();
    let mut m = DMatrix::from_element(n, n, 1.0);
    for i in 0..n {
        for j in 0..i {
            let v = kernel.eval_unchecked(&points[i], &points[j]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(GramMatrix { matrix: m })
}

/// ‖I_d‖ = sqrt(Π_ℓ λ_1(γ_ℓ)), the error of the zero algorithm.
pub fn initial_error(shape: &ShapeSequence, d: usize) -> Result<f64> {
    let log_sum: f64 = shape
        .gammas(d)?
        .into_iter()
        .map(|g| UnivariateSpectrum::new(g).map(|s| s.log_lambda(1)))
        .sum::<Result<f64>>()?;
    Ok((0.5 * log_sum).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn iso(g: f64) -> ShapeSequence {
        ShapeSequence::isotropic(g).unwrap()
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_eval(&iso(3.0), 3, &[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_relative_eq!(
            kernel_eval(&iso(1.0), 1, &[0.0], &[1.0]).unwrap(),
            (-1.0f64).exp(),
            max_relative = 1e-15
        );
        let s = ShapeSequence::explicit(vec![1.0, 2.0]).unwrap();
        assert_relative_eq!(
            kernel_eval(&s, 2, &[0.0, 0.0], &[1.0, 1.0]).unwrap(),
            (-5.0f64).exp(),
            max_relative = 1e-15
        );
        assert!(kernel_eval(&iso(1.0), 2, &[0.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn kernel_factorizes_over_coordinates() {
        let s = ShapeSequence::power_law(1.3, 1.0).unwrap();
        let x = [0.3, -1.2, 2.0, 0.1];
        let t = [-0.7, 0.4, 1.1, 0.1];
        let full = kernel_eval(&s, 4, &x, &t).unwrap();
        let prod: f64 = (0..4)
            .map(|l| {
                let k1 = GaussianKernel::from_gammas(vec![s.gamma(l + 1).unwrap()]);
                k1.eval(&[x[l]], &[t[l]]).unwrap()
            })
            .product();
        assert_relative_eq!(full, prod, max_relative = 1e-14);
    }

    #[test]
    fn gram_small_cases() {
        let k = GaussianKernel::new(&iso(1.0), 1).unwrap();
        let g = gram_matrix(&k, &[vec![0.5]]).unwrap();
        assert_eq!(g.matrix, DMatrix::from_element(1, 1, 1.0));
        let g = gram_matrix(&k, &[vec![0.5], vec![0.5]]).unwrap();
        assert_eq!(g.matrix, DMatrix::from_element(2, 2, 1.0));
        assert!(g.is_psd());
        assert!(gram_matrix(&k, &[]).is_err());
        assert!(gram_matrix(&k, &[vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn gram_of_random_normal_points_is_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<Vec<f64>> = (0..5)
            .map(|_| (0..2).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        let k = GaussianKernel::new(&iso(1.0), 2).unwrap();
        let g = gram_matrix(&k, &pts).unwrap();
        assert!(g.min_eigenvalue() >= -1e-12);
        assert_eq!(g.matrix, g.matrix.transpose());
        for i in 0..5 {
            assert_eq!(g.matrix[(i, i)], 1.0);
        }
    }

    #[test]
    fn initial_error_examples() {
        assert_relative_eq!(initial_error(&iso(1.0), 1).unwrap(), 0.786_151_377_757_423_3, max_relative = 1e-12);
        assert_relative_eq!(initial_error(&iso(1.0), 2).unwrap(), 0.618_033_988_749_894_9, max_relative = 1e-12);
    }

    #[test]
    fn weight_density_is_normalized_in_one_dim() {
        let w = GaussianWeight::new(1).unwrap();
        // trapezoid on [-10, 10]
        let h = 1e-3;
        let s: f64 = (-10_000..=10_000).map(|i| w.density(&[i as f64 * h]).unwrap() * h).sum();
        assert_relative_eq!(s, 1.0, max_relative = 1e-12);
        assert!(GaussianWeight::new(0).is_err());
    }
}
