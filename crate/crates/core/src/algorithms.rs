//! Approximation algorithms: the optimal truncated eigen-projection for
//! arbitrary linear information, and the minimal-norm spline for function
//! values together with its power function and worst-case error.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::kernel::{gram_matrix, initial_error, GaussianKernel};
use crate::quadrature::{self, gauss_hermite, nystrom_rule, TensorGrid};
use crate::shape::ShapeSequence;
use crate::spectrum::{top_n_tensor_eigenvalues, MultiIndex, UnivariateSpectrum};

/// Relative spectral clipping threshold for the Gram pseudo-inverse.
pub const CLIP_RELATIVE: f64 = 1e-12;
/// Upper bound on the number of Nyström grid points for spline errors.
pub const MAX_NYSTROM_GRID: usize = 4096;

fn spectra_for(shape: &ShapeSequence, d: usize) -> Result<Vec<UnivariateSpectrum>> {
    shape
        .gammas(d)?
        .into_iter()
        .map(UnivariateSpectrum::new)
        .collect()
}

/// Evaluates products of univariate eigenfunctions for a fixed set of
/// multi-indices.
#[derive(Debug, Clone)]
struct ProductBasis {
    spectra: Vec<UnivariateSpectrum>,
    indices: Vec<MultiIndex>,
    /// Highest index needed per coordinate.
    max_j: Vec<usize>,
}

impl ProductBasis {
    fn new(spectra: Vec<UnivariateSpectrum>, indices: Vec<MultiIndex>) -> Self {
        let mut max_j = vec![1; spectra.len()];
        for idx in &indices {
            for &(l, j) in idx.active() {
                let l = l as usize;
                max_j[l] = max_j[l].max(j as usize);
            }
        }
        Self {
            spectra,
            indices,
            max_j,
        }
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.spectra.len() {
            return Err(invalid(format!(
                "point has dimension {}, basis has dimension {}",
                x.len(),
                self.spectra.len()
            )));
        }
        let per_coord = self
            .spectra
            .iter()
            .zip(x)
            .zip(&self.max_j)
            .map(|((s, &xl), &j)| s.eigenfunctions(j, xl))
            .collect::<Result<Vec<_>>>()?;
        let ones: f64 = per_coord.iter().map(|v| v[0]).product();
        Ok(self
            .indices
            .iter()
            .map(|idx| {
                if idx.active().iter().any(|&(l, _)| per_coord[l as usize][0] == 0.0) {
                    // avoid 0/0 below; recompute directly
                    return idx
                        .to_dense(per_coord.len())
                        .iter()
                        .zip(&per_coord)
                        .map(|(&j, v)| v[j - 1])
                        .product();
                }
                let mut v = ones;
                for &(l, j) in idx.active() {
                    let c = &per_coord[l as usize];
                    v *= c[j as usize - 1] / c[0];
                }
                v
            })
            .collect())
    }
}

/// A function given by finitely many L2(ρ_d) eigen-coefficients,
/// f = Σ a_k φ_{j(k)}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenExpansion {
    pub terms: Vec<(MultiIndex, f64)>,
}

impl EigenExpansion {
    pub fn new(terms: Vec<(MultiIndex, f64)>) -> Self {
        Self { terms }
    }

    /// From coefficients c_k in the orthonormal basis sqrt(λ_k) φ_k of the
    /// Hilbert space, i.e. a_k = sqrt(λ_k) c_k.
    pub fn from_rkhs_coefficients(
        shape: &ShapeSequence,
        d: usize,
        terms: Vec<(MultiIndex, f64)>,
    ) -> Result<Self> {
        let spectra = spectra_for(shape, d)?;
        let terms = terms
            .into_iter()
            .map(|(idx, c)| {
                let log_lambda: f64 = (0..d).map(|l| spectra[l].log_lambda(idx.get(l))).sum();
                (idx, c * (0.5 * log_lambda).exp())
            })
            .collect();
        Ok(Self { terms })
    }

    pub fn eval(&self, shape: &ShapeSequence, d: usize, x: &[f64]) -> Result<f64> {
        let basis = ProductBasis::new(
            spectra_for(shape, d)?,
            self.terms.iter().map(|t| t.0.clone()).collect(),
        );
        let vals = basis.eval(x)?;
        Ok(vals.iter().zip(&self.terms).map(|(v, t)| v * t.1).sum())
    }
}

/// The optimal algorithm for arbitrary linear information: projection onto
/// the eigenfunctions of the n largest eigenvalues of W_d.
#[derive(Debug, Clone)]
pub struct EigenProjector {
    pub shape: ShapeSequence,
    pub d: usize,
    /// Descending eigenvalues matching `basis`.
    pub values: Vec<f64>,
    basis: ProductBasis,
}

impl EigenProjector {
    pub fn new(shape: &ShapeSequence, d: usize, n: usize) -> Result<Self> {
        let list = top_n_tensor_eigenvalues(shape, d, n)?;
        let values = list.values();
        let indices = list.entries.into_iter().map(|e| e.index).collect();
        Ok(Self {
            shape: shape.clone(),
            d,
            values,
            basis: ProductBasis::new(spectra_for(shape, d)?, indices),
        })
    }

    pub fn n(&self) -> usize {
        self.basis.indices.len()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.basis.indices
    }

    /// φ_{j(1)}(x), …, φ_{j(n)}(x).
    pub fn basis_values(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.basis.eval(x)
    }

    /// Projects a black-box f; inner products use an m-point tensor
    /// Gauss–Hermite rule, so d is limited to the tensor-quadrature range.
    pub fn project<F: Fn(&[f64]) -> f64>(&self, f: F, m: usize) -> Result<Projection> {
        if self.d > quadrature::MAX_TENSOR_DIM {
            return Err(invalid(format!(
                "black-box projection needs d <= {}; supply an EigenExpansion instead",
                quadrature::MAX_TENSOR_DIM
            )));
        }
        let rule = gauss_hermite(m)?;
        let grid = TensorGrid::new(&vec![rule; self.d])?;
        let mut coefficients = vec![0.0; self.n()];
        for (p, &w) in grid.points.iter().zip(&grid.weights) {
            let fw = f(p) * w;
            for (c, b) in coefficients.iter_mut().zip(self.basis.eval(p)?) {
                *c += fw * b;
            }
        }
        Ok(Projection {
            basis: self.basis.clone(),
            coefficients,
        })
    }

    /// Projects a finite expansion exactly: keeps the terms in the top-n set.
    pub fn project_expansion(&self, f: &EigenExpansion) -> Projection {
        let position: HashMap<&MultiIndex, usize> = self
            .basis
            .indices
            .iter()
            .enumerate()
            .map(|(k, idx)| (idx, k))
            .collect();
        let mut coefficients = vec![0.0; self.n()];
        for (idx, a) in &f.terms {
            if let Some(&k) = position.get(idx) {
                coefficients[k] += a;
            }
        }
        Projection {
            basis: self.basis.clone(),
            coefficients,
        }
    }

    /// ‖f - A_n f‖_{L2} for a finite expansion, by Parseval.
    pub fn expansion_error(&self, f: &EigenExpansion) -> f64 {
        let kept: std::collections::HashSet<&MultiIndex> = self.basis.indices.iter().collect();
        let mut merged: HashMap<&MultiIndex, f64> = HashMap::new();
        for (idx, a) in &f.terms {
            *merged.entry(idx).or_default() += a;
        }
        merged
            .into_iter()
            .filter(|(idx, _)| !kept.contains(idx))
            .map(|(_, a)| a * a)
            .sum::<f64>()
            .sqrt()
    }
}

/// A_n(f) = Σ_k ⟨f, φ_{j(k)}⟩ φ_{j(k)}, evaluable at points.
#[derive(Debug, Clone)]
pub struct Projection {
    basis: ProductBasis,
    pub coefficients: Vec<f64>,
}

impl Projection {
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(self
            .basis
            .eval(x)?
            .iter()
            .zip(&self.coefficients)
            .map(|(b, c)| b * c)
            .sum())
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.basis.indices
    }
}

/// A_n(f) for a black-box f using an m-point tensor quadrature.
pub fn eigen_projection<F: Fn(&[f64]) -> f64>(
    shape: &ShapeSequence,
    d: usize,
    n: usize,
    f: F,
    m: usize,
) -> Result<Projection> {
    EigenProjector::new(shape, d, n)?.project(f, m)
}

/// e^{all}(n) = sqrt of the (n+1)-st largest eigenvalue of W_d.
pub fn minimal_error_all(shape: &ShapeSequence, d: usize, n: usize) -> Result<f64> {
    if n == 0 {
        return initial_error(shape, d);
    }
    let list = top_n_tensor_eigenvalues(shape, d, n + 1)?;
    Ok((0.5 * list.entries[n].log_value).exp())
}

/// Data sites x_1, …, x_n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Design {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl Design {
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(invalid(format!(
                "design point has dimension {}, expected {dim}",
                p.len()
            )));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(invalid("design points must be finite"));
        }
        Ok(Self { dim, points })
    }

    pub fn empty(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new())
    }

    /// n i.i.d. draws from ρ_d (each coordinate normal with variance 1/2).
    pub fn random(dim: usize, n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid sigma");
        let points = (0..n)
            .map(|_| (0..dim).map(|_| normal.sample(&mut rng)).collect())
            .collect();
        Self::new(dim, points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn with_point(&self, p: Vec<f64>) -> Result<Self> {
        let mut points = self.points.clone();
        points.push(p);
        Self::new(self.dim, points)
    }
}

/// Clipped pseudo-inverse of a Gram matrix through its eigendecomposition.
#[derive(Debug, Clone)]
struct ClippedInverse {
    /// Kept eigenvectors as columns.
    vectors: DMatrix<f64>,
    /// Reciprocal square roots of the kept eigenvalues.
    inv_sqrt: Vec<f64>,
    tau: f64,
}

impl ClippedInverse {
    fn new(gram: &DMatrix<f64>) -> Self {
        let n = gram.nrows();
        if n == 0 {
            return Self {
                vectors: DMatrix::zeros(0, 0),
                inv_sqrt: Vec::new(),
                tau: 0.0,
            };
        }
        let sym = (gram + gram.transpose()) * 0.5;
        let eig = crate::linalg::symmetric_eigen(sym);
        let max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        let tau = CLIP_RELATIVE * max;
        let kept: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > tau).collect();
        let mut vectors = DMatrix::zeros(n, kept.len());
        for (c, &i) in kept.iter().enumerate() {
            vectors.set_column(c, &eig.eigenvectors.column(i));
        }
        let inv_sqrt = kept.iter().map(|&i| eig.eigenvalues[i].sqrt().recip()).collect();
        Self {
            vectors,
            inv_sqrt,
            tau,
        }
    }

    /// Λ^{-1/2} Vᵀ k, so that kᵀ𝕂⁺k = ‖half(k)‖².
    fn half(&self, k: &DVector<f64>) -> DVector<f64> {
        let mut h = self.vectors.tr_mul(k);
        for (v, s) in h.iter_mut().zip(&self.inv_sqrt) {
            *v *= s;
        }
        h
    }

    fn apply(&self, y: &DVector<f64>) -> DVector<f64> {
        let mut h = self.half(y);
        for (v, s) in h.iter_mut().zip(&self.inv_sqrt) {
            *v *= s;
        }
        &self.vectors * h
    }
}

/// S_n(f)(x) = k(x)ᵀ c with c the minimal-norm solution of 𝕂c = y.
#[derive(Debug, Clone)]
pub struct SplineModel {
    kernel: GaussianKernel,
    design: Design,
    pub coefficients: Vec<f64>,
    /// Eigenvalues of 𝕂 at or below this value were treated as zero.
    pub tau: f64,
}

impl SplineModel {
    pub fn design(&self) -> &Design {
        &self.design
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let k = self.kernel.column(self.design.points(), x)?;
        Ok(k.iter().zip(&self.coefficients).map(|(a, b)| a * b).sum())
    }
}

pub fn spline_fit(shape: &ShapeSequence, d: usize, design: &Design, y: &[f64]) -> Result<SplineModel> {
    if design.is_empty() {
        return Err(invalid("spline fit needs a nonempty design"));
    }
    if design.dim() != d {
        return Err(invalid(format!("design has dimension {}, expected {d}", design.dim())));
    }
    if y.len() != design.len() {
        return Err(invalid(format!(
            "data vector has length {}, design has {} points",
            y.len(),
            design.len()
        )));
    }
    let kernel = GaussianKernel::new(shape, d)?;
    let gram = gram_matrix(&kernel, design.points())?;
    let pinv = ClippedInverse::new(&gram.matrix);
    let c = pinv.apply(&DVector::from_column_slice(y));
    Ok(SplineModel {
        kernel,
        design: design.clone(),
        coefficients: c.iter().copied().collect(),
        tau: pinv.tau,
    })
}

/// G(x,t) = K(x,t) - k(x)ᵀ𝕂⁺k(t), the reproducing kernel of the functions
/// vanishing on the design.
#[derive(Debug, Clone)]
pub struct PowerKernel {
    kernel: GaussianKernel,
    design: Design,
    pinv: ClippedInverse,
}

impl PowerKernel {
    pub fn new(shape: &ShapeSequence, d: usize, design: &Design) -> Result<Self> {
        if design.dim() != d {
            return Err(invalid(format!("design has dimension {}, expected {d}", design.dim())));
        }
        let kernel = GaussianKernel::new(shape, d)?;
        let pinv = if design.is_empty() {
            ClippedInverse::new(&DMatrix::zeros(0, 0))
        } else {
            ClippedInverse::new(&gram_matrix(&kernel, design.points())?.matrix)
        };
        Ok(Self {
            kernel,
            design: design.clone(),
            pinv,
        })
    }

    fn half(&self, x: &[f64]) -> Result<DVector<f64>> {
        if self.design.is_empty() {
            return Ok(DVector::zeros(0));
        }
        let k = self.kernel.column(self.design.points(), x)?;
        Ok(self.pinv.half(&DVector::from_vec(k)))
    }

    pub fn eval(&self, x: &[f64], t: &[f64]) -> Result<f64> {
        let kxt = self.kernel.eval(x, t)?;
        Ok(kxt - self.half(x)?.dot(&self.half(t)?))
    }

    /// sqrt(max(0, G(x,x))), clipped into [0, 1].
    pub fn power_function(&self, x: &[f64]) -> Result<f64> {
        Ok(self.eval(x, x)?.clamp(0.0, 1.0).sqrt())
    }
}

pub fn power_function(shape: &ShapeSequence, d: usize, design: &Design, x: &[f64]) -> Result<f64> {
    PowerKernel::new(shape, d, design)?.power_function(x)
}

/// How the worst-case L2 error of the spline is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum WorstCaseMethod {
    /// sqrt of the largest eigenvalue of the Nyström-discretized power kernel.
    #[default]
    Spectral,
    /// sqrt(∫ G(t,t) ρ_d(t) dt): an upper bound on the spectral value.
    TraceBound,
}

/// Worst-case L2(ρ_d) error of the spline on `design`, via an m-point-per-
/// coordinate Nyström grid.
pub fn spline_worst_case_error(shape: &ShapeSequence, d: usize, design: &Design, m: usize) -> Result<f64> {
    spline_worst_case_error_with(shape, d, design, m, WorstCaseMethod::Spectral)
}

pub fn spline_worst_case_error_with(
    shape: &ShapeSequence,
    d: usize,
    design: &Design,
    m: usize,
    method: WorstCaseMethod,
) -> Result<f64> {
    if d > quadrature::MAX_TENSOR_DIM {
        return Err(invalid(format!(
            "Nyström worst-case error supports d <= {}",
            quadrature::MAX_TENSOR_DIM
        )));
    }
    let grid_points = (m as u64).checked_pow(d as u32).unwrap_or(u64::MAX);
    if grid_points > MAX_NYSTROM_GRID as u64 {
        return Err(Error::ResourceLimit {
            what: "Nyström grid for the spline worst-case error".into(),
            limit: MAX_NYSTROM_GRID as u64,
            partial: None,
        });
    }
    let power = PowerKernel::new(shape, d, design)?;
    let rules = shape
        .gammas(d)?
        .into_iter()
        .map(|g| nystrom_rule(g, m))
        .collect::<Result<Vec<_>>>()?;
    let grid = TensorGrid::new(&rules)?;
    let size = grid.len();
    let r = power.pinv.inv_sqrt.len();
    // columns U[:, a] = Λ^{-1/2}Vᵀ k(t_a)
    let mut u = DMatrix::zeros(r, size);
    for (a, p) in grid.points.iter().enumerate() {
        u.set_column(a, &power.half(p)?);
    }
    let sw: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
    match method {
        WorstCaseMethod::TraceBound => {
            let trace: f64 = (0..size)
                .map(|a| grid.weights[a] * (1.0 - u.column(a).norm_squared()).max(0.0))
                .sum();
            Ok(trace.sqrt())
        }
        WorstCaseMethod::Spectral => {
            let mut b = DMatrix::zeros(size, size);
            let utu = u.tr_mul(&u);
            for i in 0..size {
                for j in 0..=i {
                    let g = power.kernel.eval_unchecked(&grid.points[i], &grid.points[j]) - utu[(i, j)];
                    let v = sw[i] * sw[j] * g;
                    b[(i, j)] = v;
                    b[(j, i)] = v;
                }
            }
            let top = crate::linalg::top_eigenvalue(&b);
            Ok(top.max(0.0).sqrt())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn iso1() -> ShapeSequence {
        ShapeSequence::isotropic(1.0).unwrap()
    }

    #[test]
    fn minimal_error_examples() {
        let s = iso1();
        assert_eq!(minimal_error_all(&s, 3, 0).unwrap(), initial_error(&s, 3).unwrap());
        assert_relative_eq!(minimal_error_all(&s, 1, 3).unwrap(), 0.034_441_853_748_633_0f64.sqrt(), max_relative = 1e-9);
        for n in [0, 1, 5, 40] {
            assert!(minimal_error_all(&s, 4, n).unwrap() <= ((n + 1) as f64).powf(-0.5));
        }
    }

    #[test]
    fn spline_single_point() {
        let s = iso1();
        let design = Design::new(1, vec![vec![0.0]]).unwrap();
        let m = spline_fit(&s, 1, &design, &[1.0]).unwrap();
        assert_relative_eq!(m.coefficients[0], 1.0, max_relative = 1e-14);
        for x in [-1.0, 0.2, 3.0] {
            assert_relative_eq!(m.eval(&[x]).unwrap(), (-(x * x)).exp(), max_relative = 1e-14);
        }
    }

    #[test]
    fn spline_duplicate_point_is_minimal_norm() {
        let s = iso1();
        let design = Design::new(1, vec![vec![0.0], vec![0.0]]).unwrap();
        let m = spline_fit(&s, 1, &design, &[1.0, 1.0]).unwrap();
        assert_relative_eq!(m.coefficients[0], 0.5, max_relative = 1e-12);
        assert_relative_eq!(m.coefficients[1], 0.5, max_relative = 1e-12);
        assert_relative_eq!(m.eval(&[0.7]).unwrap(), (-0.49f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn spline_interpolates_three_sites() {
        let s = iso1();
        let f = |x: f64| (-(x - 0.3) * (x - 0.3)).exp();
        let sites = [-1.0, 0.0, 1.0];
        let design = Design::new(1, sites.iter().map(|&x| vec![x]).collect()).unwrap();
        let y: Vec<f64> = sites.iter().map(|&x| f(x)).collect();
        let m = spline_fit(&s, 1, &design, &y).unwrap();
        for (x, yv) in sites.iter().zip(&y) {
            assert!((m.eval(&[*x]).unwrap() - yv).abs() <= 1e-10);
        }
    }

    #[test]
    fn spline_fit_rejects_bad_input() {
        let s = iso1();
        assert!(spline_fit(&s, 1, &Design::empty(1).unwrap(), &[]).is_err());
        let design = Design::new(1, vec![vec![0.0]]).unwrap();
        assert!(spline_fit(&s, 1, &design, &[1.0, 2.0]).is_err());
        assert!(spline_fit(&s, 2, &design, &[1.0]).is_err());
        assert!(Design::new(2, vec![vec![0.0]]).is_err());
    }

    #[test]
    fn power_function_basics() {
        let s = iso1();
        let empty = Design::empty(2).unwrap();
        assert_eq!(power_function(&s, 2, &empty, &[0.3, -0.2]).unwrap(), 1.0);
        let design = Design::random(2, 8, 3).unwrap();
        let pk = PowerKernel::new(&s, 2, &design).unwrap();
        for p in design.points() {
            assert!(pk.power_function(p).unwrap() <= 1e-7);
        }
        for i in 0..10 {
            for j in 0..10 {
                let x = [-3.0 + 0.6 * i as f64, -3.0 + 0.6 * j as f64];
                let v = pk.power_function(&x).unwrap();
                assert!((0.0..=1.0).contains(&v));
            }
        }
    }

    #[test]
    fn worst_case_error_of_empty_design_is_initial_error() {
        let s = iso1();
        let e = spline_worst_case_error(&s, 1, &Design::empty(1).unwrap(), 200).unwrap();
        assert!((e - 0.786_151_377_757_423_3).abs() <= 1e-6, "{e}");
        let one = Design::new(1, vec![vec![0.0]]).unwrap();
        let e1 = spline_worst_case_error(&s, 1, &one, 200).unwrap();
        assert!(e1 < e);
        assert!(e1 >= minimal_error_all(&s, 1, 1).unwrap() - 1e-9);
    }

    #[test]
    fn trace_bound_dominates_spectral_value() {
        let s = iso1();
        let design = Design::random(1, 4, 11).unwrap();
        let spec = spline_worst_case_error(&s, 1, &design, 60).unwrap();
        let trace = spline_worst_case_error_with(&s, 1, &design, 60, WorstCaseMethod::TraceBound).unwrap();
        assert!(trace >= spec - 1e-12);
    }

    #[test]
    fn nystrom_grid_guard() {
        let s = iso1();
        let d = Design::empty(3).unwrap();
        assert!(matches!(
            spline_worst_case_error(&s, 3, &d, 20),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn projection_of_basis_functions() {
        let s = iso1();
        let proj = EigenProjector::new(&s, 2, 4).unwrap();
        let first = proj.indices()[0].clone();
        let f = |x: &[f64]| proj.basis_values(x).unwrap()[0];
        let p = proj.project(f, 60).unwrap();
        assert!((p.coefficients[0] - 1.0).abs() < 1e-12);
        assert!(p.coefficients[1..].iter().all(|c| c.abs() < 1e-12), "{:?}", p.coefficients);
        assert_eq!(first, MultiIndex::ones());

        let outside = MultiIndex::from_dense(&[4, 4]).unwrap();
        let exp = EigenExpansion::new(vec![(outside.clone(), 1.0)]);
        let p = proj.project_expansion(&exp);
        assert!(p.coefficients.iter().all(|&c| c == 0.0));
        assert_eq!(proj.expansion_error(&exp), 1.0);
        let g = |x: &[f64]| exp.eval(&s, 2, x).unwrap();
        let p = proj.project(g, 60).unwrap();
        assert!(p.coefficients.iter().all(|c| c.abs() < 1e-12));
    }
}
