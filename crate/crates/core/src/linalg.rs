use nalgebra::{DMatrix, DVector, Dyn, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Entries this far below the largest one are flushed to zero before the
/// eigensolve: their squares underflow inside the Householder reduction,
/// which can make the QR iteration return NaN.
const FLUSH_RELATIVE: f64 = 1e-100;

/// Symmetric eigendecomposition, robust to entries spanning hundreds of
/// orders of magnitude.
pub(crate) fn symmetric_eigen(mut a: DMatrix<f64>) -> SymmetricEigen<f64, Dyn> {
    let cutoff = FLUSH_RELATIVE * a.amax();
    a.iter_mut().filter(|v| v.abs() < cutoff).for_each(|v| *v = 0.0);
    SymmetricEigen::new(a)
}

/// Descending eigenvalues of a symmetric matrix.
pub(crate) fn sorted_eigenvalues(a: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = symmetric_eigen(a).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Below this size the dense solver is used directly.
const LANCZOS_MIN_SIZE: usize = 96;

/// Largest eigenvalue of a symmetric matrix.
///
/// Lanczos with full reorthogonalization from a fixed pseudo-random start;
/// stops when the Ritz residual of the leading pair drops below `1e-14`
/// relative to the Ritz value, falling back to the dense solver if the
/// Krylov space is exhausted first.
pub(crate) fn top_eigenvalue(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    if n < LANCZOS_MIN_SIZE {
        return sorted_eigenvalues(a.clone())[0];
    }
    let max_steps = n.min(300);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut q = DVector::from_fn(n, |_, _| rng.random::<f64>() - 0.5);
    q /= q.norm();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(max_steps);
    let mut alpha = Vec::with_capacity(max_steps);
    let mut beta: Vec<f64> = Vec::with_capacity(max_steps);
    for k in 0..max_steps {
        let mut w = a * &q;
        let ak = q.dot(&w);
        basis.push(q.clone());
        alpha.push(ak);
        // two passes of Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for v in &basis {
                let c = v.dot(&w);
                w.axpy(-c, v, 1.0);
            }
        }
        let bk = w.norm();
        let m = k + 1;
        let t = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = symmetric_eigen(t);
        let (top, &theta) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(y.1))
            .expect("nonempty");
        let residual = (bk * eig.eigenvectors[(m - 1, top)]).abs();
        if residual <= 1e-14 * theta.abs().max(f64::MIN_POSITIVE) || bk <= 1e-300 {
            return theta;
        }
        beta.push(bk);
        q = w / bk;
    }
    sorted_eigenvalues(a.clone())[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_entries_do_not_produce_nan() {
        let n = 40;
        let a = DMatrix::from_fn(n, n, |i, j| {
            let d = i as f64 - j as f64;
            (-(d * d) * 0.5).exp() * if i == j { 1.0 } else { 1e-120 }
        });
        let ev = sorted_eigenvalues(a);
        assert!(ev.iter().all(|v| v.is_finite()));
        assert!((ev[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lanczos_matches_dense_solver() {
        let n = 300;
        let pts: Vec<f64> = (0..n).map(|i| -3.0 + 6.0 * i as f64 / n as f64).collect();
        let a = DMatrix::from_fn(n, n, |i, j| (-(pts[i] - pts[j]).powi(2)).exp() / n as f64);
        let dense = sorted_eigenvalues(a.clone())[0];
        assert!((top_eigenvalue(&a) - dense).abs() <= 1e-13 * dense);
        let b = DMatrix::from_diagonal(&DVector::from_fn(120, |i, _| 1.0 / (1 + i) as f64));
        assert!((top_eigenvalue(&b) - 1.0).abs() <= 1e-13);
    }
}
