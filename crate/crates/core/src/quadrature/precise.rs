//! Extended-precision Nyström eigenvalues.
//!
//! The kernel entries are formed in 192-bit arithmetic from the (exactly
//! representable) double-precision nodes and weights. A diagonally pivoted
//! Cholesky factorization A ≈ L Lᵀ is stopped once the residual trace is
//! negligible; the nonzero eigenvalues of L Lᵀ are those of the small matrix
//! Lᵀ L, found by cyclic Jacobi with a relative off-diagonal criterion.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

use super::QuadratureRule;

type Big = FBig<HalfEven, 2>;

const PREC: usize = 192;
const MAX_RANK: usize = 96;
const RESIDUAL_TOL: f64 = 1e-60;

pub(super) struct PreciseEigs {
    /// Descending eigenvalues of the rank-r factorization.
    pub values: Vec<f64>,
    /// Trace of the neglected remainder; bounds the absolute error of `values`.
    pub residual: f64,
}

fn big(x: f64) -> Big {
    Big::try_from(x)
        .expect("finite node or weight")
        .with_precision(PREC)
        .value()
}

fn to_f64(x: &Big) -> f64 {
    x.to_f64().value()
}

fn abs(x: &Big) -> Big {
    if *x < Big::ZERO {
        -x.clone()
    } else {
        x.clone()
    }
}

pub(super) fn nystrom_eigs(gamma: f64, rule: &QuadratureRule, k: usize) -> PreciseEigs {
    let m = rule.len();
    let nodes: Vec<Big> = rule.nodes.iter().map(|&t| big(t)).collect();
    let sqrt_w: Vec<Big> = rule.weights.iter().map(|&w| big(w).sqrt()).collect();
    let g2 = big(gamma) * big(gamma);
    let entry = |a: usize, b: usize| -> Big {
        let diff = &nodes[a] - &nodes[b];
        let e = (-(&g2 * &diff * &diff)).exp();
        &sqrt_w[a] * &sqrt_w[b] * e
    };

    // diagonal of A is w_a since K(t,t) = 1
    let mut diag: Vec<Big> = rule.weights.iter().map(|&w| big(w)).collect();
    let mut cols: Vec<Vec<Big>> = Vec::new();
    let cap = MAX_RANK.min(m).max(k);
    let mut residual;
    loop {
        let mut trace = Big::ZERO;
        let mut pivot = 0;
        for (a, v) in diag.iter().enumerate() {
            trace = &trace + v;
            if *v > diag[pivot] {
                pivot = a;
            }
        }
        residual = to_f64(&trace).max(0.0);
        if residual < RESIDUAL_TOL || cols.len() >= cap.min(m) || diag[pivot] <= Big::ZERO {
            break;
        }
        let mut col: Vec<Big> = (0..m).map(|a| entry(a, pivot)).collect();
        for prev in &cols {
            let lp = prev[pivot].clone();
            for (c, l) in col.iter_mut().zip(prev) {
                *c = &*c - l * &lp;
            }
        }
        let root = col[pivot].sqrt();
        for c in col.iter_mut() {
            *c = &*c / &root;
        }
        col[pivot] = root.clone();
        for (d, c) in diag.iter_mut().zip(&col) {
            *d = &*d - c * c;
        }
        diag[pivot] = Big::ZERO;
        cols.push(col);
    }

    let r = cols.len();
    let mut gram = vec![vec![Big::ZERO; r]; r];
    for i in 0..r {
        for j in 0..=i {
            let mut s = Big::ZERO;
            for (x, y) in cols[i].iter().zip(&cols[j]) {
                s = &s + x * y;
            }
            gram[i][j] = s.clone();
            gram[j][i] = s;
        }
    }
    let mut values: Vec<f64> = jacobi_eigenvalues(gram).iter().map(to_f64).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    PreciseEigs { values, residual }
}

/// Cyclic Jacobi on a symmetric matrix; stops when every off-diagonal entry
/// is tiny relative to the geometric mean of its two diagonal entries.
fn jacobi_eigenvalues(mut a: Vec<Vec<Big>>) -> Vec<Big> {
    let n = a.len();
    let tol = big(1e-50);
    let one = big(1.0);
    let two = big(2.0);
    for _sweep in 0..40 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q].clone();
                if apq == Big::ZERO {
                    continue;
                }
                let scale = abs(&(&a[p][p] * &a[q][q])).sqrt();
                if abs(&apq) <= &tol * &scale {
                    continue;
                }
                rotated = true;
                let theta = (&a[q][q] - &a[p][p]) / (&two * &apq);
                let t_abs = &one / (abs(&theta) + (&theta * &theta + &one).sqrt());
                let t = if theta < Big::ZERO { -t_abs } else { t_abs };
                let c = &one / (&t * &t + &one).sqrt();
                let s = &t * &c;
                for row in a.iter_mut() {
                    let arp = row[p].clone();
                    let arq = row[q].clone();
                    row[p] = &c * &arp - &s * &arq;
                    row[q] = &s * &arp + &c * &arq;
                }
                let (head, tail) = a.split_at_mut(q);
                for (apr, aqr) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                    let (x, y) = (apr.clone(), aqr.clone());
                    *apr = &c * &x - &s * &y;
                    *aqr = &s * &x + &c * &y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (0..n).map(|i| a[i][i].clone()).collect()
}
