//! Eigenpairs of the Gaussian-kernel integral operator W_d on L2(ρ_d).
//!
//! In one dimension the operator has geometric eigenvalues
//! λ_j = (1-ω)ω^{j-1} with ratio ω = 2γ²/(1+2γ²+√(1+4γ²)) and Hermite-type
//! eigenfunctions φ_j(x) = sqrt(β/(2^{j-1}(j-1)!)) e^{-δ²x²} H_{j-1}(βx),
//! orthonormal in L2(ρ_1). In d dimensions the eigenpairs are products over
//! coordinates, indexed by a [`MultiIndex`].

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::shape::ShapeSequence;

/// Environment variable overriding [`DEFAULT_MAX_EIGS`].
pub const MAX_EIGS_ENV: &str = "GRKHS_MAX_EIGS";
pub const DEFAULT_MAX_EIGS: u64 = 10_000_000;

/// Enumeration guard: `GRKHS_MAX_EIGS` if set and valid, else 10^7.
pub fn max_eigs() -> u64 {
    std::env::var(MAX_EIGS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_MAX_EIGS)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnivariateSpectrum {
    pub gamma: f64,
    /// Eigenvalue ratio ω ∈ (0,1).
    pub omega: f64,
    /// Exponent shift δ² = (√(1+4γ²)-1)/2.
    pub delta_sq: f64,
    /// Argument scale β = (1+4γ²)^{1/4}.
    pub beta: f64,
    log_omega: f64,
    log_one_minus_omega: f64,
}

impl UnivariateSpectrum {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(invalid(format!("gamma must be positive, got {gamma}")));
        }
        let g2 = gamma * gamma;
        let s = (1.0 + 4.0 * g2).sqrt();
        let omega = 2.0 * g2 / (1.0 + 2.0 * g2 + s);
        // 1 - ω = 2/(1+s), δ² = 2γ²/(1+s): both free of cancellation
        let one_minus = 2.0 / (1.0 + s);
        Ok(Self {
            gamma,
            omega,
            delta_sq: 2.0 * g2 / (1.0 + s),
            beta: s.sqrt(),
            log_omega: omega.ln(),
            log_one_minus_omega: one_minus.ln(),
        })
    }

    pub fn log_omega(&self) -> f64 {
        self.log_omega
    }

    pub fn log_one_minus_omega(&self) -> f64 {
        self.log_one_minus_omega
    }

    /// λ_j for j ≥ 1 (j = 0 is treated as 1).
    pub fn lambda(&self, j: usize) -> f64 {
        self.log_lambda(j).exp()
    }

    pub fn log_lambda(&self, j: usize) -> f64 {
        self.log_one_minus_omega + (j.max(1) - 1) as f64 * self.log_omega
    }

    /// φ_1(x), …, φ_count(x).
    pub fn eigenfunctions(&self, count: usize, x: f64) -> Result<Vec<f64>> {
        const BIG: f64 = 1e100;
        let y = self.beta * x;
        // values are cur·e^{log_scale}; the Gaussian factor lives in the scale
        // so that it cannot underflow ahead of a growing Hermite factor
        let mut log_scale = 0.5 * self.beta.ln() - self.delta_sq * x * x;
        let mut out = Vec::with_capacity(count);
        // normalized Hermite h_k = H_k / sqrt(2^k k!):
        // h_{k+1} = sqrt(2/(k+1)) y h_k - sqrt(k/(k+1)) h_{k-1}
        let mut prev = 0.0;
        let mut cur = 1.0;
        for k in 0..count {
            let v = cur * log_scale.exp();
            if !v.is_finite() {
                return Err(Error::Overflow(format!(
                    "eigenfunction {} at x = {x} is not representable",
                    k + 1
                )));
            }
            out.push(v);
            let kf = k as f64;
            let next = (2.0 / (kf + 1.0)).sqrt() * y * cur - (kf / (kf + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
            if cur.abs() > BIG {
                cur /= BIG;
                prev /= BIG;
                log_scale += BIG.ln();
            }
        }
        Ok(out)
    }

    /// φ_j(x).
    pub fn eigenfunction(&self, j: usize, x: f64) -> Result<f64> {
        if j == 0 {
            return Err(invalid("eigenfunction index is 1-based"));
        }
        Ok(*self.eigenfunctions(j, x)?.last().expect("j >= 1"))
    }

    /// Truncated Mercer sum Σ_{j≤J} λ_j φ_j(x) φ_j(t).
    pub fn mercer_sum(&self, x: f64, t: f64, terms: usize) -> Result<f64> {
        if terms == 0 {
            return Err(invalid("mercer sum needs at least one term"));
        }
        let fx = self.eigenfunctions(terms, x)?;
        let ft = self.eigenfunctions(terms, t)?;
        Ok((0..terms).map(|j| self.lambda(j + 1) * fx[j] * ft[j]).sum())
    }
}

pub fn univariate_spectrum(gamma: f64) -> Result<UnivariateSpectrum> {
    UnivariateSpectrum::new(gamma)
}

pub fn univariate_eigenfunction(spec: &UnivariateSpectrum, j: usize, x: f64) -> Result<f64> {
    spec.eigenfunction(j, x)
}

pub fn mercer_check(spec: &UnivariateSpectrum, x: f64, t: f64, terms: usize) -> Result<f64> {
    spec.mercer_sum(x, t, terms)
}

/// Eigenfunction index per coordinate, stored sparsely: only coordinates
/// whose index exceeds 1 are kept, as sorted `(coordinate, j)` pairs with
/// 0-based coordinates.
///
/// The ordering is lexicographic on the dense index vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct MultiIndex {
    entries: Vec<(u32, u32)>,
}

impl MultiIndex {
    /// The all-ones index.
    pub fn ones() -> Self {
        Self::default()
    }

    pub fn from_dense(dense: &[usize]) -> Result<Self> {
        let mut entries = Vec::new();
        for (l, &j) in dense.iter().enumerate() {
            if j == 0 {
                return Err(invalid("multi-index entries are 1-based"));
            }
            if j > 1 {
                entries.push((l as u32, j as u32));
            }
        }
        Ok(Self { entries })
    }

    /// j_l for 0-based coordinate `l`.
    pub fn get(&self, l: usize) -> usize {
        match self.entries.binary_search_by_key(&(l as u32), |e| e.0) {
            Ok(pos) => self.entries[pos].1 as usize,
            Err(_) => 1,
        }
    }

    pub fn to_dense(&self, d: usize) -> Vec<usize> {
        let mut out = vec![1; d];
        for &(l, j) in &self.entries {
            if (l as usize) < d {
                out[l as usize] = j as usize;
            }
        }
        out
    }

    /// Coordinates with index > 1, as `(coordinate, j)`.
    pub fn active(&self) -> &[(u32, u32)] {
        &self.entries
    }

    /// Total excess Σ (j_l - 1).
    pub fn excess(&self) -> u64 {
        self.entries.iter().map(|&(_, j)| (j - 1) as u64).sum()
    }

    /// Copy with coordinate `l` incremented.
    pub fn incremented(&self, l: usize) -> Self {
        let l32 = l as u32;
        let mut entries = self.entries.clone();
        match entries.binary_search_by_key(&l32, |e| e.0) {
            Ok(pos) => entries[pos].1 += 1,
            Err(pos) => entries.insert(pos, (l32, 2)),
        }
        Self { entries }
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut k) = (0, 0);
        loop {
            match (a.get(i), b.get(k)) {
                (None, None) => return Ordering::Equal,
                // the other index is > 1 at a coordinate where this one is 1
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(&(la, ja)), Some(&(lb, jb))) => match la.cmp(&lb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ja.cmp(&jb) {
                        Ordering::Equal => {
                            i += 1;
                            k += 1;
                        }
                        ord => return ord,
                    },
                },
            }
        }
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Coordinates sharing the same shape parameter, in order of first appearance.
#[derive(Debug, Clone)]
pub(crate) struct ShapeGroups {
    pub spectra: Vec<UnivariateSpectrum>,
    pub sizes: Vec<u64>,
    /// Group id of each coordinate.
    pub group_of: Vec<usize>,
    /// log of the largest d-variate eigenvalue, Σ_groups size·log(1-ω).
    pub log_base: f64,
}

impl ShapeGroups {
    pub fn new(shape: &ShapeSequence, d: usize) -> Result<Self> {
        let gammas = shape.gammas(d)?;
        let mut distinct: Vec<f64> = Vec::new();
        let mut sizes = Vec::new();
        let mut group_of = Vec::with_capacity(d);
        for g in gammas {
            match distinct.iter().position(|&x| x == g) {
                Some(pos) => {
                    sizes[pos] += 1;
                    group_of.push(pos);
                }
                None => {
                    distinct.push(g);
                    sizes.push(1u64);
                    group_of.push(distinct.len() - 1);
                }
            }
        }
        let spectra = distinct
            .into_iter()
            .map(UnivariateSpectrum::new)
            .collect::<Result<Vec<_>>>()?;
        let log_base = spectra
            .iter()
            .zip(&sizes)
            .map(|(s, &n)| n as f64 * s.log_one_minus_omega())
            .sum();
        Ok(Self {
            spectra,
            sizes,
            group_of,
            log_base,
        })
    }

    pub fn dim(&self) -> usize {
        self.group_of.len()
    }

    /// log Π_ℓ λ_{j_ℓ}(γ_ℓ). Depends only on the per-group excess totals, so
    /// indices that permute coordinates within a group get identical values.
    pub fn log_value(&self, index: &MultiIndex) -> f64 {
        let mut excess = vec![0u64; self.spectra.len()];
        for &(l, j) in index.active() {
            excess[self.group_of[l as usize]] += (j - 1) as u64;
        }
        let mut v = self.log_base;
        for (g, e) in excess.into_iter().enumerate() {
            if e > 0 {
                v += e as f64 * self.spectra[g].log_omega();
            }
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorEigen {
    pub value: f64,
    pub log_value: f64,
    pub index: MultiIndex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorEigenList {
    pub d: usize,
    pub entries: Vec<TensorEigen>,
}

impl TensorEigenList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }
}

struct HeapItem {
    log_value: f64,
    index: MultiIndex,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    // max-heap: larger value first, then lexicographically larger index
    fn cmp(&self, other: &Self) -> Ordering {
        self.log_value
            .total_cmp(&other.log_value)
            .then_with(|| self.index.cmp(&other.index))
    }
}

/// Log-values closer than this (relative) are treated as one tie. Exact
/// ties between different shape parameters (e.g. ω(1/4) = ω(1)³) are only
/// equal up to rounding once computed.
const TIE_RELATIVE: f64 = 1e-12;

fn tied(top: f64, other: f64) -> bool {
    top - other <= TIE_RELATIVE * (1.0 + top.abs())
}

/// Best-first stream of d-variate eigenvalues in descending order.
pub struct TensorEigenIter {
    groups: ShapeGroups,
    heap: BinaryHeap<HeapItem>,
    visited: HashSet<MultiIndex>,
    /// Remaining members of the current tie, in output order.
    pending: VecDeque<TensorEigen>,
}

impl TensorEigenIter {
    pub fn new(shape: &ShapeSequence, d: usize) -> Result<Self> {
        let groups = ShapeGroups::new(shape, d)?;
        let start = MultiIndex::ones();
        let mut heap = BinaryHeap::new();
        heap.push(HeapItem {
            log_value: groups.log_base,
            index: start.clone(),
        });
        let mut visited = HashSet::new();
        visited.insert(start);
        Ok(Self {
            groups,
            heap,
            visited,
            pending: VecDeque::new(),
        })
    }

    fn expand(&mut self, index: &MultiIndex) {
        for l in 0..self.groups.dim() {
            let succ = index.incremented(l);
            if self.visited.contains(&succ) {
                continue;
            }
            self.visited.insert(succ.clone());
            self.heap.push(HeapItem {
                log_value: self.groups.log_value(&succ),
                index: succ,
            });
        }
    }
}

impl Iterator for TensorEigenIter {
    type Item = TensorEigen;

    fn next(&mut self) -> Option<TensorEigen> {
        if let Some(e) = self.pending.pop_front() {
            return Some(e);
        }
        // Every predecessor of a tied index is larger by at least a factor
        // 1/ω, so the whole tie is already in the heap.
        let first = self.heap.pop()?;
        let mut tie = vec![first];
        while let Some(top) = self.heap.peek() {
            if !tied(tie[0].log_value, top.log_value) {
                break;
            }
            tie.push(self.heap.pop().expect("peeked"));
        }
        for item in &tie {
            let index = item.index.clone();
            self.expand(&index);
        }
        tie.sort_by(|a, b| b.index.cmp(&a.index));
        self.pending.extend(tie.into_iter().map(|item| TensorEigen {
            value: item.log_value.exp(),
            log_value: item.log_value,
            index: item.index,
        }));
        self.pending.pop_front()
    }
}

/// The n largest products Π_ℓ λ_{j_ℓ}(γ_ℓ), descending. Equal values are
/// listed in decreasing lexicographic order of the dense multi-index, so
/// (2,1) precedes (1,2).
pub fn top_n_tensor_eigenvalues(shape: &ShapeSequence, d: usize, n: usize) -> Result<TensorEigenList> {
    top_n_with_guard(shape, d, n, max_eigs())
}

pub fn top_n_with_guard(shape: &ShapeSequence, d: usize, n: usize, guard: u64) -> Result<TensorEigenList> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if n as u64 > guard {
        return Err(Error::ResourceLimit {
            what: format!("enumeration of {n} tensor eigenvalues"),
            limit: guard,
            partial: None,
        });
    }
    let entries: Vec<TensorEigen> = TensorEigenIter::new(shape, d)?.take(n).collect();
    Ok(TensorEigenList { d, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const OMEGA_1: f64 = 0.381_966_011_250_105_1; // (3 - √5)/2

    #[test]
    fn closed_form_ratio() {
        let s = UnivariateSpectrum::new(1.0).unwrap();
        assert_relative_eq!(s.omega, OMEGA_1, max_relative = 1e-15);
        assert_relative_eq!(s.lambda(1), 1.0 - OMEGA_1, max_relative = 1e-15);
        let s = UnivariateSpectrum::new(0.1).unwrap();
        assert_relative_eq!(s.omega, 0.02 / (1.02 + 1.04f64.sqrt()), max_relative = 1e-15);
        assert!(UnivariateSpectrum::new(0.0).is_err());
        assert!(UnivariateSpectrum::new(f64::NAN).is_err());
    }

    #[test]
    fn spectrum_invariants() {
        for g in [1e-3, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0] {
            let s = UnivariateSpectrum::new(g).unwrap();
            assert!(s.omega > 0.0 && s.omega < 1.0);
            assert_relative_eq!(s.delta_sq * (1.0 + s.delta_sq), g * g, max_relative = 1e-13);
            assert_relative_eq!(s.beta.powi(4), 1.0 + 4.0 * g * g, max_relative = 1e-13);
            let partial: f64 = (1..=60).map(|j| s.lambda(j)).sum();
            assert!((partial - (1.0 - s.omega.powi(60))).abs() <= 1e-12);
        }
        let mut prev = 0.0;
        for g in [0.01, 0.1, 0.5, 1.0, 3.0, 30.0] {
            let w = UnivariateSpectrum::new(g).unwrap().omega;
            assert!(w > prev);
            prev = w;
        }
    }

    #[test]
    fn eigenfunction_examples() {
        let s = UnivariateSpectrum::new(1.0).unwrap();
        assert_relative_eq!(s.eigenfunction(1, 0.0).unwrap(), 5f64.powf(0.125), max_relative = 1e-15);
        assert_eq!(s.eigenfunction(2, 0.0).unwrap(), 0.0);
        assert!(s.eigenfunction(0, 0.0).is_err());
        // explicit H_2(y) = 4y² - 2
        let x = 0.37;
        let y = s.beta * x;
        let want = (s.beta / 8.0).sqrt() * (-s.delta_sq * x * x).exp() * (4.0 * y * y - 2.0);
        assert_relative_eq!(s.eigenfunction(3, x).unwrap(), want, max_relative = 1e-14);
    }

    #[test]
    fn eigenfunction_overflow_is_reported() {
        let s = UnivariateSpectrum::new(1.0).unwrap();
        assert!(matches!(s.eigenfunction(2000, 38.5), Err(Error::Overflow(_))));
    }

    #[test]
    fn mercer_single_term_underestimates() {
        let s = UnivariateSpectrum::new(1.0).unwrap();
        for x in [-1.0, 0.0, 0.5, 2.0] {
            assert!(s.mercer_sum(x, x, 1).unwrap() <= 1.0);
        }
        assert_relative_eq!(s.mercer_sum(0.0, 0.0, 50).unwrap(), 1.0, epsilon = 1e-10);
        assert!((s.mercer_sum(0.0, 1.0, 50).unwrap() - (-1.0f64).exp()).abs() <= 1e-8);
    }

    #[test]
    fn multi_index_order_is_dense_lexicographic() {
        let a = MultiIndex::from_dense(&[2, 1]).unwrap();
        let b = MultiIndex::from_dense(&[1, 2]).unwrap();
        let c = MultiIndex::from_dense(&[1, 1]).unwrap();
        let e = MultiIndex::from_dense(&[1, 3]).unwrap();
        assert!(c < b && b < e && e < a);
        assert_eq!(a.to_dense(3), vec![2, 1, 1]);
        assert_eq!(MultiIndex::ones().incremented(1).incremented(1), e);
        assert_eq!(e.get(1), 3);
        assert_eq!(e.excess(), 2);
        assert!(MultiIndex::from_dense(&[0]).is_err());
    }

    #[test]
    fn cross_parameter_ties_use_the_tie_break() {
        // ω(1/4) = 9 - 4√5 = ω(1)³, so (4,1,1) and (1,1,2) tie
        let sh = ShapeSequence::explicit(vec![1.0, 0.5, 0.25]).unwrap();
        let l = top_n_tensor_eigenvalues(&sh, 3, 8).unwrap();
        let idx: Vec<Vec<usize>> = l.entries.iter().map(|e| e.index.to_dense(3)).collect();
        let a = idx.iter().position(|i| i == &vec![4, 1, 1]).unwrap();
        let b = idx.iter().position(|i| i == &vec![1, 1, 2]).unwrap();
        assert_eq!(b, a + 1);
        assert_relative_eq!(l.entries[a].value, l.entries[b].value, max_relative = 1e-13);
    }

    #[test]
    fn top_n_examples() {
        let iso = ShapeSequence::isotropic(1.0).unwrap();
        let l = top_n_tensor_eigenvalues(&iso, 1, 4).unwrap();
        let want = [0.618_034_0, 0.236_068_0, 0.090_169_9, 0.034_441_9];
        for (got, w) in l.values().iter().zip(want) {
            assert!((got - w).abs() < 5e-8, "{got} vs {w}");
        }
        let l = top_n_tensor_eigenvalues(&iso, 2, 3).unwrap();
        let idx: Vec<Vec<usize>> = l.entries.iter().map(|e| e.index.to_dense(2)).collect();
        assert_eq!(idx, vec![vec![1, 1], vec![2, 1], vec![1, 2]]);
        assert_relative_eq!(l.entries[0].value, (1.0 - OMEGA_1).powi(2), max_relative = 1e-14);
        assert_eq!(l.entries[1].value, l.entries[2].value);
        assert_relative_eq!(l.entries[1].value, (1.0 - OMEGA_1).powi(2) * OMEGA_1, max_relative = 1e-14);
        assert!(top_n_tensor_eigenvalues(&iso, 2, 0).is_err());
        assert!(matches!(top_n_with_guard(&iso, 2, 11, 10), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn truncated_rule_gives_same_list() {
        let p = ShapeSequence::power_law(1.0, 1.5).unwrap();
        let e = ShapeSequence::explicit(p.gammas(3).unwrap()).unwrap();
        assert_eq!(
            top_n_tensor_eigenvalues(&p, 3, 60).unwrap(),
            top_n_tensor_eigenvalues(&e, 3, 60).unwrap()
        );
    }
}
