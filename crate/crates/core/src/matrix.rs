//! Dense matrix types shared by every solver: graphs, permutations and
//! points of the Birkhoff polytope.
//!
//! Permutation matrices follow one convention throughout the crate: the
//! permutation `map` corresponds to the matrix with `P[i, map[i]] = 1`.
//! Under that convention `P B P^T` has entry `(i, j)` equal to
//! `B[map[i], map[j]]`, so vertex `i` of the first graph is matched to vertex
//! `map[i]` of the second.

use ndarray::{Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{check_dim, Error, Result};

/// Default feasibility slack for doubly stochastic matrices.
pub const DS_TOLERANCE: f64 = 1e-9;

/// Maximum number of Sinkhorn sweeps used when renormalizing an iterate.
pub const RENORMALIZE_SWEEPS: usize = 5;

/// Dense adjacency (or weight) matrix of a graph on `n` vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix {
    entries: Array2<f64>,
    directed: bool,
    hollow: bool,
}

impl AdjacencyMatrix {
    /// Wraps `entries`, checking squareness, finiteness and (for undirected
    /// graphs) exact symmetry. Hollowness is detected from the diagonal.
    pub fn new(entries: Array2<f64>, directed: bool) -> Result<Self> {
        let (rows, cols) = entries.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("adjacency entries must be finite".into()));
        }
        if !directed && !is_symmetric(entries.view()) {
            return Err(Error::Domain(
                "undirected adjacency matrix must be symmetric".into(),
            ));
        }
        let hollow = entries.diag().iter().all(|&v| v == 0.0);
        Ok(Self {
            entries,
            directed,
            hollow,
        })
    }

    pub fn from_shape_vec(n: usize, data: Vec<f64>, directed: bool) -> Result<Self> {
        check_dim(n * n, data.len())?;
        let entries = Array2::from_shape_vec((n, n), data).expect("length checked");
        Self::new(entries, directed)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            entries: Array2::zeros((n, n)),
            directed: false,
            hollow: true,
        }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> Array2<f64> {
        self.entries
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn is_hollow(&self) -> bool {
        self.hollow
    }

    /// True when the entries are symmetric, whatever the directedness flag says.
    pub fn is_symmetric(&self) -> bool {
        !self.directed || is_symmetric(self.entries.view())
    }

    /// Exact 0/1 test.
    pub fn is_binary(&self) -> bool {
        self.entries.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum()
    }

    /// Row sums (out-degrees for binary graphs).
    pub fn degrees(&self) -> Vec<f64> {
        self.entries.sum_axis(Axis(1)).to_vec()
    }

    /// `P G P^T`: entry `(i, j)` of the result is `G[map[i], map[j]]`.
    pub fn permuted(&self, p: &Permutation) -> Result<Self> {
        check_dim(self.n(), p.len())?;
        let map = p.as_slice();
        let entries = Array2::from_shape_fn(self.entries.dim(), |(i, j)| self.entries[[map[i], map[j]]]);
        Ok(Self {
            entries,
            directed: self.directed,
            hollow: self.hollow,
        })
    }
}

fn is_symmetric(m: ArrayView2<f64>) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (i + 1..n).all(|j| m[[i, j]] == m[[j, i]]))
}

/// A bijection on `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &m in &map {
            if m >= n || seen[m] {
                return Err(Error::Domain(format!("{map:?} is not a permutation of 0..{n}")));
            }
            seen[m] = true;
        }
        Ok(Self { map })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n).collect(),
        }
    }

    /// Uniformly random permutation.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self::random_fixing_prefix(n, 0, rng)
    }

    /// Uniformly random among permutations fixing `0..prefix` pointwise.
    pub fn random_fixing_prefix<R: Rng + ?Sized>(n: usize, prefix: usize, rng: &mut R) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        let prefix = prefix.min(n);
        map[prefix..].shuffle(rng);
        Self { map }
    }

    /// The transposition swapping `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(a, b);
        Self { map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &m)| i == m)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (i, &m) in self.map.iter().enumerate() {
            inv[m] = i;
        }
        Self { map: inv }
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_dim(self.len(), other.len())?;
        Ok(Self {
            map: other.map.iter().map(|&i| self.map[i]).collect(),
        })
    }

    /// Dense matrix with `P[i, map[i]] = 1`.
    pub fn to_matrix(&self) -> Array2<f64> {
        let n = self.len();
        let mut m = Array2::zeros((n, n));
        for (i, &j) in self.map.iter().enumerate() {
            m[[i, j]] = 1.0;
        }
        m
    }

    /// `⟨P, M⟩ = Σ_i M[i, map[i]]`.
    pub fn inner(&self, m: &Array2<f64>) -> f64 {
        self.map.iter().enumerate().map(|(i, &j)| m[[i, j]]).sum()
    }
}

/// Nonnegative square matrix with unit row and column sums, within a slack.
#[derive(Debug, Clone, PartialEq)]
pub struct DoublyStochastic {
    entries: Array2<f64>,
    tolerance: f64,
}

impl DoublyStochastic {
    pub fn new(entries: Array2<f64>) -> Result<Self> {
        Self::with_tolerance(entries, DS_TOLERANCE)
    }

    pub fn with_tolerance(entries: Array2<f64>, tolerance: f64) -> Result<Self> {
        let (rows, cols) = entries.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        let v = feasibility_violation(&entries);
        if !(v <= tolerance) {
            return Err(Error::Infeasible(format!(
                "violation {v:e} exceeds tolerance {tolerance:e}"
            )));
        }
        Ok(Self { entries, tolerance })
    }

    /// Skips the feasibility check; callers must guarantee it.
    pub(crate) fn new_unchecked(entries: Array2<f64>, tolerance: f64) -> Self {
        Self { entries, tolerance }
    }

    /// The barycenter `J = 11^T / n`.
    pub fn barycenter(n: usize) -> Self {
        Self::seeded_barycenter(n, 0)
    }

    /// `diag(I_s, J_{n-s})`, the barycenter of the polytope with the first
    /// `seeds` vertices fixed.
    pub fn seeded_barycenter(n: usize, seeds: usize) -> Self {
        let seeds = seeds.min(n);
        let m = n - seeds;
        let mut entries = Array2::zeros((n, n));
        for i in 0..seeds {
            entries[[i, i]] = 1.0;
        }
        for i in seeds..n {
            for j in seeds..n {
                entries[[i, j]] = 1.0 / m as f64;
            }
        }
        Self::new_unchecked(entries, DS_TOLERANCE)
    }

    pub fn from_permutation(p: &Permutation) -> Self {
        Self::new_unchecked(p.to_matrix(), DS_TOLERANCE)
    }

    /// Balances a strictly positive matrix with `sweeps` rounds of
    /// alternating row/column rescaling, then checks feasibility.
    pub fn sinkhorn(mut positive: Array2<f64>, sweeps: usize) -> Result<Self> {
        if positive.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::Domain(
                "Sinkhorn balancing needs strictly positive finite entries".into(),
            ));
        }
        sinkhorn_sweeps(&mut positive, sweeps);
        Self::new(positive)
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> Array2<f64> {
        self.entries
    }

    pub fn violation(&self) -> f64 {
        feasibility_violation(&self.entries)
    }

    /// `‖D − P‖_F`.
    pub fn distance_to(&self, p: &Permutation) -> Result<f64> {
        check_dim(self.n(), p.len())?;
        let map = p.as_slice();
        let mut acc = 0.0;
        for ((i, j), &v) in self.entries.indexed_iter() {
            let t = if map[i] == j { 1.0 } else { 0.0 };
            acc += (v - t) * (v - t);
        }
        Ok(acc.sqrt())
    }

    /// True when the matrix is a 0/1 permutation matrix (up to the slack).
    pub fn as_permutation(&self) -> Option<Permutation> {
        let n = self.n();
        let mut map = Vec::with_capacity(n);
        for row in self.entries.rows() {
            let j = row.iter().position(|&v| (v - 1.0).abs() <= self.tolerance)?;
            if row
                .iter()
                .enumerate()
                .any(|(k, &v)| k != j && v.abs() > self.tolerance)
            {
                return None;
            }
            map.push(j);
        }
        Permutation::new(map).ok()
    }
}

/// Largest of: negative-entry magnitude, row-sum deviation, column-sum deviation.
pub fn feasibility_violation(m: &Array2<f64>) -> f64 {
    let neg = m.iter().fold(0.0f64, |acc, &v| acc.max(-v));
    let rows = m
        .sum_axis(Axis(1))
        .iter()
        .fold(0.0f64, |acc, &s| acc.max((s - 1.0).abs()));
    let cols = m
        .sum_axis(Axis(0))
        .iter()
        .fold(0.0f64, |acc, &s| acc.max((s - 1.0).abs()));
    if m.iter().any(|v| v.is_nan()) {
        return f64::NAN;
    }
    neg.max(rows).max(cols)
}

/// Alternating row/column normalization.
pub(crate) fn sinkhorn_sweeps(m: &mut Array2<f64>, sweeps: usize) {
    for _ in 0..sweeps {
        for mut row in m.rows_mut() {
            let s: f64 = row.sum();
            if s > 0.0 {
                row /= s;
            }
        }
        for mut col in m.columns_mut() {
            let s: f64 = col.sum();
            if s > 0.0 {
                col /= s;
            }
        }
    }
}
