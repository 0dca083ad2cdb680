//! The graph-matching objective and its two relaxations over the Birkhoff
//! polytope, with gradients.
//!
//! Relaxed objectives and gradients accept any square matrix `D`, not only
//! doubly stochastic ones, so they can be probed by finite differences.

use ndarray::{Array2, Zip};

use crate::error::{check_dim, Result};
use crate::matrix::{AdjacencyMatrix, Permutation};

/// Which continuous relaxation a solver works on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relaxation {
    /// `‖AD − DB‖²_F`, convex.
    Convex,
    /// `−⟨AD, DB⟩`, indefinite.
    Indefinite,
}

/// Both forms of the matching objective at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectivePair {
    pub frobenius_sq: f64,
    pub neg_inner: f64,
}

impl ObjectivePair {
    /// Evaluates `‖AP − PB‖²_F` and `−⟨AP, PB⟩` at a permutation.
    pub fn at_permutation(a: &AdjacencyMatrix, b: &AdjacencyMatrix, p: &Permutation) -> Result<Self> {
        Ok(Self {
            frobenius_sq: frobenius_objective(a, b, p)?,
            neg_inner: neg_inner_objective(a, b, &p.to_matrix())?,
        })
    }
}

fn check_three(a: &AdjacencyMatrix, b: &AdjacencyMatrix, n: usize) -> Result<()> {
    check_dim(a.n(), b.n())?;
    check_dim(a.n(), n)
}

fn check_point(a: &AdjacencyMatrix, b: &AdjacencyMatrix, d: &Array2<f64>) -> Result<()> {
    check_three(a, b, d.nrows())?;
    check_dim(d.nrows(), d.ncols())
}

/// `‖A − PBP^T‖²_F = Σ_{i,j} (A[i,j] − B[map i, map j])²`.
pub fn frobenius_objective(a: &AdjacencyMatrix, b: &AdjacencyMatrix, p: &Permutation) -> Result<f64> {
    check_three(a, b, p.len())?;
    let (ae, be) = (a.entries(), b.entries());
    let map = p.as_slice();
    let mut acc = 0.0;
    for (i, &pi) in map.iter().enumerate() {
        for (j, &pj) in map.iter().enumerate() {
            let d = ae[[i, j]] - be[[pi, pj]];
            acc += d * d;
        }
    }
    Ok(acc)
}

/// `−⟨AD, DB⟩ = −trace((AD)^T DB)`.
pub fn neg_inner_objective(a: &AdjacencyMatrix, b: &AdjacencyMatrix, d: &Array2<f64>) -> Result<f64> {
    check_point(a, b, d)?;
    let ad = a.entries().dot(d);
    let db = d.dot(b.entries());
    Ok(-inner(&ad, &db))
}

/// `‖AD − DB‖²_F`.
pub fn convex_objective(a: &AdjacencyMatrix, b: &AdjacencyMatrix, d: &Array2<f64>) -> Result<f64> {
    check_point(a, b, d)?;
    let r = a.entries().dot(d) - d.dot(b.entries());
    Ok(r.iter().map(|v| v * v).sum())
}

/// `2(A^T A D + D B B^T − A^T D B − A D B^T)`, evaluated as
/// `2(A^T R − R B^T)` with `R = AD − DB`.
pub fn convex_gradient(a: &AdjacencyMatrix, b: &AdjacencyMatrix, d: &Array2<f64>) -> Result<Array2<f64>> {
    check_point(a, b, d)?;
    let r = a.entries().dot(d) - d.dot(b.entries());
    Ok(convex_gradient_from_residual(a, b, &r))
}

pub(crate) fn convex_gradient_from_residual(
    a: &AdjacencyMatrix,
    b: &AdjacencyMatrix,
    r: &Array2<f64>,
) -> Array2<f64> {
    let mut g = a.entries().t().dot(r);
    g -= &r.dot(&b.entries().t());
    g *= 2.0;
    g
}

/// `−(A^T D B + A D B^T)`; for symmetric inputs this is `−2ADB`.
pub fn indefinite_gradient(a: &AdjacencyMatrix, b: &AdjacencyMatrix, d: &Array2<f64>) -> Result<Array2<f64>> {
    check_point(a, b, d)?;
    let ad = a.entries().dot(d);
    let db = d.dot(b.entries());
    Ok(indefinite_gradient_cached(a, b, &ad, &db))
}

/// Gradient from the cached products `AD` and `DB`.
pub(crate) fn indefinite_gradient_cached(
    a: &AdjacencyMatrix,
    b: &AdjacencyMatrix,
    ad: &Array2<f64>,
    db: &Array2<f64>,
) -> Array2<f64> {
    let mut g = ad.dot(b.entries());
    if a.is_symmetric() && b.is_symmetric() {
        g *= 2.0;
    } else {
        g = ad.dot(&b.entries().t());
        g += &a.entries().t().dot(db);
    }
    g.mapv_inplace(|v| -v);
    g
}

/// Objective value of the chosen relaxation at an arbitrary square matrix.
pub fn relaxed_objective(
    kind: Relaxation,
    a: &AdjacencyMatrix,
    b: &AdjacencyMatrix,
    d: &Array2<f64>,
) -> Result<f64> {
    match kind {
        Relaxation::Convex => convex_objective(a, b, d),
        Relaxation::Indefinite => neg_inner_objective(a, b, d),
    }
}

pub fn relaxed_gradient(
    kind: Relaxation,
    a: &AdjacencyMatrix,
    b: &AdjacencyMatrix,
    d: &Array2<f64>,
) -> Result<Array2<f64>> {
    match kind {
        Relaxation::Convex => convex_gradient(a, b, d),
        Relaxation::Indefinite => indefinite_gradient(a, b, d),
    }
}

/// Euclidean inner product `⟨X, Y⟩ = Σ X_ij Y_ij`.
pub fn inner(x: &Array2<f64>, y: &Array2<f64>) -> f64 {
    let mut acc = 0.0;
    Zip::from(x).and(y).for_each(|&p, &q| acc += p * q);
    acc
}
