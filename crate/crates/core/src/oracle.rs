//! Exhaustive reference solvers for small instances.

use itertools::Itertools;
use ndarray::Array2;

use crate::error::{check_dim, Error, Result};
use crate::lap::assignment_total;
use crate::matrix::{AdjacencyMatrix, DoublyStochastic, Permutation};
use crate::objective::{frobenius_objective, Relaxation};
use crate::solver::{stationarity_gap, MatchProblem};

/// Largest order enumerated (9! = 362880 permutations).
pub const BRUTE_FORCE_CAP: usize = 9;

/// Objective values within this distance of the optimum count as ties.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    pub optimal_value: f64,
    /// Every optimal permutation, in lexicographic order of their maps.
    pub optimizers: Vec<Permutation>,
}

fn enumerate_min<F>(n: usize, mut value: F) -> Result<BruteForceResult>
where
    F: FnMut(&Permutation) -> f64,
{
    if n > BRUTE_FORCE_CAP {
        return Err(Error::TooLarge {
            n,
            cap: BRUTE_FORCE_CAP,
        });
    }
    let mut best = f64::INFINITY;
    let mut scored = Vec::new();
    // `permutations` over a sorted range yields lexicographic order.
    for map in (0..n).permutations(n) {
        let p = Permutation::new(map).expect("enumerated maps are bijections");
        let v = value(&p);
        if v < best + TIE_TOLERANCE {
            best = best.min(v);
            scored.push((v, p));
        }
    }
    let optimizers = scored
        .into_iter()
        .filter(|(v, _)| *v <= best + TIE_TOLERANCE)
        .map(|(_, p)| p)
        .collect();
    Ok(BruteForceResult {
        optimal_value: best,
        optimizers,
    })
}

/// Global minimum of `‖A − PBP^T‖²_F` over all permutations.
pub fn brute_force_gm(a: &AdjacencyMatrix, b: &AdjacencyMatrix) -> Result<BruteForceResult> {
    check_dim(a.n(), b.n())?;
    enumerate_min(a.n(), |p| {
        frobenius_objective(a, b, p).expect("dimensions checked")
    })
}

/// Global minimum of `Σ_i cost[i, π(i)]` over all permutations.
pub fn brute_force_lap(cost: &Array2<f64>) -> Result<BruteForceResult> {
    let (rows, cols) = cost.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    enumerate_min(rows, |p| assignment_total(cost.view(), p))
}

/// `min_Q ⟨∇f(D), Q − D⟩` over permutations `Q`. Negative values mean an
/// improving vertex direction exists at `D`.
pub fn fw_gap_at(
    kind: Relaxation,
    a: &AdjacencyMatrix,
    b: &AdjacencyMatrix,
    d: &DoublyStochastic,
) -> Result<f64> {
    check_dim(a.n(), d.n())?;
    let problem = MatchProblem::new(a.clone(), b.clone())?;
    stationarity_gap(kind, &problem, d)
}
