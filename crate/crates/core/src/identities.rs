//! Checkable identities behind the tractability-versus-correctness results:
//! the pairwise KKT necessary condition at the identity, the Θ/Γ
//! disagreement identity, and recovery counting.

use ndarray::Array2;

use crate::error::{check_dim, Error, Result};
use crate::matrix::{AdjacencyMatrix, Permutation};

/// Pairwise margins `2X_ij − X_ii − X_jj` with `X = (A−B)^T (A−B)`.
///
/// The identity can only be a KKT point of the convex relaxation if every
/// off-diagonal margin is nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct KktCheck {
    margins: Array2<f64>,
}

impl KktCheck {
    pub fn n(&self) -> usize {
        self.margins.nrows()
    }

    /// Margin for the ordered pair `(i, j)`, `i != j`. The diagonal is zero.
    pub fn margin(&self, i: usize, j: usize) -> f64 {
        self.margins[[i, j]]
    }

    pub fn holds(&self, i: usize, j: usize) -> bool {
        i == j || self.margins[[i, j]] >= 0.0
    }

    pub fn margins(&self) -> &Array2<f64> {
        &self.margins
    }

    /// Ordered pairs `(i, j, margin, holds)` with `i != j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64, bool)> + '_ {
        self.margins
            .indexed_iter()
            .filter(|((i, j), _)| i != j)
            .map(|((i, j), &m)| (i, j, m, m >= 0.0))
    }

    /// Number of ordered pairs violating the condition.
    pub fn violations(&self) -> usize {
        self.pairs().filter(|p| !p.3).count()
    }

    /// Smallest off-diagonal margin; `+∞` when `n < 2`.
    pub fn min_margin(&self) -> f64 {
        self.pairs().map(|p| p.2).fold(f64::INFINITY, f64::min)
    }

    /// False as soon as any pair violates the necessary condition.
    pub fn identity_can_be_kkt(&self) -> bool {
        self.violations() == 0
    }
}

/// Evaluates the pairwise KKT condition for the identity alignment of
/// `(A, B)`. Callers align the graphs first.
pub fn kkt_pairwise_check(a: &AdjacencyMatrix, b: &AdjacencyMatrix) -> Result<KktCheck> {
    check_dim(a.n(), b.n())?;
    let diff = a.entries() - b.entries();
    let x = diff.t().dot(&diff);
    let n = x.nrows();
    let margins = Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            0.0
        } else {
            2.0 * x[[i, j]] - x[[i, i]] - x[[j, j]]
        }
    });
    Ok(KktCheck { margins })
}

/// Both sides of `‖A − PBQ^T‖² − ‖A − B‖² = |Θ| − 2|Γ|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThetaGamma {
    /// Left-hand side, computed from the dense matrices.
    pub lhs: i64,
    /// `|Θ|`, the entries where `B` and `PBQ^T` disagree.
    pub theta: usize,
    /// `|Γ|`, the part of `Θ` where `A` also disagrees with `B`.
    pub gamma: usize,
}

impl ThetaGamma {
    pub fn rhs(&self) -> i64 {
        self.theta as i64 - 2 * self.gamma as i64
    }

    pub fn holds(&self) -> bool {
        self.lhs == self.rhs()
    }
}

/// Computes the two sides of the disagreement identity for binary graphs.
/// `P` and `Q` act through `τ = map(P)` and `ω = map(Q)`, so
/// `(PBQ^T)[i, j] = B[τ(i), ω(j)]`.
pub fn theta_gamma_identity(
    a: &AdjacencyMatrix,
    b: &AdjacencyMatrix,
    p: &Permutation,
    q: &Permutation,
) -> Result<ThetaGamma> {
    check_dim(a.n(), b.n())?;
    check_dim(a.n(), p.len())?;
    check_dim(a.n(), q.len())?;
    if !a.is_binary() || !b.is_binary() {
        return Err(Error::Domain(
            "disagreement identity needs binary adjacency matrices".into(),
        ));
    }
    let (ae, be) = (a.entries(), b.entries());

    let pbq = p.to_matrix().dot(be).dot(&q.to_matrix().t());
    let sq = |m: Array2<f64>| m.iter().map(|v| v * v).sum::<f64>();
    let lhs = sq(ae - &pbq) - sq(ae - be);

    let (tau, omega) = (p.as_slice(), q.as_slice());
    let mut theta = 0;
    let mut gamma = 0;
    for ((i, j), &bij) in be.indexed_iter() {
        if bij != be[[tau[i], omega[j]]] {
            theta += 1;
            if ae[[i, j]] != bij {
                gamma += 1;
            }
        }
    }
    Ok(ThetaGamma {
        lhs: lhs.round() as i64,
        theta,
        gamma,
    })
}

/// Number of vertices `i` with `P(i) = P*(i)`.
pub fn n_correct(p: &Permutation, truth: &Permutation) -> Result<usize> {
    check_dim(truth.len(), p.len())?;
    Ok(p.as_slice()
        .iter()
        .zip(truth.as_slice())
        .filter(|(x, y)| x == y)
        .count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn equal_graphs_have_zero_margins() {
        let a = AdjacencyMatrix::new(
            array![
                [0., 1., 1., 0.],
                [1., 0., 1., 1.],
                [1., 1., 0., 0.],
                [0., 1., 0., 0.]
            ],
            false,
        )
        .unwrap();
        let k = kkt_pairwise_check(&a, &a).unwrap();
        assert!(k.margins().iter().all(|&m| m == 0.0));
        assert!(k.identity_can_be_kkt());
        assert_eq!(k.pairs().count(), 12);
    }

    #[test]
    fn hand_computed_three_vertex_margins() {
        // A has the extra edge {0,1}; A − B = E_01 + E_10, X = diag(1, 1, 0).
        let a = AdjacencyMatrix::new(array![[0., 1., 1.], [1., 0., 0.], [1., 0., 0.]], false).unwrap();
        let b = AdjacencyMatrix::new(array![[0., 0., 1.], [0., 0., 0.], [1., 0., 0.]], false).unwrap();
        let k = kkt_pairwise_check(&a, &b).unwrap();
        assert_eq!(k.margin(0, 1), -2.0);
        assert_eq!(k.margin(1, 0), -2.0);
        assert_eq!(k.margin(0, 2), -1.0);
        assert_eq!(k.margin(1, 2), -1.0);
        assert_eq!(k.violations(), 6);
        assert_eq!(k.min_margin(), -2.0);
        assert!(!k.holds(0, 1));
        assert!(!k.identity_can_be_kkt());
    }

    #[test]
    fn theta_gamma_trivial_cases() {
        let a = AdjacencyMatrix::new(array![[0., 1., 0.], [1., 0., 1.], [0., 1., 0.]], false).unwrap();
        let id = Permutation::identity(3);
        let tg = theta_gamma_identity(&a, &a, &id, &id).unwrap();
        assert_eq!(
            tg,
            ThetaGamma {
                lhs: 0,
                theta: 0,
                gamma: 0
            }
        );

        let p = Permutation::new(vec![1, 2, 0]).unwrap();
        let q = Permutation::new(vec![2, 1, 0]).unwrap();
        let tg = theta_gamma_identity(&a, &a, &p, &q).unwrap();
        assert_eq!(tg.gamma, 0);
        assert_eq!(tg.lhs, tg.theta as i64);
        assert!(tg.holds());
    }

    #[test]
    fn theta_gamma_rejects_weighted() {
        let a = AdjacencyMatrix::new(array![[0., 2.], [2., 0.]], false).unwrap();
        let id = Permutation::identity(2);
        assert!(matches!(
            theta_gamma_identity(&a, &a, &id, &id),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn n_correct_counts_fixed_agreements() {
        let p = Permutation::new(vec![3, 1, 0, 2]).unwrap();
        assert_eq!(n_correct(&p, &p).unwrap(), 4);
        let swapped = p.compose(&Permutation::transposition(4, 0, 2)).unwrap();
        assert_eq!(n_correct(&swapped, &p).unwrap(), 2);
        assert!(n_correct(&p, &Permutation::identity(3)).is_err());
    }
}
