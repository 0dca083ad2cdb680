//! Exact dense linear assignment by shortest augmenting paths
//! (Jonker-Volgenant style, O(n³)).
//!
//! Ties are broken deterministically: while scanning for the next column to
//! enter the shortest-path tree, the lowest column index wins.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::matrix::{DoublyStochastic, Permutation};

#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentResult {
    /// Row `i` is assigned to column `permutation.apply(i)`.
    pub permutation: Permutation,
    pub total_cost: f64,
}

const NONE: usize = usize::MAX;

/// Minimizes `Σ_i cost[i, π(i)]` over permutations.
pub fn solve_lap_min(cost: &Array2<f64>) -> Result<AssignmentResult> {
    solve_view(cost.view())
}

/// Maximizes `Σ_i profit[i, π(i)]`; the reported total is the maximized sum.
pub fn solve_lap_max(profit: &Array2<f64>) -> Result<AssignmentResult> {
    let negated = profit.mapv(|v| -v);
    let res = solve_view(negated.view())?;
    let total_cost = assignment_total(profit.view(), &res.permutation);
    Ok(AssignmentResult {
        permutation: res.permutation,
        total_cost,
    })
}

/// The permutation maximizing `⟨P, D⟩`, which is also the Frobenius-nearest
/// permutation since `‖D − P‖² = ‖D‖² + n − 2⟨P, D⟩`.
pub fn project_to_permutation(d: &DoublyStochastic) -> Result<Permutation> {
    let v = d.violation();
    if !(v <= d.tolerance()) {
        return Err(Error::Infeasible(format!(
            "violation {v:e} exceeds tolerance {:e}",
            d.tolerance()
        )));
    }
    Ok(solve_lap_max(d.entries())?.permutation)
}

/// `Σ_i m[i, π(i)]`, summed in row order.
pub fn assignment_total(m: ArrayView2<f64>, p: &Permutation) -> f64 {
    p.as_slice().iter().enumerate().map(|(i, &j)| m[[i, j]]).sum()
}

pub(crate) fn solve_view(cost: ArrayView2<f64>) -> Result<AssignmentResult> {
    solve_view_warm(cost, &mut Vec::new())
}

/// As [`solve_view`], starting from the column potentials in `duals` when
/// they have the right length and leaving the final potentials there.
/// Consecutive Frank-Wolfe gradients differ little, so the previous
/// potentials leave few rows to augment.
pub(crate) fn solve_view_warm(cost: ArrayView2<f64>, duals: &mut Vec<f64>) -> Result<AssignmentResult> {
    let (rows, cols) = cost.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    if cost.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("assignment costs must be finite".into()));
    }
    let n = rows;
    let owned;
    let c: &[f64] = match cost.as_slice() {
        Some(s) => s,
        None => {
            owned = cost.as_standard_layout().into_owned();
            owned.as_slice().expect("standard layout")
        }
    };
    if duals.len() != n {
        duals.clear();
    }
    let map = shortest_augmenting_path(c, n, duals);
    let permutation = Permutation::new(map).expect("solver returns a bijection");
    let total_cost = assignment_total(cost, &permutation);
    Ok(AssignmentResult {
        permutation,
        total_cost,
    })
}

fn shortest_augmenting_path(c: &[f64], n: usize, duals: &mut Vec<f64>) -> Vec<usize> {
    let mut u = vec![0.0; n];
    let warm = duals.len() == n;
    let mut v = if warm { std::mem::take(duals) } else { vec![0.0; n] };
    let mut col4row = vec![NONE; n];
    let mut row4col = vec![NONE; n];

    let mut shortest = vec![f64::INFINITY; n];
    let mut path = vec![NONE; n];
    let mut scanned_row = vec![false; n];
    let mut scanned_col = vec![false; n];
    let mut visited_rows = Vec::with_capacity(n);
    let mut visited_cols = Vec::with_capacity(n);

    // Column reduction (or the warm potentials) then row reduction gives
    // feasible duals; every row whose tight column is still free is matched
    // before augmenting.
    if !warm {
        for (j, vj) in v.iter_mut().enumerate() {
            *vj = (0..n).map(|i| c[i * n + j]).fold(f64::INFINITY, f64::min);
        }
    }
    for i in 0..n {
        let row = &c[i * n..(i + 1) * n];
        let mut best = f64::INFINITY;
        let mut arg = NONE;
        for j in 0..n {
            let r = row[j] - v[j];
            if r < best || (r == best && row4col[arg] != NONE && row4col[j] == NONE) {
                best = r;
                arg = j;
            }
        }
        u[i] = best;
        if arg != NONE && row4col[arg] == NONE {
            col4row[i] = arg;
            row4col[arg] = i;
        }
    }

    for cur_row in 0..n {
        if col4row[cur_row] != NONE {
            continue;
        }
        shortest.fill(f64::INFINITY);
        path.fill(NONE);
        scanned_row.fill(false);
        scanned_col.fill(false);
        visited_rows.clear();
        visited_cols.clear();

        let mut min_val = 0.0;
        let mut i = cur_row;
        let sink;
        loop {
            scanned_row[i] = true;
            visited_rows.push(i);
            let row = &c[i * n..(i + 1) * n];
            let ui = u[i];
            let mut lowest = f64::INFINITY;
            let mut best = NONE;
            for j in 0..n {
                if scanned_col[j] {
                    continue;
                }
                let r = min_val + row[j] - ui - v[j];
                if r < shortest[j] {
                    path[j] = i;
                    shortest[j] = r;
                }
                if shortest[j] < lowest {
                    lowest = shortest[j];
                    best = j;
                }
            }
            // Finite costs always leave a reachable column.
            debug_assert!(best != NONE);
            min_val = lowest;
            scanned_col[best] = true;
            visited_cols.push(best);
            if row4col[best] == NONE {
                sink = best;
                break;
            }
            i = row4col[best];
        }

        u[cur_row] += min_val;
        for &r in &visited_rows {
            if r != cur_row {
                u[r] += min_val - shortest[col4row[r]];
            }
        }
        for &j in &visited_cols {
            v[j] -= min_val - shortest[j];
        }

        let mut j = sink;
        loop {
            let r = path[j];
            row4col[j] = r;
            let prev = col4row[r];
            col4row[r] = j;
            if r == cur_row {
                break;
            }
            j = prev;
        }
    }
    *duals = v;
    col4row
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn identity_favoring_matrix() {
        let n = 5;
        let cost = Array2::from_shape_fn((n, n), |(i, j)| if i == j { 0.0 } else { 1.0 });
        let res = solve_lap_min(&cost).unwrap();
        assert!(res.permutation.is_identity());
        assert_eq!(res.total_cost, 0.0);
    }

    #[test]
    fn two_by_two() {
        let res = solve_lap_min(&array![[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert!(res.permutation.is_identity());
        assert_eq!(res.total_cost, 2.0);
        let res = solve_lap_min(&array![[3.0, 1.0], [1.0, 3.0]]).unwrap();
        assert_eq!(res.permutation.as_slice(), &[1, 0]);
    }

    #[test]
    fn uniform_profit_ties() {
        let n = 4;
        let j = Array2::from_elem((n, n), 1.0 / n as f64);
        let res = solve_lap_max(&j).unwrap();
        assert_eq!(res.total_cost, 1.0);
        // Lowest-index tie-breaking yields the identity on a constant matrix.
        assert!(res.permutation.is_identity());
    }

    #[test]
    fn dominant_diagonal_profit() {
        let profit = Array2::from_shape_fn((6, 6), |(i, j)| if i == j { 10.0 } else { (i * j) as f64 * 0.1 });
        assert!(solve_lap_max(&profit).unwrap().permutation.is_identity());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            solve_lap_min(&array![[1.0, f64::INFINITY], [0.0, 1.0]]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            solve_lap_min(&Array2::zeros((2, 3))),
            Err(Error::NotSquare { .. })
        ));
        let bad = DoublyStochastic::new_unchecked(array![[0.9, 0.0], [0.0, 1.0]], 1e-9);
        assert!(matches!(project_to_permutation(&bad), Err(Error::Infeasible(_))));
    }

    #[test]
    fn empty_problem() {
        let res = solve_lap_min(&Array2::zeros((0, 0))).unwrap();
        assert!(res.permutation.is_empty());
        assert_eq!(res.total_cost, 0.0);
    }

    #[test]
    fn projection_of_permutation_is_itself() {
        let p = Permutation::new(vec![2, 4, 0, 1, 3]).unwrap();
        let d = DoublyStochastic::from_permutation(&p);
        assert_eq!(project_to_permutation(&d).unwrap(), p);
    }

    #[test]
    fn non_contiguous_view() {
        let cost = array![[4.0, 1.0, 3.0], [2.0, 0.0, 5.0], [3.0, 2.0, 2.0]];
        let t = cost.t().to_owned();
        let direct = solve_view(t.view()).unwrap();
        let via_view = solve_view(cost.t()).unwrap();
        assert_eq!(direct, via_view);
    }
}
