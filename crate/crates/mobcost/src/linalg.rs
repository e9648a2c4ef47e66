//! Small dense linear-algebra helpers shared by the stationary-distribution
//! and chain-statistics solvers. Systems here are tiny (node or chain-length
//! sized), so plain Gaussian elimination with partial pivoting is enough.

/// Solve `a · x = rhs` in place. Returns `None` when the matrix is singular
/// to working precision.
pub(crate) fn solve(mut a: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n) && rhs.len() == n);

    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in (col + 1)..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }

    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in (row + 1)..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Left null vector of a generator or `P - I` style matrix, normalized to
/// sum 1: solves `pi · m = 0`, `sum(pi) = 1` by replacing the last column of
/// the transposed system with the normalization constraint.
pub(crate) fn stationary_from_balance(m: &[Vec<f64>]) -> Option<Vec<f64>> {
    let n = m.len();
    if n == 0 {
        return None;
    }
    // transpose: rows are balance equations for each state, last one replaced
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            a[j][i] = m[i][j];
        }
    }
    let mut rhs = vec![0.0; n];
    for j in 0..n {
        a[n - 1][j] = 1.0;
    }
    rhs[n - 1] = 1.0;
    solve(a, rhs)
}
