//! Small dense solves used by the nearest-point iteration and the
//! linear-dependence system of adjacent cones.

use crate::error::{Error, Result};

/// Solves `a · x = b` for a square row-major `a` by Gaussian elimination with
/// partial pivoting. A pivot of magnitude `<= pivot_tol` is reported as
/// singular.
pub(crate) fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>, pivot_tol: f64) -> Result<Vec<f64>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|r| r.len() == n));
    for col in 0..n {
        let (piv, piv_abs) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if piv_abs <= pivot_tol {
            return Err(Error::SingularSystem { pivot: piv_abs });
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_permuted_system() {
        let a = vec![vec![0.0, 2.0], vec![3.0, 1.0]];
        let x = solve_dense(a, vec![4.0, 5.0], 1e-12).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn singular_is_reported() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(matches!(solve_dense(a, vec![1.0, 2.0], 1e-12), Err(Error::SingularSystem { .. })));
    }
}
