//! Dense Gaussian elimination with partial pivoting.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Solves `a x = b` in place, consuming both operands.
///
/// A pivot whose magnitude falls below `rel_tol` times the largest entry of
/// the original matrix is reported as [`Error::Singular`].
pub fn solve_dense<T: Scalar>(mut a: Array2<T>, mut b: Array1<T>, rel_tol: T) -> Result<Array1<T>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "square system",
            expected: n,
            actual: a.ncols(),
        });
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            context: "right-hand side",
            expected: n,
            actual: b.len(),
        });
    }
    let scale = a.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    let threshold = scale * rel_tol;

    for k in 0..n {
        let (p, pivot) = (k..n)
            .map(|r| (r, a[[r, k]].abs()))
            .fold(
                (k, T::zero()),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if !(pivot > threshold) {
            return Err(Error::Singular {
                row: k,
                pivot: pivot.to_f64_lossy(),
            });
        }
        if p != k {
            for c in 0..n {
                a.swap([k, c], [p, c]);
            }
            b.swap(k, p);
        }
        let diag = a[[k, k]];
        for r in k + 1..n {
            let factor = a[[r, k]] / diag;
            if factor == T::zero() {
                continue;
            }
            a[[r, k]] = T::zero();
            for c in k + 1..n {
                let akc = a[[k, c]];
                a[[r, c]] -= factor * akc;
            }
            let bk = b[k];
            b[r] -= factor * bk;
        }
    }

    let mut x = Array1::zeros(n);
    for k in (0..n).rev() {
        let mut acc = b[k];
        for c in k + 1..n {
            acc -= a[[k, c]] * x[c];
        }
        x[k] = acc / a[[k, k]];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn solves_small_system_needing_pivot() {
        let a: Array2<f64> = array![[0.0, 2.0, 1.0], [1.0, 1.0, 0.0], [3.0, 0.0, 1.0]];
        let x_true = array![1.0, -2.0, 0.5];
        let b = a.dot(&x_true);
        let x = solve_dense(a, b, 1e-14).unwrap();
        for (u, v) in x.iter().zip(x_true.iter()) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn reports_singular() {
        let a = array![[1.0, 2.0], [2.0, 4.0]];
        let b = array![1.0, 2.0];
        assert!(matches!(
            solve_dense(a, b, 1e-12),
            Err(Error::Singular { .. })
        ));
    }
}
