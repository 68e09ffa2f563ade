use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

/// Ridge regression by the normal equations: solves `(XᵀX + αI)B = XᵀY`.
///
/// The SPD system is factored with Cholesky and the solution gets one step
/// of iterative refinement. A pivot at or below `1e-14·max diag` means the
/// system is numerically singular (only reachable with `alpha = 0`).
pub fn ridge_solve(x: &DenseMatrix, y: &DenseMatrix, alpha: f64) -> Result<DenseMatrix> {
    if alpha < 0.0 || !alpha.is_finite() {
        return Err(Error::Precondition(format!(
            "ridge coefficient must be finite and non-negative, got {alpha}"
        )));
    }
    if x.rows() != y.rows() {
        return Err(Error::structural(format!(
            "design has {} samples but targets have {}",
            x.rows(),
            y.rows()
        )));
    }
    let mut gram = x.tr_matmul(x)?;
    for i in 0..gram.rows() {
        gram[(i, i)] += alpha;
    }
    let rhs = x.tr_matmul(y)?;
    let chol = Cholesky::factor(&gram)?;

    let mut b = chol.solve(&rhs);
    let residual = rhs.sub(&gram.matmul(&b)?)?;
    let correction = chol.solve(&residual);
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            b[(i, j)] += correction[(i, j)];
        }
    }
    Ok(b)
}

/// `‖(XᵀX + αI)B − XᵀY‖_F`, the normal-equation residual.
pub fn normal_equation_residual(
    x: &DenseMatrix,
    y: &DenseMatrix,
    b: &DenseMatrix,
    alpha: f64,
) -> Result<f64> {
    let mut gram = x.tr_matmul(x)?;
    for i in 0..gram.rows() {
        gram[(i, i)] += alpha;
    }
    Ok(gram.matmul(b)?.sub(&x.tr_matmul(y)?)?.frobenius_norm())
}

struct Cholesky {
    l: DenseMatrix,
}

impl Cholesky {
    fn factor(a: &DenseMatrix) -> Result<Self> {
        let n = a.rows();
        let scale = (0..n).fold(0.0f64, |m, i| m.max(a[(i, i)].abs()));
        let floor = 1e-14 * scale;
        let mut l = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if d.is_nan() || d <= floor {
                return Err(Error::Singular(format!(
                    "normal matrix is rank deficient (pivot {d:e} at column {j})"
                )));
            }
            let d = d.sqrt();
            l[(j, j)] = d;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(Self { l })
    }

    fn solve(&self, b: &DenseMatrix) -> DenseMatrix {
        let n = self.l.rows();
        let mut x = b.clone();
        for c in 0..b.cols() {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.l[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.l[(i, i)];
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in (i + 1)..n {
                    s -= self.l[(k, i)] * x[(k, c)];
                }
                x[(i, c)] = s / self.l[(i, i)];
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_targets_give_zero_weights() {
        let x = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 1.0], vec![0.5, 0.5]]).unwrap();
        let y = DenseMatrix::zeros(3, 2);
        let b = ridge_solve(&x, &y, 0.1).unwrap();
        assert_eq!(b.max_abs(), 0.0);
    }

    #[test]
    fn identity_design_returns_targets() {
        let x = DenseMatrix::identity(3);
        let y = DenseMatrix::from_rows(&[vec![1.0], vec![-2.0], vec![0.5]]).unwrap();
        let b = ridge_solve(&x, &y, 0.0).unwrap();
        assert!(b.sub(&y).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn scalar_case_by_hand() {
        // (1·1 + 2·2 + 1)⁻¹ · (1·1 + 2·2) = 5/6
        let x = DenseMatrix::from_rows(&[vec![1.0], vec![2.0]]).unwrap();
        let b = ridge_solve(&x, &x, 1.0).unwrap();
        assert!((b[(0, 0)] - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn rank_deficient_without_shrinkage_is_singular() {
        let x = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        let y = DenseMatrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
        assert!(matches!(ridge_solve(&x, &y, 0.0), Err(Error::Singular(_))));
        assert!(ridge_solve(&x, &y, 1e-3).is_ok());
    }

    #[test]
    fn mismatched_samples_and_negative_alpha() {
        let x = DenseMatrix::identity(2);
        let y = DenseMatrix::zeros(3, 1);
        assert!(matches!(
            ridge_solve(&x, &y, 1.0),
            Err(Error::Structural(_))
        ));
        let y = DenseMatrix::zeros(2, 1);
        assert!(matches!(
            ridge_solve(&x, &y, -1.0),
            Err(Error::Precondition(_))
        ));
    }

    fn rotation(n: usize, angles: &[f64]) -> DenseMatrix {
        // Product of Givens rotations in consecutive planes.
        let mut r = DenseMatrix::identity(n);
        for (k, &t) in angles.iter().enumerate().take(n.saturating_sub(1)) {
            let g = DenseMatrix::from_fn(n, n, |i, j| match (i, j) {
                _ if i == k && j == k => t.cos(),
                _ if i == k + 1 && j == k + 1 => t.cos(),
                _ if i == k && j == k + 1 => -t.sin(),
                _ if i == k + 1 && j == k => t.sin(),
                _ if i == j => 1.0,
                _ => 0.0,
            });
            r = r.matmul(&g).unwrap();
        }
        r
    }

    proptest! {
        #[test]
        fn normal_equations_hold(
            entries in proptest::collection::vec(-3.0f64..3.0, 60),
            targets in proptest::collection::vec(-3.0f64..3.0, 40),
            alpha in 1e-6f64..10.0,
        ) {
            let x = DenseMatrix::from_row_major(20, 3, entries[..60].to_vec()).unwrap();
            let y = DenseMatrix::from_row_major(20, 2, targets).unwrap();
            let b = ridge_solve(&x, &y, alpha).unwrap();
            let res = normal_equation_residual(&x, &y, &b, alpha).unwrap();
            prop_assert!(res <= 1e-8 * x.tr_matmul(&y).unwrap().frobenius_norm().max(1e-300));
        }

        #[test]
        fn predictions_invariant_under_orthogonal_features(
            entries in proptest::collection::vec(-3.0f64..3.0, 80),
            targets in proptest::collection::vec(-3.0f64..3.0, 20),
            angles in proptest::collection::vec(0.0f64..std::f64::consts::TAU, 3),
            alpha in 1e-4f64..1.0,
        ) {
            let x = DenseMatrix::from_row_major(20, 4, entries).unwrap();
            let y = DenseMatrix::from_row_major(20, 1, targets).unwrap();
            let r = rotation(4, &angles);
            let xr = x.matmul(&r).unwrap();
            let p = x.matmul(&ridge_solve(&x, &y, alpha).unwrap()).unwrap();
            let pr = xr.matmul(&ridge_solve(&xr, &y, alpha).unwrap()).unwrap();
            for i in 0..20 {
                let (a, b) = (p[(i, 0)], pr[(i, 0)]);
                prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0));
            }
        }
    }
}
