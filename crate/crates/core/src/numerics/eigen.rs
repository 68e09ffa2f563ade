use serde::Serialize;

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

/// Sweep cap for the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;

/// Default relative tolerance for [`sym_eig`]: symmetry check and the
/// off-diagonal stopping criterion both use it.
pub const DEFAULT_EIG_TOL: f64 = 1e-13;

/// Eigenpairs of a real symmetric matrix.
///
/// `values` are sorted descending and `vectors` holds the matching
/// orthonormal eigenvectors as columns.
#[derive(Debug, Clone, Serialize)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
    pub sweeps: usize,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i)
    }

    /// `M Λ Mᵀ`
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.dim();
        DenseMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * self.values[k] * self.vectors[(j, k)])
                .sum()
        })
    }
}

/// Full eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// The input must be symmetric within `tol·max(‖A‖_max, 1)`. Iteration stops
/// once the off-diagonal Frobenius norm drops to `tol·‖A‖_F`; failing that
/// within [`MAX_SWEEPS`] sweeps yields [`Error::Convergence`].
pub fn sym_eig(a: &DenseMatrix, tol: f64) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(Error::structural(format!(
            "eigen-decomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::structural("matrix has non-finite entries"));
    }
    let asym = a.asymmetry();
    if asym > tol * a.max_abs().max(1.0) {
        return Err(Error::structural(format!(
            "matrix is not symmetric (max |A_ij - A_ji| = {asym:e})"
        )));
    }

    let n = a.rows();
    // Work on the symmetrised copy so tiny asymmetries do not bias the result.
    let mut w = DenseMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let mut v = DenseMatrix::identity(n);
    let scale = w.frobenius_norm();
    let target = tol * scale;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&w);
        if off <= target || scale == 0.0 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::Convergence {
                sweeps,
                residual: off / scale,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut w, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps first-occurrence order among ties.
    order.sort_by(|&i, &j| w[(j, j)].total_cmp(&w[(i, i)]));
    let values = order.iter().map(|&i| w[(i, i)]).collect();
    let vectors = v.select_columns(&order);
    Ok(EigenDecomposition {
        values,
        vectors,
        sweeps,
    })
}

fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation annihilating `a[p][q]`, accumulated into `v`.
fn rotate(a: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.rows();

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_decomposition(a: &DenseMatrix, eig: &EigenDecomposition) {
        let norm = a.frobenius_norm().max(f64::MIN_POSITIVE);
        assert!(eig.vectors.orthonormality_defect() <= 1e-10);
        assert!(eig.reconstruct().sub(a).unwrap().frobenius_norm() <= 1e-8 * norm);
        for w in eig.values.windows(2) {
            assert!(w[0] >= w[1]);
        }
        for i in 0..eig.dim() {
            let v = eig.vector(i);
            let av = a.matvec(&v).unwrap();
            for (x, y) in av.iter().zip(&v) {
                assert!((x - eig.values[i] * y).abs() <= 1e-8 * norm);
            }
        }
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let a = DenseMatrix::identity(3);
        let eig = sym_eig(&a, DEFAULT_EIG_TOL).unwrap();
        assert_eq!(eig.values, vec![1.0, 1.0, 1.0]);
        assert_decomposition(&a, &eig);
    }

    #[test]
    fn diagonal_returns_axes() {
        let a = DenseMatrix::diagonal(&[1.0, 4.0]);
        let eig = sym_eig(&a, DEFAULT_EIG_TOL).unwrap();
        assert_eq!(eig.values, vec![4.0, 1.0]);
        assert_eq!(eig.vector(0)[1].abs(), 1.0);
        assert_eq!(eig.vector(1)[0].abs(), 1.0);
    }

    /// Roots of det(Q₃ − λI) = −(λ − 4)²(λ − 1), found by bisection on the
    /// characteristic polynomial evaluated through a cofactor expansion.
    #[test]
    fn three_by_three_circulant_matches_characteristic_roots() {
        let rows = [[3.0, -1.0, -1.0], [-1.0, 3.0, -1.0], [-1.0, -1.0, 3.0]];
        let charpoly = |l: f64| {
            let m = |i: usize, j: usize| rows[i][j] - if i == j { l } else { 0.0 };
            m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
        };
        // Sign change brackets the simple root; the double root is a tangency.
        let (mut lo, mut hi) = (0.0, 2.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if charpoly(lo).signum() == charpoly(mid).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - 1.0).abs() < 1e-12);
        assert!(charpoly(4.0).abs() < 1e-12);

        let a = DenseMatrix::from_rows(&rows.map(|r| r.to_vec())).unwrap();
        let eig = sym_eig(&a, DEFAULT_EIG_TOL).unwrap();
        for (got, want) in eig.values.iter().zip([4.0, 4.0, 1.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert_decomposition(&a, &eig);
    }

    #[test]
    fn rejects_bad_input() {
        let ns = DenseMatrix::<f64>::zeros(2, 3);
        assert!(matches!(sym_eig(&ns, 1e-12), Err(Error::Structural(_))));
        let asym = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(sym_eig(&asym, 1e-12), Err(Error::Structural(_))));
    }

    #[test]
    fn zero_matrix_is_already_diagonal() {
        let eig = sym_eig(&DenseMatrix::zeros(4, 4), DEFAULT_EIG_TOL).unwrap();
        assert_eq!(eig.values, vec![0.0; 4]);
        assert_eq!(eig.sweeps, 0);
    }

    proptest! {
        #[test]
        fn random_symmetric_decomposes(
            n in 1usize..12,
            seed in proptest::collection::vec(-10.0f64..10.0, 144),
        ) {
            let a = DenseMatrix::from_fn(n, n, |i, j| {
                let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
                seed[lo * 12 + hi]
            });
            let eig = sym_eig(&a, DEFAULT_EIG_TOL).unwrap();
            assert_decomposition(&a, &eig);
            let sum: f64 = eig.values.iter().sum();
            prop_assert!((sum - a.trace()).abs() <= 1e-8 * a.frobenius_norm().max(1.0));
        }
    }
}
