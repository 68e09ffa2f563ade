use super::eigen::{sym_eig, DEFAULT_EIG_TOL};
use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

/// Orthonormality defect allowed on inputs to [`principal_angles`].
pub const ORTHONORMAL_TOL: f64 = 1e-8;

/// Cosines of the principal angles between `span(U)` and `span(V)`.
///
/// These are the singular values of `UᵀV`, obtained as square roots of the
/// eigenvalues of the smaller Gram product. Returned descending, clamped to
/// `[0, 1]`, `min(dim U, dim V)` of them.
pub fn principal_angles(u: &DenseMatrix, v: &DenseMatrix) -> Result<Vec<f64>> {
    if u.rows() != v.rows() {
        return Err(Error::structural(format!(
            "subspaces live in R^{} and R^{}",
            u.rows(),
            v.rows()
        )));
    }
    for (name, m) in [("U", u), ("V", v)] {
        let defect = m.orthonormality_defect();
        if defect > ORTHONORMAL_TOL {
            return Err(Error::structural(format!(
                "{name} columns are not orthonormal (defect {defect:e})"
            )));
        }
    }
    if u.cols() == 0 || v.cols() == 0 {
        return Ok(Vec::new());
    }
    let cross = u.tr_matmul(v)?;
    let gram = if cross.rows() <= cross.cols() {
        cross.matmul(&cross.transpose())?
    } else {
        cross.tr_matmul(&cross)?
    };
    let eig = sym_eig(&gram, DEFAULT_EIG_TOL)?;
    Ok(eig
        .values
        .iter()
        .map(|&s| s.max(0.0).sqrt().clamp(0.0, 1.0))
        .collect())
}
