use nalgebra::DMatrix;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Partial correlations `-omega_kl / sqrt(omega_kk omega_ll)` of a symmetric
/// positive-definite precision matrix; unit diagonal.
pub fn partial_correlations<T: Real>(omega: &DMatrix<T>) -> Result<DMatrix<T>> {
    if !omega.is_square() {
        return Err(Error::MatrixDomain("precision matrix must be square".into()));
    }
    if omega.clone().cholesky().is_none() {
        return Err(Error::MatrixDomain("precision matrix is not positive definite".into()));
    }
    let p = omega.nrows();
    let inv_sd: Vec<T> = (0..p).map(|k| T::one() / Float::sqrt(omega[(k, k)])).collect();
    Ok(DMatrix::from_fn(p, p, |k, l| {
        if k == l {
            T::one()
        } else {
            // average the two triangles so the result is exactly symmetric
            let w = (omega[(k, l)] + omega[(l, k)]) * T::lit(0.5);
            -w * (inv_sd[k] * inv_sd[l])
        }
    }))
}

/// Fisher's variance-stabilizing transform `atanh(rho)`.
pub fn fisher_z<T: Float>(rho: T) -> Result<T> {
    if !(rho.abs() < T::one()) {
        return Err(Error::ParameterDomain(
            "fisher_z requires |rho| < 1".into(),
        ));
    }
    let half = T::one() / (T::one() + T::one());
    Ok(half * ((T::one() + rho) / (T::one() - rho)).ln())
}
