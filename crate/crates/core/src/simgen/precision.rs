use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::graphmetrics::Adjacency;
use crate::model::ConditionData;

/// Default floor on the smallest eigenvalue of a generated precision.
pub const DEFAULT_EIGEN_FLOOR: f64 = 0.1;

/// Unit diagonal, `Uniform(-1, 1)` on edges, then the diagonal is raised
/// until the smallest eigenvalue reaches `eps`.
pub fn build_precision<R: Rng + ?Sized>(adj: &Adjacency, rng: &mut R, eps: f64) -> DMatrix<f64> {
    let p = adj.p();
    let mut omega = DMatrix::identity(p, p);
    for (k, l) in adj.edges() {
        let w = rng.random_range(-1.0..1.0);
        omega[(k, l)] = w;
        omega[(l, k)] = w;
    }
    shift_to_floor(omega, eps)
}

/// Adds `eps - lambda_min` to the diagonal when `lambda_min < eps`.
pub fn shift_to_floor(mut omega: DMatrix<f64>, eps: f64) -> DMatrix<f64> {
    let lmin = omega
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if lmin < eps {
        for k in 0..omega.nrows() {
            omega[(k, k)] += eps - lmin;
        }
    }
    omega
}

/// Draws `n_subjects * t_points` vectors from `N(0, omega^-1)` for each
/// condition and accumulates their scatter.
pub fn sample_data<R: Rng>(
    labels: &[String],
    precisions: &[DMatrix<f64>],
    n_subjects: usize,
    t_points: usize,
    rngs: &mut [R],
) -> Result<Vec<ConditionData<f64>>> {
    if labels.len() != precisions.len() || rngs.len() != precisions.len() {
        return Err(Error::Usage("labels, precisions and streams must align".into()));
    }
    let n = n_subjects * t_points;
    precisions
        .iter()
        .zip(labels)
        .zip(rngs.iter_mut())
        .map(|((omega, label), rng)| {
            let p = omega.nrows();
            let chol = omega
                .clone()
                .cholesky()
                .ok_or_else(|| Error::MatrixDomain(format!("precision for '{label}' not SPD")))?;
            // columns y = L^{-T} z have covariance (L L^T)^{-1}
            let z = DMatrix::from_fn(p, n, |_, _| StandardNormal.sample(rng));
            let y = chol
                .l()
                .transpose()
                .solve_upper_triangular(&z)
                .ok_or_else(|| Error::MatrixDomain("singular Cholesky factor".into()))?;
            let scatter = &y * y.transpose();
            let scatter = (&scatter + scatter.transpose()) * 0.5;
            ConditionData::new(label.clone(), scatter, n)
        })
        .collect()
}
