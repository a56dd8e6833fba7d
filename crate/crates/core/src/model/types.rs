use nalgebra::DMatrix;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Enumerates unordered node pairs `k < l` of a `p`-node graph in row-major
/// upper-triangle order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeIndex {
    p: usize,
    pairs: Vec<(usize, usize)>,
}

impl EdgeIndex {
    pub fn new(p: usize) -> Self {
        let mut pairs = Vec::with_capacity(p * p.saturating_sub(1) / 2);
        for k in 0..p {
            for l in k + 1..p {
                pairs.push((k, l));
            }
        }
        Self { p, pairs }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Edge index of `(k, l)` in either orientation; `k != l`.
    #[inline]
    pub fn index(&self, k: usize, l: usize) -> usize {
        debug_assert!(k != l && k < self.p && l < self.p);
        let (a, b) = if k < l { (k, l) } else { (l, k) };
        a * self.p - a * (a + 1) / 2 + (b - a - 1)
    }

    #[inline]
    pub fn pair(&self, e: usize) -> (usize, usize) {
        self.pairs[e]
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Symmetric matrix with `values[e]` at both `(k, l)` and `(l, k)`.
    pub fn to_matrix<T: Copy>(&self, values: &[T], diagonal: T) -> DMatrix<T>
    where
        T: nalgebra::Scalar,
    {
        let mut m = DMatrix::from_element(self.p, self.p, diagonal);
        for (e, &(k, l)) in self.pairs.iter().enumerate() {
            m[(k, l)] = values[e];
            m[(l, k)] = values[e];
        }
        m
    }

    /// Upper-triangle values of a square matrix.
    pub fn from_matrix<T: nalgebra::Scalar + Copy>(&self, m: &DMatrix<T>) -> Vec<T> {
        self.pairs.iter().map(|&(k, l)| m[(k, l)]).collect()
    }
}

/// Sufficient statistics of one experimental condition: the pooled scatter
/// matrix `sum y y^T` and the number of time points behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionData<T: Real> {
    pub label: String,
    pub n_obs: usize,
    #[serde(with = "matrix_rows")]
    pub scatter: DMatrix<T>,
}

impl<T: Real> ConditionData<T> {
    /// Validates symmetry and nonnegative definiteness of the scatter.
    pub fn new(label: impl Into<String>, scatter: DMatrix<T>, n_obs: usize) -> Result<Self> {
        let data = Self {
            label: label.into(),
            n_obs,
            scatter,
        };
        data.validate()?;
        Ok(data)
    }

    /// No observations: the chain samples from the prior.
    pub fn empty(label: impl Into<String>, p: usize) -> Self {
        Self {
            label: label.into(),
            n_obs: 0,
            scatter: DMatrix::zeros(p, p),
        }
    }

    pub fn p(&self) -> usize {
        self.scatter.nrows()
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.scatter;
        if !s.is_square() || s.nrows() == 0 {
            return Err(Error::MatrixDomain("scatter must be a nonempty square matrix".into()));
        }
        let p = s.nrows();
        let mut scale = T::zero();
        for k in 0..p {
            scale = Float::max(scale, Float::abs(s[(k, k)]));
        }
        let tol = T::lit(1e-9) * (scale + T::one());
        for k in 0..p {
            for l in 0..k {
                if Float::abs(s[(k, l)] - s[(l, k)]) > tol {
                    return Err(Error::MatrixDomain(format!(
                        "scatter not symmetric at ({k}, {l})"
                    )));
                }
            }
            if !Float::is_finite(s[(k, k)]) {
                return Err(Error::MatrixDomain("scatter has non-finite entries".into()));
            }
        }
        let eig = s.clone().symmetric_eigenvalues();
        let min = eig.iter().copied().fold(<T as Float>::infinity(), Float::min);
        if min < -T::lit(1e-8) * (scale + T::one()) * T::lit(p as f64) {
            return Err(Error::MatrixDomain(format!(
                "scatter not nonnegative definite (min eigenvalue {min:?})"
            )));
        }
        Ok(())
    }
}

/// Per-condition precision matrix, edge indicators, and latent scales. The
/// edge-level quantities are stored by [`EdgeIndex`] position.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionState {
    pub omega: DMatrix<f64>,
    /// Cached inverse of `omega`.
    pub sigma: DMatrix<f64>,
    pub delta: Vec<bool>,
    /// Slab precisions `tau_kl`.
    pub tau_slab: Vec<f64>,
    /// Variances of the Gaussian scale mixture behind the spike.
    pub tau_spike_var: Vec<f64>,
}

impl PrecisionState {
    pub fn p(&self) -> usize {
        self.omega.nrows()
    }

    pub fn delta_matrix(&self, edges: &EdgeIndex) -> DMatrix<u8> {
        let values: Vec<u8> = self.delta.iter().map(|&d| d as u8).collect();
        edges.to_matrix(&values, 0)
    }

    /// Prior variance of `omega_e` under the current indicator.
    #[inline]
    pub fn edge_variance(&self, e: usize) -> f64 {
        if self.delta[e] {
            1.0 / self.tau_slab[e]
        } else {
            self.tau_spike_var[e]
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.omega.clone().cholesky().is_none() {
            return Err(Error::MatrixDomain("precision lost positive definiteness".into()));
        }
        if self.tau_slab.iter().chain(&self.tau_spike_var).any(|&t| !(t > 0.0)) {
            return Err(Error::MatrixDomain("latent scales must be positive".into()));
        }
        Ok(())
    }
}

/// One Dirichlet-process component in stick-breaking form.
#[derive(Debug, Clone, PartialEq)]
pub struct DpComponentState {
    pub atoms: Vec<f64>,
    pub sticks: Vec<f64>,
    /// Atom index of each edge.
    pub assignments: Vec<usize>,
    pub slice_vars: Vec<f64>,
}

impl DpComponentState {
    /// Mixture weights `v_h prod_{l<h} (1 - v_l)`.
    pub fn weights(&self) -> Vec<f64> {
        stick_weights(&self.sticks)
    }

    #[inline]
    pub fn value(&self, e: usize) -> f64 {
        self.atoms[self.assignments[e]]
    }

    pub fn occupied(&self) -> usize {
        let mut seen = vec![false; self.atoms.len()];
        for &c in &self.assignments {
            seen[c] = true;
        }
        seen.iter().filter(|&&s| s).count()
    }

    pub fn check(&self) -> Result<()> {
        if self.atoms.len() != self.sticks.len() {
            return Err(Error::MatrixDomain("atoms and sticks differ in length".into()));
        }
        if self.assignments.iter().any(|&c| c >= self.atoms.len()) {
            return Err(Error::MatrixDomain("assignment points past the atoms".into()));
        }
        let w = self.weights();
        if w.iter().any(|&x| !(x > 0.0)) || w.iter().sum::<f64>() >= 1.0 {
            return Err(Error::MatrixDomain("stick weights out of range".into()));
        }
        Ok(())
    }
}

pub(crate) fn stick_weights(sticks: &[f64]) -> Vec<f64> {
    let mut remaining = 1.0;
    sticks
        .iter()
        .map(|&v| {
            let w = v * remaining;
            remaining *= 1.0 - v;
            w
        })
        .collect()
}

/// Gaussian latents behind the edge indicators plus their t-mixture scales,
/// indexed `[condition][edge]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentationState {
    pub u: Vec<Vec<f64>>,
    pub sigma_phi_sq: Vec<Vec<f64>>,
}

mod matrix_rows {
    use nalgebra::DMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::scalar::Real;

    pub fn serialize<T: Real + Serialize, S: Serializer>(
        m: &DMatrix<T>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<T>> = (0..m.nrows())
            .map(|i| m.row(i).iter().copied().collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, T: Real, D: Deserializer<'de>>(
        d: D,
    ) -> Result<DMatrix<T>, D::Error> {
        let rows: Vec<Vec<T>> = Vec::deserialize(d)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("matrix rows must form a square matrix"));
        }
        Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_index_round_trip() {
        let idx = EdgeIndex::new(6);
        assert_eq!(idx.len(), 15);
        for (e, &(k, l)) in idx.pairs().iter().enumerate() {
            assert_eq!(idx.index(k, l), e);
            assert_eq!(idx.index(l, k), e);
        }
    }

    #[test]
    fn stick_breaking_product() {
        let w = stick_weights(&[0.5, 0.5, 0.5]);
        assert_eq!(w, vec![0.5, 0.25, 0.125]);
    }

    #[test]
    fn condition_data_validation() {
        let ok = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        ConditionData::new("a", ok, 3).unwrap();
        let asym = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0]);
        assert!(ConditionData::new("a", asym, 3).is_err());
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 3.0, 3.0, 1.0]);
        assert!(ConditionData::new("a", indefinite, 3).is_err());
    }

    #[test]
    fn condition_data_json_round_trip() {
        let s = DMatrix::from_row_slice(2, 2, &[2.0, 0.1 + 0.2, 0.1 + 0.2, 1.0 / 3.0]);
        let d = ConditionData::new("x", s, 9).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        let back: ConditionData<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
    }
}
