use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary undirected graph without self-loops.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Adjacency {
    p: usize,
    cells: Vec<bool>,
}

impl Adjacency {
    pub fn empty(p: usize) -> Self {
        Self {
            p,
            cells: vec![false; p * p],
        }
    }

    pub fn complete(p: usize) -> Self {
        let mut a = Self::empty(p);
        for k in 0..p {
            for l in k + 1..p {
                a.set(k, l, true);
            }
        }
        a
    }

    pub fn from_edges(p: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut a = Self::empty(p);
        for &(k, l) in edges {
            if k == l || k >= p || l >= p {
                return Err(Error::Usage(format!("invalid edge ({k}, {l}) for {p} nodes")));
            }
            a.set(k, l, true);
        }
        Ok(a)
    }

    /// Edges `|m_kl| > threshold` off the diagonal.
    pub fn threshold(m: &DMatrix<f64>, threshold: f64) -> Self {
        let p = m.nrows();
        let mut a = Self::empty(p);
        for k in 0..p {
            for l in k + 1..p {
                let w = 0.5 * (m[(k, l)] + m[(l, k)]);
                if w.abs() > threshold {
                    a.set(k, l, true);
                }
            }
        }
        a
    }

    /// Reads a 0/1 matrix; it must be symmetric with a zero diagonal.
    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Usage("adjacency must be square".into()));
        }
        let p = m.nrows();
        let mut a = Self::empty(p);
        for k in 0..p {
            if m[(k, k)] != 0.0 {
                return Err(Error::Usage(format!("adjacency has a self-loop at {k}")));
            }
            for l in k + 1..p {
                let x = m[(k, l)];
                if x != m[(l, k)] || (x != 0.0 && x != 1.0) {
                    return Err(Error::Usage(format!(
                        "adjacency not binary symmetric at ({k}, {l})"
                    )));
                }
                a.set(k, l, x == 1.0);
            }
        }
        Ok(a)
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.p, self.p, |k, l| if self.has(k, l) { 1.0 } else { 0.0 })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn has(&self, k: usize, l: usize) -> bool {
        self.cells[k * self.p + l]
    }

    pub fn set(&mut self, k: usize, l: usize, on: bool) {
        if k == l {
            return;
        }
        self.cells[k * self.p + l] = on;
        self.cells[l * self.p + k] = on;
    }

    pub fn degree(&self, k: usize) -> usize {
        self.cells[k * self.p..(k + 1) * self.p]
            .iter()
            .filter(|&&x| x)
            .count()
    }

    pub fn neighbors(&self, k: usize) -> Vec<usize> {
        (0..self.p).filter(|&l| self.has(k, l)).collect()
    }

    /// Edges as `(k, l)` with `k < l`, row-major.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for k in 0..self.p {
            for l in k + 1..self.p {
                if self.has(k, l) {
                    out.push((k, l));
                }
            }
        }
        out
    }

    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for k in 0..self.p {
            for l in k + 1..self.p {
                if !self.has(k, l) {
                    out.push((k, l));
                }
            }
        }
        out
    }

    pub fn n_edges(&self) -> usize {
        self.cells.iter().filter(|&&x| x).count() / 2
    }

    /// Subgraph induced by `nodes`, relabelled `0..nodes.len()`.
    pub fn induced(&self, nodes: &[usize]) -> Self {
        let mut a = Self::empty(nodes.len());
        for (i, &k) in nodes.iter().enumerate() {
            for (j, &l) in nodes.iter().enumerate().skip(i + 1) {
                if self.has(k, l) {
                    a.set(i, j, true);
                }
            }
        }
        a
    }

    /// Graph with node `k` renamed `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut a = Self::empty(self.p);
        for (k, l) in self.edges() {
            a.set(perm[k], perm[l], true);
        }
        a
    }

    /// Symmetric difference.
    pub fn xor(&self, other: &Self) -> Self {
        let mut a = Self::empty(self.p);
        for k in 0..self.p {
            for l in k + 1..self.p {
                if self.has(k, l) != other.has(k, l) {
                    a.set(k, l, true);
                }
            }
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_and_counts() {
        let a = Adjacency::from_edges(4, &[(0, 1), (2, 1), (3, 0)]).unwrap();
        assert_eq!(a.n_edges(), 3);
        assert_eq!(a.degree(1), 2);
        assert_eq!(a.edges(), vec![(0, 1), (0, 3), (1, 2)]);
        assert_eq!(a.non_edges().len(), 3);
        assert!(Adjacency::from_edges(3, &[(1, 1)]).is_err());
        assert_eq!(Adjacency::from_matrix(&a.to_matrix()).unwrap(), a);
        assert_eq!(Adjacency::complete(5).n_edges(), 10);
    }

    #[test]
    fn rejects_bad_matrices() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(Adjacency::from_matrix(&m).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(Adjacency::from_matrix(&m).is_err());
    }

    #[test]
    fn thresholding_is_strict() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.1, -0.2, 0.1, 1.0, 0.05, -0.2, 0.05, 1.0]);
        assert_eq!(Adjacency::threshold(&m, 0.1).edges(), vec![(0, 2)]);
    }
}
