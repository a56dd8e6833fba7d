use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rank-based AUC, the probability that a random positive outscores a
/// random negative with ties counting one half. `None` unless both classes
/// are present.
pub fn roc_auc(scores: &[f64], truth: &[bool]) -> Result<Option<f64>> {
    if scores.len() != truth.len() {
        return Err(Error::Usage("scores and truth lengths differ".into()));
    }
    let n_pos = truth.iter().filter(|&&t| t).count();
    let n_neg = truth.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Ok(None);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // midrank of the tie block, ranks starting at 1
        let mid = (i + j + 1) as f64 / 2.0;
        rank_sum_pos += mid * order[i..j].iter().filter(|&&k| truth[k]).count() as f64;
        i = j;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(Some(u / (n_pos as f64 * n_neg as f64)))
}

/// ROC points `(fpr, tpr)` from the strictest threshold down, starting at
/// `(0, 0)` and ending at `(1, 1)`.
pub fn roc_curve(scores: &[f64], truth: &[bool]) -> Vec<(f64, f64)> {
    let n_pos = truth.iter().filter(|&&t| t).count().max(1) as f64;
    let n_neg = truth.iter().filter(|&&t| !t).count().max(1) as f64;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            if truth[order[j]] {
                tp += 1;
            } else {
                fp += 1;
            }
            j += 1;
        }
        points.push((fp as f64 / n_neg, tp as f64 / n_pos));
        i = j;
    }
    points
}

/// Mean absolute entrywise difference over all `p^2` entries.
pub fn l1_error(estimate: &DMatrix<f64>, truth: &DMatrix<f64>) -> Result<f64> {
    if estimate.shape() != truth.shape() {
        return Err(Error::Usage(format!(
            "shape mismatch: {:?} vs {:?}",
            estimate.shape(),
            truth.shape()
        )));
    }
    let n = estimate.len().max(1) as f64;
    Ok((estimate - truth).iter().map(|x| x.abs()).sum::<f64>() / n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffRates {
    /// `None` when there are no true differential edges.
    pub tpr: Option<f64>,
    /// `None` when every edge is truly differential.
    pub fpr: Option<f64>,
}

pub fn differential_tpr_fpr(
    estimated: &BTreeSet<(usize, usize)>,
    truth: &BTreeSet<(usize, usize)>,
    all_edges: usize,
) -> Result<DiffRates> {
    if truth.len() > all_edges || estimated.len() > all_edges {
        return Err(Error::Usage("edge sets larger than the universe".into()));
    }
    let hits = estimated.intersection(truth).count();
    let false_pos = estimated.difference(truth).count();
    let negatives = all_edges - truth.len();
    Ok(DiffRates {
        tpr: (!truth.is_empty()).then(|| hits as f64 / truth.len() as f64),
        fpr: (negatives > 0).then(|| false_pos as f64 / negatives as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn concordance(scores: &[f64], truth: &[bool]) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..scores.len() {
            for j in 0..scores.len() {
                if truth[i] && !truth[j] {
                    den += 1.0;
                    if scores[i] > scores[j] {
                        num += 1.0;
                    } else if scores[i] == scores[j] {
                        num += 0.5;
                    }
                }
            }
        }
        num / den
    }

    #[test]
    fn auc_examples() {
        assert_eq!(roc_auc(&[0.9, 0.8, 0.3], &[true, true, false]).unwrap(), Some(1.0));
        assert_eq!(roc_auc(&[0.2, 0.5, 0.8], &[true, false, true]).unwrap(), Some(0.5));
        assert_eq!(roc_auc(&[0.4; 5], &[true, false, true, false, false]).unwrap(), Some(0.5));
        assert_eq!(roc_auc(&[0.1, 0.2], &[true, true]).unwrap(), None);
        assert!(roc_auc(&[0.1], &[true, false]).is_err());
    }

    #[test]
    fn curve_endpoints() {
        let c = roc_curve(&[0.9, 0.8, 0.3, 0.3], &[true, false, true, false]);
        assert_eq!(c.first(), Some(&(0.0, 0.0)));
        assert_eq!(c.last(), Some(&(1.0, 1.0)));
        assert_eq!(c.len(), 4);
    }

    proptest! {
        #[test]
        fn auc_matches_concordance_and_is_rank_invariant(
            raw in proptest::collection::vec((0u8..6, any::<bool>()), 2..80)
        ) {
            let scores: Vec<f64> = raw.iter().map(|r| r.0 as f64 / 5.0).collect();
            let truth: Vec<bool> = raw.iter().map(|r| r.1).collect();
            if let Some(a) = roc_auc(&scores, &truth).unwrap() {
                prop_assert!((a - concordance(&scores, &truth)).abs() <= 1e-12);
                let warped: Vec<f64> = scores.iter().map(|s| (3.0 * s).exp() - 7.0).collect();
                prop_assert_eq!(roc_auc(&warped, &truth).unwrap(), Some(a));
            }
        }
    }

    #[test]
    fn l1_examples() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 1.0]);
        assert_eq!(l1_error(&a, &a).unwrap(), 0.0);
        let b = a.map(|x| x + 0.1);
        assert!((l1_error(&b, &a).unwrap() - 0.1).abs() < 1e-15);
        assert!(l1_error(&a, &DMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn tpr_fpr_examples() {
        let set = |v: &[(usize, usize)]| v.iter().copied().collect::<BTreeSet<_>>();
        let t = set(&[(0, 1), (0, 2)]);
        assert_eq!(
            differential_tpr_fpr(&t, &t, 10).unwrap(),
            DiffRates { tpr: Some(1.0), fpr: Some(0.0) }
        );
        assert_eq!(
            differential_tpr_fpr(&set(&[]), &t, 10).unwrap(),
            DiffRates { tpr: Some(0.0), fpr: Some(0.0) }
        );
        assert_eq!(
            differential_tpr_fpr(&set(&[(0, 1), (1, 2)]), &t, 10).unwrap(),
            DiffRates { tpr: Some(0.5), fpr: Some(0.125) }
        );
        assert_eq!(differential_tpr_fpr(&t, &set(&[]), 10).unwrap().tpr, None);
    }
}
