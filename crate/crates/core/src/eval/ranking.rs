//! ROC-AUC and Average Precision.

use crate::error::{Error, Result};

/// Mann-Whitney AUC: the probability a positive outranks a negative, ties
/// counting half. Computed through tie-averaged ranks in O(K log K).
pub fn roc_auc(pos_scores: &[f64], neg_scores: &[f64]) -> Result<f64> {
    if pos_scores.is_empty() {
        return Err(Error::EmptyInput("roc_auc: positive scores"));
    }
    if neg_scores.is_empty() {
        return Err(Error::EmptyInput("roc_auc: negative scores"));
    }
    let mut all: Vec<(f64, bool)> = pos_scores
        .iter()
        .map(|&s| (s, true))
        .chain(neg_scores.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut rank_sum_pos = 0.0f64;
    let mut idx = 0usize;
    while idx < all.len() {
        let mut end = idx + 1;
        while end < all.len() && all[end].0 == all[idx].0 {
            end += 1;
        }
        // average 1-based rank over the tie group
        let avg_rank = (idx + 1 + end) as f64 / 2.0;
        for item in &all[idx..end] {
            if item.1 {
                rank_sum_pos += avg_rank;
            }
        }
        idx = end;
    }
    let p = pos_scores.len() as f64;
    let n = neg_scores.len() as f64;
    Ok((rank_sum_pos - p * (p + 1.0) / 2.0) / (p * n))
}

/// Step-wise average precision over the score-descending ranking:
/// `sum_k (R_k - R_{k-1}) P_k`, equal scores grouped into one threshold.
pub fn average_precision(pos_scores: &[f64], neg_scores: &[f64]) -> Result<f64> {
    if pos_scores.is_empty() {
        return Err(Error::EmptyInput("average_precision: positive scores"));
    }
    let mut all: Vec<(f64, bool)> = pos_scores
        .iter()
        .map(|&s| (s, true))
        .chain(neg_scores.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| b.0.total_cmp(&a.0));

    let total_pos = pos_scores.len() as f64;
    let mut tp = 0usize;
    let mut seen = 0usize;
    let mut prev_recall = 0.0f64;
    let mut ap = 0.0f64;
    let mut idx = 0usize;
    while idx < all.len() {
        let mut end = idx + 1;
        while end < all.len() && all[end].0 == all[idx].0 {
            end += 1;
        }
        for item in &all[idx..end] {
            if item.1 {
                tp += 1;
            }
            seen += 1;
        }
        let recall = tp as f64 / total_pos;
        let precision = tp as f64 / seen as f64;
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        idx = end;
    }
    Ok(ap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auc_examples() {
        assert_eq!(roc_auc(&[0.9], &[0.1]).unwrap(), 1.0);
        assert_eq!(roc_auc(&[0.5], &[0.5]).unwrap(), 0.5);
        assert!((roc_auc(&[0.8, 0.4], &[0.6, 0.2]).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn auc_rejects_empty() {
        assert!(roc_auc(&[], &[0.5]).is_err());
        assert!(roc_auc(&[0.5], &[]).is_err());
    }

    #[test]
    fn ap_examples() {
        assert_eq!(average_precision(&[0.9], &[0.1]).unwrap(), 1.0);
        assert!((average_precision(&[0.1], &[0.9]).unwrap() - 0.5).abs() < 1e-15);
        assert!(
            (average_precision(&[0.9, 0.5], &[0.7]).unwrap() - 0.8333333333333333).abs() < 1e-15
        );
    }

    #[test]
    fn ap_rejects_empty_positives() {
        assert!(average_precision(&[], &[0.5]).is_err());
    }

    #[test]
    fn auc_complement_identity_without_ties() {
        let pos = [0.91, 0.4, 0.77, 0.2];
        let neg = [0.5, 0.3, 0.88];
        let a = roc_auc(&pos, &neg).unwrap();
        let b = roc_auc(&neg, &pos).unwrap();
        assert!((a + b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn monotone_transform_invariance() {
        let pos = [0.9, 0.4, 0.6];
        let neg = [0.5, 0.3, 0.6, 0.1];
        let f = |x: f64| (3.0 * x).exp() + 1.0; // strictly increasing
        let tp: Vec<f64> = pos.iter().map(|&x| f(x)).collect();
        let tn: Vec<f64> = neg.iter().map(|&x| f(x)).collect();
        assert!((roc_auc(&pos, &neg).unwrap() - roc_auc(&tp, &tn).unwrap()).abs() < 1e-12);
        assert!(
            (average_precision(&pos, &neg).unwrap() - average_precision(&tp, &tn).unwrap()).abs()
                < 1e-12
        );
    }
}
