//! One-to-one assignment of predictions to ground truth.
//!
//! Per class, the bipartite graph joins every prediction and truth with IoU at
//! or above the threshold. [`match_detections`] picks the assignment with the
//! most matched truths and, among those, the largest total IoU. Greedy
//! highest-IoU-first matching ([`match_greedy`]) is kept for comparison; it
//! can match fewer truths when one prediction overlaps two of them.

use std::cmp::Ordering;

use super::{iou, Detection, Truth};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruthOutcome {
    Correct {
        pred: usize,
    },
    /// Unmatched, but overlapped at threshold by another class.
    Wrong,
    Missed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchResult {
    pub truths: Vec<TruthOutcome>,
    /// Index of the matched truth per prediction.
    pub preds: Vec<Option<usize>>,
}

impl MatchResult {
    pub fn matched(&self) -> usize {
        self.preds.iter().filter(|p| p.is_some()).count()
    }
}

/// Maximum-weight assignment on a rectangular matrix of non-negative
/// weights (Hungarian method, O(n³)). Zero-weight cells are never reported
/// as assigned. Returns the assigned column per row.
///
/// Works for any [`Scalar`]; with `Rational64` the intermediate potentials
/// can overflow on large matrices with unrelated denominators.
pub fn assign_max_weight<T: Scalar>(weights: &[Vec<T>]) -> Vec<Option<usize>> {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return vec![None; rows];
    }
    let n = rows.max(cols);
    let cell = |i: usize, j: usize| -> T {
        if i < rows && j < cols {
            weights[i][j]
        } else {
            T::zero()
        }
    };
    let top = weights.iter().flatten().fold(T::zero(), |m, &w| m.max_of(w));
    // minimize top - w on the padded square matrix; indices are 1-based
    let cost = |i: usize, j: usize| top - cell(i - 1, j - 1);
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut min_v: Vec<Option<T>> = vec![None; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta: Option<T> = None;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0] - v[j];
                if min_v[j].is_none_or(|m| cur < m) {
                    min_v[j] = Some(cur);
                    way[j] = j0;
                }
                let m = min_v[j].expect("set above");
                if delta.is_none_or(|d| m < d) {
                    delta = Some(m);
                    j1 = j;
                }
            }
            let delta = delta.expect("an unused column always remains");
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] = u[owner[j]] + delta;
                    v[j] = v[j] - delta;
                } else if let Some(m) = min_v[j] {
                    min_v[j] = Some(m - delta);
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![None; rows];
    for j in 1..=n {
        let i = owner[j];
        if i >= 1 && i <= rows && j <= cols && weights[i - 1][j - 1] > T::zero() {
            out[i - 1] = Some(j - 1);
        }
    }
    out
}

fn classify<T: Scalar>(
    preds: &[Detection<T>],
    truths: &[Truth<T>],
    threshold: T,
    pred_to_truth: Vec<Option<usize>>,
) -> MatchResult {
    let mut truth_outcomes = vec![TruthOutcome::Missed; truths.len()];
    for (p, t) in pred_to_truth.iter().enumerate() {
        if let Some(t) = t {
            truth_outcomes[*t] = TruthOutcome::Correct { pred: p };
        }
    }
    for (t, truth) in truths.iter().enumerate() {
        if truth_outcomes[t] != TruthOutcome::Missed {
            continue;
        }
        let overlapped_by_other = preds
            .iter()
            .any(|p| p.class_id != truth.class_id && iou(&p.bbox, &truth.bbox) >= threshold);
        if overlapped_by_other {
            truth_outcomes[t] = TruthOutcome::Wrong;
        }
    }
    MatchResult {
        truths: truth_outcomes,
        preds: pred_to_truth,
    }
}

/// Optimal one-to-one matching: most matched truths, then largest IoU sum.
pub fn match_detections<T: Scalar>(preds: &[Detection<T>], truths: &[Truth<T>], threshold: T) -> MatchResult {
    let mut pred_to_truth = vec![None; preds.len()];
    let mut classes: Vec<u32> = truths.iter().map(|t| t.class_id).collect();
    classes.sort_unstable();
    classes.dedup();
    for class in classes {
        let p_idx: Vec<usize> = (0..preds.len()).filter(|&i| preds[i].class_id == class).collect();
        let t_idx: Vec<usize> = (0..truths.len()).filter(|&i| truths[i].class_id == class).collect();
        if p_idx.is_empty() {
            continue;
        }
        // every edge outweighs any number of IoU gains, so cardinality wins
        let bonus = T::from_i32(p_idx.len().max(t_idx.len()) as i32 + 1);
        let weights: Vec<Vec<T>> = p_idx
            .iter()
            .map(|&p| {
                t_idx
                    .iter()
                    .map(|&t| {
                        let v = iou(&preds[p].bbox, &truths[t].bbox);
                        if v >= threshold {
                            bonus + v
                        } else {
                            T::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        for (row, col) in assign_max_weight(&weights).into_iter().enumerate() {
            if let Some(col) = col {
                pred_to_truth[p_idx[row]] = Some(t_idx[col]);
            }
        }
    }
    classify(preds, truths, threshold, pred_to_truth)
}

/// Greedy matching: accept same-class pairs at or above the threshold in
/// descending IoU order, ties by descending confidence, then input order.
pub fn match_greedy<T: Scalar>(preds: &[Detection<T>], truths: &[Truth<T>], threshold: T) -> MatchResult {
    let mut candidates = Vec::new();
    for (p, pred) in preds.iter().enumerate() {
        for (t, truth) in truths.iter().enumerate() {
            if pred.class_id != truth.class_id {
                continue;
            }
            let v = iou(&pred.bbox, &truth.bbox);
            if v >= threshold {
                candidates.push((v, p, t));
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(Ordering::Equal)
            .then_with(|| {
                preds[b.1]
                    .confidence
                    .partial_cmp(&preds[a.1].confidence)
                    .unwrap_or(Ordering::Equal)
            })
            .then_with(|| (a.1, a.2).cmp(&(b.1, b.2)))
    });
    let mut pred_to_truth = vec![None; preds.len()];
    let mut taken = vec![false; truths.len()];
    for (_, p, t) in candidates {
        if pred_to_truth[p].is_none() && !taken[t] {
            pred_to_truth[p] = Some(t);
            taken[t] = true;
        }
    }
    classify(preds, truths, threshold, pred_to_truth)
}
