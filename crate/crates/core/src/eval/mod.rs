//! Detection evaluation.
//!
//! The mAP reported here is a per-class recall: the share of ground-truth
//! objects matched one-to-one by a same-class prediction with IoU at or above
//! the threshold (0.5 by default). It is *not* the precision/recall area used
//! by the PASCAL VOC toolkit, and unmatched predictions do not lower it; they
//! are counted separately.
//!
//! Truths that are not matched are `wrong` when a prediction of another
//! class overlaps them at the threshold and `missed` otherwise, so
//! `correct + wrong + missed` always equals the number of truths.

mod files;
mod matching;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::scalar::Scalar;

pub use files::{
    evaluate_dirs, parse_predictions, read_prediction_dir, tracking_from_dir, write_predictions, PredictionRecord,
};
pub use matching::{assign_max_weight, match_detections, match_greedy, MatchResult, TruthOutcome};

pub const DEFAULT_IOU_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no frames to evaluate")]
    EmptyInput,
    #[error("line {line}: malformed prediction line: {reason}")]
    MalformedPrediction { line: usize, reason: String },
    #[error("{path}: {message}")]
    File { path: std::path::PathBuf, message: String },
    #[error(transparent)]
    Label(#[from] crate::labels::LabelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Axis-aligned box in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox<T> {
    pub x_min: T,
    pub y_min: T,
    pub x_max: T,
    pub y_max: T,
}

impl<T: Scalar> BBox<T> {
    /// `None` unless `x_min < x_max` and `y_min < y_max`.
    pub fn new(x_min: T, y_min: T, x_max: T, y_max: T) -> Option<Self> {
        (x_min < x_max && y_min < y_max).then_some(Self {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }

    pub fn area(&self) -> T {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }

    pub fn intersection_area(&self, other: &Self) -> T {
        let w = self.x_max.min_of(other.x_max) - self.x_min.max_of(other.x_min);
        let h = self.y_max.min_of(other.y_max) - self.y_min.max_of(other.y_min);
        if w <= T::zero() || h <= T::zero() {
            T::zero()
        } else {
            w * h
        }
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            x_min: self.x_min * s,
            y_min: self.y_min * s,
            x_max: self.x_max * s,
            y_max: self.y_max * s,
        }
    }
}

/// Intersection over union; 0 for disjoint boxes.
pub fn iou<T: Scalar>(a: &BBox<T>, b: &BBox<T>) -> T {
    let inter = a.intersection_area(b);
    if inter == T::zero() {
        return T::zero();
    }
    inter / (a.area() + b.area() - inter)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection<T> {
    pub class_id: u32,
    pub bbox: BBox<T>,
    pub confidence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truth<T> {
    pub class_id: u32,
    pub bbox: BBox<T>,
}

/// Per-class tallies over any number of images.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    /// Ground-truth occurrences.
    pub total: usize,
    pub correct: usize,
    pub wrong: usize,
    pub missed: usize,
    /// Predictions of this class that matched nothing.
    pub unmatched_predictions: usize,
}

/// Accumulates match outcomes image by image.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    pub classes: BTreeMap<u32, ClassCounts>,
}

impl Tally {
    pub fn add<T: Scalar>(&mut self, preds: &[Detection<T>], truths: &[Truth<T>], result: &MatchResult) {
        for (truth, outcome) in truths.iter().zip(&result.truths) {
            let c = self.classes.entry(truth.class_id).or_default();
            c.total += 1;
            match outcome {
                TruthOutcome::Correct { .. } => c.correct += 1,
                TruthOutcome::Wrong => c.wrong += 1,
                TruthOutcome::Missed => c.missed += 1,
            }
        }
        for (pred, matched) in preds.iter().zip(&result.preds) {
            if matched.is_none() {
                self.classes.entry(pred.class_id).or_default().unmatched_predictions += 1;
            }
        }
    }

    /// Matches one image and records the outcome.
    pub fn add_image<T: Scalar>(&mut self, preds: &[Detection<T>], truths: &[Truth<T>], threshold: T) -> MatchResult {
        let result = match_detections(preds, truths, threshold);
        self.add(preds, truths, &result);
        result
    }

    pub fn merge(&mut self, other: &Tally) {
        for (class, c) in &other.classes {
            let mine = self.classes.entry(*class).or_default();
            mine.total += c.total;
            mine.correct += c.correct;
            mine.wrong += c.wrong;
            mine.missed += c.missed;
            mine.unmatched_predictions += c.unmatched_predictions;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    #[serde(flatten)]
    pub counts: ClassCounts,
    /// `correct / total`.
    pub map: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub iou_threshold: f64,
    /// Classes with at least one ground-truth occurrence.
    pub classes: BTreeMap<u32, ClassReport>,
    /// Predictions whose class never occurs in the ground truth.
    pub unmatched_predictions_other: usize,
    /// Occurrence-weighted mean: `Σ correct / Σ total`. `None` without truths.
    pub overall_map: Option<f64>,
}

impl EvalReport {
    /// Occurrence-weighted mAP over a subset of classes, e.g. all minion
    /// types together.
    pub fn weighted_map(&self, classes: &[u32]) -> Option<f64> {
        let (correct, total) = classes
            .iter()
            .filter_map(|c| self.classes.get(c))
            .fold((0, 0), |(c, t), r| (c + r.counts.correct, t + r.counts.total));
        (total > 0).then(|| correct as f64 / total as f64)
    }

    /// Fixed-width table for terminals.
    pub fn to_table(&self, names: Option<&crate::labels::ClassMap>) -> String {
        let mut out = format!(
            "{:<20} {:>6} {:>8} {:>6} {:>7} {:>9} {:>7}\n",
            "class", "T", "correct", "wrong", "missed", "extra", "mAP"
        );
        for (id, r) in &self.classes {
            let name = names
                .and_then(|n| n.name_of(*id))
                .map(str::to_string)
                .unwrap_or_else(|| id.to_string());
            out.push_str(&format!(
                "{:<20} {:>6} {:>8} {:>6} {:>7} {:>9} {:>7.3}\n",
                name,
                r.counts.total,
                r.counts.correct,
                r.counts.wrong,
                r.counts.missed,
                r.counts.unmatched_predictions,
                r.map
            ));
        }
        match self.overall_map {
            Some(m) => out.push_str(&format!("{:<20} {:>56.3}\n", "weighted", m)),
            None => out.push_str("no ground truth\n"),
        }
        out
    }
}

/// Turns tallies into per-class `correct / total`.
pub fn map_per_class(tally: &Tally, iou_threshold: f64) -> EvalReport {
    let mut classes = BTreeMap::new();
    let mut other = 0;
    let (mut correct, mut total) = (0, 0);
    for (id, c) in &tally.classes {
        if c.total == 0 {
            other += c.unmatched_predictions;
            continue;
        }
        correct += c.correct;
        total += c.total;
        classes.insert(
            *id,
            ClassReport {
                counts: *c,
                map: c.correct as f64 / c.total as f64,
            },
        );
    }
    EvalReport {
        iou_threshold,
        classes,
        unmatched_predictions_other: other,
        overall_map: (total > 0).then(|| correct as f64 / total as f64),
    }
}

/// Share of frames in which the target was detected once, several times or
/// not at all.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrackReport {
    pub frames_total: usize,
    pub pct_single: f64,
    pub pct_multiple: f64,
    pub pct_none: f64,
}

/// Tracking report from per-frame detection counts of the target class.
pub fn tracking_from_counts(counts: &[usize]) -> Result<TrackReport, EvalError> {
    if counts.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let n = counts.len();
    let single = counts.iter().filter(|&&c| c == 1).count();
    let multiple = counts.iter().filter(|&&c| c >= 2).count();
    let none = n - single - multiple;
    let pct = |k: usize| 100.0 * k as f64 / n as f64;
    Ok(TrackReport {
        frames_total: n,
        pct_single: pct(single),
        pct_multiple: pct(multiple),
        pct_none: pct(none),
    })
}

pub fn tracking_report<T>(per_frame: &[Vec<Detection<T>>], target_class: u32) -> Result<TrackReport, EvalError> {
    let counts: Vec<usize> = per_frame
        .iter()
        .map(|frame| frame.iter().filter(|d| d.class_id == target_class).count())
        .collect();
    tracking_from_counts(&counts)
}
