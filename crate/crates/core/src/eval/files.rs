//! Prediction files and directory-level evaluation.
//!
//! Prediction lines are
//! `<class_id> <confidence> <x_center> <y_center> <width> <height>`, boxes
//! normalized like label files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{map_per_class, tracking_from_counts, BBox, Detection, EvalError, EvalReport, Tally, TrackReport, Truth};
use crate::labels::{self, LabelFile, LabelRecord};
use crate::raster;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionRecord {
    pub class_id: u32,
    pub confidence: f64,
    pub x_center: f64,
    pub y_center: f64,
    pub width: f64,
    pub height: f64,
}

impl PredictionRecord {
    fn geometry(&self) -> LabelRecord {
        LabelRecord {
            class_id: self.class_id,
            x_center: self.x_center,
            y_center: self.y_center,
            width: self.width,
            height: self.height,
        }
    }

    /// Pixel-space detection, `None` for degenerate boxes.
    pub fn to_detection(&self, image_w: u32, image_h: u32) -> Option<Detection<f64>> {
        let [x0, y0, x1, y1] = self.geometry().to_pixel_corners(image_w, image_h);
        BBox::new(x0, y0, x1, y1).map(|bbox| Detection {
            class_id: self.class_id,
            bbox,
            confidence: self.confidence,
        })
    }
}

pub fn write_predictions(records: &[PredictionRecord]) -> String {
    let mut out = String::new();
    for r in records {
        writeln!(
            out,
            "{} {:.6} {:.6} {:.6} {:.6} {:.6}",
            r.class_id, r.confidence, r.x_center, r.y_center, r.width, r.height
        )
        .expect("writing to a String cannot fail");
    }
    out
}

pub fn parse_predictions(text: &str) -> Result<Vec<PredictionRecord>, EvalError> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let malformed = |reason: String| EvalError::MalformedPrediction { line: line_no, reason };
        if fields.len() != 6 {
            return Err(malformed(format!("expected 6 fields, found {}", fields.len())));
        }
        let class_id = fields[0]
            .parse::<u32>()
            .map_err(|_| malformed(format!("class id {:?} is not a non-negative integer", fields[0])))?;
        let mut v = [0.0f64; 5];
        for (slot, f) in v.iter_mut().zip(&fields[1..]) {
            *slot = f.parse().map_err(|_| malformed(format!("{f:?} is not a number")))?;
        }
        if !(0.0..=1.0).contains(&v[0]) {
            return Err(malformed(format!("confidence {} outside [0, 1]", v[0])));
        }
        let record = PredictionRecord {
            class_id,
            confidence: v[0],
            x_center: v[1],
            y_center: v[2],
            width: v[3],
            height: v[4],
        };
        if !record.geometry().is_valid() {
            return Err(malformed("box outside the unit square".into()));
        }
        out.push(record);
    }
    Ok(out)
}

fn read_predictions(path: &Path) -> Result<Vec<PredictionRecord>, EvalError> {
    let text = std::fs::read_to_string(path)?;
    parse_predictions(&text).map_err(|e| EvalError::File {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Prediction files in `dir`, sorted by stem.
pub fn read_prediction_dir(dir: &Path) -> Result<BTreeMap<String, Vec<PredictionRecord>>, EvalError> {
    labels::list_label_files(dir)?
        .into_iter()
        .map(|(stem, path)| Ok((stem, read_predictions(&path)?)))
        .collect()
}

/// Scores a prediction directory against ground truth.
///
/// `gt_dir` holds label files; each image's size comes from the image file
/// beside its label, or from `image_size` when given. Images without a
/// prediction file count as having no detections.
pub fn evaluate_dirs(
    gt_dir: &Path,
    pred_dir: &Path,
    image_size: Option<(u32, u32)>,
    iou_threshold: f64,
) -> Result<EvalReport, EvalError> {
    let truths = labels::list_label_files(gt_dir)?;
    let images: BTreeMap<String, std::path::PathBuf> = raster::list_images(gt_dir)?
        .into_iter()
        .map(|p| (raster::file_stem(&p), p))
        .collect();
    let predictions = read_prediction_dir(pred_dir)?;

    let mut tally = Tally::default();
    for (stem, label_path) in &truths {
        let (w, h) = match image_size {
            Some(size) => size,
            None => {
                let image = images.get(stem).ok_or_else(|| EvalError::File {
                    path: label_path.clone(),
                    message: "no image beside the label to read its size from".into(),
                })?;
                image::image_dimensions(image).map_err(|e| EvalError::File {
                    path: image.clone(),
                    message: e.to_string(),
                })?
            }
        };
        let gt = LabelFile::read(label_path)?;
        let truth_boxes: Vec<Truth<f64>> = gt
            .records
            .iter()
            .filter_map(|r| {
                let [x0, y0, x1, y1] = r.to_pixel_corners(w, h);
                BBox::new(x0, y0, x1, y1).map(|bbox| Truth {
                    class_id: r.class_id,
                    bbox,
                })
            })
            .collect();
        let preds: Vec<Detection<f64>> = predictions
            .get(stem)
            .map(|p| p.iter().filter_map(|r| r.to_detection(w, h)).collect())
            .unwrap_or_default();
        tally.add_image(&preds, &truth_boxes, iou_threshold);
    }
    Ok(map_per_class(&tally, iou_threshold))
}

/// Tracking report over the prediction files of a frame sequence, in stem
/// order.
pub fn tracking_from_dir(pred_dir: &Path, target_class: u32) -> Result<TrackReport, EvalError> {
    let frames = read_prediction_dir(pred_dir)?;
    let counts: Vec<usize> = frames
        .values()
        .map(|records| records.iter().filter(|r| r.class_id == target_class).count())
        .collect();
    tracking_from_counts(&counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prediction_format() {
        let r = PredictionRecord {
            class_id: 4,
            confidence: 0.875,
            x_center: 0.5,
            y_center: 0.25,
            width: 0.1,
            height: 0.2,
        };
        let text = write_predictions(&[r]);
        assert_eq!(text, "4 0.875000 0.500000 0.250000 0.100000 0.200000\n");
        assert_eq!(parse_predictions(&text).unwrap(), vec![r]);
        assert!(parse_predictions("4 0.5 0.5 0.5 0.1").is_err());
        assert!(parse_predictions("4 1.5 0.5 0.5 0.1 0.1").is_err());
        assert!(parse_predictions("4 0.5 0.99 0.5 0.1 0.1").is_err());
    }

    #[test]
    fn directory_evaluation() {
        let gt = tempfile::tempdir().unwrap();
        let pred = tempfile::tempdir().unwrap();
        image::RgbImage::new(100, 100).save(gt.path().join("a.png")).unwrap();
        image::RgbImage::new(100, 100).save(gt.path().join("b.png")).unwrap();
        std::fs::write(
            gt.path().join("a.txt"),
            "0 0.200000 0.200000 0.100000 0.100000\n0 0.700000 0.700000 0.200000 0.200000\n",
        )
        .unwrap();
        std::fs::write(gt.path().join("b.txt"), "1 0.500000 0.500000 0.400000 0.400000\n").unwrap();
        // a: one hit, one miss; b: no prediction file at all
        std::fs::write(
            pred.path().join("a.txt"),
            "0 0.900000 0.200000 0.200000 0.100000 0.100000\n",
        )
        .unwrap();
        let report = evaluate_dirs(gt.path(), pred.path(), None, 0.5).unwrap();
        assert_eq!(report.classes[&0].map, 0.5);
        assert_eq!(report.classes[&1].counts.missed, 1);
        assert_eq!(report.overall_map, Some(1.0 / 3.0));
    }

    #[test]
    fn directory_tracking() {
        let pred = tempfile::tempdir().unwrap();
        let line = "2 0.900000 0.500000 0.500000 0.100000 0.100000\n";
        for (i, n) in [1usize, 1, 0, 2].iter().enumerate() {
            std::fs::write(pred.path().join(format!("frame_{i:04}.txt")), line.repeat(*n)).unwrap();
        }
        let r = tracking_from_dir(pred.path(), 2).unwrap();
        assert_eq!((r.pct_single, r.pct_multiple, r.pct_none), (50.0, 25.0, 25.0));
    }
}
