//! Synthetic object-detection datasets from masked sprites.
//!
//! The crate covers the whole data path of a sprite-based detector:
//!
//! * [`sprite`] keys frames recorded on a unicolor background into cropped,
//!   masked sprites and grows or shrinks their outlines.
//! * [`scene`] composes randomized, automatically labeled scenes from sprite
//!   pools and backgrounds (placement, clustering, scale/rotation, UI and
//!   cursor distractors, fog of war, noise and blur).
//! * [`labels`] reads and writes darknet-style label files, converts VOC XML,
//!   renames classes and checks dataset integrity.
//! * [`dataset`] subsamples frame sequences, splits datasets and counts
//!   objects.
//! * [`eval`] scores predictions against ground truth: IoU, one-to-one
//!   matching, per-class recall-style mAP and tracking time.
//! * [`config`] is the single configuration document shared by every stage.
//!
//! Box geometry and matching are generic over the scalar type (see
//! [`scalar::Scalar`]); the aliases below fix the common choices.

pub mod config;
pub mod dataset;
pub mod eval;
pub mod labels;
pub mod raster;
pub mod scalar;
pub mod scene;
pub mod sprite;

pub use num_rational::Rational64;

/// Pixel-space box in double precision, the default for evaluation.
pub type BBox64 = eval::BBox<f64>;
/// Pixel-space box in single precision.
pub type BBox32 = eval::BBox<f32>;
/// Pixel-space box with exact rational coordinates.
pub type BBoxExact = eval::BBox<Rational64>;

pub type Detection64 = eval::Detection<f64>;
pub type Truth64 = eval::Truth<f64>;
