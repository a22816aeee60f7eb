//! Randomized scene composition.
//!
//! A scene is a background with sprites pasted on top. Each object's sprite,
//! position, scale and rotation are drawn at random, the object is resampled
//! and copied over the canvas wherever its mask is set, and a label is
//! appended from the pixels actually drawn. UI and cursor distractors, fog of
//! war, noise and blur are applied afterwards in that order; none of them
//! moves a label.

mod compose;
mod effects;
mod placement;
mod rng;
mod transform;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::Rect;
use crate::sprite::SpriteError;

pub use compose::{
    check_inputs, compose_scene, generate_dataset, load_backgrounds, load_pools, load_sprite_dir, Distractors,
    GenerateSummary, ImageFormat, OutputSpec, Scene,
};
pub use effects::{
    apply_blur, apply_fog_of_war, apply_noise, blur_plane, gaussian_kernel, overlay_ui, FogCorner, FogRegion,
    FOG_DARKENING,
};
pub use placement::{add_object, blend_over, sample_position, ALPHA_THRESHOLD};
pub use rng::{stage_rng, Stage};
pub use transform::{transform_sprite, transformed_size};

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("pool for class {class_id} has no sprites but may place up to {max_count}")]
    EmptyPool { class_id: u32, max_count: u32 },
    #[error("no background images")]
    NoBackgrounds,
    #[error("{0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error(transparent)]
    Sprite(#[from] SpriteError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Resampling filter used when scaling and rotating sprites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMethod {
    Nearest,
    #[default]
    Bilinear,
    Bicubic,
}

/// One source of objects: a sprite directory plus count and transform ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassPool {
    pub class_id: u32,
    pub sprite_dir: PathBuf,
    pub min_count: u32,
    pub max_count: u32,
    /// Unlabeled pools act as distractors and never emit records.
    #[serde(default = "default_true")]
    pub labeled: bool,
    #[serde(default = "default_one")]
    pub base_scale: f64,
    /// Degrees.
    #[serde(default)]
    pub base_rotation: f64,
    #[serde(default)]
    pub max_scale: f64,
    /// Degrees.
    #[serde(default)]
    pub max_rotation: f64,
    /// Place around the scene's bias point when the grouping coin succeeds.
    #[serde(default)]
    pub grouped: bool,
}

fn default_true() -> bool {
    true
}

fn default_one() -> f64 {
    1.0
}

/// Every randomization parameter of dataset generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneConfig {
    pub dataset_size: u32,
    pub seed: u64,
    pub class_pools: Vec<ClassPool>,
    /// Standard deviation, in pixels, of grouped placement.
    #[serde(default)]
    pub bias_strength: f64,
    #[serde(default)]
    pub group_chance: f64,
    #[serde(default)]
    pub overlay_chance: f64,
    #[serde(default)]
    pub fog_of_war_chance: f64,
    /// Maximum per-channel perturbation.
    #[serde(default)]
    pub noise: [u8; 3],
    /// Gaussian sigma in pixels; 0 disables blur.
    #[serde(default)]
    pub blur_strength: f64,
    #[serde(default)]
    pub sampling_method: SamplingMethod,
    #[serde(default = "default_min_visible")]
    pub min_visible_fraction: f64,
    pub output_size: [u32; 2],
}

fn default_min_visible() -> f64 {
    0.25
}

fn probability_ok(p: f64) -> bool {
    (0.0..=1.0).contains(&p)
}

impl SceneConfig {
    /// All invariant violations, each prefixed with its field path.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.dataset_size == 0 {
            out.push("dataset_size: must be positive".to_string());
        }
        if self.output_size[0] == 0 || self.output_size[1] == 0 {
            out.push(format!(
                "output_size: both dimensions must be positive, got {:?}",
                self.output_size
            ));
        }
        for (name, value) in [
            ("group_chance", self.group_chance),
            ("overlay_chance", self.overlay_chance),
            ("fog_of_war_chance", self.fog_of_war_chance),
        ] {
            if !probability_ok(value) {
                out.push(format!("{name}: probability must lie in [0, 1], got {value}"));
            }
        }
        if !(self.bias_strength >= 0.0 && self.bias_strength.is_finite()) {
            out.push(format!(
                "bias_strength: must be a non-negative number, got {}",
                self.bias_strength
            ));
        }
        if !(self.blur_strength >= 0.0 && self.blur_strength.is_finite()) {
            out.push(format!(
                "blur_strength: must be a non-negative number, got {}",
                self.blur_strength
            ));
        }
        if !(self.min_visible_fraction > 0.0 && self.min_visible_fraction <= 1.0) {
            out.push(format!(
                "min_visible_fraction: must lie in (0, 1], got {}",
                self.min_visible_fraction
            ));
        }
        for (i, pool) in self.class_pools.iter().enumerate() {
            let at = format!("class_pools[{i}] (class {})", pool.class_id);
            if pool.min_count > pool.max_count {
                out.push(format!(
                    "{at}: min_count ({}) exceeds max_count ({})",
                    pool.min_count, pool.max_count
                ));
            }
            if !(pool.base_scale > 0.0 && pool.base_scale.is_finite()) {
                out.push(format!("{at}.base_scale: must be positive, got {}", pool.base_scale));
            }
            if !(pool.max_scale >= 0.0 && pool.max_scale.is_finite()) {
                out.push(format!("{at}.max_scale: must be non-negative, got {}", pool.max_scale));
            } else if pool.base_scale - pool.max_scale <= 0.0 {
                out.push(format!(
                    "{at}.max_scale: base_scale - max_scale must stay positive ({} - {})",
                    pool.base_scale, pool.max_scale
                ));
            }
            if !(pool.max_rotation >= 0.0 && pool.max_rotation.is_finite()) {
                out.push(format!(
                    "{at}.max_rotation: must be non-negative, got {}",
                    pool.max_rotation
                ));
            }
            if !pool.base_rotation.is_finite() {
                out.push(format!("{at}.base_rotation: must be finite"));
            }
        }
        out
    }
}

/// An object as it landed on the canvas.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacedObject {
    pub class_id: u32,
    /// Center in canvas pixels.
    pub position: (i64, i64),
    pub scale: f64,
    /// Degrees.
    pub rotation: f64,
    /// Tight box of drawn pixels, inside the canvas.
    pub visible_box: Rect,
    /// Share of the transformed sprite's content box inside the canvas.
    pub visible_fraction: f64,
    pub labeled: bool,
}
