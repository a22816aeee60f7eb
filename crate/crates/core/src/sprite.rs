//! Chroma-key sprite extraction and outline manipulation.
//!
//! Frames recorded in front of a unicolor background are keyed into a binary
//! alpha mask, optionally eroded to strip fringe pixels, and cropped to their
//! visible content. The crop's dimensions later become the object's box.

use std::path::{Path, PathBuf};

use image::{RgbImage, Rgba, RgbaImage};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::{self, Rect};

#[derive(Debug, Error)]
pub enum SpriteError {
    #[error("key area {area:?} exceeds the {width}x{height} frame")]
    AreaOutOfBounds { area: Rect, width: u32, height: u32 },
    #[error("raster has no pixel with nonzero alpha")]
    EmptyContent,
    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parameters of the chroma-key pass.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyParams {
    pub background_color: [u8; 3],
    /// Maximum absolute difference per channel still counted as background.
    pub tolerance: [u8; 3],
    /// Only this part of the frame may hold content; the rest is cleared.
    #[serde(default)]
    pub area: Option<Rect>,
    /// Number of erosion passes applied after keying.
    #[serde(default)]
    pub remove_outline: u32,
}

impl Default for KeyParams {
    fn default() -> Self {
        Self {
            background_color: [0, 255, 0],
            tolerance: [10, 10, 10],
            area: None,
            remove_outline: 0,
        }
    }
}

/// A cropped, masked object image with its class.
#[derive(Debug, Clone, PartialEq)]
pub struct Sprite {
    pixels: RgbaImage,
    class_id: u32,
    content_box: Rect,
}

impl Sprite {
    /// Wraps a raster, computing its content box. Fails on fully transparent
    /// input.
    pub fn new(pixels: RgbaImage, class_id: u32) -> Result<Self, SpriteError> {
        let content_box = raster::alpha_bounds(&pixels).ok_or(SpriteError::EmptyContent)?;
        Ok(Self {
            pixels,
            class_id,
            content_box,
        })
    }

    pub fn load(path: &Path, class_id: u32) -> Result<Self, SpriteError> {
        let pixels = raster::load_rgba(path).map_err(|source| SpriteError::Image {
            path: path.to_path_buf(),
            source,
        })?;
        Self::new(pixels, class_id)
    }

    pub fn pixels(&self) -> &RgbaImage {
        &self.pixels
    }

    pub fn class_id(&self) -> u32 {
        self.class_id
    }

    pub fn content_box(&self) -> Rect {
        self.content_box
    }

    pub fn width(&self) -> u32 {
        self.pixels.width()
    }

    pub fn height(&self) -> u32 {
        self.pixels.height()
    }
}

fn matches_background(px: &[u8], params: &KeyParams) -> bool {
    (0..3).all(|c| px[c].abs_diff(params.background_color[c]) <= params.tolerance[c])
}

/// Makes every background-colored pixel transparent.
///
/// Alpha is binary: 0 where all three channels are within tolerance of the
/// background (or outside the key area), 255 elsewhere.
pub fn chroma_key_mask(frame: &RgbImage, params: &KeyParams) -> Result<RgbaImage, SpriteError> {
    let (width, height) = frame.dimensions();
    if let Some(area) = params.area {
        if !area.fits_in(width, height) {
            return Err(SpriteError::AreaOutOfBounds { area, width, height });
        }
    }
    let mut out = RgbaImage::new(width, height);
    for (x, y, px) in frame.enumerate_pixels() {
        let inside = params.area.is_none_or(|a| a.contains(x, y));
        let alpha = if inside && !matches_background(&px.0, params) {
            255
        } else {
            0
        };
        out.put_pixel(x, y, Rgba([px[0], px[1], px[2], alpha]));
    }
    Ok(out)
}

/// Crops to the minimal rectangle holding every pixel with alpha > 0.
/// Returns the crop and its top-left offset in the input.
pub fn crop_to_content(raster: &RgbaImage) -> Result<(RgbaImage, (u32, u32)), SpriteError> {
    let bounds = raster::alpha_bounds(raster).ok_or(SpriteError::EmptyContent)?;
    let cropped = image::imageops::crop_imm(raster, bounds.x, bounds.y, bounds.width, bounds.height).to_image();
    Ok((cropped, (bounds.x, bounds.y)))
}

fn opaque_at(raster: &RgbaImage, x: i64, y: i64) -> bool {
    x >= 0
        && y >= 0
        && (x as u32) < raster.width()
        && (y as u32) < raster.height()
        && raster.get_pixel(x as u32, y as u32)[3] > 0
}

const NEIGHBORS: [(i64, i64); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

/// Strips `layers` boundary rings from the alpha mask (4-neighborhood).
/// Pixels outside the raster count as transparent. Colors are untouched.
pub fn erode_outline(raster: &RgbaImage, layers: u32) -> RgbaImage {
    let mut current = raster.clone();
    for _ in 0..layers {
        let prev = current.clone();
        for (x, y, px) in current.enumerate_pixels_mut() {
            if px[3] == 0 {
                continue;
            }
            let keep = NEIGHBORS
                .iter()
                .all(|(dx, dy)| opaque_at(&prev, x as i64 + dx, y as i64 + dy));
            if !keep {
                px[3] = 0;
            }
        }
    }
    current
}

/// Grows the mask by `layers` rings of `color` (4-neighborhood).
///
/// The raster is padded by `layers` on every side first, so the result is
/// `(w + 2·layers) × (h + 2·layers)`.
pub fn dilate_outline(raster: &RgbaImage, layers: u32, color: Rgba<u8>) -> RgbaImage {
    if layers == 0 {
        return raster.clone();
    }
    let pad = layers;
    let mut current = RgbaImage::new(raster.width() + 2 * pad, raster.height() + 2 * pad);
    image::imageops::replace(&mut current, raster, pad as i64, pad as i64);
    for _ in 0..layers {
        let prev = current.clone();
        for (x, y, px) in current.enumerate_pixels_mut() {
            if px[3] > 0 {
                continue;
            }
            let touches = NEIGHBORS
                .iter()
                .any(|(dx, dy)| opaque_at(&prev, x as i64 + dx, y as i64 + dy));
            if touches {
                *px = color;
            }
        }
    }
    current
}

/// Key, erode and crop one frame. `None` when nothing survives.
pub fn extract_sprite(frame: &RgbImage, params: &KeyParams) -> Result<Option<RgbaImage>, SpriteError> {
    let mask = chroma_key_mask(frame, params)?;
    let eroded = erode_outline(&mask, params.remove_outline);
    match crop_to_content(&eroded) {
        Ok((crop, _)) => Ok(Some(crop)),
        Err(SpriteError::EmptyContent) => Ok(None),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtractSummary {
    pub written: usize,
    /// Source names of frames whose mask came out empty.
    pub skipped: Vec<String>,
}

/// Output file name for a sprite extracted from `source_stem`.
pub fn sprite_file_name(prefix: &str, class_id: u32, source_stem: &str) -> String {
    format!("{prefix}{class_id}_{source_stem}.png")
}

/// Batch driver: keys every image in `input_dir` and writes the sprites as
/// PNGs into `output_dir`. Empty frames are skipped with a warning.
pub fn extract_sprites(
    input_dir: &Path,
    params: &KeyParams,
    class_id: u32,
    output_dir: &Path,
    prefix: &str,
) -> Result<ExtractSummary, SpriteError> {
    let frames = raster::list_images(input_dir)?;
    std::fs::create_dir_all(output_dir)?;

    let results: Vec<Result<Option<String>, SpriteError>> = frames
        .par_iter()
        .map(|path| {
            let frame = raster::load_rgb(path).map_err(|source| SpriteError::Image {
                path: path.clone(),
                source,
            })?;
            let stem = raster::file_stem(path);
            match extract_sprite(&frame, params)? {
                Some(sprite) => {
                    let out = output_dir.join(sprite_file_name(prefix, class_id, &stem));
                    raster::save_png_rgba(&sprite, &out).map_err(|source| SpriteError::Image { path: out, source })?;
                    Ok(None)
                }
                None => Ok(Some(stem)),
            }
        })
        .collect();

    let mut summary = ExtractSummary::default();
    for result in results {
        match result? {
            None => summary.written += 1,
            Some(stem) => summary.skipped.push(stem),
        }
    }
    if !summary.skipped.is_empty() {
        log::warn!(
            "skipped {} frame(s) with empty mask: {}",
            summary.skipped.len(),
            summary.skipped.join(", ")
        );
    }
    Ok(summary)
}
