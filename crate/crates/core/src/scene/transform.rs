//! Scale-then-rotate resampling of sprites.

use image::{Rgba, RgbaImage};

use super::SamplingMethod;

const SNAP: f64 = 1e-9;

/// Normalized angle in [0, 360) and its cosine/sine, exact on multiples of
/// 90 degrees.
fn rotation_terms(degrees: f64) -> (f64, f64, f64) {
    let angle = degrees.rem_euclid(360.0);
    let (c, s) = match angle {
        0.0 => (1.0, 0.0),
        90.0 => (0.0, 1.0),
        180.0 => (-1.0, 0.0),
        270.0 => (0.0, -1.0),
        a => {
            let r = a.to_radians();
            (r.cos(), r.sin())
        }
    };
    (angle, c, s)
}

fn ceil_snapped(v: f64) -> u32 {
    let r = v.round();
    let out = if (v - r).abs() < SNAP { r } else { v.ceil() };
    out.max(1.0) as u32
}

/// Output dimensions of [`transform_sprite`] for a `width` × `height` input.
pub fn transformed_size(width: u32, height: u32, scale: f64, rotation: f64) -> (u32, u32) {
    let (_, c, s) = rotation_terms(rotation);
    let sw = scale * width as f64;
    let sh = scale * height as f64;
    (
        ceil_snapped((sw * c).abs() + (sh * s).abs()),
        ceil_snapped((sw * s).abs() + (sh * c).abs()),
    )
}

/// Premultiplied sample; zero outside the raster.
fn fetch(src: &RgbaImage, x: i64, y: i64) -> [f64; 4] {
    if x < 0 || y < 0 || x >= src.width() as i64 || y >= src.height() as i64 {
        return [0.0; 4];
    }
    let p = src.get_pixel(x as u32, y as u32);
    let a = p[3] as f64;
    [p[0] as f64 * a, p[1] as f64 * a, p[2] as f64 * a, a]
}

fn catmull_rom(t: f64) -> f64 {
    let t = t.abs();
    if t < 1.0 {
        1.5 * t * t * t - 2.5 * t * t + 1.0
    } else if t < 2.0 {
        -0.5 * t * t * t + 2.5 * t * t - 4.0 * t + 2.0
    } else {
        0.0
    }
}

fn sample(src: &RgbaImage, sx: f64, sy: f64, method: SamplingMethod) -> [f64; 4] {
    match method {
        SamplingMethod::Nearest => fetch(src, sx.floor() as i64, sy.floor() as i64),
        SamplingMethod::Bilinear => {
            let (u, v) = (sx - 0.5, sy - 0.5);
            let (x0, y0) = (u.floor(), v.floor());
            let (fx, fy) = (u - x0, v - y0);
            let (x0, y0) = (x0 as i64, y0 as i64);
            let mut acc = [0.0; 4];
            for (dx, wx) in [(0, 1.0 - fx), (1, fx)] {
                for (dy, wy) in [(0, 1.0 - fy), (1, fy)] {
                    let w = wx * wy;
                    if w == 0.0 {
                        continue;
                    }
                    let p = fetch(src, x0 + dx, y0 + dy);
                    for c in 0..4 {
                        acc[c] += w * p[c];
                    }
                }
            }
            acc
        }
        SamplingMethod::Bicubic => {
            let (u, v) = (sx - 0.5, sy - 0.5);
            let (x0, y0) = (u.floor(), v.floor());
            let (fx, fy) = (u - x0, v - y0);
            let (x0, y0) = (x0 as i64, y0 as i64);
            let mut acc = [0.0; 4];
            for dy in -1..=2i64 {
                let wy = catmull_rom(dy as f64 - fy);
                if wy == 0.0 {
                    continue;
                }
                for dx in -1..=2i64 {
                    let w = wy * catmull_rom(dx as f64 - fx);
                    if w == 0.0 {
                        continue;
                    }
                    let p = fetch(src, x0 + dx, y0 + dy);
                    for c in 0..4 {
                        acc[c] += w * p[c];
                    }
                }
            }
            acc
        }
    }
}

/// Scales then rotates a sprite about its center.
///
/// Positive angles turn the sprite counter-clockwise as displayed. The
/// output canvas grows to hold the whole rotated content. Color is
/// interpolated premultiplied by alpha, and the resulting alpha is
/// re-binarized: at least 128 becomes 255, anything less becomes 0.
///
/// # Panics
///
/// If `scale` is not positive and finite.
pub fn transform_sprite(src: &RgbaImage, scale: f64, rotation: f64, method: SamplingMethod) -> RgbaImage {
    assert!(scale > 0.0 && scale.is_finite(), "scale must be positive, got {scale}");
    let (angle, c, s) = rotation_terms(rotation);
    if scale == 1.0 && angle == 0.0 {
        return src.clone();
    }
    let (w, h) = (src.width() as f64, src.height() as f64);
    let (out_w, out_h) = transformed_size(src.width(), src.height(), scale, rotation);
    let (half_w, half_h) = (out_w as f64 / 2.0, out_h as f64 / 2.0);

    RgbaImage::from_fn(out_w, out_h, |ox, oy| {
        let dx = ox as f64 + 0.5 - half_w;
        let dy = oy as f64 + 0.5 - half_h;
        // inverse of the counter-clockwise rotation, then of the scale
        let rx = dx * c - dy * s;
        let ry = dx * s + dy * c;
        let sx = rx / scale + w / 2.0;
        let sy = ry / scale + h / 2.0;
        let acc = sample(src, sx, sy, method);
        let alpha = acc[3].clamp(0.0, 255.0);
        if alpha < 128.0 || acc[3] <= 0.0 {
            return Rgba([0, 0, 0, 0]);
        }
        let channel = |i: usize| (acc[i] / acc[3]).round().clamp(0.0, 255.0) as u8;
        Rgba([channel(0), channel(1), channel(2), 255])
    })
}
