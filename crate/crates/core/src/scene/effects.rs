//! Whole-image effects applied after object placement.

use image::{RgbImage, RgbaImage};
use rand::Rng;
use rayon::prelude::*;

use super::placement::{add_object, blend_over, sample_position};
use crate::sprite::Sprite;

/// Brightness factor outside the visible region of the fog of war.
pub const FOG_DARKENING: f64 = 0.45;

/// Adds independent uniform integer noise in `[-noise_c, +noise_c]` to every
/// channel of every pixel, clamping to 0..=255.
pub fn apply_noise<R: Rng + ?Sized>(image: &mut RgbImage, noise: [u8; 3], rng: &mut R) {
    if noise == [0, 0, 0] {
        return;
    }
    let spans = noise.map(|n| n as i16);
    for px in image.pixels_mut() {
        for c in 0..3 {
            let n = spans[c];
            if n == 0 {
                continue;
            }
            let delta = rng.random_range(-n..=n);
            px[c] = (px[c] as i16 + delta).clamp(0, 255) as u8;
        }
    }
}

/// Normalized 1-D Gaussian taps, radius `ceil(3·sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f32> {
    let radius = (3.0 * sigma).ceil() as i64;
    let denom = 2.0 * sigma * sigma;
    let raw: Vec<f64> = (-radius..=radius).map(|i| (-((i * i) as f64) / denom).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| (w / total) as f32).collect()
}

/// Separable convolution of an interleaved `channels`-plane buffer with
/// edge clamping.
pub fn blur_plane(data: &[f32], width: usize, height: usize, channels: usize, kernel: &[f32]) -> Vec<f32> {
    let radius = (kernel.len() / 2) as i64;
    let row_len = width * channels;
    let mut horizontal = vec![0.0f32; data.len()];
    horizontal
        .par_chunks_mut(row_len)
        .zip(data.par_chunks(row_len))
        .for_each(|(out, row)| {
            for x in 0..width {
                for c in 0..channels {
                    let mut acc = 0.0f32;
                    for (k, w) in kernel.iter().enumerate() {
                        let sx = (x as i64 + k as i64 - radius).clamp(0, width as i64 - 1) as usize;
                        acc += w * row[sx * channels + c];
                    }
                    out[x * channels + c] = acc;
                }
            }
        });
    let mut vertical = vec![0.0f32; data.len()];
    vertical.par_chunks_mut(row_len).enumerate().for_each(|(y, out)| {
        for (k, w) in kernel.iter().enumerate() {
            let sy = (y as i64 + k as i64 - radius).clamp(0, height as i64 - 1) as usize;
            let src = &horizontal[sy * row_len..(sy + 1) * row_len];
            for (o, s) in out.iter_mut().zip(src) {
                *o += w * s;
            }
        }
    });
    vertical
}

/// Gaussian blur with standard deviation `sigma`; 0 returns the input.
pub fn apply_blur(image: &RgbImage, sigma: f64) -> RgbImage {
    if sigma <= 0.0 {
        return image.clone();
    }
    let kernel = gaussian_kernel(sigma);
    let data: Vec<f32> = image.as_raw().iter().map(|&v| v as f32).collect();
    let out = blur_plane(&data, image.width() as usize, image.height() as usize, 3, &kernel);
    let bytes = out.iter().map(|v| v.round().clamp(0.0, 255.0) as u8).collect();
    RgbImage::from_raw(image.width(), image.height(), bytes).expect("same dimensions")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FogCorner {
    TopLeft,
    TopRight,
    BottomLeft,
    BottomRight,
}

/// Visible region of the fog of war: an ellipse centered on a canvas corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FogRegion {
    pub corner: FogCorner,
    pub semi_axis_x: f64,
    pub semi_axis_y: f64,
}

impl FogRegion {
    /// Semi-axes uniform in [1/4, 3/4] of the canvas width and height.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, width: u32, height: u32) -> Self {
        let corner = match rng.random_range(0..4) {
            0 => FogCorner::TopLeft,
            1 => FogCorner::TopRight,
            2 => FogCorner::BottomLeft,
            _ => FogCorner::BottomRight,
        };
        let (w, h) = (width as f64, height as f64);
        Self {
            corner,
            semi_axis_x: rng.random_range(0.25 * w..=0.75 * w),
            semi_axis_y: rng.random_range(0.25 * h..=0.75 * h),
        }
    }

    pub fn contains(&self, x: u32, y: u32, width: u32, height: u32) -> bool {
        let (cx, cy) = match self.corner {
            FogCorner::TopLeft => (0.0, 0.0),
            FogCorner::TopRight => (width as f64, 0.0),
            FogCorner::BottomLeft => (0.0, height as f64),
            FogCorner::BottomRight => (width as f64, height as f64),
        };
        let dx = (x as f64 + 0.5 - cx) / self.semi_axis_x;
        let dy = (y as f64 + 0.5 - cy) / self.semi_axis_y;
        dx * dx + dy * dy <= 1.0
    }

    pub fn apply(&self, image: &mut RgbImage) {
        let (w, h) = image.dimensions();
        for (x, y, px) in image.enumerate_pixels_mut() {
            if !self.contains(x, y, w, h) {
                for c in 0..3 {
                    px[c] = (px[c] as f64 * FOG_DARKENING).round() as u8;
                }
            }
        }
    }
}

/// Darkens everything outside a random corner ellipse.
pub fn apply_fog_of_war<R: Rng + ?Sized>(image: &mut RgbImage, rng: &mut R) -> FogRegion {
    let region = FogRegion::sample(rng, image.width(), image.height());
    region.apply(image);
    region
}

/// Adds unlabeled distractors.
///
/// With probability `overlay_chance` one UI sprite is blended bottom-aligned
/// and horizontally centered. Then between `cursor_counts.0` and
/// `cursor_counts.1` cursors are pasted at uniform positions. The chance and
/// count draws happen even when nothing is placed, so the stream advances the
/// same way for every configuration of the same shape.
pub fn overlay_ui<R: Rng + ?Sized>(
    image: &mut RgbImage,
    ui_sprites: &[Sprite],
    cursor_sprites: &[Sprite],
    rng: &mut R,
    overlay_chance: f64,
    cursor_counts: (u32, u32),
) {
    let (w, h) = image.dimensions();
    let coin: f64 = rng.random();
    if coin < overlay_chance && !ui_sprites.is_empty() {
        let ui: &RgbaImage = ui_sprites[rng.random_range(0..ui_sprites.len())].pixels();
        let origin = ((w as i64 - ui.width() as i64) / 2, h as i64 - ui.height() as i64);
        blend_over(image, ui, origin);
    }
    let (lo, hi) = cursor_counts;
    let count = rng.random_range(lo..=hi.max(lo));
    if cursor_sprites.is_empty() {
        return;
    }
    for _ in 0..count {
        let cursor = &cursor_sprites[rng.random_range(0..cursor_sprites.len())];
        let position = sample_position(rng, (w, h), None, 0.0);
        add_object(image, cursor.pixels(), position);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::{Rgb, Rgba};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn textured(w: u32, h: u32) -> RgbImage {
        RgbImage::from_fn(w, h, |x, y| Rgb([(x * 7 % 256) as u8, (y * 13 % 256) as u8, 250]))
    }

    #[test]
    fn zero_noise_is_identity() {
        let mut img = textured(16, 9);
        let before = img.clone();
        apply_noise(&mut img, [0, 0, 0], &mut rng(1));
        assert_eq!(img, before);
    }

    #[test]
    fn noise_is_bounded_and_clamped() {
        let mut img = RgbImage::from_pixel(64, 64, Rgb([250, 5, 128]));
        apply_noise(&mut img, [20, 20, 0], &mut rng(2));
        for p in img.pixels() {
            assert!((230..=255).contains(&p[0]));
            assert!(p[1] <= 25);
            assert_eq!(p[2], 128);
        }
        // the clamp must actually be exercised
        assert!(img.pixels().any(|p| p[0] == 255));
    }

    #[test]
    fn noise_is_seeded() {
        let mut a = textured(32, 32);
        let mut b = a.clone();
        apply_noise(&mut a, [9, 9, 9], &mut rng(3));
        apply_noise(&mut b, [9, 9, 9], &mut rng(3));
        assert_eq!(a, b);
    }

    #[test]
    fn kernel_shape() {
        let k = gaussian_kernel(1.0);
        assert_eq!(k.len(), 7);
        let sum: f32 = k.iter().sum();
        assert!((sum - 1.0).abs() < 1e-6);
        assert!(k[3] > k[2] && k[2] > k[1] && k[1] > k[0]);
        assert_eq!(k[0], k[6]);
        assert_eq!(gaussian_kernel(0.4).len(), 5);
    }

    #[test]
    fn zero_sigma_is_identity() {
        let img = textured(10, 10);
        assert_eq!(apply_blur(&img, 0.0), img);
    }

    #[test]
    fn constant_image_is_unchanged() {
        let img = RgbImage::from_pixel(20, 12, Rgb([17, 200, 96]));
        assert_eq!(apply_blur(&img, 2.5), img);
    }

    #[test]
    fn impulse_response_conserves_intensity() {
        // float planes: the normalized kernel must not gain or lose mass
        for sigma in [0.5, 1.0, 2.0, 3.5] {
            let (w, h) = (41, 41);
            let mut data = vec![0.0f32; w * h];
            data[20 * w + 20] = 255.0;
            let out = blur_plane(&data, w, h, 1, &gaussian_kernel(sigma));
            let total: f32 = out.iter().sum();
            assert!((total - 255.0).abs() <= 0.01 * 255.0, "sigma {sigma}: {total}");
        }
        // 8-bit output loses the rounded-away tails only
        let mut img = RgbImage::new(21, 21);
        img.put_pixel(10, 10, Rgb([255, 255, 255]));
        let out = apply_blur(&img, 0.5);
        let total: u32 = out.pixels().map(|p| p[0] as u32).sum();
        assert!((total as f64 - 255.0).abs() <= 0.01 * 255.0, "{total}");
    }

    #[test]
    fn blur_matches_direct_2d_convolution() {
        let img = textured(9, 7);
        let sigma = 1.2;
        let k = gaussian_kernel(sigma);
        let r = (k.len() / 2) as i64;
        let out = apply_blur(&img, sigma);
        for y in 0..7i64 {
            for x in 0..9i64 {
                for c in 0..3 {
                    let mut acc = 0.0f64;
                    for (j, wy) in k.iter().enumerate() {
                        for (i, wx) in k.iter().enumerate() {
                            let sx = (x + i as i64 - r).clamp(0, 8) as u32;
                            let sy = (y + j as i64 - r).clamp(0, 6) as u32;
                            acc += (*wx as f64) * (*wy as f64) * img.get_pixel(sx, sy)[c] as f64;
                        }
                    }
                    let got = out.get_pixel(x as u32, y as u32)[c] as f64;
                    assert!((got - acc).abs() <= 1.0, "({x},{y},{c}) {got} vs {acc}");
                }
            }
        }
    }

    #[test]
    fn fog_darkens_outside_only() {
        let mut img = RgbImage::from_pixel(80, 60, Rgb([200, 200, 200]));
        let region = apply_fog_of_war(&mut img, &mut rng(4));
        let mut inside = 0;
        let mut outside = 0;
        for (x, y, p) in img.enumerate_pixels() {
            if region.contains(x, y, 80, 60) {
                assert_eq!(*p, Rgb([200, 200, 200]));
                inside += 1;
            } else {
                assert_eq!(*p, Rgb([90, 90, 90]));
                outside += 1;
            }
        }
        assert!(inside > 0 && outside > 0);
        assert!((20.0..=60.0).contains(&region.semi_axis_x));
        assert!((15.0..=45.0).contains(&region.semi_axis_y));
    }

    #[test]
    fn fog_is_seeded() {
        let a = FogRegion::sample(&mut rng(8), 300, 200);
        let b = FogRegion::sample(&mut rng(8), 300, 200);
        assert_eq!(a, b);
    }

    fn ui_sprite() -> Sprite {
        Sprite::new(RgbaImage::from_pixel(20, 6, Rgba([0, 0, 255, 255])), 0).unwrap()
    }

    #[test]
    fn overlay_probability_extremes() {
        let base = RgbImage::from_pixel(40, 30, Rgb([10, 10, 10]));
        let mut never = base.clone();
        overlay_ui(&mut never, &[ui_sprite()], &[], &mut rng(1), 0.0, (0, 0));
        assert_eq!(never, base);

        for seed in 0..10 {
            let mut always = base.clone();
            overlay_ui(&mut always, &[ui_sprite()], &[], &mut rng(seed), 1.0, (0, 0));
            // bottom-aligned, horizontally centered
            assert_eq!(*always.get_pixel(10, 29), Rgb([0, 0, 255]));
            assert_eq!(*always.get_pixel(29, 24), Rgb([0, 0, 255]));
            assert_eq!(*always.get_pixel(9, 29), Rgb([10, 10, 10]));
            assert_eq!(*always.get_pixel(10, 23), Rgb([10, 10, 10]));
        }
    }

    #[test]
    fn cursors_are_placed() {
        let base = RgbImage::from_pixel(40, 30, Rgb([10, 10, 10]));
        let cursor = Sprite::new(RgbaImage::from_pixel(3, 3, Rgba([255, 255, 255, 255])), 0).unwrap();
        let mut img = base.clone();
        overlay_ui(&mut img, &[], &[cursor], &mut rng(6), 0.0, (2, 2));
        assert_ne!(img, base);
    }
}
