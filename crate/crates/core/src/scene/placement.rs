use image::{RgbImage, RgbaImage};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::raster::{Rect, SignedRect};

/// Sprite pixels with alpha above this value cover the canvas.
pub const ALPHA_THRESHOLD: u8 = 0;

/// Draws an object center.
///
/// Without a bias point both coordinates are uniform over the canvas. With
/// one, each coordinate is normal around it with standard deviation
/// `bias_strength`, rounded and clamped to the canvas.
pub fn sample_position<R: Rng + ?Sized>(
    rng: &mut R,
    canvas: (u32, u32),
    bias_point: Option<(f64, f64)>,
    bias_strength: f64,
) -> (i64, i64) {
    let (w, h) = canvas;
    match bias_point {
        None => (rng.random_range(0..w) as i64, rng.random_range(0..h) as i64),
        Some((bx, by)) => {
            let (x, y) = if bias_strength > 0.0 {
                let nx = Normal::new(bx, bias_strength).expect("finite positive sigma");
                let ny = Normal::new(by, bias_strength).expect("finite positive sigma");
                (nx.sample(rng), ny.sample(rng))
            } else {
                (bx, by)
            };
            (
                (x.round() as i64).clamp(0, w as i64 - 1),
                (y.round() as i64).clamp(0, h as i64 - 1),
            )
        }
    }
}

/// Top-left corner of a `w` × `h` raster centered at `position`.
pub(crate) fn top_left(position: (i64, i64), w: u32, h: u32) -> (i64, i64) {
    (position.0 - (w / 2) as i64, position.1 - (h / 2) as i64)
}

/// Canvas rectangle covered by `rect` of a raster placed at `origin`.
pub(crate) fn placed_rect(origin: (i64, i64), rect: Rect) -> SignedRect {
    SignedRect {
        x0: origin.0 + rect.x as i64,
        y0: origin.1 + rect.y as i64,
        x1: origin.0 + rect.right() as i64,
        y1: origin.1 + rect.bottom() as i64,
    }
}

/// Pastes an already transformed sprite centered at `position`.
///
/// Every canvas pixel under a sprite pixel with alpha above
/// [`ALPHA_THRESHOLD`] takes the sprite's color; all others are left alone.
/// Returns the tight box of drawn pixels, or `None` when nothing landed on
/// the canvas.
#[allow(clippy::absurd_extreme_comparisons)]
pub fn add_object(canvas: &mut RgbImage, sprite: &RgbaImage, position: (i64, i64)) -> Option<Rect> {
    let (cw, ch) = (canvas.width() as i64, canvas.height() as i64);
    let (ox, oy) = top_left(position, sprite.width(), sprite.height());
    // iterate only over the overlap with the canvas
    let sx0 = (-ox).max(0);
    let sy0 = (-oy).max(0);
    let sx1 = (cw - ox).min(sprite.width() as i64);
    let sy1 = (ch - oy).min(sprite.height() as i64);
    let mut bounds: Option<(i64, i64, i64, i64)> = None;
    for sy in sy0..sy1 {
        for sx in sx0..sx1 {
            let p = sprite.get_pixel(sx as u32, sy as u32);
            if p[3] <= ALPHA_THRESHOLD {
                continue;
            }
            let (x, y) = (ox + sx, oy + sy);
            canvas.put_pixel(x as u32, y as u32, image::Rgb([p[0], p[1], p[2]]));
            bounds = Some(match bounds {
                None => (x, y, x, y),
                Some((a, b, c, d)) => (a.min(x), b.min(y), c.max(x), d.max(y)),
            });
        }
    }
    bounds.map(|(x0, y0, x1, y1)| Rect::new(x0 as u32, y0 as u32, (x1 - x0 + 1) as u32, (y1 - y0 + 1) as u32))
}

/// Source-over alpha blending of `layer` with its top-left at `origin`.
pub fn blend_over(canvas: &mut RgbImage, layer: &RgbaImage, origin: (i64, i64)) {
    let (cw, ch) = (canvas.width() as i64, canvas.height() as i64);
    for (lx, ly, p) in layer.enumerate_pixels() {
        let (x, y) = (origin.0 + lx as i64, origin.1 + ly as i64);
        if p[3] == 0 || x < 0 || y < 0 || x >= cw || y >= ch {
            continue;
        }
        let dst = canvas.get_pixel_mut(x as u32, y as u32);
        let a = p[3] as u32;
        for c in 0..3 {
            dst[c] = ((p[c] as u32 * a + dst[c] as u32 * (255 - a) + 127) / 255) as u8;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::{Rgb, Rgba};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn opaque(w: u32, h: u32) -> RgbaImage {
        RgbaImage::from_pixel(w, h, Rgba([200, 10, 10, 255]))
    }

    /// Brute-force overlay: for every canvas pixel, look up the sprite pixel
    /// under it.
    fn drawn_box_oracle(canvas: (u32, u32), sprite: &RgbaImage, position: (i64, i64)) -> Option<Rect> {
        let ox = position.0 - sprite.width() as i64 / 2;
        let oy = position.1 - sprite.height() as i64 / 2;
        let mut hits = Vec::new();
        for y in 0..canvas.1 as i64 {
            for x in 0..canvas.0 as i64 {
                let (sx, sy) = (x - ox, y - oy);
                if sx >= 0
                    && sy >= 0
                    && sx < sprite.width() as i64
                    && sy < sprite.height() as i64
                    && sprite.get_pixel(sx as u32, sy as u32)[3] > 0
                {
                    hits.push((x, y));
                }
            }
        }
        let x0 = hits.iter().map(|h| h.0).min()?;
        let y0 = hits.iter().map(|h| h.1).min()?;
        let x1 = hits.iter().map(|h| h.0).max()?;
        let y1 = hits.iter().map(|h| h.1).max()?;
        Some(Rect::new(
            x0 as u32,
            y0 as u32,
            (x1 - x0 + 1) as u32,
            (y1 - y0 + 1) as u32,
        ))
    }

    #[test]
    fn centered_placement() {
        let mut canvas = RgbImage::new(100, 100);
        let b = add_object(&mut canvas, &opaque(4, 4), (50, 50)).unwrap();
        assert_eq!(b, Rect::new(48, 48, 4, 4));
    }

    #[test]
    fn half_off_left_edge() {
        let mut canvas = RgbImage::new(100, 100);
        let sprite = opaque(10, 6);
        let b = add_object(&mut canvas, &sprite, (0, 50)).unwrap();
        assert_eq!(b, drawn_box_oracle((100, 100), &sprite, (0, 50)).unwrap());
        assert_eq!(b.x, 0);
        assert_eq!(b.width, 5);
    }

    #[test]
    fn fully_off_canvas() {
        let mut canvas = RgbImage::from_pixel(20, 20, Rgb([1, 2, 3]));
        let before = canvas.clone();
        assert_eq!(add_object(&mut canvas, &opaque(4, 4), (-10, 5)), None);
        assert_eq!(canvas, before);
    }

    #[test]
    fn transparent_pixels_leave_canvas() {
        let mut canvas = RgbImage::from_pixel(10, 10, Rgb([1, 2, 3]));
        let mut sprite = opaque(3, 3);
        sprite.put_pixel(0, 0, Rgba([99, 99, 99, 0]));
        add_object(&mut canvas, &sprite, (5, 5));
        assert_eq!(*canvas.get_pixel(4, 4), Rgb([1, 2, 3]));
        assert_eq!(*canvas.get_pixel(5, 5), Rgb([200, 10, 10]));
    }

    #[test]
    fn random_placements_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let w = rng.random_range(1..12);
            let h = rng.random_range(1..12);
            let sprite = RgbaImage::from_fn(w, h, |_, _| Rgba([5, 5, 5, if rng.random_bool(0.6) { 255 } else { 0 }]));
            let pos = (rng.random_range(-8..40), rng.random_range(-8..40));
            let mut canvas = RgbImage::new(32, 32);
            assert_eq!(
                add_object(&mut canvas, &sprite, pos),
                drawn_box_oracle((32, 32), &sprite, pos)
            );
        }
    }

    #[test]
    fn zero_strength_hits_bias_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            assert_eq!(sample_position(&mut rng, (100, 80), Some((30.0, 60.0)), 0.0), (30, 60));
        }
    }

    #[test]
    fn uniform_mean_near_center() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 10_000;
        let (mut sx, mut sy) = (0.0, 0.0);
        for _ in 0..n {
            let (x, y) = sample_position(&mut rng, (640, 360), None, 0.0);
            assert!((0..640).contains(&x) && (0..360).contains(&y));
            sx += x as f64;
            sy += y as f64;
        }
        let (mx, my) = (sx / n as f64, sy / n as f64);
        assert!((mx - 319.5).abs() < 0.05 * 320.0, "{mx}");
        assert!((my - 179.5).abs() < 0.05 * 180.0, "{my}");
    }

    #[test]
    fn grouped_samples_stay_near_bias_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sigma = 5.0;
        let n = 10_000;
        let within = (0..n)
            .filter(|_| {
                let (x, y) = sample_position(&mut rng, (1000, 1000), Some((500.0, 500.0)), sigma);
                (x as f64 - 500.0).abs() <= 4.0 * sigma && (y as f64 - 500.0).abs() <= 4.0 * sigma
            })
            .count();
        assert!(within as f64 >= 0.99 * n as f64, "{within}");
    }

    #[test]
    fn grouped_samples_are_clamped() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let (x, y) = sample_position(&mut rng, (50, 40), Some((0.0, 39.0)), 200.0);
            assert!((0..50).contains(&x) && (0..40).contains(&y));
        }
    }

    #[test]
    fn blending_extremes() {
        let mut canvas = RgbImage::from_pixel(2, 1, Rgb([100, 100, 100]));
        let mut layer = RgbaImage::new(2, 1);
        layer.put_pixel(0, 0, Rgba([200, 0, 50, 255]));
        layer.put_pixel(1, 0, Rgba([200, 0, 50, 128]));
        blend_over(&mut canvas, &layer, (0, 0));
        assert_eq!(*canvas.get_pixel(0, 0), Rgb([200, 0, 50]));
        assert_eq!(*canvas.get_pixel(1, 0), Rgb([150, 50, 75]));
    }
}
