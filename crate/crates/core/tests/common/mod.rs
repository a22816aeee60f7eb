#![allow(dead_code)]

use std::path::{Path, PathBuf};

use image::{Rgb, RgbImage, Rgba, RgbaImage};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use synthscene::scene::{ClassPool, SamplingMethod, SceneConfig};
use synthscene::sprite::Sprite;

/// Background channels stay at or below this value.
pub const BG_MAX: u8 = 100;
/// Sprite channels stay at or above this value.
pub const SPRITE_MIN: u8 = 150;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Opaque blob (ellipse, rectangle or triangle) on a transparent raster.
pub fn random_sprite_pixels(rng: &mut impl Rng, max_side: u32) -> RgbaImage {
    let w = rng.random_range(8..=max_side);
    let h = rng.random_range(8..=max_side);
    let shape = rng.random_range(0..3);
    let base = [
        rng.random_range(SPRITE_MIN..=255),
        rng.random_range(SPRITE_MIN..=255),
        rng.random_range(SPRITE_MIN..=255),
    ];
    RgbaImage::from_fn(w, h, |x, y| {
        let (u, v) = ((x as f64 + 0.5) / w as f64, (y as f64 + 0.5) / h as f64);
        let inside = match shape {
            0 => (u - 0.5).powi(2) + (v - 0.5).powi(2) <= 0.25,
            1 => true,
            _ => u >= v / 2.0 && u <= 1.0 - v / 2.0,
        };
        if inside {
            let shade = ((x + y) % 40) as u8;
            Rgba([base[0].saturating_sub(shade).max(SPRITE_MIN), base[1], base[2], 255])
        } else {
            Rgba([0, 0, 0, 0])
        }
    })
}

pub fn random_sprites(seed: u64, class_id: u32, n: usize, max_side: u32) -> Vec<Sprite> {
    let mut rng = rng(seed);
    (0..n)
        .map(|_| Sprite::new(random_sprite_pixels(&mut rng, max_side), class_id).unwrap())
        .collect()
}

pub fn random_background(seed: u64, w: u32, h: u32) -> RgbImage {
    let mut rng = rng(seed);
    let tint: [u8; 3] = [
        rng.random_range(0..40),
        rng.random_range(0..40),
        rng.random_range(0..40),
    ];
    RgbImage::from_fn(w, h, |x, y| {
        let wave = (((x / 16 + y / 16) % 7) * 8) as u8;
        Rgb([tint[0] + wave, tint[1] + wave / 2, tint[2] + (x % 5) as u8 * 4])
    })
}

pub fn write_sprites(dir: &Path, sprites: &[Sprite]) {
    std::fs::create_dir_all(dir).unwrap();
    for (i, s) in sprites.iter().enumerate() {
        s.pixels().save(dir.join(format!("s{i:03}.png"))).unwrap();
    }
}

pub fn pool(class_id: u32, sprite_dir: PathBuf, min_count: u32, max_count: u32) -> ClassPool {
    ClassPool {
        class_id,
        sprite_dir,
        min_count,
        max_count,
        labeled: true,
        base_scale: 1.0,
        base_rotation: 0.0,
        max_scale: 0.3,
        max_rotation: 20.0,
        grouped: true,
    }
}

/// Every effect switched on.
pub fn busy_config(seed: u64, dataset_size: u32, pools: Vec<ClassPool>, size: [u32; 2]) -> SceneConfig {
    SceneConfig {
        dataset_size,
        seed,
        class_pools: pools,
        bias_strength: 60.0,
        group_chance: 0.5,
        overlay_chance: 0.5,
        fog_of_war_chance: 0.3,
        noise: [6, 6, 6],
        blur_strength: 0.8,
        sampling_method: SamplingMethod::Bilinear,
        min_visible_fraction: 0.25,
        output_size: size,
    }
}

/// UI panel and cursor distractors.
pub fn distractors(seed: u64) -> synthscene::scene::Distractors {
    let mut rng = rng(seed);
    let ui = vec![Sprite::new(
        RgbaImage::from_fn(600, 120, |x, _| Rgba([40, 40, (x % 200) as u8, 255])),
        0,
    )
    .unwrap()];
    let cursors = (0..2)
        .map(|_| Sprite::new(random_sprite_pixels(&mut rng, 24), 0).unwrap())
        .collect();
    synthscene::scene::Distractors {
        ui,
        cursors,
        cursor_count: (0, 2),
    }
}
