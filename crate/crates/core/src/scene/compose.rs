use std::path::{Path, PathBuf};

use image::imageops::FilterType;
use image::RgbImage;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::effects::{apply_blur, apply_fog_of_war, apply_noise, overlay_ui};
use super::placement::{add_object, placed_rect, sample_position, top_left};
use super::rng::{stage_rng, Stage};
use super::transform::transform_sprite;
use super::{PlacedObject, SceneConfig, SceneError};
use crate::labels::{write_labels, LabelFile, LabelRecord};
use crate::raster;
use crate::sprite::Sprite;

/// UI panels and cursors drawn after the objects. Never labeled.
#[derive(Debug, Clone, Default)]
pub struct Distractors {
    pub ui: Vec<Sprite>,
    pub cursors: Vec<Sprite>,
    pub cursor_count: (u32, u32),
}

/// A composed image with its labels.
#[derive(Debug, Clone)]
pub struct Scene {
    pub image: RgbImage,
    pub labels: Vec<LabelRecord>,
    pub objects: Vec<PlacedObject>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImageFormat {
    #[default]
    Png,
    /// Quality 90 JPEG.
    Jpeg,
}

impl ImageFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Png => "png",
            ImageFormat::Jpeg => "jpg",
        }
    }
}

/// Where and how generated pairs are written.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub prefix: String,
    pub format: ImageFormat,
}

impl OutputSpec {
    pub fn stem(&self, index: u64) -> String {
        format!("{}{:06}", self.prefix, index)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GenerateSummary {
    pub images: usize,
    pub labels: usize,
}

/// Loads each pool's sprites. Relative sprite directories resolve against
/// `base_dir`.
pub fn load_pools(config: &SceneConfig, base_dir: &Path) -> Result<Vec<Vec<Sprite>>, SceneError> {
    config
        .class_pools
        .iter()
        .map(|pool| load_sprite_dir(&base_dir.join(&pool.sprite_dir), pool.class_id))
        .collect()
}

pub fn load_sprite_dir(dir: &Path, class_id: u32) -> Result<Vec<Sprite>, SceneError> {
    raster::list_images(dir)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", dir.display())))?
        .par_iter()
        .map(|path| Sprite::load(path, class_id).map_err(SceneError::from))
        .collect()
}

/// Loads backgrounds, resizing any whose size differs from `size`.
pub fn load_backgrounds(dir: &Path, size: [u32; 2]) -> Result<Vec<RgbImage>, SceneError> {
    raster::list_images(dir)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", dir.display())))?
        .par_iter()
        .map(|path| {
            let img = raster::load_rgb(path).map_err(|source| SceneError::Image {
                path: path.clone(),
                source,
            })?;
            Ok(if img.dimensions() == (size[0], size[1]) {
                img
            } else {
                image::imageops::resize(&img, size[0], size[1], FilterType::Triangle)
            })
        })
        .collect()
}

/// Checks that everything generation needs is present.
pub fn check_inputs(config: &SceneConfig, pools: &[Vec<Sprite>], backgrounds: &[RgbImage]) -> Result<(), SceneError> {
    let violations = config.violations();
    if !violations.is_empty() {
        return Err(SceneError::InvalidConfig(violations.join("; ")));
    }
    if pools.len() != config.class_pools.len() {
        return Err(SceneError::InvalidConfig(format!(
            "{} pools configured but {} loaded",
            config.class_pools.len(),
            pools.len()
        )));
    }
    for (pool, sprites) in config.class_pools.iter().zip(pools) {
        if sprites.is_empty() && pool.max_count > 0 {
            return Err(SceneError::EmptyPool {
                class_id: pool.class_id,
                max_count: pool.max_count,
            });
        }
    }
    if backgrounds.is_empty() {
        return Err(SceneError::NoBackgrounds);
    }
    let want = (config.output_size[0], config.output_size[1]);
    if let Some(bad) = backgrounds.iter().find(|b| b.dimensions() != want) {
        return Err(SceneError::InvalidConfig(format!(
            "background is {:?}, expected {want:?}",
            bad.dimensions()
        )));
    }
    Ok(())
}

fn offset<R: Rng + ?Sized>(rng: &mut R, max: f64) -> f64 {
    if max > 0.0 {
        rng.random_range(-max..=max)
    } else {
        0.0
    }
}

/// Composes scene `index`: objects, then distractors, fog, noise and blur.
///
/// The result depends only on `(config, pools, distractors, backgrounds,
/// index)`.
pub fn compose_scene(
    config: &SceneConfig,
    pools: &[Vec<Sprite>],
    distractors: &Distractors,
    backgrounds: &[RgbImage],
    index: u64,
) -> Result<Scene, SceneError> {
    check_inputs(config, pools, backgrounds)?;
    let seed = config.seed;
    let mut bg_rng = stage_rng(seed, index, Stage::Background);
    let mut image = backgrounds[bg_rng.random_range(0..backgrounds.len())].clone();
    let canvas = image.dimensions();

    let mut rng = stage_rng(seed, index, Stage::Objects);
    let bias_point = (
        rng.random_range(0..canvas.0) as f64,
        rng.random_range(0..canvas.1) as f64,
    );
    let grouping = rng.random::<f64>() < config.group_chance;

    let mut order: Vec<usize> = Vec::new();
    for (i, pool) in config.class_pools.iter().enumerate() {
        let n = rng.random_range(pool.min_count..=pool.max_count);
        order.extend(std::iter::repeat_n(i, n as usize));
    }
    order.shuffle(&mut rng);

    let mut labels = Vec::new();
    let mut objects = Vec::new();
    for pool_index in order {
        let pool = &config.class_pools[pool_index];
        let sprites = &pools[pool_index];
        let sprite = &sprites[rng.random_range(0..sprites.len())];
        let bias = (pool.grouped && grouping).then_some(bias_point);
        let position = sample_position(&mut rng, canvas, bias, config.bias_strength);
        let scale = pool.base_scale + offset(&mut rng, pool.max_scale);
        let rotation = pool.base_rotation + offset(&mut rng, pool.max_rotation);

        let transformed = transform_sprite(sprite.pixels(), scale, rotation, config.sampling_method);
        let Some(content) = raster::alpha_bounds(&transformed) else {
            continue;
        };
        let full = placed_rect(top_left(position, transformed.width(), transformed.height()), content);
        let visible_fraction = full
            .clip(canvas.0, canvas.1)
            .map_or(0.0, |r| r.area() as f64 / full.area() as f64);
        let Some(visible_box) = add_object(&mut image, &transformed, position) else {
            continue;
        };
        if pool.labeled && visible_fraction >= config.min_visible_fraction {
            labels.push(LabelRecord::from_rect(pool.class_id, visible_box, canvas.0, canvas.1));
        }
        objects.push(PlacedObject {
            class_id: pool.class_id,
            position,
            scale,
            rotation,
            visible_box,
            visible_fraction,
            labeled: pool.labeled,
        });
    }

    let mut overlay_rng = stage_rng(seed, index, Stage::Overlay);
    overlay_ui(
        &mut image,
        &distractors.ui,
        &distractors.cursors,
        &mut overlay_rng,
        config.overlay_chance,
        distractors.cursor_count,
    );

    let mut fog_rng = stage_rng(seed, index, Stage::Fog);
    if fog_rng.random::<f64>() < config.fog_of_war_chance {
        apply_fog_of_war(&mut image, &mut fog_rng);
    }

    apply_noise(&mut image, config.noise, &mut stage_rng(seed, index, Stage::Noise));
    let image = apply_blur(&image, config.blur_strength);

    Ok(Scene { image, labels, objects })
}

/// Writes `config.dataset_size` image/label pairs into `output.dir`.
///
/// `jobs` caps the worker threads; output is identical for any value.
pub fn generate_dataset(
    config: &SceneConfig,
    pools: &[Vec<Sprite>],
    distractors: &Distractors,
    backgrounds: &[RgbImage],
    output: &OutputSpec,
    jobs: Option<usize>,
) -> Result<GenerateSummary, SceneError> {
    check_inputs(config, pools, backgrounds)?;
    std::fs::create_dir_all(&output.dir)?;

    let work = || -> Result<GenerateSummary, SceneError> {
        (0..config.dataset_size as u64)
            .into_par_iter()
            .map(|index| {
                let scene = compose_scene(config, pools, distractors, backgrounds, index)?;
                let stem = output.stem(index);
                let image_path = output.dir.join(format!("{stem}.{}", output.format.extension()));
                let saved = match output.format {
                    ImageFormat::Png => raster::save_png_rgb(&scene.image, &image_path),
                    ImageFormat::Jpeg => raster::save_jpeg_rgb(&scene.image, &image_path, 90),
                };
                saved.map_err(|source| SceneError::Image {
                    path: image_path.clone(),
                    source,
                })?;
                let file = LabelFile::new(stem.clone(), scene.labels);
                std::fs::write(output.dir.join(format!("{stem}.txt")), write_labels(&file))?;
                Ok(GenerateSummary {
                    images: 1,
                    labels: file.records.len(),
                })
            })
            .try_reduce(GenerateSummary::default, |a, b| {
                Ok(GenerateSummary {
                    images: a.images + b.images,
                    labels: a.labels + b.labels,
                })
            })
    };

    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| SceneError::InvalidConfig(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Rect;
    use crate::scene::{ClassPool, SamplingMethod};
    use image::{Rgb, Rgba, RgbaImage};

    fn pool(class_id: u32, min: u32, max: u32) -> ClassPool {
        ClassPool {
            class_id,
            sprite_dir: PathBuf::new(),
            min_count: min,
            max_count: max,
            labeled: true,
            base_scale: 1.0,
            base_rotation: 0.0,
            max_scale: 0.0,
            max_rotation: 0.0,
            grouped: false,
        }
    }

    fn config(pools: Vec<ClassPool>) -> SceneConfig {
        SceneConfig {
            dataset_size: 3,
            seed: 99,
            class_pools: pools,
            bias_strength: 0.0,
            group_chance: 0.0,
            overlay_chance: 0.0,
            fog_of_war_chance: 0.0,
            noise: [0, 0, 0],
            blur_strength: 0.0,
            sampling_method: SamplingMethod::Nearest,
            min_visible_fraction: 0.25,
            output_size: [100, 100],
        }
    }

    fn square(size: u32, class_id: u32) -> Sprite {
        Sprite::new(RgbaImage::from_pixel(size, size, Rgba([220, 30, 30, 255])), class_id).unwrap()
    }

    fn background() -> RgbImage {
        RgbImage::from_pixel(100, 100, Rgb([20, 90, 40]))
    }

    #[test]
    fn single_object_label_matches_pixels() {
        let cfg = config(vec![pool(3, 1, 1)]);
        for index in 0..20 {
            let scene = compose_scene(
                &cfg,
                &[vec![square(4, 3)]],
                &Distractors::default(),
                &[background()],
                index,
            )
            .unwrap();
            let obj = &scene.objects[0];
            let changed = changed_bounds(&scene.image, &background());
            assert_eq!(Some(obj.visible_box), changed);
            if obj.visible_fraction >= 0.25 {
                assert_eq!(scene.labels.len(), 1);
                let expected = LabelRecord::from_rect(3, obj.visible_box, 100, 100);
                assert_eq!(scene.labels[0], expected);
            } else {
                assert!(scene.labels.is_empty());
            }
        }
    }

    fn changed_bounds(a: &RgbImage, b: &RgbImage) -> Option<Rect> {
        let mask = RgbaImage::from_fn(a.width(), a.height(), |x, y| {
            Rgba([0, 0, 0, if a.get_pixel(x, y) != b.get_pixel(x, y) { 255 } else { 0 }])
        });
        raster::alpha_bounds(&mask)
    }

    #[test]
    fn zero_count_pool_never_labeled() {
        let cfg = config(vec![pool(0, 0, 0), pool(1, 2, 5)]);
        let pools = [vec![square(5, 0)], vec![square(5, 1)]];
        for index in 0..30 {
            let scene = compose_scene(&cfg, &pools, &Distractors::default(), &[background()], index).unwrap();
            assert!(scene.labels.iter().all(|l| l.class_id == 1));
        }
    }

    #[test]
    fn unlabeled_pool_draws_without_labels() {
        let mut p = pool(7, 3, 3);
        p.labeled = false;
        let cfg = config(vec![p]);
        let scene = compose_scene(&cfg, &[vec![square(6, 7)]], &Distractors::default(), &[background()], 0).unwrap();
        assert!(scene.labels.is_empty());
        assert_eq!(scene.objects.len(), 3);
        assert_ne!(scene.image, background());
    }

    #[test]
    fn empty_pool_and_backgrounds_rejected() {
        let cfg = config(vec![pool(0, 0, 2)]);
        assert!(matches!(
            compose_scene(&cfg, &[vec![]], &Distractors::default(), &[background()], 0),
            Err(SceneError::EmptyPool { class_id: 0, .. })
        ));
        assert!(matches!(
            compose_scene(&cfg, &[vec![square(2, 0)]], &Distractors::default(), &[], 0),
            Err(SceneError::NoBackgrounds)
        ));
    }

    #[test]
    fn overlapping_objects_keep_full_labels() {
        // two large squares on a small canvas always overlap
        let cfg = SceneConfig {
            output_size: [20, 20],
            min_visible_fraction: 0.01,
            ..config(vec![pool(1, 2, 2)])
        };
        let bg = RgbImage::from_pixel(20, 20, Rgb([0, 0, 0]));
        let scene = compose_scene(&cfg, &[vec![square(15, 1)]], &Distractors::default(), &[bg], 4).unwrap();
        assert_eq!(scene.labels.len(), 2);
        for (label, obj) in scene.labels.iter().zip(&scene.objects) {
            assert_eq!(*label, LabelRecord::from_rect(1, obj.visible_box, 20, 20));
        }
    }

    #[test]
    fn grouped_objects_share_bias_point() {
        let mut p = pool(2, 6, 6);
        p.grouped = true;
        let cfg = SceneConfig {
            group_chance: 1.0,
            bias_strength: 0.0,
            output_size: [100, 100],
            ..config(vec![p])
        };
        let scene = compose_scene(&cfg, &[vec![square(3, 2)]], &Distractors::default(), &[background()], 1).unwrap();
        let first = scene.objects[0].position;
        assert!(scene.objects.iter().all(|o| o.position == first));
    }

    #[test]
    fn generation_writes_pairs() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(vec![pool(0, 1, 3)]);
        cfg.dataset_size = 5;
        let out = OutputSpec {
            dir: dir.path().to_path_buf(),
            prefix: "synth_".into(),
            format: ImageFormat::Png,
        };
        let summary = generate_dataset(
            &cfg,
            &[vec![square(8, 0)]],
            &Distractors::default(),
            &[background()],
            &out,
            Some(2),
        )
        .unwrap();
        assert_eq!(summary.images, 5);
        for i in 0..5 {
            assert!(dir.path().join(format!("synth_{i:06}.png")).exists());
            assert!(dir.path().join(format!("synth_{i:06}.txt")).exists());
        }
    }
}
