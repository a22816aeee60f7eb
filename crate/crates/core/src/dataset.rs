//! Dataset-level utilities: frame subsampling, train/test splits, statistics.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use image::imageops::FilterType;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::labels::{self, LabelError, LabelFile};
use crate::raster;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("duplicate stem {0:?} in dataset index")]
    DuplicateStem(String),
    #[error("pair stems differ: {0} vs {1}")]
    StemMismatch(PathBuf, PathBuf),
    #[error("stride must be positive")]
    ZeroStride,
    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Image/label pairs of one dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetIndex {
    root: PathBuf,
    pairs: Vec<(PathBuf, PathBuf)>,
}

impl DatasetIndex {
    /// Builds an index, enforcing matching stems and no duplicates.
    pub fn new(root: impl Into<PathBuf>, pairs: Vec<(PathBuf, PathBuf)>) -> Result<Self, DatasetError> {
        let mut seen = BTreeSet::new();
        for (image, label) in &pairs {
            let stem = raster::file_stem(image);
            if stem != raster::file_stem(label) {
                return Err(DatasetError::StemMismatch(image.clone(), label.clone()));
            }
            if !seen.insert(stem.clone()) {
                return Err(DatasetError::DuplicateStem(stem));
            }
        }
        Ok(Self {
            root: root.into(),
            pairs,
        })
    }

    /// Every image in `root` that has a label file beside it, sorted by
    /// name. Unpaired files are left to `check_integrity`.
    pub fn scan(root: &Path) -> Result<Self, DatasetError> {
        let labels = labels::list_label_files(root)?;
        let mut pairs = Vec::new();
        for image in raster::list_images(root)? {
            if let Some(label) = labels.get(&raster::file_stem(&image)) {
                pairs.push((image, label.clone()));
            }
        }
        Self::new(root, pairs)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn pairs(&self) -> &[(PathBuf, PathBuf)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// One image path per line, relative to the root where possible.
    pub fn manifest(&self) -> String {
        self.pairs
            .iter()
            .map(|(image, _)| {
                let rel = image.strip_prefix(&self.root).unwrap_or(image);
                format!("{}\n", rel.display())
            })
            .collect()
    }

    pub fn write_manifest(&self, path: &Path) -> Result<(), DatasetError> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, self.manifest())?;
        Ok(())
    }
}

/// Number of test items for a fraction of `n`, rounding half away from zero.
pub fn test_count(n: usize, test_fraction: f64) -> usize {
    ((test_fraction.clamp(0.0, 1.0) * n as f64).round() as usize).min(n)
}

/// Seeded random split. Both halves keep the input order.
pub fn split_train_test(index: &DatasetIndex, test_fraction: f64, seed: u64) -> (DatasetIndex, DatasetIndex) {
    let n = index.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut is_test = vec![false; n];
    for &i in &order[..test_count(n, test_fraction)] {
        is_test[i] = true;
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (pair, test_member) in index.pairs.iter().zip(is_test) {
        if test_member {
            test.push(pair.clone());
        } else {
            train.push(pair.clone());
        }
    }
    let make = |pairs| DatasetIndex {
        root: index.root.clone(),
        pairs,
    };
    (make(train), make(test))
}

/// Exports frames `0, stride, 2·stride, …` of the sorted sequence in
/// `input_dir` as `<prefix><running index>.png`, optionally resized.
pub fn sample_frames(
    input_dir: &Path,
    stride: usize,
    resize: Option<(u32, u32)>,
    prefix: &str,
    output_dir: &Path,
) -> Result<usize, DatasetError> {
    if stride == 0 {
        return Err(DatasetError::ZeroStride);
    }
    let frames = raster::list_images(input_dir)?;
    std::fs::create_dir_all(output_dir)?;
    let picked: Vec<&PathBuf> = frames.iter().step_by(stride).collect();
    picked
        .par_iter()
        .enumerate()
        .try_for_each(|(i, path)| -> Result<(), DatasetError> {
            let image_err = |source| DatasetError::Image {
                path: (*path).clone(),
                source,
            };
            let mut img = image::open(path).map_err(image_err)?;
            if let Some((w, h)) = resize {
                img = img.resize_exact(w, h, FilterType::Triangle);
            }
            let out = output_dir.join(format!("{prefix}{i:06}.png"));
            img.save(&out)
                .map_err(|source| DatasetError::Image { path: out, source })
        })?;
    Ok(picked.len())
}

/// Object counts per class and a histogram of objects per image.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DatasetStats {
    pub images: usize,
    pub total_objects: usize,
    pub per_class: BTreeMap<u32, usize>,
    /// objects-per-image → number of images
    pub objects_per_image: BTreeMap<usize, usize>,
}

impl DatasetStats {
    pub fn add_file(&mut self, file: &LabelFile) {
        self.images += 1;
        self.total_objects += file.records.len();
        *self.objects_per_image.entry(file.records.len()).or_default() += 1;
        for r in &file.records {
            *self.per_class.entry(r.class_id).or_default() += 1;
        }
    }

    pub fn from_files<'a>(files: impl IntoIterator<Item = &'a LabelFile>) -> Self {
        let mut stats = Self::default();
        for f in files {
            stats.add_file(f);
        }
        stats
    }
}

pub fn dataset_stats(index: &DatasetIndex) -> Result<DatasetStats, DatasetError> {
    let files = index
        .pairs
        .iter()
        .map(|(_, label)| LabelFile::read(label))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DatasetStats::from_files(&files))
}
