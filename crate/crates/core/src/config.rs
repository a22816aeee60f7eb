//! The run configuration document.
//!
//! A single TOML file drives every stage. Scene parameters live under
//! `[scene]` with the pool list as `[[scene.class_pools]]`; relative paths
//! resolve against the directory holding the file.
//!
//! ```toml
//! [scene]
//! dataset_size = 100
//! seed = 7
//! output_size = [1920, 1080]
//! noise = [8, 8, 8]
//! blur_strength = 0.7
//!
//! [[scene.class_pools]]
//! class_id = 0
//! sprite_dir = "sprites/tower"
//! min_count = 0
//! max_count = 1
//!
//! [paths]
//! backgrounds = "backgrounds"
//! output = "out"
//! ```
//!
//! Unknown keys are errors: a misspelled randomization knob would otherwise
//! silently fall back to its default.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::DEFAULT_IOU_THRESHOLD;
use crate::scene::{ImageFormat, OutputSpec, SceneConfig};
use crate::sprite::KeyParams;

/// Every problem found in a configuration document.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid configuration:\n  {}", .violations.join("\n  "))]
pub struct ConfigError {
    pub violations: Vec<String>,
}

impl ConfigError {
    fn single(message: impl Into<String>) -> Self {
        Self {
            violations: vec![message.into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Paths {
    pub backgrounds: PathBuf,
    pub output: PathBuf,
    #[serde(default)]
    pub ui: Option<PathBuf>,
    #[serde(default)]
    pub cursors: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputOptions {
    /// Prepended to the zero-padded image index.
    #[serde(default)]
    pub prefix: String,
    #[serde(default)]
    pub format: ImageFormat,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistractorOptions {
    #[serde(default)]
    pub cursor_min: u32,
    #[serde(default)]
    pub cursor_max: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    #[serde(default = "default_iou")]
    pub iou_threshold: f64,
}

fn default_iou() -> f64 {
    DEFAULT_IOU_THRESHOLD
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            iou_threshold: DEFAULT_IOU_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scene: SceneConfig,
    pub paths: Paths,
    #[serde(default)]
    pub output: OutputOptions,
    #[serde(default)]
    pub distractors: DistractorOptions,
    #[serde(default)]
    pub key: KeyParams,
    #[serde(default)]
    pub eval: EvalOptions,
}

impl RunConfig {
    /// Resolves every relative path against `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for pool in &mut self.scene.class_pools {
            fix(&mut pool.sprite_dir);
        }
        fix(&mut self.paths.backgrounds);
        fix(&mut self.paths.output);
        self.paths.ui.iter_mut().for_each(fix);
        self.paths.cursors.iter_mut().for_each(fix);
    }

    pub fn output_spec(&self) -> OutputSpec {
        OutputSpec {
            dir: self.paths.output.clone(),
            prefix: self.output.prefix.clone(),
            format: self.output.format,
        }
    }

    /// Semantic checks, without touching the filesystem.
    pub fn violations(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .scene
            .violations()
            .into_iter()
            .map(|v| format!("scene.{v}"))
            .collect();
        if self.distractors.cursor_min > self.distractors.cursor_max {
            out.push(format!(
                "distractors: cursor_min ({}) exceeds cursor_max ({})",
                self.distractors.cursor_min, self.distractors.cursor_max
            ));
        }
        let t = self.eval.iou_threshold;
        if !(t > 0.0 && t <= 1.0) {
            out.push(format!("eval.iou_threshold: must lie in (0, 1], got {t}"));
        }
        out
    }

    /// Input directories that do not exist.
    pub fn missing_paths(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut need = |field: String, p: &Path| {
            if !p.is_dir() {
                out.push(format!("{field}: directory {} does not exist", p.display()));
            }
        };
        for (i, pool) in self.scene.class_pools.iter().enumerate() {
            need(format!("scene.class_pools[{i}].sprite_dir"), &pool.sprite_dir);
        }
        need("paths.backgrounds".into(), &self.paths.backgrounds);
        if let Some(ui) = &self.paths.ui {
            need("paths.ui".into(), ui);
        }
        if let Some(c) = &self.paths.cursors {
            need("paths.cursors".into(), c);
        }
        out
    }
}

/// Parses a document, rejecting unknown keys and reporting every semantic
/// violation at once. Paths are returned as written.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let de = toml::Deserializer::parse(text).map_err(|e| ConfigError::single(e.to_string()))?;
    let mut unknown = Vec::new();
    let parsed: Result<RunConfig, _> =
        serde_ignored::deserialize(de, |path| unknown.push(format!("{path}: unknown key")));
    let config = match parsed {
        Ok(c) => c,
        Err(e) => {
            let mut violations = unknown;
            violations.push(e.to_string().trim().to_string());
            return Err(ConfigError { violations });
        }
    };
    let mut violations = unknown;
    violations.extend(config.violations());
    if violations.is_empty() {
        Ok(config)
    } else {
        Err(ConfigError { violations })
    }
}

/// Reads, parses and fully validates a configuration file, resolving paths
/// against its directory and checking that input directories exist.
pub fn validate_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::single(format!("{}: {e}", path.display())))?;
    let mut config = parse_config(&text)?;
    config.resolve_paths(path.parent().unwrap_or(Path::new(".")));
    let missing = config.missing_paths();
    if missing.is_empty() {
        Ok(config)
    } else {
        Err(ConfigError { violations: missing })
    }
}
