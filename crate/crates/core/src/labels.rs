//! Darknet-style label files, class lists, VOC conversion and integrity
//! checks.
//!
//! A label file holds one line per object:
//!
//! ```text
//! <class_id> <x_center> <y_center> <width> <height>
//! ```
//!
//! with coordinates normalized to the image size and printed with exactly six
//! decimals, so files are byte-comparable.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::{self, Rect};

/// Slack for box-inside-unit-square checks; six printed decimals can push an
/// edge up to half a unit of the last place outside.
pub const RANGE_EPSILON: f64 = 1e-6;

/// Name of the class-list file, skipped when scanning for label files.
pub const CLASS_LIST_FILE: &str = "classes.txt";

#[derive(Debug, Error)]
pub enum LabelError {
    #[error("line {line}: malformed label line: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: box outside the unit square")]
    OutOfRange { line: usize },
    #[error("unknown class name {0:?}")]
    UnknownClass(String),
    #[error("class {0} has no entry in the mapping")]
    UnmappedClass(u32),
    #[error("class list: {0}")]
    ClassList(String),
    #[error("invalid VOC annotation: {0}")]
    Voc(String),
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<LabelError>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LabelError {
    fn in_file(self, path: &Path) -> Self {
        LabelError::File {
            path: path.to_path_buf(),
            source: Box::new(self),
        }
    }

    /// Line number of a parse failure, looking through file context.
    pub fn line(&self) -> Option<usize> {
        match self {
            LabelError::MalformedLine { line, .. } | LabelError::OutOfRange { line } => Some(*line),
            LabelError::File { source, .. } => source.line(),
            _ => None,
        }
    }
}

/// One labeled object with a normalized center/size box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub class_id: u32,
    pub x_center: f64,
    pub y_center: f64,
    pub width: f64,
    pub height: f64,
}

impl LabelRecord {
    /// Normalized record for a pixel rectangle on a `canvas_w` × `canvas_h`
    /// image.
    pub fn from_rect(class_id: u32, rect: Rect, canvas_w: u32, canvas_h: u32) -> Self {
        let (cw, ch) = (canvas_w as f64, canvas_h as f64);
        Self {
            class_id,
            x_center: (2.0 * rect.x as f64 + rect.width as f64) / (2.0 * cw),
            y_center: (2.0 * rect.y as f64 + rect.height as f64) / (2.0 * ch),
            width: rect.width as f64 / cw,
            height: rect.height as f64 / ch,
        }
    }

    /// Pixel corners `(x_min, y_min, x_max, y_max)` on an image of the given
    /// size.
    pub fn to_pixel_corners(&self, image_w: u32, image_h: u32) -> [f64; 4] {
        let (w, h) = (image_w as f64, image_h as f64);
        [
            (self.x_center - self.width / 2.0) * w,
            (self.y_center - self.height / 2.0) * h,
            (self.x_center + self.width / 2.0) * w,
            (self.y_center + self.height / 2.0) * h,
        ]
    }

    /// Sizes in (0, 1] and the whole box inside the unit square.
    pub fn is_valid(&self) -> bool {
        let axis_ok = |center: f64, size: f64| {
            center.is_finite()
                && size.is_finite()
                && size > 0.0
                && size <= 1.0 + RANGE_EPSILON
                && center - size / 2.0 >= -RANGE_EPSILON
                && center + size / 2.0 <= 1.0 + RANGE_EPSILON
        };
        axis_ok(self.x_center, self.width) && axis_ok(self.y_center, self.height)
    }
}

/// Records belonging to one image, identified by the shared file stem.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LabelFile {
    pub stem: String,
    pub records: Vec<LabelRecord>,
}

impl LabelFile {
    pub fn new(stem: impl Into<String>, records: Vec<LabelRecord>) -> Self {
        Self {
            stem: stem.into(),
            records,
        }
    }

    pub fn read(path: &Path) -> Result<Self, LabelError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabelError::from(e).in_file(path))?;
        let mut file = parse_labels(&text).map_err(|e| e.in_file(path))?;
        file.stem = raster::file_stem(path);
        Ok(file)
    }

    pub fn write(&self, path: &Path) -> Result<(), LabelError> {
        std::fs::write(path, write_labels(self))?;
        Ok(())
    }
}

/// Serializes records, one newline-terminated line each.
pub fn write_labels(file: &LabelFile) -> String {
    let mut out = String::new();
    for r in &file.records {
        writeln!(
            out,
            "{} {:.6} {:.6} {:.6} {:.6}",
            r.class_id, r.x_center, r.y_center, r.width, r.height
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// Parses label text. Blank lines and surrounding whitespace are ignored.
/// The returned file has an empty stem.
pub fn parse_labels(text: &str) -> Result<LabelFile, LabelError> {
    let mut records = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 5 {
            return Err(LabelError::MalformedLine {
                line: line_no,
                reason: format!("expected 5 fields, found {}", fields.len()),
            });
        }
        let class_id = fields[0].parse::<u32>().map_err(|_| LabelError::MalformedLine {
            line: line_no,
            reason: format!("class id {:?} is not a non-negative integer", fields[0]),
        })?;
        let mut values = [0.0f64; 4];
        for (slot, field) in values.iter_mut().zip(&fields[1..]) {
            *slot = field.parse::<f64>().map_err(|_| LabelError::MalformedLine {
                line: line_no,
                reason: format!("{field:?} is not a number"),
            })?;
        }
        let record = LabelRecord {
            class_id,
            x_center: values[0],
            y_center: values[1],
            width: values[2],
            height: values[3],
        };
        if !record.is_valid() {
            return Err(LabelError::OutOfRange { line: line_no });
        }
        records.push(record);
    }
    Ok(LabelFile {
        stem: String::new(),
        records,
    })
}

/// Ordered class names; a name's id is its position.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassMap {
    names: Vec<String>,
}

impl ClassMap {
    pub fn new(names: Vec<String>) -> Result<Self, LabelError> {
        let mut seen = BTreeSet::new();
        for name in &names {
            if name.is_empty() {
                return Err(LabelError::ClassList("empty class name".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(LabelError::ClassList(format!("duplicate class name {name:?}")));
            }
        }
        Ok(Self { names })
    }

    /// One name per line; line number (from 0) is the class id. A trailing
    /// newline is allowed.
    pub fn parse(text: &str) -> Result<Self, LabelError> {
        let names = text
            .trim_end_matches(['\n', '\r'])
            .lines()
            .map(|l| l.trim().to_string())
            .collect();
        Self::new(names)
    }

    pub fn read(path: &Path) -> Result<Self, LabelError> {
        Self::parse(&std::fs::read_to_string(path)?).map_err(|e| e.in_file(path))
    }

    pub fn to_text(&self) -> String {
        self.names.iter().map(|n| format!("{n}\n")).collect()
    }

    pub fn id_of(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    pub fn name_of(&self, id: u32) -> Option<&str> {
        self.names.get(id as usize).map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = (u32, &str)> {
        self.names.iter().enumerate().map(|(i, n)| (i as u32, n.as_str()))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocObject {
    pub name: String,
    pub xmin: i64,
    pub ymin: i64,
    pub xmax: i64,
    pub ymax: i64,
}

/// Pascal VOC style annotation; corners are an inclusive-exclusive pixel box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocAnnotation {
    pub filename: Option<String>,
    pub width: u32,
    pub height: u32,
    pub objects: Vec<VocObject>,
}

fn child<'a, 'i>(node: roxmltree::Node<'a, 'i>, tag: &str) -> Option<roxmltree::Node<'a, 'i>> {
    node.children().find(|c| c.has_tag_name(tag))
}

fn child_text<'a>(node: roxmltree::Node<'a, '_>, tag: &str) -> Result<&'a str, LabelError> {
    child(node, tag)
        .and_then(|c| c.text())
        .map(str::trim)
        .ok_or_else(|| LabelError::Voc(format!("missing <{tag}>")))
}

fn child_number(node: roxmltree::Node<'_, '_>, tag: &str) -> Result<i64, LabelError> {
    let text = child_text(node, tag)?;
    // LabelImg writes integers, other tools sometimes write "12.0"
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(|v| v.round() as i64)
        .ok_or_else(|| LabelError::Voc(format!("<{tag}> value {text:?} is not a number")))
}

impl VocAnnotation {
    pub fn parse(xml: &str) -> Result<Self, LabelError> {
        let doc = roxmltree::Document::parse(xml).map_err(|e| LabelError::Voc(e.to_string()))?;
        let root = doc.root_element();
        let size = child(root, "size").ok_or_else(|| LabelError::Voc("missing <size>".into()))?;
        let width = child_number(size, "width")?;
        let height = child_number(size, "height")?;
        if width <= 0 || height <= 0 || width > u32::MAX as i64 || height > u32::MAX as i64 {
            return Err(LabelError::Voc(format!("bad image size {width}x{height}")));
        }
        let mut objects = Vec::new();
        for obj in root.children().filter(|c| c.has_tag_name("object")) {
            let name = child_text(obj, "name")?.to_string();
            let bndbox = child(obj, "bndbox").ok_or_else(|| LabelError::Voc("missing <bndbox>".into()))?;
            objects.push(VocObject {
                name,
                xmin: child_number(bndbox, "xmin")?,
                ymin: child_number(bndbox, "ymin")?,
                xmax: child_number(bndbox, "xmax")?,
                ymax: child_number(bndbox, "ymax")?,
            });
        }
        let filename = child(root, "filename")
            .and_then(|n| n.text())
            .map(|s| s.trim().to_string());
        let annotation = Self {
            filename,
            width: width as u32,
            height: height as u32,
            objects,
        };
        annotation.validate()?;
        Ok(annotation)
    }

    pub fn validate(&self) -> Result<(), LabelError> {
        let (w, h) = (self.width as i64, self.height as i64);
        for o in &self.objects {
            if !(0 <= o.xmin && o.xmin < o.xmax && o.xmax <= w && 0 <= o.ymin && o.ymin < o.ymax && o.ymax <= h) {
                return Err(LabelError::Voc(format!(
                    "object {:?} box ({}, {}, {}, {}) does not fit a {}x{} image",
                    o.name, o.xmin, o.ymin, o.xmax, o.ymax, self.width, self.height
                )));
            }
        }
        Ok(())
    }
}

/// Converts VOC corners to normalized center/size records.
pub fn convert_voc(annotation: &VocAnnotation, classes: &ClassMap) -> Result<LabelFile, LabelError> {
    annotation.validate()?;
    let (w, h) = (annotation.width as f64, annotation.height as f64);
    let records = annotation
        .objects
        .iter()
        .map(|o| {
            let class_id = classes
                .id_of(&o.name)
                .ok_or_else(|| LabelError::UnknownClass(o.name.clone()))?;
            Ok(LabelRecord {
                class_id,
                x_center: (o.xmin + o.xmax) as f64 / (2.0 * w),
                y_center: (o.ymin + o.ymax) as f64 / (2.0 * h),
                width: (o.xmax - o.xmin) as f64 / w,
                height: (o.ymax - o.ymin) as f64 / h,
            })
        })
        .collect::<Result<Vec<_>, LabelError>>()?;
    let stem = annotation
        .filename
        .as_deref()
        .map(|f| raster::file_stem(Path::new(f)))
        .unwrap_or_default();
    Ok(LabelFile { stem, records })
}

/// Replaces class ids through `mapping`; boxes and order are preserved.
pub fn rename_classes(file: &LabelFile, mapping: &BTreeMap<u32, u32>) -> Result<LabelFile, LabelError> {
    let records = file
        .records
        .iter()
        .map(|r| {
            let class_id = *mapping.get(&r.class_id).ok_or(LabelError::UnmappedClass(r.class_id))?;
            Ok(LabelRecord { class_id, ..*r })
        })
        .collect::<Result<Vec<_>, LabelError>>()?;
    Ok(LabelFile {
        stem: file.stem.clone(),
        records,
    })
}

/// Parses `old:new` pairs separated by commas, e.g. `1:1,2:1,3:1`.
pub fn parse_class_mapping(text: &str) -> Result<BTreeMap<u32, u32>, String> {
    let mut mapping = BTreeMap::new();
    for pair in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (old, new) = pair
            .split_once(':')
            .ok_or_else(|| format!("mapping entry {pair:?} is not of the form old:new"))?;
        let old = old.trim().parse::<u32>().map_err(|_| format!("bad class id {old:?}"))?;
        let new = new.trim().parse::<u32>().map_err(|_| format!("bad class id {new:?}"))?;
        if mapping.insert(old, new).is_some() {
            return Err(format!("class {old} mapped twice"));
        }
    }
    Ok(mapping)
}

/// Label files directly inside `dir`, keyed by stem. The class list is
/// skipped.
pub fn list_label_files(dir: &Path) -> std::io::Result<BTreeMap<String, PathBuf>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let is_txt = path.extension().is_some_and(|e| e == "txt");
        let is_class_list = path.file_name().is_some_and(|n| n == CLASS_LIST_FILE);
        if path.is_file() && is_txt && !is_class_list {
            out.insert(raster::file_stem(&path), path);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MalformedLabel {
    pub stem: String,
    pub line: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntegrityReport {
    pub missing_labels: Vec<String>,
    pub missing_images: Vec<String>,
    pub malformed: Vec<MalformedLabel>,
}

impl IntegrityReport {
    pub fn is_clean(&self) -> bool {
        self.missing_labels.is_empty() && self.missing_images.is_empty() && self.malformed.is_empty()
    }
}

/// Pairs images with label files in a flat dataset directory and parses every
/// label.
pub fn check_integrity(dataset_dir: &Path) -> Result<IntegrityReport, LabelError> {
    let images: BTreeSet<String> = raster::list_images(dataset_dir)?
        .iter()
        .map(|p| raster::file_stem(p))
        .collect();
    let labels = list_label_files(dataset_dir)?;

    let mut report = IntegrityReport {
        missing_labels: images.iter().filter(|s| !labels.contains_key(*s)).cloned().collect(),
        missing_images: labels.keys().filter(|s| !images.contains(*s)).cloned().collect(),
        malformed: Vec::new(),
    };
    for (stem, path) in &labels {
        let text = std::fs::read_to_string(path)?;
        if let Err(e) = parse_labels(&text) {
            report.malformed.push(MalformedLabel {
                stem: stem.clone(),
                line: e.line(),
                message: e.to_string(),
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(class_id: u32, x: f64, y: f64, w: f64, h: f64) -> LabelRecord {
        LabelRecord {
            class_id,
            x_center: x,
            y_center: y,
            width: w,
            height: h,
        }
    }

    #[test]
    fn write_format() {
        let file = LabelFile::new("a", vec![rec(0, 0.5, 0.5, 0.04, 0.04)]);
        assert_eq!(write_labels(&file), "0 0.500000 0.500000 0.040000 0.040000\n");
        assert_eq!(write_labels(&LabelFile::default()), "");
        let two = LabelFile::new("a", vec![rec(3, 0.25, 0.5, 0.1, 0.2), rec(1, 0.75, 0.5, 0.1, 0.2)]);
        assert_eq!(
            write_labels(&two),
            "3 0.250000 0.500000 0.100000 0.200000\n1 0.750000 0.500000 0.100000 0.200000\n"
        );
    }

    #[test]
    fn parse_round_trip_and_whitespace() {
        let file = LabelFile::new("", vec![rec(2, 0.125, 0.5, 0.25, 1.0)]);
        assert_eq!(parse_labels(&write_labels(&file)).unwrap(), file);
        let messy = "  2   0.125 0.5\t0.25 1.0  \n\n";
        assert_eq!(parse_labels(messy).unwrap(), file);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_labels("0 0.5 0.5"),
            Err(LabelError::MalformedLine { line: 1, .. })
        ));
        assert!(matches!(
            parse_labels("0 0.5 0.5 0.1 0.1\nx 0.5 0.5 0.1 0.1"),
            Err(LabelError::MalformedLine { line: 2, .. })
        ));
        assert!(matches!(
            parse_labels("0 1.5 0.5 0.1 0.1"),
            Err(LabelError::OutOfRange { line: 1 })
        ));
        assert!(matches!(
            parse_labels("0 0.5 0.5 0.0 0.1"),
            Err(LabelError::OutOfRange { line: 1 })
        ));
        assert!(matches!(
            parse_labels("-1 0.5 0.5 0.1 0.1"),
            Err(LabelError::MalformedLine { line: 1, .. })
        ));
    }

    #[test]
    fn from_rect_arithmetic() {
        let r = LabelRecord::from_rect(1, Rect::new(48, 48, 4, 4), 100, 100);
        assert_eq!(r, rec(1, 0.5, 0.5, 0.04, 0.04));
    }

    fn classes() -> ClassMap {
        ClassMap::parse("tower\nmelee\ncaster\ncanon\nvayne\n").unwrap()
    }

    #[test]
    fn class_map_rules() {
        let map = classes();
        assert_eq!(map.len(), 5);
        assert_eq!(map.id_of("caster"), Some(2));
        assert_eq!(map.name_of(4), Some("vayne"));
        assert_eq!(ClassMap::parse(&map.to_text()).unwrap(), map);
        assert!(ClassMap::parse("a\nb\na\n").is_err());
        assert!(ClassMap::parse("a\n\nb\n").is_err());
    }

    const VOC: &str = r#"<annotation>
  <folder>frames</folder>
  <filename>shot_0001.jpg</filename>
  <size><width>100</width><height>100</height><depth>3</depth></size>
  <object>
    <name>caster</name>
    <bndbox><xmin>10</xmin><ymin>20</ymin><xmax>30</xmax><ymax>60</ymax></bndbox>
  </object>
  <object>
    <name>tower</name>
    <bndbox><xmin>0</xmin><ymin>0</ymin><xmax>100</xmax><ymax>100</ymax></bndbox>
  </object>
</annotation>"#;

    #[test]
    fn voc_conversion() {
        let voc = VocAnnotation::parse(VOC).unwrap();
        assert_eq!(voc.objects.len(), 2);
        let file = convert_voc(&voc, &classes()).unwrap();
        assert_eq!(file.stem, "shot_0001");
        let r = file.records[0];
        assert_eq!(r.class_id, 2);
        assert!((r.x_center - 0.2).abs() < 1e-12);
        assert!((r.y_center - 0.4).abs() < 1e-12);
        assert!((r.width - 0.2).abs() < 1e-12);
        assert!((r.height - 0.4).abs() < 1e-12);
        assert_eq!(file.records[1], rec(0, 0.5, 0.5, 1.0, 1.0));
    }

    #[test]
    fn voc_unknown_class() {
        let voc = VocAnnotation::parse(&VOC.replace("caster", "dragon")).unwrap();
        assert!(matches!(
            convert_voc(&voc, &classes()),
            Err(LabelError::UnknownClass(name)) if name == "dragon"
        ));
    }

    #[test]
    fn voc_rejects_bad_boxes() {
        assert!(VocAnnotation::parse(&VOC.replace("<xmax>30</xmax>", "<xmax>5</xmax>")).is_err());
        assert!(VocAnnotation::parse(&VOC.replace("<xmax>100</xmax>", "<xmax>101</xmax>")).is_err());
        assert!(VocAnnotation::parse("<annotation/>").is_err());
    }

    #[test]
    fn rename_merges_minions() {
        let file = LabelFile::new(
            "s",
            vec![
                rec(1, 0.1, 0.1, 0.1, 0.1),
                rec(2, 0.2, 0.2, 0.1, 0.1),
                rec(3, 0.3, 0.3, 0.1, 0.1),
            ],
        );
        let mapping = parse_class_mapping("1:1,2:1,3:1").unwrap();
        let merged = rename_classes(&file, &mapping).unwrap();
        assert!(merged.records.iter().all(|r| r.class_id == 1));
        assert_eq!(merged.records[2].x_center, 0.3);

        let identity: BTreeMap<u32, u32> = (1..=3).map(|i| (i, i)).collect();
        assert_eq!(rename_classes(&file, &identity).unwrap(), file);

        let lacking = parse_class_mapping("1:0,2:0").unwrap();
        assert!(matches!(
            rename_classes(&file, &lacking),
            Err(LabelError::UnmappedClass(3))
        ));
    }

    #[test]
    fn mapping_syntax() {
        assert!(parse_class_mapping("1-2").is_err());
        assert!(parse_class_mapping("1:2,1:3").is_err());
        assert_eq!(parse_class_mapping("").unwrap().len(), 0);
    }

    fn touch_image(dir: &Path, stem: &str) {
        image::RgbImage::new(2, 2)
            .save(dir.join(format!("{stem}.png")))
            .unwrap();
    }

    #[test]
    fn integrity_reports() {
        let dir = tempfile::tempdir().unwrap();
        for stem in ["a", "b", "c"] {
            touch_image(dir.path(), stem);
            std::fs::write(dir.path().join(format!("{stem}.txt")), "0 0.5 0.5 0.1 0.1\n").unwrap();
        }
        std::fs::write(dir.path().join(CLASS_LIST_FILE), "x\n").unwrap();
        assert!(check_integrity(dir.path()).unwrap().is_clean());

        touch_image(dir.path(), "d");
        std::fs::write(dir.path().join("e.txt"), "").unwrap();
        std::fs::write(dir.path().join("b.txt"), "0 0.5 0.5 0.1 0.1\n0 0.5\n").unwrap();
        let report = check_integrity(dir.path()).unwrap();
        assert_eq!(report.missing_labels, vec!["d"]);
        assert_eq!(report.missing_images, vec!["e"]);
        assert_eq!(report.malformed.len(), 1);
        assert_eq!(report.malformed[0].stem, "b");
        assert_eq!(report.malformed[0].line, Some(2));
    }

    fn arb_mapping() -> impl Strategy<Value = BTreeMap<u32, u32>> {
        proptest::collection::vec(0u32..6, 6)
            .prop_map(|targets| targets.into_iter().enumerate().map(|(i, t)| (i as u32, t)).collect())
    }

    proptest! {
        #[test]
        fn rename_composes(
            classes in proptest::collection::vec(0u32..6, 0..12),
            m1 in arb_mapping(),
            m2 in arb_mapping(),
        ) {
            let file = LabelFile::new(
                "p",
                classes.iter().map(|&c| rec(c, 0.5, 0.5, 0.2, 0.2)).collect(),
            );
            let composed: BTreeMap<u32, u32> = m1.iter().map(|(k, v)| (*k, m2[v])).collect();
            let stepwise = rename_classes(&rename_classes(&file, &m1).unwrap(), &m2).unwrap();
            prop_assert_eq!(stepwise, rename_classes(&file, &composed).unwrap());
        }

        #[test]
        fn idempotent_mapping_is_idempotent(classes in proptest::collection::vec(0u32..6, 0..12)) {
            // project everything onto {0, 1}
            let m: BTreeMap<u32, u32> = (0..6).map(|i| (i, i.min(1))).collect();
            let file = LabelFile::new("p", classes.iter().map(|&c| rec(c, 0.5, 0.5, 0.2, 0.2)).collect());
            let once = rename_classes(&file, &m).unwrap();
            prop_assert_eq!(rename_classes(&once, &m).unwrap(), once);
        }
    }
}
