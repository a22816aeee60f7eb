use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use synthscene::config::{validate_config, ConfigError, RunConfig};
use synthscene::dataset::{dataset_stats, sample_frames, split_train_test, DatasetIndex};
use synthscene::eval::{evaluate_dirs, tracking_from_dir, DEFAULT_IOU_THRESHOLD};
use synthscene::labels::{
    check_integrity, convert_voc, list_label_files, parse_class_mapping, rename_classes, ClassMap, LabelFile,
    VocAnnotation, CLASS_LIST_FILE,
};
use synthscene::raster::Rect;
use synthscene::scene::{check_inputs, generate_dataset, load_backgrounds, load_sprite_dir, Distractors};
use synthscene::sprite::{extract_sprites, KeyParams};

/// Synthetic object-detection datasets from masked sprites.
#[derive(Debug, Parser)]
#[command(name = "synthscene", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Key frames recorded on a unicolor background into cropped sprites.
    Extract(ExtractArgs),
    /// Generate labeled scenes from a configuration document.
    Compose(ComposeArgs),
    /// Export every n-th frame of an image sequence.
    SampleFrames(SampleArgs),
    /// Write seeded train/test manifests for a dataset directory.
    Split(SplitArgs),
    /// Renumber class ids in every label file, e.g. to merge classes.
    Rename(RenameArgs),
    /// Report images without labels, labels without images and bad labels.
    Check(DirArg),
    /// Convert VOC XML annotations to label files.
    Convert(ConvertArgs),
    /// Score prediction files against ground truth.
    EvalMap(EvalMapArgs),
    /// Share of frames in which a target was detected once, several times or never.
    EvalTrack(EvalTrackArgs),
    /// Object counts per class.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
struct ExtractArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    class_id: u32,
    /// Takes keying defaults from the `[key]` section.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Key color as R,G,B.
    #[arg(long, value_parser = parse_rgb)]
    background: Option<[u8; 3]>,
    /// Per-channel tolerance as R,G,B.
    #[arg(long, value_parser = parse_rgb)]
    tolerance: Option<[u8; 3]>,
    /// Only keep sprites whose content lies inside X,Y,W,H.
    #[arg(long, value_parser = parse_rect)]
    area: Option<Rect>,
    /// Layers of outline to erode.
    #[arg(long)]
    remove_outline: Option<u32>,
    #[arg(long, default_value = "")]
    prefix: String,
}

#[derive(Debug, Args)]
struct ComposeArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of scenes, overriding `dataset_size`.
    #[arg(long)]
    count: Option<u32>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
    /// Validate the configuration and load every input without writing.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    stride: usize,
    /// Resize to WxH.
    #[arg(long, value_parser = parse_size)]
    resize: Option<(u32, u32)>,
    #[arg(long, default_value = "frame_")]
    prefix: String,
}

#[derive(Debug, Args)]
struct SplitArgs {
    dataset: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    test_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for train.txt and test.txt; defaults to `<dataset>/splits`.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RenameArgs {
    dataset: PathBuf,
    /// Comma-separated old:new pairs, e.g. 1:1,2:1,3:1.
    #[arg(long, value_parser = parse_mapping)]
    mapping: BTreeMap<u32, u32>,
    /// Write renamed labels here instead of rewriting them in place.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DirArg {
    dataset: PathBuf,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    /// An XML file or a directory of them.
    #[arg(long)]
    input: PathBuf,
    /// Class names, one per line; line number is the class id.
    #[arg(long)]
    classes: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct EvalMapArgs {
    /// Ground-truth label files with their images.
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    predictions: PathBuf,
    /// Image size as WxH when the images are not beside the labels.
    #[arg(long, value_parser = parse_size)]
    image_size: Option<(u32, u32)>,
    #[arg(long, default_value_t = DEFAULT_IOU_THRESHOLD)]
    iou: f64,
    /// Class names for the table; defaults to classes.txt beside the truth.
    #[arg(long)]
    classes: Option<PathBuf>,
    /// Write the report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalTrackArgs {
    #[arg(long)]
    predictions: PathBuf,
    #[arg(long)]
    target_class: u32,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    dataset: PathBuf,
    #[arg(long)]
    json: bool,
}

fn parse_numbers<const N: usize, T: std::str::FromStr>(s: &str, sep: char, what: &str) -> Result<[T; N], String> {
    let parts: Vec<T> = s
        .split(sep)
        .map(|p| {
            p.trim()
                .parse::<T>()
                .map_err(|_| format!("{p:?} is not a valid {what} component"))
        })
        .collect::<Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|_| format!("{what} needs {N} values separated by {sep:?}"))
}

fn parse_rgb(s: &str) -> Result<[u8; 3], String> {
    parse_numbers(s, ',', "R,G,B")
}

fn parse_rect(s: &str) -> Result<Rect, String> {
    let [x, y, w, h] = parse_numbers(s, ',', "X,Y,W,H")?;
    Ok(Rect::new(x, y, w, h))
}

fn parse_size(s: &str) -> Result<(u32, u32), String> {
    let [w, h] = parse_numbers(&s.to_ascii_lowercase(), 'x', "WxH")?;
    if w == 0 || h == 0 {
        return Err("sizes must be positive".into());
    }
    Ok((w, h))
}

fn parse_mapping(s: &str) -> Result<BTreeMap<u32, u32>, String> {
    parse_class_mapping(s)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            if let Some(config) = e.downcast_ref::<ConfigError>() {
                eprintln!("error: {config}");
                ExitCode::from(3)
            } else {
                eprintln!("error: {e:#}");
                ExitCode::FAILURE
            }
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Extract(a) => extract(a),
        Command::Compose(a) => compose(a),
        Command::SampleFrames(a) => {
            let n = sample_frames(&a.input, a.stride, a.resize, &a.prefix, &a.output)?;
            println!("sampled {n} frames into {}", a.output.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Split(a) => split(a),
        Command::Rename(a) => rename(a),
        Command::Check(a) => check(&a.dataset),
        Command::Convert(a) => convert(a),
        Command::EvalMap(a) => eval_map(a),
        Command::EvalTrack(a) => {
            let report = tracking_from_dir(&a.predictions, a.target_class)?;
            if let Some(path) = &a.report {
                write_json(path, &report)?;
            }
            println!(
                "class {} over {} frames: single {:.2}%, multiple {:.2}%, none {:.2}%",
                a.target_class, report.frames_total, report.pct_single, report.pct_multiple, report.pct_none
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Stats(a) => {
            let stats = dataset_stats(&DatasetIndex::scan(&a.dataset)?)?;
            if a.json {
                println!("{}", serde_json::to_string_pretty(&stats)?);
            } else {
                for (class, n) in &stats.per_class {
                    println!("class {class}: {n}");
                }
                println!("{} objects in {} images", stats.total_objects, stats.images);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_config(path: &Path) -> Result<RunConfig> {
    Ok(validate_config(path)?)
}

fn extract(a: ExtractArgs) -> Result<ExitCode> {
    let mut params = match &a.config {
        Some(path) => load_config(path)?.key,
        None => KeyParams::default(),
    };
    if let Some(c) = a.background {
        params.background_color = c;
    }
    if let Some(t) = a.tolerance {
        params.tolerance = t;
    }
    if a.area.is_some() {
        params.area = a.area;
    }
    if let Some(n) = a.remove_outline {
        params.remove_outline = n;
    }
    let summary = extract_sprites(&a.input, &params, a.class_id, &a.output, &a.prefix)?;
    println!(
        "extracted {} sprites of class {} into {} ({} frames skipped)",
        summary.written,
        a.class_id,
        a.output.display(),
        summary.skipped.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn compose(a: ComposeArgs) -> Result<ExitCode> {
    let mut config = load_config(&a.config)?;
    if let Some(seed) = a.seed {
        config.scene.seed = seed;
    }
    if let Some(count) = a.count {
        config.scene.dataset_size = count;
    }
    let violations = config.violations();
    if !violations.is_empty() {
        return Err(ConfigError { violations }.into());
    }
    if a.jobs == Some(0) {
        bail!("--jobs must be at least 1");
    }

    let pools = config
        .scene
        .class_pools
        .iter()
        .map(|p| load_sprite_dir(&p.sprite_dir, p.class_id))
        .collect::<Result<Vec<_>, _>>()?;
    let size = config.scene.output_size;
    let backgrounds = load_backgrounds(&config.paths.backgrounds, size)?;
    let load_optional = |dir: &Option<PathBuf>| match dir {
        Some(d) => load_sprite_dir(d, 0),
        None => Ok(Vec::new()),
    };
    let distractors = Distractors {
        ui: load_optional(&config.paths.ui)?,
        cursors: load_optional(&config.paths.cursors)?,
        cursor_count: (config.distractors.cursor_min, config.distractors.cursor_max),
    };
    check_inputs(&config.scene, &pools, &backgrounds)?;

    let sprite_count: usize = pools.iter().map(Vec::len).sum();
    if a.dry_run {
        println!(
            "dry run: configuration valid; {} pools with {sprite_count} sprites, {} backgrounds; \
             would write {} scenes to {}",
            pools.len(),
            backgrounds.len(),
            config.scene.dataset_size,
            config.paths.output.display()
        );
        return Ok(ExitCode::SUCCESS);
    }
    let summary = generate_dataset(
        &config.scene,
        &pools,
        &distractors,
        &backgrounds,
        &config.output_spec(),
        a.jobs,
    )?;
    println!(
        "composed {} scenes with {} labels into {} (seed {})",
        summary.images,
        summary.labels,
        config.paths.output.display(),
        config.scene.seed
    );
    Ok(ExitCode::SUCCESS)
}

fn split(a: SplitArgs) -> Result<ExitCode> {
    if !(0.0..=1.0).contains(&a.test_fraction) {
        bail!("--test-fraction must lie in [0, 1], got {}", a.test_fraction);
    }
    let index = DatasetIndex::scan(&a.dataset)?;
    let (train, test) = split_train_test(&index, a.test_fraction, a.seed);
    let out = a.output.unwrap_or_else(|| a.dataset.join("splits"));
    train.write_manifest(&out.join("train.txt"))?;
    test.write_manifest(&out.join("test.txt"))?;
    println!(
        "split {} pairs into {} train and {} test manifests in {}",
        index.len(),
        train.len(),
        test.len(),
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn rename(a: RenameArgs) -> Result<ExitCode> {
    let files = list_label_files(&a.dataset).with_context(|| a.dataset.display().to_string())?;
    let renamed = files
        .values()
        .map(|path| {
            let file = LabelFile::read(path)?;
            let out = rename_classes(&file, &a.mapping).with_context(|| path.display().to_string())?;
            Ok((path, out))
        })
        .collect::<Result<Vec<_>>>()?;
    let target = a.output.as_deref().unwrap_or(&a.dataset);
    std::fs::create_dir_all(target)?;
    let mut records = 0;
    for (path, file) in &renamed {
        records += file.records.len();
        file.write(&target.join(path.file_name().expect("label files have names")))?;
    }
    println!(
        "renamed {records} records in {} label files into {}",
        renamed.len(),
        target.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn check(dataset: &Path) -> Result<ExitCode> {
    let report = check_integrity(dataset)?;
    for stem in &report.missing_labels {
        println!("missing label: {stem}");
    }
    for stem in &report.missing_images {
        println!("missing image: {stem}");
    }
    for m in &report.malformed {
        match m.line {
            Some(line) => println!("malformed label: {}.txt line {line}: {}", m.stem, m.message),
            None => println!("malformed label: {}.txt: {}", m.stem, m.message),
        }
    }
    if report.is_clean() {
        println!("{}: clean", dataset.display());
        Ok(ExitCode::SUCCESS)
    } else {
        println!(
            "{}: {} missing labels, {} missing images, {} malformed labels",
            dataset.display(),
            report.missing_labels.len(),
            report.missing_images.len(),
            report.malformed.len()
        );
        Ok(ExitCode::FAILURE)
    }
}

fn convert(a: ConvertArgs) -> Result<ExitCode> {
    let classes = ClassMap::read(&a.classes)?;
    let inputs: Vec<PathBuf> = if a.input.is_dir() {
        let mut v: Vec<PathBuf> = std::fs::read_dir(&a.input)?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        v.retain(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("xml")));
        v.sort();
        v
    } else {
        vec![a.input.clone()]
    };
    std::fs::create_dir_all(&a.output)?;
    let mut records = 0;
    for path in &inputs {
        let text = std::fs::read_to_string(path).with_context(|| path.display().to_string())?;
        let annotation = VocAnnotation::parse(&text).with_context(|| path.display().to_string())?;
        let mut file = convert_voc(&annotation, &classes).with_context(|| path.display().to_string())?;
        if file.stem.is_empty() {
            file.stem = synthscene::raster::file_stem(path);
        }
        records += file.records.len();
        file.write(&a.output.join(format!("{}.txt", file.stem)))?;
    }
    std::fs::write(a.output.join(CLASS_LIST_FILE), classes.to_text())?;
    println!(
        "converted {} annotations with {records} objects into {}",
        inputs.len(),
        a.output.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn eval_map(a: EvalMapArgs) -> Result<ExitCode> {
    if !(a.iou > 0.0 && a.iou <= 1.0) {
        bail!("--iou must lie in (0, 1], got {}", a.iou);
    }
    let report = evaluate_dirs(&a.truth, &a.predictions, a.image_size, a.iou)?;
    let names_path = a.classes.unwrap_or_else(|| a.truth.join(CLASS_LIST_FILE));
    let names = names_path.is_file().then(|| ClassMap::read(&names_path)).transpose()?;
    print!("{}", report.to_table(names.as_ref()));
    if let Some(path) = &a.report {
        write_json(path, &report)?;
    }
    match report.overall_map {
        Some(m) => println!("mAP {m:.4} over {} classes at IoU {}", report.classes.len(), a.iou),
        None => println!("no ground truth found in {}", a.truth.display()),
    }
    Ok(ExitCode::SUCCESS)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n").with_context(|| path.display().to_string())?;
    Ok(())
}
