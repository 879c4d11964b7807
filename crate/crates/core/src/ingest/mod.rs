//! On-disk formats and persistence.
//!
//! A video layout directory holds `annotation.png` (8-bit indexed, pixel
//! value = object id), `detections.json`, `maps/<object_id>/<frame>.png`
//! (8-bit grayscale probability, value/255; 16-bit accepted as value/65535)
//! with `maps/shared/` as the single-sequence variant, and optionally
//! `gt/<frame>.png` for evaluation. Frame files are zero-padded to five
//! digits and contiguous from 00000. A run output directory holds the
//! per-frame indexed masks plus `manifest.json`, which echoes enough
//! configuration to reproduce the run bit-exactly.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evalkit::EvalReport;
use crate::geometry::BBox;
use crate::hysteresis::HysteresisConfig;
use crate::pipeline::{
    process_video, MapSet, ObjectSelection, PipelineMode, VideoInput, VideoResult,
};
use crate::raster::{GrayMap, IndexedMask};
use crate::synth::SyntheticSequence;
use crate::tracker::{Detection, TrackerConfig};

pub const MANIFEST_VERSION: u32 = 1;

fn frame_file_name(index: usize) -> String {
    format!("{index:05}.png")
}

// ---------------------------------------------------------------------------
// PNG helpers
// ---------------------------------------------------------------------------

fn open_image(path: &Path) -> Result<image::DynamicImage> {
    image::open(path).map_err(|e| Error::format(path, e.to_string()))
}

fn load_map_png(path: &Path) -> Result<GrayMap> {
    match open_image(path)? {
        image::DynamicImage::ImageLuma8(buf) => {
            let (w, h) = buf.dimensions();
            let data = buf.into_raw().into_iter().map(|v| f32::from(v) / 255.0).collect();
            Ok(GrayMap::new(w, h, data))
        }
        image::DynamicImage::ImageLuma16(buf) => {
            let (w, h) = buf.dimensions();
            let data = buf.into_raw().into_iter().map(|v| f32::from(v) / 65535.0).collect();
            Ok(GrayMap::new(w, h, data))
        }
        _ => Err(Error::format(
            path,
            "expected an 8-bit or 16-bit grayscale PNG",
        )),
    }
}

/// Maps are persisted at 8-bit precision; values land on the same 1/255
/// grid the loader produces, so generator output survives a round trip
/// unchanged.
fn save_map_png(path: &Path, map: &GrayMap) -> Result<()> {
    let data: Vec<u8> = map
        .as_slice()
        .iter()
        .map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8)
        .collect();
    let img = image::GrayImage::from_raw(map.width(), map.height(), data)
        .expect("buffer sized to dimensions");
    img.save(path).map_err(|e| Error::format(path, e.to_string()))
}

fn load_indexed_png(path: &Path) -> Result<IndexedMask> {
    match open_image(path)? {
        image::DynamicImage::ImageLuma8(buf) => {
            let (w, h) = buf.dimensions();
            Ok(IndexedMask::new(w, h, buf.into_raw()))
        }
        _ => Err(Error::format(path, "expected an 8-bit grayscale PNG")),
    }
}

fn save_indexed_png(path: &Path, mask: &IndexedMask) -> Result<()> {
    let img = image::GrayImage::from_raw(mask.width(), mask.height(), mask.as_slice().to_vec())
        .expect("buffer sized to dimensions");
    img.save(path).map_err(|e| Error::format(path, e.to_string()))
}

// ---------------------------------------------------------------------------
// Partial-output cleanup
// ---------------------------------------------------------------------------

/// Records everything a save operation creates so a failure removes the
/// partial output instead of leaving it behind.
struct OutWriter {
    created_dirs: Vec<PathBuf>,
    created_files: Vec<PathBuf>,
}

impl OutWriter {
    fn new() -> Self {
        Self {
            created_dirs: Vec::new(),
            created_files: Vec::new(),
        }
    }

    fn ensure_dir(&mut self, path: &Path) -> Result<()> {
        let mut missing = Vec::new();
        let mut probe = path;
        loop {
            if probe.as_os_str().is_empty() || probe.exists() {
                break;
            }
            missing.push(probe.to_path_buf());
            match probe.parent() {
                Some(parent) => probe = parent,
                None => break,
            }
        }
        fs::create_dir_all(path).map_err(|e| Error::io(path, e))?;
        // Deepest directories were pushed first; remember creation order.
        missing.reverse();
        self.created_dirs.extend(missing);
        Ok(())
    }

    fn write(&mut self, path: &Path, write: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
        self.created_files.push(path.to_path_buf());
        write(path)
    }

    fn finish<T>(self, outcome: Result<T>) -> Result<T> {
        if outcome.is_err() {
            for file in &self.created_files {
                let _ = fs::remove_file(file);
            }
            for dir in self.created_dirs.iter().rev() {
                let _ = fs::remove_dir(dir);
            }
        }
        outcome
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::format(path, e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))
}

// ---------------------------------------------------------------------------
// detections.json
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct DetectionsDoc {
    video: String,
    frames: Vec<FrameDoc>,
}

#[derive(Serialize, Deserialize)]
struct FrameDoc {
    index: usize,
    detections: Vec<DetectionDoc>,
}

/// Raw detection record: box coordinates are plain integers that may hang
/// over the image edge until load-time clipping.
#[derive(Serialize, Deserialize)]
struct DetectionDoc {
    class_id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    class_name: Option<String>,
    score: f32,
    #[serde(rename = "box")]
    bbox: [i64; 4],
}

fn load_detections(path: &Path, width: u32, height: u32) -> Result<Vec<Vec<Detection>>> {
    let doc: DetectionsDoc = read_json(path)?;
    let frame_count = doc.frames.len();
    let mut by_index: Vec<Option<&FrameDoc>> = vec![None; frame_count];
    for frame in &doc.frames {
        match by_index.get_mut(frame.index) {
            Some(slot @ None) => *slot = Some(frame),
            Some(_) => {
                return Err(Error::format(
                    path,
                    format!("frame index {} appears more than once", frame.index),
                ))
            }
            None => {
                return Err(Error::format(
                    path,
                    format!(
                        "frame index {} out of range for {frame_count} frames",
                        frame.index
                    ),
                ))
            }
        }
    }
    let missing: Vec<usize> = by_index
        .iter()
        .enumerate()
        .filter(|(_, f)| f.is_none())
        .map(|(i, _)| i)
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingFrames {
            what: path.display().to_string(),
            indices: missing,
        });
    }

    let mut out = Vec::with_capacity(frame_count);
    for frame in by_index.into_iter().flatten() {
        let mut dets = Vec::with_capacity(frame.detections.len());
        for (i, doc) in frame.detections.iter().enumerate() {
            if !(0.0..=1.0).contains(&doc.score) {
                return Err(Error::format(
                    path,
                    format!(
                        "frame {}: detection {i} score {} outside [0, 1]",
                        frame.index, doc.score
                    ),
                ));
            }
            let [x0, y0, x1, y1] = doc.bbox;
            let clamp = |v: i64, hi: u32| v.clamp(0, i64::from(hi)) as u32;
            match BBox::try_new(
                clamp(x0, width),
                clamp(y0, height),
                clamp(x1, width),
                clamp(y1, height),
            ) {
                Some(bbox) => {
                    if bbox.to_array().map(i64::from) != [x0, y0, x1, y1] {
                        log::warn!(
                            "{}: frame {}: clipped box [{x0},{y0},{x1},{y1}] to {bbox}",
                            path.display(),
                            frame.index
                        );
                    }
                    dets.push(Detection {
                        class_id: doc.class_id,
                        class_name: doc.class_name.clone(),
                        score: doc.score,
                        bbox,
                    });
                }
                None => log::warn!(
                    "{}: frame {}: dropped box [{x0},{y0},{x1},{y1}] degenerate after clipping",
                    path.display(),
                    frame.index
                ),
            }
        }
        out.push(dets);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Video layout
// ---------------------------------------------------------------------------

fn load_map_sequence(
    dir: &Path,
    frame_count: usize,
    width: u32,
    height: u32,
) -> Result<Vec<GrayMap>> {
    let missing: Vec<usize> = (0..frame_count)
        .filter(|&i| !dir.join(frame_file_name(i)).is_file())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingFrames {
            what: dir.display().to_string(),
            indices: missing,
        });
    }
    let png_files = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|ext| ext == "png"))
        .count();
    if png_files != frame_count {
        return Err(Error::format(
            dir,
            format!("expected {frame_count} frames, found {png_files} png files"),
        ));
    }
    let mut maps = Vec::with_capacity(frame_count);
    for i in 0..frame_count {
        let path = dir.join(frame_file_name(i));
        let map = load_map_png(&path)?;
        if (map.width(), map.height()) != (width, height) {
            return Err(Error::DimensionMismatch {
                what: path.display().to_string(),
                expected_w: width,
                expected_h: height,
                actual_w: map.width(),
                actual_h: map.height(),
            });
        }
        maps.push(map);
    }
    Ok(maps)
}

/// Loads and validates a video layout directory.
pub fn load_video(root: &Path) -> Result<VideoInput> {
    let annotation_path = root.join("annotation.png");
    let annotation = load_indexed_png(&annotation_path)?;
    let object_ids = annotation.object_ids();
    if object_ids.is_empty() {
        return Err(Error::format(&annotation_path, "no annotated objects"));
    }
    let (width, height) = (annotation.width(), annotation.height());

    let detections = load_detections(&root.join("detections.json"), width, height)?;
    let frame_count = detections.len();

    let maps_dir = root.join("maps");
    let mut subdirs: Vec<String> = fs::read_dir(&maps_dir)
        .map_err(|e| Error::io(&maps_dir, e))?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_dir())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    subdirs.sort();

    let maps = if subdirs == ["shared"] {
        MapSet::Shared(load_map_sequence(
            &maps_dir.join("shared"),
            frame_count,
            width,
            height,
        )?)
    } else {
        let mut by_id = BTreeMap::new();
        for name in &subdirs {
            let id: u8 = name.parse().map_err(|_| {
                Error::format(
                    &maps_dir,
                    format!("map directory {name:?} is neither an object id nor \"shared\""),
                )
            })?;
            if !object_ids.contains(&id) {
                return Err(Error::format(
                    &maps_dir,
                    format!("map directory for unannotated object {id}"),
                ));
            }
            by_id.insert(
                id,
                load_map_sequence(&maps_dir.join(name), frame_count, width, height)?,
            );
        }
        for id in &object_ids {
            if !by_id.contains_key(id) {
                return Err(Error::format(
                    &maps_dir,
                    format!("no map directory for object {id}"),
                ));
            }
        }
        MapSet::PerObject(by_id)
    };

    VideoInput::new(annotation, maps, detections)
}

/// Writes a video layout; failures remove whatever was created.
pub fn save_video(root: &Path, video: &VideoInput, name: &str) -> Result<()> {
    let mut w = OutWriter::new();
    let outcome = save_video_inner(&mut w, root, video, name);
    w.finish(outcome)
}

fn save_video_inner(w: &mut OutWriter, root: &Path, video: &VideoInput, name: &str) -> Result<()> {
    w.ensure_dir(root)?;
    w.write(&root.join("annotation.png"), |p| {
        save_indexed_png(p, video.annotation())
    })?;

    let doc = DetectionsDoc {
        video: name.to_string(),
        frames: video
            .detections()
            .iter()
            .enumerate()
            .map(|(index, dets)| FrameDoc {
                index,
                detections: dets
                    .iter()
                    .map(|d| DetectionDoc {
                        class_id: d.class_id,
                        class_name: d.class_name.clone(),
                        score: d.score,
                        bbox: d.bbox.to_array().map(i64::from),
                    })
                    .collect(),
            })
            .collect(),
    };
    w.write(&root.join("detections.json"), |p| write_json(p, &doc))?;

    let save_seq = |w: &mut OutWriter, dir: PathBuf, maps: &[GrayMap]| -> Result<()> {
        w.ensure_dir(&dir)?;
        for (i, map) in maps.iter().enumerate() {
            w.write(&dir.join(frame_file_name(i)), |p| save_map_png(p, map))?;
        }
        Ok(())
    };
    match video.maps() {
        MapSet::Shared(maps) => save_seq(w, root.join("maps").join("shared"), maps)?,
        MapSet::PerObject(by_id) => {
            for (id, maps) in by_id {
                save_seq(w, root.join("maps").join(id.to_string()), maps)?;
            }
        }
    }
    Ok(())
}

/// Writes a synthetic sequence as a video layout plus its `gt/` directory.
pub fn save_sequence(root: &Path, seq: &SyntheticSequence, name: &str) -> Result<()> {
    let mut w = OutWriter::new();
    let outcome = (|| {
        save_video_inner(&mut w, root, &seq.input, name)?;
        let gt_dir = root.join("gt");
        w.ensure_dir(&gt_dir)?;
        for (i, mask) in seq.ground_truth.iter().enumerate() {
            w.write(&gt_dir.join(frame_file_name(i)), |p| {
                save_indexed_png(p, mask)
            })?;
        }
        Ok(())
    })();
    w.finish(outcome)
}

/// Loads a flat directory of contiguous indexed masks (`00000.png`, ...),
/// e.g. a `gt/` directory or a run's output masks.
pub fn load_mask_dir(dir: &Path) -> Result<Vec<IndexedMask>> {
    let mut count = 0;
    let mut stray = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.extension().is_some_and(|ext| ext == "png") {
            count += 1;
            let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned());
            if !stem.as_deref().is_some_and(|s| s.len() == 5 && s.chars().all(|c| c.is_ascii_digit())) {
                stray.push(path.clone());
            }
        }
    }
    if let Some(path) = stray.first() {
        return Err(Error::format(
            path,
            "mask files must be named by five-digit frame index",
        ));
    }
    if count == 0 {
        return Err(Error::format(dir, "no mask frames found"));
    }
    let missing: Vec<usize> = (0..count)
        .filter(|&i| !dir.join(frame_file_name(i)).is_file())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingFrames {
            what: dir.display().to_string(),
            indices: missing,
        });
    }
    let mut masks = Vec::with_capacity(count);
    for i in 0..count {
        masks.push(load_indexed_png(&dir.join(frame_file_name(i)))?);
    }
    Ok(masks)
}

// ---------------------------------------------------------------------------
// Run results and the manifest
// ---------------------------------------------------------------------------

/// Everything needed to reproduce a run: the input path, the full
/// configuration, and the per-frame box decisions for inspection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format_version: u32,
    pub video: String,
    pub mode: PipelineMode,
    pub tracker: TrackerConfig,
    pub hysteresis: HysteresisConfig,
    pub exclude_last: bool,
    pub frames: Vec<ManifestFrame>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestFrame {
    pub index: usize,
    pub selections: Vec<ObjectSelection>,
}

/// Writes the per-frame masks and `manifest.json`; failures remove
/// whatever was created.
pub fn save_result(dir: &Path, result: &VideoResult, video: &str, exclude_last: bool) -> Result<()> {
    let mut w = OutWriter::new();
    let outcome = (|| {
        w.ensure_dir(dir)?;
        for (i, mask) in result.masks.iter().enumerate() {
            w.write(&dir.join(frame_file_name(i)), |p| save_indexed_png(p, mask))?;
        }
        let manifest = RunManifest {
            format_version: MANIFEST_VERSION,
            video: video.to_string(),
            mode: result.mode,
            tracker: result.tracker,
            hysteresis: result.hysteresis,
            exclude_last,
            frames: result
                .selections
                .iter()
                .enumerate()
                .map(|(index, selections)| ManifestFrame {
                    index,
                    selections: selections.clone(),
                })
                .collect(),
        };
        w.write(&dir.join("manifest.json"), |p| write_json(p, &manifest))
    })();
    w.finish(outcome)
}

/// Reads a run output directory back into a result plus its manifest.
pub fn load_result(dir: &Path) -> Result<(VideoResult, RunManifest)> {
    let manifest_path = dir.join("manifest.json");
    let manifest: RunManifest = read_json(&manifest_path)?;
    if manifest.format_version != MANIFEST_VERSION {
        return Err(Error::format(
            &manifest_path,
            format!(
                "manifest version {} unsupported (expected {MANIFEST_VERSION})",
                manifest.format_version
            ),
        ));
    }
    for (position, frame) in manifest.frames.iter().enumerate() {
        if frame.index != position {
            return Err(Error::format(
                &manifest_path,
                format!("frame entries out of order at position {position}"),
            ));
        }
    }
    let masks = load_mask_dir(dir)?;
    if masks.len() != manifest.frames.len() {
        return Err(Error::format(
            &manifest_path,
            format!(
                "manifest lists {} frames but {} masks are present",
                manifest.frames.len(),
                masks.len()
            ),
        ));
    }
    let result = VideoResult {
        mode: manifest.mode,
        tracker: manifest.tracker,
        hysteresis: manifest.hysteresis,
        masks,
        selections: manifest.frames.iter().map(|f| f.selections.clone()).collect(),
    };
    Ok((result, manifest))
}

// ---------------------------------------------------------------------------
// High-level run / eval entry points
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: PipelineMode,
    pub tracker: TrackerConfig,
    pub hysteresis: HysteresisConfig,
    pub exclude_last: bool,
}

/// Loads a layout, runs the pipeline, and persists the result.
pub fn run_on_layout(video_root: &Path, out_dir: &Path, cfg: &RunConfig) -> Result<()> {
    let input = load_video(video_root)?;
    let result = process_video(&input, cfg.mode, &cfg.tracker, &cfg.hysteresis)?;
    save_result(
        out_dir,
        &result,
        &video_root.display().to_string(),
        cfg.exclude_last,
    )
}

/// True when the directory is itself a video layout (as opposed to a batch
/// directory of layouts).
pub fn is_video_layout(dir: &Path) -> bool {
    dir.join("annotation.png").is_file()
}

/// Sorted subdirectories that are video layouts.
pub fn list_video_layouts(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut layouts: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_dir() && is_video_layout(p))
        .collect();
    layouts.sort();
    if layouts.is_empty() {
        return Err(Error::format(
            dir,
            "no video layouts found (expected annotation.png here or in subdirectories)",
        ));
    }
    Ok(layouts)
}

fn is_mask_dir(dir: &Path) -> bool {
    dir.join(frame_file_name(0)).is_file()
}

/// Pairs prediction and ground-truth mask directories by video name.
/// Single-video inputs pair the two directories directly; batch inputs pair
/// same-named subdirectories.
pub fn collect_eval_pairs(pred: &Path, gt: &Path) -> Result<Vec<(String, PathBuf, PathBuf)>> {
    if is_mask_dir(pred) {
        let name = pred
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "video".to_string());
        return Ok(vec![(name, pred.to_path_buf(), gt.to_path_buf())]);
    }
    let mut names: Vec<String> = fs::read_dir(pred)
        .map_err(|e| Error::io(pred, e))?
        .filter_map(|e| e.ok())
        .filter(|e| is_mask_dir(&e.path()))
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    if names.is_empty() {
        return Err(Error::format(
            pred,
            "no prediction masks found (expected 00000.png here or in subdirectories)",
        ));
    }
    names
        .into_iter()
        .map(|name| {
            let gt_dir = gt.join(&name);
            if !is_mask_dir(&gt_dir) {
                return Err(Error::format(
                    &gt_dir,
                    "no ground-truth masks for this video",
                ));
            }
            Ok((name.clone(), pred.join(&name), gt_dir))
        })
        .collect()
}

/// Writes the machine-readable evaluation summary.
pub fn write_eval_summary(path: &Path, report: &EvalReport) -> Result<()> {
    write_json(path, report)
}

/// Renders the report as a fixed-width text table.
pub fn format_eval_table(report: &EvalReport, per_frame: bool) -> String {
    use std::fmt::Write as _;

    let mut out = String::new();
    let name_w = report
        .videos
        .iter()
        .map(|v| v.name.len())
        .max()
        .unwrap_or(5)
        .max(5);
    let _ = writeln!(
        out,
        "{:<name_w$}  {:>6}  {:>6}  {:>8}",
        "video", "object", "frames", "J_mean"
    );
    let _ = writeln!(out, "{}", "-".repeat(name_w + 26));
    for video in &report.videos {
        for object in &video.objects {
            let _ = writeln!(
                out,
                "{:<name_w$}  {:>6}  {:>6}  {:>8.4}",
                video.name,
                object.object_id,
                object.frames.len(),
                object.mean
            );
            if per_frame {
                for frame in &object.frames {
                    let _ = writeln!(
                        out,
                        "{:<name_w$}  {:>6}  {:>6}  {:>8.4}",
                        "",
                        "",
                        frame.frame,
                        frame.jaccard
                    );
                }
            }
        }
        if video.objects.len() > 1 {
            let _ = writeln!(
                out,
                "{:<name_w$}  {:>6}  {:>6}  {:>8.4}",
                video.name, "mean", "", video.mean
            );
        }
    }
    let _ = writeln!(out, "{}", "-".repeat(name_w + 26));
    let _ = writeln!(out, "{:<name_w$}  {:>22.4}", "J_mean", report.global_mean);
    out
}
