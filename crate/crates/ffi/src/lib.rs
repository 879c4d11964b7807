//! C ABI over the trackseg pipeline: opaque handles, integer status codes,
//! and a thread-local last-error message.
//!
//! Every function that can fail returns a [`TracksegStatus`]; on failure the
//! UTF-8 message from [`trackseg_last_error`] stays valid until the next
//! call that fails on the same thread. Handles are created and destroyed by
//! this library only (`trackseg_video_free`, `trackseg_result_free`).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use trackseg::error::Error;
use trackseg::evalkit::{evaluate, EvalOptions, EvalSequence};
use trackseg::hysteresis::HysteresisConfig;
use trackseg::ingest;
use trackseg::pipeline::{process_video, PipelineMode, VideoInput, VideoResult};
use trackseg::raster::Connectivity;
use trackseg::synth::{generate, SynthConfig};
use trackseg::tracker::{SelectionKind, TrackerConfig};

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TracksegStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Configuration or input data rejected by the pipeline.
    InvalidArgument = 3,
    /// The operating system reported an I/O failure.
    Io = 4,
    /// A file existed but could not be parsed.
    Format = 5,
    /// The caller's buffer is too small for the requested data.
    BufferTooSmall = 6,
    /// A frame or selection index is out of range.
    OutOfRange = 7,
}

/// Pipeline mode; mirrors the CLI `--mode` values.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TracksegMode {
    Appearance = 0,
    Clip = 1,
    ClipTemporal = 2,
    ConnComp = 3,
    Full = 4,
}

impl From<TracksegMode> for PipelineMode {
    fn from(mode: TracksegMode) -> Self {
        match mode {
            TracksegMode::Appearance => PipelineMode::Appearance,
            TracksegMode::Clip => PipelineMode::Clip,
            TracksegMode::ClipTemporal => PipelineMode::ClipTemporal,
            TracksegMode::ConnComp => PipelineMode::ConnComp,
            TracksegMode::Full => PipelineMode::Full,
        }
    }
}

/// Flat configuration mirroring the CLI flags. `max_coast < 0` coasts
/// forever; `connectivity` must be 4 or 8.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct TracksegConfig {
    pub t_bin: f32,
    pub iou_first: f32,
    pub iou_temporal: f32,
    pub t_high: f32,
    pub t_low: f32,
    pub connectivity: u32,
    pub clip_low_to_box: bool,
    pub max_coast: i32,
}

impl TracksegConfig {
    fn defaults() -> Self {
        Self {
            t_bin: 0.5,
            iou_first: 0.3,
            iou_temporal: 0.3,
            t_high: 0.8,
            t_low: 0.4,
            connectivity: 8,
            clip_low_to_box: true,
            max_coast: -1,
        }
    }

    fn split(&self) -> Result<(TrackerConfig, HysteresisConfig), Error> {
        let connectivity = u8::try_from(self.connectivity)
            .ok()
            .and_then(Connectivity::from_u8)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "connectivity must be 4 or 8, got {}",
                    self.connectivity
                ))
            })?;
        let tracker = TrackerConfig {
            t_bin: self.t_bin,
            iou_first_frame_min: self.iou_first,
            iou_temporal: self.iou_temporal,
            max_coast: u32::try_from(self.max_coast).ok(),
            connectivity,
        };
        let hysteresis = HysteresisConfig {
            t_high: self.t_high,
            t_low: self.t_low,
            connectivity,
            clip_low_to_box: self.clip_low_to_box,
        };
        Ok((tracker, hysteresis))
    }
}

/// One box decision for one object in one frame. `kind` is 0 = detected,
/// 1 = appearance-tracked, 2 = coasted.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct TracksegSelection {
    pub object_id: u8,
    pub kind: u32,
    pub x_min: u32,
    pub y_min: u32,
    pub x_max: u32,
    pub y_max: u32,
    pub lost: bool,
}

/// Opaque: a loaded or generated video (annotation, maps, detections).
pub struct TracksegVideo {
    input: VideoInput,
    source: String,
}

/// Opaque: the per-frame masks and box decisions of one pipeline run.
pub struct TracksegResult {
    result: VideoResult,
    video: String,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: TracksegStatus, message: impl AsRef<str>) -> TracksegStatus {
    let text = message.as_ref().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(text).expect("NULs stripped above");
    });
    status
}

fn fail_with(err: &Error) -> TracksegStatus {
    let status = match err {
        Error::Io { .. } => TracksegStatus::Io,
        Error::Format { .. } => TracksegStatus::Format,
        _ => TracksegStatus::InvalidArgument,
    };
    fail(status, err.to_string())
}

/// Last failure message for this thread; empty until something fails.
/// The pointer is invalidated by the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn trackseg_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn trackseg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Fills `out` with the default configuration (the CLI defaults).
///
/// # Safety
/// `out` must point to writable memory for one `TracksegConfig`.
#[no_mangle]
pub unsafe extern "C" fn trackseg_config_default(out: *mut TracksegConfig) -> TracksegStatus {
    if out.is_null() {
        return fail(TracksegStatus::NullArgument, "out is null");
    }
    out.write(TracksegConfig::defaults());
    TracksegStatus::Ok
}

unsafe fn cstr_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, TracksegStatus> {
    if ptr.is_null() {
        return Err(fail(
            TracksegStatus::NullArgument,
            format!("{name} is null"),
        ));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(TracksegStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

/// Loads a video layout directory into a new handle.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn trackseg_video_load(
    path: *const c_char,
    out: *mut *mut TracksegVideo,
) -> TracksegStatus {
    if out.is_null() {
        return fail(TracksegStatus::NullArgument, "out is null");
    }
    let path = match cstr_arg(path, "path") {
        Ok(p) => p,
        Err(status) => return status,
    };
    match ingest::load_video(Path::new(path)) {
        Ok(input) => {
            out.write(Box::into_raw(Box::new(TracksegVideo {
                input,
                source: path.to_string(),
            })));
            TracksegStatus::Ok
        }
        Err(e) => fail_with(&e),
    }
}

/// Generates a lane-layout synthetic video (see the CLI `synth` command).
/// When `save_dir` is non-null the layout plus its `gt/` directory is also
/// written there.
///
/// # Safety
/// `save_dir` must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn trackseg_video_synth(
    seed: u64,
    frame_count: u32,
    width: u32,
    height: u32,
    distractors: u32,
    noise_sigma: f32,
    save_dir: *const c_char,
    out: *mut *mut TracksegVideo,
) -> TracksegStatus {
    if out.is_null() {
        return fail(TracksegStatus::NullArgument, "out is null");
    }
    let cfg = match SynthConfig::with_lane_layout(
        seed,
        frame_count as usize,
        width,
        height,
        distractors,
        noise_sigma,
    ) {
        Ok(cfg) => cfg,
        Err(e) => return fail_with(&e),
    };
    let seq = match generate(&cfg) {
        Ok(seq) => seq,
        Err(e) => return fail_with(&e),
    };
    let mut source = format!("synth:{seed}");
    if !save_dir.is_null() {
        let dir = match cstr_arg(save_dir, "save_dir") {
            Ok(d) => d,
            Err(status) => return status,
        };
        let name = Path::new(dir)
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "video".to_string());
        if let Err(e) = ingest::save_sequence(Path::new(dir), &seq, &name) {
            return fail_with(&e);
        }
        source = dir.to_string();
    }
    out.write(Box::into_raw(Box::new(TracksegVideo {
        input: seq.input,
        source,
    })));
    TracksegStatus::Ok
}

/// Releases a video handle; null is ignored.
///
/// # Safety
/// `video` must have come from this library and not been freed before.
#[no_mangle]
pub unsafe extern "C" fn trackseg_video_free(video: *mut TracksegVideo) {
    if !video.is_null() {
        drop(Box::from_raw(video));
    }
}

/// # Safety
/// `video` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn trackseg_video_width(video: *const TracksegVideo) -> u32 {
    video.as_ref().map_or(0, |v| v.input.width())
}

/// # Safety
/// `video` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn trackseg_video_height(video: *const TracksegVideo) -> u32 {
    video.as_ref().map_or(0, |v| v.input.height())
}

/// # Safety
/// `video` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn trackseg_video_frame_count(video: *const TracksegVideo) -> u32 {
    video.as_ref().map_or(0, |v| v.input.frame_count() as u32)
}

/// # Safety
/// `video` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn trackseg_video_object_count(video: *const TracksegVideo) -> u32 {
    video.as_ref().map_or(0, |v| v.input.object_ids().len() as u32)
}

/// Runs one pipeline mode over the video. `config` may be null for the
/// defaults.
///
/// # Safety
/// `video` must be a live handle; `config` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn trackseg_process(
    video: *const TracksegVideo,
    mode: TracksegMode,
    config: *const TracksegConfig,
    out: *mut *mut TracksegResult,
) -> TracksegStatus {
    if out.is_null() {
        return fail(TracksegStatus::NullArgument, "out is null");
    }
    let Some(video) = video.as_ref() else {
        return fail(TracksegStatus::NullArgument, "video is null");
    };
    let config = if config.is_null() {
        TracksegConfig::defaults()
    } else {
        *config
    };
    let (tracker, hysteresis) = match config.split() {
        Ok(pair) => pair,
        Err(e) => return fail_with(&e),
    };
    match process_video(&video.input, mode.into(), &tracker, &hysteresis) {
        Ok(result) => {
            out.write(Box::into_raw(Box::new(TracksegResult {
                result,
                video: video.source.clone(),
            })));
            TracksegStatus::Ok
        }
        Err(e) => fail_with(&e),
    }
}

/// Releases a result handle; null is ignored.
///
/// # Safety
/// `result` must have come from this library and not been freed before.
#[no_mangle]
pub unsafe extern "C" fn trackseg_result_free(result: *mut TracksegResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `result` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn trackseg_result_frame_count(result: *const TracksegResult) -> u32 {
    result.as_ref().map_or(0, |r| r.result.masks.len() as u32)
}

/// Copies one frame's indexed mask (row-major object ids, 0 = background)
/// into `buffer`, which must hold `width * height` bytes.
///
/// # Safety
/// `result` must be a live handle; `buffer` must point to `buffer_len`
/// writable bytes.
#[no_mangle]
pub unsafe extern "C" fn trackseg_result_mask(
    result: *const TracksegResult,
    frame: u32,
    buffer: *mut u8,
    buffer_len: usize,
) -> TracksegStatus {
    let Some(handle) = result.as_ref() else {
        return fail(TracksegStatus::NullArgument, "result is null");
    };
    if buffer.is_null() {
        return fail(TracksegStatus::NullArgument, "buffer is null");
    }
    let Some(mask) = handle.result.masks.get(frame as usize) else {
        return fail(
            TracksegStatus::OutOfRange,
            format!("frame {frame} out of range"),
        );
    };
    let data = mask.as_slice();
    if buffer_len < data.len() {
        return fail(
            TracksegStatus::BufferTooSmall,
            format!("need {} bytes, got {buffer_len}", data.len()),
        );
    }
    ptr::copy_nonoverlapping(data.as_ptr(), buffer, data.len());
    TracksegStatus::Ok
}

/// Number of box decisions recorded for a frame (0 for frame 0 and in
/// appearance mode).
///
/// # Safety
/// `result` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn trackseg_result_selection_count(
    result: *const TracksegResult,
    frame: u32,
) -> u32 {
    result.as_ref().map_or(0, |r| {
        r.result
            .selections
            .get(frame as usize)
            .map_or(0, |s| s.len() as u32)
    })
}

/// Fetches one recorded box decision.
///
/// # Safety
/// `result` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn trackseg_result_selection(
    result: *const TracksegResult,
    frame: u32,
    index: u32,
    out: *mut TracksegSelection,
) -> TracksegStatus {
    let Some(handle) = result.as_ref() else {
        return fail(TracksegStatus::NullArgument, "result is null");
    };
    if out.is_null() {
        return fail(TracksegStatus::NullArgument, "out is null");
    }
    let selection = handle
        .result
        .selections
        .get(frame as usize)
        .and_then(|s| s.get(index as usize));
    let Some(selection) = selection else {
        return fail(
            TracksegStatus::OutOfRange,
            format!("no selection {index} in frame {frame}"),
        );
    };
    out.write(TracksegSelection {
        object_id: selection.object_id,
        kind: match selection.kind {
            SelectionKind::Detected => 0,
            SelectionKind::AppearanceTracked => 1,
            SelectionKind::Coasted => 2,
        },
        x_min: selection.bbox.x_min(),
        y_min: selection.bbox.y_min(),
        x_max: selection.bbox.x_max(),
        y_max: selection.bbox.y_max(),
        lost: selection.lost,
    });
    TracksegStatus::Ok
}

/// Writes the result's masks and manifest to a directory, exactly like the
/// CLI `run` command.
///
/// # Safety
/// `result` must be a live handle; `dir` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn trackseg_result_save(
    result: *const TracksegResult,
    dir: *const c_char,
) -> TracksegStatus {
    let Some(handle) = result.as_ref() else {
        return fail(TracksegStatus::NullArgument, "result is null");
    };
    let dir = match cstr_arg(dir, "dir") {
        Ok(d) => d,
        Err(status) => return status,
    };
    match ingest::save_result(Path::new(dir), &handle.result, &handle.video, false) {
        Ok(()) => TracksegStatus::Ok,
        Err(e) => fail_with(&e),
    }
}

/// Scores a prediction mask directory against a ground-truth directory and
/// writes the global J mean to `j_mean_out` (see the CLI `eval` command).
///
/// # Safety
/// `pred_dir` and `gt_dir` must be NUL-terminated; `j_mean_out` writable.
#[no_mangle]
pub unsafe extern "C" fn trackseg_eval_dirs(
    pred_dir: *const c_char,
    gt_dir: *const c_char,
    exclude_last: bool,
    j_mean_out: *mut f64,
) -> TracksegStatus {
    if j_mean_out.is_null() {
        return fail(TracksegStatus::NullArgument, "j_mean_out is null");
    }
    let pred = match cstr_arg(pred_dir, "pred_dir") {
        Ok(p) => p,
        Err(status) => return status,
    };
    let gt = match cstr_arg(gt_dir, "gt_dir") {
        Ok(g) => g,
        Err(status) => return status,
    };
    let run = || -> Result<f64, Error> {
        let pairs = ingest::collect_eval_pairs(Path::new(pred), Path::new(gt))?;
        let mut loaded = Vec::with_capacity(pairs.len());
        for (name, pred_dir, gt_dir) in pairs {
            loaded.push((
                name,
                ingest::load_mask_dir(&pred_dir)?,
                ingest::load_mask_dir(&gt_dir)?,
            ));
        }
        let sequences: Vec<EvalSequence> = loaded
            .iter()
            .map(|(name, predicted, ground_truth)| EvalSequence {
                name: name.clone(),
                predicted,
                ground_truth,
            })
            .collect();
        Ok(evaluate(&sequences, &EvalOptions { exclude_last })?.global_mean)
    };
    match run() {
        Ok(j) => {
            j_mean_out.write(j);
            TracksegStatus::Ok
        }
        Err(e) => fail_with(&e),
    }
}
