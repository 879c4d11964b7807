//! Brute-force reference implementations: per-pixel scans, recursive flood
//! fill, and exhaustive argmax, sharing no algorithmic code with the fast
//! paths they verify. `oracle_pipeline` honors the same contract as
//! `pipeline::process_video` and must match it bit for bit.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::hysteresis::HysteresisConfig;
use crate::pipeline::{ObjectSelection, PipelineMode, VideoInput, VideoResult};
use crate::raster::{BinaryMask, Connectivity, GrayMap, IndexedMask};
use crate::tracker::{Detection, Selection, SelectionKind, TrackState, TrackerConfig};

/// Box IoU by enumerating every pixel of the joint extent.
pub fn pixel_box_iou(a: &BBox, b: &BBox) -> f64 {
    let x_lo = a.x_min().min(b.x_min());
    let x_hi = a.x_max().max(b.x_max());
    let y_lo = a.y_min().min(b.y_min());
    let y_hi = a.y_max().max(b.y_max());
    let mut in_a: u64 = 0;
    let mut in_b: u64 = 0;
    let mut in_both: u64 = 0;
    for y in y_lo..y_hi {
        for x in x_lo..x_hi {
            let pa = a.contains(x, y);
            let pb = b.contains(x, y);
            in_a += u64::from(pa);
            in_b += u64::from(pb);
            in_both += u64::from(pa && pb);
        }
    }
    in_both as f64 / (in_a + in_b - in_both) as f64
}

/// Mask/box set-IoU by enumerating every pixel of the image.
pub fn pixel_mask_box_iou(mask: &BinaryMask, bbox: &BBox) -> f64 {
    let mut in_mask: u64 = 0;
    let mut in_box: u64 = 0;
    let mut in_both: u64 = 0;
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            let m = mask.get(x, y);
            let b = bbox.contains(x, y);
            in_mask += u64::from(m);
            in_box += u64::from(b);
            in_both += u64::from(m && b);
        }
    }
    in_both as f64 / (in_mask + in_box - in_both) as f64
}

fn dfs(
    mask: &BinaryMask,
    conn: Connectivity,
    x: u32,
    y: u32,
    visited: &mut [bool],
    component: &mut Vec<(u32, u32)>,
) {
    visited[y as usize * mask.width() as usize + x as usize] = true;
    component.push((x, y));
    for &(dx, dy) in conn.offsets() {
        let nx = x as i64 + i64::from(dx);
        let ny = y as i64 + i64::from(dy);
        if nx < 0 || ny < 0 || nx >= i64::from(mask.width()) || ny >= i64::from(mask.height()) {
            continue;
        }
        let (nx, ny) = (nx as u32, ny as u32);
        if mask.get(nx, ny) && !visited[ny as usize * mask.width() as usize + nx as usize] {
            dfs(mask, conn, nx, ny, visited, component);
        }
    }
}

/// Recursive flood fill; components come out in raster-scan order of their
/// first pixel.
pub fn flood_fill_components(mask: &BinaryMask, conn: Connectivity) -> Vec<Vec<(u32, u32)>> {
    let mut visited = vec![false; mask.width() as usize * mask.height() as usize];
    let mut out = Vec::new();
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.get(x, y) && !visited[y as usize * mask.width() as usize + x as usize] {
                let mut component = Vec::new();
                dfs(mask, conn, x, y, &mut visited, &mut component);
                out.push(component);
            }
        }
    }
    out
}

pub fn naive_threshold(map: &GrayMap, t: f32) -> BinaryMask {
    let mut out = BinaryMask::empty(map.width(), map.height());
    for y in 0..map.height() {
        for x in 0..map.width() {
            if map.get(x, y) >= t {
                out.set(x, y, true);
            }
        }
    }
    out
}

pub fn naive_bbox_clip(map: &GrayMap, boxes: &[BBox]) -> GrayMap {
    GrayMap::from_fn(map.width(), map.height(), |x, y| {
        if boxes.iter().any(|b| b.contains(x, y)) {
            map.get(x, y)
        } else {
            0.0
        }
    })
}

/// Two-pass strong/weak filtering done entirely with flood fill and pixel
/// membership tests.
pub fn naive_hysteresis(
    map: &GrayMap,
    boxes: &[BBox],
    cfg: &HysteresisConfig,
) -> Result<BinaryMask> {
    cfg.validate()?;
    if boxes.is_empty() {
        return Err(Error::NoBoxes);
    }
    for b in boxes {
        if !b.fits_in(map.width(), map.height()) {
            return Err(Error::BoxOutOfBounds {
                bbox: *b,
                width: map.width(),
                height: map.height(),
            });
        }
    }

    let strong = naive_threshold(map, cfg.t_high);
    let mut strong_kept = BinaryMask::empty(map.width(), map.height());
    for component in flood_fill_components(&strong, cfg.connectivity) {
        if component
            .iter()
            .any(|&(x, y)| boxes.iter().any(|b| b.contains(x, y)))
        {
            for &(x, y) in &component {
                strong_kept.set(x, y, true);
            }
        }
    }

    let mut weak = naive_threshold(map, cfg.t_low);
    if cfg.clip_low_to_box {
        for y in 0..weak.height() {
            for x in 0..weak.width() {
                if !boxes.iter().any(|b| b.contains(x, y)) {
                    weak.set(x, y, false);
                }
            }
        }
    }

    let mut out = strong_kept.clone();
    for component in flood_fill_components(&weak, cfg.connectivity) {
        if component.iter().any(|&(x, y)| strong_kept.get(x, y)) {
            for &(x, y) in &component {
                out.set(x, y, true);
            }
        }
    }
    Ok(out)
}

fn naive_tight_box(mask: &BinaryMask) -> Option<BBox> {
    let mut bounds: Option<(u32, u32, u32, u32)> = None;
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if !mask.get(x, y) {
                continue;
            }
            bounds = Some(match bounds {
                None => (x, y, x, y),
                Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
            });
        }
    }
    bounds.map(|(x0, y0, x1, y1)| BBox::new(x0, y0, x1 + 1, y1 + 1))
}

fn naive_init(
    detections: &[Detection],
    gt_mask: &BinaryMask,
    object_id: u8,
    cfg: &TrackerConfig,
) -> Result<TrackState> {
    if gt_mask.count_foreground() == 0 {
        return Err(Error::EmptyObjectMask { object_id });
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, det) in detections.iter().enumerate() {
        let overlap = pixel_mask_box_iou(gt_mask, &det.bbox);
        let replace = match best {
            None => true,
            Some((bi, bo)) => {
                overlap > bo || (overlap == bo && det.score > detections[bi].score)
            }
        };
        if replace {
            best = Some((i, overlap));
        }
    }
    if let Some((i, overlap)) = best {
        if overlap >= f64::from(cfg.iou_first_frame_min) {
            return Ok(TrackState {
                object_id,
                class_set: [detections[i].class_id].into(),
                prev_box: detections[i].bbox,
                coast_count: 0,
            });
        }
    }
    Ok(TrackState {
        object_id,
        class_set: Default::default(),
        prev_box: naive_tight_box(gt_mask).expect("nonempty mask"),
        coast_count: 0,
    })
}

fn naive_select(
    state: &mut TrackState,
    detections: &[Detection],
    map: &GrayMap,
    cfg: &TrackerConfig,
    temporal_gate: bool,
) -> Selection {
    let binarized = naive_threshold(map, cfg.t_bin);

    if !state.class_set.is_empty() {
        let mut candidates: Vec<&Detection> = detections
            .iter()
            .filter(|d| state.class_set.contains(&d.class_id))
            .collect();
        if temporal_gate {
            candidates.retain(|d| {
                pixel_box_iou(&d.bbox, &state.prev_box) >= f64::from(cfg.iou_temporal)
            });
        }
        if !candidates.is_empty() {
            let mut best = 0;
            let mut best_fit = pixel_mask_box_iou(&binarized, &candidates[0].bbox);
            for (i, det) in candidates.iter().enumerate().skip(1) {
                let fit = pixel_mask_box_iou(&binarized, &det.bbox);
                if fit > best_fit || (fit == best_fit && det.score > candidates[best].score) {
                    best = i;
                    best_fit = fit;
                }
            }
            let winner = candidates[best];
            state.prev_box = winner.bbox;
            state.coast_count = 0;
            return Selection {
                bbox: winner.bbox,
                kind: SelectionKind::Detected,
                lost: false,
            };
        }
    }

    let touched: Vec<Vec<(u32, u32)>> = flood_fill_components(&binarized, cfg.connectivity)
        .into_iter()
        .filter(|c| c.iter().any(|&(x, y)| state.prev_box.contains(x, y)))
        .collect();
    if !touched.is_empty() {
        let mut union = BinaryMask::empty(map.width(), map.height());
        for component in &touched {
            for &(x, y) in component {
                union.set(x, y, true);
            }
        }
        let bbox = naive_tight_box(&union).expect("nonempty union");
        state.prev_box = bbox;
        state.coast_count = 0;
        return Selection {
            bbox,
            kind: SelectionKind::AppearanceTracked,
            lost: false,
        };
    }

    state.coast_count += 1;
    let lost = cfg.max_coast.is_some_and(|limit| state.coast_count > limit);
    Selection {
        bbox: state.prev_box,
        kind: SelectionKind::Coasted,
        lost,
    }
}

fn naive_compose(
    input: &VideoInput,
    frame: usize,
    object_masks: &[(u8, BinaryMask)],
) -> IndexedMask {
    let mut out = IndexedMask::empty(input.width(), input.height());
    for y in 0..input.height() {
        for x in 0..input.width() {
            let mut best_value = f32::NEG_INFINITY;
            let mut best_id = 0u8;
            for &(id, ref mask) in object_masks {
                if !mask.get(x, y) {
                    continue;
                }
                let value = input.map_for(id, frame).get(x, y);
                if best_id == 0 || value > best_value {
                    best_value = value;
                    best_id = id;
                }
            }
            out.set(x, y, best_id);
        }
    }
    out
}

/// Reference pipeline with the same contract as `pipeline::process_video`,
/// intended for small inputs (tens of frames at 64x64 or less).
pub fn oracle_pipeline(
    input: &VideoInput,
    mode: PipelineMode,
    tracker_cfg: &TrackerConfig,
    hyst_cfg: &HysteresisConfig,
) -> Result<VideoResult> {
    tracker_cfg.validate()?;
    hyst_cfg.validate()?;

    let object_ids = input.object_ids();
    let uses_tracker = mode != PipelineMode::Appearance;
    let temporal_gate = matches!(mode, PipelineMode::ClipTemporal | PipelineMode::Full);

    let mut states: BTreeMap<u8, TrackState> = BTreeMap::new();
    if uses_tracker {
        for &id in &object_ids {
            let gt = input.annotation().mask_for(id);
            states.insert(
                id,
                naive_init(&input.detections()[0], &gt, id, tracker_cfg)?,
            );
        }
    }

    let mut masks = vec![input.annotation().clone()];
    let mut selections: Vec<Vec<ObjectSelection>> = vec![Vec::new()];

    for frame in 1..input.frame_count() {
        let mut frame_selections = Vec::new();
        let mut object_masks = Vec::new();
        for &id in &object_ids {
            let map = input.map_for(id, frame);
            let mask = if uses_tracker {
                let state = states.get_mut(&id).expect("initialized above");
                let sel = naive_select(
                    state,
                    &input.detections()[frame],
                    map,
                    tracker_cfg,
                    temporal_gate,
                );
                frame_selections.push(ObjectSelection {
                    object_id: id,
                    kind: sel.kind,
                    bbox: sel.bbox,
                    lost: sel.lost,
                });
                match mode {
                    PipelineMode::Clip | PipelineMode::ClipTemporal => {
                        naive_threshold(&naive_bbox_clip(map, &[sel.bbox]), tracker_cfg.t_bin)
                    }
                    _ => naive_hysteresis(map, &[sel.bbox], hyst_cfg)?,
                }
            } else {
                naive_threshold(map, tracker_cfg.t_bin)
            };
            object_masks.push((id, mask));
        }
        masks.push(naive_compose(input, frame, &object_masks));
        selections.push(frame_selections);
    }

    Ok(VideoResult {
        mode,
        tracker: *tracker_cfg,
        hysteresis: *hyst_cfg,
        masks,
        selections,
    })
}
