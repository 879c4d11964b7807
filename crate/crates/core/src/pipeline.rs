//! Per-video orchestration: tracker plus mask filtering per object per
//! frame, the five ablation modes, and multi-object overlap resolution.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::hysteresis::{self, HysteresisConfig};
use crate::raster::{BinaryMask, GrayMap, IndexedMask};
use crate::tracker::{self, Detection, SelectionKind, TrackState, TrackerConfig};

/// Which stage combination produces the output masks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PipelineMode {
    /// Binarized appearance map only; no boxes involved.
    #[serde(rename = "appearance")]
    Appearance,
    /// Box selection without the temporal gate; the map is zeroed outside
    /// the box before thresholding.
    #[serde(rename = "clip")]
    Clip,
    /// As `Clip`, with the temporal gate active.
    #[serde(rename = "clip_temporal")]
    ClipTemporal,
    /// Box selection without the temporal gate; the box gates the two-pass
    /// component filter instead of clipping.
    #[serde(rename = "conncomp")]
    ConnComp,
    /// Temporal gate plus the two-pass component filter.
    #[serde(rename = "full")]
    Full,
}

impl PipelineMode {
    pub const ALL: [PipelineMode; 5] = [
        PipelineMode::Appearance,
        PipelineMode::Clip,
        PipelineMode::ClipTemporal,
        PipelineMode::ConnComp,
        PipelineMode::Full,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PipelineMode::Appearance => "appearance",
            PipelineMode::Clip => "clip",
            PipelineMode::ClipTemporal => "clip_temporal",
            PipelineMode::ConnComp => "conncomp",
            PipelineMode::Full => "full",
        }
    }

    fn uses_tracker(&self) -> bool {
        *self != PipelineMode::Appearance
    }

    fn temporal_gate(&self) -> bool {
        matches!(self, PipelineMode::ClipTemporal | PipelineMode::Full)
    }
}

impl fmt::Display for PipelineMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PipelineMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        PipelineMode::ALL
            .iter()
            .find(|m| m.as_str() == s)
            .copied()
            .ok_or_else(|| {
                format!("unknown mode {s:?}; expected one of appearance, clip, clip_temporal, conncomp, full")
            })
    }
}

/// Appearance maps for a video: either one sequence shared by every object
/// or one sequence per object id.
#[derive(Clone, Debug, PartialEq)]
pub enum MapSet {
    Shared(Vec<GrayMap>),
    PerObject(BTreeMap<u8, Vec<GrayMap>>),
}

/// Validated per-video input: frame-0 annotation, per-frame appearance maps,
/// and per-frame detection lists.
#[derive(Clone, Debug, PartialEq)]
pub struct VideoInput {
    width: u32,
    height: u32,
    annotation: IndexedMask,
    maps: MapSet,
    detections: Vec<Vec<Detection>>,
}

impl VideoInput {
    pub fn new(
        annotation: IndexedMask,
        maps: MapSet,
        detections: Vec<Vec<Detection>>,
    ) -> Result<Self> {
        let width = annotation.width();
        let height = annotation.height();
        let object_ids = annotation.object_ids();
        if object_ids.is_empty() {
            return Err(Error::NoObjects);
        }
        let frame_count = detections.len();
        if frame_count == 0 {
            return Err(Error::InvalidVideo("video has no frames".into()));
        }

        match &maps {
            MapSet::Shared(seq) => Self::check_map_seq("shared maps", seq, width, height, frame_count)?,
            MapSet::PerObject(by_id) => {
                for &id in &object_ids {
                    let seq = by_id.get(&id).ok_or_else(|| {
                        Error::InvalidVideo(format!("no map sequence for object {id}"))
                    })?;
                    Self::check_map_seq(&format!("maps for object {id}"), seq, width, height, frame_count)?;
                }
                if let Some(&extra) = by_id.keys().find(|id| !object_ids.contains(id)) {
                    return Err(Error::InvalidVideo(format!(
                        "map sequence for unannotated object {extra}"
                    )));
                }
            }
        }

        for (frame, dets) in detections.iter().enumerate() {
            for det in dets {
                if !det.bbox.fits_in(width, height) {
                    return Err(Error::BoxOutOfBounds {
                        bbox: det.bbox,
                        width,
                        height,
                    });
                }
                if !(0.0..=1.0).contains(&det.score) {
                    return Err(Error::InvalidVideo(format!(
                        "frame {frame}: detection score {} outside [0, 1]",
                        det.score
                    )));
                }
            }
        }

        Ok(Self {
            width,
            height,
            annotation,
            maps,
            detections,
        })
    }

    fn check_map_seq(
        what: &str,
        seq: &[GrayMap],
        width: u32,
        height: u32,
        frame_count: usize,
    ) -> Result<()> {
        if seq.len() != frame_count {
            let have: Vec<usize> = (0..seq.len()).collect();
            let missing: Vec<usize> = (0..frame_count).filter(|i| !have.contains(i)).collect();
            return Err(Error::MissingFrames {
                what: what.to_string(),
                indices: missing,
            });
        }
        for map in seq {
            if (map.width(), map.height()) != (width, height) {
                return Err(Error::DimensionMismatch {
                    what: what.to_string(),
                    expected_w: width,
                    expected_h: height,
                    actual_w: map.width(),
                    actual_h: map.height(),
                });
            }
        }
        Ok(())
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn frame_count(&self) -> usize {
        self.detections.len()
    }

    pub fn annotation(&self) -> &IndexedMask {
        &self.annotation
    }

    pub fn maps(&self) -> &MapSet {
        &self.maps
    }

    pub fn detections(&self) -> &[Vec<Detection>] {
        &self.detections
    }

    /// Object ids declared by the frame-0 annotation, ascending.
    pub fn object_ids(&self) -> Vec<u8> {
        self.annotation.object_ids()
    }

    /// The appearance map driving `object_id` at `frame`.
    pub fn map_for(&self, object_id: u8, frame: usize) -> &GrayMap {
        match &self.maps {
            MapSet::Shared(seq) => &seq[frame],
            MapSet::PerObject(by_id) => &by_id[&object_id][frame],
        }
    }
}

/// The box decision recorded for one object in one frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectSelection {
    pub object_id: u8,
    pub kind: SelectionKind,
    #[serde(rename = "box")]
    pub bbox: BBox,
    pub lost: bool,
}

/// Output of one pipeline run over one video.
#[derive(Clone, Debug, PartialEq)]
pub struct VideoResult {
    pub mode: PipelineMode,
    pub tracker: TrackerConfig,
    pub hysteresis: HysteresisConfig,
    /// Per-frame indexed masks; frame 0 is the annotation verbatim.
    pub masks: Vec<IndexedMask>,
    /// Per-frame box decisions; empty for frame 0 and in appearance mode.
    pub selections: Vec<Vec<ObjectSelection>>,
}

/// Runs one mode over a whole video, frame order strictly ascending.
///
/// Frame 0 passes the annotation through untouched. When several objects
/// claim a pixel, the object whose own appearance map is brighter at that
/// pixel wins; remaining ties go to the lower object id.
pub fn process_video(
    input: &VideoInput,
    mode: PipelineMode,
    tracker_cfg: &TrackerConfig,
    hyst_cfg: &HysteresisConfig,
) -> Result<VideoResult> {
    tracker_cfg.validate()?;
    hyst_cfg.validate()?;

    let object_ids = input.object_ids();
    let frame_count = input.frame_count();

    let mut states: BTreeMap<u8, TrackState> = BTreeMap::new();
    if mode.uses_tracker() {
        for &id in &object_ids {
            let gt = input.annotation().mask_for(id);
            states.insert(
                id,
                tracker::init_track(&input.detections()[0], &gt, id, tracker_cfg)?,
            );
        }
    }

    let mut masks = Vec::with_capacity(frame_count);
    let mut selections: Vec<Vec<ObjectSelection>> = Vec::with_capacity(frame_count);
    masks.push(input.annotation().clone());
    selections.push(Vec::new());

    for frame in 1..frame_count {
        let mut frame_selections = Vec::new();
        let mut object_masks: Vec<(u8, BinaryMask)> = Vec::with_capacity(object_ids.len());

        for &id in &object_ids {
            let map = input.map_for(id, frame);
            let mask = if mode.uses_tracker() {
                let state = states.get_mut(&id).expect("state initialized above");
                let sel = tracker::select_box(
                    state,
                    &input.detections()[frame],
                    map,
                    tracker_cfg,
                    mode.temporal_gate(),
                )?;
                frame_selections.push(ObjectSelection {
                    object_id: id,
                    kind: sel.kind,
                    bbox: sel.bbox,
                    lost: sel.lost,
                });
                match mode {
                    PipelineMode::Clip | PipelineMode::ClipTemporal => {
                        hysteresis::bbox_clip(map, std::slice::from_ref(&sel.bbox))
                            .threshold(tracker_cfg.t_bin)
                    }
                    PipelineMode::ConnComp | PipelineMode::Full => hysteresis::hysteresis_filter(
                        map,
                        std::slice::from_ref(&sel.bbox),
                        hyst_cfg,
                    )?,
                    PipelineMode::Appearance => unreachable!("appearance skips the tracker"),
                }
            } else {
                map.threshold(tracker_cfg.t_bin)
            };
            object_masks.push((id, mask));
        }

        masks.push(compose_frame(input, frame, &object_masks));
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

/// Merges per-object masks into one indexed mask, resolving overlaps by the
/// per-object map value and then by lower id.
fn compose_frame(input: &VideoInput, frame: usize, object_masks: &[(u8, BinaryMask)]) -> IndexedMask {
    let mut out = IndexedMask::empty(input.width(), input.height());
    for y in 0..input.height() {
        for x in 0..input.width() {
            let mut winner: Option<(f32, u8)> = None;
            for &(id, ref mask) in object_masks {
                if !mask.get(x, y) {
                    continue;
                }
                let value = input.map_for(id, frame).get(x, y);
                // Strictly brighter wins; ids ascend, so ties keep the first.
                if winner.is_none_or(|(best, _)| value > best) {
                    winner = Some((value, id));
                }
            }
            if let Some((_, id)) = winner {
                out.set(x, y, id);
            }
        }
    }
    out
}
