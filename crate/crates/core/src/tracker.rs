//! Per-object box selection: first-frame class memory, appearance-fit
//! selection, temporal gating, uncategorized fallback, and coasting.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, BBox};
use crate::raster::{
    components_intersecting_box, label_components, BinaryMask, Connectivity, GrayMap,
};

/// One proposal from the semantic detector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub class_id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_name: Option<String>,
    pub score: f32,
    #[serde(rename = "box")]
    pub bbox: BBox,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackerConfig {
    /// Map binarization threshold used for box selection (and for the
    /// plain-threshold pipeline modes).
    pub t_bin: f32,
    /// Minimum overlap with the frame-0 annotation to accept a detection
    /// and remember its class.
    pub iou_first_frame_min: f32,
    /// Minimum IoU with the previously selected box (the temporal gate).
    pub iou_temporal: f32,
    /// Frames a stale box may be carried before the track counts as lost;
    /// `None` coasts forever.
    pub max_coast: Option<u32>,
    /// Connectivity for the uncategorized component-following fallback.
    pub connectivity: Connectivity,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            t_bin: 0.5,
            iou_first_frame_min: 0.3,
            iou_temporal: 0.3,
            max_coast: None,
            connectivity: Connectivity::Eight,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("t_bin", self.t_bin),
            ("iou_first_frame_min", self.iou_first_frame_min),
            ("iou_temporal", self.iou_temporal),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Per-object tracking memory.
///
/// `class_set` is fixed at initialization; an empty set means uncategorized
/// mode (the object is followed through appearance-map components instead of
/// detections). `prev_box` is always a valid box, seeded from frame 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackState {
    pub object_id: u8,
    pub class_set: BTreeSet<u32>,
    pub prev_box: BBox,
    pub coast_count: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionKind {
    /// A detection survived the class and temporal filters and won the
    /// appearance-fit argmax.
    Detected,
    /// No detection survived; the box follows the appearance-map components
    /// that overlap the previous box.
    AppearanceTracked,
    /// Nothing matched at all; the previous box is carried forward.
    Coasted,
}

/// The box chosen for one object in one frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Selection {
    pub bbox: BBox,
    pub kind: SelectionKind,
    /// Set once the coasting counter exceeds `max_coast`.
    pub lost: bool,
}

/// Builds the frame-0 state for one annotated object.
///
/// The detection with the best overlap against the annotation mask is
/// accepted when that overlap reaches `iou_first_frame_min`; its class is
/// remembered for the rest of the video. Otherwise the object enters
/// uncategorized mode and starts from the annotation's tight box. Ties on
/// overlap are broken by higher score, then input order.
pub fn init_track(
    detections: &[Detection],
    gt_mask: &BinaryMask,
    object_id: u8,
    cfg: &TrackerConfig,
) -> Result<TrackState> {
    if gt_mask.count_foreground() == 0 {
        return Err(Error::EmptyObjectMask { object_id });
    }
    let mut best: Option<(&Detection, f64)> = None;
    for det in detections {
        let overlap = geometry::mask_box_iou(gt_mask, &det.bbox)?;
        best = Some(match best {
            Some((b, bo)) if overlap < bo || (overlap == bo && det.score <= b.score) => (b, bo),
            _ => (det, overlap),
        });
    }
    if let Some((det, overlap)) = best {
        if overlap >= f64::from(cfg.iou_first_frame_min) {
            return Ok(TrackState {
                object_id,
                class_set: BTreeSet::from([det.class_id]),
                prev_box: det.bbox,
                coast_count: 0,
            });
        }
    }
    let prev_box =
        geometry::box_from_mask(gt_mask).expect("nonempty mask has a bounding box");
    Ok(TrackState {
        object_id,
        class_set: BTreeSet::new(),
        prev_box,
        coast_count: 0,
    })
}

/// Selects this frame's box for one object and advances its state.
///
/// Candidates are narrowed class -> temporal -> appearance-fit argmax; with
/// `temporal_gate` off the middle step is skipped. When no candidate
/// survives (or in uncategorized mode) the box falls back to the components
/// of the binarized map that intersect the previous box; failing that too,
/// the previous box coasts.
pub fn select_box(
    state: &mut TrackState,
    detections: &[Detection],
    appearance: &GrayMap,
    cfg: &TrackerConfig,
    temporal_gate: bool,
) -> Result<Selection> {
    let binarized = appearance.threshold(cfg.t_bin);

    if !state.class_set.is_empty() {
        let mut candidates: Vec<&Detection> = detections
            .iter()
            .filter(|d| state.class_set.contains(&d.class_id))
            .collect();
        if temporal_gate {
            candidates
                .retain(|d| geometry::iou(&d.bbox, &state.prev_box) >= f64::from(cfg.iou_temporal));
        }
        if !candidates.is_empty() {
            let mut best: Option<(&Detection, f64)> = None;
            for det in candidates {
                let fit = geometry::mask_box_iou(&binarized, &det.bbox)?;
                best = Some(match best {
                    Some((b, bf)) if fit < bf || (fit == bf && det.score <= b.score) => (b, bf),
                    _ => (det, fit),
                });
            }
            let (winner, _) = best.expect("nonempty candidate list");
            state.prev_box = winner.bbox;
            state.coast_count = 0;
            return Ok(Selection {
                bbox: winner.bbox,
                kind: SelectionKind::Detected,
                lost: false,
            });
        }
    }

    // Uncategorized fallback: follow the map components that still overlap
    // the previous box.
    let labeling = label_components(&binarized, cfg.connectivity);
    let ids = components_intersecting_box(&labeling, &state.prev_box)?;
    if !ids.is_empty() {
        let bbox = ids
            .iter()
            .map(|&id| labeling.info(id).expect("id from this labeling").bbox)
            .reduce(|a, b| a.hull(&b))
            .expect("nonempty id set");
        state.prev_box = bbox;
        state.coast_count = 0;
        return Ok(Selection {
            bbox,
            kind: SelectionKind::AppearanceTracked,
            lost: false,
        });
    }

    state.coast_count += 1;
    let lost = cfg.max_coast.is_some_and(|limit| state.coast_count > limit);
    Ok(Selection {
        bbox: state.prev_box,
        kind: SelectionKind::Coasted,
        lost,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn det(class_id: u32, score: f32, bbox: BBox) -> Detection {
        Detection {
            class_id,
            class_name: None,
            score,
            bbox,
        }
    }

    fn filled_mask(w: u32, h: u32, b: BBox) -> BinaryMask {
        let mut m = BinaryMask::empty(w, h);
        for y in b.y_min()..b.y_max() {
            for x in b.x_min()..b.x_max() {
                m.set(x, y, true);
            }
        }
        m
    }

    fn indicator_map(w: u32, h: u32, b: BBox) -> GrayMap {
        GrayMap::from_fn(w, h, |x, y| if b.contains(x, y) { 1.0 } else { 0.0 })
    }

    #[test]
    fn init_with_no_detections_goes_uncategorized() {
        let gt = filled_mask(32, 32, BBox::new(4, 4, 12, 10));
        let state = init_track(&[], &gt, 1, &TrackerConfig::default()).unwrap();
        assert!(state.class_set.is_empty());
        assert_eq!(state.prev_box, BBox::new(4, 4, 12, 10));
    }

    #[test]
    fn init_with_exact_box_remembers_class() {
        let b = BBox::new(4, 4, 12, 10);
        let gt = filled_mask(32, 32, b);
        let state = init_track(&[det(7, 0.5, b)], &gt, 1, &TrackerConfig::default()).unwrap();
        assert_eq!(state.class_set, BTreeSet::from([7]));
        assert_eq!(state.prev_box, b);
    }

    #[test]
    fn init_prefers_overlapping_box_over_high_score() {
        // GT fills (10,10,30,30) on 64x64. The class-3 box overlaps it, the
        // class-7 box (higher score) is elsewhere entirely.
        let gt = filled_mask(64, 64, BBox::new(10, 10, 30, 30));
        let near = det(3, 0.9, BBox::new(12, 11, 31, 32));
        let far = det(7, 0.99, BBox::new(40, 40, 60, 60));
        let state =
            init_track(&[near.clone(), far], &gt, 1, &TrackerConfig::default()).unwrap();
        assert_eq!(state.class_set, BTreeSet::from([3]));
        assert_eq!(state.prev_box, near.bbox);
    }

    #[test]
    fn init_rejects_empty_annotation() {
        let gt = BinaryMask::empty(16, 16);
        assert!(matches!(
            init_track(&[], &gt, 2, &TrackerConfig::default()),
            Err(Error::EmptyObjectMask { object_id: 2 })
        ));
    }

    #[test]
    fn coasts_when_nothing_matches() {
        let b = BBox::new(4, 4, 12, 10);
        let mut state = TrackState {
            object_id: 1,
            class_set: BTreeSet::from([3]),
            prev_box: b,
            coast_count: 0,
        };
        let sel = select_box(
            &mut state,
            &[],
            &GrayMap::zeros(32, 32),
            &TrackerConfig::default(),
            true,
        )
        .unwrap();
        assert_eq!(sel.kind, SelectionKind::Coasted);
        assert_eq!(sel.bbox, b);
        assert_eq!(state.coast_count, 1);
        assert!(!sel.lost);
    }

    #[test]
    fn lost_flag_raises_after_max_coast() {
        let cfg = TrackerConfig {
            max_coast: Some(1),
            ..TrackerConfig::default()
        };
        let mut state = TrackState {
            object_id: 1,
            class_set: BTreeSet::new(),
            prev_box: BBox::new(0, 0, 4, 4),
            coast_count: 0,
        };
        let map = GrayMap::zeros(16, 16);
        let first = select_box(&mut state, &[], &map, &cfg, true).unwrap();
        assert!(!first.lost);
        let second = select_box(&mut state, &[], &map, &cfg, true).unwrap();
        assert!(second.lost);
    }

    #[test]
    fn matching_detection_resets_coasting() {
        let b = BBox::new(4, 4, 12, 10);
        let mut state = TrackState {
            object_id: 1,
            class_set: BTreeSet::from([3]),
            prev_box: b,
            coast_count: 3,
        };
        let sel = select_box(
            &mut state,
            &[det(3, 0.8, b)],
            &indicator_map(32, 32, b),
            &TrackerConfig::default(),
            true,
        )
        .unwrap();
        assert_eq!(sel.kind, SelectionKind::Detected);
        assert_eq!(sel.bbox, b);
        assert_eq!(state.coast_count, 0);
    }

    #[test]
    fn temporal_gate_discards_brighter_distractor() {
        // Remembered class 3, previous box (10,10,30,30). The distractor box
        // has the better appearance fit but no overlap with the previous
        // box, so the gate removes it.
        let prev = BBox::new(10, 10, 30, 30);
        let close = det(3, 0.5, BBox::new(12, 12, 32, 32));
        let distractor_box = BBox::new(60, 10, 80, 30);
        let distractor = det(3, 0.9, distractor_box);
        let map = indicator_map(96, 64, distractor_box);

        let mut state = TrackState {
            object_id: 1,
            class_set: BTreeSet::from([3]),
            prev_box: prev,
            coast_count: 0,
        };
        let sel = select_box(
            &mut state,
            &[close.clone(), distractor.clone()],
            &map,
            &TrackerConfig::default(),
            true,
        )
        .unwrap();
        assert_eq!(sel.kind, SelectionKind::Detected);
        assert_eq!(sel.bbox, close.bbox);

        // Without the gate the distractor wins the appearance argmax.
        let mut ungated = TrackState {
            object_id: 1,
            class_set: BTreeSet::from([3]),
            prev_box: prev,
            coast_count: 0,
        };
        let sel = select_box(&mut ungated, &[close, distractor], &map, &TrackerConfig::default(), false)
            .unwrap();
        assert_eq!(sel.bbox, distractor_box);
    }

    #[test]
    fn uncategorized_follows_overlapping_components() {
        // Two blobs; only the one overlapping the previous box is followed,
        // and the new box is the tight box of that component.
        let mut map = GrayMap::zeros(32, 32);
        for (x, y) in [(5, 5), (6, 5), (5, 6), (6, 6), (20, 20), (21, 20)] {
            map.set(x, y, 0.9);
        }
        let mut state = TrackState {
            object_id: 1,
            class_set: BTreeSet::new(),
            prev_box: BBox::new(4, 4, 8, 8),
            coast_count: 0,
        };
        let sel = select_box(&mut state, &[], &map, &TrackerConfig::default(), true).unwrap();
        assert_eq!(sel.kind, SelectionKind::AppearanceTracked);
        assert_eq!(sel.bbox, BBox::new(5, 5, 7, 7));
        assert_eq!(state.prev_box, sel.bbox);
    }

    #[test]
    fn class_filter_discards_foreign_classes() {
        let b = BBox::new(4, 4, 12, 10);
        let mut state = TrackState {
            object_id: 1,
            class_set: BTreeSet::from([3]),
            prev_box: b,
            coast_count: 0,
        };
        // Only a class-5 detection is present; with a blank map the track
        // coasts rather than adopting the foreign box.
        let sel = select_box(
            &mut state,
            &[det(5, 0.99, b)],
            &GrayMap::zeros(32, 32),
            &TrackerConfig::default(),
            true,
        )
        .unwrap();
        assert_eq!(sel.kind, SelectionKind::Coasted);
    }

    fn arb_box(limit: u32) -> impl Strategy<Value = BBox> {
        (0..limit - 1, 0..limit - 1).prop_flat_map(move |(x0, y0)| {
            (x0 + 1..=limit, y0 + 1..=limit)
                .prop_map(move |(x1, y1)| BBox::new(x0, y0, x1, y1))
        })
    }

    fn arb_detections(limit: u32) -> impl Strategy<Value = Vec<Detection>> {
        prop::collection::vec(
            (0u32..4, 0.0f32..=1.0, arb_box(limit))
                .prop_map(|(class_id, score, bbox)| det(class_id, score, bbox)),
            0..6,
        )
    }

    proptest! {
        /// Class memory and temporal gating hold over random frame sequences,
        /// and identical inputs replay to identical states.
        #[test]
        fn invariants_over_random_sequences(
            seed_mask in prop::collection::btree_set((0u32..16, 0u32..16), 1..30),
            frames in prop::collection::vec(
                (arb_detections(16), prop::collection::vec(0.0f32..=1.0, 256)),
                1..8,
            ),
            gate in any::<bool>(),
        ) {
            let cfg = TrackerConfig::default();
            let mut gt = BinaryMask::empty(16, 16);
            for &(x, y) in &seed_mask {
                gt.set(x, y, true);
            }
            let init_dets = frames[0].0.clone();
            let mut state = init_track(&init_dets, &gt, 1, &cfg).unwrap();
            let mut replay = state.clone();
            for (dets, values) in &frames {
                let map = GrayMap::new(16, 16, values.clone());
                let prev = state.prev_box;
                let sel = select_box(&mut state, dets, &map, &cfg, gate).unwrap();
                match sel.kind {
                    SelectionKind::Detected => {
                        let winner = dets.iter().find(|d| d.bbox == sel.bbox).unwrap();
                        prop_assert!(state.class_set.contains(&winner.class_id));
                        if gate {
                            prop_assert!(geometry::iou(&sel.bbox, &prev) >= f64::from(cfg.iou_temporal));
                        }
                    }
                    SelectionKind::AppearanceTracked => {
                        // The box is the hull of binarized-map components that
                        // intersect the previous box.
                        let labeling = label_components(&map.threshold(cfg.t_bin), cfg.connectivity);
                        let ids = components_intersecting_box(&labeling, &prev).unwrap();
                        prop_assert!(!ids.is_empty());
                    }
                    SelectionKind::Coasted => prop_assert_eq!(sel.bbox, prev),
                }
                let sel2 = select_box(&mut replay, dets, &map, &cfg, gate).unwrap();
                prop_assert_eq!(sel, sel2);
                prop_assert_eq!(&state, &replay);
            }
        }
    }
}
