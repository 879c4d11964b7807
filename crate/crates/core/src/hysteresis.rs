//! Two-pass strong/weak component filtering of an appearance map, gated by
//! the selected boxes.
//!
//! Pass one keeps the high-threshold components that touch a selected box;
//! pass two adds low-threshold components that touch the surviving strong
//! mask, Canny-style: weak pixels count only when their component connects
//! to retained strong pixels.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::raster::{
    components_intersecting_box, components_intersecting_mask, label_components,
    mask_from_components, BinaryMask, Connectivity, GrayMap,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HysteresisConfig {
    pub t_high: f32,
    pub t_low: f32,
    pub connectivity: Connectivity,
    /// Zero the low-threshold mask outside the selected boxes before
    /// labeling it, so weak component shapes respect the box boundary.
    pub clip_low_to_box: bool,
}

impl Default for HysteresisConfig {
    fn default() -> Self {
        Self {
            t_high: 0.8,
            t_low: 0.4,
            connectivity: Connectivity::Eight,
            clip_low_to_box: true,
        }
    }
}

impl HysteresisConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.t_low)
            || !(0.0..=1.0).contains(&self.t_high)
            || self.t_low > self.t_high
        {
            return Err(Error::InvalidConfig(format!(
                "need 0 <= t_low <= t_high <= 1, got t_low={} t_high={}",
                self.t_low, self.t_high
            )));
        }
        Ok(())
    }
}

/// Final per-object mask from the appearance map and the selected boxes.
///
/// Strong pass: components of `threshold(map, t_high)` intersecting any box.
/// Weak pass: components of `threshold(map, t_low)` (optionally clipped to
/// the boxes) that intersect the strong result; kept components are added
/// whole. Every output component therefore contains at least one strong
/// pixel inside a selected box.
pub fn hysteresis_filter(
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

    let strong = map.threshold(cfg.t_high);
    let strong_labels = label_components(&strong, cfg.connectivity);
    let mut keep = BTreeSet::new();
    for b in boxes {
        keep.append(&mut components_intersecting_box(&strong_labels, b)?);
    }
    let strong_kept = mask_from_components(&strong_labels, &keep)?;

    let mut weak = map.threshold(cfg.t_low);
    if cfg.clip_low_to_box {
        weak.retain_inside(boxes);
    }
    let weak_labels = label_components(&weak, cfg.connectivity);
    let weak_keep = components_intersecting_mask(&weak_labels, &strong_kept)?;
    let weak_kept = mask_from_components(&weak_labels, &weak_keep)?;

    strong_kept.union(&weak_kept)
}

/// Zeros the map outside the union of the boxes; used by the plain
/// box-clipping pipeline modes.
pub fn bbox_clip(map: &GrayMap, boxes: &[BBox]) -> GrayMap {
    let mut inside = BinaryMask::empty(map.width(), map.height());
    for b in boxes {
        let Some(b) = b.clip_to(map.width(), map.height()) else {
            continue;
        };
        for y in b.y_min()..b.y_max() {
            for x in b.x_min()..b.x_max() {
                inside.set(x, y, true);
            }
        }
    }
    GrayMap::from_fn(map.width(), map.height(), |x, y| {
        if inside.get(x, y) {
            map.get(x, y)
        } else {
            0.0
        }
    })
}
