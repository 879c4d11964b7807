//! Box arithmetic and box/mask overlap measures.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::raster::BinaryMask;

/// Axis-aligned pixel rectangle over the half-open intervals
/// `[x_min, x_max) x [y_min, y_max)`.
///
/// A `BBox` is never empty: `x_min < x_max` and `y_min < y_max` always hold,
/// so `area() == width() * height()` with no off-by-one corrections. Empty
/// regions are represented by `Option<BBox>` absence instead.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BBox {
    x_min: u32,
    y_min: u32,
    x_max: u32,
    y_max: u32,
}

impl BBox {
    /// Panics if the coordinates describe an empty rectangle.
    pub fn new(x_min: u32, y_min: u32, x_max: u32, y_max: u32) -> Self {
        Self::try_new(x_min, y_min, x_max, y_max).unwrap_or_else(|| {
            panic!("degenerate box ({x_min},{y_min},{x_max},{y_max})")
        })
    }

    pub fn try_new(x_min: u32, y_min: u32, x_max: u32, y_max: u32) -> Option<Self> {
        (x_min < x_max && y_min < y_max).then_some(Self {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }

    pub fn x_min(&self) -> u32 {
        self.x_min
    }

    pub fn y_min(&self) -> u32 {
        self.y_min
    }

    pub fn x_max(&self) -> u32 {
        self.x_max
    }

    pub fn y_max(&self) -> u32 {
        self.y_max
    }

    pub fn width(&self) -> u32 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> u32 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> u64 {
        u64::from(self.width()) * u64::from(self.height())
    }

    /// Whether the pixel at `(x, y)` lies inside the rectangle.
    pub fn contains(&self, x: u32, y: u32) -> bool {
        x >= self.x_min && x < self.x_max && y >= self.y_min && y < self.y_max
    }

    /// Whether the rectangle lies fully inside a `width x height` image.
    pub fn fits_in(&self, width: u32, height: u32) -> bool {
        self.x_max <= width && self.y_max <= height
    }

    pub fn intersection_area(&self, other: &BBox) -> u64 {
        let x_lo = self.x_min.max(other.x_min);
        let x_hi = self.x_max.min(other.x_max);
        let y_lo = self.y_min.max(other.y_min);
        let y_hi = self.y_max.min(other.y_max);
        if x_lo < x_hi && y_lo < y_hi {
            u64::from(x_hi - x_lo) * u64::from(y_hi - y_lo)
        } else {
            0
        }
    }

    /// Smallest box containing both rectangles.
    pub fn hull(&self, other: &BBox) -> BBox {
        BBox {
            x_min: self.x_min.min(other.x_min),
            y_min: self.y_min.min(other.y_min),
            x_max: self.x_max.max(other.x_max),
            y_max: self.y_max.max(other.y_max),
        }
    }

    /// Intersects the box with the image rectangle; `None` when nothing is left.
    pub fn clip_to(&self, width: u32, height: u32) -> Option<BBox> {
        BBox::try_new(
            self.x_min.min(width),
            self.y_min.min(height),
            self.x_max.min(width),
            self.y_max.min(height),
        )
    }

    pub fn to_array(&self) -> [u32; 4] {
        [self.x_min, self.y_min, self.x_max, self.y_max]
    }
}

impl fmt::Display for BBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{},{})",
            self.x_min, self.y_min, self.x_max, self.y_max
        )
    }
}

impl Serialize for BBox {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_array().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BBox {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let [x_min, y_min, x_max, y_max] = <[u32; 4]>::deserialize(deserializer)?;
        BBox::try_new(x_min, y_min, x_max, y_max).ok_or_else(|| {
            D::Error::custom(format!(
                "degenerate box ({x_min},{y_min},{x_max},{y_max})"
            ))
        })
    }
}

/// Intersection over union of two boxes on pixel areas.
///
/// Symmetric, 1.0 exactly for identical boxes, 0.0 exactly for disjoint
/// ones. The ratio is formed by a single division of exact integer counts,
/// so equal configurations compare equal bit-for-bit.
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let inter = a.intersection_area(b);
    let union = a.area() + b.area() - inter;
    inter as f64 / union as f64
}

/// Tight bounding box of the mask's foreground; `None` for an empty mask.
pub fn box_from_mask(mask: &BinaryMask) -> Option<BBox> {
    let mut bounds: Option<(u32, u32, u32, u32)> = None;
    for (x, y) in mask.iter_foreground() {
        bounds = Some(match bounds {
            None => (x, y, x, y),
            Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
        });
    }
    bounds.map(|(x0, y0, x1, y1)| BBox::new(x0, y0, x1 + 1, y1 + 1))
}

/// Set-IoU between the mask's foreground and the filled box rectangle.
///
/// Symmetric in the set sense: an oversized box and a box that misses mask
/// area are both penalized. The box must lie within the mask bounds; callers
/// clip detections against the image before scoring them.
pub fn mask_box_iou(mask: &BinaryMask, bbox: &BBox) -> Result<f64> {
    if !bbox.fits_in(mask.width(), mask.height()) {
        return Err(Error::BoxOutOfBounds {
            bbox: *bbox,
            width: mask.width(),
            height: mask.height(),
        });
    }
    let mut inter: u64 = 0;
    for y in bbox.y_min()..bbox.y_max() {
        for x in bbox.x_min()..bbox.x_max() {
            if mask.get(x, y) {
                inter += 1;
            }
        }
    }
    let union = mask.count_foreground() + bbox.area() - inter;
    Ok(inter as f64 / union as f64)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    /// Pixel-set oracle: IoU of two arbitrary pixel sets by enumeration.
    fn pixel_set_iou(a: &[(u32, u32)], b: &[(u32, u32)]) -> f64 {
        use std::collections::BTreeSet;
        let sa: BTreeSet<_> = a.iter().copied().collect();
        let sb: BTreeSet<_> = b.iter().copied().collect();
        let inter = sa.intersection(&sb).count() as f64;
        let union = sa.union(&sb).count() as f64;
        inter / union
    }

    fn box_pixels(b: &BBox) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for y in b.y_min()..b.y_max() {
            for x in b.x_min()..b.x_max() {
                out.push((x, y));
            }
        }
        out
    }

    #[test]
    fn iou_identity() {
        let b = BBox::new(0, 0, 10, 10);
        assert_eq!(iou(&b, &b), 1.0);
    }

    #[test]
    fn iou_disjoint_touching_edges() {
        let a = BBox::new(0, 0, 10, 10);
        let b = BBox::new(10, 0, 20, 10);
        assert_eq!(iou(&a, &b), 0.0);
    }

    #[test]
    fn iou_half_overlap() {
        // Frozen from the pixel-enumeration oracle on a 20x10 grid:
        // intersection 50, union 150.
        let a = BBox::new(0, 0, 10, 10);
        let b = BBox::new(5, 0, 15, 10);
        let expected = pixel_set_iou(&box_pixels(&a), &box_pixels(&b));
        assert_eq!(expected, 50.0 / 150.0);
        assert_eq!(iou(&a, &b), expected);
    }

    #[test]
    fn box_from_mask_empty() {
        let mask = BinaryMask::empty(8, 8);
        assert_eq!(box_from_mask(&mask), None);
    }

    #[test]
    fn box_from_mask_single_pixel() {
        let mut mask = BinaryMask::empty(8, 8);
        mask.set(3, 4, true);
        assert_eq!(box_from_mask(&mask), Some(BBox::new(3, 4, 4, 5)));
    }

    #[test]
    fn box_from_mask_two_pixels() {
        // min/max scan over {(1,1), (4,2)}.
        let mut mask = BinaryMask::empty(8, 8);
        mask.set(1, 1, true);
        mask.set(4, 2, true);
        assert_eq!(box_from_mask(&mask), Some(BBox::new(1, 1, 5, 3)));
    }

    #[test]
    fn mask_box_iou_identity() {
        let b = BBox::new(2, 3, 6, 7);
        let mut mask = BinaryMask::empty(10, 10);
        for (x, y) in box_pixels(&b) {
            mask.set(x, y, true);
        }
        assert_eq!(mask_box_iou(&mask, &b).unwrap(), 1.0);
    }

    #[test]
    fn mask_box_iou_empty_mask() {
        let mask = BinaryMask::empty(10, 10);
        let b = BBox::new(0, 0, 5, 5);
        assert_eq!(mask_box_iou(&mask, &b).unwrap(), 0.0);
    }

    #[test]
    fn mask_box_iou_half_filled() {
        // 10x10 image, mask fills (0,0,10,5), box covers the whole image.
        let mut mask = BinaryMask::empty(10, 10);
        for (x, y) in box_pixels(&BBox::new(0, 0, 10, 5)) {
            mask.set(x, y, true);
        }
        let v = mask_box_iou(&mask, &BBox::new(0, 0, 10, 10)).unwrap();
        assert_eq!(v, 0.5);
    }

    #[test]
    fn mask_box_iou_rejects_out_of_bounds() {
        let mask = BinaryMask::empty(10, 10);
        let b = BBox::new(5, 5, 12, 8);
        assert!(matches!(
            mask_box_iou(&mask, &b),
            Err(Error::BoxOutOfBounds { .. })
        ));
    }

    #[test]
    fn clip_to_drops_fully_outside() {
        let b = BBox::new(12, 3, 20, 8);
        assert_eq!(b.clip_to(10, 10), None);
        assert_eq!(b.clip_to(15, 10), Some(BBox::new(12, 3, 15, 8)));
    }

    fn arb_box(limit: u32) -> impl Strategy<Value = BBox> {
        (0..limit - 1, 0..limit - 1).prop_flat_map(move |(x0, y0)| {
            (x0 + 1..=limit, y0 + 1..=limit)
                .prop_map(move |(x1, y1)| BBox::new(x0, y0, x1, y1))
        })
    }

    proptest! {
        #[test]
        fn iou_symmetric_and_bounded(a in arb_box(24), b in arb_box(24)) {
            let ab = iou(&a, &b);
            prop_assert_eq!(ab, iou(&b, &a));
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert_eq!(ab == 0.0, a.intersection_area(&b) == 0);
        }

        #[test]
        fn iou_translation_invariant(a in arb_box(24), b in arb_box(24), dx in 0u32..40, dy in 0u32..40) {
            let shift = |bb: &BBox| BBox::new(bb.x_min() + dx, bb.y_min() + dy, bb.x_max() + dx, bb.y_max() + dy);
            prop_assert_eq!(iou(&a, &b), iou(&shift(&a), &shift(&b)));
        }

        #[test]
        fn iou_matches_pixel_enumeration(a in arb_box(16), b in arb_box(16)) {
            prop_assert_eq!(iou(&a, &b), pixel_set_iou(&box_pixels(&a), &box_pixels(&b)));
        }

        #[test]
        fn box_from_mask_is_tight(pixels in prop::collection::btree_set((0u32..16, 0u32..16), 1..40)) {
            let mut mask = BinaryMask::empty(16, 16);
            for &(x, y) in &pixels {
                mask.set(x, y, true);
            }
            let b = box_from_mask(&mask).unwrap();
            for &(x, y) in &pixels {
                prop_assert!(b.contains(x, y));
            }
            // Shrinking any side by one pixel must lose a foreground pixel.
            let lost_on = |bb: Option<BBox>| bb.is_none_or(|bb| pixels.iter().any(|&(x, y)| !bb.contains(x, y)));
            prop_assert!(lost_on(BBox::try_new(b.x_min() + 1, b.y_min(), b.x_max(), b.y_max())));
            prop_assert!(lost_on(BBox::try_new(b.x_min(), b.y_min() + 1, b.x_max(), b.y_max())));
            prop_assert!(lost_on(BBox::try_new(b.x_min(), b.y_min(), b.x_max() - 1, b.y_max())));
            prop_assert!(lost_on(BBox::try_new(b.x_min(), b.y_min(), b.x_max(), b.y_max() - 1)));
        }

        #[test]
        fn mask_box_iou_matches_pixel_sets(
            pixels in prop::collection::vec((0u32..16, 0u32..16), 0..60),
            b in arb_box(16),
        ) {
            let mut mask = BinaryMask::empty(16, 16);
            for &(x, y) in &pixels {
                mask.set(x, y, true);
            }
            let fg: Vec<_> = mask.iter_foreground().collect();
            let expected = if fg.is_empty() && b.area() == 0 {
                unreachable!("boxes are never empty")
            } else {
                pixel_set_iou(&fg, &box_pixels(&b))
            };
            prop_assert_eq!(mask_box_iou(&mask, &b).unwrap(), expected);
        }
    }
}
