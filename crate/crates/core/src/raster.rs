//! Probability maps, binary masks, thresholding, and connected-component
//! labeling.

use std::collections::BTreeSet;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::BBox;

/// Per-pixel probability in `[0, 1]`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayMap {
    width: u32,
    height: u32,
    data: Vec<f32>,
}

impl GrayMap {
    /// Panics if `data.len() != width * height`.
    pub fn new(width: u32, height: u32, data: Vec<f32>) -> Self {
        assert_eq!(data.len(), width as usize * height as usize);
        Self {
            width,
            height,
            data,
        }
    }

    pub fn zeros(width: u32, height: u32) -> Self {
        Self::new(width, height, vec![0.0; width as usize * height as usize])
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> f32) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: u32, y: u32) -> f32 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: f32) {
        self.data[y as usize * self.width as usize + x as usize] = value;
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f32] {
        &mut self.data
    }

    /// Binarize: a pixel is foreground iff its value is `>= t`, so `t = 0`
    /// marks everything and behavior at exact probability values is defined.
    pub fn threshold(&self, t: f32) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| v >= t).collect(),
        }
    }
}

/// Per-pixel foreground flags, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn empty(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            data: vec![false; width as usize * height as usize],
        }
    }

    /// Panics if `data.len() != width * height`.
    pub fn new(width: u32, height: u32, data: Vec<bool>) -> Self {
        assert_eq!(data.len(), width as usize * height as usize);
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.data[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        self.data[y as usize * self.width as usize + x as usize] = value;
    }

    pub fn count_foreground(&self) -> u64 {
        self.data.iter().filter(|&&v| v).count() as u64
    }

    /// Foreground pixel coordinates in raster-scan order.
    pub fn iter_foreground(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let width = self.width;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &v)| v)
            .map(move |(i, _)| ((i as u32) % width, (i as u32) / width))
    }

    /// Clears every foreground pixel outside the union of the given boxes.
    pub fn retain_inside(&mut self, boxes: &[BBox]) {
        let mut inside = vec![false; self.data.len()];
        for b in boxes {
            let Some(b) = b.clip_to(self.width, self.height) else {
                continue;
            };
            for y in b.y_min()..b.y_max() {
                let row = y as usize * self.width as usize;
                inside[row + b.x_min() as usize..row + b.x_max() as usize].fill(true);
            }
        }
        for (v, keep) in self.data.iter_mut().zip(&inside) {
            *v = *v && *keep;
        }
    }

    /// Pixel-wise union; dimensions must match.
    pub fn union(&self, other: &BinaryMask) -> Result<BinaryMask> {
        if (self.width, self.height) != (other.width, other.height) {
            return Err(Error::DimensionMismatch {
                what: "mask union".into(),
                expected_w: self.width,
                expected_h: self.height,
                actual_w: other.width,
                actual_h: other.height,
            });
        }
        Ok(BinaryMask {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a || b)
                .collect(),
        })
    }

    /// `true` when every foreground pixel of `self` is foreground in `other`.
    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.data.iter().zip(&other.data).all(|(&a, &b)| !a || b)
    }
}

/// Per-pixel object ids; 0 is background.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedMask {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl IndexedMask {
    pub fn empty(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            data: vec![0; width as usize * height as usize],
        }
    }

    /// Panics if `data.len() != width * height`.
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Self {
        assert_eq!(data.len(), width as usize * height as usize);
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, id: u8) {
        self.data[y as usize * self.width as usize + x as usize] = id;
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.data
    }

    /// Distinct nonzero ids present, ascending.
    pub fn object_ids(&self) -> Vec<u8> {
        let mut seen = [false; 256];
        for &v in &self.data {
            seen[v as usize] = true;
        }
        (1..=255).filter(|&id| seen[id as usize]).collect()
    }

    /// Foreground mask of a single object id.
    pub fn mask_for(&self, id: u8) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| v == id).collect(),
        }
    }
}

/// 4- or 8-neighborhood used when grouping foreground pixels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl Connectivity {
    pub fn as_u8(self) -> u8 {
        match self {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
        }
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            4 => Some(Connectivity::Four),
            8 => Some(Connectivity::Eight),
            _ => None,
        }
    }

    /// Neighbor offsets, left-to-right / top-to-bottom.
    pub fn offsets(self) -> &'static [(i32, i32)] {
        match self {
            Connectivity::Four => &[(0, -1), (-1, 0), (1, 0), (0, 1)],
            Connectivity::Eight => &[
                (-1, -1),
                (0, -1),
                (1, -1),
                (-1, 0),
                (1, 0),
                (-1, 1),
                (0, 1),
                (1, 1),
            ],
        }
    }
}

impl Serialize for Connectivity {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.as_u8())
    }
}

impl<'de> Deserialize<'de> for Connectivity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = u8::deserialize(deserializer)?;
        Connectivity::from_u8(v)
            .ok_or_else(|| D::Error::custom(format!("connectivity must be 4 or 8, got {v}")))
    }
}

/// One labeled component's aggregate statistics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentInfo {
    pub pixel_count: u64,
    pub bbox: BBox,
}

/// Dense component labeling. Label 0 is background; components are numbered
/// `1..=component_count()` with no gaps, in raster-scan order of each
/// component's first-encountered pixel.
#[derive(Clone, Debug)]
pub struct ComponentLabeling {
    width: u32,
    height: u32,
    labels: Vec<u32>,
    components: Vec<ComponentInfo>,
}

impl ComponentLabeling {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn component_count(&self) -> u32 {
        self.components.len() as u32
    }

    pub fn label_at(&self, x: u32, y: u32) -> u32 {
        self.labels[y as usize * self.width as usize + x as usize]
    }

    pub fn components(&self) -> &[ComponentInfo] {
        &self.components
    }

    pub fn info(&self, id: u32) -> Result<&ComponentInfo> {
        if id == 0 || id > self.component_count() {
            return Err(Error::UnknownComponent {
                id,
                count: self.component_count(),
            });
        }
        Ok(&self.components[id as usize - 1])
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new() -> Self {
        // Slot 0 is reserved for "no label".
        Self { parent: vec![0] }
    }

    fn make_set(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra.max(rb) as usize] = ra.min(rb);
        }
    }
}

/// Two-pass connected-component labeling over provisional labels merged by
/// union-find, relabeled into first-encounter order.
pub fn label_components(mask: &BinaryMask, connectivity: Connectivity) -> ComponentLabeling {
    let w = mask.width() as usize;
    let h = mask.height() as usize;
    let mut provisional = vec![0u32; w * h];
    let mut uf = UnionFind::new();

    for y in 0..h {
        for x in 0..w {
            if !mask.data[y * w + x] {
                continue;
            }
            // Previously scanned neighbors: left, and the row above.
            let mut merged = 0u32;
            let mut visit = |px: usize, py: usize, uf: &mut UnionFind| {
                let l = provisional[py * w + px];
                if l != 0 {
                    if merged == 0 {
                        merged = l;
                    } else {
                        uf.union(merged, l);
                    }
                }
            };
            if x > 0 {
                visit(x - 1, y, &mut uf);
            }
            if y > 0 {
                visit(x, y - 1, &mut uf);
                if connectivity == Connectivity::Eight {
                    if x > 0 {
                        visit(x - 1, y - 1, &mut uf);
                    }
                    if x + 1 < w {
                        visit(x + 1, y - 1, &mut uf);
                    }
                }
            }
            provisional[y * w + x] = if merged == 0 { uf.make_set() } else { merged };
        }
    }

    // Second pass: resolve roots and assign final labels in the order the
    // components are first met by a raster scan.
    let mut final_of_root = vec![0u32; uf.parent.len()];
    let mut labels = vec![0u32; w * h];
    let mut stats: Vec<(u64, u32, u32, u32, u32)> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let p = provisional[y * w + x];
            if p == 0 {
                continue;
            }
            let root = uf.find(p);
            let mut label = final_of_root[root as usize];
            if label == 0 {
                stats.push((0, x as u32, y as u32, x as u32, y as u32));
                label = stats.len() as u32;
                final_of_root[root as usize] = label;
            }
            labels[y * w + x] = label;
            let s = &mut stats[label as usize - 1];
            s.0 += 1;
            s.1 = s.1.min(x as u32);
            s.2 = s.2.min(y as u32);
            s.3 = s.3.max(x as u32);
            s.4 = s.4.max(y as u32);
        }
    }

    let components = stats
        .into_iter()
        .map(|(count, x0, y0, x1, y1)| ComponentInfo {
            pixel_count: count,
            bbox: BBox::new(x0, y0, x1 + 1, y1 + 1),
        })
        .collect();

    ComponentLabeling {
        width: mask.width(),
        height: mask.height(),
        labels,
        components,
    }
}

/// Ids of components with at least one pixel inside the box.
pub fn components_intersecting_box(
    labeling: &ComponentLabeling,
    bbox: &BBox,
) -> Result<BTreeSet<u32>> {
    if !bbox.fits_in(labeling.width, labeling.height) {
        return Err(Error::BoxOutOfBounds {
            bbox: *bbox,
            width: labeling.width,
            height: labeling.height,
        });
    }
    let mut out = BTreeSet::new();
    for y in bbox.y_min()..bbox.y_max() {
        for x in bbox.x_min()..bbox.x_max() {
            let l = labeling.label_at(x, y);
            if l != 0 {
                out.insert(l);
            }
        }
    }
    Ok(out)
}

/// Ids of components sharing at least one pixel with the reference mask's
/// foreground.
pub fn components_intersecting_mask(
    labeling: &ComponentLabeling,
    reference: &BinaryMask,
) -> Result<BTreeSet<u32>> {
    if (labeling.width, labeling.height) != (reference.width(), reference.height()) {
        return Err(Error::DimensionMismatch {
            what: "component/mask intersection".into(),
            expected_w: labeling.width,
            expected_h: labeling.height,
            actual_w: reference.width(),
            actual_h: reference.height(),
        });
    }
    let mut out = BTreeSet::new();
    for (x, y) in reference.iter_foreground() {
        let l = labeling.label_at(x, y);
        if l != 0 {
            out.insert(l);
        }
    }
    Ok(out)
}

/// Union of the selected components' pixels.
pub fn mask_from_components(labeling: &ComponentLabeling, ids: &BTreeSet<u32>) -> Result<BinaryMask> {
    for &id in ids {
        if id == 0 || id > labeling.component_count() {
            return Err(Error::UnknownComponent {
                id,
                count: labeling.component_count(),
            });
        }
    }
    Ok(BinaryMask {
        width: labeling.width,
        height: labeling.height,
        data: labeling
            .labels
            .iter()
            .map(|l| *l != 0 && ids.contains(l))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::synth::oracle::flood_fill_components;

    fn mask_from_pixels(w: u32, h: u32, pixels: &[(u32, u32)]) -> BinaryMask {
        let mut m = BinaryMask::empty(w, h);
        for &(x, y) in pixels {
            m.set(x, y, true);
        }
        m
    }

    #[test]
    fn threshold_examples() {
        let zeros = GrayMap::zeros(4, 4);
        assert_eq!(zeros.threshold(0.5).count_foreground(), 0);
        // t = 0 marks every pixel since all values are >= 0.
        assert_eq!(zeros.threshold(0.0).count_foreground(), 16);

        let row = GrayMap::new(3, 1, vec![0.4, 0.5, 0.6]);
        let m = row.threshold(0.5);
        assert_eq!((m.get(0, 0), m.get(1, 0), m.get(2, 0)), (false, true, true));
    }

    #[test]
    fn label_empty_mask() {
        let l = label_components(&BinaryMask::empty(6, 6), Connectivity::Eight);
        assert_eq!(l.component_count(), 0);
    }

    #[test]
    fn label_full_mask() {
        let mut m = BinaryMask::empty(5, 5);
        for y in 0..5 {
            for x in 0..5 {
                m.set(x, y, true);
            }
        }
        let l = label_components(&m, Connectivity::Eight);
        assert_eq!(l.component_count(), 1);
        assert_eq!(l.components()[0].pixel_count, 25);
        assert_eq!(l.components()[0].bbox, BBox::new(0, 0, 5, 5));
    }

    #[test]
    fn diagonal_pixels_split_by_connectivity() {
        let m = mask_from_pixels(5, 5, &[(0, 0), (1, 1)]);
        assert_eq!(label_components(&m, Connectivity::Eight).component_count(), 1);
        assert_eq!(label_components(&m, Connectivity::Four).component_count(), 2);
    }

    #[test]
    fn labels_follow_first_encounter_order() {
        // Raster scan meets (3,0) before (0,1).
        let m = mask_from_pixels(5, 5, &[(3, 0), (0, 1)]);
        let l = label_components(&m, Connectivity::Four);
        assert_eq!(l.label_at(3, 0), 1);
        assert_eq!(l.label_at(0, 1), 2);
    }

    #[test]
    fn intersecting_box_selects_by_pixel_membership() {
        let m = mask_from_pixels(
            10,
            10,
            &[(0, 0), (1, 0), (0, 1), (1, 1), (6, 6), (7, 6), (6, 7), (7, 7)],
        );
        let l = label_components(&m, Connectivity::Eight);
        assert_eq!(l.component_count(), 2);
        let ids = components_intersecting_box(&l, &BBox::new(0, 0, 3, 3)).unwrap();
        assert_eq!(ids, BTreeSet::from([1]));
        let all = components_intersecting_box(&l, &BBox::new(0, 0, 10, 10)).unwrap();
        assert_eq!(all, BTreeSet::from([1, 2]));
        let empty = components_intersecting_box(
            &label_components(&BinaryMask::empty(10, 10), Connectivity::Eight),
            &BBox::new(0, 0, 10, 10),
        )
        .unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn intersecting_mask_selects_by_shared_pixels() {
        let low = mask_from_pixels(10, 10, &[(0, 0), (1, 1), (7, 7), (8, 8)]);
        let l = label_components(&low, Connectivity::Eight);
        assert_eq!(l.component_count(), 2);

        let reference = mask_from_pixels(10, 10, &[(1, 1)]);
        let ids = components_intersecting_mask(&l, &reference).unwrap();
        assert_eq!(ids, BTreeSet::from([1]));

        let empty_ref = BinaryMask::empty(10, 10);
        assert!(components_intersecting_mask(&l, &empty_ref).unwrap().is_empty());

        let ids = components_intersecting_mask(&l, &low).unwrap();
        assert_eq!(ids, BTreeSet::from([1, 2]));

        let bad = BinaryMask::empty(9, 10);
        assert!(components_intersecting_mask(&l, &bad).is_err());
    }

    #[test]
    fn mask_from_components_round_trip_and_errors() {
        let m = mask_from_pixels(8, 8, &[(0, 0), (1, 0), (5, 5)]);
        let l = label_components(&m, Connectivity::Eight);
        assert_eq!(mask_from_components(&l, &BTreeSet::new()).unwrap(), BinaryMask::empty(8, 8));
        let all: BTreeSet<u32> = (1..=l.component_count()).collect();
        assert_eq!(mask_from_components(&l, &all).unwrap(), m);
        let only_first = mask_from_components(&l, &BTreeSet::from([1])).unwrap();
        assert_eq!(only_first, mask_from_pixels(8, 8, &[(0, 0), (1, 0)]));
        assert!(matches!(
            mask_from_components(&l, &BTreeSet::from([9])),
            Err(Error::UnknownComponent { .. })
        ));
    }

    #[test]
    fn indexed_mask_ids_and_per_object_masks() {
        let mut m = IndexedMask::empty(4, 4);
        m.set(0, 0, 2);
        m.set(3, 3, 7);
        assert_eq!(m.object_ids(), vec![2, 7]);
        assert_eq!(m.mask_for(2).count_foreground(), 1);
        assert!(m.mask_for(2).get(0, 0));
    }

    fn arb_mask(max_side: u32) -> impl Strategy<Value = BinaryMask> {
        (2..=max_side, 2..=max_side).prop_flat_map(|(w, h)| {
            prop::collection::vec(prop::bool::weighted(0.4), (w * h) as usize)
                .prop_map(move |data| BinaryMask::new(w, h, data))
        })
    }

    fn canonical_partition(groups: Vec<Vec<(u32, u32)>>) -> BTreeSet<Vec<(u32, u32)>> {
        groups
            .into_iter()
            .map(|mut g| {
                g.sort_unstable();
                g
            })
            .collect()
    }

    proptest! {
        #[test]
        fn threshold_is_monotone(
            values in prop::collection::vec(0.0f32..=1.0, 64),
            t1 in 0.0f32..=1.0,
            t2 in 0.0f32..=1.0,
        ) {
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let map = GrayMap::new(8, 8, values);
            prop_assert!(map.threshold(hi).is_subset_of(&map.threshold(lo)));
        }

        #[test]
        fn labeling_matches_flood_fill(mask in arb_mask(64), eight in any::<bool>()) {
            let conn = if eight { Connectivity::Eight } else { Connectivity::Four };
            let l = label_components(&mask, conn);
            let by_label: Vec<Vec<(u32, u32)>> = (1..=l.component_count())
                .map(|id| {
                    mask.iter_foreground()
                        .filter(|&(x, y)| l.label_at(x, y) == id)
                        .collect()
                })
                .collect();
            let oracle = flood_fill_components(&mask, conn);
            prop_assert_eq!(canonical_partition(by_label), canonical_partition(oracle));
        }

        #[test]
        fn component_invariants(mask in arb_mask(32), eight in any::<bool>()) {
            let conn = if eight { Connectivity::Eight } else { Connectivity::Four };
            let l = label_components(&mask, conn);
            // Round trip through the full id set.
            let all: BTreeSet<u32> = (1..=l.component_count()).collect();
            prop_assert_eq!(mask_from_components(&l, &all).unwrap(), mask.clone());
            // Pixel counts add up to the total foreground.
            let total: u64 = l.components().iter().map(|c| c.pixel_count).sum();
            prop_assert_eq!(total, mask.count_foreground());
            // Per-component bbox is the tight box of that component's pixels.
            for (i, info) in l.components().iter().enumerate() {
                let only = mask_from_components(&l, &BTreeSet::from([i as u32 + 1])).unwrap();
                prop_assert_eq!(crate::geometry::box_from_mask(&only), Some(info.bbox));
            }
        }
    }
}
