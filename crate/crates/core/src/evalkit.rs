//! Region-similarity evaluation of predicted masks against ground truth,
//! DAVIS-style: per-object Jaccard averaged over evaluated frames, then over
//! objects.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, IndexedMask};

/// Jaccard index |pred ∩ gt| / |pred ∪ gt| on foreground pixels.
///
/// Defined as 1.0 when both masks are empty: an empty prediction of an
/// absent object is a perfect answer.
pub fn jaccard(pred: &BinaryMask, gt: &BinaryMask) -> Result<f64> {
    if (pred.width(), pred.height()) != (gt.width(), gt.height()) {
        return Err(Error::DimensionMismatch {
            what: "jaccard".into(),
            expected_w: gt.width(),
            expected_h: gt.height(),
            actual_w: pred.width(),
            actual_h: pred.height(),
        });
    }
    let mut inter: u64 = 0;
    let mut union: u64 = 0;
    for (x, y) in pred.iter_foreground() {
        union += 1;
        if gt.get(x, y) {
            inter += 1;
        }
    }
    union += gt.count_foreground() - inter;
    if union == 0 {
        Ok(1.0)
    } else {
        Ok(inter as f64 / union as f64)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalOptions {
    /// Also skip the final frame, as some benchmark tool versions do.
    pub exclude_last: bool,
}

/// One video's predictions paired with its ground truth, frame-aligned.
pub struct EvalSequence<'a> {
    pub name: String,
    pub predicted: &'a [IndexedMask],
    pub ground_truth: &'a [IndexedMask],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameScore {
    pub frame: usize,
    pub jaccard: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectReport {
    pub object_id: u8,
    pub frames: Vec<FrameScore>,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VideoReport {
    pub name: String,
    pub objects: Vec<ObjectReport>,
    /// Mean of this video's per-object means.
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub videos: Vec<VideoReport>,
    /// Mean over all objects (across videos) of the per-object means.
    pub global_mean: f64,
}

fn mean(values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len() as f64;
    values.sum::<f64>() / n
}

/// Scores every sequence. Frame 0 is the given annotation and is never
/// evaluated; object ids come from each sequence's ground-truth frame 0.
pub fn evaluate(sequences: &[EvalSequence<'_>], options: &EvalOptions) -> Result<EvalReport> {
    let mut videos = Vec::with_capacity(sequences.len());
    for seq in sequences {
        videos.push(evaluate_sequence(seq, options)?);
    }
    let object_means: Vec<f64> = videos
        .iter()
        .flat_map(|v| v.objects.iter().map(|o| o.mean))
        .collect();
    if object_means.is_empty() {
        return Err(Error::NoEvalFrames);
    }
    let global_mean = mean(object_means.into_iter());
    Ok(EvalReport {
        videos,
        global_mean,
    })
}

fn evaluate_sequence(seq: &EvalSequence<'_>, options: &EvalOptions) -> Result<VideoReport> {
    let gt_frames = seq.ground_truth.len();
    if seq.predicted.len() < gt_frames {
        return Err(Error::MissingFrames {
            what: format!("predictions for {}", seq.name),
            indices: (seq.predicted.len()..gt_frames).collect(),
        });
    }
    if seq.predicted.len() > gt_frames {
        return Err(Error::MissingFrames {
            what: format!("ground truth for {}", seq.name),
            indices: (gt_frames..seq.predicted.len()).collect(),
        });
    }
    let end = if options.exclude_last {
        gt_frames.saturating_sub(1)
    } else {
        gt_frames
    };
    if end <= 1 {
        return Err(Error::NoEvalFrames);
    }
    let object_ids = seq.ground_truth[0].object_ids();
    if object_ids.is_empty() {
        return Err(Error::NoObjects);
    }

    let mut objects = Vec::with_capacity(object_ids.len());
    for id in object_ids {
        let mut frames = Vec::with_capacity(end - 1);
        for frame in 1..end {
            let j = jaccard(
                &seq.predicted[frame].mask_for(id),
                &seq.ground_truth[frame].mask_for(id),
            )?;
            frames.push(FrameScore { frame, jaccard: j });
        }
        let m = mean(frames.iter().map(|f| f.jaccard));
        objects.push(ObjectReport {
            object_id: id,
            frames,
            mean: m,
        });
    }
    let video_mean = mean(objects.iter().map(|o| o.mean));
    Ok(VideoReport {
        name: seq.name.clone(),
        objects,
        mean: video_mean,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn row_mask(w: u32, fg: &[u32]) -> BinaryMask {
        let mut m = BinaryMask::empty(w, 1);
        for &x in fg {
            m.set(x, 0, true);
        }
        m
    }

    #[test]
    fn jaccard_identity_and_disjoint() {
        let a = row_mask(8, &[0, 1, 2]);
        let b = row_mask(8, &[5, 6]);
        assert_eq!(jaccard(&a, &a).unwrap(), 1.0);
        assert_eq!(jaccard(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn jaccard_both_empty_is_one() {
        let e = BinaryMask::empty(4, 4);
        assert_eq!(jaccard(&e, &e).unwrap(), 1.0);
    }

    #[test]
    fn jaccard_five_of_fifteen() {
        // 10 px vs 10 px with 5 shared: 5 / 15.
        let pred = row_mask(32, &(0..10).collect::<Vec<_>>());
        let gt = row_mask(32, &(5..15).collect::<Vec<_>>());
        let j = jaccard(&pred, &gt).unwrap();
        assert!((j - 5.0 / 15.0).abs() <= 1e-12);
    }

    #[test]
    fn jaccard_rejects_dimension_mismatch() {
        let a = BinaryMask::empty(4, 4);
        let b = BinaryMask::empty(5, 4);
        assert!(jaccard(&a, &b).is_err());
    }

    fn indexed_row(w: u32, fg: &[u32]) -> IndexedMask {
        let mut m = IndexedMask::empty(w, 1);
        for &x in fg {
            m.set(x, 0, 1);
        }
        m
    }

    #[test]
    fn two_frame_video_reports_the_eval_frame_only() {
        // Frame 0 deliberately disagrees with the ground truth; it must not
        // count. The single eval frame scores 5/15.
        let gt = vec![indexed_row(32, &(5..15).collect::<Vec<_>>()); 2];
        let pred = vec![
            indexed_row(32, &[31]),
            indexed_row(32, &(0..10).collect::<Vec<_>>()),
        ];
        let report = evaluate(
            &[EvalSequence {
                name: "v".into(),
                predicted: &pred,
                ground_truth: &gt,
            }],
            &EvalOptions::default(),
        )
        .unwrap();
        assert!((report.global_mean - 5.0 / 15.0).abs() <= 1e-12);
        assert_eq!(report.videos[0].objects[0].frames.len(), 1);
    }

    #[test]
    fn identical_predictions_score_one_and_empty_score_zero() {
        let gt = vec![indexed_row(16, &[2, 3, 4]); 4];
        let report = evaluate(
            &[EvalSequence {
                name: "same".into(),
                predicted: &gt,
                ground_truth: &gt,
            }],
            &EvalOptions::default(),
        )
        .unwrap();
        assert_eq!(report.global_mean, 1.0);

        let empty = vec![indexed_row(16, &[2, 3, 4]), IndexedMask::empty(16, 1), IndexedMask::empty(16, 1), IndexedMask::empty(16, 1)];
        let report = evaluate(
            &[EvalSequence {
                name: "empty".into(),
                predicted: &empty,
                ground_truth: &gt,
            }],
            &EvalOptions::default(),
        )
        .unwrap();
        assert_eq!(report.global_mean, 0.0);
    }

    #[test]
    fn exclude_last_drops_the_final_frame() {
        let gt = vec![indexed_row(16, &[1, 2]); 3];
        let mut pred = gt.clone();
        pred[2] = IndexedMask::empty(16, 1); // would score 0 if counted
        let strict = evaluate(
            &[EvalSequence {
                name: "v".into(),
                predicted: &pred,
                ground_truth: &gt,
            }],
            &EvalOptions { exclude_last: true },
        )
        .unwrap();
        assert_eq!(strict.global_mean, 1.0);
    }

    #[test]
    fn missing_frames_are_listed() {
        let gt = vec![indexed_row(16, &[1]); 4];
        let pred = vec![indexed_row(16, &[1]); 2];
        match evaluate(
            &[EvalSequence {
                name: "v".into(),
                predicted: &pred,
                ground_truth: &gt,
            }],
            &EvalOptions::default(),
        ) {
            Err(Error::MissingFrames { indices, .. }) => assert_eq!(indices, vec![2, 3]),
            other => panic!("expected MissingFrames, got {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn jaccard_symmetry_and_extremes(
            a in prop::collection::vec(any::<bool>(), 64),
            b in prop::collection::vec(any::<bool>(), 64),
        ) {
            let ma = BinaryMask::new(8, 8, a);
            let mb = BinaryMask::new(8, 8, b);
            let j = jaccard(&ma, &mb).unwrap();
            prop_assert_eq!(j, jaccard(&mb, &ma).unwrap());
            prop_assert_eq!(j == 1.0, ma == mb);
            let disjoint_nonboth_empty = ma.iter_foreground().all(|(x, y)| !mb.get(x, y))
                && (ma.count_foreground() + mb.count_foreground() > 0);
            prop_assert_eq!(j == 0.0, disjoint_nonboth_empty);
        }

        /// Report means are recomputable from the per-frame values.
        #[test]
        fn means_recompose(frames in prop::collection::vec(prop::collection::vec(any::<bool>(), 16), 2..6)) {
            let gt: Vec<IndexedMask> = frames
                .iter()
                .map(|_| indexed_row(16, &[0, 1]))
                .collect();
            let pred: Vec<IndexedMask> = frames
                .iter()
                .map(|row| {
                    let fg: Vec<u32> = row.iter().enumerate().filter(|(_, &v)| v).map(|(i, _)| i as u32).collect();
                    indexed_row(16, &fg)
                })
                .collect();
            let report = evaluate(
                &[EvalSequence { name: "v".into(), predicted: &pred, ground_truth: &gt }],
                &EvalOptions::default(),
            )
            .unwrap();
            for video in &report.videos {
                for obj in &video.objects {
                    let m = obj.frames.iter().map(|f| f.jaccard).sum::<f64>() / obj.frames.len() as f64;
                    prop_assert!((obj.mean - m).abs() <= 1e-12);
                }
                let vm = video.objects.iter().map(|o| o.mean).sum::<f64>() / video.objects.len() as f64;
                prop_assert!((video.mean - vm).abs() <= 1e-12);
            }
        }
    }
}
