//! Video object segmentation post-processing.
//!
//! The crate turns two per-frame inputs — a grayscale appearance probability
//! map and a list of semantic detection boxes — into a final per-object
//! segmentation mask. Box candidates are filtered by remembered object class
//! and temporal overlap with the previous selection, the best survivor is
//! picked by its fit against the binarized appearance map, and the selected
//! box then gates a two-pass (strong/weak) connected-component filter over
//! the map. A DAVIS-style region-similarity evaluator and a deterministic
//! synthetic-sequence harness round out the toolkit.

pub mod error;
pub mod evalkit;
pub mod geometry;
pub mod hysteresis;
pub mod ingest;
pub mod pipeline;
pub mod raster;
pub mod synth;
pub mod tracker;

pub use error::{Error, Result};
