//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

use crate::geometry::BBox;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected_w}x{expected_h}, got {actual_w}x{actual_h}")]
    DimensionMismatch {
        what: String,
        expected_w: u32,
        expected_h: u32,
        actual_w: u32,
        actual_h: u32,
    },

    #[error("box {bbox} lies outside the {width}x{height} image bounds")]
    BoxOutOfBounds { bbox: BBox, width: u32, height: u32 },

    #[error("object {object_id} has an empty frame-0 mask")]
    EmptyObjectMask { object_id: u8 },

    #[error("annotation contains no annotated objects")]
    NoObjects,

    #[error("hysteresis filter requires at least one selected box")]
    NoBoxes,

    #[error("unknown component id {id} (labeling has {count} components)")]
    UnknownComponent { id: u32, count: u32 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid video input: {0}")]
    InvalidVideo(String),

    #[error("{what}: missing frames {indices:?}")]
    MissingFrames { what: String, indices: Vec<usize> },

    #[error("no frames to evaluate")]
    NoEvalFrames,

    #[error("synthetic object leaves the frame bounds at frame {frame}")]
    ObjectOutOfBounds { frame: usize },

    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}
