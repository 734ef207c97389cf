//! Block training vectors, KFCG codebooks, requantization and label maps.

mod kfcg;
mod label;
pub mod metrics;
mod text;
mod training;

use thiserror::Error;

pub use kfcg::{kfcg_codebook, requantize_codebook, Codebook, Requantization, SplitRecord};
pub use label::{build_label_image, LabelImage, MARGIN_LABEL};
pub use metrics::distortion;
pub use text::{parse_assignment, parse_codebook, write_assignment, write_codebook};
pub use training::{extract_training_vectors, BlockGeometry, TrainingSet, TrainingVector};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VqError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("codebook target size must be at least 1")]
    ZeroTarget,
    #[error("vector dimension must be at least 1")]
    ZeroDimension,
    #[error("vector has {actual} components, expected {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("block dimensions must be at least 1")]
    ZeroBlock,
    #[error("block {block_w}x{block_h} does not fit in {width}x{height} image")]
    BlockLargerThanImage {
        block_w: usize,
        block_h: usize,
        width: usize,
        height: usize,
    },
    #[error("requantization target {target} exceeds codebook size {size}")]
    TargetExceedsCodebook { target: usize, size: usize },
    #[error("cluster index {index} out of range for codebook of size {size}")]
    AssignmentOutOfRange { index: usize, size: usize },
    #[error("training geometry does not match {0}")]
    GeometryMismatch(String),
    #[error("{0} clusters cannot be encoded in an 8-bit label image")]
    TooManyClusters(usize),
    #[error("malformed codebook text at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}
