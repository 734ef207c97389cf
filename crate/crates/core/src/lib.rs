//! Grayscale image segmentation by windowed entropy texture and KFCG
//! (fast codebook generation) vector quantization.
//!
//! The pipeline turns an 8-bit image into a probability image, computes a
//! sliding-window Shannon entropy map, equalizes it, builds a KFCG codebook
//! over 2×2 blocks, requantizes the codebook into a handful of super-clusters
//! and renders one image per cluster with Canny edges superimposed on the
//! original. A GLCM-entropy map is produced alongside for comparison.
//!
//! Numeric modules are generic over the scalar type. The aliases at the
//! crate root fix the common choices.

pub mod entropy;
pub mod glcm;
pub mod image;
pub mod pgm;
pub mod pipeline;
pub mod scalar;
pub mod segmentation;
pub mod vq;

pub use crate::image::{BinaryImage, FloatImage, GrayImage, Image, ImageError};
pub use crate::scalar::{Real, Scalar};

/// Exact rational scalar used for hand-traceable codebook runs.
pub type Exact = num_rational::Ratio<i64>;

pub type FloatImage64 = FloatImage<f64>;
pub type FloatImage32 = FloatImage<f32>;

pub type TrainingSet64 = vq::TrainingSet<f64>;
pub type TrainingSet32 = vq::TrainingSet<f32>;
pub type TrainingSetExact = vq::TrainingSet<Exact>;

pub type Codebook64 = vq::Codebook<f64>;
pub type Codebook32 = vq::Codebook<f32>;
pub type CodebookExact = vq::Codebook<Exact>;

pub type EntropyConfig64 = entropy::EntropyConfig<f64>;
pub type CannyParams64 = segmentation::CannyParams<f64>;

/// Toolkit version recorded in run manifests.
pub const VERSION: &str = concat!("entroseg ", env!("CARGO_PKG_VERSION"));
