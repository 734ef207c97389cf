//! Per-cluster images, edge maps and overlays.

mod canny;

use thiserror::Error;

pub use canny::{canny_edges, canny_stages, CannyError, CannyParams, CannyStages, Sector, Thresholds};

use crate::image::{BinaryImage, GrayImage, ImageError};
use crate::vq::LabelImage;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SegmentationError {
    #[error("cluster id {id} out of range for {count} clusters")]
    ClusterOutOfRange { id: usize, count: usize },
    #[error(transparent)]
    Image(#[from] ImageError),
}

/// Source pixels of one cluster on a zero background.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterImage {
    pub cluster_id: usize,
    pub image: GrayImage,
}

pub fn cluster_image(
    source: &GrayImage,
    labels: &LabelImage,
    cluster_id: usize,
) -> Result<ClusterImage, SegmentationError> {
    source.check_dimensions(labels.labels())?;
    if cluster_id >= labels.num_clusters() {
        return Err(SegmentationError::ClusterOutOfRange {
            id: cluster_id,
            count: labels.num_clusters(),
        });
    }
    let image = GrayImage::from_fn(source.width(), source.height(), |x, y| {
        if labels.label(x, y) as usize == cluster_id {
            source.get(x, y)
        } else {
            0
        }
    });
    Ok(ClusterImage { cluster_id, image })
}

/// Copy of `original` with every edge pixel set to 255.
pub fn superimpose(original: &GrayImage, edges: &BinaryImage) -> Result<GrayImage, SegmentationError> {
    original.check_dimensions(edges)?;
    Ok(GrayImage::from_fn(original.width(), original.height(), |x, y| {
        if edges.get(x, y) {
            255
        } else {
            original.get(x, y)
        }
    }))
}
