use crate::image::{GrayImage, Image};
use crate::scalar::Scalar;

use super::{TrainingSet, VqError};

/// Label carried by pixels outside every whole block.
pub const MARGIN_LABEL: u8 = 255;

/// Per-pixel cluster ids at full image resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelImage {
    labels: Image<u8>,
    num_clusters: usize,
}

impl LabelImage {
    pub fn new(labels: Image<u8>, num_clusters: usize) -> Result<Self, VqError> {
        if num_clusters >= MARGIN_LABEL as usize {
            return Err(VqError::TooManyClusters(num_clusters));
        }
        if let Some(&bad) = labels
            .data()
            .iter()
            .find(|&&l| l != MARGIN_LABEL && l as usize >= num_clusters)
        {
            return Err(VqError::AssignmentOutOfRange {
                index: bad as usize,
                size: num_clusters,
            });
        }
        Ok(Self {
            labels,
            num_clusters,
        })
    }

    pub fn width(&self) -> usize {
        self.labels.width()
    }

    pub fn height(&self) -> usize {
        self.labels.height()
    }

    pub fn num_clusters(&self) -> usize {
        self.num_clusters
    }

    #[inline]
    pub fn label(&self, x: usize, y: usize) -> u8 {
        self.labels.get(x, y)
    }

    pub fn labels(&self) -> &Image<u8> {
        &self.labels
    }

    /// Raw label values as an 8-bit image; margin pixels are 255.
    pub fn to_gray(&self) -> GrayImage {
        self.labels.clone()
    }
}

/// Expands per-block cluster labels to every pixel of their block.
pub fn build_label_image<T: Scalar>(
    training: &TrainingSet<T>,
    super_assignment: &[usize],
    img_w: usize,
    img_h: usize,
    block_w: usize,
    block_h: usize,
) -> Result<LabelImage, VqError> {
    let geom = training
        .geometry()
        .ok_or_else(|| VqError::GeometryMismatch("training set carries no block geometry".into()))?;
    if (geom.image_width, geom.image_height, geom.block_width, geom.block_height)
        != (img_w, img_h, block_w, block_h)
    {
        return Err(VqError::GeometryMismatch(format!(
            "{img_w}x{img_h} image with {block_w}x{block_h} blocks (training set is {}x{} with {}x{})",
            geom.image_width, geom.image_height, geom.block_width, geom.block_height
        )));
    }
    if super_assignment.len() != training.len() {
        return Err(VqError::GeometryMismatch(format!(
            "{} assignments for {} training vectors",
            super_assignment.len(),
            training.len()
        )));
    }
    let num_clusters = super_assignment.iter().max().map_or(0, |&m| m + 1);
    if num_clusters >= MARGIN_LABEL as usize {
        return Err(VqError::TooManyClusters(num_clusters));
    }
    let mut labels = Image::filled(img_w, img_h, MARGIN_LABEL);
    for (v, &label) in training.vectors().iter().zip(super_assignment) {
        for y in v.block_y * block_h..(v.block_y + 1) * block_h {
            for x in v.block_x * block_w..(v.block_x + 1) * block_w {
                labels.set(x, y, label as u8);
            }
        }
    }
    LabelImage::new(labels, num_clusters)
}
