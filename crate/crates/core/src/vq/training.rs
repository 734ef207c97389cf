use crate::image::GrayImage;
use crate::scalar::Scalar;

use super::VqError;

/// One flattened block.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingVector<T> {
    pub values: Vec<T>,
    pub block_x: usize,
    pub block_y: usize,
}

/// How a training set tiles its source image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockGeometry {
    pub image_width: usize,
    pub image_height: usize,
    pub block_width: usize,
    pub block_height: usize,
    pub blocks_x: usize,
    pub blocks_y: usize,
}

impl BlockGeometry {
    /// Width of the region covered by whole blocks.
    pub fn covered_width(&self) -> usize {
        self.blocks_x * self.block_width
    }

    pub fn covered_height(&self) -> usize {
        self.blocks_y * self.block_height
    }

    pub fn is_cropped(&self) -> bool {
        self.covered_width() != self.image_width || self.covered_height() != self.image_height
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet<T> {
    dim: usize,
    vectors: Vec<TrainingVector<T>>,
    geometry: Option<BlockGeometry>,
}

impl<T: Scalar> TrainingSet<T> {
    /// Training set without image geometry, e.g. a codebook being requantized.
    /// Block coordinates are `(index, 0)`.
    pub fn from_vectors(dim: usize, vectors: Vec<Vec<T>>) -> Result<Self, VqError> {
        if dim == 0 {
            return Err(VqError::ZeroDimension);
        }
        if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
            return Err(VqError::DimensionMismatch {
                expected: dim,
                actual: bad.len(),
            });
        }
        let vectors = vectors
            .into_iter()
            .enumerate()
            .map(|(i, values)| TrainingVector {
                values,
                block_x: i,
                block_y: 0,
            })
            .collect();
        Ok(Self {
            dim,
            vectors,
            geometry: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[TrainingVector<T>] {
        &self.vectors
    }

    pub fn geometry(&self) -> Option<&BlockGeometry> {
        self.geometry.as_ref()
    }

    #[inline]
    pub fn component(&self, index: usize, dim: usize) -> T {
        self.vectors[index].values[dim]
    }
}

/// Splits `img` into non-overlapping `block_w`×`block_h` blocks in row-major
/// block order, each flattened row-major. Pixels right of or below the last
/// whole block are dropped.
pub fn extract_training_vectors<T: Scalar>(
    img: &GrayImage,
    block_w: usize,
    block_h: usize,
) -> Result<TrainingSet<T>, VqError> {
    if block_w == 0 || block_h == 0 {
        return Err(VqError::ZeroBlock);
    }
    if block_w > img.width() || block_h > img.height() {
        return Err(VqError::BlockLargerThanImage {
            block_w,
            block_h,
            width: img.width(),
            height: img.height(),
        });
    }
    let geometry = BlockGeometry {
        image_width: img.width(),
        image_height: img.height(),
        block_width: block_w,
        block_height: block_h,
        blocks_x: img.width() / block_w,
        blocks_y: img.height() / block_h,
    };
    let mut vectors = Vec::with_capacity(geometry.blocks_x * geometry.blocks_y);
    for by in 0..geometry.blocks_y {
        for bx in 0..geometry.blocks_x {
            let mut values = Vec::with_capacity(block_w * block_h);
            for y in by * block_h..(by + 1) * block_h {
                for x in bx * block_w..(bx + 1) * block_w {
                    values.push(T::from_u8(img.get(x, y)).expect("u8 fits"));
                }
            }
            vectors.push(TrainingVector {
                values,
                block_x: bx,
                block_y: by,
            });
        }
    }
    Ok(TrainingSet {
        dim: block_w * block_h,
        vectors,
        geometry: Some(geometry),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_by_four_into_quadrants() {
        let img = GrayImage::from_fn(4, 4, |x, y| (y * 4 + x) as u8);
        let ts = extract_training_vectors::<f64>(&img, 2, 2).unwrap();
        assert_eq!(ts.len(), 4);
        assert_eq!(ts.dim(), 4);
        // (0,0) (1,0) (0,1) (1,1)
        assert_eq!(ts.vectors()[0].values, vec![0.0, 1.0, 4.0, 5.0]);
        assert_eq!(ts.vectors()[1].values, vec![2.0, 3.0, 6.0, 7.0]);
        assert_eq!((ts.vectors()[2].block_x, ts.vectors()[2].block_y), (0, 1));
        assert!(!ts.geometry().unwrap().is_cropped());
    }

    #[test]
    fn crops_right_and_bottom() {
        let img = GrayImage::from_fn(5, 5, |x, y| (y * 5 + x) as u8);
        let ts = extract_training_vectors::<f32>(&img, 2, 2).unwrap();
        assert_eq!(ts.len(), 4);
        let g = ts.geometry().unwrap();
        assert_eq!((g.covered_width(), g.covered_height()), (4, 4));
        assert!(g.is_cropped());
        assert_eq!(ts.vectors()[3].values, vec![12.0, 13.0, 17.0, 18.0]);
    }

    #[test]
    fn constant_blocks_identical() {
        let img = GrayImage::filled(6, 4, 9);
        let ts = extract_training_vectors::<f64>(&img, 3, 2).unwrap();
        assert!(ts.vectors().iter().all(|v| v.values == vec![9.0; 6]));
    }

    #[test]
    fn block_errors() {
        let img = GrayImage::filled(3, 3, 0);
        assert!(matches!(
            extract_training_vectors::<f64>(&img, 4, 1),
            Err(VqError::BlockLargerThanImage { .. })
        ));
        assert!(matches!(
            extract_training_vectors::<f64>(&img, 0, 1),
            Err(VqError::ZeroBlock)
        ));
        assert!(matches!(
            TrainingSet::<f64>::from_vectors(2, vec![vec![1.0]]),
            Err(VqError::DimensionMismatch { expected: 2, actual: 1 })
        ));
    }
}
