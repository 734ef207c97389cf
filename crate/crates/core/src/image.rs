//! Pixel grids shared by every stage of the pipeline.

use thiserror::Error;

use crate::scalar::{round_to_u8, Real};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ImageError {
    #[error("image dimensions must be positive, got {width}x{height}")]
    EmptyDimensions { width: usize, height: usize },
    #[error("pixel buffer holds {actual} values, {width}x{height} image needs {expected}")]
    BufferSize {
        width: usize,
        height: usize,
        expected: usize,
        actual: usize,
    },
    #[error("image is {actual_w}x{actual_h}, expected {expected_w}x{expected_h}")]
    DimensionMismatch {
        expected_w: usize,
        expected_h: usize,
        actual_w: usize,
        actual_h: usize,
    },
    #[error("pixel value at index {0} is not finite")]
    NonFinite(usize),
}

/// Row-major 2-D grid of pixels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Image<P> {
    width: usize,
    height: usize,
    data: Vec<P>,
}

/// 8-bit intensities.
pub type GrayImage = Image<u8>;
/// Real-valued maps (probabilities, entropies).
pub type FloatImage<T> = Image<T>;
/// Edge maps; `true` marks an edge pixel.
pub type BinaryImage = Image<bool>;

impl<P: Copy> Image<P> {
    pub fn new(width: usize, height: usize, data: Vec<P>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyDimensions { width, height });
        }
        let expected = width * height;
        if data.len() != expected {
            return Err(ImageError::BufferSize {
                width,
                height,
                expected,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Image filled with one value.
    ///
    /// Panics if either dimension is zero.
    pub fn filled(width: usize, height: usize, value: P) -> Self {
        Self::new(width, height, vec![value; width * height]).expect("non-empty dimensions")
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel.
    ///
    /// Panics if either dimension is zero.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> P) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data).expect("non-empty dimensions")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[P] {
        &self.data
    }

    pub fn into_data(self) -> Vec<P> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> P {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: P) {
        self.data[y * self.width + x] = value;
    }

    /// Pixel lookup with replicate (edge-clamp) padding.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> P {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.get(cx, cy)
    }

    pub fn map<Q: Copy>(&self, f: impl FnMut(P) -> Q) -> Image<Q> {
        Image {
            width: self.width,
            height: self.height,
            data: self.data.iter().copied().map(f).collect(),
        }
    }

    pub fn same_dimensions<Q>(&self, other: &Image<Q>) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub(crate) fn check_dimensions<Q>(&self, other: &Image<Q>) -> Result<(), ImageError> {
        if self.same_dimensions(other) {
            Ok(())
        } else {
            Err(ImageError::DimensionMismatch {
                expected_w: self.width,
                expected_h: self.height,
                actual_w: other.width,
                actual_h: other.height,
            })
        }
    }
}

impl<T: Real> Image<T> {
    /// Builds a real-valued image, rejecting NaN and infinities.
    pub fn new_finite(width: usize, height: usize, data: Vec<T>) -> Result<Self, ImageError> {
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(ImageError::NonFinite(i));
        }
        Self::new(width, height, data)
    }

    pub fn min_max(&self) -> (T, T) {
        self.data.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
    }
}

impl BinaryImage {
    /// Renders edges as 255 on a 0 background.
    pub fn to_gray(&self) -> GrayImage {
        self.map(|e| if e { 255 } else { 0 })
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&e| e).count()
    }
}

/// Linear min-max scaling of a real image onto 0..=255 with round-half-up.
///
/// A constant image maps to all zeros.
pub fn quantize_to_gray<T: Real>(img: &FloatImage<T>) -> GrayImage {
    let (lo, hi) = img.min_max();
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(hi > lo) {
        return img.map(|_| 0);
    }
    let scale = T::from_u8(255).unwrap() / (hi - lo);
    img.map(|v| round_to_u8((v - lo) * scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_geometry() {
        assert_eq!(
            GrayImage::new(0, 3, vec![]),
            Err(ImageError::EmptyDimensions {
                width: 0,
                height: 3
            })
        );
        assert!(matches!(
            GrayImage::new(2, 2, vec![1, 2, 3]),
            Err(ImageError::BufferSize { expected: 4, actual: 3, .. })
        ));
        assert_eq!(
            FloatImage::<f64>::new_finite(2, 1, vec![0.0, f64::NAN]),
            Err(ImageError::NonFinite(1))
        );
    }

    #[test]
    fn clamped_lookup_replicates_edges() {
        let img = GrayImage::new(2, 2, vec![1, 2, 3, 4]).unwrap();
        assert_eq!(img.get_clamped(-5, -1), 1);
        assert_eq!(img.get_clamped(7, 0), 2);
        assert_eq!(img.get_clamped(0, 9), 3);
        assert_eq!(img.get_clamped(1, 1), 4);
    }

    #[test]
    fn quantize_constant_is_zero() {
        let img = FloatImage::filled(3, 2, 0.37f64);
        assert!(quantize_to_gray(&img).data().iter().all(|&v| v == 0));
    }

    #[test]
    fn quantize_endpoints_and_half() {
        let img = FloatImage::new(2, 1, vec![0.0f64, 1.0]).unwrap();
        assert_eq!(quantize_to_gray(&img).data(), &[0, 255]);
        // 255 * 0.5 = 127.5 rounds half-up
        let img = FloatImage::new(3, 1, vec![0.0f64, 0.5, 1.0]).unwrap();
        assert_eq!(quantize_to_gray(&img).data(), &[0, 128, 255]);
        let img = FloatImage::new(3, 1, vec![0.0f32, 0.5, 1.0]).unwrap();
        assert_eq!(quantize_to_gray(&img).data(), &[0, 128, 255]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn quantize_is_monotone_and_spans_range(
                values in proptest::collection::vec(-1e3f64..1e3, 2..64)
            ) {
                let n = values.len();
                let img = FloatImage::new(n, 1, values.clone()).unwrap();
                let out = quantize_to_gray(&img);
                for i in 0..n {
                    for j in 0..n {
                        if values[i] <= values[j] {
                            prop_assert!(out.data()[i] <= out.data()[j]);
                        }
                    }
                }
                let (lo, hi) = img.min_max();
                if hi > lo {
                    prop_assert!(out.data().contains(&0));
                    prop_assert!(out.data().contains(&255));
                }
            }
        }
    }
}
