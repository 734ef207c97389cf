//! Windowed gray-level co-occurrence matrix entropy.
//!
//! Gray values are re-binned to `levels` equal bins (`g * levels / 256`).
//! Within each replicate-padded window, every pixel is paired with the pixel
//! at `offset` when that pixel also lies inside the window.

use rayon::prelude::*;
use thiserror::Error;

use crate::entropy::validate_window;
use crate::image::{FloatImage, GrayImage, Image};
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GlcmError {
    #[error("window size must be odd and at least 3, got {0}")]
    InvalidWindow(usize),
    #[error("offset must be non-zero and fit inside a {window}x{window} window, got ({dx}, {dy})")]
    InvalidOffset { dx: isize, dy: isize, window: usize },
    #[error("levels must be a power of two in [2, 256], got {0}")]
    InvalidLevels(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GlcmConfig {
    window_size: usize,
    offset: (isize, isize),
    levels: usize,
    symmetric: bool,
}

impl GlcmConfig {
    pub fn new(
        window_size: usize,
        offset: (isize, isize),
        levels: usize,
        symmetric: bool,
    ) -> Result<Self, GlcmError> {
        validate_window(window_size).map_err(|_| GlcmError::InvalidWindow(window_size))?;
        let (dx, dy) = offset;
        if offset == (0, 0) || dx.unsigned_abs() >= window_size || dy.unsigned_abs() >= window_size {
            return Err(GlcmError::InvalidOffset {
                dx,
                dy,
                window: window_size,
            });
        }
        if !(2..=256).contains(&levels) || 256 % levels != 0 {
            return Err(GlcmError::InvalidLevels(levels));
        }
        Ok(Self {
            window_size,
            offset,
            levels,
            symmetric,
        })
    }

    pub fn window_size(&self) -> usize {
        self.window_size
    }

    pub fn offset(&self) -> (isize, isize) {
        self.offset
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    #[inline]
    pub fn bin(&self, g: u8) -> usize {
        g as usize * self.levels / 256
    }
}

impl Default for GlcmConfig {
    fn default() -> Self {
        Self {
            window_size: 3,
            offset: (1, 0),
            levels: 8,
            symmetric: true,
        }
    }
}

/// Normalized co-occurrence matrix, row-major `levels × levels`.
#[derive(Debug, Clone, PartialEq)]
pub struct Glcm<T> {
    levels: usize,
    entries: Vec<T>,
}

impl<T: Real> Glcm<T> {
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.entries[row * self.levels + col]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn entropy(&self) -> T {
        self.entries
            .iter()
            .filter(|&&m| m > T::zero())
            .fold(T::zero(), |h, &m| h - m * m.log2())
    }
}

/// Pair codes `row * levels + col` of one window, transposes included when
/// symmetric.
fn window_pairs(img: &GrayImage, cx: usize, cy: usize, cfg: &GlcmConfig) -> Vec<usize> {
    let r = (cfg.window_size / 2) as isize;
    let (dx, dy) = cfg.offset;
    let (cx, cy) = (cx as isize, cy as isize);
    let mut pairs = Vec::with_capacity(2 * cfg.window_size * cfg.window_size);
    for wy in -r..=r {
        for wx in -r..=r {
            let (qx, qy) = (wx + dx, wy + dy);
            if qx < -r || qx > r || qy < -r || qy > r {
                continue;
            }
            let a = cfg.bin(img.get_clamped(cx + wx, cy + wy));
            let b = cfg.bin(img.get_clamped(cx + qx, cy + qy));
            pairs.push(a * cfg.levels + b);
            if cfg.symmetric {
                pairs.push(b * cfg.levels + a);
            }
        }
    }
    pairs
}

pub fn glcm_of_window<T: Real>(img: &GrayImage, center: (usize, usize), cfg: &GlcmConfig) -> Glcm<T> {
    let pairs = window_pairs(img, center.0, center.1, cfg);
    let mut counts = vec![0usize; cfg.levels * cfg.levels];
    for &p in &pairs {
        counts[p] += 1;
    }
    let total = T::from_count(pairs.len());
    Glcm {
        levels: cfg.levels,
        entries: counts.into_iter().map(|c| T::from_count(c) / total).collect(),
    }
}

/// Per-pixel GLCM entropy in bits.
pub fn glcm_entropy_image<T: Real>(img: &GrayImage, cfg: &GlcmConfig) -> FloatImage<T> {
    let (w, h) = (img.width(), img.height());
    let data: Vec<T> = (0..h)
        .into_par_iter()
        .flat_map_iter(|y| {
            (0..w).map(move |x| {
                let mut pairs = window_pairs(img, x, y, cfg);
                pairs.sort_unstable();
                let total = T::from_count(pairs.len());
                pairs.chunk_by(|a, b| a == b).fold(T::zero(), |acc, run| {
                    let m = T::from_count(run.len()) / total;
                    if m == T::one() {
                        acc
                    } else {
                        acc - m * m.log2()
                    }
                })
            })
        })
        .collect();
    Image::new(w, h, data).expect("geometry preserved")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert_eq!(GlcmConfig::new(4, (1, 0), 8, true), Err(GlcmError::InvalidWindow(4)));
        assert!(matches!(GlcmConfig::new(3, (0, 0), 8, true), Err(GlcmError::InvalidOffset { .. })));
        assert!(matches!(GlcmConfig::new(3, (3, 0), 8, true), Err(GlcmError::InvalidOffset { .. })));
        assert_eq!(GlcmConfig::new(3, (1, 0), 1, true), Err(GlcmError::InvalidLevels(1)));
        assert_eq!(GlcmConfig::new(3, (1, 0), 6, true), Err(GlcmError::InvalidLevels(6)));
        assert!(GlcmConfig::new(5, (-2, 1), 256, false).is_ok());
        assert_eq!(GlcmConfig::default(), GlcmConfig::new(3, (1, 0), 8, true).unwrap());
    }

    #[test]
    fn binning() {
        let cfg = GlcmConfig::default();
        assert_eq!(cfg.bin(0), 0);
        assert_eq!(cfg.bin(31), 0);
        assert_eq!(cfg.bin(32), 1);
        assert_eq!(cfg.bin(255), 7);
    }

    #[test]
    fn constant_window_is_one_diagonal_cell() {
        let img = GrayImage::filled(5, 5, 100);
        let cfg = GlcmConfig::default();
        let m = glcm_of_window::<f64>(&img, (2, 2), &cfg);
        let b = cfg.bin(100);
        assert_eq!(m.get(b, b), 1.0);
        assert_eq!(m.entries().iter().filter(|&&v| v > 0.0).count(), 1);
        assert!(glcm_entropy_image::<f64>(&img, &cfg).data().iter().all(|&h| h == 0.0));
    }

    #[test]
    fn alternating_columns() {
        // bins 0 and 1 alternate by column
        let img = GrayImage::from_fn(3, 3, |x, _| if x % 2 == 0 { 0 } else { 32 });
        let cfg = GlcmConfig::default();
        let m = glcm_of_window::<f64>(&img, (1, 1), &cfg);
        // 3 rows x 2 horizontal pairs, doubled by symmetry: 6 at (0,1), 6 at (1,0)
        assert_eq!(m.get(0, 1), 0.5);
        assert_eq!(m.get(1, 0), 0.5);
        assert_eq!(m.entropy(), 1.0);
        assert_eq!(glcm_entropy_image::<f64>(&img, &cfg).get(1, 1), 1.0);
    }

    #[test]
    fn checkerboard_interior_entropy_is_one() {
        let img = GrayImage::from_fn(9, 9, |x, y| if (x + y) % 2 == 0 { 0 } else { 32 });
        let h = glcm_entropy_image::<f64>(&img, &GlcmConfig::default());
        for y in 1..8 {
            for x in 1..8 {
                assert_eq!(h.get(x, y), 1.0);
            }
        }
    }

    #[test]
    fn asymmetric_counts_one_direction() {
        let img = GrayImage::from_fn(3, 3, |x, _| if x % 2 == 0 { 0 } else { 32 });
        let cfg = GlcmConfig::new(3, (1, 0), 8, false).unwrap();
        let m = glcm_of_window::<f64>(&img, (1, 1), &cfg);
        assert_eq!(m.get(0, 1), 0.5);
        assert_eq!(m.get(1, 0), 0.5);
        let cfg = GlcmConfig::new(3, (2, 0), 8, false).unwrap();
        let m = glcm_of_window::<f64>(&img, (1, 1), &cfg);
        assert_eq!(m.get(0, 0), 1.0);
    }
}
