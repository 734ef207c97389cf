//! Canny edge detection.
//!
//! Smoothing and Sobel differentiation run on integers: the Gaussian kernel
//! is quantized to 12 fractional bits and never renormalized, so gradients
//! are exact and unchanged by additive intensity shifts. Gradient magnitudes
//! are then taken in the scalar type `T`.
//!
//! Non-maximum suppression keeps a pixel when its magnitude is strictly
//! greater than the neighbor behind it along the quantized gradient direction
//! and at least the neighbor ahead of it. The asymmetry resolves plateaus of
//! two equal maxima into a single pixel.

use std::collections::VecDeque;

use thiserror::Error;

use crate::image::{BinaryImage, FloatImage, GrayImage, Image};
use crate::scalar::Real;

const KERNEL_FRACTION_BITS: i32 = 12;

#[derive(Debug, Error, PartialEq)]
pub enum CannyError {
    #[error("gaussian sigma must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("thresholds must satisfy 0 < low < high: {0}")]
    InvalidThresholds(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Thresholds<T> {
    /// `high = high_frac * max magnitude`, `low = low_frac * high`.
    Relative { high_frac: T, low_frac: T },
    Absolute { low: T, high: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CannyParams<T> {
    sigma: T,
    thresholds: Thresholds<T>,
}

impl<T: Real> CannyParams<T> {
    pub fn new(sigma: T, thresholds: Thresholds<T>) -> Result<Self, CannyError> {
        if !(sigma.is_finite() && sigma > T::zero()) {
            return Err(CannyError::InvalidSigma(sigma.to_f64().unwrap_or(f64::NAN)));
        }
        let ok = match thresholds {
            Thresholds::Relative {
                high_frac,
                low_frac,
            } => {
                high_frac > T::zero()
                    && high_frac <= T::one()
                    && low_frac > T::zero()
                    && low_frac < T::one()
            }
            Thresholds::Absolute { low, high } => low > T::zero() && low < high && high.is_finite(),
        };
        if !ok {
            return Err(CannyError::InvalidThresholds(format!("{thresholds:?}")));
        }
        Ok(Self { sigma, thresholds })
    }

    pub fn relative(sigma: T, high_frac: T, low_frac: T) -> Result<Self, CannyError> {
        Self::new(
            sigma,
            Thresholds::Relative {
                high_frac,
                low_frac,
            },
        )
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn thresholds(&self) -> Thresholds<T> {
        self.thresholds
    }

    fn resolve(&self, max_magnitude: T) -> (T, T) {
        match self.thresholds {
            Thresholds::Relative {
                high_frac,
                low_frac,
            } => {
                let high = high_frac * max_magnitude;
                (low_frac * high, high)
            }
            Thresholds::Absolute { low, high } => (low, high),
        }
    }
}

impl<T: Real> Default for CannyParams<T> {
    fn default() -> Self {
        Self {
            sigma: T::one(),
            thresholds: Thresholds::Relative {
                high_frac: T::from_f64(0.2).unwrap(),
                low_frac: T::from_f64(0.4).unwrap(),
            },
        }
    }
}

/// Gradient direction quantized to four sectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    /// Gradient along x; neighbors left and right.
    Horizontal,
    /// Gradient along +x+y (image rows grow downward).
    Diagonal,
    Vertical,
    AntiDiagonal,
}

impl Sector {
    /// Unit step along the gradient direction.
    pub fn offset(self) -> (isize, isize) {
        match self {
            Sector::Horizontal => (1, 0),
            Sector::Diagonal => (1, 1),
            Sector::Vertical => (0, 1),
            Sector::AntiDiagonal => (-1, 1),
        }
    }

    fn from_gradient(gx: i64, gy: i64) -> Self {
        let mut deg = (gy as f64).atan2(gx as f64).to_degrees();
        if deg < 0.0 {
            deg += 180.0;
        }
        if !(22.5..157.5).contains(&deg) {
            Sector::Horizontal
        } else if deg < 67.5 {
            Sector::Diagonal
        } else if deg < 112.5 {
            Sector::Vertical
        } else {
            Sector::AntiDiagonal
        }
    }
}

/// Intermediate stages of one Canny run.
#[derive(Debug, Clone)]
pub struct CannyStages<T> {
    /// Gradient magnitude in integer-kernel units.
    pub magnitude: FloatImage<T>,
    pub sectors: Image<Sector>,
    /// Pixels surviving non-maximum suppression.
    pub thin: BinaryImage,
    pub low: T,
    pub high: T,
    pub edges: BinaryImage,
}

fn gaussian_kernel<T: Real>(sigma: T) -> Vec<i64> {
    let sigma = sigma.to_f64().unwrap();
    let radius = (3.0 * sigma).ceil() as i64;
    let scale = f64::from(1u32 << KERNEL_FRACTION_BITS);
    (-radius..=radius)
        .map(|i| {
            let w = (-((i * i) as f64) / (2.0 * sigma * sigma)).exp();
            (w * scale + 0.5).floor() as i64
        })
        .collect()
}

fn convolve_rows(src: &Image<i64>, kernel: &[i64]) -> Image<i64> {
    let r = (kernel.len() / 2) as isize;
    Image::from_fn(src.width(), src.height(), |x, y| {
        kernel
            .iter()
            .enumerate()
            .map(|(k, &w)| w * src.get_clamped(x as isize + k as isize - r, y as isize))
            .sum()
    })
}

fn convolve_cols(src: &Image<i64>, kernel: &[i64]) -> Image<i64> {
    let r = (kernel.len() / 2) as isize;
    Image::from_fn(src.width(), src.height(), |x, y| {
        kernel
            .iter()
            .enumerate()
            .map(|(k, &w)| w * src.get_clamped(x as isize, y as isize + k as isize - r))
            .sum()
    })
}

/// Runs every Canny stage and keeps the intermediates.
pub fn canny_stages<T: Real>(img: &GrayImage, params: &CannyParams<T>) -> CannyStages<T> {
    let (w, h) = (img.width(), img.height());
    let kernel = gaussian_kernel(params.sigma);
    let raw = img.map(i64::from);
    let smooth = convolve_cols(&convolve_rows(&raw, &kernel), &kernel);

    let s = |x: usize, y: usize, dx: isize, dy: isize| smooth.get_clamped(x as isize + dx, y as isize + dy);
    let mut gx = Image::filled(w, h, 0i64);
    let mut gy = Image::filled(w, h, 0i64);
    for y in 0..h {
        for x in 0..w {
            gx.set(
                x,
                y,
                (s(x, y, 1, -1) + 2 * s(x, y, 1, 0) + s(x, y, 1, 1))
                    - (s(x, y, -1, -1) + 2 * s(x, y, -1, 0) + s(x, y, -1, 1)),
            );
            gy.set(
                x,
                y,
                (s(x, y, -1, 1) + 2 * s(x, y, 0, 1) + s(x, y, 1, 1))
                    - (s(x, y, -1, -1) + 2 * s(x, y, 0, -1) + s(x, y, 1, -1)),
            );
        }
    }

    let magnitude: FloatImage<T> = Image::from_fn(w, h, |x, y| {
        let a = T::from_i64(gx.get(x, y)).unwrap();
        let b = T::from_i64(gy.get(x, y)).unwrap();
        a.hypot(b)
    });
    let sectors = Image::from_fn(w, h, |x, y| Sector::from_gradient(gx.get(x, y), gy.get(x, y)));

    let mag_at = |x: isize, y: isize| {
        if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
            T::zero()
        } else {
            magnitude.get(x as usize, y as usize)
        }
    };
    let thin = Image::from_fn(w, h, |x, y| {
        let m = magnitude.get(x, y);
        let (dx, dy) = sectors.get(x, y).offset();
        let (xi, yi) = (x as isize, y as isize);
        m > mag_at(xi - dx, yi - dy) && m >= mag_at(xi + dx, yi + dy)
    });

    let max_mag = magnitude
        .data()
        .iter()
        .copied()
        .fold(T::zero(), |a, b| a.max(b));
    let (low, high) = params.resolve(max_mag);

    let mut edges = Image::filled(w, h, false);
    let mut queue = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            if thin.get(x, y) && magnitude.get(x, y) >= high {
                edges.set(x, y, true);
                queue.push_back((x, y));
            }
        }
    }
    while let Some((x, y)) = queue.pop_front() {
        for dy in -1isize..=1 {
            for dx in -1isize..=1 {
                let (nx, ny) = (x as isize + dx, y as isize + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let (nx, ny) = (nx as usize, ny as usize);
                if !edges.get(nx, ny) && thin.get(nx, ny) && magnitude.get(nx, ny) >= low {
                    edges.set(nx, ny, true);
                    queue.push_back((nx, ny));
                }
            }
        }
    }

    CannyStages {
        magnitude,
        sectors,
        thin,
        low,
        high,
        edges,
    }
}

pub fn canny_edges<T: Real>(img: &GrayImage, params: &CannyParams<T>) -> BinaryImage {
    canny_stages(img, params).edges
}
