//! Probability image, windowed Shannon entropy and histogram equalization.
//!
//! Two readings of the windowed entropy are provided:
//!
//! * [`EntropyMode::ProbabilitySum`] sums `-p log p` over the values of the
//!   global probability image inside the window. Values are small and are
//!   usually equalized before use.
//! * [`EntropyMode::LocalEmpirical`] builds the gray-level distribution of
//!   the window's own pixels and takes its Shannon entropy.
//!
//! Windows are centered on each pixel with replicate padding, so the output
//! has the same dimensions as the input.

use rayon::prelude::*;
use thiserror::Error;

use crate::image::{quantize_to_gray, FloatImage, GrayImage, Image};
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum EntropyError {
    #[error("window size must be odd and at least 3, got {0}")]
    InvalidWindow(usize),
    #[error("logarithm base must be finite and greater than 1, got {0}")]
    InvalidLogBase(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntropyMode {
    ProbabilitySum,
    LocalEmpirical,
}

impl EntropyMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EntropyMode::ProbabilitySum => "prob-sum",
            EntropyMode::LocalEmpirical => "local-empirical",
        }
    }
}

impl std::str::FromStr for EntropyMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "prob-sum" => Ok(EntropyMode::ProbabilitySum),
            "local-empirical" => Ok(EntropyMode::LocalEmpirical),
            other => Err(format!(
                "unknown entropy mode {other:?} (expected prob-sum or local-empirical)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyConfig<T> {
    window_size: usize,
    log_base: T,
    mode: EntropyMode,
}

impl<T: Real> EntropyConfig<T> {
    pub fn new(window_size: usize, log_base: T, mode: EntropyMode) -> Result<Self, EntropyError> {
        validate_window(window_size)?;
        if !(log_base.is_finite() && log_base > T::one()) {
            return Err(EntropyError::InvalidLogBase(log_base.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self {
            window_size,
            log_base,
            mode,
        })
    }

    pub fn window_size(&self) -> usize {
        self.window_size
    }

    pub fn log_base(&self) -> T {
        self.log_base
    }

    pub fn mode(&self) -> EntropyMode {
        self.mode
    }
}

impl<T: Real> Default for EntropyConfig<T> {
    fn default() -> Self {
        Self {
            window_size: 3,
            log_base: T::from_u8(2).unwrap(),
            mode: EntropyMode::ProbabilitySum,
        }
    }
}

pub(crate) fn validate_window(window_size: usize) -> Result<(), EntropyError> {
    if window_size < 3 || window_size.is_multiple_of(2) {
        Err(EntropyError::InvalidWindow(window_size))
    } else {
        Ok(())
    }
}

/// Gray-level counts of an 8-bit image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    bins: [u64; 256],
    total: u64,
}

impl Histogram {
    pub fn bins(&self) -> &[u64; 256] {
        &self.bins
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Relative frequency of gray level `g`.
    pub fn probability<T: Real>(&self, g: u8) -> T {
        T::from_u64(self.bins[g as usize]).unwrap() / T::from_u64(self.total).unwrap()
    }

    /// Inclusive cumulative counts.
    pub fn cumulative(&self) -> [u64; 256] {
        let mut cdf = [0u64; 256];
        let mut acc = 0;
        for (c, &b) in cdf.iter_mut().zip(self.bins.iter()) {
            acc += b;
            *c = acc;
        }
        cdf
    }
}

pub fn gray_histogram(img: &GrayImage) -> Histogram {
    let mut bins = [0u64; 256];
    for &g in img.data() {
        bins[g as usize] += 1;
    }
    Histogram {
        bins,
        total: img.len() as u64,
    }
}

/// Replaces every pixel by the global relative frequency of its gray level.
pub fn probability_image<T: Real>(img: &GrayImage) -> FloatImage<T> {
    let hist = gray_histogram(img);
    let mut lut = [T::zero(); 256];
    for (g, p) in lut.iter_mut().enumerate() {
        *p = hist.probability(g as u8);
    }
    img.map(|g| lut[g as usize])
}

/// Entropy image of `gray` under `cfg`, building the probability image first
/// when the mode needs one.
pub fn entropy_image<T: Real>(gray: &GrayImage, cfg: &EntropyConfig<T>) -> FloatImage<T> {
    match cfg.mode {
        EntropyMode::ProbabilitySum => {
            probability_sum_entropy(&probability_image(gray), cfg.window_size, cfg.log_base)
        }
        EntropyMode::LocalEmpirical => {
            local_empirical_entropy(gray, cfg.window_size, cfg.log_base)
        }
    }
}

/// `-p log p` in the requested base; `0 log 0` and `1 log 1` are both zero.
#[inline]
fn surprisal_term<T: Real>(p: T, ln_base: T) -> T {
    if p <= T::zero() || p == T::one() {
        T::zero()
    } else {
        -(p * p.ln()) / ln_base
    }
}

/// Sums `-p log_base p` of the probability image over each window.
pub fn probability_sum_entropy<T: Real>(
    prob: &FloatImage<T>,
    window_size: usize,
    log_base: T,
) -> FloatImage<T> {
    let ln_base = log_base.ln();
    let terms = prob.map(|p| surprisal_term(p, ln_base));
    windowed(prob.width(), prob.height(), window_size, |x, y, r| {
        let mut h = T::zero();
        for dy in -r..=r {
            for dx in -r..=r {
                h = h + terms.get_clamped(x + dx, y + dy);
            }
        }
        h
    })
}

/// Shannon entropy of each window's own gray-level distribution.
pub fn local_empirical_entropy<T: Real>(
    gray: &GrayImage,
    window_size: usize,
    log_base: T,
) -> FloatImage<T> {
    let ln_base = log_base.ln();
    let area = window_size * window_size;
    let area_t = T::from_count(area);
    windowed(gray.width(), gray.height(), window_size, |x, y, r| {
        let mut values = Vec::with_capacity(area);
        for dy in -r..=r {
            for dx in -r..=r {
                values.push(gray.get_clamped(x + dx, y + dy));
            }
        }
        values.sort_unstable();
        let mut h = T::zero();
        for run in values.chunk_by(|a, b| a == b) {
            h = h + surprisal_term(T::from_count(run.len()) / area_t, ln_base);
        }
        h
    })
}

fn windowed<T: Real>(
    width: usize,
    height: usize,
    window_size: usize,
    eval: impl Fn(isize, isize, isize) -> T + Sync,
) -> FloatImage<T> {
    let r = (window_size / 2) as isize;
    let data: Vec<T> = (0..height)
        .into_par_iter()
        .flat_map_iter(|y| {
            let eval = &eval;
            (0..width).map(move |x| eval(x as isize, y as isize, r))
        })
        .collect();
    Image::new(width, height, data).expect("geometry preserved")
}

/// Gray-level remapping through the inclusive cumulative histogram,
/// `round(255 * cdf(g) / N)` with round-half-up. Constant images are returned
/// unchanged.
pub fn histogram_equalize(img: &GrayImage) -> GrayImage {
    let hist = gray_histogram(img);
    if hist.bins.iter().filter(|&&b| b > 0).count() <= 1 {
        return img.clone();
    }
    img.map(|g| equalization_lut(&hist)[g as usize])
}

/// Lookup table used by [`histogram_equalize`].
pub fn equalization_lut(hist: &Histogram) -> [u8; 256] {
    let n = hist.total;
    let cdf = hist.cumulative();
    let mut lut = [0u8; 256];
    for (out, &c) in lut.iter_mut().zip(cdf.iter()) {
        // floor(255c/n + 1/2) in integers
        *out = ((510 * c + n) / (2 * n)) as u8;
    }
    lut
}

/// Quantizes a real-valued map onto 8 bits and equalizes it.
pub fn equalize_real<T: Real>(img: &FloatImage<T>) -> GrayImage {
    histogram_equalize(&quantize_to_gray(img))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert_eq!(
            EntropyConfig::new(4, 2.0f64, EntropyMode::ProbabilitySum),
            Err(EntropyError::InvalidWindow(4))
        );
        assert_eq!(
            EntropyConfig::new(1, 2.0f64, EntropyMode::ProbabilitySum),
            Err(EntropyError::InvalidWindow(1))
        );
        assert!(EntropyConfig::new(3, 1.0f64, EntropyMode::ProbabilitySum).is_err());
        assert!(EntropyConfig::new(7, 10.0f64, EntropyMode::LocalEmpirical).is_ok());
        let d = EntropyConfig::<f64>::default();
        assert_eq!((d.window_size(), d.log_base(), d.mode()), (3, 2.0, EntropyMode::ProbabilitySum));
    }

    #[test]
    fn histogram_counts() {
        let img = GrayImage::new(2, 2, vec![0, 0, 255, 0]).unwrap();
        let h = gray_histogram(&img);
        assert_eq!(h.bins()[0], 3);
        assert_eq!(h.bins()[255], 1);
        assert_eq!(h.bins().iter().sum::<u64>(), 4);
        assert_eq!(h.total(), 4);
        let c = gray_histogram(&GrayImage::filled(5, 3, 42));
        assert_eq!(c.bins()[42], 15);
        assert_eq!(c.bins().iter().filter(|&&b| b > 0).count(), 1);
    }

    #[test]
    fn probability_image_values() {
        let img = GrayImage::new(2, 2, vec![0, 0, 255, 0]).unwrap();
        assert_eq!(probability_image::<f64>(&img).data(), &[0.75, 0.75, 0.25, 0.75]);
        let img = GrayImage::filled(3, 3, 9);
        assert!(probability_image::<f64>(&img).data().iter().all(|&p| p == 1.0));
        let img = GrayImage::new(2, 2, vec![1, 2, 3, 4]).unwrap();
        assert!(probability_image::<f32>(&img).data().iter().all(|&p| p == 0.25));
    }

    #[test]
    fn constant_image_has_zero_entropy() {
        let img = GrayImage::filled(6, 5, 77);
        for mode in [EntropyMode::ProbabilitySum, EntropyMode::LocalEmpirical] {
            for w in [3, 5] {
                let cfg = EntropyConfig::new(w, 2.0f64, mode).unwrap();
                assert!(entropy_image(&img, &cfg).data().iter().all(|&h| h == 0.0));
            }
        }
    }

    #[test]
    fn uniform_ninths_window() {
        let prob = FloatImage::filled(3, 3, 1.0f64 / 9.0);
        let h = probability_sum_entropy(&prob, 3, 2.0);
        // center window sees nine values of 1/9: log2 9
        assert!((h.get(1, 1) - 9f64.log2()).abs() < 1e-12);
        assert!((h.get(1, 1) - 3.169925001442312).abs() < 1e-12);
    }

    #[test]
    fn local_empirical_five_four_split() {
        let img = GrayImage::new(3, 3, vec![10, 10, 10, 10, 10, 200, 200, 200, 200]).unwrap();
        let h = local_empirical_entropy(&img, 3, 2.0f64);
        let expected = -(5.0f64 / 9.0) * (5.0f64 / 9.0).log2() - (4.0f64 / 9.0) * (4.0f64 / 9.0).log2();
        assert!((h.get(1, 1) - expected).abs() < 1e-12);
        assert!((h.get(1, 1) - 0.9910760598382222).abs() < 1e-12);
    }

    #[test]
    fn equalize_ramp() {
        let img = GrayImage::new(4, 1, vec![0, 85, 170, 255]).unwrap();
        assert_eq!(histogram_equalize(&img).data(), &[64, 128, 191, 255]);
        let c = GrayImage::filled(4, 4, 13);
        assert_eq!(histogram_equalize(&c), c);
    }
}
