use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::entropy::{EntropyConfig, EntropyError, EntropyMode};
use crate::glcm::{GlcmConfig, GlcmError};
use crate::segmentation::{CannyError, CannyParams, Thresholds};
use crate::vq::MARGIN_LABEL;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Glcm(#[from] GlcmError),
    #[error(transparent)]
    Canny(#[from] CannyError),
    #[error("block dimensions must be at least 1, got {0}x{1}")]
    Block(usize, usize),
    #[error("need codebook size >= clusters >= 1, got codebook {codebook} and {clusters} clusters")]
    Sizes { codebook: usize, clusters: usize },
    #[error("at most {max} clusters fit in an 8-bit label image, got {0}", max = MARGIN_LABEL - 1)]
    TooManyClusters(usize),
    #[error("overlay cluster {id} is outside 1..={clusters}")]
    Overlay { id: usize, clusters: usize },
    #[error("invalid value {value:?} for {key}: {reason}")]
    Value {
        key: String,
        value: String,
        reason: String,
    },
    #[error("missing manifest key {0}")]
    MissingKey(String),
}

/// Which image fills the pixels of each cluster image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterSource {
    /// The equalized entropy image that was clustered.
    Entropy,
    Original,
}

impl ClusterSource {
    pub fn as_str(self) -> &'static str {
        match self {
            ClusterSource::Entropy => "entropy",
            ClusterSource::Original => "original",
        }
    }
}

impl FromStr for ClusterSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "entropy" => Ok(ClusterSource::Entropy),
            "original" => Ok(ClusterSource::Original),
            other => Err(format!("unknown cluster source {other:?} (expected entropy or original)")),
        }
    }
}

/// Everything that shapes the outputs, independent of file locations.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub entropy: EntropyConfig<f64>,
    pub block_w: usize,
    pub block_h: usize,
    pub codebook_size: usize,
    pub num_clusters: usize,
    pub canny: CannyParams<f64>,
    pub glcm: GlcmConfig,
    pub emit_glcm_baseline: bool,
    pub cluster_source: ClusterSource,
    /// 1-based cluster ids that get edge maps and overlays.
    pub overlay_clusters: Vec<usize>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            entropy: EntropyConfig::default(),
            block_w: 2,
            block_h: 2,
            codebook_size: 128,
            num_clusters: 8,
            canny: CannyParams::default(),
            glcm: GlcmConfig::default(),
            emit_glcm_baseline: true,
            cluster_source: ClusterSource::Entropy,
            overlay_clusters: vec![4, 8],
        }
    }
}

impl Settings {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.block_w == 0 || self.block_h == 0 {
            return Err(ConfigError::Block(self.block_w, self.block_h));
        }
        if self.num_clusters == 0 || self.codebook_size < self.num_clusters {
            return Err(ConfigError::Sizes {
                codebook: self.codebook_size,
                clusters: self.num_clusters,
            });
        }
        if self.num_clusters >= MARGIN_LABEL as usize {
            return Err(ConfigError::TooManyClusters(self.num_clusters));
        }
        if let Some(&id) = self
            .overlay_clusters
            .iter()
            .find(|&&id| id == 0 || id > self.num_clusters)
        {
            return Err(ConfigError::Overlay {
                id,
                clusters: self.num_clusters,
            });
        }
        Ok(())
    }

    /// Flat `config.*` entries for the run manifest.
    pub fn to_entries(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("config.entropy.window".into(), self.entropy.window_size().to_string()),
            ("config.entropy.mode".into(), self.entropy.mode().as_str().into()),
            ("config.entropy.log_base".into(), fmt_f64(self.entropy.log_base())),
            ("config.block".into(), format!("{}x{}", self.block_w, self.block_h)),
            ("config.codebook_size".into(), self.codebook_size.to_string()),
            ("config.num_clusters".into(), self.num_clusters.to_string()),
            ("config.canny.sigma".into(), fmt_f64(self.canny.sigma())),
            ("config.glcm.window".into(), self.glcm.window_size().to_string()),
            (
                "config.glcm.offset".into(),
                format!("{},{}", self.glcm.offset().0, self.glcm.offset().1),
            ),
            ("config.glcm.levels".into(), self.glcm.levels().to_string()),
            ("config.glcm.symmetric".into(), self.glcm.symmetric().to_string()),
            ("config.emit_glcm".into(), self.emit_glcm_baseline.to_string()),
            ("config.cluster_source".into(), self.cluster_source.as_str().into()),
            ("config.overlay".into(), join_ids(&self.overlay_clusters)),
        ];
        match self.canny.thresholds() {
            Thresholds::Relative {
                high_frac,
                low_frac,
            } => {
                out.push(("config.canny.thresholds".into(), "relative".into()));
                out.push(("config.canny.high".into(), fmt_f64(high_frac)));
                out.push(("config.canny.low".into(), fmt_f64(low_frac)));
            }
            Thresholds::Absolute { low, high } => {
                out.push(("config.canny.thresholds".into(), "absolute".into()));
                out.push(("config.canny.high".into(), fmt_f64(high)));
                out.push(("config.canny.low".into(), fmt_f64(low)));
            }
        }
        out
    }

    /// Inverse of [`Settings::to_entries`].
    pub fn from_entries(get: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let need = |key: &str| get(key).ok_or_else(|| ConfigError::MissingKey(key.into()));
        let window = parse_value::<usize>("config.entropy.window", &need("config.entropy.window")?)?;
        let mode = parse_value::<EntropyMode>("config.entropy.mode", &need("config.entropy.mode")?)?;
        let log_base = parse_value::<f64>("config.entropy.log_base", &need("config.entropy.log_base")?)?;
        let (block_w, block_h) = parse_block(&need("config.block")?)?;
        let sigma = parse_value::<f64>("config.canny.sigma", &need("config.canny.sigma")?)?;
        let high = parse_value::<f64>("config.canny.high", &need("config.canny.high")?)?;
        let low = parse_value::<f64>("config.canny.low", &need("config.canny.low")?)?;
        let thresholds = match need("config.canny.thresholds")?.as_str() {
            "relative" => Thresholds::Relative {
                high_frac: high,
                low_frac: low,
            },
            "absolute" => Thresholds::Absolute { low, high },
            other => {
                return Err(ConfigError::Value {
                    key: "config.canny.thresholds".into(),
                    value: other.into(),
                    reason: "expected relative or absolute".into(),
                })
            }
        };
        let settings = Settings {
            entropy: EntropyConfig::new(window, log_base, mode)?,
            block_w,
            block_h,
            codebook_size: parse_value("config.codebook_size", &need("config.codebook_size")?)?,
            num_clusters: parse_value("config.num_clusters", &need("config.num_clusters")?)?,
            canny: CannyParams::new(sigma, thresholds)?,
            glcm: GlcmConfig::new(
                parse_value("config.glcm.window", &need("config.glcm.window")?)?,
                parse_pair(&need("config.glcm.offset")?)?,
                parse_value("config.glcm.levels", &need("config.glcm.levels")?)?,
                parse_value("config.glcm.symmetric", &need("config.glcm.symmetric")?)?,
            )?,
            emit_glcm_baseline: parse_value("config.emit_glcm", &need("config.emit_glcm")?)?,
            cluster_source: parse_value("config.cluster_source", &need("config.cluster_source")?)?,
            overlay_clusters: parse_ids(&need("config.overlay")?)?,
        };
        settings.validate()?;
        Ok(settings)
    }
}

/// Input and output locations plus the settings.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub output_dir: PathBuf,
    pub settings: Settings,
}

impl PipelineConfig {
    pub fn new(input: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            output_dir: output_dir.into(),
            settings: Settings::default(),
        }
    }
}

pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn join_ids(ids: &[usize]) -> String {
    ids.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn parse_value<V: FromStr>(key: &str, value: &str) -> Result<V, ConfigError>
where
    V::Err: std::fmt::Display,
{
    value.trim().parse().map_err(|e: V::Err| ConfigError::Value {
        key: key.into(),
        value: value.into(),
        reason: e.to_string(),
    })
}

/// Parses `WxH`, e.g. `2x2`.
pub fn parse_block(s: &str) -> Result<(usize, usize), ConfigError> {
    let bad = |reason: &str| ConfigError::Value {
        key: "block".into(),
        value: s.into(),
        reason: reason.into(),
    };
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| bad("expected WxH"))?;
    let w: usize = w.trim().parse().map_err(|_| bad("width is not an integer"))?;
    let h: usize = h.trim().parse().map_err(|_| bad("height is not an integer"))?;
    if w == 0 || h == 0 {
        return Err(ConfigError::Block(w, h));
    }
    Ok((w, h))
}

/// Parses `dx,dy`.
pub fn parse_pair(s: &str) -> Result<(isize, isize), ConfigError> {
    let bad = || ConfigError::Value {
        key: "offset".into(),
        value: s.into(),
        reason: "expected two integers as dx,dy".into(),
    };
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

/// Parses a comma-separated id list; an empty string is an empty list.
pub fn parse_ids(s: &str) -> Result<Vec<usize>, ConfigError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|t| parse_value("overlay", t)).collect()
}
